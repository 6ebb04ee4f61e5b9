import warnings

import numpy as np
import pytest
from conftest import random_atom, random_params

from cohamp.machine import (
    Liouvillian,
    MachineParams,
    RegimeWarning,
    SteadyStateError,
    apply_liouvillian,
    block_steady_state,
    build_liouvillian,
    gibbs_product,
    gibbs_qubit,
    machine_steady_state,
    steady_state,
    thermal_rates,
    validate_regime,
    warn_regime,
)
from cohamp.qstate import qubit_state, trace_distance


def _lowering(k):
    """sigma_k on the two-qubit machine, written out by hand."""
    m = np.zeros((4, 4), dtype=complex)
    if k == 1:  # |0x><1x|
        m[0, 2] = m[1, 3] = 1
    else:  # |x0><x1|
        m[0, 1] = m[2, 3] = 1
    return m


def _d(op, rho):
    return op @ rho @ op.conj().T - 0.5 * (op.conj().T @ op @ rho + rho @ op.conj().T @ op)


def reference_generator(p, rho_a):
    """Machine generator built independently of the package's superoperators."""
    s1, s2 = _lowering(1), _lowering(2)
    sv = s1.conj().T @ s2
    n1 = 1 / (np.exp(p.beta1 * p.E1) - 1)
    n2 = 1 / (np.exp(p.beta2 * p.E2) - 1)
    ground, excited = rho_a[0, 0].real, rho_a[1, 1].real
    c = rho_a[0, 1]  # <sigma_a^dag> = <0|rho|1>
    v = c * sv + np.conj(c) * sv.conj().T

    def rhs(rho):
        out = -1j * p.r * p.phi * (v @ rho - rho @ v)
        out += p.r * p.phi**2 * (ground * _d(sv, rho) + excited * _d(sv.conj().T, rho))
        out += p.gamma0_1 * ((n1 + 1) * _d(s1, rho) + n1 * _d(s1.conj().T, rho))
        out += p.gamma0_2 * ((n2 + 1) * _d(s2, rho) + n2 * _d(s2.conj().T, rho))
        return out

    return rhs


def rk4(rhs, rho, t_end, dt):
    for _ in range(int(round(t_end / dt))):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def test_thermal_rates_detailed_balance():
    down, up = thermal_rates(1.2, 1.5, 0.0025)
    assert down - up == pytest.approx(0.0025)
    assert down / up == pytest.approx(np.exp(1.8))
    for bad in [(0.0, 1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)]:
        with pytest.raises(ValueError):
            thermal_rates(*bad)


def test_gibbs_qubit_negative_beta_inverts():
    g = gibbs_qubit(-1.5, 1.0)
    assert g[1, 1].real > g[0, 0].real
    assert np.trace(g).real == pytest.approx(1.0)


def test_params_validation_and_beta_v():
    p = MachineParams()
    assert p.omega == pytest.approx(1.0)
    assert p.beta_v == pytest.approx((0.24 * 2.5 - 1.2 * 1.5) / 1.0)
    swapped = p.swapped_temperatures()
    assert (swapped.beta1, swapped.beta2) == (p.beta2, p.beta1)
    for bad in [dict(E1=0.0), dict(E2=1.0), dict(beta1=0.0), dict(gamma0_2=0.0), dict(r=-1.0), dict(phi=-0.1)]:
        with pytest.raises(ValueError):
            MachineParams(**bad)


def test_generator_matches_reference(params, rng):
    for _ in range(20):
        p = random_params(rng)
        rho_a = random_atom(rng)
        rho_m = np.asarray(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        rho_m = rho_m + rho_m.conj().T
        ref = reference_generator(p, rho_a)(rho_m)
        np.testing.assert_allclose(build_liouvillian(p, rho_a)(rho_m), ref, atol=1e-13)
        np.testing.assert_allclose(apply_liouvillian(p, rho_a, rho_m), ref, atol=1e-13)


def test_generator_is_trace_preserving(params, south_atom, rng):
    L = build_liouvillian(params, south_atom)
    for _ in range(5):
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert abs(np.trace(L(x))) < 1e-14


def test_no_atoms_gives_gibbs_product(params, south_atom):
    ss = machine_steady_state(params.with_(r=0.0), south_atom)
    np.testing.assert_allclose(ss.rho, gibbs_product(params), atol=1e-12)
    assert abs(ss.pi_v) < 1e-14


def test_steady_state_properties(params, south_atom):
    ss = machine_steady_state(params, south_atom)
    assert ss.residual < 1e-12
    assert np.linalg.eigvalsh(ss.rho).min() > 0
    assert ss.populations.sum() == pytest.approx(1.0, abs=1e-14)
    assert abs(ss.pi_v) > 1e-3
    assert ss.pi_v == ss.rho[1, 2]
    # only the virtual-qubit pair carries coherence
    off = ss.rho.copy()
    off[np.diag_indices(4)] = 0
    off[1, 2] = off[2, 1] = 0
    assert np.abs(off).max() < 1e-14


def test_incoherent_atoms_give_no_machine_coherence(params):
    ss = machine_steady_state(params, qubit_state(-0.3))
    assert abs(ss.pi_v) < 1e-14


def test_steady_state_against_rk4(params, south_atom):
    # start from the bath-only state: the spectral gap is ~1.8 gamma0, so at
    # t = 10/gamma0 the initial offset has decayed far below the tolerance
    rhs = reference_generator(params, south_atom)
    t_end = 10 / params.gamma0_1
    rho = rk4(rhs, gibbs_product(params), t_end, dt=2.0)
    ss = machine_steady_state(params, south_atom)
    assert trace_distance(rho, ss.rho) < 1e-8


def test_block_path_matches_full(rng):
    for _ in range(50):
        p = random_params(rng)
        rho_a = random_atom(rng)
        np.testing.assert_allclose(block_steady_state(p, rho_a), machine_steady_state(p, rho_a).rho, atol=1e-12)


def test_degenerate_nullspace_raises(params):
    with pytest.raises(SteadyStateError):
        steady_state(Liouvillian(np.zeros((16, 16), dtype=complex), params))


def test_regime_warnings(params):
    assert validate_regime(params) == []
    loud = params.with_(phi=0.5, gamma0_1=0.1)
    msgs = validate_regime(loud)
    assert len(msgs) >= 2
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        warn_regime(loud)
    assert all(issubclass(w.category, RegimeWarning) for w in caught) and caught
