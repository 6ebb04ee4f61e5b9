"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary. Running this file directly prints the same lines without pytest.
"""

import io
import time

import numpy as np
from conftest import ACCEPTANCE_LINES, random_atom, random_params
from scipy.optimize import brentq

from cohamp import cli
from cohamp.atomchannel import AtomChannel, apply_channel, joint_unitary, total_hamiltonian
from cohamp.benchlab import (
    ThetaFamilyParams,
    coherence_ratios,
    coherence_ratios_matrix,
    degenerate_hamiltonian,
    delta_c_closed,
    delta_c_matrix,
    delta_c_root,
)
from cohamp.cascade import converge, fixed_point, propagate
from cohamp.coherence import local_increase_identity, mutual_information, partial_dephase, rea, rec
from cohamp.machine import MachineParams, gibbs_product, machine_steady_state
from cohamp.qstate import partial_trace, qubit_state, random_density_matrix, random_unitary, trace_distance
from cohamp.thermo import flow_report

STARTED = time.perf_counter()
LN2 = np.log(2)


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def covariant_pair_unitary(rng):
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    u[3, 3] = np.exp(1j * rng.uniform(0, 2 * np.pi))
    u[1:3, 1:3] = random_unitary(2, rng)
    return u


def test_criterion_01_plus_plus_numbers():
    plus = np.array([1, 1]) / np.sqrt(2)
    psi = np.kron(plus, plus)
    rho = np.outer(psi, psi)
    h = degenerate_hamiltonian()
    errs = (
        abs(rec(rho) - 2 * LN2),
        abs(rea(rho, h) - 1.5 * LN2),
        abs(mutual_information(partial_dephase(rho, h), (2, 2)) - LN2 / 2),
    )
    record(1, max(errs) <= 1e-10, f"|++> C, A, I(dephased) errors {max(errs):.1e} <= 1e-10")


def test_criterion_02_delta_c_root():
    root = delta_c_root()
    cs = np.linspace(0.0, 0.5, 201)
    gap = max(abs(delta_c_closed(c) - delta_c_matrix(c)) for c in cs)
    ok = 0.4508 <= root <= 0.4518 and gap <= 1e-10
    record(2, ok, f"root c* = {root:.6f} in [0.4508, 0.4518], closed vs matrix gap {gap:.1e}")


def test_criterion_03_opposite_bias_theorem():
    rng = np.random.default_rng(3)
    n = 100_000
    sign = rng.choice([-1.0, 1.0], n)
    da = sign * rng.uniform(0, 1, n)
    db = sign * rng.uniform(0, 1, n)
    alpha = rng.uniform(0.05, 10, n)
    varphi = rng.uniform(0, 2 * np.pi, n)
    theta = rng.uniform(0, 2 * np.pi, n)
    violations = 0
    for k in range(n):
        ra, rb = coherence_ratios(ThetaFamilyParams(da[k], db[k], alpha[k], varphi[k], theta[k]))
        violations += ra > 1 + 1e-12 and rb > 1 + 1e-12
    # spot-check the closed form against matrix evolution
    for k in range(0, n, 200):
        p = ThetaFamilyParams(da[k], db[k], alpha[k], varphi[k], theta[k])
        if p.max_coherence_A() > 1e-3:
            assert np.allclose(coherence_ratios(p), coherence_ratios_matrix(p), atol=1e-9)
    thetas = np.linspace(0, np.pi, 1441)
    both = [t for t in thetas if min(coherence_ratios(ThetaFamilyParams(-0.9, 0.8, 1.0, np.pi / 2, t))) > 1]
    ok = violations == 0 and len(both) > 0
    span = f"[{both[0]:.3f}, {both[-1]:.3f}]" if both else "none"
    record(3, ok, f"{violations} same-sign violations in {n}; opposite-bias common theta interval {span}")


def test_criterion_04_conservation_suite():
    rng = np.random.default_rng(4)
    worst = dict(first=0.0, second=0.0, bound=-np.inf, identity=0.0, prop=0.0)
    for _ in range(1000):
        p = random_params(rng)
        f = flow_report(p, random_atom(rng), check=False)
        worst["first"] = max(worst["first"], abs(f.Edot_a - f.Qdot1 - f.Qdot2))
        worst["second"] = min(worst["second"], f.Sdot_tot)
        worst["bound"] = max(worst["bound"], f.Cdot_a - f.Cdot_max)
        worst["identity"] = max(worst["identity"], abs(f.Sdot_tot - (f.Cdot_max - f.Cdot_a)))
        j = (f.Edot_a / p.omega, f.Qdot2 / p.E2, -f.Qdot1 / p.E1)
        scale = max(abs(v) for v in j)
        if scale > 0:
            worst["prop"] = max(worst["prop"], (max(j) - min(j)) / scale)
    ok = (
        worst["first"] <= 1e-9
        and worst["second"] >= -1e-12
        and worst["bound"] <= 1e-12
        and worst["identity"] <= 1e-9
        and worst["prop"] <= 1e-9
    )
    record(4, ok, "1000 configs; worst " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_05_global_rea_conserved():
    rng = np.random.default_rng(5)
    h = total_hamiltonian(1.5, 2.5)
    worst = 0.0
    for _ in range(500):
        rho = np.kron(random_density_matrix(4, rng), random_density_matrix(2, rng))
        u = joint_unitary(rng.uniform(0, np.pi))
        worst = max(worst, abs(rea(u @ rho @ u.conj().T, h) - rea(rho, h)))
    # virtual qubit mostly excited, atom mostly ground, quarter-turn relative phase
    rho_m = np.zeros((4, 4), dtype=complex)
    rho_v = qubit_state(0.8, 0.15)
    rho_m[np.ix_([2, 1], [2, 1])] = rho_v
    rho_a = qubit_state(-0.9, 0.1j)
    u = joint_unitary(0.6)
    out = u @ np.kron(rho_m, rho_a) @ u.conj().T
    gain = rec(partial_trace(out, (4, 2), "A")) + rec(partial_trace(out, (4, 2), "B")) - rec(rho_m) - rec(rho_a)
    ok = worst <= 1e-10 and gain > 0
    record(5, ok, f"max |dA_global| {worst:.1e} <= 1e-10; opposite-bias local REC gain {gain:.3e} > 0")


def test_criterion_06_oracles():
    p = MachineParams()
    rho_a = qubit_state(-0.6, 0.2)
    L = machine_steady_state(p, rho_a)

    from test_machine import reference_generator, rk4

    rho = rk4(reference_generator(p, rho_a), gibbs_product(p), 10 / p.gamma0_1, dt=2.0)
    dist = trace_distance(rho, L.rho)
    errs = []
    for phi in (0.01, 0.02, 0.04):
        pert = apply_channel(AtomChannel(L.rho, phi), rho_a)
        exact = apply_channel(AtomChannel(L.rho, phi, "exact"), rho_a)
        errs.append(trace_distance(pert, exact))
    slopes = np.log2(np.array(errs[1:]) / np.array(errs[:-1]))
    k = max(e / phi**3 for e, phi in zip(errs, (0.01, 0.02, 0.04)))
    ok = dist <= 1e-8 and np.all(np.abs(slopes - 3) < 0.3)
    record(6, ok, f"RK4 distance {dist:.1e} <= 1e-8; channel error slopes {slopes.round(3).tolist()}, K = {k:.3f}")


def _cdot(p, rho_a, b, name):
    return getattr(flow_report(p.with_(beta2=b * p.beta1), rho_a), name)


def test_criterion_07_figure2_qualitative():
    p = MachineParams()
    south = qubit_state(-0.6, 0.2)
    north = qubit_state(0.6, 0.2)
    amp_south = _cdot(p, south, 0.2, "Cdot_a")
    grid = np.linspace(0.05, 1.0, 96)
    cmax = np.array([_cdot(p, south, b, "Cdot_max") for b in grid])
    flips = np.nonzero(np.sign(cmax[:-1]) != np.sign(cmax[1:]))[0]
    crossings = [brentq(lambda b: _cdot(p, south, b, "Cdot_max"), grid[i], grid[i + 1], xtol=1e-10) for i in flips]
    amp_north = [_cdot(p, north, b, "Cdot_a") for b in (0.9, 0.95, 1.0)]
    ok = amp_south > 0 and len(crossings) == 1 and abs(crossings[0] - 0.60) <= 0.05 and min(amp_north) > 0
    record(
        7,
        ok,
        f"south Cdot_a(0.2) = {amp_south:.2e} > 0; Cdot_max zero at {[round(c, 4) for c in crossings]}; "
        f"north Cdot_a near 1 min {min(amp_north):.2e} > 0",
    )


def test_criterion_08_cascade_fixed_point():
    p = MachineParams(beta2=0.12)
    traj = converge(qubit_state(-0.3, 0.3), p, tol=1e-6)
    dist = trace_distance(traj.final, fixed_point(p))
    worst_c = 0.0
    for z in (-0.8, -0.2, 0.5):
        worst_c = max(worst_c, propagate(qubit_state(z), p, 2000, record_flows=False).coherences.max())
    ok = traj.converged and dist < 1e-6 and worst_c <= 1e-12
    record(8, ok, f"converged in {traj.stages_run} stages, distance {dist:.1e}; incoherent max |c| {worst_c:.1e}")


def test_criterion_09_local_increase_identity():
    rng = np.random.default_rng(9)
    h = degenerate_hamiltonian()
    worst = 0.0
    for _ in range(1000):
        res = local_increase_identity(
            covariant_pair_unitary(rng), random_density_matrix(2, rng), random_density_matrix(2, rng), h
        )
        worst = max(worst, abs(res.lhs - res.rhs))
    record(9, worst <= 1e-10, f"max |dC_a + dC_m - (I' dephased - I dephased - I')| = {worst:.1e} <= 1e-10")


def _cli_outputs(tmp):
    texts = {}
    for cmd in ("sweep", "bloch-map", "trajectories"):
        out = io.StringIO()
        assert cli.main([cmd], stdout=out, stderr=io.StringIO()) == 0
        texts[cmd] = out.getvalue().encode()
    assert cli.main(["appendix", "--output", str(tmp)], stdout=io.StringIO(), stderr=io.StringIO()) == 0
    for name in cli.APPENDIX_FILES:
        texts[name] = (tmp / name).read_bytes()
    return texts


def test_criterion_10_cli_determinism_and_runtime(tmp_path):
    first = _cli_outputs(tmp_path / "a")
    second = _cli_outputs(tmp_path / "b")
    same = all(first[k] == second[k] for k in first)
    elapsed = time.perf_counter() - STARTED
    record(10, same and elapsed < 60, f"{len(first)} CSV outputs byte-identical: {same}; suite time {elapsed:.1f} s < 60 s")


if __name__ == "__main__":
    import pathlib
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(pathlib.Path(d))
                else:
                    fn()
            except AssertionError:
                pass
