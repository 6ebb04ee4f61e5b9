"""Stationary energy, entropy and coherence rates of the atom stream.

All rates are ensemble rates: per-atom changes multiplied by the arrival
rate ``r``. Heat flows are counted positive into the machine.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .atomchannel import AtomChannel, apply_channel, channel_increment
from .coherence import full_dephase
from .machine import (
    SIGMA_1,
    SIGMA_2,
    MachineParams,
    MachineSteadyState,
    apply_dissipator,
    atom_hamiltonian,
    atom_moments,
    machine_hamiltonian,
    machine_steady_state,
    thermal_rates,
)
from .qstate import entropy_from_probs, von_neumann_entropy

CLOSED_FORM_TOL = 1e-9
REALNESS_TOL = 1e-12
DEGENERATE_GAP = 1e-12


class FlowInvariantError(RuntimeError):
    pass


class DegenerateSpectrumError(ValueError):
    pass


def _flux_scale(*values) -> float:
    return max(1.0, *(abs(v) for v in values))


def delta_zeta(ss: MachineSteadyState, rho_a, p: MachineParams) -> tuple[float, float]:
    """Population-bias and coherence contributions to the excitation current.

    ``Delta_p = r phi^2 (pi01 <s s^dag> - pi10 <s^dag s>)`` and
    ``zeta_c = i r phi (conj(pi_v) <s> - pi_v <s^dag>)``.
    """
    g, e, s = atom_moments(rho_a)
    delta_p = p.r * p.phi**2 * (ss.pi01 * g - ss.pi10 * e)
    zeta = 1j * p.r * p.phi * (np.conj(ss.pi_v) * s - ss.pi_v * np.conj(s))
    if abs(zeta.imag) > REALNESS_TOL:
        raise FlowInvariantError(f"zeta_c has imaginary part {zeta.imag:.3e}")
    return float(delta_p), float(zeta.real)


def heat_flows(ss: MachineSteadyState, p: MachineParams, rho_a=None) -> tuple[float, float]:
    """``(Qdot1, Qdot2)`` from ``Tr[H_m D_k(pi_m)]``.

    With ``rho_a`` supplied, the stationary closed forms
    ``Qdot2 = E2 (Delta_p + zeta_c)`` and ``Qdot1 = -E1 (Delta_p + zeta_c)``
    are evaluated as well and must agree within 1e-9.
    """
    h_m = machine_hamiltonian(p.E1, p.E2)
    d1 = apply_dissipator(ss.rho, SIGMA_1, *thermal_rates(p.beta1, p.E1, p.gamma0_1))
    d2 = apply_dissipator(ss.rho, SIGMA_2, *thermal_rates(p.beta2, p.E2, p.gamma0_2))
    q1 = float(np.trace(h_m @ d1).real)
    q2 = float(np.trace(h_m @ d2).real)
    if rho_a is not None:
        current = sum(delta_zeta(ss, rho_a, p))
        tol = CLOSED_FORM_TOL * _flux_scale(q1, q2)
        if abs(q1 + p.E1 * current) > tol or abs(q2 - p.E2 * current) > tol:
            raise FlowInvariantError("heat flows disagree with the closed-form single-transition values")
    return q1, q2


def stage_channel(ss: MachineSteadyState, p: MachineParams, variant: str = "perturbative") -> AtomChannel:
    return AtomChannel(ss.rho, p.phi, variant)


def atom_energy_rate(ss: MachineSteadyState, rho_a, p: MachineParams) -> float:
    """``r Tr[H_a (A(rho_a) - rho_a)]``, cross-checked against ``(E2 - E1)(Delta_p + zeta_c)``."""
    apply_channel(stage_channel(ss, p), rho_a)  # positivity guard
    h_a = atom_hamiltonian(p.omega)
    rate = p.r * float(np.trace(h_a @ channel_increment(stage_channel(ss, p), rho_a)).real)
    closed = p.omega * sum(delta_zeta(ss, rho_a, p))
    if abs(rate - closed) > CLOSED_FORM_TOL * _flux_scale(rate):
        raise FlowInvariantError(f"atom energy rate {rate!r} disagrees with closed form {closed!r}")
    return rate


def unperturbed_eigenvalues(rho_a) -> tuple[float, float]:
    """``(lambda_+, lambda_-)`` of a qubit state from its bias and coherence."""
    g, e, s = atom_moments(rho_a)
    radius = np.sqrt((e - g) ** 2 + 4 * abs(s) ** 2)
    return 0.5 * (1 + radius), 0.5 * (1 - radius)


def atom_entropy_rate(ss: MachineSteadyState, rho_a, p: MachineParams, method: str = "perturbative") -> float:
    """Entropy production rate of the atom stream.

    ``exact`` evaluates ``-r Tr[A ln A - rho ln rho]`` on the map output;
    ``perturbative`` uses the second-order eigenvalue expansion, which needs a
    non-degenerate input spectrum.
    """
    if p.phi == 0 or p.r == 0:
        return 0.0
    if method == "exact":
        out = apply_channel(stage_channel(ss, p), rho_a)
        return p.r * (von_neumann_entropy(out) - von_neumann_entropy(rho_a))
    if method != "perturbative":
        raise ValueError(f"unknown method {method!r}")
    lam_p, lam_m = unperturbed_eigenvalues(rho_a)
    split = lam_p - lam_m
    if split < DEGENERATE_GAP:
        raise DegenerateSpectrumError("maximally mixed atom: perturbative entropy rate undefined")
    if lam_m <= 0:
        raise DegenerateSpectrumError("pure atom state: perturbative entropy rate diverges")
    g, e, s = atom_moments(rho_a)
    delta_p, _ = delta_zeta(ss, rho_a, p)
    n_p = p.r * p.phi**2 * (ss.pi10 + ss.pi01)
    bracket = (delta_p * (e - g) - n_p * abs(s) ** 2) / split
    bracket += p.r * p.phi**2 * abs(ss.pi_v) ** 2 * split
    return float(bracket * np.log(lam_m / lam_p))


def dephased_entropy_rate(ss: MachineSteadyState, rho_a, p: MachineParams) -> float:
    """Entropy rate of the energy-dephased atom, ``(Delta_p + zeta_c) ln(<s s^dag>/<s^dag s>)``."""
    g, e, _ = atom_moments(rho_a)
    current = sum(delta_zeta(ss, rho_a, p))
    if current == 0.0:
        return 0.0
    return float(current * np.log(g / e))


def exact_dephased_entropy_rate(ss: MachineSteadyState, rho_a, p: MachineParams) -> float:
    out = apply_channel(stage_channel(ss, p), rho_a)
    return p.r * (
        entropy_from_probs(full_dephase(out).diagonal().real)
        - entropy_from_probs(full_dephase(rho_a).diagonal().real)
    )


def noneq_free_energy(rho, h_a, temperature: float) -> float:
    """``Tr[H rho] - T S(rho)``."""
    return float(np.trace(np.asarray(h_a) @ np.asarray(rho)).real) - temperature * von_neumann_entropy(rho)


@dataclass(frozen=True)
class FlowReport:
    Qdot1: float
    Qdot2: float
    Edot_a: float
    Sdot_a: float
    Sdot_bar: float
    Cdot_a: float
    Cdot_max: float
    Sdot_tot: float
    Delta_p: float
    zeta_c: float
    Fdot: float
    Fdot_bar: float
    method: str

    def as_dict(self) -> dict:
        return asdict(self)

    def scaled(self, factor: float) -> "FlowReport":
        """Every rate multiplied by ``factor`` (e.g. ``1/r`` for per-atom changes)."""
        d = self.as_dict()
        method = d.pop("method")
        return FlowReport(**{k: v * factor for k, v in d.items()}, method=method)

    def check(self, scale: float | None = None) -> None:
        """Raise :class:`FlowInvariantError` naming the first broken identity."""
        flux = scale if scale is not None else _flux_scale(self.Qdot1, self.Qdot2, self.Edot_a)
        if abs(self.Edot_a - self.Qdot1 - self.Qdot2) > CLOSED_FORM_TOL * flux:
            raise FlowInvariantError(
                f"first law violated: Edot_a - Qdot1 - Qdot2 = {self.Edot_a - self.Qdot1 - self.Qdot2:.3e}"
            )
        if self.Sdot_tot < -1e-12:
            raise FlowInvariantError(f"second law violated: Sdot_tot = {self.Sdot_tot:.3e}")
        if self.Cdot_a > self.Cdot_max + 1e-12:
            raise FlowInvariantError(
                f"coherence bound violated: Cdot_a - Cdot_max = {self.Cdot_a - self.Cdot_max:.3e}"
            )
        gap = self.Sdot_tot - (self.Cdot_max - self.Cdot_a)
        if abs(gap) > CLOSED_FORM_TOL:
            raise FlowInvariantError(f"entropy-production identity violated by {gap:.3e}")


def flow_report(p: MachineParams, rho_a, method: str | None = None, ss: MachineSteadyState | None = None,
                check: bool = True) -> FlowReport:
    """Assemble every stationary rate for atoms prepared in ``rho_a``.

    ``method=None`` picks the perturbative entropy route unless the input
    spectrum is degenerate or pure, where the exact route is used. The exact
    route evaluates the dephased entropy rate exactly too, so both
    ``Sdot_a`` and ``Sdot_bar`` come from one consistent calculation.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    if ss is None:
        ss = machine_steady_state(p, rho_a)
    if method is None:
        lam_p, lam_m = unperturbed_eigenvalues(rho_a)
        method = "perturbative" if (lam_p - lam_m > 1e-6 and lam_m > 1e-9) else "exact"
    delta_p, zeta = delta_zeta(ss, rho_a, p)
    q1, q2 = heat_flows(ss, p, rho_a)
    e_rate = atom_energy_rate(ss, rho_a, p)
    s_rate = atom_entropy_rate(ss, rho_a, p, method)
    if method == "perturbative":
        s_bar = dephased_entropy_rate(ss, rho_a, p)
    else:
        s_bar = exact_dephased_entropy_rate(ss, rho_a, p)
    t1 = 1.0 / p.beta1
    f_bar = e_rate - t1 * s_bar
    report = FlowReport(
        Qdot1=q1,
        Qdot2=q2,
        Edot_a=e_rate,
        Sdot_a=s_rate,
        Sdot_bar=s_bar,
        Cdot_a=s_bar - s_rate,
        Cdot_max=(p.beta1 - p.beta2) * q2 - p.beta1 * f_bar,
        Sdot_tot=s_rate - p.beta1 * q1 - p.beta2 * q2,
        Delta_p=delta_p,
        zeta_c=zeta,
        Fdot=e_rate - t1 * s_rate,
        Fdot_bar=f_bar,
        method=method,
    )
    if check:
        report.check()
    return report
