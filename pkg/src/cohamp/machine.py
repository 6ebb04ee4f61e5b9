"""Two-qubit machine: Hamiltonian, bath rates, Liouvillian and steady state.

Machine basis ordering is ``|0>1|0>2, |0>1|1>2, |1>1|0>2, |1>1|1>2``. The
virtual qubit lives on the middle levels with ``|0>_v = |1>1|0>2`` (index 2)
and ``|1>_v = |0>1|1>2`` (index 1), gap ``E2 - E1``.

Superoperators act on column-stacked states: ``vec(A rho B^dag) = (conj(B) ⊗ A) vec(rho)``.
Everything is in the interaction picture with respect to ``H_m + H_a``.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
import warnings

import numpy as np

from .qstate import LOWER, as_density_matrix

NULLSPACE_GAP = 1e-8
RESIDUAL_TOL = 1e-10
BLOCK_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_1 = np.kron(LOWER, I2)
SIGMA_2 = np.kron(I2, LOWER)
SIGMA_V = SIGMA_1.conj().T @ SIGMA_2  # |10><01|
VIRTUAL_BLOCK = (1, 2)


class SteadyStateError(RuntimeError):
    pass


class RegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MachineParams:
    """Machine constants in units with hbar = k_B = 1.

    ``beta1 >= beta2`` is the usual hot-qubit-2 arrangement; the reverse is
    accepted so the temperature-swapped machine can be modelled.
    """

    E1: float = 1.5
    E2: float = 2.5
    beta1: float = 1.2
    beta2: float = 0.24
    gamma0_1: float = 0.0025
    gamma0_2: float = 0.0025
    r: float = 2.0
    phi: float = 0.02

    def __post_init__(self):
        if not self.E1 > 0:
            raise ValueError("E1 must be positive")
        if not self.E2 > self.E1:
            raise ValueError("E2 must exceed E1 (the virtual gap E2 - E1 must be positive)")
        if self.beta1 <= 0 or self.beta2 <= 0:
            raise ValueError("inverse temperatures must be positive")
        if self.gamma0_1 <= 0 or self.gamma0_2 <= 0:
            raise ValueError("spontaneous emission rates must be positive")
        if self.r < 0 or self.phi < 0:
            raise ValueError("r and phi must be non-negative")

    @property
    def omega(self) -> float:
        """Virtual qubit (and atom) gap."""
        return self.E2 - self.E1

    @property
    def beta_v(self) -> float:
        return virtual_temperature(self)

    def swapped_temperatures(self) -> "MachineParams":
        return replace(self, beta1=self.beta2, beta2=self.beta1)

    def with_(self, **changes) -> "MachineParams":
        return replace(self, **changes)


def machine_hamiltonian(e1: float, e2: float) -> np.ndarray:
    return np.diag([0.0, e2, e1, e1 + e2]).astype(complex)


def atom_hamiltonian(omega: float) -> np.ndarray:
    return np.diag([0.0, omega]).astype(complex)


def virtual_temperature(p: MachineParams) -> float:
    return (p.beta2 * p.E2 - p.beta1 * p.E1) / (p.E2 - p.E1)


def thermal_rates(beta: float, energy: float, gamma0: float) -> tuple[float, float]:
    """Return ``(gamma_down, gamma_up)`` for a bosonic bath.

    ``gamma_down - gamma_up == gamma0`` and ``gamma_down = gamma_up * exp(beta E)``.
    """
    if energy <= 0 or gamma0 <= 0:
        raise ValueError("energy and gamma0 must be positive")
    if beta == 0:
        raise ValueError("infinite-temperature bath (beta = 0) is not supported")
    x = beta * energy
    if x <= 0:
        raise ValueError("beta * E must be positive for a finite thermal occupation")
    n_th = 1.0 / np.expm1(x)
    return gamma0 * (n_th + 1.0), gamma0 * n_th


def gibbs_qubit(beta: float, energy: float) -> np.ndarray:
    """Diagonal Gibbs state of a qubit; negative ``beta`` gives inversion."""
    p1 = 1.0 / (1.0 + np.exp(beta * energy))
    return np.diag([1.0 - p1, p1]).astype(complex)


def gibbs_product(p: MachineParams) -> np.ndarray:
    return np.kron(gibbs_qubit(p.beta1, p.E1), gibbs_qubit(p.beta2, p.E2))


# superoperator helpers -------------------------------------------------------

def vec(m) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def spre(a) -> np.ndarray:
    return np.kron(np.eye(a.shape[0]), a)


def spost(a) -> np.ndarray:
    return np.kron(a.T, np.eye(a.shape[0]))


def commutator_super(h) -> np.ndarray:
    """Superoperator of ``-i [h, .]``."""
    return -1j * (spre(h) - spost(h))


def lindblad_super(op) -> np.ndarray:
    """Superoperator of ``op . op^dag - {op^dag op, .}/2``."""
    op = np.asarray(op, dtype=complex)
    ld = op.conj().T @ op
    return np.kron(op.conj(), op) - 0.5 * (spre(ld) + spost(ld))


def thermal_dissipator_super(lower, gamma_down: float, gamma_up: float) -> np.ndarray:
    return gamma_down * lindblad_super(lower) + gamma_up * lindblad_super(lower.conj().T)


def apply_dissipator(rho, lower, gamma_down: float, gamma_up: float) -> np.ndarray:
    raise_ = lower.conj().T
    out = gamma_down * (lower @ rho @ raise_ - 0.5 * (raise_ @ lower @ rho + rho @ raise_ @ lower))
    out += gamma_up * (raise_ @ rho @ lower - 0.5 * (lower @ raise_ @ rho + rho @ lower @ raise_))
    return out


@lru_cache(maxsize=256)
def _liouvillian_parts(p: MachineParams):
    d1 = thermal_dissipator_super(SIGMA_1, *thermal_rates(p.beta1, p.E1, p.gamma0_1))
    d2 = thermal_dissipator_super(SIGMA_2, *thermal_rates(p.beta2, p.E2, p.gamma0_2))
    bath = d1 + d2
    rphi2 = p.r * p.phi**2
    down_v = rphi2 * lindblad_super(SIGMA_V)
    up_v = rphi2 * lindblad_super(SIGMA_V.conj().T)
    # -i r phi [sigma_v <sigma_a^dag> + sigma_v^dag <sigma_a>, .]
    drive_c = p.r * p.phi * commutator_super(SIGMA_V)
    drive_cc = p.r * p.phi * commutator_super(SIGMA_V.conj().T)
    for m in (bath, down_v, up_v, drive_c, drive_cc):
        m.setflags(write=False)
    return bath, down_v, up_v, drive_c, drive_cc


def atom_moments(rho_a) -> tuple[float, float, complex]:
    """``(<s s^dag>, <s^dag s>, <s>)`` for the atom lowering operator ``s``.

    These are the ground population, excited population and ``conj(rho[0, 1])``.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    return float(rho_a[0, 0].real), float(rho_a[1, 1].real), complex(rho_a[1, 0])


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    params: MachineParams

    def __call__(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), 4)


def build_liouvillian(p: MachineParams, rho_a) -> Liouvillian:
    """Machine generator driven by a stream of atoms in state ``rho_a``."""
    p0, p1, s = atom_moments(rho_a)
    bath, down_v, up_v, drive_c, drive_cc = _liouvillian_parts(p)
    # V_m = sigma_v <sigma_a^dag> + sigma_v^dag <sigma_a>, and <sigma_a^dag> = conj(<sigma_a>)
    matrix = bath + p0 * down_v + p1 * up_v + np.conj(s) * drive_c + s * drive_cc
    return Liouvillian(matrix, p)


def apply_liouvillian(p: MachineParams, rho_a, rho_m) -> np.ndarray:
    """Matrix-form generator, independent of the vectorised route."""
    p0, p1, s = atom_moments(rho_a)
    v_m = SIGMA_V * np.conj(s) + SIGMA_V.conj().T * s
    out = -1j * p.r * p.phi * (v_m @ rho_m - rho_m @ v_m)
    rphi2 = p.r * p.phi**2
    out += apply_dissipator(rho_m, SIGMA_V, rphi2 * p0, rphi2 * p1)
    out += apply_dissipator(rho_m, SIGMA_1, *thermal_rates(p.beta1, p.E1, p.gamma0_1))
    out += apply_dissipator(rho_m, SIGMA_2, *thermal_rates(p.beta2, p.E2, p.gamma0_2))
    return out


@dataclass(frozen=True)
class MachineSteadyState:
    rho: np.ndarray
    pi00: float
    pi01: float
    pi10: float
    pi11: float
    pi_v: complex
    residual: float

    @property
    def populations(self) -> np.ndarray:
        return np.array([self.pi00, self.pi01, self.pi10, self.pi11])


def steady_state(L: Liouvillian) -> MachineSteadyState:
    """Unique stationary state from the SVD null vector of ``L``.

    Raises
    ------
    SteadyStateError
        If the second-smallest singular value is below 1e-8 (degenerate
        nullspace) or the residual exceeds 1e-10.
    """
    m = L.matrix
    _, s, vh = np.linalg.svd(m)
    if s[-2] < NULLSPACE_GAP:
        raise SteadyStateError(
            f"stationary state not unique: nullspace multiplicity >= 2 (singular values {s[-2]:.2e}, {s[-1]:.2e})"
        )
    rho = unvec(vh[-1].conj(), 4)
    rho = rho / np.trace(rho)
    rho = as_density_matrix((rho + rho.conj().T) / 2, tol=1e-9)
    residual = float(np.linalg.norm(m @ vec(rho)))
    if residual > RESIDUAL_TOL:
        raise SteadyStateError(f"steady-state residual {residual:.2e} exceeds {RESIDUAL_TOL}")
    mask = np.ones((4, 4), dtype=bool)
    np.fill_diagonal(mask, False)
    mask[1, 2] = mask[2, 1] = False
    if np.max(np.abs(rho[mask])) > BLOCK_TOL:
        raise SteadyStateError("steady state has coherences outside the virtual-qubit block")
    pops = rho.diagonal().real
    return MachineSteadyState(
        rho=rho,
        pi00=float(pops[0]),
        pi01=float(pops[1]),
        pi10=float(pops[2]),
        pi11=float(pops[3]),
        pi_v=complex(np.trace(SIGMA_V @ rho)),
        residual=residual,
    )


def machine_steady_state(p: MachineParams, rho_a) -> MachineSteadyState:
    return steady_state(build_liouvillian(p, rho_a))


def validate_regime(p: MachineParams) -> list[str]:
    """Return human-readable warnings about the weak-coupling assumptions.

    The ``r phi^2 <= 10 gamma0`` window is a heuristic for partial (not
    complete) relaxation of the machine; it never raises.
    """
    out = []
    if p.phi**2 > 0.01 * p.omega:
        out.append(f"phi^2 = {p.phi**2:.3g} is not << E2 - E1 = {p.omega:.3g}")
    for k, (g, e) in enumerate(((p.gamma0_1, p.E1), (p.gamma0_2, p.E2)), start=1):
        if g > 0.01 * e:
            out.append(f"weak coupling: gamma0_{k} = {g:.3g} is not << E{k} = {e:.3g}")
        if p.r * p.phi**2 > 10 * g:
            out.append(
                f"r phi^2 = {p.r * p.phi**2:.3g} exceeds 10 gamma0_{k}; machine far from partial relaxation"
            )
    return out


def warn_regime(p: MachineParams) -> None:
    for msg in validate_regime(p):
        warnings.warn(msg, RegimeWarning, stacklevel=2)


# column-stacked positions of the four populations and the two virtual-qubit coherences
BLOCK_INDICES = np.array([0, 5, 10, 15, 9, 6])


@lru_cache(maxsize=256)
def _block_parts(p: MachineParams):
    idx = np.ix_(BLOCK_INDICES, BLOCK_INDICES)
    parts = tuple(np.ascontiguousarray(m[idx]) for m in _liouvillian_parts(p))
    for m in parts:
        m.setflags(write=False)
    return parts


def block_steady_state(p: MachineParams, rho_a) -> np.ndarray:
    """Steady state restricted to the populations and virtual-qubit block.

    The generator leaves that six-dimensional sector invariant, so its null
    vector is the full stationary state. Used by long cascades; agrees with
    :func:`steady_state` to round-off.
    """
    p0, p1, s = atom_moments(rho_a)
    bath, down_v, up_v, drive_c, drive_cc = _block_parts(p)
    m = bath + p0 * down_v + p1 * up_v + np.conj(s) * drive_c + s * drive_cc
    _, sv, vh = np.linalg.svd(m)
    if sv[-2] < NULLSPACE_GAP:
        raise SteadyStateError("stationary state not unique in the virtual-qubit sector")
    x = vh[-1].conj()
    x = x / x[:4].sum()
    rho = np.zeros((4, 4), dtype=complex)
    rho[[0, 1, 2, 3], [0, 1, 2, 3]] = x[:4].real
    rho[1, 2] = (x[4] + np.conj(x[5])) / 2
    rho[2, 1] = np.conj(rho[1, 2])
    return rho
