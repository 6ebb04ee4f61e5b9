"""Two-qubit worked examples on local coherence under energy-preserving unitaries.

Qubit states here follow the bias convention
``rho = [[(1 + delta)/2, c], [conj(c), (1 - delta)/2]]``, i.e. ``delta`` is
ground minus excited population, so ``delta < 0`` means population inversion.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .coherence import full_dephase, mutual_information, partial_dephase, rea, rec
from .qstate import binary_entropy, expm_hermitian_generator, partial_trace

DIMS = (2, 2)
ROOT_BRACKET = (0.4, 0.5)
ROOT_XTOL = 1e-6


def biased_qubit(delta: float, c: complex) -> np.ndarray:
    if delta * delta + 4 * abs(c) ** 2 > 1 + 1e-12:
        raise ValueError("delta^2 + 4|c|^2 must not exceed 1")
    return np.array([[(1 + delta) / 2, c], [np.conj(c), (1 - delta) / 2]], dtype=complex)


def degenerate_hamiltonian(eps: float = 1.0) -> np.ndarray:
    """``eps (n_A + n_B)``: ``|01>`` and ``|10>`` share energy ``eps``."""
    n = np.diag([0.0, 1.0])
    return eps * (np.kron(n, np.eye(2)) + np.kron(np.eye(2), n)).astype(complex)


def exchange_generator() -> np.ndarray:
    """``|01><10| + |10><01|``."""
    g = np.zeros((4, 4), dtype=complex)
    g[1, 2] = g[2, 1] = 1
    return g


def theta_unitary(theta: float) -> np.ndarray:
    """``exp(-i theta (|01><10| + h.c.))``; ``theta = pi/4`` is the 50:50 exchange."""
    c, s = np.cos(theta), np.sin(theta)
    u = np.eye(4, dtype=complex)
    u[1, 1] = u[2, 2] = c
    u[1, 2] = u[2, 1] = -1j * s
    return u


def theta_unitary_from_generator(theta: float) -> np.ndarray:
    return expm_hermitian_generator(exchange_generator(), theta)


@dataclass(frozen=True)
class ThetaFamilyParams:
    delta_A: float
    delta_B: float
    alpha: float
    varphi: float
    theta: float

    def __post_init__(self):
        if not (-1 <= self.delta_A <= 1 and -1 <= self.delta_B <= 1):
            raise ValueError("biases must lie in [-1, 1]")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def max_coherence_A(self) -> float:
        """Largest ``|c_A|`` keeping both ``rho_A`` and ``rho_B`` positive."""
        lim_a = np.sqrt(max(1 - self.delta_A**2, 0.0)) / 2
        lim_b = np.sqrt(max(1 - self.delta_B**2, 0.0)) / 2 / self.alpha
        return min(lim_a, lim_b)

    def states(self, c_a: complex | None = None) -> tuple[np.ndarray, np.ndarray]:
        """``(rho_A, rho_B)`` with ``c_B = alpha e^{i varphi} c_A``."""
        if c_a is None:
            c_a = 0.5 * self.max_coherence_A()
        c_b = self.alpha * np.exp(1j * self.varphi) * c_a
        return biased_qubit(self.delta_A, c_a), biased_qubit(self.delta_B, c_b)


def coherence_ratios(p: ThetaFamilyParams) -> tuple[float, float]:
    """``(|c_A'|/|c_A|, |c_B'|/|c_B|)`` after ``theta_unitary(p.theta)``."""
    s, c = np.sin(p.theta), np.cos(p.theta)
    ratio_a = abs(c + 1j * p.delta_A * p.alpha * np.exp(1j * p.varphi) * s)
    ratio_b = abs(c + 1j * (p.delta_B / p.alpha) * np.exp(-1j * p.varphi) * s)
    return float(ratio_a), float(ratio_b)


def coherence_ratios_matrix(p: ThetaFamilyParams, c_a: complex | None = None) -> tuple[float, float]:
    """Same ratios from the evolved two-qubit state and its marginals."""
    rho_a, rho_b = p.states(c_a)
    if abs(rho_a[0, 1]) == 0 or abs(rho_b[0, 1]) == 0:
        raise ValueError("ratios undefined for zero initial coherence")
    u = theta_unitary(p.theta)
    rho_p = u @ np.kron(rho_a, rho_b) @ u.conj().T
    out_a = partial_trace(rho_p, DIMS, "A")
    out_b = partial_trace(rho_p, DIMS, "B")
    return abs(out_a[0, 1]) / abs(rho_a[0, 1]), abs(out_b[0, 1]) / abs(rho_b[0, 1])


def kappa(theta: float, varphi: float) -> float:
    """Positive root scale of the two amplification inequalities.

    With ``r = sin(varphi) cot(theta)`` the roots of ``x^2 - 2 r x - 1`` are
    ``kappa`` and ``-1/kappa`` with ``kappa = r + sqrt(r^2 + 1)``.
    """
    r = np.sin(varphi) / np.tan(theta)
    return float(r + np.sqrt(r * r + 1))


def kappa_conditions(p: ThetaFamilyParams) -> bool:
    """Both ratios exceed one, via the factored inequalities (needs ``sin(theta) != 0``)."""
    if np.sin(p.theta) == 0:
        return False
    k = kappa(p.theta, p.varphi)
    x = p.delta_A * p.alpha
    y = p.delta_B / p.alpha
    return bool((x - k) * (x + 1 / k) > 0 and (y - 1 / k) * (y + k) > 0)


def simultaneous_increase_possible(delta_a: float, delta_b: float) -> bool:
    """Whether some exchange unitary can raise both local coherences.

    True exactly when the biases have opposite signs (one qubit inverted).
    """
    return delta_a * delta_b < 0


# --- coherence gain of the 50:50 exchange example ----------------------------

def _p_of_c(c: float) -> float:
    return 0.5 + np.sqrt(1 + 8 * c * c) / 4


def delta_c_closed(c: float) -> float:
    h = binary_entropy
    return 2 * h(0.25) - h(0.5) - 2 * h(_p_of_c(c)) + h(0.5 + c)


def example_states(c: float) -> tuple[np.ndarray, np.ndarray]:
    """``rho_A = [[1/2, c], [c, 1/2]]`` and ``rho_B = |1><1|``."""
    if abs(c) > 0.5:
        raise ValueError("c must lie in [-1/2, 1/2]")
    return np.array([[0.5, c], [c, 0.5]], dtype=complex), np.diag([0.0, 1.0]).astype(complex)


def delta_c_matrix(c: float, theta: float = np.pi / 4) -> float:
    rho_a, rho_b = example_states(c)
    u = theta_unitary(theta)
    rho_p = u @ np.kron(rho_a, rho_b) @ u.conj().T
    after = rec(partial_trace(rho_p, DIMS, "A")) + rec(partial_trace(rho_p, DIMS, "B"))
    return after - rec(rho_a) - rec(rho_b)


def delta_c_curve(c: float) -> float:
    """Local coherence gain; closed form, verified against the matrix route."""
    closed = delta_c_closed(c)
    direct = delta_c_matrix(c)
    if abs(closed - direct) > 1e-10:
        raise ArithmeticError(f"closed form {closed!r} and matrix evolution {direct!r} disagree")
    return closed


def delta_c_root(bracket=ROOT_BRACKET, xtol: float = ROOT_XTOL) -> float:
    return float(bisect(delta_c_closed, *bracket, xtol=xtol))


def example_mutual_informations(c: float) -> dict:
    """Mutual informations of the evolved example state, numerically."""
    rho_a, rho_b = example_states(c)
    u = theta_unitary(np.pi / 4)
    h = degenerate_hamiltonian()
    rho = np.kron(rho_a, rho_b)
    rho_p = u @ rho @ u.conj().T
    return {
        "I_rho": mutual_information(rho, DIMS),
        "I_partial": mutual_information(partial_dephase(rho, h), DIMS),
        "I_full": mutual_information(full_dephase(rho), DIMS),
        "I_rho_p": mutual_information(rho_p, DIMS),
        "I_partial_p": mutual_information(partial_dephase(rho_p, h), DIMS),
        "I_full_p": mutual_information(full_dephase(rho_p), DIMS),
    }


# --- four-stage picture --------------------------------------------------------

@dataclass(frozen=True)
class StageDiagram:
    """REC and REA at: local sums, global initial, global evolved, local sums after."""

    C: tuple
    A: tuple

    def rows(self):
        labels = ("local_initial", "global_initial", "global_evolved", "local_final")
        return list(zip(range(1, 5), labels, self.C, self.A))


def stage_diagram(rho_a, rho_b, u, h, basis=None, tol: float = 1e-10) -> StageDiagram:
    """Coherence and asymmetry along split / join / evolve / split.

    ``h`` must be a sum of local terms; the local Hamiltonians are read off
    its partial traces. Raises ``ArithmeticError`` if the asymmetry changes
    under ``u`` or the coherence lost on separation is negative.
    """
    h = np.asarray(h, dtype=complex)
    h_a = partial_trace(h, DIMS, "A")
    h_b = partial_trace(h, DIMS, "B")
    rho = np.kron(rho_a, rho_b)
    rho_p = u @ rho @ u.conj().T
    out_a = partial_trace(rho_p, DIMS, "A")
    out_b = partial_trace(rho_p, DIMS, "B")
    basis_a = basis_b = None
    if basis is not None:
        from .coherence import product_basis_factors

        basis_a, basis_b = product_basis_factors(basis, DIMS)
    c_vals = (
        rec(rho_a, basis_a) + rec(rho_b, basis_b),
        rec(rho, basis),
        rec(rho_p, basis),
        rec(out_a, basis_a) + rec(out_b, basis_b),
    )
    a_vals = (
        rea(rho_a, h_a) + rea(rho_b, h_b),
        rea(rho, h),
        rea(rho_p, h),
        rea(out_a, h_a) + rea(out_b, h_b),
    )
    if abs(a_vals[2] - a_vals[1]) > tol:
        raise ArithmeticError(f"asymmetry changed under the unitary by {a_vals[2] - a_vals[1]:.3e}")
    drop = c_vals[2] - c_vals[3]
    expected = mutual_information(rho_p, DIMS) - mutual_information(full_dephase(rho_p, basis), DIMS)
    if drop < -tol or abs(drop - expected) > tol:
        raise ArithmeticError("coherence lost on separation does not match the correlation identity")
    return StageDiagram(C=c_vals, A=a_vals)
