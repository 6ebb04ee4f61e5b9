"""Machine-to-atom map for a single passing atom.

Two variants share one interface:

``exact``
    Atom marginal of ``U (rho_m ⊗ rho_a) U^dag`` with ``U = exp(-i phi V)``.
    Completely positive by construction; the reference route.
``perturbative``
    Second-order expansion ``rho - i phi [V_a, rho] + D_a(rho)`` with
    machine averages inserted. This is the map used for all flows.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .machine import SIGMA_V, MachineSteadyState, apply_dissipator, atom_hamiltonian, machine_hamiltonian
from .qstate import LOWER, expm_hermitian_generator, partial_trace

POSITIVITY_TOL = 1e-10
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


class ChannelRegimeError(ValueError):
    """Perturbative output lost positivity: phi is outside the expansion's validity."""


@lru_cache(maxsize=1)
def interaction_generator() -> np.ndarray:
    """``V = sigma_v ⊗ sigma_a^dag + sigma_v^dag ⊗ sigma_a`` on machine ⊗ atom."""
    v = np.kron(SIGMA_V, LOWER.conj().T)
    v = v + v.conj().T
    v.setflags(write=False)
    return v


def total_hamiltonian(e1: float, e2: float) -> np.ndarray:
    return np.kron(machine_hamiltonian(e1, e2), I2) + np.kron(I4, atom_hamiltonian(e2 - e1))


def joint_unitary(phi: float) -> np.ndarray:
    return expm_hermitian_generator(interaction_generator(), phi)


def exact_joint_update(rho_m, rho_a, phi: float) -> np.ndarray:
    u = joint_unitary(phi)
    return u @ np.kron(rho_m, rho_a) @ u.conj().T


def machine_backaction(rho_m, rho_a, phi: float) -> np.ndarray:
    return partial_trace(exact_joint_update(rho_m, rho_a, phi), (4, 2), "A")


def machine_moments(rho_m) -> tuple[float, float, complex]:
    """``(<s_v s_v^dag>, <s_v^dag s_v>, <s_v>)`` on a machine state.

    Equal to ``(pi10, pi01, pi_v)`` on the block-structured steady state.
    """
    rho_m = np.asarray(rho_m, dtype=complex)
    # s_v = |10><01|: s_v s_v^dag = |10><10|, s_v^dag s_v = |01><01|
    return float(rho_m[2, 2].real), float(rho_m[1, 1].real), complex(rho_m[1, 2])


def perturbative_parts(rho_m, phi: float):
    """``(V_a, gamma_down, gamma_up)`` of the second-order atom map."""
    down, up, s_v = machine_moments(rho_m)
    v_a = LOWER * np.conj(s_v) + LOWER.conj().T * s_v
    return v_a, phi**2 * down, phi**2 * up


@dataclass(frozen=True)
class AtomChannel:
    machine_state: np.ndarray
    phi: float
    variant: str = "perturbative"

    def __post_init__(self):
        if self.variant not in ("exact", "perturbative"):
            raise ValueError(f"unknown channel variant {self.variant!r}")
        m = self.machine_state
        if isinstance(m, MachineSteadyState):
            object.__setattr__(self, "machine_state", m.rho)

    def __call__(self, rho_a) -> np.ndarray:
        return apply_channel(self, rho_a)

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_ij |i><j| ⊗ A(|i><j|)`` (unnormalised)."""
        out = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1
                out += np.kron(e, _apply_linear(self, e))
        return out


def _perturbative_increment(ch: AtomChannel, rho_a) -> np.ndarray:
    v_a, g_down, g_up = perturbative_parts(ch.machine_state, ch.phi)
    out = -1j * ch.phi * (v_a @ rho_a - rho_a @ v_a)
    return out + apply_dissipator(rho_a, LOWER, g_down, g_up)


def _apply_linear(ch: AtomChannel, rho_a) -> np.ndarray:
    rho_a = np.asarray(rho_a, dtype=complex)
    if ch.variant == "exact":
        return partial_trace(exact_joint_update(ch.machine_state, rho_a, ch.phi), (4, 2), "B")
    return rho_a + _perturbative_increment(ch, rho_a)


def channel_increment(ch: AtomChannel, rho_a) -> np.ndarray:
    """``A(rho) - rho``; the perturbative variant forms it without cancellation."""
    rho_a = np.asarray(rho_a, dtype=complex)
    if ch.variant == "exact":
        d = _apply_linear(ch, rho_a) - rho_a
    else:
        d = _perturbative_increment(ch, rho_a)
    return (d + d.conj().T) / 2


def apply_channel(ch: AtomChannel, rho_a) -> np.ndarray:
    """Output atom state.

    Raises
    ------
    ChannelRegimeError
        When the perturbative output has an eigenvalue below -1e-10.
    """
    out = _apply_linear(ch, rho_a)
    out = (out + out.conj().T) / 2
    if ch.variant == "perturbative":
        lam = np.linalg.eigvalsh(out)[0]
        if lam < -POSITIVITY_TOL:
            raise ChannelRegimeError(
                f"perturbative atom map produced eigenvalue {lam:.3e}; phi = {ch.phi} is too large"
            )
    return out
