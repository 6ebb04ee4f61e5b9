"""Dense density-matrix primitives.

Matrices are plain ``numpy`` complex arrays. Composite systems are ordered
machine ⊗ atom, and within the machine qubit 1 ⊗ qubit 2.

Qubit states use the Bloch convention with the excited level ``|1>`` at
``z = +1``::

    rho = [[(1 - z)/2, (x - i y)/2],
           [(x + i y)/2, (1 + z)/2]]

so ``z`` equals the population bias ``p1 - p0``.
"""

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
# excited level at z = +1
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


class DensityMatrixError(ValueError):
    pass


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float


def as_density_matrix(m, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Validate ``m`` as a density matrix and return a cleaned copy.

    Round-off negatives down to ``-tol`` are clamped to zero and the result
    renormalised; anything worse raises :class:`DensityMatrixError`.
    """
    m = np.array(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DensityMatrixError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise DensityMatrixError("matrix is not Hermitian")
    if abs(np.trace(m) - 1) > TRACE_TOL:
        raise DensityMatrixError(f"trace is {np.trace(m).real!r}, not 1")
    m = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise DensityMatrixError(f"negative eigenvalue {w[0]:.3e}")
    if w[0] < 0:
        w = np.clip(w, 0, None)
        m = (v * w) @ v.conj().T
        m /= np.trace(m).real
    return m


def is_density_matrix(m, tol: float = POSITIVITY_TOL) -> bool:
    try:
        as_density_matrix(m, tol)
    except DensityMatrixError:
        return False
    return True


def tensor(*ops) -> np.ndarray:
    """Kronecker product of the operands, left factor first."""
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(rho, dims, keep: str = "A") -> np.ndarray:
    """Reduced state of a bipartite operator.

    Parameters
    ----------
    rho : array_like
        Operator on ``A ⊗ B``.
    dims : tuple of int
        ``(dA, dB)``.
    keep : {"A", "B"}
        Which factor survives.
    """
    rho = np.asarray(rho, dtype=complex)
    d_a, d_b = dims
    if rho.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(f"dims {dims} do not match operator shape {rho.shape}")
    r = rho.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def eigvalsh_clean(rho) -> np.ndarray:
    return np.linalg.eigvalsh((np.asarray(rho) + np.asarray(rho).conj().T) / 2)


def entropy_from_probs(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > ENTROPY_CUTOFF]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho) -> float:
    """Entropy in nats; eigenvalues below 1e-14 count as zero."""
    return entropy_from_probs(eigvalsh_clean(rho))


def binary_entropy(p: float) -> float:
    return entropy_from_probs([p, 1 - p])


def relative_entropy(rho, sigma) -> float:
    """``Tr[rho (ln rho - ln sigma)]``, or ``inf`` if supp(rho) ⊄ supp(sigma)."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError("states have different dimensions")
    wr, vr = np.linalg.eigh((rho + rho.conj().T) / 2)
    ws, vs = np.linalg.eigh((sigma + sigma.conj().T) / 2)
    # overlaps[i, j] = |<r_i|s_j>|^2
    overlaps = np.abs(vr.conj().T @ vs) ** 2
    keep_r = wr > ENTROPY_CUTOFF
    null_s = ws <= ENTROPY_CUTOFF
    if np.any(overlaps[np.ix_(keep_r, null_s)] * wr[keep_r, None] > ENTROPY_CUTOFF):
        return float("inf")
    wr_k = wr[keep_r]
    log_s = np.log(np.where(null_s, 1.0, ws))
    cross = np.sum(wr_k[:, None] * overlaps[keep_r][:, ~null_s] * log_s[~null_s])
    value = float(np.sum(wr_k * np.log(wr_k)) - cross)
    return max(value, 0.0)


def expm_hermitian_generator(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(h))):
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def bloch_vector(rho) -> BlochVector:
    rho = np.asarray(rho, dtype=complex)
    return BlochVector(
        float(np.trace(SX @ rho).real),
        float(np.trace(SY @ rho).real),
        float(np.trace(SZ @ rho).real),
    )


def from_bloch(x: float, y: float = 0.0, z: float = 0.0) -> np.ndarray:
    if x * x + y * y + z * z > 1 + 1e-12:
        raise DensityMatrixError("Bloch vector lies outside the unit ball")
    return (np.eye(2) + x * SX + y * SY + z * SZ) / 2


def qubit_state(delta: float, c: complex = 0.0) -> np.ndarray:
    """Qubit with bias ``delta = p1 - p0`` and coherence ``c = <0|rho|1>``."""
    if delta * delta + 4 * abs(c) ** 2 > 1 + 1e-12:
        raise DensityMatrixError("delta^2 + 4|c|^2 must not exceed 1")
    return np.array([[(1 - delta) / 2, c], [np.conj(c), (1 + delta) / 2]], dtype=complex)


def trace_distance(a, b) -> float:
    """Trace norm of ``a - b`` (sum of singular values, no factor 1/2)."""
    return float(np.sum(np.linalg.svd(np.asarray(a) - np.asarray(b), compute_uv=False)))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
