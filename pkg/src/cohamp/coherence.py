"""Relative entropy of coherence and of asymmetry, and bipartite identities.

Coherence (REC) is measured against a fixed orthonormal basis; asymmetry
(REA) against the spectral projectors of a Hamiltonian, so it ignores
coherence inside degenerate energy shells.
"""

from dataclasses import dataclass

import numpy as np

from .qstate import partial_trace, von_neumann_entropy

DEGENERACY_GAP = 1e-9
PROJECTOR_TOL = 1e-12
IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralProjectors:
    projectors: tuple
    energies: tuple

    def __post_init__(self):
        if len(self.projectors) != len(self.energies):
            raise ValueError("one energy per projector required")
        if len(set(self.energies)) != len(self.energies):
            raise ValueError("energies must be distinct")
        dim = self.projectors[0].shape[0]
        total = sum(self.projectors)
        if np.max(np.abs(total - np.eye(dim))) > PROJECTOR_TOL:
            raise ValueError("projectors do not resolve the identity")
        for j, pj in enumerate(self.projectors):
            for k, pk in enumerate(self.projectors):
                target = pj if j == k else 0
                if np.max(np.abs(pj @ pk - target)) > PROJECTOR_TOL:
                    raise ValueError("projectors are not orthogonal idempotents")

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def is_degenerate(self) -> bool:
        return len(self.projectors) < self.dim

    @classmethod
    def from_hamiltonian(cls, h, gap: float = DEGENERACY_GAP) -> "SpectralProjectors":
        """Group eigenvalues closer than ``gap`` into one eigenspace."""
        h = np.asarray(h, dtype=complex)
        w, v = np.linalg.eigh((h + h.conj().T) / 2)
        clusters = [[0]]
        for i in range(1, len(w)):
            if w[i] - w[clusters[-1][-1]] < gap:
                clusters[-1].append(i)
            else:
                clusters.append([i])
        projectors, energies = [], []
        for idx in clusters:
            vecs = v[:, idx]
            projectors.append(vecs @ vecs.conj().T)
            energies.append(float(np.mean(w[idx])))
        return cls(tuple(projectors), tuple(energies))


def _as_projectors(h) -> SpectralProjectors:
    if isinstance(h, SpectralProjectors):
        return h
    return SpectralProjectors.from_hamiltonian(h)


def _check_basis(basis, dim):
    if basis is None:
        return np.eye(dim, dtype=complex)
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (dim, dim):
        raise ValueError(f"basis shape {basis.shape} does not match dimension {dim}")
    if np.max(np.abs(basis.conj().T @ basis - np.eye(dim))) > 1e-10:
        raise ValueError("basis is not orthonormal")
    return basis


def full_dephase(rho, basis=None) -> np.ndarray:
    """Keep only the diagonal of ``rho`` in ``basis`` (columns; default computational)."""
    rho = np.asarray(rho, dtype=complex)
    b = _check_basis(basis, rho.shape[0])
    diag = np.einsum("ji,jk,ki->i", b.conj(), rho, b)
    return (b * diag) @ b.conj().T


def partial_dephase(rho, h) -> np.ndarray:
    """Block-diagonal part ``sum_j P_j rho P_j`` over the eigenspaces of ``h``."""
    rho = np.asarray(rho, dtype=complex)
    proj = _as_projectors(h)
    if proj.dim != rho.shape[0]:
        raise ValueError("Hamiltonian and state dimensions differ")
    return sum(p @ rho @ p for p in proj.projectors)


def rec(rho, basis=None) -> float:
    """Relative entropy of coherence ``S(dephased) - S(rho)``."""
    return max(von_neumann_entropy(full_dephase(rho, basis)) - von_neumann_entropy(rho), 0.0)


def rea(rho, h) -> float:
    """Relative entropy of asymmetry with respect to Hamiltonian ``h``."""
    return max(von_neumann_entropy(partial_dephase(rho, h)) - von_neumann_entropy(rho), 0.0)


def mutual_information(rho_ab, dims) -> float:
    rho_a = partial_trace(rho_ab, dims, "A")
    rho_b = partial_trace(rho_ab, dims, "B")
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho_ab)


def product_basis_factors(basis, dims):
    """Split a global product basis into its local factors.

    Each column of ``basis`` must be a product vector and the local vectors
    must form orthonormal bases of their own; otherwise ``ValueError``.
    Returns ``(basis_A, basis_B)``; every ``basis[:, k]`` is, up to phase,
    ``kron(basis_A[:, i], basis_B[:, j])`` for some ``i, j``.
    """
    d_a, d_b = dims
    basis = _check_basis(basis, d_a * d_b)
    a_vecs, b_vecs = [], []
    for k in range(d_a * d_b):
        m = basis[:, k].reshape(d_a, d_b)
        u, s, vh = np.linalg.svd(m)
        if s[1:].size and s[1] > 1e-10:
            raise ValueError("basis is not a local product basis")
        a_vecs.append(u[:, 0] * s[0])
        b_vecs.append(vh[0].conj())

    def distinct(vecs, d):
        out = []
        for v in vecs:
            if not any(abs(abs(np.vdot(w, v)) - 1) < 1e-8 for w in out):
                out.append(v)
        if len(out) != d:
            raise ValueError("basis is not a local product basis")
        m = np.array(out).T
        if np.max(np.abs(m.conj().T @ m - np.eye(d))) > 1e-8:
            raise ValueError("basis is not a local product basis")
        return m

    return distinct(a_vecs, d_a), distinct(b_vecs, d_b)


@dataclass(frozen=True)
class BipartiteReport:
    C_global: float
    A_global: float
    C_A: float
    C_B: float
    A_A: float
    A_B: float
    I_rho: float
    I_dephased_full: float
    I_dephased_partial: float


def bipartite_report(rho_ab, h, dims=(2, 2), local_basis=None, h_a=None, h_b=None) -> BipartiteReport:
    """All ingredients of the coherence/asymmetry additivity relations.

    ``local_basis`` is the global product eigenbasis of ``h`` (default:
    computational). Local asymmetries use ``h_a``/``h_b`` when supplied and
    otherwise the diagonal of the local basis, which makes them non-degenerate
    so they coincide with the local coherences.

    Raises ``ValueError`` if the basis is not a product basis or if either
    additivity identity fails by more than 1e-10.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    basis = _check_basis(local_basis, rho_ab.shape[0])
    basis_a, basis_b = product_basis_factors(basis, dims)
    if h_a is None:
        h_a = basis_a @ np.diag(np.arange(dims[0], dtype=float)) @ basis_a.conj().T
    if h_b is None:
        h_b = basis_b @ np.diag(np.arange(dims[1], dtype=float)) @ basis_b.conj().T
    rho_a = partial_trace(rho_ab, dims, "A")
    rho_b = partial_trace(rho_ab, dims, "B")
    report = BipartiteReport(
        C_global=rec(rho_ab, basis),
        A_global=rea(rho_ab, h),
        C_A=rec(rho_a, basis_a),
        C_B=rec(rho_b, basis_b),
        A_A=rea(rho_a, h_a),
        A_B=rea(rho_b, h_b),
        I_rho=mutual_information(rho_ab, dims),
        I_dephased_full=mutual_information(full_dephase(rho_ab, basis), dims),
        I_dephased_partial=mutual_information(partial_dephase(rho_ab, h), dims),
    )
    c_rhs = report.C_A + report.C_B - report.I_dephased_full + report.I_rho
    if abs(report.C_global - c_rhs) > IDENTITY_TOL:
        raise ValueError(f"coherence additivity identity violated by {report.C_global - c_rhs:.3e}")
    a_rhs = report.A_A + report.A_B - report.I_dephased_partial + report.I_rho
    if abs(report.A_global - a_rhs) > IDENTITY_TOL:
        raise ValueError(
            f"asymmetry additivity identity violated by {report.A_global - a_rhs:.3e}; "
            "are the local Hamiltonians consistent with h?"
        )
    return report


@dataclass(frozen=True)
class LocalIncrease:
    lhs: float
    rhs: float


def local_increase_identity(u, rho_a, rho_b, h, basis=None, dims=(2, 2)) -> LocalIncrease:
    """Both sides of ``dC_A + dC_B = I(~rho') - I(~rho) - I(rho')``.

    ``u`` must commute with ``h``. Local coherences are taken in the local
    factors of ``basis`` (default: computational).
    """
    u = np.asarray(u, dtype=complex)
    h_mat = h if not isinstance(h, SpectralProjectors) else sum(
        e * p for e, p in zip(h.energies, h.projectors)
    )
    if np.max(np.abs(u @ h_mat - h_mat @ u)) > IDENTITY_TOL * max(1.0, np.max(np.abs(h_mat))):
        raise ValueError("unitary does not commute with the Hamiltonian")
    basis = _check_basis(basis, dims[0] * dims[1])
    basis_a, basis_b = product_basis_factors(basis, dims)
    rho = np.kron(rho_a, rho_b)
    rho_p = u @ rho @ u.conj().T
    d_ca = rec(partial_trace(rho_p, dims, "A"), basis_a) - rec(rho_a, basis_a)
    d_cb = rec(partial_trace(rho_p, dims, "B"), basis_b) - rec(rho_b, basis_b)
    rhs = (
        mutual_information(partial_dephase(rho_p, h), dims)
        - mutual_information(partial_dephase(rho, h), dims)
        - mutual_information(rho_p, dims)
    )
    return LocalIncrease(lhs=d_ca + d_cb, rhs=rhs)
