"""Lagrangians and sub-Lagrangians of a complexified real inner-product space.

A (sub-)Lagrangian is stored by an orthonormal frame ``F`` (columns) of
complex vectors in ``C^m``, ``m`` the real dimension.  Conjugation is entrywise
complex conjugation, so the isotropy condition ``conj(L) ⊥ L`` reads
``F.T @ F == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, IllConditionedError, LagrangianError
from .linalg import DEFAULT_TOL, hs_norm, make_rng, random_orthogonal, singular_values

#: singular values in ``(tol, GRAY_FACTOR * tol]`` make a parity decision abort
GRAY_FACTOR = 1e3


@dataclass(frozen=True, eq=False)
class SubLagrangian:
    """Isotropic subspace ``L`` with ``conj(L) ⊆ L^⊥``.

    Parameters
    ----------
    frame : (m, k) complex array
        Orthonormal columns spanning ``L``.
    tol : float
        Tolerance for the orthonormality and isotropy checks.
    """

    frame: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        F = np.asarray(self.frame, dtype=complex)
        if F.ndim != 2:
            raise LagrangianError("frame must be a 2-d array with frame vectors as columns")
        object.__setattr__(self, "frame", F)
        k = F.shape[1]
        scale = self.tol * max(1, F.shape[0])
        if hs_norm(F.conj().T @ F - np.eye(k)) > scale:
            raise LagrangianError("frame vectors are not orthonormal")
        if hs_norm(F.T @ F) > scale:
            raise LagrangianError("frame is not isotropic: <conj(f_i), f_j> != 0")
        if 2 * k > F.shape[0]:
            raise LagrangianError("an isotropic subspace has at most half the real dimension")

    @property
    def real_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def rank(self) -> int:
        return self.frame.shape[1]

    @property
    def defect_dim(self) -> int:
        """``dim (L ⊕ conj L)^⊥``."""
        return self.real_dim - 2 * self.rank

    @property
    def is_lagrangian(self) -> bool:
        return self.defect_dim == 0

    @property
    def projection(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    @property
    def conj_projection(self) -> np.ndarray:
        return np.conj(self.projection)

    def conjugate(self) -> "SubLagrangian":
        return SubLagrangian(np.conj(self.frame), self.tol)

    def transform(self, g) -> "SubLagrangian":
        """Image ``g L`` under an orthogonal map of the real space."""
        g = np.asarray(g)
        if g.shape != (self.real_dim, self.real_dim):
            raise DimensionMismatch(f"g has shape {g.shape}, space has dim {self.real_dim}")
        return SubLagrangian(g @ self.frame, self.tol)

    def augment(self, extra: int = 1) -> "SubLagrangian":
        """``L ⊕ 0`` inside ``C^m ⊕ C^extra``."""
        pad = np.zeros((extra, self.rank), dtype=complex)
        return SubLagrangian(np.vstack([self.frame, pad]), self.tol)

    def complement_basis(self) -> np.ndarray:
        """Real orthonormal basis of ``K = (L ⊕ conj L)^⊥``, Gram-Schmidt in coordinate order."""
        m = self.real_dim
        PK = np.eye(m) - (self.projection + self.conj_projection).real
        basis: list[np.ndarray] = []
        for j in range(m):
            v = PK[:, j].copy()
            for _ in range(2):
                for b in basis:
                    v -= (b @ v) * b
            nrm = np.linalg.norm(v)
            if nrm > 1e-6:
                basis.append(v / nrm)
            if len(basis) == self.defect_dim:
                break
        return np.array(basis).T.reshape(m, len(basis))


def standard_sublagrangian(real_dim: int) -> SubLagrangian:
    """Frame ``f_j = (e_{2j-1} - i e_{2j}) / sqrt(2)``; defect ``real_dim mod 2``."""
    n = real_dim // 2
    F = np.zeros((real_dim, n), dtype=complex)
    for j in range(n):
        F[2 * j, j] = 1 / np.sqrt(2)
        F[2 * j + 1, j] = -1j / np.sqrt(2)
    return SubLagrangian(F)


def _check_same_ambient(L1: SubLagrangian, L2: SubLagrangian) -> None:
    if L1.real_dim != L2.real_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {L1.real_dim} vs {L2.real_dim}")


def equivalence_distance(L1: SubLagrangian, L2: SubLagrangian) -> float:
    """Hilbert-Schmidt norm of ``P_{L1} - P_{L2}``."""
    _check_same_ambient(L1, L2)
    return hs_norm(L1.projection - L2.projection)


def decisive_kernel_dim(M, tol: float = DEFAULT_TOL, gray: float = GRAY_FACTOR) -> int:
    """Kernel dimension, refusing when a singular value sits in ``(tol, gray*tol]``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    s = singular_values(M)
    ambiguous = (s > tol) & (s <= gray * tol)
    if np.any(ambiguous):
        raise IllConditionedError(
            f"ill-conditioned parity: singular value {s[ambiguous][0]:.3e} near tolerance {tol:.1e}"
        )
    return int(M.shape[1] - np.count_nonzero(s > tol))


def intersection_dim(L1: SubLagrangian, L2: SubLagrangian, tol: float = DEFAULT_TOL) -> int:
    """``dim(conj(L1) ∩ L2)`` as the kernel of the stacked complementary projections."""
    _check_same_ambient(L1, L2)
    if not (L1.is_lagrangian and L2.is_lagrangian):
        raise LagrangianError("intersection parity needs full Lagrangians (defect 0)")
    eye = np.eye(L1.real_dim)
    stacked = np.vstack([eye - L1.conj_projection, eye - L2.projection])
    return decisive_kernel_dim(stacked, tol)


def intersection_parity(L1: SubLagrangian, L2: SubLagrangian, tol: float = DEFAULT_TOL) -> int:
    """``dim(conj(L1) ∩ L2) mod 2``; 0 iff the Fock equivalence is grading preserving."""
    return intersection_dim(L1, L2, tol) % 2


def skew_operator(L: SubLagrangian) -> np.ndarray:
    """The real skew-adjoint operator ``J = i (P_L - P_conj(L))``."""
    J = 1j * (L.projection - L.conj_projection)
    if np.max(np.abs(J.imag), initial=0.0) > 1e-9:
        raise LagrangianError("J is not real; frame is inconsistent with conjugation")
    return J.real


def skew_index(L: SubLagrangian, tol: float = DEFAULT_TOL) -> int:
    """Mod-2 index ``dim ker J mod 2`` of the skew operator of ``L``."""
    return skew_operator_index(skew_operator(L), tol)


def skew_operator_index(J, tol: float = DEFAULT_TOL) -> int:
    """``dim ker J mod 2`` for a real skew-adjoint matrix."""
    J = np.asarray(J, dtype=float)
    if J.size and np.max(np.abs(J + J.T)) > 1e-8:
        raise ValueError("operator is not skew-adjoint")
    return decisive_kernel_dim(J, tol) % 2


def complete_sublagrangian(L: SubLagrangian, seed: int | None = None) -> SubLagrangian:
    """Extend ``L`` by a Lagrangian ``F`` of its defect space ``K``.

    Even defect: ``F ⊂ K`` and the ambient space is unchanged.  Odd defect:
    the ambient space grows by one real coordinate (appended last) and
    ``F ⊂ K ⊕ C``.  With ``seed=None`` the pairing is
    ``(k_{2j-1} - i k_{2j}) / sqrt(2)`` over the Gram-Schmidt basis of ``K``;
    an integer seed first rotates that basis by a random element of ``SO(K)``,
    so all seeded completions are mutually grading-equivalent.
    """
    if L.defect_dim == 0:
        return L
    K = L.complement_basis()
    if L.defect_dim % 2:
        L = L.augment()
        K = np.vstack([K, np.zeros((1, K.shape[1]))])
        aux = np.zeros((L.real_dim, 1))
        aux[-1, 0] = 1.0
        K = np.hstack([K, aux])
    if seed is not None:
        K = K @ random_orthogonal(K.shape[1], make_rng(seed), det=1)
    pairs = [(K[:, 2 * j] - 1j * K[:, 2 * j + 1]) / np.sqrt(2) for j in range(K.shape[1] // 2)]
    return SubLagrangian(np.hstack([L.frame, np.array(pairs).T]), L.tol)
