"""Finite-dimensional graded matrix algebras: centers, kind, graded tensor products.

An algebra is a linear span of ``m x m`` matrices closed under products and
adjoints.  The grading is conjugation by a self-inverse matrix ``G``, so the
even part commutes with ``G`` and the odd part anticommutes with it.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IllConditionedError, InconsistentCenterError, NotClosedError
from .fock import fock_rep
from .lagrangian import GRAY_FACTOR
from .linalg import DEFAULT_TOL

EVEN_KIND = "even-kind"
ODD_KIND = "odd-kind"
NOT_SUPER_FACTOR = "not-super-factor"


def _vec(mats: Sequence[np.ndarray], m: int) -> np.ndarray:
    if len(mats) == 0:
        return np.zeros((m * m, 0), dtype=complex)
    return np.column_stack([np.asarray(x, dtype=complex).ravel() for x in mats])


def _span_basis(mats: Sequence[np.ndarray], m: int, tol: float) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of the span of ``mats``."""
    V = _vec(mats, m)
    if V.shape[1] == 0:
        return []
    u, s, _ = np.linalg.svd(V, full_matrices=False)
    r = int(np.count_nonzero(s > tol * max(1.0, s[0])))
    return [u[:, j].reshape(m, m) for j in range(r)]


@dataclass(frozen=True, eq=False)
class GradedMatrixAlgebra:
    """Graded ``*``-subalgebra of ``M_m(C)``.

    Parameters
    ----------
    basis : sequence of (m, m) arrays
        Spanning set of the algebra (need not be independent or homogeneous).
    grading : (m, m) array
        ``G`` with ``G @ G = I``; the grading automorphism is ``x -> G x G``.
    generators : sequence of (m, m) arrays, optional
        Homogeneous elements generating the algebra.  Center computations only
        test against generators when given.
    check : bool
        Verify closure under products and adjoints.
    """

    even_basis: tuple
    odd_basis: tuple
    grading: np.ndarray
    generators: tuple = ()

    def __init__(self, basis, grading, generators=(), check: bool = True, tol: float = DEFAULT_TOL):
        G = np.asarray(grading, dtype=complex)
        m = G.shape[0]
        if G.shape != (m, m):
            raise DimensionMismatch("grading must be square")
        if np.linalg.norm(G @ G - np.eye(m)) > 1e-9:
            raise ValueError("grading operator must square to the identity")
        mats = [np.asarray(x, dtype=complex) for x in basis]
        for x in mats:
            if x.shape != (m, m):
                raise DimensionMismatch(f"basis element of shape {x.shape}, ambient size {m}")
        even = _span_basis([(x + G @ x @ G) / 2 for x in mats], m, tol)
        odd = _span_basis([(x - G @ x @ G) / 2 for x in mats], m, tol)
        if len(even) + len(odd) != len(_span_basis(mats, m, tol)):
            raise NotClosedError("span is not invariant under the grading")
        object.__setattr__(self, "even_basis", tuple(even))
        object.__setattr__(self, "odd_basis", tuple(odd))
        object.__setattr__(self, "grading", G)
        gens = tuple(np.asarray(g, dtype=complex) for g in generators)
        for g in gens:
            if homogeneous_degree(g, G) is None:
                raise ValueError("generators must be homogeneous")
        object.__setattr__(self, "generators", gens)
        if check:
            self.check_closure()

    @property
    def size(self) -> int:
        return self.grading.shape[0]

    @property
    def basis(self) -> list[np.ndarray]:
        return list(self.even_basis) + list(self.odd_basis)

    @property
    def dim(self) -> int:
        return len(self.even_basis) + len(self.odd_basis)

    def degrees(self) -> list[int]:
        return [0] * len(self.even_basis) + [1] * len(self.odd_basis)

    def projection_residual(self, x) -> float:
        """Distance of ``x`` from the algebra (Hilbert-Schmidt)."""
        V = _vec(self.basis, self.size)
        x = np.asarray(x, dtype=complex).ravel()
        return float(np.linalg.norm(x - V @ (V.conj().T @ x)))

    def check_closure(self, tol: float = 1e-8) -> float:
        """Max residual of products and adjoints; raises :class:`NotClosedError` above ``tol``."""
        B = self.basis
        right = list(self.generators) if self.generators else B
        worst = 0.0
        for x in B:
            worst = max(worst, self.projection_residual(x.conj().T))
            for y in right:
                worst = max(worst, self.projection_residual(x @ y))
        if worst > tol:
            raise NotClosedError(f"algebra not closed: residual {worst:.2e}")
        return worst


def homogeneous_degree(x, G, tol: float = 1e-9) -> int | None:
    """0 or 1 if ``x`` is even or odd for ``G``, else ``None``."""
    x = np.asarray(x)
    scale = max(1.0, float(np.linalg.norm(x)))
    if np.linalg.norm(G @ x - x @ G) <= tol * scale:
        return 0
    if np.linalg.norm(G @ x + x @ G) <= tol * scale:
        return 1
    return None


@dataclass(frozen=True)
class CenterBasis:
    even: tuple
    odd: tuple

    @property
    def dim(self) -> int:
        return len(self.even) + len(self.odd)

    @property
    def elements(self) -> list[np.ndarray]:
        return list(self.even) + list(self.odd)


def _test_elements(A: GradedMatrixAlgebra) -> list[tuple[np.ndarray, int]]:
    if A.generators:
        return [(g, homogeneous_degree(g, A.grading)) for g in A.generators]
    return [(x, deg) for x, deg in zip(A.basis, A.degrees())]


def _solve_center(A, candidates, cand_deg: int, graded: bool, tol: float) -> tuple:
    """Elements of span(candidates) that (graded-)commute with the algebra."""
    if not candidates:
        return ()
    m = A.size
    blocks = []
    for u, deg in _test_elements(A):
        sign = (-1) ** (cand_deg * deg) if graded else 1
        blocks.append(_vec([z @ u - sign * u @ z for z in candidates], m))
    M = np.vstack(blocks)
    n = M.shape[1]
    _, s, vh = np.linalg.svd(M, full_matrices=M.shape[0] < n)
    s = np.concatenate([s, np.zeros(n - s.size)])
    thresh = tol * max(1.0, float(s[0]) if s.size else 1.0)
    ambiguous = (s > thresh) & (s <= GRAY_FACTOR * thresh)
    if np.any(ambiguous):
        raise IllConditionedError(f"center dimension undecided: singular value {s[ambiguous][0]:.3e}")
    k = int(np.count_nonzero(s <= thresh))
    if k == 0:
        return ()
    coeffs = np.conj(vh[n - k:]).T
    C = _vec(candidates, m) @ coeffs
    return tuple(C[:, j].reshape(m, m) for j in range(k))


def graded_center(A: GradedMatrixAlgebra, tol: float = DEFAULT_TOL) -> CenterBasis:
    """Homogeneous basis of ``{z : z x = (-1)^{|z||x|} x z}``."""
    return CenterBasis(
        _solve_center(A, list(A.even_basis), 0, True, tol),
        _solve_center(A, list(A.odd_basis), 1, True, tol),
    )


def ungraded_center(A: GradedMatrixAlgebra, tol: float = DEFAULT_TOL) -> CenterBasis:
    """Ordinary center, split into even and odd parts.

    The center is a graded subalgebra, so the homogeneous solves must add up
    to the unsplit solve; a mismatch raises :class:`InconsistentCenterError`.
    """
    even = _solve_center(A, list(A.even_basis), 0, False, tol)
    odd = _solve_center(A, list(A.odd_basis), 1, False, tol)
    full = _solve_center(A, A.basis, 0, False, tol)
    if len(full) != len(even) + len(odd):
        raise InconsistentCenterError("ungraded center is not a graded subspace")
    return CenterBasis(even, odd)


def classify_kind(A: GradedMatrixAlgebra, tol: float = DEFAULT_TOL) -> str:
    """``"even-kind"``, ``"odd-kind"`` or ``"not-super-factor"``."""
    if graded_center(A, tol).dim != 1:
        return NOT_SUPER_FACTOR
    zu = ungraded_center(A, tol).dim
    if zu == 1:
        return EVEN_KIND
    if zu == 2:
        return ODD_KIND
    raise InconsistentCenterError(f"trivial graded center but ungraded center of dimension {zu}")


def kind_parity(kind: str) -> int:
    return {EVEN_KIND: 0, ODD_KIND: 1}[kind]


def koszul_embed(a, deg_b: int, GA) -> np.ndarray:
    """``a G_A^{|b|}``, the left factor of the Koszul embedding of ``a (x) b``."""
    return a @ GA if deg_b % 2 else a


def graded_tensor(A: GradedMatrixAlgebra, B: GradedMatrixAlgebra) -> GradedMatrixAlgebra:
    """Graded tensor product realized inside ``M_{mA mB}``.

    ``a (x) b`` is represented by ``(a G_A^{|b|}) ⊗ b``.  Ordinary matrix
    multiplication of these representatives gives
    ``(-1)^{|a2||b1|} a1 a2 (x) b1 b2`` and the grading is ``G_A ⊗ G_B``.
    """
    GA = A.grading
    basis = [
        np.kron(koszul_embed(a, db, GA), b)
        for a in A.basis
        for b, db in zip(B.basis, B.degrees())
    ]
    if A.generators and B.generators:
        eyeB = np.eye(B.size)
        gens = [np.kron(a, eyeB) for a in A.generators] + [
            np.kron(koszul_embed(np.eye(A.size), homogeneous_degree(b, B.grading), GA), b) for b in B.generators
        ]
    else:
        gens = []
    return GradedMatrixAlgebra(basis, np.kron(GA, B.grading), gens, check=False)


def scalar_algebra() -> GradedMatrixAlgebra:
    """``C`` with the trivial grading."""
    return GradedMatrixAlgebra([np.eye(1)], np.eye(1))


def full_matrix_algebra(m: int, grading=None) -> GradedMatrixAlgebra:
    G = np.eye(m) if grading is None else np.asarray(grading)
    basis = []
    for i in range(m):
        for j in range(m):
            E = np.zeros((m, m))
            E[i, j] = 1
            basis.append(E)
    return GradedMatrixAlgebra(basis, G)


def clifford_algebra(d: int) -> GradedMatrixAlgebra:
    """Complex Clifford algebra on ``d`` generators in its Fock representation."""
    F = fock_rep(d)
    gens = list(F.original_generators)
    basis = [np.eye(F.dim, dtype=complex)]
    for r in range(1, d + 1):
        for S in combinations(range(d), r):
            x = gens[S[0]]
            for k in S[1:]:
                x = x @ gens[k]
            basis.append(x)
    return GradedMatrixAlgebra(basis, F.grading, gens, check=d <= 6)
