"""Fock representation of the Clifford algebra of a finite-dimensional real space.

Clifford relation (negative definite): ``v w + w v = -2 <conj(v), w>``, which
with the conjugate-linear-first inner product is the complex *bilinear* form
``v.T @ w``; real unit vectors square to ``-1``.

Generator constants.  For a Lagrangian frame ``f_j`` the representation is

* ``pi(f_j)       = CREATION_SCALE     * a_j^dagger``   (wedge by ``f_j``)
* ``pi(conj f_j)  = ANNIHILATION_SCALE * a_j``          (contraction against ``<f_j, .>``)

The relation forces ``c * c' = -2``.  Requiring ``adjoint(pi(v)) = pi(conj v)``
has no solution (``|c|^2 = -2``); the solvable choice is
``adjoint(pi(v)) = -pi(conj v)``, giving ``c' = -conj(c)`` and ``|c| = sqrt(2)``.
We fix ``c = sqrt(2)``, ``c' = -sqrt(2)``.  Real vectors then act by
skew-adjoint unitaries (up to norm), so the involution realized on generators
is ``v* = -conj(v)``.  ``tests/test_fock.py`` re-derives the constants.

Basis: subsets of ``{1..n}`` as bitmasks, bit ``j`` <-> ``f_{j+1}``, ordered
by integer value (``∅, {1}, {2}, {1,2}, ...``).  Signs come from the number of
occupied modes below the acted index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch
from .lagrangian import SubLagrangian, complete_sublagrangian, standard_sublagrangian
from .linalg import DEFAULT_TOL, gram_nullspace

CREATION_SCALE = np.sqrt(2.0)
ANNIHILATION_SCALE = -np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PolarizedSpace:
    """Real space ``R^real_dim`` with a (sub-)Lagrangian frame in ``C^real_dim``."""

    real_dim: int
    lagrangian_frame: np.ndarray

    def __post_init__(self):
        L = SubLagrangian(self.lagrangian_frame)
        if L.real_dim != self.real_dim:
            raise DimensionMismatch("frame length does not match real_dim")
        object.__setattr__(self, "lagrangian_frame", L.frame)

    @property
    def sublagrangian(self) -> SubLagrangian:
        return SubLagrangian(self.lagrangian_frame)


def standard_polarization(real_dim: int) -> PolarizedSpace:
    L = standard_sublagrangian(real_dim)
    return PolarizedSpace(real_dim, L.frame)


def popcount_below(state: int, j: int) -> int:
    return bin(state & ((1 << j) - 1)).count("1")


def creation_operators(n: int) -> np.ndarray:
    """Stack of ``a_j^dagger`` (shape ``(n, 2^n, 2^n)``), real entries ``0, ±1``."""
    dim = 1 << n
    ops = np.zeros((n, dim, dim))
    for j in range(n):
        bit = 1 << j
        for s in range(dim):
            if not s & bit:
                ops[j, s | bit, s] = (-1) ** popcount_below(s, j)
    return ops


def fermion_parity(n: int) -> np.ndarray:
    return np.array([(-1) ** bin(s).count("1") for s in range(1 << n)], dtype=float)


@dataclass(frozen=True, eq=False)
class FockRep:
    """Fock representation on ``Λ L`` for a Lagrangian ``L``.

    ``generators[k]`` is ``pi(e_k)`` for the k-th real coordinate vector of the
    ambient space.  When the input space had odd dimension, ``ambient_dim`` is
    ``real_dim + 1`` and the last generator is the auxiliary one.
    """

    n_modes: int
    real_dim: int
    ambient_dim: int
    frame: np.ndarray
    generators: np.ndarray
    grading: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_modes

    @property
    def augmented(self) -> bool:
        return self.ambient_dim != self.real_dim

    @property
    def lagrangian(self) -> SubLagrangian:
        return SubLagrangian(self.frame)

    @property
    def original_generators(self) -> np.ndarray:
        return self.generators[: self.real_dim]


def build_fock_rep(P: PolarizedSpace, seed: int | None = None) -> FockRep:
    """Fock representation of ``P``, completing the frame to a Lagrangian first."""
    L = complete_sublagrangian(P.sublagrangian, seed=seed)
    n = L.rank
    adag = creation_operators(n)
    a = np.transpose(adag, (0, 2, 1))
    F = L.frame
    gens = CREATION_SCALE * np.einsum("kj,jab->kab", np.conj(F), adag) + ANNIHILATION_SCALE * np.einsum(
        "kj,jab->kab", F, a
    )
    return FockRep(
        n_modes=n,
        real_dim=P.real_dim,
        ambient_dim=L.real_dim,
        frame=F,
        generators=gens.astype(complex),
        grading=np.diag(fermion_parity(n)).astype(complex),
    )


def fock_rep(real_dim: int) -> FockRep:
    """Fock representation for the standard frame of ``R^real_dim``."""
    return build_fock_rep(standard_polarization(real_dim))


def clifford_element(F: FockRep, v) -> np.ndarray:
    """``pi(v)``, complex-linear in ``v`` (length ``real_dim`` or ``ambient_dim``)."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.size == F.real_dim and F.augmented:
        v = np.concatenate([v, np.zeros(F.ambient_dim - F.real_dim)])
    if v.size != F.ambient_dim:
        raise DimensionMismatch(f"vector of length {v.size}, space has dim {F.real_dim}")
    return np.tensordot(v, F.generators, axes=1)


def grading_operator(F: FockRep) -> np.ndarray:
    return F.grading


@dataclass(frozen=True)
class RelationReport:
    max_residual: float
    worst_pair: tuple[int, int] | None
    passed: bool


def check_clifford_relations(F: FockRep, tol: float = 1e-12) -> RelationReport:
    """Max over coordinate pairs of ``||pi(e_k)pi(e_l) + pi(e_l)pi(e_k) + 2 delta_kl||_2``."""
    eye = np.eye(F.dim)
    worst, pair = 0.0, None
    gens = F.generators
    for k in range(F.ambient_dim):
        for l in range(k, F.ambient_dim):
            R = gens[k] @ gens[l] + gens[l] @ gens[k] + (2.0 if k == l else 0.0) * eye
            r = float(np.linalg.norm(R, 2))
            if pair is None or r > worst:
                worst, pair = r, (k, l)
    return RelationReport(worst, pair, worst < tol)


def _commutation_blocks(ops, sign: int):
    """Sparse maps ``X -> X u - sign * u X`` in row-major vectorization."""
    blocks = []
    for u in ops:
        us = sp.csr_matrix(u)
        eye = sp.identity(u.shape[0], format="csr")
        blocks.append(sp.kron(eye, us.T) - sign * sp.kron(us, eye))
    return blocks


def commutant_basis(ops, tol: float = 1e-8) -> np.ndarray:
    """Basis (as vectorized columns) of ``{X : X u = u X for all u in ops}``."""
    D = ops[0].shape[0]
    return gram_nullspace(_commutation_blocks(ops, +1), D * D, null_tol=tol)


def commutant_dim(F: FockRep, which: str = "all") -> int:
    """Dimension of the commutant of the generators (1 means irreducible)."""
    gens = F.generators if which == "all" else F.original_generators
    if len(gens) == 0:
        return 1
    return commutant_basis(list(gens)).shape[1]


def graded_commutant_dim(F: FockRep, which: str = "all") -> int:
    """Dimension of the graded commutant: even X commuting plus odd X anticommuting."""
    gens = list(F.generators if which == "all" else F.original_generators)
    if not gens:
        return 1
    D = F.dim
    parity = np.real(np.diag(F.grading))
    same = (parity[:, None] == parity[None, :]).ravel()
    even_cols = np.flatnonzero(same)
    odd_cols = np.flatnonzero(~same)
    even = gram_nullspace(_commutation_blocks(gens, +1), D * D, columns=even_cols)
    odd = gram_nullspace(_commutation_blocks(gens, -1), D * D, columns=odd_cols)
    return even.shape[1] + odd.shape[1]
