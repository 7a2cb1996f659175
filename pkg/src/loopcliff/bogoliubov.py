"""Bogoliubov automorphisms and their implementers on a finite Fock space.

An orthogonal ``g`` of the real space acts on the Clifford algebra by
``pi(v) -> pi(g v)``.  An implementer is a unitary ``U`` with
``U pi(v) U^* = pi(g v)`` for all ``v``; by irreducibility it is unique up to
a phase, and it is either even or odd for the Fock grading.

Two solvers are provided:

``"gram"``
    Solve the intertwiner system ``U pi(e_k) - pi(g e_k) U = 0`` on all
    ``4^n`` unknowns.  The kernel is read off the Gram matrix
    ``sum_k A_k^H A_k`` by a Hermitian eigensolver (two lowest eigenpairs),
    which is cheaper than an SVD of the stacked system and equally decisive
    because the residual is re-checked directly.
``"vacuum"``
    Find the new vacuum ``psi`` (joint kernel of the transformed
    annihilators) and set ``U e_S = pi(g f_{s_1}) ... pi(g f_{s_k}) psi / c^k``.
    Cost is dominated by ``2^n`` matrix-vector chains instead of a ``4^n``
    linear system.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InhomogeneousError, NoSolutionError, NotOrthogonalError
from .fock import CREATION_SCALE, FockRep
from .lagrangian import SubLagrangian
from .linalg import DEFAULT_TOL, hs_norm, is_orthogonal

#: method "auto" switches from the Gram solve to vacuum transport above this many modes
GRAM_MAX_MODES = 5


@dataclass(frozen=True, eq=False)
class Implementer:
    """Unitary ``U`` with ``U pi(v) U^* = pi(g v)``.

    Attributes
    ----------
    unitary : ndarray
    parity : int
        0 if ``U`` commutes with the grading, 1 if it anticommutes.
    phase_convention : str
        Description of how the free phase was fixed.
    residual : float
        ``max_k ||U pi(e_k) - pi(g e_k) U||_2`` after normalization.
    """

    unitary: np.ndarray
    parity: int
    phase_convention: str
    residual: float


def check_orthogonal(g, tol: float = 1e-9) -> np.ndarray:
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"g must be square, got shape {g.shape}")
    if not is_orthogonal(g, tol):
        raise NotOrthogonalError("g is not a real orthogonal matrix")
    return np.real(g).astype(float)


def restricted_defect(g, L: SubLagrangian) -> float:
    """``||[g, P_L]||_HS``; zero iff ``g`` preserves ``L``."""
    g = check_orthogonal(g)
    if g.shape[0] != L.real_dim:
        raise DimensionMismatch(f"g has size {g.shape[0]}, space has dim {L.real_dim}")
    P = L.projection
    return hs_norm(g @ P - P @ g)


def _ambient_g(F: FockRep, g) -> np.ndarray:
    """Extend ``g`` by the identity on the auxiliary coordinate when needed."""
    g = check_orthogonal(g)
    if g.shape[0] == F.ambient_dim:
        return g
    if g.shape[0] == F.real_dim:
        out = np.eye(F.ambient_dim)
        out[: F.real_dim, : F.real_dim] = g
        return out
    raise DimensionMismatch(f"g has size {g.shape[0]}, space has dim {F.real_dim}")


def transformed_generators(F: FockRep, g) -> np.ndarray:
    """``pi(g e_k)`` for every ambient coordinate ``k``."""
    g = _ambient_g(F, g)
    return np.tensordot(g.T, F.generators, axes=1)


def intertwiner_residual(F: FockRep, g, U) -> float:
    new = transformed_generators(F, g)
    return max(
        (float(np.linalg.norm(U @ p - q @ U, 2)) for p, q in zip(F.generators, new)),
        default=0.0,
    )


def normalize_phase(U: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Rescale so that ``U`` is unitary and its first entry above ``tol``
    (row-major, i.e. lexicographic basis order) is real positive."""
    D = U.shape[0]
    U = U * (np.sqrt(D) / np.linalg.norm(U))
    flat = U.ravel()
    idx = np.flatnonzero(np.abs(flat) > tol)
    if idx.size == 0:
        raise NoSolutionError("intertwiner is zero")
    z = flat[idx[0]]
    return U * (abs(z) / z)


PHASE_CONVENTION = "first entry above 1e-8 in row-major order made real positive"


def _solve_gram(F: FockRep, g: np.ndarray, tol: float) -> np.ndarray:
    D = F.dim
    eye = np.eye(D)
    new = transformed_generators(F, g)
    Q = np.zeros((D * D, D * D), dtype=complex)
    for p, q in zip(F.generators, new):
        A = np.kron(eye, p.T) - np.kron(q, eye)
        Q += A.conj().T @ A
    w, v = scipy.linalg.eigh(Q, subset_by_index=[0, min(1, D * D - 1)])
    scale = max(1.0, float(np.abs(Q).max()))
    if w[0] > 1e-8 * scale:
        raise NoSolutionError(f"no solution above tolerance: smallest Gram eigenvalue {w[0]:.3e}")
    if D * D > 1 and w[1] < 1e-3 * scale:
        raise NoSolutionError(f"intertwiner not unique: second Gram eigenvalue {w[1]:.3e}")
    return v[:, 0].reshape(D, D)


def _solve_vacuum(F: FockRep, g: np.ndarray, tol: float) -> np.ndarray:
    n, D = F.n_modes, F.dim
    gF = g @ F.frame
    gens = F.generators
    create = np.tensordot(gF.T, gens, axes=1)  # pi(g f_j)
    annihilate = np.tensordot(np.conj(gF).T, gens, axes=1)  # pi(g conj f_j)
    if n == 0:
        return np.eye(1, dtype=complex)
    stacked = annihilate.reshape(n * D, D)
    _, s, vh = np.linalg.svd(stacked)
    if s[-1] > 1e-8 * max(1.0, s[0]):
        raise NoSolutionError(f"no vacuum: smallest singular value {s[-1]:.3e}")
    if D > 1 and s[-2] < 1e-3:
        raise NoSolutionError("vacuum not unique")
    psi = np.conj(vh[-1])
    U = np.zeros((D, D), dtype=complex)
    U[:, 0] = psi
    for S in range(1, D):
        low = S & -S
        j = low.bit_length() - 1
        U[:, S] = create[j] @ U[:, S ^ low] / CREATION_SCALE
    return U


def solve_implementer(
    F: FockRep, g, tol: float = DEFAULT_TOL, method: str = "auto"
) -> Implementer:
    """Implementer of ``g`` on ``F``, phase normalized, with parity.

    Parameters
    ----------
    F : FockRep
    g : (m, m) real orthogonal matrix
        ``m`` is ``F.real_dim`` (extended by ``1`` on the auxiliary coordinate
        if the space was augmented) or ``F.ambient_dim``.
    tol : float
        Residual and homogeneity tolerance.
    method : {"auto", "gram", "vacuum"}

    Raises
    ------
    NoSolutionError
        Empty or non-unique solution space, or residual above ``tol``.
    InhomogeneousError
        ``U`` neither commutes nor anticommutes with the grading.
    """
    g = _ambient_g(F, g)
    if method == "auto":
        method = "gram" if F.n_modes <= GRAM_MAX_MODES else "vacuum"
    if method == "gram":
        raw = _solve_gram(F, g, tol)
    elif method == "vacuum":
        raw = _solve_vacuum(F, g, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    U = normalize_phase(raw)
    res = intertwiner_residual(F, g, U)
    if res > max(tol, 1e-9) * max(1, F.ambient_dim):
        raise NoSolutionError(f"no solution above tolerance: residual {res:.3e}")
    return Implementer(U, homogeneity_parity(U, F.grading, tol), PHASE_CONVENTION, res)


def homogeneity_parity(U, grading, tol: float = DEFAULT_TOL) -> int:
    """0 if ``U`` commutes with the grading, 1 if it anticommutes."""
    even = float(np.linalg.norm(U @ grading - grading @ U, 2))
    odd = float(np.linalg.norm(U @ grading + grading @ U, 2))
    small, large = min(even, odd), max(even, odd)
    threshold = max(tol, 1e-9) * max(1.0, np.sqrt(U.shape[0]))
    if small >= threshold or large <= 0.5:
        raise InhomogeneousError(f"inhomogeneous solution: ||[U,G]|| = {even:.3e}, ||{{U,G}}|| = {odd:.3e}")
    return 0 if even < odd else 1


def implementer_parity(F: FockRep, g, tol: float = DEFAULT_TOL) -> int:
    return solve_implementer(F, g, tol).parity


def cocycle_phase(F: FockRep, g, h, tol: float = DEFAULT_TOL) -> complex:
    """``lambda(g, h)`` with ``U_g U_h = lambda U_{gh}``."""
    g = _ambient_g(F, g)
    h = _ambient_g(F, h)
    Ug = solve_implementer(F, g, tol).unitary
    Uh = solve_implementer(F, h, tol).unitary
    Ugh = solve_implementer(F, g @ h, tol).unitary
    prod = Ug @ Uh
    lam = complex(np.trace(Ugh.conj().T @ prod) / F.dim)
    if abs(abs(lam) - 1) > 1e-8 or np.linalg.norm(prod - lam * Ugh, 2) > 1e-8:
        raise NoSolutionError("U_g U_h is not a scalar multiple of U_gh")
    return lam
