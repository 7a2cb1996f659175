"""Truncated loop algebra: the space of square-integrable ``R^d``-valued loops,
its standard polarization, and the central-extension cocycles.

Conventions
-----------
Fields are finite Fourier sums ``X(t) = sum_k a_k exp(-i k t)`` with
``d x d`` complex coefficients.  An element of the (complexified) loop algebra
of ``so(d)`` has every ``a_k`` skew; it is real exactly when
``a_{-k} = conj(a_k)``.  The single-mode fields ``a exp(-i k t)`` used in the
cocycle computations are complex, so reality is a separate flag.

The truncated Hilbert space is spanned by ``xi (x) chi_n`` with
``chi_n(t) = exp(i n t) / sqrt(2 pi)``, ``|n| <= N``.  Coordinates are
ordered mode-major, ``index = (n + N) * d + i``, followed by one auxiliary
coordinate when ``d`` is odd.  Multiplication by ``a exp(-i k t)`` sends
``xi (x) chi_n`` to ``a xi (x) chi_{n-k}``.

The Lagrangian is spanned by the modes ``n >= 1`` together with a Lagrangian
``L_0`` of the constants (plus the auxiliary line for odd ``d``), chosen by
:func:`loopcliff.lagrangian.complete_sublagrangian`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DimensionMismatch, FormulaMismatchError, NotOrthogonalError, TruncationError
from .lagrangian import SubLagrangian, complete_sublagrangian

SKEW_TOL = 1e-10


def _as_matrix(a, d: int | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise DimensionMismatch(f"expected {d}x{d}, got {a.shape}")
    return a


# ---------------------------------------------------------------------------
# loop fields


@dataclass(frozen=True, eq=False)
class LoopMatrixField:
    """Finite Fourier series ``X(t) = sum_k a_k exp(-i k t)``.

    Parameters
    ----------
    d : int
    coeffs : dict of int -> (d, d) array
    kind : {"algebra", "matrix"}
        ``"algebra"`` requires every coefficient to be skew-symmetric.
    """

    d: int
    coeffs: dict = field(default_factory=dict)
    kind: str = "algebra"

    def __post_init__(self):
        clean = {}
        for k, a in self.coeffs.items():
            a = _as_matrix(a, self.d)
            if np.any(a != 0):
                clean[int(k)] = a
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        if self.kind not in ("algebra", "matrix"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "algebra":
            for k, a in self.coeffs.items():
                if np.max(np.abs(a + a.T)) > SKEW_TOL * max(1.0, np.max(np.abs(a))):
                    raise ValueError(f"coefficient of mode {k} is not skew-symmetric")

    @property
    def support(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    @property
    def modes(self) -> list[int]:
        return list(self.coeffs)

    def coeff(self, k: int) -> np.ndarray:
        return self.coeffs.get(k, np.zeros((self.d, self.d), dtype=complex))

    def is_real(self, tol: float = SKEW_TOL) -> bool:
        return all(np.allclose(self.coeff(-k), np.conj(a), atol=tol) for k, a in self.coeffs.items())

    def _combine(self, other: "LoopMatrixField", sign: float) -> "LoopMatrixField":
        if other.d != self.d:
            raise DimensionMismatch("fields have different matrix sizes")
        keys = set(self.coeffs) | set(other.coeffs)
        kind = "algebra" if self.kind == other.kind == "algebra" else "matrix"
        return LoopMatrixField(self.d, {k: self.coeff(k) + sign * other.coeff(k) for k in keys}, kind)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c):
        return LoopMatrixField(self.d, {k: c * a for k, a in self.coeffs.items()}, self.kind)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def derivative(self) -> "LoopMatrixField":
        return LoopMatrixField(self.d, {k: -1j * k * a for k, a in self.coeffs.items()}, self.kind)

    def conj(self) -> "LoopMatrixField":
        """Pointwise complex conjugate."""
        return LoopMatrixField(self.d, {-k: np.conj(a) for k, a in self.coeffs.items()}, self.kind)

    def evaluate(self, t) -> np.ndarray:
        """Samples ``X(t)``, shape ``(len(t), d, d)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, self.d, self.d), dtype=complex)
        for k, a in self.coeffs.items():
            out += np.exp(-1j * k * t)[:, None, None] * a
        return out


def single_mode(a, k: int) -> LoopMatrixField:
    """``a exp(-i k t)``."""
    a = _as_matrix(a)
    return LoopMatrixField(a.shape[0], {k: a})


def bracket(X: LoopMatrixField, Y: LoopMatrixField) -> LoopMatrixField:
    """Pointwise commutator, a convolution of Fourier coefficients."""
    if X.d != Y.d:
        raise DimensionMismatch("fields have different matrix sizes")
    out: dict[int, np.ndarray] = {}
    for k, a in X.coeffs.items():
        for l, b in Y.coeffs.items():
            out[k + l] = out.get(k + l, 0) + a @ b - b @ a
    kind = "algebra" if X.kind == Y.kind == "algebra" else "matrix"
    return LoopMatrixField(X.d, out, kind)


def random_skew_complex(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (A - A.T) / 2


def random_so(d: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((d, d))
    return (A - A.T) / 2


def random_loop_field(d: int, support: int, rng: np.random.Generator, real: bool = True) -> LoopMatrixField:
    """Random field in the loop algebra of ``so(d)`` with modes ``|k| <= support``."""
    coeffs: dict[int, np.ndarray] = {}
    if real:
        coeffs[0] = random_so(d, rng).astype(complex)
        for k in range(1, support + 1):
            a = random_skew_complex(d, rng)
            coeffs[k] = a
            coeffs[-k] = np.conj(a)
    else:
        for k in range(-support, support + 1):
            coeffs[k] = random_skew_complex(d, rng)
    return LoopMatrixField(d, coeffs)


# ---------------------------------------------------------------------------
# truncated Hilbert space


@dataclass(frozen=True, eq=False)
class TruncatedLoopSpace:
    """Fourier window of the loop Hilbert space with a Lagrangian.

    Attributes
    ----------
    d, N : int
    modes : ndarray
        Sorted Fourier modes present (integers, or half-integers for the
        antiperiodic polarization).
    aux : bool
        One auxiliary coordinate appended last (odd ``d``, periodic case).
    projection : sparse matrix
        ``P_L`` in Fourier coordinates.
    L0 : ndarray or None
        Frame of the Lagrangian chosen inside the constants (and auxiliary line).
    """

    d: int
    N: int
    modes: np.ndarray
    aux: bool
    projection: sp.csr_matrix
    L0: np.ndarray | None = None
    polarization: str = "periodic"

    # -- constructors --------------------------------------------------------

    @classmethod
    def periodic(cls, d: int, N: int, seed: int | None = None) -> "TruncatedLoopSpace":
        if d < 1 or N < 0:
            raise ValueError("need d >= 1 and N >= 0")
        modes = np.arange(-N, N + 1, dtype=float)
        aux = d % 2 == 1
        L0 = complete_sublagrangian(SubLagrangian(np.zeros((d, 0), dtype=complex)), seed=seed).frame
        dim = len(modes) * d + int(aux)
        P = sp.lil_matrix((dim, dim), dtype=complex)
        for idx in range((N + 1) * d, (2 * N + 1) * d):
            P[idx, idx] = 1.0
        kidx = list(range(N * d, (N + 1) * d)) + ([dim - 1] if aux else [])
        P0 = L0 @ L0.conj().T
        for r, i in enumerate(kidx):
            for c, j in enumerate(kidx):
                if P0[r, c] != 0:
                    P[i, j] = P0[r, c]
        return cls(d, N, modes, aux, P.tocsr(), L0, "periodic")

    @classmethod
    def antiperiodic(cls, d: int, N: int) -> "TruncatedLoopSpace":
        """Half-integer modes ``±1/2, ..., ±(N + 1/2)``; Lagrangian = positive modes."""
        modes = np.arange(-N - 1, N + 1, dtype=float) + 0.5
        dim = len(modes) * d
        diag = np.repeat((modes > 0).astype(complex), d)
        return cls(d, N, modes, False, sp.diags(diag, format="csr"), None, "antiperiodic")

    def opposite(self) -> "TruncatedLoopSpace":
        """Same window with the orthogonal-complement Lagrangian ``conj(L)``."""
        eye = sp.identity(self.dim, dtype=complex, format="csr")
        L0 = None if self.L0 is None else np.conj(self.L0)
        return TruncatedLoopSpace(
            self.d, self.N, self.modes, self.aux, (eye - self.projection).tocsr(), L0, self.polarization + "-opposite"
        )

    # -- geometry ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.modes) * self.d + int(self.aux)

    @property
    def loop_dim(self) -> int:
        """Dimension without the auxiliary coordinate."""
        return len(self.modes) * self.d

    def mode_position(self, mode: float) -> int | None:
        pos = int(round(mode - self.modes[0]))
        if 0 <= pos < len(self.modes) and self.modes[pos] == mode:
            return pos
        return None

    @property
    def conj_projection(self) -> sp.csr_matrix:
        return (sp.identity(self.dim, dtype=complex, format="csr") - self.projection).tocsr()

    @property
    def complex_structure(self) -> sp.csr_matrix:
        """``J = i (P_L - P_conj(L))``."""
        return (1j * (self.projection - self.conj_projection)).tocsr()

    def conjugation(self) -> sp.csr_matrix:
        """Permutation matrix implementing ``v -> conj`` up to entrywise conjugation:
        ``conj(v)`` has Fourier coordinates ``R @ np.conj(v)``."""
        perm = np.arange(self.dim)
        m = len(self.modes)
        for p in range(m):
            q = m - 1 - p
            perm[p * self.d:(p + 1) * self.d] = np.arange(q * self.d, (q + 1) * self.d)
        return sp.csr_matrix((np.ones(self.dim), (np.arange(self.dim), perm)), shape=(self.dim, self.dim))

    def real_basis(self) -> np.ndarray:
        """Unitary ``W`` whose columns are real basis vectors in Fourier coordinates.

        For a pair ``±nu`` with ``nu > 0``, the cosine vector
        ``(chi_nu + chi_-nu)/sqrt(2)`` sits at the position of ``nu`` and the sine
        vector ``(chi_nu - chi_-nu)/(i sqrt(2))`` at the position of ``-nu``.
        Constants and the auxiliary coordinate are unchanged.
        """
        W = np.zeros((self.dim, self.dim), dtype=complex)
        d = self.d
        s = 1 / np.sqrt(2)
        for p, nu in enumerate(self.modes):
            q = self.mode_position(-nu)
            for i in range(d):
                a, b = p * d + i, q * d + i
                if nu == 0:
                    W[a, a] = 1.0
                elif nu > 0:
                    W[a, a], W[b, a] = s, s
                    W[a, b], W[b, b] = -1j * s, 1j * s
        if self.aux:
            W[-1, -1] = 1.0
        return W

    def to_real(self, M) -> np.ndarray:
        """Matrix of ``M`` in the real basis (real when ``M`` commutes with conjugation)."""
        W = self.real_basis()
        M = M.toarray() if sp.issparse(M) else np.asarray(M)
        return W.conj().T @ M @ W

    def lagrangian(self) -> SubLagrangian:
        """The full Lagrangian as a :class:`SubLagrangian` in real coordinates."""
        P = self.projection.toarray()
        w, v = np.linalg.eigh(P)
        frame = v[:, w > 0.5]
        return SubLagrangian(self.real_basis().conj().T @ frame)

    def sublagrangian(self) -> SubLagrangian:
        """Positive modes only, in real coordinates without the auxiliary line."""
        W = self.real_basis()[: self.loop_dim, : self.loop_dim]
        cols = [p * self.d + i for p, nu in enumerate(self.modes) if nu > 0 for i in range(self.d)]
        frame = np.zeros((self.loop_dim, len(cols)), dtype=complex)
        frame[cols, np.arange(len(cols))] = 1.0
        return SubLagrangian(W.conj().T @ frame)


@lru_cache(maxsize=64)
def periodic_space(d: int, N: int, seed: int | None = None) -> TruncatedLoopSpace:
    """Cached :meth:`TruncatedLoopSpace.periodic`."""
    return TruncatedLoopSpace.periodic(d, N, seed)


# ---------------------------------------------------------------------------
# operators


def multiplication_operator(X: LoopMatrixField, S: TruncatedLoopSpace) -> sp.csr_matrix:
    """Pointwise multiplication by ``X`` on the window (zero on the auxiliary line).

    Components leaving the window are dropped; :func:`edge_loss` reports whether
    that happened.
    """
    if X.d != S.d:
        raise DimensionMismatch(f"field has d={X.d}, space has d={S.d}")
    if X.support > 2 * S.N:
        raise TruncationError(f"support {X.support} exceeds 2N = {2 * S.N}")
    d = S.d
    rows, cols, vals = [], [], []
    ii, jj = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    for k, a in X.coeffs.items():
        for p, nu in enumerate(S.modes):
            q = S.mode_position(nu - k)
            if q is None:
                continue
            rows.append((q * d + ii).ravel())
            cols.append((p * d + jj).ravel())
            vals.append(a.ravel())
    if not rows:
        return sp.csr_matrix((S.dim, S.dim), dtype=complex)
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(S.dim, S.dim)
    )


def edge_loss(X: LoopMatrixField, S: TruncatedLoopSpace) -> bool:
    """True if multiplication by ``X`` maps some window mode outside the window."""
    return any(S.mode_position(nu - k) is None for k in X.coeffs for nu in S.modes)


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks of ``M`` for ``H = L ⊕ conj(L)``.

    ``x_prime = P M P``, ``x = Pbar M P``, ``x_bar = P M Pbar`` and
    ``x_bar_prime = Pbar M Pbar``.  For real ``M``, ``x_bar`` is the
    conjugate of ``x`` under the real structure.
    """

    x_prime: np.ndarray
    x: np.ndarray
    x_bar: np.ndarray
    x_bar_prime: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.x_prime + self.x + self.x_bar + self.x_bar_prime


def block_decompose(M, S: TruncatedLoopSpace) -> BlockDecomposition:
    M = sp.csr_matrix(M, dtype=complex)
    if M.shape != (S.dim, S.dim):
        raise DimensionMismatch(f"operator has shape {M.shape}, space has dim {S.dim}")
    P, Q = S.projection, S.conj_projection
    return BlockDecomposition(
        (P @ M @ P).toarray(), (Q @ M @ P).toarray(), (P @ M @ Q).toarray(), (Q @ M @ Q).toarray()
    )


def _trace_product(A, B) -> complex:
    """``tr(A B)`` for sparse ``A``, ``B``."""
    return complex(A.multiply(B.T).sum())


def _check_window(S: TruncatedLoopSpace, *fields: LoopMatrixField) -> None:
    for X in fields:
        if 2 * X.support > S.N:
            raise TruncationError(
                f"truncation-unsafe: support {X.support} exceeds N/2 = {S.N / 2:g}"
            )


def omega_imp_formulas(X: LoopMatrixField, Y: LoopMatrixField, S: TruncatedLoopSpace) -> tuple[complex, complex]:
    """Both evaluations of the implementer cocycle.

    Returns ``((i/2) tr(x_bar y - y_bar x), (1/8) tr(J [J, X] [J, Y]))``.
    """
    _check_window(S, X, Y)
    MX = multiplication_operator(X, S)
    MY = multiplication_operator(Y, S)
    P, Q = S.projection, S.conj_projection
    block = 0.5j * (_trace_product(P @ MX @ Q, MY) - _trace_product(P @ MY @ Q, MX))
    J = S.complex_structure
    CX = J @ MX - MX @ J
    CY = J @ MY - MY @ J
    jform = _trace_product(J @ CX, CY) / 8
    return block, jform


def cocycle_omega_imp(
    X: LoopMatrixField, Y: LoopMatrixField, S: TruncatedLoopSpace, tol: float = 1e-9
) -> complex:
    """Implementer cocycle ``Omega(X, Y)``, cross-checked by two formulas.

    Raises
    ------
    TruncationError
        If a support exceeds ``N/2``.
    FormulaMismatchError
        If the block-trace and complex-structure formulas disagree.
    """
    block, jform = omega_imp_formulas(X, Y, S)
    if abs(block - jform) > tol * (1 + abs(block)):
        raise FormulaMismatchError(f"cocycle formulas disagree: {block} vs {jform}")
    return block


def cocycle_omega_loop(X: LoopMatrixField, Y: LoopMatrixField) -> complex:
    """``(1/2 pi) int tr(X Y')`` in exact Fourier arithmetic."""
    if X.d != Y.d:
        raise DimensionMismatch("fields have different matrix sizes")
    total = 0j
    for l, b in Y.coeffs.items():
        a = X.coeffs.get(-l)
        if a is not None:
            total += -1j * l * np.trace(a @ b)
    return complex(total)


def constant_mode_structure(S: TruncatedLoopSpace) -> np.ndarray:
    """``J_0 = i (P_0 - conj(P_0))`` compressed to the constants ``V_0``.

    Zero for polarizations without constant modes.
    """
    d = S.d
    if S.L0 is None:
        return np.zeros((d, d))
    P0 = S.L0 @ S.L0.conj().T
    return np.real(1j * (P0 - np.conj(P0)))[:d, :d]


def omega_coboundary(X: LoopMatrixField, Y: LoopMatrixField, S: TruncatedLoopSpace) -> complex:
    """``mu([X, Y])`` with ``mu(Z) = tr(J_0 z_0) / 4``, ``z_0`` the constant mode of ``Z``.

    On the periodic window the implementer cocycle and the loop cocycle satisfy
    ``2 Omega + omega = 2 mu([X, Y])`` exactly: the constant-mode Lagrangian
    ``L_0`` contributes this coboundary, and no choice of ``L_0`` removes it when
    ``d >= 3``.  The antiperiodic polarization has no constant modes and ``mu = 0``.
    """
    z0 = sum((X.coeff(k) @ Y.coeff(-k) - Y.coeff(-k) @ X.coeff(k) for k in X.coeffs), np.zeros((S.d, S.d)))
    return complex(np.trace(constant_mode_structure(S) @ z0) / 4)


def central_identity_terms(
    X: LoopMatrixField, Y: LoopMatrixField, S: TruncatedLoopSpace
) -> tuple[complex, complex, complex]:
    """``(Omega, omega, mu([X, Y]))``."""
    return cocycle_omega_imp(X, Y, S), cocycle_omega_loop(X, Y), omega_coboundary(X, Y, S)


def verify_central_identity(
    d: int,
    k: int,
    l: int,
    a,
    b,
    N: int,
    space: TruncatedLoopSpace | None = None,
    modulo_coboundary: bool = False,
) -> float:
    """``|2 Omega(a e^{-ikt}, b e^{-ilt}) + omega(...)|``.

    With ``modulo_coboundary=True`` the constant-mode coboundary
    ``2 mu([X, Y])`` (see :func:`omega_coboundary`) is subtracted first.
    """
    S = space if space is not None else periodic_space(d, N)
    if S.d != d or S.N != N:
        raise DimensionMismatch("space does not match (d, N)")
    X = single_mode(_as_matrix(a, d), k)
    Y = single_mode(_as_matrix(b, d), l)
    Om, om, mu = central_identity_terms(X, Y, S)
    return abs(2 * Om + om - (2 * mu if modulo_coboundary else 0))


def cocycle_sigma(x, y, z) -> float:
    """``tr(x [y, z]) / (8 pi^2)`` on ``so(d)``."""
    x, y, z = (np.asarray(m) for m in (x, y, z))
    if not (x.shape == y.shape == z.shape) or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch("sigma needs three square matrices of the same size")
    for m in (x, y, z):
        if np.max(np.abs(m + m.T), initial=0.0) > SKEW_TOL * max(1.0, np.max(np.abs(m), initial=0.0)):
            raise ValueError("sigma arguments must be skew-symmetric")
    val = np.trace(x @ (y @ z - z @ y)) / (8 * np.pi**2)
    return float(np.real(val)) if np.isrealobj(x) and np.isrealobj(y) and np.isrealobj(z) else val


def _sigma_samples(x, y, z) -> np.ndarray:
    return np.einsum("tij,tji->t", x, y @ z - z @ y) / (8 * np.pi**2)


# ---------------------------------------------------------------------------
# group loops and the d-beta identity


@dataclass(frozen=True, eq=False)
class GroupLoop:
    """Sampled closed loop in ``SO(d)`` on ``t_j = 2 pi j / M``.

    ``gamma[j]`` is ``gamma(t_j)`` and ``mc[j]`` is ``gamma(t_j)^{-1} gamma'(t_j)``.
    """

    times: np.ndarray
    gamma: np.ndarray
    mc: np.ndarray
    winding: tuple

    @property
    def d(self) -> int:
        return self.gamma.shape[1]

    @property
    def M(self) -> int:
        return len(self.times)


def _block_rotation_generator(d: int, windings) -> np.ndarray:
    A = np.zeros((d, d))
    for j, m in enumerate(windings):
        A[2 * j, 2 * j + 1] = -m
        A[2 * j + 1, 2 * j] = m
    return A


def closed_loop(
    d: int,
    windings,
    M: int = 2048,
    Q=None,
    B=None,
    f_sin=(),
    f_cos=(),
) -> GroupLoop:
    """``gamma(t) = Q exp(t A0) Q^T exp(f(t) B)``.

    ``A0`` is block diagonal with integer windings ``m_j`` on the planes
    ``(2j, 2j+1)``, so the first factor closes at ``t = 2 pi``.  ``f`` is the
    trigonometric polynomial ``sum_j f_sin[j] sin((j+1) t) + f_cos[j] (cos((j+1) t) - 1)``
    and ``B`` a skew matrix, so the second factor is periodic.
    """
    windings = tuple(int(m) for m in windings)
    if 2 * len(windings) > d:
        raise DimensionMismatch(f"{len(windings)} rotation planes do not fit in dimension {d}")
    Q = np.eye(d) if Q is None else np.asarray(Q, dtype=float)
    B = np.zeros((d, d)) if B is None else np.asarray(B, dtype=float)
    t = 2 * np.pi * np.arange(M) / M
    f = np.zeros(M)
    fp = np.zeros(M)
    for j, c in enumerate(f_sin):
        f += c * np.sin((j + 1) * t)
        fp += c * (j + 1) * np.cos((j + 1) * t)
    for j, c in enumerate(f_cos):
        f += c * (np.cos((j + 1) * t) - 1)
        fp -= c * (j + 1) * np.sin((j + 1) * t)
    A = Q @ _block_rotation_generator(d, windings) @ Q.T
    # exp(t A) via the eigen-decomposition of the real skew A
    w, V = np.linalg.eig(A)
    Vi = np.linalg.inv(V)
    wB, VB = np.linalg.eig(B)
    VBi = np.linalg.inv(VB)
    gamma = np.empty((M, d, d))
    mc = np.empty((M, d, d))
    for j in range(M):
        E = np.real((V * np.exp(t[j] * w)) @ Vi)
        G = np.real((VB * np.exp(f[j] * wB)) @ VBi)
        gamma[j] = E @ G
        mc[j] = G.T @ A @ G + fp[j] * B
    return GroupLoop(t, gamma, mc, windings)


def random_closed_loop(d: int, rng: np.random.Generator, max_winding: int = 3, M: int = 2048) -> GroupLoop:
    from .linalg import random_orthogonal

    planes = d // 2
    windings = rng.integers(-max_winding, max_winding + 1, size=max(planes, 1))[:planes]
    return closed_loop(
        d,
        windings,
        M=M,
        Q=random_orthogonal(d, rng),
        B=random_so(d, rng),
        f_sin=rng.standard_normal(2) * 0.5,
        f_cos=rng.standard_normal(2) * 0.5,
    )


@dataclass(frozen=True)
class DbetaResult:
    dbeta: complex
    rhs: complex
    omega: complex
    tau_sigma: complex

    @property
    def residual(self) -> float:
        return abs(self.dbeta - self.rhs)


def dbeta_terms(gamma: GroupLoop, Xt: LoopMatrixField, Yt: LoopMatrixField, tol: float = 1e-9) -> DbetaResult:
    """Both sides of ``d beta = -2 (2 pi) omega_bar - 8 pi^2 tau(sigma_bar)`` at ``gamma``.

    ``Xt``, ``Yt`` are the left-trivialized tangent vectors ``gamma^{-1} X`` and
    ``gamma^{-1} Y`` (fields in the loop algebra of ``so(d)``).  Integrals use the
    composite trapezoid rule on the loop's sample grid.
    """
    if Xt.d != gamma.d or Yt.d != gamma.d:
        raise DimensionMismatch("fields and loop have different d")
    if Xt.kind != "algebra" or Yt.kind != "algebra":
        raise ValueError("left-trivialized tangent vectors must be skew fields")
    g = gamma.gamma
    eye = np.eye(gamma.d)
    orth = np.max(np.abs(np.einsum("tji,tjk->tik", g, g) - eye))
    if orth > tol * gamma.d:
        raise NotOrthogonalError(f"loop samples are not orthogonal (defect {orth:.2e})")
    t = gamma.times
    # tangent vectors at gamma, then back to the identity
    X = g @ Xt.evaluate(t)
    Y = g @ Yt.evaluate(t)
    gT = np.transpose(g, (0, 2, 1))
    xs, ys = gT @ X, gT @ Y
    xd = Xt.derivative().evaluate(t)
    yd = Yt.derivative().evaluate(t)
    comm = xs @ ys - ys @ xs
    mc_term = np.einsum("tij,tji->t", gamma.mc, comm)
    integrand = np.einsum("tij,tji->t", xd, ys) - np.einsum("tij,tji->t", yd, xs) - mc_term
    h = 2 * np.pi / gamma.M
    dbeta = complex(h * integrand.sum())
    tau_sigma = complex(h * _sigma_samples(gamma.mc, xs, ys).sum())
    omega = cocycle_omega_loop(Xt, Yt)
    rhs = -2 * 2 * np.pi * omega - 8 * np.pi**2 * tau_sigma
    return DbetaResult(dbeta, rhs, omega, tau_sigma)


def verify_dbeta_identity(gamma: GroupLoop, Xt: LoopMatrixField, Yt: LoopMatrixField) -> float:
    """Residual ``|d beta - (-4 pi omega - 8 pi^2 tau(sigma))|``."""
    return dbeta_terms(gamma, Xt, Yt).residual
