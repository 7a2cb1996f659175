"""Dense complex linear algebra and exact integer Smith normal form.

Conventions used throughout the package:

* complex matrices are plain ``numpy.ndarray`` objects with ``complex128`` dtype;
* the Hermitian inner product is conjugate-linear in the first slot,
  ``<u, v> = sum(conj(u) * v)``;
* integer matrices are ``numpy.ndarray`` objects with ``dtype=object`` holding
  Python ints, so no intermediate value can overflow.
"""
from __future__ import annotations

import json
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import IllConditionedError

DEFAULT_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a single 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) % 2**64))


def inner(u, v) -> complex:
    """Hermitian inner product, conjugate-linear in ``u``."""
    return complex(np.vdot(u, v))


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(M)).T


def hs_norm(M) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(np.asarray(M, dtype=complex)))


def singular_values(M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def kernel_dim(M, tol: float = DEFAULT_TOL) -> int:
    """Dimension of the kernel: ``cols - #{singular values > tol}``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return int(M.shape[1] - np.count_nonzero(singular_values(M) > tol))


def rank(M, tol: float = DEFAULT_TOL) -> int:
    return int(np.count_nonzero(singular_values(M) > tol))


def nullspace(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the kernel of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > tol))
    return np.conj(vh[r:]).T


def orthonormalize(vectors: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``vectors`` (rank-revealing)."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if vectors.shape[1] == 0:
        return vectors
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0] if s.size else 1.0)]


def gram_nullspace(
    blocks: Sequence,
    n: int,
    null_tol: float = 1e-8,
    gap: float = 1e-3,
    columns: np.ndarray | None = None,
) -> np.ndarray:
    """Joint kernel of a stack of (sparse or dense) linear maps on ``C^n``.

    The Gram operator ``Q = sum_k A_k^H A_k`` is assembled sparsely, split into
    the connected components of its sparsity graph and diagonalized block by
    block.  Eigenvalues below ``null_tol * scale`` span the kernel; any
    eigenvalue between that and ``gap * scale`` raises
    :class:`IllConditionedError` instead of guessing.

    ``columns`` restricts the unknowns to a coordinate subspace.
    """
    size = n if columns is None else len(columns)
    Q = sp.csr_matrix((size, size), dtype=complex)
    for A in blocks:
        A = sp.csr_matrix(A, dtype=complex)
        if columns is not None:
            A = A[:, columns]
        Q = Q + (A.conj().T @ A)
    Q = sp.csr_matrix(Q)
    scale = max(1.0, float(abs(Q).max()) if Q.nnz else 1.0)
    pattern = (abs(Q) > 0).astype(np.int8)
    ncomp, labels = connected_components(pattern, directed=False)
    basis = []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        block = Q[idx][:, idx].toarray()
        if np.allclose(block.imag, 0.0):
            w, v = scipy.linalg.eigh(block.real)
        else:
            w, v = scipy.linalg.eigh(block)
        gray = (w > null_tol * scale) & (w < gap * scale)
        if np.any(gray):
            raise IllConditionedError(
                f"Gram eigenvalue {w[gray][0]:.3e} inside gray zone "
                f"({null_tol * scale:.1e}, {gap * scale:.1e})"
            )
        for j in np.flatnonzero(w <= null_tol * scale):
            vec = np.zeros(size, dtype=complex)
            vec[idx] = v[:, j]
            basis.append(vec)
    if not basis:
        return np.zeros((size, 0), dtype=complex)
    return np.column_stack(basis)


# ---------------------------------------------------------------------------
# random matrices


def random_skew(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = rng.standard_normal((n, n)) * scale
    return (A - A.T) / 2


def random_orthogonal(n: int, rng: np.random.Generator, det: int | None = None) -> np.ndarray:
    """Haar-distributed orthogonal matrix, optionally with prescribed determinant."""
    if n == 0:
        return np.zeros((0, 0))
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if det is not None and round(np.linalg.det(q)) != det:
        q[:, 0] = -q[:, 0]
    return q


def is_orthogonal(g, tol: float = DEFAULT_TOL) -> bool:
    g = np.asarray(g)
    return bool(
        np.allclose(g.imag, 0.0, atol=tol)
        and np.linalg.norm(g.T @ g - np.eye(g.shape[0])) < tol * max(1, g.shape[0])
    )


# ---------------------------------------------------------------------------
# exact integer Smith normal form


def integer_matrix(rows) -> np.ndarray:
    """Exact integer matrix (object dtype, Python ints)."""
    a = np.array(rows, dtype=object)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    return np.vectorize(int, otypes=[object])(a) if a.size else a.astype(object)


def _identity_object(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    eye[...] = 0
    for i in range(n):
        eye[i, i] = 1
    return eye


def smith_normal_form(M, inverses: bool = False):
    """Smith normal form ``U @ M @ V == D`` over the integers.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with nonnegative entries
    ``d_1 | d_2 | ...``.  All arithmetic uses Python ints.  With
    ``inverses=True`` the exact inverses are tracked too and
    ``(U, D, V, U^{-1}, V^{-1})`` is returned.
    """
    A = integer_matrix(M).copy()
    if A.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    m, n = A.shape
    U = _identity_object(m)
    V = _identity_object(n)
    Ui = _identity_object(m) if inverses else None
    Vi = _identity_object(n) if inverses else None

    def done():
        return _finish(U, A, V, Ui, Vi, inverses)

    if m == 0 or n == 0:
        return done()

    for t in range(min(m, n)):
        while True:
            sub = A[t:, t:]
            nz = np.argwhere(sub != 0)
            if nz.size == 0:
                return done()
            mags = np.abs(sub[nz[:, 0], nz[:, 1]])
            i, j = nz[int(np.argmin(mags))]
            i += t
            j += t
            if i != t:
                A[[t, i]] = A[[i, t]]
                U[[t, i]] = U[[i, t]]
                if inverses:
                    Ui[:, [t, i]] = Ui[:, [i, t]]
            if j != t:
                A[:, [t, j]] = A[:, [j, t]]
                V[:, [t, j]] = V[:, [j, t]]
                if inverses:
                    Vi[[t, j]] = Vi[[j, t]]
            p = A[t, t]
            rows = np.flatnonzero(A[t + 1:, t] != 0) + t + 1
            if rows.size:
                q = A[rows, t] // p
                A[rows] -= np.outer(q, A[t]).astype(object)
                U[rows] -= np.outer(q, U[t]).astype(object)
                if inverses:
                    Ui[:, t] += Ui[:, rows] @ q
            cols = np.flatnonzero(A[t, t + 1:] != 0) + t + 1
            if cols.size:
                q = A[t, cols] // p
                A[:, cols] -= np.outer(A[:, t], q).astype(object)
                V[:, cols] -= np.outer(V[:, t], q).astype(object)
                if inverses:
                    Vi[t] += q @ Vi[cols]
            if np.any(A[t + 1:, t] != 0) or np.any(A[t, t + 1:] != 0):
                continue
            rest = A[t + 1:, t + 1:]
            if abs(p) == 1 or rest.size == 0:
                break
            bad = np.argwhere(rest % p != 0)
            if len(bad):
                r = int(bad[0][0]) + t + 1
                A[t] += A[r]
                U[t] += U[r]
                if inverses:
                    Ui[:, r] -= Ui[:, t]
                continue
            break
    return done()


def _finish(U, A, V, Ui=None, Vi=None, inverses=False):
    for t in range(min(A.shape)):
        if A[t, t] < 0:
            A[t] = -A[t]
            U[t] = -U[t]
            if inverses:
                Ui[:, t] = -Ui[:, t]
    if inverses:
        return U, A, V, Ui, Vi
    return U, A, V


def integer_det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = [[int(x) for x in row] for row in integer_matrix(M)]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# matrix literal format


def matrix_to_json(M) -> list:
    """Nested ``[re, im]`` pairs."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 0), dtype=complex)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("complex matrix literal must be nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def integer_matrix_to_json(M) -> list:
    return [[int(x) for x in row] for row in np.atleast_2d(np.asarray(M, dtype=object))]


def integer_matrix_from_json(data) -> np.ndarray:
    return integer_matrix(data)


def dumps_matrix(M) -> str:
    return json.dumps(matrix_to_json(M))


def loads_matrix(text: str) -> np.ndarray:
    return matrix_from_json(json.loads(text))
