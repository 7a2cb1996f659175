"""Simplicial Čech cohomology with exact integer coefficients.

The open cover is the vertex-star cover of an ordered simplicial complex, so
its nerve is the complex itself and Čech cochains are simplicial cochains.
Coefficients are ``Z`` (``modulus=0``) or ``Z_m``; ``U(1)`` phases that are
``m``-th roots of unity are stored as exponents in ``Z_m``.

Sign conventions (fixed here, used everywhere):

* ``(delta c)(v_0..v_{k+1}) = sum_i (-1)^i c(v_0..^v_i..v_{k+1})``;
* cup product: ``(x ⌣ y)(v_0..v_{p+q}) = x(v_0..v_p) y(v_p..v_{p+q})``;
* Bockstein ``Z_m -> Z``: lift to representatives in ``[0, m)``, apply
  ``delta``, divide by ``m``;
* for transition data, ``lambda(a, b, c)`` is the scalar with
  ``U_{ca} U_{bc} U_{ab} = lambda id`` on every triangle ``a < b < c``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from itertools import combinations
from math import gcd
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatch,
    InhomogeneousError,
    NotClosedError,
    PhaseError,
)
from .linalg import (
    integer_matrix,
    matrix_from_json,
    matrix_to_json,
    smith_normal_form,
)

PHASE_SNAP_TOL = 1e-6
UNITARY_TOL = 1e-9

FIXTURES = ("S1", "S2", "RP2", "T2", "RP2xS1")


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Ordered simplicial complex closed under faces.

    ``simplices[k]`` lists the ``k``-simplices as sorted vertex tuples in
    lexicographic order.
    """

    simplices: tuple
    name: str = ""

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]], name: str = "") -> "SimplicialComplex":
        faces: set[tuple] = set()
        for s in maximal:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in simplex {s}")
            for r in range(1, len(s) + 1):
                faces.update(combinations(s, r))
        top = max((len(f) for f in faces), default=0)
        levels = tuple(tuple(sorted(f for f in faces if len(f) == k + 1)) for k in range(top))
        return cls(levels, name)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices[0]] if self.simplices else []

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    @cached_property
    def _index(self) -> list[dict]:
        return [{s: i for i, s in enumerate(level)} for level in self.simplices]

    def index(self, simplex) -> int:
        s = tuple(simplex)
        return self._index[len(s) - 1][s]

    def contains(self, simplex) -> bool:
        s = tuple(simplex)
        return 1 <= len(s) <= self.dim + 1 and s in self._index[len(s) - 1]

    @cached_property
    def _cohomology_cache(self) -> dict:
        return {}

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dim + 1))

    def coboundary_matrix(self, k: int) -> np.ndarray:
        """Integer matrix of ``delta: C^k -> C^{k+1}`` (shape ``n_{k+1} x n_k``)."""
        rows, cols = self.count(k + 1), self.count(k)
        D = np.zeros((rows, cols), dtype=np.int64)
        if k < 0 or rows == 0:
            return D
        idx = self._index[k]
        for r, s in enumerate(self.simplices[k + 1]):
            for i in range(len(s)):
                D[r, idx[s[:i] + s[i + 1:]]] += (-1) ** i
        return D

    def to_json(self) -> dict:
        top = self.simplices[-1] if self.simplices else ()
        maximal = [list(s) for level in self.simplices for s in level if self._is_maximal(s)]
        return {"name": self.name, "maximal_simplices": maximal or [list(s) for s in top]}

    def _is_maximal(self, s) -> bool:
        k = len(s)
        if k > self.dim:
            return True
        return not any(set(s) <= set(t) for t in self.simplices[k])


def product_complex(A: SimplicialComplex, B: SimplicialComplex, name: str = "") -> SimplicialComplex:
    """Ordered (staircase) triangulation of ``|A| x |B|``.

    Vertex ``(a, b)`` gets label ``ia * len(B.vertices) + ib`` where ``ia``,
    ``ib`` are the positions of ``a`` and ``b``; labels then increase along
    every staircase path, so the product is again ordered.
    """
    va, vb = A.vertices, B.vertices
    pa = {v: i for i, v in enumerate(va)}
    pb = {v: i for i, v in enumerate(vb)}
    nb = len(vb)
    maximal = []
    for s in (x for level in A.simplices for x in level if A._is_maximal(x)):
        for t in (y for level in B.simplices for y in level if B._is_maximal(y)):
            p, q = len(s) - 1, len(t) - 1
            for ups in combinations(range(p + q), p):
                i = j = 0
                path = [(s[0], t[0])]
                for step in range(p + q):
                    if step in ups:
                        i += 1
                    else:
                        j += 1
                    path.append((s[i], t[j]))
                maximal.append([pa[a] * nb + pb[b] for a, b in path])
    return SimplicialComplex.from_maximal(maximal, name or f"{A.name}x{B.name}")


def projection_map(A: SimplicialComplex, B: SimplicialComplex, factor: int) -> dict:
    """Vertex map of the product complex onto factor 0 (``A``) or 1 (``B``)."""
    va, vb = A.vertices, B.vertices
    nb = len(vb)
    out = {}
    for ia, a in enumerate(va):
        for ib, b in enumerate(vb):
            out[ia * nb + ib] = a if factor == 0 else b
    return out


def load_fixture(name: str) -> tuple[SimplicialComplex, dict]:
    """Fixture complex and its recorded cohomology table."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("loopcliff").joinpath(f"data/{name}.json").read_text()
    data = json.loads(text)
    return SimplicialComplex.from_maximal(data["maximal_simplices"], data["name"]), data.get("cohomology", {})


# ---------------------------------------------------------------------------
# cochains


@dataclass(frozen=True, eq=False)
class Cochain:
    """Integer-valued ``k``-cochain with coefficients in ``Z`` (``modulus=0``) or ``Z_m``."""

    complex: SimplicialComplex
    degree: int
    values: np.ndarray
    modulus: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64).ravel()
        if v.size != self.complex.count(self.degree):
            raise DimensionMismatch(
                f"{v.size} values for {self.complex.count(self.degree)} simplices of degree {self.degree}"
            )
        if self.modulus:
            v = np.mod(v, self.modulus)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, simplex) -> int:
        return int(self.values[self.complex.index(tuple(simplex))])

    def _same(self, other: "Cochain"):
        if other.complex is not self.complex or other.degree != self.degree or other.modulus != self.modulus:
            raise DimensionMismatch("cochains live in different groups")

    def __add__(self, other):
        self._same(other)
        return Cochain(self.complex, self.degree, self.values + other.values, self.modulus)

    def __sub__(self, other):
        self._same(other)
        return Cochain(self.complex, self.degree, self.values - other.values, self.modulus)

    def __neg__(self):
        return Cochain(self.complex, self.degree, -self.values, self.modulus)

    def scale(self, c: int, modulus: int | None = None) -> "Cochain":
        """``c * self``, optionally landing in ``Z_modulus``."""
        m = self.modulus if modulus is None else modulus
        return Cochain(self.complex, self.degree, int(c) * self.values, m)

    def reduce(self, m: int) -> "Cochain":
        """Coefficient reduction ``Z -> Z_m`` or ``Z_n -> Z_m`` with ``m | n``."""
        if self.modulus and self.modulus % m:
            raise ValueError(f"cannot reduce Z_{self.modulus} to Z_{m}")
        return Cochain(self.complex, self.degree, self.values, m)

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def equals(self, other: "Cochain") -> bool:
        self._same(other)
        return bool(np.array_equal(self.values, other.values))


def zero_cochain(K: SimplicialComplex, k: int, modulus: int = 0) -> Cochain:
    return Cochain(K, k, np.zeros(K.count(k), dtype=np.int64), modulus)


def cochain_from_dict(K: SimplicialComplex, k: int, values: dict, modulus: int = 0) -> Cochain:
    arr = np.zeros(K.count(k), dtype=np.int64)
    for s, v in values.items():
        arr[K.index(tuple(sorted(s)))] = v
    return Cochain(K, k, arr, modulus)


def coboundary(c: Cochain) -> Cochain:
    D = c.complex.coboundary_matrix(c.degree)
    return Cochain(c.complex, c.degree + 1, D @ c.values, c.modulus)


def is_cocycle(c: Cochain) -> bool:
    return coboundary(c).is_zero()


def cup_product(x: Cochain, y: Cochain) -> Cochain:
    """Alexander-Whitney product ``x(front face) * y(back face)``."""
    if x.complex is not y.complex:
        raise DimensionMismatch("cochains on different complexes")
    if x.modulus != y.modulus:
        raise DimensionMismatch("cochains with different coefficients")
    K, p, q = x.complex, x.degree, y.degree
    k = p + q
    vals = np.zeros(K.count(k), dtype=np.int64)
    for i, s in enumerate(K.simplices[k] if k <= K.dim else ()):
        vals[i] = x(s[: p + 1]) * y(s[p:])
    return Cochain(K, k, vals, x.modulus)


def bockstein(z: Cochain) -> Cochain:
    """Bockstein ``H^k(Z_m) -> H^{k+1}(Z)``: lift to ``[0, m)``, apply ``delta``, divide by ``m``."""
    m = z.modulus
    if m == 0:
        raise ValueError("Bockstein needs finite coefficients")
    if not is_cocycle(z):
        raise NotClosedError("Bockstein input is not closed")
    lift = Cochain(z.complex, z.degree, z.values, 0)
    d = coboundary(lift).values
    if np.any(d % m):
        raise NotClosedError("lift coboundary not divisible by m")
    return Cochain(z.complex, z.degree + 1, d // m, 0)


def pullback(c: Cochain, target: SimplicialComplex, vertex_map: dict) -> Cochain:
    """Pull ``c`` back along an order-preserving simplicial map ``target -> c.complex``.

    Degenerate images contribute zero.
    """
    k = c.degree
    vals = np.zeros(target.count(k), dtype=np.int64)
    for i, s in enumerate(target.simplices[k] if k <= target.dim else ()):
        img = tuple(vertex_map[v] for v in s)
        if len(set(img)) < len(img):
            continue
        if list(img) != sorted(img):
            raise ValueError("vertex map is not order preserving")
        vals[i] = c(img)
    return Cochain(target, k, vals, c.modulus)


# ---------------------------------------------------------------------------
# cohomology


@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    """``H^k(K; Z)`` or ``H^k(K; Z_m)`` with an exact class map.

    Attributes
    ----------
    torsion : tuple of int
        Orders ``> 1`` of the cyclic torsion summands.
    rank : int
        Free rank (always 0 for ``Z_m``).
    """

    complex: SimplicialComplex
    degree: int
    modulus: int
    torsion: tuple
    rank: int
    _U: np.ndarray = field(repr=False)
    _diag: tuple = field(repr=False)
    _free_map: np.ndarray | None = field(repr=False, default=None)
    _pre: np.ndarray | None = field(repr=False, default=None)
    _pre_div: tuple = field(repr=False, default=())

    @property
    def order(self) -> int | None:
        """Group order, ``None`` if infinite."""
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def invariants(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def class_of(self, z: Cochain) -> tuple:
        """Canonical coordinates of the class of the cocycle ``z``.

        Torsion coordinates come first (reduced mod their order), then the
        free coordinates.  Two cocycles are cohomologous iff their tuples agree.
        """
        if z.complex is not self.complex or z.degree != self.degree:
            raise DimensionMismatch("cochain does not belong to this group")
        if z.modulus != self.modulus:
            raise DimensionMismatch(f"cochain has modulus {z.modulus}, group has {self.modulus}")
        if not is_cocycle(z):
            raise NotClosedError("cochain is not a cocycle")
        x = integer_matrix(z.values.reshape(-1, 1) if z.values.size else np.zeros((0, 1)))
        if self._pre is not None:
            x = self._pre.dot(x)
            x = np.array([[int(v) // s] for v, s in zip(x.ravel(), self._pre_div)], dtype=object).reshape(-1, 1)
        y = self._U.dot(x).ravel()
        tors = []
        for i, d in enumerate(self._diag):
            if d > 1:
                tors.append(int(y[i]) % d)
        free = []
        if self.rank:
            w = y[len(self._diag):]
            free = [int(v) for v in self._free_map.dot(w)]
        return tuple(tors) + tuple(free)

    def is_zero_class(self, z: Cochain) -> bool:
        return not any(self.class_of(z))

    def same_class(self, z1: Cochain, z2: Cochain) -> bool:
        return self.class_of(z1 - z2) == tuple(0 for _ in self.class_of(z1))


def _integer_kernel_coordinates(A: np.ndarray) -> tuple[int, np.ndarray]:
    """For an integer matrix ``A`` with kernel ``Z``, return ``(rank Z, C)`` with
    ``C`` mapping any ``w in Z`` to its coordinates in a fixed basis of ``Z``."""
    n = A.shape[1]
    if A.shape[0] == 0:
        eye = integer_matrix(np.eye(n, dtype=int)) if n else np.zeros((0, 0), dtype=object)
        return n, eye
    _, D, _, _, Vi = smith_normal_form(A, inverses=True)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return n - r, Vi[r:]


def cohomology(K: SimplicialComplex, k: int, modulus: int = 0) -> CohomologyGroup:
    """``H^k(K)`` over ``Z`` or ``Z_m`` via Smith normal forms.

    Over ``Z``: ``U delta_{k-1} V = D``; a cocycle ``z`` has coordinates
    ``y = U z``, the image is ``{y_i in d_i Z, y_{>=r} = 0}``, and the free
    part is the kernel lattice of ``delta_k`` restricted to ``y_{>=r}``.

    Over ``Z_m``: lift cochains to ``Z^n``.  With ``U' delta_k V' = D'`` the
    lifted cocycles form the lattice ``V' diag(s) Z^n`` where
    ``s_i = m / gcd(d'_i, m)``.  The boundary lattice ``im delta_{k-1} + m Z^n``
    is reduced in those coordinates; its nontrivial invariant factors are the
    cyclic orders of ``H^k(K; Z_m)``.

    Results are cached on the complex.
    """
    key = (k, modulus)
    if key not in K._cohomology_cache:
        K._cohomology_cache[key] = _cohomology(K, k, modulus)
    return K._cohomology_cache[key]


def _cohomology(K: SimplicialComplex, k: int, modulus: int) -> CohomologyGroup:
    n = K.count(k)
    prev = K.coboundary_matrix(k - 1) if k >= 1 else np.zeros((n, 0), dtype=np.int64)
    if n == 0:
        return CohomologyGroup(K, k, modulus, (), 0, np.zeros((0, 0), dtype=object), ())
    if modulus:
        return _mod_cohomology(K, k, modulus, prev)
    U, D, _, Uinv, _ = smith_normal_form(prev, inverses=True)
    diag = tuple(int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0)
    r = len(diag)
    torsion_diag = tuple(d for d in diag if d > 1)
    nxt = K.coboundary_matrix(k)
    if r < n:
        restricted = integer_matrix(nxt).dot(Uinv[:, r:]) if nxt.shape[0] else np.zeros((0, n - r), dtype=object)
        rank, C = _integer_kernel_coordinates(restricted)
    else:
        rank, C = 0, None
    return CohomologyGroup(K, k, 0, torsion_diag, rank, U, diag, C)


def _mod_cohomology(K: SimplicialComplex, k: int, m: int, prev: np.ndarray) -> CohomologyGroup:
    n = K.count(k)
    nxt = K.coboundary_matrix(k)
    if nxt.shape[0]:
        _, Dn, _, _, Vni = smith_normal_form(nxt, inverses=True)
        dn = [int(Dn[i, i]) for i in range(min(Dn.shape)) if Dn[i, i] != 0]
    else:
        dn, Vni = [], integer_matrix(np.eye(n, dtype=int))
    div = tuple(m // gcd(d, m) for d in dn) + (1,) * (n - len(dn))
    bound = np.hstack([integer_matrix(prev), m * integer_matrix(np.eye(n, dtype=int))])
    coords = Vni.dot(bound)
    for i, s in enumerate(div):
        if any(int(v) % s for v in coords[i]):
            raise ArithmeticError("boundary lattice not contained in the cocycle lattice")
        coords[i] = [int(v) // s for v in coords[i]]
    U, D, _ = smith_normal_form(coords)
    diag = tuple(int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0)
    torsion = tuple(d for d in diag if d > 1)
    return CohomologyGroup(K, k, m, torsion, 0, U, diag, None, Vni, div)


def _mod_cohomology_torsion(K: SimplicialComplex, k: int, m: int) -> tuple:
    """Invariant factors of ``H^k(K; Z_m)`` from the universal coefficient theorem."""
    Hk = cohomology(K, k, 0)
    Hk1 = cohomology(K, k + 1, 0) if k + 1 <= K.dim else None
    parts = [m] * Hk.rank + [gcd(t, m) for t in Hk.torsion]
    if Hk1 is not None:
        parts += [gcd(t, m) for t in Hk1.torsion]
    return tuple(sorted(p for p in parts if p > 1))


def betti_numbers_mod_p(K: SimplicialComplex, p: int) -> list[int]:
    """``dim H^k(K; F_p)`` from ranks over ``F_p`` (independent oracle)."""
    ranks = [_rank_mod_p(K.coboundary_matrix(k), p) for k in range(K.dim + 1)]
    return [K.count(k) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(K.dim + 1)]


def _rank_mod_p(M: np.ndarray, p: int) -> int:
    A = np.mod(np.array(M, dtype=np.int64), p)
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == rows:
            break
    return r


def cohomology_table(K: SimplicialComplex) -> dict:
    """``{"Z": {k: invariants}, "Z2": {k: invariants}}`` for every degree."""
    return {
        "Z": {str(k): cohomology(K, k).invariants() for k in range(K.dim + 1)},
        "Z2": {str(k): cohomology(K, k, 2).invariants() for k in range(K.dim + 1)},
    }


def solve_cocycles_mod_p(K: SimplicialComplex, k: int, p: int) -> list[Cochain]:
    """Basis of the cocycle space ``Z^k(K; F_p)``."""
    D = np.mod(K.coboundary_matrix(k), p)
    n = K.count(k)
    if D.shape[0] == 0:
        basis = np.eye(n, dtype=np.int64)
    else:
        basis = _nullspace_mod_p(D, p)
    return [Cochain(K, k, b, p) for b in basis]


def _nullspace_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    A = np.mod(np.array(A, dtype=np.int64), p)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    out = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-A[i, f]) % p
        out.append(v)
    return np.array(out, dtype=np.int64).reshape(len(out), cols)


def cohomology_generators(K: SimplicialComplex, k: int, p: int) -> list[Cochain]:
    """Cocycles whose classes form a basis of ``H^k(K; F_p)``."""
    H = cohomology(K, k, p)
    gens: list[Cochain] = []
    classes: list[tuple] = []
    for z in solve_cocycles_mod_p(K, k, p):
        c = H.class_of(z)
        trial = classes + [c]
        if _rank_mod_p(np.array(trial, dtype=np.int64).reshape(len(trial), -1), p) == len(trial) and any(c):
            gens.append(z)
            classes.append(c)
    return gens


def integral_cohomology_generators(K: SimplicialComplex, k: int) -> list[Cochain]:
    """Integral cocycles whose classes generate the free part of ``H^k(K; Z)``."""
    H = cohomology(K, k)
    if H.rank == 0:
        return []
    n = K.count(k)
    prev = K.coboundary_matrix(k - 1) if k >= 1 else np.zeros((n, 0), dtype=np.int64)
    _, D, _, Ui, _ = smith_normal_form(prev, inverses=True)
    r = len(H._diag)
    nxt = K.coboundary_matrix(k)
    restricted = integer_matrix(nxt).dot(Ui[:, r:]) if nxt.shape[0] else np.zeros((0, n - r), dtype=object)
    if restricted.shape[0]:
        _, Dk, Vk, _, _ = smith_normal_form(restricted, inverses=True)
        rk = sum(1 for i in range(min(Dk.shape)) if Dk[i, i] != 0)
        kernel = Vk[:, rk:]
    else:
        kernel = integer_matrix(np.eye(n - r, dtype=int))
    out = []
    for j in range(kernel.shape[1]):
        w = kernel[:, j]
        z = Ui[:, r:].dot(w)
        out.append(Cochain(K, k, np.array([int(v) for v in z], dtype=np.int64), 0))
    return out


# ---------------------------------------------------------------------------
# transition data


def pauli_matrices() -> tuple[np.ndarray, np.ndarray]:
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    return X, Z


def clock_and_shift(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift ``S e_j = e_{j+1}`` and clock ``C e_j = w^j e_j`` with ``w = exp(2 pi i / m)``."""
    S = np.roll(np.eye(m, dtype=complex), 1, axis=0)
    C = np.diag(np.exp(2j * np.pi * np.arange(m) / m))
    return S, C


@dataclass(frozen=True, eq=False)
class TransitionData:
    """Homogeneous unitaries ``U_{ab}`` on the edges ``a < b`` of a complex.

    ``U_{ba}`` is ``U_{ab}^*``.  The fiber grading is ``grading``.
    """

    complex: SimplicialComplex
    grading: np.ndarray
    U: dict

    def __post_init__(self):
        G = np.asarray(self.grading, dtype=complex)
        object.__setattr__(self, "grading", G)
        D = G.shape[0]
        if np.linalg.norm(G @ G - np.eye(D)) > UNITARY_TOL:
            raise ValueError("grading must square to the identity")
        clean = {}
        for e in self.complex.simplices[1] if self.complex.dim >= 1 else ():
            if e not in self.U:
                raise ValueError(f"missing transition unitary on edge {e}")
            u = np.asarray(self.U[e], dtype=complex)
            if u.shape != (D, D):
                raise DimensionMismatch(f"unitary on {e} has shape {u.shape}, fiber dim {D}")
            if np.linalg.norm(u.conj().T @ u - np.eye(D)) > UNITARY_TOL * D:
                raise ValueError(f"transition matrix on {e} is not unitary")
            degree_of(u, G)
            clean[e] = u
        object.__setattr__(self, "U", clean)

    @property
    def fiber_dim(self) -> int:
        return self.grading.shape[0]

    def u(self, a: int, b: int) -> np.ndarray:
        if a < b:
            return self.U[(a, b)]
        return self.U[(b, a)].conj().T

    def to_json(self) -> dict:
        return {
            "complex": self.complex.to_json(),
            "grading": matrix_to_json(self.grading),
            "edges": [{"edge": list(e), "U": matrix_to_json(u)} for e, u in self.U.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TransitionData":
        cx = data["complex"]
        K = SimplicialComplex.from_maximal(cx["maximal_simplices"], cx.get("name", ""))
        U = {tuple(e["edge"]): matrix_from_json(e["U"]) for e in data["edges"]}
        return cls(K, matrix_from_json(data["grading"]), U)


def degree_of(u, G, tol: float = 1e-9) -> int:
    """Homogeneity degree of a unitary; raises :class:`InhomogeneousError`."""
    even = np.linalg.norm(u @ G - G @ u)
    odd = np.linalg.norm(u @ G + G @ u)
    if min(even, odd) > tol * max(1.0, np.sqrt(u.shape[0])):
        raise InhomogeneousError(f"transition unitary is not homogeneous ({even:.2e}, {odd:.2e})")
    return 0 if even <= odd else 1


def orientation_cocycle(T: TransitionData) -> Cochain:
    """``epsilon(a, b) = |U_{ab}|`` in ``Z_2``; closed by construction and checked."""
    K = T.complex
    vals = [degree_of(T.U[e], T.grading) for e in K.simplices[1]] if K.dim >= 1 else []
    eps = Cochain(K, 1, np.array(vals, dtype=np.int64), 2)
    if not is_cocycle(eps):
        raise NotClosedError("orientation cochain is not closed")
    return eps


def triple_phase(T: TransitionData, a: int, b: int, c: int) -> complex:
    """``lambda`` with ``U_{ca} U_{bc} U_{ab} = lambda id``."""
    P = T.u(c, a) @ T.u(b, c) @ T.u(a, b)
    lam = complex(np.trace(P) / T.fiber_dim)
    if np.linalg.norm(P - lam * np.eye(T.fiber_dim)) > PHASE_SNAP_TOL:
        raise PhaseError(f"triple product on {(a, b, c)} is not scalar")
    return lam


def snap_phase(lam: complex, m: int) -> int:
    """Exponent ``e`` with ``lam = exp(2 pi i e / m)``; raises :class:`PhaseError` if not within 1e-6."""
    e = int(np.round(np.angle(lam) * m / (2 * np.pi))) % m
    if abs(lam - np.exp(2j * np.pi * e / m)) > PHASE_SNAP_TOL:
        raise PhaseError(f"phase not an {m}-th root of unity: {lam}")
    return e


def dd_cocycle(T: TransitionData, m: int) -> Cochain:
    """``lambda`` as a ``Z_m``-valued 2-cocycle (exponents of ``exp(2 pi i / m)``)."""
    K = T.complex
    tris = K.simplices[2] if K.dim >= 2 else ()
    vals = np.array([snap_phase(triple_phase(T, *s), m) for s in tris], dtype=np.int64)
    lam = Cochain(K, 2, vals, m)
    if not is_cocycle(lam):
        raise NotClosedError("lambda cochain is not closed")
    return lam


def dd_class(T: TransitionData, m: int) -> Cochain:
    """Integral 3-cocycle ``beta(lambda)`` representing the Dixmier-Douady class."""
    return bockstein(dd_cocycle(T, m))


def trivial_bundle(K: SimplicialComplex, dim: int = 1, grading=None) -> TransitionData:
    G = np.eye(dim) if grading is None else np.asarray(grading)
    return TransitionData(K, G, {e: np.eye(dim) for e in K.simplices[1]})


def pauli_bundle(p: Cochain, q: Cochain) -> TransitionData:
    """``U_e = X^{p_e} Z^{q_e}`` on ``C^2`` graded by ``Z``; ``p``, ``q`` are ``Z_2`` 1-cocycles.

    Then ``epsilon = p`` and ``lambda = (-1)^{p ⌣ q}`` (see tests).
    """
    X, Z = pauli_matrices()
    K = p.complex
    U = {}
    for e in K.simplices[1]:
        U[e] = np.linalg.matrix_power(X, p(e) % 2) @ np.linalg.matrix_power(Z, q(e) % 2)
    return TransitionData(K, Z, U)


def heisenberg_bundle(p: Cochain, q: Cochain) -> TransitionData:
    """``U_e = S^{p_e} C^{q_e}`` on trivially graded ``C^m``; ``lambda = w^{p ⌣ q}``."""
    m = p.modulus
    S, C = clock_and_shift(m)
    K = p.complex
    U = {e: np.linalg.matrix_power(S, p(e)) @ np.linalg.matrix_power(C, q(e)) for e in K.simplices[1]}
    return TransitionData(K, np.eye(m), U)


def tensor_transition(TA: TransitionData, TB: TransitionData) -> TransitionData:
    """Graded tensor product ``U_{ab} = (U^A_{ab} G_A^{|U^B_{ab}|}) ⊗ U^B_{ab}``."""
    if TA.complex is not TB.complex:
        raise DimensionMismatch("transition data on different complexes")
    GA = TA.grading
    U = {}
    for e in TA.complex.simplices[1]:
        ua, ub = TA.U[e], TB.U[e]
        twist = GA if degree_of(ub, TB.grading) else np.eye(GA.shape[0])
        U[e] = np.kron(ua @ twist, ub)
    return TransitionData(TA.complex, np.kron(GA, TB.grading), U)


def modify(T: TransitionData, vertex_unitaries: dict, edge_phases: Cochain) -> TransitionData:
    """Coboundary modification ``U_{ab} -> mu_{ab} W_b U_{ab} W_a^*``.

    ``vertex_unitaries`` maps vertices to homogeneous unitaries and
    ``edge_phases`` is a ``Z_m`` 1-cochain of root-of-unity exponents.
    """
    m = edge_phases.modulus
    U = {}
    for e in T.complex.simplices[1]:
        a, b = e
        mu = np.exp(2j * np.pi * edge_phases(e) / m)
        U[e] = mu * vertex_unitaries[b] @ T.U[e] @ vertex_unitaries[a].conj().T
    return TransitionData(T.complex, T.grading, U)


def random_modification(T: TransitionData, rng: np.random.Generator, m: int) -> tuple[TransitionData, Cochain, Cochain]:
    """Random homogeneous vertex unitaries and ``Z_m`` edge phases.

    Returns the modified data together with the vertex-degree 0-cochain and the
    edge-phase 1-cochain, so the expected class shifts are known.
    """
    from .linalg import random_orthogonal

    K = T.complex
    G = T.grading
    D = T.fiber_dim
    evals, evecs = np.linalg.eigh((G + G.conj().T) / 2)
    plus = evecs[:, evals > 0]
    minus = evecs[:, evals < 0]
    W = {}
    degs = []
    for v in K.vertices:
        Wp = _random_unitary(plus.shape[1], rng)
        Wm = _random_unitary(minus.shape[1], rng)
        even = plus @ Wp @ plus.conj().T + minus @ Wm @ minus.conj().T
        odd_ok = plus.shape[1] == minus.shape[1] and plus.shape[1] > 0
        if odd_ok and rng.integers(2):
            W[v] = (minus @ Wm @ plus.conj().T + plus @ Wp @ minus.conj().T)
            degs.append(1)
        else:
            W[v] = even
            degs.append(0)
    phases = Cochain(K, 1, rng.integers(0, m, size=K.count(1)), m)
    return modify(T, W, phases), Cochain(K, 0, np.array(degs), 2), phases


def _random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# the tensor-product formula


@dataclass(frozen=True)
class TensorFormulaReport:
    orientation_additive: bool
    lambda_identity: bool
    dd_identity: bool
    correction_nonzero: bool
    cup_correction_nonzero: bool
    modulus: int
    details: dict

    @property
    def holds(self) -> bool:
        return self.orientation_additive and self.lambda_identity and self.dd_identity


def verify_tensor_formula(TA: TransitionData, TB: TransitionData, m: int = 2) -> TensorFormulaReport:
    """Check the tensor-product formula for orientation and Dixmier-Douady classes.

    Three exact comparisons on the common complex ``K``:

    * ``[eps_{A⊗B}] = [eps_A] + [eps_B]`` in ``H^1(K; Z_2)``;
    * ``[lam_{A⊗B}] = [lam_A] + [lam_B] + (M/2) [eps_A ⌣ eps_B]`` in ``H^2(K; Z_M)``
      with ``M = lcm(2, m)``;
    * ``beta[lam_{A⊗B}] = beta[lam_A] + beta[lam_B] + beta[eps_A ⌣ eps_B]`` in ``H^3(K; Z)``.

    ``m`` is an order for the triple-product phases of both inputs.
    """
    K = TA.complex
    M = m * 2 // gcd(m, 2)
    T = tensor_transition(TA, TB)
    eA, eB, eT = orientation_cocycle(TA), orientation_cocycle(TB), orientation_cocycle(T)
    H1 = cohomology(K, 1, 2)
    orient = H1.same_class(eT, eA + eB)
    lA, lB, lT = dd_cocycle(TA, M), dd_cocycle(TB, M), dd_cocycle(T, M)
    cup = cup_product(eA, eB)
    corr = Cochain(K, 2, (M // 2) * cup.values, M)
    H2 = cohomology(K, 2, M)
    lam_ok = H2.same_class(lT, lA + lB + corr) if K.dim >= 2 else True
    details = {
        "modulus": M,
        "orientation_class": list(H1.class_of(eT)),
        "lambda_class": list(H2.class_of(lT)),
    }
    if K.dim >= 3:
        H3 = cohomology(K, 3)
        lhs = bockstein(lT)
        rhs = bockstein(lA) + bockstein(lB) + bockstein(cup)
        dd_ok = H3.same_class(lhs, rhs)
        corr_nonzero = not H3.is_zero_class(bockstein(cup))
        details["dd_class"] = list(H3.class_of(lhs))
        details["correction_class"] = list(H3.class_of(bockstein(cup)))
    else:
        dd_ok = True
        corr_nonzero = False
        details["dd_class"] = []
    cup_class = cohomology(K, 2, 2).class_of(cup) if K.dim >= 2 else ()
    details["correction_class_Z2"] = list(cup_class)
    return TensorFormulaReport(orient, lam_ok, dd_ok, corr_nonzero, any(cup_class), M, details)
