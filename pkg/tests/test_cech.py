import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopcliff.cech import (
    FIXTURES,
    Cochain,
    TransitionData,
    betti_numbers_mod_p,
    bockstein,
    coboundary,
    cochain_from_dict,
    cohomology,
    cohomology_generators,
    cohomology_table,
    cup_product,
    dd_class,
    dd_cocycle,
    degree_of,
    heisenberg_bundle,
    integral_cohomology_generators,
    is_cocycle,
    load_fixture,
    modify,
    orientation_cocycle,
    pauli_bundle,
    pauli_matrices,
    product_complex,
    projection_map,
    pullback,
    random_modification,
    snap_phase,
    tensor_transition,
    trivial_bundle,
    verify_tensor_formula,
    zero_cochain,
)
from loopcliff.cech import _mod_cohomology_torsion
from loopcliff.errors import NotClosedError, PhaseError
from loopcliff.linalg import make_rng

EULER = {"S1": 0, "S2": 2, "RP2": 1, "T2": 0, "RP2xS1": 0}


@pytest.fixture(scope="module")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}


def random_cochain(K, k, m, rng):
    return Cochain(K, k, rng.integers(0, m, size=K.count(k)), m)


# --- complexes and cohomology -----------------------------------------------


def test_fixture_shapes(fixtures):
    counts = {name: [K.count(k) for k in range(K.dim + 1)] for name, (K, _) in fixtures.items()}
    assert counts == {
        "S1": [3, 3],
        "S2": [4, 6, 4],
        "RP2": [6, 15, 10],
        "T2": [7, 21, 14],
        "RP2xS1": [18, 108, 180, 90],
    }
    for name, (K, _) in fixtures.items():
        assert K.euler_characteristic() == EULER[name]


def test_product_fixture_is_the_product(fixtures):
    P = product_complex(fixtures["RP2"][0], fixtures["S1"][0])
    assert P.simplices == fixtures["RP2xS1"][0].simplices


@pytest.mark.parametrize("name", FIXTURES)
def test_delta_squared_zero(fixtures, name):
    K, _ = fixtures[name]
    for k in range(K.dim - 1):
        D = K.coboundary_matrix(k + 1) @ K.coboundary_matrix(k)
        assert not np.any(D)


@pytest.mark.parametrize("name", FIXTURES)
def test_cohomology_matches_recorded_tables(fixtures, name):
    K, recorded = fixtures[name]
    assert cohomology_table(K) == recorded


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("p", [2, 3])
def test_mod_p_dimensions_against_rank_oracle(fixtures, name, p):
    K, _ = fixtures[name]
    dims = [len(cohomology(K, k, p).torsion) for k in range(K.dim + 1)]
    assert dims == betti_numbers_mod_p(K, p)


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("m", [2, 4, 6])
def test_mod_m_invariants_follow_universal_coefficients(fixtures, name, m):
    K, _ = fixtures[name]
    for k in range(K.dim + 1):
        assert cohomology(K, k, m).torsion == _mod_cohomology_torsion(K, k, m)


def test_class_map_detects_coboundaries(fixtures):
    rng = make_rng(0)
    K, _ = fixtures["T2"]
    H = cohomology(K, 1, 2)
    for z in cohomology_generators(K, 1, 2):
        b = coboundary(random_cochain(K, 0, 2, rng))
        assert H.same_class(z, z + b)
        assert not H.is_zero_class(z)
    Hz = cohomology(K, 1)
    a, c = integral_cohomology_generators(K, 1)
    shift = coboundary(Cochain(K, 0, rng.integers(-3, 4, size=7)))
    assert Hz.class_of(a + shift) == Hz.class_of(a)
    assert Hz.class_of(a) != Hz.class_of(c)


def test_orientation_examples_on_circle(fixtures):
    K, _ = fixtures["S1"]
    G = np.diag([1.0, -1.0])
    X, _ = pauli_matrices()
    H = cohomology(K, 1, 2)
    T = trivial_bundle(K, 2, G)
    assert orientation_cocycle(T).is_zero()
    one = dict(T.U)
    one[(0, 1)] = X
    eps = orientation_cocycle(TransitionData(K, G, one))
    assert not H.is_zero_class(eps)
    two = dict(one)
    two[(1, 2)] = X
    assert H.is_zero_class(orientation_cocycle(TransitionData(K, G, two)))


def test_dd_cocycle_of_consistent_bundle_is_zero(fixtures):
    K, _ = fixtures["T2"]
    assert dd_cocycle(trivial_bundle(K), 2).is_zero()


def test_sphere_top_cochain_is_nontrivial(fixtures):
    K, _ = fixtures["S2"]
    lam = cochain_from_dict(K, 2, {(1, 2, 3): 1}, 2)
    assert is_cocycle(lam)
    assert not cohomology(K, 2, 2).is_zero_class(lam)


def test_cup_product_examples(fixtures):
    K, _ = fixtures["T2"]
    a, b = integral_cohomology_generators(K, 1)
    H2 = cohomology(K, 2)
    assert cup_product(a, zero_cochain(K, 1)).is_zero()
    assert abs(H2.class_of(cup_product(a, b))[0]) == 1
    assert H2.class_of(cup_product(a, b)) == tuple(-c for c in H2.class_of(cup_product(b, a)))
    assert H2.is_zero_class(cup_product(a, a))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["T2", "RP2", "RP2xS1"]), st.sampled_from([2, 3, 0]), st.integers(0, 2**32 - 1))
def test_cup_leibniz(name, m, seed):
    K, _ = load_fixture(name)
    rng = make_rng(seed)
    if m:
        x, y = random_cochain(K, 1, m, rng), random_cochain(K, 1, m, rng)
    else:
        x, y = (Cochain(K, 1, rng.integers(-3, 4, size=K.count(1))) for _ in range(2))
    lhs = coboundary(cup_product(x, y))
    rhs = cup_product(coboundary(x), y) - cup_product(x, coboundary(y))
    assert lhs.equals(rhs)


def test_bockstein_examples(fixtures):
    K, _ = fixtures["RP2"]
    x = cohomology_generators(K, 1, 2)[0]
    H2 = cohomology(K, 2)
    assert H2.torsion == (2,)
    bx = bockstein(x)
    assert H2.class_of(bx) == (1,)
    assert H2.is_zero_class(bx + bx)
    b = coboundary(random_cochain(K, 0, 2, make_rng(1)))
    assert H2.is_zero_class(bockstein(b))
    with pytest.raises(NotClosedError):
        bockstein(cochain_from_dict(K, 1, {(0, 1): 1}, 2))


def test_bockstein_additive_on_classes():
    K, _ = load_fixture("RP2xS1")
    rng = make_rng(11)
    gens = cohomology_generators(K, 2, 2)
    H3 = cohomology(K, 3)
    for _ in range(3):
        c = rng.integers(0, 2, size=(2, len(gens)))
        z1, z2 = (
            sum((g.scale(int(ci)) for g, ci in zip(gens, row)), zero_cochain(K, 2, 2)) for row in c
        )
        z1 = z1 + coboundary(random_cochain(K, 1, 2, rng))
        assert H3.same_class(bockstein(z1 + z2), bockstein(z1) + bockstein(z2))
        assert H3.is_zero_class(bockstein(z1).scale(2))


def test_pullback_of_generators(fixtures):
    A, B, P = fixtures["RP2"][0], fixtures["S1"][0], fixtures["RP2xS1"][0]
    x = cohomology_generators(A, 1, 2)[0]
    y = cohomology_generators(B, 1, 2)[0]
    X = pullback(x, P, projection_map(A, B, 0))
    Y = pullback(y, P, projection_map(A, B, 1))
    H1 = cohomology(P, 1, 2)
    assert is_cocycle(X) and is_cocycle(Y)
    assert sorted([H1.class_of(X), H1.class_of(Y)]) == [(0, 1), (1, 0)]


# --- transition data ---------------------------------------------------------


def test_snap_phase():
    assert snap_phase(np.exp(2j * np.pi * 2 / 5), 5) == 2
    assert snap_phase(-1 + 1e-8j, 2) == 1
    with pytest.raises(PhaseError):
        snap_phase(np.exp(0.3j), 2)


@pytest.mark.parametrize("name", FIXTURES)
def test_pauli_bundle_classes_are_exact(fixtures, name):
    K, _ = fixtures[name]
    gens = cohomology_generators(K, 1, 2) or [zero_cochain(K, 1, 2)]
    for p in gens:
        for q in gens:
            T = pauli_bundle(p, q)
            assert orientation_cocycle(T).equals(p)
            if K.dim >= 2:
                assert dd_cocycle(T, 2).equals(cup_product(p, q))


@pytest.mark.parametrize("m", [3, 4])
def test_heisenberg_bundle(fixtures, m):
    K, _ = fixtures["T2"]
    a, b = (g.reduce(m) for g in integral_cohomology_generators(K, 1))
    T = heisenberg_bundle(a, b)
    assert orientation_cocycle(T).is_zero()
    lam = dd_cocycle(T, m)
    assert lam.equals(cup_product(a, b))
    assert not cohomology(K, 2, m).is_zero_class(lam)


def test_phase_outside_order_is_refused(fixtures):
    K, _ = fixtures["T2"]
    a, b = (g.reduce(3) for g in integral_cohomology_generators(K, 1))
    with pytest.raises(PhaseError):
        dd_cocycle(heisenberg_bundle(a, b), 2)


@pytest.mark.parametrize("name", ["T2", "RP2", "RP2xS1"])
def test_modification_invariance(fixtures, name):
    K, _ = fixtures[name]
    gens = cohomology_generators(K, 1, 2)
    T = pauli_bundle(gens[0], gens[-1])
    eps, lam = orientation_cocycle(T), dd_cocycle(T, 4)
    H1, H2 = cohomology(K, 1, 2), cohomology(K, 2, 4)
    rng = make_rng(5)
    for _ in range(10):
        T2, degs, phases = random_modification(T, rng, 4)
        e2 = orientation_cocycle(T2)
        assert e2.equals(eps + coboundary(degs))
        assert H1.same_class(e2, eps)
        assert H2.same_class(dd_cocycle(T2, 4), lam)
        assert H2.same_class(lam, dd_cocycle(modify(T, {v: np.eye(2) for v in K.vertices}, phases), 4))


def test_dd_class_of_rp2_pauli_bundle_vanishes(fixtures):
    K, _ = fixtures["RP2"]
    x = cohomology_generators(K, 1, 2)[0]
    T = pauli_bundle(x, x)
    assert cohomology(K, 3).is_trivial() if K.dim >= 3 else dd_class(T, 2).is_zero()


def test_transition_json_round_trip(fixtures):
    K, _ = fixtures["T2"]
    x = cohomology_generators(K, 1, 2)[0]
    T = pauli_bundle(x, x)
    T2 = TransitionData.from_json(T.to_json())
    assert T2.complex.simplices == K.simplices
    for e in K.simplices[1]:
        assert np.allclose(T2.U[e], T.U[e])


def test_tensor_degree_is_additive(fixtures):
    K, _ = fixtures["T2"]
    g = cohomology_generators(K, 1, 2)
    TA, TB = pauli_bundle(g[0], g[1]), pauli_bundle(g[1], g[0])
    T = tensor_transition(TA, TB)
    for e in K.simplices[1]:
        expected = (degree_of(TA.U[e], TA.grading) + degree_of(TB.U[e], TB.grading)) % 2
        assert degree_of(T.U[e], T.grading) == expected


# --- tensor formula ----------------------------------------------------------


def test_tensor_with_trivial_bundle(fixtures):
    K, _ = fixtures["RP2xS1"]
    x = cohomology_generators(K, 1, 2)[0]
    zero = zero_cochain(K, 1, 2)
    TA = pauli_bundle(x, x)
    r = verify_tensor_formula(TA, pauli_bundle(zero, zero))
    assert r.holds and not r.correction_nonzero and not r.cup_correction_nonzero
    assert cohomology(K, 2, 2).same_class(dd_cocycle(tensor_transition(TA, pauli_bundle(zero, zero)), 2), dd_cocycle(TA, 2))


def test_tensor_formula_without_orientation_on_sphere(fixtures):
    K, _ = fixtures["S2"]
    zero = zero_cochain(K, 1, 2)
    r = verify_tensor_formula(pauli_bundle(zero, zero), pauli_bundle(zero, zero))
    assert r.holds and not r.cup_correction_nonzero


@pytest.mark.parametrize("name", ["T2", "RP2"])
def test_tensor_formula_with_cup_correction(fixtures, name):
    K, _ = fixtures[name]
    g = cohomology_generators(K, 1, 2)
    zero = zero_cochain(K, 1, 2)
    TA, TB = pauli_bundle(g[0], zero), pauli_bundle(g[-1], zero)
    r = verify_tensor_formula(TA, TB)
    assert r.holds and r.cup_correction_nonzero
    # dropping the correction term breaks the lambda identity
    lT = dd_cocycle(tensor_transition(TA, TB), 2)
    naive = dd_cocycle(TA, 2) + dd_cocycle(TB, 2)
    assert not cohomology(K, 2, 2).same_class(lT, naive)


def test_tensor_formula_with_bockstein_correction(fixtures):
    A, B, P = fixtures["RP2"][0], fixtures["S1"][0], fixtures["RP2xS1"][0]
    X = pullback(cohomology_generators(A, 1, 2)[0], P, projection_map(A, B, 0))
    Y = pullback(cohomology_generators(B, 1, 2)[0], P, projection_map(A, B, 1))
    zero = zero_cochain(P, 1, 2)
    r = verify_tensor_formula(pauli_bundle(X, zero), pauli_bundle(Y, zero))
    assert r.holds and r.correction_nonzero
    assert r.details["dd_class"] == [1]
