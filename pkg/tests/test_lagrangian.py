import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from loopcliff.errors import DimensionMismatch, IllConditionedError, LagrangianError
from loopcliff.lagrangian import (
    SubLagrangian,
    complete_sublagrangian,
    decisive_kernel_dim,
    equivalence_distance,
    intersection_dim,
    intersection_parity,
    skew_index,
    skew_operator,
    standard_sublagrangian,
)
from loopcliff.linalg import make_rng, random_orthogonal, random_skew

F1 = np.array([[1], [-1j]]) / np.sqrt(2)


def block_sum(*gs):
    return scipy.linalg.block_diag(*gs)


def test_sublagrangian_invariants():
    L = SubLagrangian(F1)
    assert L.rank == 1 and L.defect_dim == 0 and L.is_lagrangian
    with pytest.raises(LagrangianError):
        SubLagrangian(np.array([[1.0], [0.0]]))


def test_equivalence_distance_examples():
    L = SubLagrangian(F1)
    assert equivalence_distance(L, L) == 0.0
    assert equivalence_distance(L, L.conjugate()) == pytest.approx(np.sqrt(2))
    assert equivalence_distance(L, SubLagrangian(np.exp(0.7j) * F1)) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DimensionMismatch):
        equivalence_distance(L, standard_sublagrangian(4))


def test_intersection_parity_examples():
    L = SubLagrangian(F1)
    g = np.diag([1.0, -1.0])
    assert intersection_parity(L, L) == 0
    assert intersection_dim(L.transform(g), L) == 1
    assert intersection_parity(L.transform(g), L) == 1
    L2 = standard_sublagrangian(4)
    assert intersection_dim(L2.transform(block_sum(g, g)), L2) == 2
    assert intersection_parity(L2.transform(block_sum(g, g)), L2) == 0


def test_intersection_parity_needs_lagrangians():
    with pytest.raises(LagrangianError):
        intersection_parity(standard_sublagrangian(3), standard_sublagrangian(3))


def test_decisive_kernel_refuses_near_tolerance():
    with pytest.raises(IllConditionedError):
        decisive_kernel_dim(np.diag([1.0, 1e-8]), tol=1e-9)
    assert decisive_kernel_dim(np.diag([1.0, 1e-14]), tol=1e-9) == 1


def test_skew_index_examples():
    assert skew_index(standard_sublagrangian(2)) == 0
    assert skew_index(SubLagrangian(np.zeros((1, 0)))) == 1
    # positive loop modes with the three constant directions left over
    L = SubLagrangian(np.zeros((3, 0)))
    assert L.defect_dim == 3 and skew_index(L) == 1


def test_skew_operator_is_real_and_squares_to_minus_one_off_kernel():
    L = SubLagrangian(standard_sublagrangian(7).frame[:, :2])
    J = skew_operator(L)
    assert np.allclose(J, -J.T)
    P = L.projection + L.conj_projection
    assert np.allclose(J @ J, -P.real)


def test_completion_cases():
    L = standard_sublagrangian(4)
    assert complete_sublagrangian(L) is L
    K2 = SubLagrangian(np.zeros((2, 0)))
    C = complete_sublagrangian(K2)
    assert np.allclose(C.frame[:, 0], F1[:, 0])
    assert C.is_lagrangian
    K1 = SubLagrangian(standard_sublagrangian(5).frame)
    C1 = complete_sublagrangian(K1)
    assert C1.real_dim == 6 and C1.rank == K1.rank + 1 and C1.is_lagrangian


@pytest.mark.parametrize("m", [4, 5, 7])
def test_completions_agree_across_seeds(m):
    L = SubLagrangian(standard_sublagrangian(m).frame[:, :1])
    base = complete_sublagrangian(L)
    for seed in range(5):
        other = complete_sublagrangian(L, seed=seed)
        assert np.isfinite(equivalence_distance(base, other))
        assert skew_index(other) == skew_index(base)
        assert intersection_parity(other, base) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parity_matches_determinant(n):
    rng = make_rng(100 + n)
    L = standard_sublagrangian(2 * n)
    for _ in range(60):
        g = random_orthogonal(2 * n, rng)
        det = round(np.linalg.det(g))
        assert intersection_parity(L.transform(g), L) == (1 - det) // 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_index_stable_under_small_rotation(defect, rank, seed):
    m = 2 * rank + defect
    if m == 0:
        return
    L = SubLagrangian(standard_sublagrangian(m).frame[:, :rank])
    g = scipy.linalg.expm(0.05 * random_skew(m, make_rng(seed)))
    assert skew_index(L.transform(g)) == skew_index(L) == defect % 2
