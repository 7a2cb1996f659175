"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL`` line with its worst residual
and then asserts.  Criteria 1 and 2 fail on the periodic polarization: the
implementer cocycle and the loop cocycle differ there by the constant-mode
coboundary ``2 mu([X, Y])``.  The lines report the coboundary-corrected
residual next to the literal one so the discrepancy is visible.

Run ``python tests/test_acceptance.py`` for the summary without pytest.
"""

import sys
import time

import numpy as np
import pytest

from loopcliff.bogoliubov import cocycle_phase, implementer_parity
from loopcliff.cech import (
    FIXTURES,
    cohomology,
    cohomology_generators,
    cohomology_table,
    cup_product,
    dd_cocycle,
    load_fixture,
    orientation_cocycle,
    pauli_bundle,
    projection_map,
    pullback,
    random_modification,
    verify_tensor_formula,
    zero_cochain,
)
from loopcliff.cech import _mod_cohomology_torsion
from loopcliff.cli import index_stability
from loopcliff.fock import check_clifford_relations, commutant_dim, fock_rep, graded_commutant_dim
from loopcliff.lagrangian import intersection_parity, standard_sublagrangian
from loopcliff.linalg import make_rng, random_orthogonal
from loopcliff.loopalg import (
    TruncatedLoopSpace,
    central_identity_terms,
    cocycle_omega_loop,
    dbeta_terms,
    random_closed_loop,
    random_loop_field,
    random_so,
    single_mode,
)
from loopcliff.superfactor import (
    EVEN_KIND,
    ODD_KIND,
    classify_kind,
    clifford_algebra,
    graded_tensor,
    kind_parity,
)

E12 = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 0]])


def report(n, passed, detail):
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    return line


def emit(capsys, n, passed, detail):
    if capsys is None:
        return report(n, passed, detail)
    with capsys.disabled():
        sys.stdout.write("\n")
        return report(n, passed, detail)


# --- criterion bodies --------------------------------------------------------


def criterion_1():
    rng = make_rng(1)
    start = time.perf_counter()
    worst = worst_corr = 0.0
    for d in range(3, 9):
        S = TruncatedLoopSpace.periodic(d, 16)
        for l in range(-6, 7):
            for _ in range(50):
                X, Y = single_mode(random_so(d, rng), -l), single_mode(random_so(d, rng), l)
                Om, om, mu = central_identity_terms(X, Y, S)
                worst = max(worst, abs(2 * Om + om))
                worst_corr = max(worst_corr, abs(2 * Om + om - 2 * mu))
    elapsed = time.perf_counter() - start
    passed = worst < 1e-9 and elapsed < 60
    detail = f"max|2Om+om|={worst:.3e} (tol 1e-9), coboundary-corrected={worst_corr:.3e}, {elapsed:.1f}s"
    return passed, detail


def criterion_2():
    rng = make_rng(2)
    worst = worst_corr = worst_off = 0.0
    for d in range(3, 7):
        S = TruncatedLoopSpace.periodic(d, 16)
        for l in range(1, 7):
            for _ in range(20):
                a, b = random_so(d, rng), random_so(d, rng)
                Om, _, mu = central_identity_terms(single_mode(a, -l), single_mode(b, l), S)
                closed = 0.5j * l * np.trace(a @ b)
                worst = max(worst, abs(Om - closed))
                worst_corr = max(worst_corr, abs(Om - mu - closed))
        for _ in range(40):
            k, l = (int(v) for v in rng.integers(-6, 7, size=2))
            if k + l == 0:
                continue
            Om, _, _ = central_identity_terms(single_mode(random_so(d, rng), k), single_mode(random_so(d, rng), l), S)
            worst_off = max(worst_off, abs(Om))
    passed = worst < 1e-10 and worst_off < 1e-12
    detail = (
        f"max|Om-(il/2)tr(ab)|={worst:.3e} (tol 1e-10), minus mu={worst_corr:.3e}; "
        f"max|Om| off k+l=0 = {worst_off:.3e} (tol 1e-12)"
    )
    return passed, detail


def criterion_3():
    rng = make_rng(3)
    worst = 0.0
    for d in range(2, 9):
        for l in range(-6, 7):
            a, b = random_so(d, rng), random_so(d, rng)
            om = cocycle_omega_loop(single_mode(a, -l), single_mode(b, l))
            worst = max(worst, abs(om - (-1j * l * np.trace(a @ b))))
    S = TruncatedLoopSpace.periodic(3, 16)
    Om, om, _ = central_identity_terms(single_mode(E12, 1), single_mode(E12, -1), S)
    inst = max(abs(om + 2j), abs(Om - 1j))
    passed = worst < 1e-12 and inst < 1e-12
    detail = f"max|om+il tr(ab)|={worst:.3e}; d=3 instance om={om:.6g}, Om={Om:.6g} (dev {inst:.1e})"
    return passed, detail


def criterion_4():
    rng = make_rng(4)
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 6))
        gamma = random_closed_loop(d, rng, max_winding=3, M=2048)
        X = random_loop_field(d, int(rng.integers(1, 3)), rng)
        Y = random_loop_field(d, int(rng.integers(1, 3)), rng)
        worst = max(worst, dbeta_terms(gamma, X, Y).residual)
    return worst < 1e-6, f"max dbeta residual={worst:.3e} over 20 loops (tol 1e-6)"


def criterion_5():
    start = time.perf_counter()
    worst, dims = 0.0, []
    for n in range(0, 7):
        F = fock_rep(2 * n)
        worst = max(worst, check_clifford_relations(F).max_residual)
        dims.append((commutant_dim(F), graded_commutant_dim(F)))
    elapsed = time.perf_counter() - start
    ones = all(c == g == 1 for c, g in dims)
    passed = worst < 1e-12 and ones and elapsed < 30
    return passed, f"max relation residual={worst:.3e}, commutants all 1: {ones}, {elapsed:.1f}s"


def criterion_6():
    rng = make_rng(6)
    mismatches, worst = 0, 0.0
    for n in range(1, 5):
        F, L = fock_rep(2 * n), standard_sublagrangian(2 * n)
        for _ in range(200):
            g = random_orthogonal(2 * n, rng)
            det = int(round(np.linalg.det(g)))
            if not implementer_parity(F, g) == intersection_parity(L.transform(g), L) == (1 - det) // 2:
                mismatches += 1
        for _ in range(10):
            g, h, k = (random_orthogonal(2 * n, rng) for _ in range(3))
            lhs = cocycle_phase(F, g, h) * cocycle_phase(F, g @ h, k)
            rhs = cocycle_phase(F, g, h @ k) * cocycle_phase(F, h, k)
            worst = max(worst, abs(lhs - rhs))
    passed = mismatches == 0 and worst < 1e-8
    return passed, f"parity mismatches={mismatches}/800, cocycle identity residual={worst:.3e} (tol 1e-8)"


def criterion_7():
    rng = make_rng(7)
    table = all(classify_kind(clifford_algebra(d)) == (ODD_KIND if d % 2 else EVEN_KIND) for d in range(9))
    A = graded_tensor(clifford_algebra(1), clifford_algebra(1))
    cl11 = classify_kind(A) == EVEN_KIND and A.dim == 4
    bad = 0
    for _ in range(20):
        d1, d2 = (int(v) for v in rng.integers(0, 5, size=2))
        k = classify_kind(graded_tensor(clifford_algebra(d1), clifford_algebra(d2)))
        expect = (kind_parity(classify_kind(clifford_algebra(d1))) + kind_parity(classify_kind(clifford_algebra(d2)))) % 2
        bad += kind_parity(k) != expect
    passed = table and cl11 and bad == 0
    return passed, f"Cl_d table d<=8: {table}, Cl1xCl1 even dim 4: {cl11}, additivity failures={bad}/20"


def criterion_8():
    rng = make_rng(8)
    tables = lam_ok = eps_ok = True
    changed = 0
    for name in FIXTURES:
        K, recorded = load_fixture(name)
        tables &= cohomology_table(K) == recorded
        for m in (2, 3, 4):
            tables &= all(cohomology(K, k, m).torsion == _mod_cohomology_torsion(K, k, m) for k in range(K.dim + 1))
        gens = cohomology_generators(K, 1, 2) or [zero_cochain(K, 1, 2)]
        T = pauli_bundle(gens[0], gens[-1])
        eps = orientation_cocycle(T)
        eps_ok &= eps.equals(gens[0])
        H1 = cohomology(K, 1, 2)
        if K.dim >= 2:
            lam = dd_cocycle(T, 2)
            lam_ok &= lam.equals(cup_product(gens[0], gens[-1]))
            H2 = cohomology(K, 2, 2)
        for _ in range(50):
            T2, _, _ = random_modification(T, rng, 2)
            changed += not H1.same_class(orientation_cocycle(T2), eps)
            if K.dim >= 2:
                changed += not H2.same_class(dd_cocycle(T2, 2), lam)
    tensor, cup_corr = True, []
    for name in ("T2", "RP2"):
        K, _ = load_fixture(name)
        g = cohomology_generators(K, 1, 2)
        zero = zero_cochain(K, 1, 2)
        r = verify_tensor_formula(pauli_bundle(g[0], zero), pauli_bundle(g[-1], zero))
        tensor &= r.holds
        cup_corr.append(r.cup_correction_nonzero)
    A, B = load_fixture("RP2")[0], load_fixture("S1")[0]
    P = load_fixture("RP2xS1")[0]
    X = pullback(cohomology_generators(A, 1, 2)[0], P, projection_map(A, B, 0))
    Y = pullback(cohomology_generators(B, 1, 2)[0], P, projection_map(A, B, 1))
    zero = zero_cochain(P, 1, 2)
    r = verify_tensor_formula(pauli_bundle(X, zero), pauli_bundle(Y, zero))
    tensor &= r.holds
    passed = tables and eps_ok and lam_ok and changed == 0 and tensor and all(cup_corr) and r.correction_nonzero
    detail = (
        f"tables/SNF: {tables}, eps: {eps_ok}, lambda: {lam_ok}, class changes={changed}, "
        f"tensor formula: {tensor}, cup correction on T2/RP2: {cup_corr}, "
        f"Bockstein correction on RP2xS1: {r.correction_nonzero}"
    )
    return passed, detail


def criterion_9():
    rng = make_rng(9)
    changed = {defect: index_stability(defect, 100, rng) for defect in range(4)}
    return all(v == 0 for v in changed.values()), f"index changes per defect {changed} over 100 perturbations"


def criterion_10():
    rng = make_rng(10)
    worst, scale = 0.0, 0.0
    for t in range(20):
        d = 3 + t % 4
        S = TruncatedLoopSpace.periodic(d, 16)
        So = S.opposite()
        k, l = (int(v) for v in rng.integers(-6, 7, size=2))
        if t % 2 == 0:
            k = -l
        X, Y = single_mode(random_so(d, rng), k), single_mode(random_so(d, rng), l)
        Om = central_identity_terms(X, Y, S)[0]
        Oo = central_identity_terms(X, Y, So)[0]
        worst = max(worst, abs(Om + Oo))
        scale = max(scale, abs(Om))
    return worst < 1e-9, f"max|Om + Om_opposite|={worst:.3e} (tol 1e-9), max|Om|={scale:.3g}"


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n, capsys):
    passed, detail = CRITERIA[n]()
    emit(capsys, n, passed, detail)
    assert passed, detail


if __name__ == "__main__":
    results = []
    for n, fn in CRITERIA.items():
        passed, detail = fn()
        report(n, passed, detail)
        results.append(passed)
    sys.exit(0 if all(results) else 1)
