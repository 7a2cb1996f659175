"""``verify``: named verification suites with deterministic JSON reports.

Each suite is a function ``(params, rng) -> list[Check]``.  All randomness is
drawn from one Philox generator keyed by ``--seed``.  Reports list checks
sorted by id and round residuals to six significant digits, so the written
file is byte-stable for identical inputs.  Wall time is printed to stderr
and left out of the file.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .bogoliubov import cocycle_phase, solve_implementer
from .cech import (
    FIXTURES,
    betti_numbers_mod_p,
    cohomology,
    cohomology_generators,
    cohomology_table,
    cup_product,
    dd_cocycle,
    heisenberg_bundle,
    integral_cohomology_generators,
    load_fixture,
    orientation_cocycle,
    pauli_bundle,
    random_modification,
    trivial_bundle,
    verify_tensor_formula,
    zero_cochain,
)
from .errors import LoopCliffError
from .fock import check_clifford_relations, commutant_dim, fock_rep, graded_commutant_dim
from .lagrangian import SubLagrangian, intersection_parity, skew_index, skew_operator, skew_operator_index, standard_sublagrangian
from .linalg import DEFAULT_TOL, make_rng, random_orthogonal, random_skew
from .loopalg import (
    TruncatedLoopSpace,
    central_identity_terms,
    cocycle_omega_loop,
    dbeta_terms,
    omega_imp_formulas,
    random_closed_loop,
    random_loop_field,
    random_so,
    single_mode,
)
from .superfactor import ODD_KIND, EVEN_KIND, classify_kind, clifford_algebra, graded_tensor, kind_parity

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def round_sig(x: float, digits: int = 6) -> float:
    return float(f"{float(x):.{digits}g}")


@dataclass(frozen=True)
class Check:
    """One verified statement: either a residual against ``tol`` or an exact flag."""

    id: str
    passed: bool
    residual: float | None = None
    exact: bool | None = None
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"id": self.id, "pass": bool(self.passed)}
        if self.residual is not None:
            out["residual"] = round_sig(self.residual)
        if self.exact is not None:
            out["exact"] = bool(self.exact)
        if self.info:
            out["info"] = self.info
        return out


def residual_check(cid: str, residual: float, tol: float, **info) -> Check:
    return Check(cid, bool(residual < tol), residual=float(residual), info=info)


def exact_check(cid: str, ok: bool, **info) -> Check:
    return Check(cid, bool(ok), exact=bool(ok), info=info)


@dataclass
class SuiteReport:
    suite: str
    parameters: dict
    seed: int
    checks: list
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.id for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        checks = sorted(self.checks, key=lambda c: c.id)
        return {
            "suite": self.suite,
            "parameters": self.parameters,
            "seed": self.seed,
            "pass": self.passed,
            "n_checks": len(checks),
            "n_failed": len(self.failures()),
            "checks": [c.to_json() for c in checks],
        }


# ---------------------------------------------------------------------------
# suites


def suite_clifford_relations(p: dict, rng) -> list[Check]:
    """Relations, commutant and graded commutant for real dimension 1..d."""
    out = []
    for m in range(1, p["d"] + 1):
        F = fock_rep(m)
        rep = check_clifford_relations(F)
        out.append(residual_check(f"relations-dim{m:02d}", rep.max_residual, 1e-12))
        out.append(exact_check(f"commutant-dim{m:02d}", commutant_dim(F) == 1))
        out.append(exact_check(f"graded-commutant-dim{m:02d}", graded_commutant_dim(F) == 1))
    return out


def suite_lagrangian_parity(p: dict, rng) -> list[Check]:
    """Parity of ``dim(conj(gL) ∩ L)`` against ``det g`` and index stability."""
    n, tol = p["d"], p["tol"]
    L = standard_sublagrangian(2 * n)
    mismatches = 0
    for _ in range(p["trials"]):
        g = random_orthogonal(2 * n, rng)
        det = int(round(np.linalg.det(g)))
        if intersection_parity(L.transform(g), L, tol) != (1 - det) // 2:
            mismatches += 1
    out = [exact_check(f"parity-vs-det-n{n}", mismatches == 0, trials=p["trials"], mismatches=mismatches)]
    for defect in range(4):
        changed = index_stability(defect, p["trials"], rng, tol)
        out.append(exact_check(f"index-stability-defect{defect}", changed == 0, trials=p["trials"], changed=changed))
    return out


def index_stability(defect: int, trials: int, rng, tol: float = DEFAULT_TOL, rank: int = 2, eps: float = 0.05) -> int:
    """Count perturbations that change the mod-2 index of a sub-Lagrangian with given defect.

    Two perturbations per trial: rotate ``L`` by ``exp(eps A)`` and add
    ``eps B`` to its skew operator (``A``, ``B`` random skew).
    """
    m = 2 * rank + defect
    L = SubLagrangian(standard_sublagrangian(m).frame[:, :rank])
    base = skew_index(L, tol)
    J = skew_operator(L)
    changed = 0
    for _ in range(trials):
        g = scipy.linalg.expm(eps * random_skew(m, rng))
        if skew_index(L.transform(g), tol) != base:
            changed += 1
        if skew_operator_index(J + eps * random_skew(m, rng), tol) != base:
            changed += 1
    return changed


def suite_implementers(p: dict, rng) -> list[Check]:
    """Implementer parity equals ``(1 - det g)/2``; cocycle phases are consistent."""
    n = p["d"]
    F = fock_rep(2 * n)
    L = F.lagrangian
    out = []
    mismatches = 0
    worst = 0.0
    for _ in range(p["trials"]):
        g = random_orthogonal(2 * n, rng)
        det = int(round(np.linalg.det(g)))
        imp = solve_implementer(F, g, p["tol"])
        worst = max(worst, imp.residual)
        if not imp.parity == intersection_parity(L.transform(g), L) == (1 - det) // 2:
            mismatches += 1
    out.append(exact_check(f"parity-n{n}", mismatches == 0, trials=p["trials"], mismatches=mismatches))
    out.append(residual_check(f"intertwiner-residual-n{n}", worst, 1e-8))
    worst = 0.0
    for _ in range(max(1, p["trials"] // 10)):
        g, h, k = (random_orthogonal(2 * n, rng) for _ in range(3))
        lhs = cocycle_phase(F, g, h) * cocycle_phase(F, g @ h, k)
        rhs = cocycle_phase(F, h, k) * cocycle_phase(F, g, h @ k)
        worst = max(worst, abs(lhs - rhs))
    out.append(residual_check(f"cocycle-identity-n{n}", worst, 1e-8))
    return out


IDENTITIES = ("literal", "corrected", "antiperiodic")


def suite_loop_cocycles(p: dict, rng) -> list[Check]:
    """``|2 Omega + omega|`` for random single-mode pairs.

    ``identity`` selects ``literal`` (periodic polarization, as stated),
    ``corrected`` (periodic, constant-mode coboundary ``2 mu([X,Y])`` removed)
    or ``antiperiodic`` (half-integer modes, no constant part).
    """
    d, N, (k, l) = p["d"], p["cutoff"], p["modes"]
    which = p["identity"]
    S = TruncatedLoopSpace.antiperiodic(d, N) if which == "antiperiodic" else TruncatedLoopSpace.periodic(d, N)
    out = []
    for t in range(p["trials"]):
        a, b = random_so(d, rng), random_so(d, rng)
        X, Y = single_mode(a, k), single_mode(b, l)
        Om, om, mu = central_identity_terms(X, Y, S)
        block, jform = omega_imp_formulas(X, Y, S)
        res = abs(2 * Om + om - (2 * mu if which == "corrected" else 0))
        out.append(residual_check(f"identity-trial{t:03d}", res, p["tol"]))
        out.append(residual_check(f"formula-agreement-trial{t:03d}", abs(block - jform), p["tol"]))
    return out


def suite_dbeta(p: dict, rng) -> list[Check]:
    """Quadrature check of the ``d beta`` identity on random closed loops."""
    out = []
    for t in range(p["trials"]):
        d = int(rng.integers(2, p["d"] + 1))
        gamma = random_closed_loop(d, rng, max_winding=3, M=p["points"])
        X = random_loop_field(d, int(rng.integers(1, 3)), rng)
        Y = random_loop_field(d, int(rng.integers(1, 3)), rng)
        r = dbeta_terms(gamma, X, Y)
        out.append(residual_check(f"dbeta-trial{t:03d}", r.residual, 1e-6, d=d, winding=[int(w) for w in gamma.winding]))
    return out


def suite_superfactor_kinds(p: dict, rng) -> list[Check]:
    """Kind of ``Cl_d`` for ``d <= D``, ``Cl_1 ⊗ Cl_1`` and additivity on random pairs."""
    out = []
    kinds = {}
    for d in range(p["d"] + 1):
        kinds[d] = classify_kind(clifford_algebra(d))
        out.append(exact_check(f"kind-Cl{d}", kinds[d] == (ODD_KIND if d % 2 else EVEN_KIND), kind=kinds[d]))
    A = graded_tensor(clifford_algebra(1), clifford_algebra(1))
    out.append(exact_check("Cl1xCl1-even-dim4", classify_kind(A) == EVEN_KIND and A.dim == 4))
    top = min(4, p["d"])
    for t in range(p["trials"]):
        d1, d2 = (int(x) for x in rng.integers(0, top + 1, size=2))
        k1 = kinds.get(d1) or classify_kind(clifford_algebra(d1))
        k2 = kinds.get(d2) or classify_kind(clifford_algebra(d2))
        k12 = classify_kind(graded_tensor(clifford_algebra(d1), clifford_algebra(d2)))
        ok = kind_parity(k12) == (kind_parity(k1) + kind_parity(k2)) % 2
        out.append(exact_check(f"additivity-trial{t:03d}", ok, d1=d1, d2=d2, kind=k12))
    return out


def _fixtures(p: dict) -> list[str]:
    return list(FIXTURES) if p["fixture"] == "all" else [p["fixture"]]


def build_bundle(K, kind: str, m: int):
    """Transition data from cohomology generators: returns ``(T, p, q)``.

    ``pauli`` uses ``Z_2`` generators ``p = x_0``, ``q = x_last``;
    ``heisenberg`` reduces the integral generators mod ``m``;
    ``trivial`` has ``p = q = 0``.
    """
    if kind == "trivial":
        zero = zero_cochain(K, 1, 2)
        return trivial_bundle(K, 2, np.diag([1.0, -1.0])), zero, zero
    if kind == "pauli":
        gens = cohomology_generators(K, 1, 2)
        if not gens:
            zero = zero_cochain(K, 1, 2)
            return pauli_bundle(zero, zero), zero, zero
        return pauli_bundle(gens[0], gens[-1]), gens[0], gens[-1]
    if kind == "heisenberg":
        gens = [g.reduce(m) for g in integral_cohomology_generators(K, 1)]
        if not gens:
            gens = [zero_cochain(K, 1, m)]
        return heisenberg_bundle(gens[0], gens[-1]), gens[0], gens[-1]
    raise ValueError(f"unknown bundle {kind!r}")


def suite_cech_classes(p: dict, rng) -> list[Check]:
    """Cohomology tables against recorded values, bundle classes and modification invariance."""
    out = []
    kind, m = p["bundle"], p["modulus"]
    for name in _fixtures(p):
        K, recorded = load_fixture(name)
        table = cohomology_table(K)
        out.append(exact_check(f"{name}-cohomology-table", table == recorded, computed=table))
        betti = betti_numbers_mod_p(K, 2)
        ranks = [len(table["Z2"][str(k)]["torsion"]) for k in range(K.dim + 1)]
        out.append(exact_check(f"{name}-betti-mod2", betti == ranks))
        if kind == "heisenberg" and m < 2:
            raise ValueError("heisenberg bundle needs --modulus >= 2")
        lam_mod = m if kind == "heisenberg" else 2
        T, x, y = build_bundle(K, kind, lam_mod)
        if kind == "heisenberg":
            eps_expected = zero_cochain(K, 1, 2)
        else:
            eps_expected = x
        eps = orientation_cocycle(T)
        out.append(exact_check(f"{name}-orientation-cocycle", eps.equals(eps_expected)))
        if K.dim >= 2:
            lam = dd_cocycle(T, lam_mod)
            cup = cup_product(x, y)
            H2 = cohomology(K, 2, lam_mod)
            out.append(exact_check(f"{name}-lambda-cocycle", lam.equals(cup), lambda_class=list(H2.class_of(lam))))
        H1 = cohomology(K, 1, 2)
        bad_eps = bad_lam = 0
        for _ in range(p["trials"]):
            T2, _, _ = random_modification(T, rng, lam_mod)
            if not H1.same_class(orientation_cocycle(T2), eps):
                bad_eps += 1
            if K.dim >= 2 and not H2.same_class(dd_cocycle(T2, lam_mod), lam):
                bad_lam += 1
        out.append(exact_check(f"{name}-modification-invariance", bad_eps == bad_lam == 0, trials=p["trials"], orientation_changes=bad_eps, lambda_changes=bad_lam))
    return out


def suite_tensor_formula(p: dict, rng) -> list[Check]:
    """Tensor formula for every pair of Pauli bundles built from ``Z_2`` generators.

    On ``RP2xS1`` the pair built from the ``RP2`` and ``S1`` generators has a
    nonzero Bockstein correction.
    """
    out = []
    for name in _fixtures(p):
        K, _ = load_fixture(name)
        gens = cohomology_generators(K, 1, 2)
        zero = zero_cochain(K, 1, 2)
        bundles = [("trivial", pauli_bundle(zero, zero))]
        for i, g in enumerate(gens):
            bundles.append((f"p{i}", pauli_bundle(g, zero)))
            for j, h in enumerate(gens):
                if j != i:
                    bundles.append((f"p{i}q{j}", pauli_bundle(g, h)))
        for ia, (na, TA) in enumerate(bundles):
            for nb, TB in bundles[ia:]:
                r = verify_tensor_formula(TA, TB, 2)
                out.append(
                    exact_check(
                        f"{name}-{na}-{nb}",
                        r.holds,
                        cup_correction=r.cup_correction_nonzero,
                        bockstein_correction=r.correction_nonzero,
                    )
                )
    return out


SUITES: dict[str, Callable] = {
    "clifford-relations": suite_clifford_relations,
    "lagrangian-parity": suite_lagrangian_parity,
    "implementers": suite_implementers,
    "loop-cocycles": suite_loop_cocycles,
    "dbeta": suite_dbeta,
    "superfactor-kinds": suite_superfactor_kinds,
    "cech-classes": suite_cech_classes,
    "tensor-formula": suite_tensor_formula,
}
ALIASES = {"cech": "cech-classes"}

#: per-suite defaults for flags left unset
DEFAULTS = {
    "clifford-relations": {"d": 12},
    "lagrangian-parity": {"d": 4, "trials": 200},
    "implementers": {"d": 3, "trials": 50},
    "loop-cocycles": {"d": 5, "cutoff": 16, "modes": (2, -2), "trials": 50, "identity": "literal"},
    "dbeta": {"d": 5, "trials": 20, "points": 2048},
    "superfactor-kinds": {"d": 8, "trials": 20},
    "cech-classes": {"fixture": "all", "bundle": "pauli", "modulus": 2, "trials": 50},
    "tensor-formula": {"fixture": "all"},
}


def resolve_params(name: str, given: dict) -> dict:
    params = dict(DEFAULTS[name])
    for key, value in given.items():
        if value is not None:
            params[key] = value
    if "tol" not in params or params["tol"] is None:
        env = os.environ.get("VERIFY_TOL")
        params["tol"] = float(env) if env else DEFAULT_TOL
    if params.get("trials", 1) < 0 or params.get("d", 1) < 0:
        raise ValueError("--trials and --d must be nonnegative")
    if "modes" in params:
        params["modes"] = tuple(int(v) for v in params["modes"])
    if name in ("cech-classes", "tensor-formula") and params["fixture"] not in FIXTURES + ("all",):
        raise ValueError(f"unknown fixture {params['fixture']!r}")
    if name == "loop-cocycles" and params["identity"] not in IDENTITIES:
        raise ValueError(f"unknown identity {params['identity']!r}")
    return params


def run_suite(name: str, params: dict | None = None, seed: int = 0) -> SuiteReport:
    """Run a suite; unknown names and invalid parameters raise ``ValueError``."""
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    params = resolve_params(name, params or {})
    rng = make_rng(seed)
    start = time.perf_counter()
    checks = SUITES[name](params, rng)
    wall = time.perf_counter() - start
    shown = {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(params.items())}
    return SuiteReport(name, shown, int(seed), checks, wall)


def report_text(r: SuiteReport) -> str:
    return json.dumps(r.to_json(), indent=2, sort_keys=True) + "\n"


def emit_report(r: SuiteReport, path) -> None:
    """Write the JSON report; ``OSError`` messages carry the path."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report_text(r))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def _modes(text: str) -> tuple[int, int]:
    try:
        k, l = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--modes expects two integers 'k,l'")
    return k, l


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Run a named verification suite.")
    ap.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    ap.add_argument("--d", type=int, help="dimension parameter (meaning depends on the suite)")
    ap.add_argument("--cutoff", type=int, help="Fourier cutoff N for loop-cocycles")
    ap.add_argument("--modes", type=_modes, help="mode pair k,l for loop-cocycles")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--tol", type=float, help="tolerance (default: $VERIFY_TOL or 1e-9)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--report", help="write the JSON report here instead of stdout")
    ap.add_argument("--fixture", help=f"{', '.join(FIXTURES)} or all")
    ap.add_argument("--bundle", choices=("pauli", "heisenberg", "trivial"))
    ap.add_argument("--modulus", type=int)
    ap.add_argument("--identity", choices=IDENTITIES, help="loop-cocycles variant")
    ap.add_argument("--points", type=int, help="quadrature points for dbeta")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    given = {k: getattr(args, k) for k in ("d", "cutoff", "modes", "trials", "tol", "fixture", "bundle", "modulus", "identity", "points")}
    name = ALIASES.get(args.suite, args.suite)
    if name not in SUITES:
        ap.print_usage(sys.stderr)
        print(f"verify: unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_USAGE
    given = {k: v for k, v in given.items() if v is not None and (k in DEFAULTS[name] or k == "tol")}
    try:
        report = run_suite(name, given, args.seed)
    except (ValueError, LoopCliffError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.report:
        try:
            emit_report(report, args.report)
        except OSError as exc:
            print(f"verify: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(report_text(report))
    status = "PASS" if report.passed else "FAIL"
    print(f"{report.suite}: {status} ({len(report.checks)} checks, {len(report.failures())} failed, {report.wall_time:.2f}s)", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
