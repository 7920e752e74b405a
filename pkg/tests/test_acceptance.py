"""One test per acceptance criterion; the terminal summary lists PASS/FAIL for each."""
from fractions import Fraction

from conftest import record

from fockshift import coeffs
from fockshift.diagring import d_zero, partial_trace
from fockshift.opcalc import standard_ops
from fockshift.verify import (ASTAR, BSTAR, FP_CANDIDATES, _fp_coefficient, named_pair,
                              seed_diagonal, verify_adjoint_iff, verify_commutator_seed,
                              verify_contraction, verify_coeff_routes, verify_dunkl_consistency,
                              verify_dunkl_example, verify_expansion, verify_fp_adjoint,
                              verify_fp_commutator, verify_ml_classic, verify_reference_values,
                              verify_stirling)
from fockshift.weights import WeightSequence, parse_family

FAMILIES = ["classic", "pfock:p=2", "pfock:p=3", "dunkl:kappa=1/2", "dunkl:kappa=3/2",
            "custom:seed=1", "custom:seed=2"]
KAPPAS = [Fraction(1, 2), Fraction(3, 2), Fraction(2, 5)]


def test_criterion_1_commutator_seed():
    seed = verify_commutator_seed(64)
    traces = all(partial_trace(d_zero(), N) == Fraction(1, N) for N in range(1, 65))
    ok = seed.status == "pass" and traces
    assert record(1, ok, f"[R0,I] at N=64 is d_zero ({seed.status}); trace 1/N for N<=64 "
                         f"({traces})")


def test_criterion_2_expansion():
    failures, runs = [], 0
    for spec in FAMILIES:
        w = parse_family(spec)
        for pair in ("R0,I", "dphi,Mz", "R0,Iphi"):
            A, B = named_pair(w, pair)
            for n in range(1, 7):
                runs += 1
                rep = verify_expansion(w, A, B, n, 32, pair)
                if rep.status != "pass":
                    failures.append((spec, pair, n))
    assert record(2, not failures, f"(BA)^n expansion exact in {runs - len(failures)}/{runs} "
                                   "runs (7 families, 3 pairs, n<=6, N=32)"), failures


def test_criterion_3_coefficient_routes():
    statuses = {seed: verify_coeff_routes(seed, 32, 6).status for seed in ("D0", 1, 2, 3)}
    # the seeds really are different diagonals
    distinct = len({tuple(seed_diagonal(s, 32).materialize(8)) for s in statuses}) == 4
    ok = distinct and all(s == "pass" for s in statuses.values())
    assert record(3, ok, f"recurrence = closed form, Gamma = Lambda(-1), R0 Lambda = Gamma R0 "
                         f"for seeds {list(statuses)}: {sorted(set(statuses.values()))}")


def test_criterion_4_reference_values():
    rep = verify_reference_values(32)
    assert record(4, rep.status == "pass",
                  f"Lambda_12, Lambda_23, Lambda_13 hard-coded values: {rep.status}")


def test_criterion_5_pfock_adjoint():
    statuses = [verify_fp_adjoint(p, 32).status for p in range(1, 5)]
    ok = statuses == ["pass"] * 4
    assert record(5, ok, f"R0* = (I R0)^(p-1) I with column action 1/(n+1)^p, p=1..4: "
                         f"{statuses}")


def _distinct_forms(p):
    """Candidate names grouped by the coefficient diagonals they actually produce."""
    D = d_zero()
    groups = {}
    for name in FP_CANDIDATES:
        key = tuple(tuple(_fp_coefficient(name, D, k, p).materialize(40))
                    for k in range(1, p + 1))
        groups.setdefault(key, []).append(name)
    return list(groups.values())


def test_criterion_6_pfock_commutator():
    matched = {p: verify_fp_commutator(p, 32).details["matched"] for p in range(1, 5)}
    forms_matched = {}
    for p, names in matched.items():
        # at p = 1 every candidate collapses to the same operator, so it is one form
        forms_matched[p] = [g for g in _distinct_forms(p) if set(g) & set(names)]
    one_form_each = all(len(groups) == 1 for groups in forms_matched.values())
    common = set.intersection(*(set(n) for n in matched.values()))
    ok = one_form_each and common == {"gamma_minus_lambda"}
    assert record(6, ok, f"[R0,R0*] matches one distinct form for every p=1..4; common form "
                         f"{sorted(common)}; p=1 candidates coincide"), matched


def test_criterion_7_adjointness_iff():
    runs = []
    for p in range(1, 5):
        w = WeightSequence.pfock(p)
        for which in ((ASTAR,) if p == 1 else (ASTAR, BSTAR)):
            rep = verify_adjoint_iff(w, p, 32, which, trials=10)
            runs.append((p, which, rep.status, rep.details["route"],
                         len(rep.details["negatives"])))
    ok = all(status == "pass" and route != "float_root" and negs >= 10
             for _, _, status, route, negs in runs)
    assert record(7, ok, f"A*=B and both power conditions, both directions, exact, "
                         f">=10 negatives each: {len(runs)} runs"), runs


def test_criterion_8_stirling():
    rep = verify_stirling(7, 32)
    assert record(8, rep.status == "pass", f"D=id tail of Lambda_(k,n) = S(n,k), n<=7: "
                                           f"{rep.status}")


def test_criterion_9_dunkl():
    consistency = [verify_dunkl_consistency(k, 21).status for k in KAPPAS]
    examples = [verify_dunkl_example(k, 32, 7) for k in KAPPAS]
    matched = [r.details["matched"] for r in examples]
    printed_misses = [r.details["mismatch_counts"][coeffs.PRINTED] for r in examples]
    ok = (consistency == ["pass"] * 3 and all(m == [coeffs.CORRECTED] for m in matched)
          and all(r.status == "pass" for r in examples))
    assert record(9, ok, f"T = dphi to degree 20 ({consistency}); entry route unique match "
                         f"{matched[0]}; printed-form discrepancies {printed_misses}")


def test_criterion_10_mittag_leffler():
    rep = verify_ml_classic(24)
    ok = rep.status in ("pass", "tol_pass") and float(rep.max_abs_err or 0) <= 1e-9
    assert record(10, ok, f"ml:rho=1,mu=1 vs classic at N=24: {rep.status}, "
                          f"max_abs_err {rep.max_abs_err}")


def test_criterion_11_contraction():
    statuses = {}
    for spec in FAMILIES:
        w = parse_family(spec)
        assert w.is_nondecreasing(32)
        statuses[spec] = verify_contraction(w, 32, trials=100).status
    ok = all(s == "pass" for s in statuses.values())
    assert record(11, ok, f"||R0 f|| <= ||f|| for 100 random polynomials x {len(statuses)} "
                          f"families: {sorted(set(statuses.values()))}")
