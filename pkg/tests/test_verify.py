import json
from fractions import Fraction

import jsonschema
import pytest

from fockshift.diagring import d_zero
from fockshift.opcalc import ShiftOp, commutator, standard_ops
from fockshift.scalar import FLOAT
from fockshift.verify import (ASTAR, BSTAR, IDENTITIES, MAX_WITNESSES, ConfigError,
                              named_pair, run_identity, solve_pair, verify_adjoint_condition,
                              verify_adjoint_iff, verify_commutator_seed, verify_contraction,
                              verify_expansion, verify_fp_adjoint, verify_fp_commutator,
                              verify_general_commutator, verify_ml_classic,
                              verify_power_adjoint_conditions, verify_stirling_commutator)
from fockshift.weights import WeightSequence, parse_family

REPORT_SCHEMA = {
    "type": "object",
    "required": ["identity", "family", "params", "N", "mode", "status", "max_abs_err",
                 "witnesses"],
    "properties": {
        "identity": {"type": "string"},
        "family": {"type": "string"},
        "params": {"type": "object"},
        "N": {"type": "integer"},
        "mode": {"enum": ["exact", "float"]},
        "status": {"enum": ["pass", "tol_pass", "fail"]},
        "max_abs_err": {"type": ["string", "null"]},
        "witnesses": {"type": "array", "items": {
            "type": "object", "required": ["row", "col", "lhs", "rhs"],
            "properties": {"row": {"type": "integer"}, "col": {"type": "integer"},
                           "lhs": {"type": "string"}, "rhs": {"type": "string"}}}},
    },
}

classic = WeightSequence.classic()


def test_commutator_seed_report():
    rep = verify_commutator_seed(64)
    assert rep.status == "pass"
    jsonschema.validate(rep.to_dict(), REPORT_SCHEMA)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_expansion_classic(n):
    ops = standard_ops(classic)
    assert verify_expansion(classic, ops.R0, ops.I, n, 32).status == "pass"
    assert verify_expansion(classic, ops.dphi, ops.Mz, n, 32).status == "pass"


def test_expansion_holds_for_arbitrary_shift_pairs():
    w = WeightSequence.pfock(2)
    ops = standard_ops(w.perturbed(3))
    assert verify_expansion(w, ops.R0, ops.Iphi, 3, 16).status == "pass"
    A = ShiftOp.lowering([0, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1], "A")
    assert verify_expansion(w, A, ops.Iphi, 3, 16).status == "pass"


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_fp_adjoint(p):
    assert verify_fp_adjoint(p, 32).status == "pass"


def test_fp_commutator_forms():
    for p in (2, 3, 4):
        rep = verify_fp_commutator(p, 32)
        assert rep.passed and rep.details["matched"] == ["gamma_minus_lambda"]
    low = verify_fp_commutator(1, 32)
    assert "gamma_minus_lambda" in low.details["matched"]


def test_fp_commutator_at_p1_is_d_zero():
    ops = standard_ops(classic)
    M = commutator(ops.R0, ops.I, 20)
    expected = d_zero().materialize(20)
    assert all(M[j, j] == expected[j] for j in M.trusted_columns())
    assert verify_fp_commutator(1, 20).passed


@pytest.mark.parametrize("pair,family", [("dphi,Mz", "classic"), ("R0,I", "classic"),
                                         ("R0,Iphi", "dunkl:kappa=1/2")])
def test_adjoint_condition_positive(pair, family):
    w = parse_family(family)
    A, B = named_pair(w, pair)
    rep = verify_adjoint_condition(A, B, w, 24)
    assert rep.status == "pass" and rep.details["iff_consistent"]


def test_hardy_weights():
    hardy = WeightSequence.custom(lambda n: Fraction(1), label="hardy")
    one = Fraction(1)
    A, B = ShiftOp.lowering(lambda n: one), ShiftOp.raising(lambda n: one)
    assert verify_adjoint_condition(A, B, hardy, 24).status == "pass"


def test_adjoint_condition_negative_carries_witnesses():
    w = WeightSequence.pfock(2)
    A, B = named_pair(w, "R0,I")
    rep = verify_adjoint_condition(A, B, w, 40)
    assert rep.status == "fail"
    assert rep.details["iff_consistent"]
    assert 0 < len(rep.to_dict()["witnesses"]) <= MAX_WITNESSES
    assert len(rep.to_dict(full=True)["witnesses"]) > MAX_WITNESSES
    jsonschema.validate(rep.to_dict(), REPORT_SCHEMA)


@pytest.mark.parametrize("p", [2, 3])
def test_power_condition_pfock(p):
    w = WeightSequence.pfock(p)
    ops = standard_ops(w)
    assert verify_power_adjoint_conditions(ops.R0, ops.I, w, p, 24, ASTAR).status == "pass"


@pytest.mark.parametrize("which", [ASTAR, BSTAR])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_adjoint_iff_exact_both_directions(which, p):
    rep = verify_adjoint_iff(WeightSequence.pfock(p), p, 24, which, trials=10)
    assert rep.status == "pass"
    assert len(rep.details["negatives"]) == 10
    assert all(neg["consistent"] and neg["condition_violations"]
               for neg in rep.details["negatives"])


def test_dunkl_p2_falls_back_to_float():
    A, B, wu, route = solve_pair(WeightSequence.dunkl(Fraction(1, 2)), 2, ASTAR, 20)
    assert route == "float_root" and not wu.mode.exact
    rep = verify_power_adjoint_conditions(A, B, wu, 2, 16, ASTAR)
    assert rep.status == "tol_pass"


@pytest.mark.parametrize("which,form", [(ASTAR, "fwd,-D,gamma"), (BSTAR, "bwd,-D,gamma")])
def test_general_commutator_oracle_form(which, form):
    w = WeightSequence.pfock(3)
    for m in (2, 3):
        rep = run_identity("general_commutator", w, {"m": m, "which": which}, 24)
        assert rep.passed
        assert form in rep.details["matched"]
        assert not rep.details["printed_matches"]


def test_general_commutator_agrees_with_fp_commutator():
    # A = R0, B = I on (n!)^p weights: [A*, A] = -[R0, R0*]
    for p in (2, 3):
        w = WeightSequence.pfock(p)
        ops = standard_ops(w)
        rep = verify_general_commutator(ops.R0, ops.I, w, p, 24, ASTAR)
        assert rep.passed and "fwd,-D,gamma" in rep.details["matched"]


def test_stirling_commutator_signed_form():
    for m in (2, 3, 4):
        rep = verify_stirling_commutator(m, 24)
        assert rep.passed and rep.details["matched"] == ["signed"]


def test_contraction():
    for spec in ("classic", "pfock:p=2", "dunkl:kappa=3/2", "custom:seed=1"):
        assert verify_contraction(parse_family(spec), 24, trials=100).status == "pass"


def test_ml_classic_tolerance():
    rep = verify_ml_classic(24)
    assert rep.status == "tol_pass"
    assert float(rep.max_abs_err) <= 1e-9


@pytest.mark.parametrize("k", [2, 3, 5])
def test_perturbed_weight_breaks_an_identity(k):
    w = WeightSequence.pfock(2)
    bad = w.perturbed(k)
    ops = standard_ops(bad)
    assert verify_power_adjoint_conditions(ops.R0, ops.I, bad, 2, 16, ASTAR).status == "fail"
    assert verify_fp_adjoint(2, 16, bad).status == "fail"


def test_every_identity_runs():
    for name in IDENTITIES:
        if name in ("dunkl_example", "dunkl_consistency"):
            w = parse_family("dunkl:kappa=1/2")
        else:
            w = classic
        rep = run_identity(name, w, {}, 16)
        assert rep.passed, (name, rep.details)
        json.dumps(rep.to_dict())


def test_unknown_identity_and_params():
    with pytest.raises(ConfigError):
        run_identity("nope", classic, {}, 16)
    with pytest.raises(ConfigError):
        run_identity("general_commutator", classic, {"which": "CStar"}, 16)
    with pytest.raises(ConfigError):
        named_pair(classic, "X,Y")


def test_float_mode_report():
    w = WeightSequence.classic(FLOAT)
    rep = run_identity("commutator_seed", w, {}, 16)
    assert rep.mode in ("exact", "float")
    assert rep.passed
