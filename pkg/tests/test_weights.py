import json
import math
import threading
from fractions import Fraction
from math import factorial

import pytest

from fockshift.scalar import EXACT, FLOAT, UnsupportedInExactMode
from fockshift.weights import (FamilySpecError, InvalidWeight, MissingWeight, WeightSequence,
                               inner_product, kernel_eval, parse_family)


def poch(x, k):
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


def dunkl_oracle(kappa, n):
    """1 / [z^n] e^z 1F1(kappa; 2 kappa + 1; -2z), by the Cauchy product of the two series."""
    coeff = Fraction(0)
    for k in range(n + 1):
        hyper = poch(kappa, k) / poch(2 * kappa + 1, k) * Fraction(-2) ** k / factorial(k)
        coeff += hyper / factorial(n - k)
    return 1 / coeff


def test_family_examples():
    assert WeightSequence.classic().phi(4) == 24
    assert WeightSequence.pfock(2).phi(3) == 36
    assert WeightSequence.dunkl(Fraction(1, 2)).phi(2) == 4


@pytest.mark.parametrize("kappa", [Fraction(1, 2), Fraction(3, 2), Fraction(2, 5)])
def test_dunkl_weights_match_generating_function(kappa):
    w = WeightSequence.dunkl(kappa)
    assert [w.phi(n) for n in range(14)] == [dunkl_oracle(kappa, n) for n in range(14)]


@pytest.mark.parametrize("kappa", [Fraction(1, 2), Fraction(3, 2), Fraction(2, 5)])
def test_dunkl_ratios(kappa):
    w = WeightSequence.dunkl(kappa)
    for n in range(12):
        assert w.phi(2 * n) / w.phi(2 * n + 1) == 1 / (2 * n + 2 * kappa + 1)
        if n:
            assert w.phi(2 * n - 1) / w.phi(2 * n) == Fraction(1, 2 * n)


def test_classic_recursion_and_pfock_one():
    w, p1 = WeightSequence.classic(), WeightSequence.pfock(1)
    for n in range(65):
        assert w.phi(n + 1) == (n + 1) * w.phi(n)
        assert p1.phi(n) == w.phi(n)


@pytest.mark.parametrize("spec", ["classic", "pfock:p=2", "pfock:p=3", "dunkl:kappa=1/2",
                                  "dunkl:kappa=3/2", "custom:seed=1", "custom:seed=2"])
def test_weights_positive_and_normalized(spec):
    w = parse_family(spec)
    assert w.phi(0) == 1
    assert all(w.phi(n) > 0 for n in range(40))
    assert w.is_nondecreasing(40)


def test_mittag_leffler_renormalized():
    with pytest.raises(UnsupportedInExactMode):
        WeightSequence.mittag_leffler(1, 1, EXACT)
    w = WeightSequence.mittag_leffler(2.0, 1.5)
    assert w.phi(0) == 1.0
    assert w.phi(3) == pytest.approx(math.gamma(1.5 + 1.5) / math.gamma(1.5), rel=1e-12)
    ml = parse_family("ml:rho=1,mu=1")
    assert ml.mode.exact is False
    assert [ml.phi(n) for n in range(10)] == pytest.approx([factorial(n) for n in range(10)])


def test_inner_product_examples():
    classic, p2 = WeightSequence.classic(), parse_family("pfock:2")
    z2 = [0, 0, 1]
    assert inner_product(z2, z2, classic) == 2
    assert inner_product([0, 1], z2, p2) == 0
    assert inner_product([1, 1], [1, -1], p2) == 0


def test_kernel_examples():
    classic = WeightSequence.classic()
    assert kernel_eval(classic, 0, 7) == 1
    assert float(kernel_eval(classic, 1, 20)) == pytest.approx(math.e, abs=1e-12)
    oracle = sum(Fraction(1, factorial(n) ** 2) for n in range(10))
    assert kernel_eval(WeightSequence.pfock(2), 1, 10) == oracle
    ml = parse_family("ml:rho=1,mu=1")
    assert kernel_eval(ml, 0.5, 30) == pytest.approx(math.exp(0.5), abs=1e-12)


def test_custom_file_family(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(["1", "3/2", "4"]))
    w = parse_family(f"custom:@{path}")
    assert w.values(3) == [1, Fraction(3, 2), 4]
    with pytest.raises(MissingWeight):
        w.phi(3)
    path.write_text(json.dumps(["1", "-2"]))
    with pytest.raises(InvalidWeight):
        parse_family(f"custom:@{path}").phi(1)
    path.write_text(json.dumps(["2", "3"]))
    with pytest.raises(InvalidWeight):
        parse_family(f"custom:@{path}").phi(0)
    path.write_text(json.dumps([1, 2]))
    with pytest.raises(FamilySpecError):
        parse_family(f"custom:@{path}")


@pytest.mark.parametrize("spec", ["bogus", "pfock:p=0", "pfock:q=2", "dunkl", "dunkl:kappa=-1",
                                  "custom", "custom:@/nonexistent.json", "ml:rho=0"])
def test_bad_family_specs(spec):
    with pytest.raises((FamilySpecError, ValueError)):
        parse_family(spec)


def test_bare_value_shorthand():
    assert parse_family("pfock:2").phi(3) == 36
    assert parse_family("dunkl:1/2").phi(2) == 4


def test_seeded_weights_are_reproducible():
    a, b = parse_family("custom:seed=5"), parse_family("custom:seed=5")
    assert a.values(30) == b.values(30)
    assert a.values(30) != parse_family("custom:seed=6").values(30)


def test_memo_fill_is_safe_under_threads():
    w = WeightSequence.seeded(11)
    expected = WeightSequence.seeded(11).values(200)
    results = []

    def work():
        results.append(w.values(200))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)


def test_float_mode_family():
    w = parse_family("dunkl:kappa=1/2", FLOAT)
    assert isinstance(w.phi(3), float)
    assert w.phi(2) == pytest.approx(4.0)


def test_perturbed_copy():
    w = WeightSequence.classic().perturbed(3)
    assert w.phi(3) == 7 and w.phi(4) == 24
