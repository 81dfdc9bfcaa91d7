import math
from fractions import Fraction

import numpy as np
import pytest

from lazyleader import bounds as B
from lazyleader.combinatorial import default_eta
from lazyleader.core import DomainError


def test_thm1_values():
    assert B.thm1_bound(10_000, 10) == pytest.approx(1880.14, abs=0.01)
    assert B.thm1_bound(1, 2) == pytest.approx(8 * math.sqrt(2 * math.log(2)) + 16, rel=1e-15)
    assert B.thm1_switch_bound(10_000, 2) == pytest.approx(511.805, abs=1e-3)


@pytest.mark.parametrize("n", [1, 2, 10, 1000, 10**6])
@pytest.mark.parametrize("N", [2, 3, 10, 1000])
def test_thm1_dominates_twice_switch_bound(n, N):
    assert B.thm1_bound(n, N) >= 2 * B.thm1_switch_bound(n, N)


def test_monotone_in_n_and_N():
    for f in (B.thm1_bound, B.thm1_switch_bound, B.lower_bound):
        assert f(200, 5) > f(100, 5)
        assert f(100, 6) > f(100, 5)


def test_lemma2_values():
    assert B.lemma2_bound(100, 2) == pytest.approx(0.550964, abs=1e-6)
    assert B.lemma2_bound(1, 2) == pytest.approx(12.70964, abs=1e-5)
    assert B.lemma2_bound(400, 2) < B.lemma2_bound(100, 2)


def test_lower_bound():
    assert B.lower_bound(100, 2) == pytest.approx(5.88705, abs=1e-5)
    assert B.lower_bound(0, 2) == 0.0


@pytest.mark.parametrize("t", range(1, 61))
def test_pmf_ratio_exhaustive(t):
    for k in range(-t + 4, t + 1):
        if (k - t) % 2:
            continue
        exact = Fraction(math.comb(t, (t + k - 4) // 2), math.comb(t, (t + k) // 2))
        assert abs(B.pmf_ratio(t, k) - float(exact)) <= 1e-12 * float(exact)
        assert abs(B.pmf_ratio_factorial(t, k) - float(exact)) <= 1e-12 * float(exact)


def test_pmf_ratio_values_and_domain():
    assert B.pmf_ratio(4, 2) == 1.0
    assert B.pmf_ratio(4, 4) == pytest.approx(math.comb(4, 2) / math.comb(4, 4))
    for t, k in [(4, 6), (4, -2), (5, 2), (0, 4)]:
        with pytest.raises(DomainError):
            B.pmf_ratio(t, k)
        with pytest.raises(DomainError):
            B.pmf_ratio_factorial(t, k)


def test_thm2_tuned_value():
    assert B.thm2_regret_bound_tuned(10_000, 10, 3) == pytest.approx(4720.98, abs=0.01)


def test_thm2_general_at_tuned_eta():
    n, d, m = 10_000, 10, 3
    eta = default_eta(d)
    general = B.thm2_regret_bound(n, d, m, eta)
    ld = math.log(d)
    closed = 2**1.75 * m * math.sqrt(d * n) * ld**0.25 + m * (math.log(n) + 1) * math.sqrt(ld) / math.sqrt(2)
    assert general == pytest.approx(closed, rel=1e-12)
    assert general <= B.thm2_regret_bound_tuned(n, d, m)


def test_thm2_eta_is_near_optimal():
    n, d, m = 10_000, 10, 3
    etas = np.linspace(0.5, 10, 400)
    best = min(B.thm2_regret_bound(n, d, m, e) for e in etas)
    assert B.thm2_regret_bound(n, d, m, default_eta(d)) <= 1.05 * best


def test_thm2_switch_single_term():
    s = math.sqrt(2 * math.log(2))
    a = 2 * math.log(2) + s + 1
    hand = (1 + 2 * a + a * a) / 4 + (1 + a) * s
    assert B.thm2_switch_bound(1, 2, 1, 1.0) == pytest.approx(hand, rel=1e-14)


def test_thm2_switch_value():
    assert B.thm2_switch_bound(10_000, 10, 3, default_eta(10)) == pytest.approx(10805.37, abs=0.01)


def test_sums_switch_to_integral_bounds():
    assert B.harmonic(10) == pytest.approx(sum(1 / t for t in range(1, 11)))
    assert B.inv_sqrt_sum(4) == pytest.approx(1 + 1 / math.sqrt(2) + 1 / math.sqrt(3) + 0.5)
    big = B.DIRECT_SUM_LIMIT + 1
    assert B.harmonic(big) == pytest.approx(math.log(big) + 1)
    assert B.inv_sqrt_sum(big) == pytest.approx(2 * math.sqrt(big))


def test_domain_errors():
    with pytest.raises(DomainError):
        B.thm1_bound(0, 2)
    with pytest.raises(DomainError):
        B.thm1_bound(10, 1)
    with pytest.raises(DomainError):
        B.thm2_regret_bound(10, 1, 1, 1.0)
    with pytest.raises(DomainError):
        B.thm2_regret_bound(10, 3, 1, 0.0)


def test_report():
    r = B.report("thm1", 10_000, N=10)
    assert r.value == pytest.approx(1880.14, abs=0.01)
    assert r.to_dict()["parameters"] == {"n": 10_000, "N": 10}
    assert B.report("lemma2", 100, N=2).value == pytest.approx(0.550964, abs=1e-6)
    assert B.report("thm2", 10_000, d=10, m=3).parameters["tuned"]
    with pytest.raises(DomainError):
        B.report("thm1", 10)
    with pytest.raises(DomainError):
        B.report("nope", 10)
