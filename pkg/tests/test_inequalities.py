import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings

from amgm_cert.errors import NotApplicableError
from amgm_cert.inequalities import (
    CHECKERS,
    EQUALITY_CASES,
    EqualityCase,
    InequalityId,
    Status,
    check_all,
    check_cauchy,
    check_pairwise,
    check_product_form,
    check_strong_v1,
    check_strong_v2,
    classify_equality,
    strength_ordering_certified,
    tightness_ratio,
)
from amgm_cert.means import Sample, compute_means
from amgm_cert.numerics import IntervalScalar, iv_sqrt, iv_square, iv_sub

from conftest import inside, log_uniform_sample, oracle_means, oracle_term, oracle_values, samples_st


def S(*vals):
    return Sample.from_values(vals)


sqrt = mpmath.sqrt


class TestStrongV1:
    def test_all_equal(self):
        v = check_strong_v1(S(3, 3, 3))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.lhs.is_zero and v.rhs.is_zero
        assert v.tightness == 1.0

    def test_zero_present(self):
        v = check_strong_v1(S(5, 0, 0))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.lhs.contains(Fraction(5, 3)) and v.rhs.contains(Fraction(5, 3))
        assert v.equality_case is EqualityCase.ALL_BUT_ONE_ZERO

    def test_one_four(self):
        v = check_strong_v1(S(1, 4))
        assert v.status is Status.CERTIFIED_STRICT
        assert v.lhs.contains(Fraction(1, 2))
        assert inside(v.rhs, mpmath.mpf(4.5) - 3 * sqrt(2))
        assert abs(v.rhs.midpoint - 0.2573593) < 1e-7


class TestStrongV2:
    def test_all_equal(self):
        assert check_strong_v2(S(3, 3, 3)).status is Status.CERTIFIED_EQUALITY

    def test_one_four(self):
        v = check_strong_v2(S(1, 4))
        xs = [mpmath.mpf(1), mpmath.mpf(4)]
        assert inside(v.rhs, oracle_term(xs, 1) + oracle_term(xs, 2))
        assert abs(v.rhs.midpoint - 0.3796) < 1e-4
        assert v.status is Status.CERTIFIED_STRICT

    def test_zero_geometric_mean(self):
        v = check_strong_v2(S(5, 0, 0))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.rhs.contains(Fraction(5, 3))


class TestPairwise:
    def test_n_equals_two(self):
        v = check_pairwise(S(1, 4))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.rhs.contains(Fraction(1, 2)) and v.lhs.contains(Fraction(1, 2))
        assert v.equality_case is EqualityCase.N_EQUALS_2

    def test_all_but_one_zero(self):
        v = check_pairwise(S(5, 0, 0))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.rhs.contains(Fraction(5, 3))

    def test_strict(self):
        v = check_pairwise(S(1, 2, 3))
        assert v.status is Status.CERTIFIED_STRICT
        one, two, three = sqrt(1), sqrt(2), sqrt(3)
        rhs = ((one - two) ** 2 + (one - three) ** 2 + (two - three) ** 2) / 6
        assert inside(v.rhs, rhs)
        assert abs(v.rhs.midpoint - 0.13475) < 1e-5
        assert abs(v.lhs.midpoint - 0.18288) < 1e-5

    def test_not_applicable(self):
        with pytest.raises(NotApplicableError):
            check_pairwise(S(7))


class TestProductForm:
    def test_all_equal(self):
        v = check_product_form(S(3, 3, 3))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.lhs.contains(9) and v.rhs.contains(9)

    def test_zero(self):
        v = check_product_form(S(5, 0, 0))
        assert v.status is Status.CERTIFIED_EQUALITY
        assert v.lhs.is_zero and v.rhs.is_zero

    def test_strict(self):
        v = check_product_form(S(1, 2, 3))
        assert v.status is Status.CERTIFIED_STRICT
        assert inside(v.lhs, sqrt(2) + sqrt(3) + sqrt(6))
        assert inside(v.rhs, 3 * mpmath.cbrt(6))
        assert abs(v.lhs.midpoint - 5.5958) < 1e-4 and abs(v.rhs.midpoint - 5.4514) < 1e-4

    def test_not_applicable(self):
        with pytest.raises(NotApplicableError):
            check_product_form(S(7))


class TestClassify:
    @pytest.mark.parametrize(
        "vals, ineq, expected",
        [
            ((7, 7, 7, 7), InequalityId.PAIRWISE_3_1, EqualityCase.ALL_EQUAL),
            ((0, 0, 9), InequalityId.PAIRWISE_3_1, EqualityCase.ALL_BUT_ONE_ZERO),
            ((1, 2, 3), InequalityId.STRONG_2_6, EqualityCase.NONE),
            ((1, 4), InequalityId.PAIRWISE_3_1, EqualityCase.N_EQUALS_2),
            ((1, 4), InequalityId.STRONG_2_6, EqualityCase.NONE),
            ((0, 2, 3), InequalityId.STRONG_2_6, EqualityCase.SOME_ZERO),
            ((0, 2, 3), InequalityId.PAIRWISE_3_1, EqualityCase.NONE),
            ((0, 0, 0), InequalityId.STRONG_2_7, EqualityCase.ALL_EQUAL),
            ((0, 5), InequalityId.PAIRWISE_3_1, EqualityCase.N_EQUALS_2),
            ((0, 5), InequalityId.CAUCHY_1_1, EqualityCase.NONE),
        ],
    )
    def test_cases(self, vals, ineq, expected):
        assert classify_equality(S(*vals), ineq) is expected

    def test_exact_not_tolerance(self):
        # values differing in the last bit are not "all equal"
        a = IntervalScalar.point("1")
        b = IntervalScalar.point(1.0000000000000002)
        s = Sample((a, b, a))
        assert classify_equality(s, InequalityId.STRONG_2_6) is EqualityCase.NONE

    def test_accepts_string_id(self):
        assert classify_equality(S(2, 2), "CAUCHY_1_1") is EqualityCase.ALL_EQUAL


def test_tightness_zero_over_zero():
    z = IntervalScalar.exact(0)
    assert tightness_ratio(z, z) == 1.0


def test_check_all_order_and_n1():
    assert [v.inequality_id for v in check_all(S(1, 2, 3))] == list(CHECKERS)
    single = check_all(S(7))
    assert [v.inequality_id for v in single] == [
        InequalityId.CAUCHY_1_1,
        InequalityId.STRONG_2_6,
        InequalityId.STRONG_2_7,
    ]
    assert all(v.status is Status.CERTIFIED_EQUALITY for v in single)


def test_check_all_matches_individual_checkers():
    s = S("0.3", 17, 2.5, 0.001)
    for v in check_all(s):
        alone = CHECKERS[v.inequality_id](s)
        assert alone.status is v.status
        assert alone.lhs.same_as(v.lhs) and alone.rhs.same_as(v.rhs)


def _expected_equality(s, ineq):
    return classify_equality(s, ineq) is not EqualityCase.NONE


def test_soundness_random():
    """10^5 samples, n in [2, 16], 10% zeros: no violation, predictions match, 3.1 and 3.2 agree."""
    rng = random.Random(21)
    for _ in range(100_000):
        s = Sample.from_values(log_uniform_sample(rng, n=rng.randint(2, 16), zero_rate=0.1))
        verdicts = check_all(s)
        by_id = {v.inequality_id: v for v in verdicts}
        for v in verdicts:
            assert v.status is not Status.VIOLATED, (s.as_strings(), v)
            assert v.status is not Status.INCONCLUSIVE
            # prediction match
            assert (v.status is Status.CERTIFIED_EQUALITY) == _expected_equality(s, v.inequality_id)
        assert by_id[InequalityId.PAIRWISE_3_1].status is by_id[InequalityId.PRODUCT_3_2].status


@given(samples_st)
@settings(max_examples=150, deadline=None)
def test_strength_ordering(vals):
    s = Sample.from_values(vals)
    assert strength_ordering_certified(s)
    v1, v2 = check_strong_v1(s), check_strong_v2(s)
    assert not v1.rhs.certainly_gt(v2.rhs)
    assert not v2.rhs.certainly_gt(v2.lhs)


@given(samples_st)
@settings(max_examples=150, deadline=None)
def test_sides_enclose_oracle(vals):
    s = Sample.from_values(vals)
    xs = oracle_values(s)
    A, G = oracle_means(xs)
    assert inside(check_cauchy(s).lhs, A) and inside(check_cauchy(s).rhs, G)
    assert inside(check_strong_v1(s).rhs, oracle_term(xs, 1))
    if s.n >= 2:
        n = len(xs)
        pair = mpmath.fsum(
            (sqrt(xs[i]) - sqrt(xs[j])) ** 2 for i in range(n) for j in range(i + 1, n)
        ) / (n * (n - 1))
        assert inside(check_pairwise(s).rhs, pair)


def test_n2_identity():
    rng = random.Random(4)
    for _ in range(2000):
        s = Sample.from_values(log_uniform_sample(rng, n=2, zero_rate=0.1))
        mp = compute_means(s)
        a, b = s.values
        half = iv_square(iv_sub(iv_sqrt(a), iv_sqrt(b))) * Fraction(1, 2)
        residual = iv_sub(mp.gap, half)
        assert residual.contains_zero()
        assert residual.width_float <= 1e-20 * max(1.0, mp.A.hi_float)


def test_equality_cases_table():
    assert EQUALITY_CASES[InequalityId.CAUCHY_1_1] == {EqualityCase.ALL_EQUAL}
    assert EqualityCase.SOME_ZERO not in EQUALITY_CASES[InequalityId.PAIRWISE_3_1]
