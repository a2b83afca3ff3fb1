import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath.libmp import finf, from_int, mpf_shift

from amgm_cert.errors import DomainError, NonFiniteError
from amgm_cert.numerics import (
    IntervalScalar,
    PrecisionContext,
    iv_add,
    iv_div,
    iv_exp,
    iv_ln,
    iv_mul,
    iv_pow,
    iv_root_pow2,
    iv_sqrt,
    iv_square,
    iv_sub,
    mpf_to_decimal_string,
)

from conftest import inside

P = IntervalScalar.point
E = IntervalScalar.exact


def ulp(x, prec=128):
    """One unit in the last place of ``x`` at ``prec`` bits."""
    m, e = mpmath.frexp(mpmath.mpf(x))
    return mpmath.ldexp(1, int(e) - prec)


def width(iv):
    return mpmath.mpf(iv.hi) - mpmath.mpf(iv.lo)


class TestPrecisionContext:
    def test_defaults(self):
        ctx = PrecisionContext()
        assert ctx.working_precision == 128
        assert list(ctx.precisions()) == [128, 256, 512, 1024]

    @pytest.mark.parametrize(
        "kwargs", [{"working_precision": 52}, {"max_escalations": -1}, {"escalation_factor": 1}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            PrecisionContext(**kwargs)


class TestExamples:
    def test_add_exact(self):
        assert iv_add(E(1), E(2)).same_as(E(3))

    def test_add_identity(self):
        a = IntervalScalar("1.25", "7.5")
        assert iv_add(E(0), a).same_as(a)

    def test_add_decimal_fractions(self):
        a, b = P("0.1"), P("0.2")
        out = iv_add(a, b)
        exact = mpmath.mpf(a.lo) + mpmath.mpf(b.lo)
        assert inside(out, exact)
        assert width(out) <= 2 * ulp(0.3)

    def test_mul_exact(self):
        assert iv_mul(E(2), E(3)).same_as(E(6))

    def test_mul_sign_analysis(self):
        box = IntervalScalar(-1, 1)
        assert iv_mul(box, box).same_as(box)

    def test_mul_endpoint_products(self):
        a = IntervalScalar(P("1.1").lo, P("1.2").lo)
        b = IntervalScalar(P("0.9").lo, 1)
        out = iv_mul(a, b)
        lo_true = mpmath.mpf(a.lo) * mpmath.mpf(b.lo)
        hi_true = mpmath.mpf(a.hi) * mpmath.mpf(b.hi)
        assert mpmath.mpf(out.lo) <= lo_true and hi_true <= mpmath.mpf(out.hi)
        assert abs(mpmath.mpf(out.lo) - mpmath.mpf("0.99")) < 1e-30
        assert abs(mpmath.mpf(out.hi) - mpmath.mpf("1.2")) < 1e-30

    def test_sqrt_examples(self):
        assert iv_sqrt(E(4)).same_as(E(2))
        assert iv_sqrt(E(0)).same_as(E(0))
        r = iv_sqrt(E(2))
        assert inside(r, mpmath.sqrt(2))
        assert width(r) <= 2 * ulp(1.414)

    def test_sqrt_domain(self):
        with pytest.raises(DomainError):
            iv_sqrt(IntervalScalar(-1, 4))

    def test_root_pow2(self):
        assert iv_root_pow2(E(16), 2).same_as(E(2))
        x = P("3.7")
        assert iv_root_pow2(x, 0).same_as(x)
        r = iv_root_pow2(E(2), 2)
        assert inside(r, mpmath.mpf(2) ** mpmath.mpf(0.25))
        assert width(r) <= 4 * ulp(1.19)
        assert abs(r.midpoint - 1.189207115002721) < 1e-15

    def test_ln(self):
        assert iv_ln(E(1)).same_as(E(0))
        e = iv_exp(E(1))
        assert inside(iv_ln(e), mpmath.mpf(1))
        two = iv_ln(E(2))
        assert inside(two, mpmath.log(2))
        assert abs(two.midpoint - 0.6931471805599453) < 1e-15

    @pytest.mark.parametrize("bad", [IntervalScalar(0, 1), IntervalScalar(-2, 1)])
    def test_ln_domain(self, bad):
        with pytest.raises(DomainError):
            iv_ln(bad)

    def test_exp(self):
        assert iv_exp(E(0)).same_as(E(1))
        assert inside(iv_exp(E(1)), mpmath.e)
        assert iv_exp(iv_ln(E(5))).contains(5)

    def test_exp_saturates(self):
        big = IntervalScalar(1, E(mpf_shift(from_int(1), 40)).lo)
        out = iv_exp(big)
        assert out.hi == finf and not out.is_finite
        with pytest.raises(NonFiniteError):
            iv_mul(out, E(2))

    def test_division(self):
        out = iv_div(E(1), E(3))
        assert out.contains(Fraction(1, 3))
        with pytest.raises(DomainError):
            iv_div(E(1), IntervalScalar(-1, 1))

    def test_square_straddling_zero(self):
        out = iv_square(IntervalScalar(-2, 1))
        assert out.same_as(IntervalScalar(0, 4))

    @pytest.mark.parametrize("p", [Fraction(3, 2), Fraction(2, 3), 0.7, 3, Fraction(1, 8)])
    def test_real_power(self, p):
        q = Fraction(p)
        out = iv_pow(P("2.5"), p)
        assert inside(out, mpmath.mpf(P("2.5").lo) ** (mpmath.mpf(q.numerator) / q.denominator))

    def test_real_power_zero_base(self):
        assert iv_pow(E(0), Fraction(1, 3)).same_as(E(0))
        out = iv_pow(IntervalScalar(0, 8), Fraction(1, 3))
        assert out.contains(0) and out.contains(2)


OPS = {
    "add": (lambda a, b: iv_add(a, b), lambda x, y: x + y, 2),
    "sub": (lambda a, b: iv_sub(a, b), lambda x, y: x - y, 2),
    "mul": (lambda a, b: iv_mul(a, b), lambda x, y: x * y, 2),
    "div": (lambda a, b: iv_div(a, b), lambda x, y: x / y, 2),
    "sqrt": (lambda a: iv_sqrt(a), mpmath.sqrt, 1),
    "root8": (lambda a: iv_root_pow2(a, 3), lambda x: x ** mpmath.mpf(0.125), 1),
    "ln": (lambda a: iv_ln(a), mpmath.log, 1),
    "exp": (lambda a: iv_exp(a), mpmath.exp, 1),
}


def _random_operand(rng, positive):
    mag = 10.0 ** rng.uniform(-6, 6)
    if rng.random() < 0.5:
        text = f"{mag:.17g}"
        x = P(text)
    else:
        x = P(mag)
    if not positive and rng.random() < 0.3:
        x = -x
    return x


@pytest.mark.parametrize("name", sorted(OPS))
def test_containment_random_points(name):
    """10^4 random point inputs per operation against a 512-bit evaluation."""
    iv_op, oracle, arity = OPS[name]
    positive = name in ("sqrt", "root8", "ln", "div")
    rng = random.Random(hash(name) & 0xFFFF)
    for _ in range(10_000):
        args = [_random_operand(rng, positive) for _ in range(arity)]
        if name == "exp":
            args = [P(rng.uniform(-50, 50))]
        out = iv_op(*args)
        truth = oracle(*[mpmath.mpf(a.lo) for a in args])
        assert inside(out, truth), (name, args, out)


pos = st.floats(min_value=1e-3, max_value=1e3)
spread = st.floats(min_value=0, max_value=10)


@given(pos, spread, spread, spread, pos, spread)
@settings(max_examples=200, deadline=None)
def test_inclusion_monotone(x, w_in, pad_lo, pad_hi, y, w_other):
    inner = IntervalScalar(x, x + w_in)
    outer = IntervalScalar(x / (1 + pad_lo), x + w_in + pad_hi)
    other = IntervalScalar(y, y + w_other)
    for fn in (iv_sqrt, iv_ln, iv_exp, iv_square, lambda t: iv_mul(t, other), lambda t: iv_add(t, other)):
        wide, narrow = fn(outer), fn(inner)
        assert wide.contains(narrow)
        assert width(narrow) <= width(wide)


def test_determinism():
    x, y = P("0.3"), P("1.7e5")
    first = [iv_ln(x), iv_exp(x), iv_root_pow2(y, 7), iv_mul(x, y), iv_div(x, y)]
    again = [iv_ln(x), iv_exp(x), iv_root_pow2(y, 7), iv_mul(x, y), iv_div(x, y)]
    assert all(a.same_as(b) for a, b in zip(first, again))


@pytest.mark.parametrize("text", ["0.1", "1e-300", "123456.789", "2", "3.14159265358979323846264338327950288"])
def test_decimal_round_trip(text):
    x = P(text)
    s = mpf_to_decimal_string(x.lo)
    assert P(s).same_as(x)


def test_escalated_precision_tightens():
    lo = iv_ln(P("3", 128))
    hi = iv_ln(P("3", 128).at(512))
    assert lo.contains(hi)
    assert width(hi) < width(lo)
