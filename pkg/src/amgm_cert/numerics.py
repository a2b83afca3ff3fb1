"""Outward-rounded interval arithmetic over arbitrary-precision binary floats.

Endpoints are raw mpmath ``mpf`` tuples; every operation rounds the lower
endpoint toward -inf and the upper endpoint toward +inf at the working
precision carried by the operands.  Square roots are correctly rounded by
the backend.  ``ln`` and ``exp`` are evaluated with guard bits and then
pushed outward by a few hundred guard-level ulps before the final directed
rounding, so containment does not depend on the backend rounding those two
functions correctly.

Only containment is promised, never 1-ulp tightness.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Integral
from typing import Iterable, Iterator, Union

from mpmath.libmp import (
    MPZ_ONE,
    finf,
    fnan,
    fninf,
    from_float,
    from_int,
    from_rational,
    from_str,
    fone,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_exp,
    mpf_log,
    mpf_lt,
    mpf_mul,
    mpf_neg,
    mpf_pos,
    mpf_shift,
    mpf_sqrt,
    mpf_sub,
    prec_to_dps,
    to_float,
    to_rational,
    to_str,
)

from .errors import DomainError, NonFiniteError

DEFAULT_PRECISION = 128

FLOOR = "f"
CEILING = "c"
NEAREST = "n"

# guard bits for ln/exp, and how many guard-level ulps we widen by afterwards
_GUARD_BITS = 24
_WIDEN_SHIFT = 8
# |argument| beyond which exp saturates instead of building a gigantic exponent
_EXP_ARG_LIMIT = from_int(1 << 32)

Real = Union[int, float, str, Fraction, Decimal]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus the escalation schedule used by certifiers."""

    working_precision: int = DEFAULT_PRECISION
    max_escalations: int = 3
    escalation_factor: int = 2

    def __post_init__(self):
        if int(self.working_precision) < 53:
            raise ValueError("working_precision must be at least 53 bits")
        if int(self.max_escalations) < 0:
            raise ValueError("max_escalations must be nonnegative")
        if int(self.escalation_factor) < 2:
            raise ValueError("escalation_factor must be an integer >= 2")

    def precisions(self) -> Iterator[int]:
        """Yield the working precision and then each escalated precision."""
        prec = self.working_precision
        for _ in range(self.max_escalations + 1):
            yield prec
            prec *= self.escalation_factor

    def with_precision(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits, self.max_escalations, self.escalation_factor)


DEFAULT_CONTEXT = PrecisionContext()


def _is_mpf(value) -> bool:
    return type(value) is tuple and len(value) == 4


def to_mpf(value, prec: int = DEFAULT_PRECISION, rnd: str = NEAREST):
    """Convert a Python number (or mpf tuple) to an mpf, rounding with ``rnd``.

    ints, floats, and Fractions with power-of-two denominators are exact when
    they fit; decimal strings are rounded.
    """
    if _is_mpf(value):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Integral):
        return mpf_pos(from_int(int(value)), prec, rnd)
    if isinstance(value, float):
        return mpf_pos(from_float(value), prec, rnd)
    if isinstance(value, Fraction):
        return from_rational(value.numerator, value.denominator, prec, rnd)
    if isinstance(value, Decimal):
        value = str(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return from_str(text, prec, rnd)
        except ValueError:
            raise ValueError(f"not a decimal number: {value!r}") from None
    raise TypeError(f"cannot convert {type(value).__name__} to a binary float")


def mpf_to_fraction(x) -> Fraction:
    if x in (finf, fninf, fnan):
        raise NonFiniteError("non-finite endpoint has no rational value")
    p, q = to_rational(x)
    return Fraction(int(p), int(q))


def mpf_to_decimal_string(x, prec: int = DEFAULT_PRECISION) -> str:
    """Shortest decimal string that parses back to exactly ``x``.

    ``prec`` is a floor; endpoints carrying more bits than that are
    round-tripped at their own bit length.
    """
    if x == fzero:
        return "0"
    if x == finf:
        return "inf"
    if x == fninf:
        return "-inf"
    bits = max(prec, int(x[3]))
    hi_dps = prec_to_dps(bits) + 2
    lo_dps = 1
    # binary search on digit count; round-trip success is monotone in dps
    while lo_dps < hi_dps:
        mid = (lo_dps + hi_dps) // 2
        if from_str(to_str(x, mid), bits, NEAREST) == x:
            hi_dps = mid
        else:
            lo_dps = mid + 1
    text = to_str(x, hi_dps)
    if from_str(text, bits, NEAREST) != x:
        text = to_str(x, prec_to_dps(bits) + 10)
    return text


def _new(lo, hi, prec: int) -> "IntervalScalar":
    obj = object.__new__(IntervalScalar)
    obj.lo = lo
    obj.hi = hi
    obj.prec = prec
    return obj


class IntervalScalar:
    """Closed interval ``[lo, hi]`` with mpf endpoints and a working precision.

    Treat instances as immutable.  Arithmetic operators accept other
    intervals and exact Python numbers (int, Fraction, float); decimal
    strings must be converted explicitly via :meth:`enclose` or :meth:`point`.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PRECISION):
        if hi is None:
            hi = lo
        lo_m = to_mpf(lo, prec, FLOOR)
        hi_m = to_mpf(hi, prec, CEILING)
        if lo_m == fnan or hi_m == fnan:
            raise ValueError("NaN endpoint")
        if mpf_lt(hi_m, lo_m):
            raise ValueError("interval with lo > hi")
        self.lo = lo_m
        self.hi = hi_m
        self.prec = int(prec)

    @classmethod
    def enclose(cls, value: Real, prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        """Rigorous enclosure of the exact value denoted by ``value``."""
        return _new(to_mpf(value, prec, FLOOR), to_mpf(value, prec, CEILING), prec)

    @classmethod
    def point(cls, value: Real, prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        """Point interval at the nearest ``prec``-bit float to ``value``."""
        x = to_mpf(value, prec, NEAREST)
        return _new(x, x, prec)

    @classmethod
    def exact(cls, value, prec: int = DEFAULT_PRECISION) -> "IntervalScalar":
        """Point interval holding ``value`` exactly (mpf tuple, int or float)."""
        if _is_mpf(value):
            x = value
        elif isinstance(value, Integral):
            x = from_int(int(value))
        elif isinstance(value, float):
            x = from_float(value)
        else:
            raise TypeError("exact() needs an mpf, int or float")
        return _new(x, x, prec)

    def at(self, prec: int) -> "IntervalScalar":
        """Same endpoints, different working precision for later operations."""
        return _new(self.lo, self.hi, int(prec))

    # -- inspection ---------------------------------------------------------

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_zero(self) -> bool:
        return self.lo == fzero and self.hi == fzero

    @property
    def is_finite(self) -> bool:
        return self.lo not in (finf, fninf) and self.hi not in (finf, fninf)

    @property
    def width(self):
        """Upper bound on ``hi - lo`` as an mpf."""
        return mpf_sub(self.hi, self.lo, self.prec, CEILING)

    @property
    def mid(self):
        return mpf_shift(mpf_add(self.lo, self.hi, self.prec + 1, NEAREST), -1)

    @property
    def midpoint(self) -> float:
        return to_float(self.mid)

    @property
    def lo_float(self) -> float:
        return to_float(self.lo, rnd=FLOOR)

    @property
    def hi_float(self) -> float:
        return to_float(self.hi, rnd=CEILING)

    @property
    def width_float(self) -> float:
        return to_float(self.width, rnd=CEILING)

    def contains(self, value) -> bool:
        """Exact membership test for an interval, int, float, Fraction, or mpf."""
        if isinstance(value, IntervalScalar):
            return mpf_cmp(self.lo, value.lo) <= 0 and mpf_cmp(value.hi, self.hi) <= 0
        if isinstance(value, (Fraction, Decimal, str)):
            q = Fraction(value)
            lo_ok = self.lo == fninf or (self.lo != finf and mpf_to_fraction(self.lo) <= q)
            hi_ok = self.hi == finf or (self.hi != fninf and mpf_to_fraction(self.hi) >= q)
            return lo_ok and hi_ok
        if _is_mpf(value):
            x = value
        elif isinstance(value, float):
            x = from_float(value)
        else:
            x = from_int(int(value))
        return mpf_cmp(self.lo, x) <= 0 and mpf_cmp(x, self.hi) <= 0

    def contains_zero(self) -> bool:
        return mpf_cmp(self.lo, fzero) <= 0 and mpf_cmp(fzero, self.hi) <= 0

    def intersects(self, other: "IntervalScalar") -> bool:
        return mpf_cmp(self.lo, other.hi) <= 0 and mpf_cmp(other.lo, self.hi) <= 0

    def certainly_lt(self, other: "IntervalScalar") -> bool:
        return mpf_lt(self.hi, other.lo)

    def certainly_gt(self, other: "IntervalScalar") -> bool:
        return mpf_lt(other.hi, self.lo)

    def bounds_fraction(self) -> tuple[Fraction, Fraction]:
        return mpf_to_fraction(self.lo), mpf_to_fraction(self.hi)

    def endpoints_str(self) -> tuple[str, str]:
        return mpf_to_decimal_string(self.lo, self.prec), mpf_to_decimal_string(self.hi, self.prec)

    def same_as(self, other: "IntervalScalar") -> bool:
        """Bit-identical endpoints."""
        return self.lo == other.lo and self.hi == other.hi

    def __eq__(self, other):
        if not isinstance(other, IntervalScalar):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        lo, hi = self.endpoints_str()
        if lo == hi:
            return f"IntervalScalar[{lo}]"
        return f"IntervalScalar[{lo}, {hi}]"

    # -- operators ----------------------------------------------------------

    def _coerce(self, other) -> "IntervalScalar":
        if isinstance(other, IntervalScalar):
            return other
        if isinstance(other, (Integral, Fraction, float)) and not isinstance(other, bool):
            return IntervalScalar.enclose(other, self.prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_sub(self, other)

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_sub(other, self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is NotImplemented else iv_div(other, self)

    def __neg__(self):
        return iv_neg(self)


ZERO = _new(fzero, fzero, DEFAULT_PRECISION)
ONE = _new(fone, fone, DEFAULT_PRECISION)


def zero(prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    return _new(fzero, fzero, prec)


def one(prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    return _new(fone, fone, prec)


def _require_finite(*ivs: IntervalScalar) -> None:
    for a in ivs:
        if not a.is_finite:
            raise NonFiniteError(f"non-finite operand {a!r}")


def _pmax(a: IntervalScalar, b: IntervalScalar) -> int:
    return a.prec if a.prec >= b.prec else b.prec


def iv_add(a: IntervalScalar, b: IntervalScalar) -> IntervalScalar:
    prec = _pmax(a, b)
    lo = mpf_add(a.lo, b.lo, prec, FLOOR)
    hi = mpf_add(a.hi, b.hi, prec, CEILING)
    # inf + (-inf) saturates to the unbounded side
    if lo == fnan:
        lo = fninf
    if hi == fnan:
        hi = finf
    return _new(lo, hi, prec)


def iv_neg(a: IntervalScalar) -> IntervalScalar:
    return _new(mpf_neg(a.hi), mpf_neg(a.lo), a.prec)


def iv_sub(a: IntervalScalar, b: IntervalScalar) -> IntervalScalar:
    prec = _pmax(a, b)
    lo = mpf_sub(a.lo, b.hi, prec, FLOOR)
    hi = mpf_sub(a.hi, b.lo, prec, CEILING)
    if lo == fnan:
        lo = fninf
    if hi == fnan:
        hi = finf
    return _new(lo, hi, prec)


def iv_sum(items: Iterable[IntervalScalar], prec: int | None = None) -> IntervalScalar:
    items = list(items)
    if not items:
        return zero(prec or DEFAULT_PRECISION)
    if prec is None:
        prec = max(a.prec for a in items)
    lo = fzero
    hi = fzero
    for a in items:
        lo = mpf_add(lo, a.lo, prec, FLOOR)
        hi = mpf_add(hi, a.hi, prec, CEILING)
    if lo == fnan:
        lo = fninf
    if hi == fnan:
        hi = finf
    return _new(lo, hi, prec)


def iv_mul(a: IntervalScalar, b: IntervalScalar) -> IntervalScalar:
    _require_finite(a, b)
    prec = _pmax(a, b)
    if a.lo[0] == 0 and b.lo[0] == 0:
        # both intervals nonnegative (sign bit clear on the lower endpoint)
        return _new(mpf_mul(a.lo, b.lo, prec, FLOOR), mpf_mul(a.hi, b.hi, prec, CEILING), prec)
    ends = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    lows = [mpf_mul(x, y, prec, FLOOR) for x, y in ends]
    highs = [mpf_mul(x, y, prec, CEILING) for x, y in ends]
    lo = min(lows, key=_SortKey)
    hi = max(highs, key=_SortKey)
    return _new(lo, hi, prec)


class _SortKey:
    __slots__ = ("x",)

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return mpf_cmp(self.x, other.x) < 0


def iv_square(a: IntervalScalar) -> IntervalScalar:
    """Tight enclosure of ``{t*t : t in a}`` (never negative)."""
    _require_finite(a)
    prec = a.prec
    if a.lo[0] == 0:
        return _new(mpf_mul(a.lo, a.lo, prec, FLOOR), mpf_mul(a.hi, a.hi, prec, CEILING), prec)
    if mpf_cmp(a.hi, fzero) <= 0:
        return _new(mpf_mul(a.hi, a.hi, prec, FLOOR), mpf_mul(a.lo, a.lo, prec, CEILING), prec)
    m = mpf_abs(a.lo) if mpf_cmp(mpf_abs(a.lo), a.hi) > 0 else a.hi
    return _new(fzero, mpf_mul(m, m, prec, CEILING), prec)


def iv_div(a: IntervalScalar, b: IntervalScalar) -> IntervalScalar:
    _require_finite(a, b)
    if b.contains_zero():
        raise DomainError(f"division by an interval containing zero: {b!r}")
    prec = _pmax(a, b)
    ends = ((a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi))
    lows = [mpf_div(x, y, prec, FLOOR) for x, y in ends]
    highs = [mpf_div(x, y, prec, CEILING) for x, y in ends]
    return _new(min(lows, key=_SortKey), max(highs, key=_SortKey), prec)


def iv_div_int(a: IntervalScalar, n: int) -> IntervalScalar:
    """Divide by a positive integer (the common ``1/n`` case)."""
    if n <= 0:
        raise DomainError("iv_div_int needs a positive divisor")
    _require_finite(a)
    d = from_int(n)
    prec = a.prec
    return _new(mpf_div(a.lo, d, prec, FLOOR), mpf_div(a.hi, d, prec, CEILING), prec)


def iv_scale_pow2(a: IntervalScalar, k: int) -> IntervalScalar:
    """Multiply by ``2**k`` exactly."""
    return _new(mpf_shift(a.lo, k), mpf_shift(a.hi, k), a.prec)


def iv_abs(a: IntervalScalar) -> IntervalScalar:
    if a.lo[0] == 0:
        return a
    if mpf_cmp(a.hi, fzero) <= 0:
        return iv_neg(a)
    top = mpf_abs(a.lo) if mpf_cmp(mpf_abs(a.lo), a.hi) > 0 else a.hi
    return _new(fzero, top, a.prec)


def iv_hull(a: IntervalScalar, b: IntervalScalar) -> IntervalScalar:
    lo = a.lo if mpf_cmp(a.lo, b.lo) <= 0 else b.lo
    hi = a.hi if mpf_cmp(a.hi, b.hi) >= 0 else b.hi
    return _new(lo, hi, _pmax(a, b))


def iv_sqrt(a: IntervalScalar) -> IntervalScalar:
    if a.lo[0] == 1 and a.lo != fzero:
        raise DomainError(f"sqrt of interval with negative lower endpoint: {a!r}")
    prec = a.prec
    return _new(mpf_sqrt(a.lo, prec, FLOOR), mpf_sqrt(a.hi, prec, CEILING), prec)


def iv_root_pow2(a: IntervalScalar, k: int) -> IntervalScalar:
    """Enclosure of ``a ** (1 / 2**k)`` by ``k`` nested square roots."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    for _ in range(k):
        a = iv_sqrt(a)
    return a


def root_pow2_chain(a: IntervalScalar, k: int) -> list[IntervalScalar]:
    """``[a, a^(1/2), a^(1/4), ..., a^(1/2^k)]``."""
    chain = [a]
    for _ in range(k):
        a = iv_sqrt(a)
        chain.append(a)
    return chain


def _widen(v, wp: int, upward: bool):
    sign, man, exp, bc = v
    if not man:
        return v
    eps = (0 if upward else 1, MPZ_ONE, exp + bc - wp + _WIDEN_SHIFT, 1)
    return mpf_add(v, eps, wp, CEILING if upward else FLOOR)


def _log_dir(x, prec: int, upward: bool):
    if x == fone:
        return fzero
    wp = prec + _GUARD_BITS
    rnd = CEILING if upward else FLOOR
    v = _widen(mpf_log(x, wp, rnd), wp, upward)
    return mpf_pos(v, prec, rnd)


def _exp_dir(x, prec: int, upward: bool):
    if x == fzero:
        return fone
    wp = prec + _GUARD_BITS
    rnd = CEILING if upward else FLOOR
    v = _widen(mpf_exp(x, wp, rnd), wp, upward)
    return mpf_pos(v, prec, rnd)


def iv_ln(a: IntervalScalar) -> IntervalScalar:
    if a.lo[0] == 1 or a.lo == fzero:
        raise DomainError(f"ln of interval with nonpositive lower endpoint: {a!r}")
    prec = a.prec
    hi = finf if a.hi == finf else _log_dir(a.hi, prec, True)
    return _new(_log_dir(a.lo, prec, False), hi, prec)


def iv_exp(a: IntervalScalar) -> IntervalScalar:
    """Enclosure of ``exp(a)``; arguments beyond 2**32 saturate to infinity."""
    prec = a.prec
    if a.lo == fninf or mpf_lt(a.lo, mpf_neg(_EXP_ARG_LIMIT)):
        lo = fzero
    elif mpf_lt(_EXP_ARG_LIMIT, a.lo):
        lo = finf
    else:
        lo = _exp_dir(a.lo, prec, False)
    if a.hi == finf or mpf_lt(_EXP_ARG_LIMIT, a.hi):
        hi = finf
    elif mpf_lt(a.hi, mpf_neg(_EXP_ARG_LIMIT)):
        hi = _exp_dir(mpf_neg(_EXP_ARG_LIMIT), prec, True)
    else:
        hi = _exp_dir(a.hi, prec, True)
    if lo == finf:
        raise NonFiniteError("exp overflow beyond the saturation limit")
    return _new(lo, hi, prec)


def _exact_pow2_root_depth(p: Fraction) -> int | None:
    # p == 1/2**k  ->  k
    if p.numerator != 1:
        return None
    d = p.denominator
    if d & (d - 1):
        return None
    return d.bit_length() - 1


def iv_pow(a: IntervalScalar, p: Union[int, float, Fraction]) -> IntervalScalar:
    """Enclosure of ``a ** p`` for ``a >= 0`` and a positive exact exponent.

    Integer exponents use repeated multiplication and ``1/2**k`` uses nested
    square roots.  Anything else goes through ``exp(p * ln a)``; a zero lower
    endpoint maps to zero (continuous extension for p > 0).
    """
    if a.lo[0] == 1 and a.lo != fzero:
        raise DomainError(f"real power of a possibly negative interval: {a!r}")
    frac = Fraction(p)
    if frac <= 0:
        raise DomainError("exponent must be positive")
    if frac.denominator == 1:
        out = a
        for _ in range(frac.numerator - 1):
            out = iv_mul(out, a)
        return out
    k = _exact_pow2_root_depth(frac)
    if k is not None:
        return iv_root_pow2(a, k)
    prec = a.prec
    if a.hi == fzero:
        return a
    expo = IntervalScalar.enclose(frac, prec)
    top = iv_exp(iv_mul(expo, iv_ln(_new(a.hi, a.hi, prec)))).hi
    if a.lo == fzero:
        return _new(fzero, top, prec)
    bottom = iv_exp(iv_mul(expo, iv_ln(_new(a.lo, a.lo, prec)))).lo
    return _new(bottom, top, prec)


def iv_pow_interval(a: IntervalScalar, p: IntervalScalar) -> IntervalScalar:
    """Enclosure of ``a ** p`` for ``a >= 0`` and ``p`` a positive interval."""
    if not mpf_lt(fzero, p.lo):
        raise DomainError("exponent interval must be positive")
    if a.lo[0] == 1 and a.lo != fzero:
        raise DomainError(f"real power of a possibly negative interval: {a!r}")
    prec = _pmax(a, p)
    if a.hi == fzero:
        return _new(fzero, fzero, prec)
    if a.lo == fzero:
        top_ln = iv_ln(_new(a.hi, a.hi, prec))
        hull = iv_exp(iv_mul(p, top_ln))
        return _new(fzero, hull.hi, prec)
    return iv_exp(iv_mul(p, iv_ln(a.at(prec))))
