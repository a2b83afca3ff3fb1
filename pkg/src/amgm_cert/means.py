"""Samples of nonnegative reals and enclosures of their arithmetic/geometric means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from mpmath.libmp import fzero

from .errors import InternalContradiction, InvalidSampleError
from .numerics import (
    DEFAULT_PRECISION,
    IntervalScalar,
    iv_div_int,
    iv_exp,
    iv_ln,
    iv_sum,
    to_mpf,
    zero,
)


@dataclass(frozen=True)
class Sample:
    """Ordered nonnegative values ``x_1..x_n``, each held as a point interval.

    Decimal inputs are rounded to the nearest float at the ingestion
    precision; everything downstream certifies statements about those
    represented values, not about the decimal text.
    """

    values: tuple[IntervalScalar, ...]

    def __post_init__(self):
        if not self.values:
            raise InvalidSampleError("a sample needs at least one value")
        for v in self.values:
            if not v.is_point:
                raise InvalidSampleError("sample values must be point intervals")
            if v.lo[0] == 1 and v.lo != fzero:
                raise InvalidSampleError("sample values must be nonnegative")

    @classmethod
    def from_values(cls, values: Iterable, prec: int = DEFAULT_PRECISION) -> "Sample":
        points = []
        for raw in values:
            if isinstance(raw, IntervalScalar):
                points.append(raw.at(prec))
                continue
            try:
                x = to_mpf(raw, prec)
            except (TypeError, ValueError) as exc:
                raise InvalidSampleError(f"bad sample value {raw!r}: {exc}") from None
            if x[0] == 1 and x != fzero:
                raise InvalidSampleError(f"negative sample value {raw!r}")
            if x[2] != 0 and not x[1] and x != fzero:
                raise InvalidSampleError(f"non-finite sample value {raw!r}")
            points.append(IntervalScalar.exact(x, prec))
        return cls(tuple(points))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def prec(self) -> int:
        return self.values[0].prec

    def at(self, prec: int) -> "Sample":
        """Same represented values, new working precision."""
        return Sample(tuple(v.at(prec) for v in self.values))

    @property
    def points(self) -> tuple:
        """Raw mpf values, for exact comparisons."""
        return tuple(v.lo for v in self.values)

    @property
    def has_zero(self) -> bool:
        return any(v.lo == fzero for v in self.values)

    @property
    def all_equal(self) -> bool:
        first = self.values[0].lo
        return all(v.lo == first for v in self.values)

    def zero_count(self) -> int:
        return sum(1 for v in self.values if v.lo == fzero)

    def as_strings(self) -> list[str]:
        return [v.endpoints_str()[0] for v in self.values]


@dataclass(frozen=True)
class MeanPair:
    A: IntervalScalar
    G: IntervalScalar
    has_zero: bool
    all_equal: bool = False

    @property
    def gap(self) -> IntervalScalar:
        """``A - G``; exactly zero when every value is equal."""
        if self.all_equal:
            return zero(self.A.prec)
        return self.A - self.G


def arithmetic_mean(s: Sample) -> IntervalScalar:
    if s.all_equal:
        return s.values[0]
    return iv_div_int(iv_sum(s.values), s.n)


def geometric_mean(s: Sample) -> IntervalScalar:
    """``(x_1 ... x_n)^(1/n)`` evaluated as ``exp(mean(ln x_i))``.

    A zero value short-circuits to ``[0, 0]``; equal values return the common
    value exactly.
    """
    if s.has_zero:
        return zero(s.prec)
    if s.all_equal:
        return s.values[0]
    logs = [iv_ln(v) for v in s.values]
    return iv_exp(iv_div_int(iv_sum(logs), s.n))


def compute_means(s: Sample) -> MeanPair:
    A = arithmetic_mean(s)
    G = geometric_mean(s)
    if A.certainly_lt(G):
        raise InternalContradiction(f"certified A < G for sample {s.as_strings()}: A={A!r}, G={G!r}")
    return MeanPair(A=A, G=G, has_zero=s.has_zero, all_equal=s.all_equal)


def sample_of(values: Sequence, prec: int = DEFAULT_PRECISION) -> Sample:
    """Shorthand for :meth:`Sample.from_values`."""
    return Sample.from_values(values, prec)
