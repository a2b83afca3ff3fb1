"""Certified checks of the strengthened AM-GM inequalities and their equality cases.

Each checker returns an :class:`InequalityVerdict` comparing interval
enclosures of the two sides of ``lhs >= rhs``.  Whether equality is
*expected* comes from :func:`classify_equality`, which compares the ingested
values exactly; the status then records what the enclosures certify.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

from mpmath.libmp import fzero, mpf_div, mpf_mul, to_float

from .decomposition import RootTable
from .errors import NotApplicableError
from .means import Sample, compute_means
from .numerics import (
    DEFAULT_CONTEXT,
    IntervalScalar,
    PrecisionContext,
    iv_add,
    iv_div_int,
    iv_mul,
    iv_sqrt,
    iv_square,
    iv_sub,
    iv_sum,
    zero,
)

DEFAULT_CHECK_TOL = 1e-12


class InequalityId(str, enum.Enum):
    CAUCHY_1_1 = "CAUCHY_1_1"
    STRONG_2_6 = "STRONG_2_6"
    STRONG_2_7 = "STRONG_2_7"
    PAIRWISE_3_1 = "PAIRWISE_3_1"
    PRODUCT_3_2 = "PRODUCT_3_2"


class Status(str, enum.Enum):
    CERTIFIED_STRICT = "CERTIFIED_STRICT"
    CERTIFIED_EQUALITY = "CERTIFIED_EQUALITY"
    HOLDS_WITHIN_TOLERANCE = "HOLDS_WITHIN_TOLERANCE"
    INCONCLUSIVE = "INCONCLUSIVE"
    VIOLATED = "VIOLATED"


class EqualityCase(str, enum.Enum):
    N_EQUALS_2 = "N_EQUALS_2"
    ALL_EQUAL = "ALL_EQUAL"
    ALL_BUT_ONE_ZERO = "ALL_BUT_ONE_ZERO"
    SOME_ZERO = "SOME_ZERO"
    NONE = "NONE"


# first match wins, in this order
_PRECEDENCE = (
    EqualityCase.N_EQUALS_2,
    EqualityCase.ALL_EQUAL,
    EqualityCase.ALL_BUT_ONE_ZERO,
    EqualityCase.SOME_ZERO,
)

_ZERO_OR_EQUAL = frozenset({EqualityCase.ALL_EQUAL, EqualityCase.ALL_BUT_ONE_ZERO, EqualityCase.SOME_ZERO})
_PAIRWISE_CASES = frozenset({EqualityCase.N_EQUALS_2, EqualityCase.ALL_EQUAL, EqualityCase.ALL_BUT_ONE_ZERO})

EQUALITY_CASES = {
    InequalityId.CAUCHY_1_1: frozenset({EqualityCase.ALL_EQUAL}),
    InequalityId.STRONG_2_6: _ZERO_OR_EQUAL,
    InequalityId.STRONG_2_7: _ZERO_OR_EQUAL,
    InequalityId.PAIRWISE_3_1: _PAIRWISE_CASES,
    InequalityId.PRODUCT_3_2: _PAIRWISE_CASES,
}


@dataclass(frozen=True)
class InequalityVerdict:
    inequality_id: InequalityId
    lhs: IntervalScalar
    rhs: IntervalScalar
    status: Status
    tightness: float
    equality_case: EqualityCase = EqualityCase.NONE
    precision: int = 128


def _matches(case: EqualityCase, s: Sample) -> bool:
    if case is EqualityCase.N_EQUALS_2:
        return s.n == 2
    if case is EqualityCase.ALL_EQUAL:
        return s.all_equal
    zeros = s.zero_count()
    if case is EqualityCase.ALL_BUT_ONE_ZERO:
        return s.n >= 2 and zeros == s.n - 1
    if case is EqualityCase.SOME_ZERO:
        return zeros >= 1
    return False


def classify_equality(s: Sample, inequality_id: InequalityId) -> EqualityCase:
    """Equality case predicted for ``inequality_id`` on ``s``, by exact comparison."""
    allowed = EQUALITY_CASES[InequalityId(inequality_id)]
    for case in _PRECEDENCE:
        if case in allowed and _matches(case, s):
            return case
    return EqualityCase.NONE


def tightness_ratio(lhs: IntervalScalar, rhs: IntervalScalar) -> float:
    """``rhs / lhs`` on midpoints, with ``0/0`` read as 1."""
    num, den = rhs.mid, lhs.mid
    if den == fzero:
        return 1.0 if num == fzero else float("inf")
    return to_float(mpf_div(num, den, 64, "n"))


def _status(lhs: IntervalScalar, rhs: IntervalScalar, predicted: EqualityCase) -> Optional[Status]:
    """Status from one evaluation, or None when a higher precision might decide."""
    if lhs.certainly_lt(rhs):
        return Status.VIOLATED
    if predicted is not EqualityCase.NONE:
        return Status.CERTIFIED_EQUALITY if lhs.intersects(rhs) else Status.CERTIFIED_STRICT
    if lhs.certainly_gt(rhs):
        return Status.CERTIFIED_STRICT
    if lhs.is_point and lhs.same_as(rhs):
        return Status.CERTIFIED_EQUALITY
    return None


class _Evaluation:
    """Per-precision cache so the checkers share means, roots and the root table."""

    def __init__(self, s: Sample):
        self.s = s
        self._means = None
        self._table = None
        self._roots = None

    @property
    def means(self):
        if self._means is None:
            self._means = compute_means(self.s)
        return self._means

    @property
    def table(self) -> RootTable:
        if self._table is None:
            self._table = RootTable(self.s, self.means)
        return self._table

    @property
    def sqrt_by_value(self) -> dict:
        if self._roots is None:
            self._roots = {}
            for v in self.s.values:
                if v.lo not in self._roots:
                    self._roots[v.lo] = iv_sqrt(v)
        return self._roots


def _certify(
    inequality_id: InequalityId,
    s: Sample,
    sides: Callable[[_Evaluation], tuple[IntervalScalar, IntervalScalar]],
    ctx: PrecisionContext,
    tol: float,
    cache: Optional[dict] = None,
) -> InequalityVerdict:
    predicted = classify_equality(s, inequality_id)
    cache = {} if cache is None else cache
    lhs = rhs = None
    prec = s.prec
    for prec in ctx.precisions():
        prec = max(prec, s.prec)
        if prec not in cache:
            cache[prec] = _Evaluation(s.at(prec))
        lhs, rhs = sides(cache[prec])
        status = _status(lhs, rhs, predicted)
        if status is not None:
            break
    else:
        scale = max(1.0, abs(lhs.midpoint))
        if max(lhs.width_float, rhs.width_float) <= tol * scale:
            status = Status.HOLDS_WITHIN_TOLERANCE
        else:
            status = Status.INCONCLUSIVE
    return InequalityVerdict(
        inequality_id=inequality_id,
        lhs=lhs,
        rhs=rhs,
        status=status,
        tightness=tightness_ratio(lhs, rhs),
        equality_case=predicted,
        precision=prec,
    )


def _cauchy_sides(ev: _Evaluation):
    return ev.means.A, ev.means.G


def _strong_v1_sides(ev: _Evaluation):
    return ev.means.gap, ev.table.term(1)


def _strong_v2_sides(ev: _Evaluation):
    return ev.means.gap, iv_add(ev.table.term(1), ev.table.term(2))


def _pairwise_rhs(ev: _Evaluation) -> IntervalScalar:
    s = ev.s
    roots = ev.sqrt_by_value
    keys = [v.lo for v in s.values]
    squares = []
    for i in range(s.n):
        for j in range(i + 1, s.n):
            if keys[i] == keys[j]:
                continue
            squares.append(iv_square(iv_sub(roots[keys[i]], roots[keys[j]])))
    if not squares:
        return zero(s.prec)
    return iv_div_int(iv_sum(squares, s.prec), s.n * (s.n - 1))


def _pairwise_sides(ev: _Evaluation):
    return ev.means.gap, _pairwise_rhs(ev)


def _product_sides(ev: _Evaluation):
    s = ev.s
    terms = []
    pts = s.points
    for i in range(s.n):
        for j in range(i + 1, s.n):
            # exact product, then a single correctly rounded square root
            prod = mpf_mul(pts[i], pts[j])
            terms.append(iv_sqrt(IntervalScalar.exact(prod, s.prec)))
    lhs = iv_sum(terms, s.prec)
    pairs = s.n * (s.n - 1) // 2
    rhs = iv_mul(IntervalScalar.exact(pairs, s.prec), ev.means.G)
    return lhs, rhs


def _need_pairs(s: Sample, name: str) -> None:
    if s.n < 2:
        raise NotApplicableError(f"{name} needs at least two values, got n={s.n}")


def check_cauchy(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL, cache=None):
    """Plain ``A >= G``."""
    return _certify(InequalityId.CAUCHY_1_1, s, _cauchy_sides, ctx, tol, cache)


def check_strong_v1(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL, cache=None):
    """``A - G >= (1/n) * sum (sqrt(x_i) - sqrt(G))^2``, i.e. ``A - G >= y_1``."""
    return _certify(InequalityId.STRONG_2_6, s, _strong_v1_sides, ctx, tol, cache)


def check_strong_v2(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL, cache=None):
    """``A - G >= y_1 + y_2``."""
    return _certify(InequalityId.STRONG_2_7, s, _strong_v2_sides, ctx, tol, cache)


def check_pairwise(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL, cache=None):
    """``A - G >= 1/(n(n-1)) * sum_{i<j} (sqrt(x_i) - sqrt(x_j))^2``."""
    _need_pairs(s, "pairwise check")
    return _certify(InequalityId.PAIRWISE_3_1, s, _pairwise_sides, ctx, tol, cache)


def check_product_form(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL, cache=None):
    """``sum_{i<j} sqrt(x_i x_j) >= n(n-1)/2 * G``; same statement as the pairwise check."""
    _need_pairs(s, "product-form check")
    return _certify(InequalityId.PRODUCT_3_2, s, _product_sides, ctx, tol, cache)


CHECKERS = {
    InequalityId.CAUCHY_1_1: check_cauchy,
    InequalityId.STRONG_2_6: check_strong_v1,
    InequalityId.STRONG_2_7: check_strong_v2,
    InequalityId.PAIRWISE_3_1: check_pairwise,
    InequalityId.PRODUCT_3_2: check_product_form,
}


def check_all(s: Sample, ctx: PrecisionContext = DEFAULT_CONTEXT, tol: float = DEFAULT_CHECK_TOL):
    """Every applicable checker, in a fixed order (pairwise ones skipped for n = 1)."""
    out = []
    cache: dict = {}
    for ineq, fn in CHECKERS.items():
        if s.n < 2 and ineq in (InequalityId.PAIRWISE_3_1, InequalityId.PRODUCT_3_2):
            continue
        out.append(fn(s, ctx, tol, cache))
    return out


def strength_ordering_certified(s: Sample) -> bool:
    """``Y_1 <= Y_2 <= A - G`` with no certified reversal at interval level.

    ``Y_2 - Y_1 = y_2`` must have a nonnegative lower endpoint and the closed
    form remainder ``R_2 = A - G - Y_2`` must not be certified negative.
    """
    table = RootTable(s)
    y1, y2 = table.term(1), table.term(2)
    Y2 = iv_add(y1, y2)
    gap = table.means.gap
    if y2.lo[0] == 1 and y2.lo != fzero:
        return False
    if Y2.certainly_gt(gap) or y1.certainly_gt(Y2):
        return False
    return table.remainder(2).hi[0] == 0
