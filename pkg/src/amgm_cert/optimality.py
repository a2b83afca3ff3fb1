"""Why the exponent 2 and the constants 1/n and 1/(n(n-1)) cannot be improved.

The probe sample is ``(1+eps, 1, ..., 1)``: its gap behaves like
``(1/(2n))(1 - 1/n) eps^2`` while the family right side with exponent
``alpha`` behaves like ``eps^alpha``, so any ``alpha < 2`` is beaten for small
``eps``.  Regression here is diagnostic; only endpoint comparisons count as
witnesses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from mpmath.libmp import fone, mpf_add, mpf_cmp

from .errors import ConfigError, DomainError, InconclusiveError
from .means import Sample, compute_means
from .numerics import (
    DEFAULT_CONTEXT,
    DEFAULT_PRECISION,
    IntervalScalar,
    PrecisionContext,
    iv_abs,
    iv_div,
    iv_mul,
    iv_pow,
    iv_sub,
    iv_sum,
    to_mpf,
    zero,
)

Number = Union[int, float, Fraction]

DEFAULT_EPS_HI = 1e-2
DEFAULT_EPS_LO = 1e-4
DEFAULT_POINTS_PER_DECADE = 10
WIDTH_TOL = 1e-12


class Variant(str, enum.Enum):
    DEVIATION_FROM_G = "DEVIATION_FROM_G"
    PAIRWISE = "PAIRWISE"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        key = str(text).strip().lower()
        if key in ("deviation", "deviation_from_g"):
            return cls.DEVIATION_FROM_G
        if key == "pairwise":
            return cls.PAIRWISE
        raise ValueError(f"unknown variant {text!r}")


def optimal_constant(n: int, variant: Variant) -> Fraction:
    if variant is Variant.PAIRWISE:
        return Fraction(1, n * (n - 1))
    return Fraction(1, n)


@dataclass(frozen=True)
class FamilyHypothesis:
    """Candidate inequality ``A - G >= c_n * sum |u^(1/alpha) - v^(1/alpha)|^alpha``."""

    alpha: Number
    c_n: Number
    variant: Variant = Variant.DEVIATION_FROM_G

    def __post_init__(self):
        if not Fraction(self.alpha) > 0:
            raise ValueError("alpha must be positive")
        if not Fraction(self.c_n) > 0:
            raise ValueError("c_n must be positive")

    @classmethod
    def at_optimal_constant(cls, n: int, alpha: Number, variant: Variant = Variant.DEVIATION_FROM_G):
        return cls(alpha, optimal_constant(n, variant), variant)


def epsilon_sample(n: int, eps: Number, prec: int = DEFAULT_PRECISION) -> Sample:
    """``(1+eps, 1, ..., 1)`` with ``eps`` rounded to ``prec`` bits and ``1+eps`` exact."""
    if n < 2:
        raise ValueError("n must be at least 2")
    e = to_mpf(eps, prec)
    if e[0] == 1 and e[1]:
        raise ValueError("eps must be nonnegative")
    first = mpf_add(fone, e)  # exact: no precision argument
    return Sample.from_values([first] + [fone] * (n - 1), prec)


def gap_at_epsilon(n: int, eps: Number, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Enclosure of ``1 + eps/n - (1+eps)^(1/n)``."""
    return compute_means(epsilon_sample(n, eps, prec)).gap


def _abs_pow(d: IntervalScalar, alpha: Fraction) -> IntervalScalar:
    if d.is_zero:
        return d
    return iv_pow(iv_abs(d), alpha)


def family_rhs(s: Sample, h: FamilyHypothesis) -> IntervalScalar:
    """Enclosure of the right side of the candidate inequality ``h`` on ``s``."""
    alpha = Fraction(h.alpha)
    inv = 1 / alpha
    prec = s.prec
    c = IntervalScalar.enclose(Fraction(h.c_n), prec)
    roots = {}
    for v in s.values:
        if v.lo not in roots:
            roots[v.lo] = iv_pow(v, inv)
    keys = [v.lo for v in s.values]
    parts = []
    if h.variant is Variant.PAIRWISE:
        if s.n < 2:
            raise DomainError("pairwise family needs n >= 2")
        for i in range(s.n):
            for j in range(i + 1, s.n):
                if keys[i] != keys[j]:
                    parts.append(_abs_pow(iv_sub(roots[keys[i]], roots[keys[j]]), alpha))
    else:
        G = compute_means(s).G
        g_key = G.lo if G.is_point else None
        g_root = iv_pow(G, inv)
        for key in keys:
            if key != g_key:
                parts.append(_abs_pow(iv_sub(roots[key], g_root), alpha))
    if not parts:
        return zero(prec)
    return iv_mul(c, iv_sum(parts, prec))


def epsilon_grid(eps_hi: float, eps_lo: float, points_per_decade: int) -> list[float]:
    """Strictly decreasing log-spaced grid from ``eps_hi`` down to ``eps_lo``."""
    if not (0 < eps_lo < eps_hi):
        raise ConfigError("need 0 < eps_lo < eps_hi")
    if points_per_decade < 1:
        raise ConfigError("points_per_decade must be at least 1")
    decades = math.log10(eps_hi / eps_lo)
    if decades < 1 - 1e-9:
        raise ConfigError(f"grid spans {decades:.3g} decades; at least one is required")
    count = max(1, round(decades * points_per_decade))
    grid = [eps_hi * 10.0 ** (-j * decades / count) for j in range(count + 1)]
    grid[0], grid[-1] = float(eps_hi), float(eps_lo)
    return grid


@dataclass(frozen=True)
class SweepResult:
    n: int
    epsilons: tuple[float, ...]
    lhs_values: tuple[IntervalScalar, ...]
    rhs_values: tuple[IntervalScalar, ...]
    fitted_exponent: float
    fit_residual: float
    leading_coefficient: float
    hypothesis: FamilyHypothesis = field(repr=False, default=None)

    @property
    def expected_coefficient(self) -> float:
        return (1 - 1 / self.n) / (2 * self.n)


def fit_power_law(eps: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares line through ``(log eps, log value)``.

    Returns ``(slope, intercept, max_abs_log_residual)``.
    """
    x = np.log(np.asarray(eps, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return float(slope), float(intercept), resid


def quadratic_coefficient(eps: Sequence[float], values: Sequence[float]) -> float:
    """Limit of ``value / eps^2`` as ``eps -> 0``, from a line fit in ``eps``."""
    e = np.asarray(eps, dtype=float)
    q = np.asarray(values, dtype=float) / e**2
    _, c0 = np.polyfit(e, q, 1)
    return float(c0)


def sweep(
    n: int,
    eps_hi: float = DEFAULT_EPS_HI,
    eps_lo: float = DEFAULT_EPS_LO,
    points_per_decade: int = DEFAULT_POINTS_PER_DECADE,
    hypothesis: Optional[FamilyHypothesis] = None,
    prec: int = DEFAULT_PRECISION,
) -> SweepResult:
    """Gap and family right side over a log grid of ``eps``, plus the log-log fit."""
    if n < 2:
        raise ConfigError("sweep needs n >= 2")
    if not (0 < eps_lo < eps_hi <= 0.1):
        raise ConfigError("need 0 < eps_lo < eps_hi <= 0.1")
    grid = epsilon_grid(eps_hi, eps_lo, points_per_decade)
    h = hypothesis or FamilyHypothesis.at_optimal_constant(n, 2)
    lhs, rhs = [], []
    for eps in grid:
        s = epsilon_sample(n, eps, prec)
        lhs.append(compute_means(s).gap)
        rhs.append(family_rhs(s, h))
    mids = [g.midpoint for g in lhs]
    slope, _, resid = fit_power_law(grid, mids)
    return SweepResult(
        n=n,
        epsilons=tuple(grid),
        lhs_values=tuple(lhs),
        rhs_values=tuple(rhs),
        fitted_exponent=slope,
        fit_residual=resid,
        leading_coefficient=quadratic_coefficient(grid, mids),
        hypothesis=h,
    )


@dataclass(frozen=True)
class AlphaWitness:
    """A certified counterexample: ``rhs.lo > lhs.hi`` on ``sample``."""

    n: int
    epsilon: float
    sample: Sample
    lhs: IntervalScalar
    rhs: IntervalScalar
    hypothesis: FamilyHypothesis
    precision: int


def default_falsification_grid() -> list[float]:
    return epsilon_grid(1e-1, 1e-8, 4)


def falsify_alpha(
    n: int,
    h: FamilyHypothesis,
    eps_grid: Optional[Sequence[float]] = None,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> Optional[AlphaWitness]:
    """Search the ``eps`` grid for a certified violation of ``h``.

    Returns the first witness found (largest ``eps``), or None when every grid
    point is either certified to satisfy ``h`` or agrees with it to within
    the interval widths.  Overlaps wider than a relative 1e-12 trigger
    precision escalation and finally :class:`InconclusiveError`.
    """
    grid = list(eps_grid) if eps_grid is not None else default_falsification_grid()
    if any(not e > 0 for e in grid):
        raise ConfigError("every grid epsilon must be positive")
    pending = grid
    for prec in ctx.precisions():
        wide = []
        for eps in pending:
            s = epsilon_sample(n, eps, prec)
            lhs = compute_means(s).gap
            rhs = family_rhs(s, h)
            if rhs.certainly_gt(lhs):
                return AlphaWitness(n, float(eps), s, lhs, rhs, h, prec)
            if lhs.intersects(rhs):
                scale = max(abs(lhs.midpoint), abs(rhs.midpoint))
                if max(lhs.width_float, rhs.width_float) > WIDTH_TOL * scale:
                    wide.append(eps)
        if not wide:
            return None
        pending = wide
    raise InconclusiveError(f"{len(pending)} grid points undecided after escalation", pending)


@dataclass(frozen=True)
class ConstantWitness:
    """The sample ``(1, 0, ..., 0)`` and what it says about the constant."""

    n: int
    variant: Variant
    sample: Sample
    gap: IntervalScalar
    raw_sum: IntervalScalar
    ratio: IntervalScalar
    implied_bound: Fraction

    @property
    def certified_exact(self) -> bool:
        """Gap encloses ``1/n`` exactly, the raw sum is the exact integer, the ratio hits the bound."""
        expected_raw = 1 if self.variant is Variant.DEVIATION_FROM_G else self.n - 1
        return (
            self.gap.contains(Fraction(1, self.n))
            and self.raw_sum.is_point
            and self.raw_sum.contains(expected_raw)
            and self.ratio.contains(self.implied_bound)
        )


def constant_witness(n: int, variant: Variant = Variant.DEVIATION_FROM_G, prec: int = DEFAULT_PRECISION):
    if n < 2:
        raise ValueError("n must be at least 2")
    s = Sample.from_values([1] + [0] * (n - 1), prec)
    gap = compute_means(s).gap
    raw = family_rhs(s, FamilyHypothesis(2, 1, variant))
    return ConstantWitness(
        n=n,
        variant=variant,
        sample=s,
        gap=gap,
        raw_sum=raw,
        ratio=iv_div(gap, raw),
        implied_bound=optimal_constant(n, variant),
    )


class PairStatus(str, enum.Enum):
    CERTIFIED_NONINCREASING = "CERTIFIED_NONINCREASING"
    INCONCLUSIVE = "INCONCLUSIVE"
    VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class MonotonicityReport:
    x: float
    y: float
    t_grid: tuple[float, ...]
    values: tuple[IntervalScalar, ...]
    pair_status: tuple[PairStatus, ...]
    escalations: tuple[int, ...]

    @property
    def all_certified(self) -> bool:
        return all(p is PairStatus.CERTIFIED_NONINCREASING for p in self.pair_status)

    @property
    def max_escalations_used(self) -> int:
        return max(self.escalations, default=0)


def h_value(x: Number, y: Number, t: Number, prec: int = DEFAULT_PRECISION) -> IntervalScalar:
    """Enclosure of ``(x^(1/t) - y^(1/t))^t`` for ``x > y > 0``."""
    tf = Fraction(t)
    if tf <= 0:
        raise DomainError("t must be positive")
    X = IntervalScalar.exact(to_mpf(x, prec), prec)
    Y = IntervalScalar.exact(to_mpf(y, prec), prec)
    d = iv_sub(iv_pow(X, 1 / tf), iv_pow(Y, 1 / tf))
    if d.lo[0] == 1:
        # x > y, so the true difference is positive
        d = IntervalScalar(0, d.hi, prec) if d.hi[0] == 0 else d
    return iv_pow(d, tf)


def h_monotonicity(
    x: Number, y: Number, t_grid: Sequence[Number], ctx: PrecisionContext = DEFAULT_CONTEXT
) -> MonotonicityReport:
    """Certify ``h(t_i) >= h(t_{i+1})`` for each consecutive pair of the grid."""
    xm, ym = to_mpf(x, ctx.working_precision), to_mpf(y, ctx.working_precision)
    if not (mpf_cmp(xm, ym) > 0 and ym[0] == 0 and ym[1]):
        raise DomainError("need x > y > 0")
    ts = list(t_grid)
    if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("t grid must be positive and strictly increasing")
    precs = list(ctx.precisions())
    cache = {}

    def h_at(i, level):
        key = (i, level)
        if key not in cache:
            cache[key] = h_value(xm, ym, ts[i], precs[level])
        return cache[key]

    statuses, escalations = [], []
    for i in range(len(ts) - 1):
        status = PairStatus.INCONCLUSIVE
        used = 0
        for level in range(len(precs)):
            a, b = h_at(i, level), h_at(i + 1, level)
            used = level
            if mpf_cmp(a.lo, b.hi) >= 0:
                status = PairStatus.CERTIFIED_NONINCREASING
                break
            if a.certainly_lt(b):
                status = PairStatus.VIOLATED
                break
        statuses.append(status)
        escalations.append(used)
    values = tuple(h_at(i, 0) for i in range(len(ts)))
    return MonotonicityReport(
        x=float(x) if not isinstance(x, tuple) else float("nan"),
        y=float(y) if not isinstance(y, tuple) else float("nan"),
        t_grid=tuple(float(t) for t in ts),
        values=values,
        pair_status=tuple(statuses),
        escalations=tuple(escalations),
    )
