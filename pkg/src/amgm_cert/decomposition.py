"""Sum-of-squares series for the gap ``A - G`` and its exact closed-form remainder.

For ``t = 1/2^k`` the k-th term is

    y_k = 2^(k-1) * G^(1 - 2t) * (1/n) * sum_i (x_i^t - G^t)^2

and after ``m`` terms what is left over is exactly

    R_m = 2^m * G^(1 - 1/2^m) * (mean_i x_i^(1/2^m) - G^(1/2^m)),

so ``A - G = y_1 + ... + y_m + R_m`` holds for every ``m``.  Truncation uses
``R_m`` directly; there is no heuristic tail bound anywhere.

When ``G = 0`` we take ``G^0 = 1``, which makes ``y_1 = A`` and every later
term and remainder zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from mpmath.libmp import mpf_cmp, mpf_div, to_float

from .errors import DepthCapExceeded, InconclusiveError
from .means import MeanPair, Sample, compute_means
from .numerics import (
    DEFAULT_CONTEXT,
    IntervalScalar,
    PrecisionContext,
    iv_div,
    iv_div_int,
    iv_mul,
    iv_scale_pow2,
    iv_sqrt,
    iv_square,
    iv_sub,
    iv_sum,
    one,
    zero,
)

DEFAULT_DEPTH_CAP = 64
DEFAULT_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class SeriesTerm:
    k: int
    value: IntervalScalar


@dataclass(frozen=True)
class GapDecomposition:
    """Terms ``y_1..y_m``, their sum ``Y_m``, the remainder ``R_m`` and ``A - G``.

    ``residual`` is ``gap - partial_sum - remainder`` evaluated in interval
    arithmetic; the identity is certified when it contains zero.
    ``remainders`` keeps ``R_0..R_m`` from the same evaluation.
    """

    m: int
    terms: tuple[SeriesTerm, ...]
    partial_sum: IntervalScalar
    remainder: IntervalScalar
    gap: IntervalScalar
    residual: IntervalScalar
    means: MeanPair
    remainders: tuple[IntervalScalar, ...] = field(repr=False, default=())
    precision: int = 128

    @property
    def identity_holds(self) -> bool:
        return self.residual.contains_zero()

    def prefix(self, m: int) -> "GapDecomposition":
        """The depth-``m`` decomposition, reusing this evaluation."""
        if not 1 <= m <= self.m:
            raise ValueError(f"prefix depth must lie in [1, {self.m}]")
        terms = self.terms[:m]
        partial = iv_sum([t.value for t in terms], self.precision)
        rem = self.remainders[m]
        residual = iv_sub(iv_sub(self.gap, partial), rem)
        return GapDecomposition(
            m=m,
            terms=terms,
            partial_sum=partial,
            remainder=rem,
            gap=self.gap,
            residual=residual,
            means=self.means,
            remainders=self.remainders[: m + 1],
            precision=self.precision,
        )


class RootTable:
    """Nested square roots ``v^(1/2^k)`` of every distinct sample value and of ``G``.

    Chains grow on demand so a single table serves every depth.
    """

    def __init__(self, s: Sample, mp: Optional[MeanPair] = None):
        self.sample = s
        self.means = mp if mp is not None else compute_means(s)
        self.prec = s.prec
        self._chains: dict = {}
        self.x_keys = [v.lo for v in s.values]
        for v in s.values:
            self._chains.setdefault(v.lo, [v])
        self.g_chain = [self.means.G.at(self.prec)]
        # G coincides with a sample value only when that value is exact (all equal)
        self.g_key = self.means.G.lo if self.means.G.is_point else None

    def _extend(self, chain: list, k: int) -> None:
        while len(chain) <= k:
            chain.append(iv_sqrt(chain[-1]))

    def x_root(self, key, k: int) -> IntervalScalar:
        chain = self._chains[key]
        self._extend(chain, k)
        return chain[k]

    def g_root(self, k: int) -> IntervalScalar:
        self._extend(self.g_chain, k)
        return self.g_chain[k]

    def g_power_complement(self, k: int) -> IntervalScalar:
        """``G^(1 - 1/2^k)``, with the ``k = 0`` case equal to 1."""
        if k == 0:
            return one(self.prec)
        return iv_div(self.means.G, self.g_root(k))

    def term(self, k: int) -> IntervalScalar:
        if k < 1:
            raise ValueError("series terms start at k = 1")
        mp = self.means
        n = self.sample.n
        if mp.has_zero:
            return mp.A if k == 1 else zero(self.prec)
        gk = self.g_root(k)
        squares = []
        for key in self.x_keys:
            if key == self.g_key:
                continue
            squares.append(iv_square(iv_sub(self.x_root(key, k), gk)))
        if not squares:
            return zero(self.prec)
        dev = iv_div_int(iv_sum(squares, self.prec), n)
        factor = iv_scale_pow2(self.g_power_complement(k - 1), k - 1)
        return iv_mul(factor, dev)

    def remainder(self, m: int) -> IntervalScalar:
        if m < 0:
            raise ValueError("remainder depth must be nonnegative")
        mp = self.means
        if m == 0:
            return mp.gap
        if mp.has_zero or mp.all_equal:
            return zero(self.prec)
        n = self.sample.n
        root_mean = iv_div_int(iv_sum([self.x_root(key, m) for key in self.x_keys], self.prec), n)
        diff = iv_sub(root_mean, self.g_root(m))
        return iv_scale_pow2(iv_mul(self.g_power_complement(m), diff), m)


def series_term(s: Sample, mp: Optional[MeanPair], k: int) -> SeriesTerm:
    """Enclosure of the k-th term ``y_k`` of the gap series."""
    return SeriesTerm(k, RootTable(s, mp).term(k))


def remainder(s: Sample, mp: Optional[MeanPair], m: int) -> IntervalScalar:
    """Enclosure of ``R_m``; ``m = 0`` gives ``A - G``."""
    return RootTable(s, mp).remainder(m)


def _build(table: RootTable, m: int) -> GapDecomposition:
    terms = tuple(SeriesTerm(k, table.term(k)) for k in range(1, m + 1))
    remainders = tuple(table.remainder(j) for j in range(m + 1))
    gap = remainders[0]
    partial = iv_sum([t.value for t in terms], table.prec)
    residual = iv_sub(iv_sub(gap, partial), remainders[m])
    return GapDecomposition(
        m=m,
        terms=terms,
        partial_sum=partial,
        remainder=remainders[m],
        gap=gap,
        residual=residual,
        means=table.means,
        remainders=remainders,
        precision=table.prec,
    )


def _residual_ok(d: GapDecomposition, rel_tol: float) -> bool:
    if not d.residual.contains_zero():
        return False
    scale = max(1.0, d.means.A.hi_float)
    return d.residual.width_float <= rel_tol * scale


def decompose(
    s: Sample,
    m: int,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> GapDecomposition:
    """Depth-``m`` decomposition with the identity certified.

    The residual must contain zero and have width at most
    ``residual_tol * max(1, A)``; otherwise precision escalates per ``ctx``.
    """
    if m < 1:
        raise ValueError("decompose needs m >= 1")
    last = None
    for prec in ctx.precisions():
        table = RootTable(s.at(max(prec, s.prec)))
        last = _build(table, m)
        if _residual_ok(last, residual_tol):
            return last
    raise InconclusiveError(
        f"residual {last.residual!r} not certified after {ctx.max_escalations} escalations", last
    )


def decompose_to_tolerance(
    s: Sample,
    tol: float,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> GapDecomposition:
    """Smallest-depth decomposition whose remainder upper bound is at most ``tol``."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    tol_iv = IntervalScalar.enclose(tol)
    last_rem = None
    last = None
    for prec in ctx.precisions():
        table = RootTable(s.at(max(prec, s.prec)))
        chosen = None
        for m in range(1, depth_cap + 1):
            last_rem = table.remainder(m)
            if mpf_cmp(last_rem.hi, tol_iv.lo) <= 0:
                chosen = m
                break
        if chosen is None:
            if mpf_cmp(last_rem.mid, tol_iv.lo) > 0:
                raise DepthCapExceeded(
                    f"remainder {last_rem!r} still above {tol} at depth cap {depth_cap}", last_rem
                )
            continue
        last = _build(table, chosen)
        if _residual_ok(last, residual_tol):
            return last
    raise InconclusiveError(
        f"could not certify a depth for tolerance {tol} after {ctx.max_escalations} escalations",
        last if last is not None else last_rem,
    )


@dataclass(frozen=True)
class ProfileRow:
    m: int
    remainder: IntervalScalar
    ratio: float  # midpoint of R_{m+1} / R_m


@dataclass(frozen=True)
class ConvergenceProfile:
    rows: tuple[ProfileRow, ...]
    status: str

    @property
    def degenerate(self) -> bool:
        return not self.rows


def convergence_profile(
    s: Sample, m_max: int, ctx: PrecisionContext = DEFAULT_CONTEXT
) -> ConvergenceProfile:
    """Remainders ``R_1..R_m_max`` and the successive ratios ``R_{m+1}/R_m``.

    Ratios come from interval midpoints and are diagnostic only.
    """
    if m_max < 1:
        raise ValueError("m_max must be positive")
    s = s.at(max(ctx.working_precision, s.prec))
    mp = compute_means(s)
    if mp.has_zero:
        return ConvergenceProfile((), "degenerate: geometric mean is zero, every remainder vanishes")
    if mp.all_equal:
        return ConvergenceProfile((), "degenerate: all values equal, every remainder vanishes")
    table = RootTable(s, mp)
    rems = [table.remainder(m) for m in range(1, m_max + 2)]
    rows = []
    for m in range(1, m_max + 1):
        here, nxt = rems[m - 1].mid, rems[m].mid
        ratio = to_float(mpf_div(nxt, here, 64, "n")) if here[1] else float("nan")
        rows.append(ProfileRow(m, rems[m - 1], ratio))
    return ConvergenceProfile(tuple(rows), "ok")
