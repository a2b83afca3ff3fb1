"""JSON/CSV serialization of results.

Every numeric quantity goes out as a pair of decimal strings ``{"lo", "hi"}``
that parse back to the exact binary endpoints at the working precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

from .decomposition import ConvergenceProfile, GapDecomposition
from .inequalities import InequalityVerdict
from .means import Sample
from .numerics import IntervalScalar
from .optimality import AlphaWitness, ConstantWitness, SweepResult

INGESTION_CAVEAT = (
    "decimal inputs are rounded to the nearest binary float at the working precision; "
    "all certificates refer to those represented values"
)


def interval_json(x: IntervalScalar) -> dict:
    lo, hi = x.endpoints_str()
    return {"lo": lo, "hi": hi}


def sample_json(s: Sample) -> list[str]:
    return s.as_strings()


def decomposition_json(d: GapDecomposition) -> dict:
    return {
        "m": d.m,
        "precision_bits": d.precision,
        "terms": [{"k": t.k, **interval_json(t.value)} for t in d.terms],
        "partial_sum": interval_json(d.partial_sum),
        "remainder": interval_json(d.remainder),
        "gap": interval_json(d.gap),
        "residual": interval_json(d.residual),
        "A": interval_json(d.means.A),
        "G": interval_json(d.means.G),
        "identity_certified": d.identity_holds,
    }


def verdict_json(v: InequalityVerdict) -> dict:
    return {
        "inequality_id": v.inequality_id.value,
        "status": v.status.value,
        "lhs": interval_json(v.lhs),
        "rhs": interval_json(v.rhs),
        "tightness": v.tightness,
        "equality_case": v.equality_case.value,
        "precision_bits": v.precision,
    }


def profile_json(p: ConvergenceProfile) -> dict:
    return {
        "status": p.status,
        "rows": [{"m": r.m, "remainder": interval_json(r.remainder), "ratio": r.ratio} for r in p.rows],
    }


def sweep_json(r: SweepResult) -> dict:
    h = r.hypothesis
    return {
        "n": r.n,
        "hypothesis": {"alpha": str(h.alpha), "c_n": str(h.c_n), "variant": h.variant.value},
        "fitted_exponent": r.fitted_exponent,
        "fit_residual": r.fit_residual,
        "leading_coefficient": r.leading_coefficient,
        "expected_coefficient": r.expected_coefficient,
        "table": [
            {"epsilon": repr(e), "lhs": interval_json(a), "rhs": interval_json(b)}
            for e, a, b in zip(r.epsilons, r.lhs_values, r.rhs_values)
        ],
    }


def constant_witness_json(w: ConstantWitness) -> dict:
    return {
        "n": w.n,
        "variant": w.variant.value,
        "sample": sample_json(w.sample),
        "gap": interval_json(w.gap),
        "raw_sum": interval_json(w.raw_sum),
        "ratio": interval_json(w.ratio),
        "implied_bound": str(w.implied_bound),
        "certified_exact": w.certified_exact,
    }


def alpha_witness_json(w: AlphaWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "epsilon": repr(w.epsilon),
        "sample": sample_json(w.sample),
        "lhs": interval_json(w.lhs),
        "rhs": interval_json(w.rhs),
        "precision_bits": w.precision,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def sweep_csv(r: SweepResult) -> str:
    rows = []
    for e, a, b in zip(r.epsilons, r.lhs_values, r.rhs_values):
        rows.append([repr(e), *a.endpoints_str(), *b.endpoints_str()])
    return csv_text(["epsilon", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi"], rows)
