"""Command-line front end: ``amgm-cert {decompose,check,sweep,witness,profile}``.

Exit codes: 0 all certified as expected, 2 inconclusive, 3 input/config
error, 4 certified violation of a proven inequality (a defect).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .decomposition import DEFAULT_DEPTH_CAP, convergence_profile, decompose_to_tolerance
from .errors import (
    CertificationError,
    ConfigError,
    DepthCapExceeded,
    InconclusiveError,
    InternalContradiction,
    InvalidSampleError,
    NotApplicableError,
)
from .inequalities import Status, check_all
from .means import Sample
from .numerics import DEFAULT_PRECISION, PrecisionContext
from .optimality import (
    DEFAULT_EPS_HI,
    DEFAULT_EPS_LO,
    DEFAULT_POINTS_PER_DECADE,
    FamilyHypothesis,
    Variant,
    constant_witness,
    epsilon_grid,
    falsify_alpha,
    sweep,
)
from . import report as rpt

log = logging.getLogger("amgm_cert")

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_VIOLATION = 4

PRECISION_ENV = "AMGM_PRECISION_BITS"
COMMANDS = ("decompose", "check", "sweep", "witness", "profile")


@dataclass
class RunConfig:
    command: str
    samples: list = field(default_factory=list)
    input_path: Optional[str] = None
    tolerance: float = 1e-12
    precision_bits: int = DEFAULT_PRECISION
    output_format: str = "json"
    seed: int = 0
    depth_cap: int = DEFAULT_DEPTH_CAP
    grid: tuple = (DEFAULT_EPS_LO, DEFAULT_EPS_HI, DEFAULT_POINTS_PER_DECADE)
    variant: Variant = Variant.DEVIATION_FROM_G
    alpha: Optional[Fraction] = None
    n: Optional[int] = None
    m_max: int = 20

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.precision_bits < 53:
            raise ConfigError("precision must be at least 53 bits")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "input_path": self.input_path,
            "tolerance": repr(self.tolerance),
            "precision_bits": self.precision_bits,
            "format": self.output_format,
            "seed": self.seed,
            "depth_cap": self.depth_cap,
            "grid": {"eps_lo": repr(self.grid[0]), "eps_hi": repr(self.grid[1]), "per_decade": self.grid[2]},
            "variant": self.variant.value,
            "alpha": None if self.alpha is None else str(self.alpha),
            "n": self.n,
            "m_max": self.m_max,
        }


# -- input parsing ----------------------------------------------------------


def _as_samples(obj) -> list[list]:
    if isinstance(obj, dict):
        results = obj.get("results")
        if not isinstance(results, list):
            raise InvalidSampleError("json object input must be a report with a 'results' list")
        return [r["sample"] for r in results if isinstance(r, dict) and "sample" in r]
    if not isinstance(obj, list) or not obj:
        raise InvalidSampleError("expected a non-empty list of values")
    if all(isinstance(v, list) for v in obj):
        return [list(v) for v in obj]
    if any(isinstance(v, (list, dict)) for v in obj):
        raise InvalidSampleError("mixed nesting in sample list")
    return [list(obj)]


def parse_inline(text: str) -> list[list]:
    """``"[1,4]"``, ``"[[1,4],[3,3,3]]"`` or ``"1,4"``; numbers stay decimal strings."""
    text = text.strip()
    if text.startswith("[") or text.startswith("{"):
        try:
            obj = json.loads(text, parse_float=str, parse_int=str)
        except json.JSONDecodeError as exc:
            raise InvalidSampleError(f"malformed sample list: {exc}") from None
        return _as_samples(obj)
    tokens = [t.strip() for t in text.split(",")]
    if not tokens or any(not t for t in tokens):
        raise InvalidSampleError(f"malformed sample list: {text!r}")
    return [tokens]


def read_input_file(path: str) -> list[list]:
    """JSON array-of-arrays, a previous json report, or one comma-separated sample per line."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidSampleError(f"cannot read {path}: {exc}") from None
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        return parse_inline(stripped)
    samples = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            samples.extend(parse_inline(line))
    if not samples:
        raise InvalidSampleError(f"{path} holds no samples")
    return samples


def random_samples(count: int, seed: int, n: Optional[int] = None, zero_rate: float = 0.1) -> list[list]:
    """Log-uniform values in [1e-6, 1e6] with occasional injected zeros."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        size = n if n is not None else rng.randint(1, 16)
        vals = [0.0 if rng.random() < zero_rate else 10.0 ** rng.uniform(-6, 6) for _ in range(size)]
        out.append(vals)
    return out


def _parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--grid expects lo:hi:per-decade")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"bad --grid value {text!r}") from None


def _default_precision() -> int:
    env = os.environ.get(PRECISION_ENV)
    if env is None:
        return DEFAULT_PRECISION
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{PRECISION_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("values", nargs="?", help='inline sample(s), e.g. "[1,4]" or "[[1,4],[3,3,3]]"')
    common.add_argument("--input", dest="input_path", help="sample file (json, report json, or csv lines)")
    common.add_argument("--random", type=int, default=None, metavar="COUNT", help="generate COUNT random samples")
    common.add_argument("--tol", type=float, default=1e-12, help="remainder tolerance for decompose")
    common.add_argument("--precision", type=int, default=None, help=f"working precision bits (env {PRECISION_ENV})")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--depth-cap", type=int, default=DEFAULT_DEPTH_CAP)
    common.add_argument("--grid", default=None, help="eps grid lo:hi:per-decade")
    common.add_argument("--variant", choices=("deviation", "pairwise"), default="deviation")
    common.add_argument("--alpha", default=None, help="exponent of the candidate family")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", type=int, default=None, help="sample size for sweep/witness/--random")
    common.add_argument("--m-max", type=int, default=20, help="deepest remainder for profile")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="amgm-cert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("decompose", parents=[common], help="series decomposition of A - G to a tolerance")
    sub.add_parser("check", parents=[common], help="certify the strengthened inequalities")
    sub.add_parser("sweep", parents=[common], help="eps sweep of the gap with log-log fit")
    sub.add_parser("witness", parents=[common], help="optimal-constant witness and alpha falsification")
    sub.add_parser("profile", parents=[common], help="remainder convergence profile")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    prec = args.precision if args.precision is not None else _default_precision()
    alpha = None
    if args.alpha is not None:
        try:
            alpha = Fraction(args.alpha)
        except ValueError:
            raise ConfigError(f"bad --alpha {args.alpha!r}") from None
        if alpha <= 0:
            raise ConfigError("--alpha must be positive")
    grid = _parse_grid(args.grid) if args.grid else RunConfig.__dataclass_fields__["grid"].default
    samples: list = []
    if args.values:
        samples.extend(parse_inline(args.values))
    if args.input_path:
        samples.extend(read_input_file(args.input_path))
    if args.random:
        samples.extend(random_samples(args.random, args.seed, args.n))
    if args.command in ("decompose", "check", "profile") and not samples:
        raise InvalidSampleError("no samples given (inline, --input, or --random)")
    return RunConfig(
        command=args.command,
        samples=samples,
        input_path=args.input_path,
        tolerance=args.tol,
        precision_bits=prec,
        output_format=args.output_format,
        seed=args.seed,
        depth_cap=args.depth_cap,
        grid=grid,
        variant=Variant.parse(args.variant),
        alpha=alpha,
        n=args.n,
        m_max=args.m_max,
    )


def _ingest(cfg: RunConfig) -> list[Sample]:
    return [Sample.from_values(vals, cfg.precision_bits) for vals in cfg.samples]


# -- commands ---------------------------------------------------------------


def cmd_decompose(cfg: RunConfig) -> tuple[dict, str, int]:
    ctx = PrecisionContext(cfg.precision_bits)
    results, rows, code = [], [], EXIT_OK
    for idx, s in enumerate(_ingest(cfg)):
        entry = {"index": idx, "sample": rpt.sample_json(s)}
        try:
            d = decompose_to_tolerance(s, cfg.tolerance, ctx, depth_cap=cfg.depth_cap)
        except (InconclusiveError, DepthCapExceeded) as exc:
            entry["error"] = str(exc)
            code = max(code, EXIT_INCONCLUSIVE)
        else:
            entry["decomposition"] = rpt.decomposition_json(d)
            for t in d.terms:
                rows.append([idx, t.k, *t.value.endpoints_str()])
        results.append(entry)
    table = rpt.csv_text(["sample", "k", "term_lo", "term_hi"], rows)
    return {"results": results, "summary": {"samples": len(results)}}, table, code


def cmd_check(cfg: RunConfig) -> tuple[dict, str, int]:
    ctx = PrecisionContext(cfg.precision_bits)
    results, rows, code = [], [], EXIT_OK
    counts: dict = {}
    for idx, s in enumerate(_ingest(cfg)):
        verdicts = check_all(s, ctx)
        for v in verdicts:
            counts[v.status.value] = counts.get(v.status.value, 0) + 1
            if v.status is Status.VIOLATED:
                code = max(code, EXIT_VIOLATION)
            elif v.status is Status.CERTIFIED_STRICT and v.equality_case.value != "NONE":
                # equality was proven for this case; a strict certificate contradicts it
                code = max(code, EXIT_VIOLATION)
            elif v.status in (Status.INCONCLUSIVE, Status.HOLDS_WITHIN_TOLERANCE):
                code = max(code, EXIT_INCONCLUSIVE)
            rows.append(
                [idx, v.inequality_id.value, v.status.value, *v.lhs.endpoints_str(), *v.rhs.endpoints_str(),
                 repr(v.tightness), v.equality_case.value]
            )
        results.append({"index": idx, "sample": rpt.sample_json(s), "verdicts": [rpt.verdict_json(v) for v in verdicts]})
    header = ["sample", "inequality_id", "status", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi", "tightness", "equality_case"]
    return {"results": results, "summary": {"samples": len(results), "status_counts": counts}}, rpt.csv_text(header, rows), code


def cmd_sweep(cfg: RunConfig) -> tuple[dict, str, int]:
    n = cfg.n if cfg.n is not None else 3
    eps_lo, eps_hi, ppd = cfg.grid
    h = FamilyHypothesis.at_optimal_constant(n, cfg.alpha if cfg.alpha is not None else 2, cfg.variant) if n >= 2 else None
    result = sweep(n, eps_hi, eps_lo, ppd, hypothesis=h, prec=cfg.precision_bits)
    body = rpt.sweep_json(result)
    summary = {
        "fitted_exponent": result.fitted_exponent,
        "leading_coefficient": result.leading_coefficient,
        "expected_coefficient": result.expected_coefficient,
        "fit_residual": result.fit_residual,
    }
    return {"results": [body], "summary": summary}, rpt.sweep_csv(result), EXIT_OK


def cmd_witness(cfg: RunConfig) -> tuple[dict, str, int]:
    n = cfg.n if cfg.n is not None else 4
    w = constant_witness(n, cfg.variant, cfg.precision_bits)
    body = {"constant_witness": rpt.constant_witness_json(w)}
    code = EXIT_OK if w.certified_exact else EXIT_INCONCLUSIVE
    rows = [["constant", n, w.variant.value, *w.gap.endpoints_str(), *w.raw_sum.endpoints_str()]]
    if cfg.alpha is not None:
        h = FamilyHypothesis.at_optimal_constant(n, cfg.alpha, cfg.variant)
        grid = epsilon_grid(cfg.grid[1], cfg.grid[0], cfg.grid[2]) if cfg.grid != RunConfig.__dataclass_fields__["grid"].default else None
        found = falsify_alpha(n, h, grid, PrecisionContext(cfg.precision_bits))
        body["alpha"] = str(cfg.alpha)
        body["alpha_witness"] = rpt.alpha_witness_json(found)
        if found is not None:
            rows.append(["alpha", n, repr(found.epsilon), *found.lhs.endpoints_str(), *found.rhs.endpoints_str()])
            if cfg.alpha >= 2:
                code = EXIT_VIOLATION
        elif cfg.alpha < 2:
            code = max(code, EXIT_INCONCLUSIVE)
    table = rpt.csv_text(["kind", "n", "detail", "lhs_lo", "lhs_hi", "rhs_lo", "rhs_hi"], rows)
    return {"results": [body], "summary": {"certified_exact": w.certified_exact}}, table, code


def cmd_profile(cfg: RunConfig) -> tuple[dict, str, int]:
    ctx = PrecisionContext(cfg.precision_bits)
    results, rows = [], []
    for idx, s in enumerate(_ingest(cfg)):
        p = convergence_profile(s, cfg.m_max, ctx)
        results.append({"index": idx, "sample": rpt.sample_json(s), "profile": rpt.profile_json(p)})
        for r in p.rows:
            rows.append([idx, r.m, *r.remainder.endpoints_str(), repr(r.ratio)])
    table = rpt.csv_text(["sample", "m", "remainder_lo", "remainder_hi", "ratio"], rows)
    return {"results": results, "summary": {"samples": len(results)}}, table, EXIT_OK


HANDLERS = {
    "decompose": cmd_decompose,
    "check": cmd_check,
    "sweep": cmd_sweep,
    "witness": cmd_witness,
    "profile": cmd_profile,
}


def run(cfg: RunConfig) -> tuple[dict, str, int]:
    """Execute ``cfg`` and return ``(json report, csv table, exit code)``."""
    body, table, code = HANDLERS[cfg.command](cfg)
    report = {"config": cfg.echo(), "caveat": rpt.INGESTION_CAVEAT, **body, "exit_status": code}
    return report, table, code


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        report, table, code = run(cfg)
    except (InvalidSampleError, ConfigError, NotApplicableError) as exc:
        print(f"amgm-cert: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalContradiction as exc:
        print(f"amgm-cert: certified contradiction: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (InconclusiveError, DepthCapExceeded) as exc:
        print(f"amgm-cert: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except CertificationError as exc:
        print(f"amgm-cert: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(table if cfg.output_format == "csv" else rpt.dumps(report), args.output)
    log.debug("exit status %d", code)
    return code


if __name__ == "__main__":
    sys.exit(main())
