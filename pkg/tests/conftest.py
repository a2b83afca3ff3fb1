import random

import mpmath
from hypothesis import strategies as st

from amgm_cert.means import Sample

ORACLE_BITS = 512
# the library never touches the global mpmath context, so the oracle owns it
mpmath.mp.prec = ORACLE_BITS


def oracle_values(s: Sample):
    return [mpmath.mpf(v.lo) for v in s.values]


def oracle_means(vals):
    n = len(vals)
    A = mpmath.fsum(vals) / n
    if any(v == 0 for v in vals):
        G = mpmath.mpf(0)
    else:
        G = mpmath.exp(mpmath.fsum(mpmath.log(v) for v in vals) / n)
    return A, G


def oracle_term(vals, k):
    """y_k straight from its definition, at oracle precision."""
    n = len(vals)
    A, G = oracle_means(vals)
    if G == 0:
        return A if k == 1 else mpmath.mpf(0)
    t = mpmath.mpf(2) ** (-k)
    dev = mpmath.fsum((v**t - G**t) ** 2 for v in vals) / n
    return 2 ** (k - 1) * G ** (1 - 2 * t) * dev


def oracle_remainder(vals, m):
    n = len(vals)
    A, G = oracle_means(vals)
    if m == 0:
        return A - G
    if G == 0:
        return mpmath.mpf(0)
    t = mpmath.mpf(2) ** (-m)
    return 2**m * G ** (1 - t) * (mpmath.fsum(v**t for v in vals) / n - G**t)


def inside(iv, value, slack=mpmath.mpf(2) ** -480) -> bool:
    """Containment up to the oracle's own rounding error (relative ``slack``)."""
    pad = slack * max(1, abs(value))
    return mpmath.mpf(iv.lo) - pad <= value <= mpmath.mpf(iv.hi) + pad


def log_uniform_sample(rng: random.Random, n=None, zero_rate=0.0, lo=-6, hi=6):
    size = n if n is not None else rng.randint(1, 16)
    return [0.0 if rng.random() < zero_rate else 10.0 ** rng.uniform(lo, hi) for _ in range(size)]


positive_floats = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)
nonneg_floats = st.one_of(st.just(0.0), positive_floats)
samples_st = st.lists(nonneg_floats, min_size=1, max_size=16)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
