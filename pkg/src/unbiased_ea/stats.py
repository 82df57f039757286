"""Estimators and two-sample tests for simulated runtimes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import BadInput, EmptySample, TooFewSamples

Z95 = 1.959963984540054


@dataclass(frozen=True)
class Summary:
    mean: float
    std_error: float
    ci95_low: float
    ci95_high: float
    count: int


def summarize(samples: Sequence[float]) -> Summary:
    """Sample mean, standard error and a normal-approximation 95% interval."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise TooFewSamples("need at least two samples")
    m = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size))
    return Summary(m, se, m - Z95 * se, m + Z95 * se, int(x.size))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sided two-sample Kolmogorov-Smirnov test.

    Returns the statistic ``D = sup |F_a - F_b|`` (exact, ties handled by
    evaluating both empirical CDFs on the pooled sample) and the
    asymptotic p-value ``Q_KS((sqrt(m) + 0.12 + 0.11 / sqrt(m)) D)`` with
    effective size ``m = n_a n_b / (n_a + n_b)``.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    stat = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    p = float(special.kolmogorov((en + 0.12 + 0.11 / en) * stat)) if stat > 0 else 1.0
    return stat, min(1.0, p)


@dataclass(frozen=True)
class ConstantFit:
    ns: tuple[int, ...]
    ratios: tuple[float, ...]
    converging: bool


def leading_constant_fit(points: Sequence[tuple], p1: float | None = None) -> ConstantFit:
    """Ratios ``mean_T * p1 / (n ln n)``, ordered by ``n``.

    ``points`` holds ``(n, mean_T)`` pairs sharing ``p1``, or
    ``(n, mean_T, p1_n)`` triples when ``p1`` depends on ``n`` (as for
    standard bit mutation). ``converging`` is true when ``|ratio - 1|``
    never increases with ``n``.
    """
    if not points:
        raise BadInput("need at least one point")
    pts = []
    for pt in points:
        n, m = pt[0], pt[1]
        q = pt[2] if len(pt) > 2 else p1
        if q is None or not q > 0:
            raise BadInput("p1 must be positive")
        if n < 3 or not m > 0:
            raise BadInput(f"bad point (n={n}, mean={m})")
        pts.append((n, m, q))
    pts.sort()
    ratios = tuple(m * q / (n * math.log(n)) for n, m, q in pts)
    gaps = [abs(r - 1) for r in ratios]
    converging = all(g2 <= g1 for g1, g2 in zip(gaps, gaps[1:]))
    return ConstantFit(tuple(n for n, _, _ in pts), ratios, converging)
