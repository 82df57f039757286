"""Exact drift of the symmetric OneMax distance and closed-form runtime bounds.

``B(n, d, r)`` is the expected decrease of ``OM`` below ``d`` when ``r``
uniformly random bits of a string with ``d`` ones are flipped (only
improvements count). Summing it against the mirrored coefficients
``p_r + p_{n-r}`` gives the one-step drift ``h_tilde(d)`` of the
best-so-far distance ``min(OM, n - OM)`` from a parent at distance ``d``.

Logarithms are natural throughout; ``ln^2 n`` means ``(ln n)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .distributions import FlipDistribution
from .errors import NonPositiveAlphaMargin, NonPositiveWeight, OutOfRange, ZeroP1, LengthMismatch
from .objectives import BitString, Objective


@njit(cache=True)
def _hypergeom_support(n, r, d):
    """pmf of the number of marked items among ``r`` draws from ``n`` with ``d`` marked.

    Returns ``(lo, pmf)`` with ``pmf[j] = P[X = lo + j]``. Values are built
    by the ratio recurrence outward from the mode and normalised at the
    end, which avoids factorials and keeps intermediate values near 1.
    """
    lo = max(0, r + d - n)
    hi = min(d, r)
    size = hi - lo + 1
    pmf = np.empty(size)
    mode = int(((r + 1.0) * (d + 1.0)) / (n + 2.0))
    if mode < lo:
        mode = lo
    if mode > hi:
        mode = hi
    m = mode - lo
    pmf[m] = 1.0
    # P[i+1] / P[i] = (d - i)(r - i) / ((i + 1)(n - d - r + i + 1))
    for j in range(m, size - 1):
        i = lo + j
        pmf[j + 1] = pmf[j] * ((d - i) * (r - i)) / ((i + 1.0) * (n - d - r + i + 1.0))
    for j in range(m, 0, -1):
        i = lo + j
        pmf[j - 1] = pmf[j] * (i * (n - d - r + i)) / ((d - i + 1.0) * (r - i + 1.0))
    total = 0.0
    for j in range(size):
        total += pmf[j]
    for j in range(size):
        pmf[j] /= total
    return lo, pmf


@njit(cache=True)
def _progress(n, d, r, shift):
    """``E[(2X - r - shift)^+]`` for ``X ~ Hypergeom(n, r, d)``; ``shift = 0`` gives ``B``."""
    if r <= 0 or d <= 0 or 2 * d < r + shift:
        return 0.0
    lo, pmf = _hypergeom_support(n, r, d)
    total = 0.0
    start = (r + shift + 1) // 2
    if start < lo:
        start = lo
    for i in range(start, lo + pmf.shape[0]):
        gain = 2 * i - r - shift
        if gain > 0:
            total += gain * pmf[i - lo]
    return total


@njit(cache=True)
def _h_tilde_all(n, coef, dmax):
    out = np.zeros(dmax + 1)
    for d in range(1, dmax + 1):
        s = 0.0
        rmax = min(2 * d, n - 1)
        for r in range(1, rmax + 1):
            c = coef[r]
            if c > 0.0:
                s += c * _progress(n, d, r, 0)
        out[d] = s
    return out


def hypergeom_pmf(n: int, r: int, d: int, i: int) -> float:
    """``C(d, i) C(n - d, r - i) / C(n, r)``; zero outside the support."""
    if not (0 <= d <= n and 0 <= r <= n):
        raise OutOfRange("need 0 <= d, r <= n")
    lo, pmf = _hypergeom_support(n, r, d)
    if lo <= i < lo + pmf.size:
        return float(pmf[i - lo])
    return 0.0


def B(n: int, d: int, r: int) -> float:
    """Expected positive OneMax progress towards zero when flipping ``r`` of ``n`` bits at ``OM = d``."""
    if not (1 <= r <= n and 0 <= d <= n):
        raise OutOfRange(f"B needs 1 <= r <= n and 0 <= d <= n, got n={n}, d={d}, r={r}")
    return float(_progress(n, d, r, 0))


def B_shifted(n: int, d_parent: int, r: int, best: int) -> float:
    """Progress below ``best`` from a parent at ``d_parent >= best``."""
    if not (1 <= r <= n and 0 <= best <= d_parent <= n):
        raise OutOfRange("B_shifted needs 1 <= r <= n and 0 <= best <= d_parent <= n")
    return float(_progress(n, d_parent, r, d_parent - best))


def mirrored_coefficients(d_dist: FlipDistribution) -> np.ndarray:
    """``c[r] = p_r + p_{n-r}`` for ``r`` in ``0..n`` (entries 0 and n unused)."""
    p = np.asarray(d_dist.probs)
    return p + p[::-1]


def h_tilde(d_dist: FlipDistribution, dist: int) -> float:
    n = d_dist.n
    if not 0 <= dist <= n // 2:
        raise OutOfRange(f"distance {dist} outside [0, {n // 2}]")
    return float(_h_tilde_all(n, mirrored_coefficients(d_dist), dist)[dist])


def h_tilde_all(d_dist: FlipDistribution, dmax: int | None = None) -> np.ndarray:
    n = d_dist.n
    dmax = n // 2 if dmax is None else dmax
    return _h_tilde_all(n, mirrored_coefficients(d_dist), dmax)


def p1_plus_pn1(d_dist: FlipDistribution) -> float:
    return d_dist[1] + d_dist[d_dist.n - 1]


def d0(d_dist: FlipDistribution) -> int:
    """Cutoff ``floor((p_1 + p_{n-1}) n / (ln n)^2)``."""
    n = d_dist.n
    if n < 2:
        raise OutOfRange("d0 needs n >= 2")
    return int(math.floor(p1_plus_pn1(d_dist) * n / math.log(n) ** 2))


@dataclass(frozen=True, eq=False)
class DriftTable:
    n: int
    distribution: FlipDistribution
    d0: int
    h_tilde: np.ndarray
    h: np.ndarray

    @property
    def inv_h_cumsum(self) -> np.ndarray:
        """``sum_{j=1}^{d} 1/h(j)``, with 0 at ``d = 0``."""
        inv = np.zeros_like(self.h)
        with np.errstate(divide="ignore"):
            inv[1:] = 1.0 / self.h[1:]
        return np.cumsum(inv)


def drift_table(d_dist: FlipDistribution) -> DriftTable:
    n = d_dist.n
    cut = d0(d_dist)
    ht = h_tilde_all(d_dist)
    h = ht.copy()
    h[cut + 1 :] = n
    for arr in (ht, h):
        arr.setflags(write=False)
    return DriftTable(n, d_dist, cut, ht, h)


@dataclass(frozen=True, eq=False)
class PotentialWeights:
    """Geometric caps ``gamma`` and adaptive weights ``g`` for a linear objective.

    ``g[i]`` is the weight of the ``(i+1)``-th lightest position; the
    potential of a point is the ``g``-weighted count of its wrong bits.
    """

    n: int
    alpha: float
    chi: float
    p1: float
    gamma: np.ndarray
    g: np.ndarray


def potential_weights(d_dist: FlipDistribution, alpha: float, weights: Sequence[float] | Objective) -> PotentialWeights:
    if isinstance(weights, Objective):
        weights = weights.weights
    w = np.asarray(weights, dtype=np.float64)
    n = d_dist.n
    if w.size != n:
        raise LengthMismatch(f"{w.size} weights for n={n}")
    if np.any(w <= 0) or np.any(np.diff(w) < 0):
        raise NonPositiveWeight("weights must be positive and sorted ascending")
    p1 = d_dist.p1
    if p1 <= 0:
        raise ZeroP1("potential weights need p_1 > 0")
    if not alpha > 1:
        raise NonPositiveAlphaMargin(f"alpha={alpha} must exceed 1")
    chi = d_dist.chi
    base = 1.0 + alpha * chi**3 / ((n - 1) * p1**2) if n > 1 else 1.0
    gamma = base ** np.arange(n, dtype=np.float64)
    g = np.empty(n)
    g[0] = 1.0
    for i in range(1, n):
        g[i] = min(gamma[i], g[i - 1] * (w[i] / w[i - 1]))
    assert gamma[0] == 1.0 and np.all(np.diff(gamma) > 0)
    assert np.all(np.diff(g) >= 0) and np.all(g <= gamma) and np.all(g >= 1.0)
    return PotentialWeights(n, float(alpha), chi, p1, gamma, g)


def potential(pw: PotentialWeights, x: BitString | np.ndarray) -> float:
    """``sum g_i x_i``; pass the complement of the incumbent so the optimum scores 0."""
    bits = x.bits if isinstance(x, BitString) else np.asarray(x)
    if bits.shape[-1] != pw.n:
        raise LengthMismatch(f"point has n={bits.shape[-1]}, weights n={pw.n}")
    return bits @ pw.g


def upper_bound_b(d_dist: FlipDistribution, alpha: float, r: float) -> tuple[float, float]:
    """Runtime bound ``b(r)`` holding with probability at least ``1 - e^-r``.

    ``b(1)`` also bounds the expectation.
    """
    n, p1, chi = d_dist.n, d_dist.p1, d_dist.chi
    if p1 <= 0:
        raise ZeroP1("the bound needs p_1 > 0")
    if not alpha > 1:
        raise NonPositiveAlphaMargin(f"alpha={alpha} must exceed 1")
    if not r > 0:
        raise OutOfRange("tail parameter r must be positive")
    inner = alpha * n * chi**3 / ((n - 1) * p1**2) + math.log((n - 1) * p1**2 / chi**3) + r
    return n / p1 * alpha / (alpha - 1) * inner, math.exp(-r)


def polynomial_upper_bound(d_dist: FlipDistribution, r: float = 1.0) -> float:
    """``b(r)`` at ``alpha = 2``, the ``O(n chi^3 / p1^3 + n ln n / p1)`` form."""
    return upper_bound_b(d_dist, 2.0, r)[0]


def c_tilde(n: int, i: int) -> float:
    """Likely lower end of the distance after one mutation from distance ``i``."""
    if not 1 <= i <= n:
        raise OutOfRange(f"i={i} outside [1, {n}]")
    ln = math.log(n)
    if 6 * i >= n:
        return i - math.sqrt(n) * ln
    if i**3 >= n:
        return i - ln**2
    return i - 1.0


@dataclass(frozen=True)
class VariableDriftProfile:
    n: int
    distribution: FlipDistribution
    d0: int
    sum_inverse_h: float
    headline: float
    failure_p: float
    corrected: float
    degenerate: bool = False


def variable_drift_lower_bound(d_dist: FlipDistribution) -> VariableDriftProfile:
    """Evaluate ``sum_{d=1}^{d0} 1/h(d)`` and the variable-drift correction.

    The corrected value is ``s - s^2 p / (1 + s p)`` with
    ``p = n^{-4/3} ln^7 n``; the jump function ``mu`` only shifts the
    summation range and is absorbed into the ``o(n)`` slack, so it is not
    evaluated here.
    """
    n = d_dist.n
    q = p1_plus_pn1(d_dist)
    fail = n ** (-4.0 / 3.0) * math.log(n) ** 7
    if q <= 0:
        return VariableDriftProfile(n, d_dist, 0, 0.0, math.inf, fail, 0.0, degenerate=True)
    cut = d0(d_dist)
    ht = h_tilde_all(d_dist, cut)
    s = float(np.sum(1.0 / ht[1:])) if cut >= 1 else 0.0
    corrected = s - s * s * fail / (1.0 + s * fail)
    return VariableDriftProfile(n, d_dist, cut, s, n * math.log(n) / q, fail, corrected)


def h_shifted(d_dist: FlipDistribution, best: int, d_parent: int) -> float:
    """Drift of the best-so-far distance ``best`` when the parent sits at ``d_parent``."""
    n = d_dist.n
    coef = mirrored_coefficients(d_dist)
    delta = d_parent - best
    return float(
        sum(coef[r] * _progress(n, d_parent, r, delta) for r in range(delta + 1, n - delta) if coef[r] > 0)
    )


def audit(d_dist: FlipDistribution, r0: int = 12) -> list[dict]:
    """Finite-n values of the asymptotic drift estimates, one row per ``d <= d0``.

    Nothing is asserted: the estimates only hold beyond enormous ``n``.
    Columns: ``max_B_ratio`` is ``max_{r >= r0} B(n,d,r) / (d/n)^2``;
    ``h`` against ``h_cap = (1 + 1/ln n)(p_1 + p_{n-1}) d/n``; and
    ``max_shifted_h`` is ``max_{Delta >= 1} h_d(d + Delta)`` against ``h``.
    """
    n = d_dist.n
    q = p1_plus_pn1(d_dist)
    table = drift_table(d_dist)
    rows = []
    for d in range(1, table.d0 + 1):
        ratios = [_progress(n, d, r, 0) / (d / n) ** 2 for r in range(r0, n)]
        shifted = [h_shifted(d_dist, d, d + delta) for delta in range(1, n // 2 - d + 1)]
        rows.append(
            {
                "d": d,
                "max_B_ratio": max(ratios, default=0.0),
                "h": float(table.h[d]),
                "h_cap": (1 + 1 / math.log(n)) * q * d / n,
                "max_shifted_h": max(shifted, default=0.0),
            }
        )
    return rows
