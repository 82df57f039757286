"""Flip-number distributions for unary unbiased mutation.

A distribution ``D = (p_0, ..., p_n)`` gives the probability of flipping
exactly ``k`` bits. Every static unary unbiased mutation operator on
``{0,1}^n`` is described by such a vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import (
    BetaOutOfRange,
    DegenerateAllZero,
    LengthMismatch,
    NegativeProbability,
    OutOfRange,
    RateOutOfRange,
    SchemaViolation,
    SumOutOfTolerance,
)

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class FlipDistribution:
    """Probability vector over flip counts ``0..n``.

    Instances are immutable; ``probs`` and ``cumulative`` are read-only
    arrays so a distribution can be shared between workers.
    """

    n: int
    probs: np.ndarray
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    chi: float = field(init=False)
    cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=np.float64)
        probs.setflags(write=False)
        # clip rounding overshoot and pin everything from the last
        # supported count onward to 1 so sampling never lands past it
        cum = np.minimum(np.cumsum(probs), 1.0)
        nz = np.flatnonzero(probs)
        cum[nz[-1] if nz.size else 0 :] = 1.0
        cum.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "cumulative", cum)
        object.__setattr__(self, "chi", float(np.dot(np.arange(self.n + 1), probs)))

    def __getitem__(self, k: int) -> float:
        if 0 <= k <= self.n:
            return float(self.probs[k])
        return 0.0

    @property
    def p1(self) -> float:
        return self[1]

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "n": self.n}
        if self.kind == "custom":
            out["probs"] = [float(p) for p in self.probs]
        else:
            out.update(self.params)
        return out

    def __eq__(self, other):
        if not isinstance(other, FlipDistribution):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash((self.n, self.probs.tobytes()))


def make_custom(n: int, probs: Sequence[float]) -> FlipDistribution:
    """Validate ``probs`` and renormalise it to sum to exactly one."""
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1 or arr.size != n + 1:
        raise LengthMismatch(f"expected {n + 1} probabilities, got {arr.size}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise NegativeProbability("probabilities must be finite and non-negative")
    total = math.fsum(arr)
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise SumOutOfTolerance(f"probabilities sum to {total!r}")
    return FlipDistribution(n, arr / total)


def make_point_mass(n: int, k: int) -> FlipDistribution:
    if not 0 <= k <= n:
        raise OutOfRange(f"flip count {k} outside [0, {n}]")
    probs = np.zeros(n + 1)
    probs[k] = 1.0
    return FlipDistribution(n, probs, kind="point", params={"k": int(k)})


def make_rls(n: int) -> FlipDistribution:
    return make_point_mass(n, 1)


def make_standard_bit_mutation(n: int, c: float) -> FlipDistribution:
    """Binomial(n, c/n) flip counts, i.e. each bit flips independently."""
    if not 0 < c <= n:
        raise RateOutOfRange(f"expected flips c={c} outside (0, {n}]")
    probs = stats.binom.pmf(np.arange(n + 1), n, c / n)
    return FlipDistribution(n, probs / math.fsum(probs), kind="sbm", params={"c": float(c)})


def make_power_law(n: int, beta: float) -> FlipDistribution:
    """Heavy-tailed law ``p_k ∝ k^-beta`` on ``[1, n // 2]``."""
    if n < 2:
        raise OutOfRange("power law needs n >= 2")
    if not beta > 1:
        raise BetaOutOfRange(f"beta={beta} must exceed 1")
    ks = np.arange(1, n // 2 + 1, dtype=np.float64)
    weights = ks**-beta
    probs = np.zeros(n + 1)
    probs[1 : n // 2 + 1] = weights / math.fsum(weights)
    return FlipDistribution(n, probs, kind="power_law", params={"beta": float(beta)})


def mean(d: FlipDistribution) -> float:
    return d.chi


def condition_nonzero(d: FlipDistribution) -> FlipDistribution:
    """Distribution of the flip count given that it is not zero."""
    p0 = d.probs[0]
    if p0 >= 1.0:
        raise DegenerateAllZero("p_0 = 1 leaves nothing to condition on")
    if p0 == 0.0:
        return d
    probs = d.probs.copy()
    probs[0] = 0.0
    probs /= 1.0 - p0
    return FlipDistribution(d.n, probs / math.fsum(probs))


def mix_idle(d: FlipDistribution, p0: float) -> FlipDistribution:
    """Put mass ``p0`` on zero flips and scale the rest by ``1 - p0``."""
    if not 0 <= p0 < 1:
        raise OutOfRange("p0 must lie in [0, 1)")
    probs = d.probs * (1.0 - p0)
    probs[0] += p0
    return FlipDistribution(d.n, probs / math.fsum(probs))


def sample(d: FlipDistribution, rng: np.random.Generator) -> int:
    """Draw one flip count by inverse-CDF lookup."""
    return int(np.searchsorted(d.cumulative, rng.random(), side="right"))


def sample_many(d: FlipDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    return np.searchsorted(d.cumulative, rng.random(size), side="right")


def from_dict(doc: Mapping[str, Any], n: int | None = None) -> FlipDistribution:
    """Build a distribution from its JSON description.

    ``n`` fills in a missing ``"n"`` key (experiment documents usually
    state the size once at top level).
    """
    if not isinstance(doc, Mapping):
        raise SchemaViolation("distribution must be an object")
    kind = doc.get("kind")
    size = doc.get("n", n)
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise SchemaViolation("distribution needs a positive integer 'n'")
    try:
        if kind == "point":
            return make_point_mass(size, int(doc["k"]))
        if kind == "sbm":
            return make_standard_bit_mutation(size, float(doc["c"]))
        if kind == "power_law":
            return make_power_law(size, float(doc["beta"]))
        if kind == "custom":
            probs = list(doc["probs"])
            if len(probs) < size + 1:
                probs += [0.0] * (size + 1 - len(probs))
            return make_custom(size, probs)
    except KeyError as exc:
        raise SchemaViolation(f"distribution of kind {kind!r} is missing {exc}") from None
    raise SchemaViolation(f"unknown distribution kind {kind!r}")
