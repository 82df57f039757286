"""Pseudo-Boolean benchmark functions with a unique maximum.

Only strictly positive linear weights are accepted, so every linear
objective (and the parity-swap function for even ``n``) is maximised by
the all-ones string. Weight sets whose subset sums collide only through
floating-point rounding are the caller's responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import EmptyWeights, LengthMismatch, NonPositiveWeight, OutOfRange, SchemaViolation

KINDS = ("onemax", "linear", "binval", "parity_swap", "anchored")
BINVAL_MAX_N = 52


@dataclass(frozen=True, eq=False)
class BitString:
    """A fixed-length 0/1 vector with its number of ones cached."""

    bits: np.ndarray
    ones: int = field(init=False)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or np.any(bits > 1):
            raise ValueError("bits must be a flat 0/1 vector")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "ones", int(bits.sum()))

    @property
    def n(self) -> int:
        return self.bits.size

    @classmethod
    def all_zeros(cls, n: int) -> "BitString":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def all_ones(cls, n: int) -> "BitString":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        """Bit ``i`` (0-based position) is ``(value >> i) & 1``."""
        return cls((value >> np.arange(n)) & 1)

    def complement(self) -> "BitString":
        return BitString(1 - self.bits)

    def hamming(self, other: "BitString") -> int:
        return int(np.count_nonzero(self.bits != other.bits))

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)

    def __eq__(self, other):
        if not isinstance(other, BitString):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())


@dataclass(frozen=True, eq=False)
class Objective:
    """A tagged pseudo-Boolean function to be maximised.

    ``weights`` is populated for every kind except ``parity_swap`` and
    binval beyond 52 bits, whose weights are not representable in doubles.
    """

    kind: str
    n: int
    weights: np.ndarray | None = None
    anchor_weight: float | None = None

    def __post_init__(self):
        if self.weights is not None:
            w = np.array(self.weights, dtype=np.float64)
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def is_linear(self) -> bool:
        return self.kind != "parity_swap"

    @property
    def optimum(self) -> BitString | None:
        """The unique maximiser, or ``None`` when there is none (odd-n parity swap)."""
        if self.kind == "parity_swap" and self.n % 2:
            return None
        return BitString.all_ones(self.n)

    @property
    def level_symmetric(self) -> bool:
        """Fitness depends on the number of ones only."""
        return self.kind in ("onemax", "parity_swap") or (
            self.weights is not None and np.all(self.weights == self.weights[0])
        )

    def __call__(self, x: BitString) -> float:
        return evaluate(self, x)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "n": self.n}
        if self.kind == "linear":
            out["weights"] = [float(w) for w in self.weights]
        if self.kind == "anchored":
            out["anchor_weight"] = float(self.anchor_weight)
        return out


def evaluate(f: Objective, x: BitString) -> float | int:
    if x.n != f.n:
        raise LengthMismatch(f"objective has n={f.n}, point has n={x.n}")
    if f.kind == "parity_swap":
        om = x.ones
        return float(om if om % 2 == 0 else f.n - om)
    if f.kind == "onemax":
        return float(x.ones)
    if f.weights is None:
        return int("".join("1" if b else "0" for b in x.bits[::-1]), 2)
    return float(np.dot(f.weights, x.bits))


def evaluate_level(f: Objective, om) -> np.ndarray:
    """Fitness as a function of the number of ones, for level-symmetric ``f``."""
    om = np.asarray(om)
    if f.kind == "parity_swap":
        return np.where(om % 2 == 0, om, f.n - om).astype(np.float64)
    if not f.level_symmetric:
        raise ValueError(f"{f.kind} objective is not a function of OneMax")
    return om * (f.weights[0] if f.weights is not None else 1.0)


def make_onemax(n: int) -> Objective:
    if n < 1:
        raise OutOfRange("n must be positive")
    return Objective("onemax", n, weights=np.ones(n))


def make_linear(weights: Sequence[float]) -> Objective:
    """Linear function with positive weights, sorted ascending."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise EmptyWeights("a linear function needs at least one weight")
    if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
        raise NonPositiveWeight("linear weights must be finite and strictly positive")
    return Objective("linear", w.size, weights=np.sort(w))


def make_binval(n: int) -> Objective:
    """Weights ``2^(i-1)``.

    Up to ``n = 52`` the weights are stored as exact doubles. Beyond that
    no weight vector is kept: :func:`evaluate` returns the exact integer
    value and the simulator compares offspring lexicographically.
    """
    if n < 1:
        raise OutOfRange("n must be positive")
    weights = 2.0 ** np.arange(n) if n <= BINVAL_MAX_N else None
    return Objective("binval", n, weights=weights)


def make_parity_swap(n: int) -> Objective:
    """OneMax with levels ``k`` and ``n - k`` exchanged for odd ``k``."""
    if n < 2:
        raise OutOfRange("parity swap needs n >= 2")
    return Objective("parity_swap", n)


def make_anchored(n: int, anchor_weight: float) -> Objective:
    """``anchor_weight * x_1 + x_2 + ... + x_n``."""
    if n < 2:
        raise OutOfRange("anchored objective needs n >= 2")
    if not anchor_weight > 0:
        raise NonPositiveWeight("anchor weight must be positive")
    w = np.ones(n)
    w[0] = anchor_weight
    return Objective("anchored", n, weights=w, anchor_weight=float(anchor_weight))


def distance(x: BitString) -> int:
    """Symmetric distance ``min(OM(x), n - OM(x))`` to the all-ones/all-zeros pair."""
    return min(x.ones, x.n - x.ones)


def from_dict(doc: Mapping[str, Any], n: int | None = None) -> Objective:
    if not isinstance(doc, Mapping):
        raise SchemaViolation("objective must be an object")
    kind = doc.get("kind")
    size = doc.get("n", n)
    if kind == "linear":
        if "weights" not in doc:
            raise SchemaViolation("linear objective needs 'weights'")
        f = make_linear(doc["weights"])
        if size is not None and size != f.n:
            raise SchemaViolation("'n' disagrees with the number of weights")
        return f
    if not isinstance(size, int) or isinstance(size, bool):
        raise SchemaViolation("objective needs an integer 'n'")
    if kind == "onemax":
        return make_onemax(size)
    if kind == "binval":
        return make_binval(size)
    if kind == "parity_swap":
        return make_parity_swap(size)
    if kind == "anchored":
        return make_anchored(size, float(doc.get("anchor_weight", size)))
    raise SchemaViolation(f"unknown objective kind {kind!r}")
