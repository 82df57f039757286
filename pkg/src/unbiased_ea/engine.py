"""The elitist (1+1) EA with a static flip distribution.

Each iteration draws ``k ~ D``, flips ``k`` uniformly chosen bits of the
incumbent and keeps the offspring if its fitness is at least as good.
Runtimes are reported as ``iterations`` (mutation steps, the quantity the
Markov-chain oracles compute) and ``evaluations = iterations + 1``.

Randomness comes from numpy's PCG64 bit generator (period 2**128). Trial
``i`` of a batch is seeded with ``mix64(master_seed ^ i)``, where
``mix64`` is the splitmix64 finaliser, so a batch is reproducible
independently of how trials are spread over workers.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from numba import njit

from .distributions import FlipDistribution
from .errors import DimensionMismatch, OutOfRange, ZeroTrials
from .mutation import choose_flip_set
from .objectives import BitString, Objective, evaluate

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
DEFAULT_MAX_EVALUATIONS = 10**10

_MODE_LINEAR = 0
_MODE_PARITY = 1
_MODE_BINVAL = 2


def mix64(z: int) -> int:
    """splitmix64 finaliser: a bijective 64-bit avalanche mix."""
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial: int) -> int:
    return mix64((master_seed ^ trial) & MASK64)


StartSpec = Union[str, BitString, int]


@dataclass(frozen=True)
class EngineConfig:
    """How a single run starts and stops.

    ``start`` is ``"uniform"``, a fixed :class:`BitString`, or an integer
    ``d`` meaning "``d`` uniformly chosen optimum bits set wrong".
    """

    start: StartSpec = "uniform"
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS
    record_trace: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise OutOfRange("max_evaluations must be at least 1")
        if isinstance(self.start, str) and self.start != "uniform":
            raise OutOfRange(f"unknown start {self.start!r}")


TRACE_DTYPE = np.dtype([("t", np.int64), ("fitness", np.float64), ("potential", np.int64)])


@dataclass
class RunRecord:
    seed: int
    n: int
    iterations: int
    hit_optimum: bool
    final_fitness: float
    trace: np.ndarray | None = field(default=None, repr=False)

    @property
    def evaluations(self) -> int:
        return self.iterations + 1

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        same_trace = (self.trace is None and other.trace is None) or (
            self.trace is not None and other.trace is not None and np.array_equal(self.trace, other.trace)
        )
        return (
            self.seed == other.seed
            and self.n == other.n
            and self.iterations == other.iterations
            and self.hit_optimum == other.hit_optimum
            and self.final_fitness == other.final_fitness
            and same_trace
        )


@njit(cache=True)
def _parity_value(om, n):
    if om % 2 == 0:
        return om
    return n - om


@njit(cache=True)
def _simulate(x, weights, mode, cum, rng, max_iters, record):
    """Run until all-ones is reached or ``max_iters`` steps were made.

    ``x`` is modified in place. Returns ``(iterations, hit, trace)``;
    the trace holds one row per change of fitness or best-so-far
    distance, plus the initial row.
    """
    n = x.shape[0]
    idx = np.arange(n)
    om = 0
    fit = 0.0
    # binval keeps a float fitness for the trace only while it is exact
    track = mode == _MODE_LINEAR or (mode == _MODE_BINVAL and weights.shape[0] == n)
    for j in range(n):
        om += x[j]
        if track:
            fit += weights[j] * x[j]
    if mode == _MODE_BINVAL and not track:
        fit = np.nan
    if mode == _MODE_PARITY:
        fit = float(_parity_value(om, n))
    best_dist = min(om, n - om)

    cap = 64 if record else 1
    tr_t = np.empty(cap, np.int64)
    tr_f = np.empty(cap, np.float64)
    tr_x = np.empty(cap, np.int64)
    rows = 0
    if record:
        tr_t[0] = 0
        tr_f[0] = fit
        tr_x[0] = best_dist
        rows = 1

    t = 0
    while om != n and t < max_iters:
        t += 1
        k = np.searchsorted(cum, rng.random(), side="right")
        if k == 0:
            continue
        lo, hi = choose_flip_set(idx, k, rng)
        dom = 0
        delta = 0.0
        for j in range(lo, hi):
            p = idx[j]
            if x[p] == 1:
                dom -= 1
                if track:
                    delta -= weights[p]
            else:
                dom += 1
                if track:
                    delta += weights[p]
        new_om = om + dom
        if mode == _MODE_PARITY:
            delta = float(_parity_value(new_om, n)) - fit
        gain = delta
        if mode == _MODE_BINVAL:
            # the most significant flipped bit decides
            top = idx[lo]
            for j in range(lo + 1, hi):
                if idx[j] > top:
                    top = idx[j]
            gain = 1.0 if x[top] == 0 else -1.0
        changed = False
        child_dist = min(new_om, n - new_om)
        if child_dist < best_dist:
            best_dist = child_dist
            changed = True
        if gain >= 0:
            for j in range(lo, hi):
                x[idx[j]] ^= 1
            om = new_om
            if mode == _MODE_PARITY:
                fit = float(_parity_value(om, n))
            elif track:
                fit += delta
            if gain > 0:
                changed = True
        if record and changed:
            if rows == tr_t.shape[0]:
                tr_t = np.concatenate((tr_t, np.empty(rows, np.int64)))
                tr_f = np.concatenate((tr_f, np.empty(rows, np.float64)))
                tr_x = np.concatenate((tr_x, np.empty(rows, np.int64)))
            tr_t[rows] = t
            tr_f[rows] = fit
            tr_x[rows] = best_dist
            rows += 1
    return t, om == n, tr_t[:rows], tr_f[:rows], tr_x[:rows]


def initial_point(f: Objective, cfg: EngineConfig, rng: np.random.Generator) -> np.ndarray:
    n = f.n
    start = cfg.start
    if isinstance(start, BitString):
        if start.n != n:
            raise DimensionMismatch(f"start point has n={start.n}, objective n={n}")
        return np.array(start.bits, dtype=np.uint8)
    if isinstance(start, (int, np.integer)) and not isinstance(start, bool):
        if not 0 <= start <= n:
            raise OutOfRange(f"start distance {start} outside [0, {n}]")
        x = np.ones(n, dtype=np.uint8)
        x[rng.permutation(n)[:start]] = 0
        return x
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def run(f: Objective, d: FlipDistribution, cfg: EngineConfig) -> RunRecord:
    """One seeded trajectory of the (1+1) EA with flip distribution ``d``."""
    if f.n != d.n:
        raise DimensionMismatch(f"objective has n={f.n}, distribution n={d.n}")
    if f.optimum is None:
        raise DimensionMismatch(f"{f.kind} on n={f.n} has no unique optimum")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    x = initial_point(f, cfg, rng)
    if f.kind == "parity_swap":
        mode, weights = _MODE_PARITY, np.zeros(0)
    elif f.kind == "binval":
        mode = _MODE_BINVAL
        weights = np.zeros(0) if f.weights is None else np.asarray(f.weights)
    else:
        mode, weights = _MODE_LINEAR, np.asarray(f.weights)
    iters, hit, tt, tf, tx = _simulate(
        x, weights, mode, np.asarray(d.cumulative), rng, cfg.max_evaluations - 1, cfg.record_trace
    )
    trace = None
    if cfg.record_trace:
        trace = np.empty(tt.size, dtype=TRACE_DTYPE)
        trace["t"], trace["fitness"], trace["potential"] = tt, tf, tx
    return RunRecord(
        seed=cfg.seed,
        n=f.n,
        iterations=int(iters),
        hit_optimum=bool(hit),
        final_fitness=evaluate(f, BitString(x)),
        trace=trace,
    )


def _run_chunk(args):
    f, d, cfg, master_seed, trials = args
    out = []
    for i in trials:
        sub = EngineConfig(cfg.start, cfg.max_evaluations, cfg.record_trace, trial_seed(master_seed, i))
        out.append((i, run(f, d, sub)))
    return out


def run_batch(
    f: Objective, d: FlipDistribution, cfg: EngineConfig, trials: int, workers: int = 1
) -> list[RunRecord]:
    """Independent trials seeded from ``cfg.seed``, returned in trial order."""
    if trials < 1:
        raise ZeroTrials("need at least one trial")
    workers = max(1, min(workers, trials))
    if workers == 1:
        return [rec for _, rec in _run_chunk((f, d, cfg, cfg.seed, range(trials)))]
    chunks = [(f, d, cfg, cfg.seed, range(w, trials, workers)) for w in range(workers)]
    results: list[tuple[int, RunRecord]] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            results.extend(part)
    results.sort(key=lambda item: item[0])
    return [rec for _, rec in results]


def iterations(records: Iterable[RunRecord]) -> np.ndarray:
    return np.array([r.iterations for r in records], dtype=np.float64)


CSV_COLUMNS = ("trial", "seed", "n", "iterations", "evaluations", "hit_optimum", "final_fitness")


def fmt_float(x: float | int) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def records_to_csv(records: Sequence[RunRecord], stream: io.TextIOBase | None = None) -> str:
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for i, r in enumerate(records):
        writer.writerow(
            [i, r.seed, r.n, r.iterations, r.evaluations, int(r.hit_optimum), fmt_float(r.final_fitness)]
        )
    return buf.getvalue() if stream is None else ""
