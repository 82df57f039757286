"""Exact expected hitting times and one-step drifts for small instances.

Three state spaces are supported:

* ``level``: the number of ones, valid when fitness depends only on it
  (OneMax, parity swap);
* ``anchored``: ``(x_1, ones among x_2..x_n)`` for the anchored objective;
* ``full``: every bit string, for ``n <= 16``.

Expected times count mutation steps (iterations) until the optimum is
the incumbent. States from which the optimum is not reached with
probability one get ``inf``; asking for their value raises
:class:`UnreachableOptimum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit
from scipy import sparse, stats
from scipy.sparse import csgraph
from scipy.sparse.linalg import spsolve

from .distributions import FlipDistribution
from .drift import PotentialWeights, _hypergeom_support
from .errors import DimensionMismatch, OutOfRange, TooLarge, UnreachableOptimum
from .objectives import BitString, Objective, distance, evaluate_level

FULL_MAX_N = 16
ENUM_MAX_N = 14
DENSE_GROUP_MAX = 2048


@dataclass(frozen=True, eq=False)
class ChainSolution:
    """Expected iterations to absorption, indexed by state.

    ``space`` is ``"level"`` (index = number of ones), ``"anchored"``
    (index = ``b * n + m``) or ``"full"`` (index = integer whose bit ``i``
    is position ``i``).
    """

    space: str
    n: int
    expected_time: np.ndarray
    absorbing: tuple[int, ...]

    def time_from(self, state: int) -> float:
        value = float(self.expected_time[state])
        if not math.isfinite(value):
            raise UnreachableOptimum(f"optimum not reached almost surely from state {state}")
        return value

    def start_weights(self) -> np.ndarray:
        """Probability of each state under a uniformly random start."""
        n = self.n
        if self.space == "level":
            return stats.binom.pmf(np.arange(n + 1), n, 0.5)
        if self.space == "anchored":
            half = stats.binom.pmf(np.arange(n), n - 1, 0.5) / 2
            return np.concatenate([half, half])
        return np.full(2**n, 2.0**-n)

    def uniform_start_mean(self) -> float:
        w = self.start_weights()
        live = w > 0
        if not np.all(np.isfinite(self.expected_time[live])):
            raise UnreachableOptimum("some uniformly drawn start cannot reach the optimum")
        return float(np.dot(w[live], self.expected_time[live]))


def _solve_absorbing(rows, cols, vals, size: int, target: np.ndarray) -> np.ndarray:
    """Solve ``E = 1 + P E`` off the target for a chain given by its off-diagonal moves."""
    P = sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
    P.sum_duplicates()
    P.eliminate_zeros()
    targets = np.flatnonzero(target)
    graph_rev = P.T.tocsr()
    can_reach = np.zeros(size, dtype=bool)
    for t in targets:
        order = csgraph.breadth_first_order(graph_rev, t, directed=True, return_predecessors=False)
        can_reach[order] = True
    stuck = np.flatnonzero(~can_reach)
    bad = ~can_reach
    for s in stuck:
        order = csgraph.breadth_first_order(graph_rev, s, directed=True, return_predecessors=False)
        bad[order] = True
    bad[target] = False
    good = np.flatnonzero(~bad & ~target)
    E = np.full(size, np.inf)
    E[target] = 0.0
    if good.size:
        sub = P[good][:, good]
        out = np.asarray(P[good].sum(axis=1)).ravel()
        A = sparse.diags(out) - sub
        E[good] = spsolve(A.tocsc(), np.ones(good.size)) if good.size > 1 else 1.0 / out
    return np.atleast_1d(E)


@njit(cache=True)
def _level_backsub(n, probs, support, fit, order):
    E = np.full(n + 1, np.inf)
    for pos in range(order.shape[0]):
        m = order[pos]
        if m == n:
            E[m] = 0.0
            continue
        out = 0.0
        acc = 0.0
        for r in support:
            pr = probs[r]
            lo, pmf = _hypergeom_support(n, r, m)
            for j in range(pmf.shape[0]):
                i = lo + j
                m2 = m + r - 2 * i
                if m2 == m or fit[m2] < fit[m]:
                    continue
                w = pr * pmf[j]
                if w == 0.0:
                    continue
                if fit[m2] == fit[m]:
                    return E, m
                out += w
                acc += w * E[m2]
        if out > 0.0:
            E[m] = (1.0 + acc) / out
    return E, -1


def level_chain(f: Objective, d_dist: FlipDistribution) -> ChainSolution:
    """Chain on the number of ones; elitist moves only go to strictly fitter levels."""
    n = f.n
    if d_dist.n != n:
        raise DimensionMismatch("objective and distribution sizes differ")
    if not f.level_symmetric or f.optimum is None:
        raise DimensionMismatch(f"{f.kind} on n={n} is not a level chain with unique optimum")
    levels = np.arange(n + 1)
    fit = evaluate_level(f, levels).astype(np.float64)
    order = np.argsort(-fit, kind="stable")
    support = np.flatnonzero(d_dist.probs > 0)
    support = support[support > 0].astype(np.int64)
    E, tie = _level_backsub(n, np.asarray(d_dist.probs), support, fit, order)
    if tie >= 0:
        raise DimensionMismatch(f"distinct levels share fitness at level {tie}")
    return ChainSolution("level", n, E, (n,))


def level_chain_exact(f: Objective, probs) -> list[Fraction]:
    """Rational-arithmetic level chain for small ``n``; ``probs`` are Fractions."""
    n = f.n
    fit = [Fraction(v).limit_denominator() for v in evaluate_level(f, np.arange(n + 1))]
    order = sorted(range(n + 1), key=lambda m: -fit[m])
    E: list[Fraction | None] = [None] * (n + 1)
    for m in order:
        if m == n:
            E[m] = Fraction(0)
            continue
        out = Fraction(0)
        acc = Fraction(0)
        for r, pr in enumerate(probs):
            if r == 0 or pr == 0:
                continue
            for i in range(max(0, r + m - n), min(m, r) + 1):
                m2 = m + r - 2 * i
                if m2 == m or fit[m2] <= fit[m]:
                    continue
                w = pr * hypergeom_exact(n, r, m, i)
                out += w
                acc += w * E[m2]
        E[m] = (1 + acc) / out if out else None
    return E


def hypergeom_exact(n: int, r: int, d: int, i: int) -> Fraction:
    if i < 0 or i > d or r - i < 0 or r - i > n - d:
        return Fraction(0)
    return Fraction(math.comb(d, i) * math.comb(n - d, r - i), math.comb(n, r))


def B_exact(n: int, d: int, r: int) -> Fraction:
    lo = max(-(-r // 2), r + d - n)
    return sum(((2 * i - r) * hypergeom_exact(n, r, d, i) for i in range(lo, min(d, r) + 1)), Fraction(0))


def compressed_anchored_chain(anchor_weight: float, n: int, d_dist: FlipDistribution) -> ChainSolution:
    """Chain on ``(x_1, ones among the other n-1 bits)`` for ``a x_1 + sum_{i>=2} x_i``."""
    if d_dist.n != n:
        raise DimensionMismatch("objective and distribution sizes differ")
    if n < 2:
        raise OutOfRange("need n >= 2")
    a = float(anchor_weight)
    size = 2 * n
    rows, cols, vals = [], [], []
    support = [r for r in np.flatnonzero(d_dist.probs > 0) if r > 0]
    for b in (0, 1):
        for m in range(n):
            src = b * n + m
            here = a * b + m
            for r in support:
                pr = float(d_dist.probs[r])
                for hit_first, weight, draws in ((True, r / n, r - 1), (False, 1 - r / n, r)):
                    if weight <= 0 or draws > n - 1:
                        continue
                    b2 = 1 - b if hit_first else b
                    lo, pmf = _hypergeom_support(n - 1, draws, m)
                    for j, pj in enumerate(pmf):
                        i = lo + j
                        m2 = m + draws - 2 * i
                        dst = b2 * n + m2
                        if dst == src or a * b2 + m2 < here:
                            continue
                        rows.append(src)
                        cols.append(dst)
                        vals.append(pr * weight * pj)
    target = np.zeros(size, dtype=bool)
    target[2 * n - 1] = True
    E = _solve_absorbing(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals), size, target)
    return ChainSolution("anchored", n, E, (2 * n - 1,))


def anchored_state(x: BitString) -> int:
    return int(x.bits[0]) * x.n + int(x.bits[1:].sum())


def _all_fitness(f: Objective) -> np.ndarray:
    n = f.n
    states = np.arange(2**n, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(n)) & 1).astype(np.float64)
    if f.kind == "parity_swap":
        return evaluate_level(f, bits.sum(axis=1).astype(np.int64))
    return bits @ f.weights


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(2**n, dtype=np.int64)
    for i in range(n):
        pc += (np.arange(2**n) >> i) & 1
    return pc


@njit(cache=True)
def _group_rows(members, higher, E, fit, q, pc):
    """Right-hand side, exit mass and in-group couplings for one fitness class."""
    g = members.shape[0]
    rhs = np.ones(g)
    exit_mass = np.zeros(g)
    couple = np.zeros((g, g))
    for a in range(g):
        x = members[a]
        for y in higher:
            w = q[pc[x ^ y]]
            if w > 0.0:
                exit_mass[a] += w
                rhs[a] += w * E[y]
        for c in range(g):
            if c != a:
                couple[a, c] = q[pc[x ^ members[c]]]
    return rhs, exit_mass, couple


def full_chain(f: Objective, d_dist: FlipDistribution) -> ChainSolution:
    """Exact chain over all ``2^n`` strings, solved class by class in decreasing fitness.

    Equal-fitness moves are explicit transitions; each fitness class is a
    dense linear system coupled only to fitter classes.
    """
    n = f.n
    if n > FULL_MAX_N:
        raise TooLarge(f"full chain limited to n <= {FULL_MAX_N}")
    if d_dist.n != n:
        raise DimensionMismatch("objective and distribution sizes differ")
    if f.optimum is None:
        raise DimensionMismatch("objective has no unique optimum")
    fit = _all_fitness(f)
    pc = _popcounts(n)
    q = np.array([d_dist.probs[h] / math.comb(n, h) for h in range(n + 1)])
    order = np.argsort(-fit, kind="stable")
    E = np.full(2**n, np.inf)
    top = 2**n - 1
    E[top] = 0.0
    bounds = np.concatenate(([0], np.flatnonzero(np.diff(fit[order]) != 0) + 1, [order.size]))
    if order[0] != top or bounds[1] != 1:
        raise DimensionMismatch("optimum is not unique")
    for lo, hi in zip(bounds[1:-1], bounds[2:]):
        members = order[lo:hi]
        higher = order[:lo]
        live = np.isfinite(E[higher])
        # moves into states that never finish make these members never finish
        rhs, exit_mass, couple = _group_rows(members, higher[live], E, fit, q, pc)
        bad_exit = np.zeros(members.size, dtype=bool)
        if not live.all():
            dead = higher[~live]
            bad_exit = np.array([np.any(q[pc[x ^ dead]] > 0) for x in members])
        if members.size == 1:
            ok = exit_mass[0] > 0 and not bad_exit[0]
            E[members[0]] = rhs[0] / exit_mass[0] if ok else np.inf
        else:
            E[members] = _solve_group(rhs, exit_mass, couple, bad_exit)
    return ChainSolution("full", n, E, (top,))


def _solve_group(rhs, exit_mass, couple, bad_exit) -> np.ndarray:
    g = rhs.size
    if g > DENSE_GROUP_MAX:
        raise TooLarge(f"fitness class of {g} states exceeds the dense limit {DENSE_GROUP_MAX}")
    adj = sparse.csr_matrix(couple > 0)
    # a member finishes iff it can reach an exiting member and cannot reach a doomed one
    exits = np.flatnonzero((exit_mass > 0) & ~bad_exit)
    rev = adj.T.tocsr()
    ok = np.zeros(g, dtype=bool)
    for e in exits:
        ok[csgraph.breadth_first_order(rev, e, directed=True, return_predecessors=False)] = True
    doomed = ~ok | bad_exit
    for s in np.flatnonzero(doomed):
        doomed[csgraph.breadth_first_order(rev, s, directed=True, return_predecessors=False)] = True
    out = np.full(g, np.inf)
    live = np.flatnonzero(~doomed)
    if live.size:
        sub = couple[np.ix_(live, live)]
        A = np.diag(exit_mass[live] + couple[live].sum(axis=1)) - sub
        out[live] = np.linalg.solve(A, rhs[live])
    return out


def exact_step_drift(
    f: Objective,
    d_dist: FlipDistribution,
    x: BitString,
    potential: str | PotentialWeights = "distance",
) -> float:
    """Expected one-step decrease of a potential, by enumerating every offspring.

    ``potential="distance"``: the best-so-far symmetric distance from a
    fresh parent ``x``; it is a minimum over evaluated points, so it
    drops whenever the offspring is closer, accepted or not.

    A :class:`PotentialWeights`: the weighted count of wrong bits of the
    incumbent after elitist selection.
    """
    n = f.n
    if x.n != n or d_dist.n != n:
        raise DimensionMismatch("sizes differ")
    if potential == "distance" and n > ENUM_MAX_N:
        return distance_drift_closed_form(d_dist, x.ones)
    if n > ENUM_MAX_N:
        raise TooLarge(f"enumeration limited to n <= {ENUM_MAX_N}")
    return float(step_drifts(f, d_dist, potential, states=np.array([_encode(x)]))[0])


def _encode(x: BitString) -> int:
    return int(np.dot(x.bits.astype(np.int64), 1 << np.arange(x.n, dtype=np.int64)))


def step_drifts(
    f: Objective,
    d_dist: FlipDistribution,
    potential: str | PotentialWeights = "distance",
    states: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorised :func:`exact_step_drift` over many parent states (integers)."""
    n = f.n
    if n > ENUM_MAX_N:
        raise TooLarge(f"enumeration limited to n <= {ENUM_MAX_N}")
    all_states = np.arange(2**n, dtype=np.int64)
    states = all_states if states is None else np.asarray(states, dtype=np.int64)
    pc = _popcounts(n)
    q = np.array([d_dist.probs[h] / math.comb(n, h) for h in range(n + 1)])
    if potential == "distance":
        dist = np.minimum(pc, n - pc)
        out = np.empty(states.size)
        for k, x in enumerate(states):
            prob = q[pc[x ^ all_states]]
            out[k] = np.dot(prob, np.maximum(0, dist[x] - dist))
        return out
    pw = potential
    bits = ((all_states[:, None] >> np.arange(n)) & 1).astype(np.float64)
    pot = (1.0 - bits) @ pw.g
    fit = _all_fitness(f)
    out = np.empty(states.size)
    for k, x in enumerate(states):
        prob = q[pc[x ^ all_states]]
        accepted = fit >= fit[x]
        out[k] = np.dot(prob[accepted], pot[x] - pot[accepted])
    return out


def distance_drift_closed_form(d_dist: FlipDistribution, ones: int) -> float:
    """Drift of the best-so-far distance from a fresh parent with ``ones`` one-bits.

    Sums ``max(0, d - d(child))`` over flip counts and hypergeometric
    splits directly, without the mirrored-coefficient identity.
    """
    n = d_dist.n
    d = min(ones, n - ones)
    total = 0.0
    for r in np.flatnonzero(d_dist.probs > 0):
        if r == 0:
            continue
        lo, pmf = _hypergeom_support(n, int(r), ones)
        om2 = ones + r - 2 * (lo + np.arange(pmf.size))
        gain = np.maximum(0, d - np.minimum(om2, n - om2))
        total += d_dist.probs[r] * float(np.dot(pmf, gain))
    return total


def time_from_distance(sol: ChainSolution, d: int) -> float:
    """Expected time from a level-chain start with ``d`` wrong bits."""
    if sol.space != "level":
        raise DimensionMismatch("only defined on level chains")
    return sol.time_from(sol.n - d)


def parent_with_ones(n: int, ones: int) -> BitString:
    bits = np.zeros(n, dtype=np.uint8)
    bits[:ones] = 1
    return BitString(bits)


__all__ = [
    "ChainSolution",
    "level_chain",
    "level_chain_exact",
    "full_chain",
    "compressed_anchored_chain",
    "exact_step_drift",
    "step_drifts",
    "distance_drift_closed_form",
    "hypergeom_exact",
    "B_exact",
    "anchored_state",
    "time_from_distance",
    "parent_with_ones",
    "distance",
]
