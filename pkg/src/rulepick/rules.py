"""Rank-aggregation rules: positional scoring families, Kemeny, Plackett-Luce
maximum likelihood, instant-runoff, trimmed Borda, and score aggregators.

Every rule maps a profile to a weak ranking over all ``m`` alternatives,
with unranked alternatives scored as if absent (they end up in the bottom
tie-group of positional rules).  Rules consume ballot counts rather than
voter order, so relabeling voters can never change an output.

Positional rules carry an exact integer form of each named family's scoring
weights.  On profiles whose ballots all share one length, scores are computed
in integer arithmetic, which makes ties exact instead of
floating-point-coincidental; the float form is the integer form divided by
its first entry.
"""

from __future__ import annotations

import math
import statistics
import time
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from rulepick.core import Profile, WeakRanking, empty_ranking, pairwise_matrix, position_counts

__all__ = [
    "IRV",
    "Kemeny",
    "NAMED_FAMILIES",
    "PlackettLuceMLE",
    "Positional",
    "SCORE_AGGREGATORS",
    "TrimmedBorda",
    "aggregate_scores",
    "apply_positional",
    "apply_rule",
    "irv_ranking",
    "kemeny_ranking",
    "named_vector",
    "normalize_vector",
    "plackett_luce_mle",
    "reverse_rule",
    "rule_from_name",
    "scores_to_ranking",
    "trimmed_borda_ranking",
]

NAMED_FAMILIES = (
    "plurality",
    "veto",
    "borda",
    "two_approval",
    "plurality_veto",
    "f1_1991",
    "f1_2003",
    "f1_2010",
    "leximax",
    "medal_count",
)

# Prefixes of integer score vectors for families defined by a fixed table;
# truncations are shifted so the last kept entry is 0 (an affine change that
# preserves the induced ranking).
_TABLE_PREFIXES = {
    "f1_1991": (10, 6, 4, 3, 2, 1),
    "f1_2003": (10, 8, 6, 5, 4, 3, 2, 1),
    "f1_2010": (25, 18, 15, 12, 10, 8, 6, 4, 2, 1),
}

# Families whose tail entries carry meaning (tie-break magnitudes, flat medal
# credit): truncated/padded literally, never shifted.
_LITERAL_PREFIXES = {
    "leximax": (1_000_000, 1_000, 1),
    "medal_count": (1, 1, 1),
}

_LEXIMAX_BOUND = 1_000

_REVERSAL_PARTNERS = {
    "plurality": "veto",
    "veto": "plurality",
    "borda": "borda",
    "plurality_veto": "plurality_veto",
}


def _family_int_weights(family: str, k: int) -> tuple[int, ...]:
    """Exact integer scoring weights of a named family for ballots of length k."""
    if k < 1:
        raise ValueError("ballot length must be at least 1")
    if family == "plurality":
        return (1,) + (0,) * (k - 1)
    if family == "veto":
        return (1,) * (k - 1) + (0,)
    if family == "borda":
        return tuple(range(k - 1, -1, -1))
    if family == "two_approval":
        return (1,) * min(2, k) + (0,) * max(0, k - 2)
    if family == "plurality_veto":
        if k == 1:
            return (1,)
        return (2,) + (1,) * (k - 2) + (0,)
    if family in _TABLE_PREFIXES:
        prefix = _TABLE_PREFIXES[family]
        padded = prefix + (0,) * max(0, k - len(prefix))
        w = padded[:k]
        return tuple(x - w[-1] for x in w)
    if family in _LITERAL_PREFIXES:
        prefix = _LITERAL_PREFIXES[family]
        padded = prefix + (0,) * max(0, k - len(prefix))
        return padded[:k]
    raise ValueError(f"unknown scoring family {family!r}; expected one of {NAMED_FAMILIES}")


def _family_float_weights(family: str, k: int) -> tuple[float, ...]:
    ints = _family_int_weights(family, k)
    if ints[0] == 0:
        return (0.0,) * k
    return tuple(x / ints[0] for x in ints)


def named_vector(family: str, m: int) -> tuple[float, ...]:
    """Scoring vector of a named family for ``m`` alternatives.

    Args:
        family: One of ``NAMED_FAMILIES``.
        m: Number of alternatives (ballot length the vector is built for).

    Returns:
        A non-increasing float vector with first entry 1 (or all zeros when
        the family scores nothing at this length, e.g. veto at m = 1).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    return _family_float_weights(family, m)


def normalize_vector(raw: Sequence[float]) -> tuple[float, ...]:
    """Affinely rescale a score vector to run from 1 down to 0.

    Args:
        raw: Non-increasing scores, length at least 2, not all equal.

    Returns:
        ``(raw - min) / (max - min)`` as a tuple.
    """
    xs = [float(x) for x in raw]
    if len(xs) < 2:
        raise ValueError("scoring vector needs at least 2 entries")
    if not all(math.isfinite(x) for x in xs):
        raise ValueError("scoring vector entries must be finite")
    for a, b in zip(xs, xs[1:]):
        if b > a:
            raise ValueError("scoring vector must be non-increasing")
    lo, hi = xs[-1], xs[0]
    if hi == lo:
        raise ValueError("constant scoring vector does not rank anything")
    return tuple((x - lo) / (hi - lo) for x in xs)


def _ranking_from_totals(totals: np.ndarray) -> WeakRanking:
    """Group alternatives by equal score, best (largest) first."""
    totals = np.asarray(totals)
    values, inverse = np.unique(-totals, return_inverse=True)
    groups: list[list[int]] = [[] for _ in range(len(values))]
    for a, g in enumerate(inverse):
        groups[g].append(a)
    return WeakRanking(tuple(tuple(g) for g in groups))


@dataclass(frozen=True)
class Positional:
    """A positional scoring rule: a named family or a custom score vector.

    Exactly one of ``family`` / ``vector`` is set.  Custom vectors are
    normalized on construction; on ballots shorter than the vector, the
    leading entries are affinely renormalized (a constant prefix degenerates
    to scoring bare appearances).
    """

    family: str | None = None
    vector: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if (self.family is None) == (self.vector is None):
            raise ValueError("set exactly one of family= or vector=")
        if self.family is not None and self.family not in NAMED_FAMILIES:
            raise ValueError(
                f"unknown scoring family {self.family!r}; expected one of {NAMED_FAMILIES}"
            )
        if self.vector is not None:
            object.__setattr__(self, "vector", normalize_vector(self.vector))

    @classmethod
    def named(cls, family: str) -> "Positional":
        return cls(family=family)

    @classmethod
    def from_scores(cls, raw: Sequence[float]) -> "Positional":
        return cls(vector=tuple(float(x) for x in raw))

    @property
    def label(self) -> str:
        if self.family is not None:
            return self.family
        return "vector:" + ",".join(repr(v) for v in self.vector)

    def int_weights_at(self, k: int) -> np.ndarray | None:
        """Integer weights for ballots of length ``k`` (None for custom vectors)."""
        if self.family is None:
            return None
        return np.array(_family_int_weights(self.family, k), dtype=np.int64)

    def weights_at(self, k: int) -> np.ndarray:
        """Float weights for ballots of length ``k``."""
        if self.family is not None:
            return np.array(_family_float_weights(self.family, k), dtype=np.float64)
        if k > len(self.vector):
            raise ValueError(
                f"ballots of length {k} exceed the {len(self.vector)}-entry scoring vector"
            )
        prefix = self.vector[:k]
        lo, hi = prefix[-1], prefix[0]
        if hi == lo:
            # All-equal prefix: every listed alternative gets full credit.
            return np.ones(k, dtype=np.float64)
        return np.array([(x - lo) / (hi - lo) for x in prefix], dtype=np.float64)

    def apply(self, p: Profile) -> WeakRanking:
        lengths = sorted(p.ballot_lengths())
        if not lengths:
            return empty_ranking(p.m)
        if self.family == "leximax":
            counts = position_counts(p)
            if counts.max() >= _LEXIMAX_BOUND:
                raise ValueError(
                    "leximax scoring is only faithful while every alternative "
                    f"appears fewer than {_LEXIMAX_BOUND} times at each position"
                )
        if self.family is not None and len(lengths) == 1:
            k = lengths[0]
            weights = self.int_weights_at(k)
            totals = position_counts(p, width=k) @ weights
            return _ranking_from_totals(totals)
        totals = np.zeros(p.m, dtype=np.float64)
        for k in lengths:
            sub = Profile(p.m, tuple(b for b in p.rankings if len(b) == k))
            totals = totals + position_counts(sub, width=k) @ self.weights_at(k)
        return _ranking_from_totals(totals)


def apply_positional(scores, p: Profile) -> WeakRanking:
    """Apply a positional rule or raw score vector to a profile.

    Args:
        scores: A ``Positional`` rule, a family name, or a score sequence
            (normalized on the fly).
        p: Profile to aggregate.

    Returns:
        Weak ranking over all ``p.m`` alternatives by total score, descending.
    """
    if isinstance(scores, Positional):
        rule = scores
    elif isinstance(scores, str):
        rule = Positional.named(scores)
    else:
        rule = Positional.from_scores(scores)
    return rule.apply(p)


def _kemeny_cost_matrix(p: Profile) -> list[list[int]]:
    return [[int(x) for x in row] for row in pairwise_matrix(p)]


def _kemeny_exact(pref: list[list[int]]) -> tuple[int, ...]:
    """Lexicographically smallest minimum-cost strict order, by subset DP.

    ``b[mask]`` is the cheapest way to order the alternatives outside
    ``mask`` below the (already placed) ones inside it.
    """
    m = len(pref)
    full = (1 << m) - 1
    b = [0] * (1 << m)
    for mask in range(full - 1, -1, -1):
        best = None
        for a in range(m):
            if mask >> a & 1:
                continue
            pen = 0
            for c in range(m):
                if c != a and not mask >> c & 1:
                    pen += pref[c][a]
            cand = pen + b[mask | (1 << a)]
            if best is None or cand < best:
                best = cand
        b[mask] = best
    order = []
    mask = 0
    while mask != full:
        for a in range(m):
            if mask >> a & 1:
                continue
            pen = 0
            for c in range(m):
                if c != a and not mask >> c & 1:
                    pen += pref[c][a]
            if pen + b[mask | (1 << a)] == b[mask]:
                order.append(a)
                mask |= 1 << a
                break
    return tuple(order)


def _kemeny_local(pref: list[list[int]], time_budget: float) -> tuple[int, ...]:
    """Best-improvement insertion search from a Borda-style start."""
    m = len(pref)
    wins = [sum(row) for row in pref]
    order = sorted(range(m), key=lambda a: (-wins[a], a))
    deadline = time.monotonic() + time_budget
    while True:
        best_delta = 0
        best_move = None
        for i in range(m):
            a = order[i]
            delta = 0
            for j in range(i + 1, m):  # move a down to position j
                e = order[j]
                delta += pref[a][e] - pref[e][a]
                if delta < best_delta:
                    best_delta, best_move = delta, (i, j)
            delta = 0
            for j in range(i - 1, -1, -1):  # move a up to position j
                e = order[j]
                delta += pref[e][a] - pref[a][e]
                if delta < best_delta:
                    best_delta, best_move = delta, (i, j)
        if best_move is None:
            break
        i, j = best_move
        a = order.pop(i)
        order.insert(j, a)
        if time.monotonic() > deadline:
            break
    return tuple(order)


def kemeny_ranking(p: Profile, time_budget: float = 1.0, exact_threshold: int = 10) -> WeakRanking:
    """Kemeny consensus: the strict order minimizing summed pairwise
    disagreements with the ballots.

    Args:
        p: Profile (ballots may be partial; only pairs ranked by a voter
            count against that voter).
        time_budget: Seconds allowed for local search above the exact
            threshold; checked between improvement passes.
        exact_threshold: Largest ``m`` solved exactly by subset DP.  Exact
            answers break ties toward the lexicographically smallest order.

    Returns:
        A strict ranking of all alternatives.
    """
    if time_budget <= 0:
        raise ValueError("time_budget must be positive")
    if exact_threshold < 1:
        raise ValueError("exact_threshold must be at least 1")
    if p.n == 0:
        return empty_ranking(p.m)
    pref = _kemeny_cost_matrix(p)
    if p.m <= exact_threshold:
        order = _kemeny_exact(pref)
    else:
        order = _kemeny_local(pref, time_budget)
    return WeakRanking.from_strict(order)


def plackett_luce_mle(
    p: Profile, tolerance: float = 1e-6, max_iterations: int = 2000
) -> WeakRanking:
    """Rank alternatives by fitted Plackett-Luce strengths.

    Fits strengths by minorization-maximization with a small pseudo-count
    (1e-6) added to both the win counts and the stage denominators, which
    keeps the iteration finite on profiles where some alternative never
    loses (or never appears).  Strengths are renormalized to mean 1 each
    iteration; iteration stops when every coordinate of the likelihood
    stationarity residual is at most ``tolerance``.

    Alternatives whose sorted strengths differ by at most ``tolerance`` are
    chained into a tie-group.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    if p.n == 0:
        return empty_ranking(p.m)
    m = p.m
    eps = 1e-6
    types = p.ballot_multiset()
    wins = np.zeros(m, dtype=np.float64)
    staged = []
    for ballot, count in types:
        for a in ballot[:-1]:
            wins[a] += count
        if len(ballot) >= 2:
            staged.append((np.array(ballot, dtype=np.intp), float(count)))
    alpha = np.ones(m, dtype=np.float64)
    for _ in range(max_iterations):
        denom = np.zeros(m, dtype=np.float64)
        for arr, count in staged:
            vals = alpha[arr]
            suffix = np.cumsum(vals[::-1])[::-1]
            inv = count / suffix[:-1]
            cum = np.cumsum(inv)
            contrib = np.concatenate([cum, cum[-1:]])
            np.add.at(denom, arr, contrib)
        resid = (wins + eps) - alpha * (denom + eps)
        if np.max(np.abs(resid)) <= tolerance:
            break
        alpha = (wins + eps) / (denom + eps)
        alpha = alpha / (math.fsum(alpha) / m)
    order = sorted(range(m), key=lambda a: (-alpha[a], a))
    groups: list[list[int]] = [[order[0]]]
    for prev, a in zip(order, order[1:]):
        if alpha[prev] - alpha[a] > tolerance:
            groups.append([a])
        else:
            groups[-1].append(a)
    return WeakRanking.from_groups(groups)


def irv_ranking(p: Profile) -> WeakRanking:
    """Instant-runoff order: alternatives ranked by reverse elimination.

    Repeatedly deletes the alternative with the fewest first-place votes
    among survivors (smallest id on ties).  Requires full ballots.
    """
    if p.n == 0:
        return empty_ranking(p.m)
    if not p.is_full():
        raise ValueError("IRV requires full rankings")
    types = p.ballot_multiset()
    alive = set(range(p.m))
    eliminated: list[int] = []
    while len(alive) > 1:
        counts = dict.fromkeys(alive, 0)
        for ballot, count in types:
            for a in ballot:
                if a in alive:
                    counts[a] += count
                    break
        least = min(counts.values())
        loser = min(a for a in alive if counts[a] == least)
        alive.remove(loser)
        eliminated.append(loser)
    order = [alive.pop(), *reversed(eliminated)]
    return WeakRanking.from_strict(order)


def trimmed_borda_ranking(p: Profile) -> WeakRanking:
    """Borda on position counts after dropping each alternative's single best
    and single worst placement.

    Requires a uniform ballot length.  Alternatives ranked fewer than 3 times
    are kept untrimmed (with a warning): trimming would erase their signal
    entirely.
    """
    if p.n == 0:
        return empty_ranking(p.m)
    lengths = p.ballot_lengths()
    if len(lengths) != 1:
        raise ValueError("trimmed Borda requires a uniform ballot length")
    width = next(iter(lengths))
    counts = position_counts(p, width=width)
    trimmed = counts.copy()
    untrimmed = []
    for a in range(p.m):
        total = int(counts[a].sum())
        if total >= 3:
            nz = np.nonzero(counts[a])[0]
            trimmed[a, nz[0]] -= 1
            trimmed[a, nz[-1]] -= 1
        elif total > 0:
            untrimmed.append(a)
    if untrimmed:
        warnings.warn(
            f"alternatives ranked fewer than 3 times kept untrimmed: {untrimmed}",
            stacklevel=2,
        )
    weights = np.arange(width - 1, -1, -1, dtype=np.int64)
    return _ranking_from_totals(trimmed @ weights)


@dataclass(frozen=True)
class Kemeny:
    """Kemeny consensus rule (exact for small m, local search above)."""

    time_budget: float = 1.0
    exact_threshold: int = 10

    def __post_init__(self) -> None:
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        if self.exact_threshold < 1:
            raise ValueError("exact_threshold must be at least 1")

    @property
    def label(self) -> str:
        return "kemeny"

    def apply(self, p: Profile) -> WeakRanking:
        return kemeny_ranking(p, self.time_budget, self.exact_threshold)


@dataclass(frozen=True)
class PlackettLuceMLE:
    """Plackett-Luce maximum-likelihood rule."""

    tolerance: float = 1e-6
    max_iterations: int = 2000

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @property
    def label(self) -> str:
        return "pl_mle"

    def apply(self, p: Profile) -> WeakRanking:
        return plackett_luce_mle(p, self.tolerance, self.max_iterations)


@dataclass(frozen=True)
class IRV:
    """Instant-runoff rule (full ballots only)."""

    @property
    def label(self) -> str:
        return "irv"

    def apply(self, p: Profile) -> WeakRanking:
        return irv_ranking(p)


@dataclass(frozen=True)
class TrimmedBorda:
    """Trimmed Borda rule (uniform ballot length)."""

    @property
    def label(self) -> str:
        return "trimmed_borda"

    def apply(self, p: Profile) -> WeakRanking:
        return trimmed_borda_ranking(p)


def apply_rule(rule, p: Profile) -> WeakRanking:
    """Apply any rule object (anything with ``.apply``) to a profile."""
    return rule.apply(p)


def reverse_rule(rule: Positional) -> Positional:
    """The rule that ranks by how badly the original would, i.e. the original
    applied to reversed ballots, read back-to-front.

    Named families map to named partners where one exists (plurality/veto
    swap; Borda and plurality-veto are self-paired).  Custom vectors map to
    ``1 - reversed(vector)``.
    """
    if not isinstance(rule, Positional):
        raise ValueError("reversal partners are defined for positional rules only")
    if rule.family is not None:
        partner = _REVERSAL_PARTNERS.get(rule.family)
        if partner is None:
            raise ValueError(f"{rule.family} has no named reversal partner")
        return Positional.named(partner)
    return Positional.from_scores(tuple(1.0 - v for v in reversed(rule.vector)))


def rule_from_name(name: str):
    """Parse a rule name as used on the command line.

    Accepts named positional families, ``kemeny``, ``pl_mle``, ``irv``,
    ``trimmed_borda``, and ``vector:1,0.5,0`` for custom scoring vectors.
    """
    name = name.strip()
    if name in NAMED_FAMILIES:
        return Positional.named(name)
    if name == "kemeny":
        return Kemeny()
    if name == "pl_mle":
        return PlackettLuceMLE()
    if name == "irv":
        return IRV()
    if name == "trimmed_borda":
        return TrimmedBorda()
    if name.startswith("vector:"):
        body = name[len("vector:") :]
        try:
            raw = tuple(float(x) for x in body.split(","))
        except ValueError as exc:
            raise ValueError(f"bad scoring vector {body!r}") from exc
        return Positional.from_scores(raw)
    raise ValueError(
        f"unknown rule {name!r}; expected a scoring family, kemeny, pl_mle, irv, "
        "trimmed_borda, or vector:..."
    )


SCORE_AGGREGATORS = ("mean", "min", "max", "median", "geometric_mean", "trimmed_mean")


def aggregate_scores(aggregator: str, scores: Sequence[float]) -> float:
    """Collapse a list of scores to one number.

    Args:
        aggregator: One of ``SCORE_AGGREGATORS``.
        scores: Non-empty score list.  ``geometric_mean`` requires strictly
            positive scores; ``trimmed_mean`` requires at least 3.
    """
    xs = [float(x) for x in scores]
    if not xs:
        raise ValueError("empty score list")
    if aggregator == "mean":
        return math.fsum(xs) / len(xs)
    if aggregator == "min":
        return min(xs)
    if aggregator == "max":
        return max(xs)
    if aggregator == "median":
        return float(statistics.median(xs))
    if aggregator == "geometric_mean":
        if min(xs) <= 0.0:
            raise ValueError("geometric mean requires strictly positive scores")
        return math.exp(math.fsum(map(math.log, xs)) / len(xs))
    if aggregator == "trimmed_mean":
        if len(xs) < 3:
            raise ValueError("trimmed mean requires at least 3 scores")
        kept = sorted(xs)[1:-1]
        return math.fsum(kept) / len(kept)
    raise ValueError(f"unknown aggregator {aggregator!r}; expected one of {SCORE_AGGREGATORS}")


def scores_to_ranking(scores: Mapping[int, float]) -> WeakRanking:
    """Rank ids by score, descending; exactly equal scores tie.

    Args:
        scores: Mapping from id to score; the ranking covers exactly its keys.
    """
    if not scores:
        raise ValueError("empty score mapping")
    items = sorted(scores, key=lambda a: (-scores[a], a))
    groups: list[list[int]] = [[items[0]]]
    for prev, a in zip(items, items[1:]):
        if scores[a] == scores[prev]:
            groups[-1].append(a)
        else:
            groups.append([a])
    return WeakRanking.from_groups(groups)
