"""Picking rules by how consistently they aggregate random halves of a
profile.

The central quantity is the expected (normalized, tie-aware) Kendall-Tau
distance between a rule's outputs on the two sides of a uniformly random
voter split.  ``pick_rule`` returns the candidate minimizing a Monte Carlo
estimate of that expectation; ``exact_disagreement`` computes it exactly by
enumerating split classes.

Determinism contract: for a given seed, every candidate rule is evaluated on
the identical split sequence (common random numbers), per-split RNG streams
are derived from the seed by split index, and means are accumulated with
correctly-rounded summation — so results are byte-identical regardless of
evaluation order or ``jobs``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from rulepick.core import Profile, WeakRanking, empty_ranking
from rulepick.errors import ResourceLimitError
from rulepick.kernels import pair_counts, pair_sums
from rulepick.metrics import kt_with_ties, mean_and_sem
from rulepick.rules import Positional, aggregate_scores, scores_to_ranking

__all__ = [
    "DisagreementReport",
    "PickResult",
    "SplitStats",
    "alternative_weights",
    "disagreement_on_splits",
    "estimate_disagreement",
    "exact_disagreement",
    "pick_aggregator",
    "pick_rule",
    "random_split",
    "score_split",
    "side_profiles",
    "split_disagreement",
    "split_sequence",
]

DEFAULT_CLASS_LIMIT = 1 << 21


@dataclass(frozen=True)
class SplitStats:
    """Per-rule summary of split disagreements: mean, SEM, per-split values."""

    mean: float
    sem: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class DisagreementReport:
    """Everything needed to reproduce a disagreement evaluation."""

    labels: tuple[str, ...]
    stats: tuple[SplitStats, ...]
    seed: int | None
    n_splits: int
    method: str
    weighting: str
    normalized: bool
    skip_empty: bool
    m: int
    n: int

    def by_label(self) -> dict[str, SplitStats]:
        return dict(zip(self.labels, self.stats))


@dataclass(frozen=True)
class PickResult:
    """Outcome of a rule (or aggregator) pick.

    ``argmin`` lists, in candidate order, everything within ``tie_epsilon``
    of the smallest mean; ``chosen`` is its first element.
    """

    argmin: tuple
    chosen: object
    report: DisagreementReport


def _resolve_weighting(weighting: str, p: Profile) -> bool:
    if weighting == "auto":
        return not p.is_full()
    if weighting == "on":
        return True
    if weighting == "off":
        return False
    raise ValueError("weighting must be 'on', 'off', or 'auto'")


def random_split(p: Profile, rng_seed) -> tuple[int, ...]:
    """Assign each voter independently to side 1 or 2, seeded.

    Args:
        p: Profile whose voters are split.
        rng_seed: Any ``numpy.random.SeedSequence``-compatible seed.

    Returns:
        Per-voter side tags in {1, 2}.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(rng_seed)))
    return tuple(int(s) for s in rng.integers(1, 3, size=p.n))


def split_sequence(p: Profile, seed: int, n_splits: int) -> tuple[tuple[int, ...], ...]:
    """The canonical seeded sequence of splits used by every estimator here.

    Split ``i`` comes from the child seed ``SeedSequence(seed, spawn_key=(i,))``,
    so any prefix of the sequence is stable under changes to ``n_splits`` and
    splits can be generated independently by parallel workers.
    """
    if n_splits < 1:
        raise ValueError("n_splits must be at least 1")
    out = []
    for i in range(n_splits):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.PCG64(ss))
        out.append(tuple(int(s) for s in rng.integers(1, 3, size=p.n)))
    return tuple(out)


def side_profiles(p: Profile, split: Sequence[int]) -> tuple[Profile, Profile]:
    """Restrict a profile to each side of a split (possibly empty sides)."""
    if len(split) != p.n:
        raise ValueError("split length does not match voter count")
    side1 = []
    side2 = []
    for ballot, tag in zip(p.rankings, split):
        if tag == 1:
            side1.append(ballot)
        elif tag == 2:
            side2.append(ballot)
        else:
            raise ValueError("split tags must be 1 or 2")
    return Profile(p.m, tuple(side1)), Profile(p.m, tuple(side2))


def _appearance_counts(p: Profile) -> np.ndarray:
    app = np.zeros(p.m, dtype=np.int64)
    for ballot in p.rankings:
        for a in ballot:
            app[a] += 1
    return app


def _weights_from_counts(app1: np.ndarray, app2: np.ndarray, gamma: float) -> np.ndarray:
    """Per-alternative weights from per-side appearance counts.

    ``w_a = (gamma^{min(app1, app2)} - 1) / (gamma^{total/2} - 1)``: 1.0 for an
    alternative split evenly across sides, 0 for one absent from a side.
    """
    total = app1 + app2
    smaller = np.minimum(app1, app2)
    w = np.zeros(total.shape[0], dtype=np.float64)
    pos = total > 0
    w[pos] = (gamma ** smaller[pos].astype(np.float64) - 1.0) / (
        gamma ** (total[pos].astype(np.float64) / 2.0) - 1.0
    )
    return w


def alternative_weights(p: Profile, split: Sequence[int], gamma: float = 2.0) -> np.ndarray:
    """Weights discounting alternatives that land unevenly across a split.

    Args:
        p: Profile.
        split: Per-voter side tags in {1, 2}.
        gamma: Discount base, must exceed 1.

    Returns:
        Array of length ``p.m``; 0 for alternatives missing from either side
        (including ones never ranked at all).
    """
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    p1, p2 = side_profiles(p, split)
    return _weights_from_counts(_appearance_counts(p1), _appearance_counts(p2), gamma)


def _pair_value(
    g1: np.ndarray, g2: np.ndarray, w: np.ndarray | None, normalized: bool, m: int
) -> float:
    """Distance between two tie-group arrays, optionally weighted/normalized."""
    if w is None:
        disc, tied = pair_counts(g1, g2)
        raw = disc + 0.5 * tied
        if not normalized:
            return raw
        npairs = m * (m - 1) // 2
        return raw / npairs if npairs else 0.0
    num, den = pair_sums(g1, g2, w)
    if not normalized:
        return num
    return num / den if den != 0.0 else 0.0


def _output_groups(r: WeakRanking, m: int) -> np.ndarray:
    g = r.group_index(m)
    if np.any(g < 0):
        raise ValueError("rule output does not rank every alternative")
    return g


def _split_values(
    rules: Sequence, p: Profile, split: Sequence[int], weighting_on: bool, normalized: bool
) -> list[float]:
    """One split, all rules, sharing side profiles and weights."""
    p1, p2 = side_profiles(p, split)
    w = None
    if weighting_on:
        w = _weights_from_counts(_appearance_counts(p1), _appearance_counts(p2), 2.0)
    out = []
    for rule in rules:
        r1 = rule.apply(p1) if p1.n else empty_ranking(p.m)
        r2 = rule.apply(p2) if p2.n else empty_ranking(p.m)
        out.append(
            _pair_value(_output_groups(r1, p.m), _output_groups(r2, p.m), w, normalized, p.m)
        )
    return out


def split_disagreement(
    rule, p: Profile, split: Sequence[int], weighting: str = "auto", normalized: bool = True
) -> float:
    """Distance between a rule's outputs on the two sides of one split.

    Args:
        rule: Any rule object with ``.apply``.
        p: Profile.
        split: Per-voter side tags in {1, 2}.
        weighting: 'on', 'off', or 'auto' (on exactly when the profile has
            partial ballots).
        normalized: Divide by the distance's maximum under the same weights.

    Returns:
        A float in [0, 1] when normalized.  An empty side contributes the
        all-tied ranking as that side's output.
    """
    won = _resolve_weighting(weighting, p)
    return _split_values([rule], p, split, won, normalized)[0]


def _chunk_worker(args) -> list[list[float] | None]:
    p, rules, splits, weighting_on, normalized, skip_empty = args
    rows: list[list[float] | None] = []
    for split in splits:
        if skip_empty and (1 not in split or 2 not in split):
            rows.append(None)
            continue
        rows.append(_split_values(rules, p, split, weighting_on, normalized))
    return rows


def _rows_on_splits(
    rules: Sequence,
    p: Profile,
    splits: Sequence[Sequence[int]],
    weighting_on: bool,
    normalized: bool,
    skip_empty: bool,
    jobs: int | None,
) -> list[list[float] | None]:
    if jobs is not None and jobs > 1 and len(splits) > 1:
        chunks = max(1, math.ceil(len(splits) / (4 * jobs)))
        batches = [
            (p, rules, splits[i : i + chunks], weighting_on, normalized, skip_empty)
            for i in range(0, len(splits), chunks)
        ]
        rows: list[list[float] | None] = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_chunk_worker, batches):
                rows.extend(part)
        return rows
    return _chunk_worker((p, rules, splits, weighting_on, normalized, skip_empty))


def _stats_from_rows(
    rows: list[list[float] | None], n_rules: int
) -> list[SplitStats]:
    kept = [row for row in rows if row is not None]
    stats = []
    for i in range(n_rules):
        values = tuple(row[i] for row in kept)
        if not values:
            stats.append(SplitStats(0.0, 0.0, ()))
            continue
        mean, sem = mean_and_sem(values)
        stats.append(SplitStats(mean, sem, values))
    return stats


def disagreement_on_splits(
    rule,
    p: Profile,
    splits: Sequence[Sequence[int]],
    weighting: str = "auto",
    normalized: bool = True,
    skip_empty: bool = False,
) -> SplitStats:
    """Mean/SEM of a rule's disagreement over an explicit split collection.

    This is the objective the annealer optimizes; evaluating candidate rules
    on the same ``splits`` makes their means directly comparable.
    """
    won = _resolve_weighting(weighting, p)
    rows = _rows_on_splits([rule], p, splits, won, normalized, skip_empty, None)
    return _stats_from_rows(rows, 1)[0]


class _ClassEvaluator:
    """Evaluates all rules on a split described by per-ballot-type side counts.

    Identical voters are interchangeable, so a split's value depends only on
    how many voters of each distinct ballot went to side 2.  Named positional
    rules on uniform-length profiles take an integer fast path; everything
    else rebuilds the side profiles (rules only consume ballot counts, so the
    result is bit-identical either way).
    """

    def __init__(self, p: Profile, rules: Sequence, weighting_on: bool, normalized: bool):
        self.m = p.m
        self.rules = list(rules)
        self.weighting_on = weighting_on
        self.normalized = normalized
        self.types = p.ballot_multiset()
        self.counts = np.array([c for _, c in self.types], dtype=np.int64)
        ntypes = len(self.types)
        self.app = np.zeros((ntypes, self.m), dtype=np.int64)
        for t, (ballot, _) in enumerate(self.types):
            for a in ballot:
                self.app[t, a] += 1
        lengths = {len(ballot) for ballot, _ in self.types}
        self.fast = (
            len(lengths) == 1
            and all(isinstance(r, Positional) and r.family is not None for r in self.rules)
            and all(r.family != "leximax" for r in self.rules)
        )
        if self.fast:
            width = next(iter(lengths))
            self.type_counts = np.zeros((ntypes, self.m, width), dtype=np.int64)
            for t, (ballot, _) in enumerate(self.types):
                for pos, a in enumerate(ballot):
                    self.type_counts[t, a, pos] = 1
            self.full_counts = np.tensordot(self.counts, self.type_counts, axes=1)
            self.int_weights = [r.int_weights_at(width) for r in self.rules]

    def side2_total(self, k2: np.ndarray) -> int:
        return int(k2.sum())

    def evaluate(self, k2: np.ndarray) -> list[float]:
        k1 = self.counts - k2
        w = None
        if self.weighting_on:
            app2 = k2 @ self.app
            app1 = (k1 @ self.app) if len(self.types) else np.zeros(self.m, dtype=np.int64)
            w = _weights_from_counts(app1, app2, 2.0)
        if self.fast:
            m2 = np.tensordot(k2, self.type_counts, axes=1)
            m1 = self.full_counts - m2
            out = []
            for weights in self.int_weights:
                g1 = np.unique(-(m1 @ weights), return_inverse=True)[1]
                g2 = np.unique(-(m2 @ weights), return_inverse=True)[1]
                out.append(_pair_value(g1, g2, w, self.normalized, self.m))
            return out
        ballots1 = []
        ballots2 = []
        for t, (ballot, _) in enumerate(self.types):
            ballots1.extend([ballot] * int(k1[t]))
            ballots2.extend([ballot] * int(k2[t]))
        p1 = Profile(self.m, tuple(ballots1))
        p2 = Profile(self.m, tuple(ballots2))
        out = []
        for rule in self.rules:
            r1 = rule.apply(p1) if p1.n else empty_ranking(self.m)
            r2 = rule.apply(p2) if p2.n else empty_ranking(self.m)
            out.append(
                _pair_value(
                    _output_groups(r1, self.m), _output_groups(r2, self.m), w, self.normalized, self.m
                )
            )
        return out


def _exact_value_counters(
    rules: Sequence,
    p: Profile,
    weighting_on: bool,
    normalized: bool,
    skip_empty: bool,
    class_limit: int,
) -> tuple[list[Counter], int]:
    """Multiset of per-split values for each rule, over all 2^n splits.

    Returns one ``Counter`` (value -> number of splits) per rule plus the
    total number of splits counted.  Enumeration is over classes of splits
    that agree on how many copies of each distinct ballot go to each side.
    """
    ev = _ClassEvaluator(p, rules, weighting_on, normalized)
    counts = [c for _, c in ev.types]
    n_classes = math.prod(c + 1 for c in counts)
    if n_classes > class_limit:
        raise ResourceLimitError(
            f"exact enumeration needs {n_classes} split classes "
            f"(limit {class_limit}); too many voters — use Monte Carlo estimation"
        )
    n = p.n
    counters: list[Counter] = [Counter() for _ in rules]
    total = 0
    for ks in itertools.product(*(range(c + 1) for c in counts)):
        n2 = sum(ks)
        if skip_empty and (n2 == 0 or n2 == n):
            continue
        weight = math.prod(math.comb(c, k) for c, k in zip(counts, ks))
        values = ev.evaluate(np.array(ks, dtype=np.int64))
        for counter, v in zip(counters, values):
            counter[v] += weight
        total += weight
    return counters, total


def _counter_mean(counter: Counter, total: int) -> float:
    """Exactly-rounded mean of a value multiset (each value a binary float)."""
    if total == 0:
        return 0.0
    acc = Fraction(0)
    for v, c in sorted(counter.items()):
        acc += Fraction(v) * c
    return float(acc / total)


def exact_disagreement(
    rule,
    p: Profile,
    weighting: str = "auto",
    normalized: bool = True,
    skip_empty: bool = False,
    class_limit: int = DEFAULT_CLASS_LIMIT,
) -> float:
    """Exact expected split disagreement over all 2^n equiprobable splits.

    Feasibility is bounded by the number of split *classes* — the product of
    (count + 1) over distinct ballots — so profiles with many repeated
    ballots stay exact far beyond the naive 2^n limit.

    Raises:
        ResourceLimitError: If the class count exceeds ``class_limit``.
    """
    won = _resolve_weighting(weighting, p)
    counters, total = _exact_value_counters(
        [rule], p, won, normalized, skip_empty, class_limit
    )
    return _counter_mean(counters[0], total)


def estimate_disagreement(
    rule,
    p: Profile,
    n_splits: int = 10,
    seed: int = 0,
    weighting: str = "auto",
    method: str = "mc",
    normalized: bool = True,
    skip_empty: bool = False,
    jobs: int | None = None,
) -> SplitStats:
    """Estimate expected split disagreement by sampled or enumerated splits.

    Args:
        rule: Rule object with ``.apply``.
        p: Profile.
        n_splits: Number of sampled splits (``method='mc'``).
        seed: Base seed; split ``i`` uses the child stream ``spawn_key=(i,)``.
        weighting: 'on', 'off', or 'auto'.
        method: 'mc' for seeded sampling, 'exhaustive' to enumerate all 2^n
            splits (n <= 16; its mean equals ``exact_disagreement`` bitwise).
        normalized: Divide each split's distance by its maximum.
        skip_empty: Drop splits with an empty side instead of scoring them.
        jobs: Process count for parallel evaluation; output is identical to
            the serial result.

    Returns:
        ``SplitStats`` with mean, standard error, and per-split values.
    """
    won = _resolve_weighting(weighting, p)
    if method == "exhaustive":
        return _exhaustive_stats([rule], p, won, normalized, skip_empty)[0]
    if method != "mc":
        raise ValueError("method must be 'mc' or 'exhaustive'")
    splits = split_sequence(p, seed, n_splits)
    rows = _rows_on_splits([rule], p, splits, won, normalized, skip_empty, jobs)
    return _stats_from_rows(rows, 1)[0]


def _exhaustive_stats(
    rules: Sequence, p: Profile, weighting_on: bool, normalized: bool, skip_empty: bool
) -> list[SplitStats]:
    n = p.n
    if n > 16:
        raise ResourceLimitError(
            "exhaustive split enumeration is limited to 16 voters; "
            "use exact_disagreement for the exact mean"
        )
    ev = _ClassEvaluator(p, rules, weighting_on, normalized)
    type_of: dict[tuple[int, ...], int] = {}
    for t, (ballot, _) in enumerate(ev.types):
        type_of[ballot] = t
    voter_types = [type_of[ballot] for ballot in p.rankings]
    ntypes = len(ev.types)
    cache: dict[tuple[int, ...], list[float]] = {}
    per_rule_values: list[list[float]] = [[] for _ in rules]
    counters: list[Counter] = [Counter() for _ in rules]
    total = 0
    for mask in range(1 << n):
        n2 = mask.bit_count()
        if skip_empty and (n2 == 0 or n2 == n):
            continue
        ks = [0] * ntypes
        for i in range(n):
            if mask >> i & 1:
                ks[voter_types[i]] += 1
        key = tuple(ks)
        values = cache.get(key)
        if values is None:
            values = ev.evaluate(np.array(key, dtype=np.int64))
            cache[key] = values
        for i, v in enumerate(values):
            per_rule_values[i].append(v)
            counters[i][v] += 1
        total += 1
    stats = []
    for i in range(len(rules)):
        values = tuple(per_rule_values[i])
        if not values:
            stats.append(SplitStats(0.0, 0.0, ()))
            continue
        mean = _counter_mean(counters[i], total)
        _, sem = mean_and_sem(values)
        stats.append(SplitStats(mean, sem, values))
    return stats


def pick_rule(
    candidates: Sequence,
    p: Profile,
    n_splits: int = 10,
    seed: int = 0,
    tie_epsilon: float = 0.0,
    weighting: str = "auto",
    method: str = "mc",
    normalized: bool = True,
    skip_empty: bool = False,
    jobs: int | None = None,
    class_limit: int = DEFAULT_CLASS_LIMIT,
) -> PickResult:
    """Pick the candidate rule with the smallest (estimated or exact) mean
    split disagreement.

    All candidates are scored on the identical splits.  Candidates whose
    means land within ``tie_epsilon`` of the minimum form the argmin set;
    the first of them in candidate-list order is ``chosen``.

    Args:
        candidates: Non-empty list of rule objects.
        p: Profile.
        n_splits: Sampled splits for ``method='mc'``.
        seed: Base seed for the split sequence.
        tie_epsilon: Mean-difference slack for the argmin set (>= 0).
        weighting: 'on', 'off', or 'auto'.
        method: 'mc' or 'exact' (full enumeration by split classes).
        normalized: Normalize each split's distance.
        skip_empty: Drop splits with an empty side.
        jobs: Parallel worker count (Monte Carlo only).
        class_limit: Enumeration budget for ``method='exact'``.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if tie_epsilon < 0:
        raise ValueError("tie_epsilon must be non-negative")
    won = _resolve_weighting(weighting, p)
    labels = tuple(c.label for c in candidates)
    if method == "exact":
        counters, total = _exact_value_counters(
            candidates, p, won, normalized, skip_empty, class_limit
        )
        stats = tuple(SplitStats(_counter_mean(c, total), 0.0, ()) for c in counters)
        n_used = total
        seed_used = None
    elif method == "exhaustive":
        stats = tuple(_exhaustive_stats(candidates, p, won, normalized, skip_empty))
        n_used = len(stats[0].values) if stats else 0
        seed_used = None
    elif method == "mc":
        splits = split_sequence(p, seed, n_splits)
        rows = _rows_on_splits(candidates, p, splits, won, normalized, skip_empty, jobs)
        stats = tuple(_stats_from_rows(rows, len(candidates)))
        n_used = n_splits
        seed_used = seed
    else:
        raise ValueError("method must be 'mc', 'exact', or 'exhaustive'")
    report = DisagreementReport(
        labels=labels,
        stats=stats,
        seed=seed_used,
        n_splits=n_used,
        method=method,
        weighting="on" if won else "off",
        normalized=normalized,
        skip_empty=skip_empty,
        m=p.m,
        n=p.n,
    )
    best = min(s.mean for s in stats)
    argmin = tuple(c for c, s in zip(candidates, stats) if s.mean <= best + tie_epsilon)
    return PickResult(argmin=argmin, chosen=argmin[0], report=report)


def score_split(item_scores: Mapping, rng: np.random.Generator) -> dict:
    """Split each item's scores uniformly into two equal halves.

    Items are processed in sorted-key order.  When an item has an odd number
    of scores, one uniformly chosen score is left out.

    Args:
        item_scores: Mapping from item key to its multiset of scores (each
            with at least 2).
        rng: Source of randomness.

    Returns:
        Mapping from item key to a (side1, side2) pair of score tuples.
    """
    out = {}
    for key in sorted(item_scores):
        xs = [float(x) for x in item_scores[key]]
        if len(xs) < 2:
            raise ValueError(f"item {key!r} has fewer than 2 scores")
        perm = rng.permutation(len(xs))
        if len(xs) % 2 == 1:
            perm = perm[:-1]
        half = len(perm) // 2
        out[key] = (
            tuple(xs[i] for i in perm[:half]),
            tuple(xs[i] for i in perm[half:]),
        )
    return out


def pick_aggregator(
    aggs: Sequence[str],
    item_scores: Mapping,
    n_trials: int = 1000,
    seed: int = 0,
    tie_epsilon: float = 0.0,
) -> PickResult:
    """Pick the score aggregator whose item rankings agree most across
    random score splits.

    Per trial: every item's scores are split in half (one shared split per
    trial, reused by all aggregators), each side's aggregate scores are
    ranked, and the tie-aware Kendall-Tau between the two rankings is
    normalized by the number of item pairs.

    Args:
        aggs: Non-empty list of aggregator names (see ``SCORE_AGGREGATORS``).
        item_scores: Mapping from item key to score list (>= 2 scores each;
            at least 2 items).
        n_trials: Number of randomized split trials.
        seed: Base seed; trial ``i`` uses the child stream ``spawn_key=(i,)``.
        tie_epsilon: Mean-difference slack for the argmin set.
    """
    aggs = list(aggs)
    if not aggs:
        raise ValueError("aggs must be non-empty")
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if tie_epsilon < 0:
        raise ValueError("tie_epsilon must be non-negative")
    keys = sorted(item_scores)
    if len(keys) < 2:
        raise ValueError("need at least 2 items to rank")
    index = {key: i for i, key in enumerate(keys)}
    npairs = len(keys) * (len(keys) - 1) // 2
    values: list[list[float]] = [[] for _ in aggs]
    for trial in range(n_trials):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
        rng = np.random.Generator(np.random.PCG64(ss))
        halves = score_split(item_scores, rng)
        for i, agg in enumerate(aggs):
            s1 = {index[k]: aggregate_scores(agg, halves[k][0]) for k in keys}
            s2 = {index[k]: aggregate_scores(agg, halves[k][1]) for k in keys}
            kt = kt_with_ties(scores_to_ranking(s1), scores_to_ranking(s2))
            values[i].append(kt / npairs)
    stats = []
    for vals in values:
        mean, sem = mean_and_sem(vals)
        stats.append(SplitStats(mean, sem, tuple(vals)))
    report = DisagreementReport(
        labels=tuple(aggs),
        stats=tuple(stats),
        seed=seed,
        n_splits=n_trials,
        method="score_trials",
        weighting="off",
        normalized=True,
        skip_empty=False,
        m=len(keys),
        n=sum(len(item_scores[k]) for k in keys),
    )
    best = min(s.mean for s in stats)
    argmin = tuple(a for a, s in zip(aggs, stats) if s.mean <= best + tie_epsilon)
    return PickResult(argmin=argmin, chosen=argmin[0], report=report)
