"""Distances between rankings: Kendall-Tau with ties, weighted variants, and
set dissimilarity helpers.

The tie-aware Kendall-Tau distance counts, over unordered pairs of
alternatives, 1 for every pair ranked in strictly opposite order and 1/2 for
every pair tied in at least one of the two rankings.  The weighted variant
scales each pair's contribution by the product of per-alternative weights,
which is how sparsely observed alternatives get discounted when comparing
rankings computed from two halves of a partial profile.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence, Set

import numpy as np

from rulepick.core import WeakRanking
from rulepick.kernels import pair_counts, pair_products_total, pair_sums

__all__ = [
    "jaccard_dissimilarity",
    "kt_with_ties",
    "max_weighted_kt",
    "mean_and_sem",
    "normalized_disagreement",
    "top_k",
    "weighted_kt",
]


def _group_arrays(r1: WeakRanking, r2: WeakRanking) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Align two rankings over their (identical) domains as tie-group arrays."""
    dom1 = r1.alternatives()
    dom2 = r2.alternatives()
    if dom1 != dom2:
        raise ValueError("rankings cover different alternatives")
    domain = sorted(dom1)
    idx1 = {}
    for g, group in enumerate(r1.groups):
        for a in group:
            idx1[a] = g
    idx2 = {}
    for g, group in enumerate(r2.groups):
        for a in group:
            idx2[a] = g
    g1 = np.fromiter((idx1[a] for a in domain), dtype=np.int64, count=len(domain))
    g2 = np.fromiter((idx2[a] for a in domain), dtype=np.int64, count=len(domain))
    return g1, g2, domain


def kt_with_ties(r1: WeakRanking, r2: WeakRanking) -> float:
    """Kendall-Tau distance with ties between two rankings of the same set.

    Args:
        r1: First ranking.
        r2: Second ranking; must rank exactly the same alternatives.

    Returns:
        Sum over unordered pairs of ``D + T/2`` where ``D`` is 1 iff the pair
        is ordered strictly oppositely and ``T`` is 1 iff it is tied in at
        least one ranking.  Ranges from 0 to ``C(m, 2)``.
    """
    g1, g2, _ = _group_arrays(r1, r2)
    disc, tied = pair_counts(g1, g2)
    return disc + 0.5 * tied


def _weight_array(weights, domain: Sequence[int]) -> np.ndarray:
    if isinstance(weights, Mapping):
        vals = [weights[a] for a in domain]
    else:
        arr = np.asarray(weights, dtype=np.float64)
        vals = [arr[a] for a in domain]
    w = np.asarray(vals, dtype=np.float64)
    if np.any(w < 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    return w


def weighted_kt(r1: WeakRanking, r2: WeakRanking, weights) -> float:
    """Weighted Kendall-Tau distance.

    Each pair ``{a, b}`` contributes ``w_a * w_b * (D + T/2)``.  ``weights``
    is indexable by alternative id (a mapping or an array covering every id in
    the rankings' common domain).
    """
    g1, g2, domain = _group_arrays(r1, r2)
    w = _weight_array(weights, domain)
    num, _ = pair_sums(g1, g2, w)
    return num


def max_weighted_kt(weights) -> float:
    """Largest possible weighted KT: the distance between a strict ranking
    and its reverse, i.e. the sum of ``w_a * w_b`` over all unordered pairs.

    ``weights`` is an array or mapping over a full alternative set; for a
    mapping, ids are taken in sorted order.
    """
    if isinstance(weights, Mapping):
        domain = sorted(weights)
    else:
        domain = range(len(np.asarray(weights, dtype=np.float64)))
    w = _weight_array(weights, list(domain))
    return pair_products_total(w)


def normalized_disagreement(r1: WeakRanking, r2: WeakRanking, weights) -> float:
    """Weighted KT divided by its maximum under the same weights.

    The divisor sums ``w_a * w_b`` over every pair of alternatives the
    weights cover, so unranked-but-weighted alternatives still count toward
    it.  Returns 0 when the divisor is 0 (every weight zero).
    """
    g1, g2, domain = _group_arrays(r1, r2)
    w = _weight_array(weights, domain)
    num, den = pair_sums(g1, g2, w)
    if isinstance(weights, Mapping):
        full = len(weights)
    else:
        full = len(np.asarray(weights, dtype=np.float64))
    if full != len(domain):
        den = max_weighted_kt(weights)
    if den == 0.0:
        return 0.0
    return num / den


def jaccard_dissimilarity(s1: Set | Iterable, s2: Set | Iterable) -> float:
    """1 minus |intersection| / |union| of two sets.

    Raises:
        ValueError: If both sets are empty.
    """
    a = frozenset(s1)
    b = frozenset(s2)
    if not a and not b:
        raise ValueError("jaccard dissimilarity undefined for two empty sets")
    return 1.0 - len(a & b) / len(a | b)


def top_k(r: WeakRanking, k: int) -> frozenset[int]:
    """The best ``k`` alternatives of a ranking, as a set.

    Whole tie-groups are taken best-first; if a group straddles the cut, the
    smallest-id alternatives from it fill the remaining slots.

    Raises:
        ValueError: If ``k`` exceeds the number of ranked alternatives.
    """
    total = sum(len(g) for g in r.groups)
    if k < 0 or k > total:
        raise ValueError(f"k must be between 0 and {total}")
    chosen: list[int] = []
    for group in r.groups:
        if len(chosen) + len(group) <= k:
            chosen.extend(group)
        else:
            chosen.extend(sorted(group)[: k - len(chosen)])
        if len(chosen) == k:
            break
    return frozenset(chosen)


def mean_and_sem(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error of the mean of a sample.

    Uses correctly-rounded summation, so the result does not depend on the
    order of ``values``.  SEM is 0 for samples of size one.
    """
    k = len(values)
    if k == 0:
        raise ValueError("empty sample")
    mean = math.fsum(values) / k
    if k == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k * (k - 1))
    return mean, math.sqrt(var)
