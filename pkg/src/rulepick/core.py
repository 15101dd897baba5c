"""Core domain types: profiles, weak rankings, and basic profile statistics.

Alternatives are dense integer ids ``0..m-1``; external labels live in a
separate name table (see :mod:`rulepick.data`).  A *strict ranking* (a voter's
ballot) is a plain tuple of alternative ids, best first, possibly covering
only a subset of the alternatives.  A :class:`WeakRanking` is an ordered
sequence of tie-groups and is the universal output type of every social
welfare function in this package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Profile",
    "WeakRanking",
    "empty_ranking",
    "pairwise_defeats",
    "pairwise_matrix",
    "position_counts",
    "rank_of",
    "reverse",
    "smith_set",
]


@dataclass(frozen=True)
class WeakRanking:
    """An ordered partition of (a subset of) the alternatives into tie-groups.

    ``groups[0]`` is the best tie-group.  Within each group ids are stored
    sorted, so equality and hashing are structural and deterministic.  The
    *empty ranking* over ``m`` alternatives is the single group containing all
    of them (see :func:`empty_ranking`).
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for group in self.groups:
            if not group:
                raise ValueError("tie-groups must be nonempty")
            if list(group) != sorted(group):
                raise ValueError("tie-groups must be sorted; use from_groups()")
            for a in group:
                if a in seen:
                    raise ValueError(f"alternative {a} appears in two groups")
                seen.add(a)

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[int]]) -> "WeakRanking":
        """Build a ranking from unsorted tie-groups, canonicalizing each."""
        return cls(tuple(tuple(sorted(g)) for g in groups))

    @classmethod
    def from_strict(cls, order: Sequence[int]) -> "WeakRanking":
        """Wrap a strict ranking (best first) as singleton tie-groups."""
        return cls(tuple((a,) for a in order))

    def alternatives(self) -> frozenset[int]:
        return frozenset(a for group in self.groups for a in group)

    def is_strict(self) -> bool:
        return all(len(group) == 1 for group in self.groups)

    def as_strict(self) -> tuple[int, ...]:
        """Return the ranking as a plain tuple; requires no ties."""
        if not self.is_strict():
            raise ValueError("ranking contains ties")
        return tuple(group[0] for group in self.groups)

    def group_index(self, m: int) -> np.ndarray:
        """Per-alternative tie-group position (0 = best); -1 for unranked."""
        idx = np.full(m, -1, dtype=np.int64)
        for g, group in enumerate(self.groups):
            for a in group:
                idx[a] = g
        return idx


def empty_ranking(m: int) -> WeakRanking:
    """The all-tied ranking over ``m`` alternatives."""
    return WeakRanking((tuple(range(m)),))


@dataclass(frozen=True)
class Profile:
    """A multiset of strict (possibly partial) rankings over ``m`` alternatives.

    ``rankings[i]`` is voter ``i``'s ballot, best first.  A profile is *full*
    when every ballot ranks all ``m`` alternatives.
    """

    m: int
    rankings: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("profile needs at least one alternative")
        for ballot in self.rankings:
            if len(set(ballot)) != len(ballot):
                raise ValueError(f"duplicate alternative in ballot {ballot}")
            for a in ballot:
                if not 0 <= a < self.m:
                    raise ValueError(f"alternative id {a} out of range [0, {self.m})")

    @classmethod
    def from_ballots(cls, m: int, ballots: Iterable[Sequence[int]]) -> "Profile":
        return cls(m, tuple(tuple(b) for b in ballots))

    @property
    def n(self) -> int:
        return len(self.rankings)

    def is_full(self) -> bool:
        return all(len(ballot) == self.m for ballot in self.rankings)

    def ballot_lengths(self) -> set[int]:
        return {len(ballot) for ballot in self.rankings}

    def ballot_multiset(self) -> list[tuple[tuple[int, ...], int]]:
        """Distinct ballots with multiplicities, in sorted ballot order.

        Rules that consume this (rather than raw voter order) are bitwise
        anonymous: permuting voters cannot change any float accumulation.
        """
        counts: dict[tuple[int, ...], int] = {}
        for ballot in self.rankings:
            counts[ballot] = counts.get(ballot, 0) + 1
        return sorted(counts.items())


def rank_of(r: WeakRanking, a: int) -> int:
    """The rank of ``a`` in ``r``: one plus the number of strictly better ids."""
    above = 0
    for group in r.groups:
        if a in group:
            return above + 1
        above += len(group)
    raise ValueError(f"unranked alternative {a}")


def reverse(x):
    """Reverse a strict ranking, weak ranking, or profile.

    An involution on all three types: the order of positions (or tie-groups,
    or each voter's ballot) is flipped while voter order is preserved.
    """
    if isinstance(x, WeakRanking):
        return WeakRanking(tuple(x.groups[::-1]))
    if isinstance(x, Profile):
        return Profile(x.m, tuple(ballot[::-1] for ballot in x.rankings))
    if isinstance(x, tuple):
        return x[::-1]
    raise TypeError(f"cannot reverse {type(x).__name__}")


def position_counts(p: Profile, width: int | None = None) -> np.ndarray:
    """The position-count matrix ``counts[a, j]``.

    ``counts[a, j]`` is the number of voters ranking alternative ``a`` at
    (0-indexed) position ``j``; partial ballots contribute only at positions
    they fill.  ``width`` pads/overrides the column count (default: longest
    ballot, at least 1).
    """
    if width is None:
        width = max((len(b) for b in p.rankings), default=1)
        width = max(width, 1)
    counts = np.zeros((p.m, width), dtype=np.int64)
    for ballot in p.rankings:
        for j, a in enumerate(ballot):
            counts[a, j] += 1
    return counts


def pairwise_matrix(p: Profile) -> np.ndarray:
    """``P[a, b]``: number of voters ranking ``a`` above ``b`` (both ranked)."""
    pref = np.zeros((p.m, p.m), dtype=np.int64)
    for ballot in p.rankings:
        for hi, a in enumerate(ballot):
            for b in ballot[hi + 1 :]:
                pref[a, b] += 1
    return pref


def pairwise_defeats(p: Profile, a: int, b: int) -> bool:
    """True iff a strict majority of voters ranking both prefer ``a`` to ``b``."""
    above = below = 0
    for ballot in p.rankings:
        try:
            ia = ballot.index(a)
            ib = ballot.index(b)
        except ValueError:
            continue
        if ia < ib:
            above += 1
        else:
            below += 1
    return above > below


def smith_set(p: Profile) -> set[int]:
    """The smallest set whose members pairwise-defeat every outside alternative.

    Requires a full profile.  Always nonempty: seeded with a Copeland winner
    (which provably belongs to the Smith set) and closed under the dominance
    condition.
    """
    if not p.is_full():
        raise ValueError("smith_set requires a full profile")
    pref = pairwise_matrix(p)
    beats = pref > pref.T
    copeland = beats.sum(axis=1)
    members = {int(np.argmax(copeland))}
    changed = True
    while changed:
        changed = False
        for b in range(p.m):
            if b in members:
                continue
            if any(not beats[a, b] for a in members):
                members.add(b)
                changed = True
    return members
