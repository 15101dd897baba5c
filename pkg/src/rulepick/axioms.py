"""Axiom checks for the split-consistency rule picker.

Each ``check_*`` function evaluates one instance of an axiom and reports an
``AxiomOutcome``; ``violation_rate`` sweeps many sampled profiles.  The
shuffle construction makes a profile symmetric over a chosen set of ballot
positions, which pins down what a position-respecting picker must select.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from rulepick.consistency import DEFAULT_CLASS_LIMIT, pick_rule
from rulepick.core import Profile, WeakRanking, pairwise_defeats, rank_of, reverse, smith_set
from rulepick.metrics import kt_with_ties
from rulepick.rules import Positional, apply_rule, reverse_rule

__all__ = [
    "AxiomOutcome",
    "ShuffleSpec",
    "check_monotonicity",
    "check_psc",
    "check_reversal_symmetry",
    "check_union_consistency",
    "induced_swf",
    "preserved_axiom_predicates",
    "promote",
    "shuffle",
    "violation_rate",
    "welfare_pick",
]

AXIOMS = ("reversal_symmetry", "union_consistency", "monotonicity")

PREDICATES = (
    "smith",
    "condorcet",
    "majority_winner",
    "pmc",
    "unanimity",
    "monotone_spot_check",
)


@dataclass(frozen=True)
class AxiomOutcome:
    """Tally of axiom instances checked and violations found."""

    axiom: str
    instances: int
    violations: int

    def __post_init__(self) -> None:
        if self.violations < 0 or self.violations > self.instances:
            raise ValueError("violations must lie in 0..instances")

    @property
    def rate(self) -> float:
        return self.violations / self.instances if self.instances else 0.0


@dataclass(frozen=True)
class ShuffleSpec:
    """Which ballot positions to symmetrize, and the copy multiplier.

    Attributes:
        positions: At least two distinct 1-based ballot positions.
        k: Positive multiplier; each voter expands to ``k * m!`` copies.
    """

    positions: tuple[int, ...]
    k: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(sorted(self.positions)))
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("positions must be distinct")
        if len(self.positions) < 2:
            raise ValueError("need at least two positions to shuffle")
        if any(pos < 1 for pos in self.positions):
            raise ValueError("positions are 1-based")
        if self.k < 1:
            raise ValueError("k must be positive")


def shuffle(p: Profile, spec: ShuffleSpec) -> Profile:
    """Replace each voter by k * m! copies whose entries at ``spec.positions``
    are permuted in every possible way (equally many copies per permutation,
    permutations in lexicographic order).

    Requires full rankings and positions within 1..m.
    """
    if not p.is_full():
        raise ValueError("shuffle requires full rankings")
    m = p.m
    if spec.positions[-1] > m:
        raise ValueError(f"position {spec.positions[-1]} exceeds m={m}")
    perms = list(itertools.permutations(spec.positions))
    group = spec.k * math.factorial(m) // len(perms)
    ballots: list[tuple[int, ...]] = []
    for ballot in p.rankings:
        for perm in perms:
            out = list(ballot)
            for src, dst in zip(spec.positions, perm):
                out[dst - 1] = ballot[src - 1]
            ballots.extend([tuple(out)] * group)
    return Profile(m, tuple(ballots))


def induced_swf(
    candidates: Sequence,
    p: Profile,
    n_splits: int = 10,
    seed: int = 0,
    method: str = "mc",
    weighting: str = "auto",
    tie_epsilon: float = 0.0,
    class_limit: int = DEFAULT_CLASS_LIMIT,
) -> WeakRanking:
    """The ranking produced by applying the picked rule to the full profile."""
    result = pick_rule(
        candidates,
        p,
        n_splits=n_splits,
        seed=seed,
        tie_epsilon=tie_epsilon,
        weighting=weighting,
        method=method,
        class_limit=class_limit,
    )
    return apply_rule(result.chosen, p)


def _argmin_labels(candidates, p, **kwargs) -> set[str]:
    result = pick_rule(candidates, p, **kwargs)
    return {c.label for c in result.argmin}


def check_reversal_symmetry(
    candidates: Sequence[Positional],
    p: Profile,
    n_splits: int = 10,
    seed: int = 0,
    method: str = "mc",
    weighting: str = "auto",
    tie_epsilon: float = 0.0,
) -> AxiomOutcome:
    """Check that reversing every ballot reverses the pick.

    The candidate set must be positional and closed under reversal
    (plurality <-> veto, borda <-> borda, ...).  Both picks run on the same
    seed; since split draws depend only on the voter count, the reversed
    profile sees mirror images of the original splits, so for named
    families the two evaluations are coupled exactly and any asymmetry is
    structural rather than sampling noise.
    """
    labels = set()
    partners = {}
    for c in candidates:
        if not isinstance(c, Positional):
            raise ValueError("reversal symmetry is defined for positional candidates")
        labels.add(c.label)
        partners[c.label] = reverse_rule(c).label
    if set(partners.values()) != labels:
        raise ValueError("candidate set must be closed under reversal")
    kwargs = dict(
        n_splits=n_splits,
        seed=seed,
        method=method,
        weighting=weighting,
        tie_epsilon=tie_epsilon,
    )
    forward = _argmin_labels(candidates, p, **kwargs)
    backward = _argmin_labels(candidates, reverse(p), **kwargs)
    expected = {partners[label] for label in forward}
    return AxiomOutcome("reversal_symmetry", 1, int(backward != expected))


def check_union_consistency(
    candidates: Sequence,
    pa: Profile,
    pb: Profile,
    n_splits: int = 10,
    seed: int = 0,
    method: str = "mc",
    weighting: str = "auto",
    tie_epsilon: float = 0.0,
    class_limit: int = DEFAULT_CLASS_LIMIT,
) -> AxiomOutcome:
    """Check that rules picked on both electorates survive pooling them.

    When the two argmin sets are disjoint the axiom is silent and the
    outcome records zero instances; otherwise the pooled argmin must equal
    the intersection.
    """
    if pa.m != pb.m:
        raise ValueError("electorates must share the alternative set")
    kwargs = dict(
        n_splits=n_splits,
        seed=seed,
        method=method,
        weighting=weighting,
        tie_epsilon=tie_epsilon,
        class_limit=class_limit,
    )
    za = _argmin_labels(candidates, pa, **kwargs)
    zb = _argmin_labels(candidates, pb, **kwargs)
    common = za & zb
    if not common:
        return AxiomOutcome("union_consistency", 0, 0)
    union = Profile(pa.m, pa.rankings + pb.rankings)
    zu = _argmin_labels(candidates, union, **kwargs)
    return AxiomOutcome("union_consistency", 1, int(zu != common))


def promote(p: Profile, a: int, voters: Sequence[int]) -> Profile:
    """Move alternative ``a`` up one position on the selected ballots.

    Ballots where ``a`` is already first (or unranked) are left alone.
    """
    if not 0 <= a < p.m:
        raise ValueError(f"alternative {a} outside 0..{p.m - 1}")
    chosen = set(voters)
    if chosen and (min(chosen) < 0 or max(chosen) >= p.n):
        raise ValueError("voter index out of range")
    ballots = []
    for i, ballot in enumerate(p.rankings):
        if i in chosen and a in ballot:
            pos = ballot.index(a)
            if pos > 0:
                out = list(ballot)
                out[pos - 1], out[pos] = out[pos], out[pos - 1]
                ballot = tuple(out)
        ballots.append(ballot)
    return Profile(p.m, tuple(ballots))


def check_monotonicity(
    candidates: Sequence,
    p: Profile,
    rng_seed: int = 0,
    n_splits: int = 10,
    method: str = "mc",
    weighting: str = "auto",
    tie_epsilon: float = 0.0,
) -> AxiomOutcome:
    """Check that extra support cannot hurt the current winner.

    Takes the top alternative of the induced ranking (smallest id in the
    top group), promotes it one position on a random 20-80% of ballots,
    and re-runs the pick on the modified profile with the same seed.  A
    violation is a strictly worse rank for that alternative.
    """
    if not p.is_full():
        raise ValueError("monotonicity check requires full rankings")
    kwargs = dict(
        n_splits=n_splits,
        seed=rng_seed,
        method=method,
        weighting=weighting,
        tie_epsilon=tie_epsilon,
    )
    before = induced_swf(candidates, p, **kwargs)
    a = min(before.groups[0])
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=[rng_seed, 1])))
    q = rng.uniform(0.2, 0.8)
    count = max(1, round(q * p.n))
    voters = [int(v) for v in rng.choice(p.n, size=count, replace=False)]
    after = induced_swf(candidates, promote(p, a, voters), **kwargs)
    return AxiomOutcome("monotonicity", 1, int(rank_of(after, a) > rank_of(before, a)))


def check_psc(
    candidates: Sequence,
    p: Profile,
    k: int = 1,
    mode: str = "mc",
    n_splits: int = 200,
    seed: int = 0,
    tie_epsilon: float = 0.0,
    class_limit: int = DEFAULT_CLASS_LIMIT,
) -> bool:
    """Does the picker select exactly plurality on the tail-shuffled profile?

    Shuffling positions 2..m leaves first place as the only informative
    position, so a profile with an untied plurality order should make
    plurality the unique pick.

    Args:
        candidates: Candidate rules; must include plurality.
        p: Full profile with untied plurality output and m >= 3.
        k: Copy multiplier for the shuffle.
        mode: 'mc' (seeded splits) or 'exact'.

    Returns:
        True when the argmin is exactly the plurality rule.
    """
    if not any(isinstance(c, Positional) and c.family == "plurality" for c in candidates):
        raise ValueError("candidate set must include plurality")
    if p.m < 3:
        raise ValueError("need m >= 3 so that positions 2..m can be shuffled")
    if mode not in ("mc", "exact"):
        raise ValueError("mode must be 'mc' or 'exact'")
    plurality_out = Positional.named("plurality").apply(p)
    if not plurality_out.is_strict():
        raise ValueError("plurality output on this profile is tied")
    shuffled = shuffle(p, ShuffleSpec(positions=tuple(range(2, p.m + 1)), k=k))
    labels = _argmin_labels(
        candidates,
        shuffled,
        n_splits=n_splits,
        seed=seed,
        method="exact" if mode == "exact" else "mc",
        tie_epsilon=tie_epsilon,
        class_limit=class_limit,
    )
    return labels == {"plurality"}


def welfare_pick(candidates: Sequence, p: Profile) -> tuple:
    """The candidates whose output maximizes total voter welfare.

    A voter's utility for an output ranking is the negated tie-aware swap
    distance between their own ballot and the output, so this is the
    natural myopic competitor to the split-consistency picker.  Requires
    full ballots.  Returns every maximizer, in candidate order.
    """
    if not p.is_full():
        raise ValueError("welfare comparison requires full rankings")
    types = p.ballot_multiset()
    totals = []
    for c in candidates:
        out = apply_rule(c, p)
        terms = [
            count * kt_with_ties(WeakRanking.from_strict(ballot), out)
            for ballot, count in types
        ]
        totals.append(math.fsum(terms))
    best = min(totals)
    return tuple(c for c, t in zip(candidates, totals) if t == best)


def violation_rate(
    axiom: str,
    profile_source: Callable[[int], Profile],
    n_profiles: int = 500,
    n_splits: int = 50,
    seed: int = 0,
    candidates: Sequence | None = None,
    method: str = "mc",
    weighting: str = "auto",
) -> AxiomOutcome:
    """Estimate how often an axiom fails across sampled profiles.

    Args:
        axiom: One of ``AXIOMS``.
        profile_source: Maps an integer seed to a profile (see
            ``rulepick.data.profile_source``).
        n_profiles: Profiles to sample.
        n_splits: Splits per pick inside each check.
        seed: Governs both profile sampling and the checks.
        candidates: Candidate rules; defaults to plurality/veto/borda,
            which is closed under reversal.

    Union-consistency instances pair the even-indexed voters of each
    sampled profile against the odd-indexed ones.
    """
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")
    if candidates is None:
        candidates = tuple(Positional.named(f) for f in ("plurality", "veto", "borda"))
    instances = 0
    violations = 0
    for i in range(n_profiles):
        state = np.random.SeedSequence(entropy=seed, spawn_key=(i,)).generate_state(2)
        p = profile_source(int(state[0]))
        check_seed = int(state[1])
        if axiom == "reversal_symmetry":
            outcome = check_reversal_symmetry(
                candidates, p, n_splits=n_splits, seed=check_seed, weighting=weighting
            )
        elif axiom == "monotonicity":
            outcome = check_monotonicity(
                candidates,
                p,
                rng_seed=check_seed,
                n_splits=n_splits,
                method=method,
                weighting=weighting,
            )
        else:
            pa = Profile(p.m, p.rankings[0::2])
            pb = Profile(p.m, p.rankings[1::2])
            if pa.n == 0 or pb.n == 0:
                continue
            outcome = check_union_consistency(
                candidates,
                pa,
                pb,
                n_splits=n_splits,
                seed=check_seed,
                method=method,
                weighting=weighting,
            )
        instances += outcome.instances
        violations += outcome.violations
    return AxiomOutcome(axiom, instances, violations)


def _pmc_ranking(p: Profile) -> WeakRanking | None:
    m = p.m
    beats = [[a != b and pairwise_defeats(p, a, b) for b in range(m)] for a in range(m)]
    wins = [sum(row) for row in beats]
    order = sorted(range(m), key=lambda a: (-wins[a], a))
    groups: list[list[int]] = []
    for a in order:
        if groups and wins[groups[-1][0]] == wins[a]:
            groups[-1].append(a)
        else:
            groups.append([a])
    for gi, group in enumerate(groups):
        for a in group:
            for b in group:
                if a != b and beats[a][b]:
                    return None
            for lower in groups[gi + 1 :]:
                if not all(beats[a][b] for b in lower):
                    return None
    return WeakRanking.from_groups(groups)


def preserved_axiom_predicates(
    r: WeakRanking, p: Profile, which: str, swf: Callable[[Profile], WeakRanking] | None = None
) -> bool:
    """Test a single-output axiom on the ranking ``r`` produced for ``p``.

    Supported predicates (vacuously true when their premise fails):
        smith: top group lies inside the Smith set.
        condorcet: a Condorcet winner is the unique top.
        majority_winner: a strict-majority first choice is the unique top.
        pmc: if pairwise defeats form a weak order, r equals it.
        unanimity: if all ballots are one full ranking, r equals it.
        monotone_spot_check: promoting the winner everywhere cannot worsen
            its rank (needs ``swf`` to re-run the rule).
    """
    if which not in PREDICATES:
        raise ValueError(f"unknown predicate {which!r}; expected one of {PREDICATES}")
    if which == "smith":
        return set(r.groups[0]) <= smith_set(p)
    if which == "condorcet":
        winners = smith_set(p)
        if len(winners) != 1:
            return True
        return set(r.groups[0]) == winners
    if which == "majority_winner":
        counts = [0] * p.m
        for ballot in p.rankings:
            if ballot:
                counts[ballot[0]] += 1
        for a, c in enumerate(counts):
            if 2 * c > p.n:
                return r.groups[0] == (a,)
        return True
    if which == "pmc":
        target = _pmc_ranking(p)
        return target is None or r == target
    if which == "unanimity":
        types = p.ballot_multiset()
        if len(types) != 1 or len(types[0][0]) != p.m:
            return True
        return r == WeakRanking.from_strict(types[0][0])
    if swf is None:
        raise ValueError("monotone_spot_check needs the swf callable")
    a = min(r.groups[0])
    promoted = promote(p, a, range(p.n))
    return rank_of(swf(promoted), a) <= rank_of(r, a)
