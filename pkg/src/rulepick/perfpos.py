"""Deciding whether any scoring vector ranks two voter groups identically.

An instance is a pair of position-count matrices, one per voter group.  The
question is whether some normalized non-increasing scoring vector yields the
same strict order on both sides.  ``decide_perfpos`` answers it exactly for
small alternative counts by searching candidate orders with a margin LP and
certifying the winner in rational arithmetic; ``reduce_k_perfpos`` turns
top-k ballots into an equivalent full-ballot instance in closed form.
"""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from rulepick.consistency import side_profiles
from rulepick.core import Profile, position_counts
from rulepick.errors import ResourceLimitError

__all__ = [
    "PerfPosAnswer",
    "PerfPosInstance",
    "decide_perfpos",
    "emit_instance",
    "generate_hard_instance",
    "parse_instance",
    "reduce_k_perfpos",
    "verify_witness",
]

DEFAULT_ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class PerfPosInstance:
    """Position-count matrices for two equal-size voter groups.

    ``counts1[a][i]`` is how many group-1 voters rank alternative ``a`` at
    ballot position i (0-based).  Every ballot fills every position, so
    each column of each matrix sums to the group size.
    """

    counts1: tuple[tuple[int, ...], ...]
    counts2: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "counts1", tuple(tuple(int(x) for x in row) for row in self.counts1)
        )
        object.__setattr__(
            self, "counts2", tuple(tuple(int(x) for x in row) for row in self.counts2)
        )
        if not self.counts1 or not self.counts1[0]:
            raise ValueError("count matrices must be non-empty")
        m, k = len(self.counts1), len(self.counts1[0])
        for counts in (self.counts1, self.counts2):
            if len(counts) != m or any(len(row) != k for row in counts):
                raise ValueError("count matrices must share the same m x k shape")
            if any(x < 0 for row in counts for x in row):
                raise ValueError("counts must be non-negative")
        sums1 = [sum(row[i] for row in self.counts1) for i in range(k)]
        sums2 = [sum(row[i] for row in self.counts2) for i in range(k)]
        if len(set(sums1)) != 1 or len(set(sums2)) != 1:
            raise ValueError("each ballot position must be used by every voter")
        if sums1[0] != sums2[0]:
            raise ValueError("the two groups must have equally many voters")

    @property
    def m(self) -> int:
        return len(self.counts1)

    @property
    def k(self) -> int:
        return len(self.counts1[0])

    @property
    def voters_per_side(self) -> int:
        return sum(row[0] for row in self.counts1)

    @classmethod
    def from_profile_split(cls, p: Profile, split: Sequence[int]) -> "PerfPosInstance":
        """Count positions on each side of a split of uniform-length ballots."""
        lengths = p.ballot_lengths()
        if len(lengths) != 1:
            raise ValueError("instances need a uniform ballot length")
        k = lengths.pop()
        side1, side2 = side_profiles(p, split)
        if side1.n != side2.n:
            raise ValueError("the two groups must have equally many voters")
        c1 = position_counts(side1, width=k)
        c2 = position_counts(side2, width=k)
        return cls(tuple(map(tuple, c1.tolist())), tuple(map(tuple, c2.tolist())))


@dataclass(frozen=True)
class PerfPosAnswer:
    """Decision plus, when positive, a certified witness.

    ``witness`` is a scoring vector verified in exact arithmetic to induce
    ``certified_order`` strictly on both sides.
    """

    decision: bool
    witness: tuple[float, ...] | None
    certified_order: tuple[int, ...] | None


def verify_witness(s: Sequence, inst: PerfPosInstance) -> bool:
    """Exact check that vector ``s`` orders every pair identically and
    strictly on both sides of the instance."""
    if len(s) != inst.k:
        raise ValueError("vector length must equal the instance's ballot length")
    weights = [Fraction(x) for x in s]
    totals = []
    for counts in (inst.counts1, inst.counts2):
        totals.append(
            [sum(w * c for w, c in zip(weights, row)) for row in counts]
        )
    t1, t2 = totals
    for a in range(inst.m):
        for b in range(a + 1, inst.m):
            if (t1[a] - t1[b]) * (t2[a] - t2[b]) <= 0:
                return False
    return True


def _margin_lp(rows1, rows2, pairs, m):
    """Maximize the smallest normalized score margin over both sides of
    every adjacent pair, subject to 1 = s_1 >= ... >= s_m = 0.

    Returns (margin, inner_solution) or None when infeasible.
    """
    nvars = (m - 2) + 1
    a_ub, b_ub = [], []
    for j in range(m - 3):
        row = [0.0] * nvars
        row[j] = -1.0
        row[j + 1] = 1.0
        a_ub.append(row)
        b_ub.append(0.0)
    for u, v in pairs:
        for rows in (rows1, rows2):
            d = rows[u] - rows[v]
            scale = float(max(1, np.abs(d).max()))
            row = [-float(d[j + 1]) / scale for j in range(m - 2)]
            row.append(1.0)
            a_ub.append(row)
            b_ub.append(float(d[0]) / scale)
    bounds = [(0.0, 1.0)] * (m - 2) + [(0.0, None)]
    c = [0.0] * (m - 2) + [-1.0]
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"margin solve failed: {res.message}")
    return -res.fun, res.x[: m - 2]


def _snap_witness(inner, m) -> list[Fraction]:
    weights = [Fraction(1)]
    for x in inner:
        f = Fraction(min(1.0, max(0.0, float(x))))
        weights.append(min(f, weights[-1]))
    weights.append(Fraction(0))
    return weights


def _order_possible(rows1, rows2, u, v, m) -> bool:
    # Upper bound of d . s over the vector polytope: d[0] plus the positive
    # interior parts (the last coordinate gets weight 0).
    for rows in (rows1, rows2):
        d = rows[u] - rows[v]
        ub = d[0] + sum(x for x in d[1 : m - 1] if x > 0)
        if ub <= 0:
            return False
    return True


def decide_perfpos(
    inst: PerfPosInstance,
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT,
    margin_floor: float = 1e-9,
) -> PerfPosAnswer:
    """Decide whether some scoring vector ranks both groups identically.

    Searches strict orders depth-first (smallest ids first, so a positive
    answer certifies the lexicographically smallest achievable order).
    Branches die on a cheap sign bound or when the margin LP over all
    adjacent prefix pairs is infeasible or falls to ``margin_floor``
    (margins are normalized per pair, so the floor is a relative tie
    threshold).  A surviving full order is certified by ``verify_witness``
    in exact arithmetic before it is returned.

    Raises:
        ValueError: If the instance still has fewer columns than
            alternatives (reduce it first).
        ResourceLimitError: If m exceeds ``enumeration_limit``.
    """
    m = inst.m
    if inst.k != m:
        raise ValueError("decide_perfpos expects full-ballot instances; use reduce_k_perfpos")
    if m > enumeration_limit:
        raise ResourceLimitError(
            f"order enumeration over {m} alternatives exceeds the limit of "
            f"{enumeration_limit}; raise enumeration_limit to proceed"
        )
    if m == 1:
        return PerfPosAnswer(True, (1.0,), (0,))
    rows1 = np.asarray(inst.counts1, dtype=np.int64)
    rows2 = np.asarray(inst.counts2, dtype=np.int64)
    for a in range(m):
        for b in range(a + 1, m):
            if not (_order_possible(rows1, rows2, a, b, m) or _order_possible(rows1, rows2, b, a, m)):
                return PerfPosAnswer(False, None, None)
    prefix: list[int] = []
    used = [False] * m

    def dfs(last_inner) -> PerfPosAnswer | None:
        if len(prefix) == m:
            weights = _snap_witness(last_inner, m)
            witness = tuple(float(w) for w in weights)
            if verify_witness(witness, inst):
                return PerfPosAnswer(True, witness, tuple(prefix))
            return None
        for a in range(m):
            if used[a]:
                continue
            prefix.append(a)
            used[a] = True
            inner = last_inner
            ok = True
            if len(prefix) >= 2:
                if not _order_possible(rows1, rows2, prefix[-2], prefix[-1], m):
                    ok = False
                else:
                    sol = _margin_lp(rows1, rows2, list(zip(prefix, prefix[1:])), m)
                    if sol is None or sol[0] <= margin_floor:
                        ok = False
                    else:
                        inner = sol[1]
            if ok:
                answer = dfs(inner)
                if answer is not None:
                    return answer
            prefix.pop()
            used[a] = False
        return None

    answer = dfs(np.zeros(m - 2))
    return answer if answer is not None else PerfPosAnswer(False, None, None)


def reduce_k_perfpos(p: Profile, split: Sequence[int]) -> PerfPosInstance:
    """Turn equal-size groups of top-k ballots into an equivalent
    full-ballot instance.

    Completing each ballot with its unranked alternatives and symmetrizing
    everything from position k outward multiplies each voter into m!
    copies; the resulting position counts have the closed form used here
    (untouched leading columns scaled by m!, the tail spread evenly), so no
    copies are materialized.  A scoring vector perfectly splits the reduced
    instance exactly when it perfectly splits the original top-k ballots.
    """
    lengths = p.ballot_lengths()
    if len(lengths) != 1:
        raise ValueError("reduction needs a uniform ballot length")
    k = lengths.pop()
    m = p.m
    side1, side2 = side_profiles(p, split)
    if side1.n != side2.n:
        raise ValueError("the two groups must have equally many voters")
    fact = math.factorial(m)
    share = fact // (m - k + 1)
    matrices = []
    for side in (side1, side2):
        counts = position_counts(side, width=k).astype(object)
        full = np.zeros((m, m), dtype=object)
        full[:, : k - 1] = counts[:, : k - 1] * fact
        tail = side.n - counts[:, : k - 1].sum(axis=1)
        for i in range(k - 1, m):
            full[:, i] = tail * share
        matrices.append(tuple(tuple(int(x) for x in row) for row in full))
    return PerfPosInstance(matrices[0], matrices[1])


def generate_hard_instance(clauses: Sequence[Sequence[int]]) -> tuple[Profile, tuple[int, ...]]:
    """Encode a 3-CNF formula as a top-k split instance.

    Variables are numbered from 1; a negative literal negates its variable.
    The encoded instance admits a perfectly splitting scoring vector exactly
    when the formula is satisfiable, which makes the general top-k decision
    problem as hard as satisfiability.  Returns the profile of top-k ballots
    together with the side tag of each voter; feed the pair through
    ``reduce_k_perfpos`` before deciding.
    """
    if not clauses:
        raise ValueError("formula needs at least one clause")
    t = 0
    for clause in clauses:
        if not 1 <= len(clause) <= 3:
            raise ValueError("clauses must have one to three literals")
        variables = [abs(int(lit)) for lit in clause]
        if 0 in variables:
            raise ValueError("literals are non-zero integers")
        if len(set(variables)) != len(variables):
            raise ValueError("a clause may use each variable once")
        t = max(t, max(variables))
    q = len(clauses)
    k = t + 2
    m = 2 * t + 2 * q + k
    inv_eps = 7 * (k + 2)

    def a_id(i):
        return i - 1

    def b_id(i):
        return t + i - 1

    def c_id(j):
        return 2 * t + j - 1

    def d_id(j):
        return 2 * t + q + j - 1

    def e_id(pos):
        return 2 * t + 2 * q + pos - 1

    side_counts: list[dict[tuple[int, int], int]] = [{}, {}]

    def bump(side, cand, pos, count):
        if count:
            key = (cand, pos)
            side_counts[side - 1][key] = side_counts[side - 1].get(key, 0) + count

    for i in range(1, t + 1):
        bump(1, a_id(i), 1, 1 + (k + 3) * (i - 1))
        bump(1, a_id(i), i + 1, k + 2)
        bump(1, b_id(i), 1, (k + 3) * (i - 1))
        bump(1, b_id(i), i, k + 2)
        bump(1, b_id(i), k, 1)
        bump(2, a_id(i), 1, 1 + (inv_eps + 1) * (i - 1))
        bump(2, a_id(i), i + 1, inv_eps)
        bump(2, b_id(i), 1, (inv_eps + 1) * (i - 1))
        bump(2, b_id(i), i, inv_eps)
        bump(2, b_id(i), k, 1)
    for j, clause in enumerate(clauses, start=1):
        negated = sum(1 for lit in clause if lit < 0)
        bump(1, c_id(j), 1, t * (k + 3) + 2 * j)
        bump(1, d_id(j), 1, t * (k + 3) + 2 * j - 1)
        bump(1, d_id(j), k, 1)
        bump(2, c_id(j), 1, 2 * negated + t * (inv_eps + 1) + 6 * (k + 3) * (j - 1))
        bump(2, c_id(j), k, 1)
        bump(2, d_id(j), 1, 1 + t * (inv_eps + 1) + 6 * (k + 3) * (j - 1))
        bump(2, d_id(j), k, 2 * negated)
        for lit in clause:
            v = abs(lit)
            if lit > 0:
                bump(2, c_id(j), v, 2 * (k + 2))
                bump(2, d_id(j), v + 1, 2 * (k + 2))
            else:
                bump(2, c_id(j), v + 1, 2 * (k + 2))
                bump(2, d_id(j), v, 2 * (k + 2))

    ballots: list[tuple[int, ...]] = []
    tags: list[int] = []
    side_sizes = []
    for side in (1, 2):
        size = 0
        for (cand, pos), count in sorted(side_counts[side - 1].items()):
            ballot = tuple(cand if i == pos else e_id(i) for i in range(1, k + 1))
            ballots.extend([ballot] * count)
            tags.extend([side] * count)
            size += count
        side_sizes.append(size)
    n_max = max(side_sizes)
    target = (14 * k + 29) * n_max
    e_ballot = tuple(e_id(i) for i in range(1, k + 1))
    for side in (1, 2):
        pad = target - side_sizes[side - 1]
        ballots.extend([e_ballot] * pad)
        tags.extend([side] * pad)
    return Profile(m, tuple(ballots)), tuple(tags)


def emit_instance(p: Profile, split: Sequence[int], names: Sequence[str] | None = None) -> bytes:
    """Serialize a split instance as profile JSON plus per-voter side tags."""
    if len(split) != p.n:
        raise ValueError("split length must equal the number of voters")
    if names is None:
        names = [str(i) for i in range(p.m)]
    doc = {
        "m": p.m,
        "names": list(names),
        "ballots": [list(b) for b in p.rankings],
        "split": [int(x) for x in split],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def parse_instance(data) -> tuple[Profile, tuple[int, ...]]:
    """Parse ``emit_instance`` output back into (profile, split)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad instance JSON: {exc}") from exc
    for field in ("m", "ballots", "split"):
        if field not in doc:
            raise ValueError(f"instance JSON needs the {field!r} field")
    p = Profile(int(doc["m"]), tuple(tuple(int(x) for x in b) for b in doc["ballots"]))
    split = tuple(int(x) for x in doc["split"])
    if len(split) != p.n:
        raise ValueError("split length must equal the number of voters")
    if any(tag not in (1, 2) for tag in split):
        raise ValueError("side tags must be 1 or 2")
    return p, split
