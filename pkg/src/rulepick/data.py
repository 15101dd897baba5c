"""Synthetic profile generators, dataset parsers/writers, and report
serialization.

Parsers accept bytes or text.  Serialized reports print floats at 17
significant digits so that parsing them back reproduces the exact values;
two runs with the same seed emit byte-identical reports.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from rulepick._version import __version__
from rulepick.axioms import AxiomOutcome
from rulepick.consistency import DisagreementReport, PickResult, SplitStats
from rulepick.core import Profile
from rulepick.rules import rule_from_name

__all__ = [
    "DistributionSpec",
    "assign_partial",
    "default_pl_strengths",
    "emit_profile",
    "emit_report",
    "parse_event_rankings",
    "parse_preflib",
    "parse_profile",
    "parse_report",
    "parse_scores_csv",
    "sample_profile",
]

_KINDS = ("mallows", "plackett_luce", "impartial_culture", "urn", "single_peaked")


def default_pl_strengths(m: int) -> np.ndarray:
    """The exponentially spaced strengths ``exp(0.5 * (m - i))`` for ranks
    i = 1..m, i.e. alternative 0 is strongest."""
    return np.exp(0.5 * (m - 1 - np.arange(m, dtype=np.float64)))


@dataclass(frozen=True)
class DistributionSpec:
    """What to sample: a ranking distribution plus optional partial assignment.

    Attributes:
        kind: One of mallows, plackett_luce, impartial_culture, urn,
            single_peaked.
        m: Number of alternatives.
        n: Number of voters.
        phi: Mallows dispersion in (0, 1]; 1 is uniform.
        center: Mallows center order (default 0..m-1).
        alpha: Plackett-Luce strengths (default ``default_pl_strengths``).
        ballot_length: If set (with ``coverage``), each sampled full ranking
            is cut down to a random balanced subset of this size.
        coverage: Exact number of ballots each alternative appears on.
    """

    kind: str
    m: int
    n: int
    phi: float = 0.4
    center: tuple[int, ...] | None = None
    alpha: tuple[float, ...] | None = None
    ballot_length: int | None = None
    coverage: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}; expected one of {_KINDS}")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0.0 < self.phi <= 1.0:
            raise ValueError("phi must be in (0, 1]")
        if self.center is not None and sorted(self.center) != list(range(self.m)):
            raise ValueError("center must be a permutation of 0..m-1")
        if self.alpha is not None:
            if len(self.alpha) != self.m or min(self.alpha) <= 0:
                raise ValueError("alpha must have m positive entries")
        if (self.ballot_length is None) != (self.coverage is None):
            raise ValueError("set ballot_length and coverage together")
        if self.ballot_length is not None:
            if not 1 <= self.ballot_length <= self.m:
                raise ValueError("ballot_length must be in 1..m")
            if self.coverage < 1 or self.n * self.ballot_length != self.m * self.coverage:
                raise ValueError(
                    "infeasible coverage: need n * ballot_length == m * coverage"
                )


def _sample_mallows(rng: np.random.Generator, m: int, phi: float, center) -> tuple[int, ...]:
    # Repeated insertion: the j-th center item lands i slots from the front
    # with probability proportional to phi^(j - i).
    out: list[int] = []
    for j, item in enumerate(center):
        weights = phi ** np.arange(j, -1, -1, dtype=np.float64)
        i = int(rng.choice(j + 1, p=weights / weights.sum()))
        out.insert(i, item)
    return tuple(out)


def _sample_pl(rng: np.random.Generator, alpha: np.ndarray) -> tuple[int, ...]:
    remaining = list(range(len(alpha)))
    out = []
    while remaining:
        w = alpha[remaining]
        pick = int(rng.choice(len(remaining), p=w / w.sum()))
        out.append(remaining.pop(pick))
    return tuple(out)


def _sample_single_peaked(rng: np.random.Generator, m: int) -> tuple[int, ...]:
    # Build worst-to-best by repeatedly discarding one endpoint of the
    # surviving interval on the axis 0..m-1; uniform over the 2^(m-1)
    # single-peaked orders.
    lo, hi = 0, m - 1
    worst_first = []
    while lo < hi:
        if rng.integers(0, 2):
            worst_first.append(hi)
            hi -= 1
        else:
            worst_first.append(lo)
            lo += 1
    worst_first.append(lo)
    return tuple(reversed(worst_first))


def sample_profile(spec: DistributionSpec, seed) -> Profile:
    """Sample a profile; deterministic per (spec, seed).

    See ``DistributionSpec`` for the distribution definitions.  The urn
    model draws its contagion strength from Gamma(shape 0.8, scale 1) once
    per profile; voter i copies a uniformly chosen earlier ballot with
    probability 1 - 1/(1 + i * strength), else draws a fresh uniform order.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    m, n = spec.m, spec.n
    ballots: list[tuple[int, ...]] = []
    if spec.kind == "mallows":
        center = spec.center if spec.center is not None else tuple(range(m))
        ballots = [_sample_mallows(rng, m, spec.phi, center) for _ in range(n)]
    elif spec.kind == "plackett_luce":
        alpha = (
            np.asarray(spec.alpha, dtype=np.float64)
            if spec.alpha is not None
            else default_pl_strengths(m)
        )
        ballots = [_sample_pl(rng, alpha) for _ in range(n)]
    elif spec.kind == "impartial_culture":
        ballots = [tuple(int(x) for x in rng.permutation(m)) for _ in range(n)]
    elif spec.kind == "urn":
        strength = float(rng.gamma(0.8, 1.0))
        for i in range(n):
            if i == 0 or rng.random() < 1.0 / (1.0 + i * strength):
                ballots.append(tuple(int(x) for x in rng.permutation(m)))
            else:
                ballots.append(ballots[int(rng.integers(0, i))])
    elif spec.kind == "single_peaked":
        ballots = [_sample_single_peaked(rng, m) for _ in range(n)]
    full = Profile(m, tuple(ballots))
    if spec.ballot_length is None:
        return full
    return _assign_partial_rng(full, spec.ballot_length, spec.coverage, rng)


def _assign_partial_rng(
    full_profile: Profile, ballot_length: int, coverage: int, rng: np.random.Generator
) -> Profile:
    m, n = full_profile.m, full_profile.n
    if n * ballot_length != m * coverage:
        raise ValueError("infeasible coverage: need n * ballot_length == m * coverage")
    grid = np.concatenate([rng.permutation(m) for _ in range(coverage)]).reshape(
        n, ballot_length
    )
    row_sets = [set() for _ in range(n)]
    duplicates = []
    for r in range(n):
        for j in range(ballot_length):
            x = int(grid[r, j])
            if x in row_sets[r]:
                duplicates.append((r, j))
            else:
                row_sets[r].add(x)
    for r, j in duplicates:
        x = int(grid[r, j])
        placed = False
        for _ in range(20 * n * ballot_length):
            r2 = int(rng.integers(0, n))
            j2 = int(rng.integers(0, ballot_length))
            y = int(grid[r2, j2])
            if r2 != r and y not in row_sets[r] and x not in row_sets[r2]:
                grid[r, j], grid[r2, j2] = y, x
                row_sets[r].add(y)
                row_sets[r2].discard(y)
                row_sets[r2].add(x)
                placed = True
                break
        if not placed:
            # Exhaustive fallback; the random search above almost always wins.
            for r2 in range(n):
                if r2 == r or x in row_sets[r2]:
                    continue
                for j2 in range(ballot_length):
                    y = int(grid[r2, j2])
                    if y not in row_sets[r]:
                        grid[r, j], grid[r2, j2] = y, x
                        row_sets[r].add(y)
                        row_sets[r2].discard(y)
                        row_sets[r2].add(x)
                        placed = True
                        break
                if placed:
                    break
        if not placed:
            raise ValueError("could not repair balanced assignment; infeasible layout")
    ballots = []
    for r in range(n):
        assigned = row_sets[r]
        ballots.append(tuple(a for a in full_profile.rankings[r] if a in assigned))
    return Profile(m, tuple(ballots))


def assign_partial(
    full_profile: Profile, ballot_length: int, coverage: int, seed
) -> Profile:
    """Cut full rankings down to a balanced random partial assignment.

    Each voter keeps a ``ballot_length``-subset of alternatives (their full
    ranking restricted to it, order preserved) and every alternative appears
    on exactly ``coverage`` ballots.  Built by stacking ``coverage`` random
    permutations into an n-by-ballot_length grid and repairing within-row
    duplicates by swaps.

    Raises:
        ValueError: If ``n * ballot_length != m * coverage``.
    """
    if not full_profile.is_full():
        raise ValueError("assign_partial expects full rankings")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return _assign_partial_rng(full_profile, ballot_length, coverage, rng)


def _as_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _split_outside_braces(body: str) -> list[str]:
    parts = []
    depth = 0
    cur = []
    for ch in body:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced braces in ranking line")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if depth != 0:
        raise ValueError("unbalanced braces in ranking line")
    return parts


def parse_preflib(data, fmt: str) -> tuple[Profile, list[str]]:
    """Parse a PrefLib-style election file.

    Args:
        data: File contents (bytes or text).
        fmt: 'soc' (complete strict orders), 'soi' (incomplete strict
            orders), or 'toc' (complete orders with ties — accepted only
            when every tie-group is a singleton, since ballots here are
            strict).

    Returns:
        (profile, names): names indexed by 0-based alternative id.

    Raises:
        ValueError: On a malformed header, unknown alternative id, ballots
            of the wrong completeness for the format, or a genuine tie.
    """
    if fmt not in ("soc", "soi", "toc"):
        raise ValueError("format must be 'soc', 'soi', or 'toc'")
    m = None
    names: dict[int, str] = {}
    ballots: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(_as_text(data).splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta = line.lstrip("#").strip()
            if meta.upper().startswith("NUMBER ALTERNATIVES"):
                try:
                    m = int(meta.split(":", 1)[1])
                except (IndexError, ValueError) as exc:
                    raise ValueError(f"line {lineno}: bad NUMBER ALTERNATIVES header") from exc
            elif meta.upper().startswith("ALTERNATIVE NAME"):
                head, _, name = meta.partition(":")
                try:
                    idx = int(head.split()[-1])
                except ValueError as exc:
                    raise ValueError(f"line {lineno}: bad ALTERNATIVE NAME header") from exc
                names[idx] = name.strip()
            continue
        if m is None:
            raise ValueError("missing '# NUMBER ALTERNATIVES' header before ballots")
        count_str, sep, body = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'count: ranking'")
        try:
            count = int(count_str)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad multiplicity {count_str!r}") from exc
        if count < 0:
            raise ValueError(f"line {lineno}: negative multiplicity")
        entries = []
        for token in _split_outside_braces(body):
            token = token.strip()
            if not token:
                continue
            if token.startswith("{"):
                inner = [x.strip() for x in token[1:-1].split(",") if x.strip()]
                if fmt != "toc":
                    raise ValueError(f"line {lineno}: tie groups are only valid in toc files")
                if len(inner) != 1:
                    raise ValueError(
                        f"line {lineno}: tie group {{{','.join(inner)}}} cannot be "
                        "represented as a strict ballot"
                    )
                token = inner[0]
            try:
                alt = int(token)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad alternative id {token!r}") from exc
            if not 1 <= alt <= m:
                raise ValueError(f"line {lineno}: alternative id {alt} outside 1..{m}")
            entries.append(alt - 1)
        if fmt in ("soc", "toc") and len(entries) != m:
            raise ValueError(f"line {lineno}: {fmt} requires complete rankings")
        ballots.extend([tuple(entries)] * count)
    if m is None:
        raise ValueError("missing '# NUMBER ALTERNATIVES' header")
    name_list = [names.get(i + 1, str(i + 1)) for i in range(m)]
    return Profile(m, tuple(ballots)), name_list


def parse_scores_csv(data, min_reviews: int = 0) -> dict[str, list[float]]:
    """Parse (item_id, reviewer_id, score) CSV rows into per-item score lists.

    A header row is tolerated.  Items with fewer than ``min_reviews`` scores
    are dropped.

    Raises:
        ValueError: On a non-numeric score or a duplicate (item, reviewer)
            pair.
    """
    reader = csv.reader(io.StringIO(_as_text(data)))
    scores: dict[str, list[float]] = {}
    seen: set[tuple[str, str]] = set()
    for rowno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 3:
            raise ValueError(f"row {rowno}: expected item_id, reviewer_id, score")
        item, reviewer, score_str = row[0].strip(), row[1].strip(), row[2].strip()
        try:
            score = float(score_str)
        except ValueError:
            if rowno == 1:
                continue  # header row
            raise ValueError(f"row {rowno}: non-numeric score {score_str!r}") from None
        key = (item, reviewer)
        if key in seen:
            raise ValueError(f"row {rowno}: duplicate score for item {item!r} from reviewer {reviewer!r}")
        seen.add(key)
        scores.setdefault(item, []).append(score)
    return {k: v for k, v in scores.items() if len(v) >= min_reviews}


def parse_event_rankings(data) -> tuple[Profile, list[str]]:
    """Parse (event_id, rank, name) CSV rows into a partial-ranking profile.

    Each event becomes one voter ranking its listed names by ascending rank
    (ties broken by input order).  A name listed twice in one event keeps
    its first row only (with a warning).  Alternative ids are assigned by
    sorted name.
    """
    reader = csv.reader(io.StringIO(_as_text(data)))
    events: dict[str, list[tuple[int, int, str]]] = {}
    order: list[str] = []
    for rowno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 3:
            raise ValueError(f"row {rowno}: expected event_id, rank, name")
        event, rank_str, name = row[0].strip(), row[1].strip(), row[2].strip()
        try:
            rank = int(rank_str)
        except ValueError:
            if rowno == 1:
                continue  # header row
            raise ValueError(f"row {rowno}: non-integer rank {rank_str!r}") from None
        if event not in events:
            events[event] = []
            order.append(event)
        events[event].append((rank, rowno, name))
    all_names = sorted({name for rows in events.values() for _, _, name in rows})
    ids = {name: i for i, name in enumerate(all_names)}
    ballots = []
    for event in order:
        rows = sorted(events[event])
        ballot = []
        seen_names = set()
        for _, _, name in rows:
            if name in seen_names:
                warnings.warn(
                    f"event {event!r}: duplicate entry for {name!r} dropped", stacklevel=2
                )
                continue
            seen_names.add(name)
            ballot.append(ids[name])
        ballots.append(tuple(ballot))
    return Profile(max(len(all_names), 1), tuple(ballots)), all_names


def emit_profile(p: Profile, names: Sequence[str] | None = None) -> bytes:
    """Serialize a profile as JSON: {"m": ..., "names": [...], "ballots": [...]}."""
    if names is None:
        names = [str(i) for i in range(p.m)]
    if len(names) != p.m:
        raise ValueError("names length must equal m")
    doc = {"m": p.m, "names": list(names), "ballots": [list(b) for b in p.rankings]}
    return _to_json(doc).encode("utf-8")


def parse_profile(data) -> tuple[Profile, list[str]]:
    """Parse the JSON profile format back into (profile, names)."""
    try:
        doc = json.loads(_as_text(data))
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad profile JSON: {exc}") from exc
    if not isinstance(doc, dict) or "m" not in doc or "ballots" not in doc:
        raise ValueError("profile JSON needs 'm' and 'ballots' fields")
    m = doc["m"]
    if not isinstance(m, int):
        raise ValueError("'m' must be an integer")
    ballots = []
    for ballot in doc["ballots"]:
        ballots.append(tuple(int(x) for x in ballot))
    names = [str(x) for x in doc.get("names", [str(i) for i in range(m)])]
    if len(names) != m:
        raise ValueError("names length must equal m")
    return Profile(m, tuple(ballots)), names


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _to_json(x, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 1)}' for k, v in x.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, (list, tuple)):
        if not x:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
            return "[" + ", ".join(_to_json(v) for v in x) + "]"
        items = [f"{pad}  {_to_json(v, indent + 1)}" for v in x]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return _format_float(float(x))
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _label_of(rule) -> str:
    return rule if isinstance(rule, str) else rule.label


def _report_doc(report: DisagreementReport) -> dict:
    return {
        "type": "disagreement_report",
        "version": __version__,
        "labels": list(report.labels),
        "seed": report.seed,
        "n_splits": report.n_splits,
        "method": report.method,
        "weighting": report.weighting,
        "normalized": report.normalized,
        "skip_empty": report.skip_empty,
        "m": report.m,
        "n": report.n,
        "stats": [
            {"label": label, "mean": s.mean, "sem": s.sem, "values": list(s.values)}
            for label, s in zip(report.labels, report.stats)
        ],
    }


def emit_report(obj) -> bytes:
    """Serialize a report object as stable, reparseable JSON.

    Handles ``DisagreementReport``, ``PickResult``, ``AxiomOutcome``, and
    plain dicts.  Field order is fixed and floats carry 17 significant
    digits, so equal inputs produce byte-identical output and
    ``parse_report(emit_report(x)) == x``.
    """
    if isinstance(obj, DisagreementReport):
        doc = _report_doc(obj)
    elif isinstance(obj, PickResult):
        doc = {
            "type": "pick_result",
            "version": __version__,
            "chosen": _label_of(obj.chosen),
            "argmin": [_label_of(c) for c in obj.argmin],
            "report": _report_doc(obj.report),
        }
    elif isinstance(obj, AxiomOutcome):
        doc = {
            "type": "axiom_outcome",
            "version": __version__,
            "axiom": obj.axiom,
            "instances": obj.instances,
            "violations": obj.violations,
            "rate": obj.rate,
        }
    elif isinstance(obj, dict):
        doc = obj
    else:
        raise TypeError(f"cannot emit {type(obj).__name__}")
    return (_to_json(doc) + "\n").encode("utf-8")


def _parse_report_doc(doc: dict) -> DisagreementReport:
    stats = tuple(
        SplitStats(mean=s["mean"], sem=s["sem"], values=tuple(s["values"]))
        for s in doc["stats"]
    )
    return DisagreementReport(
        labels=tuple(doc["labels"]),
        stats=stats,
        seed=doc["seed"],
        n_splits=doc["n_splits"],
        method=doc["method"],
        weighting=doc["weighting"],
        normalized=doc["normalized"],
        skip_empty=doc["skip_empty"],
        m=doc["m"],
        n=doc["n"],
    )


def _rule_or_label(label: str):
    try:
        return rule_from_name(label)
    except ValueError:
        return label


def parse_report(data):
    """Parse ``emit_report`` output back into the corresponding object."""
    doc = json.loads(_as_text(data))
    kind = doc.get("type")
    if kind == "disagreement_report":
        return _parse_report_doc(doc)
    if kind == "pick_result":
        argmin = tuple(_rule_or_label(label) for label in doc["argmin"])
        report = _parse_report_doc(doc["report"])
        return PickResult(argmin=argmin, chosen=argmin[0], report=report)
    if kind == "axiom_outcome":
        return AxiomOutcome(
            axiom=doc["axiom"], instances=doc["instances"], violations=doc["violations"]
        )
    raise ValueError(f"unknown report type {kind!r}")


def profile_source(spec: DistributionSpec) -> Callable[[int], Profile]:
    """A seed-to-profile sampler closure, for violation-rate sweeps."""
    return lambda seed: sample_profile(spec, seed)
