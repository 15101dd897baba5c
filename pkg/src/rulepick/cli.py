"""Command line interface.

Subcommands cover the whole toolkit: picking rules, evaluating them on
splits, annealing scoring vectors, sweeping axiom violation rates, the
perfect-split decision procedure, profile generation, score aggregation,
and format conversion.  Exit codes: 0 success, 2 unreadable or malformed
input data, 3 bad configuration, 4 resource limit hit.

Outputs are deterministic: the same invocation writes byte-identical
reports, and every report echoes the configuration that produced it.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from rulepick._version import __version__
from rulepick.anneal import DEFAULT_STARTS, AnnealConfig, anneal
from rulepick.axioms import AXIOMS
from rulepick.axioms import violation_rate as _violation_rate
from rulepick.consistency import pick_aggregator, pick_rule, split_disagreement, split_sequence
from rulepick.consistency import side_profiles as _side_profiles
from rulepick.core import empty_ranking
from rulepick.data import (
    DistributionSpec,
    emit_profile,
    emit_report,
    parse_event_rankings,
    parse_preflib,
    parse_profile,
    parse_scores_csv,
    profile_source,
    sample_profile,
)
from rulepick.errors import ResourceLimitError
from rulepick.metrics import jaccard_dissimilarity, mean_and_sem, top_k
from rulepick.perfpos import (
    PerfPosInstance,
    decide_perfpos,
    parse_instance,
    reduce_k_perfpos,
    verify_witness,
)
from rulepick.rules import SCORE_AGGREGATORS, Positional, rule_from_name

_PROFILE_FORMATS = ("json", "soc", "soi", "toc", "events")

_EXIT_INPUT = 2
_EXIT_CONFIG = 3
_EXIT_RESOURCE = 4


class _InputError(Exception):
    """Unreadable or malformed input data (exit code 2)."""


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc


def _write_output(data: bytes, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _detect_format(path: str, override: str | None) -> str:
    if override:
        return override
    if path == "-":
        raise ValueError("reading from stdin needs an explicit --format")
    suffix = path.rsplit(".", 1)[-1].lower() if "." in path else ""
    if suffix in _PROFILE_FORMATS:
        return suffix
    if suffix == "csv":
        return "events"
    raise ValueError(f"cannot infer profile format from {path!r}; pass --format")


def _load_profile(path: str, fmt: str | None):
    fmt = _detect_format(path, fmt)
    data = _read_input(path)
    try:
        if fmt == "json":
            return parse_profile(data)
        if fmt in ("soc", "soi", "toc"):
            return parse_preflib(data, fmt)
        return parse_event_rankings(data)
    except ValueError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_rules(spec: str) -> tuple:
    # ``vector:1,0.5,0`` contains the list separator, so numeric fragments
    # are folded back into the preceding vector token (rule names are never
    # numeric, so this is unambiguous).
    names: list[str] = []
    for piece in spec.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if names and names[-1].startswith("vector:") and _is_number(piece):
            names[-1] += "," + piece
        else:
            names.append(piece)
    rules = tuple(rule_from_name(name) for name in names)
    if not rules:
        raise ValueError("no rules given")
    return rules


def _config_comment(**kwargs) -> list[str]:
    parts = [f"rulepick {__version__}"] + [f"{k}={v}" for k, v in kwargs.items()]
    return ["# " + " ".join(parts)]


def _emit_csv(lines: list[str], header: list[str], rows: list[list[str]], out: str | None) -> None:
    buf = io.StringIO()
    for line in lines:
        buf.write(line + "\r\n")
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _write_output(buf.getvalue().encode("utf-8"), out)


def _f(x: float) -> str:
    return format(x, ".17g")


def cmd_pick(args) -> int:
    rules = _parse_rules(args.rules)
    p, _ = _load_profile(args.input, args.format)
    result = pick_rule(
        rules,
        p,
        n_splits=args.splits,
        seed=args.seed,
        tie_epsilon=args.tie_epsilon,
        weighting=args.weighting,
        method="exact" if args.exact else "mc",
        skip_empty=args.skip_empty,
        jobs=args.jobs,
    )
    _write_output(emit_report(result), args.output)
    return 0


def cmd_eval(args) -> int:
    rules = _parse_rules(args.rules)
    if args.metric == "jaccard":
        if args.k is None:
            raise ValueError("--metric jaccard needs --k")
        if args.k < 1:
            raise ValueError("--k must be positive")
    p, _ = _load_profile(args.input, args.format)
    splits = split_sequence(p, args.seed, args.splits)
    rows = []
    for rule in rules:
        values = []
        for split in splits:
            if args.metric == "kt":
                values.append(
                    split_disagreement(rule, p, split, weighting=args.weighting)
                )
            else:
                side1, side2 = _side_profiles(p, split)
                out1 = rule.apply(side1) if side1.n else empty_ranking(p.m)
                out2 = rule.apply(side2) if side2.n else empty_ranking(p.m)
                values.append(
                    jaccard_dissimilarity(set(top_k(out1, args.k)), set(top_k(out2, args.k)))
                )
        mean, sem = mean_and_sem(values)
        rows.append([rule.label, _f(mean), _f(sem)])
    comment = _config_comment(
        command="eval",
        metric=args.metric,
        k=args.k,
        splits=args.splits,
        seed=args.seed,
        weighting=args.weighting,
    )
    _emit_csv(comment, ["rule", "mean", "sem"], rows, args.output)
    return 0


def cmd_anneal(args) -> int:
    starts = _parse_rules(args.starts)
    for start in starts:
        if not isinstance(start, Positional):
            raise ValueError("anneal starts must be positional rules")
    config = AnnealConfig(steps=args.steps, starts=starts, seed=args.seed)
    p, _ = _load_profile(args.input, args.format)
    splits = split_sequence(p, args.seed, args.splits)
    result = anneal(p, splits, config, weighting=args.weighting)
    doc = {
        "type": "anneal_result",
        "version": __version__,
        "label": result.rule.label,
        "vector": [float(w) for w in result.rule.weights_at(p.m)],
        "objective": result.objective,
        "steps": args.steps,
        "starts": [s.label for s in starts],
        "splits": args.splits,
        "seed": args.seed,
        "weighting": args.weighting,
    }
    _write_output(emit_report(doc), args.output)
    if args.trace:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["chain", "step", "delta", "accepted", "objective", "best"])
        for entry in result.trace:
            writer.writerow(
                [
                    entry.chain,
                    entry.step,
                    _f(entry.delta),
                    int(entry.accepted),
                    _f(entry.objective),
                    _f(entry.best),
                ]
            )
        with open(args.trace, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return 0


def cmd_axioms(args) -> int:
    if args.axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {args.axiom!r}")
    candidates = _parse_rules(args.rules)
    spec = DistributionSpec(kind=args.source, m=args.m, n=args.n, phi=args.phi)
    outcome = _violation_rate(
        args.axiom,
        profile_source(spec),
        n_profiles=args.profiles,
        n_splits=args.splits,
        seed=args.seed,
        candidates=candidates,
    )
    comment = _config_comment(
        command="axioms",
        profiles=args.profiles,
        splits=args.splits,
        seed=args.seed,
        phi=args.phi,
        rules=args.rules,
    )
    rows = [
        [
            outcome.axiom,
            args.source,
            str(args.m),
            str(args.n),
            str(outcome.instances),
            str(outcome.violations),
            _f(outcome.rate),
        ]
    ]
    _emit_csv(
        comment,
        ["axiom", "source", "m", "n", "instances", "violations", "rate"],
        rows,
        args.output,
    )
    return 0


def cmd_perfpos(args) -> int:
    data = _read_input(args.input)
    try:
        p, split = parse_instance(data)
    except ValueError as exc:
        raise _InputError(f"{args.input}: {exc}") from exc
    if args.mode == "reduce":
        inst = reduce_k_perfpos(p, split)
        doc = {
            "type": "perfpos_instance",
            "version": __version__,
            "counts1": [list(row) for row in inst.counts1],
            "counts2": [list(row) for row in inst.counts2],
        }
        _write_output(emit_report(doc), args.output)
        return 0
    if p.is_full():
        inst = PerfPosInstance.from_profile_split(p, split)
    else:
        inst = reduce_k_perfpos(p, split)
    if args.mode == "verify":
        if not args.vector:
            raise ValueError("--mode verify needs --vector")
        vector = tuple(float(x) for x in args.vector.split(","))
        doc = {
            "type": "perfpos_verify",
            "version": __version__,
            "vector": list(vector),
            "valid": verify_witness(vector, inst),
        }
        _write_output(emit_report(doc), args.output)
        return 0
    answer = decide_perfpos(inst, enumeration_limit=args.limit)
    doc = {
        "type": "perfpos_answer",
        "version": __version__,
        "decision": answer.decision,
        "witness": list(answer.witness) if answer.witness is not None else None,
        "certified_order": list(answer.certified_order)
        if answer.certified_order is not None
        else None,
        "limit": args.limit,
    }
    _write_output(emit_report(doc), args.output)
    return 0


def cmd_generate(args) -> int:
    spec = DistributionSpec(
        kind=args.dist,
        m=args.m,
        n=args.n,
        phi=args.phi,
        ballot_length=args.ballot_length,
        coverage=args.coverage,
    )
    p = sample_profile(spec, args.seed)
    _write_output(emit_profile(p), args.output)
    return 0


def cmd_scores(args) -> int:
    aggregators = tuple(a.strip() for a in args.aggregators.split(",") if a.strip())
    for agg in aggregators:
        if agg not in SCORE_AGGREGATORS:
            raise ValueError(f"unknown aggregator {agg!r}; expected one of {SCORE_AGGREGATORS}")
    data = _read_input(args.input)
    try:
        scores = parse_scores_csv(data, min_reviews=args.min_reviews)
    except ValueError as exc:
        raise _InputError(f"{args.input}: {exc}") from exc
    result = pick_aggregator(
        aggregators,
        scores,
        n_trials=args.trials,
        seed=args.seed,
        tie_epsilon=args.tie_epsilon,
    )
    comment = _config_comment(
        command="scores",
        trials=args.trials,
        seed=args.seed,
        min_reviews=args.min_reviews,
        items=result.report.m,
    )
    chosen = set(result.argmin)
    rows = [
        [label, _f(stats.mean), _f(stats.sem), str(int(label in chosen))]
        for label, stats in zip(result.report.labels, result.report.stats)
    ]
    _emit_csv(comment, ["aggregator", "mean", "sem", "chosen"], rows, args.output)
    return 0


def cmd_convert(args) -> int:
    p, names = _load_profile(args.input, getattr(args, "from_format", None))
    _write_output(emit_profile(p, names), args.output)
    return 0


def _add_io_args(sub, formats: bool = True) -> None:
    sub.add_argument("input", help="input path, or - for stdin")
    sub.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    if formats:
        sub.add_argument(
            "--format", choices=_PROFILE_FORMATS, default=None, help="input profile format"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulepick", description="Pick rank-aggregation rules by split consistency."
    )
    parser.add_argument("--version", action="version", version=f"rulepick {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pick = sub.add_parser("pick", help="pick the most split-consistent rule")
    _add_io_args(pick)
    pick.add_argument("--rules", default="plurality,veto,borda,two_approval")
    pick.add_argument("--splits", type=int, default=10)
    pick.add_argument("--seed", type=int, default=0)
    pick.add_argument("--weighting", choices=("auto", "on", "off"), default="auto")
    pick.add_argument("--tie-epsilon", type=float, default=0.0)
    pick.add_argument("--exact", action="store_true", help="enumerate all splits exactly")
    pick.add_argument("--skip-empty", action="store_true")
    pick.add_argument("--jobs", type=int, default=None)
    pick.set_defaults(func=cmd_pick)

    ev = sub.add_parser("eval", help="per-rule split disagreement table")
    _add_io_args(ev)
    ev.add_argument("--rules", default="plurality,veto,borda,two_approval")
    ev.add_argument("--splits", type=int, default=10)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--metric", choices=("kt", "jaccard"), default="kt")
    ev.add_argument("--k", type=int, default=None, help="top-k size for the jaccard metric")
    ev.add_argument("--weighting", choices=("auto", "on", "off"), default="auto")
    ev.set_defaults(func=cmd_eval)

    an = sub.add_parser("anneal", help="anneal a scoring vector")
    _add_io_args(an)
    an.add_argument("--steps", type=int, default=500)
    an.add_argument("--starts", default=",".join(DEFAULT_STARTS))
    an.add_argument("--splits", type=int, default=10)
    an.add_argument("--seed", type=int, default=0)
    an.add_argument("--weighting", choices=("auto", "on", "off"), default="auto")
    an.add_argument("--trace", default=None, help="write the proposal trace CSV here")
    an.set_defaults(func=cmd_anneal)

    ax = sub.add_parser("axioms", help="estimate axiom violation rates")
    ax.add_argument("-o", "--output", default=None)
    ax.add_argument("--axiom", required=True, choices=AXIOMS)
    ax.add_argument(
        "--source",
        default="mallows",
        choices=("mallows", "plackett_luce", "impartial_culture", "urn", "single_peaked"),
    )
    ax.add_argument("--m", type=int, default=10)
    ax.add_argument("--n", type=int, default=50)
    ax.add_argument("--phi", type=float, default=0.4)
    ax.add_argument("--profiles", type=int, default=500)
    ax.add_argument("--splits", type=int, default=50)
    ax.add_argument("--seed", type=int, default=0)
    ax.add_argument("--rules", default="plurality,veto,borda")
    ax.set_defaults(func=cmd_axioms)

    pp = sub.add_parser("perfpos", help="perfect-split decision procedure")
    pp.add_argument("input", help="instance JSON (profile plus side tags), or -")
    pp.add_argument("-o", "--output", default=None)
    pp.add_argument("--mode", choices=("decide", "verify", "reduce"), default="decide")
    pp.add_argument("--vector", default=None, help="comma-separated weights for --mode verify")
    pp.add_argument("--limit", type=int, default=8, help="order enumeration limit")
    pp.set_defaults(func=cmd_perfpos)

    gen = sub.add_parser("generate", help="sample a synthetic profile")
    gen.add_argument("-o", "--output", default=None)
    gen.add_argument(
        "--dist",
        default="mallows",
        choices=("mallows", "plackett_luce", "impartial_culture", "urn", "single_peaked"),
    )
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--phi", type=float, default=0.4)
    gen.add_argument("--ballot-length", type=int, default=None)
    gen.add_argument("--coverage", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(func=cmd_generate)

    sc = sub.add_parser("scores", help="pick a score aggregator")
    sc.add_argument("input", help="scores CSV (item_id,reviewer_id,score), or -")
    sc.add_argument("-o", "--output", default=None)
    sc.add_argument("--aggregators", default="mean,min,max,median,trimmed_mean")
    sc.add_argument("--trials", type=int, default=1000)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--min-reviews", type=int, default=6)
    sc.add_argument("--tie-epsilon", type=float, default=0.0)
    sc.set_defaults(func=cmd_scores)

    conv = sub.add_parser("convert", help="convert a profile to the JSON format")
    conv.add_argument("input")
    conv.add_argument("-o", "--output", default=None)
    conv.add_argument(
        "--from", dest="from_format", choices=_PROFILE_FORMATS, default=None
    )
    conv.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"rulepick: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"rulepick: {exc}", file=sys.stderr)
        return _EXIT_RESOURCE
    except (ValueError, TypeError) as exc:
        print(f"rulepick: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except OSError as exc:
        print(f"rulepick: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
