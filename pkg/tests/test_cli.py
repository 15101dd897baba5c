"""End-to-end tests for the command line interface.

Every subcommand is driven through ``main(argv)`` in process, asserting on
exit codes (0 ok, 2 bad input, 3 bad configuration, 4 resource limit) and
on the exact bytes written to stdout or files.
"""

import io
import json
import sys
import types

import numpy as np
import pytest

from rulepick.cli import main
from rulepick.consistency import split_disagreement, split_sequence
from rulepick.core import Profile
from rulepick.data import (
    PickResult,
    emit_profile,
    parse_profile,
    parse_report,
)
from rulepick.metrics import mean_and_sem
from rulepick.perfpos import (
    PerfPosInstance,
    emit_instance,
    reduce_k_perfpos,
    verify_witness,
)
from rulepick.rules import rule_from_name

SOC_TEXT = b"""# FILE NAME: tiny.soc
# NUMBER ALTERNATIVES: 3
# ALTERNATIVE NAME 1: apple
# ALTERNATIVE NAME 2: pear
# ALTERNATIVE NAME 3: plum
2: 1,3,2
1: 2,1,3
"""

EVENTS_CSV = b"""race_a,1,carol
race_a,2,alice
race_a,3,bob
race_b,1,alice
race_b,2,carol
"""

SCORES_CSV = "\n".join(
    f"item{i},rev{j},{3.0 + i + 0.1 * j}" for i in range(3) for j in range(6)
).encode() + b"\n"


def random_profile(rng, m, n):
    return Profile(m, tuple(tuple(int(a) for a in rng.permutation(m)) for _ in range(n)))


def run(argv, capsysbinary):
    code = main(argv)
    return code, capsysbinary.readouterr().out


@pytest.fixture
def profile_path(tmp_path):
    p = random_profile(np.random.default_rng(7), 4, 10)
    path = tmp_path / "profile.json"
    path.write_bytes(emit_profile(p))
    return str(path)


class TestPick:
    def test_reports_chosen_rule(self, profile_path, capsysbinary):
        code, out = run(
            ["pick", profile_path, "--rules", "plurality,veto,borda", "--splits", "8"],
            capsysbinary,
        )
        assert code == 0
        result = parse_report(out)
        assert isinstance(result, PickResult)
        assert result.chosen.label in ("plurality", "veto", "borda")
        assert result.report.n_splits == 8
        assert result.report.method == "mc"

    def test_bytes_deterministic(self, profile_path, capsysbinary):
        argv = ["pick", profile_path, "--splits", "6", "--seed", "3"]
        _, first = run(argv, capsysbinary)
        _, second = run(argv, capsysbinary)
        assert first == second

    def test_jobs_match_serial_bytes(self, profile_path, capsysbinary):
        base = ["pick", profile_path, "--splits", "6", "--seed", "1"]
        _, serial = run(base, capsysbinary)
        _, parallel = run(base + ["--jobs", "2"], capsysbinary)
        assert serial == parallel

    def test_exact_method_reported(self, tmp_path, capsysbinary):
        p = random_profile(np.random.default_rng(0), 3, 5)
        path = tmp_path / "small.json"
        path.write_bytes(emit_profile(p))
        code, out = run(
            ["pick", str(path), "--rules", "plurality,veto", "--exact"], capsysbinary
        )
        assert code == 0
        result = parse_report(out)
        assert result.report.method == "exact"
        assert result.report.seed is None
        assert result.report.n_splits == 2**5

    def test_reads_stdin_with_format(self, profile_path, capsysbinary, monkeypatch):
        data = open(profile_path, "rb").read()
        monkeypatch.setattr(sys, "stdin", types.SimpleNamespace(buffer=io.BytesIO(data)))
        code, out = run(["pick", "-", "--format", "json", "--splits", "4"], capsysbinary)
        assert code == 0
        assert parse_report(out).report.n_splits == 4

    def test_stdin_without_format_is_config_error(self, capsysbinary, monkeypatch):
        monkeypatch.setattr(sys, "stdin", types.SimpleNamespace(buffer=io.BytesIO(b"{}")))
        code, _ = run(["pick", "-"], capsysbinary)
        assert code == 3

    def test_missing_file_is_input_error(self, tmp_path, capsysbinary):
        code, _ = run(["pick", str(tmp_path / "absent.json")], capsysbinary)
        assert code == 2

    def test_malformed_json_is_input_error(self, tmp_path, capsysbinary):
        path = tmp_path / "bad.json"
        path.write_bytes(b"{not json")
        code, _ = run(["pick", str(path)], capsysbinary)
        assert code == 2

    def test_vector_rule_inside_list(self, profile_path, capsysbinary):
        code, out = run(
            [
                "pick",
                profile_path,
                "--rules",
                "plurality,vector:1,0.5,0.25,0,borda",
                "--splits",
                "4",
            ],
            capsysbinary,
        )
        assert code == 0
        result = parse_report(out)
        assert result.report.labels == ("plurality", "vector:1.0,0.5,0.25,0.0", "borda")

    def test_unknown_rule_is_config_error(self, profile_path, capsysbinary):
        code, _ = run(["pick", profile_path, "--rules", "bogus"], capsysbinary)
        assert code == 3

    def test_exact_blowup_is_resource_error(self, tmp_path, capsysbinary):
        rng = np.random.default_rng(2)
        ballots = set()
        while len(ballots) < 25:
            ballots.add(tuple(int(a) for a in rng.permutation(8)))
        path = tmp_path / "wide.json"
        path.write_bytes(emit_profile(Profile(8, tuple(sorted(ballots)))))
        code, _ = run(["pick", str(path), "--exact"], capsysbinary)
        assert code == 4

    def test_output_file(self, profile_path, tmp_path, capsysbinary):
        out_path = tmp_path / "report.json"
        code, out = run(
            ["pick", profile_path, "--splits", "4", "-o", str(out_path)], capsysbinary
        )
        assert code == 0
        assert out == b""
        assert isinstance(parse_report(out_path.read_bytes()), PickResult)


def _read_csv(out: bytes):
    lines = out.decode("utf-8").splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    rows = [ln.split(",") for ln in lines if ln and not ln.startswith("#")]
    return comments, rows[0], rows[1:]


class TestEval:
    def test_kt_table_matches_library(self, profile_path, capsysbinary):
        code, out = run(
            [
                "eval",
                profile_path,
                "--rules",
                "plurality,borda",
                "--splits",
                "5",
                "--seed",
                "9",
            ],
            capsysbinary,
        )
        assert code == 0
        comments, header, rows = _read_csv(out)
        assert header == ["rule", "mean", "sem"]
        assert comments[0].startswith("# rulepick ")
        assert "command=eval" in comments[0]
        p, _ = parse_profile(open(profile_path, "rb").read())
        splits = split_sequence(p, 9, 5)
        for row, name in zip(rows, ("plurality", "borda")):
            rule = rule_from_name(name)
            values = [split_disagreement(rule, p, s) for s in splits]
            mean, sem = mean_and_sem(values)
            assert row[0] == name
            assert row[1] == format(mean, ".17g")
            assert row[2] == format(sem, ".17g")

    def test_jaccard_requires_k(self, profile_path, capsysbinary):
        code, _ = run(["eval", profile_path, "--metric", "jaccard"], capsysbinary)
        assert code == 3

    def test_jaccard_values_bounded(self, profile_path, capsysbinary):
        code, out = run(
            ["eval", profile_path, "--metric", "jaccard", "--k", "2", "--splits", "6"],
            capsysbinary,
        )
        assert code == 0
        _, _, rows = _read_csv(out)
        assert all(0.0 <= float(row[1]) <= 1.0 for row in rows)

    def test_nonpositive_k_rejected(self, profile_path, capsysbinary):
        code, _ = run(
            ["eval", profile_path, "--metric", "jaccard", "--k", "0"], capsysbinary
        )
        assert code == 3


class TestAnneal:
    def test_reports_vector_and_objective(self, profile_path, capsysbinary):
        code, out = run(
            [
                "anneal",
                profile_path,
                "--steps",
                "15",
                "--starts",
                "borda",
                "--splits",
                "4",
            ],
            capsysbinary,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["type"] == "anneal_result"
        assert len(doc["vector"]) == 4
        assert doc["vector"][0] == 1.0 and doc["vector"][-1] == 0.0
        assert doc["starts"] == ["borda"]
        assert isinstance(doc["objective"], float)

    def test_trace_csv_written(self, profile_path, tmp_path, capsysbinary):
        trace_path = tmp_path / "trace.csv"
        code, _ = run(
            [
                "anneal",
                profile_path,
                "--steps",
                "12",
                "--starts",
                "borda",
                "--splits",
                "4",
                "--trace",
                str(trace_path),
            ],
            capsysbinary,
        )
        assert code == 0
        lines = trace_path.read_text().splitlines()
        assert lines[0] == "chain,step,delta,accepted,objective,best"
        assert len(lines) == 1 + 12
        best = [float(ln.split(",")[5]) for ln in lines[1:]]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))

    def test_custom_vector_start(self, profile_path, capsysbinary):
        code, out = run(
            [
                "anneal",
                profile_path,
                "--steps",
                "8",
                "--starts",
                "vector:1,0.4,0.1,0",
                "--splits",
                "3",
            ],
            capsysbinary,
        )
        assert code == 0
        assert json.loads(out)["starts"] == ["vector:1.0,0.4,0.1,0.0"]

    def test_non_positional_start_rejected(self, profile_path, capsysbinary):
        code, _ = run(["anneal", profile_path, "--starts", "kemeny"], capsysbinary)
        assert code == 3

    def test_bytes_deterministic(self, profile_path, capsysbinary):
        argv = ["anneal", profile_path, "--steps", "10", "--splits", "4", "--seed", "2"]
        _, first = run(argv, capsysbinary)
        _, second = run(argv, capsysbinary)
        assert first == second


class TestAxioms:
    def test_reversal_rate_zero(self, capsysbinary):
        code, out = run(
            [
                "axioms",
                "--axiom",
                "reversal_symmetry",
                "--source",
                "impartial_culture",
                "--m",
                "4",
                "--n",
                "6",
                "--profiles",
                "3",
                "--splits",
                "4",
                "--rules",
                "plurality,veto,borda",
            ],
            capsysbinary,
        )
        assert code == 0
        _, header, rows = _read_csv(out)
        assert header == ["axiom", "source", "m", "n", "instances", "violations", "rate"]
        assert rows[0][0] == "reversal_symmetry"
        assert rows[0][4] == "3"
        assert rows[0][5] == "0"
        assert float(rows[0][6]) == 0.0

    def test_monotonicity_small_sweep(self, capsysbinary):
        code, out = run(
            [
                "axioms",
                "--axiom",
                "monotonicity",
                "--m",
                "4",
                "--n",
                "8",
                "--profiles",
                "3",
                "--splits",
                "4",
            ],
            capsysbinary,
        )
        assert code == 0
        _, _, rows = _read_csv(out)
        assert rows[0][4] == "3"
        assert 0.0 <= float(rows[0][6]) <= 1.0

    def test_bad_axiom_choice_exits_2(self, capsysbinary):
        with pytest.raises(SystemExit) as exc:
            main(["axioms", "--axiom", "bogus"])
        assert exc.value.code == 2

    def test_bytes_deterministic(self, capsysbinary):
        argv = [
            "axioms",
            "--axiom",
            "union_consistency",
            "--m",
            "3",
            "--n",
            "6",
            "--profiles",
            "2",
            "--splits",
            "4",
            "--seed",
            "5",
        ]
        _, first = run(argv, capsysbinary)
        _, second = run(argv, capsysbinary)
        assert first == second


def _instance_path(tmp_path, ballots1, ballots2, m, name="inst.json"):
    p = Profile(m, tuple(ballots1) + tuple(ballots2))
    split = (1,) * len(ballots1) + (2,) * len(ballots2)
    path = tmp_path / name
    path.write_bytes(emit_instance(p, split))
    return str(path), p, split


class TestPerfpos:
    def test_decide_yes_instance(self, tmp_path, capsysbinary):
        ballots = ((0, 1, 2), (0, 2, 1), (1, 0, 2))
        path, p, split = _instance_path(tmp_path, ballots, ballots, 3)
        code, out = run(["perfpos", path], capsysbinary)
        assert code == 0
        doc = json.loads(out)
        assert doc["type"] == "perfpos_answer"
        assert doc["decision"] is True
        assert doc["certified_order"] == [0, 1, 2]
        inst = PerfPosInstance.from_profile_split(p, split)
        assert verify_witness(tuple(doc["witness"]), inst)

    def test_decide_no_instance(self, tmp_path, capsysbinary):
        path, _, _ = _instance_path(tmp_path, [(0, 1, 2)], [(2, 1, 0)], 3)
        code, out = run(["perfpos", path], capsysbinary)
        assert code == 0
        doc = json.loads(out)
        assert doc["decision"] is False
        assert doc["witness"] is None
        assert doc["certified_order"] is None

    def test_verify_mode(self, tmp_path, capsysbinary):
        path, _, _ = _instance_path(tmp_path, [(0, 1, 2)], [(0, 1, 2)], 3)
        code, out = run(
            ["perfpos", path, "--mode", "verify", "--vector", "1,0.5,0"], capsysbinary
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["type"] == "perfpos_verify"
        assert doc["valid"] is True
        assert doc["vector"] == [1.0, 0.5, 0.0]

    def test_verify_without_vector_is_config_error(self, tmp_path, capsysbinary):
        path, _, _ = _instance_path(tmp_path, [(0, 1, 2)], [(0, 1, 2)], 3)
        code, _ = run(["perfpos", path, "--mode", "verify"], capsysbinary)
        assert code == 3

    def test_reduce_mode_outputs_counts(self, tmp_path, capsysbinary):
        ballots1 = ((0, 1), (2, 0))
        ballots2 = ((1, 2), (0, 1))
        path, p, split = _instance_path(tmp_path, ballots1, ballots2, 3)
        code, out = run(["perfpos", path, "--mode", "reduce"], capsysbinary)
        assert code == 0
        doc = json.loads(out)
        expected = reduce_k_perfpos(p, split)
        assert tuple(tuple(row) for row in doc["counts1"]) == expected.counts1
        assert tuple(tuple(row) for row in doc["counts2"]) == expected.counts2

    def test_limit_exceeded_is_resource_error(self, tmp_path, capsysbinary):
        ballot = tuple(range(9))
        path, _, _ = _instance_path(tmp_path, [ballot], [ballot], 9)
        code, _ = run(["perfpos", path], capsysbinary)
        assert code == 4
        code, out = run(["perfpos", path, "--limit", "9"], capsysbinary)
        assert code == 0
        assert json.loads(out)["decision"] is True

    def test_reads_stdin(self, tmp_path, capsysbinary, monkeypatch):
        path, _, _ = _instance_path(tmp_path, [(0, 1, 2)], [(0, 1, 2)], 3)
        data = open(path, "rb").read()
        monkeypatch.setattr(sys, "stdin", types.SimpleNamespace(buffer=io.BytesIO(data)))
        code, out = run(["perfpos", "-"], capsysbinary)
        assert code == 0
        assert json.loads(out)["decision"] is True

    def test_malformed_instance_is_input_error(self, tmp_path, capsysbinary):
        path = tmp_path / "broken.json"
        path.write_bytes(b'{"m": 3}')
        code, _ = run(["perfpos", str(path)], capsysbinary)
        assert code == 2


class TestGenerate:
    def test_mallows_profile_shape(self, capsysbinary):
        code, out = run(
            ["generate", "--dist", "mallows", "--m", "5", "--n", "12", "--seed", "3"],
            capsysbinary,
        )
        assert code == 0
        p, names = parse_profile(out)
        assert p.m == 5 and p.n == 12
        assert p.is_full()
        assert names == [str(i) for i in range(5)]

    def test_seed_controls_output(self, capsysbinary):
        argv = ["generate", "--dist", "impartial_culture", "--m", "4", "--n", "6"]
        _, first = run(argv + ["--seed", "1"], capsysbinary)
        _, again = run(argv + ["--seed", "1"], capsysbinary)
        _, other = run(argv + ["--seed", "2"], capsysbinary)
        assert first == again
        assert first != other

    def test_partial_ballots(self, capsysbinary):
        code, out = run(
            [
                "generate",
                "--dist",
                "plackett_luce",
                "--m",
                "6",
                "--n",
                "10",
                "--ballot-length",
                "3",
                "--coverage",
                "5",
            ],
            capsysbinary,
        )
        assert code == 0
        p, _ = parse_profile(out)
        assert all(len(b) == 3 for b in p.rankings)

    def test_bad_phi_is_config_error(self, capsysbinary):
        code, _ = run(
            ["generate", "--dist", "mallows", "--m", "4", "--n", "5", "--phi", "1.5"],
            capsysbinary,
        )
        assert code == 3


class TestScores:
    def test_picks_aggregator(self, tmp_path, capsysbinary):
        path = tmp_path / "scores.csv"
        path.write_bytes(SCORES_CSV)
        code, out = run(["scores", str(path), "--trials", "50"], capsysbinary)
        assert code == 0
        comments, header, rows = _read_csv(out)
        assert header == ["aggregator", "mean", "sem", "chosen"]
        assert [row[0] for row in rows] == ["mean", "min", "max", "median", "trimmed_mean"]
        assert "items=3" in comments[0]
        chosen = [row[0] for row in rows if row[3] == "1"]
        assert chosen
        best = min(float(row[1]) for row in rows)
        assert all(float(row[1]) == best for row in rows if row[3] == "1")

    def test_unknown_aggregator_is_config_error(self, tmp_path, capsysbinary):
        path = tmp_path / "scores.csv"
        path.write_bytes(SCORES_CSV)
        code, _ = run(["scores", str(path), "--aggregators", "mean,bogus"], capsysbinary)
        assert code == 3

    def test_bad_rows_are_input_error(self, tmp_path, capsysbinary):
        path = tmp_path / "scores.csv"
        path.write_bytes(b"item,rev,3.0\nitem,rev2,oops\n")
        code, _ = run(["scores", str(path)], capsysbinary)
        assert code == 2

    def test_bytes_deterministic(self, tmp_path, capsysbinary):
        path = tmp_path / "scores.csv"
        path.write_bytes(SCORES_CSV)
        argv = ["scores", str(path), "--trials", "40", "--seed", "8"]
        _, first = run(argv, capsysbinary)
        _, second = run(argv, capsysbinary)
        assert first == second


class TestConvert:
    def test_soc_to_json(self, tmp_path, capsysbinary):
        path = tmp_path / "tiny.soc"
        path.write_bytes(SOC_TEXT)
        code, out = run(["convert", str(path)], capsysbinary)
        assert code == 0
        p, names = parse_profile(out)
        assert names == ["apple", "pear", "plum"]
        assert p.rankings == ((0, 2, 1), (0, 2, 1), (1, 0, 2))

    def test_csv_extension_maps_to_events(self, tmp_path, capsysbinary):
        path = tmp_path / "races.csv"
        path.write_bytes(EVENTS_CSV)
        code, out = run(["convert", str(path)], capsysbinary)
        assert code == 0
        p, names = parse_profile(out)
        assert names == ["alice", "bob", "carol"]
        assert p.rankings == ((2, 0, 1), (0, 2))

    def test_unknown_suffix_needs_format(self, tmp_path, capsysbinary):
        path = tmp_path / "profile.dat"
        path.write_bytes(b"irrelevant")
        code, _ = run(["convert", str(path)], capsysbinary)
        assert code == 3

    def test_missing_input_is_input_error(self, tmp_path, capsysbinary):
        code, _ = run(["convert", str(tmp_path / "absent.soc")], capsysbinary)
        assert code == 2


class TestTopLevel:
    def test_version_flag(self, capsysbinary):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsysbinary.readouterr().out.startswith(b"rulepick ")

    def test_no_subcommand_exits_2(self, capsysbinary):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
