import numpy as np
import pytest

from rulepick.axioms import ShuffleSpec, shuffle
from rulepick.core import Profile, position_counts
from rulepick.errors import ResourceLimitError
from rulepick.perfpos import (
    PerfPosAnswer,
    PerfPosInstance,
    decide_perfpos,
    emit_instance,
    generate_hard_instance,
    parse_instance,
    reduce_k_perfpos,
    verify_witness,
)


def instance_from(ballots1, ballots2, m):
    p = Profile(m, tuple(ballots1) + tuple(ballots2))
    split = (1,) * len(ballots1) + (2,) * len(ballots2)
    return PerfPosInstance.from_profile_split(p, split)


class TestPerfPosInstance:
    def test_shape_properties(self):
        inst = instance_from([(0, 1, 2), (1, 0, 2)], [(2, 1, 0), (0, 1, 2)], 3)
        assert inst.m == 3
        assert inst.k == 3
        assert inst.voters_per_side == 2

    def test_validation(self):
        with pytest.raises(ValueError, match="non-empty"):
            PerfPosInstance((), ())
        with pytest.raises(ValueError, match="shape"):
            PerfPosInstance(((1, 0), (0, 1)), ((1,), (1,)))
        with pytest.raises(ValueError, match="non-negative"):
            PerfPosInstance(((1, -1), (0, 2)), ((1, 1), (0, 0)))
        # Column sums uneven within a matrix.
        with pytest.raises(ValueError, match="position"):
            PerfPosInstance(((1, 0), (1, 0)), ((1, 1), (1, 1)))
        # Groups of different sizes.
        with pytest.raises(ValueError, match="equally many"):
            PerfPosInstance(((1, 0), (0, 1)), ((2, 0), (0, 2)))

    def test_from_profile_split_requires_uniform_length(self):
        p = Profile(3, ((0, 1, 2), (0, 1)))
        with pytest.raises(ValueError, match="uniform"):
            PerfPosInstance.from_profile_split(p, (1, 2))

    def test_from_profile_split_requires_equal_sides(self):
        p = Profile(3, ((0, 1, 2), (1, 0, 2), (2, 1, 0)))
        with pytest.raises(ValueError, match="equally many"):
            PerfPosInstance.from_profile_split(p, (1, 1, 2))


class TestVerifyWitness:
    def test_accepts_strict_agreement(self):
        inst = instance_from([(0, 1, 2), (0, 1, 2)], [(0, 1, 2), (0, 1, 2)], 3)
        assert verify_witness((1.0, 0.5, 0.0), inst) is True

    def test_rejects_tie(self):
        inst = instance_from([(0, 1, 2), (0, 1, 2)], [(0, 1, 2), (0, 1, 2)], 3)
        # Two-approval credit ties 0 with 1 on both sides.
        assert verify_witness((1.0, 1.0, 0.0), inst) is False

    def test_rejects_opposite_orders(self):
        inst = instance_from([(0, 1, 2)], [(2, 1, 0)], 3)
        assert verify_witness((1.0, 0.5, 0.0), inst) is False

    def test_exact_arithmetic_on_ties(self):
        # Totals tie exactly at x = 1/2 on side 1 of this instance.
        inst = PerfPosInstance(
            (((2, 0, 1), (1, 2, 0), (0, 1, 2))),
            (((1, 1, 1), (2, 0, 1), (0, 2, 1))),
        )
        assert verify_witness((1.0, 0.5, 0.0), inst) is False
        assert verify_witness((1.0, 0.75, 0.0), inst) is True

    def test_length_mismatch(self):
        inst = instance_from([(0, 1, 2)], [(0, 1, 2)], 3)
        with pytest.raises(ValueError, match="length"):
            verify_witness((1.0, 0.0), inst)


class TestDecidePerfPos:
    def test_identical_sides_yes(self):
        inst = instance_from([(0, 1, 2), (0, 1, 2)], [(0, 1, 2), (0, 1, 2)], 3)
        answer = decide_perfpos(inst)
        assert answer.decision is True
        assert answer.certified_order == (0, 1, 2)
        assert verify_witness(answer.witness, inst) is True

    def test_opposed_sides_no(self):
        inst = instance_from([(0, 1, 2)], [(1, 0, 2)], 3)
        assert decide_perfpos(inst) == PerfPosAnswer(False, None, None)

    def test_interior_witness_required(self):
        # With s = (1, x, 0): side 1 totals (2, 1+2x, x), side 2 totals
        # (1+x, 2, 2x).  The shared strict order (1, 0, 2) needs 1/2 < x < 1;
        # plurality, borda, and veto all fail.
        inst = PerfPosInstance(
            ((2, 0, 1), (1, 2, 0), (0, 1, 2)),
            ((1, 1, 1), (2, 0, 1), (0, 2, 1)),
        )
        answer = decide_perfpos(inst)
        assert answer.decision is True
        assert answer.certified_order == (1, 0, 2)
        assert 0.5 < answer.witness[1] < 1.0
        assert verify_witness(answer.witness, inst) is True
        for ends in ((1.0, 0.0, 0.0), (1.0, 1.0, 0.0), (1.0, 0.5, 0.0)):
            assert verify_witness(ends, inst) is False

    def test_permanently_tied_pair_no(self):
        # 0 and 2 receive identical position counts on side 1.
        inst = instance_from([(0, 1, 2), (2, 1, 0)], [(0, 1, 2), (2, 1, 0)], 3)
        assert decide_perfpos(inst).decision is False

    def test_single_alternative(self):
        inst = PerfPosInstance(((3,),), ((3,),))
        assert decide_perfpos(inst) == PerfPosAnswer(True, (1.0,), (0,))

    def test_requires_full_instance(self):
        p = Profile(3, ((0, 1), (1, 2)))
        inst = PerfPosInstance.from_profile_split(p, (1, 2))
        with pytest.raises(ValueError, match="reduce"):
            decide_perfpos(inst)

    def test_enumeration_limit(self):
        order = tuple(range(9))
        inst = instance_from([order], [order], 9)
        with pytest.raises(ResourceLimitError, match="limit"):
            decide_perfpos(inst)
        answer = decide_perfpos(inst, enumeration_limit=9)
        assert answer.decision is True
        assert answer.certified_order == order


class TestReduceKPerfPos:
    def brute_reduce(self, p, split):
        """Materialize the reduction: complete ballots, then symmetrize the
        tail positions with an explicit shuffle."""
        m = p.m
        k = len(p.rankings[0])
        completed = Profile(
            m,
            tuple(
                b + tuple(sorted(set(range(m)) - set(b))) for b in p.rankings
            ),
        )
        spec = ShuffleSpec(positions=tuple(range(k, m + 1)), k=1)
        matrices = []
        for side in (1, 2):
            picked = tuple(
                ballot
                for ballot, tag in zip(completed.rankings, split)
                if tag == side
            )
            sym = shuffle(Profile(m, picked), spec)
            matrices.append(
                tuple(map(tuple, position_counts(sym, width=m).tolist()))
            )
        return PerfPosInstance(matrices[0], matrices[1])

    def test_closed_form_matches_materialization(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            m = int(rng.integers(3, 5))
            k = int(rng.integers(2, m))
            ballots = []
            for _ in range(4):
                ballots.append(tuple(int(x) for x in rng.permutation(m)[:k]))
            p = Profile(m, tuple(ballots))
            split = (1, 2, 1, 2)
            assert reduce_k_perfpos(p, split) == self.brute_reduce(p, split)

    def test_known_yes_preserved(self):
        # With k = 2 the second-listed alternative is symmetrized into the
        # tail, so totals are an increasing function of first-place counts;
        # both sides order firsts as 0 > 1 > 2, hence some vector works.
        side1 = ((0, 1), (0, 2), (1, 0))
        side2 = ((0, 2), (0, 1), (1, 2))
        p = Profile(3, side1 + side2)
        inst = reduce_k_perfpos(p, (1, 1, 1, 2, 2, 2))
        answer = decide_perfpos(inst)
        assert answer.decision is True
        assert answer.certified_order == (0, 1, 2)

    def test_known_no_preserved(self):
        # 0 and 2 collect one first-place each on both sides; no vector can
        # ever separate them.
        p = Profile(3, ((0, 1), (2, 1), (0, 1), (2, 1)))
        inst = reduce_k_perfpos(p, (1, 1, 2, 2))
        assert decide_perfpos(inst).decision is False

    def test_validation(self):
        with pytest.raises(ValueError, match="uniform"):
            reduce_k_perfpos(Profile(3, ((0, 1), (0, 1, 2))), (1, 2))
        with pytest.raises(ValueError, match="equally many"):
            reduce_k_perfpos(Profile(3, ((0, 1), (1, 2))), (1, 1))


class TestGenerateHardInstance:
    def test_clause_validation(self):
        with pytest.raises(ValueError, match="clause"):
            generate_hard_instance([])
        with pytest.raises(ValueError, match="non-zero"):
            generate_hard_instance([(0, 1)])
        with pytest.raises(ValueError, match="once"):
            generate_hard_instance([(1, -1)])
        with pytest.raises(ValueError, match="one to three"):
            generate_hard_instance([(1, 2, 3, 4)])

    def test_structure(self):
        p, tags = generate_hard_instance([(1, -2)])
        t, q = 2, 1
        k = t + 2
        assert p.m == 2 * t + 2 * q + k
        assert set(tags) == {1, 2}
        assert tags.count(1) == tags.count(2)
        assert p.ballot_lengths() == {k}

    def test_satisfiable_formula_yields_yes(self):
        p, tags = generate_hard_instance([(1,)])
        inst = reduce_k_perfpos(p, tags)
        answer = decide_perfpos(inst)
        assert answer.decision is True
        assert verify_witness(answer.witness, inst) is True

    def test_unsatisfiable_formula_yields_no(self):
        p, tags = generate_hard_instance([(1,), (-1,)])
        inst = reduce_k_perfpos(p, tags)
        answer = decide_perfpos(inst, enumeration_limit=9)
        assert answer.decision is False


class TestInstanceJson:
    def test_round_trip(self):
        p = Profile(3, ((0, 1), (1, 2), (2, 0), (0, 1)))
        split = (1, 2, 2, 1)
        q, parsed_split = parse_instance(emit_instance(p, split))
        assert q == p
        assert parsed_split == split

    def test_split_length_checked_on_emit(self):
        p = Profile(2, ((0, 1),))
        with pytest.raises(ValueError, match="length"):
            emit_instance(p, (1, 2))

    def test_parse_errors(self):
        with pytest.raises(ValueError, match="JSON"):
            parse_instance("nope")
        with pytest.raises(ValueError, match="split"):
            parse_instance('{"m": 2, "ballots": [[0, 1]]}')
        with pytest.raises(ValueError, match="tags"):
            parse_instance('{"m": 2, "ballots": [[0, 1]], "split": [3]}')
