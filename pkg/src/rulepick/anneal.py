"""Simulated annealing over normalized scoring vectors.

The state space is the set of non-increasing vectors with first entry 1 and
last entry 0; the objective is the mean normalized split disagreement on a
fixed set of splits, so annealed vectors are directly comparable to fixed
rules evaluated on the same splits.
"""

from __future__ import annotations

import math
import statistics
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from rulepick.consistency import disagreement_on_splits
from rulepick.core import Profile
from rulepick.rules import Positional

__all__ = ["AnnealConfig", "AnnealResult", "AnnealStep", "DEFAULT_STARTS", "anneal"]

DEFAULT_STARTS = ("plurality", "veto", "borda", "two_approval", "plurality_veto")

_CALIBRATION_PROPOSALS = 20


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing knobs.

    Attributes:
        steps: Proposals per chain; filtered proposals count too.
        starts: One chain per start (rule name, ``Positional``, or raw
            vector).  Defaults to the standard fixed families.
        seed: Chain randomness; chain i draws from spawn key (i,).
        delta_range: Bounds of the uniform perturbation magnitude.
    """

    steps: int = 500
    starts: tuple = DEFAULT_STARTS
    seed: int = 0
    delta_range: tuple[float, float] = (0.05, 1.0)

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if not self.starts:
            raise ValueError("need at least one start")
        lo, hi = self.delta_range
        if not 0.0 < lo <= hi:
            raise ValueError("delta_range must satisfy 0 < low <= high")


@dataclass(frozen=True)
class AnnealStep:
    """One trace row; ``delta`` is NaN when the proposal was filtered out
    by the monotonicity constraint before evaluation."""

    chain: int
    step: int
    delta: float
    accepted: bool
    objective: float
    best: float


@dataclass(frozen=True)
class AnnealResult:
    rule: object
    objective: float
    trace: tuple[AnnealStep, ...] = field(repr=False)


def _resolve_start(start):
    if isinstance(start, str):
        return Positional.named(start)
    if isinstance(start, Positional):
        return start
    return Positional.from_scores(start)


def anneal(
    p: Profile,
    splits: Sequence[Sequence[int]],
    config: AnnealConfig = AnnealConfig(),
    weighting: str = "auto",
) -> AnnealResult:
    """Search for a scoring vector with low mean disagreement on the given
    splits.

    Each chain starts from one configured rule and proposes single-entry
    perturbations of an interior weight; proposals that break the
    non-increasing shape are rejected without evaluation.  Improvements are
    always accepted; once the first twenty evaluated proposals have
    calibrated the initial temperature (their median objective change is
    accepted with probability one half), worse moves are accepted with the
    usual exponential probability under a linearly cooling schedule.

    Returns the best rule ever visited across all chains; its recorded
    objective equals ``disagreement_on_splits`` of that rule on ``splits``
    exactly, and since chains start at the fixed rules themselves, the
    result is never worse than any start.
    """
    starts = [_resolve_start(s) for s in config.starts]
    m = p.m
    lo, hi = config.delta_range

    def objective(rule) -> float:
        return disagreement_on_splits(rule, p, splits, weighting=weighting).mean

    best_rule = None
    best_obj = math.inf
    trace: list[AnnealStep] = []
    for chain, start_rule in enumerate(starts):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=config.seed, spawn_key=(1, chain)))
        )
        cur_rule = start_rule
        cur_vec = [float(w) for w in start_rule.weights_at(m)]
        cur_obj = objective(cur_rule)
        if cur_obj < best_obj:
            best_rule, best_obj = cur_rule, cur_obj
        deltas: list[float] = []
        temperature0 = None
        can_move = m >= 3 and cur_vec[0] == 1.0 and cur_vec[-1] == 0.0
        for step in range(config.steps):
            if not can_move:
                trace.append(AnnealStep(chain, step, math.nan, False, cur_obj, best_obj))
                continue
            idx = int(rng.integers(1, m - 1))
            delta = float(rng.uniform(lo, hi))
            if rng.integers(0, 2):
                delta = -delta
            new_vec = list(cur_vec)
            new_vec[idx] += delta
            left = new_vec[idx - 1] if idx > 1 else 1.0
            right = new_vec[idx + 1] if idx < m - 2 else 0.0
            if not left >= new_vec[idx] >= right:
                trace.append(AnnealStep(chain, step, math.nan, False, cur_obj, best_obj))
                continue
            cand_rule = Positional.from_scores(new_vec)
            cand_obj = objective(cand_rule)
            diff = cand_obj - cur_obj
            if temperature0 is None:
                deltas.append(abs(diff))
                accept = diff <= 0.0
                if len(deltas) == _CALIBRATION_PROPOSALS:
                    temperature0 = statistics.median(deltas) / math.log(2.0)
            elif diff <= 0.0:
                accept = True
            else:
                temp = temperature0 * (1.0 - step / config.steps)
                accept = temp > 0.0 and rng.random() < math.exp(-diff / temp)
            if accept:
                cur_rule, cur_vec, cur_obj = cand_rule, new_vec, cand_obj
                if cur_obj < best_obj:
                    best_rule, best_obj = cur_rule, cur_obj
            trace.append(AnnealStep(chain, step, diff, accept, cur_obj, best_obj))
    return AnnealResult(rule=best_rule, objective=best_obj, trace=tuple(trace))
