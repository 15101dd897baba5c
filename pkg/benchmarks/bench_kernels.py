"""Benchmark the compiled pair-statistics kernels against the pure-Python ones.

Both backends must return bitwise-identical values; this script verifies that
on random inputs while timing them, first at the kernel level across domain
sizes and then end to end through the split-disagreement objective.

Run from a checkout or an installed environment:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 16,64,256 --repeats 2000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rulepick import _pairstats_py
from rulepick import consistency as _consistency
from rulepick import metrics as _metrics
from rulepick.consistency import disagreement_on_splits, exact_disagreement, split_sequence
from rulepick.core import Profile
from rulepick.data import DistributionSpec, sample_profile
from rulepick.rules import Positional

try:
    from rulepick import _pairstats

    HAVE_COMPILED = True
except ImportError:
    _pairstats = None
    HAVE_COMPILED = False

_PATCH_TARGETS = (
    (_metrics, ("pair_counts", "pair_products_total", "pair_sums")),
    (_consistency, ("pair_counts", "pair_sums")),
)


def _time_call(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def _kernel_inputs(rng: np.random.Generator, m: int):
    g1 = rng.integers(0, max(2, m // 2), size=m).astype(np.int64)
    g2 = rng.integers(0, max(2, m // 2), size=m).astype(np.int64)
    w = rng.random(m)
    return g1, g2, w


def bench_kernels(sizes, repeats: int, rng: np.random.Generator) -> None:
    print(f"{'kernel':<20} {'m':>5} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for m in sizes:
        g1, g2, w = _kernel_inputs(rng, m)
        cases = (
            ("pair_counts", (g1, g2)),
            ("pair_sums", (g1, g2, w)),
            ("pair_products_total", (w,)),
        )
        for name, args in cases:
            py_fn = getattr(_pairstats_py, name)
            py_t = _time_call(py_fn, args, repeats)
            if HAVE_COMPILED:
                c_fn = getattr(_pairstats, name)
                if c_fn(*args) != py_fn(*args):
                    raise AssertionError(f"{name} backends disagree at m={m}")
                c_t = _time_call(c_fn, args, repeats)
                print(
                    f"{name:<20} {m:>5} {py_t * 1e6:>10.2f}us {c_t * 1e6:>10.2f}us"
                    f" {py_t / c_t:>7.1f}x"
                )
            else:
                print(f"{name:<20} {m:>5} {py_t * 1e6:>10.2f}us {'-':>12} {'-':>8}")


def _swap_backend(module) -> None:
    for target, names in _PATCH_TARGETS:
        for name in names:
            setattr(target, name, getattr(module, name))


def _run_backends(workload):
    results = {}
    backends = [("python", _pairstats_py)]
    if HAVE_COMPILED:
        backends.append(("compiled", _pairstats))
    original = {
        target: {name: getattr(target, name) for name in names}
        for target, names in _PATCH_TARGETS
    }
    try:
        for label, module in backends:
            _swap_backend(module)
            workload()  # warm up
            t0 = time.perf_counter()
            value = workload()
            results[label] = (value, time.perf_counter() - t0)
    finally:
        for target, names in _PATCH_TARGETS:
            for name in names:
                setattr(target, name, original[target][name])
    return results


def _report(title: str, results) -> None:
    print(f"\n{title}:")
    for label, (value, elapsed) in results.items():
        print(f"  {label:<9} {elapsed * 1e3:8.1f}ms  mean={value!r}")
    if len(results) == 2:
        if len({value for value, _ in results.values()}) != 1:
            raise AssertionError("backends returned different means")
        speedup = results["python"][1] / results["compiled"][1]
        print(f"  speedup: {speedup:.1f}x (bitwise-equal means)")


def bench_end_to_end(m: int, n: int, n_splits: int, seed: int) -> None:
    rule = Positional.named("borda")

    # Monte Carlo picking workload: one distance per split, so rule
    # application dominates and the backends should be near-identical.
    p = sample_profile(DistributionSpec(kind="impartial_culture", m=m, n=n), seed)
    splits = split_sequence(p, seed, n_splits)
    mc = _run_backends(lambda: disagreement_on_splits(rule, p, splits).mean)
    _report(f"monte carlo: impartial culture m={m} n={n}, {n_splits} splits", mc)

    # Exact enumeration workload: one distance per split class (2^14 here),
    # which is the kernel-bound path.
    rng = np.random.default_rng(seed)
    ballots = set()
    while len(ballots) < 14:
        ballots.add(tuple(int(a) for a in rng.permutation(6)))
    wide = Profile(6, tuple(sorted(ballots)))
    exact = _run_backends(lambda: exact_disagreement(rule, wide))
    _report("exact enumeration: m=6, 14 distinct ballots (16384 classes)", exact)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,32,128,512")
    parser.add_argument("--repeats", type=int, default=500)
    parser.add_argument("--m", type=int, default=10, help="end-to-end profile width")
    parser.add_argument("--n", type=int, default=200, help="end-to-end voter count")
    parser.add_argument("--splits", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled extension not built; timing the pure-Python backend only\n")
    sizes = [int(s) for s in args.sizes.split(",") if s]
    bench_kernels(sizes, args.repeats, np.random.default_rng(args.seed))
    bench_end_to_end(args.m, args.n, args.splits, args.seed)


if __name__ == "__main__":
    main()
