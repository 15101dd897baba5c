"""Pure-Python pair-statistics kernels (fallback for the compiled extension).

``rulepick.kernels`` picks these up when ``rulepick._pairstats`` is not
importable.  Both implementations accumulate weighted pair sums with
correctly-rounded (Shewchuk) summation, so their results are bitwise equal to
each other and independent of pair enumeration order — which is what makes
alternative-relabeling invariance exact rather than approximate.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["pair_counts", "pair_products_total", "pair_sums"]


def pair_counts(g1: np.ndarray, g2: np.ndarray) -> tuple[int, int]:
    """Count (strictly discordant, tied-in-at-least-one) unordered pairs.

    ``g1`` and ``g2`` are tie-group indices (0 = best) over a common domain.
    """
    g1 = np.asarray(g1, dtype=np.int64)
    g2 = np.asarray(g2, dtype=np.int64)
    if g1.shape != g2.shape:
        raise ValueError("domain mismatch")
    iu, ju = np.triu_indices(g1.shape[0], k=1)
    d1 = g1[iu] - g1[ju]
    d2 = g2[iu] - g2[ju]
    tied = (d1 == 0) | (d2 == 0)
    discordant = ~tied & ((d1 > 0) != (d2 > 0))
    return int(discordant.sum()), int(tied.sum())


def pair_sums(g1: np.ndarray, g2: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Weighted Kendall-Tau numerator and divisor over unordered pairs.

    Returns ``(num, den)`` where each pair contributes ``w_i * w_j`` to the
    divisor and, to the numerator, the same product scaled by 1 if the pair is
    strictly discordant and by 1/2 if it is tied in at least one ranking.
    """
    g1 = np.asarray(g1, dtype=np.int64)
    g2 = np.asarray(g2, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    if not (g1.shape == g2.shape == w.shape):
        raise ValueError("domain mismatch")
    iu, ju = np.triu_indices(g1.shape[0], k=1)
    d1 = g1[iu] - g1[ju]
    d2 = g2[iu] - g2[ju]
    ww = w[iu] * w[ju]
    tied = (d1 == 0) | (d2 == 0)
    discordant = ~tied & ((d1 > 0) != (d2 > 0))
    num_terms = np.where(tied, 0.5 * ww, np.where(discordant, ww, 0.0))
    return math.fsum(num_terms), math.fsum(ww)


def pair_products_total(w: np.ndarray) -> float:
    """Sum of ``w_i * w_j`` over all unordered pairs (the KT normalizer)."""
    w = np.asarray(w, dtype=np.float64)
    iu, ju = np.triu_indices(w.shape[0], k=1)
    return math.fsum(w[iu] * w[ju])
