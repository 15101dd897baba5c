"""Kernel selection: compiled extension if built, pure-Python otherwise.

Both backends are bitwise-identical by construction (see their docstrings),
so everything downstream is oblivious to which one is active.  Tests and the
benchmark can import the two modules directly to compare them.
"""

from __future__ import annotations

try:
    from rulepick import _pairstats as _impl

    USING_COMPILED = True
except ImportError:  # pragma: no cover - depends on how the package was built
    from rulepick import _pairstats_py as _impl

    USING_COMPILED = False

pair_counts = _impl.pair_counts
pair_sums = _impl.pair_sums
pair_products_total = _impl.pair_products_total

__all__ = ["USING_COMPILED", "pair_counts", "pair_products_total", "pair_sums"]
