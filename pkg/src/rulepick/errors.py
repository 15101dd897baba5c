"""Exception types shared across the package."""

from __future__ import annotations

__all__ = ["ResourceLimitError"]


class ResourceLimitError(RuntimeError):
    """Raised when a computation would exceed a configured resource limit.

    Examples: exact split enumeration on a profile with too many voters, or
    order enumeration in the perfect-consistency solver beyond its alternative
    limit.  The CLI maps this to a dedicated exit code so callers can retry
    with Monte Carlo settings.
    """
