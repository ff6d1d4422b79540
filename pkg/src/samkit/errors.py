"""Exception taxonomy shared across the package.

All errors raised on purpose derive from SamkitError so callers (and the
CLI) can separate expected validation failures from genuine bugs.
"""

from __future__ import annotations


class SamkitError(Exception):
    """Base class for every error this package raises deliberately."""


class ParameterError(SamkitError, ValueError):
    """A scalar argument is outside its documented domain."""


class ShapeError(SamkitError, ValueError):
    """An array argument has the wrong dimensionality or extent."""


class DataError(SamkitError, ValueError):
    """Input data violates a content requirement (labels, finiteness, files)."""


class SizeError(SamkitError, ValueError):
    """A request exceeds a hard combinatorial size limit."""


class DegenerateDirectionError(SamkitError, RuntimeError):
    """A projection direction cannot be formed (zero covariance or zero score)."""
