"""Exception hierarchy.

Input errors derive from :class:`InputError` (CLI exit code 2); numerical
failures derive from :class:`NumericalFailure` (CLI exit code 3) and carry a
``diagnostics`` mapping.
"""

from __future__ import annotations


class SymcapError(Exception):
    """Base class for every error raised by this package."""


class InputError(SymcapError, ValueError):
    pass


class NonPositiveRadius(InputError):
    pass


class LengthZero(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class KappaOutOfRange(InputError):
    pass


class UnsupportedKind(InputError):
    pass


class MixedSymmetry(InputError):
    pass


class StepCountTooSmall(InputError):
    pass


class SeedNotOnRealPart(InputError):
    pass


class AmbiguousInFloatMode(SymcapError):
    """Float-mode grouping changes when the tolerance is halved."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class NumericalFailure(SymcapError):
    def __init__(self, message, diagnostics=None, best=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
        self.best = best


class NoConvergence(NumericalFailure):
    pass


class SingularJacobian(NumericalFailure):
    pass


class MaxIterationsExceeded(NumericalFailure):
    pass
