"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (CLI exit code 2);
numerical failures derive from :class:`NumericalFailure` (CLI exit code 3).
"""

from __future__ import annotations


class GFLatticeError(Exception):
    """Base class for all package errors."""


class ConfigError(GFLatticeError, ValueError):
    """Invalid model or run configuration."""


class UnsupportedCombination(ConfigError):
    """Model kind / boundary / impurity combination the solvers do not cover."""


class NumericalFailure(GFLatticeError, ArithmeticError):
    """A numerical procedure did not produce a certified answer."""


class NonConvergence(NumericalFailure):
    """Root iteration hit its cap. ``roots`` and ``residuals`` hold the partial set."""

    def __init__(self, message, roots=None, residuals=None):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


class DegreeOverflow(NumericalFailure):
    pass


class SingularAtOrigin(NumericalFailure):
    """Q(0) == 0, so the series expansion around z = 0 does not exist."""


class NotDivisible(NumericalFailure):
    pass


class DegenerateKernel(NumericalFailure):
    """The two propagating factors coincide (band-edge parameters)."""


class MissedRoots(NumericalFailure):
    def __init__(self, message, found=None, expected=None):
        super().__init__(message)
        self.found = found
        self.expected = expected


class ContourHitsZero(NumericalFailure):
    pass


class QuadratureUnstable(NumericalFailure):
    pass


class InterpolationIllConditioned(NumericalFailure):
    pass


class SlowConvergence(NumericalFailure):
    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates
