"""Exception hierarchy for magnon-entangle.

Configuration problems and numerical failures are kept on separate branches so
the CLI can map them to distinct exit codes.
"""

from __future__ import annotations


class MagnonEntangleError(Exception):
    """Root of every error raised by this package."""


class ConfigError(MagnonEntangleError, ValueError):
    """Invalid configuration: unknown keys, bad axes, conflicting bindings."""


class NumericalError(MagnonEntangleError, ArithmeticError):
    """Base class for numerical failures at a parameter point."""


class SingularMatrix(NumericalError):
    """A linear system is (numerically) singular."""


class NoConvergence(NumericalError):
    """The eigenvalue iteration did not converge."""


class UnstableDrift(NumericalError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class MeanFieldDivergence(NumericalError):
    """The mean-field amplitudes diverge at the parametric threshold."""


class PhysicalityViolation(NumericalError):
    """A covariance matrix violates the uncertainty principle."""


class MonogamyViolation(NumericalError):
    """A residual contangle is negative beyond numerical noise."""


class AllUnstable(NumericalError):
    """No stable point exists along a scan."""


class ConditionUnreachable(NumericalError):
    """A binding constraint has no real solution at this point."""
