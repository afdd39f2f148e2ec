"""Exception types shared across the package.

All numerical failure modes surface as one of these, never as a bare
ValueError from deep inside a quadrature loop.  Validation failures of
symbol data are *not* exceptions (see ``symbols.validate_symbol``); these
classes cover genuinely exceptional states: evaluating at a pole, leaving
a convergence domain, or a quadrature that cannot reach its tolerance.
"""


class FHDetError(Exception):
    """Base class for all package errors."""


class PoleError(FHDetError):
    """An argument sits on (or within tolerance of) a pole of the function."""


class BranchCutError(FHDetError):
    """Evaluation exactly on a branch cut without a side annotation."""


class ParameterError(FHDetError):
    """A parameter leaves the admissible set of the requested formula."""


class DomainError(FHDetError):
    """Argument outside the convergence/validity domain of an expansion."""


class ConvergenceError(FHDetError):
    """A series or quadrature failed to reach the requested tolerance."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature exhausted its refinement budget."""


class ResolutionError(FHDetError):
    """A sampling grid cannot resolve the feature it is asked to track."""


class NumericOverflowError(FHDetError):
    """A value left the representable double range; surfaced, not hidden."""
