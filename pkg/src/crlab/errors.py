"""Exception hierarchy for crlab.

Every failure mode that callers are expected to handle has its own class;
all inherit from CrlabError so a pipeline can catch the lot in one clause.
"""


class CrlabError(Exception):
    """Base class for all crlab errors."""


class DomainError(CrlabError):
    """Input outside the mathematical domain of an operation."""


class ConfigurationError(CrlabError):
    """Invalid run configuration (bad key, bad value, unreadable file)."""


class CapabilityError(CrlabError):
    """A jet of higher order than the evaluator can provide was requested."""


class UnsupportedOrderError(CrlabError):
    """Frame-derivative word longer than the supported maximum."""


class SingularityError(CrlabError):
    """Evaluation requested where the evaluator is not smooth."""


class OrientationError(CrlabError):
    """Orientation compatibility violated (|coefficient| >= 1)."""


class DegeneracyError(CrlabError):
    """A map left the quasiconformal regime (vanishing pairing or
    vanishing Beltrami denominator)."""


class ChartError(CrlabError):
    """Point not representable in the requested coordinate chart."""


class ResamplingError(CrlabError):
    """A base curve left the numerical range of both charts."""


class ToleranceError(CrlabError):
    """A quadrature or root-find failed to reach its tolerance."""


class PathConstructionError(CrlabError):
    """A correction loop with the requested area cannot be placed in the
    current chart."""


class ConditionError(CrlabError):
    """A named hypothesis of a formula failed its numerical check."""

    def __init__(self, hypothesis: str, detail: str = ""):
        self.hypothesis = hypothesis
        msg = f"hypothesis failed: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
