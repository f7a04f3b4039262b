"""Exception hierarchy shared by all drillgauge modules."""


class DrillgaugeError(Exception):
    """Base class; the CLI maps every subclass to a domain-error exit code."""


class DomainError(DrillgaugeError, ValueError):
    pass


class DegenerateLattice(DomainError):
    pass


class ZeroClass(DomainError):
    pass


class NonPositiveInput(DomainError):
    pass


class NonPositiveRadius(NonPositiveInput):
    pass


class InfiniteRadius(DomainError):
    """Raised when a quantity that diverges at the cusp is requested for R = inf."""


class HypothesisViolated(DomainError):
    """The cone-angle times core-length product exceeds a floor's validity cap."""

    def __init__(self, product, cap):
        super().__init__(f"alpha*ell = {product!r} exceeds validity cap {cap!r}")
        self.product = product
        self.cap = cap


class BadSignature(DomainError):
    pass


class BadConfig(DomainError):
    pass


class Discrepancy(DrillgaugeError):
    """A computed result contradicts one of the published constants."""
