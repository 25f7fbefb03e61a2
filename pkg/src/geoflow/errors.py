"""Exception types raised by geoflow."""


class GeoflowError(Exception):
    """Base class for all geoflow errors."""


class NonSymmetric(GeoflowError, ValueError):
    pass


class EvaluationFailure(GeoflowError, ArithmeticError):
    pass


class DimensionMismatch(GeoflowError, ValueError):
    pass


class OutsideDomain(GeoflowError, ValueError):
    """A vector has mass outside the domain of the metric at a boundary state."""


class DegenerateSupport(GeoflowError):
    pass


class ZeroSalience(GeoflowError, ValueError):
    pass


class NonSteep(GeoflowError, ValueError):
    pass


class NotInterior(GeoflowError, ValueError):
    pass


class DimensionalityLimit(GeoflowError, ValueError):
    pass


class SignViolation(GeoflowError, ValueError):
    pass


class StepExplosion(GeoflowError, RuntimeError):
    pass


class MissingPotential(GeoflowError, ValueError):
    pass


class EnumerationImpossible(GeoflowError, ValueError):
    pass


class ScenarioError(GeoflowError, ValueError):
    """Invalid scenario document; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
