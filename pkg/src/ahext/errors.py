"""Exception types shared across the library."""


class AhextError(Exception):
    """Base class for all library-specific errors."""


class InvalidProfileError(AhextError):
    """A profile curve violates positivity, uniformity, or domain rules."""


class InvalidMetricError(AhextError):
    """A surface metric violates pole regularity or positivity."""


class HypothesisError(AhextError):
    """A construction hypothesis fails; ``clause`` names the violated one."""

    def __init__(self, clause, message):
        self.clause = clause
        super().__init__(f"hypothesis {clause} violated: {message}")


class AdmissibilityError(AhextError):
    """A requested target (mass, parameter) is outside the admissible range."""


class NotConvergedError(AhextError):
    """An iterative search or flow failed to reach its tolerance."""
