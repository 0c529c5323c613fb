"""Exception and warning types shared across the package."""


class GeometryError(ValueError):
    """Raised when inputs violate a geometric precondition."""


class InvalidPointError(GeometryError):
    """A point does not satisfy the constraints of its model space."""


class SingularChartError(GeometryError):
    """A chart has a degenerate first fundamental form at a sample."""


class FlowSingularityError(GeometryError):
    """The normal flow reaches a focal point before the requested distance."""


class PerturbationTooLargeError(GeometryError):
    """A normal-graph perturbation is no longer embedded."""


class SingularSurfaceError(GeometryError):
    """Pointwise curvature is undefined on the surface (e.g. a raw polytope)."""


class ConfigError(ValueError):
    """Bad configuration, scenario or resolution."""


class AccuracyWarning(UserWarning):
    """Quadrature did not converge across two refinement levels."""


class AmbiguityWarning(UserWarning):
    """A distance query falls outside the certified tubular neighborhood."""


class PreconditionError(GeometryError):
    """A scenario input violates a hypothesis the experiment relies on."""
