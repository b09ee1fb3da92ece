"""Exception hierarchy shared by all unipark modules."""


class ParkError(Exception):
    """Base class for all library-specific errors."""


class DegenerateTransform(ParkError):
    """Polar transform requested at the target position, where it is undefined."""


class SingularRho(ParkError):
    """Dynamics or feedback evaluated at or below the rho singularity guard."""


class DomainViolation(ParkError):
    """State lies outside the domain certified for the requested object."""


class DomainLimit(ParkError):
    """Cost-function argument at or beyond the function's finite domain limit."""


class QuadratureFailure(ParkError):
    """Numerical integration did not reach the requested tolerance."""


class TailNotConverged(ParkError):
    """Trajectory ended with too much residual energy to truncate the cost tail."""


class HorizonExceeded(ParkError):
    """Prescribed-time object evaluated at or beyond its terminal time."""


class InadmissibleInitialCondition(ParkError):
    """Initial angles outside the box required by the curb-safe gain selection."""


class NonFiniteState(ParkError):
    """Integration produced a non-finite state component."""


class InsufficientDecay(ParkError):
    """Too few samples in the decay window to fit an exponential envelope."""


class DeadbandParked(ParkError):
    """State-dependent scaling requested inside the parked deadband.

    Callers of the fixed-time scaling must catch this and emit zero input.
    """


class ScenarioError(ParkError):
    """Scenario file failed schema or semantic validation."""
