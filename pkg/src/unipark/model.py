"""Unicycle kinematics in Cartesian and polar coordinates.

The polar representation measures distance rho to the target, the polar
angle delta of the vehicle position seen from the target (offset so that
delta = 0 means "behind the target"), and the line-of-sight angle gamma
between the vehicle heading and the target direction:

    rho_dot   = -v cos(gamma)
    delta_dot = (v / rho) sin(gamma)
    gamma_dot = (v / rho) sin(gamma) - omega

All types are immutable values and all functions are pure.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .errors import DegenerateTransform, SingularRho

#: Distance below which the polar model is treated as singular.
RHO_MIN = 1e-9

TWO_PI = 2.0 * math.pi


class CartesianPose(NamedTuple):
    x: float
    y: float
    theta: float


class PolarState(NamedTuple):
    rho: float
    delta: float
    gamma: float


class InputPair(NamedTuple):
    v: float
    omega: float


class PolarDerivative(NamedTuple):
    rho_dot: float
    delta_dot: float
    gamma_dot: float


class CartesianDerivative(NamedTuple):
    x_dot: float
    y_dot: float
    theta_dot: float


ORIGIN_POSE = CartesianPose(0.0, 0.0, 0.0)
ZERO_INPUT = InputPair(0.0, 0.0)


class StateSpace(enum.Enum):
    """Admissible regions: rho > 0 with optional open angle strips."""

    S = "S"    # delta, gamma unrestricted
    S1 = "S1"  # |gamma| < pi
    S2 = "S2"  # |delta| < pi
    S3 = "S3"  # |delta| < pi and |gamma| < pi


def wrap_angle(angle: float) -> float:
    """Map an angle to the interval (-pi, pi]."""
    wrapped = (angle + math.pi) % TWO_PI - math.pi
    if wrapped == -math.pi:
        return math.pi
    return wrapped


def to_polar(pose: CartesianPose, target: CartesianPose = ORIGIN_POSE) -> PolarState:
    """Transform a Cartesian pose into polar coordinates about ``target``.

    Undefined when the position coincides with the target position; both
    returned angles are wrapped to (-pi, pi].
    """
    dx = pose.x - target.x
    dy = pose.y - target.y
    rho = math.hypot(dx, dy)
    if rho == 0.0:
        raise DegenerateTransform("polar transform is undefined at the target position")
    bearing = math.atan2(dy, dx)
    delta = bearing - target.theta + math.pi
    gamma = delta - pose.theta + target.theta
    return PolarState(rho, wrap_angle(delta), wrap_angle(gamma))


def to_cartesian(state: PolarState, target: CartesianPose = ORIGIN_POSE) -> CartesianPose:
    """Inverse of :func:`to_polar` (angles may differ by multiples of 2*pi)."""
    bearing = state.delta + target.theta - math.pi
    x = target.x + state.rho * math.cos(bearing)
    y = target.y + state.rho * math.sin(bearing)
    theta = state.delta - state.gamma + target.theta
    return CartesianPose(x, y, theta)


def polar_dynamics(state: PolarState, inp: InputPair, rho_min: float = RHO_MIN) -> PolarDerivative:
    """Open-loop polar dynamics; raises :class:`SingularRho` at rho <= rho_min."""
    rho, _, gamma = state
    if rho <= rho_min:
        raise SingularRho(f"rho={rho!r} at or below guard {rho_min!r}")
    v, omega = inp
    swing = v / rho * math.sin(gamma)
    return PolarDerivative(-v * math.cos(gamma), swing, swing - omega)


def cartesian_dynamics(pose: CartesianPose, inp: InputPair) -> CartesianDerivative:
    v, omega = inp
    return CartesianDerivative(v * math.cos(pose.theta), v * math.sin(pose.theta), omega)


def in_state_space(state: PolarState, space: StateSpace) -> bool:
    """Literal membership check; angles are not wrapped first.

    Controllers are certified on unwrapped angle intervals, so an angle
    that drifted past pi during integration is genuinely outside even if
    its wrapped image would not be.
    """
    rho, delta, gamma = state
    if not rho > 0.0:
        return False
    if space in (StateSpace.S2, StateSpace.S3) and not abs(delta) < math.pi:
        return False
    if space in (StateSpace.S1, StateSpace.S3) and not abs(gamma) < math.pi:
        return False
    return True


def state_norm(state: PolarState) -> float:
    """Euclidean size of (rho, delta, gamma); the convergence seminorm."""
    return math.sqrt(state.rho**2 + state.delta**2 + state.gamma**2)
