"""Globally exponentially stabilizing backstepping feedback laws.

Two laws are provided: a unidirectional one (forward velocity strictly
positive, certified on S2) and a bidirectional one (velocity sign follows
cos(gamma), certified on S). Both cancel cross terms through the kernel

    psi(r, s) = (sin(r - s) + sin(s)) / r,

whose removable singularity at r = 0 is evaluated through the split

    psi(r, s) = cos(s) * sin(r)/r + sin(s) * (1 - cos(r))/r,

which is exact and cancellation-free; the two elementary ratios switch to
3-term Taylor expansions below ``R_EPS``. ``psi2`` is the partial
derivative of psi in its second slot and reuses the same split.

The omega-tilde expressions are the ones that make the closed-loop
identities hold exactly (verified symbolically and by the test suite):

    unidirectional: V_dot = -2 k1 rho^2 - 2 k1 k2 V_delta - 2 k4 q^2 z^2
    bidirectional:  V_dot = -k1 (1 + sigma) rho^2 - 2 k1 k2 delta^2 - 2 k4 q^2 z^2

and in both cases V_dot <= -c_lower * V with the constants below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .clf import ClfGains, ClfKind, clf_value
from .errors import DomainViolation, SingularRho
from .model import RHO_MIN, InputPair, PolarState, StateSpace, in_state_space

#: Switchover radius for the Taylor branches of the psi kernels.
R_EPS = 1e-6


def _sinc(r: float) -> float:
    # sin(r)/r
    if abs(r) < R_EPS:
        r2 = r * r
        return 1.0 - r2 / 6.0 + r2 * r2 / 120.0
    return math.sin(r) / r


def _verc(r: float) -> float:
    # (1 - cos(r))/r, computed as 2 sin^2(r/2) / r
    if abs(r) < R_EPS:
        r2 = r * r
        return 0.5 * r - r * r2 / 24.0 + r * r2 * r2 / 720.0
    half = math.sin(0.5 * r)
    return 2.0 * half * half / r


def psi(r: float, s: float) -> float:
    """(sin(r - s) + sin(s)) / r with its r -> 0 limit cos(s)."""
    return math.cos(s) * _sinc(r) + math.sin(s) * _verc(r)


def psi2(r: float, s: float) -> float:
    """d psi / d s = (cos(s) - cos(r - s)) / r, limit -sin(s) at r -> 0."""
    return math.cos(s) * _verc(r) - math.sin(s) * _sinc(r)


class BacksteppingAux(NamedTuple):
    """Intermediate quantities shared by a backstepping law and its CLF."""

    z: float
    sigma: float
    phi: float
    psi: float
    psi2: float


class Direction(enum.Enum):
    UNIDIRECTIONAL = "unidirectional"
    BIDIRECTIONAL = "bidirectional"


def unidirectional_aux(gains: ClfGains, state: PolarState) -> BacksteppingAux:
    phi = math.sin(state.delta)
    sigma = math.sqrt(1.0 + gains.k2**2 * phi * phi)
    z = state.gamma + math.atan(gains.k2 * phi)
    return BacksteppingAux(z, sigma, phi, psi(z, state.gamma), psi2(z, state.gamma))


def bidirectional_aux(gains: ClfGains, state: PolarState) -> BacksteppingAux:
    u = 2.0 * gains.k2 * state.delta
    sigma = math.sqrt(1.0 + u * u)
    z = state.gamma + 0.5 * math.atan(u)
    return BacksteppingAux(z, sigma, state.delta,
                           psi(2.0 * z, 2.0 * state.gamma),
                           psi2(2.0 * z, 2.0 * state.gamma))


def barrier_ratio(delta: float) -> float:
    """V_delta(delta) / phi(delta) = 4 tan^2(d/2) / sin(d) = 2 t (1 + t^2).

    The right-hand form is exact and removes the 0/0 at delta = 0.
    """
    t = math.tan(0.5 * delta)
    return 2.0 * t * (1.0 + t * t)


def _unidirectional_raw(gains: ClfGains, state: PolarState) -> InputPair:
    k1, k2, k3, k4 = gains.k1, gains.k2, gains.k3, gains.k4
    rho, delta, gamma = state
    aux = unidirectional_aux(gains, state)
    z, sigma = aux.z, aux.sigma
    phi_prime = math.cos(delta)
    v = k1 * sigma * rho
    omega_tilde = (
        k4 * z
        - k3 * rho * rho * sigma * aux.psi2
        + k3 * barrier_ratio(delta) * sigma * aux.psi
        + (k1 * k2 / (sigma * sigma)) * phi_prime * (sigma * aux.psi * z - k2 * aux.phi)
    )
    return InputPair(v, k1 * sigma * math.sin(gamma) + omega_tilde)


def _bidirectional_raw(gains: ClfGains, state: PolarState) -> InputPair:
    k1, k2, k3, k4 = gains.k1, gains.k2, gains.k3, gains.k4
    rho, delta, gamma = state
    aux = bidirectional_aux(gains, state)
    z, sigma = aux.z, aux.sigma
    cos_g = math.cos(gamma)
    v = k1 * rho * sigma * cos_g
    omega_tilde = (
        k4 * z
        - k3 * rho * rho * sigma * aux.psi2
        + k3 * delta * sigma * aux.psi
        + (k1 * k2 / (sigma * sigma)) * (sigma * aux.psi * z - k2 * delta)
    )
    return InputPair(v, k1 * sigma * cos_g * math.sin(gamma) + omega_tilde)


def unidirectional_control(gains: ClfGains, state: PolarState) -> InputPair:
    """Strictly forward GES law on S2: v = k1 sigma(delta) rho > 0 for rho > 0."""
    if not in_state_space(state, StateSpace.S2):
        raise DomainViolation(f"state {state} outside S2")
    if abs(state.delta) > math.pi - 1e-12:
        raise DomainViolation("delta at the barrier")
    return _unidirectional_raw(gains, state)


def bidirectional_control(gains: ClfGains, state: PolarState) -> InputPair:
    """Reversing-capable GES law on S: v = k1 rho sigma(delta) cos(gamma)."""
    if state.rho <= RHO_MIN:
        raise SingularRho(f"rho={state.rho!r} at or below guard {RHO_MIN!r}")
    return _bidirectional_raw(gains, state)


def c_underline(direction: Direction, gains: ClfGains) -> float:
    """Guaranteed decay constant of the matching CLF along the closed loop.

    The offset term enters V as q^2 z^2 and V_dot as -2 k4 q^2 z^2, so its
    valid rate coefficient is 2 k4 (the q^2 factors cancel); a q^2-weighted
    coefficient would overstate the decay whenever q > 1, as the state
    (rho -> 0, 0, z) shows with V_dot / V -> -2 k4 exactly.
    """
    angular = 2.0 * gains.k4
    if direction is Direction.UNIDIRECTIONAL:
        return min(2.0 * gains.k1, 2.0 * gains.k1 * gains.k2, angular)
    return min(gains.k1, 2.0 * gains.k1 * gains.k2, angular)


@dataclass(frozen=True)
class GesControllerSpec:
    """A backstepping law plus its certificate data."""

    direction: Direction
    gains: ClfGains

    @property
    def clf_kind(self) -> ClfKind:
        if self.direction is Direction.UNIDIRECTIONAL:
            return ClfKind.UNIDIR_BARFLI
        return ClfKind.BIDIR_BACKSTEP

    @property
    def state_space(self) -> StateSpace:
        return StateSpace.S2 if self.direction is Direction.UNIDIRECTIONAL else StateSpace.S

    @property
    def c_underline(self) -> float:
        return c_underline(self.direction, self.gains)

    def control(self, state: PolarState) -> InputPair:
        if self.direction is Direction.UNIDIRECTIONAL:
            return unidirectional_control(self.gains, state)
        return bidirectional_control(self.gains, state)

    def control_raw(self, state: PolarState) -> InputPair:
        """Guardless evaluation for integrators crossing tiny rho.

        The composed closed loop is smooth through rho = 0 (v vanishes
        linearly in rho), so rollout engines may keep stepping where the
        public entry points refuse.
        """
        if self.direction is Direction.UNIDIRECTIONAL:
            return _unidirectional_raw(self.gains, state)
        return _bidirectional_raw(self.gains, state)

    def check_domain(self, state: PolarState) -> None:
        """Angular-domain check without the rho guard (for rescaled laws)."""
        if not in_state_space(state, self.state_space):
            raise DomainViolation(f"state {state} outside {self.state_space.value}")
        if self.direction is Direction.UNIDIRECTIONAL \
                and abs(state.delta) > math.pi - 1e-12:
            raise DomainViolation("delta at the barrier")

    def clf(self, state: PolarState) -> float:
        return clf_value(self.clf_kind, self.gains, state)
