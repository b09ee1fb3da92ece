"""Catalog of strict control Lyapunov functions for the polar unicycle.

Every family evaluates the scalar V, its gradient, and the two Lie
derivatives along the desingularized input fields

    gbar1 = (-rho cos(gamma), sin(gamma), sin(gamma)),   g2 = (0, 0, -1),

so that V_dot = nu1 * (v / rho) + nu2 * omega with

    nu1 = -dV/drho * rho cos(gamma) + (dV/ddelta + dV/dgamma) sin(gamma)
    nu2 = -dV/dgamma.

The two "lie" kinds additionally carry hard-coded closed forms for
(nu1, nu2) at unity gains; they must agree with the gradient route and
the tests enforce that.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from .errors import DomainViolation
from .model import PolarState, StateSpace

#: Barrier families reject |delta| within this margin of pi instead of
#: returning values that have already lost all precision in tan(delta/2).
DELTA_BARRIER_MARGIN = 1e-6


@dataclass(frozen=True)
class ClfGains:
    """Positive gains (k1..k4) with the derived angular weight q = sqrt(k1/k3)."""

    k1: float
    k2: float
    k3: float
    k4: float = 1.0

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"gain {name} must be finite and positive, got {value!r}")

    @property
    def q(self) -> float:
        return math.sqrt(self.k1 / self.k3)

    @property
    def q2(self) -> float:
        return self.k1 / self.k3


UNITY_GAINS = ClfGains(1.0, 1.0, 1.0, 1.0)


class ClfKind(enum.Enum):
    UNIDIR_BARFLI = "unidir_barfli"
    BIDIR_BACKSTEP = "bidir_backstep"
    COMPOSITE_GLOBA = "composite_globa"
    GENOVA_LIE = "genova_lie"
    GLOBA_LIE = "globa_lie"
    BARFLI_SAFETY = "barfli_safety"


class LiePair(NamedTuple):
    nu1: float
    nu2: float


_BARRIER_KINDS = (ClfKind.UNIDIR_BARFLI, ClfKind.BARFLI_SAFETY)
_UNITY_KINDS = (ClfKind.GENOVA_LIE, ClfKind.GLOBA_LIE)

Gradient = Tuple[float, float, float]


def clf_state_space(kind: ClfKind) -> StateSpace:
    """State space on which the family is a strict CLF."""
    return StateSpace.S2 if kind in _BARRIER_KINDS else StateSpace.S


def _check_domain(kind: ClfKind, gains: ClfGains, state: PolarState) -> None:
    if state.rho < 0.0:
        raise DomainViolation(f"rho must be nonnegative, got {state.rho!r}")
    if kind in _BARRIER_KINDS and abs(state.delta) > math.pi - DELTA_BARRIER_MARGIN:
        raise DomainViolation(
            f"|delta|={abs(state.delta)!r} inside the barrier margin of pi"
        )
    if kind in _UNITY_KINDS and not (gains.k1 == gains.k2 == gains.k3 == 1.0):
        raise DomainViolation(f"{kind.value} is defined for unity gains only")


def clf_value(kind: ClfKind, gains: ClfGains, state: PolarState) -> float:
    """Evaluate V; accepts the closure rho >= 0 so the origin limit is exact."""
    _check_domain(kind, gains, state)
    rho, delta, gamma = state
    if kind is ClfKind.UNIDIR_BARFLI:
        t = math.tan(0.5 * delta)
        z = gamma + math.atan(gains.k2 * math.sin(delta))
        return rho * rho + 4.0 * t * t + gains.q2 * z * z
    if kind is ClfKind.BIDIR_BACKSTEP:
        z = gamma + 0.5 * math.atan(2.0 * gains.k2 * delta)
        return rho * rho + delta * delta + gains.q2 * z * z
    if kind is ClfKind.COMPOSITE_GLOBA:
        z = gamma + 0.5 * math.atan(2.0 * gains.k2 * delta)
        inner = delta * delta + gains.k3 * z * z
        return math.sqrt(1.0 + gains.k1 * rho * rho) + math.sqrt(1.0 + inner) - 2.0
    if kind is ClfKind.GENOVA_LIE:
        s2 = delta * delta + gamma * gamma
        return rho * rho + 0.5 * s2 * s2 + 3.0 * delta * delta + 2.0 * delta * gamma + 3.0 * gamma * gamma
    if kind is ClfKind.GLOBA_LIE:
        z = gamma + 0.5 * math.atan(2.0 * delta)
        return rho * rho + delta * delta + z * z
    # BARFLI_SAFETY
    t = math.tan(0.5 * delta)
    z = gamma + 0.5 * math.atan(4.0 * gains.k2 * t)
    return rho * rho + 4.0 * t * t + gains.q2 * z * z


def clf_gradient(kind: ClfKind, gains: ClfGains, state: PolarState) -> Gradient:
    """Analytic (dV/drho, dV/ddelta, dV/dgamma)."""
    _check_domain(kind, gains, state)
    rho, delta, gamma = state
    if kind is ClfKind.UNIDIR_BARFLI:
        t = math.tan(0.5 * delta)
        phi = math.sin(delta)
        z = gamma + math.atan(gains.k2 * phi)
        dz_ddelta = gains.k2 * math.cos(delta) / (1.0 + gains.k2**2 * phi * phi)
        return (
            2.0 * rho,
            4.0 * t * (1.0 + t * t) + 2.0 * gains.q2 * z * dz_ddelta,
            2.0 * gains.q2 * z,
        )
    if kind is ClfKind.BIDIR_BACKSTEP:
        z = gamma + 0.5 * math.atan(2.0 * gains.k2 * delta)
        dz_ddelta = gains.k2 / (1.0 + (2.0 * gains.k2 * delta) ** 2)
        return (
            2.0 * rho,
            2.0 * delta + 2.0 * gains.q2 * z * dz_ddelta,
            2.0 * gains.q2 * z,
        )
    if kind is ClfKind.COMPOSITE_GLOBA:
        z = gamma + 0.5 * math.atan(2.0 * gains.k2 * delta)
        dz_ddelta = gains.k2 / (1.0 + (2.0 * gains.k2 * delta) ** 2)
        inner = delta * delta + gains.k3 * z * z
        root = math.sqrt(1.0 + inner)
        return (
            gains.k1 * rho / math.sqrt(1.0 + gains.k1 * rho * rho),
            (delta + gains.k3 * z * dz_ddelta) / root,
            gains.k3 * z / root,
        )
    if kind is ClfKind.GENOVA_LIE:
        s2 = delta * delta + gamma * gamma
        return (
            2.0 * rho,
            2.0 * delta * s2 + 6.0 * delta + 2.0 * gamma,
            2.0 * gamma * s2 + 2.0 * delta + 6.0 * gamma,
        )
    if kind is ClfKind.GLOBA_LIE:
        z = gamma + 0.5 * math.atan(2.0 * delta)
        return (
            2.0 * rho,
            2.0 * delta + 2.0 * z / (1.0 + 4.0 * delta * delta),
            2.0 * z,
        )
    # BARFLI_SAFETY
    t = math.tan(0.5 * delta)
    z = gamma + 0.5 * math.atan(4.0 * gains.k2 * t)
    n2 = 1.0 + 16.0 * gains.k2**2 * t * t
    dz_ddelta = gains.k2 * (1.0 + t * t) / n2
    return (
        2.0 * rho,
        4.0 * t * (1.0 + t * t) + 2.0 * gains.q2 * z * dz_ddelta,
        2.0 * gains.q2 * z,
    )


def lie_from_gradient(gradient: Gradient, state: PolarState) -> LiePair:
    """Contract a gradient with the input fields (gbar1, g2)."""
    d_rho, d_delta, d_gamma = gradient
    sin_g = math.sin(state.gamma)
    nu1 = -d_rho * state.rho * math.cos(state.gamma) + (d_delta + d_gamma) * sin_g
    return LiePair(nu1, -d_gamma)


def lie_derivatives(kind: ClfKind, gains: ClfGains, state: PolarState) -> LiePair:
    """(nu1, nu2); closed forms for the two hard-coded unity-gain families."""
    if kind is ClfKind.GENOVA_LIE:
        _check_domain(kind, gains, state)
        rho, delta, gamma = state
        s2 = delta * delta + gamma * gamma
        nu1 = -2.0 * (rho * rho * math.cos(gamma)
                      - math.sin(gamma) * (s2 + 4.0) * (delta + gamma))
        nu2 = -2.0 * ((s2 + 2.0) * gamma + delta + gamma)
        return LiePair(nu1, nu2)
    if kind is ClfKind.GLOBA_LIE:
        _check_domain(kind, gains, state)
        rho, delta, gamma = state
        z = gamma + 0.5 * math.atan(2.0 * delta)
        stretch = 1.0 + 1.0 / (1.0 + 4.0 * delta * delta)
        nu1 = -2.0 * (rho * rho * math.cos(gamma) - math.sin(gamma) * (delta + stretch * z))
        return LiePair(nu1, -2.0 * z)
    return lie_from_gradient(clf_gradient(kind, gains, state), state)
