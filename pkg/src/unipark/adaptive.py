"""Adaptive stabilization under unknown positive input coefficients.

The plant applies unknown positive factors (b1, b2) to the commanded
inputs. Certainty-equivalence damping feedback

    v = -eps1_hat rho nu1,    omega = -eps2_hat nu2

with the normalized gradient update laws

    d eps_i_hat / dt = mu_i * n'(V) / (1 + n(V)) * nu_i^2 >= 0,
    n(V) = n0 V,

makes V_a = ln(1 + n(V)) + (b1 / 2 mu1) e1~^2 + (b2 / 2 mu2) e2~^2
nonincreasing, where ei~ = 1/bi - epsi_hat. The estimates are
nondecreasing by construction and may start at any value, including
negative ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Tuple

from .clf import ClfGains, ClfKind, clf_state_space, clf_value, lie_derivatives
from .errors import DomainViolation
from .model import InputPair, PolarState, in_state_space, polar_dynamics, PolarDerivative, RHO_MIN


@dataclass(frozen=True)
class SlipParams:
    """Unknown multiplicative input coefficients, e.g. wheel slippage."""

    b1: float = 1.0
    b2: float = 1.0

    def __post_init__(self) -> None:
        if not (self.b1 > 0.0 and self.b2 > 0.0):
            raise ValueError(f"slip coefficients must be positive, got {self}")


UNIT_SLIP = SlipParams(1.0, 1.0)


class AdaptiveState(NamedTuple):
    eps1_hat: float
    eps2_hat: float


@dataclass(frozen=True)
class AdaptiveSpec:
    clf_kind: ClfKind
    gains: ClfGains
    mu1: float = 1.0
    mu2: float = 1.0
    n0: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu1", "mu2", "n0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")


def slip_dynamics(state: PolarState, inp: InputPair, slip: SlipParams,
                  rho_min: float = RHO_MIN) -> PolarDerivative:
    """Polar dynamics with the commanded inputs scaled by (b1, b2)."""
    return polar_dynamics(state, InputPair(slip.b1 * inp.v, slip.b2 * inp.omega), rho_min)


def _check_domain(spec: AdaptiveSpec, state: PolarState) -> None:
    space = clf_state_space(spec.clf_kind)
    if not in_state_space(state, space):
        raise DomainViolation(f"state {state} outside {space.value}")


def adaptive_control(spec: AdaptiveSpec, astate: AdaptiveState, state: PolarState) -> InputPair:
    _check_domain(spec, state)
    nu1, nu2 = lie_derivatives(spec.clf_kind, spec.gains, state)
    return InputPair(-astate.eps1_hat * state.rho * nu1, -astate.eps2_hat * nu2)


def update_law(spec: AdaptiveSpec, state: PolarState) -> Tuple[float, float]:
    """Nonnegative gain-estimate rates (d eps1_hat, d eps2_hat)/dt."""
    _check_domain(spec, state)
    nu1, nu2 = lie_derivatives(spec.clf_kind, spec.gains, state)
    weight = spec.n0 / (1.0 + spec.n0 * clf_value(spec.clf_kind, spec.gains, state))
    return (spec.mu1 * weight * nu1 * nu1, spec.mu2 * weight * nu2 * nu2)


def adaptive_lyapunov(spec: AdaptiveSpec, slip: SlipParams, state: PolarState,
                      astate: AdaptiveState) -> float:
    """V_a, the quantity that is nonincreasing along the closed loop."""
    v = clf_value(spec.clf_kind, spec.gains, state)
    err1 = 1.0 / slip.b1 - astate.eps1_hat
    err2 = 1.0 / slip.b2 - astate.eps2_hat
    return (math.log1p(spec.n0 * v)
            + slip.b1 / (2.0 * spec.mu1) * err1 * err1
            + slip.b2 / (2.0 * spec.mu2) * err2 * err2)


def quadratic_sandwich(kind: ClfKind, gains: ClfGains) -> Tuple[float, float]:
    """Constants with k_low |s|^2 <= V(s) <= k_up |s|^2 on the CLF's space.

    Available for the families with globally quadratic growth. Derivation
    for the backstepping shape V = rho^2 + d^2 + w z^2, z = g + arctan(2
    k2 d)/2: from |arctan(2 k2 d)/2| <= k2 |d| both g^2 <= 2 z^2 + 2 k2^2
    d^2 and z^2 <= 2 g^2 + 2 k2^2 d^2 hold, giving
    k_low = min(1, 1/(1 + 2 k2^2), w/2) and k_up = max(1, 1 + 2 w k2^2, 2 w).
    """
    if kind is ClfKind.BIDIR_BACKSTEP:
        w, k2 = gains.q2, gains.k2
    elif kind is ClfKind.GLOBA_LIE:
        w, k2 = 1.0, 1.0
    else:
        raise DomainViolation(f"{kind.value} has no global quadratic sandwich")
    low = min(1.0, 1.0 / (1.0 + 2.0 * k2 * k2), 0.5 * w)
    up = max(1.0, 1.0 + 2.0 * w * k2 * k2, 2.0 * w)
    return low, up


def _alpha_pair(kind: ClfKind, gains: ClfGains) -> Tuple[Callable[[float], float],
                                                         Callable[[float], float]]:
    if kind is ClfKind.GENOVA_LIE:
        # V >= rho^2 + 2(d^2 + g^2) and V <= 4|s|^2 + |s|^4 / 2
        return (lambda r: r * r, lambda r: 4.0 * r * r + 0.5 * r ** 4)
    low, up = quadratic_sandwich(kind, gains)
    return (lambda r: low * r * r, lambda r: up * r * r)


def upsilon_bound(spec: AdaptiveSpec, slip: SlipParams, state0: PolarState,
                  astate0: AdaptiveState) -> float:
    """Uniform bound on |state| + |estimate error| along the closed loop.

    Computed in log space; overflows of the exponential envelope return
    inf, which still upper-bounds the rollout.
    """
    alpha1, alpha2 = _alpha_pair(spec.clf_kind, spec.gains)
    c1 = min(slip.b1 / (2.0 * spec.mu1), slip.b2 / (2.0 * spec.mu2))
    c2 = max(slip.b1 / (2.0 * spec.mu1), slip.b2 / (2.0 * spec.mu2))
    big_m = max(1.0, c2 / c1)
    small_m = max(c2, 1.0 / c2)

    err1 = 1.0 / slip.b1 - astate0.eps1_hat
    err2 = 1.0 / slip.b2 - astate0.eps2_hat
    upsilon0 = (math.sqrt(state0.rho**2 + state0.delta**2 + state0.gamma**2)
                + math.hypot(err1, err2))
    if upsilon0 == 0.0:
        return 0.0
    a2 = max(spec.n0 * alpha2(upsilon0), upsilon0 * upsilon0)
    exponent = small_m * a2
    if exponent > 700.0:
        return math.inf
    inner = big_m * math.expm1(exponent)
    # invert a1(r) = min(n0 * alpha1(r), r^2); both branches increase in r,
    # so the inverse is the max of the branch inverses
    low_quad = spec.n0 * alpha1(1.0)  # alpha1 is c r^2 for all supported kinds
    return max(math.sqrt(inner / low_quad), math.sqrt(inner))
