"""Inverse-optimal feedback families built from convex costs on the inputs.

A cost-on-control function eta (class K-infinity on [0, a) together with
its derivative) defines, through the conjugate-type transform

    leg_eta(r) = integral_0^r (eta')^{-1}(s) ds,

a running state cost l = leg_eta1(e1 |nu1|) + leg_eta2(e2 |nu2|) and the
minimizing feedback

    v*     = -rho e1 (eta1')^{-1}(e1 |nu1|) sgn(nu1)
    omega* = -e2 (eta2')^{-1}(e2 |nu2|) sgn(nu2),

which minimizes J = integral [l + eta1(|v|/(e1 rho)) + eta2(|omega|/e2)] dt
with minimum J = V(initial state). Replacing (eta')^{-1}(r) by
leg_eta(r)/r yields the continuous (merely stabilizing) variant.

Four cost shapes are provided. The relay-approximating shape has no
closed-form derivative inverse or transform; the inverse is computed by
bracketed root finding on log eta' and the transform either by adaptive
quadrature (``legendre_ratio``, the reference route) or through the
conjugacy identity leg_eta(r) = r t - eta(t), t = (eta')^{-1}(r) (the
fast route used inside feedback evaluation). The two routes are checked
against each other in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

from scipy.integrate import quad
from scipy.optimize import brentq

from .clf import ClfGains, ClfKind, clf_state_space, clf_value, lie_derivatives
from .errors import DomainLimit, DomainViolation, QuadratureFailure, TailNotConverged
from .model import InputPair, PolarState, in_state_space

_LOW_R = 1e-12          # below this, leg_eta(r)/r is its limit 0
_QUAD_SPLIT = 1e-6      # relay quadrature split point near the steep origin
_QUAD_ABS_TOL = 1e-10


class CostKind(enum.Enum):
    QUADRATIC = "quadratic"
    COSH = "cosh"
    LNCOS = "lncos"
    RELAY_APPROX = "relay_approx"


def _relay_eta(r: float) -> float:
    # e / (e^(1/r) - e) = 1 / expm1(1/r - 1), stable on (0, 1)
    arg = 1.0 / r - 1.0
    if arg > 700.0:
        return math.exp(-arg)
    return 1.0 / math.expm1(arg)


def _relay_log_eta_prime(s: float) -> float:
    # log eta'(s) = 1 - 1/s - 2 log s - 2 log1p(-e^(1 - 1/s))
    tail = 1.0 - 1.0 / s
    correction = -2.0 * math.log1p(-math.exp(tail)) if tail > -700.0 else 0.0
    return 1.0 - 1.0 / s - 2.0 * math.log(s) + correction


def _relay_eta_prime_inverse(r: float) -> float:
    if r == 0.0:
        return 0.0
    target = math.log(r)
    lo, hi = 0.25, 0.75
    while _relay_log_eta_prime(lo) >= target:
        lo *= 0.25
        if lo < 1e-300:
            return 0.0
    while _relay_log_eta_prime(hi) <= target:
        hi = 1.0 - 0.25 * (1.0 - hi)
        if 1.0 - hi < 1e-14:
            break
    return brentq(lambda s: _relay_log_eta_prime(s) - target, lo, hi,
                  xtol=1e-16, maxiter=200)


@dataclass(frozen=True)
class CostFunction:
    """One cost-on-control shape together with all derived maps."""

    kind: CostKind

    @property
    def domain_limit(self) -> float:
        if self.kind is CostKind.LNCOS:
            return 0.5 * math.pi
        if self.kind is CostKind.RELAY_APPROX:
            return 1.0
        return math.inf

    def eta(self, r: float) -> float:
        if r < 0.0:
            raise ValueError(f"eta argument must be nonnegative, got {r!r}")
        if r >= self.domain_limit:
            raise DomainLimit(f"eta argument {r!r} outside [0, {self.domain_limit!r})")
        if self.kind is CostKind.QUADRATIC:
            return 0.5 * r * r
        if self.kind is CostKind.COSH:
            return math.cosh(r) - 1.0
        if self.kind is CostKind.LNCOS:
            return -math.log(math.cos(r))
        return _relay_eta(r) if r > 0.0 else 0.0

    def eta_prime(self, r: float) -> float:
        if r < 0.0:
            raise ValueError(f"eta' argument must be nonnegative, got {r!r}")
        if r >= self.domain_limit:
            raise DomainLimit(f"eta' argument {r!r} outside [0, {self.domain_limit!r})")
        if self.kind is CostKind.QUADRATIC:
            return r
        if self.kind is CostKind.COSH:
            return math.sinh(r)
        if self.kind is CostKind.LNCOS:
            return math.tan(r)
        return math.exp(_relay_log_eta_prime(r)) if r > 0.0 else 0.0

    def eta_prime_inverse(self, r: float) -> float:
        """Class K-infinity inverse of eta'; bounded by the domain limit."""
        if r < 0.0:
            raise ValueError(f"inverse argument must be nonnegative, got {r!r}")
        if self.kind is CostKind.QUADRATIC:
            return r
        if self.kind is CostKind.COSH:
            return math.asinh(r)
        if self.kind is CostKind.LNCOS:
            return math.atan(r)
        return _relay_eta_prime_inverse(r)

    def legendre(self, r: float) -> float:
        """leg_eta(r) by the fast route (closed form, or conjugacy for relay)."""
        if r < 0.0:
            raise ValueError(f"transform argument must be nonnegative, got {r!r}")
        if r == 0.0:
            return 0.0
        if self.kind is CostKind.QUADRATIC:
            return 0.5 * r * r
        if self.kind is CostKind.COSH:
            return r * math.asinh(r) + 1.0 - math.sqrt(1.0 + r * r)
        if self.kind is CostKind.LNCOS:
            return r * math.atan(r) - 0.5 * math.log1p(r * r)
        t = _relay_eta_prime_inverse(r)
        return r * t - self.eta(t)


def eta_value(cost: CostFunction, r: float) -> float:
    return cost.eta(r)


def eta_prime_inverse(cost: CostFunction, r: float) -> float:
    return cost.eta_prime_inverse(r)


def legendre_ratio(cost: CostFunction, r: float) -> float:
    """leg_eta(r) / r; returns the limit 0 below 1e-12.

    The relay shape is integrated numerically (split at the steep origin)
    and raises :class:`QuadratureFailure` if the estimated error exceeds
    the 1e-10 absolute budget.
    """
    if r < 0.0:
        raise ValueError(f"ratio argument must be nonnegative, got {r!r}")
    if r < _LOW_R:
        return 0.0
    kind = cost.kind
    if kind is CostKind.QUADRATIC:
        return 0.5 * r
    if kind is CostKind.COSH:
        return math.asinh(r) - r / (math.sqrt(r * r + 1.0) + 1.0)
    if kind is CostKind.LNCOS:
        if r < 1e-4:
            return 0.5 * r - r ** 3 / 12.0
        return math.atan(r) - 0.5 * math.log1p(r * r) / r
    split = min(r, _QUAD_SPLIT)
    total, err = quad(cost.eta_prime_inverse, 0.0, split,
                      epsabs=2e-11, epsrel=1e-12, limit=200)
    if split < r:
        tail, tail_err = quad(cost.eta_prime_inverse, split, r,
                              epsabs=2e-11, epsrel=1e-12, limit=200)
        total += tail
        err += tail_err
    if err > _QUAD_ABS_TOL:
        raise QuadratureFailure(f"transform quadrature error {err!r} above {_QUAD_ABS_TOL!r}")
    return total / r


class Epsilon:
    """Positive weighting schedule evaluated along the trajectory."""

    def at(self, rho: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantEpsilon(Epsilon):
    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise ValueError(f"epsilon must be finite and positive, got {self.value!r}")

    def at(self, rho: float) -> float:
        return self.value


@dataclass(frozen=True)
class RhoEpsilon(Epsilon):
    """eps(rho) = factor * v_bar / (sigma + rho); shrinks with distance."""

    v_bar: float
    sigma: float
    factor: float = 1.0

    def __post_init__(self) -> None:
        for name in ("v_bar", "sigma", "factor"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    def at(self, rho: float) -> float:
        return self.factor * self.v_bar / (self.sigma + rho)


def saturation_schedules(kind: CostKind, v_bar: float, omega_bar: float,
                         sigma: float) -> tuple[Epsilon, Epsilon]:
    """Schedules guaranteeing |v| <= v_bar and |omega| <= omega_bar.

    The bounded-arctan shape needs the extra 2/pi factor because its
    derivative inverse saturates at pi/2; the relay shape saturates at 1.
    """
    if kind is CostKind.LNCOS:
        factor = 2.0 / math.pi
    elif kind is CostKind.RELAY_APPROX:
        factor = 1.0
    else:
        raise ValueError(f"{kind} has an unbounded derivative inverse")
    return (RhoEpsilon(v_bar, sigma, factor), ConstantEpsilon(factor * omega_bar))


class IocVariant(enum.Enum):
    OPTIMAL = "optimal"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class IocControllerSpec:
    clf_kind: ClfKind
    gains: ClfGains
    cost1: CostFunction
    cost2: CostFunction
    eps1: Epsilon
    eps2: Epsilon
    variant: IocVariant = IocVariant.OPTIMAL


def _legendre_ratio_fast(cost: CostFunction, r: float) -> float:
    if r < _LOW_R:
        return 0.0
    if cost.kind is CostKind.RELAY_APPROX:
        return cost.legendre(r) / r
    return legendre_ratio(cost, r)


def _channel_magnitude(cost: CostFunction, variant: IocVariant, arg: float) -> float:
    if variant is IocVariant.OPTIMAL:
        return cost.eta_prime_inverse(arg)
    return _legendre_ratio_fast(cost, arg)


def ioc_control(spec: IocControllerSpec, state: PolarState) -> InputPair:
    """Minimizing (or continuous) feedback for the chosen cost pair."""
    if not in_state_space(state, clf_state_space(spec.clf_kind)):
        raise DomainViolation(f"state {state} outside {clf_state_space(spec.clf_kind).value}")
    nu1, nu2 = lie_derivatives(spec.clf_kind, spec.gains, state)
    e1 = spec.eps1.at(state.rho)
    e2 = spec.eps2.at(state.rho)
    mag1 = _channel_magnitude(spec.cost1, spec.variant, e1 * abs(nu1))
    mag2 = _channel_magnitude(spec.cost2, spec.variant, e2 * abs(nu2))
    v = -state.rho * e1 * math.copysign(mag1, nu1) if nu1 != 0.0 else 0.0
    omega = -e2 * math.copysign(mag2, nu2) if nu2 != 0.0 else 0.0
    return InputPair(v, omega)


def running_cost(spec: IocControllerSpec, state: PolarState) -> float:
    """State penalty l = leg_eta1(e1 |nu1|) + leg_eta2(e2 |nu2|)."""
    if not in_state_space(state, clf_state_space(spec.clf_kind)):
        raise DomainViolation(f"state {state} outside {clf_state_space(spec.clf_kind).value}")
    nu1, nu2 = lie_derivatives(spec.clf_kind, spec.gains, state)
    e1 = spec.eps1.at(state.rho)
    e2 = spec.eps2.at(state.rho)
    return (e1 * abs(nu1) * _legendre_ratio_fast(spec.cost1, e1 * abs(nu1))
            + e2 * abs(nu2) * _legendre_ratio_fast(spec.cost2, e2 * abs(nu2)))


def squared_quadratic_running_cost(spec: IocControllerSpec, state: PolarState) -> float:
    """Running cost in the squared-weights convention l = (e1 nu1)^2 + (e2 nu2)^2.

    For quadratic costs this is exactly twice :func:`running_cost`; the
    accumulated objective under the minimizer then equals 2 V(initial).
    """
    if spec.cost1.kind is not CostKind.QUADRATIC or spec.cost2.kind is not CostKind.QUADRATIC:
        raise ValueError("squared convention is defined for quadratic costs")
    nu1, nu2 = lie_derivatives(spec.clf_kind, spec.gains, state)
    e1 = spec.eps1.at(state.rho)
    e2 = spec.eps2.at(state.rho)
    return (e1 * nu1) ** 2 + (e2 * nu2) ** 2


def _eta_of_input(cost: CostFunction, ratio: float) -> float:
    limit = cost.domain_limit
    if ratio >= limit:
        if ratio < limit * (1.0 + 1e-9):
            ratio = limit * (1.0 - 1e-15)
        else:
            raise DomainLimit(f"input ratio {ratio!r} beyond cost domain {limit!r}")
    return cost.eta(ratio)


def evaluate_cost_J(trajectory, spec: IocControllerSpec,
                    tail_tol_rel: float = 1e-2) -> float:
    """Trapezoidal accumulation of l + eta1(|v|/(e1 rho)) + eta2(|omega|/e2).

    ``trajectory`` is any rollout record exposing ``times``, ``states``,
    ``inputs`` and ``v_values`` arrays; it may come from a different
    controller than the one the cost describes, so the state penalty is
    recomputed here rather than read from a recorded channel. The tail
    beyond the horizon is estimated as zero, which is admissible only
    once V(end) < tail_tol_rel * V(0); otherwise
    :class:`TailNotConverged` is raised. (For the minimizing feedback
    the exact tail equals V(end), so the relative tolerance bounds the
    truncation error directly.)
    """
    times = trajectory.times
    n = len(times)
    if n == 0:
        return 0.0
    v_values = trajectory.v_values
    v0, v_end = v_values[0], v_values[-1]
    if v_end > 1e-12 and v0 > 0.0 and v_end >= tail_tol_rel * v0:
        raise TailNotConverged(
            f"V(end)/V(0) = {v_end / v0!r} at or above tail tolerance {tail_tol_rel!r}")
    if n < 2:
        return 0.0
    total = 0.0
    prev_t: Optional[float] = None
    prev_f = 0.0
    for i in range(n):
        rho, delta, gamma = trajectory.states[i]
        v, omega = trajectory.inputs[i]
        e1 = spec.eps1.at(rho)
        e2 = spec.eps2.at(rho)
        u1 = abs(v) / (e1 * rho) if rho > 0.0 and v != 0.0 else 0.0
        u2 = abs(omega) / e2
        f = (running_cost(spec, PolarState(rho, delta, gamma))
             + _eta_of_input(spec.cost1, u1) + _eta_of_input(spec.cost2, u2))
        if prev_t is not None:
            total += 0.5 * (times[i] - prev_t) * (f + prev_f)
        prev_t, prev_f = times[i], f
    return total


def ioc_clf_value(spec: IocControllerSpec, state: PolarState) -> float:
    return clf_value(spec.clf_kind, spec.gains, state)


CostSpec = Union[CostFunction, CostKind]


def as_cost(cost: CostSpec) -> CostFunction:
    return cost if isinstance(cost, CostFunction) else CostFunction(cost)
