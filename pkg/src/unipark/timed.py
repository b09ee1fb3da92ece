"""Prescribed-time and fixed-time rescalings of the backstepping laws.

Prescribed time: the base feedback pair is multiplied by the blow-up
factor 1 + nu^2(t - t0), nu(t - t0) = tan(pi (t - t0) / (2 T)). Under
the dilation tau = t0 + (2T/pi) nu(t - t0) the scaled closed loop in t
coincides exactly with the unscaled closed loop in tau, so the state
reaches zero as t -> t0 + T with inputs converging to zero.

Fixed time: the pair is multiplied by the state-dependent factor

    kappa = exp(V^p) V^(-p) / (c_lower p T),  p in (0, 1/2),

which enforces d(exp(-V^p))/dt >= 1/T and hence settling no later than
T (1 - exp(-V0^p)). Inside the small-V deadband kappa diverges and the
wrapper outputs zero instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .backstepping import GesControllerSpec
from .clf import ClfKind
from .adaptive import quadratic_sandwich
from .errors import DeadbandParked, HorizonExceeded
from .model import InputPair, PolarState, state_norm

#: Fraction of the horizon kept clear of the tangent singularity.
PT_TERMINAL_MARGIN = 1e-4

#: CLF level below which the fixed-time wrapper parks (outputs zero).
V_DEAD = 1e-12


@dataclass(frozen=True)
class PtSpec:
    base: GesControllerSpec
    T: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"horizon T must be finite and positive, got {self.T!r}")

    @property
    def report_end(self) -> float:
        """Last time the wrapper is integrated to."""
        return self.t0 + self.T * (1.0 - PT_TERMINAL_MARGIN)


def _nu(spec: PtSpec, t: float) -> float:
    return math.tan(0.5 * math.pi * (t - spec.t0) / spec.T)


def pt_scale(spec: PtSpec, t: float) -> float:
    """1 + nu^2(t - t0) >= 1; equals 1 at t = t0 and diverges at t0 + T."""
    if t < spec.t0 or t >= spec.t0 + spec.T:
        raise HorizonExceeded(f"t={t!r} outside [{spec.t0!r}, {spec.t0 + spec.T!r})")
    nu = _nu(spec, t)
    return 1.0 + nu * nu


def pt_control(spec: PtSpec, t: float, state: PolarState) -> InputPair:
    """Scaled base feedback; the composed pair is multiplied as a whole.

    Scaling the full pair (rather than re-nesting the scaled v inside the
    steering law) is what makes the dilated-time closed loop coincide
    exactly with the unscaled one; the equivalence test exercises this.
    """
    spec.base.check_domain(state)
    scale = pt_scale(spec, t)
    v, omega = spec.base.control_raw(state)
    return InputPair(scale * v, scale * omega)


def time_dilation(spec: PtSpec, t: float) -> float:
    """Map finite time t in [t0, t0 + T) to dilated time tau in [t0, inf)."""
    if t < spec.t0 or t >= spec.t0 + spec.T:
        raise HorizonExceeded(f"t={t!r} outside [{spec.t0!r}, {spec.t0 + spec.T!r})")
    return spec.t0 + (2.0 * spec.T / math.pi) * _nu(spec, t)


def inverse_dilation(spec: PtSpec, tau: float) -> float:
    if tau < spec.t0:
        raise HorizonExceeded(f"tau={tau!r} before start {spec.t0!r}")
    return spec.t0 + (2.0 * spec.T / math.pi) * math.atan(
        0.5 * math.pi * (tau - spec.t0) / spec.T)


@dataclass(frozen=True)
class FxtSpec:
    base: GesControllerSpec
    T: float
    p: float
    v_dead: float = V_DEAD

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"settling bound T must be finite and positive, got {self.T!r}")
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"exponent p must lie in (0, 1/2), got {self.p!r}")

    @property
    def c_underline(self) -> float:
        return self.base.c_underline


def fxt_scale(spec: FxtSpec, state: PolarState) -> float:
    """kappa = exp(V^p) V^(-p) / (c_lower p T); parks below the deadband."""
    v = spec.base.clf(state)
    if v <= spec.v_dead:
        raise DeadbandParked(f"V={v!r} at or below deadband {spec.v_dead!r}")
    vp = v ** spec.p
    return math.exp(vp) / (spec.c_underline * spec.p * spec.T * vp)


def fxt_control(spec: FxtSpec, state: PolarState) -> InputPair:
    """kappa-scaled base feedback; zero inside the deadband."""
    spec.base.check_domain(state)
    try:
        scale = fxt_scale(spec, state)
    except DeadbandParked:
        return InputPair(0.0, 0.0)
    v, omega = spec.base.control_raw(state)
    return InputPair(scale * v, scale * omega)


def settling_time_bound(spec: FxtSpec, initial: PolarState) -> float:
    """Upper bound (1 - exp(-K2 |s0|^(2p))) T <= T on the settling time.

    K2 = k_up^p where k_up = max(1, 1 + 2 k1 k2^2 / k3, 2 k1 / k3) is the
    upper quadratic envelope constant of the base CLF: V0 <= k_up |s0|^2
    implies exp(-V0^p) >= exp(-K2 |s0|^(2p)), and settling happens once
    exp(-V^p) grows from exp(-V0^p) to 1 at rate at least 1/T. The
    envelope is global for the bidirectional family; for the barrier
    family it holds away from the delta barrier only, so the bound is
    certified (and tested) on the bidirectional base.
    """
    _, k_up = quadratic_sandwich(ClfKind.BIDIR_BACKSTEP, spec.base.gains)
    k2_const = k_up ** spec.p
    return (1.0 - math.exp(-k2_const * state_norm(initial) ** (2.0 * spec.p))) * spec.T


def fxt_max_step(spec: FxtSpec, state: PolarState, dt: float) -> float:
    """Step cap keeping |V_dot| dt below a tenth of V near settling.

    Uses the analytic decay rate |V_dot| <= exp(V^p) V^(1-p) / (pT), so the
    cap is deterministic and needs no trial stepping.
    """
    v = spec.base.clf(state)
    if v <= spec.v_dead:
        return dt
    vp = v ** spec.p
    rate = math.exp(vp) * v ** (1.0 - spec.p) / (spec.p * spec.T)
    if rate <= 0.0:
        return dt
    return min(dt, 0.08 * v / rate)
