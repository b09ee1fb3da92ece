"""Curb-safe nonovershooting parking: y(t) <= 0 with strictly forward motion.

With the target on the curb line and the vehicle starting below it
(polar angle delta0 in (0, pi)), the feedback

    v = k1 rho cos(gamma)
    omega = (k1/2) sin(2 gamma) + omega_tilde

with the steering correction of :func:`nonovershoot_control` keeps
delta(t) in [0, pi), hence y = -rho sin(delta) <= 0, provided the gain
k2 is chosen inside the admissible interval for (delta0, gamma0). The
backstepping offset z = gamma + arctan(4 k2 tan(delta/2)) / 2 then obeys

    z_dot = -(k4 + (k3/k2) psi_c^2 N (1 + tan^2(delta/2))) z

exactly, so z0 in (0, pi/4) stays nonnegative and nonincreasing, and
gamma stays in (-pi/4, pi/4), keeping v >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .backstepping import psi
from .clf import ClfGains, ClfKind, clf_value, DELTA_BARRIER_MARGIN
from .errors import DomainViolation, InadmissibleInitialCondition
from .model import InputPair, PolarState, StateSpace, in_state_space

QUARTER_PI = 0.25 * math.pi


def curb_psi(z: float, gamma: float) -> float:
    """(sin(2z - 2 gamma) + sin(2 gamma)) / (2z), limit cos(2 gamma) at z = 0.

    Distinct from the backstepping kernel: both arguments enter doubled.
    """
    return psi(2.0 * z, 2.0 * gamma)


@dataclass(frozen=True)
class SafetySpec:
    gains: ClfGains

    @property
    def clf_kind(self) -> ClfKind:
        return ClfKind.BARFLI_SAFETY

    def control(self, state: PolarState) -> InputPair:
        return nonovershoot_control(self, state)

    def clf(self, state: PolarState) -> float:
        return clf_value(ClfKind.BARFLI_SAFETY, self.gains, state)


def nonovershoot_control(spec: SafetySpec, state: PolarState) -> InputPair:
    if not in_state_space(state, StateSpace.S2):
        raise DomainViolation(f"state {state} outside S2")
    if abs(state.delta) > math.pi - DELTA_BARRIER_MARGIN:
        raise DomainViolation("delta inside the barrier margin of pi")
    k1, k2, k3, k4 = spec.gains.k1, spec.gains.k2, spec.gains.k3, spec.gains.k4
    rho, delta, gamma = state
    t = math.tan(0.5 * delta)
    n_factor = math.sqrt(1.0 + 16.0 * k2 * k2 * t * t)
    z = gamma + 0.5 * math.atan(4.0 * k2 * t)
    psi_c = curb_psi(z, gamma)
    sin_2g = math.sin(2.0 * gamma)
    cos_half = math.cos(0.5 * delta)
    denom = cos_half * cos_half * (1.0 + 16.0 * k2 * k2 * t * t)  # cos^2 + 16 k2^2 sin^2
    omega_tilde = ((k4 + (k3 / k2) * psi_c * psi_c * n_factor * (1.0 + t * t)) * z
                   + 0.5 * k1 * k2 * sin_2g / denom)
    return InputPair(k1 * rho * math.cos(gamma), 0.5 * k1 * sin_2g + omega_tilde)


def k2_admissible_interval(delta0: float, gamma0: float) -> Tuple[float, float]:
    """Open interval of k2 values that place z0 strictly inside (0, pi/4).

    Requires delta0 in (0, pi) and gamma0 in (-pi/4, pi/4). The upper end
    is +inf whenever gamma0 <= 0.
    """
    if not 0.0 < delta0 < math.pi:
        raise InadmissibleInitialCondition(f"delta0={delta0!r} outside (0, pi)")
    if not -QUARTER_PI < gamma0 < QUARTER_PI:
        raise InadmissibleInitialCondition(f"gamma0={gamma0!r} outside (-pi/4, pi/4)")
    scale = 4.0 * math.tan(0.5 * delta0)
    lo = math.tan(max(0.0, -2.0 * gamma0)) / scale
    hi = math.inf if gamma0 <= 0.0 else math.tan(0.5 * math.pi - 2.0 * gamma0) / scale
    return lo, hi


def k2_midpoint(delta0: float, gamma0: float) -> float:
    """Admissible k2 placing z0 at the midpoint of its reachable range.

    The interval of k2 values is half-infinite for gamma0 <= 0, so an
    arithmetic midpoint does not exist in general; the midpoint is taken
    in z0 instead, which gives tan(pi/4 - gamma0) / (4 tan(delta0 / 2))
    for every admissible pair and always lies strictly inside.
    """
    lo, hi = k2_admissible_interval(delta0, gamma0)  # validates the box
    k2 = math.tan(QUARTER_PI - gamma0) / (4.0 * math.tan(0.5 * delta0))
    assert lo < k2 and k2 < hi
    return k2


def initial_offset(k2: float, delta0: float, gamma0: float) -> float:
    """z0 for a gain choice; admissible choices give z0 in (0, pi/4)."""
    return gamma0 + 0.5 * math.atan(4.0 * k2 * math.tan(0.5 * delta0))


def curb_metrics(trajectory) -> Tuple[float, float, float, float]:
    """(min y, min delta, max delta, min v) over the recorded samples.

    ``trajectory`` is any rollout record with ``poses``, ``states`` and
    ``inputs`` channels; the velocity extremum ignores frozen zero-input
    samples after parking (``live_end``).
    """
    live = getattr(trajectory, "live_end", len(trajectory.times))
    return (float(trajectory.poses[:, 1].min()),
            float(trajectory.states[:, 1].min()),
            float(trajectory.states[:, 1].max()),
            float(trajectory.inputs[:live, 0].min()))
