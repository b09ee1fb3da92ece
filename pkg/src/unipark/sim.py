"""Deterministic fixed-step rollout engine, metrics, and decay certificates.

The integrator is classical fourth-order Runge-Kutta with the feedback
law evaluated at every stage point. Controllers that become stiff in a
known, analytic way (the prescribed-time blow-up factor and the
fixed-time scaling near settling) provide a per-step size cap instead of
trial-and-error step control, so rollouts stay bit-reproducible.

A rollout ends in one of four ways: the horizon is reached (Completed),
the certificate function falls below the parked deadband and the state
is frozen with zero input (Parked), the rho guard trips (SingularRho),
or a prescribed-time wrapper reaches the end of its safe window
(HorizonExceeded).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .adaptive import AdaptiveSpec, AdaptiveState, SlipParams, UNIT_SLIP, adaptive_control, update_law
from .backstepping import GesControllerSpec
from .clf import clf_state_space, clf_value
from .errors import (DomainViolation, InsufficientDecay, NonFiniteState, SingularRho,
                     TailNotConverged)
from .inverse_optimal import IocControllerSpec, evaluate_cost_J, ioc_control, running_cost
from .model import CartesianPose, ORIGIN_POSE, PolarState, in_state_space
from .safety import SafetySpec
from .timed import FxtSpec, PtSpec, fxt_control, fxt_max_step, pt_control

V_DEAD_DEFAULT = 1e-12
SETTLE_TOL_DEFAULT = 1e-3
_PT_TAU_FACTOR = 50.0
_PARK_FILL_SAMPLES = 512

STATUS_COMPLETED = "Completed"
STATUS_PARKED = "Parked"
STATUS_SINGULAR = "SingularRho"
STATUS_HORIZON = "HorizonExceeded"


@dataclass(frozen=True)
class ZeroControl:
    """Null controller; the state stays wherever it started."""


ControllerSpec = Union[GesControllerSpec, IocControllerSpec, AdaptiveSpec, PtSpec,
                       FxtSpec, SafetySpec, ZeroControl]


@dataclass(frozen=True)
class Scenario:
    controller: ControllerSpec
    initial: PolarState
    dt: float
    horizon: float
    slip: SlipParams = UNIT_SLIP
    adaptive_init: AdaptiveState = AdaptiveState(0.0, 0.0)
    target: CartesianPose = ORIGIN_POSE
    name: str = ""
    v_dead: float = V_DEAD_DEFAULT
    settle_tol: float = SETTLE_TOL_DEFAULT

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and positive, got {self.dt!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise ValueError(f"horizon must be finite and positive, got {self.horizon!r}")


@dataclass
class Trajectory:
    """Time-sampled rollout; all channels share one strictly increasing grid."""

    times: np.ndarray
    states: np.ndarray            # (n, 3): rho, delta, gamma
    poses: np.ndarray             # (n, 3): x, y, theta
    inputs: np.ndarray            # (n, 2): v, omega
    v_values: np.ndarray          # CLF samples; nan where no CLF applies
    costs: Optional[np.ndarray]   # running-cost samples (cost-based laws only)
    estimates: Optional[np.ndarray]  # (n, 2) gain estimates (adaptive only)
    status: str
    park_index: Optional[int]     # first frozen sample, if parked
    c_underline: Optional[float]  # decay constant when the law certifies one

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt((self.states ** 2).sum(axis=1))

    @property
    def live_end(self) -> int:
        """Number of samples before the parked freeze (all, if none)."""
        return len(self.times) if self.park_index is None else self.park_index + 1


def _is_adaptive(controller: ControllerSpec) -> bool:
    return isinstance(controller, AdaptiveSpec)


def _clf_of(controller: ControllerSpec) -> Optional[Callable[[PolarState], float]]:
    if isinstance(controller, GesControllerSpec):
        return controller.clf
    if isinstance(controller, (PtSpec, FxtSpec)):
        return controller.base.clf
    if isinstance(controller, SafetySpec):
        return controller.clf
    if isinstance(controller, IocControllerSpec):
        return lambda s: clf_value(controller.clf_kind, controller.gains, s)
    if isinstance(controller, AdaptiveSpec):
        return lambda s: clf_value(controller.clf_kind, controller.gains, s)
    return None


def _c_underline_of(controller: ControllerSpec) -> Optional[float]:
    if isinstance(controller, GesControllerSpec):
        return controller.c_underline
    return None


def validate_initial_state(scenario: Scenario) -> None:
    """Raise :class:`DomainViolation` if the start lies outside the law's domain."""
    controller, state = scenario.controller, scenario.initial
    if isinstance(controller, ZeroControl):
        return
    if isinstance(controller, GesControllerSpec):
        space = controller.state_space
    elif isinstance(controller, (PtSpec, FxtSpec)):
        space = controller.base.state_space
    elif isinstance(controller, SafetySpec):
        space = clf_state_space(controller.clf_kind)
    else:
        space = clf_state_space(controller.clf_kind)
    if not in_state_space(state, space):
        raise DomainViolation(f"initial state {state} outside {space.value}")


def integrate(scenario: Scenario) -> Trajectory:
    """Roll the closed loop forward; see the module docstring for outcomes."""
    validate_initial_state(scenario)
    controller = scenario.controller
    slip = scenario.slip
    b1, b2 = slip.b1, slip.b2
    adaptive = _is_adaptive(controller)
    clf_fn = _clf_of(controller)
    cost_fn = None
    if isinstance(controller, IocControllerSpec):
        cost_fn = lambda s: running_cost(controller, s)

    t_end = scenario.horizon
    end_status = STATUS_COMPLETED
    if isinstance(controller, PtSpec):
        t_end = min(t_end, controller.report_end)
        if t_end >= controller.report_end - 1e-15:
            end_status = STATUS_HORIZON

    # control(t, y) on raw tuples; y = (rho, delta, gamma[, e1, e2])
    if isinstance(controller, ZeroControl):
        control = lambda t, y: (0.0, 0.0)
    elif isinstance(controller, GesControllerSpec):
        base = controller.control_raw
        control = lambda t, y: base(PolarState(y[0], y[1], y[2]))
    elif isinstance(controller, PtSpec):
        control = lambda t, y: pt_control(controller, t, PolarState(y[0], y[1], y[2]))
    elif isinstance(controller, FxtSpec):
        control = lambda t, y: fxt_control(controller, PolarState(y[0], y[1], y[2]))
    elif isinstance(controller, SafetySpec):
        control = lambda t, y: controller.control(PolarState(y[0], y[1], y[2]))
    elif isinstance(controller, IocControllerSpec):
        control = lambda t, y: ioc_control(controller, PolarState(y[0], y[1], y[2]))
    else:
        control = lambda t, y: adaptive_control(
            controller, AdaptiveState(y[3], y[4]), PolarState(y[0], y[1], y[2]))

    def f(t: float, y: Tuple[float, ...]) -> Tuple[float, ...]:
        rho, gamma = y[0], y[2]
        if rho <= 1e-250:
            raise SingularRho(f"rho={rho!r} at the integration floor")
        v, omega = control(t, y)
        swing = b1 * v / rho * math.sin(gamma)
        core = (-b1 * v * math.cos(gamma), swing, swing - b2 * omega)
        if not adaptive:
            return core
        d1, d2 = update_law(controller, PolarState(rho, y[1], gamma))
        return core + (d1, d2)

    max_step: Callable[[float, Tuple[float, ...]], float]
    if isinstance(controller, PtSpec):
        tau_cap = _PT_TAU_FACTOR * scenario.dt

        def max_step(t, y):
            nu = math.tan(0.5 * math.pi * (t - controller.t0) / controller.T)
            return tau_cap / (1.0 + nu * nu)
    elif isinstance(controller, FxtSpec):
        def max_step(t, y):
            return fxt_max_step(controller, PolarState(y[0], y[1], y[2]), scenario.dt)
    else:
        max_step = lambda t, y: scenario.dt

    y: Tuple[float, ...] = tuple(scenario.initial)
    if adaptive:
        y = y + tuple(scenario.adaptive_init)
    t = 0.0
    dt = scenario.dt

    times: List[float] = []
    rows: List[Tuple[float, ...]] = []
    input_rows: List[Tuple[float, float]] = []
    v_rows: List[float] = []
    cost_rows: List[float] = []
    status = end_status
    park_index: Optional[int] = None

    def record(tv: float, yv: Tuple[float, ...], u: Tuple[float, float],
               vv: float, cv: float) -> None:
        times.append(tv)
        rows.append(yv)
        input_rows.append(u)
        v_rows.append(vv)
        cost_rows.append(cv)

    while True:
        state = PolarState(y[0], y[1], y[2])
        v_here = clf_fn(state) if clf_fn is not None else math.nan
        if clf_fn is not None and v_here < scenario.v_dead:
            status = STATUS_PARKED
            park_index = len(times)
            record(t, y, (0.0, 0.0), v_here, 0.0)
            break
        try:
            u = control(t, y)
        except SingularRho:
            status = STATUS_SINGULAR
            break
        record(t, y, u, v_here, cost_fn(state) if cost_fn is not None else math.nan)
        if t >= t_end - 1e-12:
            break
        h = min(dt, t_end - t, max_step(t, y))
        try:
            y = _rk4_step(f, t, y, h)
        except SingularRho:
            status = STATUS_SINGULAR
            t += h
            break
        for component in y:
            if not math.isfinite(component):
                raise NonFiniteState(f"non-finite state component at t={t + h!r}")
        t += h

    # freeze-and-fill so metrics and terminal checks see the full horizon
    if status == STATUS_PARKED and t < t_end - 1e-12:
        remaining = t_end - t
        n_fill = min(_PARK_FILL_SAMPLES, max(1, int(remaining / dt)))
        step = remaining / n_fill
        for i in range(1, n_fill + 1):
            record(t + i * step, y, (0.0, 0.0), v_rows[park_index], 0.0)

    states = np.array([r[:3] for r in rows], dtype=float)
    estimates = np.array([r[3:] for r in rows], dtype=float) if adaptive else None
    times_arr = np.asarray(times, dtype=float)
    poses = _poses_from_states(states, scenario.target)
    costs = np.asarray(cost_rows, dtype=float) if cost_fn is not None else None
    return Trajectory(times_arr, states, poses, np.asarray(input_rows, dtype=float),
                      np.asarray(v_rows, dtype=float), costs, estimates, status,
                      park_index, _c_underline_of(controller))


def _rk4_step(f, t: float, y: Tuple[float, ...], h: float) -> Tuple[float, ...]:
    half = 0.5 * h
    k1 = f(t, y)
    k2 = f(t + half, tuple(yi + half * ki for yi, ki in zip(y, k1)))
    k3 = f(t + half, tuple(yi + half * ki for yi, ki in zip(y, k2)))
    k4 = f(t + h, tuple(yi + h * ki for yi, ki in zip(y, k3)))
    sixth = h / 6.0
    return tuple(yi + sixth * (a + 2.0 * (b + c) + d)
                 for yi, a, b, c, d in zip(y, k1, k2, k3, k4))


def _poses_from_states(states: np.ndarray, target: CartesianPose) -> np.ndarray:
    bearing = states[:, 1] + target.theta - math.pi
    poses = np.empty_like(states)
    poses[:, 0] = target.x + states[:, 0] * np.cos(bearing)
    poses[:, 1] = target.y + states[:, 0] * np.sin(bearing)
    poses[:, 2] = states[:, 1] - states[:, 2] + target.theta
    return poses


@dataclass(frozen=True)
class LyapunovReport:
    passed: bool
    worst_margin: float
    worst_time: Optional[float]
    checked: int


def verify_lyapunov(trajectory: Trajectory, c_underline: float,
                    tol: float = 1e-4) -> LyapunovReport:
    """Check the per-step decay certificate V(t+h) <= V(t) exp(-c h) (1 + tol)."""
    end = trajectory.live_end
    times = trajectory.times[:end]
    values = trajectory.v_values[:end]
    worst = -math.inf
    worst_time = None
    checked = 0
    for i in range(len(times) - 1):
        v0, v1 = values[i], values[i + 1]
        if not (v0 > 1e-300):
            continue
        margin = v1 / (v0 * math.exp(-c_underline * (times[i + 1] - times[i]))) - 1.0
        checked += 1
        if margin > worst:
            worst, worst_time = margin, times[i + 1]
    return LyapunovReport(worst <= tol, worst, worst_time, checked)


def fit_exponential(trajectory: Trajectory,
                    abscissa: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """Fit |state(t)| ~ K |state0| exp(-lambda t) over the decay window.

    The window keeps samples with |state| in [1e-8, 0.5 |state0|] before
    any parked freeze; pass ``abscissa`` to fit against a transformed
    time variable (e.g. the prescribed-time dilation).
    """
    end = trajectory.live_end
    norms = trajectory.norms[:end]
    if len(norms) == 0:
        raise InsufficientDecay("empty trajectory")
    s0 = norms[0]
    xs = trajectory.times[:end] if abscissa is None else np.asarray(abscissa)[:end]
    mask = (norms >= 1e-8) & (norms <= 0.5 * s0)
    if mask.sum() < 10:
        raise InsufficientDecay(f"only {int(mask.sum())} samples in the decay window")
    slope, intercept = np.polyfit(xs[mask], np.log(norms[mask]), 1)
    return math.exp(intercept) / s0, -slope


@dataclass(frozen=True)
class Metrics:
    settling_time: Optional[float]
    lambda_hat: Optional[float]
    k_hat: Optional[float]
    max_v: float
    max_omega: float
    min_y: float
    j_cost: Optional[float]
    final_v: Optional[float]
    status: str

    def to_dict(self) -> dict:
        return {
            "settling_time": self.settling_time,
            "lambda_hat": self.lambda_hat,
            "K_hat": self.k_hat,
            "max_v": self.max_v,
            "max_omega": self.max_omega,
            "min_y": self.min_y,
            "J": self.j_cost,
            "final_V": self.final_v,
            "status": self.status,
        }


def compute_metrics(trajectory: Trajectory, scenario: Scenario) -> Metrics:
    norms = trajectory.norms
    above = np.nonzero(norms > scenario.settle_tol)[0]
    if len(above) == 0:
        settling: Optional[float] = float(trajectory.times[0])
    elif above[-1] == len(norms) - 1:
        settling = None
    else:
        settling = float(trajectory.times[above[-1] + 1])
    try:
        k_hat, lambda_hat = fit_exponential(trajectory)
    except InsufficientDecay:
        k_hat = lambda_hat = None
    j_cost: Optional[float] = None
    if isinstance(scenario.controller, IocControllerSpec):
        try:
            j_cost = evaluate_cost_J(trajectory, scenario.controller)
        except TailNotConverged:
            j_cost = None
    final_v = trajectory.v_values[-1]
    return Metrics(
        settling_time=settling,
        lambda_hat=lambda_hat,
        k_hat=k_hat,
        max_v=float(np.abs(trajectory.inputs[:, 0]).max()),
        max_omega=float(np.abs(trajectory.inputs[:, 1]).max()),
        min_y=float(trajectory.poses[:, 1].min()),
        j_cost=j_cost,
        final_v=None if math.isnan(final_v) else float(final_v),
        status=trajectory.status,
    )
