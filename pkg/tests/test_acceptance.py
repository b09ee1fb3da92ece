"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Budgeted runtimes are asserted where the criterion carries one.
"""

import math
import time

import numpy as np
import pytest

from unipark import (AdaptiveSpec, AdaptiveState, ClfGains, ClfKind, ConstantEpsilon,
                     CostFunction, CostKind, IocControllerSpec, FxtSpec, PolarState,
                     PtSpec, Scenario, UNITY_GAINS, clf_gradient, clf_value,
                     evaluate_cost_J, integrate, fit_exponential, ioc_control,
                     legendre_ratio, psi, psi2, saturation_schedules,
                     settling_time_bound, time_dilation, verify_lyapunov)
from unipark.backstepping import Direction, GesControllerSpec
from unipark.safety_grid import run_grid
from unipark.sim import _rk4_step

from conftest import random_states

QUAD = CostFunction(CostKind.QUADRATIC)
COMPOSITE_GAINS = ClfGains(6.5, 3.0, 7.0)
FIG_IC = PolarState(1.0, -4 * math.pi / 5, math.pi)


def _report(name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}", flush=True)
    assert ok, f"{name}: {detail}"


_GES_CACHE = {}


def _ges_grid():
    """100 rollouts per direction at unity gains, shared by two criteria."""
    if _GES_CACHE:
        return _GES_CACHE
    rng = np.random.default_rng(1905)
    start = time.perf_counter()
    for direction in (Direction.UNIDIRECTIONAL, Direction.BIDIRECTIONAL):
        spec = GesControllerSpec(direction, UNITY_GAINS)
        runs = []
        for _ in range(100):
            if direction is Direction.UNIDIRECTIONAL:
                ic = PolarState(rng.uniform(0.1, 2.0), rng.uniform(-math.pi + 0.3,
                                math.pi - 0.3), rng.uniform(-2.5, 2.5))
            else:
                ic = PolarState(rng.uniform(0.1, 2.0), rng.uniform(-3.0, 3.0),
                                rng.uniform(-3.0, 3.0))
            runs.append(integrate(Scenario(controller=spec, initial=ic, dt=1e-3,
                                           horizon=6.0)))
        _GES_CACHE[direction] = (spec, runs)
    _GES_CACHE["elapsed"] = time.perf_counter() - start
    return _GES_CACHE


def test_criterion_lyapunov_decay_certificates():
    grid = _ges_grid()
    worst = -math.inf
    checked = 0
    for direction in (Direction.UNIDIRECTIONAL, Direction.BIDIRECTIONAL):
        spec, runs = grid[direction]
        for traj in runs:
            report = verify_lyapunov(traj, spec.c_underline, tol=1e-4)
            worst = max(worst, report.worst_margin)
            checked += report.checked
            if not report.passed:
                break
    elapsed = grid["elapsed"]
    ok = worst <= 1e-4 and elapsed < 60.0
    _report("lyapunov-decay-certificates",
            ok, f"200 rollouts, worst per-step margin {worst:.2e} (tol 1e-4), "
                f"{checked} steps checked, grid built in {elapsed:.1f}s (< 60s)")


def test_criterion_ges_rate():
    grid = _ges_grid()
    worst_ratio = math.inf
    for direction in (Direction.UNIDIRECTIONAL, Direction.BIDIRECTIONAL):
        spec, runs = grid[direction]
        target = spec.c_underline / 2.0
        for traj in runs:
            _, lam_hat = fit_exponential(traj)
            worst_ratio = min(worst_ratio, lam_hat / target)
    _report("ges-fitted-rate", worst_ratio >= 0.9,
            f"min fitted-rate / (c/2) = {worst_ratio:.3f} (need >= 0.9)")


def test_criterion_inverse_optimal_certificate():
    spec = IocControllerSpec(ClfKind.COMPOSITE_GLOBA, COMPOSITE_GAINS, QUAD, QUAD,
                             ConstantEpsilon(1.0), ConstantEpsilon(1.0))
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        ic = PolarState(rng.uniform(0.4, 1.2), rng.uniform(-2.5, 2.5),
                        rng.uniform(-2.5, 2.5))
        traj = integrate(Scenario(controller=spec, initial=ic, dt=1e-3, horizon=30.0))
        j_value = evaluate_cost_J(traj, spec)
        worst = max(worst, abs(j_value - traj.v_values[0]) / traj.v_values[0])
    elapsed = time.perf_counter() - start
    ok = worst <= 0.01 and elapsed < 30.0
    _report("inverse-optimal-certificate", ok,
            f"10 starts, worst |J - V0|/V0 = {worst:.2e} (tol 1e-2), {elapsed:.1f}s (< 30s)")


def test_criterion_gain_margin():
    """Positive weight scaling only reparameterizes time for the driftless
    loop, so each weight is simulated over a matched window."""
    rng = np.random.default_rng(77)
    ics = [PolarState(rng.uniform(0.4, 1.2), rng.uniform(-2.5, 2.5),
                      rng.uniform(-2.5, 2.5)) for _ in range(10)]
    worst = 0.0
    for eps in (0.1, 1.0, 10.0):
        scale = eps * eps
        spec = IocControllerSpec(ClfKind.COMPOSITE_GLOBA, COMPOSITE_GAINS, QUAD, QUAD,
                                 ConstantEpsilon(eps), ConstantEpsilon(eps))
        for ic in ics:
            traj = integrate(Scenario(controller=spec, initial=ic, dt=1e-3 / scale,
                                      horizon=30.0 / scale))
            worst = max(worst, traj.v_values[-1] / traj.v_values[0])
    _report("gain-margin", worst < 1e-2,
            f"eps in {{0.1, 1, 10}} x 10 starts, worst V(end)/V(0) = {worst:.2e} (< 1e-2)")


def test_criterion_saturation():
    rng = np.random.default_rng(55)
    worst_excess = -math.inf
    for kind in (CostKind.LNCOS, CostKind.RELAY_APPROX):
        cost = CostFunction(kind)
        for bar in (0.2, 1.0):
            eps1, eps2 = saturation_schedules(kind, bar, bar, 0.3)
            spec = IocControllerSpec(ClfKind.COMPOSITE_GLOBA, COMPOSITE_GAINS,
                                     cost, cost, eps1, eps2)
            for _ in range(3):
                ic = PolarState(rng.uniform(0.5, 2.0), rng.uniform(-2.5, 2.5),
                                rng.uniform(-2.5, 2.5))
                traj = integrate(Scenario(controller=spec, initial=ic, dt=2e-3,
                                          horizon=20.0))
                worst_excess = max(worst_excess,
                                   np.abs(traj.inputs[:, 0]).max() - bar,
                                   np.abs(traj.inputs[:, 1]).max() - bar)
            for _ in range(10000):
                state = PolarState(rng.uniform(1e-3, 10.0), rng.uniform(-3, 3),
                                   rng.uniform(-3, 3))
                u = ioc_control(spec, state)
                worst_excess = max(worst_excess, abs(u.v) - bar, abs(u.omega) - bar)
    _report("input-saturation", worst_excess <= 1e-9,
            f"bounded laws at limits 0.2 and 1.0: worst excess {worst_excess:.2e} (tol 1e-9)")


def test_criterion_adaptive():
    gains = ClfGains(4.0, 3.5, 1.0, 1.0)   # z-weight 4 through q^2 = k1/k3
    ic = PolarState(1.0, -math.pi / 2, -math.pi / 2)
    baseline = IocControllerSpec(ClfKind.BIDIR_BACKSTEP, gains, QUAD, QUAD,
                                 ConstantEpsilon(1.0), ConstantEpsilon(1.0))
    base_traj = integrate(Scenario(controller=baseline, initial=ic, dt=2e-3,
                                   horizon=60.0))
    base_peaks = (np.abs(base_traj.inputs[:, 0]).max(),
                  np.abs(base_traj.inputs[:, 1]).max())
    details = []
    ok = True
    for mu in (0.5, 1.0):
        spec = AdaptiveSpec(ClfKind.BIDIR_BACKSTEP, gains, mu1=mu, mu2=mu, n0=1.0)
        # transient segment resolved finely, algebraic tail coarsely
        seg1 = integrate(Scenario(controller=spec, initial=ic, dt=0.02, horizon=50.0,
                                  adaptive_init=AdaptiveState(0.0, 0.0)))
        seg2 = integrate(Scenario(controller=spec, initial=PolarState(*seg1.states[-1]),
                                  adaptive_init=AdaptiveState(*seg1.estimates[-1]),
                                  dt=0.15, horizon=240000.0))
        for seg, dt in ((seg1, 0.02), (seg2, 0.15)):
            states, est = seg.states, seg.estimates
            z = states[:, 2] + 0.5 * np.arctan(2.0 * gains.k2 * states[:, 1])
            value = states[:, 0] ** 2 + states[:, 1] ** 2 + gains.q2 * z ** 2
            err1, err2 = 1.0 - est[:, 0], 1.0 - est[:, 1]
            v_a = np.log1p(value) + (err1 ** 2 + err2 ** 2) / (2.0 * mu)
            ok &= bool((np.diff(v_a) <= 1e-6 * dt).all())
            ok &= bool((np.diff(est, axis=0) >= -1e-15).all())
        final_norm = seg2.norms[-1]
        peaks = (max(np.abs(seg1.inputs[:, 0]).max(), np.abs(seg2.inputs[:, 0]).max()),
                 max(np.abs(seg1.inputs[:, 1]).max(), np.abs(seg2.inputs[:, 1]).max()))
        ok &= final_norm < 1e-3
        ok &= peaks[0] < base_peaks[0] and peaks[1] < base_peaks[1]
        details.append(f"mu={mu}: final |state| {final_norm:.2e}, peaks "
                       f"({peaks[0]:.2f}, {peaks[1]:.2f}) vs baseline "
                       f"({base_peaks[0]:.2f}, {base_peaks[1]:.2f})")
    _report("adaptive-unknown-coefficients", ok, "; ".join(details))


def test_criterion_prescribed_time():
    gains = ClfGains(1.0, 2.2, 2.5, 0.5)
    spec = PtSpec(GesControllerSpec(Direction.BIDIRECTIONAL, gains), T=2.0)
    traj = integrate(Scenario(controller=spec, initial=FIG_IC, dt=1e-3, horizon=2.0))
    terminal_norm = traj.norms[-1]
    totals = np.abs(traj.inputs).sum(axis=1)
    tail = totals[traj.times >= traj.times[-1] * 0.99]

    # dilated-time equivalence with matched dilated steps
    def f_base(t, y):
        v, w = spec.base.control_raw(PolarState(*y))
        swing = v / y[0] * math.sin(y[2])
        return (-v * math.cos(y[2]), swing, swing - w)

    y = tuple(FIG_IC)
    worst_equiv = 0.0
    end = traj.live_end
    for i in range(end - 1):
        tau0 = time_dilation(spec, traj.times[i])
        dtau = time_dilation(spec, traj.times[i + 1]) - tau0
        y = _rk4_step(f_base, tau0, y, dtau)
        worst_equiv = max(worst_equiv,
                          max(abs(a - b) for a, b in zip(y, traj.states[i + 1])))

    ok = (traj.times[-1] == pytest.approx(2.0 * (1 - 1e-4), abs=1e-9)
          and terminal_norm < 1e-4 and math.isfinite(totals.max())
          and tail.max() < 1e-3 and worst_equiv < 1e-5)
    _report("prescribed-time", ok,
            f"|state({traj.times[-1]:.4f})| = {terminal_norm:.2e} (< 1e-4), "
            f"max input {totals.max():.1f}, tail inputs {tail.max():.1e} (< 1e-3), "
            f"dilated equivalence {worst_equiv:.1e} (< 1e-5)")


def test_criterion_fixed_time():
    gains = ClfGains(3.0, 0.8, 0.5, 1.0)
    spec = FxtSpec(GesControllerSpec(Direction.BIDIRECTIONAL, gains), T=2.0, p=0.3)
    traj = integrate(Scenario(controller=spec, initial=FIG_IC, dt=1e-3, horizon=3.0))
    settled = traj.park_index is not None
    settle_time = traj.times[traj.park_index] if settled else math.inf
    bound = settling_time_bound(spec, FIG_IC)
    residual = traj.v_values[traj.park_index:].max() if settled else math.inf
    ok = settled and settle_time <= bound <= 2.0 and residual <= spec.v_dead
    _report("fixed-time", ok,
            f"measured settling {settle_time:.3f} <= bound {bound:.3f} <= 2, "
            f"V after settling <= {residual:.1e} (deadband 1e-12)")


def test_criterion_safety_grid():
    delta0s = np.linspace(0.1, math.pi - 0.1, 20)
    gamma0s = np.linspace(-math.pi / 4 + 0.05, math.pi / 4 - 0.05, 20)
    start = time.perf_counter()
    cells = run_grid(delta0s, gamma0s)
    elapsed = time.perf_counter() - start
    worst_y = max(c.min_y for c in cells)
    worst_dlo = min(c.min_delta for c in cells)
    worst_dhi = max(c.max_delta for c in cells)
    worst_v = min(c.min_v for c in cells)
    worst_norm = max(c.final_norm for c in cells)
    ok = (worst_y <= 1e-6 and worst_dlo >= -1e-9 and worst_dhi < math.pi
          and worst_v >= -1e-9 and worst_norm < 1e-3 and elapsed < 300.0)
    _report("curb-safety-grid", ok,
            f"400 cells: max min_y {worst_y:.1e} (<= 1e-6), delta in "
            f"[{worst_dlo:.1e}, {worst_dhi:.4f}] (within [-1e-9, pi)), min v "
            f"{worst_v:.1e} (>= -1e-9), worst final |state| {worst_norm:.1e} "
            f"(< 1e-3), {elapsed:.0f}s (< 300s)")


def test_criterion_numerical_hygiene(rng):
    # gradients against central differences
    gains_for = {
        ClfKind.UNIDIR_BARFLI: ClfGains(1.3, 0.7, 2.1, 0.9),
        ClfKind.BIDIR_BACKSTEP: ClfGains(1.3, 0.7, 2.1, 0.9),
        ClfKind.COMPOSITE_GLOBA: COMPOSITE_GAINS,
        ClfKind.GENOVA_LIE: UNITY_GAINS,
        ClfKind.GLOBA_LIE: UNITY_GAINS,
        ClfKind.BARFLI_SAFETY: ClfGains(1.0, 2.0, 1.5, 0.8),
    }
    h = 1e-6
    worst_grad = 0.0
    for kind, gains in gains_for.items():
        for state in random_states(rng, 1000, kind):
            grad = clf_gradient(kind, gains, state)
            for i in range(3):
                plus, minus = list(state), list(state)
                plus[i] += h
                minus[i] -= h
                fd = (clf_value(kind, gains, PolarState(*plus))
                      - clf_value(kind, gains, PolarState(*minus))) / (2 * h)
                worst_grad = max(worst_grad, abs(grad[i] - fd) / (1.0 + abs(fd)))

    # psi kernels against central differences in the second slot
    worst_psi = 0.0
    for _ in range(1000):
        r, s = rng.uniform(-3, 3), rng.uniform(-3, 3)
        fd = (psi(r, s + h) - psi(r, s - h)) / (2 * h)
        worst_psi = max(worst_psi, abs(psi2(r, s) - fd) / (1.0 + abs(fd)))

    # relay transform: quadrature route vs conjugacy identity
    relay = CostFunction(CostKind.RELAY_APPROX)
    worst_leg = max(abs(legendre_ratio(relay, r) * r - relay.legendre(r))
                    for r in (1e-6, 1e-3, 0.05, 0.3, 1.0, 3.0, 30.0))

    # integrator order
    def terminal(dt):
        sc = Scenario(controller=GesControllerSpec(Direction.BIDIRECTIONAL, UNITY_GAINS),
                      initial=PolarState(1.0, -0.5, 0.8), dt=dt, horizon=1.0)
        return integrate(sc).states[-1]

    coarse, mid, fine = terminal(4e-3), terminal(2e-3), terminal(1e-3)
    ratio = float(np.linalg.norm(coarse - mid) / np.linalg.norm(mid - fine))

    ok = (worst_grad < 1e-6 and worst_psi < 1e-8 and worst_leg <= 1e-9
          and 12.0 <= ratio <= 20.0)
    _report("numerical-hygiene", ok,
            f"gradient-vs-FD {worst_grad:.1e} (< 1e-6), psi2-vs-FD {worst_psi:.1e} "
            f"(< 1e-8), relay transform routes {worst_leg:.1e} (<= 1e-9), "
            f"RK order ratio {ratio:.1f} (in [12, 20])")
