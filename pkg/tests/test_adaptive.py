import math

import numpy as np
import pytest

from unipark import (AdaptiveSpec, AdaptiveState, ClfGains, ClfKind, ConstantEpsilon,
                     CostFunction, CostKind, InputPair, IocControllerSpec, PolarState,
                     Scenario, SlipParams, adaptive_control, adaptive_lyapunov,
                     clf_value, integrate, ioc_control, polar_dynamics,
                     quadratic_sandwich, slip_dynamics, update_law, upsilon_bound)

from conftest import random_states

# the z-weighted backstepping shape with weight 4 realized through q^2 = 4
DEMO_GAINS = ClfGains(4.0, 3.5, 1.0, 1.0)
DEMO_IC = PolarState(1.0, -math.pi / 2, -math.pi / 2)


def demo_spec(mu=0.5):
    return AdaptiveSpec(ClfKind.BIDIR_BACKSTEP, DEMO_GAINS, mu1=mu, mu2=mu, n0=1.0)


def test_slip_dynamics_unit_matches_plain(rng):
    slip = SlipParams(1.0, 1.0)
    for state in random_states(rng, 100):
        inp = InputPair(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert slip_dynamics(state, inp, slip) == polar_dynamics(state, inp)


def test_slip_dynamics_scales_channels(rng):
    slip = SlipParams(0.5, 2.0)
    assert slip_dynamics(PolarState(1, 0, 0), InputPair(1, 0), slip).rho_dot == -0.5
    for state in random_states(rng, 100):
        inp = InputPair(rng.uniform(-2, 2), rng.uniform(-2, 2))
        direct = slip_dynamics(state, inp, slip)
        scaled = polar_dynamics(state, InputPair(slip.b1 * inp.v, slip.b2 * inp.omega))
        assert direct == pytest.approx(tuple(scaled), rel=1e-15)


def test_slip_validation():
    with pytest.raises(ValueError):
        SlipParams(0.0, 1.0)


def test_adaptive_control_matches_quadratic_damping(rng):
    spec = demo_spec()
    ioc = IocControllerSpec(spec.clf_kind, spec.gains,
                            CostFunction(CostKind.QUADRATIC), CostFunction(CostKind.QUADRATIC),
                            ConstantEpsilon(1.0), ConstantEpsilon(1.0))
    unity = AdaptiveState(1.0, 1.0)
    for state in random_states(rng, 200):
        a = adaptive_control(spec, unity, state)
        b = ioc_control(ioc, state)
        assert a.v == pytest.approx(b.v, rel=1e-12, abs=1e-12)
        assert a.omega == pytest.approx(b.omega, rel=1e-12, abs=1e-12)
    assert adaptive_control(spec, AdaptiveState(0.0, 0.0), DEMO_IC) == (0.0, 0.0)


def test_update_law_frozen_value():
    # frozen symbolic evaluation at the demo start, mu = 0.5, n0 = 1
    d1, d2 = update_law(demo_spec(0.5), DEMO_IC)
    assert d1 == pytest.approx(9.505929135403296, rel=1e-12)
    assert d2 == pytest.approx(6.6162313706998, rel=1e-12)


def test_update_law_nonnegative(rng):
    spec = demo_spec()
    for state in random_states(rng, 2000):
        d1, d2 = update_law(spec, state)
        assert d1 >= 0.0 and d2 >= 0.0
    near_origin = update_law(spec, PolarState(1e-9, 1e-12, 1e-12))
    assert max(near_origin) < 1e-12


def test_closed_loop_certificates(rng):
    """V_a nonincreasing and the estimates nondecreasing along rollouts."""
    spec = demo_spec(0.7)
    slip = SlipParams(0.8, 1.3)
    scenario = Scenario(controller=spec, initial=DEMO_IC, dt=0.01, horizon=40.0,
                        slip=slip, adaptive_init=AdaptiveState(0.0, 0.0))
    traj = integrate(scenario)
    assert (np.diff(traj.estimates, axis=0) >= -1e-15).all()
    va = np.array([adaptive_lyapunov(spec, slip, PolarState(*traj.states[i]),
                                     AdaptiveState(*traj.estimates[i]))
                   for i in range(len(traj.times))])
    assert (np.diff(va) <= 1e-6 * 0.01).all()


def test_wrong_sign_initial_estimates(rng):
    """Estimates starting negative (initially destabilizing) still converge."""
    spec = demo_spec(1.0)
    for _ in range(10):
        ic = PolarState(rng.uniform(0.3, 1.5), rng.uniform(-2.0, 2.0),
                        rng.uniform(-2.0, 2.0))
        scenario = Scenario(controller=spec, initial=ic, dt=0.01, horizon=80.0,
                            adaptive_init=AdaptiveState(-0.5, -0.5))
        traj = integrate(scenario)
        assert traj.norms[-1] < 0.2 * traj.norms[0]
        assert (np.diff(traj.estimates, axis=0) >= -1e-15).all()


def test_quadratic_sandwich_bounds(rng):
    low, up = quadratic_sandwich(ClfKind.BIDIR_BACKSTEP, DEMO_GAINS)
    assert 0.0 < low < up
    for state in random_states(rng, 5000):
        value = clf_value(ClfKind.BIDIR_BACKSTEP, DEMO_GAINS, state)
        norm2 = state.rho ** 2 + state.delta ** 2 + state.gamma ** 2
        assert low * norm2 <= value * (1 + 1e-12)
        assert value <= up * norm2 * (1 + 1e-12)


def test_upsilon_bound_properties():
    spec = demo_spec(0.5)
    slip = SlipParams(1.0, 1.0)
    at_origin = upsilon_bound(spec, slip, PolarState(0.0, 0.0, 0.0), AdaptiveState(1.0, 1.0))
    assert at_origin == 0.0
    values = [upsilon_bound(spec, slip, PolarState(s, 0.3 * s, -0.2 * s),
                            AdaptiveState(1.0 - s, 1.0 - s)) for s in (0.05, 0.1, 0.2)]
    assert values[0] <= values[1] <= values[2]


def test_upsilon_bound_holds_along_demo_rollout():
    spec = demo_spec(0.5)
    slip = SlipParams(1.0, 1.0)
    bound = upsilon_bound(spec, slip, DEMO_IC, AdaptiveState(0.0, 0.0))
    scenario = Scenario(controller=spec, initial=DEMO_IC, dt=0.02, horizon=50.0)
    traj = integrate(scenario)
    errs = np.hypot(1.0 / slip.b1 - traj.estimates[:, 0],
                    1.0 / slip.b2 - traj.estimates[:, 1])
    upsilon = traj.norms + errs
    assert (upsilon <= bound).all()


def test_upsilon_bound_rejects_unbounded_kinds():
    from unipark import DomainViolation
    spec = AdaptiveSpec(ClfKind.COMPOSITE_GLOBA, ClfGains(6.5, 3.0, 7.0), 1.0, 1.0)
    with pytest.raises(DomainViolation):
        upsilon_bound(spec, SlipParams(), DEMO_IC, AdaptiveState(0.0, 0.0))
