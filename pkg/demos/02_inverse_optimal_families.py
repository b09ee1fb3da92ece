"""The four cost-shaped feedback families and the J = V(start) certificate.

Compares control effort across the quadratic, sublinear, bounded-arctan,
and relay-approximating laws from the same start, then accumulates the
quadratic law's cost integral and checks it against the certificate value.

    python demos/02_inverse_optimal_families.py [--plot]
"""

import sys

import numpy as np

from unipark import (ClfGains, ClfKind, ConstantEpsilon, CostFunction, CostKind,
                     IocControllerSpec, PolarState, Scenario, evaluate_cost_J,
                     integrate, saturation_schedules)

GAINS = ClfGains(6.5, 3.0, 7.0)
START = PolarState(1.0, -2.0, 2.0)


def spec_for(kind, bounded_at=None):
    cost = CostFunction(kind)
    if bounded_at is None:
        eps1 = eps2 = ConstantEpsilon(1.0)
    else:
        eps1, eps2 = saturation_schedules(kind, bounded_at, bounded_at, 0.3)
    return IocControllerSpec(ClfKind.COMPOSITE_GLOBA, GAINS, cost, cost, eps1, eps2)


def main():
    runs = {}
    for label, kind, bound in (
            ("quadratic", CostKind.QUADRATIC, None),
            ("sublinear", CostKind.COSH, None),
            ("bounded-arctan", CostKind.LNCOS, 1.0),
            ("relay-like", CostKind.RELAY_APPROX, 1.0)):
        spec = spec_for(kind, bound)
        scenario = Scenario(controller=spec, initial=START, dt=2e-3, horizon=30.0)
        traj = integrate(scenario)
        runs[label] = traj
        print(f"{label:>15}: max|v|={np.abs(traj.inputs[:, 0]).max():7.3f} "
              f"max|omega|={np.abs(traj.inputs[:, 1]).max():7.3f} "
              f"V(end)/V(0)={traj.v_values[-1] / traj.v_values[0]:.2e}")

    quad = spec_for(CostKind.QUADRATIC)
    traj = integrate(Scenario(controller=quad, initial=START, dt=1e-3, horizon=30.0))
    j_value = evaluate_cost_J(traj, quad)
    print(f"\ncost certificate: J = {j_value:.5f} vs V(start) = {traj.v_values[0]:.5f} "
          f"(relative gap {abs(j_value - traj.v_values[0]) / traj.v_values[0]:.2e})")

    if "--plot" in sys.argv:
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        for label, traj in runs.items():
            axes[0].plot(traj.times, traj.inputs[:, 0], label=label)
            axes[1].plot(traj.times, traj.inputs[:, 1], label=label)
        axes[0].set_ylabel("v")
        axes[1].set_ylabel("omega")
        axes[1].set_xlabel("t")
        axes[0].legend()
        fig.tight_layout()
        fig.savefig("demo02_cost_families.png", dpi=120)
        print("wrote demo02_cost_families.png")


if __name__ == "__main__":
    main()
