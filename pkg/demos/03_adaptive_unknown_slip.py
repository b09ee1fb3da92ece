"""Adaptive parking when the actuator coefficients are unknown.

The wheels deliver only a fraction of the commanded speeds; the gain
estimates start at zero (no initial control authority at all) and grow
from the observed transients. Compare against the fixed-gain damping law
that assumes perfect actuation.

    python demos/03_adaptive_unknown_slip.py [--plot]
"""

import math
import sys

import numpy as np

from unipark import (AdaptiveSpec, AdaptiveState, ClfGains, ClfKind, ConstantEpsilon,
                     CostFunction, CostKind, IocControllerSpec, PolarState, Scenario,
                     SlipParams, integrate)

GAINS = ClfGains(4.0, 3.5, 1.0, 1.0)
START = PolarState(1.0, -math.pi / 2, -math.pi / 2)
SLIP = SlipParams(0.7, 0.8)   # the plant only delivers 70% / 80% of the commands


def main():
    runs = {}
    for mu in (0.5, 1.0):
        spec = AdaptiveSpec(ClfKind.BIDIR_BACKSTEP, GAINS, mu1=mu, mu2=mu)
        scenario = Scenario(controller=spec, initial=START, dt=0.02, horizon=60.0,
                            slip=SLIP, adaptive_init=AdaptiveState(0.0, 0.0))
        traj = integrate(scenario)
        runs[f"adaptive mu={mu}"] = traj
        print(f"adaptive mu={mu}: final |state|={traj.norms[-1]:.3e} "
              f"estimates -> ({traj.estimates[-1, 0]:.2f}, {traj.estimates[-1, 1]:.2f}) "
              f"peak |v|={np.abs(traj.inputs[:, 0]).max():.2f}")

    fixed = IocControllerSpec(ClfKind.BIDIR_BACKSTEP, GAINS,
                              CostFunction(CostKind.QUADRATIC),
                              CostFunction(CostKind.QUADRATIC),
                              ConstantEpsilon(1.0), ConstantEpsilon(1.0))
    traj = integrate(Scenario(controller=fixed, initial=START, dt=0.02, horizon=60.0,
                              slip=SLIP))
    runs["fixed gain"] = traj
    print(f"fixed gain:      final |state|={traj.norms[-1]:.3e} "
          f"peak |v|={np.abs(traj.inputs[:, 0]).max():.2f}")

    if "--plot" in sys.argv:
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        for label, traj in runs.items():
            axes[0].semilogy(traj.times, np.maximum(traj.norms, 1e-12), label=label)
            axes[1].plot(traj.times, traj.inputs[:, 0], label=label)
        axes[0].set_ylabel("|state|")
        axes[1].set_ylabel("v")
        axes[1].set_xlabel("t")
        axes[0].legend()
        fig.tight_layout()
        fig.savefig("demo03_adaptive.png", dpi=120)
        print("wrote demo03_adaptive.png")


if __name__ == "__main__":
    main()
