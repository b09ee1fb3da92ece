"""Parking on a deadline: prescribed-time vs fixed-time rescaling.

Both wrappers drive the same reversing start to the target within T = 2
seconds: one by a time-varying blow-up factor that is exact at the
deadline, the other by a state-dependent factor with an a-priori settling
bound. Prints where each run actually settles.

    python demos/04_deadline_parking.py [--plot]
"""

import math
import sys

import numpy as np

from unipark import (ClfGains, FxtSpec, PolarState, PtSpec, Scenario, integrate,
                     settling_time_bound)
from unipark.backstepping import Direction, GesControllerSpec

START = PolarState(1.0, -4 * math.pi / 5, math.pi)


def main():
    pt = PtSpec(GesControllerSpec(Direction.BIDIRECTIONAL,
                                  ClfGains(1.0, 2.2, 2.5, 0.5)), T=2.0)
    traj_pt = integrate(Scenario(controller=pt, initial=START, dt=1e-3, horizon=2.0))
    settle_pt = traj_pt.times[traj_pt.park_index]
    print(f"prescribed-time: settled at {settle_pt:.3f}s (deadline 2.0), "
          f"max|v|={np.abs(traj_pt.inputs[:, 0]).max():.1f}, "
          f"terminal |state|={traj_pt.norms[-1]:.1e}")

    fxt = FxtSpec(GesControllerSpec(Direction.BIDIRECTIONAL,
                                    ClfGains(3.0, 0.8, 0.5, 1.0)), T=2.0, p=0.3)
    traj_fxt = integrate(Scenario(controller=fxt, initial=START, dt=1e-3, horizon=3.0))
    settle_fxt = traj_fxt.times[traj_fxt.park_index]
    print(f"fixed-time:      settled at {settle_fxt:.3f}s "
          f"(bound {settling_time_bound(fxt, START):.3f} <= 2.0), "
          f"max|v|={np.abs(traj_fxt.inputs[:, 0]).max():.1f}")

    if "--plot" in sys.argv:
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        for label, traj in (("prescribed-time", traj_pt), ("fixed-time", traj_fxt)):
            axes[0].semilogy(traj.times, np.maximum(traj.norms, 1e-9), label=label)
            axes[1].plot(traj.times, np.abs(traj.inputs).sum(axis=1), label=label)
        axes[0].set_ylabel("|state|")
        axes[1].set_ylabel("|v| + |omega|")
        axes[1].set_xlabel("t")
        axes[0].axvline(2.0, color="k", linestyle=":")
        axes[0].legend()
        fig.tight_layout()
        fig.savefig("demo04_deadline.png", dpi=120)
        print("wrote demo04_deadline.png")


if __name__ == "__main__":
    main()
