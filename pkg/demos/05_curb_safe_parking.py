"""Parking against a curb: the overshoot-free strictly forward law.

The target sits on the curb line y = 0 and the vehicle starts below it.
The steering gain is picked from the admissible interval for each start,
which guarantees the vehicle never crosses the curb and never rolls
backwards. A reversing law from the same starts is shown violating the
curb for contrast.

    python demos/05_curb_safe_parking.py [--plot]
"""

import math
import sys

from unipark import (ClfGains, PolarState, Scenario, UNITY_GAINS, integrate,
                     k2_admissible_interval, k2_midpoint)
from unipark.backstepping import Direction, GesControllerSpec
from unipark.safety import SafetySpec

STARTS = [(0.5, -0.3), (1.5, 0.2), (2.6, 0.0), (3.0, -0.6)]


def main():
    runs = {}
    for delta0, gamma0 in STARTS:
        k2 = k2_midpoint(delta0, gamma0)
        lo, hi = k2_admissible_interval(delta0, gamma0)
        spec = SafetySpec(ClfGains(1.0, k2, 1.0, 1.0))
        scenario = Scenario(controller=spec, initial=PolarState(1.0, delta0, gamma0),
                            dt=1e-3, horizon=40.0)
        traj = integrate(scenario)
        runs[(delta0, gamma0)] = traj
        hi_text = f"{hi:.3g}" if math.isfinite(hi) else "inf"
        print(f"start (delta0={delta0:.2f}, gamma0={gamma0:+.2f}): "
              f"k2={k2:8.3f} from ({lo:.3g}, {hi_text}), "
              f"max y = {traj.poses[:, 1].max():+.1e} (curb at 0), "
              f"min v = {traj.inputs[:traj.live_end, 0].min():+.1e}")

    reversing = integrate(Scenario(
        controller=GesControllerSpec(Direction.BIDIRECTIONAL, UNITY_GAINS),
        initial=PolarState(1.0, 0.5, -2.5), dt=1e-3, horizon=20.0))
    print(f"reversing law, below-curb start heading away: max y = "
          f"{reversing.poses[:, 1].max():+.1e}  <- crosses the curb")

    if "--plot" in sys.argv:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 5))
        for (d0, g0), traj in runs.items():
            ax.plot(traj.poses[:, 0], traj.poses[:, 1],
                    label=f"d0={d0:.1f}, g0={g0:+.1f}")
        ax.plot(reversing.poses[:, 0], reversing.poses[:, 1], "k--",
                label="reversing (unsafe)")
        ax.axhline(0.0, color="r", linewidth=1)
        ax.plot(0, 0, "k*", markersize=12)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig("demo05_curb.png", dpi=120)
        print("wrote demo05_curb.png")


if __name__ == "__main__":
    main()
