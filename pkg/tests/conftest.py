import math

import numpy as np
import pytest

from unipark import ClfKind, PolarState


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_states(rng, n, kind=None, rho_max=3.0, angle_max=3.0):
    """States inside the CLF domain; barrier kinds stay off the delta edge."""
    barrier = kind in (ClfKind.UNIDIR_BARFLI, ClfKind.BARFLI_SAFETY)
    delta_max = math.pi - 0.15 if barrier else angle_max
    out = []
    for _ in range(n):
        out.append(PolarState(rng.uniform(1e-3, rho_max),
                              rng.uniform(-delta_max, delta_max),
                              rng.uniform(-angle_max, angle_max)))
    return out
