import numpy as np
import pytest

from deadzones.angles import TWO_PI, wrap
from deadzones.coupling import CircleArc, CouplingFunction, make_bump_profile


def random_coupling(rng: np.random.Generator, max_zones: int = 3,
                    include_zero: bool | None = None) -> CouplingFunction:
    """Seeded piecewise coupling with 1..max_zones live zones, nonzero slopes.

    include_zero forces the point 0 into a live zone (True) or a dead zone
    (False); None leaves it to chance.
    """
    for _ in range(200):
        k = int(rng.integers(1, max_zones + 1))
        starts = np.sort(rng.uniform(0.0, TWO_PI, k))
        profiles = []
        ok = True
        for i in range(k):
            gap = wrap(starts[(i + 1) % k] - starts[i]) if k > 1 else TWO_PI
            if gap < 0.05:
                ok = False
                break
            width = float(gap * rng.uniform(0.3, 0.8))
            support = CircleArc(float(starts[i]), width)
            center = wrap(support.start + width / 2.0)
            slope = float(rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0]))
            value = float(rng.uniform(-0.5, 0.5))
            profiles.append(make_bump_profile(center, support, value, slope))
        if not ok:
            continue
        g = CouplingFunction.piecewise(profiles)
        if include_zero is None or g.in_live_zone(0.0) == include_zero:
            return g
    raise AssertionError("random coupling generation exhausted")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
