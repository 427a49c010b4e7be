import sys
import pathlib
import math
import numpy as np
import pytest

parent_dir = pathlib.Path(__file__).resolve().parent.parent.parent
sys.path.append(str(parent_dir))


from dsiml._src.varbound import pi, jj_bound, jj_offset
from dsiml._src.objective import softplus


@pytest.fixture
def setup_data():
    rng = np.random.default_rng(0)
    return rng.uniform(-50, 50, size=(2, 100_000))


def test_pi_limit_and_values():
    assert pi(0.0) == 0.125
    assert pi(5e-7) == pytest.approx(0.125, abs=1e-7)
    sigma = 1.0 / (1.0 + math.exp(-2.0))
    assert pi(2.0) == pytest.approx((sigma - 0.5) / 4, rel=1e-12)
    # series and closed form agree around the cutoff
    assert pi(1.0001e-4) == pytest.approx(pi(0.9999e-4), rel=1e-9)


def test_pi_even_positive_decreasing(setup_data):
    xi = setup_data[0]
    np.testing.assert_allclose(pi(xi), pi(-xi), rtol=1e-15)
    assert np.all(pi(xi) > 0)
    grid = np.linspace(0.0, 60.0, 10_001)
    assert np.all(np.diff(pi(grid)) < 0)


def test_majorization_and_tightness(setup_data):
    t, xi = setup_data
    gap = jj_bound(t, xi) - softplus(t)
    assert gap.min() >= -1e-9
    assert np.max(np.abs(jj_bound(t, t) - softplus(t))) <= 1e-9
    assert np.max(np.abs(jj_bound(t, -t) - softplus(t))) <= 1e-9
    assert jj_bound(0.0, 1.0) - math.log(2) >= 0


def test_offset_decomposition():
    rng = np.random.default_rng(1)
    t, xi = rng.normal(scale=5, size=(2, 1000))
    np.testing.assert_allclose(
        jj_bound(t, xi), pi(xi) * t * t + t / 2 + jj_offset(xi), rtol=1e-10, atol=1e-10
    )
