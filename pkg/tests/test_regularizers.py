import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccdlab.blocks import BlockPartition
from ccdlab.regularizers import L1, Box, Zero, metric_prox, total_value


def test_zero_prox_is_gradient_step():
    g = np.array([1.0, -2.0, 0.5])
    out = metric_prox(Zero(), 0, np.zeros(3), g, 1.0, np.ones(3))
    assert np.array_equal(out, -g)


def test_l1_dead_zone():
    # the tentative step lands at 0.5, inside the threshold: coordinate dies
    out = metric_prox(L1(1.0), 0, np.zeros(1), np.array([-0.5]), 1.0, np.ones(1))
    assert out[0] == 0.0


def test_l1_scalar_example():
    # minimize -4 x + |x| + x^2 (metric weight 2, eta 1): stationarity gives 1.5
    out = metric_prox(L1(1.0), 0, np.zeros(1), np.array([-4.0]), 1.0, np.array([2.0]))
    assert out[0] == pytest.approx(1.5, abs=1e-15)
    grid = np.linspace(-1, 4, 500001)
    vals = -4.0 * grid + np.abs(grid) + grid**2
    assert abs(grid[np.argmin(vals)] - 1.5) < 1e-5


def test_box_prox_clips():
    out = metric_prox(Box(-1.0, 1.0), 0, np.zeros(2), np.array([5.0, -5.0]), 1.0, np.ones(2))
    assert np.array_equal(out, [-1.0, 1.0])


def test_prox_validation():
    with pytest.raises(ValueError):
        metric_prox(Zero(), 0, np.zeros(2), np.zeros(2), 0.0, np.ones(2))
    with pytest.raises(ValueError):
        metric_prox(Zero(), 0, np.zeros(2), np.zeros(2), 1.0, np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        Box(1.0, 1.0)
    with pytest.raises(ValueError):
        L1(-0.5)


def test_extended_values():
    part = BlockPartition((2, 1))
    x = np.array([0.5, 3.0, 0.0])
    assert total_value(Box(-1.0, 1.0), x, part) == np.inf
    assert total_value(Box(-4.0, 4.0), x, part) == 0.0
    assert total_value(L1(2.0), x, part) == pytest.approx(7.0)


@given(
    st.integers(0, 2**31 - 1),
    st.sampled_from(["zero", "l1", "box"]),
)
@settings(max_examples=100, deadline=None)
def test_prox_first_order_optimality(seed, kind):
    """The prox output satisfies the subdifferential inclusion exactly:
    (lam/eta)(center - z) - linear is a subgradient of r at z."""
    rng = np.random.default_rng(seed)
    dj = int(rng.integers(1, 5))
    center = rng.uniform(-3, 3, dj)
    linear = rng.uniform(-3, 3, dj)
    eta = float(rng.uniform(0.1, 2.0))
    lam = rng.uniform(0.2, 4.0, dj)
    if kind == "zero":
        reg = Zero()
    elif kind == "l1":
        reg = L1(float(rng.uniform(0.05, 2.0)))
    else:
        reg = Box(-1.0, 1.5)
    z = metric_prox(reg, 0, center, linear, eta, lam)
    resid = lam * (center - z) / eta - linear
    tol = 1e-10
    if kind == "zero":
        assert np.all(np.abs(resid) <= tol)
    elif kind == "l1":
        for zi, ri in zip(z, resid):
            if zi != 0.0:
                assert ri == pytest.approx(reg.weight * np.sign(zi), abs=1e-10)
            else:
                assert abs(ri) <= reg.weight + tol
    else:
        for zi, ri in zip(z, resid):
            if reg.lo < zi < reg.hi:
                assert abs(ri) <= tol
            elif zi == reg.lo:
                assert ri <= tol  # normal cone at the lower face
            else:
                assert zi == reg.hi and ri >= -tol
