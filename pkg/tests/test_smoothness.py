import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccdlab.blocks import BlockPartition, DiagonalMetric
from ccdlab.problems import QuadraticFiniteSum, generate_classification
from ccdlab.regularizers import Zero
from ccdlab.smoothness import (
    MODE_PL,
    SmoothnessProfile,
    SpectralNormError,
    admissible_eta,
    backtrack_lambda,
    finite_sum_schedule,
    masked_smoothness_constants,
    pl_iterations,
    rate_iterations,
    spectral_norm,
    step_size,
    streaming_schedule,
)


def test_spectral_norm_examples():
    assert spectral_norm(np.diag([2.0, 1.0])) == pytest.approx(2.0, rel=1e-10)
    assert spectral_norm(np.zeros((3, 3))) == 0.0
    rng = np.random.default_rng(8)
    g = rng.standard_normal((6, 6))
    mat = g @ g.T
    oracle = float(np.linalg.eigvalsh(mat)[-1])
    assert spectral_norm(mat) == pytest.approx(oracle, rel=1e-8)
    with pytest.raises(ValueError):
        spectral_norm(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spectral_norm_iteration_cap_carries_estimate():
    # two nearly tied eigenvalues force slow convergence
    mat = np.diag([1.0, 1.0 - 1e-12])
    with pytest.raises(SpectralNormError) as err:
        spectral_norm(mat, tol=0.0, max_iter=3)
    assert err.value.estimate == pytest.approx(1.0, rel=1e-6)


def test_masked_constants_singleton_ladder():
    # identical scalar coupling on every singleton block: the trailing sum is
    # a staircase with top weight m, the leading sum tops out at m - 1
    m, L = 5, 3.0
    part = BlockPartition((1,) * m)
    metric = DiagonalMetric(np.full(m, L), part)
    q_list = [L * np.eye(m) for _ in range(m)]
    lt, ll = masked_smoothness_constants(q_list, metric, part)
    assert lt == pytest.approx(m, rel=1e-9)
    assert ll == pytest.approx(m - 1, rel=1e-9)


def test_masked_constants_edge_cases():
    part = BlockPartition((4,))
    metric = DiagonalMetric.identity(part)
    lt, ll = masked_smoothness_constants([np.eye(4)], metric, part)
    assert ll == 0.0 and lt == pytest.approx(1.0)
    lt0, ll0 = masked_smoothness_constants([np.zeros((4, 4))], metric, part)
    assert (lt0, ll0) == (0.0, 0.0)


def test_admissible_eta_root():
    eta = admissible_eta(2.0)
    assert eta == pytest.approx(0.5, rel=1e-15)
    assert 2.0 * eta**2 + eta - 1.0 <= 0.0
    assert admissible_eta(0.0) == 1.0


@given(st.floats(0.0, 1e8))
@settings(max_examples=200, deadline=None)
def test_admissible_eta_inequality_holds_in_floats(c0):
    eta = admissible_eta(c0)
    assert 0.0 < eta <= 1.0
    assert c0 * eta * eta + eta - 1.0 <= 0.0


def _profile(lt, ll, dim=4):
    part = BlockPartition((dim,))
    return SmoothnessProfile.from_constants(DiagonalMetric.identity(part), lt, ll)


def test_step_size_finite_sum_schedule_coefficient():
    # b = n, b' = sqrt(n), p = b'/(b+b'): the curvature coefficient collapses
    # to 3*trailing + 2*leading
    lt, ll = 1.7, 0.4
    profile = _profile(lt, ll)
    n = 16
    b, b_prime, p = finite_sum_schedule(n)
    assert (b, b_prime) == (16, 4)
    plan = step_size(profile, p, b, b_prime, n)
    assert plan.c0 == pytest.approx(3 * lt + 2 * ll, rel=1e-12)
    assert plan.eta == pytest.approx(admissible_eta(plan.c0), rel=1e-15)


def test_step_size_pl_mode():
    profile = _profile(2.0, 1.0)
    plan = step_size(profile, p=0.25, b=8, b_prime=2, n=16, mode=MODE_PL, mu=0.5)
    cap = 0.25 / (0.5 * 0.75)
    assert plan.eta <= min(cap, admissible_eta(plan.c0)) * (1 + 1e-15)
    # p = 1 removes the cap
    plan1 = step_size(profile, p=1.0, b=16, b_prime=16, n=16, mode=MODE_PL, mu=0.5)
    assert plan1.eta == pytest.approx(admissible_eta(plan1.c0), rel=1e-15)
    with pytest.raises(ValueError):
        step_size(profile, p=0.5, b=8, b_prime=2, n=16, mode=MODE_PL)


def test_step_size_validation():
    profile = _profile(1.0, 0.5)
    with pytest.raises(ValueError):
        step_size(profile, p=0.0, b=4, b_prime=2, n=8)
    with pytest.raises(ValueError):
        step_size(profile, p=0.5, b=2, b_prime=4, n=8)
    with pytest.raises(ValueError):
        step_size(profile, p=0.5, b=9, b_prime=2, n=8)
    # streaming limit replaces the variance factor by 1/b
    plan = step_size(profile, p=0.5, b=4, b_prime=2, n=math.inf)
    mix = 0.5 * 0.25 + 0.5 / 2
    want = 2 * 0.5 * 1.0 / (0.5 * 2) + 1.0 + 2 * mix * 0.5 / 0.5
    assert plan.c0 == pytest.approx(want, rel=1e-12)


def test_schedules_and_iteration_counts():
    assert finite_sum_schedule(16) == (16, 4, pytest.approx(0.2))
    b, bp, p = streaming_schedule(sigma_sq=3.0, epsilon=0.5, n=None)
    assert b == math.ceil(12 * 3.0 / 0.25)
    assert bp == max(1, round(math.sqrt(b)))
    b_capped, _, _ = streaming_schedule(sigma_sq=100.0, epsilon=0.1, n=64)
    assert b_capped == 64
    assert rate_iterations(delta0=2.0, epsilon=0.5, eta=0.4) == math.ceil(8.0 / 0.1)
    assert pl_iterations(delta0=8.0, epsilon=1.0, eta=0.5, mu=0.25) == math.ceil(
        (1 + 2 / 0.125) * math.log(8.0)
    )
    assert pl_iterations(delta0=0.5, epsilon=1.0, eta=0.5, mu=0.25) == 1


def _scalar_quadratic(curvature, d=4):
    part = BlockPartition((d,))
    quad = (curvature * np.eye(d))[None, :, :]
    return QuadraticFiniteSum(quad, np.zeros((1, d)), np.zeros(1), part)


def test_backtracking_brackets_quadratic_curvature():
    prob = _scalar_quadratic(5.0)
    x = np.ones(4)
    scale = backtrack_lambda(prob, 0, x, init=1.0, growth=2.0)
    assert 5.0 <= scale < 10.0
    # doubling the curvature at least doubles the accepted multiplier
    scale2 = backtrack_lambda(_scalar_quadratic(10.0), 0, x, init=1.0, growth=2.0)
    assert scale2 >= 2 * scale / 2  # same bracket shifted one growth step up
    assert scale2 >= scale


def test_backtracking_linear_and_idempotent():
    part = BlockPartition((3,))
    lin_prob = QuadraticFiniteSum(
        np.zeros((1, 3, 3)), np.array([[1.0, -2.0, 0.5]]), np.zeros(1), part
    )
    assert backtrack_lambda(lin_prob, 0, np.zeros(3), init=1.0) == 1.0
    sig = generate_classification(83, n=8, d=6, partition=BlockPartition.even(6, 2))
    x = np.random.default_rng(6).standard_normal(6)
    first = backtrack_lambda(sig, 1, x, init=1.0, reg=Zero())
    second = backtrack_lambda(sig, 1, x, init=1.0, reg=Zero())
    assert first == second


def test_backtracking_probes_at_stationary_point():
    prob = _scalar_quadratic(4.0)
    # gradient vanishes at the origin; probe directions still reveal curvature
    scale = backtrack_lambda(
        prob, 0, np.zeros(4), direction_probe_count=3, rng=np.random.default_rng(0)
    )
    assert 4.0 <= scale < 8.0
    with pytest.raises(ValueError):
        backtrack_lambda(prob, 0, np.zeros(4), growth=1.0)


def test_backtracking_growth_cap_reports_nonsmooth():
    prob = _scalar_quadratic(64.0)
    with pytest.raises(RuntimeError, match="non-smooth"):
        backtrack_lambda(prob, 0, np.ones(4), init=1.0, max_growths=2)
