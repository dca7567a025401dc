"""Built-in verification suites, one per acceptance criterion.

Each suite builds its own seeded instances, runs the relevant optimizer(s),
evaluates the bound checks at their stated tolerances, and returns a
SuiteResult with one human-readable line per sub-verdict. The CLI ``check``
subcommand and the acceptance test module both run these functions, so the
gate has a single implementation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import checks, problems, sampling, smoothness
from .algorithms import (
    FRESH_PER_BLOCK,
    PccdConfig,
    ProxGdConfig,
    SgdConfig,
    VrccdConfig,
    page_run,
    pccd_run,
    prox_gd_run,
    sgd_run,
    vrccd_run,
)
from .blocks import BlockPartition, DiagonalMetric
from .regularizers import L1, Box, Zero, metric_prox
from .sampling import RngBundle
from .smoothness import SmoothnessProfile, step_size


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list[str] = field(default_factory=list)
    elapsed_s: float = 0.0


def _quad_profile(prob):
    metric = problems.exact_quadratic_metric(prob)
    q_list = problems.exact_coupling_matrices(prob, metric)
    return metric, SmoothnessProfile.from_coupling_matrices(metric, q_list)


def _x0(prob, seed, reg=None):
    x0 = np.random.default_rng(seed ^ 0xA5A5).standard_normal(prob.dim)
    if isinstance(reg, Box):
        x0 = np.clip(x0, reg.lo, reg.hi)
    return x0


# --------------------------------------------------------------------------
# 1. without-replacement minibatch variance identity
# --------------------------------------------------------------------------


def suite_batch_variance_identity() -> SuiteResult:
    t0 = time.perf_counter()
    worst = 0.0
    comparisons = 0
    ok = True
    for idx in range(50):
        n = 4 + idx % 7
        m = 1 + idx % 3
        d = 6
        part = BlockPartition.even(d, m)
        if idx % 2 == 0:
            prob = problems.generate_quadratic(
                seed=900 + idx, n=n, d=d, partition=part, condition_number=4.0, convex=idx % 4 == 0
            )
            metric = problems.exact_quadratic_metric(prob)
        else:
            prob = problems.generate_classification(seed=900 + idx, n=n, d=d, partition=part)
            metric = problems.sigmoid_metric(prob)
        x = np.random.default_rng(7000 + idx).standard_normal(d)
        for b in range(1, n + 1):
            for j in range(m):
                lhs, rhs = sampling.subset_variance_identity(prob, metric, x, j, b)
                rep = checks.check_batch_variance_identity(lhs, rhs)
                comparisons += 1
                worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
                ok = ok and rep.passed
    elapsed = time.perf_counter() - t0
    lines = [
        f"instances=50 comparisons={comparisons} max_rel_err={worst:.3e} (tol 1e-10)",
    ]
    return SuiteResult("batch-variance-identity", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 2. cyclic per-cycle descent
# --------------------------------------------------------------------------


def suite_cyclic_descent() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    worst = math.inf
    kinds = ("convex", "boxed", "sigmoid")
    m_choices = (1, 2, 5, None)  # None means one block per coordinate
    d_choices = (8, 20, 50, 100)
    for idx in range(100):
        kind = kinds[idx % 3]
        d = d_choices[idx % 4]
        m_raw = m_choices[idx % 4]
        m = d if m_raw is None else min(m_raw, d)
        part = BlockPartition.even(d, m)
        seed = 2000 + idx
        if kind == "sigmoid":
            prob = problems.generate_classification(seed, n=16, d=d, partition=part)
            reg = Zero()
            cfg = PccdConfig(cycles=25, x0=_x0(prob, seed), backtracking=True)
        else:
            convex = kind == "convex"
            prob = problems.generate_quadratic(
                seed, n=6, d=d, partition=part, condition_number=6.0, convex=convex
            )
            reg = Zero() if convex else Box(-2.0, 2.0)
            metric = problems.exact_quadratic_metric(prob)
            cfg = PccdConfig(cycles=25, x0=_x0(prob, seed, reg), metric=metric)
        _, trace = pccd_run(prob, reg, cfg)
        rep = checks.check_cyclic_descent(trace)
        ok = ok and rep.passed
        worst = min(worst, rep.worst.slack)
    elapsed = time.perf_counter() - t0
    lines = [f"instances=100 cycles=25 each, min slack={worst:.3e} (tol 1e-9 rel)"]
    return SuiteResult("cyclic-descent", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 3. prefix stationarity rate for the cyclic method
# --------------------------------------------------------------------------


def suite_stationarity_rate() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    for idx in range(100):
        seed = 3000 + idx
        part = BlockPartition.even(16, 4)
        prob = problems.generate_quadratic(
            seed, n=4, d=16, partition=part, condition_number=3.0, convex=True
        )
        metric, profile = _quad_profile(prob)
        reg = L1(0.1)
        x0 = _x0(prob, seed)
        # machine-precision reference minimum for the regularized objective
        _, ref = pccd_run(
            prob, reg, PccdConfig(cycles=30_000, x0=x0, metric=metric, stop_step_sq=1e-28)
        )
        f_star = min(ref.obj)
        _, trace = pccd_run(prob, reg, PccdConfig(cycles=500, x0=x0, metric=metric))
        delta0 = trace.obj[0] - f_star
        rep = checks.check_min_stationarity_rate(trace, profile.lip_trailing, delta0)
        rep2 = checks.check_grad_vs_step(trace, profile.lip_trailing)
        rep3 = checks.check_step_telescope(trace, delta0)
        ok = ok and rep.passed and rep2.passed and rep3.passed
    elapsed = time.perf_counter() - t0
    lines = ["instances=100, prefixes K=1..500 plus per-cycle gradient/telescope bounds"]
    return SuiteResult("stationarity-rate", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 4. linear rate under gradient dominance (deterministic method)
# --------------------------------------------------------------------------


def suite_pl_linear_rate() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    for idx in range(100):
        seed = 4000 + idx
        part = BlockPartition.even(16, 4)
        prob = problems.generate_quadratic(
            seed, n=6, d=16, partition=part, condition_number=10.0, convex=True
        )
        metric, profile = _quad_profile(prob)
        mu = problems.pl_constant(prob, metric)
        x0 = _x0(prob, seed)
        _, trace = pccd_run(prob, Zero(), PccdConfig(cycles=60, x0=x0, metric=metric))
        gaps = np.array([v - prob.f_star for v in trace.obj])
        rep = checks.check_pl_envelope(gaps, profile.lip_trailing, mu)
        ok = ok and rep.passed

    # one-cycle exact solve: identity curvature, one block per coordinate
    d = 24
    part = BlockPartition.even(d, d)
    quad = np.broadcast_to(np.eye(d), (4, d, d)).copy()
    lin = np.random.default_rng(41).standard_normal((4, d))
    prob = problems.QuadraticFiniteSum(quad, lin, np.zeros(4), part, identical_components=True)
    metric = DiagonalMetric.identity(part)
    x_out, _ = pccd_run(prob, Zero(), PccdConfig(cycles=1, x0=_x0(prob, 41), metric=metric))
    one_cycle_gap = prob.gap(x_out)
    ok = ok and one_cycle_gap <= 1e-20
    elapsed = time.perf_counter() - t0
    lines = [
        "instances=100, geometric envelope at every cycle (K=60)",
        f"one-cycle exact solve gap={one_cycle_gap:.3e} (tol 1e-20)",
    ]
    return SuiteResult("pl-linear-rate", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 5. pathwise descent + gradient bounds for the variance-reduced cycle
# --------------------------------------------------------------------------


def suite_vr_pathwise() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    worst = math.inf
    for idx in range(50):
        seed = 5000 + idx
        part = BlockPartition.even(16, 4)
        convex = idx % 2 == 0
        prob = problems.generate_quadratic(
            seed, n=32, d=16, partition=part, condition_number=5.0, convex=convex
        )
        reg = L1(0.05) if convex else Box(-2.0, 2.0)
        metric, profile = _quad_profile(prob)
        plan = step_size(profile, p=0.3, b=16, b_prime=4, n=prob.n)
        cfg = VrccdConfig(
            cycles=200,
            eta=plan.eta,
            p=0.3,
            b=16,
            b_prime=4,
            x0=_x0(prob, seed, reg),
            metric=metric,
            sample_sharing=FRESH_PER_BLOCK,
            record_u=True,
        )
        _, trace = vrccd_run(prob, reg, cfg, RngBundle.from_seed(seed))
        rep_descent = checks.check_vr_descent(trace, plan.eta)
        rep_grad = checks.check_vr_grad_vs_step(trace, profile.lip_trailing)
        ok = ok and rep_descent.passed and rep_grad.passed
        worst = min(worst, rep_descent.worst.slack, rep_grad.worst.slack)
    elapsed = time.perf_counter() - t0
    lines = [f"instances=50 x 200 cycles, both pathwise bounds, min slack={worst:.3e}"]
    return SuiteResult("vr-pathwise", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 6. stationarity rate of the variance-reduced method (full-batch anchors)
# --------------------------------------------------------------------------


def suite_vr_rate() -> SuiteResult:
    t0 = time.perf_counter()
    part = BlockPartition.even(64, 4)
    prob = problems.generate_quadratic(
        6100, n=256, d=64, partition=part, condition_number=10.0, convex=True
    )
    metric, profile = _quad_profile(prob)
    b, b_prime, p = smoothness.finite_sum_schedule(prob.n)
    plan = step_size(profile, p=p, b=b, b_prime=b_prime, n=prob.n)
    x0 = _x0(prob, 6100)
    delta0 = prob.value(x0) - prob.f_star
    ok = True
    lines = []
    for cycles in (10, 100, 1000):
        traces = []
        for s in range(100):
            cfg = VrccdConfig(
                cycles=cycles,
                eta=plan.eta,
                p=p,
                b=b,
                b_prime=b_prime,
                x0=x0,
                metric=metric,
            )
            _, trace = vrccd_run(prob, Zero(), cfg, RngBundle.from_seed(61_000 + s))
            traces.append(trace)
        rep = checks.check_vr_rate(
            traces, plan.eta, p, b, b_prime, prob.n, sigma_sq=0.0, delta0=delta0
        )
        ok = ok and rep.passed
        row = rep.rows[0]
        note = ""
        if cycles == 100:
            # the schedule's accuracy target: K = 4*delta0/(eps^2 eta) cycles
            # drive the mean below eps^2, which is exactly this bound value
            eps_sq = 4.0 * delta0 / (plan.eta * cycles)
            note = f" (meets target eps^2={eps_sq:.4g})"
        lines.append(
            f"K={cycles}: seed-mean={row.lhs:.4g} <= bound+CI={row.rhs:.4g}{note}"
        )
    elapsed = time.perf_counter() - t0
    lines.insert(0, f"n=256 d=64 schedule b={b} b'={b_prime} p={p:.4g} eta={plan.eta:.4g}, 100 seeds")
    return SuiteResult("vr-rate", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 7. potential-function descent
# --------------------------------------------------------------------------


def suite_vr_potential() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    lines = []

    # exact-anchor specialization: b = b' = n makes the noise term vanish and
    # the inequality must hold pathwise
    part = BlockPartition.even(12, 3)
    prob = problems.generate_quadratic(
        7100, n=24, d=12, partition=part, condition_number=5.0, convex=True
    )
    metric, profile = _quad_profile(prob)
    p = 0.4
    plan = step_size(profile, p=p, b=prob.n, b_prime=prob.n, n=prob.n)
    traces = []
    for s in range(5):
        cfg = VrccdConfig(
            cycles=100,
            eta=plan.eta,
            p=p,
            b=prob.n,
            b_prime=prob.n,
            x0=_x0(prob, 7100),
            metric=metric,
            record_u=True,
        )
        _, trace = vrccd_run(prob, L1(0.05), cfg, RngBundle.from_seed(71_000 + s))
        traces.append(trace)
        assert max(v for v in trace.est_err_sq if v is not None) <= 1e-20
    rep_path = checks.check_vr_potential(
        traces, plan.eta, p, prob.n, prob.n, prob.n, profile.lip_trailing, 0.0, pathwise=True
    )
    ok = ok and rep_path.passed
    lines.append(f"exact-anchor pathwise: 5 seeds x 100 cycles, worst slack={rep_path.worst.slack:.3e}")

    # generic parameters: seed-mean within the one-sided 99% allowance
    part = BlockPartition.even(16, 4)
    prob = problems.generate_quadratic(
        7200, n=64, d=16, partition=part, condition_number=8.0, convex=True,
        identical_curvature=True,
    )
    metric, profile = _quad_profile(prob)
    p, b, b_prime = 0.2, 32, 8
    plan = step_size(profile, p=p, b=b, b_prime=b_prime, n=prob.n)
    x0 = _x0(prob, 7200)
    sigma_sq = problems.estimate_sigma_sq(prob, metric, [x0])  # exact: shared curvature
    traces = []
    for s in range(200):
        cfg = VrccdConfig(
            cycles=120, eta=plan.eta, p=p, b=b, b_prime=b_prime, x0=x0, metric=metric,
            record_u=True,
        )
        _, trace = vrccd_run(prob, L1(0.05), cfg, RngBundle.from_seed(72_000 + s))
        traces.append(trace)
    rep_mc = checks.check_vr_potential(
        traces, plan.eta, p, b, b_prime, prob.n, profile.lip_trailing, sigma_sq
    )
    ok = ok and rep_mc.passed
    lines.append(
        f"generic (p={p}, b={b}, b'={b_prime}): 200 seeds x 120 cycles, "
        f"worst mean-vs-allowance slack={rep_mc.worst.slack:.3e}"
    )
    elapsed = time.perf_counter() - t0
    return SuiteResult("vr-potential", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 8. arithmetic-work accounting
# --------------------------------------------------------------------------


def suite_work_accounting() -> SuiteResult:
    t0 = time.perf_counter()
    part = BlockPartition.even(8, 4)
    prob = problems.generate_quadratic(
        8100, n=64, d=8, partition=part, condition_number=4.0, convex=True
    )
    metric, profile = _quad_profile(prob)
    reg = Box(-2.0, 2.0)
    b, b_prime = 64, 8
    ok = True
    lines = []

    for label, p, cycles, eta in (
        ("p=1 (exact)", 1.0, 2000, step_size(profile, 1.0, b, b_prime, prob.n).eta),
        ("p=0 (exact)", 0.0, 2000, 0.01),
        ("generic", b_prime / (b + b_prime), 10_000, None),
    ):
        if eta is None:
            eta = step_size(profile, b_prime / (b + b_prime), b, b_prime, prob.n).eta
        cfg = VrccdConfig(
            cycles=cycles, eta=eta, p=p, b=b, b_prime=b_prime,
            x0=_x0(prob, 8100, reg), metric=metric,
        )
        _, trace = vrccd_run(prob, reg, cfg, RngBundle.from_seed(81_000 + int(p * 100)))
        rep = checks.check_work_accounting([trace], p, b, b_prime, prob.dim)
        ok = ok and rep.passed
        target = (p * b + (1 - p) * b_prime) * prob.dim
        mean = float(trace.work_increments().mean())
        lines.append(f"{label}: mean per-cycle work {mean:.4f} vs target {target:.4f} over {cycles} cycles")
    elapsed = time.perf_counter() - t0
    return SuiteResult("work-accounting", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 9. equivalence oracles (bitwise)
# --------------------------------------------------------------------------


def _same_trajectories(tr_a, tr_b) -> bool:
    if len(tr_a.iterates) != len(tr_b.iterates):
        return False
    for xa, xb in zip(tr_a.iterates, tr_b.iterates):
        if not np.array_equal(xa, xb):
            return False
    return tr_a.obj == tr_b.obj and tr_a.stat_sq == tr_b.stat_sq and tr_a.step_sq == tr_b.step_sq


def suite_equivalences() -> SuiteResult:
    t0 = time.perf_counter()
    lines = []
    ok = True

    # single block: the cyclic method IS proximal gradient descent
    part = BlockPartition.even(16, 1)
    prob = problems.generate_quadratic(9100, n=8, d=16, partition=part, condition_number=5.0)
    metric = problems.exact_quadratic_metric(prob)
    reg = L1(0.1)
    x0 = _x0(prob, 9100, reg)
    _, tr_ccd = pccd_run(prob, reg, PccdConfig(cycles=30, x0=x0, metric=metric, keep_iterates=True))
    _, tr_gd = prox_gd_run(prob, reg, ProxGdConfig(cycles=30, x0=x0, metric=metric, keep_iterates=True))
    same = _same_trajectories(tr_ccd, tr_gd)
    ok = ok and same
    lines.append(f"m=1 cyclic == proximal gradient: {'bitwise equal' if same else 'MISMATCH'}")

    # always-refresh full-batch anchors: the VR run IS the cyclic method
    part = BlockPartition.even(12, 3)
    prob = problems.generate_quadratic(9200, n=8, d=12, partition=part, condition_number=5.0)
    metric = problems.exact_quadratic_metric(prob)
    reg = L1(0.1)
    x0 = _x0(prob, 9200, reg)
    eta = 0.5
    vcfg = VrccdConfig(
        cycles=25, eta=eta, p=1.0, b=prob.n, b_prime=prob.n, x0=x0, metric=metric,
        keep_iterates=True,
    )
    _, tr_vr = vrccd_run(prob, reg, vcfg, RngBundle.from_seed(92))
    _, tr_ccd = pccd_run(
        prob, reg, PccdConfig(cycles=25, x0=x0, metric=metric, eta=eta, keep_iterates=True)
    )
    same = _same_trajectories(tr_vr, tr_ccd)
    ok = ok and same
    lines.append(f"p=1, b=n VR run == cyclic with same eta: {'bitwise equal' if same else 'MISMATCH'}")

    # single block, always-refresh minibatch: cyclic SGD == SGD, shared seed
    part = BlockPartition.even(10, 1)
    prob = problems.generate_quadratic(9300, n=32, d=10, partition=part, condition_number=5.0)
    metric = problems.exact_quadratic_metric(prob)
    x0 = _x0(prob, 9300)
    eta = 0.05
    sccd_cfg = VrccdConfig(
        cycles=40, eta=eta, p=1.0, b=8, b_prime=8, x0=x0, metric=metric, keep_iterates=True
    )
    out_sccd, tr_sccd = vrccd_run(prob, Zero(), sccd_cfg, RngBundle.from_seed(93))
    sgd_cfg = SgdConfig(cycles=40, eta=eta, b=8, x0=x0, metric=metric, keep_iterates=True)
    out_sgd, tr_sgd = sgd_run(prob, Zero(), sgd_cfg, RngBundle.from_seed(93))
    same = _same_trajectories(tr_sccd, tr_sgd) and np.array_equal(out_sccd, out_sgd)
    ok = ok and same
    lines.append(f"m=1 cyclic-SGD == SGD under shared seed: {'bitwise equal' if same else 'MISMATCH'}")

    # full-batch recursive baseline == proximal gradient descent
    _, tr_page = page_run(
        prob,
        Zero(),
        VrccdConfig(
            cycles=25, eta=eta, p=1.0, b=prob.n, b_prime=prob.n, x0=x0, metric=metric,
            keep_iterates=True,
        ),
        RngBundle.from_seed(94),
    )
    _, tr_pgd = prox_gd_run(
        prob, Zero(), ProxGdConfig(cycles=25, x0=x0, metric=metric, eta=eta, keep_iterates=True)
    )
    same = _same_trajectories(tr_page, tr_pgd)
    ok = ok and same
    lines.append(f"p=1, b=n recursive baseline == proximal gradient: {'bitwise equal' if same else 'MISMATCH'}")

    elapsed = time.perf_counter() - t0
    return SuiteResult("equivalences", ok, lines, elapsed)


# --------------------------------------------------------------------------
# 10. gradient and prox correctness against independent oracles
# --------------------------------------------------------------------------


def _central_diff_block(value_fn, x, cols, h=1e-6):
    fd = np.empty(cols.stop - cols.start)
    for t, i in enumerate(range(cols.start, cols.stop)):
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        fd[t] = (value_fn(xp) - value_fn(xm)) / (2.0 * h)
    return fd


def suite_gradient_prox_oracles() -> SuiteResult:
    t0 = time.perf_counter()
    ok = True
    lines = []

    part = BlockPartition.even(12, 4)
    quad = problems.generate_quadratic(10_100, n=16, d=12, partition=part, condition_number=5.0)
    sig = problems.generate_classification(10_200, n=16, d=12, partition=part)
    rng = np.random.default_rng(10_300)
    worst_fd = 0.0
    for t in range(1000):
        prob = quad if t % 2 == 0 else sig
        x = rng.standard_normal(prob.dim)
        j = int(rng.integers(part.num_blocks))
        cols = part.block_slice(j)
        if t % 4 < 2:
            i = int(rng.integers(prob.n))
            analytic = prob.component_block_grad(i, j, x)
            fd = _central_diff_block(lambda z: prob.component_value(i, z), x, cols)
        else:
            analytic = prob.block_grad(j, x)
            fd = _central_diff_block(prob.value, x, cols)
        err = float(np.linalg.norm(fd - analytic)) / max(1.0, float(np.linalg.norm(analytic)))
        worst_fd = max(worst_fd, err)
    ok = ok and worst_fd <= 1e-6
    lines.append(f"1000 finite-difference probes, worst rel err={worst_fd:.3e} (tol 1e-6)")

    # scalar-block prox against a two-stage grid search (coarse 1e-3 to
    # bracket the convex subproblem, fine 1e-6 around the coarse argmin)
    rng = np.random.default_rng(10_400)
    part1 = BlockPartition((1,))
    worst_prox = 0.0
    for t in range(1000):
        kind = ("zero", "l1", "box")[t % 3]
        center = float(rng.uniform(-2, 2))
        linear = float(rng.uniform(-2, 2))
        eta = float(rng.uniform(0.1, 2.0))
        lam = float(rng.uniform(0.5, 3.0))
        if kind == "zero":
            reg = Zero()
        elif kind == "l1":
            reg = L1(float(rng.uniform(0.1, 2.0)))
        else:
            lo = float(rng.uniform(-1.5, 0.0))
            reg = Box(lo, lo + float(rng.uniform(0.5, 2.0)))
        analytic = float(
            metric_prox(reg, 0, np.array([center]), np.array([linear]), eta, np.array([lam]))[0]
        )

        zero_step = center - eta * linear / lam
        if kind == "box":
            lo_b, hi_b = reg.lo, reg.hi
        else:
            # soft thresholding shrinks toward zero, so the bracket must
            # cover the origin as well as the unregularized step
            lo_b = min(center, zero_step, 0.0) - 1.0
            hi_b = max(center, zero_step, 0.0) + 1.0

        def objective(z):
            val = linear * z + lam * (z - center) ** 2 / (2.0 * eta)
            if kind == "l1":
                val = val + reg.weight * np.abs(z)
            return val

        coarse = np.arange(lo_b, hi_b + 1e-3, 1e-3)
        z0 = coarse[int(np.argmin(objective(coarse)))]
        fine = np.arange(max(lo_b, z0 - 2e-3), min(hi_b, z0 + 2e-3) + 1e-6, 1e-6)
        z_star = fine[int(np.argmin(objective(fine)))]
        worst_prox = max(worst_prox, abs(z_star - analytic))
    ok = ok and worst_prox <= 1e-5
    lines.append(f"1000 scalar prox grid searches, worst err={worst_prox:.3e} (tol 1e-5)")

    elapsed = time.perf_counter() - t0
    return SuiteResult("gradient-prox-oracles", ok, lines, elapsed)


SUITES = {
    "batch-variance-identity": suite_batch_variance_identity,
    "cyclic-descent": suite_cyclic_descent,
    "stationarity-rate": suite_stationarity_rate,
    "pl-linear-rate": suite_pl_linear_rate,
    "vr-pathwise": suite_vr_pathwise,
    "vr-rate": suite_vr_rate,
    "vr-potential": suite_vr_potential,
    "work-accounting": suite_work_accounting,
    "equivalences": suite_equivalences,
    "gradient-prox-oracles": suite_gradient_prox_oracles,
}

# wall-clock budgets (seconds) stated by the acceptance gate; None = unbudgeted
SUITE_BUDGETS = {
    "batch-variance-identity": 10,
    "cyclic-descent": 60,
    "stationarity-rate": 120,
    "pl-linear-rate": 120,
    "vr-pathwise": 300,
    "vr-rate": 600,
    "vr-potential": 600,
    "work-accounting": 60,
    "equivalences": None,
    "gradient-prox-oracles": None,
}


def run_suite(name: str) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    return SUITES[name]()
