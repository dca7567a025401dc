"""Optimizer runs: the cyclic proximal method, its variance-reduced variant,
and full-vector baselines, all emitting a common per-cycle trace.

Conventions shared by every runner:

* one outer iteration = one pass over the blocks (cyclic) or one full-vector
  step (baselines); iteration k maps the iterate x_{k-1} to x_k;
* the trace starts with a k = 0 row for the initial point;
* per-cycle displacement is measured in the run's diagonal metric, and the
  stationarity value is the squared inverse-metric norm of the subgradient
  the prox optimality conditions construct -- an upper bound on the distance
  of 0 from the composite subdifferential and exactly the quantity the
  bound checks consume;
* ``work`` accumulates optimizer gradient effort d-weighted: a batch of size
  c used to update a block of dimension d_j costs c * d_j (diagnostic
  evaluations are excluded).

The variance-reduced runner keeps one gradient anchor per block. Each inner
step either refreshes the anchor from a size-b batch (probability p) or
corrects it with a size-b' batch of gradient differences between the current
intermediate point and the matching intermediate point of the previous
cycle. Intermediate points of the previous cycle are reconstructed from the
two stored full iterates, so memory stays O(d).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockPartition, DiagonalMetric, weighted_norm_sq
from .regularizers import Regularizer, metric_prox, total_value
from .sampling import RngBundle, bernoulli_switch

FRESH_PER_BLOCK = "fresh_per_block"
SHARED_PER_CYCLE = "shared_per_cycle"


class NonFiniteObjectiveError(RuntimeError):
    """Objective became non-finite during a run; carries the iteration."""

    def __init__(self, iteration: int, value: float):
        super().__init__(f"objective value {value} at iteration {iteration}")
        self.iteration = iteration
        self.value = value


@dataclass(eq=False)
class RunTrace:
    """Per-iteration record of one optimizer run."""

    seed: int | None = None
    meta: dict = field(default_factory=dict)
    k: list = field(default_factory=list)
    obj: list = field(default_factory=list)  # F(x_k); surrogate-based when streaming
    stat_sq: list = field(default_factory=list)  # constructed stationarity; None at k=0
    step_sq: list = field(default_factory=list)  # metric displacement squared
    est_err_sq: list = field(default_factory=list)  # anchor error; None unless recorded
    mid_resid_sq: list = field(default_factory=list)  # intermediate-gradient residual
    work: list = field(default_factory=list)  # cumulative d-weighted gradient work
    wall_ns: list = field(default_factory=list)
    iterates: list | None = None

    def add_row(self, k, obj, stat_sq, step_sq, est_err_sq, mid_resid_sq, work, wall_ns):
        self.k.append(int(k))
        self.obj.append(obj)
        self.stat_sq.append(stat_sq)
        self.step_sq.append(step_sq)
        self.est_err_sq.append(est_err_sq)
        self.mid_resid_sq.append(mid_resid_sq)
        self.work.append(work)
        self.wall_ns.append(int(wall_ns))

    @property
    def cycles(self) -> int:
        return len(self.k) - 1

    def array(self, name: str, skip_first: bool = False) -> np.ndarray:
        vals = getattr(self, name)
        if skip_first:
            vals = vals[1:]
        return np.array([np.nan if v is None else v for v in vals], dtype=float)

    def work_increments(self) -> np.ndarray:
        """Per-cycle d-weighted work, excluding any one-time startup cost."""
        w = np.asarray(self.work, dtype=float)
        return np.diff(w)


@dataclass
class PccdConfig:
    """Cyclic proximal run: exact block gradients, unit step by default."""

    cycles: int
    x0: np.ndarray
    metric: DiagonalMetric | None = None
    backtracking: bool = False
    backtrack_init: float = 1.0
    backtrack_growth: float = 2.0
    eta: float = 1.0
    keep_iterates: bool = False
    stop_step_sq: float | None = None  # early exit once v_k falls below this

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if (self.metric is None) == (not self.backtracking):
            raise ValueError("provide a metric or enable backtracking (exactly one)")


@dataclass
class VrccdConfig:
    """Variance-reduced cyclic run."""

    cycles: int
    eta: float
    p: float
    b: int
    b_prime: int
    x0: np.ndarray
    metric: DiagonalMetric
    sample_sharing: str = FRESH_PER_BLOCK
    record_u: bool = False
    keep_iterates: bool = False
    surrogate_samples: int = 0
    eta_bound: float | None = None
    eta_override: bool = False

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"refresh probability must lie in [0, 1], got {self.p}")
        if self.b_prime < 1 or self.b < self.b_prime:
            raise ValueError(f"need 1 <= b' <= b, got b'={self.b_prime}, b={self.b}")
        if self.sample_sharing not in (FRESH_PER_BLOCK, SHARED_PER_CYCLE):
            raise ValueError(f"unknown sample_sharing {self.sample_sharing!r}")
        if self.eta_bound is not None and not self.eta_override:
            if self.eta > self.eta_bound * (1 + 1e-12):
                raise ValueError(
                    f"eta={self.eta} exceeds the admissible bound {self.eta_bound}; "
                    "set eta_override to run anyway (bound checks are then skipped)"
                )


@dataclass
class ProxGdConfig:
    """Full-vector proximal gradient baseline (simultaneous block update)."""

    cycles: int
    x0: np.ndarray
    metric: DiagonalMetric
    eta: float = 1.0
    keep_iterates: bool = False

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")


@dataclass
class SgdConfig:
    """Minibatch stochastic proximal gradient baseline."""

    cycles: int
    eta: float
    b: int
    x0: np.ndarray
    metric: DiagonalMetric
    keep_iterates: bool = False
    surrogate_samples: int = 0

    def __post_init__(self):
        if self.cycles < 1 or self.b < 1:
            raise ValueError("cycles and b must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")


def stationarity_sq(prob, x, residuals, metric, grad_full=None) -> float:
    """Squared inverse-metric norm of grad f(x) + r' with the prox-built
    subgradient r' per block. Equals the plain inverse-metric gradient norm
    when the regularizer is zero."""
    part = metric.partition
    if len(residuals) != part.num_blocks:
        raise ValueError("need one residual per block")
    grad = prob.full_grad(x) if grad_full is None else grad_full
    total = 0.0
    for j in range(part.num_blocks):
        cols = part.block_slice(j)
        inv = 1.0 / metric.block(j)
        total += weighted_norm_sq(grad[cols] + residuals[j], inv)
    return total


def _objective(prob, reg, x) -> float:
    return prob.value(x) + total_value(reg, x, prob.partition)


def _check_finite(value: float, k: int):
    if not np.isfinite(value):
        raise NonFiniteObjectiveError(k, value)


def pccd_run(prob, reg: Regularizer, cfg: PccdConfig, row_sink=None):
    """Cyclic proximal descent; returns the iterate with the smallest metric
    displacement from its predecessor (first minimizer on ties) and the trace.
    """
    if not getattr(prob, "is_finite", False):
        raise ValueError("the cyclic proximal method needs exact gradients (finite sums)")
    part: BlockPartition = prob.partition
    m = part.num_blocks
    n = prob.n
    x = np.array(cfg.x0, dtype=float)
    if x.shape != (part.dim,):
        raise ValueError("x0 does not match the problem dimension")

    scales = np.full(m, cfg.backtrack_init) if cfg.backtracking else None
    lam_blocks = None if cfg.backtracking else [cfg.metric.block(j) for j in range(m)]

    trace = RunTrace(meta={"algorithm": "pccd", "eta": cfg.eta})
    if cfg.keep_iterates:
        trace.iterates = [x.copy()]
    t0 = time.perf_counter_ns()
    trace.add_row(0, _objective(prob, reg, x), None, 0.0, None, None, 0, 0)
    if row_sink is not None:
        row_sink(trace)

    best_v = math.inf
    best_x = x.copy()
    work = 0
    for k in range(1, cfg.cycles + 1):
        t_iter = time.perf_counter_ns()
        v_k = 0.0
        residuals = []
        lams_used = []
        for j in range(m):
            cols = part.block_slice(j)
            g = prob.block_grad(j, x)
            work += n * (cols.stop - cols.start)
            center = x[cols].copy()
            if cfg.backtracking:
                scales[j], z = _accept_scale(
                    prob, reg, j, x, g, center, scales[j], cfg.backtrack_growth, cfg.eta
                )
                lam = np.full(center.shape, scales[j])
            else:
                lam = lam_blocks[j]
                z = metric_prox(reg, j, center, g, cfg.eta, lam)
            residuals.append(lam * (center - z) / cfg.eta - g)
            lams_used.append(lam)
            v_k += weighted_norm_sq(z - center, lam)
            x[cols] = z

        grad_end = prob.full_grad(x)
        s_k = 0.0
        for j in range(m):
            cols = part.block_slice(j)
            s_k += weighted_norm_sq(grad_end[cols] + residuals[j], 1.0 / lams_used[j])
        f_k = _objective(prob, reg, x)
        _check_finite(f_k, k)
        if v_k < best_v:
            best_v = v_k
            best_x = x.copy()
        if cfg.keep_iterates:
            trace.iterates.append(x.copy())
        trace.add_row(k, f_k, s_k, v_k, None, None, work, time.perf_counter_ns() - t_iter)
        if row_sink is not None:
            row_sink(trace)
        if cfg.stop_step_sq is not None and v_k <= cfg.stop_step_sq:
            break
    trace.meta["wall_total_ns"] = time.perf_counter_ns() - t0
    if cfg.backtracking:
        trace.meta["backtracked_scales"] = [float(s) for s in scales]
    return best_x, trace


def _accept_scale(prob, reg, j, x, g, center, scale, growth, eta, max_growths=200):
    """Backtracking acceptance loop with precomputed block gradient."""
    base = prob.value(x)
    cols = prob.partition.block_slice(j)
    trial = np.array(x, dtype=float)
    for _ in range(max_growths + 1):
        lam = np.full(center.shape, scale)
        z = metric_prox(reg, j, center, g, eta, lam)
        step = z - center
        trial[cols] = z
        rhs = base + float(g @ step) + 0.5 * scale * float(step @ step)
        if prob.value(trial) <= rhs + 1e-12 * max(1.0, abs(rhs)):
            return scale, z
        scale *= growth
    raise RuntimeError(f"backtracking exceeded {max_growths} growth steps on block {j}")


def vrccd_run(prob, reg: Regularizer, cfg: VrccdConfig, rngs: RngBundle, row_sink=None):
    """Variance-reduced cyclic run; returns an iterate drawn uniformly from
    the K cycle endpoints (via the output stream) and the trace.

    With p = 1 and b = n the anchor is the exact block gradient and the
    trajectory coincides, float for float, with the cyclic proximal method
    run at the same step size.
    """
    part: BlockPartition = prob.partition
    m = part.num_blocks
    finite = getattr(prob, "is_finite", False)
    if finite and cfg.b > prob.n:
        raise ValueError(f"need b <= n, got b={cfg.b}, n={prob.n}")
    if not finite and cfg.record_u:
        raise ValueError("anchor-error recording needs exact gradients (finite sums)")
    if cfg.p == 0.0 and cfg.eta_bound is not None:
        raise ValueError("p = 0 admits no step-size bound; pass an explicit eta only")
    x = np.array(cfg.x0, dtype=float)
    if x.shape != (part.dim,):
        raise ValueError("x0 does not match the problem dimension")
    diagnostics = cfg.record_u

    lam_blocks = [cfg.metric.block(j) for j in range(m)]
    inv_blocks = [1.0 / lam for lam in lam_blocks]
    sizes = part.block_sizes
    offsets = part.offsets
    d = part.dim

    k_out = int(rngs.output.integers(1, cfg.cycles + 1))
    x_hat = None

    trace = RunTrace(
        seed=rngs.seed,
        meta={
            "algorithm": "vrccd",
            "eta": cfg.eta,
            "p": cfg.p,
            "b": cfg.b,
            "bprime": cfg.b_prime,
            "sample_sharing": cfg.sample_sharing,
            "output_index": k_out,
        },
    )
    if cfg.keep_iterates:
        trace.iterates = [x.copy()]
    t0 = time.perf_counter_ns()

    # anchor the estimator with a size-b batch at the start point; with
    # p = 1 the anchors are never read (the estimator is plain minibatch
    # SGD), so no anchor batch is drawn and the streams line up with the
    # SGD baseline under a shared seed
    use_anchors = cfg.p < 1.0
    work = 0
    anchors = [None] * m
    u0 = 0.0 if diagnostics else None
    if use_anchors:
        batch0 = prob.draw_batch(rngs.batch, cfg.b)
        g_init = prob.batch_full_grad(batch0, x)
        anchors = [np.array(g_init[part.block_slice(j)]) for j in range(m)]
        work = cfg.b * d
        if diagnostics:
            u0 = 0.0
            for j in range(m):
                dev = anchors[j] - prob.block_grad(j, x)
                u0 += weighted_norm_sq(dev, inv_blocks[j])
    f0, _ = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=False)
    trace.add_row(0, f0, None, 0.0, u0, None, work, 0)
    if row_sink is not None:
        row_sink(trace)

    x_prev = x.copy()
    x_prev2 = x.copy()
    shared = cfg.sample_sharing == SHARED_PER_CYCLE

    for k in range(1, cfg.cycles + 1):
        t_iter = time.perf_counter_ns()
        if shared:
            refresh_cycle = bernoulli_switch(rngs.switch, cfg.p)
            shared_batch = prob.draw_batch(rngs.batch, cfg.b if refresh_cycle else cfg.b_prime)
        v_k = 0.0
        u_k = 0.0 if diagnostics else None
        mid_k = 0.0 if diagnostics else None
        residuals = []
        for j in range(m):
            cols = part.block_slice(j)
            refresh = refresh_cycle if shared else bernoulli_switch(rngs.switch, cfg.p)
            if refresh:
                batch = shared_batch if shared else prob.draw_batch(rngs.batch, cfg.b)
                g_j = prob.batch_block_grad(batch, j, x)
                work += cfg.b * sizes[j]
            else:
                batch = shared_batch if shared else prob.draw_batch(rngs.batch, cfg.b_prime)
                old_point = np.concatenate((x_prev[: offsets[j]], x_prev2[offsets[j] :]))
                g_j = anchors[j] + (
                    prob.batch_block_grad(batch, j, x) - prob.batch_block_grad(batch, j, old_point)
                )
                work += cfg.b_prime * sizes[j]
            anchors[j] = g_j
            if diagnostics:
                grad_mid = prob.block_grad(j, x)
                u_k += weighted_norm_sq(g_j - grad_mid, inv_blocks[j])
            center = x[cols].copy()
            z = metric_prox(reg, j, center, g_j, cfg.eta, lam_blocks[j])
            r_j = lam_blocks[j] * (center - z) / cfg.eta - g_j
            if diagnostics:
                mid_k += weighted_norm_sq(grad_mid + r_j, inv_blocks[j])
            residuals.append(r_j)
            v_k += weighted_norm_sq(z - center, lam_blocks[j])
            x[cols] = z

        f_k, grad_end = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=True)
        s_k = None
        if grad_end is not None:
            s_k = 0.0
            for j in range(m):
                cols = part.block_slice(j)
                s_k += weighted_norm_sq(grad_end[cols] + residuals[j], inv_blocks[j])
        if finite:
            _check_finite(f_k, k)
        if k == k_out:
            x_hat = x.copy()
        if cfg.keep_iterates:
            trace.iterates.append(x.copy())
        x_prev2 = x_prev
        x_prev = x.copy()
        trace.add_row(k, f_k, s_k, v_k, u_k, mid_k, work, time.perf_counter_ns() - t_iter)
        if row_sink is not None:
            row_sink(trace)
    trace.meta["wall_total_ns"] = time.perf_counter_ns() - t0
    return x_hat, trace


def _trace_value_grad(prob, reg, x, surrogate_samples, rngs, want_grad):
    """Objective value and full gradient for trace rows.

    Exact for finite sums. Streaming objectives use a seeded surrogate batch
    (both quantities are then sample estimates and labeled approximate by
    the harness); with no surrogate budget they are skipped.
    """
    if getattr(prob, "is_finite", False):
        grad = prob.full_grad(x) if want_grad else None
        return _objective(prob, reg, x), grad
    if surrogate_samples and surrogate_samples > 0:
        batch = prob.draw_batch(rngs.surrogate, int(surrogate_samples))
        value = prob.batch_value(batch, x) + total_value(reg, x, prob.partition)
        grad = prob.batch_full_grad(batch, x) if want_grad else None
        return value, grad
    return None, None


def _blockwise_prox_step(part, reg, metric, x, g, eta):
    """Simultaneous prox step over all blocks; returns (x_new, residuals, v)."""
    x_new = np.empty_like(x)
    residuals = []
    v = 0.0
    for j in range(part.num_blocks):
        cols = part.block_slice(j)
        lam = metric.block(j)
        center = x[cols]
        z = metric_prox(reg, j, center, g[cols], eta, lam)
        residuals.append(lam * (center - z) / eta - g[cols])
        v += weighted_norm_sq(z - center, lam)
        x_new[cols] = z
    return x_new, residuals, v


def prox_gd_run(prob, reg: Regularizer, cfg: ProxGdConfig, row_sink=None):
    """Full-gradient proximal baseline; same return rule as the cyclic run."""
    if not getattr(prob, "is_finite", False):
        raise ValueError("the full-gradient baseline needs a finite sum")
    part = prob.partition
    x = np.array(cfg.x0, dtype=float)
    trace = RunTrace(meta={"algorithm": "prox_gd", "eta": cfg.eta})
    if cfg.keep_iterates:
        trace.iterates = [x.copy()]
    t0 = time.perf_counter_ns()
    trace.add_row(0, _objective(prob, reg, x), None, 0.0, None, None, 0, 0)
    if row_sink is not None:
        row_sink(trace)
    best_v = math.inf
    best_x = x.copy()
    work = 0
    for k in range(1, cfg.cycles + 1):
        t_iter = time.perf_counter_ns()
        g = prob.full_grad(x)
        work += prob.n * part.dim
        x_new, residuals, v_k = _blockwise_prox_step(part, reg, cfg.metric, x, g, cfg.eta)
        x = x_new
        s_k = stationarity_sq(prob, x, residuals, cfg.metric)
        f_k = _objective(prob, reg, x)
        _check_finite(f_k, k)
        if v_k < best_v:
            best_v = v_k
            best_x = x.copy()
        if cfg.keep_iterates:
            trace.iterates.append(x.copy())
        trace.add_row(k, f_k, s_k, v_k, None, None, work, time.perf_counter_ns() - t_iter)
        if row_sink is not None:
            row_sink(trace)
    trace.meta["wall_total_ns"] = time.perf_counter_ns() - t0
    return best_x, trace


def page_run(prob, reg: Regularizer, cfg: VrccdConfig, rngs: RngBundle, row_sink=None):
    """Full-vector recursive estimator baseline: one switch and one estimator
    for the whole gradient per iteration, simultaneous block update."""
    part = prob.partition
    finite = getattr(prob, "is_finite", False)
    if finite and cfg.b > prob.n:
        raise ValueError(f"need b <= n, got b={cfg.b}, n={prob.n}")
    if not finite and cfg.record_u:
        raise ValueError("anchor-error recording needs exact gradients (finite sums)")
    x = np.array(cfg.x0, dtype=float)
    d = part.dim
    k_out = int(rngs.output.integers(1, cfg.cycles + 1))
    x_hat = None
    trace = RunTrace(
        seed=rngs.seed,
        meta={
            "algorithm": "page",
            "eta": cfg.eta,
            "p": cfg.p,
            "b": cfg.b,
            "bprime": cfg.b_prime,
            "output_index": k_out,
        },
    )
    if cfg.keep_iterates:
        trace.iterates = [x.copy()]
    t0 = time.perf_counter_ns()

    # same p = 1 reduction as the cyclic runner: no anchor state, no draw
    g = None
    work = 0
    u0 = 0.0 if cfg.record_u else None
    if cfg.p < 1.0:
        batch0 = prob.draw_batch(rngs.batch, cfg.b)
        g = prob.batch_full_grad(batch0, x)
        work = cfg.b * d
        if cfg.record_u:
            u0 = weighted_norm_sq(g - prob.full_grad(x), cfg.metric.inv_entries)
    f0, _ = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=False)
    trace.add_row(0, f0, None, 0.0, u0, None, work, 0)
    if row_sink is not None:
        row_sink(trace)

    x_old = x.copy()
    for k in range(1, cfg.cycles + 1):
        t_iter = time.perf_counter_ns()
        refresh = bernoulli_switch(rngs.switch, cfg.p)
        if refresh:
            batch = prob.draw_batch(rngs.batch, cfg.b)
            g = prob.batch_full_grad(batch, x)
            work += cfg.b * d
        else:
            batch = prob.draw_batch(rngs.batch, cfg.b_prime)
            g = g + (prob.batch_full_grad(batch, x) - prob.batch_full_grad(batch, x_old))
            work += cfg.b_prime * d
        u_k = None
        if cfg.record_u:
            u_k = weighted_norm_sq(g - prob.full_grad(x), cfg.metric.inv_entries)
        x_old = x
        x_new, residuals, v_k = _blockwise_prox_step(part, reg, cfg.metric, x, g, cfg.eta)
        x = x_new
        f_k, grad_end = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=True)
        s_k = None
        if grad_end is not None:
            s_k = stationarity_sq(prob, x, residuals, cfg.metric, grad_full=grad_end)
        if finite:
            _check_finite(f_k, k)
        if k == k_out:
            x_hat = x.copy()
        if cfg.keep_iterates:
            trace.iterates.append(x.copy())
        trace.add_row(k, f_k, s_k, v_k, u_k, None, work, time.perf_counter_ns() - t_iter)
        if row_sink is not None:
            row_sink(trace)
    trace.meta["wall_total_ns"] = time.perf_counter_ns() - t0
    return x_hat, trace


def sgd_run(prob, reg: Regularizer, cfg: SgdConfig, rngs: RngBundle, row_sink=None):
    """Minibatch proximal stochastic gradient baseline."""
    part = prob.partition
    finite = getattr(prob, "is_finite", False)
    if finite and cfg.b > prob.n:
        raise ValueError(f"need b <= n, got b={cfg.b}, n={prob.n}")
    x = np.array(cfg.x0, dtype=float)
    k_out = int(rngs.output.integers(1, cfg.cycles + 1))
    x_hat = None
    trace = RunTrace(
        seed=rngs.seed,
        meta={"algorithm": "sgd", "eta": cfg.eta, "b": cfg.b, "output_index": k_out},
    )
    if cfg.keep_iterates:
        trace.iterates = [x.copy()]
    t0 = time.perf_counter_ns()
    f0, _ = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=False)
    trace.add_row(0, f0, None, 0.0, None, None, 0, 0)
    if row_sink is not None:
        row_sink(trace)
    work = 0
    for k in range(1, cfg.cycles + 1):
        t_iter = time.perf_counter_ns()
        batch = prob.draw_batch(rngs.batch, cfg.b)
        g = prob.batch_full_grad(batch, x)
        work += cfg.b * part.dim
        x, residuals, v_k = _blockwise_prox_step(part, reg, cfg.metric, x, g, cfg.eta)
        f_k, grad_end = _trace_value_grad(prob, reg, x, cfg.surrogate_samples, rngs, want_grad=True)
        s_k = None
        if grad_end is not None:
            s_k = stationarity_sq(prob, x, residuals, cfg.metric, grad_full=grad_end)
        if finite:
            _check_finite(f_k, k)
        if k == k_out:
            x_hat = x.copy()
        if cfg.keep_iterates:
            trace.iterates.append(x.copy())
        trace.add_row(k, f_k, s_k, v_k, None, None, work, time.perf_counter_ns() - t_iter)
        if row_sink is not None:
            row_sink(trace)
    trace.meta["wall_total_ns"] = time.perf_counter_ns() - t0
    return x_hat, trace
