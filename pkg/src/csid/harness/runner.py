"""Seeded Monte-Carlo trials over a parameter sweep."""
from __future__ import annotations

import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..adaptive import AdaptiveState, DistortionRecorder, run_adaptation
from ..channel import compressive_desired_reduced, conventional_desired
from ..errors import DivergenceError, NumericalFailure
from ..measurement import (apply_measurement, build_measurement_operator, gen_random_filter,
                           gen_sparse_system, measurement_count_guidance)
from ..metrics import TrialTrajectory, aggregate_trials, fmean, fstd, relative_distortion
from ..recovery import recover_system
from ..signal_core import RNG_ALGORITHM, SeededRng, gaussian_vector
from .config import ExperimentConfig

log = logging.getLogger(__name__)

NOISE_STREAM = 1


@dataclass
class MethodOutcome:
    trajectory: Optional[np.ndarray] = None
    final_distortion: float = float("nan")
    pilots_per_iteration: int = 1
    iterations: int = 0
    wall_time: float = 0.0
    error: Optional[str] = None


@dataclass
class TrialResult:
    seed: int
    swept_value: float
    outcomes: dict


def trial_seed(config: ExperimentConfig, trial_index: int) -> int:
    return config.base_seed + trial_index


def run_trial(config: ExperimentConfig, swept_value, trial_index: int) -> TrialResult:
    """One realization shared by every requested method (paired comparison).

    Draw order from the trial stream: system, random filter, pilot. Noise
    comes from a derived stream so every plant sees the same samples.
    """
    cfg = config.at(swept_value)
    seed = trial_seed(config, trial_index)
    rng = SeededRng(seed)
    system = gen_sparse_system(rng, cfg.N, cfg.k)
    rfilter = gen_random_filter(rng, cfg.L, cfg.filter_variance())
    n_pilot = max(cfg.iterations_conventional, cfg.iterations_compressive)
    pilot = gaussian_vector(rng, n_pilot, 0.0, 1.0)

    outcomes = {}
    methods = set(cfg.methods)

    for name, algo in (("lms_direct", "lms"), ("za_lms_direct", "za_lms")):
        if name not in methods:
            continue
        t0 = time.perf_counter()
        out = MethodOutcome(pilots_per_iteration=1, iterations=cfg.iterations_conventional)
        try:
            plant = conventional_desired(system, pilot[:cfg.iterations_conventional],
                                         rng.derive(NOISE_STREAM), cfg.noise_variance)
            rec = DistortionRecorder(system.h, cfg.record_stride)
            state = AdaptiveState.zeros(cfg.N, cfg.mu, cfg.rho if algo == "za_lms" else 0.0)
            final, traj = run_adaptation(state, pilot, plant.desired, algo, rec)
            out.trajectory = traj
            out.final_distortion = relative_distortion(system.h, final.w)
        except DivergenceError as exc:
            exc.seed = seed
            out.error = f"divergence at iteration {exc.iteration} (seed {seed})"
        out.wall_time = time.perf_counter() - t0
        outcomes[name] = out

    if methods & {"compressive", "compressive_plus_recovery"}:
        t0 = time.perf_counter()
        op = build_measurement_operator(rfilter, cfg.N, cfg.q, cfg.phase)
        target = apply_measurement(op, system.h)
        comp = MethodOutcome(pilots_per_iteration=cfg.q, iterations=cfg.iterations_compressive)
        w_hat = None
        try:
            plant = compressive_desired_reduced(op, system, pilot[:cfg.iterations_compressive],
                                                rng.derive(NOISE_STREAM), cfg.noise_variance)
            rec = DistortionRecorder(target, cfg.record_stride)
            final, traj = run_adaptation(AdaptiveState.zeros(op.M, cfg.mu), pilot, plant.desired, "lms", rec)
            w_hat = final.w
            comp.trajectory = traj
            comp.final_distortion = relative_distortion(target, w_hat)
        except DivergenceError as exc:
            comp.error = f"divergence at iteration {exc.iteration} (seed {seed})"
        comp.wall_time = time.perf_counter() - t0
        if "compressive" in methods:
            outcomes["compressive"] = comp

        if "compressive_plus_recovery" in methods:
            t1 = time.perf_counter()
            rcv = MethodOutcome(trajectory=comp.trajectory, pilots_per_iteration=cfg.q,
                                iterations=cfg.iterations_compressive, error=comp.error)
            if w_hat is not None:
                try:
                    h_hat = recover_system(w_hat, op, cfg.lambda_rule_obj, cfg.solver_config,
                                           debias_support=cfg.recovery_debias)
                    rcv.final_distortion = relative_distortion(system.h, h_hat)
                except NumericalFailure as exc:
                    rcv.error = f"recovery failed: {exc} (seed {seed})"
            rcv.wall_time = comp.wall_time + time.perf_counter() - t1
            outcomes["compressive_plus_recovery"] = rcv

    return TrialResult(seed=seed, swept_value=swept_value, outcomes=outcomes)


def _run_trial_args(args):
    return run_trial(*args)


@dataclass
class ResultRow:
    method: str
    swept_param: str
    swept_value: float
    trials: int
    mean_distortion: float
    std_distortion: float
    mean_convergence_iter: float
    mean_pilots: float
    wall_time_s: float

    FIELDS = ("method", "swept_param", "swept_value", "trials", "mean_distortion", "std_distortion",
              "mean_convergence_iter", "mean_pilots", "wall_time_s")


@dataclass
class MethodSummary:
    method: str
    swept_value: float
    aggregate: object
    seeds: list
    trajectories: Optional[np.ndarray]
    final_distortions: list
    wall_times: list
    failures: list


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    summaries: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    def row(self, method, swept_value) -> ResultRow:
        for r in self.rows:
            if r.method == method and r.swept_value == swept_value:
                return r
        raise KeyError((method, swept_value))

    def summary(self, method, swept_value) -> MethodSummary:
        for s in self.summaries:
            if s.method == method and s.swept_value == swept_value:
                return s
        raise KeyError((method, swept_value))


def runtime_descriptor() -> str:
    return (f"{platform.python_implementation()} {platform.python_version()}; numpy {np.__version__}; "
            f"{platform.machine()} {platform.system()}; rng {RNG_ALGORITHM}")


def _summarize(cfg, method, value, trials) -> tuple[MethodSummary, ResultRow]:
    ok = [t for t in trials if t.outcomes[method].error is None]
    failures = [t.outcomes[method].error for t in trials if t.outcomes[method].error is not None]
    outs = [t.outcomes[method] for t in ok]
    nan = float("nan")
    agg = None
    traj = None
    if ok:
        tts = [TrialTrajectory(o.trajectory, cfg.record_stride, t.seed) for o, t in zip(outs, ok)]
        agg = aggregate_trials(tts, "mean", cfg.convergence_window, cfg.convergence_factor,
                               cfg.steady_state_tail)
        traj = np.stack([o.trajectory for o in outs])
    finals = [o.final_distortion for o in outs]
    walls = [o.wall_time for o in outs]
    if method == "compressive_plus_recovery":
        dist = finals
    else:
        dist = agg.steady_states if agg else []
    conv = agg.ensemble_convergence if agg else None
    ppi = cfg.q if method.startswith("compressive") else 1
    row = ResultRow(
        method=method,
        swept_param=cfg.sweep_param,
        swept_value=value,
        trials=len(ok),
        mean_distortion=fmean(dist) if dist else nan,
        std_distortion=fstd(dist) if dist else nan,
        mean_convergence_iter=float(conv) if conv is not None else nan,
        mean_pilots=float(conv * ppi) if conv is not None else nan,
        wall_time_s=math.fsum(walls) if (cfg.record_wall_time and walls) else nan,
    )
    summary = MethodSummary(method, value, agg, [t.seed for t in ok], traj, finals, walls, failures)
    return summary, row


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> ExperimentResult:
    """Run every (sweep value, trial) and aggregate per (method, sweep value).

    Results depend only on ``config``: each trial owns its seed, and
    aggregation folds trials in index order with exactly rounded sums, so
    serial and parallel runs agree bit for bit.
    """
    config.validate()
    threads = config.threads if threads is None else threads
    t_start = time.perf_counter()
    jobs = [(config, v, i) for v in config.sweep for i in range(config.trials)]
    for v in config.sweep:
        c = config.at(v)
        if any(m.startswith("compressive") for m in c.methods):
            guide = measurement_count_guidance(c.k, c.N, c.guidance_constant)
            if c.M < guide:
                log.warning("%s=%s: M=%d is below the k ln N guidance of %d measurements",
                            c.sweep_param, v, c.M, guide)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            trials = list(pool.map(_run_trial_args, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        trials = [run_trial(*job) for job in jobs]

    rows, summaries, failures = [], [], []
    for v in config.sweep:
        group = [t for t in trials if t.swept_value == v]
        c = config.at(v)
        for method in config.methods:
            summary, row = _summarize(c, method, v, group)
            rows.append(row)
            summaries.append(summary)
            failures.extend(f"{method} {c.sweep_param}={v}: {f}" for f in summary.failures)
    for f in failures:
        log.error(f)
    return ExperimentResult(config=config, rows=rows, summaries=summaries, failures=failures,
                            wall_time=time.perf_counter() - t_start)


@dataclass
class TimingRow:
    method: str
    swept_value: float
    trials: int
    wall_time_s: float
    per_iteration_us: float


def timing_report(config_or_result, threads: Optional[int] = None):
    """Wall-clock seconds per method and sweep value, with a runtime descriptor.

    Informational only: numbers depend on the host.
    """
    result = config_or_result
    if isinstance(config_or_result, ExperimentConfig):
        result = run_experiment(config_or_result, threads)
    rows = []
    for s in result.summaries:
        c = result.config.at(s.swept_value)
        total = math.fsum(s.wall_times)
        iters = c.iterations_compressive if s.method.startswith("compressive") else c.iterations_conventional
        per_it = 1e6 * total / (iters * len(s.wall_times)) if s.wall_times else float("nan")
        rows.append(TimingRow(s.method, s.swept_value, len(s.wall_times), total, per_it))
    return rows, runtime_descriptor()
