"""Distortion, steady-state and convergence estimates, trial aggregation.

All means use ``math.fsum`` (exactly rounded), so aggregates do not depend on
the order trials arrive in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument

CONVERGENCE_WINDOW = 100
CONVERGENCE_FACTOR = 1.05
STEADY_STATE_TAIL = 0.1


@dataclass(frozen=True)
class TrialTrajectory:
    distortion: np.ndarray
    record_stride: int = 1
    seed: int = 0

    def __post_init__(self):
        d = np.asarray(self.distortion, dtype=np.float64)
        if d.ndim != 1:
            raise InvalidArgument("distortion trajectory must be one-dimensional")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InvalidArgument("distortion entries must be finite and nonnegative")
        if self.record_stride < 1:
            raise InvalidArgument("record_stride must be >= 1")
        object.__setattr__(self, "distortion", d)

    def __len__(self):
        return self.distortion.size


def _values(traj):
    if isinstance(traj, TrialTrajectory):
        return traj.distortion, traj.record_stride
    return np.asarray(traj, dtype=np.float64), 1


def fmean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def fstd(values) -> float:
    values = list(values)
    if len(values) < 2:
        return 0.0
    m = fmean(values)
    return math.sqrt(math.fsum((v - m) ** 2 for v in values) / (len(values) - 1))


def relative_distortion(reference, estimate) -> float:
    """``||reference - estimate||^2 / ||reference||^2``."""
    ref = np.asarray(reference, dtype=np.float64)
    est = np.asarray(estimate, dtype=np.float64)
    if ref.shape != est.shape:
        raise InvalidArgument(f"shape mismatch: {ref.shape} vs {est.shape}")
    energy = float(ref @ ref)
    if energy == 0.0:
        raise InvalidArgument("relative distortion undefined for a zero reference")
    r = ref - est
    return float(r @ r) / energy


def steady_state_level(traj, tail_fraction: float = STEADY_STATE_TAIL) -> float:
    d, _ = _values(traj)
    if d.size < 10:
        raise InvalidArgument(f"trajectory too short for a steady-state estimate ({d.size} < 10)")
    if not 0 < tail_fraction <= 1:
        raise InvalidArgument(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    n = math.ceil(tail_fraction * d.size)
    return fmean(d[-n:].tolist())


def convergence_iteration(traj, window: int = CONVERGENCE_WINDOW, factor: float = CONVERGENCE_FACTOR,
                          tail_fraction: float = STEADY_STATE_TAIL) -> Optional[int]:
    """First iteration from which the trailing moving average stays near steady state.

    "Near" means within ``[level / factor, level * factor]`` where ``level``
    is :func:`steady_state_level`. The moving average at point ``i`` covers
    the ``min(window, i+1)`` points ending at ``i``. A trajectory that only
    settles inside the tail used to estimate ``level`` has not converged and
    yields ``None``. Otherwise the point index is scaled by the record stride.
    """
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    if factor <= 1:
        raise InvalidArgument("factor must be > 1")
    d, stride = _values(traj)
    level = steady_state_level(d, tail_fraction)
    tail = math.ceil(tail_fraction * d.size)
    csum = np.concatenate([[0.0], np.cumsum(d)])
    idx = np.arange(d.size)
    lo = np.maximum(idx + 1 - window, 0)
    ma = (csum[idx + 1] - csum[lo]) / (idx + 1 - lo)
    outside = np.flatnonzero((ma > factor * level) | (ma < level / factor))
    first_ok = 0 if outside.size == 0 else int(outside[-1]) + 1
    if first_ok > 0 and first_ok >= d.size - tail:
        return None
    return first_ok * stride


@dataclass
class Aggregate:
    trajectory: np.ndarray
    record_stride: int
    steady_states: list
    convergence: list
    steady_state_mean: float
    steady_state_std: float
    convergence_mean: Optional[float]
    convergence_std: Optional[float]
    ensemble_steady_state: float
    ensemble_convergence: Optional[int]


def aggregate_trials(trials: Sequence[TrialTrajectory], reducer: str = "mean",
                     window: int = CONVERGENCE_WINDOW, factor: float = CONVERGENCE_FACTOR,
                     tail_fraction: float = STEADY_STATE_TAIL) -> Aggregate:
    """Pointwise reduction over trials plus per-trial and ensemble scalars.

    ``ensemble_convergence`` applies :func:`convergence_iteration` to the
    reduced trajectory; single-trial trajectories fluctuate by more than the
    convergence band at steady state, so the ensemble figure is the stable one.
    """
    if not trials:
        raise InvalidArgument("no trials to aggregate")
    n = len(trials[0])
    stride = trials[0].record_stride
    for t in trials:
        if len(t) != n or t.record_stride != stride:
            raise InvalidArgument("trials must share trajectory length and stride")
    stack = np.stack([t.distortion for t in trials])
    if reducer == "mean":
        red = np.array([math.fsum(col) for col in stack.T.tolist()]) / len(trials)
    elif reducer == "median":
        red = np.median(stack, axis=0)
    else:
        raise InvalidArgument(f"unknown reducer {reducer!r}")

    ss = [steady_state_level(t, tail_fraction) for t in trials]
    conv = [convergence_iteration(t, window, factor, tail_fraction) for t in trials]
    conv_ok = [c for c in conv if c is not None]
    ens = TrialTrajectory(red, stride)
    return Aggregate(
        trajectory=red,
        record_stride=stride,
        steady_states=ss,
        convergence=conv,
        steady_state_mean=fmean(ss),
        steady_state_std=fstd(ss),
        convergence_mean=fmean(conv_ok) if conv_ok else None,
        convergence_std=fstd(conv_ok) if conv_ok else None,
        ensemble_steady_state=steady_state_level(ens, tail_fraction),
        ensemble_convergence=convergence_iteration(ens, window, factor, tail_fraction),
    )
