"""LMS and zero-attracting LMS weight updates.

Error convention throughout: ``e = w @ x - d`` (filter output minus desired),
so both updates step along ``-mu * e * x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DivergenceError, InvalidArgument

ALGORITHMS = ("lms", "za_lms")


@dataclass(frozen=True)
class AdaptiveState:
    w: np.ndarray
    mu: float
    rho: float = 0.0
    iteration: int = 0

    def __post_init__(self):
        if self.mu <= 0:
            raise InvalidArgument(f"step size mu must be positive, got {self.mu}")
        if self.rho < 0:
            raise InvalidArgument(f"rho must be nonnegative, got {self.rho}")

    @classmethod
    def zeros(cls, dim: int, mu: float, rho: float = 0.0) -> "AdaptiveState":
        return cls(w=np.zeros(dim), mu=mu, rho=rho)


def regressors(pilot, dim: int) -> np.ndarray:
    """Sliding regressor windows ``[x_n, x_{n-1}, ..., x_{n-dim+1}]`` as rows.

    Pre-history is zero. Returns a read-only strided view of shape
    ``(len(pilot), dim)``.
    """
    pilot = np.asarray(pilot, dtype=np.float64)
    rev = np.concatenate([pilot[::-1], np.zeros(dim - 1)])
    windows = np.lib.stride_tricks.sliding_window_view(rev, dim)
    return windows[::-1]


def _check_dims(w, x):
    if x.shape != w.shape:
        raise InvalidArgument(f"regressor length {x.shape} does not match weights {w.shape}")


def filter_output(state: AdaptiveState, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    _check_dims(state.w, x)
    return float(state.w @ x)


def instantaneous_cost(e: float) -> float:
    return 0.5 * e * e


def sign_vec(x) -> np.ndarray:
    """Elementwise ``x/|x|`` with ``sign(0) = 0``."""
    return np.sign(np.asarray(x, dtype=np.float64))


def _finish(state, w_new):
    if not np.all(np.isfinite(w_new)):
        raise DivergenceError(state.iteration)
    return replace(state, w=w_new, iteration=state.iteration + 1)


def lms_update(state: AdaptiveState, x, d: float) -> AdaptiveState:
    x = np.asarray(x, dtype=np.float64)
    _check_dims(state.w, x)
    with np.errstate(over="ignore", invalid="ignore"):
        e = state.w @ x - d
        w_new = state.w - state.mu * e * x
    return _finish(state, w_new)


def za_lms_update(state: AdaptiveState, x, d: float) -> AdaptiveState:
    x = np.asarray(x, dtype=np.float64)
    _check_dims(state.w, x)
    with np.errstate(over="ignore", invalid="ignore"):
        e = state.w @ x - d
        w_new = state.w - state.mu * e * x
        if state.rho:
            w_new = w_new - state.rho * np.sign(state.w)
    return _finish(state, w_new)


class DistortionRecorder:
    """Records ``||ref - w||^2 / ||ref||^2`` every ``stride`` iterations.

    Entry ``i`` is taken after iteration ``i * stride`` has been applied.
    """

    def __init__(self, reference, stride: int = 1):
        self.reference = np.asarray(reference, dtype=np.float64)
        energy = float(self.reference @ self.reference)
        if energy <= 0:
            raise InvalidArgument("reference vector must be nonzero")
        if stride < 1:
            raise InvalidArgument(f"stride must be >= 1, got {stride}")
        self._inv_energy = 1.0 / energy
        self.stride = stride
        self.values: list[float] = []

    def __call__(self, iteration: int, w: np.ndarray):
        r = self.reference - w
        with np.errstate(over="ignore", invalid="ignore"):
            value = float(r @ r) * self._inv_energy
        if not math.isfinite(value):
            raise DivergenceError(iteration, f"distortion overflowed at iteration {iteration}")
        self.values.append(value)

    def trajectory(self) -> np.ndarray:
        return np.asarray(self.values)


def run_adaptation(
    initial: AdaptiveState,
    pilot,
    desired,
    algorithm: str = "lms",
    recorder: Optional[Callable[[int, np.ndarray], None]] = None,
    stride: Optional[int] = None,
):
    """Run one update per desired sample.

    The regressor for iteration ``n`` is the zero-padded window of the pilot
    ending at sample ``n``. ``recorder(n, w)`` is called after every
    ``stride``-th update (``stride`` defaults to the recorder's own, else 1).
    Returns ``(final_state, trajectory)``; the trajectory is the recorder's
    ``trajectory()`` when it has one.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidArgument(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    desired = np.asarray(desired, dtype=np.float64)
    pilot = np.asarray(pilot, dtype=np.float64)
    n_iter = desired.size
    if pilot.size < n_iter:
        raise InvalidArgument(f"pilot has {pilot.size} samples, need {n_iter}")
    if stride is None:
        stride = getattr(recorder, "stride", 1)

    w = np.array(initial.w, dtype=np.float64, copy=True)
    dim = w.size
    mu = float(initial.mu)
    rho = float(initial.rho) if algorithm == "za_lms" else 0.0
    X = regressors(pilot[:n_iter], dim)
    start = initial.iteration

    # In-place hot loop; mirrors lms_update / za_lms_update exactly.
    # Overflow is caught by the finiteness check, not by numpy warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        _loop(w, X, desired, mu, rho, recorder, stride, start)
    if not np.all(np.isfinite(w)):
        raise DivergenceError(start + n_iter - 1)

    final = replace(initial, w=w, iteration=start + n_iter)
    traj = recorder.trajectory() if hasattr(recorder, "trajectory") else None
    return final, traj


def _loop(w, X, desired, mu, rho, recorder, stride, start):
    for n in range(desired.size):
        x = X[n]
        e = w @ x - desired[n]
        if not math.isfinite(e):
            raise DivergenceError(start + n)
        if rho:
            attract = rho * np.sign(w)
            w -= (mu * e) * x
            w -= attract
        else:
            w -= (mu * e) * x
        if recorder is not None and n % stride == 0:
            recorder(start + n, w)
