"""Sparse systems, random filters and the decimated-convolution operator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .signal_core import SeededRng, as_signal, convolve_full, downsample, gaussian_vector


@dataclass(frozen=True)
class SparseSystem:
    h: np.ndarray
    k: int

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.h)


@dataclass(frozen=True)
class RandomFilter:
    f: np.ndarray

    @property
    def L(self) -> int:
        return self.f.size


def gen_sparse_system(rng: SeededRng, N: int, k: int) -> SparseSystem:
    """Length-``N`` system with ``k`` N(0, 1) taps at uniformly drawn positions."""
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if not 0 <= k <= N:
        raise InvalidArgument(f"k must lie in [0, N={N}], got {k}")
    h = np.zeros(N)
    if k:
        pos = rng.generator.choice(N, size=k, replace=False)
        vals = rng.generator.standard_normal(k)
        # a standard normal draw of exactly 0.0 would break the support count
        vals[vals == 0.0] = np.finfo(float).tiny
        h[pos] = vals
    h.setflags(write=False)
    return SparseSystem(h=h, k=k)


def gen_random_filter(rng: SeededRng, L: int, variance: float = 1.0) -> RandomFilter:
    """``L`` i.i.d. Gaussian taps with the given variance.

    The experiment presets use ``variance = 1/L`` (unit expected energy).
    """
    if L < 1:
        raise InvalidArgument(f"L must be >= 1, got {L}")
    if variance <= 0:
        raise InvalidArgument(f"filter tap variance must be positive, got {variance}")
    f = gaussian_vector(rng, L, 0.0, variance)
    f.setflags(write=False)
    return RandomFilter(f=f)


def measurement_rows(N: int, L: int, q: int, phase: int) -> int:
    return -(-(N + L - 1 - phase) // q)


@dataclass(frozen=True)
class MeasurementOperator:
    """Rows ``q*i + phase`` of the full ``(N+L-1) x N`` convolution matrix of ``f``.

    Usable as a dense matrix (``matrix``) or matrix-free (``matvec`` /
    ``rmatvec``); both routes agree to rounding.
    """

    f: np.ndarray
    N: int
    q: int
    phase: int
    matrix: np.ndarray = field(repr=False)

    @property
    def L(self) -> int:
        return self.f.size

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __matmul__(self, s):
        return self.matrix @ s

    def matvec(self, s) -> np.ndarray:
        """Matrix-free ``Phi @ s`` via convolution and decimation."""
        return downsample(convolve_full(s, self.f), self.q, self.phase)

    def rmatvec(self, y) -> np.ndarray:
        """Matrix-free ``Phi.T @ y``: upsample at ``phase``, correlate with ``f``."""
        y = np.asarray(y, dtype=np.float64)
        full = np.zeros(self.N + self.L - 1)
        full[self.phase::self.q] = y
        # (C^T z)[j] = sum_t f[t] z[j + t]
        return np.correlate(full, self.f, mode="valid")


def build_measurement_operator(f, N: int, q: int, phase: int) -> MeasurementOperator:
    if isinstance(f, RandomFilter):
        f = f.f
    f = as_signal(f, "f")
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if q < 1:
        raise InvalidArgument(f"q must be >= 1, got {q}")
    if not 0 <= phase < q:
        raise InvalidArgument(f"phase must lie in [0, {q}), got {phase}")
    L = f.size
    M = measurement_rows(N, L, q, phase)
    if M < 1:
        raise InvalidArgument(f"no measurement rows for N={N}, L={L}, q={q}, phase={phase}")
    rows = q * np.arange(M)[:, None] + phase
    lag = rows - np.arange(N)[None, :]
    inside = (lag >= 0) & (lag < L)
    matrix = np.where(inside, f[np.clip(lag, 0, L - 1)], 0.0)
    matrix.setflags(write=False)
    f = f.copy()
    f.setflags(write=False)
    return MeasurementOperator(f=f, N=N, q=q, phase=phase, matrix=matrix)


def apply_measurement(op: MeasurementOperator, s) -> np.ndarray:
    s = as_signal(s, "s")
    if s.size != op.N:
        raise InvalidArgument(f"signal length {s.size} does not match operator N={op.N}")
    return op.matrix @ s


def measurement_count_guidance(k: int, N: int, c: float = 1.0) -> int:
    """Advisory lower bound ``ceil(c * k * ln N)`` on the number of measurements."""
    if not 1 <= k <= N:
        raise InvalidArgument(f"need 1 <= k <= N, got k={k}, N={N}")
    return max(1, math.ceil(c * k * math.log(N)))
