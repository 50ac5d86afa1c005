"""Seeded random generation and single-stage multirate signal primitives.

Signals are plain 1-D ``float64`` numpy arrays.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidArgument

RNG_ALGORITHM = "numpy.PCG64"


class SeededRng:
    """A reproducible random stream identified by ``(seed, algorithm)``.

    ``derive(tag)`` returns an independent child stream that depends only on
    ``(seed, tag)``; the harness uses it to hand the same noise realization
    to every method of a trial.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int, *, _key: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._key = _key
        ss = np.random.SeedSequence(seed, spawn_key=_key)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def derive(self, tag: int) -> "SeededRng":
        return SeededRng(self.seed, _key=self._key + (int(tag),))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, key={self._key}, algorithm={self.algorithm!r})"


def as_signal(x, name="signal") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidArgument(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise InvalidArgument(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite samples")
    return arr


def gaussian_vector(rng: SeededRng, n: int, mean: float = 0.0, variance: float = 1.0) -> np.ndarray:
    """Draw ``n`` i.i.d. Gaussian samples.

    Zero variance returns a constant signal without consuming the stream.
    """
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if variance < 0:
        raise InvalidArgument(f"variance must be >= 0, got {variance}")
    if variance == 0:
        return np.full(n, float(mean))
    return mean + np.sqrt(variance) * rng.generator.standard_normal(n)


def convolve_full(a, b) -> np.ndarray:
    """Full linear convolution, length ``len(a) + len(b) - 1`` (direct form)."""
    a = as_signal(a, "a")
    b = as_signal(b, "b")
    return np.convolve(a, b, mode="full")


def upsample(x, q: int) -> np.ndarray:
    """Zero-insertion upsampling: ``out[q*i] = x[i]``, zeros elsewhere."""
    if q < 1:
        raise InvalidArgument(f"rate q must be >= 1, got {q}")
    x = as_signal(x, "x")
    out = np.zeros(q * x.size)
    out[::q] = x
    return out


def downsample(x, q: int, phase: int = 0) -> np.ndarray:
    """Keep every ``q``-th sample starting at ``phase``."""
    if q < 1:
        raise InvalidArgument(f"rate q must be >= 1, got {q}")
    if not 0 <= phase < q:
        raise InvalidArgument(f"phase must lie in [0, {q}), got {phase}")
    x = as_signal(x, "x")
    return x[phase::q].copy()


def add_awgn(x, rng: SeededRng, variance: float) -> np.ndarray:
    x = as_signal(x, "x")
    if variance < 0:
        raise InvalidArgument(f"variance must be >= 0, got {variance}")
    if variance == 0:
        return x.copy()
    return x + gaussian_vector(rng, x.size, 0.0, variance)
