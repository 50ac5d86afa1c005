"""Plant simulators: the direct path and the compressive front end.

The compressive plant interpolates the pilot by ``q`` (zero insertion),
passes it through the random filter and the unknown system, adds receiver
noise and decimates. By the polyphase identity the cascade seen from the
original-rate pilot is an FIR filter with taps ``Phi_f @ h``; the reduced
form simulates that filter directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidArgument
from .measurement import MeasurementOperator, RandomFilter, SparseSystem, apply_measurement
from .signal_core import SeededRng, as_signal, convolve_full, gaussian_vector, upsample

STREAM_BLOCK = 1 << 14


@dataclass(frozen=True)
class PlantOutput:
    desired: np.ndarray
    transmitted_pilot_count: int

    @property
    def iterations(self) -> int:
        return self.desired.size


def _fir(taps, x):
    # causal FIR with zero pre-history, direct form
    return lfilter(taps, [1.0], x)


def _noise(rng, n, variance):
    if variance < 0:
        raise InvalidArgument(f"noise variance must be >= 0, got {variance}")
    if variance == 0:
        return np.zeros(n)
    return gaussian_vector(rng, n, 0.0, variance)


def conventional_desired(h: SparseSystem, pilot, rng: SeededRng, noise_variance: float) -> PlantOutput:
    """``d[n] = h @ x^(n) + v[n]``; one desired sample per pilot sample."""
    pilot = as_signal(pilot, "pilot")
    d = _fir(h.h, pilot) + _noise(rng, pilot.size, noise_variance)
    return PlantOutput(desired=d, transmitted_pilot_count=pilot.size)


def compressive_desired_reduced(
    op: MeasurementOperator, h: SparseSystem, pilot, rng: SeededRng, noise_variance: float
) -> PlantOutput:
    """``d[n] = (Phi_f h) @ x^(n) + v[n]`` with regressors from the original-rate pilot."""
    if op.N != h.N:
        raise InvalidArgument(f"operator N={op.N} does not match system N={h.N}")
    pilot = as_signal(pilot, "pilot")
    g = apply_measurement(op, h.h)
    d = _fir(g, pilot) + _noise(rng, pilot.size, noise_variance)
    return PlantOutput(desired=d, transmitted_pilot_count=op.q * pilot.size)


def compressive_desired_structural(
    f: RandomFilter,
    h: SparseSystem,
    pilot,
    q: int,
    phase: int,
    rng: SeededRng,
    noise_variance: float,
    block: int = STREAM_BLOCK,
) -> PlantOutput:
    """Simulate the full chain: upsample, filter by ``f`` then ``h``, add noise, decimate.

    The pilot is streamed in blocks of ``block`` original-rate samples with
    the filter state carried across blocks. Noise is white at the
    interpolated rate, so the decimated noise has the same variance.
    """
    if q < 1:
        raise InvalidArgument(f"q must be >= 1, got {q}")
    if not 0 <= phase < q:
        raise InvalidArgument(f"phase must lie in [0, {q}), got {phase}")
    if isinstance(f, RandomFilter):
        f = f.f
    pilot = as_signal(pilot, "pilot")
    cascade = convolve_full(f, h.h)
    zi = np.zeros(cascade.size - 1)
    out = []
    for start in range(0, pilot.size, block):
        up = upsample(pilot[start:start + block], q)
        y, zi = lfilter(cascade, [1.0], up, zi=zi)
        y = y + _noise(rng, y.size, noise_variance)
        out.append(y[phase::q])
    d = np.concatenate(out)
    return PlantOutput(desired=d, transmitted_pilot_count=q * pilot.size)
