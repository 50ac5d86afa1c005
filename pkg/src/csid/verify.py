"""Quick oracle and property checks run by ``csid verify``.

Each check is small (well under a second) and compares the library against
an independent computation: brute-force sums, closed forms or enumeration.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .adaptive import AdaptiveState, lms_update, za_lms_update
from .channel import compressive_desired_reduced, compressive_desired_structural
from .measurement import (SparseSystem, apply_measurement, build_measurement_operator, gen_random_filter,
                          gen_sparse_system)
from .recovery import RecoveryProblem, SolverConfig, objective, soft_threshold, solve_l1
from .signal_core import SeededRng, convolve_full, downsample, upsample


def _direct_convolution(a, b):
    out = np.zeros(len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def check_convolution():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b = rng.standard_normal(rng.integers(1, 12)), rng.standard_normal(rng.integers(1, 12))
        if not np.allclose(convolve_full(a, b), _direct_convolution(a, b), rtol=0, atol=1e-12):
            return False
    return True


def check_up_down():
    x = np.arange(1.0, 8.0)
    return all(np.array_equal(downsample(upsample(x, q), q, 0), x) for q in range(1, 6))


def check_measurement_dimension():
    f = gen_random_filter(SeededRng(1), 80)
    return (build_measurement_operator(f, 500, 2, 1).M == 289
            and build_measurement_operator(f, 500, 2, 0).M == 290)


def check_matrix_vs_streaming():
    rng = SeededRng(2)
    for q in (1, 2, 3):
        for phase in range(q):
            f = gen_random_filter(rng, 7)
            s = gen_sparse_system(rng, 30, 4).h
            op = build_measurement_operator(f, 30, q, phase)
            ref = downsample(_direct_convolution(s, f.f), q, phase)
            if np.max(np.abs(apply_measurement(op, s) - ref)) > 1e-10 * max(1.0, np.abs(ref).max()):
                return False
    return True


def check_polyphase():
    rng = SeededRng(3)
    for q in (1, 2, 3, 4):
        for phase in range(q):
            f = gen_random_filter(rng, 6)
            sysm = gen_sparse_system(rng, 20, 3)
            pilot = rng.generator.standard_normal(64)
            op = build_measurement_operator(f, 20, q, phase)
            a = compressive_desired_reduced(op, sysm, pilot, rng, 0.0).desired
            b = compressive_desired_structural(f, sysm, pilot, q, phase, rng, 0.0).desired
            if np.max(np.abs(a - b)) > 1e-10:
                return False
    return True


def check_lms_step():
    s = lms_update(AdaptiveState(np.zeros(2), mu=0.1), np.array([1.0, 2.0]), 1.0)
    z = za_lms_update(AdaptiveState(np.array([0.1, 0.2]), mu=0.1, rho=0.01), np.array([1.0, 2.0]), 0.5)
    return np.allclose(s.w, [0.1, 0.2], atol=1e-15) and np.allclose(z.w, [0.09, 0.19], atol=1e-15)


def check_orthogonal_l1():
    op = build_measurement_operator([1.0], 6, 1, 0)
    y = np.array([3.0, -0.2, 0.05, -1.5, 0.0, 0.7])
    res = solve_l1(RecoveryProblem(y=y, op=op, lam=0.3))
    return np.max(np.abs(res.s_hat - soft_threshold(y, 0.3))) < 1e-8


def check_support_enumeration():
    rng = SeededRng(0)
    f = gen_random_filter(rng, 6)
    op = build_measurement_operator(f, 12, 2, 1)
    h = gen_sparse_system(rng, 12, 2).h
    y = apply_measurement(op, h)
    def residual(S):
        A = op.matrix[:, S]
        coef = np.linalg.lstsq(A, y, rcond=None)[0]
        return float(np.sum((A @ coef - y) ** 2))

    best = min(itertools.combinations(range(12), 2), key=residual)
    lam = 1e-6 * np.max(np.abs(op.matrix.T @ y))
    res = solve_l1(RecoveryProblem(y=y, op=op, lam=lam), SolverConfig(max_iterations=20000, tolerance=1e-12,
                                                                  acceleration="accelerated", continuation=True))
    support = tuple(np.flatnonzero(np.abs(res.s_hat) > 1e-6))
    return support == tuple(best) and np.sum((res.s_hat - h) ** 2) / np.sum(h ** 2) < 1e-3


def check_objective():
    op = build_measurement_operator([1.0], 2, 1, 0)
    return math.isclose(objective(RecoveryProblem(np.array([1.0, 0.0]), op, 0.5), [1.0, 0.0]), 0.5)


CHECKS = {
    "convolution matches direct double sum": check_convolution,
    "downsample(upsample(x)) == x": check_up_down,
    "M = 289 (phase 1) / 290 (phase 0) at N=500, L=80, q=2": check_measurement_dimension,
    "dense operator == convolve + decimate": check_matrix_vs_streaming,
    "polyphase: structural == reduced plant (noiseless)": check_polyphase,
    "LMS / ZA-LMS single-step closed form": check_lms_step,
    "l1 solver == soft threshold for identity operator": check_orthogonal_l1,
    "l1 solver support == exhaustive least-squares support": check_support_enumeration,
    "objective evaluation": check_objective,
}


def run_checks(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    ok = True
    for name, fn in CHECKS.items():
        try:
            passed = bool(fn())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}", file=stream)
    return ok
