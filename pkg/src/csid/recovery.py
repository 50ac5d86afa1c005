"""l1-regularized least squares by iterative shrinkage-thresholding.

Minimizes ``0.5 * ||y - Phi s||^2 + lam * ||s||_1`` and uses it to turn the
compressed-domain weight estimate back into a sparse impulse response.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import InvalidArgument, NumericalFailure
from .measurement import MeasurementOperator
from .signal_core import as_signal


@dataclass(frozen=True)
class RecoveryProblem:
    y: np.ndarray
    op: MeasurementOperator
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise InvalidArgument(f"lambda must be positive, got {self.lam}")
        if np.shape(self.y) != (self.op.M,):
            raise InvalidArgument(f"y has shape {np.shape(self.y)}, operator expects ({self.op.M},)")


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 5000
    tolerance: float = 1e-8
    acceleration: str = "basic"  # "basic" | "accelerated"
    polish: bool = True
    power_tolerance: float = 0.01
    # warm-start stages at geometrically decreasing lambda before the target;
    # 0 disables. Each stage shrinks lambda by continuation_factor.
    continuation: bool = False
    continuation_factor: float = 0.3

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidArgument("max_iterations must be >= 1")
        if self.acceleration not in ("basic", "accelerated"):
            raise InvalidArgument(f"unknown acceleration mode {self.acceleration!r}")
        if not 0 < self.continuation_factor < 1:
            raise InvalidArgument("continuation_factor must lie in (0, 1)")


@dataclass
class RecoveryResult:
    s_hat: np.ndarray
    objective_trajectory: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    lipschitz: float = float("nan")


def objective(problem: RecoveryProblem, s) -> float:
    s = as_signal(s, "s")
    if s.size != problem.op.N:
        raise InvalidArgument(f"s has length {s.size}, operator expects {problem.op.N}")
    r = problem.y - problem.op.matrix @ s
    return 0.5 * float(r @ r) + problem.lam * float(np.abs(s).sum())


def soft_threshold(v, tau: float) -> np.ndarray:
    if tau < 0:
        raise InvalidArgument(f"threshold must be >= 0, got {tau}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def gram_spectral_bound(A: np.ndarray, tol: float = 0.01) -> float:
    """Largest eigenvalue of ``A.T @ A`` to relative accuracy ``tol``.

    Lanczos (Krylov-accelerated power iteration) from a fixed start vector,
    so the value is deterministic; tiny problems use a dense SVD.
    """
    n = A.shape[1]
    if min(A.shape) <= 8:
        return float(np.linalg.norm(A, 2) ** 2) if A.size else 0.0
    gram = LinearOperator((n, n), matvec=lambda v: A.T @ (A @ v), dtype=np.float64)
    try:
        val = eigsh(gram, k=1, which="LA", tol=0.1 * tol, v0=np.ones(n), return_eigenvectors=False)
    except ArpackNoConvergence:
        return float(np.linalg.norm(A, 2) ** 2)
    return max(float(val[0]), 0.0)


def _objective(A, y, lam, s):
    r = y - A @ s
    return 0.5 * float(r @ r) + lam * float(np.abs(s).sum())


def _polish(A, y, lam, s):
    # Exact minimizer on the current support with its sign pattern, if consistent.
    S = np.flatnonzero(s)
    if S.size == 0 or S.size > A.shape[0]:
        return None
    AS = A[:, S]
    sg = np.sign(s[S])
    try:
        sol = np.linalg.solve(AS.T @ AS, AS.T @ y - lam * sg)
    except np.linalg.LinAlgError:
        return None
    if np.any(np.sign(sol) != sg):
        return None
    cand = np.zeros_like(s)
    cand[S] = sol
    return cand


def _shrinkage(A, Aty, y, lam, step, s, max_iter, tol, accelerated):
    """Run shrinkage iterations from ``s``; returns (s, trajectory, iterations, converged)."""
    f_cur = _objective(A, y, lam, s)
    traj = [f_cur]
    z = s.copy()
    t = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        base = z if accelerated else s
        grad = A.T @ (A @ base) - Aty
        s_new = soft_threshold(base - step * grad, step * lam)
        f_new = _objective(A, y, lam, s_new)
        if accelerated and f_new > f_cur:
            # restart momentum: plain step from the current iterate
            t = 1.0
            grad = A.T @ (A @ s) - Aty
            s_new = soft_threshold(s - step * grad, step * lam)
            f_new = _objective(A, y, lam, s_new)
            z = s_new
        elif accelerated:
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            z = s_new + ((t - 1.0) / t_next) * (s_new - s)
            t = t_next
        if not math.isfinite(f_new):
            raise NumericalFailure(f"non-finite objective at iteration {it}")
        change = abs(f_cur - f_new)
        s, f_prev, f_cur = s_new, f_cur, f_new
        traj.append(f_cur)
        if change <= tol * max(f_prev, np.finfo(float).tiny):
            return s, traj, it, True
    return s, traj, it, False


def solve_l1(problem: RecoveryProblem, config: SolverConfig = SolverConfig()) -> RecoveryResult:
    """Iterative shrinkage with step ``1/Lf``, ``Lf`` bounding ``eig_max(Phi^T Phi)``.

    ``accelerated`` adds Nesterov momentum and restarts it whenever the
    objective would increase, so the recorded trajectory is non-increasing in
    both modes. ``continuation`` first solves a sequence of larger-lambda
    problems, each warm-starting the next; only the final, target-lambda
    stage is recorded. With ``polish`` the final support is re-solved exactly
    (kept only if sign-consistent and no worse).
    """
    A = problem.op.matrix
    y = np.asarray(problem.y, dtype=np.float64)
    lam = float(problem.lam)
    N = A.shape[1]

    # inflate so an estimate accurate to power_tolerance still bounds the true value
    lf = gram_spectral_bound(A, config.power_tolerance) * (1.0 + config.power_tolerance)
    s = np.zeros(N)
    if lf == 0.0:
        return RecoveryResult(s_hat=s, objective_trajectory=[_objective(A, y, lam, s)], iterations=1,
                              converged=True, lipschitz=lf)

    step = 1.0 / lf
    Aty = A.T @ y
    accelerated = config.acceleration == "accelerated"
    used = 0
    if config.continuation:
        stage_lam = float(np.max(np.abs(Aty)))
        while stage_lam * config.continuation_factor > lam and used < config.max_iterations:
            stage_lam *= config.continuation_factor
            s, _, n, _ = _shrinkage(A, Aty, y, stage_lam, step, s, config.max_iterations - used,
                                    max(config.tolerance, 1e-6), accelerated)
            used += n
    s, traj, n, converged = _shrinkage(A, Aty, y, lam, step, s, max(1, config.max_iterations - used),
                                       config.tolerance, accelerated)
    used += n
    f_cur = traj[-1]

    if config.polish:
        # candidate supports: as found, and with negligible entries pruned
        peak = float(np.max(np.abs(s))) if s.any() else 0.0
        best = None
        for rel in (0.0, 1e-4, 1e-2):
            trimmed = np.where(np.abs(s) > rel * peak, s, 0.0)
            cand = _polish(A, y, lam, trimmed)
            if cand is None:
                continue
            f_cand = _objective(A, y, lam, cand)
            if f_cand <= f_cur and (best is None or f_cand < best[1]):
                best = (cand, f_cand)
        if best is not None:
            s, f_cur = best
            traj.append(f_cur)

    return RecoveryResult(s_hat=s, objective_trajectory=traj, iterations=used,
                          converged=converged, lipschitz=lf)


@dataclass(frozen=True)
class LambdaRule:
    """``fixed``: lam = value; ``scaled``: lam = value * ||Phi^T y||_inf."""

    kind: str = "scaled"
    value: float = 0.01

    def __post_init__(self):
        if self.kind not in ("fixed", "scaled"):
            raise InvalidArgument(f"unknown lambda rule {self.kind!r}")
        if self.value <= 0:
            raise InvalidArgument("lambda rule value must be positive")

    def resolve(self, op: MeasurementOperator, y) -> float:
        if self.kind == "fixed":
            return self.value
        return self.value * float(np.max(np.abs(op.matrix.T @ y)))


def fixed(lam: float) -> LambdaRule:
    return LambdaRule("fixed", lam)


def scaled(c: float = 0.01) -> LambdaRule:
    return LambdaRule("scaled", c)


def debias(op: MeasurementOperator, y, s) -> np.ndarray:
    """Least-squares refit of ``y`` on the support of ``s``.

    Removes the l1 shrinkage of the retained coefficients; supports larger
    than ``M`` are left as they are.
    """
    S = np.flatnonzero(s)
    if S.size == 0 or S.size > op.M:
        return np.asarray(s, dtype=np.float64).copy()
    out = np.zeros(op.N)
    out[S] = np.linalg.lstsq(op.matrix[:, S], y, rcond=None)[0]
    return out


def recover_system(w_hat, op: MeasurementOperator, lambda_rule: LambdaRule = LambdaRule(),
                   config: SolverConfig = SolverConfig(), debias_support: bool = False) -> np.ndarray:
    """Estimate the length-N sparse system from adapted compressed-domain weights.

    With ``debias_support`` the l1 solution only selects the support and the
    coefficients are refit by least squares (see :func:`debias`).
    """
    w_hat = np.asarray(w_hat, dtype=np.float64)
    if w_hat.shape != (op.M,):
        raise InvalidArgument(f"w_hat has shape {w_hat.shape}, operator expects ({op.M},)")
    lam = lambda_rule.resolve(op, w_hat)
    if lam == 0.0:
        # only reachable for Phi^T w_hat = 0, where s = 0 is optimal for any lambda
        return np.zeros(op.N)
    s = solve_l1(RecoveryProblem(y=w_hat, op=op, lam=lam), config).s_hat
    return debias(op, w_hat, s) if debias_support else s
