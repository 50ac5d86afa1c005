"""Getting h back from its compressed image.

Without noise an l1 solver recovers the sparse system exactly. With noisy
adapted weights, the support found by l1 plus a least-squares refit beats
the direct LMS estimate.
"""
import numpy as np

from csid import (AdaptiveState, LambdaRule, SeededRng, SolverConfig, apply_measurement,
                  build_measurement_operator, compressive_desired_reduced, conventional_desired,
                  gen_random_filter, gen_sparse_system, recover_system, relative_distortion, run_adaptation)

rng = SeededRng(3)
op = build_measurement_operator(gen_random_filter(rng, 32), 100, 2, 0)
h = gen_sparse_system(rng, 100, 5).h
exact = recover_system(apply_measurement(op, h), op, LambdaRule("scaled", 1e-6),
                       SolverConfig(max_iterations=20000, tolerance=1e-12, acceleration="accelerated",
                                    continuation=True))
print(f"noiseless, N=100 from M={op.M}: relative error {relative_distortion(h, exact):.1e}")

rng = SeededRng(5)
N, mu = 500, 0.003
system = gen_sparse_system(rng, N, 10)
op = build_measurement_operator(gen_random_filter(rng, 80, 1.0 / 80), N, 2, 1)
pilot = rng.generator.standard_normal(20000)
comp = compressive_desired_reduced(op, system, pilot[:10000], rng.derive(1), 0.01)
w_hat = run_adaptation(AdaptiveState.zeros(op.M, mu), pilot, comp.desired)[0].w
plain = conventional_desired(system, pilot, rng.derive(1), 0.01)
w_lms = run_adaptation(AdaptiveState.zeros(N, mu), pilot, plain.desired)[0].w

fast = SolverConfig(acceleration="accelerated")
lasso = recover_system(w_hat, op, LambdaRule("scaled", 0.015), fast)
refit = recover_system(w_hat, op, LambdaRule("scaled", 0.015), fast, debias_support=True)
print(f"k=10, noisy: direct LMS {relative_distortion(system.h, w_lms):.2e}, "
      f"l1 only {relative_distortion(system.h, lasso):.2e}, "
      f"l1 support + refit {relative_distortion(system.h, refit):.2e}")
print(f"support found: {np.count_nonzero(refit)} taps (true {np.count_nonzero(system.h)})")
