"""Learning the compressed response is faster than learning h itself.

Both filters use the same step size and the same pilot. The compressive
filter has 289 taps instead of 500, so its error decays sooner.
"""
import numpy as np

from csid import (AdaptiveState, DistortionRecorder, SeededRng, apply_measurement, build_measurement_operator,
                  compressive_desired_reduced, conventional_desired, gen_random_filter, gen_sparse_system,
                  run_adaptation)

rng = SeededRng(11)
N, L, k, q, mu, noise = 500, 80, 40, 2, 0.003, 0.01
system = gen_sparse_system(rng, N, k)
op = build_measurement_operator(gen_random_filter(rng, L, 1.0 / L), N, q, 1)
pilot = rng.generator.standard_normal(20000)

plain = conventional_desired(system, pilot, rng.derive(1), noise)
_, plain_traj = run_adaptation(AdaptiveState.zeros(N, mu), pilot, plain.desired, "lms",
                               DistortionRecorder(system.h, 1000))

comp = compressive_desired_reduced(op, system, pilot[:10000], rng.derive(1), noise)
_, comp_traj = run_adaptation(AdaptiveState.zeros(op.M, mu), pilot, comp.desired, "lms",
                              DistortionRecorder(apply_measurement(op, system.h), 1000))

print("iteration  direct LMS   compressive LMS")
for i in range(len(plain_traj)):
    c = f"{comp_traj[i]:.3e}" if i < len(comp_traj) else ""
    print(f"{i * 1000:9d}  {plain_traj[i]:.3e}    {c}")
print(f"tail levels: direct {np.mean(plain_traj[-3:]):.2e}, compressive {np.mean(comp_traj[-3:]):.2e}")
