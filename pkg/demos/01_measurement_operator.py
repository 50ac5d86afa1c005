"""Filtering with a random filter and decimating is a fixed linear map.

Here we build the map for a 500-tap system, look at its size, and check
that it gives the same samples as running the physical chain (upsample the
pilot, filter by f and then h, keep every q-th sample).
"""
import numpy as np

from csid import (SeededRng, build_measurement_operator, compressive_desired_reduced,
                  compressive_desired_structural, gen_random_filter, gen_sparse_system,
                  measurement_count_guidance)

rng = SeededRng(7)
N, L, k, q = 500, 80, 40, 2
system = gen_sparse_system(rng, N, k)
f = gen_random_filter(rng, L, variance=1.0 / L)

for phase in (0, 1):
    op = build_measurement_operator(f, N, q, phase)
    print(f"phase {phase}: operator is {op.M} x {op.N}")

op = build_measurement_operator(f, N, q, 1)
print(f"rough lower bound on measurements for k={k}: {measurement_count_guidance(k, N)}")

pilot = rng.generator.standard_normal(2000)
fast = compressive_desired_reduced(op, system, pilot, SeededRng(0), 0.0)
slow = compressive_desired_structural(f, system, pilot, q, 1, SeededRng(0), 0.0)
print(f"largest gap between the two plant models: {np.max(np.abs(fast.desired - slow.desired)):.1e}")
print(f"pilot samples sent: reduced model {fast.transmitted_pilot_count}, "
      f"physical chain {slow.transmitted_pilot_count}")
