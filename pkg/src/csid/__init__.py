"""Sparse FIR system identification in a compressed domain.

An adaptive filter learns ``Phi_f @ h`` (a random-filter, decimated
measurement of the unknown sparse response ``h``) instead of ``h`` itself;
an l1 solver then reconstructs ``h`` and removes much of the adaptation noise.
"""
from .adaptive import (AdaptiveState, DistortionRecorder, filter_output, instantaneous_cost, lms_update,
                       run_adaptation, sign_vec, za_lms_update)
from .channel import (PlantOutput, compressive_desired_reduced, compressive_desired_structural,
                      conventional_desired)
from .errors import DivergenceError, InvalidArgument, NumericalFailure
from .measurement import (MeasurementOperator, RandomFilter, SparseSystem, apply_measurement,
                          build_measurement_operator, gen_random_filter, gen_sparse_system,
                          measurement_count_guidance)
from .metrics import (TrialTrajectory, aggregate_trials, convergence_iteration, relative_distortion,
                      steady_state_level)
from .recovery import (LambdaRule, RecoveryProblem, RecoveryResult, SolverConfig, objective, recover_system,
                       soft_threshold, solve_l1)
from .signal_core import SeededRng, add_awgn, convolve_full, downsample, gaussian_vector, upsample

__version__ = "0.1.0"
