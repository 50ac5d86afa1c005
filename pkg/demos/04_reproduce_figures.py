"""Run the four Monte-Carlo presets and write tables and plots.

Pass a smaller trial count for a quick look, e.g. ``python 04_reproduce_figures.py 10``.
The full presets take a few minutes on one core. With only a handful of trials
the ensemble-mean curve stays noisy, so convergence iterations come out late.
"""
import sys
from pathlib import Path

from csid.harness import make_config, run_experiment, write_outputs

trials = int(sys.argv[1]) if len(sys.argv) > 1 else None
out_root = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("demo_results")

for preset in ("fig4", "fig5", "fig6", "fig7"):
    cfg = make_config(preset, **({"trials": trials} if trials else {}))
    result = run_experiment(cfg)
    paths = write_outputs(result, out_root / preset)
    print(f"== {preset} ({cfg.trials} trials) -> {paths['results']}")
    for row in result.rows:
        print(f"  {row.method:26s} {cfg.sweep_param}={row.swept_value:<8g} "
              f"distortion {row.mean_distortion:.3e}  convergence {row.mean_convergence_iter:g}")
