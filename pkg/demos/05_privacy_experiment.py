"""A small seeded privacy-loss experiment.

Every solver in a cell runs on the same generated instances with the same
run seeds, so each utilitarian twin is compared to its baseline pair by
pair. The rendered table blanks means below 0.1, bolds 10.0 and up, and
caps the display at the run ceiling (20.0), so large grids stay easy
to scan.

A full-size grid (10-40 agents, domains up to 40, five tightness levels,
50 instances per cell) runs in minutes; this demo keeps it small.
"""

from udiscp.engine import RunLimits
from udiscp.experiments import (
    BASELINE_OF, ExperimentConfig, paired_comparison, render_table,
    run_experiment,
)

config = ExperimentConfig(
    agents=(10,),
    domains=(10,),
    tightness_pcts=(30, 50),
    solvers=("syncbt", "syncbtu", "abt", "abtu", "dsa", "dsau"),
    instances=15,
    base_seed=7,
    limits=RunLimits(max_privacy_loss=20.0, max_cycles=200,
                     max_messages=20_000),
)

rows = run_experiment(config)
print(render_table(rows))

print("paired comparisons (positive difference = twin revealed less):")
for twin, base in sorted(BASELINE_OF.items()):
    if twin in config.solvers:
        cmp = paired_comparison(rows, base, twin)
        print(f"  {base:7s} -> {twin:8s} mean {cmp.mean_baseline:6.2f} -> "
              f"{cmp.mean_twin:6.2f}   paired diff {cmp.mean_diff:+.2f} "
              f"(se {cmp.diff_se:.2f}, n={cmp.n})")
