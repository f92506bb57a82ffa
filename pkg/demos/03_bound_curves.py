#!/usr/bin/env python3
"""Bound curves over the sample count: how much data buys a certificate.

For each N the pipeline solves the sampled program once, then converts
(gamma_hat, eta_hat) into a probabilistic upper bound at each confidence
level; the deterministic lower bounds come for free.  Stability is
certified at confidence `level` once the upper bound drops below 1.

Outputs land in ./sweep-demo: sweep.csv, bounds.svg (self-contained),
plot_bounds.py (matplotlib companion), summary.txt.
"""

import cslscert as cc

cfg = cc.ExperimentConfig(
    system_path=str(cc.bundled_example_path()),
    N_list=(200, 500, 1_000, 2_000, 5_000, 10_000),
    confidence_levels=(0.95, 0.99),
    seed=1,
    out_dir="sweep-demo",
)

result = cc.run_sweep(cfg)

print(f"{'N':>6} {'level':>6} {'lower(cyc)':>11} {'gamma_hat':>10} "
      f"{'upper':>8}  certified")
for (N, level, rep) in result.reports:
    upper = f"{rep.upper_bound:8.4f}" if rep.upper_bound != float("inf") else "     inf"
    print(f"{N:>6} {level:>6.2f} {rep.lower_bound_cycles:>11.6f} "
          f"{rep.gamma_hat:>10.6f} {upper}  {rep.stability_certified}")

print()
for level in cfg.confidence_levels:
    first = cc.first_certification(result.reports, level)
    if first is None:
        print(f"level {level}: no certificate in this sweep")
    else:
        print(f"level {level}: stability certified from N = {first}")

print(f"\nartifacts: {result.csv_path}, {result.svg_path},")
print(f"           {result.plot_script_path}, {result.summary_path}")
