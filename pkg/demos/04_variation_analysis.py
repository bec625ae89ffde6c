"""Monte Carlo process-variation study over the fast metamodels.

Perturbs all 21 parameters with independent Gaussians (sigma = 10% of
nominal, clamped to the box), pushes 1000 draws through the metamodel
bundle and prints the per-FoM statistics with a text histogram.
"""

import os

import numpy as np

from surrokit import MCConfig, SyntheticPLLOracle, build_metamodels, monte_carlo
from surrokit.pipeline import MetamodelBundle

oracle = SyntheticPLLOracle.load_default()
space = oracle.space

bundle_dir = "/tmp/surrokit_demo_bundle"
if os.path.isdir(bundle_dir):
    bundle = MetamodelBundle.load(bundle_dir)
    print(f"loaded bundle from {bundle_dir}")
else:
    bundle = build_metamodels(oracle, space, n_samples=100, seed=42)
    print("trained a fresh bundle (run demo 03 first to reuse one)")

report = monte_carlo(bundle, space, space.nominal,
                     MCConfig(n_runs=1000, sigma_fraction=0.10, seed=8))

print(f"\n{'FoM':>14s} {'mean':>12s} {'std':>12s} {'std/mean':>9s}")
for fom in report.fom_names:
    s = report.stats[fom]
    print(f"{fom:>14s} {s.mean:12.4e} {s.std:12.4e} {s.std / s.mean:9.1%}")

fom = "power"
s = report.stats[fom]
print(f"\n{fom} histogram ({report.n_runs} runs):")
peak = s.hist_counts.max()
for k in range(len(s.hist_counts)):
    bar = "#" * int(round(40 * s.hist_counts[k] / peak))
    print(f"  {s.hist_edges[k]:.3e} | {bar} {s.hist_counts[k]}")

# the same study against the slow oracle, for reference
truth = monte_carlo(oracle, space, space.nominal,
                    MCConfig(n_runs=1000, sigma_fraction=0.10, seed=8))
print(f"\nmetamodel vs oracle, {fom}: "
      f"mean {s.mean:.4e} / {truth.mean(fom):.4e}, "
      f"std {s.std:.4e} / {truth.std(fom):.4e}")
rel = abs(s.mean - truth.mean(fom)) / truth.mean(fom)
print(f"mean tracks the simulator within {rel:.2%}")
