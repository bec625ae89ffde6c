"""Why train a network on top of kriging at all: batch prediction speed.

Kriging solves a fresh right-hand side per query against a factorized
system; the network is two small matrix products. Same 1000 queries,
same training data, four figures of merit each.
"""

import os
import time

from surrokit import SyntheticPLLOracle, build_metamodels, lhs_sample
from surrokit.kriging import KrigingModel, fit_variogram_to_data
from surrokit.pipeline import MetamodelBundle, simulate_samples

oracle = SyntheticPLLOracle.load_default()
space = oracle.space

bundle_dir = "/tmp/surrokit_demo_bundle"
if os.path.isdir(bundle_dir):
    bundle = MetamodelBundle.load(bundle_dir)
else:
    bundle = build_metamodels(oracle, space, n_samples=100, seed=42)

train = lhs_sample(space, 100, seed=5)
simulated = simulate_samples(oracle, space, train)
krig = {fom: KrigingModel(simulated.inputs, simulated.responses[fom],
                          fit_variogram_to_data(simulated.inputs,
                                                simulated.responses[fom]))
        for fom in bundle.fom_names()}

queries = lhs_sample(space, 1000, seed=6).inputs
queries_native = space.denormalize_many(queries)

for fom in bundle.fom_names():  # warm-up
    bundle.predict_batch(fom, queries_native)
    krig[fom].predict_batch(queries)

repeats = 20
t0 = time.perf_counter()
for _ in range(repeats):
    for fom in bundle.fom_names():
        bundle.predict_batch(fom, queries_native)
t_net = time.perf_counter() - t0

t0 = time.perf_counter()
for _ in range(repeats):
    for fom in bundle.fom_names():
        krig[fom].predict_batch(queries)
t_krig = time.perf_counter() - t0

n_preds = repeats * 4 * 1000
print(f"{n_preds} predictions each (1000 queries x 4 FoMs x {repeats} repeats)")
print(f"  network bundle: {t_net:.3f} s  ({n_preds / t_net:,.0f} predictions/s)")
print(f"  kriging:        {t_krig:.3f} s  ({n_preds / t_krig:,.0f} predictions/s)")
print(f"  speedup:        {t_krig / t_net:.1f}x")
