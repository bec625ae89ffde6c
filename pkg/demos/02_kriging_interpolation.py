"""Ordinary kriging from the ground up on a 1-D toy response.

Estimates the empirical semivariogram, fits a model to it, builds the
interpolator and shows the properties that make kriging attractive:
exact interpolation, unit weight sum, and sensible behavior between
samples.
"""

import numpy as np

from surrokit.kriging import (
    KrigingModel,
    empirical_semivariogram,
    fit_variogram,
    select_variogram,
)

rng = np.random.default_rng(3)
x = np.sort(rng.random(15))[:, None]
y = np.sin(2 * np.pi * x[:, 0]) + 0.3 * x[:, 0]

# -- empirical semivariogram: spread of response differences per lag ------
emp = empirical_semivariogram(x, y, n_bins=8)
print("lag      gamma_hat  pairs")
for lag, gamma, count in emp:
    print(f"{lag:.3f}  {gamma:9.4f}  {count:5d}")

fit = fit_variogram(emp, "gaussian")
print(f"\ncurve fit: nugget={fit.nugget:.2e} sill={fit.sill:.3f} "
      f"range={fit.range:.3f}")

# prediction-oriented refit (cross-validation over a range ladder)
vg = select_variogram(x, y)
print(f"cv refit:  nugget={vg.nugget:.2e} sill={vg.sill:.3f} range={vg.range:.3f}")

# -- the interpolator ------------------------------------------------------
model = KrigingModel(x, y, vg)
print("\ntraining point reproduction (zero nugget => exact):")
for i in (0, 7, 14):
    print(f"  y[{i}] = {y[i]:+.6f}   prediction = {model.predict(x[i]):+.6f}")

q = np.array([0.5])
lam, mu = model.weights(q)
print(f"\nweights at x=0.5: sum = {lam.sum():.12f} (always 1), "
      f"largest |weight| on neighbor {np.argmax(np.abs(lam))}")

grid = np.linspace(0, 1, 9)[:, None]
preds = model.predict_batch(grid)
print("\nx     truth    kriging")
for g, p in zip(grid[:, 0], preds):
    print(f"{g:.3f} {np.sin(2 * np.pi * g) + 0.3 * g:+.4f}  {p:+.4f}")
