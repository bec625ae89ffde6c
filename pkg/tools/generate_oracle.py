#!/usr/bin/env python3
"""One-shot generator for the packaged synthetic oracle coefficients.

Run from the repository root:

    python tools/generate_oracle.py

Writes src/surrokit/data/pll_oracle.json. The output is a committed
artifact: it is generated from the fixed seed below and never at import
time, so downstream numbers stay stable. Re-running reproduces the file
byte for byte.

Construction, per figure of merit (all in normalized coordinates):
  * linear term: random direction with no near-zero component, scaled so
    the 10%-of-nominal Gaussian variation study lands at a target
    coefficient of variation (5-20% band);
  * quadratic form: symmetric, cross-coupling ~40% of parameter pairs,
    scaled to 10% of the linear term's spread over the uniform box;
  * ripple: product of three sines, 4% of the linear spread;
  * offset: pins the value at the nominal point to the calibration
    target.
The locking-time gradient is built anticorrelated with the power
gradient so optimizing power against a locking-time bound is a genuine
trade-off.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from surrokit.space import space_around_nominals  # noqa: E402

SEED = 13771
OUT = Path(__file__).resolve().parents[1] / "src" / "surrokit" / "data" / "pll_oracle.json"

# calibration targets at the nominal point
TARGETS = {
    "power": 2.48e-3,        # W
    "frequency": 2.66e9,     # Hz
    "locking_time": 5.51e-6, # s
    "jitter": 16.80e-9,      # s
}
# coefficient of variation under the 10%-of-nominal Gaussian study
COV = {"power": 0.15, "frequency": 0.08, "locking_time": 0.10, "jitter": 0.12}

QUAD_FRACTION = 0.04    # quad spread / linear spread over the uniform box
RIPPLE_FRACTION = 0.016 # ripple spread / linear spread over the uniform box
PAIR_DENSITY = 0.40     # fraction of parameter pairs with a cross-term
MIN_COMPONENT = 0.30    # floor on |a_i| before scaling (relative)

N_CALIB = 40000


def build_space():
    # synthetic 180nm-flavored values: 8 gate lengths, 8 widths, 5 oxide
    # thicknesses; all invented, bounds at nominal +-30%
    lengths = 180e-9 * np.array([1.0, 1.2, 1.5, 2.0, 1.0, 1.1, 1.8, 2.5])
    widths = 0.6e-6 * np.array([1.0, 1.5, 2.2, 3.0, 4.5, 0.7, 1.2, 6.0])
    tox = 4.1e-9 * np.array([1.0, 1.0, 1.02, 0.98, 1.0])
    nominals = np.concatenate([lengths, widths, tox])
    names = [f"p{i:02d}" for i in range(1, 22)]
    return space_around_nominals(names, nominals, spread=0.30)


def direction_with_floor(rng, d):
    """Random unit-ish direction with every |component| above the floor."""
    a = rng.uniform(MIN_COMPONENT, 1.0, size=d) * rng.choice([-1.0, 1.0], size=d)
    return a / np.linalg.norm(a)


def anticorrelated_direction(rng, base, corr=-0.8):
    """Unit direction with the given correlation against ``base``."""
    d = len(base)
    w = rng.standard_normal(d)
    w -= (w @ base) * base
    w /= np.linalg.norm(w)
    v = corr * base + np.sqrt(1.0 - corr**2) * w
    # re-apply the component floor, then renormalize
    small = np.abs(v) < MIN_COMPONENT / np.sqrt(d)
    v[small] = np.sign(v[small] + 1e-300) * MIN_COMPONENT / np.sqrt(d)
    return v / np.linalg.norm(v)


def draw_quad(rng, d):
    B = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            if i == j:
                if rng.random() < 0.8:
                    B[i, i] = rng.standard_normal()
            elif rng.random() < PAIR_DENSITY:
                val = rng.standard_normal()
                B[i, j] = B[j, i] = val
    return B


def ripple_terms(rng, d):
    dims = rng.choice(d, size=3, replace=False)
    return [
        {"dim": int(k), "omega": float(rng.uniform(3.0, 6.5)), "phase": float(rng.uniform(0.0, 2 * np.pi))}
        for k in dims
    ]


def ripple_values(U, amplitude, terms):
    vals = np.full(U.shape[0], amplitude)
    for t in terms:
        vals *= np.sin(t["omega"] * U[:, t["dim"]] + t["phase"])
    return vals


def main():
    rng = np.random.default_rng(SEED)
    space = build_space()
    d = space.d
    u0 = space.normalize(space.nominal)

    # fixed calibration samples: Gaussian (the variation study measure,
    # clipped to the box like the Monte Carlo module does) and uniform
    calib = np.random.default_rng(SEED + 1)
    U_mc = np.clip(u0 + calib.standard_normal((N_CALIB, d)) / 6.0, 0.0, 1.0)
    U_un = calib.random((N_CALIB, d))

    directions = {
        "power": direction_with_floor(rng, d),
        "frequency": direction_with_floor(rng, d),
        "jitter": direction_with_floor(rng, d),
    }
    directions["locking_time"] = anticorrelated_direction(rng, directions["power"])

    foms = {}
    for name in TARGETS:
        target, cov = TARGETS[name], COV[name]
        a = directions[name].copy()
        a *= cov * abs(target) / (U_mc @ a).std()
        lin_spread = (U_un @ a).std()

        B = draw_quad(rng, d)
        quad_vals = np.einsum("ij,jk,ik->i", U_un, B, U_un)
        B *= QUAD_FRACTION * lin_spread / quad_vals.std()

        terms = ripple_terms(rng, d)
        base = ripple_values(U_un, 1.0, terms)
        amplitude = RIPPLE_FRACTION * lin_spread / base.std()

        offset = target - (
            float(a @ u0) + float(u0 @ B @ u0) + float(ripple_values(u0[None, :], amplitude, terms)[0])
        )
        foms[name] = {
            "offset": offset,
            "linear": a.tolist(),
            "quad": B.tolist(),
            "ripple": {"amplitude": amplitude, "terms": terms},
        }

        # --- sanity: calibration, variation band, coupling density ---
        def value(U):
            return offset + U @ a + np.einsum("ij,jk,ik->i", U, B, U) + ripple_values(U, amplitude, terms)

        v_nom = value(u0[None, :])[0]
        assert abs(v_nom - target) <= 1e-9 * abs(target), (name, v_nom, target)
        mc_vals = value(U_mc)
        cov_got = mc_vals.std() / abs(mc_vals.mean())
        assert 0.05 <= cov_got <= 0.20, (name, cov_got)
        pairs = sum(
            1 for i in range(d) for j in range(i + 1, d) if B[i, j] != 0.0
        )
        assert pairs >= 0.30 * d * (d - 1) / 2, (name, pairs)
        assert np.all(np.abs(a) > 0.0), name
        print(f"{name:>13s}: nominal {v_nom:.6e}  cov {cov_got:.3f}  coupled pairs {pairs}")

    corr = float(
        directions["power"] @ directions["locking_time"]
    )
    assert corr <= -0.6, corr
    print(f"power/locking gradient correlation: {corr:.3f}")

    payload = {
        "format_version": "1",
        "generator_seed": SEED,
        "description": "synthetic four-FoM oracle over 21 invented device parameters",
        "space": space.to_dict(),
        "fom_order": list(TARGETS),
        "foms": foms,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
