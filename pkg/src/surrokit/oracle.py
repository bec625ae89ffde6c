"""Pluggable simulator interface and the packaged synthetic oracle.

The synthetic oracle is an analytic stand-in for a slow circuit
simulator: four smooth response surfaces (power, output frequency,
locking time, jitter) over a 21-parameter box, each the sum of a
calibration offset, a linear term, a symmetric quadratic form with
cross-parameter coupling, and a low-amplitude sinusoidal ripple, all in
normalized coordinates.

Its coefficients were generated once by ``tools/generate_oracle.py``
from a fixed, documented seed and are shipped as package data; they are
never regenerated at runtime, so every number downstream of the oracle
is stable across installs. The parameter values are synthetic (invented
lengths/widths/oxide thicknesses), not a real device.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .errors import FormatVersionError
from .sampling import SampleSet, load_samples, save_samples  # noqa: F401  (re-export)
from .space import ParameterSpace

FOM_NAMES = ("power", "frequency", "locking_time", "jitter")

_ORACLE_RESOURCE = "pll_oracle.json"


class SimulatorInterface:
    """Contract every simulator (real or synthetic) fulfills.

    ``evaluate`` maps one native-units vector to a {fom: value} dict and
    must be deterministic and finite on in-bounds inputs. The batch
    helpers evaluate row by row, so batch results are elementwise equal
    to single evaluations; ``parallel_safe`` tells pipelines whether
    batches may be fanned out concurrently.
    """

    parallel_safe = True

    def fom_names(self) -> list[str]:
        raise NotImplementedError

    def evaluate(self, x) -> dict[str, float]:
        raise NotImplementedError

    def evaluate_batch(self, X) -> list[dict[str, float]]:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        return [self.evaluate(row) for row in X]

    def evaluate_columns(self, X) -> dict[str, np.ndarray]:
        rows = self.evaluate_batch(X)
        return {
            name: np.array([r[name] for r in rows], dtype=float)
            for name in self.fom_names()
        }


class SyntheticPLLOracle(SimulatorInterface):
    """Analytic four-FoM oracle calibrated to fixed nominal values.

    Per FoM:  value(x) = offset + a . u + u^T B u + r * prod sin(w u_i + phi)
    with u the normalized coordinates of x. B is symmetric with
    cross-terms on at least 30% of parameter pairs, and the locking-time
    surface is anticorrelated with the power surface so that minimizing
    power under a locking-time bound is a real trade-off.
    """

    def __init__(self, payload: dict):
        if str(payload.get("format_version")) != "1":
            raise FormatVersionError(
                f"unsupported oracle format_version {payload.get('format_version')!r}"
            )
        self.space = ParameterSpace.from_dict(payload["space"])
        self.generator_seed = int(payload["generator_seed"])
        self._foms = list(payload["fom_order"])
        self._coef = {}
        for name in self._foms:
            c = payload["foms"][name]
            B = np.array(c["quad"], dtype=float)
            if not np.allclose(B, B.T):
                raise ValueError(f"{name}: quadratic form must be symmetric")
            self._coef[name] = {
                "offset": float(c["offset"]),
                "linear": np.array(c["linear"], dtype=float),
                "quad": B,
                "ripple_amplitude": float(c["ripple"]["amplitude"]),
                "ripple_terms": [
                    (int(t["dim"]), float(t["omega"]), float(t["phase"]))
                    for t in c["ripple"]["terms"]
                ],
            }

    @classmethod
    def load_default(cls) -> "SyntheticPLLOracle":
        text = resources.files("surrokit.data").joinpath(_ORACLE_RESOURCE).read_text("ascii")
        return cls(json.loads(text))

    @classmethod
    def load(cls, path) -> "SyntheticPLLOracle":
        with open(path, "r", encoding="ascii") as fh:
            return cls(json.load(fh))

    def fom_names(self) -> list[str]:
        return list(self._foms)

    def evaluate(self, x) -> dict[str, float]:
        u = self.space.normalize(x)
        out = {}
        for name in self._foms:
            c = self._coef[name]
            val = c["offset"] + float(c["linear"] @ u) + float(u @ c["quad"] @ u)
            ripple = c["ripple_amplitude"]
            for dim, omega, phase in c["ripple_terms"]:
                ripple *= np.sin(omega * u[dim] + phase)
            out[name] = val + float(ripple)
        return out


def pll_space() -> ParameterSpace:
    """The packaged 21-parameter synthetic space (oracle's domain)."""
    return SyntheticPLLOracle.load_default().space
