"""Monte Carlo process-variation analysis over any evaluator.

Draws are independent Gaussians per parameter, centered on a nominal
point with standard deviation ``sigma_fraction * |nominal|``, clamped to
the space bounds so every evaluation stays inside the trained domain and
the run always consumes exactly ``n_runs`` draws from the stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyValues, MissingFoM, OutOfBoundsNominal, check_format_version
from .space import ParameterSpace

FORMAT_VERSION = "1"

DEFAULT_HISTOGRAM_BINS = 20


@dataclass
class MCConfig:
    n_runs: int = 1000
    sigma_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if self.n_runs < 2:
            raise ValueError("n_runs must be >= 2")
        if self.sigma_fraction < 0:
            raise ValueError("sigma_fraction must be >= 0")


def histogram(values, n_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width binning of a value vector: (edges, counts).

    Bins span [min, max]; the maximum value lands in the last bin so the
    counts always sum to len(values). A constant vector gets a unit-wide
    span centered on the value, leaving a single occupied bin.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyValues("cannot histogram an empty vector")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, n_bins + 1)
    # bins are [e_k, e_{k+1}) with the last bin closed on the right
    idx = np.searchsorted(edges[1:-1], values, side="right")
    counts = np.bincount(idx, minlength=n_bins)
    return edges, counts


@dataclass
class FomStats:
    mean: float
    std: float
    min: float
    max: float
    hist_edges: np.ndarray
    hist_counts: np.ndarray

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "hist_edges": self.hist_edges.tolist(),
            "hist_counts": self.hist_counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FomStats":
        return cls(
            mean=float(d["mean"]),
            std=float(d["std"]),
            min=float(d["min"]),
            max=float(d["max"]),
            hist_edges=np.array(d["hist_edges"], dtype=float),
            hist_counts=np.array(d["hist_counts"], dtype=int),
        )


@dataclass
class MCReport:
    """Summary statistics of one Monte Carlo run, per figure of merit."""

    stats: dict[str, FomStats]
    nominal: np.ndarray
    n_runs: int
    sigma_fraction: float
    seed: int

    def mean(self, fom: str) -> float:
        return self._get(fom).mean

    def std(self, fom: str) -> float:
        return self._get(fom).std

    def _get(self, fom: str) -> FomStats:
        if fom not in self.stats:
            raise MissingFoM(f"report has no FoM {fom!r} (has {list(self.stats)})")
        return self.stats[fom]

    @property
    def fom_names(self) -> list[str]:
        return list(self.stats.keys())

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "nominal": [float(v) for v in self.nominal],
            "config": {
                "n_runs": self.n_runs,
                "sigma_fraction": self.sigma_fraction,
                "seed": self.seed,
            },
            "foms": {name: s.to_dict() for name, s in self.stats.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MCReport":
        check_format_version(d)
        cfg = d["config"]
        return cls(
            stats={name: FomStats.from_dict(s) for name, s in d["foms"].items()},
            nominal=np.array(d["nominal"], dtype=float),
            n_runs=int(cfg["n_runs"]),
            sigma_fraction=float(cfg["sigma_fraction"]),
            seed=int(cfg["seed"]),
        )

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "MCReport":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_dict(json.load(fh))


def gaussian_draws(space: ParameterSpace, nominal, cfg: MCConfig,
                   covariance=None) -> np.ndarray:
    """The (n_runs, d) clamped Gaussian design a report is computed from.

    Standard-normal draws are taken first and then scaled, so two runs
    with the same seed but different sigma_fraction perturb along the
    same directions. Perturbations are independent per parameter unless
    an explicit ``covariance`` matrix (native units squared) is given,
    in which case it replaces the diagonal built from sigma_fraction.
    """
    nominal = np.asarray(nominal, dtype=float)
    if not space.contains(nominal):
        raise OutOfBoundsNominal(f"nominal {nominal.tolist()} outside the space box")
    rng = np.random.default_rng(cfg.seed)
    z = rng.standard_normal((cfg.n_runs, space.d))
    if covariance is not None:
        chol = np.linalg.cholesky(np.asarray(covariance, dtype=float))
        return space.clip(nominal[None, :] + z @ chol.T)
    sigma = cfg.sigma_fraction * np.abs(nominal)
    return space.clip(nominal[None, :] + z * sigma[None, :])


def monte_carlo(evaluator, space: ParameterSpace, nominal, cfg: MCConfig,
                histogram_bins: int = DEFAULT_HISTOGRAM_BINS,
                covariance=None, raw_sink: dict | None = None) -> MCReport:
    """Propagate Gaussian parameter variation through an evaluator.

    ``evaluator`` is anything with ``evaluate_columns(X) -> {fom: vector}``
    over native-units rows (both the synthetic simulator and a trained
    metamodel bundle qualify). Sample std uses the n-1 denominator.
    Passing a dict as ``raw_sink`` stores the raw draws and responses in
    it (keys "inputs" and "responses") for external plotting. See
    :func:`gaussian_draws` for the ``covariance`` override.
    """
    nominal = np.asarray(nominal, dtype=float)
    X = gaussian_draws(space, nominal, cfg, covariance=covariance)
    columns = evaluator.evaluate_columns(X)
    stats = {}
    for name, vals in columns.items():
        vals = np.asarray(vals, dtype=float)
        edges, counts = histogram(vals, histogram_bins)
        lo, hi = float(vals.min()), float(vals.max())
        if lo == hi:
            # identical values: report them exactly (mean() would round)
            mean, std = lo, 0.0
        else:
            mean, std = float(vals.mean()), float(vals.std(ddof=1))
        stats[name] = FomStats(
            mean=mean,
            std=std,
            min=lo,
            max=hi,
            hist_edges=edges,
            hist_counts=counts,
        )
    if raw_sink is not None:
        raw_sink["inputs"] = X
        raw_sink["responses"] = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
    return MCReport(
        stats=stats,
        nominal=nominal,
        n_runs=cfg.n_runs,
        sigma_fraction=cfg.sigma_fraction,
        seed=cfg.seed,
    )
