"""Metamodel build flow: sample, simulate, resample, train, verify.

One neural metamodel is produced per figure of merit. The verification
holdout is split off before any leave-one-out resampling touches the
responses, and holdout responses stay raw simulator values, so the
reported RMSE always measures fidelity to the simulator itself.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import ann, kriging
from .errors import (
    MissingResponses,
    NonFiniteLoss,
    SimulatorFailure,
    TooFewPoints,
    check_format_version,
)
from .sampling import SampleSet, lhs_sample
from .seeds import substream
from .space import ParameterSpace

FORMAT_VERSION = "1"

DEFAULT_HOLDOUT_FRACTION = 0.2


@dataclass
class PipelineConfig:
    """Knobs of the metamodel build flow.

    ``hidden_units`` of None means 2*d+1. ``training`` supplies the
    network trainer's schedule; its seed field is ignored here because
    each FoM trains from its own labeled substream of the flow seed.
    """

    holdout_fraction: float = DEFAULT_HOLDOUT_FRACTION
    hidden_units: int | None = None
    slope: float = 1.0
    variogram_kind: str = "gaussian"
    variogram_bins: int = kriging.DEFAULT_BINS
    training: ann.TrainingConfig = field(default_factory=ann.TrainingConfig)
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must be in (0, 1)")


@dataclass
class MetamodelEntry:
    fom: str
    net: ann.NetworkTopology
    verification_rmse: float
    rmse_relative: float


class MetamodelBundle:
    """One trained fast predictor per figure of merit, plus provenance.

    Acts as an evaluator: ``evaluate_columns`` on native-units rows
    normalizes once and runs every network's batch forward pass, which is
    the fast path the whole flow exists to provide.
    """

    def __init__(self, entries: list[MetamodelEntry], space: ParameterSpace,
                 provenance: dict):
        self.entries = {e.fom: e for e in entries}
        self.space = space
        self.provenance = dict(provenance)

    def fom_names(self) -> list[str]:
        return list(self.entries.keys())

    def entry(self, fom: str) -> MetamodelEntry:
        if fom not in self.entries:
            raise MissingResponses(f"bundle has no metamodel for {fom!r}")
        return self.entries[fom]

    def predict_batch(self, fom: str, X_native) -> np.ndarray:
        U = self.space.normalize_many(np.asarray(X_native, dtype=float))
        return ann.forward_batch(self.entry(fom).net, U)

    def evaluate(self, x) -> dict[str, float]:
        u = self.space.normalize(x)
        return {
            fom: ann.forward(e.net, u) for fom, e in self.entries.items()
        }

    def evaluate_columns(self, X) -> dict[str, np.ndarray]:
        U = self.space.normalize_many(np.asarray(X, dtype=float))
        return {
            fom: ann.forward_batch(e.net, U) for fom, e in self.entries.items()
        }

    # -- persistence: a directory with bundle.json + one model per FoM --

    def save(self, dirpath) -> None:
        os.makedirs(dirpath, exist_ok=True)
        meta = {
            "format_version": FORMAT_VERSION,
            "space": self.space.to_dict(),
            "provenance": self.provenance,
            "foms": [
                {
                    "name": e.fom,
                    "model_file": f"{e.fom}.model.json",
                    "verification_rmse": e.verification_rmse,
                    "rmse_relative": e.rmse_relative,
                }
                for e in self.entries.values()
            ],
        }
        with open(os.path.join(dirpath, "bundle.json"), "w", encoding="ascii") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
        for e in self.entries.values():
            with open(os.path.join(dirpath, f"{e.fom}.model.json"), "w",
                      encoding="ascii") as fh:
                json.dump(e.net.to_dict(), fh, indent=2)
                fh.write("\n")

    @classmethod
    def load(cls, dirpath) -> "MetamodelBundle":
        with open(os.path.join(dirpath, "bundle.json"), "r", encoding="ascii") as fh:
            meta = json.load(fh)
        check_format_version(meta)
        space = ParameterSpace.from_dict(meta["space"])
        entries = []
        for item in meta["foms"]:
            with open(os.path.join(dirpath, item["model_file"]), "r",
                      encoding="ascii") as fh:
                net = ann.NetworkTopology.from_dict(json.load(fh))
            entries.append(MetamodelEntry(
                fom=item["name"],
                net=net,
                verification_rmse=float(item["verification_rmse"]),
                rmse_relative=float(item["rmse_relative"]),
            ))
        return cls(entries, space, meta["provenance"])


def verify(net: ann.NetworkTopology, holdout: SampleSet, fom: str) -> tuple[float, float]:
    """(RMSE, RMSE / holdout response range) of a net on raw holdout rows.

    A zero response range with zero RMSE reports 0 by convention.
    """
    if fom not in holdout.responses:
        raise MissingResponses(f"holdout has no response column {fom!r}")
    actual = holdout.responses[fom]
    predicted = ann.forward_batch(net, holdout.inputs)
    err = ann.rmse(predicted, actual)
    spread = float(actual.max() - actual.min())
    rel = 0.0 if (err == 0.0 and spread == 0.0) else (err / spread if spread > 0 else float("inf"))
    return err, rel


def simulate_samples(simulator, space: ParameterSpace, samples: SampleSet) -> SampleSet:
    """Attach one response column per simulator FoM to a sample set."""
    X = space.denormalize_many(samples.inputs)
    columns = simulator.evaluate_columns(X)
    for name, vals in columns.items():
        vals = np.asarray(vals, dtype=float)
        bad = ~np.isfinite(vals)
        if bad.any():
            row = int(np.argmax(bad))
            raise SimulatorFailure(row, X[row])
    return samples.with_responses(columns)


def holdout_split(n: int, holdout_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (train_idx, holdout_idx) row split, both sorted."""
    rng = np.random.default_rng(seed)
    n_hold = min(max(1, int(round(holdout_fraction * n))), n - 1)
    perm = rng.permutation(n)
    return np.sort(perm[n_hold:]), np.sort(perm[:n_hold])


def build_metamodels_from_samples(samples: SampleSet, space: ParameterSpace,
                                  bootstrap: bool, seed: int,
                                  cfg: PipelineConfig | None = None) -> MetamodelBundle:
    """Train the per-FoM metamodels from an already-simulated sample set.

    Flow per FoM: split off the verification holdout, optionally relabel
    the training rows with their leave-one-out kriging predictions, train
    the network, verify against the raw holdout. The network always sees
    the original input design; only response labels change.
    """
    cfg = cfg or PipelineConfig()
    if not samples.responses:
        raise MissingResponses("sample set carries no response columns")
    if samples.n < 10:
        raise TooFewPoints(f"need at least 10 samples, got {samples.n}")
    for fom, vals in samples.responses.items():
        if not np.isfinite(vals).all():
            raise NonFiniteLoss(f"response column {fom!r} contains non-finite values")

    train_idx, hold_idx = holdout_split(samples.n, cfg.holdout_fraction,
                                        substream(seed, "holdout"))
    train_set = samples.subset(train_idx)
    holdout = samples.subset(hold_idx)

    hidden = cfg.hidden_units or (2 * samples.d + 1)
    entries = []
    for fom in samples.fom_names:
        labeled = train_set
        if bootstrap:
            labeled = kriging.bootstrap_resample(
                train_set, fom, kind=cfg.variogram_kind,
                n_bins=cfg.variogram_bins, threads=cfg.threads,
            )
        tcfg = ann.TrainingConfig(
            max_epochs=cfg.training.max_epochs,
            damping_init=cfg.training.damping_init,
            damping_up=cfg.training.damping_up,
            damping_down=cfg.training.damping_down,
            target_rmse=cfg.training.target_rmse,
            holdout_fraction=cfg.training.holdout_fraction,
            patience=cfg.training.patience,
            seed=substream(seed, "train", fom),
        )
        net, _history = ann.train(labeled.inputs, labeled.responses[fom],
                                  hidden_units=hidden, cfg=tcfg, slope=cfg.slope)
        err, rel = verify(net, holdout, fom)
        entries.append(MetamodelEntry(fom=fom, net=net,
                                      verification_rmse=err, rmse_relative=rel))

    provenance = {
        "space_fingerprint": space.fingerprint(),
        "n_samples": samples.n,
        "seed": seed,
        "bootstrap": bool(bootstrap),
        "hidden_units": hidden,
        "holdout_fraction": cfg.holdout_fraction,
        "variogram_kind": cfg.variogram_kind,
        "variogram_bins": cfg.variogram_bins,
    }
    return MetamodelBundle(entries, space, provenance)


def build_metamodels(simulator, space: ParameterSpace, n_samples: int, seed: int,
                     bootstrap: bool = True,
                     cfg: PipelineConfig | None = None) -> MetamodelBundle:
    """End-to-end flow from a simulator: LHS design, batch simulation,
    optional kriging relabeling, training, holdout verification."""
    samples = lhs_sample(space, n_samples, substream(seed, "lhs"))
    simulated = simulate_samples(simulator, space, samples)
    return build_metamodels_from_samples(simulated, space, bootstrap=bootstrap,
                                         seed=seed, cfg=cfg)
