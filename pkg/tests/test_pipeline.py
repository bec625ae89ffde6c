import numpy as np
import pytest

from surrokit import ann
from surrokit.errors import MissingResponses, SimulatorFailure, TooFewPoints
from surrokit.oracle import SimulatorInterface
from surrokit.pipeline import (
    MetamodelBundle,
    PipelineConfig,
    build_metamodels,
    build_metamodels_from_samples,
    holdout_split,
    simulate_samples,
    verify,
)
from surrokit.sampling import SampleSet, lhs_sample
from surrokit.seeds import substream
from surrokit.space import ParameterDef, ParameterSpace


class LinearSim(SimulatorInterface):
    def fom_names(self):
        return ["total", "weighted"]

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return {"total": float(x.sum()), "weighted": float(x @ np.arange(1, len(x) + 1))}


class NanSim(SimulatorInterface):
    def fom_names(self):
        return ["bad"]

    def evaluate(self, x):
        return {"bad": float("nan") if x[0] > 0.5 else 1.0}


def unit_space(d):
    return ParameterSpace(ParameterDef(f"p{i}", 0.0, 1.0, 0.5) for i in range(d))


def test_linear_simulator_trains_tightly():
    space = unit_space(3)
    bundle = build_metamodels(LinearSim(), space, n_samples=40, seed=5,
                              bootstrap=False)
    for fom, e in bundle.entries.items():
        assert e.rmse_relative <= 1e-3, fom


def test_bootstrap_flag_off_is_plain_flow():
    space = unit_space(3)
    plain = build_metamodels(LinearSim(), space, n_samples=30, seed=9, bootstrap=False)
    assert plain.provenance["bootstrap"] is False
    boot = build_metamodels(LinearSim(), space, n_samples=30, seed=9, bootstrap=True)
    assert boot.provenance["bootstrap"] is True
    # same design, same verification rows; only training labels differ
    assert plain.provenance["space_fingerprint"] == boot.provenance["space_fingerprint"]


def test_holdout_split_before_bootstrap_and_raw_verification():
    space = unit_space(4)
    sim = LinearSim()
    seed, n = 11, 40
    bundle = build_metamodels(sim, space, n_samples=n, seed=seed, bootstrap=True)

    # reconstruct the flow's sample set and split
    samples = lhs_sample(space, n, substream(seed, "lhs"))
    simulated = simulate_samples(sim, space, samples)
    _, hold_idx = holdout_split(n, 0.2, substream(seed, "holdout"))
    holdout = simulated.subset(hold_idx)

    for fom, e in bundle.entries.items():
        raw = holdout.responses[fom]
        preds = ann.forward_batch(e.net, holdout.inputs)
        expected = float(np.sqrt(np.mean((preds - raw) ** 2)))
        assert e.verification_rmse == pytest.approx(expected, rel=1e-12)


def test_full_determinism_bundle_bytes(tmp_path):
    space = unit_space(3)
    d1, d2 = tmp_path / "b1", tmp_path / "b2"
    for d in (d1, d2):
        bundle = build_metamodels(LinearSim(), space, n_samples=25, seed=3,
                                  bootstrap=True)
        bundle.save(d)
    for name in sorted(p.name for p in d1.iterdir()):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_bundle_save_load_round_trip(tmp_path):
    space = unit_space(2)
    bundle = build_metamodels(LinearSim(), space, n_samples=20, seed=1,
                              bootstrap=False)
    bundle.save(tmp_path / "bundle")
    loaded = MetamodelBundle.load(tmp_path / "bundle")
    assert loaded.fom_names() == bundle.fom_names()
    rng = np.random.default_rng(0)
    X = rng.random((10, 2))
    for fom in bundle.fom_names():
        assert np.array_equal(loaded.predict_batch(fom, X),
                              bundle.predict_batch(fom, X))
    assert loaded.provenance == bundle.provenance


def test_bundle_evaluate_matches_batch():
    space = unit_space(3)
    bundle = build_metamodels(LinearSim(), space, n_samples=20, seed=2,
                              bootstrap=False)
    x = np.array([0.2, 0.6, 0.9])
    single = bundle.evaluate(x)
    cols = bundle.evaluate_columns(x[None, :])
    for fom, val in single.items():
        assert val == pytest.approx(float(cols[fom][0]), abs=1e-12)


def test_simulator_failure_echoes_row():
    space = unit_space(2)
    with pytest.raises(SimulatorFailure) as exc:
        build_metamodels(NanSim(), space, n_samples=12, seed=0, bootstrap=False)
    assert exc.value.x[0] > 0.5


def test_too_few_samples_rejected():
    space = unit_space(2)
    with pytest.raises(TooFewPoints):
        build_metamodels(LinearSim(), space, n_samples=9, seed=0, bootstrap=False)


def test_missing_responses_rejected():
    space = unit_space(2)
    samples = lhs_sample(space, 15, seed=0)
    with pytest.raises(MissingResponses):
        build_metamodels_from_samples(samples, space, bootstrap=False, seed=0)


class TestVerify:
    def constant_net(self, d, value):
        return ann.NetworkTopology(d, 1, 1.0, np.zeros((1, d)), np.zeros(1),
                                   np.zeros(1), value)

    def test_memorized_holdout_is_zero_zero(self):
        net = self.constant_net(2, 4.0)
        holdout = SampleSet(inputs=np.array([[0.1, 0.2], [0.6, 0.8]]),
                            responses={"y": np.array([4.0, 4.0])})
        assert verify(net, holdout, "y") == (0.0, 0.0)

    def test_two_point_hand_case(self):
        net = self.constant_net(1, 1.0)
        holdout = SampleSet(inputs=np.array([[0.0], [1.0]]),
                            responses={"y": np.array([0.0, 2.0])})
        err, rel = verify(net, holdout, "y")
        assert err == pytest.approx(1.0, abs=1e-15)  # sqrt((1+1)/2)
        assert rel == pytest.approx(0.5, abs=1e-15)

    def test_missing_fom(self):
        net = self.constant_net(1, 0.0)
        holdout = SampleSet(inputs=np.array([[0.5]]), responses={"y": np.array([1.0])})
        with pytest.raises(MissingResponses):
            verify(net, holdout, "z")


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(holdout_fraction=1.0)
