import json
from importlib import resources

import numpy as np
import pytest

from surrokit.errors import FormatVersionError, OutOfBounds
from surrokit.oracle import FOM_NAMES, SimulatorInterface, SyntheticPLLOracle, pll_space

# Calibration targets for the packaged oracle at its nominal point.
NOMINAL_FOMS = {
    "power": 2.48e-3,
    "frequency": 2.66e9,
    "locking_time": 5.51e-6,
    "jitter": 16.80e-9,
}


@pytest.fixture(scope="module")
def oracle():
    return SyntheticPLLOracle.load_default()


@pytest.fixture(scope="module")
def payload():
    text = resources.files("surrokit.data").joinpath("pll_oracle.json").read_text()
    return json.loads(text)


def straight_line_eval(payload, space, name, x):
    """Element-by-element reimplementation of the response surface."""
    u = space.normalize(x)
    c = payload["foms"][name]
    total = c["offset"]
    for i in range(len(u)):
        total += c["linear"][i] * u[i]
    for i in range(len(u)):
        for j in range(len(u)):
            total += u[i] * c["quad"][i][j] * u[j]
    ripple = c["ripple"]["amplitude"]
    for t in c["ripple"]["terms"]:
        ripple *= np.sin(t["omega"] * u[t["dim"]] + t["phase"])
    return total + ripple


def test_nominal_calibration_pinned(oracle):
    vals = oracle.evaluate(oracle.space.nominal)
    for name, target in NOMINAL_FOMS.items():
        assert abs(vals[name] - target) <= 1e-9 * abs(target)


def test_space_is_21_parameters(oracle):
    assert oracle.space.d == 21
    assert oracle.space.names == [f"p{i:02d}" for i in range(1, 22)]
    assert oracle.fom_names() == list(FOM_NAMES)


def test_matches_straight_line_reimplementation(oracle, payload):
    rng = np.random.default_rng(1)
    space = oracle.space
    for _ in range(25):
        x = space.denormalize(rng.random(21))
        vals = oracle.evaluate(x)
        for name in FOM_NAMES:
            expected = straight_line_eval(payload, space, name, x)
            assert vals[name] == pytest.approx(expected, rel=1e-12)


def test_quadratic_form_symmetric(payload):
    for name in FOM_NAMES:
        B = np.array(payload["foms"][name]["quad"])
        assert np.array_equal(B, B.T)


def test_cross_term_coupling_density(payload):
    d = 21
    for name in FOM_NAMES:
        B = np.array(payload["foms"][name]["quad"])
        pairs = np.count_nonzero(np.triu(B, k=1))
        assert pairs >= 0.30 * d * (d - 1) / 2


def test_nonconstant_in_every_parameter(oracle):
    # nudge each parameter off nominal; every FoM must move
    space = oracle.space
    base = oracle.evaluate(space.nominal)
    for i in range(space.d):
        x = space.nominal
        x[i] = space.nominal[i] * 1.25
        moved = oracle.evaluate(x)
        for name in FOM_NAMES:
            assert moved[name] != base[name], (name, i)


def test_batch_matches_loop(oracle):
    rng = np.random.default_rng(2)
    X = oracle.space.denormalize_many(rng.random((100, 21)))
    rows = oracle.evaluate_batch(X)
    assert len(rows) == 100
    for i, row in enumerate(rows):
        single = oracle.evaluate(X[i])
        assert row == single
    cols = oracle.evaluate_columns(X)
    for name in FOM_NAMES:
        assert np.array_equal(cols[name], np.array([r[name] for r in rows]))


def test_batch_of_one_and_empty(oracle):
    x = oracle.space.nominal
    rows = oracle.evaluate_batch(x[None, :])
    assert rows == [oracle.evaluate(x)]
    assert oracle.evaluate_batch(np.empty((0, 21))) == []


def test_out_of_bounds_rejected(oracle):
    x = oracle.space.nominal
    x[0] = oracle.space.upper[0] * 1.5
    with pytest.raises(OutOfBounds):
        oracle.evaluate(x)


def test_load_from_path_equals_default(tmp_path, oracle, payload):
    path = tmp_path / "oracle.json"
    path.write_text(json.dumps(payload))
    clone = SyntheticPLLOracle.load(path)
    x = oracle.space.denormalize(np.full(21, 0.3))
    assert clone.evaluate(x) == oracle.evaluate(x)


def test_format_version_rejected(payload):
    bad = dict(payload)
    bad["format_version"] = "99"
    with pytest.raises(FormatVersionError):
        SyntheticPLLOracle(bad)


def test_pll_space_helper(oracle):
    assert pll_space().fingerprint() == oracle.space.fingerprint()


def test_default_simulator_interface_batches_by_row():
    class TwoFom(SimulatorInterface):
        def fom_names(self):
            return ["a", "b"]

        def evaluate(self, x):
            return {"a": float(x[0]), "b": float(x[0] ** 2)}

    sim = TwoFom()
    X = np.array([[1.0], [2.0], [3.0]])
    cols = sim.evaluate_columns(X)
    assert np.array_equal(cols["a"], [1, 2, 3])
    assert np.array_equal(cols["b"], [1, 4, 9])


def test_transpose_form_recomputation_identical(oracle, payload):
    # symmetric quadratic form: evaluating against B.T must reproduce the value
    rng = np.random.default_rng(5)
    space = oracle.space
    for name in FOM_NAMES:
        c = payload["foms"][name]
        B = np.array(c["quad"])
        a = np.array(c["linear"])
        for _ in range(5):
            u = rng.random(21)
            direct = float(u @ B @ u)
            transposed = float(u @ B.T @ u)
            assert transposed == pytest.approx(direct, rel=1e-12)
            x = space.denormalize(u)
            val = oracle.evaluate(x)[name]
            ripple = c["ripple"]["amplitude"]
            for t in c["ripple"]["terms"]:
                ripple *= np.sin(t["omega"] * u[t["dim"]] + t["phase"])
            recomputed = c["offset"] + float(a @ u) + transposed + float(ripple)
            assert val == pytest.approx(recomputed, rel=1e-12)
