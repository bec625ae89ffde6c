import pytest

from surrokit import cli
from surrokit.oracle import SyntheticPLLOracle


@pytest.fixture(scope="session")
def oracle():
    return SyntheticPLLOracle.load_default()


@pytest.fixture(scope="session")
def simulated_csv(tmp_path_factory):
    """A small sampled+simulated CSV over the packaged oracle."""
    root = tmp_path_factory.mktemp("flow")
    samples = str(root / "samples.csv")
    simulated = str(root / "simulated.csv")
    assert cli.main(["sample", "--space", "pll", "--n", "24", "--seed", "11",
                     "--out", samples]) == 0
    assert cli.main(["simulate", "--samples", samples, "--oracle", "pll",
                     "--out", simulated]) == 0
    return simulated


@pytest.fixture(scope="session")
def small_bundle(tmp_path_factory, simulated_csv):
    """A quickly-fitted metamodel bundle for CLI and PSO smoke tests."""
    bundle_dir = str(tmp_path_factory.mktemp("fit") / "bundle")
    assert cli.main(["fit", "--samples", simulated_csv, "--bootstrap", "on",
                     "--hidden", "8", "--max-epochs", "25", "--seed", "21",
                     "--out-bundle", bundle_dir]) == 0
    return bundle_dir
