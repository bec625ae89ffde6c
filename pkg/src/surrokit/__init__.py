"""surrokit: surrogate metamodeling and variability-aware robust optimization.

Subpackages cover the full flow against a pluggable simulator:

- ``space``: bounded parameter domains and unit-cube normalization.
- ``sampling``: random Latin Hypercube designs and the CSV exchange format.
- ``kriging``: ordinary-kriging interpolation and leave-one-out resampling.
- ``ann``: tanh-hidden-layer networks with a damped least-squares trainer.
- ``pipeline``: sample -> simulate -> resample -> train -> verify bundles.
- ``mcstats``: Gaussian Monte Carlo variation studies and summaries.
- ``pso``: particle swarm minimization of mean + k*sigma objectives.
- ``oracle``: simulator contract plus the packaged synthetic oracle.
- ``cli``: reproducible command-line front end over file formats.
"""

from .ann import NetworkTopology, TrainingConfig, forward, forward_batch, rmse, train
from .kriging import (
    KrigingModel,
    Variogram,
    bootstrap_resample,
    empirical_semivariogram,
    fit_variogram,
)
from .mcstats import MCConfig, MCReport, histogram, monte_carlo
from .oracle import SimulatorInterface, SyntheticPLLOracle, pll_space
from .pipeline import MetamodelBundle, PipelineConfig, build_metamodels, verify
from .pso import ObjectiveSpec, OptimizationResult, SwarmConfig, objective_eval, pso_optimize
from .sampling import SampleSet, lhs_sample, load_samples, save_samples
from .space import ParameterDef, ParameterSpace, space_around_nominals

__version__ = "0.1.0"

__all__ = [
    "NetworkTopology", "TrainingConfig", "forward", "forward_batch", "rmse", "train",
    "KrigingModel", "Variogram", "bootstrap_resample", "empirical_semivariogram",
    "fit_variogram",
    "MCConfig", "MCReport", "histogram", "monte_carlo",
    "SimulatorInterface", "SyntheticPLLOracle", "pll_space",
    "MetamodelBundle", "PipelineConfig", "build_metamodels", "verify",
    "ObjectiveSpec", "OptimizationResult", "SwarmConfig", "objective_eval",
    "pso_optimize",
    "SampleSet", "lhs_sample", "load_samples", "save_samples",
    "ParameterDef", "ParameterSpace", "space_around_nominals",
    "__version__",
]
