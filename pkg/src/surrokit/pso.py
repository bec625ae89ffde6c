"""Particle swarm minimization of mean + k*sigma under a penalty constraint.

Each particle's fitness is a full (reduced-size) Monte Carlo variation
study at its position: the score is mu + k*sigma of the target figure of
merit plus a penalty proportional to the relative breach of the
constraint FoM's mean. All particles of one iteration share the same
inner Monte Carlo seed (common random numbers), so score differences
between particles reflect position, not sampling noise.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import MissingFoM, check_format_version
from .mcstats import MCConfig, MCReport, monte_carlo
from .sampling import lhs_sample
from .seeds import substream
from .space import ParameterSpace

FORMAT_VERSION = "1"


@dataclass
class ObjectiveSpec:
    """What to minimize and under which constraint.

    Score = mean(target) + k_sigma * std(target)
          + penalty_weight * max(0, relative constraint breach of the
            constraint FoM's mean). ``constraint_fom`` of None disables
    the penalty term.
    """

    target_fom: str
    k_sigma: float = 3.0
    constraint_fom: str | None = None
    constraint_bound: float | None = None
    constraint_sense: str = "le"
    penalty_weight: float = 100.0

    def __post_init__(self):
        if self.penalty_weight <= 0:
            raise ValueError("penalty_weight must be > 0")
        if self.constraint_sense not in ("le", "ge"):
            raise ValueError("constraint_sense must be 'le' or 'ge'")
        if self.constraint_fom is not None and self.constraint_bound is None:
            raise ValueError("constraint_fom needs a constraint_bound")


@dataclass
class SwarmConfig:
    n_particles: int = 30
    max_iterations: int = 100
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    mc: MCConfig = field(default_factory=lambda: MCConfig(n_runs=200))
    final_mc_runs: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if min(self.inertia, self.cognitive, self.social) < 0:
            raise ValueError("inertia/cognitive/social weights must be >= 0")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_score: float = np.inf


def constraint_violation(report: MCReport, spec: ObjectiveSpec) -> float:
    """Relative breach of the constraint FoM's mean; 0 when satisfied."""
    if spec.constraint_fom is None:
        return 0.0
    mu = report.mean(spec.constraint_fom)
    bound = spec.constraint_bound
    scale = abs(bound) if bound != 0 else 1.0
    if spec.constraint_sense == "le":
        return max(0.0, (mu - bound) / scale)
    return max(0.0, (bound - mu) / scale)


def objective_eval(report: MCReport, spec: ObjectiveSpec) -> float:
    """Robust score of one variation study under the objective spec."""
    if spec.target_fom not in report.stats:
        raise MissingFoM(f"report lacks target FoM {spec.target_fom!r}")
    if spec.constraint_fom is not None and spec.constraint_fom not in report.stats:
        raise MissingFoM(f"report lacks constraint FoM {spec.constraint_fom!r}")
    score = report.mean(spec.target_fom) + spec.k_sigma * report.std(spec.target_fom)
    return score + spec.penalty_weight * constraint_violation(report, spec)


def update_particle(p: Particle, global_best: np.ndarray, cfg: SwarmConfig,
                    rng) -> Particle:
    """One velocity/position step; positions clamp to the unit box.

    Draw order is tau_p then tau_g, each one uniform draw per dimension.
    Components that hit the box edge are clamped and their velocity
    zeroed.
    """
    d = p.position.shape[0]
    tau_p = rng.random(d)
    tau_g = rng.random(d)
    v = (cfg.inertia * p.velocity
         + cfg.cognitive * tau_p * (p.best_position - p.position)
         + cfg.social * tau_g * (global_best - p.position))
    x = p.position + v
    clamped = (x < 0.0) | (x > 1.0)
    x = np.clip(x, 0.0, 1.0)
    v = np.where(clamped, 0.0, v)
    return replace(p, position=x, velocity=v)


@dataclass
class OptimizationResult:
    best_x: np.ndarray            # native units
    best_score: float
    trace: np.ndarray             # global-best score after each iteration
    final_report: MCReport        # full-size study at best_x
    best_inner_seed: int          # inner MC seed active when best was found
    best_iteration: int
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "best_x": [float(v) for v in self.best_x],
            "best_score": self.best_score,
            "trace": [float(v) for v in self.trace],
            "best_inner_seed": self.best_inner_seed,
            "best_iteration": self.best_iteration,
            "feasible": self.feasible,
            "final_report": self.final_report.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizationResult":
        check_format_version(d)
        return cls(
            best_x=np.array(d["best_x"], dtype=float),
            best_score=float(d["best_score"]),
            trace=np.array(d["trace"], dtype=float),
            final_report=MCReport.from_dict(d["final_report"]),
            best_inner_seed=int(d["best_inner_seed"]),
            best_iteration=int(d["best_iteration"]),
            feasible=bool(d["feasible"]),
        )

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def pso_optimize(evaluator, space: ParameterSpace, spec: ObjectiveSpec,
                 cfg: SwarmConfig) -> OptimizationResult:
    """Minimize the robust objective over the box.

    Particles start on a Latin Hypercube design with zero velocity.
    Every iteration evaluates all particles at their current positions
    (inner Monte Carlo with that iteration's shared seed), updates local
    and global bests on strict improvement (ties keep the earlier
    holder), then moves the swarm. The returned report re-evaluates the
    winning position with a full-size study.
    """
    d = space.d
    init = lhs_sample(space, cfg.n_particles, substream(cfg.seed, "init"))
    particles = [
        Particle(position=init.inputs[i].copy(), velocity=np.zeros(d),
                 best_position=init.inputs[i].copy())
        for i in range(cfg.n_particles)
    ]
    move_rng = np.random.default_rng(substream(cfg.seed, "update"))

    best_score = np.inf
    best_x_norm = particles[0].position.copy()
    best_inner_seed = 0
    best_iteration = 0
    trace = np.empty(cfg.max_iterations)

    for it in range(cfg.max_iterations):
        inner_seed = substream(cfg.seed, "mc", it)
        inner_cfg = MCConfig(n_runs=cfg.mc.n_runs,
                             sigma_fraction=cfg.mc.sigma_fraction,
                             seed=inner_seed)
        for p in particles:
            x_native = space.denormalize(p.position)
            report = monte_carlo(evaluator, space, x_native, inner_cfg)
            score = objective_eval(report, spec)
            if score < p.best_score:
                p.best_score = score
                p.best_position = p.position.copy()
            if score < best_score:
                best_score = score
                best_x_norm = p.position.copy()
                best_inner_seed = inner_seed
                best_iteration = it
        trace[it] = best_score
        if it < cfg.max_iterations - 1:
            for i, p in enumerate(particles):
                particles[i] = update_particle(p, best_x_norm, cfg, move_rng)

    best_x = space.denormalize(best_x_norm)
    final_cfg = MCConfig(n_runs=cfg.final_mc_runs,
                         sigma_fraction=cfg.mc.sigma_fraction,
                         seed=substream(cfg.seed, "final"))
    final_report = monte_carlo(evaluator, space, best_x, final_cfg)
    feasible = constraint_violation(final_report, spec) == 0.0
    if not feasible:
        warnings.warn("no feasible particle found: best point still violates "
                      "the constraint under the final study", stacklevel=2)
    return OptimizationResult(
        best_x=best_x,
        best_score=float(best_score),
        trace=trace,
        final_report=final_report,
        best_inner_seed=best_inner_seed,
        best_iteration=best_iteration,
        feasible=feasible,
    )
