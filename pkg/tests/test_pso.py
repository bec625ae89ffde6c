import numpy as np
import pytest

from surrokit.errors import MissingFoM
from surrokit.mcstats import MCConfig, monte_carlo
from surrokit.oracle import SimulatorInterface
from surrokit.pso import (
    ObjectiveSpec,
    OptimizationResult,
    Particle,
    SwarmConfig,
    objective_eval,
    pso_optimize,
    update_particle,
)
from surrokit.space import ParameterDef, ParameterSpace


class Sphere(SimulatorInterface):
    def __init__(self, target):
        self.target = np.asarray(target, dtype=float)

    def fom_names(self):
        return ["obj"]

    def evaluate(self, x):
        return {"obj": float(((np.asarray(x) - self.target) ** 2).sum())}

    def evaluate_columns(self, X):
        X = np.asarray(X, dtype=float)
        return {"obj": ((X - self.target) ** 2).sum(axis=1)}


def unit_space(d):
    return ParameterSpace(ParameterDef(f"p{i}", 0.0, 1.0, 0.5) for i in range(d))


def sigma0_cfg(**kw):
    defaults = dict(n_particles=8, max_iterations=20,
                    mc=MCConfig(n_runs=2, sigma_fraction=0.0, seed=0),
                    final_mc_runs=2, seed=1)
    defaults.update(kw)
    return SwarmConfig(**defaults)


def report_for(space, evaluator, x, seed=0, n_runs=50, sigma=0.1):
    return monte_carlo(evaluator, space, x, MCConfig(n_runs, sigma, seed))


class TestObjectiveEval:
    def make_report(self, mean, std, fom="power", extra=None):
        # tiny synthetic report without running a study
        from surrokit.mcstats import FomStats, MCReport

        stats = {fom: FomStats(mean, std, mean - std, mean + std,
                               np.array([0.0, 1.0]), np.array([1]))}
        for name, (m, s) in (extra or {}).items():
            stats[name] = FomStats(m, s, m - s, m + s, np.array([0.0, 1.0]),
                                   np.array([1]))
        return MCReport(stats=stats, nominal=np.zeros(1), n_runs=1,
                        sigma_fraction=0.0, seed=0)

    def test_mean_only(self):
        report = self.make_report(2.0, 0.0)
        spec = ObjectiveSpec(target_fom="power")
        assert objective_eval(report, spec) == 2.0

    def test_mean_plus_three_sigma(self):
        report = self.make_report(2.35e-3, 0.39e-3)
        spec = ObjectiveSpec(target_fom="power", k_sigma=3.0)
        assert objective_eval(report, spec) == pytest.approx(3.52e-3, rel=1e-12)

    def test_penalty_for_relative_breach(self):
        report = self.make_report(2.0, 0.0, extra={"lock": (1.1, 0.0)})
        spec = ObjectiveSpec(target_fom="power", k_sigma=0.0,
                             constraint_fom="lock", constraint_bound=1.0,
                             constraint_sense="le", penalty_weight=100.0)
        assert objective_eval(report, spec) == pytest.approx(2.0 + 10.0, rel=1e-12)

    def test_ge_sense(self):
        report = self.make_report(2.0, 0.0, extra={"freq": (0.8, 0.0)})
        spec = ObjectiveSpec(target_fom="power", k_sigma=0.0,
                             constraint_fom="freq", constraint_bound=1.0,
                             constraint_sense="ge", penalty_weight=10.0)
        assert objective_eval(report, spec) == pytest.approx(2.0 + 2.0, rel=1e-12)

    def test_satisfied_constraint_adds_nothing(self):
        report = self.make_report(2.0, 0.1, extra={"lock": (0.9, 0.0)})
        spec = ObjectiveSpec(target_fom="power", k_sigma=3.0,
                             constraint_fom="lock", constraint_bound=1.0)
        assert objective_eval(report, spec) == pytest.approx(2.3, rel=1e-12)

    def test_missing_fom(self):
        report = self.make_report(1.0, 0.0)
        with pytest.raises(MissingFoM):
            objective_eval(report, ObjectiveSpec(target_fom="nope"))
        with pytest.raises(MissingFoM):
            objective_eval(report, ObjectiveSpec(target_fom="power",
                                                 constraint_fom="nope",
                                                 constraint_bound=1.0))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ObjectiveSpec(target_fom="p", penalty_weight=0.0)
        with pytest.raises(ValueError):
            ObjectiveSpec(target_fom="p", constraint_sense="lt")
        with pytest.raises(ValueError):
            ObjectiveSpec(target_fom="p", constraint_fom="q")


class OnesRng:
    """Stub generator forcing tau_p = tau_g = 1."""

    def random(self, d):
        return np.ones(d)


class TestUpdateParticle:
    def particle(self, x, v, best):
        x, v, best = (np.asarray(a, dtype=float) for a in (x, v, best))
        return Particle(position=x, velocity=v, best_position=best, best_score=0.0)

    def test_fixed_point(self):
        cfg = sigma0_cfg()
        p = self.particle([0.5, 0.5], [0.0, 0.0], [0.5, 0.5])
        out = update_particle(p, np.array([0.5, 0.5]), cfg, np.random.default_rng(0))
        assert np.array_equal(out.position, [0.5, 0.5])
        assert np.array_equal(out.velocity, [0.0, 0.0])

    def test_pure_inertia_drift(self):
        cfg = sigma0_cfg(inertia=1.0, cognitive=0.0, social=0.0)
        p = self.particle([0.4], [0.2], [0.9])
        out = update_particle(p, np.array([0.1]), cfg, np.random.default_rng(0))
        assert out.position[0] == pytest.approx(0.6, abs=1e-15)
        assert out.velocity[0] == pytest.approx(0.2, abs=1e-15)

    def test_hand_case_with_clamp(self):
        cfg = sigma0_cfg(inertia=0.5, cognitive=1.0, social=1.0)
        p = self.particle([0.4], [0.2], [0.6])
        out = update_particle(p, np.array([0.8]), cfg, OnesRng())
        # v' = 0.5*0.2 + 1*(0.6-0.4) + 1*(0.8-0.4) = 0.7 -> x 1.1 clamps to 1
        assert out.position[0] == 1.0
        assert out.velocity[0] == 0.0

    def test_draw_order_tau_p_then_tau_g(self):
        class Recorder:
            def __init__(self):
                self.draws = [np.array([0.25]), np.array([0.75])]
                self.i = 0

            def random(self, d):
                out = self.draws[self.i]
                self.i += 1
                return out

        cfg = sigma0_cfg(inertia=0.0, cognitive=1.0, social=1.0)
        p = self.particle([0.5], [0.0], [0.7])
        out = update_particle(p, np.array([0.1]), cfg, Recorder())
        # tau_p=0.25 on the cognitive term, tau_g=0.75 on the social term
        expected_v = 0.25 * (0.7 - 0.5) + 0.75 * (0.1 - 0.5)
        assert out.velocity[0] == pytest.approx(expected_v, abs=1e-15)


class TestOptimize:
    def test_single_particle_single_iteration(self):
        space = unit_space(2)
        sim = Sphere([0.25, 0.25])
        cfg = sigma0_cfg(n_particles=1, max_iterations=1, seed=4)
        res = pso_optimize(sim, space, ObjectiveSpec(target_fom="obj"), cfg)
        # result is exactly the initial particle's evaluation
        from surrokit.sampling import lhs_sample
        from surrokit.seeds import substream

        init = lhs_sample(space, 1, substream(4, "init")).inputs[0]
        x0 = space.denormalize(init)
        assert np.array_equal(res.best_x, x0)
        assert res.best_score == pytest.approx(sim.evaluate(x0)["obj"], rel=1e-12)
        assert len(res.trace) == 1

    def test_sphere_convergence(self):
        space = unit_space(3)
        target = np.array([0.3, 0.7, 0.45])
        cfg = sigma0_cfg(n_particles=20, max_iterations=60, seed=2)
        res = pso_optimize(Sphere(target), space, ObjectiveSpec(target_fom="obj"), cfg)
        assert np.linalg.norm(res.best_x - target) <= 1e-2

    def test_trace_non_increasing_and_deterministic(self):
        space = unit_space(2)
        cfg = sigma0_cfg(n_particles=6, max_iterations=15, seed=9)
        spec = ObjectiveSpec(target_fom="obj")
        r1 = pso_optimize(Sphere([0.6, 0.2]), space, spec, cfg)
        r2 = pso_optimize(Sphere([0.6, 0.2]), space, spec, cfg)
        assert np.all(np.diff(r1.trace) <= 0)
        assert np.array_equal(r1.trace, r2.trace)
        assert np.array_equal(r1.best_x, r2.best_x)

    def test_best_consistency_with_recorded_seed(self):
        space = unit_space(2)
        sim = Sphere([0.4, 0.9])
        cfg = SwarmConfig(n_particles=5, max_iterations=8,
                          mc=MCConfig(n_runs=25, sigma_fraction=0.05, seed=0),
                          final_mc_runs=50, seed=13)
        spec = ObjectiveSpec(target_fom="obj", k_sigma=3.0)
        res = pso_optimize(sim, space, spec, cfg)
        replay = monte_carlo(sim, space, res.best_x,
                             MCConfig(n_runs=25, sigma_fraction=0.05,
                                      seed=res.best_inner_seed))
        assert objective_eval(replay, spec) == res.best_score

    def test_evaluated_nominals_stay_in_box(self):
        space = unit_space(2)

        class Guard(Sphere):
            def __init__(self, target, space):
                super().__init__(target)
                self.space = space

            def evaluate_columns(self, X):
                assert np.all(X >= self.space.lower) and np.all(X <= self.space.upper)
                return super().evaluate_columns(X)

        cfg = sigma0_cfg(n_particles=10, max_iterations=10, seed=3)
        pso_optimize(Guard([0.2, 0.8], space), space,
                     ObjectiveSpec(target_fom="obj"), cfg)

    def test_infeasible_constraint_warns(self):
        space = unit_space(2)
        spec = ObjectiveSpec(target_fom="obj", constraint_fom="obj",
                             constraint_bound=-1.0, constraint_sense="le")
        cfg = sigma0_cfg(n_particles=4, max_iterations=4, seed=6)
        with pytest.warns(UserWarning):
            res = pso_optimize(Sphere([0.5, 0.5]), space, spec, cfg)
        assert not res.feasible
        assert res.best_score > 0  # penalized but still returned

    def test_local_best_dominance(self):
        space = unit_space(2)
        sim = Sphere([0.3, 0.3])
        cfg = sigma0_cfg(n_particles=5, max_iterations=12, seed=8)
        spec = ObjectiveSpec(target_fom="obj")
        res = pso_optimize(sim, space, spec, cfg)
        # global best equals the final study's objective (sigma = 0)
        assert objective_eval(res.final_report, spec) == pytest.approx(
            res.best_score, rel=1e-12)

    def test_result_round_trip(self, tmp_path):
        space = unit_space(2)
        cfg = sigma0_cfg(n_particles=3, max_iterations=3, seed=5)
        res = pso_optimize(Sphere([0.5, 0.1]), space,
                           ObjectiveSpec(target_fom="obj"), cfg)
        path = tmp_path / "result.json"
        res.save(path)
        import json

        loaded = OptimizationResult.from_dict(json.loads(path.read_text()))
        assert np.array_equal(loaded.best_x, res.best_x)
        assert np.array_equal(loaded.trace, res.trace)
        assert loaded.best_score == res.best_score
        assert loaded.best_inner_seed == res.best_inner_seed

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SwarmConfig(n_particles=0)
        with pytest.raises(ValueError):
            SwarmConfig(max_iterations=0)
        with pytest.raises(ValueError):
            SwarmConfig(inertia=-0.1)
