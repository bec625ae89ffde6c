"""Command-line front end: sample, simulate, fit, mc, optimize, bench.

Every command is a pure function of its inputs, flags and --seed (up to
the timing fields of the run manifest), writes its primary output files
byte-reproducibly, and records a manifest alongside them with the
resolved parameters and per-phase wall-clock times.

Exit codes: 0 success, 2 usage/validation error, 3 I/O failure,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, ann, kriging, mcstats, pipeline, pso
from .errors import NonFiniteLoss, SingularSystem, SurrokitError
from .oracle import SyntheticPLLOracle
from .sampling import lhs_sample, load_samples, save_samples
from .seeds import substream
from .space import ParameterSpace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

MANIFEST_VERSION = "1"


class _Timer:
    def __init__(self):
        self.phases = {}

    def phase(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[name] = timer.phases.get(name, 0.0) + time.perf_counter() - self.t0
                return False

        return _Ctx()


def _write_manifest(path, command: str, params: dict, timer: _Timer,
                    inputs: list, outputs: list):
    payload = {
        "format_version": MANIFEST_VERSION,
        "tool": "surrokit",
        "version": __version__,
        "command": command,
        "parameters": params,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "timings_seconds": {k: round(v, 6) for k, v in timer.phases.items()},
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _load_space(arg: str) -> ParameterSpace:
    if arg == "pll":
        return SyntheticPLLOracle.load_default().space
    return ParameterSpace.load(arg)


def _load_oracle(arg: str) -> SyntheticPLLOracle:
    if arg in ("pll", "builtin"):
        return SyntheticPLLOracle.load_default()
    return SyntheticPLLOracle.load(arg)


def _parse_nominal(arg: str, space: ParameterSpace) -> np.ndarray:
    if arg == "nominal":
        return space.nominal
    if "," in arg:
        return np.array([float(v) for v in arg.split(",")], dtype=float)
    with open(arg, "r", encoding="ascii") as fh:
        return np.array(json.load(fh), dtype=float)


# ---------------------------------------------------------------- commands


def cmd_sample(args) -> int:
    timer = _Timer()
    space = _load_space(args.space)
    with timer.phase("sample"):
        samples = lhs_sample(space, args.n, args.seed)
    with timer.phase("write"):
        save_samples(samples, args.out, space)
    _write_manifest(args.out + ".manifest.json", "sample",
                    {"space": args.space, "n": args.n, "seed": args.seed,
                     "space_fingerprint": space.fingerprint()},
                    timer, [], [args.out])
    print(f"wrote {samples.n} x {samples.d} LHS design to {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    timer = _Timer()
    if args.responses is not None:
        if args.space is None:
            raise SurrokitError("--responses requires --space")
        space = _load_space(args.space)
        with timer.phase("read"):
            samples = load_samples(args.samples, space)
            donor = load_samples(args.responses, space)
        if donor.n != samples.n:
            raise SurrokitError(
                f"row count mismatch: {args.samples} has {samples.n}, "
                f"{args.responses} has {donor.n}")
        with timer.phase("merge"):
            out_set = samples.with_responses(donor.responses)
    else:
        oracle = _load_oracle(args.oracle)
        space = oracle.space
        with timer.phase("read"):
            samples = load_samples(args.samples, space)
        with timer.phase("simulate"):
            out_set = pipeline.simulate_samples(oracle, space, samples)
    if not out_set.responses:
        raise SurrokitError("no response columns produced")
    with timer.phase("write"):
        save_samples(out_set, args.out, space)
    _write_manifest(args.out + ".manifest.json", "simulate",
                    {"samples": args.samples, "oracle": args.oracle,
                     "responses": args.responses, "space": args.space},
                    timer, [args.samples], [args.out])
    print(f"wrote {out_set.n} simulated rows ({', '.join(out_set.fom_names)}) to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    timer = _Timer()
    space = _load_oracle(args.oracle).space if args.space is None else _load_space(args.space)
    with timer.phase("read"):
        samples = load_samples(args.samples, space)
    cfg = pipeline.PipelineConfig(
        holdout_fraction=args.holdout,
        hidden_units=args.hidden,
        variogram_bins=args.variogram_bins,
        training=ann.TrainingConfig(max_epochs=args.max_epochs),
        threads=args.threads,
    )
    bootstrap = args.bootstrap == "on"
    with timer.phase("fit"):
        bundle = pipeline.build_metamodels_from_samples(
            samples, space, bootstrap=bootstrap, seed=args.seed, cfg=cfg)
    with timer.phase("write"):
        bundle.save(args.out_bundle)
    _write_manifest(f"{args.out_bundle}/manifest.json", "fit",
                    {"samples": args.samples, "bootstrap": args.bootstrap,
                     "hidden": args.hidden, "holdout": args.holdout,
                     "max_epochs": args.max_epochs, "seed": args.seed},
                    timer, [args.samples], [args.out_bundle])
    print(f"{'FoM':>14s} {'RMSE':>12s} {'RMSE/range':>12s}")
    for e in bundle.entries.values():
        print(f"{e.fom:>14s} {e.verification_rmse:12.4e} {e.rmse_relative:12.4f}")
    print(f"bundle written to {args.out_bundle}")
    return EXIT_OK


def _load_evaluator(args):
    if args.bundle is not None:
        bundle = pipeline.MetamodelBundle.load(args.bundle)
        return bundle, bundle.space, args.bundle
    oracle = _load_oracle(args.oracle)
    return oracle, oracle.space, args.oracle


def cmd_mc(args) -> int:
    timer = _Timer()
    evaluator, space, source = _load_evaluator(args)
    nominal = _parse_nominal(args.nominal, space)
    cfg = mcstats.MCConfig(n_runs=args.runs, sigma_fraction=args.sigma_frac,
                           seed=args.seed)
    sink = {} if args.dump_raw else None
    with timer.phase("mc"):
        report = mcstats.monte_carlo(evaluator, space, nominal, cfg, raw_sink=sink)
    with timer.phase("write"):
        report.save(args.out)
        if args.dump_raw:
            _dump_raw_csv(args.dump_raw, space, sink)
    outputs = [args.out] + ([args.dump_raw] if args.dump_raw else [])
    _write_manifest(args.out + ".manifest.json", "mc",
                    {"source": source, "nominal": args.nominal, "runs": args.runs,
                     "sigma_frac": args.sigma_frac, "seed": args.seed},
                    timer, [source], outputs)
    print(f"{'FoM':>14s} {'mean':>13s} {'std':>13s}")
    for fom in report.fom_names:
        print(f"{fom:>14s} {report.mean(fom):13.5e} {report.std(fom):13.5e}")
    print(f"report written to {args.out}")
    return EXIT_OK


def _dump_raw_csv(path, space, sink):
    X = sink["inputs"]
    responses = sink["responses"]
    names = space.names + list(responses.keys())
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(X.shape[0]):
            row = [format(v, ".17g") for v in X[i]]
            row += [format(responses[f][i], ".17g") for f in responses]
            fh.write(",".join(row) + "\n")


def cmd_optimize(args) -> int:
    timer = _Timer()
    bundle = pipeline.MetamodelBundle.load(args.bundle)
    space = bundle.space
    spec = pso.ObjectiveSpec(
        target_fom=args.target,
        k_sigma=args.k_sigma,
        constraint_fom=args.constraint,
        constraint_bound=args.bound,
        constraint_sense=args.sense,
        penalty_weight=args.penalty,
    )
    cfg = pso.SwarmConfig(
        n_particles=args.particles,
        max_iterations=args.iters,
        mc=mcstats.MCConfig(n_runs=args.inner_runs, sigma_fraction=args.sigma_frac,
                            seed=0),
        final_mc_runs=args.final_runs,
        seed=args.seed,
    )
    with timer.phase("baseline"):
        before = mcstats.monte_carlo(
            bundle, space, space.nominal,
            mcstats.MCConfig(n_runs=args.final_runs, sigma_fraction=args.sigma_frac,
                             seed=substream(args.seed, "before")))
    with timer.phase("optimize"):
        result = pso.pso_optimize(bundle, space, spec, cfg)
    with timer.phase("write"):
        result.save(args.out)
    _write_manifest(args.out + ".manifest.json", "optimize",
                    {"bundle": args.bundle, "target": args.target,
                     "k_sigma": args.k_sigma, "constraint": args.constraint,
                     "bound": args.bound, "sense": args.sense,
                     "penalty": args.penalty, "particles": args.particles,
                     "iters": args.iters, "inner_runs": args.inner_runs,
                     "final_runs": args.final_runs, "sigma_frac": args.sigma_frac,
                     "seed": args.seed},
                    timer, [args.bundle], [args.out])
    after = result.final_report
    print(f"{'FoM':>14s} {'mean before':>13s} {'mean after':>13s} "
          f"{'std before':>13s} {'std after':>13s}")
    for fom in after.fom_names:
        print(f"{fom:>14s} {before.mean(fom):13.5e} {after.mean(fom):13.5e} "
              f"{before.std(fom):13.5e} {after.std(fom):13.5e}")
    mu, sd = after.mean(args.target), after.std(args.target)
    print(f"best score {result.best_score:.6e} "
          f"(final mu+{args.k_sigma:g}*sigma = {mu + args.k_sigma * sd:.6e}), "
          f"feasible={result.feasible}")
    print(f"result written to {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    timer = _Timer()
    bundle = pipeline.MetamodelBundle.load(args.bundle)
    oracle = _load_oracle(args.oracle)
    space = bundle.space
    with timer.phase("setup"):
        train_set = lhs_sample(space, args.samples_n, substream(args.seed, "train"))
        simulated = pipeline.simulate_samples(oracle, space, train_set)
        krig_models = {
            fom: kriging.KrigingModel(
                simulated.inputs, simulated.responses[fom],
                kriging.fit_variogram_to_data(simulated.inputs,
                                              simulated.responses[fom]))
            for fom in bundle.fom_names()
        }
        queries_norm = lhs_sample(space, args.queries, substream(args.seed, "queries")).inputs
        queries_native = space.denormalize_many(queries_norm)

    foms = bundle.fom_names()
    # warm-up pass so one-time allocation noise stays out of the timings
    for fom in foms:
        bundle.predict_batch(fom, queries_native)
        krig_models[fom].predict_batch(queries_norm)

    with timer.phase("ann"):
        for _ in range(args.repeats):
            for fom in foms:
                bundle.predict_batch(fom, queries_native)
    with timer.phase("kriging"):
        for _ in range(args.repeats):
            for fom in foms:
                krig_models[fom].predict_batch(queries_norm)

    ann_s = timer.phases["ann"]
    krig_s = timer.phases["kriging"]
    payload = {
        "format_version": "1",
        "n_train": args.samples_n,
        "n_queries": args.queries,
        "repeats": args.repeats,
        "foms": foms,
        "ann_seconds": ann_s,
        "kriging_seconds": krig_s,
        "speedup": krig_s / ann_s if ann_s > 0 else float("inf"),
    }
    with open(args.out, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    _write_manifest(args.out + ".manifest.json", "bench",
                    {"bundle": args.bundle, "samples_n": args.samples_n,
                     "queries": args.queries, "repeats": args.repeats,
                     "seed": args.seed},
                    timer, [args.bundle], [args.out])
    print(f"ann: {ann_s:.4f} s   kriging: {krig_s:.4f} s   "
          f"speedup: {payload['speedup']:.2f}x  ({args.queries} queries, "
          f"{args.samples_n} training points, {args.repeats} repeats)")
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="surrokit",
        description="surrogate metamodeling and robust optimization toolkit")
    top.add_argument("--version", action="version", version=f"surrokit {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a Latin Hypercube design to CSV")
    p.add_argument("--space", default="pll", help="space JSON path or 'pll' (builtin)")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("simulate", help="attach simulator responses to a sample CSV")
    p.add_argument("--samples", required=True)
    p.add_argument("--oracle", default="pll", help="oracle JSON path or 'pll' (builtin)")
    p.add_argument("--space", default=None, help="space JSON (with --responses)")
    p.add_argument("--responses", default=None,
                   help="CSV donor of response columns instead of an oracle")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="train the per-FoM metamodel bundle")
    p.add_argument("--samples", required=True, help="simulated CSV (with responses)")
    p.add_argument("--space", default=None, help="space JSON (default: oracle space)")
    p.add_argument("--oracle", default="pll")
    p.add_argument("--bootstrap", choices=("on", "off"), default="on")
    p.add_argument("--hidden", type=int, default=None)
    p.add_argument("--holdout", type=float, default=pipeline.DEFAULT_HOLDOUT_FRACTION)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--variogram-bins", type=int, default=kriging.DEFAULT_BINS)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-bundle", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("mc", help="Monte Carlo variation study at a nominal point")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--bundle", default=None)
    g.add_argument("--oracle", default="pll")
    p.add_argument("--nominal", default="nominal",
                   help="'nominal', comma-separated values, or JSON vector path")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--sigma-frac", type=float, default=0.10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-raw", default=None, help="also write raw draws+responses CSV")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("optimize", help="particle-swarm robust minimization")
    p.add_argument("--bundle", required=True)
    p.add_argument("--target", default="power")
    p.add_argument("--k-sigma", type=float, default=3.0)
    p.add_argument("--constraint", default="locking_time")
    p.add_argument("--bound", type=float, default=5.51e-6)
    p.add_argument("--sense", choices=("le", "ge"), default="le")
    p.add_argument("--penalty", type=float, default=100.0)
    p.add_argument("--particles", type=int, default=30)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--inner-runs", type=int, default=200)
    p.add_argument("--final-runs", type=int, default=1000)
    p.add_argument("--sigma-frac", type=float, default=0.10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bench", help="time batch metamodel vs kriging prediction")
    p.add_argument("--bundle", required=True)
    p.add_argument("--oracle", default="pll")
    p.add_argument("--samples-n", type=int, default=100,
                   help="kriging training-set size")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (SingularSystem, NonFiniteLoss) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SurrokitError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
