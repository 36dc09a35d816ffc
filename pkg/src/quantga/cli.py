"""Command-line entry point.

Exit status: 0 on success, 1 on a config or I/O error, 2 when ``verify``
finds a failing check.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import experiments, fdoracle, qcircuit, qneuron, schrodinger, verify
from .experiments import ConfigError, ExperimentConfig

OUTPUT_ENV = "QUANTGA_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2

# CLI flag -> config key
_GA_FLAGS = {
    "population_size": "population_size",
    "crossover_rate": "crossover_rate",
    "mutation_rate": "mutation_rate",
    "site_mutation_rate": "site_mutation_rate",
    "max_generations": "max_generations",
    "threshold": "fitness_threshold",
    "elitism": "elitism",
}


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV, experiments.DEFAULT_OUTPUT_DIR)


def _add_run_flags(p: argparse.ArgumentParser, modes=None) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--seed", type=int, action="append", help="run seed (repeatable)")
    p.add_argument("--output-dir", help=f"output directory (default ${OUTPUT_ENV} or ./runs)")
    if modes:
        p.add_argument("--fitness-mode", choices=modes)
    p.add_argument("--population-size", type=int)
    p.add_argument("--crossover-rate", type=float)
    p.add_argument("--mutation-rate", type=float)
    p.add_argument("--site-mutation-rate", type=float)
    p.add_argument("--max-generations", type=int)
    p.add_argument("--threshold", type=float, help="fitness threshold")
    p.add_argument("--no-threshold", action="store_true", help="run to max generations")
    p.add_argument("--elitism", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantga", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run any experiment from a config file")
    _add_run_flags(p)

    p = sub.add_parser("solve", help="evolve a wavefunction for a 1-D system")
    p.add_argument("system", nargs="?", choices=sorted(schrodinger.DEFAULT_SYSTEMS))
    _add_run_flags(p)
    p.add_argument("--energy", type=float)
    p.add_argument("--grid-points", type=int)

    p = sub.add_parser("train-neuron", help="evolve the XOR neuron weights")
    _add_run_flags(p, qneuron.FITNESS_MODES)
    p.add_argument("--landscape", action="store_true",
                   help="print the output table and fitness landscape as CSV and exit")

    p = sub.add_parser("synthesize", help="evolve a 4x4 circuit pattern toward a target")
    p.add_argument("target", nargs="?", choices=sorted(qcircuit.TARGETS) + ["custom"])
    _add_run_flags(p, qcircuit.FITNESS_MODES)
    p.add_argument("--matrix", help="custom target as a JSON 4x4 list or a path to one")
    p.add_argument("--scale", type=float, help="custom target scale")

    p = sub.add_parser("behave", help="print the behaviour distribution of a circuit")
    p.add_argument("target", choices=sorted(qcircuit.TARGETS) + ["custom"])
    p.add_argument("--matrix", help="custom circuit as a JSON 4x4 list or a path to one")
    p.add_argument("--scale", type=float, default=1.0)

    p = sub.add_parser("table3", help="generations-to-solution grid over circuits and mutation rates")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds per cell (seeds 0..S-1)")
    p.add_argument("--seed", type=int, action="append", help="explicit seed list (overrides --seeds)")
    p.add_argument("--targets", nargs="+", default=list(experiments.GRID_TARGETS),
                   choices=sorted(qcircuit.TARGETS))
    p.add_argument("--mutation-rates", nargs="+", type=float, default=list(experiments.GRID_RATES))
    p.add_argument("--fitness-mode", choices=qcircuit.FITNESS_MODES, default="hamming")
    p.add_argument("--output-dir")

    p = sub.add_parser("oracle", help="finite-difference eigenpairs for a system")
    p.add_argument("system", choices=sorted(schrodinger.DEFAULT_SYSTEMS))
    p.add_argument("--convention", choices=fdoracle.CONVENTIONS, default=fdoracle.UNIT_STEP)
    p.add_argument("-k", type=int, default=10, help="number of lowest states to export")
    p.add_argument("--grid-points", type=int)
    p.add_argument("--output-dir")

    sub.add_parser("verify", help="run the golden oracle checks")
    return parser


def _load_matrix(text: str):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--matrix is neither a file nor JSON: {exc}") from exc


def _experiment_config(args, experiment: str | None) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    if experiment is not None:
        if data.get("experiment", experiment) != experiment:
            raise ConfigError(f"config is for experiment {data['experiment']!r}, not {experiment!r}")
        data["experiment"] = experiment
    for flag, key in _GA_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    if getattr(args, "no_threshold", False):
        data["fitness_threshold"] = None
    if args.seed:
        data["seeds"] = args.seed
    if getattr(args, "fitness_mode", None):
        data["fitness_mode"] = args.fitness_mode
    data["output_dir"] = args.output_dir or data.get("output_dir") or default_output_dir()

    if getattr(args, "system", None):
        data["system"] = args.system
    if getattr(args, "energy", None) is not None:
        data["energy"] = args.energy
    if getattr(args, "grid_points", None) is not None:
        data["grid_points"] = args.grid_points
    if getattr(args, "target", None):
        data["target"] = args.target
    if getattr(args, "matrix", None):
        data["custom_target"] = _load_matrix(args.matrix)
    if getattr(args, "scale", None) is not None:
        data["custom_scale"] = args.scale
    return ExperimentConfig.from_dict(data)


def _print_run(dirs) -> None:
    for seed, path in dirs.items():
        print(f"seed {seed}: {path}")


def cmd_run(args, experiment=None) -> int:
    config = _experiment_config(args, experiment)
    _print_run(experiments.run_experiment(config))
    return EXIT_OK


def cmd_train_neuron(args) -> int:
    if args.landscape:
        mode = args.fitness_mode or "table"
        print("w1,w2,x1,x2,target,y0,y1")
        for r in qneuron.output_table():
            print(",".join(experiments.fmt(r[k]) for k in ("w1", "w2", "x1", "x2", "target", "y0", "y1")))
        print()
        print(f"w1,w2,fitness_{mode}")
        for (w1, w2), f in qneuron.landscape(mode).items():
            print(f"{w1},{w2},{experiments.fmt(f)}")
        return EXIT_OK
    return cmd_run(args, "neuron")


def cmd_behave(args) -> int:
    if args.target == "custom":
        if not args.matrix:
            raise ConfigError("custom circuit needs --matrix")
        op = qcircuit.Operator(np.asarray(_load_matrix(args.matrix)), args.scale)
    else:
        op = qcircuit.TARGETS[args.target]
    print("light," + ",".join(qcircuit.BEHAVIOURS))
    for light_on in (False, True):
        try:
            dist = qcircuit.behave(op, light_on).as_dict()
            cells = [experiments.fmt(dist[b]) for b in qcircuit.BEHAVIOURS]
        except qcircuit.ZeroStateError:
            cells = [""] * len(qcircuit.BEHAVIOURS)
        print(("on," if light_on else "off,") + ",".join(cells))
    return EXIT_OK


def cmd_table3(args) -> int:
    seeds = args.seed if args.seed else list(range(args.seeds))
    out = args.output_dir or os.path.join(default_output_dir(), "table3")
    runs = experiments.run_table3(seeds, out, targets=args.targets, mutation_rates=args.mutation_rates,
                                  fitness_mode=args.fitness_mode)
    solved = sum(r["solved"] for r in runs)
    print(f"{solved}/{len(runs)} runs solved; tables in {out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    system = schrodinger.DEFAULT_SYSTEMS[args.system]
    if args.grid_points is not None:
        g = system.grid
        system = schrodinger.QuantumSystem(system.potential, system.energy,
                                           schrodinger.Grid(g.a, g.b, args.grid_points), system.angular_momentum)
    out = args.output_dir or os.path.join(default_output_dir(), f"oracle_{args.system}")
    info = experiments.export_oracle(system, out, args.convention, args.k)
    print(f"{args.system} ({info['convention']}): lowest eigenvalues "
          + ", ".join(f"{v:.6g}" for v in info["eigenvalues"][:5]))
    print(f"eigenvalue nearest E={system.energy}: {info['nearest_eigenvalue']!r}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks()
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'}  {r.name}"
        print(line + (f"  ({r.detail})" if r.detail else ""))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "run": cmd_run,
        "solve": lambda a: cmd_run(a, "schrodinger"),
        "train-neuron": cmd_train_neuron,
        "synthesize": lambda a: cmd_run(a, "circuit"),
        "behave": cmd_behave,
        "table3": cmd_table3,
        "oracle": cmd_oracle,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
