"""Config-driven experiment runs and their on-disk artifacts.

A config is a flat JSON object.  Keys that are left out take the
experiment's reference defaults; a key given as ``null`` means "unset"
(only meaningful for ``fitness_threshold``).  Each seed writes into its own
``seed_<n>`` directory, and the ``manifest.json`` written there is itself a
valid config that reproduces the run.
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import fdoracle, ga, qcircuit, qneuron, schrodinger

log = logging.getLogger(__name__)

EXPERIMENTS = ("schrodinger", "neuron", "circuit")
GA_KEYS = tuple(f.name for f in fields(ga.GaConfig) if f.name != "rng_seed")
SYSTEM_KEYS = ("energy", "grid_lower", "grid_upper", "grid_points", "angular_momentum",
               "amplitude_lower", "amplitude_upper")
BASE_KEYS = ("experiment", "system", "target", "custom_target", "custom_scale",
             "fitness_mode", "seeds", "output_dir")
ALLOWED_KEYS = frozenset(BASE_KEYS + GA_KEYS + SYSTEM_KEYS)

DEFAULT_SEEDS = (1,)
DEFAULT_OUTPUT_DIR = "runs"


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    """Lossless text form for CSV cells."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class ExperimentConfig:
    experiment: str
    system: str | None = None
    target: str | None = None
    custom_target: list | None = None
    custom_scale: float = 1.0
    fitness_mode: str | None = None
    seeds: list[int] = field(default_factory=lambda: list(DEFAULT_SEEDS))
    output_dir: str = DEFAULT_OUTPUT_DIR
    ga_overrides: dict = field(default_factory=dict)
    system_overrides: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(data) - ALLOWED_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config must name an experiment")
        base = {k: data[k] for k in BASE_KEYS if k in data}
        cfg = cls(**base,
                  ga_overrides={k: data[k] for k in GA_KEYS if k in data},
                  system_overrides={k: data[k] for k in SYSTEM_KEYS if k in data})
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    # -- resolution --------------------------------------------------------

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not isinstance(self.seeds, list) or not self.seeds:
            raise ConfigError("seeds must be a non-empty list of integers")
        for s in self.seeds:
            if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < 2**64:
                raise ConfigError(f"seed {s!r} is not a 64-bit unsigned integer")
        if self.experiment == "schrodinger":
            if self.system not in schrodinger.DEFAULT_SYSTEMS:
                raise ConfigError(f"schrodinger experiment needs system in {sorted(schrodinger.DEFAULT_SYSTEMS)}")
            if self.fitness_mode not in (None, "residual"):
                raise ConfigError("schrodinger experiment has a single fitness mode, 'residual'")
        elif self.system_overrides:
            raise ConfigError(f"system keys {sorted(self.system_overrides)} only apply to schrodinger runs")
        if self.experiment == "neuron" and self.fitness_mode not in (None,) + qneuron.FITNESS_MODES:
            raise ConfigError(f"neuron fitness_mode must be one of {qneuron.FITNESS_MODES}")
        if self.experiment == "circuit":
            if self.fitness_mode not in (None,) + qcircuit.FITNESS_MODES:
                raise ConfigError(f"circuit fitness_mode must be one of {qcircuit.FITNESS_MODES}")
            if self.target not in tuple(qcircuit.TARGETS) + ("custom",):
                raise ConfigError(f"circuit target must be one of {sorted(qcircuit.TARGETS)} or 'custom'")
            if self.target == "custom" and self.custom_target is None:
                raise ConfigError("custom target needs custom_target (a 4x4 matrix)")
        try:
            self.ga_config(self.seeds[0])
            if self.experiment == "schrodinger":
                self.quantum_system()
                self.amplitude()
            if self.experiment == "circuit":
                self.circuit_target()
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def resolved_fitness_mode(self) -> str:
        if self.fitness_mode is not None:
            return self.fitness_mode
        return {"schrodinger": "residual", "neuron": "table", "circuit": "hamming"}[self.experiment]

    def ga_config(self, seed: int) -> ga.GaConfig:
        mode = self.resolved_fitness_mode
        if self.experiment == "schrodinger":
            base = schrodinger.default_config()
        elif self.experiment == "neuron":
            base = qneuron.default_config(mode)
        else:
            base = qcircuit.default_config(mode)
        return base.replace(**self.ga_overrides, rng_seed=seed)

    def quantum_system(self) -> schrodinger.QuantumSystem:
        default = schrodinger.DEFAULT_SYSTEMS[self.system]
        o = self.system_overrides
        grid = schrodinger.Grid(float(o.get("grid_lower", default.grid.a)),
                                float(o.get("grid_upper", default.grid.b)),
                                int(o.get("grid_points", default.grid.points)))
        return schrodinger.QuantumSystem(default.potential, float(o.get("energy", default.energy)), grid,
                                         int(o.get("angular_momentum", default.angular_momentum)))

    def amplitude(self) -> tuple[float, float]:
        lo = float(self.system_overrides.get("amplitude_lower", -1.0))
        hi = float(self.system_overrides.get("amplitude_upper", 1.0))
        if not lo < hi:
            raise ConfigError("amplitude_lower must be below amplitude_upper")
        return lo, hi

    def circuit_target(self) -> qcircuit.Operator:
        if self.target == "custom":
            op = qcircuit.Operator(np.asarray(self.custom_target), float(self.custom_scale))
            return qcircuit.validate_target(op)
        return qcircuit.get_target(self.target)

    def to_dict(self, seeds: list[int] | None = None) -> dict:
        """Fully resolved, round-trippable form."""
        out = {
            "experiment": self.experiment,
            "fitness_mode": self.resolved_fitness_mode,
            "seeds": list(self.seeds if seeds is None else seeds),
            "output_dir": str(self.output_dir),
        }
        cfg = self.ga_config(out["seeds"][0]).to_dict()
        out.update({k: cfg[k] for k in GA_KEYS})
        if self.experiment == "schrodinger":
            sys_ = self.quantum_system()
            lo, hi = self.amplitude()
            out.update(system=self.system, energy=sys_.energy, grid_lower=sys_.grid.a,
                       grid_upper=sys_.grid.b, grid_points=sys_.grid.points,
                       angular_momentum=sys_.angular_momentum, amplitude_lower=lo, amplitude_upper=hi)
        if self.experiment == "circuit":
            out["target"] = self.target
            if self.target == "custom":
                out["custom_target"] = np.asarray(self.custom_target).tolist()
                out["custom_scale"] = float(self.custom_scale)
        return out


# -- per-experiment artifacts ---------------------------------------------------

def write_trace(path: Path, trace: ga.RunTrace) -> None:
    write_csv(path, ["generation", "best_fitness", "mean_fitness"],
              ((r.generation, r.best_fitness, r.mean_fitness) for r in trace.records))


def _run_schrodinger(config: ExperimentConfig, seed: int, out: Path) -> dict:
    system = config.quantum_system()
    trace, psi = schrodinger.solve(system, config.ga_config(seed), config.amplitude())
    write_trace(out / "trace.csv", trace)
    write_csv(out / "wavefunction.csv", ["x", "psi"], zip(system.grid.x, psi))
    lam, ref = fdoracle.nearest_state(system)
    cosine = float(abs(psi @ ref) / (np.linalg.norm(psi) * np.linalg.norm(ref)))
    summary = {
        "best_fitness": trace.best.best_fitness,
        "generations": trace.generations,
        "termination_reason": trace.termination_reason,
        "oracle_nearest_eigenvalue": lam,
        "oracle_cosine_similarity": cosine,
    }
    write_json(out / "summary.json", summary)
    return summary


def _run_neuron(config: ExperimentConfig, seed: int, out: Path) -> dict:
    mode = config.resolved_fitness_mode
    trace = qneuron.train(config.ga_config(seed), mode)
    write_trace(out / "trace.csv", trace)
    w1, w2 = qneuron.best_genotype(trace)
    table = qneuron.landscape(mode)
    top = max(table.values())
    summary = {
        "w1": w1,
        "w2": w2,
        "fitness": trace.best.best_fitness,
        "fitness_mode": mode,
        "generations": trace.generations,
        "termination_reason": trace.termination_reason,
        "oracle_argmax": sorted([list(k) for k, v in table.items() if v == top]),
    }
    write_json(out / "weights.json", summary)
    return summary


def _behaviour_rows(op: qcircuit.Operator):
    for light_on in (False, True):
        try:
            dist = qcircuit.behave(op, light_on).as_dict()
            yield ["on" if light_on else "off"] + [dist[b] for b in qcircuit.BEHAVIOURS]
        except qcircuit.ZeroStateError:
            yield ["on" if light_on else "off"] + [""] * len(qcircuit.BEHAVIOURS)


def _run_circuit(config: ExperimentConfig, seed: int, out: Path) -> dict:
    mode = config.resolved_fitness_mode
    target = config.circuit_target()
    trace = qcircuit.synthesize(target, config.ga_config(seed), mode)
    write_trace(out / "trace.csv", trace)
    evolved = qcircuit.evolved_operator(trace, target)
    try:
        fidelity = qcircuit.fitness_fidelity(evolved, target)
    except qcircuit.SingularTargetError:
        fidelity = None  # undefined for a singular target
    summary = {
        "target": config.target,
        "target_pattern": target.pattern.tolist(),
        "pattern": evolved.pattern.tolist(),
        "scale": evolved.scale,
        "fitness_mode": mode,
        "hamming": qcircuit.fitness_hamming(evolved, target),
        "fidelity": fidelity,
        "solved": bool(np.array_equal(evolved.pattern, target.pattern)),
        "generations": trace.generations,
        "termination_reason": trace.termination_reason,
    }
    write_json(out / "circuit.json", summary)
    write_csv(out / "behavior.csv", ["light"] + list(qcircuit.BEHAVIOURS), _behaviour_rows(evolved))
    return summary


_RUNNERS = {"schrodinger": _run_schrodinger, "neuron": _run_neuron, "circuit": _run_circuit}


def run_experiment(config: ExperimentConfig) -> dict[int, Path]:
    """Run every seed of ``config``; returns the per-seed output directories."""
    config.validate()
    root = Path(config.output_dir)
    dirs = {}
    for seed in config.seeds:
        out = root / f"seed_{seed}"
        out.mkdir(parents=True, exist_ok=True)
        summary = _RUNNERS[config.experiment](config, seed, out)
        write_json(out / "manifest.json", config.to_dict(seeds=[seed]))
        log.info("seed %d: %s", seed, summary.get("termination_reason"))
        dirs[seed] = out
    return dirs


# -- mutation-rate grid ---------------------------------------------------------

GRID_TARGETS = ("fig7a", "fig7b", "fig7c")
GRID_RATES = (0.1, 0.2, 0.3, 0.4)


def run_table3(seeds, output_dir, targets=GRID_TARGETS, mutation_rates=GRID_RATES,
               fitness_mode: str = "hamming", **ga_overrides) -> list[dict]:
    """Generations-to-solution over circuits x mutation rates x seeds.

    Writes ``table3_runs.csv`` (one row per run) and ``table3.csv`` (one row
    per circuit, one column per rate, cell = median generations over the
    seeds that solved; empty if none did).
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for target in targets:
        for rate in mutation_rates:
            for seed in seeds:
                cfg = qcircuit.default_config(fitness_mode, **ga_overrides).replace(mutation_rate=rate, rng_seed=seed)
                trace = qcircuit.synthesize(target, cfg, fitness_mode)
                runs.append({"circuit": target, "mutation_rate": rate, "seed": seed,
                             "generations": trace.generations,
                             "solved": trace.termination_reason == ga.THRESHOLD_REACHED})
    write_csv(out / "table3_runs.csv", ["circuit", "mutation_rate", "seed", "generations", "solved"],
              ([r["circuit"], r["mutation_rate"], r["seed"], r["generations"], int(r["solved"])] for r in runs))
    rows = []
    for target in targets:
        row = [target]
        for rate in mutation_rates:
            solved = [r["generations"] for r in runs
                      if r["circuit"] == target and r["mutation_rate"] == rate and r["solved"]]
            row.append(statistics.median(solved) if solved else "")
        rows.append(row)
    write_csv(out / "table3.csv", ["circuit"] + [f"p_m={r}" for r in mutation_rates], rows)
    write_json(out / "manifest.json", {"seeds": list(seeds), "targets": list(targets),
                                       "mutation_rates": list(mutation_rates), "fitness_mode": fitness_mode,
                                       **qcircuit.default_config(fitness_mode, **ga_overrides).to_dict()})
    return runs


# -- oracle export --------------------------------------------------------------

def export_oracle(system: schrodinger.QuantumSystem, output_dir, convention: str = fdoracle.UNIT_STEP,
                  k: int = 10) -> dict:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sol = fdoracle.eigensolve(fdoracle.build_hamiltonian(system, convention), k=k)
    write_csv(out / "eigenvalues.csv", ["index", "eigenvalue"], enumerate(sol.eigenvalues))
    waves = [fdoracle.normalize(fdoracle.embed(sol.eigenvectors[:, j]), system.grid)
             for j in range(sol.eigenvectors.shape[1])]
    write_csv(out / "eigenvectors.csv", ["x"] + [f"psi_{j}" for j in range(len(waves))],
              zip(system.grid.x, *waves))
    lam, _ = fdoracle.nearest_state(system, convention=convention)
    return {"convention": convention, "eigenvalues": sol.eigenvalues.tolist(),
            "system_energy": system.energy, "nearest_eigenvalue": lam, "sweeps": sol.sweeps}
