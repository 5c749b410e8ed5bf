"""Benchmark harness: repeated seeded runs, summary tables, traces, figures.

Each (instance, algorithm) pair is run R times with seeds base+0..base+R-1.
Every run's schedule is re-validated; timings cover the solver call only.
Tables are plain CSV with one header line so any tool can re-plot them, and
the harness renders convergence and summary figures next to the tables.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .dsga import DsgaConfig, evolve
from .io import GeneratorConfig, generate_instance, read_instance
from .model import Instance, validate_schedule
from .oracle import exact_optimum, greedy_profit, random_search

ALGORITHMS = ("dsga", "dsga-wa", "random", "greedy", "oracle")


@dataclass(frozen=True)
class RunRecord:
    """One solver execution on one instance."""

    instance_label: str
    algorithm: str
    seed: int
    fitness: int
    cpu_seconds: float
    trace: np.ndarray
    validated: bool


@dataclass(frozen=True)
class SummaryRow:
    """Per-instance aggregate: algorithm -> (best, mean, std, mean cpu)."""

    instance_label: str
    cells: dict


@dataclass(frozen=True)
class SuiteConfig:
    instances: tuple          # (label, Instance) pairs
    algorithms: tuple = ("dsga",)
    runs: int = 10
    evaluations: int = 5000
    population_size: int = 10
    base_seed: int = 0
    out_dir: str = "."
    figures: bool = True

    def __post_init__(self):
        if not self.instances:
            raise ValueError("suite needs at least one instance")
        if not self.algorithms:
            raise ValueError("suite needs at least one algorithm")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")


class SuiteError(ValueError):
    """Raised when a suite description cannot be executed."""


def run_algorithm(instance: Instance, algorithm: str, seed: int,
                  evaluations: int, population_size: int = 10):
    """Execute one solver; returns (fitness, schedule, trace, cpu_seconds)."""
    t0 = time.perf_counter()
    if algorithm == "dsga" or algorithm == "dsga-wa":
        cfg = DsgaConfig(population_size=population_size,
                         max_evaluations=evaluations, seed=seed,
                         adaptive_operators=(algorithm == "dsga"))
        res = evolve(instance, cfg)
        fitness, schedule, trace = res.fitness, res.schedule, res.history
    elif algorithm == "random":
        res = random_search(instance, evaluations, seed)
        fitness, schedule, trace = res.fitness, res.schedule, res.history
    elif algorithm == "greedy":
        res = greedy_profit(instance)
        fitness, schedule, trace = res.fitness, res.schedule, res.history
    elif algorithm == "oracle":
        res = exact_optimum(instance)
        fitness, schedule = res.fitness, res.schedule
        trace = np.array([res.fitness], dtype=np.int64)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    cpu = time.perf_counter() - t0
    return fitness, schedule, trace, cpu


def run_suite(suite: SuiteConfig) -> tuple[list[RunRecord], list[SummaryRow]]:
    """All runs of the suite, in deterministic order; returns records and rows."""
    records: list[RunRecord] = []
    for label, instance in suite.instances:
        for algorithm in suite.algorithms:
            for r in range(suite.runs):
                seed = suite.base_seed + r
                fitness, schedule, trace, cpu = run_algorithm(
                    instance, algorithm, seed, suite.evaluations,
                    suite.population_size)
                ok = validate_schedule(instance, schedule).ok
                records.append(RunRecord(label, algorithm, seed, fitness,
                                         cpu, np.asarray(trace), ok))
    return records, summarize(records, suite.algorithms)


def summarize(records, algorithms) -> list[SummaryRow]:
    rows = []
    labels = []
    for rec in records:
        if rec.instance_label not in labels:
            labels.append(rec.instance_label)
    for label in labels:
        cells = {}
        for algo in algorithms:
            fits = [r.fitness for r in records
                    if r.instance_label == label and r.algorithm == algo]
            cpus = [r.cpu_seconds for r in records
                    if r.instance_label == label and r.algorithm == algo]
            if not fits:
                continue
            arr = np.array(fits, dtype=np.float64)
            std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
            cells[algo] = (int(arr.max()), float(arr.mean()), std,
                           float(np.mean(cpus)))
        rows.append(SummaryRow(label, cells))
    return rows


# --------------------------------------------------------------------------
# file output (atomic: temp file in target directory, then rename)

def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_summary_csv(rows, algorithms, path: str) -> None:
    header = ["instance"]
    for algo in algorithms:
        header += [f"{algo}_best", f"{algo}_mean", f"{algo}_std", f"{algo}_cpu"]
    lines = [",".join(header)]
    for row in rows:
        cols = [row.instance_label]
        for algo in algorithms:
            if algo in row.cells:
                best, mean, std, cpu = row.cells[algo]
                cols += [str(best), f"{mean:.6f}", f"{std:.6f}", f"{cpu:.6f}"]
            else:
                cols += ["", "", "", ""]
        lines.append(",".join(cols))
    _write_atomic(path, "\n".join(lines) + "\n")


def write_runs_csv(records, path: str) -> None:
    lines = ["instance,algorithm,seed,fitness,cpu_seconds,validated"]
    for r in records:
        lines.append(f"{r.instance_label},{r.algorithm},{r.seed},{r.fitness},"
                     f"{r.cpu_seconds:.6f},{'true' if r.validated else 'false'}")
    _write_atomic(path, "\n".join(lines) + "\n")


def write_traces_csv(records, path: str) -> None:
    lines = ["instance,algorithm,seed,evaluation,best"]
    for r in records:
        for i, value in enumerate(np.asarray(r.trace), start=1):
            lines.append(f"{r.instance_label},{r.algorithm},{r.seed},{i},{int(value)}")
    _write_atomic(path, "\n".join(lines) + "\n")


def write_report(records, rows, suite: SuiteConfig) -> list[str]:
    """Write tables (and figures unless disabled); returns the file paths."""
    out = suite.out_dir
    os.makedirs(out, exist_ok=True)
    paths = []
    for name, writer in (("summary.csv", lambda p: write_summary_csv(rows, suite.algorithms, p)),
                         ("runs.csv", lambda p: write_runs_csv(records, p)),
                         ("traces.csv", lambda p: write_traces_csv(records, p))):
        path = os.path.join(out, name)
        writer(path)
        paths.append(path)
    if suite.figures:
        from . import plots
        for label, _ in suite.instances:
            recs = [r for r in records if r.instance_label == label]
            path = os.path.join(out, f"convergence_{label}.png")
            plots.convergence_figure(recs, path, f"instance {label}")
            paths.append(path)
        path = os.path.join(out, "summary.png")
        plots.summary_figure(rows, suite.algorithms, path)
        paths.append(path)
    return paths


# --------------------------------------------------------------------------
# suite descriptions (JSON)

def _instance_from_entry(entry, index: int):
    if isinstance(entry, str):
        instance = read_instance(entry)
        label = instance.label or os.path.splitext(os.path.basename(entry))[0]
        return label, instance
    if isinstance(entry, dict):
        known = {f.name for f in dataclasses.fields(GeneratorConfig)}
        cfg_fields = {k: v for k, v in entry.items() if k in known}
        extra = set(entry) - known - {"tasks", "index"}
        if extra:
            raise SuiteError(f"instance entry {index}: unknown keys {sorted(extra)}")
        if "tasks" in entry:
            cfg_fields["task_count"] = entry["tasks"]
        cfg = GeneratorConfig(**cfg_fields)
        instance = generate_instance(cfg, index=entry.get("index", cfg.seed))
        return instance.label, instance
    raise SuiteError(f"instance entry {index}: expected path or object")


def load_suite(path: str, out_dir: str = ".") -> SuiteConfig:
    """Read a suite description file.

    Schema: {"instances": [path-or-generator-object, ...],
             "algorithms": [...], "runs": R, "evals": E, "pop": N, "seed": S}
    Generator objects take GeneratorConfig field names (or "tasks").
    """
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    if not isinstance(doc, dict) or "instances" not in doc:
        raise SuiteError("suite file must be an object with an 'instances' list")
    instances = tuple(_instance_from_entry(entry, i)
                      for i, entry in enumerate(doc["instances"]))
    if not instances:
        raise SuiteError("suite has no instances")
    return SuiteConfig(
        instances=instances,
        algorithms=tuple(doc.get("algorithms", ["dsga"])),
        runs=int(doc.get("runs", 10)),
        evaluations=int(doc.get("evals", 5000)),
        population_size=int(doc.get("pop", 10)),
        base_seed=int(doc.get("seed", 0)),
        out_dir=out_dir,
    )
