"""Experiment orchestration: solver x instance sweeps with component-wise
wall-time accounting, persisted records, and metric tables.

Every repetition is timed with a monotonic clock into setup (instance load
and any cubic-to-quadratic transform), compute (the solve), and collect
(solution mapping and bookkeeping); optional hyperparameter grid search is
timed separately into the tuning field, amortized equally over the
instance's repetitions, so time-to-epsilon can be reported with and
without it.  Metric tables carry the timing variant used: "compute",
"total" (the end-user span, tuning excluded), or "total+tuning".
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics
from .generator import generate_hubo, instance_type_config
from .model import (
    BRUTE_FORCE_CAP,
    HuboInstance,
    IsingInstance,
    brute_force_ground_state,
    dumps_instance,
    hubo_energy,
    load_instance,
    reduce_hubo_to_qubo,
    save_instance,
)
from .records import ExperimentRecord, hash_bytes
from .runs import SolverRun, TimingBreakdown
from .sa import SaConfig, sa_solve_hubo, sa_solve_qubo
from .sbm import SbmConfig, sbm_solve

log = logging.getLogger("spinbench.bench")

TIMING_VARIANTS = ("compute", "total", "total+tuning")
SOLVER_NAMES = ("sbm", "sa-qubo", "sa-hubo")


@dataclass
class ExperimentConfig:
    solver: str
    instance_paths: list = field(default_factory=list)
    generator: dict | None = None  # {"type", "sizes", "count", "seed", ...}
    solver_params: dict = field(default_factory=dict)
    repetitions: int = 1
    seed: int = 0
    output_dir: str = "sweep-out"
    workers: int = 1
    tuning_grid: list = field(default_factory=list)  # solver_params overrides

    def __post_init__(self):
        if self.solver not in SOLVER_NAMES:
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.instance_paths and not self.generator:
            raise ValueError("need instance paths or a generator spec")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            solver=data["solver"],
            instance_paths=list(data.get("instance_paths", [])),
            generator=data.get("generator"),
            solver_params=dict(data.get("solver_params", {})),
            repetitions=int(data.get("repetitions", 1)),
            seed=int(data.get("seed", 0)),
            output_dir=data.get("output_dir", "sweep-out"),
            workers=int(data.get("workers", 1)),
            tuning_grid=list(data.get("tuning_grid", [])),
        )


def write_generated_instances(spec: dict, out_dir) -> list:
    """Materialize generator-spec instances plus a manifest; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sizes = spec.get("sizes") or [spec["size"]]
    count = int(spec.get("count", 1))
    base_seed = int(spec.get("seed", 0))
    type_name = spec["type"]
    alpha = float(spec.get("alpha", 1.0))
    paths = []
    manifest = []
    for size in sizes:
        for k in range(count):
            seed = int(
                np.random.SeedSequence(base_seed, spawn_key=(size, k)).generate_state(1)[0]
            )
            config = instance_type_config(type_name, target_n=size, seed=seed, alpha=alpha)
            inst = generate_hubo(config)
            name = f"{type_name}_n{size}_i{k:03d}"
            path = out_dir / f"{name}.json"
            save_instance(inst, path)
            paths.append(str(path))
            manifest.append({"name": name, "config": config.describe()})
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n"
    )
    return paths


def _run_seed(base_seed: int, instance_idx: int, slot: int) -> int:
    """Slot 0 is reserved for tuning trials; repetition r uses slot r + 1."""
    return int(
        np.random.SeedSequence(base_seed, spawn_key=(instance_idx, slot)).generate_state(1)[0]
    )


def _solve_once(solver: str, inst, params: dict, seed: int, timer_phases: dict):
    """Load-transform-solve-collect for a single repetition; returns a
    SolverRun whose energies refer to the original instance."""
    t0 = time.perf_counter()
    needs_reduction = solver in ("sbm", "sa-qubo") and isinstance(inst, HuboInstance)
    if needs_reduction:
        reduced = reduce_hubo_to_qubo(inst)
        target = reduced.ising
    else:
        reduced = None
        target = inst
    timer_phases["setup_extra"] = time.perf_counter() - t0

    if solver == "sbm":
        run = sbm_solve(target, SbmConfig(**params, seed=seed))
    elif solver == "sa-qubo":
        run = sa_solve_qubo(target, SaConfig(**params, seed=seed))
    elif solver == "sa-hubo":
        if not isinstance(inst, HuboInstance):
            raise ValueError("sa-hubo needs a cubic instance")
        run = sa_solve_hubo(target, SaConfig(**params, seed=seed))
    else:
        raise ValueError(f"unknown solver {solver!r}")

    if reduced is not None:
        t1 = time.perf_counter()
        projected = reduced.project(run.best_state)
        best = hubo_energy(inst, projected)
        # trace points are reduced-space energies; adding the reduction
        # constant makes them energies of full (original + aux) assignments
        trace = [(t, e + reduced.offset) for t, e in run.trace]
        if trace and best < trace[-1][1]:
            trace.append((trace[-1][0], best))
        run.best_state = projected
        run.best_energy = best
        run.trace = trace
        run.extra = {**run.extra, "reduced": True, "reduction_offset": reduced.offset}
        timer_phases["collect_extra"] = time.perf_counter() - t1
    run.states = None  # full spectra are not persisted
    return run


def run_instance(
    solver: str,
    path,
    params: dict,
    repetitions: int,
    base_seed: int,
    instance_idx: int,
    tuning_grid=(),
) -> ExperimentRecord:
    payload = Path(path).read_bytes()
    inst = load_instance(path)

    chosen_params = dict(params)
    tuning_time = 0.0
    if tuning_grid:
        t0 = time.perf_counter()
        best_energy = math.inf
        tuning_seed = _run_seed(base_seed, instance_idx, 0)
        for candidate in tuning_grid:
            trial_params = {**params, **candidate}
            trial = _solve_once(solver, inst, trial_params, tuning_seed, {})
            if trial.best_energy < best_energy:
                best_energy = trial.best_energy
                chosen_params = trial_params
        tuning_time = time.perf_counter() - t0

    runs = []
    errors = []
    for rep in range(repetitions):
        span_start = time.perf_counter()
        phases: dict = {}
        try:
            run = _solve_once(
                solver, inst, chosen_params, _run_seed(base_seed, instance_idx, rep + 1), phases
            )
        except Exception as exc:  # solver failure is recorded, not fatal
            log.warning("run failed (%s rep %d): %s", path, rep, exc)
            errors.append({"repetition": rep, "error": str(exc)})
            continue
        inner = run.timing
        run.timing = TimingBreakdown(
            setup=inner.setup + phases.get("setup_extra", 0.0),
            compute=inner.compute,
            collect=inner.collect + phases.get("collect_extra", 0.0),
            tuning=tuning_time / repetitions,
            total=time.perf_counter() - span_start,
        )
        runs.append(run)

    instance_id = Path(path).stem
    reference_energy = None
    reference_kind = "best_found"
    if inst.n <= BRUTE_FORCE_CAP:
        _, reference_energy = brute_force_ground_state(inst)
        reference_kind = "brute_force"
    elif runs:
        reference_energy = min(r.best_energy for r in runs)

    return ExperimentRecord(
        instance_id=instance_id,
        instance_hash=hash_bytes(payload),
        n=inst.n,
        solver=solver,
        solver_config={"params": chosen_params, "repetitions": repetitions, "seed": base_seed},
        runs=runs,
        reference_energy=reference_energy,
        reference_kind=reference_kind,
        extra={"errors": errors, "instance_path": str(path), "tuned": bool(tuning_grid)},
    )


def run_experiment(config: ExperimentConfig) -> list:
    out_dir = Path(config.output_dir)
    paths = list(config.instance_paths)
    if config.generator:
        paths += write_generated_instances(config.generator, out_dir / "instances")
    if not paths:
        raise ValueError("no instances to run")

    def job(item):
        idx, path = item
        return run_instance(
            config.solver,
            path,
            config.solver_params,
            config.repetitions,
            config.seed,
            idx,
            tuning_grid=config.tuning_grid,
        )

    items = list(enumerate(paths))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(job, items))
    else:
        records = [job(item) for item in items]

    records_dir = out_dir / "records"
    for record in records:
        record.save(records_dir)
    return records


# ---------------------------------------------------------------------------
# Metric tables

TABLE_COLUMNS = ("solver", "n", "param", "value", "stderr", "variant")
FIT_COLUMNS = (
    "solver",
    "param",
    "variant",
    "alpha",
    "alpha_stderr",
    "prefactor",
    "n_min",
    "n_max",
)


@dataclass
class MetricTable:
    metric: str
    rows: list = field(default_factory=list)  # tuples matching TABLE_COLUMNS
    fits: list = field(default_factory=list)  # tuples matching FIT_COLUMNS

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        for row in self.rows:
            writer.writerow([_format_cell(c) for c in row])
        return buf.getvalue()

    def fits_to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIT_COLUMNS)
        for row in self.fits:
            writer.writerow([_format_cell(c) for c in row])
        return buf.getvalue()


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def variant_time(timing: TimingBreakdown, variant: str) -> float:
    if variant == "compute":
        return timing.compute
    if variant == "total":
        return timing.total
    if variant == "total+tuning":
        return timing.total + timing.tuning
    raise ValueError(f"unknown timing variant {variant!r}")


def _reference_energies(records) -> dict:
    """Best known energy per instance id across all supplied records."""
    refs: dict = {}
    for record in records:
        candidates = []
        if record.reference_energy is not None:
            candidates.append(record.reference_energy)
        if record.runs:
            candidates.append(record.best_energy())
        if not candidates:
            continue
        best = min(candidates)
        if record.instance_id not in refs or best < refs[record.instance_id]:
            refs[record.instance_id] = best
    return refs


def _grouped(records):
    groups: dict = {}
    for record in records:
        groups.setdefault((record.solver, record.n), []).append(record)
    return dict(sorted(groups.items()))


def summarize(
    records,
    metric: str,
    variant: str = "total",
    epsilons=(0.01,),
    target_ratios=(0.95,),
    thresholds=(0.90, 0.95, 0.99),
) -> MetricTable:
    """Aggregate records into a per-(solver, size) metric table.

    tte: per instance, success probability over repetitions at threshold
    E0 + eps|E0| and mean per-run time under the chosen variant; the value
    is the median over instances, with a power-law fit per (solver, eps)
    when at least three sizes are finite (censored sizes are excluded from
    the fit and logged).  ttr: median over instances of the median per-run
    time to the target ratio.  success_fraction: fraction of instances
    whose best ratio meets each threshold.
    """
    if variant not in TIMING_VARIANTS:
        raise ValueError(f"unknown timing variant {variant!r}")
    if not records:
        raise ValueError("no records to summarize")
    refs = _reference_energies(records)
    groups = _grouped(records)
    table = MetricTable(metric=metric)

    if metric == "tte":
        for epsilon in epsilons:
            series: dict = {}
            for (solver, n), group in groups.items():
                per_instance = []
                for record in group:
                    if not record.runs:
                        continue
                    e0 = refs[record.instance_id]
                    est = metrics.estimate_success(
                        [run.best_energy for run in record.runs], e0, epsilon
                    )
                    t_f = float(
                        np.mean([variant_time(run.timing, variant) for run in record.runs])
                    )
                    per_instance.append(
                        metrics.time_to_epsilon(t_f, est.p_hat, infinite_on_zero=True)
                    )
                if not per_instance:
                    continue
                value = metrics.median_tte(per_instance)
                table.rows.append((solver, n, epsilon, value, None, variant))
                series.setdefault(solver, []).append((n, value))
            _append_fits(table, series, epsilon, variant)
    elif metric == "ttr":
        for target in target_ratios:
            series = {}
            for (solver, n), group in groups.items():
                per_instance = []
                for record in group:
                    if not record.runs:
                        continue
                    e0 = refs[record.instance_id]
                    per_run = [
                        metrics.time_to_ratio(run.trace, e0, target)
                        for run in record.runs
                        if run.trace
                    ]
                    if per_run:
                        per_instance.append(metrics.median_tte(per_run))
                if not per_instance:
                    continue
                value = metrics.median_tte(per_instance)
                table.rows.append((solver, n, target, value, None, variant))
                series.setdefault(solver, []).append((n, value))
            _append_fits(table, series, target, variant)
    elif metric == "success_fraction":
        for threshold in thresholds:
            for (solver, n), group in groups.items():
                ratios = []
                for record in group:
                    if not record.runs:
                        continue
                    e0 = refs[record.instance_id]
                    ratios.append(metrics.approximation_ratio(record.best_energy(), e0))
                if not ratios:
                    continue
                value = metrics.success_fraction(ratios, threshold)
                table.rows.append((solver, n, threshold, value, None, variant))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return table


def _append_fits(table: MetricTable, series: dict, param, variant: str) -> None:
    for solver, points in sorted(series.items()):
        finite = [(n, v) for n, v in points if math.isfinite(v) and v > 0]
        censored = [n for n, v in points if not math.isfinite(v)]
        if censored:
            log.info(
                "fit for %s at %s excludes censored sizes %s", solver, param, censored
            )
        if len(finite) < 3:
            continue
        fit = metrics.fit_power_law(finite)
        table.fits.append(
            (
                solver,
                param,
                variant,
                fit.alpha,
                fit.alpha_stderr,
                fit.prefactor,
                fit.n_min,
                fit.n_max,
            )
        )


def write_tables(table: MetricTable, out_dir, stem: str | None = None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or table.metric
    table_path = out_dir / f"{stem}_table.csv"
    table_path.write_text(table.to_csv())
    fits_path = None
    if table.fits:
        fits_path = out_dir / f"{stem}_fits.csv"
        fits_path.write_text(table.fits_to_csv())
    return table_path, fits_path
