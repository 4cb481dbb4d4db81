"""Harness tests: sweep bookkeeping, record persistence, timing variants,
and metric tables from synthetic and real records."""

import json
import math

import numpy as np
import pytest

from spinbench.bench import (
    ExperimentConfig,
    MetricTable,
    run_experiment,
    summarize,
    variant_time,
    write_generated_instances,
    write_tables,
)
from spinbench.metrics import fit_power_law, time_to_epsilon
from spinbench.model import (
    HuboInstance,
    IsingInstance,
    hubo_energy,
    ising_energy,
    save_instance,
)
from spinbench.records import ExperimentRecord, load_record, load_records
from spinbench.runs import SolverRun, TimingBreakdown


def small_ising(seed, n=8):
    rng = np.random.default_rng(seed)
    couplings = {(i, j): float(rng.normal()) for i in range(n) for j in range(i + 1, n)}
    return IsingInstance(n=n, couplings=couplings, fields={})


def small_hubo(seed, n=8):
    rng = np.random.default_rng(seed)
    pairs = {(i, i + 1): float(rng.normal()) for i in range(n - 1)}
    triples = {(i, i + 1, i + 2): float(rng.normal()) for i in range(n - 2)}
    return HuboInstance(n=n, pair_terms=pairs, triple_terms=triples)


def write_instances(tmp_path, instances):
    paths = []
    for k, inst in enumerate(instances):
        path = tmp_path / f"inst_{k}.json"
        save_instance(inst, path)
        paths.append(str(path))
    return paths


def synthetic_record(solver, n, instance_id, energies, compute, overhead, tuning=0.0):
    runs = []
    for k, energy in enumerate(energies):
        timing = TimingBreakdown(
            setup=overhead,
            compute=compute,
            collect=0.0,
            tuning=tuning,
            total=overhead + compute,
        )
        runs.append(
            SolverRun(
                solver=solver,
                best_energy=energy,
                best_state=np.ones(1),
                energies=np.array([energy]),
                trace=[(compute, energy)],
                timing=timing,
            )
        )
    return ExperimentRecord(
        instance_id=instance_id,
        instance_hash="0" * 16,
        n=n,
        solver=solver,
        solver_config={},
        runs=runs,
        reference_energy=-10.0,
        reference_kind="provided",
    )


SA_PARAMS = {"n_trajectories": 8, "n_steps": 20, "trace_every": 5}


class TestRunExperiment:
    def test_sweep_bookkeeping(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(s) for s in range(3)])
        config = ExperimentConfig(
            solver="sa-qubo",
            instance_paths=paths,
            solver_params=SA_PARAMS,
            repetitions=2,
            seed=1,
            output_dir=str(tmp_path / "out"),
        )
        records = run_experiment(config)
        assert len(records) == 3
        files = sorted((tmp_path / "out" / "records").glob("*.record.json"))
        assert len(files) == 3
        for record in records:
            assert len(record.runs) == 2

    def test_timing_invariant_every_record(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(5)])
        config = ExperimentConfig(
            solver="sbm",
            instance_paths=paths,
            solver_params={"n_replicas": 8, "n_steps": 50},
            repetitions=2,
            output_dir=str(tmp_path / "out"),
        )
        for record in run_experiment(config):
            for run in record.runs:
                t = run.timing
                assert t.total >= t.setup + t.compute + t.collect

    def test_identical_seeds_identical_energies(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(7)])
        def go(out):
            config = ExperimentConfig(
                solver="sa-qubo",
                instance_paths=paths,
                solver_params=SA_PARAMS,
                repetitions=3,
                seed=42,
                output_dir=str(tmp_path / out),
            )
            return run_experiment(config)

        a = go("a")
        b = go("b")
        for ra, rb in zip(a, b):
            assert [r.best_energy for r in ra.runs] == [r.best_energy for r in rb.runs]

    def test_hubo_through_reduction_reports_cubic_energy(self, tmp_path):
        inst = small_hubo(3)
        paths = write_instances(tmp_path, [inst])
        config = ExperimentConfig(
            solver="sbm",
            instance_paths=paths,
            solver_params={"n_replicas": 16, "n_steps": 100},
            repetitions=1,
            output_dir=str(tmp_path / "out"),
        )
        (record,) = run_experiment(config)
        run = record.runs[0]
        assert len(run.best_state) == inst.n
        assert hubo_energy(inst, run.best_state) == pytest.approx(
            run.best_energy, abs=1e-9
        )
        assert run.extra["reduced"] is True

    def test_solver_failure_recorded_not_fatal(self, tmp_path):
        # sa-hubo rejects a quadratic instance; the sweep still completes
        paths = write_instances(tmp_path, [small_ising(1)])
        config = ExperimentConfig(
            solver="sa-hubo",
            instance_paths=paths,
            solver_params={"n_trajectories": 4, "n_steps": 5},
            repetitions=2,
            output_dir=str(tmp_path / "out"),
        )
        (record,) = run_experiment(config)
        assert record.runs == []
        assert len(record.extra["errors"]) == 2

    def test_workers_do_not_change_results(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(s) for s in range(4)])
        def go(workers, out):
            config = ExperimentConfig(
                solver="sa-qubo",
                instance_paths=paths,
                solver_params=SA_PARAMS,
                repetitions=1,
                seed=3,
                workers=workers,
                output_dir=str(tmp_path / out),
            )
            return run_experiment(config)

        serial = go(1, "s")
        parallel = go(3, "p")
        for rs, rp in zip(serial, parallel):
            assert [r.best_energy for r in rs.runs] == [r.best_energy for r in rp.runs]

    def test_tuning_grid_recorded(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(9)])
        config = ExperimentConfig(
            solver="sa-qubo",
            instance_paths=paths,
            solver_params=SA_PARAMS,
            repetitions=2,
            output_dir=str(tmp_path / "out"),
            tuning_grid=[{"t0": 5.0}, {"t0": 20.0}],
        )
        (record,) = run_experiment(config)
        assert record.extra["tuned"] is True
        assert record.runs[0].timing.tuning > 0
        # tuning is amortized, not inside the end-user total
        t = record.runs[0].timing
        assert t.total >= t.setup + t.compute + t.collect


class TestGeneratedSweep:
    def test_generator_spec_materializes_instances(self, tmp_path):
        paths = write_generated_instances(
            {"type": "cauchy4", "sizes": [80], "count": 2, "seed": 4},
            tmp_path / "inst",
        )
        assert len(paths) == 2
        manifest = json.loads((tmp_path / "inst" / "manifest.json").read_text())
        assert len(manifest) == 2
        assert manifest[0]["config"]["s3q"] == 4


class TestRecordPersistence:
    def test_round_trip_byte_identical(self, tmp_path):
        record = synthetic_record("sbm", 64, "abc", [-9.0, -10.0], 0.5, 0.1)
        path = record.save(tmp_path)
        text = path.read_text()
        again = load_record(path).dumps()
        assert text == again

    def test_load_records_sorted(self, tmp_path):
        for name in ("b", "a", "c"):
            synthetic_record("sbm", 8, name, [-10.0], 0.1, 0.0).save(tmp_path)
        ids = [r.instance_id for r in load_records(tmp_path)]
        assert ids == ["a", "b", "c"]


class TestSummarize:
    def test_tte_equals_raw_time_at_99_percent(self):
        records = []
        for n in (50, 100):
            energies = [-10.0] * 99 + [-9.0]
            records.append(
                synthetic_record("sbm", n, f"i{n}", energies, compute=2.0, overhead=0.0)
            )
        table = summarize(records, "tte", variant="compute", epsilons=(0.0,))
        for solver, n, param, value, stderr, variant in table.rows:
            assert value == 2.0

    def test_variants_differ_only_in_value(self):
        records = [
            synthetic_record("sbm", 50, "x", [-10.0] * 4, compute=1.0, overhead=3.0)
        ]
        t_compute = summarize(records, "tte", variant="compute", epsilons=(0.0,))
        t_total = summarize(records, "tte", variant="total", epsilons=(0.0,))
        (row_c,) = t_compute.rows
        (row_t,) = t_total.rows
        assert row_c[:3] == row_t[:3]
        assert row_t[3] == pytest.approx(4.0 * row_c[3] / 1.0)

    def test_epsilon_sweep_supported(self):
        records = [
            synthetic_record("sbm", 50, "x", [-10.0, -9.95, -9.9, -8.0], 1.0, 0.0)
        ]
        sweep = (0.005, 0.0075, 0.01, 0.011, 0.0125, 0.015)
        table = summarize(records, "tte", variant="compute", epsilons=sweep)
        assert [row[2] for row in table.rows] == list(sweep)

    def test_overhead_flattens_total_variant_scaling(self):
        # constant per-run overhead dominating a growing compute cost
        records = []
        for n in (50, 100, 200, 400):
            compute = 1e-6 * n**2
            records.append(
                synthetic_record(
                    "sbm", n, f"i{n}", [-10.0] * 9 + [-9.0], compute, overhead=1.0
                )
            )
        fit_compute = summarize(records, "tte", variant="compute", epsilons=(0.0,)).fits
        fit_total = summarize(records, "tte", variant="total", epsilons=(0.0,)).fits
        alpha_compute = fit_compute[0][3]
        alpha_total = fit_total[0][3]
        assert alpha_compute == pytest.approx(2.0, abs=1e-6)
        assert alpha_total < alpha_compute
        assert abs(alpha_total) < 0.1

    def test_ttr_scan(self):
        record = synthetic_record("sbm", 50, "x", [-10.0], 1.0, 0.0)
        record.runs[0].trace = [(0.1, -8.0), (0.5, -9.6), (0.9, -10.0)]
        table = summarize([record], "ttr", variant="compute", target_ratios=(0.95,))
        ((solver, n, param, value, stderr, variant),) = table.rows
        assert value == 0.5

    def test_success_fraction_thresholds(self):
        records = [
            synthetic_record("sbm", 50, "a", [-10.0], 1.0, 0.0),
            synthetic_record("sbm", 50, "b", [-9.2], 1.0, 0.0),
        ]
        table = summarize(records, "success_fraction", thresholds=(0.90, 0.95, 0.99))
        values = {row[2]: row[3] for row in table.rows}
        assert values[0.90] == 1.0
        assert values[0.95] == 0.5
        assert values[0.99] == 0.5

    def test_persisted_equals_in_process(self, tmp_path):
        paths = write_instances(tmp_path, [small_ising(s) for s in range(2)])
        config = ExperimentConfig(
            solver="sa-qubo",
            instance_paths=paths,
            solver_params=SA_PARAMS,
            repetitions=2,
            seed=5,
            output_dir=str(tmp_path / "out"),
        )
        records = run_experiment(config)
        reloaded = load_records(tmp_path / "out" / "records")
        direct = summarize(records, "tte", variant="total", epsilons=(0.01,))
        persisted = summarize(reloaded, "tte", variant="total", epsilons=(0.01,))
        assert direct.to_csv() == persisted.to_csv()

    def test_csv_shape(self, tmp_path):
        records = [
            synthetic_record("sbm", n, f"i{n}", [-10.0] * 3 + [-9.0], 1e-6 * n**2, 0.0)
            for n in (50, 100, 200)
        ]
        table = summarize(records, "tte", variant="compute", epsilons=(0.0,))
        table_path, fits_path = write_tables(table, tmp_path)
        lines = table_path.read_text().splitlines()
        assert lines[0] == "solver,n,param,value,stderr,variant"
        assert len(lines) == 4
        fit_lines = fits_path.read_text().splitlines()
        assert fit_lines[0] == (
            "solver,param,variant,alpha,alpha_stderr,prefactor,n_min,n_max"
        )
        assert len(fit_lines) == 2

    def test_fit_matches_metrics_module(self):
        records = [
            synthetic_record("sbm", n, f"i{n}", [-10.0] * 3 + [-9.0], 2e-6 * n**1.5, 0.0)
            for n in (50, 100, 200, 400)
        ]
        table = summarize(records, "tte", variant="compute", epsilons=(0.0,))
        fit_row = table.fits[0]
        points = [(row[1], row[3]) for row in table.rows]
        fit = fit_power_law(points)
        assert fit_row[3] == fit.alpha
        assert fit_row[4] == fit.alpha_stderr
