"""Command-line entry points.

Verbs: ``gen`` (instance generation), ``solve`` (one solver run on one
instance), ``simon`` (period-recovery trials with query and timing
accounting), ``bench run`` (sweep from a JSON config), ``bench summarize``
(metric tables from a record directory).  Exit codes: 0 success, 1 usage
error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .bench import (
    ExperimentConfig,
    _solve_once,
    run_experiment,
    summarize,
    write_generated_instances,
    write_tables,
)
from .model import load_instance
from .records import load_records
from .runs import TimingBreakdown
from .simon import (
    BinomPrefixTable,
    random_oracle,
    random_period,
    solve_simon_general,
    solve_simon_restricted,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cmd_gen(args) -> int:
    spec = {
        "type": args.type,
        "sizes": args.size,
        "count": args.count,
        "seed": args.seed,
        "alpha": args.alpha,
    }
    paths = write_generated_instances(spec, args.out)
    print(f"wrote {len(paths)} instances to {args.out}")
    return 0


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if args.solver == "sbm":
        solver = "sbm"
        params = {"n_replicas": args.replicas, "n_steps": args.steps}
        if args.dt is not None:
            params["dt"] = args.dt
    else:
        solver = f"sa-{args.mode}"
        params = {
            "n_trajectories": args.trajectories,
            "n_steps": args.steps,
            "n_passes": args.passes,
            "t0": args.t0,
            "t1": args.t1,
        }
    if args.trace_every:
        params["trace_every"] = args.trace_every
    run = _solve_once(solver, inst, params, args.seed, {})
    payload = json.dumps(run.to_dict(), sort_keys=True, indent=1) + "\n"
    if args.json:
        Path(args.json).write_text(payload)
    else:
        sys.stdout.write(payload)
    print(
        f"{solver}: best energy {run.best_energy:.6f} "
        f"in {run.timing.total:.3f}s (compute {run.timing.compute:.3f}s)",
        file=sys.stderr,
    )
    return 0


def _cmd_simon(args) -> int:
    if args.mode == "restricted" and args.w is None:
        raise ValueError("restricted mode needs --w")
    table = None
    table_seconds = 0.0
    if args.mode == "restricted":
        t0 = time.perf_counter()
        table = BinomPrefixTable((args.n + 1) // 2)
        table_seconds = time.perf_counter() - t0

    trials = []
    for trial in range(args.trials):
        rng = np.random.default_rng(
            np.random.SeedSequence(args.seed, spawn_key=(trial,))
        )
        span = time.perf_counter()
        t0 = time.perf_counter()
        if args.mode == "restricted":
            weight = args.w
        else:
            weight = int(rng.integers(1, args.n + 1))
        period = random_period(args.n, weight, rng)
        oracle = random_oracle(args.n, rng, period=period)
        setup = time.perf_counter() - t0

        t0 = time.perf_counter()
        if args.mode == "restricted":
            found = solve_simon_restricted(args.n, args.w, oracle, table)
        else:
            found = solve_simon_general(args.n, oracle)
        compute = time.perf_counter() - t0

        t0 = time.perf_counter()
        entry = {
            "period": period,
            "found": found,
            "success": found == period,
            "queries": oracle.query_count,
        }
        collect = time.perf_counter() - t0
        entry["timing"] = TimingBreakdown(
            setup=setup,
            compute=compute,
            collect=collect,
            total=time.perf_counter() - span,
        ).to_dict()
        trials.append(entry)

    result = {
        "n": args.n,
        "w": args.w,
        "mode": args.mode,
        "seed": args.seed,
        "table_seconds": table_seconds,
        "trials": trials,
        "all_recovered": all(t["success"] for t in trials),
    }
    payload = json.dumps(result, sort_keys=True, indent=1) + "\n"
    if args.json:
        Path(args.json).write_text(payload)
    else:
        sys.stdout.write(payload)
    recovered = sum(t["success"] for t in trials)
    print(f"recovered {recovered}/{len(trials)} periods", file=sys.stderr)
    return 0


def _cmd_bench_run(args) -> int:
    config = ExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))
    records = run_experiment(config)
    n_runs = sum(len(r.runs) for r in records)
    print(f"wrote {len(records)} records ({n_runs} runs) to {config.output_dir}")
    return 0


def _cmd_bench_summarize(args) -> int:
    records = []
    for directory in args.records:
        records.extend(load_records(directory))
    table = summarize(
        records,
        args.metric,
        variant=args.variant,
        epsilons=tuple(args.epsilon),
        target_ratios=tuple(args.ratio),
        thresholds=tuple(args.threshold),
    )
    table_path, fits_path = write_tables(table, args.out, stem=args.stem)
    print(f"wrote {table_path}" + (f" and {fits_path}" if fits_path else ""))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="spinbench")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate benchmark instances")
    gen.add_argument("--type", required=True, choices=("cauchy4", "pareto6"))
    gen.add_argument("--size", type=int, action="append", required=True)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--alpha", type=float, default=1.0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="run one solver on one instance")
    solve_sub = solve.add_subparsers(dest="solver", required=True)

    sbm = solve_sub.add_parser("sbm")
    sbm.add_argument("--instance", required=True)
    sbm.add_argument("--replicas", type=int, default=512)
    sbm.add_argument("--steps", type=int, default=1000)
    sbm.add_argument("--dt", type=float, default=None)
    sbm.add_argument("--seed", type=int, default=0)
    sbm.add_argument("--trace-every", type=int, default=None)
    sbm.add_argument("--json", default=None)
    sbm.set_defaults(func=_cmd_solve)

    sa = solve_sub.add_parser("sa")
    sa.add_argument("--instance", required=True)
    sa.add_argument("--mode", choices=("qubo", "hubo"), default="qubo")
    sa.add_argument("--trajectories", type=int, default=256)
    sa.add_argument("--steps", type=int, default=200)
    sa.add_argument("--passes", type=int, default=1)
    sa.add_argument("--t0", type=float, default=10.0)
    sa.add_argument("--t1", type=float, default=0.05)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--trace-every", type=int, default=None)
    sa.add_argument("--json", default=None)
    sa.set_defaults(func=_cmd_solve)

    simon = sub.add_parser("simon", help="classical period recovery trials")
    simon.add_argument("--n", type=int, required=True)
    simon.add_argument("--w", type=int, default=None)
    simon.add_argument("--mode", choices=("general", "restricted"), default="restricted")
    simon.add_argument("--seed", type=int, default=0)
    simon.add_argument("--trials", type=int, default=1)
    simon.add_argument("--json", default=None)
    simon.set_defaults(func=_cmd_simon)

    bench = sub.add_parser("bench", help="experiment sweeps and metric tables")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    run = bench_sub.add_parser("run")
    run.add_argument("config")
    run.set_defaults(func=_cmd_bench_run)

    summ = bench_sub.add_parser("summarize")
    summ.add_argument("records", nargs="+")
    summ.add_argument(
        "--metric", required=True, choices=("tte", "ttr", "success_fraction")
    )
    summ.add_argument(
        "--variant", default="total", choices=("compute", "total", "total+tuning")
    )
    summ.add_argument("--epsilon", type=float, action="append", default=None)
    summ.add_argument("--ratio", type=float, action="append", default=None)
    summ.add_argument("--threshold", type=float, action="append", default=None)
    summ.add_argument("--out", default=".")
    summ.add_argument("--stem", default=None)
    summ.set_defaults(func=_cmd_bench_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) == "bench" and args.bench_command == "summarize":
        args.epsilon = args.epsilon or [0.01]
        args.ratio = args.ratio or [0.95]
        args.threshold = args.threshold or [0.90, 0.95, 0.99]
    try:
        return args.func(args) or 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
