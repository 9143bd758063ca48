"""Command-line front end.

Subcommands: ``run`` (seeded batch of runs, CSV outputs), ``profile``
(empirical runtime profiles for one or more algorithms), ``theory`` (exact
tables, profile-bound curves, drift table), ``drift-table``, ``optimal-c``
(numerically minimized rate constants), and ``repro`` (one-shot reproduction
of the reference tables and profile figures).

Exit codes: 0 success, 2 usage error, 1 runtime failure.  The environment
variable ``EALAB_SEED`` provides the default seed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import experiments, theory
from .algorithms import ALGORITHM_NAMES, AlgorithmConfig
from .engine import CostModel
from .experiments import BatchConfig, run_batch, write_batch_outputs
from .objectives import parse_objective
from .variation import ParameterError

# theory-module variant keys for the CLI algorithm names
_PROFILE_ALGS = {"rls": "rls", "ea": "plain", "ea-resample": "resample", "ea-shift": "shift"}


def parse_rate(spec: str, n: int) -> float:
    """Resolve a mutation-rate flag: a decimal literal or ``<c>/n``."""
    s = spec.strip()
    try:
        if s.endswith("/n"):
            p = float(s[:-2]) / n
        else:
            p = float(s)
    except ValueError:
        raise ParameterError(f"malformed rate: {spec!r}") from None
    if not 0.0 < p < 1.0:
        raise ParameterError(f"rate {spec!r} resolves to {p}, outside (0, 1)")
    return p


def _default_seed() -> int:
    return int(os.environ.get("EALAB_SEED", "1"))


def _emit(rows, header, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(header)
        w.writerows(rows)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ealab",
        description="Implementation-aware evolutionary algorithm laboratory",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, multi_algorithm=False):
        if multi_algorithm:
            p.add_argument(
                "--algorithm", action="append", required=True, choices=ALGORITHM_NAMES,
                help="algorithm name (repeatable)",
            )
        else:
            p.add_argument("--algorithm", required=True, choices=ALGORITHM_NAMES)
        p.add_argument("--objective", required=True, help="onemax | leadingones | linear:<w,..> | onemax-z:<hex> | leadingones-z:<hex>:<perm>")
        p.add_argument("--n", type=int, required=True, help="problem dimension")
        p.add_argument("--p", default=None, help="mutation rate: decimal or c/n")
        p.add_argument("--runs", type=int, default=100)
        p.add_argument("--seed", type=int, default=None, help="base seed (default: EALAB_SEED or 1)")
        p.add_argument("--budget", type=int, default=None, help="evaluation cap per run")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        p.add_argument("--out", default=".", help="output directory for the CSV files")

    p_run = sub.add_parser("run", help="run a seeded batch and write summary/runs/profiles CSVs")
    add_common(p_run)
    p_run.add_argument("--cost-model", choices=[m.value for m in CostModel], default=None)
    p_run.add_argument(
        "--per-run-profiles", action="store_true",
        help="also write run_profiles.csv (seed,level,evaluations)",
    )

    p_prof = sub.add_parser("profile", help="empirical runtime profiles for one or more algorithms")
    add_common(p_prof, multi_algorithm=True)

    p_theory = sub.add_parser("theory", help="exact formula tables and bound curves")
    tsub = p_theory.add_subparsers(dest="theory_command", required=True)
    tsub.add_parser("table1", help="normalized LeadingOnes times at n=1000 over three rates")
    tsub.add_parser("table2", help="normalized LeadingOnes times at p=1/n over six sizes")
    tsub.add_parser("table3", help="minimizing c and value of the greedy leading constant")
    tp = tsub.add_parser("profile", help="per-level bound curves")
    tp.add_argument("--objective", choices=["onemax", "leadingones"], required=True)
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--p", default="1/n")
    tp.add_argument("--start-level", type=int, default=0)
    tp.add_argument("--out", default=None)
    td = tsub.add_parser("drift-table", help="drift-maximizing flip counts per level")
    td.add_argument("--n", type=int, required=True)
    td.add_argument("--out", default=None)
    for name in ("table1", "table2", "table3"):
        tsub.choices[name].add_argument("--out", default=None)

    p_dt = sub.add_parser("drift-table", help="alias for `theory drift-table`")
    p_dt.add_argument("--n", type=int, required=True)
    p_dt.add_argument("--out", default=None)

    p_opt = sub.add_parser("optimal-c", help="numerically minimized rate constants")
    p_opt.add_argument("--target", choices=["greedy", "leadingones"], required=True)
    p_opt.add_argument("--n", type=int, default=None, help="dimension (default: asymptotic limit)")
    p_opt.add_argument("--out", default=None)

    p_repro = sub.add_parser("repro", help="reproduce a reference table or profile figure")
    p_repro.add_argument("target", choices=["table1", "table2", "table3", "fig3", "fig5"])
    p_repro.add_argument("--out", default=None)
    return ap


def _cmd_run(args) -> int:
    obj = parse_objective(args.objective, args.n)
    rate = parse_rate(args.p, args.n) if args.p is not None else None
    config = AlgorithmConfig.from_name(args.algorithm, mutation_rate=rate)
    model = CostModel.parse(args.cost_model) if args.cost_model else None
    seed = args.seed if args.seed is not None else _default_seed()
    batch = BatchConfig(
        algorithm=config, objective=obj, cost_model=model,
        runs=args.runs, base_seed=seed, budget=args.budget,
    )
    result = run_batch(batch, workers=args.workers)
    paths = write_batch_outputs(args.out, [result], per_run_profiles=args.per_run_profiles)
    w = csv.writer(sys.stdout)
    w.writerow(experiments.SUMMARY_HEADER)
    w.writerow(experiments.summary_row(result))
    if result.exhausted_runs:
        print(f"# {result.exhausted_runs} run(s) exhausted the budget", file=sys.stderr)
    print(f"# wrote {paths['summary']}, {paths['runs']}, {paths['profiles']}", file=sys.stderr)
    return 0


def _cmd_profile(args) -> int:
    obj = parse_objective(args.objective, args.n)
    rate = parse_rate(args.p, args.n) if args.p is not None else None
    seed = args.seed if args.seed is not None else _default_seed()
    results = []
    for name in args.algorithm:
        config = AlgorithmConfig.from_name(name, mutation_rate=rate)
        batch = BatchConfig(
            algorithm=config, objective=obj,
            runs=args.runs, base_seed=seed, budget=args.budget,
        )
        results.append(run_batch(batch, workers=args.workers))
    paths = write_batch_outputs(args.out, results)
    if len(results) == 2:
        k = experiments.empirical_crossover(results[0].profile, results[1].profile, args.n)
        print(f"# empirical crossover ({args.algorithm[0]} worse than {args.algorithm[1]} from level): {k}")
    print(f"# wrote {paths['summary']}, {paths['runs']}, {paths['profiles']}", file=sys.stderr)
    return 0


def _rows_table1():
    grid = theory.table1_grid()
    header = ["variant", "p=1/n", "p=1/(10n)", "p=1/(100n)"]
    rows = [[v, *(f"{x:.6f}" for x in grid[v])] for v in theory.VARIANTS_LEADINGONES]
    return header, rows


def _rows_table2():
    grid = theory.table2_grid()
    header = ["variant", *(f"n={n}" for n in theory.TABLE2_NS)]
    rows = [[v, *(f"{x:.6f}" for x in grid[v])] for v in theory.VARIANTS_LEADINGONES]
    return header, rows


def _rows_table3():
    header = ["n", "c", "value"]
    rows = [[n, f"{c:.6f}", f"{val:.6f}"] for n, c, val in theory.table3_grid()]
    return header, rows


def _rows_theory_profile(objective: str, n: int, p_spec: str, start_level: int):
    p = parse_rate(p_spec, n)
    header = ["algorithm", "k", "bound"]
    rows = []
    for name, alg in _PROFILE_ALGS.items():
        curve = theory.profile_curve(alg, objective, n, p, start_level=start_level)
        for k in range(start_level + 1, n + 1):
            rows.append([name, k, f"{curve[k - 1]:.4f}"])
    return header, rows


def _rows_drift_table(n: int):
    table = theory.optimal_flip_table(n)
    header = ["v", "ell", "drift"]
    rows = [[v, e, f"{d:.10g}"] for v, (e, d) in enumerate(table.best_flip)]
    return header, rows


def _cmd_theory(args) -> int:
    cmd = args.theory_command
    if cmd == "table1":
        header, rows = _rows_table1()
    elif cmd == "table2":
        header, rows = _rows_table2()
    elif cmd == "table3":
        header, rows = _rows_table3()
    elif cmd == "profile":
        header, rows = _rows_theory_profile(args.objective, args.n, args.p, args.start_level)
    else:
        header, rows = _rows_drift_table(args.n)
    _emit(rows, header, args.out)
    return 0


def _cmd_optimal_c(args) -> int:
    if args.target == "greedy":
        c, value = theory.minimize_greedy_constant(args.n)
        label = f"greedy@{args.n}" if args.n else "greedy@limit"
    else:
        c, value = (
            theory.leadingones_optimal_rate(args.n)
            if args.n
            else theory.leadingones_optimal_rate()
        )
        label = f"leadingones@{args.n or 10**6}"
    _emit([[label, f"{c:.6f}", f"{value:.6f}"]], ["target", "c", "value"], args.out)
    return 0


def _cmd_repro(args) -> int:
    if args.target == "table1":
        header, rows = _rows_table1()
    elif args.target == "table2":
        header, rows = _rows_table2()
    elif args.target == "table3":
        header, rows = _rows_table3()
    elif args.target == "fig3":
        # bound profiles at n=10000 assuming a start at level n/2
        n = 10000
        header, rows = _rows_theory_profile("onemax", n, "1/n", start_level=n // 2)
    else:  # fig5
        header, rows = _rows_theory_profile("leadingones", 10000, "1/n", start_level=0)
    _emit(rows, header, args.out)
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "profile":
            return _cmd_profile(args)
        if args.command == "theory":
            return _cmd_theory(args)
        if args.command == "drift-table":
            header, rows = _rows_drift_table(args.n)
            _emit(rows, header, args.out)
            return 0
        if args.command == "optimal-c":
            return _cmd_optimal_c(args)
        if args.command == "repro":
            return _cmd_repro(args)
        raise AssertionError(f"unhandled command {args.command!r}")  # pragma: no cover
    except (ParameterError, ValueError, OSError) as exc:
        print(f"ealab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
