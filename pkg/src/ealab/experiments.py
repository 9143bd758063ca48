"""Batch execution, summary statistics, profile aggregation, and the
coupling-based unbiasedness harness.

A batch of R independent runs uses seeds base_seed, base_seed+1, ...,
base_seed+R-1, so batches are embarrassingly parallel and each run is
individually replayable.  Aggregation is a deterministic fold over outcomes
in run-index order; the worker count cannot change any output byte.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algorithms import AlgorithmConfig
from .engine import CostModel, RunOutcome, profile_csv_rows, run, run_csv_row
from .objectives import Objective, onemax, onemax_target
from .variation import ParameterError

PERCENTILES = (2, 25, 50, 75, 98)


@dataclass(frozen=True)
class SummaryStats:
    """Mean, stddev/mean ratio (percent), and the five reference percentiles."""

    mean: float
    stddev_over_mean: float
    percentiles: dict[int, float]
    count: int


@dataclass(frozen=True)
class BatchConfig:
    algorithm: AlgorithmConfig
    objective: Objective
    cost_model: CostModel | None = None
    runs: int = 100
    base_seed: int = 0
    budget: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ParameterError(f"runs must be >= 1, got {self.runs}")


@dataclass
class ProfileAggregate:
    """Per-level summary of first-hitting evaluation counts across runs.

    Runs that never reached a level are excluded from that level's summary;
    ``exclusions[k]`` records how many.
    """

    levels: dict[int, SummaryStats] = field(default_factory=dict)
    exclusions: dict[int, int] = field(default_factory=dict)

    def mean(self, k: int) -> float:
        return self.levels[k].mean


@dataclass(frozen=True)
class BatchResult:
    config: BatchConfig
    outcomes: list[RunOutcome]
    summary: SummaryStats | None
    profile: ProfileAggregate
    exhausted_runs: int

    @property
    def cost_model(self) -> CostModel:
        return self.config.cost_model or self.config.algorithm.default_cost_model()


def summarize(samples) -> SummaryStats:
    """Nearest-rank summary: percentile q is the ceil(q*N/100)-th smallest
    sample; stddev uses the N-1 divisor (0 for a single sample)."""
    xs = sorted(float(s) for s in samples)
    n = len(xs)
    if n == 0:
        raise ParameterError("summarize needs at least one sample")
    mean = math.fsum(xs) / n
    if n > 1:
        var = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
        sd = math.sqrt(var)
    else:
        sd = 0.0
    ratio = 100.0 * sd / mean if mean != 0 else 0.0
    pct = {}
    for q in PERCENTILES:
        idx = max(1, math.ceil(q * n / 100))
        pct[q] = xs[idx - 1]
    return SummaryStats(mean=mean, stddev_over_mean=ratio, percentiles=pct, count=n)


def run_batch(config: BatchConfig, workers: int = 1) -> BatchResult:
    """Execute the batch and fold outcomes into summary and profile stats.

    The summary covers total_evaluations of the runs that hit the optimum;
    runs that exhausted the budget are counted in ``exhausted_runs`` and
    excluded.
    """
    model = config.cost_model or config.algorithm.default_cost_model()

    def _one(i: int) -> RunOutcome:
        return run(
            config.algorithm,
            config.objective,
            model=model,
            budget=config.budget,
            seed=config.base_seed + i,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_one, range(config.runs)))
    else:
        outcomes = [_one(i) for i in range(config.runs)]

    hits = [o.total_evaluations for o in outcomes if o.hit_optimum]
    exhausted = config.runs - len(hits)
    summary = summarize(hits) if hits else None

    agg = ProfileAggregate()
    n = config.objective.n
    for k in range(n + 1):
        vals = [o.profile[k] for o in outcomes if k in o.profile]
        missing = config.runs - len(vals)
        if vals:
            agg.levels[k] = summarize(vals)
        if missing:
            agg.exclusions[k] = missing
    return BatchResult(
        config=config,
        outcomes=outcomes,
        summary=summary,
        profile=agg,
        exhausted_runs=exhausted,
    )


def empirical_crossover(a: ProfileAggregate, b: ProfileAggregate, n: int):
    """Smallest level k from which a's mean first-hitting times stay above
    b's through level n (suffix dominance).

    Near-tangent mean curves cross noisily; requiring dominance of the whole
    suffix makes the estimate robust against isolated low-level noise
    excursions.  None if a is not above b at level n.
    """
    k = n
    while k >= 1:
        if not (k in a.levels and k in b.levels and a.levels[k].mean > b.levels[k].mean):
            break
        k -= 1
    return k + 1 if k < n else None


def unbiasedness_check(algorithm, n: int, z, seed: int, budget: int | None = None) -> bool:
    """Coupled-run invariance check under the XOR automorphism.

    Runs the algorithm on the plain one-bit counting objective and on its
    z-target generalization, with identical seeds; the second run's initial
    string is the first's XOR-ed with (all-ones XOR z), which maps the two
    fitness landscapes onto each other.  True iff the per-iteration fitness
    trajectories (and hence the runtimes) are identical.
    """
    config = algorithm if isinstance(algorithm, AlgorithmConfig) else AlgorithmConfig.from_name(str(algorithm))
    if config.family not in ("rls", "ea"):
        raise ParameterError(
            "the unbiasedness harness covers the single-parent rls/ea families"
        )
    zz = np.asarray(z, np.uint8)
    if zz.shape != (n,):
        raise ParameterError("target z must have length n")
    mask = (1 - zz).astype(np.uint8)  # all-ones XOR z
    a = run(config, onemax(n), seed=seed, budget=budget, record_trajectory=True)
    b = run(
        config,
        onemax_target(zz),
        seed=seed,
        budget=budget,
        init_mask=mask,
        record_trajectory=True,
    )
    return (
        a.total_evaluations == b.total_evaluations
        and a.hit_optimum == b.hit_optimum
        and a.trajectory.shape == b.trajectory.shape
        and bool(np.all(a.trajectory == b.trajectory))
    )


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

SUMMARY_HEADER = [
    "algorithm", "objective", "n", "runs",
    "mean", "stddev_over_mean", "p2", "p25", "p50", "p75", "p98",
]
RUNS_HEADER = [
    "algorithm", "objective", "n", "seed", "cost_model", "hit_optimum", "total_evaluations",
]
PROFILES_HEADER = ["algorithm", "level", "mean", "p25", "p75"]
RUN_PROFILES_HEADER = ["seed", "level", "evaluations"]


def summary_row(result: BatchResult) -> list:
    c = result.config
    s = result.summary
    if s is None:
        body = [""] * 7
    else:
        body = [
            f"{s.mean:.2f}",
            f"{s.stddev_over_mean:.2f}",
            *(f"{s.percentiles[q]:.1f}" for q in PERCENTILES),
        ]
    return [c.algorithm.name or c.algorithm.family, c.objective.kind, c.objective.n, c.runs, *body]


def profiles_rows(result: BatchResult) -> list[list]:
    c = result.config
    name = c.algorithm.name or c.algorithm.family
    rows = []
    for k in sorted(result.profile.levels):
        s = result.profile.levels[k]
        rows.append([name, k, f"{s.mean:.2f}", f"{s.percentiles[25]:.1f}", f"{s.percentiles[75]:.1f}"])
    return rows


def runs_rows(result: BatchResult) -> list[list]:
    c = result.config
    name = c.algorithm.name or c.algorithm.family
    model = result.cost_model
    return [
        run_csv_row(name, c.objective.kind, c.objective.n, model, o)
        for o in result.outcomes
    ]


def run_profile_rows(result: BatchResult) -> list[list]:
    rows = []
    for o in result.outcomes:
        rows.extend(profile_csv_rows(o))
    return rows


def write_csv(path: str, header: list, rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_batch_outputs(
    outdir: str, results: list[BatchResult], per_run_profiles: bool = False
) -> dict[str, str]:
    """Write summary.csv, runs.csv, and profiles.csv for a list of batches."""
    os.makedirs(outdir, exist_ok=True)
    paths = {
        "summary": os.path.join(outdir, "summary.csv"),
        "runs": os.path.join(outdir, "runs.csv"),
        "profiles": os.path.join(outdir, "profiles.csv"),
    }
    write_csv(paths["summary"], SUMMARY_HEADER, [summary_row(r) for r in results])
    rows = []
    for r in results:
        rows.extend(runs_rows(r))
    write_csv(paths["runs"], RUNS_HEADER, rows)
    rows = []
    for r in results:
        rows.extend(profiles_rows(r))
    write_csv(paths["profiles"], PROFILES_HEADER, rows)
    if per_run_profiles:
        paths["run_profiles"] = os.path.join(outdir, "run_profiles.csv")
        rows = []
        for r in results:
            rows.extend(run_profile_rows(r))
        write_csv(paths["run_profiles"], RUN_PROFILES_HEADER, rows)
    return paths
