"""Run-loop scaffolding: evaluation accounting, profile recording, outcomes.

Two cost models govern what an evaluation costs:

* ``COUNT_ALL`` — every created offspring is evaluated and charged, even if
  it is bit-equal to one of its parents (the vanilla accounting).
* ``SKIP_PARENT_EQUAL`` — an offspring that bit-equals a designated parent is
  not evaluated: its fitness is taken from that parent and nothing is
  charged (the implementation-aware accounting).

A run charges its initialization evaluations (1 for single-parent
algorithms and the paired GA, 2 for the greedy GA), halts the moment the
ledger reaches the budget, and ends at the first *evaluation* of an optimal
search point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels as _k
from .objectives import Objective, evaluate as _evaluate, level as _level
from .variation import ParameterError, RandomSource


class CostModel(str, Enum):
    COUNT_ALL = "count-all"
    SKIP_PARENT_EQUAL = "skip-parent-equal"

    @classmethod
    def parse(cls, s: str) -> "CostModel":
        for m in cls:
            if m.value == s:
                return m
        raise ParameterError(f"unknown cost model: {s!r}")


class BudgetExhausted(Exception):
    """Control outcome: an evaluation was requested with a full ledger."""


class ConfigurationError(ValueError):
    """An algorithm configuration is invalid for the requested run."""


@dataclass
class EvaluationLedger:
    """Monotone counter of charged fitness evaluations, capped by a budget."""

    budget: int
    charged: int = 0

    def charge(self) -> int:
        """Charge one evaluation; raises BudgetExhausted if the cap is hit."""
        if self.charged >= self.budget:
            raise BudgetExhausted
        self.charged += 1
        return self.charged

    @property
    def exhausted(self) -> bool:
        return self.charged >= self.budget


@dataclass
class RuntimeProfile:
    """First-hitting ledger values per integer fitness level.

    ``first_hit[k]`` is the ledger count when the best-so-far level first
    reached at least k; unreached levels are absent.
    """

    first_hit: dict[int, int] = field(default_factory=dict)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RuntimeProfile":
        return cls({int(k): int(v) for k, v in enumerate(arr) if v >= 0})

    @property
    def max_level(self) -> int:
        return max(self.first_hit) if self.first_hit else -1

    def __getitem__(self, k: int) -> int:
        return self.first_hit[k]

    def __contains__(self, k: int) -> bool:
        return k in self.first_hit


@dataclass(frozen=True)
class RunDiagnostics:
    """Instrumentation counters from a run (not part of the CSV surface)."""

    iterations: int
    parent_equal_offspring: int
    parent_equal_charged: int
    elitism_violations: int
    parameter_violations: int


@dataclass(frozen=True)
class RunOutcome:
    hit_optimum: bool
    total_evaluations: int
    profile: RuntimeProfile
    seed: int
    final_best: float
    diagnostics: RunDiagnostics | None = None
    trajectory: np.ndarray | None = None

    def key(self):
        """Comparable content (trajectory/diagnostics excluded)."""
        return (
            self.hit_optimum,
            self.total_evaluations,
            tuple(sorted(self.profile.first_hit.items())),
            self.seed,
            self.final_best,
        )


def default_budget(n: int) -> int:
    """1000 * n * ln(n) evaluations, far above any expected runtime here."""
    return int(math.ceil(1000.0 * n * max(math.log(n), 1.0)))


def charge_and_evaluate(
    ledger: EvaluationLedger,
    obj: Objective,
    offspring,
    parents,
    model: CostModel,
):
    """Evaluate ``offspring`` under the cost model.

    ``parents`` is an iterable of (bits, fitness) pairs with already-known
    fitness values.  Under SKIP_PARENT_EQUAL an offspring bit-equal to some
    parent returns that parent's fitness and charges nothing; otherwise the
    objective is evaluated and one evaluation is charged.  A full ledger
    raises :class:`BudgetExhausted` (run termination, not an error).
    """
    if model is CostModel.SKIP_PARENT_EQUAL:
        for pbits, pfit in parents:
            if np.array_equal(offspring, pbits):
                return float(pfit), False
    ledger.charge()
    return _evaluate(obj, offspring), True


def record_hit(profile: RuntimeProfile, new_best: float, ledger: EvaluationLedger) -> RuntimeProfile:
    """Fill first_hit for every integer level in (previous best, new_best]."""
    lvl = int(math.floor(new_best))
    for k in range(profile.max_level + 1, lvl + 1):
        profile.first_hit[k] = ledger.charged
    return profile


def _kernel_args(obj: Objective, model: CostModel, budget: int, init_mask, n: int):
    if init_mask is None:
        mask = np.zeros(n, np.uint8)
    else:
        mask = np.asarray(init_mask, np.uint8)
        if mask.shape != (n,):
            raise ParameterError("init mask must have the objective's length")
    first_hit = np.full(n + 1, -1, np.int64)
    counters = np.zeros(8, np.int64)
    skip = model is CostModel.SKIP_PARENT_EQUAL
    return mask, first_hit, counters, skip


def run(
    config,
    obj: Objective,
    model: CostModel | None = None,
    budget: int | None = None,
    seed: int = 0,
    init_mask=None,
    record_trajectory: bool = False,
    trajectory_cap: int | None = None,
) -> RunOutcome:
    """Drive one full run of ``config`` on ``obj`` and return its outcome.

    Dispatches to the compiled run loops; identical (config, seed) give a
    bit-identical outcome.  ``init_mask`` is XOR-ed onto the sampled initial
    string(s) without consuming extra randomness (used by the unbiasedness
    harness).  With ``record_trajectory`` the outcome carries the incumbent
    fitness after initialization and after every iteration.
    """
    from .algorithms import AlgorithmConfig  # local: avoid import cycle

    if not isinstance(config, AlgorithmConfig):
        config = AlgorithmConfig.from_name(str(config))
    config.validate(obj)
    n = obj.n
    if model is None:
        model = config.default_cost_model()
    if budget is None:
        budget = default_budget(n)
    if budget < 1:
        raise ConfigurationError(f"budget must be >= 1, got {budget}")
    rng = RandomSource(seed)
    mask, first_hit, counters, skip = _kernel_args(obj, model, budget, init_mask, n)

    if record_trajectory:
        cap = trajectory_cap if trajectory_cap is not None else budget + 1
        traj = np.empty(cap, np.float64)
    else:
        traj = np.empty(0, np.float64)

    dummy_table = np.zeros(1, np.int64)
    if config.family in ("rls", "rls-opt", "ea"):
        if config.family == "rls":
            variant, p, table = _k.VARIANT_RLS, 0.5, dummy_table
        elif config.family == "rls-opt":
            from .theory import optimal_flip_table

            table = optimal_flip_table(n).best_flip_array()
            variant, p = _k.VARIANT_RLS_OPT, 0.5
        else:
            variant = {
                "plain": _k.VARIANT_PLAIN,
                "resample": _k.VARIANT_RESAMPLE,
                "shift": _k.VARIANT_SHIFT,
            }[config.mutation_variant]
            p, table = config.resolved_rate(n), dummy_table
        hit, total, best = _k.run_one_plus_one(
            rng._state, n, variant, p, table,
            obj.kind_code, obj._z, obj._pi, obj._rank, obj._w,
            skip, budget, mask, first_hit, counters, traj,
        )
    elif config.family == "ollga":
        hit, total, best = _k.run_ollga(
            rng._state, n, config.is_mod(), config.update_strength,
            config.initial_lambda,
            obj.kind_code, obj._z, obj._pi, obj._rank, obj._w,
            skip, budget, mask, first_hit, counters,
        )
    elif config.family == "greedy-ga":
        kvariant = _k.GREEDY_MOD if config.parental_selection == "both-when-equal" else _k.GREEDY_SUDHOLT
        hit, total, best = _k.run_greedy(
            rng._state, n, kvariant, config.resolved_rate(n),
            obj.kind_code, obj._z, obj._pi, obj._rank, obj._w,
            skip, budget, mask, first_hit, counters,
        )
    else:  # pragma: no cover
        raise ConfigurationError(f"unknown family: {config.family!r}")

    diagnostics = RunDiagnostics(
        iterations=int(counters[_k.C_ITERATIONS]),
        parent_equal_offspring=int(counters[_k.C_EQUAL_SEEN]),
        parent_equal_charged=int(counters[_k.C_EQUAL_CHARGED]),
        elitism_violations=int(counters[_k.C_ELITISM_VIOLATIONS]),
        parameter_violations=int(counters[_k.C_PARAM_VIOLATIONS]),
    )
    trajectory = None
    if record_trajectory:
        trajectory = traj[: int(counters[_k.C_TRAJ_LEN])].copy()
    return RunOutcome(
        hit_optimum=bool(hit),
        total_evaluations=int(total),
        profile=RuntimeProfile.from_array(first_hit),
        seed=int(seed),
        final_best=float(best),
        diagnostics=diagnostics,
        trajectory=trajectory,
    )


def run_csv_row(algorithm: str, objective: str, n: int, model: CostModel, outcome: RunOutcome):
    """One runs.csv row: algorithm,objective,n,seed,cost_model,hit_optimum,total_evaluations."""
    return [
        algorithm,
        objective,
        n,
        outcome.seed,
        model.value,
        int(outcome.hit_optimum),
        outcome.total_evaluations,
    ]


def profile_csv_rows(outcome: RunOutcome):
    """Long-format profile rows: seed,level,evaluations."""
    return [[outcome.seed, k, v] for k, v in sorted(outcome.profile.first_hit.items())]
