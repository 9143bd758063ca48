"""Implementation-aware evolutionary algorithm laboratory.

Seeded, reproducible runtime experiments for RLS, (1+1) EA variants, a
paired mutate-then-crossover GA with self-adjusting offspring count, and a
two-individual greedy GA on OneMax/LeadingOnes-style benchmarks — plus an
exact calculator for every closed-form runtime expression, profile bound,
and optimal parameter constant used by those algorithms.
"""

from .algorithms import ALGORITHM_NAMES, AlgorithmConfig, run_python
from .engine import CostModel, RunOutcome, default_budget, run
from .experiments import BatchConfig, run_batch, summarize, unbiasedness_check
from .objectives import (
    Objective,
    evaluate,
    is_optimum,
    leadingones,
    leadingones_target,
    linear,
    onemax,
    onemax_target,
    parse_objective,
)
from .variation import (
    RandomSource,
    crossover_biased,
    mutate_flip,
    random_bitstring,
    sample_binomial,
    sample_binomial_positive,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_NAMES",
    "AlgorithmConfig",
    "BatchConfig",
    "CostModel",
    "Objective",
    "RandomSource",
    "RunOutcome",
    "crossover_biased",
    "default_budget",
    "evaluate",
    "is_optimum",
    "leadingones",
    "leadingones_target",
    "linear",
    "mutate_flip",
    "onemax",
    "onemax_target",
    "parse_objective",
    "random_bitstring",
    "run",
    "run_batch",
    "run_python",
    "sample_binomial",
    "sample_binomial_positive",
    "summarize",
    "unbiasedness_check",
]
