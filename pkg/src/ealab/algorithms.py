"""Algorithm configurations and step functions.

Families: randomized local search (``rls``), its drift-maximizing variant
(``rls-opt``), the single-parent EA with plain / resampling / shifted
mutation strength (``ea``, ``ea-resample``, ``ea-shift``), the paired
mutate-then-crossover GA with self-adjusting offspring count (``ollga``,
``ollga-mod``), and the two-individual greedy GA (``greedy-ga``,
``greedy-ga-mod``).

The step functions here are the readable reference implementation; they make
exactly the same random draws in exactly the same order as the compiled run
loops, so :func:`run_python` and :func:`ealab.engine.run` produce
bit-identical outcomes (asserted by the test suite).  Step functions mutate
only their own state record; independent states may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as _k
from .engine import (
    BudgetExhausted,
    ConfigurationError,
    CostModel,
    EvaluationLedger,
    RunDiagnostics,
    RunOutcome,
    RuntimeProfile,
    charge_and_evaluate,
    default_budget,
    record_hit,
)
from .objectives import Objective, evaluate as evaluate_objective, level as objective_level
from .variation import ParameterError, RandomSource, flip_positions, random_bitstring

ALGORITHM_NAMES = (
    "rls",
    "rls-opt",
    "ea",
    "ea-resample",
    "ea-shift",
    "ollga",
    "ollga-mod",
    "greedy-ga",
    "greedy-ga-mod",
)

_GREEDY_MOD_RATE = 0.773581  # drift-optimal leading constant argument
_GREEDY_SUDHOLT_RATE = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class AlgorithmConfig:
    """Identity, variant flags, and parameters of one algorithm.

    ``mutation_rate`` is a probability, a string ``"c/n"`` resolved at run
    start, or None for the family default.
    """

    family: str  # rls | rls-opt | ea | ollga | greedy-ga
    mutation_variant: str = "plain"  # plain | resample | shift
    mutation_rate: float | str | None = None
    update_strength: float = 1.5
    initial_lambda: float = 1.0
    parental_selection: str = "random-pair"  # random-pair | both-when-equal
    skip_equal_offspring: bool = False
    name: str = ""

    @classmethod
    def from_name(cls, name: str, mutation_rate: float | str | None = None) -> "AlgorithmConfig":
        base = {
            "rls": cls(family="rls"),
            "rls-opt": cls(family="rls-opt"),
            "ea": cls(family="ea", mutation_variant="plain"),
            "ea-resample": cls(family="ea", mutation_variant="resample"),
            "ea-shift": cls(family="ea", mutation_variant="shift"),
            "ollga": cls(family="ollga", mutation_variant="plain"),
            "ollga-mod": cls(
                family="ollga", mutation_variant="resample", skip_equal_offspring=True
            ),
            "greedy-ga": cls(family="greedy-ga", parental_selection="random-pair"),
            "greedy-ga-mod": cls(
                family="greedy-ga",
                parental_selection="both-when-equal",
                skip_equal_offspring=True,
            ),
        }.get(name)
        if base is None:
            raise ConfigurationError(f"unknown algorithm: {name!r}")
        return replace(base, name=name, mutation_rate=mutation_rate)

    def is_mod(self) -> bool:
        if self.family == "ollga":
            return self.mutation_variant == "resample"
        if self.family == "greedy-ga":
            return self.parental_selection == "both-when-equal"
        return False

    def default_cost_model(self) -> CostModel:
        return (
            CostModel.SKIP_PARENT_EQUAL
            if self.skip_equal_offspring
            else CostModel.COUNT_ALL
        )

    def resolved_rate(self, n: int) -> float:
        """Mutation probability at dimension n (resolves ``c/n`` forms)."""
        r = self.mutation_rate
        if r is None:
            if self.family == "greedy-ga":
                c = _GREEDY_MOD_RATE if self.is_mod() else _GREEDY_SUDHOLT_RATE
                p = c / n
            else:
                p = 1.0 / n
        elif isinstance(r, str):
            s = r.strip()
            if s.endswith("/n"):
                p = float(s[:-2]) / n
            else:
                p = float(s)
        else:
            p = float(r)
        if not 0.0 < p < 1.0:
            raise ConfigurationError(f"mutation rate must resolve into (0, 1), got {p}")
        return p

    def validate(self, obj: Objective) -> None:
        if self.family not in ("rls", "rls-opt", "ea", "ollga", "greedy-ga"):
            raise ConfigurationError(f"unknown family: {self.family!r}")
        if self.mutation_variant not in ("plain", "resample", "shift"):
            raise ConfigurationError(f"unknown mutation variant: {self.mutation_variant!r}")
        if self.family == "ollga" and self.mutation_variant == "shift":
            raise ConfigurationError("the paired GA supports plain or resample mutation only")
        if self.parental_selection not in ("random-pair", "both-when-equal"):
            raise ConfigurationError(
                f"unknown parental selection: {self.parental_selection!r}"
            )
        if self.update_strength <= 1.0:
            raise ConfigurationError("update strength must exceed 1")
        if not 1.0 <= self.initial_lambda:
            raise ConfigurationError("initial lambda must be at least 1")
        if self.family == "rls-opt" and obj.kind != "onemax":
            raise ConfigurationError(
                "the drift table is specific to the one-bit counting objective"
            )
        if self.family in ("ea", "greedy-ga"):
            self.resolved_rate(obj.n)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass
class OnePlusOneState:
    x: np.ndarray
    fitness: float


@dataclass
class OLLGAState:
    x: np.ndarray
    fitness: float
    lam: float


@dataclass
class GreedyGAState:
    x: np.ndarray
    y: np.ndarray
    fx: float
    fy: float

    def best(self) -> float:
        return self.fx if self.fx > self.fy else self.fy


class StopRun(Exception):
    """Control flow: the run just evaluated an optimal search point."""


class RunContext:
    """Ledger, profile, and RNG shared by the step functions of one run."""

    def __init__(self, obj: Objective, model: CostModel, budget: int, rng: RandomSource):
        self.obj = obj
        self.model = model
        self.rng = rng
        self.ledger = EvaluationLedger(budget=budget)
        self.profile = RuntimeProfile()
        self.best_fit = -math.inf
        self.hit = False
        self.iterations = 0
        self.parent_equal_offspring = 0
        self.parent_equal_charged = 0

    def evaluate(self, offspring: np.ndarray, parents) -> tuple[float, bool]:
        """Charge-and-evaluate with profile recording and hit detection."""
        equal_parent = any(np.array_equal(offspring, pb) for pb, _ in parents)
        fitness, charged = charge_and_evaluate(
            self.ledger, self.obj, offspring, parents, self.model
        )
        if equal_parent:
            self.parent_equal_offspring += 1
            if charged:
                self.parent_equal_charged += 1
        if charged:
            if fitness > self.best_fit:
                self.best_fit = fitness
            lvl = objective_level(self.obj, offspring)
            if lvl > self.profile.max_level:
                record_hit(self.profile, lvl, self.ledger)
            if lvl >= self.obj.n:
                self.hit = True
                raise StopRun
        return fitness, charged


def _draw_binomial(rng: RandomSource, n: int, p: float) -> int:
    return int(_k.binomial(rng._state, n, p))


def _draw_binomial_positive(rng: RandomSource, n: int, p: float) -> int:
    return int(_k.binomial_positive(rng._state, n, p))


def _toggled(x: np.ndarray, pos: np.ndarray) -> np.ndarray:
    y = x.copy()
    y[pos] ^= 1
    return y


# ---------------------------------------------------------------------------
# Step functions
# ---------------------------------------------------------------------------


def step_one_plus_one(
    state: OnePlusOneState, obj: Objective, variant: str, p: float, engine: RunContext
) -> OnePlusOneState:
    """One iteration of the single-parent EA.

    plain: strength from Binomial(n, p), a zero-strength offspring equals its
    parent and is handled by the cost model; resample: strength from the
    positive-conditioned distribution; shift: a sampled zero becomes one.
    Acceptance keeps the offspring iff its fitness is at least the parent's.
    """
    engine.iterations += 1
    n = obj.n
    if variant == "plain":
        ell = _draw_binomial(engine.rng, n, p)
    elif variant == "resample":
        ell = _draw_binomial_positive(engine.rng, n, p)
    elif variant == "shift":
        ell = _draw_binomial(engine.rng, n, p)
        if ell == 0:
            ell = 1
    else:
        raise ConfigurationError(f"unknown mutation variant: {variant!r}")
    if ell == 0:
        engine.evaluate(state.x, [(state.x, state.fitness)])
        return state
    pos = flip_positions(n, ell, engine.rng)
    y = _toggled(state.x, pos)
    fy, _ = engine.evaluate(y, [(state.x, state.fitness)])
    if fy >= state.fitness:
        return OnePlusOneState(y, fy)
    return state


def step_rls(state: OnePlusOneState, obj: Objective, engine: RunContext) -> OnePlusOneState:
    """One iteration of randomized local search: flip exactly one uniformly
    chosen bit, accept iff not worse."""
    engine.iterations += 1
    pos = flip_positions(obj.n, 1, engine.rng)
    y = _toggled(state.x, pos)
    fy, _ = engine.evaluate(y, [(state.x, state.fitness)])
    if fy >= state.fitness:
        return OnePlusOneState(y, fy)
    return state


def step_rls_opt(
    state: OnePlusOneState, obj: Objective, flip_table: np.ndarray, engine: RunContext
) -> OnePlusOneState:
    """One iteration flipping the drift-maximizing number of bits for the
    current fitness value (one-bit counting objectives only)."""
    engine.iterations += 1
    ell = int(flip_table[int(state.fitness)])
    pos = flip_positions(obj.n, ell, engine.rng)
    y = _toggled(state.x, pos)
    fy, _ = engine.evaluate(y, [(state.x, state.fitness)])
    if fy >= state.fitness:
        return OnePlusOneState(y, fy)
    return state


def _reservoir(engine: RunContext, cand_fit, best_fit, ties):
    """Tie-uniform maximum selection; one draw per tie candidate."""
    if cand_fit > best_fit:
        return True, 1
    if cand_fit == best_fit:
        ties += 1
        if engine.rng.u01() * ties < 1.0:
            return True, ties
    return False, ties


def step_ollga(
    state: OLLGAState, obj: Objective, variant: str, F: float, engine: RunContext
) -> OLLGAState:
    """One iteration of the paired GA with self-adjusting offspring count.

    Mutation phase: one strength draw (positive-conditioned for ``mod``),
    round(lam) offspring by strength-ell flips, best one wins (ties uniform).
    Crossover phase: round(lam) biased recombinations of the parent with the
    winner; ``mod`` skips evaluating offspring equal to either of the two and
    includes the winner in the final selection pool.  Success divides lam by
    F, otherwise lam is multiplied by F^(1/4); lam stays in [1, n].

    Crossover randomness is drawn only at the winner's flip positions (in
    flip order); positions where the parents agree cannot change the
    offspring, so the distribution is unchanged.
    """
    if variant not in ("vanilla", "mod"):
        raise ConfigurationError(f"unknown paired-GA variant: {variant!r}")
    mod = variant == "mod"
    engine.iterations += 1
    n = obj.n
    x, fit, lam = state.x, state.fitness, state.lam
    lam_int = int(math.floor(lam + 0.5))
    lam_int = max(1, min(lam_int, n))
    p = min(lam / n, 1.0)
    c = 1.0 / lam
    quarter = F ** 0.25

    if mod:
        ell = _draw_binomial_positive(engine.rng, n, p)
    else:
        ell = _draw_binomial(engine.rng, n, p)

    # mutation phase
    wfit = -math.inf
    wpos = np.empty(0, np.int64)
    ties = 0
    for _ in range(lam_int):
        if ell == 0:
            ofit, opos = fit, np.empty(0, np.int64)
            engine.evaluate(x, [(x, fit)])
        else:
            opos = flip_positions(n, ell, engine.rng)
            ofit, _ = engine.evaluate(_toggled(x, opos), [(x, fit)])
        take, ties = _reservoir(engine, ofit, wfit, ties)
        if take:
            wfit, wpos = ofit, opos

    xprime = _toggled(x, wpos)

    # crossover phase
    yfit = -math.inf
    ypos = np.empty(0, np.int64)
    ties = 0
    for _ in range(lam_int):
        sub = [q for q in wpos if engine.rng.u01() < c]
        spos = np.asarray(sub, np.int64)
        if spos.size == 0:
            ofit = fit
            engine.evaluate(x, [(x, fit), (xprime, wfit)])
        elif spos.size == wpos.size:
            ofit = wfit
            engine.evaluate(xprime, [(x, fit), (xprime, wfit)])
        else:
            ofit, _ = engine.evaluate(_toggled(x, spos), [(x, fit), (xprime, wfit)])
        take, ties = _reservoir(engine, ofit, yfit, ties)
        if take:
            yfit, ypos = ofit, spos

    if mod:
        take, ties = _reservoir(engine, wfit, yfit, ties)
        if take:
            yfit, ypos = wfit, wpos

    # selection and update
    if yfit > fit:
        return OLLGAState(_toggled(x, ypos), yfit, max(lam / F, 1.0))
    if yfit == fit:
        return OLLGAState(_toggled(x, ypos), yfit, min(lam * quarter, float(n)))
    return OLLGAState(x, fit, min(lam * quarter, float(n)))


def step_greedy_ga(
    state: GreedyGAState, obj: Objective, variant: str, p: float, engine: RunContext
) -> GreedyGAState:
    """One iteration of the two-individual greedy GA.

    ``sudholt``: two parents drawn uniformly with replacement from the
    current-best members, uniform crossover, unconditional strength draw,
    every offspring evaluated.  ``mod``: crossover only on a fitness tie,
    positive-conditioned strength when the intermediate offspring equals a
    parent, and the diversity gate decides evaluation together with the cost
    model.  Insertion replaces the worse individual (ties uniform); an
    offspring bit-equal to a population member is never inserted.
    """
    if variant not in ("sudholt", "mod"):
        raise ConfigurationError(f"unknown greedy variant: {variant!r}")
    engine.iterations += 1
    n = obj.n
    x, y, fx, fy = state.x, state.y, state.fx, state.fy
    if fx < fy:
        x, y, fx, fy = y, x, fy, fx

    def _uniform_cross(p1, p2):
        out = p1.copy()
        took_a = False
        took_b = False
        for i in np.nonzero(p1 != p2)[0]:
            if engine.rng.u01() < 0.5:
                out[i] = p2[i]
                took_b = True
            else:
                took_a = True
        return out, (not took_b) or (not took_a)

    if variant == "sudholt":
        if fx == fy:
            i1 = engine.rng.randbelow(2)
            i2 = engine.rng.randbelow(2)
            if i1 == i2:
                zprime, parental = (x if i1 == 0 else y).copy(), True
            else:
                p1 = x if i1 == 0 else y
                p2 = y if i1 == 0 else x
                zprime, parental = _uniform_cross(p1, p2)
        else:
            zprime, parental = x.copy(), True
        ell = _draw_binomial(engine.rng, n, p)
    else:
        if fx == fy:
            zprime, parental = _uniform_cross(x, y)
        else:
            zprime, parental = x.copy(), True
        if parental:
            ell = _draw_binomial_positive(engine.rng, n, p)
        else:
            ell = _draw_binomial(engine.rng, n, p)

    pos = flip_positions(n, ell, engine.rng)
    z = _toggled(zprime, pos)

    eq_x = np.array_equal(z, x)
    eq_y = np.array_equal(z, y)
    if eq_x or eq_y:
        engine.evaluate(z, [(x, fx), (y, fy)])
        return GreedyGAState(x, y, fx, fy)

    fz, _ = engine.evaluate(z, [(x, fx), (y, fy)])
    if fz >= fy:
        if fy < fx:
            y, fy = z, fz
        else:
            if engine.rng.randbelow(2) == 0:
                x, fx = z, fz
            else:
                y, fy = z, fz
    if fx < fy:
        x, y, fx, fy = y, x, fy, fx
    return GreedyGAState(x, y, fx, fy)


# ---------------------------------------------------------------------------
# Reference driver (step functions end-to-end)
# ---------------------------------------------------------------------------


def run_python(
    config: AlgorithmConfig,
    obj: Objective,
    model: CostModel | None = None,
    budget: int | None = None,
    seed: int = 0,
    init_mask=None,
    record_trajectory: bool = False,
) -> RunOutcome:
    """Drive a full run through the Python step functions.

    Bit-identical to :func:`ealab.engine.run` for the same arguments; orders
    of magnitude slower.  Intended for tests and instrumentation.
    """
    if not isinstance(config, AlgorithmConfig):
        config = AlgorithmConfig.from_name(str(config))
    config.validate(obj)
    n = obj.n
    if model is None:
        model = config.default_cost_model()
    if budget is None:
        budget = default_budget(n)
    rng = RandomSource(seed)
    ctx = RunContext(obj, model, budget, rng)
    mask = None if init_mask is None else np.asarray(init_mask, np.uint8)

    def _initial() -> np.ndarray:
        bits = random_bitstring(n, rng)
        if mask is not None:
            bits ^= mask
        return bits

    traj: list[float] = []
    flip_table = None
    if config.family == "rls-opt":
        from .theory import optimal_flip_table

        flip_table = optimal_flip_table(n).best_flip_array()

    try:
        if config.family == "greedy-ga":
            x = _initial()
            fx, _ = ctx.evaluate(x, [])
            y = _initial()
            if ctx.ledger.exhausted:
                raise BudgetExhausted
            fy, _ = ctx.evaluate(y, [])
            state = GreedyGAState(x, y, fx, fy)
            variant = "mod" if config.is_mod() else "sudholt"
            pmut = config.resolved_rate(n)
            while not ctx.ledger.exhausted:
                state = step_greedy_ga(state, obj, variant, pmut, ctx)
        elif config.family == "ollga":
            x = _initial()
            fit, _ = ctx.evaluate(x, [])
            state = OLLGAState(x, fit, config.initial_lambda)
            variant = "mod" if config.is_mod() else "vanilla"
            while not ctx.ledger.exhausted:
                state = step_ollga(state, obj, variant, config.update_strength, ctx)
        else:
            x = _initial()
            fit, _ = ctx.evaluate(x, [])
            state = OnePlusOneState(x, fit)
            if record_trajectory:
                traj.append(state.fitness)
            pmut = config.resolved_rate(n) if config.family == "ea" else None
            while not ctx.ledger.exhausted:
                if config.family == "rls":
                    state = step_rls(state, obj, ctx)
                elif config.family == "rls-opt":
                    state = step_rls_opt(state, obj, flip_table, ctx)
                else:
                    state = step_one_plus_one(state, obj, config.mutation_variant, pmut, ctx)
                if record_trajectory:
                    traj.append(state.fitness)
    except StopRun:
        # the run ended at an optimal evaluation; mirror the compiled loop's
        # post-iteration trajectory entry
        if record_trajectory and config.family not in ("ollga", "greedy-ga"):
            traj.append(obj.optimum_value)
    except BudgetExhausted:
        pass

    diagnostics = RunDiagnostics(
        iterations=ctx.iterations,
        parent_equal_offspring=ctx.parent_equal_offspring,
        parent_equal_charged=ctx.parent_equal_charged,
        elitism_violations=0,
        parameter_violations=0,
    )
    return RunOutcome(
        hit_optimum=ctx.hit,
        total_evaluations=ctx.ledger.charged,
        profile=ctx.profile,
        seed=int(seed),
        final_best=float(ctx.best_fit),
        diagnostics=diagnostics,
        trajectory=np.asarray(traj) if record_trajectory else None,
    )
