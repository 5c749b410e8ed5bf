"""Similarity-driven genetic algorithm over task permutations.

Each generation the whole population is decoded and scored, a benchmark
individual is drawn by roulette, and every individual either gets perturbed
by one of four rearrangement operators (when it is similar to the benchmark
beyond a per-generation threshold) or replaced by the benchmark / the elite
pool's best. Operator choice adapts: operators earn score bonuses based on
how their offspring perform, and selection weights follow the scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .decoder import DecodeContext, get_context
from .model import Instance, Schedule
from .model import fitness as schedule_fitness
from .similarity import (
    attribute_matrix,
    generation_threshold,
    individual_similarity,
    population_similarity_stats,
    rvw_weights,
    task_similarity_matrix,
)

RCO1, RCO2, SCO1, SCO2 = 0, 1, 2, 3
OPERATOR_NAMES = ("RCO1", "RCO2", "SCO1", "SCO2")
CANDIDATE_SEGMENTS = 3  # second-segment samples drawn by SCO1/SCO2


class Individual:
    """One candidate solution: a permutation of the instance's task ids."""

    def __init__(self, idx: np.ndarray, task_ids: np.ndarray):
        self._idx = np.asarray(idx, dtype=np.int64)
        self._task_ids = task_ids
        self.fitness: Optional[int] = None
        self.unscheduled: Optional[np.ndarray] = None  # bool mask, last decode
        self.origin_op: Optional[int] = None
        self.parent_fitness: int = 0

    @property
    def permutation(self) -> np.ndarray:
        return self._task_ids[self._idx]

    def copy(self) -> "Individual":
        c = Individual(self._idx.copy(), self._task_ids)
        c.fitness = self.fitness
        c.unscheduled = self.unscheduled
        return c


class ElitePool:
    """Bounded buffer of improving individuals; oldest evicted when full."""

    def __init__(self, capacity: int = 20):
        if capacity < 1:
            raise ValueError("elite pool capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[tuple[Individual, int]] = []

    def push(self, individual: Individual, fit: int) -> None:
        self.entries.append((individual, fit))
        if len(self.entries) > self.capacity:
            self.entries.pop(0)

    def best(self) -> Individual:
        if not self.entries:
            raise LookupError("elite pool is empty")
        top = max(range(len(self.entries)), key=lambda i: self.entries[i][1])
        return self.entries[top][0]

    def __len__(self) -> int:
        return len(self.entries)


class OperatorBank:
    """Adaptive scores and selection weights for the four operators."""

    def __init__(self, initial_score: float = 25.0,
                 bonuses: tuple = (50.0, 30.0, 10.0, 5.0)):
        self.scores = np.full(4, float(initial_score))
        self.weights = np.full(4, 0.25)
        self.bonuses = tuple(float(b) for b in bonuses)
        self.applications = 0


@dataclass(frozen=True)
class DsgaConfig:
    population_size: int = 10
    max_evaluations: int = 5000
    segment_length: int = 2
    crossover_probability: float = 0.8
    elite_capacity: int = 20
    stagnation_threshold: int = 20
    restart_period: int = 20
    restart_randomness: float = 0.2
    weight_update_period: int = 20
    score_bonuses: tuple = (50.0, 30.0, 10.0, 5.0)
    initial_score: float = 25.0
    adaptive_operators: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        for name in ("segment_length", "elite_capacity", "stagnation_threshold",
                     "restart_period", "weight_update_period"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for p in (self.crossover_probability, self.restart_randomness):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must be within [0, 1]")
        if not all(a > b for a, b in zip(self.score_bonuses, self.score_bonuses[1:])):
            raise ValueError("score_bonuses must be strictly decreasing")


class DsgaResult(NamedTuple):
    best: Individual
    schedule: Schedule
    fitness: int
    history: np.ndarray


# --------------------------------------------------------------------------
# selection and operators

def roulette_select(fitnesses, rng: np.random.Generator) -> int:
    """Index i with probability fit_i / sum; uniform when all are zero."""
    f = np.asarray(fitnesses, dtype=np.float64)
    if f.size == 0:
        raise ValueError("empty selection pool")
    if (f < 0).any():
        raise ValueError("negative fitness in roulette selection")
    total = f.sum()
    if total <= 0:
        return int(rng.integers(f.size))
    r = rng.random() * total
    return int(np.searchsorted(np.cumsum(f), r, side="right"))


def pick_operator(bank: OperatorBank, rng: np.random.Generator) -> int:
    return roulette_select(bank.weights, rng)


def update_score(bank: OperatorBank, op: int, f_local: int, f_last: int,
                 f_global: int, rng: np.random.Generator) -> None:
    """Reward the operator that produced an offspring of fitness f_local."""
    b1, b2, b3, b4 = bank.bonuses
    if f_local > f_global:
        bank.scores[op] += b1
    elif f_local > f_last:
        bank.scores[op] += b2
    else:
        temp = max(1.0, 0.05 * f_last)
        if rng.random() < math.exp((f_local - f_last) / temp):
            bank.scores[op] += b3
        else:
            bank.scores[op] += b4


def update_weights(bank: OperatorBank) -> None:
    total = bank.scores.sum()
    if total <= 0:
        bank.weights = np.full(4, 0.25)
    else:
        bank.weights = bank.scores / total


def _segment_similarity(ts: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(ts[np.ix_(a, b)].mean())


def _effective_length(n: int, requested: int) -> int:
    return max(1, min(requested, n // 2))


def _rco1(perm: np.ndarray, length: int, rng: np.random.Generator) -> np.ndarray:
    # two disjoint equal-length segments change places
    n = perm.shape[0]
    out = perm.copy()
    s1 = int(rng.integers(0, n - 2 * length + 1))
    s2 = int(rng.integers(s1 + length, n - length + 1))
    out[s1:s1 + length] = perm[s2:s2 + length]
    out[s2:s2 + length] = perm[s1:s1 + length]
    return out


def _rco2(perm: np.ndarray, length: int, rng: np.random.Generator) -> np.ndarray:
    n = perm.shape[0]
    out = perm.copy()
    s = int(rng.integers(0, n - length + 1))
    out[s:s + length] = out[s:s + length][rng.permutation(length)]
    return out


def _sco1(perm: np.ndarray, length: int, rng: np.random.Generator,
          ts: np.ndarray) -> np.ndarray:
    # swap a first-half segment with the least-similar of a few
    # second-half candidates
    n = perm.shape[0]
    half = n // 2
    s1 = int(rng.integers(0, half - length + 1))
    seg = perm[s1:s1 + length]
    best_start = -1
    best_sim = math.inf
    for _ in range(CANDIDATE_SEGMENTS):
        c = int(rng.integers(half, n - length + 1))
        sim = _segment_similarity(ts, seg, perm[c:c + length])
        if sim < best_sim:
            best_sim = sim
            best_start = c
    out = perm.copy()
    out[s1:s1 + length] = perm[best_start:best_start + length]
    out[best_start:best_start + length] = seg
    return out


def _sco2(perm: np.ndarray, length: int, rng: np.random.Generator,
          ts: np.ndarray, profits: np.ndarray,
          unscheduled: Optional[np.ndarray]) -> np.ndarray:
    # move the most valuable unscheduled task's segment toward the front,
    # trading places with the least-similar candidate segment there
    n = perm.shape[0]
    if unscheduled is None or not unscheduled.any():
        return _rco1(perm, length, rng)
    missed = np.nonzero(unscheduled)[0]
    target = int(missed[np.argmax(profits[missed])])
    pos = int(np.nonzero(perm == target)[0][0])
    s_t = min(pos, n - length)
    seg = perm[s_t:s_t + length]
    half = n // 2
    best_start = -1
    best_sim = math.inf
    for _ in range(CANDIDATE_SEGMENTS):
        c = int(rng.integers(0, half - length + 1))
        if c + length > s_t and s_t + length > c:
            continue  # overlaps the target segment
        sim = _segment_similarity(ts, seg, perm[c:c + length])
        if sim < best_sim:
            best_sim = sim
            best_start = c
    if best_start < 0:
        return _rco1(perm, length, rng)
    out = perm.copy()
    out[s_t:s_t + length] = perm[best_start:best_start + length]
    out[best_start:best_start + length] = seg
    return out


def apply_operator(op: int, perm: np.ndarray, rng: np.random.Generator, *,
                   segment_length: int, ts: np.ndarray, profits: np.ndarray,
                   unscheduled: Optional[np.ndarray] = None) -> np.ndarray:
    """Rearranged copy of the permutation; always a valid permutation."""
    perm = np.asarray(perm, dtype=np.int64)
    n = perm.shape[0]
    if n < 2:
        return perm.copy()
    length = _effective_length(n, segment_length)
    if op == RCO1:
        return _rco1(perm, length, rng)
    if op == RCO2:
        return _rco2(perm, length, rng)
    if op == SCO1:
        return _sco1(perm, length, rng, ts)
    if op == SCO2:
        return _sco2(perm, length, rng, ts, profits, unscheduled)
    raise ValueError(f"unknown operator {op}")


# --------------------------------------------------------------------------
# population setup and the main loop

def _heuristic_orders(ctx: DecodeContext):
    by_est = np.lexsort((ctx.task_ids, ctx.t_est)).astype(np.int64)
    by_let = np.lexsort((ctx.task_ids, ctx.t_let)).astype(np.int64)
    by_dur = np.lexsort((ctx.task_ids, ctx.t_dur)).astype(np.int64)
    return by_est, by_let, by_dur


def _init_population(ctx: DecodeContext, population_size: int,
                     rng: np.random.Generator) -> list[Individual]:
    n = ctx.n_tasks
    per_rule = math.ceil(0.2 * population_size)
    seeds: list[np.ndarray] = []
    for base in _heuristic_orders(ctx):
        seeds.extend(base.copy() for _ in range(per_rule))
    seeds = seeds[:population_size]
    while len(seeds) < population_size:
        seeds.append(rng.permutation(n).astype(np.int64))
    return [Individual(idx, ctx.task_ids) for idx in seeds]


def init_population(instance: Instance, population_size: int,
                    seed: int) -> list[Individual]:
    """Heuristic-seeded initial population: 20% per sort rule, rest random."""
    if population_size < 2:
        raise ValueError("population_size must be >= 2")
    ctx = get_context(instance)
    return _init_population(ctx, population_size, np.random.default_rng(seed))


def _offspring(parent: Individual, bank: OperatorBank, config: DsgaConfig,
               rng: np.random.Generator, ctx: DecodeContext,
               ts: np.ndarray) -> Individual:
    op = pick_operator(bank, rng) if config.adaptive_operators else RCO1
    idx = apply_operator(op, parent._idx, rng,
                         segment_length=config.segment_length, ts=ts,
                         profits=ctx.t_profit, unscheduled=parent.unscheduled)
    if config.adaptive_operators:
        bank.applications += 1
        if bank.applications % config.weight_update_period == 0:
            update_weights(bank)
    child = Individual(idx, ctx.task_ids)
    child.origin_op = op if config.adaptive_operators else None
    child.parent_fitness = parent.fitness if parent.fitness is not None else 0
    return child


def evolve(instance: Instance, config: DsgaConfig) -> DsgaResult:
    """Run the full search; deterministic for a given (instance, config)."""
    ctx = get_context(instance)
    n = ctx.n_tasks
    rng = np.random.default_rng(config.seed)
    budget = config.max_evaluations
    history = np.zeros(budget, dtype=np.int64)

    if n == 0:
        empty = Individual(np.zeros(0, dtype=np.int64), ctx.task_ids)
        empty.fitness = 0
        return DsgaResult(empty, Schedule((), ()), 0, history)
    if n == 1:
        perm = np.zeros(1, dtype=np.int64)
        fit, _ = ctx.decode_fitness(perm)
        history[:] = fit
        ind = Individual(perm, ctx.task_ids)
        ind.fitness = fit
        return DsgaResult(ind, ctx.decode(perm), fit, history)

    ts = task_similarity_matrix(
        instance.tasks, rvw_weights(attribute_matrix(instance.tasks))).values
    max_generations = max(2, budget // config.population_size)
    bank = OperatorBank(config.initial_score, config.score_bonuses)
    pool = ElitePool(config.elite_capacity)
    population = _init_population(ctx, config.population_size, rng)
    stagnation = 0
    global_best = -1
    best_idx = population[0]._idx.copy()
    evaluations = 0
    generation = 0

    while evaluations < budget:
        generation += 1
        perms = [ind._idx for ind in population]
        ave, std = population_similarity_stats(perms, ts)
        threshold = generation_threshold(
            min(generation, max_generations), max_generations, ave, std)

        f_global_pre = global_best
        count = min(len(population), budget - evaluations)
        for i in range(count):
            ind = population[i]
            fit, out_win = ctx.decode_fitness(ind._idx)
            ind.fitness = fit
            ind.unscheduled = out_win < 0
            evaluations += 1
            if fit > global_best:
                global_best = fit
                best_idx = ind._idx.copy()
            history[evaluations - 1] = global_best

        if config.adaptive_operators:
            for i in range(count):
                ind = population[i]
                if ind.origin_op is not None:
                    update_score(bank, ind.origin_op, ind.fitness,
                                 ind.parent_fitness, f_global_pre, rng)
                ind.origin_op = None

        gen_best = population[0]
        for i in range(1, count):
            if population[i].fitness > gen_best.fitness:
                gen_best = population[i]
        if gen_best.fitness > f_global_pre:
            pool.push(gen_best.copy(), gen_best.fitness)
        else:
            stagnation += 1

        if evaluations >= budget:
            break

        benchmark = population[roulette_select(
            [ind.fitness for ind in population], rng)]
        next_population: list[Individual] = []
        for ind in population:
            sim = individual_similarity(ind._idx, benchmark._idx, ts)
            if sim > threshold:
                if rng.random() < config.crossover_probability:
                    next_population.append(_offspring(ind, bank, config, rng, ctx, ts))
                else:
                    next_population.append(ind.copy())
            elif stagnation > config.stagnation_threshold:
                next_population.append(pool.best().copy())
                stagnation = 0
            else:
                next_population.append(benchmark.copy())

        if generation % config.restart_period == 0:
            slot = int(rng.integers(len(next_population)))
            if rng.random() < config.restart_randomness:
                fresh = Individual(rng.permutation(n).astype(np.int64), ctx.task_ids)
                next_population[slot] = fresh
            else:
                next_population[slot] = _offspring(pool.best(), bank, config,
                                                   rng, ctx, ts)
        population = next_population

    best = Individual(best_idx, ctx.task_ids)
    best.fitness = int(global_best)
    schedule = ctx.decode(best_idx)
    reported = schedule_fitness(instance, schedule)
    return DsgaResult(best, schedule, reported, history)
