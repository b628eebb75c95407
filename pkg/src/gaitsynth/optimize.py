"""Bounded-vector optimizers: Harmony Search, a GA baseline, random search.

All optimizers maximize.  The gait objective is already a maximization
problem; the classic benchmark functions are exposed negated so that the
global optimum has value 0 from below.

Harmony Search keeps a memory of the best vectors seen so far and
improvises one new candidate per iteration: each component is either
copied from a random memory row (probability hmcr) or drawn fresh from
its bound interval, and a memory-copied component is additionally
re-drawn from the full interval with probability par (pitch adjustment).
A candidate that improves on the worst stored vector replaces it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

# Genome layout shared with the gait controller: six oscillator constants
# followed by the four network weights/biases.
GENOME_FIELDS = ("tau1", "tau2", "alpha", "beta", "gamma", "c",
                 "w11", "w12", "b1", "b2")

# Initialization intervals for the gait search, one (lower, upper) pair per
# genome field.  The tonic-input row is taken as [2, 4].
GAIT_LOWER = (0.0, 0.0, -5.0, -5.0, -5.0, 2.0, -4.0, -5.0, -95.0, -125.0)
GAIT_UPPER = (25.0, 25.0, 5.0, 5.0, 5.0, 4.0, 1.0, 0.0, 20.0, -5.0)


class BoundsError(ValueError):
    """Invalid search bounds or optimizer parameters."""


@dataclass(frozen=True, eq=False)
class SearchBounds:
    """Axis-aligned box with optional per-variable names."""

    lower: np.ndarray
    upper: np.ndarray
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise BoundsError(f"lower/upper must be 1-d and equal length: {lo.shape} vs {hi.shape}")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise BoundsError("bounds must be finite")
        if not (lo < hi).all():
            bad = int(np.argmin(hi - lo))
            raise BoundsError(f"lower must be strictly below upper (variable {bad}: "
                              f"[{lo[bad]}, {hi[bad]}])")
        if self.names is not None and len(self.names) != len(lo):
            raise BoundsError("names length does not match dimension")

    def __eq__(self, other):
        return (isinstance(other, SearchBounds)
                and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper)
                and self.names == other.names)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def sample(self, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
        if n is None:
            return rng.uniform(self.lower, self.upper)
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool((x >= self.lower).all() and (x <= self.upper).all())

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)


def gait_bounds() -> SearchBounds:
    """The default 10-variable gait search box."""
    return SearchBounds(np.array(GAIT_LOWER), np.array(GAIT_UPPER), GENOME_FIELDS)


@dataclass(frozen=True)
class HsParams:
    hms: int = 10
    hmcr: float = 0.9
    par: float = 0.3
    ni: int = 750
    seed: int = 0
    # None selects the full-range pitch re-draw; a fraction of each
    # variable's range selects the neighborhood variant instead.
    pitch_bandwidth: float | None = None

    def __post_init__(self):
        if self.hms < 2:
            raise BoundsError(f"hms must be >= 2, got {self.hms}")
        if not (0.0 <= self.hmcr <= 1.0 and 0.0 <= self.par <= 1.0):
            raise BoundsError(f"hmcr/par must lie in [0, 1]: {self.hmcr}, {self.par}")
        if self.ni < 0:
            raise BoundsError(f"ni must be >= 0, got {self.ni}")
        if self.pitch_bandwidth is not None and self.pitch_bandwidth <= 0.0:
            raise BoundsError("pitch_bandwidth must be positive or None")


@dataclass(frozen=True)
class GaParams:
    """crossover_rate is the per-gene probability of inheriting from the
    second parent (0.5 is unbiased uniform crossover); mutation_rate the
    per-gene probability of a Gaussian jitter with sigma at 5% of the
    variable's range.  Defaults chosen from sphere-benchmark reference runs.
    """

    population: int = 200
    generations: int = 10
    crossover_rate: float = 0.5
    mutation_rate: float = 0.05
    tournament_size: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise BoundsError(f"population must be >= 2, got {self.population}")
        if self.generations < 1:
            raise BoundsError(f"generations must be >= 1, got {self.generations}")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise BoundsError("crossover/mutation rates must lie in [0, 1]")
        if self.tournament_size < 1:
            raise BoundsError("tournament_size must be >= 1")


class HarmonyMemory:
    """hms x dim matrix of solution vectors plus their fitness column."""

    def __init__(self, vectors: np.ndarray):
        self.vectors = np.array(vectors, dtype=float)
        if self.vectors.ndim != 2:
            raise BoundsError("harmony memory needs a 2-d vector matrix")
        self.fitness = np.full(len(self.vectors), np.nan)
        self._worst: int | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def set_fitness(self, i: int, value: float) -> None:
        if math.isnan(value):
            log.warning("NaN fitness for memory row %d treated as -inf", i)
            value = -math.inf
        self.fitness[i] = value
        self._worst = None

    @property
    def worst_index(self) -> int:
        # Ties resolve to the lowest row index (np.argmin's convention).
        if self._worst is None:
            self._worst = int(np.argmin(self.fitness))
        return self._worst

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.fitness))

    def update(self, candidate: np.ndarray, fitness: float) -> bool:
        """Replace the worst row if the candidate strictly improves on it."""
        if math.isnan(fitness):
            log.warning("NaN candidate fitness treated as -inf (rejected)")
            return False
        w = self.worst_index
        if fitness <= self.fitness[w]:
            return False
        self.vectors[w] = candidate
        self.fitness[w] = fitness
        self._worst = None
        return True


def init_memory(bounds: SearchBounds, hms: int, rng: np.random.Generator) -> HarmonyMemory:
    """Fill a fresh memory with uniform draws; fitness left unevaluated."""
    if hms < 2:
        raise BoundsError(f"hms must be >= 2, got {hms}")
    return HarmonyMemory(bounds.sample(rng, hms))


def improvise(
    hm: HarmonyMemory,
    bounds: SearchBounds,
    hmcr: float,
    par: float,
    rng: np.random.Generator,
    pitch_bandwidth: float | None = None,
) -> np.ndarray:
    """Improvise one new vector from the memory.

    Per component, independently: with probability hmcr copy the component
    from a uniformly chosen memory row, then with probability par replace
    the copy by a fresh uniform draw over the component's interval (or a
    bounded neighborhood draw when pitch_bandwidth is set).  With
    probability 1 - hmcr, draw fresh directly; such components are never
    pitch-adjusted.
    """
    d = bounds.dim
    from_memory = rng.random(d) < hmcr
    rows = rng.integers(0, len(hm), size=d)
    adjusted = rng.random(d) < par
    fresh = rng.uniform(bounds.lower, bounds.upper)
    candidate = np.where(from_memory, hm.vectors[rows, np.arange(d)], fresh)
    if pitch_bandwidth is None:
        adjust_values = rng.uniform(bounds.lower, bounds.upper)
    else:
        bw = pitch_bandwidth * (bounds.upper - bounds.lower)
        offset = rng.uniform(-1.0, 1.0, size=d) * bw
        adjust_values = np.clip(candidate + offset, bounds.lower, bounds.upper)
    return np.where(from_memory & adjusted, adjust_values, candidate)


@dataclass
class OptimizeResult:
    best: np.ndarray
    best_fitness: float
    history: list[tuple[int, float, float]] = field(default_factory=list)
    history_columns: tuple[str, str, str] = ("eval_index", "best_fitness", "mean_fitness")
    n_evals: int = 0


def _safe_fitness(value) -> float:
    f = float(value)
    if math.isnan(f):
        log.warning("objective returned NaN; treated as -inf")
        return -math.inf
    return f


Objective = Callable[[np.ndarray], float]
Progress = Callable[[int, float, float], None]


def hs_optimize(
    objective: Objective,
    bounds: SearchBounds,
    params: HsParams = HsParams(),
    progress: Progress | None = None,
) -> OptimizeResult:
    """Run Harmony Search; exactly hms + ni objective evaluations.

    History rows are (evaluation count, best-ever fitness, mean memory
    fitness): one after initialization, then one per improvisation.
    """
    rng = np.random.default_rng(params.seed)
    hm = init_memory(bounds, params.hms, rng)
    for i in range(params.hms):
        hm.set_fitness(i, _safe_fitness(objective(hm.vectors[i].copy())))
    best_i = hm.best_index
    best = hm.vectors[best_i].copy()
    best_f = float(hm.fitness[best_i])

    result = OptimizeResult(best=best, best_fitness=best_f, n_evals=params.hms)

    def record(evals: int):
        mean = float(np.mean(hm.fitness))
        result.history.append((evals, result.best_fitness, mean))
        if progress is not None:
            progress(evals, result.best_fitness, mean)

    record(params.hms)
    for k in range(params.ni):
        candidate = improvise(hm, bounds, params.hmcr, params.par, rng,
                              params.pitch_bandwidth)
        f = _safe_fitness(objective(candidate.copy()))
        hm.update(candidate, f)
        if f > result.best_fitness:
            result.best_fitness = f
            result.best = candidate.copy()
        result.n_evals += 1
        record(params.hms + k + 1)
    return result


def ga_optimize(
    objective: Objective,
    bounds: SearchBounds,
    params: GaParams = GaParams(),
    progress: Progress | None = None,
) -> OptimizeResult:
    """Generational GA baseline; exactly population * generations evaluations.

    Tournament selection, per-gene uniform crossover, Gaussian mutation
    with sigma at 5% of each variable's range (clipped to bounds), and
    single-individual elitism.  The elite is re-evaluated each generation
    so the budget stays exact.
    """
    rng = np.random.default_rng(params.seed)
    d = bounds.dim
    sigma = 0.05 * (bounds.upper - bounds.lower)
    pop = bounds.sample(rng, params.population)

    result = OptimizeResult(best=pop[0].copy(), best_fitness=-math.inf,
                            history_columns=("generation", "best_fitness", "mean_fitness"))

    def tournament(fit: np.ndarray) -> int:
        contenders = rng.integers(0, params.population, size=params.tournament_size)
        return int(contenders[np.argmax(fit[contenders])])

    for gen in range(1, params.generations + 1):
        fit = np.array([_safe_fitness(objective(ind.copy())) for ind in pop])
        result.n_evals += params.population
        gen_best = int(np.argmax(fit))
        if fit[gen_best] > result.best_fitness:
            result.best_fitness = float(fit[gen_best])
            result.best = pop[gen_best].copy()
        finite = fit[np.isfinite(fit)]
        mean = float(finite.mean()) if len(finite) else -math.inf
        result.history.append((gen, result.best_fitness, mean))
        if progress is not None:
            progress(gen, result.best_fitness, mean)
        if gen == params.generations:
            break

        children = [pop[gen_best].copy()]  # elite
        while len(children) < params.population:
            pa = pop[tournament(fit)]
            pb = pop[tournament(fit)]
            take_b = rng.random(d) < params.crossover_rate
            child = np.where(take_b, pb, pa)
            mutate = rng.random(d) < params.mutation_rate
            if mutate.any():
                child = child + mutate * rng.normal(0.0, sigma)
                child = bounds.clip(child)
            children.append(child)
        pop = np.array(children)
    return result


def random_search(
    objective: Objective,
    bounds: SearchBounds,
    budget: int,
    seed: int = 0,
    progress: Progress | None = None,
) -> OptimizeResult:
    """Uniform random sampling over the box; the budget-matched baseline."""
    if budget < 1:
        raise BoundsError(f"budget must be >= 1, got {budget}")
    rng = np.random.default_rng(seed)
    result = OptimizeResult(best=bounds.sample(rng), best_fitness=-math.inf)
    result.best_fitness = _safe_fitness(objective(result.best.copy()))
    result.n_evals = 1
    total = result.best_fitness
    result.history.append((1, result.best_fitness, total))
    for k in range(2, budget + 1):
        x = bounds.sample(rng)
        f = _safe_fitness(objective(x.copy()))
        result.n_evals += 1
        total += f
        if f > result.best_fitness:
            result.best_fitness = f
            result.best = x.copy()
        result.history.append((k, result.best_fitness, total / k))
        if progress is not None:
            progress(k, result.best_fitness, total / k)
    return result


# --- benchmark objectives (minimization forms; registry negates them) ----

def sphere(x: np.ndarray) -> float:
    """f(x) = sum x_i^2, minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rosenbrock(x: np.ndarray) -> float:
    """f(x) = sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, minimum 0 at ones."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x: np.ndarray) -> float:
    """f(x) = 10 n + sum (x_i^2 - 10 cos(2 pi x_i)), minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


_BENCH_RANGES = {
    "sphere": (-5.0, 5.0),
    "rosenbrock": (-5.0, 10.0),
    "rastrigin": (-5.12, 5.12),
}
_BENCH_FUNCS = {"sphere": sphere, "rosenbrock": rosenbrock, "rastrigin": rastrigin}


def benchmark_objectives() -> dict[str, Objective]:
    """Named maximization objectives (negated classics), optimum value 0."""
    return {name: (lambda x, _f=f: -_f(x)) for name, f in _BENCH_FUNCS.items()}


def benchmark_bounds(name: str, dim: int) -> SearchBounds:
    if name not in _BENCH_RANGES:
        raise BoundsError(f"unknown benchmark {name!r}; choose from {sorted(_BENCH_RANGES)}")
    lo, hi = _BENCH_RANGES[name]
    return SearchBounds(np.full(dim, lo), np.full(dim, hi))
