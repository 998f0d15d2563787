"""对比用的基线优化器：收缩因子 PSO 与 DE (rand/1/bin)。"""
from dataclasses import dataclass
from typing import ClassVar, Optional, Tuple, Union
import math

import numpy as np

from config import (
    DEFAULT_PARTICLES,
    PSO_C1,
    PSO_C2,
    PSO_CHI,
    DE_POP_PER_DIM,
    DE_MIN_POPULATION,
    DE_MUTATION,
    DE_CROSSOVER,
    DE_POLISH,
)
from core import (
    BudgetExhausted,
    BudgetMeter,
    BudgetTooSmall,
    InvalidPhi,
    ObjectiveSpec,
    PopulationTooSmall,
    RngStream,
    TraceRecorder,
    checked_evaluate,
)
from utils import get_logger


# === 收缩因子 PSO ===

def constriction_factor(c1: float, c2: float) -> float:
    phi = c1 + c2
    if phi <= 4:
        raise InvalidPhi(f"phi = c1 + c2 must exceed 4, got {phi}; pass chi explicitly")
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))


@dataclass(frozen=True)
class PsoConfig:
    chi: Optional[float] = PSO_CHI  # None 时由 c1、c2 推出
    c1: float = PSO_C1
    c2: float = PSO_C2
    particles: int = DEFAULT_PARTICLES

    name: ClassVar[str] = "pso"

    def __post_init__(self):
        if self.chi is None:
            object.__setattr__(self, "chi", constriction_factor(self.c1, self.c2))
        if self.chi <= 0:
            raise ValueError(f"chi must be > 0, got {self.chi}")
        if int(self.particles) < 1:
            raise ValueError(f"particles must be >= 1, got {self.particles}")

    def population_size(self, spec: ObjectiveSpec, budget: int) -> int:
        return int(self.particles)


def pso_velocity_update(v, x, p, g, chi: float, c1: float, c2: float, r1, r2):
    return chi * (v + c1 * r1 * (p - x) + c2 * r2 * (g - x))


def pso_position_update(x, v_next):
    return x + v_next


class PsoSwarm:
    def __init__(self, config: PsoConfig, spec: ObjectiveSpec, rng: RngStream):
        self.config = config
        self.spec = spec
        self.streams = rng.spawn(config.particles)
        d = spec.dimension
        self.x = np.empty((config.particles, d))
        self.v = np.empty_like(self.x)
        self.pbest_x = np.empty_like(self.x)
        self.pbest_f = np.full(config.particles, math.inf)
        self.gbest_x = np.empty(d)
        self.gbest_f = math.inf

    @property
    def size(self) -> int:
        return self.config.particles

    def _evaluate_all(self, meter: BudgetMeter) -> np.ndarray:
        return np.array([checked_evaluate(self.spec, self.x[j], meter) for j in range(self.size)])

    def _update_bests(self, values: np.ndarray):
        improved = values < self.pbest_f
        self.pbest_x[improved] = self.x[improved]
        self.pbest_f[improved] = values[improved]
        best = int(np.argmin(self.pbest_f))
        if self.pbest_f[best] < self.gbest_f:
            self.gbest_x = self.pbest_x[best].copy()
            self.gbest_f = float(self.pbest_f[best])

    def initialize(self, meter: BudgetMeter):
        lo, hi = self.spec.bounds()
        for j, stream in enumerate(self.streams):
            self.x[j] = stream.uniform(lo, hi)
        # 初速度为 0：第一步只由 pbest/gbest 吸引
        self.v[:] = 0.0
        self._update_bests(self._evaluate_all(meter))

    def step(self, meter: BudgetMeter):
        if meter.remaining < self.size:
            raise BudgetExhausted(f"{meter.remaining} evaluations left, a sweep needs {self.size}")
        cfg = self.config
        d = self.spec.dimension
        # r1、r2 按粒子、按维度独立抽取
        draws = np.stack([s.random((2, d)) for s in self.streams])
        r1, r2 = draws[:, 0, :], draws[:, 1, :]
        self.v = pso_velocity_update(self.v, self.x, self.pbest_x, self.gbest_x[None, :], cfg.chi, cfg.c1, cfg.c2, r1, r2)
        self.x = pso_position_update(self.x, self.v)
        self._update_bests(self._evaluate_all(meter))
        return self


def pso_step(swarm: PsoSwarm, meter: BudgetMeter) -> PsoSwarm:
    return swarm.step(meter)


def optimize_pso(config: PsoConfig, spec: ObjectiveSpec, meter: BudgetMeter,
                 rng: RngStream) -> Tuple[np.ndarray, float, TraceRecorder]:
    swarm = PsoSwarm(config, spec, rng)
    trace = TraceRecorder()
    swarm.initialize(meter)
    trace.record(meter.used, swarm.gbest_f)
    while meter.remaining >= swarm.size:
        pso_step(swarm, meter)
        trace.record(meter.used, swarm.gbest_f)
    get_logger("baselines").debug(f"PSO {spec.name}: chi={config.chi:.4g}, best={swarm.gbest_f:.6g}")
    return swarm.gbest_x.copy(), swarm.gbest_f, trace


# === 差分进化 rand/1/bin ===

Mutation = Union[float, Tuple[float, float]]


@dataclass(frozen=True)
class DeConfig:
    population: Optional[int] = None  # None 时取 min(15·d, B//2)
    mutation: Mutation = DE_MUTATION  # 固定 F 或抖动区间 [F_lo, F_hi)
    crossover: float = DE_CROSSOVER
    polish: bool = DE_POLISH

    name: ClassVar[str] = "de"

    def __post_init__(self):
        if isinstance(self.mutation, (list, tuple)):
            if len(self.mutation) != 2 or not self.mutation[0] <= self.mutation[1]:
                raise ValueError(f"mutation interval must be (lo, hi) with lo <= hi, got {self.mutation}")
            object.__setattr__(self, "mutation", (float(self.mutation[0]), float(self.mutation[1])))
        else:
            object.__setattr__(self, "mutation", float(self.mutation))
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError(f"crossover must lie in [0, 1], got {self.crossover}")
        if self.population is not None and int(self.population) < DE_MIN_POPULATION:
            raise PopulationTooSmall(f"rand/1 needs at least {DE_MIN_POPULATION} members, got {self.population}")

    def population_size(self, spec: ObjectiveSpec, budget: int) -> int:
        if self.population is not None:
            return int(self.population)
        # 初始化加一代必须放得进预算
        pop = min(DE_POP_PER_DIM * spec.dimension, int(budget) // 2)
        if pop < DE_MIN_POPULATION:
            raise BudgetTooSmall(f"budget {budget} cannot hold a DE population of {DE_MIN_POPULATION}")
        return pop

    def draw_mutation(self, rng: RngStream) -> float:
        if isinstance(self.mutation, tuple):
            lo, hi = self.mutation
            return float(rng.uniform(lo, hi)) if hi > lo else lo
        return self.mutation


@dataclass
class DePopulation:
    members: np.ndarray  # (P, d)
    values: np.ndarray  # (P,)

    @property
    def size(self) -> int:
        return int(self.members.shape[0])

    def best(self) -> Tuple[np.ndarray, float]:
        i = int(np.argmin(self.values))
        return self.members[i].copy(), float(self.values[i])


def mutation_indices(rng: RngStream, size: int, target: int) -> Tuple[int, int, int]:
    """从非目标个体中不放回地选 3 个互不相同的下标。"""
    if size < DE_MIN_POPULATION:
        raise PopulationTooSmall(f"rand/1 needs at least {DE_MIN_POPULATION} members, got {size}")
    pool = [i for i in rng.generator.permutation(size) if i != target]
    return int(pool[0]), int(pool[1]), int(pool[2])


def de_mutant(x_r1, x_r2, x_r3, f: float):
    return x_r1 + f * (x_r2 - x_r3)


def binomial_crossover(target: np.ndarray, mutant: np.ndarray, crossover: float, rng: RngStream) -> np.ndarray:
    d = target.size
    take = rng.random(d) < crossover
    take[int(rng.integers(d))] = True  # 至少一维来自变异向量
    return np.where(take, mutant, target)


def de_step(population: DePopulation, spec: ObjectiveSpec, meter: BudgetMeter, rng: RngStream,
            config: DeConfig) -> DePopulation:
    """一代：先为每个目标生成试验向量，全部评估后再逐槽贪婪替换（f(trial) <= f(target) 时替换）。"""
    size = population.size
    if size < DE_MIN_POPULATION:
        raise PopulationTooSmall(f"rand/1 needs at least {DE_MIN_POPULATION} members, got {size}")
    if meter.remaining < size:
        raise BudgetExhausted(f"{meter.remaining} evaluations left, a generation needs {size}")

    f = config.draw_mutation(rng)
    members = population.members
    trials = np.empty_like(members)
    for i in range(size):
        r1, r2, r3 = mutation_indices(rng, size, i)
        mutant = de_mutant(members[r1], members[r2], members[r3], f)
        trials[i] = binomial_crossover(members[i], mutant, config.crossover, rng)

    trial_values = np.array([checked_evaluate(spec, trials[i], meter) for i in range(size)])
    keep = trial_values <= population.values
    new_members = members.copy()
    new_values = population.values.copy()
    new_members[keep] = trials[keep]
    new_values[keep] = trial_values[keep]
    return DePopulation(new_members, new_values)


def polish_best(spec: ObjectiveSpec, x0: np.ndarray, f0: float, meter: BudgetMeter) -> Tuple[np.ndarray, float]:
    """用剩余预算对最优个体做 L-BFGS-B 局部细化；仅接受严格更优的点。"""
    from scipy.optimize import minimize

    lo, hi = spec.bounds()
    best = {"x": np.array(x0, dtype=float), "f": float(f0)}

    def fun(x):
        value = checked_evaluate(spec, x, meter)
        if value < best["f"]:
            best["x"] = np.array(x, dtype=float)
            best["f"] = value
        return value

    try:
        minimize(fun, np.clip(x0, lo, hi), method="L-BFGS-B", bounds=list(zip(lo, hi)),
                 options={"maxfun": max(meter.remaining, 1)})
    except BudgetExhausted:
        pass
    return best["x"], best["f"]


def optimize_de(config: DeConfig, spec: ObjectiveSpec, meter: BudgetMeter,
                rng: RngStream) -> Tuple[np.ndarray, float, TraceRecorder]:
    logger = get_logger("baselines")
    size = config.population_size(spec, meter.limit)
    lo, hi = spec.bounds()
    trace = TraceRecorder()

    members = rng.uniform(lo, hi, (size, spec.dimension))
    values = np.array([checked_evaluate(spec, members[i], meter) for i in range(size)])
    population = DePopulation(members, values)
    trace.record(meter.used, population.best()[1])

    generations = 0
    while meter.remaining >= size:
        population = de_step(population, spec, meter, rng, config)
        generations += 1
        trace.record(meter.used, population.best()[1])

    best_x, best_f = population.best()
    if config.polish and meter.remaining > 0:
        best_x, best_f = polish_best(spec, best_x, best_f, meter)
        trace.record(meter.used, best_f)
    logger.debug(f"DE {spec.name}: pop={size}, generations={generations}, best={best_f:.6g}")
    return best_x, best_f, trace
