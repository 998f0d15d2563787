from dataclasses import dataclass, field, asdict
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils import get_logger


OPTIMIZER_NAMES = ("hopso", "pso", "de")


# === 异常 ===

class OscilswarmError(ValueError):
    """所有输入/契约错误的基类。"""


class BudgetExhausted(OscilswarmError):
    """评估预算已用尽；优化器据此结束。"""


class DimensionMismatch(OscilswarmError):
    pass


class InvalidInterval(OscilswarmError):
    pass


class BudgetTooSmall(OscilswarmError):
    pass


class InvalidBudget(OscilswarmError):
    pass


class UnknownFunction(OscilswarmError):
    pass


class FixedDimension(OscilswarmError):
    pass


class UnknownOptimizer(OscilswarmError):
    pass


class DegenerateWeights(OscilswarmError):
    pass


class InvalidPhi(OscilswarmError):
    pass


class PopulationTooSmall(OscilswarmError):
    pass


class EmptyInput(OscilswarmError):
    pass


class ParseError(OscilswarmError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaMismatch(OscilswarmError):
    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__(f"missing columns: {', '.join(self.missing)}")


# === 基础类型 ===

@dataclass(frozen=True)
class ObjectiveSpec:
    """一个基准函数：求值器、维度、逐维初始化区间与已知最小值。"""
    name: str
    dimension: int
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    f_min: float
    evaluate: Callable[[np.ndarray], float] = field(compare=False, repr=False)
    minimizer: Optional[Tuple[float, ...]] = None
    modality: str = ""

    def __post_init__(self):
        if int(self.dimension) <= 0:
            raise DimensionMismatch(f"{self.name}: dimension must be positive, got {self.dimension}")
        if len(self.lower) != self.dimension or len(self.upper) != self.dimension:
            raise DimensionMismatch(f"{self.name}: init box does not match dimension {self.dimension}")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise InvalidInterval(f"{self.name}: empty init interval [{lo}, {hi}]")

    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)

    def width(self) -> np.ndarray:
        lo, hi = self.bounds()
        return hi - lo


@dataclass
class BudgetMeter:
    """函数评估计数器；used 只增不减且不超过 limit。"""
    limit: int
    used: int = 0

    def __post_init__(self):
        if int(self.limit) <= 0:
            raise InvalidBudget(f"budget must be positive, got {self.limit}")

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def charge(self):
        if self.used >= self.limit:
            raise BudgetExhausted(f"budget of {self.limit} evaluations exhausted")
        self.used += 1


class RngStream:
    """可拆分的种子随机流。同一种子给出逐位相同的序列；子流按固定顺序派生。"""

    def __init__(self, seed):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
            self.seed = int(seed.entropy) if isinstance(seed.entropy, int) else 0
        else:
            self.seed = int(seed) % (2 ** 64)
            self._seq = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._seq))

    def spawn(self, n: int) -> List["RngStream"]:
        return [RngStream(s) for s in self._seq.spawn(int(n))]

    def uniform(self, lo=0.0, hi=1.0, size=None):
        return self.generator.uniform(lo, hi, size)

    def random(self, size=None):
        return self.generator.random(size)

    def integers(self, lo, hi=None, size=None):
        return self.generator.integers(lo, hi, size)


@dataclass(frozen=True)
class RunRecord:
    optimizer: str
    objective: str
    seed: int
    budget: int
    dimension: int
    config: Dict[str, Any]
    trace: Tuple[Tuple[int, float], ...]
    best_position: Tuple[float, ...]
    best_value: float

    def __post_init__(self):
        if not self.trace:
            raise ValueError("trace must not be empty")
        prev_used, prev_best = -1, float("inf")
        for used, best in self.trace:
            if used <= prev_used or used > self.budget:
                raise ValueError(f"trace evaluations not strictly increasing within budget: {self.trace}")
            if best > prev_best:
                raise ValueError("trace best value increased")
            prev_used, prev_best = used, best

    @property
    def evaluations_used(self) -> int:
        return int(self.trace[-1][0])


class TraceRecorder:
    """记录 (已用评估数, 当前最优值)；最优值按非增截断。"""

    def __init__(self):
        self.points: List[Tuple[int, float]] = []

    def record(self, used: int, best: float):
        best = float(best)
        if self.points:
            last_used, last_best = self.points[-1]
            if used <= last_used:
                return
            best = min(best, last_best)
        self.points.append((int(used), best))

    def as_tuple(self) -> Tuple[Tuple[int, float], ...]:
        return tuple(self.points)


# === 操作 ===

def checked_evaluate(spec: ObjectiveSpec, x, meter: BudgetMeter) -> float:
    """带预算计数的目标函数调用：成功时 used 恰好加 1。"""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dimension,):
        raise DimensionMismatch(f"{spec.name}: expected vector of length {spec.dimension}, got shape {x.shape}")
    meter.charge()
    return float(spec.evaluate(x))


def uniform_in(rng: RngStream, lo: float, hi: float) -> float:
    if lo > hi:
        raise InvalidInterval(f"lower bound {lo} exceeds upper bound {hi}")
    if lo == hi:
        return float(lo)
    return float(rng.uniform(lo, hi))


def optimizer_config(name: str, **params):
    """按名称构造优化器配置；值为 None 的参数使用 config.py 中的默认值。"""
    name = str(name).strip().lower()
    params = {k: v for k, v in params.items() if v is not None}
    if name == "hopso":
        from hopso import HopsoConfig
        return HopsoConfig(**params)
    if name == "pso":
        from baselines import PsoConfig
        return PsoConfig(**params)
    if name == "de":
        from baselines import DeConfig
        return DeConfig(**params)
    raise UnknownOptimizer(f"unknown optimizer '{name}', expected one of {', '.join(OPTIMIZER_NAMES)}")


def _resolve_runner(optimizer) -> Callable:
    name = getattr(optimizer, "name", None)
    if name == "hopso":
        from hopso import optimize
        return optimize
    if name in ("pso", "de"):
        import baselines
        return baselines.optimize_pso if name == "pso" else baselines.optimize_de
    raise UnknownOptimizer(f"unsupported optimizer config: {optimizer!r}")


def run_optimizer(optimizer, spec: ObjectiveSpec, budget: int, seed: int) -> RunRecord:
    """按 (配置, 目标, 预算, 种子) 执行一次完整优化；结果只依赖这四个参数。"""
    logger = get_logger("core")
    runner = _resolve_runner(optimizer)
    budget = int(budget)
    pop = optimizer.population_size(spec, budget)
    if budget < pop:
        raise BudgetTooSmall(f"budget {budget} smaller than population size {pop}")

    meter = BudgetMeter(budget)
    rng = RngStream(seed)
    logger.debug(f"Run {optimizer.name} on {spec.name} d={spec.dimension} B={budget} seed={seed}")
    best_x, best_f, trace = runner(optimizer, spec, meter, rng)
    record = RunRecord(
        optimizer=optimizer.name,
        objective=spec.name,
        seed=int(seed),
        budget=budget,
        dimension=spec.dimension,
        config=asdict(optimizer),
        trace=trace.as_tuple(),
        best_position=tuple(float(v) for v in best_x),
        best_value=float(best_f),
    )
    logger.debug(f"Run {optimizer.name}/{spec.name} seed={seed}: best={record.best_value:.6g} after {record.evaluations_used} evals")
    return record
