"""12 个常用基准测试函数及其注册表（名称 -> 维度、初始化区间、已知最小值）。"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple
from functools import partial
import math

import numpy as np
import pandas as pd

from core import ObjectiveSpec, UnknownFunction, FixedDimension, DimensionMismatch


# Ackley 常数（标准取值）
ACKLEY_A = 20.0
ACKLEY_B = 0.2
ACKLEY_C = 2.0 * math.pi
# Michalewicz 陡峭度
MICHALEWICZ_M = 10
# Schwefel 偏移：每维 418.9829，使最小值为 0
SCHWEFEL_OFFSET = 418.9829


def ackley(x: np.ndarray) -> float:
    d = x.size
    s1 = np.sum(x ** 2) / d
    s2 = np.sum(np.cos(ACKLEY_C * x)) / d
    return float(-ACKLEY_A * np.exp(-ACKLEY_B * np.sqrt(s1)) - np.exp(s2) + ACKLEY_A + math.e)


def beale(x: np.ndarray) -> float:
    x1, x2 = x[0], x[1]
    # 后两项按标准形式取平方，才有 f(3, 0.5) = 0
    return float(
        (1.5 - x1 + x1 * x2) ** 2
        + (2.25 - x1 + x1 * x2 ** 2) ** 2
        + (2.625 - x1 + x1 * x2 ** 3) ** 2
    )


def cross_in_tray(x: np.ndarray) -> float:
    x1, x2 = x[0], x[1]
    r = math.sqrt(x1 * x1 + x2 * x2)
    inner = abs(math.sin(x1) * math.sin(x2) * math.exp(abs(100.0 - r / math.pi))) + 1.0
    return float(-0.0001 * inner ** 0.1)


def drop_wave(x: np.ndarray) -> float:
    r2 = float(x[0] ** 2 + x[1] ** 2)
    return float(-(1.0 + math.cos(12.0 * math.sqrt(r2))) / (0.5 * r2 + 2.0))


def goldstein_price(x: np.ndarray) -> float:
    x1, x2 = x[0], x[1]
    a = 1.0 + (x1 + x2 + 1.0) ** 2 * (19.0 - 14.0 * x1 + 3.0 * x1 ** 2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 ** 2)
    b = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (18.0 - 32.0 * x1 + 12.0 * x1 ** 2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 ** 2)
    return float(a * b)


def griewank(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1)
    return float(np.sum(x ** 2) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def levy(x: np.ndarray) -> float:
    w = 1.0 + (x - 1.0) / 4.0
    head = math.sin(math.pi * w[0]) ** 2
    body = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(math.pi * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + math.sin(2.0 * math.pi * w[-1]) ** 2)
    return float(head + body + tail)


def michalewicz(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1)
    return float(-np.sum(np.sin(x) * np.sin(i * x ** 2 / math.pi) ** (2 * MICHALEWICZ_M)))


def rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x ** 2 - 10.0 * np.cos(2.0 * math.pi * x)))


def rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def schwefel(x: np.ndarray) -> float:
    return float(SCHWEFEL_OFFSET * x.size + np.sum(-x * np.sin(np.sqrt(np.abs(x)))))


def sphere(x: np.ndarray) -> float:
    return float(np.sum(x ** 2))


def boxed_evaluate(fn: Callable[[np.ndarray], float], lo: float, hi: float, x: np.ndarray) -> float:
    """域外的点：坐标截断到 [lo, hi] 后求值，再加上越界距离的平方和。结果不小于域内最小值。"""
    x = np.asarray(x, dtype=float)
    clipped = np.clip(x, lo, hi)
    return fn(clipped) + float(np.sum((x - clipped) ** 2))


@dataclass(frozen=True)
class FunctionEntry:
    evaluate: Callable[[np.ndarray], float]
    dimension: int
    lo: float
    hi: float
    f_min: float
    modality: str
    parametric: bool
    minimizer: Callable[[int], Optional[Tuple[float, ...]]]
    # 已知最小值只在定义域内成立：域外截断求值并加越界惩罚
    boxed: bool = False


def _repeat(value: float) -> Callable[[int], Tuple[float, ...]]:
    return lambda d: tuple([float(value)] * d)


def _fixed(point: Tuple[float, ...]) -> Callable[[int], Tuple[float, ...]]:
    return lambda d: tuple(point)


# Michalewicz 的最小值只对少数维度已知；坐标由网格 + 局部细化求得（派生数据）
_MICHALEWICZ_MIN = {2: -1.8013, 5: -4.687, 10: -9.66015}
_MICHALEWICZ_ARGMIN = {
    2: (2.202906, 1.570796),
    5: (2.202906, 1.570796, 1.284992, 1.923058, 1.720470),
}


FUNCTIONS: Dict[str, FunctionEntry] = {
    "ackley": FunctionEntry(ackley, 10, -32.76, 32.76, 0.0, "multimodal", True, _repeat(0.0)),
    "beale": FunctionEntry(beale, 2, -5.0, 5.0, 0.0, "multimodal", False, _fixed((3.0, 0.5))),
    "cross-in-tray": FunctionEntry(cross_in_tray, 2, -10.0, 10.0, -2.06261, "multimodal", False, _fixed((1.34941, -1.34941)), boxed=True),
    "drop-wave": FunctionEntry(drop_wave, 2, -5.12, 5.12, -1.0, "multimodal", False, _fixed((0.0, 0.0))),
    "goldstein-price": FunctionEntry(goldstein_price, 2, -2.0, 2.0, 3.0, "multimodal", False, _fixed((0.0, -1.0))),
    "griewank": FunctionEntry(griewank, 10, -600.0, 600.0, 0.0, "multimodal", True, _repeat(0.0)),
    "levy": FunctionEntry(levy, 10, -10.0, 10.0, 0.0, "multimodal", True, _repeat(1.0)),
    "michalewicz": FunctionEntry(michalewicz, 5, 0.0, math.pi, -4.687, "multimodal", True, lambda d: _MICHALEWICZ_ARGMIN.get(d), boxed=True),
    "rastrigin": FunctionEntry(rastrigin, 10, -5.12, 5.12, 0.0, "multimodal", True, _repeat(0.0)),
    "rosenbrock": FunctionEntry(rosenbrock, 10, -5.0, 10.0, 0.0, "unimodal", True, _repeat(1.0)),
    "schwefel": FunctionEntry(schwefel, 10, -500.0, 500.0, 0.0, "multimodal", True, _repeat(420.9687), boxed=True),
    "sphere": FunctionEntry(sphere, 5, -10.0, 10.0, 0.0, "unimodal", True, _repeat(0.0)),
}


def function_names() -> List[str]:
    return list(FUNCTIONS)


def _entry(name: str) -> FunctionEntry:
    key = str(name).strip().lower()
    if key not in FUNCTIONS:
        raise UnknownFunction(f"unknown function '{name}', expected one of {', '.join(FUNCTIONS)}")
    return FUNCTIONS[key]


def _f_min(name: str, entry: FunctionEntry, d: int) -> float:
    if name == "michalewicz":
        return float(_MICHALEWICZ_MIN.get(d, float("nan")))
    return entry.f_min


def _evaluator(entry: FunctionEntry) -> Callable[[np.ndarray], float]:
    if entry.boxed:
        return partial(boxed_evaluate, entry.evaluate, entry.lo, entry.hi)
    return entry.evaluate


def spec_for(name: str, dimension: Optional[int] = None) -> ObjectiveSpec:
    entry = _entry(name)
    key = str(name).strip().lower()
    if dimension is None:
        d = entry.dimension
    else:
        d = int(dimension)
        if not entry.parametric and d != entry.dimension:
            raise FixedDimension(f"{key} is defined for d={entry.dimension} only, got {d}")
        if d <= 0:
            raise DimensionMismatch(f"dimension must be positive, got {d}")
    return ObjectiveSpec(
        name=key,
        dimension=d,
        lower=tuple([entry.lo] * d),
        upper=tuple([entry.hi] * d),
        f_min=_f_min(key, entry, d),
        evaluate=_evaluator(entry),
        minimizer=entry.minimizer(d),
        modality=entry.modality,
    )


def evaluate(name: str, x, dimension: Optional[int] = None) -> float:
    """按名称求值；x 的长度必须等于注册维度（或显式给出的维度）。"""
    entry = _entry(name)
    x = np.asarray(x, dtype=float)
    d = entry.dimension if dimension is None else int(dimension)
    if x.shape != (d,):
        raise DimensionMismatch(f"{name}: expected vector of length {d}, got shape {x.shape}")
    return _evaluator(entry)(x)


def registry_table() -> pd.DataFrame:
    """list-functions 输出：名称、维度、区间、F_min。"""
    rows = []
    for name, e in FUNCTIONS.items():
        rows.append({
            "name": name,
            "dimension": e.dimension,
            "lo": e.lo,
            "hi": e.hi,
            "f_min": e.f_min,
            "modality": e.modality,
            "parametric": e.parametric,
        })
    return pd.DataFrame(rows)
