"""基于阻尼谐振子的粒子群优化（HOPSO）。

每个粒子在每个维度上独立地围绕吸引子做阻尼简谐振动：
    x(t) = A·cos(ωt + θ) + a,  A = max(A0·e^(-λt), A_th)
每一轮在随机时刻对振子取样并评估；个体最优或全局最优更新时，
在新吸引子处以当前位置/速度重新求振幅与相位（时钟归零），
且新振幅不小于更新前的有效振幅。
"""
from dataclasses import dataclass, replace
from typing import Callable, ClassVar, Dict, Optional, Tuple
import math

import numpy as np

from config import HOPSO_C1, HOPSO_C2, HOPSO_OMEGA, HOPSO_M, HOPSO_T_UL, HOPSO_SCALE, DEFAULT_PARTICLES
from core import (
    BudgetExhausted,
    BudgetMeter,
    DegenerateWeights,
    InvalidBudget,
    ObjectiveSpec,
    RngStream,
    TraceRecorder,
    checked_evaluate,
)
from utils import get_logger

TWO_PI = 2.0 * math.pi

Monitor = Callable[[str, Dict[str, np.ndarray]], None]


@dataclass(frozen=True)
class HopsoConfig:
    c1: float = HOPSO_C1
    c2: float = HOPSO_C2
    omega: float = HOPSO_OMEGA
    damping: Optional[float] = None  # λ；与 scale 二选一
    scale: Optional[float] = None  # s，λ = s·N/B
    m: float = HOPSO_M
    t_ul: float = HOPSO_T_UL
    particles: int = DEFAULT_PARTICLES

    name: ClassVar[str] = "hopso"

    def __post_init__(self):
        if self.damping is not None and self.scale is not None:
            raise ValueError("specify either damping (lambda) or scale (s), not both")
        if self.damping is None and self.scale is None:
            object.__setattr__(self, "scale", HOPSO_SCALE)
        if self.damping is not None and self.damping < 0:
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        if self.scale is not None and self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.omega <= 0 or self.m <= 0 or self.t_ul <= 0:
            raise ValueError("omega, m and t_ul must be positive")
        if int(self.particles) < 1:
            raise ValueError(f"particles must be >= 1, got {self.particles}")
        if self.c1 + self.c2 == 0:
            raise DegenerateWeights("c1 + c2 must be non-zero")

    def population_size(self, spec: ObjectiveSpec, budget: int) -> int:
        return int(self.particles)

    def resolve_damping(self, budget: int) -> float:
        if self.damping is not None:
            return float(self.damping)
        return derive_lambda(self.scale, budget, self.particles)


def derive_lambda(s: float, budget: int, particles: int) -> float:
    """λ = s·(B/N)^-1：阻尼与每个粒子分得的评估次数成反比。"""
    if s <= 0:
        raise ValueError(f"scale must be > 0, got {s}")
    if particles < 1 or budget < particles:
        raise InvalidBudget(f"budget {budget} smaller than particle count {particles}")
    return float(s) * float(particles) / float(budget)


# === 单振子解析式（标量与数组通用） ===

def attractor(p, g, c1: float, c2: float):
    total = c1 + c2
    if total == 0:
        raise DegenerateWeights("c1 + c2 must be non-zero")
    return (c1 * p + c2 * g) / total


def amplitude_floor(p, g, m: float):
    return m * np.abs(p - g) / 2.0


def initial_amplitude(x0, v0, a, damping: float, omega: float):
    dx = x0 - a
    return np.hypot(dx, (v0 + damping * dx) / omega)


def initial_phase(x0, v0, a, amplitude, damping: float, omega: float):
    """使 A·cos(θ) = x0 - a 且速度方向一致的相位，取值 [0, 2π)。

    振幅等于解析振幅时同时满足位置与速度方程；
    振幅被 max 规则抬高时保持位置不变，只保留速度的方向。A = 0 时 θ = 0。
    """
    dx = np.asarray(x0 - a, dtype=float)
    amp = np.asarray(amplitude, dtype=float)
    s = -(np.asarray(v0, dtype=float) + damping * dx) / omega  # A·sinθ
    analytic = np.hypot(dx, s)
    sign = np.where(s < 0, -1.0, 1.0)
    spread = np.sqrt(np.maximum(amp * amp - dx * dx, 0.0))
    y = np.where(amp <= analytic, s, sign * spread)
    theta = np.mod(np.arctan2(y, dx), TWO_PI)
    theta = np.where((amp > 0) & (theta < TWO_PI), theta, 0.0)
    if theta.ndim == 0:
        return float(theta)
    return theta


@dataclass(frozen=True)
class OscillatorState:
    """每个粒子每个维度一个振子；字段为同形状的数组（或标量）。"""
    attractor: np.ndarray
    amplitude: np.ndarray  # A0
    phase: np.ndarray  # θ
    clock: np.ndarray  # 本地时钟 t
    floor: np.ndarray  # A_th
    position: np.ndarray
    velocity: np.ndarray

    def effective_amplitude(self, damping: float) -> np.ndarray:
        return np.maximum(self.amplitude * np.exp(-damping * self.clock), self.floor)

    def merge(self, other: "OscillatorState", rows: np.ndarray) -> "OscillatorState":
        """rows 为粒子掩码：被选中的行取 other，其余保留。"""
        mask = np.asarray(rows, dtype=bool)[:, None]
        return OscillatorState(**{
            k: np.where(mask, getattr(other, k), getattr(self, k))
            for k in ("attractor", "amplitude", "phase", "clock", "floor", "position", "velocity")
        })


def sample(state: OscillatorState, dt, damping: float, omega: float) -> OscillatorState:
    clock = state.clock + dt
    amp = np.maximum(state.amplitude * np.exp(-damping * clock), state.floor)
    arg = omega * clock + state.phase
    x = amp * np.cos(arg) + state.attractor
    # 位置表达式的精确时间导数
    v = -omega * amp * np.sin(arg) - damping * (x - state.attractor)
    return replace(state, clock=clock, position=x, velocity=v)


def rebase_on_update(state: OscillatorState, x_now, v_now, new_attractor, new_floor,
                     damping: float, omega: float) -> OscillatorState:
    before = state.effective_amplitude(damping)
    candidate = initial_amplitude(x_now, v_now, new_attractor, damping, omega)
    amp = np.maximum(np.maximum(before, candidate), new_floor)
    theta = initial_phase(x_now, v_now, new_attractor, amp, damping, omega)
    return OscillatorState(
        attractor=np.asarray(new_attractor, dtype=float),
        amplitude=amp,
        phase=np.asarray(theta, dtype=float),
        clock=np.zeros_like(amp),
        floor=np.asarray(new_floor, dtype=float),
        position=np.asarray(x_now, dtype=float),
        velocity=np.asarray(v_now, dtype=float),
    )


# === 粒子群 ===

class HopsoSwarm:
    def __init__(self, config: HopsoConfig, spec: ObjectiveSpec, budget: int, rng: RngStream,
                 monitor: Optional[Monitor] = None):
        self.config = config
        self.spec = spec
        self.damping = config.resolve_damping(budget)
        # 每个粒子一条子随机流，派生顺序固定
        self.streams = rng.spawn(config.particles)
        self.monitor = monitor
        self.state: Optional[OscillatorState] = None
        self.pbest_x = np.empty((0, spec.dimension))
        self.pbest_f = np.empty(0)
        self.gbest_x = np.empty(spec.dimension)
        self.gbest_f = math.inf

    @property
    def size(self) -> int:
        return self.config.particles

    def _emit(self, kind: str, payload: Dict[str, np.ndarray]):
        if self.monitor is not None:
            self.monitor(kind, payload)

    def _evaluate_all(self, x: np.ndarray, meter: BudgetMeter) -> np.ndarray:
        return np.array([checked_evaluate(self.spec, x[j], meter) for j in range(self.size)])

    def initialize(self, meter: BudgetMeter):
        lo, hi = self.spec.bounds()
        half = (hi - lo) / 2.0
        x = np.empty((self.size, self.spec.dimension))
        v = np.empty_like(x)
        for j, stream in enumerate(self.streams):
            x[j] = stream.uniform(lo, hi)
            v[j] = stream.uniform(-half, half)

        values = self._evaluate_all(x, meter)
        self.pbest_x = x.copy()
        self.pbest_f = values.copy()
        best = int(np.argmin(values))
        self.gbest_x = x[best].copy()
        self.gbest_f = float(values[best])

        zeros = np.zeros_like(x)
        self.state = OscillatorState(attractor=x.copy(), amplitude=zeros, phase=zeros, clock=zeros,
                                     floor=zeros, position=x, velocity=v)
        self._rebase(np.ones(self.size, dtype=bool))

    def _rebase(self, rows: np.ndarray):
        cfg = self.config
        state = self.state
        g = self.gbest_x[None, :]
        new_a = attractor(self.pbest_x, g, cfg.c1, cfg.c2)
        new_floor = amplitude_floor(self.pbest_x, g, cfg.m)
        before = state.effective_amplitude(self.damping)
        rebased = rebase_on_update(state, state.position, state.velocity, new_a, new_floor, self.damping, cfg.omega)
        self.state = state.merge(rebased, rows)
        self._emit("rebase", {
            "rows": rows.copy(),
            "before": before[rows],
            "after": rebased.amplitude[rows],
            "candidate": initial_amplitude(state.position, state.velocity, new_a, self.damping, cfg.omega)[rows],
            "floor": new_floor[rows],
            "attractor": new_a[rows],
            "phase": rebased.phase[rows],
            "position": state.position[rows],
            "velocity": state.velocity[rows],
            "damping": np.float64(self.damping),
            "omega": np.float64(cfg.omega),
        })

    def step(self, meter: BudgetMeter, dt: Optional[np.ndarray] = None):
        if meter.remaining < self.size:
            raise BudgetExhausted(f"{meter.remaining} evaluations left, a sweep needs {self.size}")
        cfg = self.config
        if dt is None:
            dt = np.vstack([s.uniform(0.0, cfg.t_ul, self.spec.dimension) for s in self.streams])
        self.state = sample(self.state, dt, self.damping, cfg.omega)
        self._emit("sample", {
            "effective": self.state.effective_amplitude(self.damping),
            "attractor": self.state.attractor,
            "position": self.state.position,
            "pbest": self.pbest_x.copy(),
            "gbest": self.gbest_x.copy(),
            "m": np.float64(cfg.m),
        })

        values = self._evaluate_all(self.state.position, meter)

        # 个体最优：严格改进才更新，并重置该粒子所有维度的振子
        improved = values < self.pbest_f
        if improved.any():
            self.pbest_x[improved] = self.state.position[improved]
            self.pbest_f[improved] = values[improved]
            self._rebase(improved)

        # 全局最优：每轮最多更新一次，随后所有粒子重置
        best = int(np.argmin(self.pbest_f))
        if self.pbest_f[best] < self.gbest_f:
            self.gbest_x = self.pbest_x[best].copy()
            self.gbest_f = float(self.pbest_f[best])
            self._rebase(np.ones(self.size, dtype=bool))
        return self


def hopso_step(swarm: HopsoSwarm, meter: BudgetMeter, dt: Optional[np.ndarray] = None) -> HopsoSwarm:
    """推进一轮：取样、评估、更新最优并重置振子。dt 为空时由各粒子随机流抽取。"""
    return swarm.step(meter, dt)


def optimize(config: HopsoConfig, spec: ObjectiveSpec, meter: BudgetMeter, rng: RngStream,
             monitor: Optional[Monitor] = None) -> Tuple[np.ndarray, float, TraceRecorder]:
    logger = get_logger("hopso")
    swarm = HopsoSwarm(config, spec, meter.limit, rng, monitor=monitor)
    trace = TraceRecorder()
    swarm.initialize(meter)
    trace.record(meter.used, swarm.gbest_f)
    while meter.remaining >= swarm.size:
        hopso_step(swarm, meter)
        trace.record(meter.used, swarm.gbest_f)
    logger.debug(f"HOPSO {spec.name}: lambda={swarm.damping:.4g}, best={swarm.gbest_f:.6g}, evals={meter.used}")
    return swarm.gbest_x.copy(), swarm.gbest_f, trace
