"""单维 PSO 递推的稳定性分析。

状态 P_t = (v_t, y_t)，y_t 为相对吸引子的平移坐标，P_{t+1} = M·P_t，
M = [[χ, χφ], [-χ, 1-χφ]]，φ = c1·r1 + c2·r2，det M = χ。
"""
from dataclasses import dataclass
from typing import List, Tuple
import cmath
import math

import numpy as np
import pandas as pd

from config import SWEEP_SAMPLES


@dataclass(frozen=True)
class TrajectoryState:
    v: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.v, self.y)


@dataclass(frozen=True)
class DynamicalMatrix:
    chi: float
    phi: float

    @property
    def entries(self) -> np.ndarray:
        chi, phi = self.chi, self.phi
        return np.array([[chi, chi * phi], [-chi, 1.0 - chi * phi]])

    def det(self) -> float:
        (a, b), (c, d) = self.entries
        return float(a * d - b * c)

    def apply(self, state: TrajectoryState) -> TrajectoryState:
        chi, phi = self.chi, self.phi
        return TrajectoryState(
            v=chi * state.v + chi * phi * state.y,
            y=-chi * state.v + (1.0 - chi * phi) * state.y,
        )


def build_matrix(chi: float, c1: float, c2: float, r1: float, r2: float) -> DynamicalMatrix:
    if not (0.0 <= r1 <= 1.0 and 0.0 <= r2 <= 1.0):
        raise ValueError(f"r1, r2 must lie in [0, 1], got ({r1}, {r2})")
    return DynamicalMatrix(chi=float(chi), phi=float(c1 * r1 + c2 * r2))


def eigenvalues_closed_form(chi: float, phi: float) -> Tuple[complex, complex]:
    trace = 1.0 + (1.0 - phi) * chi
    disc = ((phi - 1.0) * chi - 1.0) ** 2 - 4.0 * chi
    root = cmath.sqrt(disc)
    return (trace + root) / 2.0, (trace - root) / 2.0


def _symmetric_eigenvalues(a: float, b: float, d: float) -> Tuple[float, float]:
    """对称 2x2 [[a, b], [b, d]] 的特征值，降序。"""
    mean = (a + d) / 2.0
    radius = math.hypot((a - d) / 2.0, b)
    return mean + radius, mean - radius


def singular_values(matrix: DynamicalMatrix) -> Tuple[float, float]:
    """σ₁ 取 MᵀM 的最大特征值；σ₂ = |det M| / σ₁，避免 φ 较大时两数相减的抵消。"""
    m = matrix.entries
    gram = m.T @ m
    hi, _ = _symmetric_eigenvalues(gram[0, 0], gram[0, 1], gram[1, 1])
    s1 = math.sqrt(max(hi, 0.0))
    return s1, abs(matrix.det()) / s1


def singular_values_closed_form(chi: float, c: float, r: float) -> Tuple[float, float]:
    """c1 = c2 = c、r = r1 + r2 时的简化式，用于交叉校验。"""
    if chi <= 0:
        raise ValueError(f"chi must be > 0, got {chi}")
    if not 0.0 <= r <= 2.0:
        raise ValueError(f"r must lie in [0, 2], got {r}")
    phi = c * r
    t = 2.0 * chi * chi * (phi * phi + 1.0) - 2.0 * phi * chi + 1.0
    root = math.sqrt(max(t * t - 4.0 * chi * chi, 0.0))
    s1 = math.sqrt((t + root) / 2.0)
    return s1, chi / s1


def convergence_check(chi: float, phi: float) -> bool:
    return max(abs(lam) for lam in eigenvalues_closed_form(chi, phi)) < 1.0


def random_product_trajectory(chi: float, c1: float, c2: float, steps: int, seed: int) -> List[float]:
    """从 P0 = (1, 1) 出发，每步重新抽取 r1、r2 构造 M_i，返回每步之后的状态范数。"""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    rng = np.random.default_rng(seed)
    state = TrajectoryState(1.0, 1.0)
    norms = []
    for _ in range(int(steps)):
        r1, r2 = rng.random(2)
        state = build_matrix(chi, c1, c2, float(r1), float(r2)).apply(state)
        norms.append(state.norm())
    return norms


def figure2_sweep(chi: float, c: float, samples: int = SWEEP_SAMPLES) -> pd.DataFrame:
    """r 在 [0, 2] 上均匀取样，列为 r, sigma1, sigma2。"""
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    rows = []
    for r in np.linspace(0.0, 2.0, int(samples)):
        s1, s2 = singular_values(build_matrix(chi, c, c, r / 2.0, r / 2.0))
        rows.append({"r": float(r), "sigma1": s1, "sigma2": s2})
    return pd.DataFrame(rows, columns=["r", "sigma1", "sigma2"])


def trajectory_frame(norms: List[float]) -> pd.DataFrame:
    return pd.DataFrame({"step": np.arange(1, len(norms) + 1), "norm": norms})
