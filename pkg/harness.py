"""实验编排：按 (优化器, 函数) 重复带种子的运行、汇总统计、缩放因子扫描、外部结果导入。"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple
import re

import pandas as pd

from config import DEFAULT_BUDGET, DEFAULT_RUNS, DEFAULT_SEED, FUNCTION_BUDGETS, DEFAULT_OPTIMIZERS
from core import (
    EmptyInput,
    OscilswarmError,
    ParseError,
    RunRecord,
    SchemaMismatch,
    optimizer_config,
    run_optimizer,
)
from report import (
    RESULTS_COLUMNS,
    SummaryStats,
    record_row,
    results_frame,
    stats_frame,
    stats_row,
    summarize,
)
from testbed import function_names, spec_for, FUNCTIONS
from utils import get_logger


def default_budget(function: str) -> int:
    return int(FUNCTION_BUDGETS.get(function, DEFAULT_BUDGET))


@dataclass(frozen=True)
class PlanRow:
    optimizer: Any  # HopsoConfig / PsoConfig / DeConfig
    function: str
    dimension: Optional[int] = None
    budget: Optional[int] = None
    runs: int = DEFAULT_RUNS
    base_seed: int = DEFAULT_SEED

    def resolved_budget(self) -> int:
        return int(self.budget) if self.budget is not None else default_budget(self.function)


@dataclass
class ExperimentPlan:
    rows: List[PlanRow]
    results_path: Optional[str] = None
    stats_path: Optional[str] = None


@dataclass(frozen=True)
class RunOutcome:
    row_index: int
    run_index: int
    seed: int
    record: Optional[RunRecord]
    status: str = "ok"
    message: str = ""


@dataclass
class PlanResult:
    plan: ExperimentPlan
    outcomes: List[RunOutcome]
    stats: pd.DataFrame
    summaries: List[Optional[SummaryStats]] = field(default_factory=list)

    @property
    def records(self) -> List[RunRecord]:
        return [o.record for o in self.outcomes if o.record is not None]

    @property
    def failed(self) -> List[RunOutcome]:
        return [o for o in self.outcomes if o.status != "ok"]

    def results(self) -> pd.DataFrame:
        rows = []
        for o in self.outcomes:
            if o.record is not None:
                rows.append(record_row(o.record, o.status))
                continue
            plan_row = self.plan.rows[o.row_index]
            rows.append({
                "optimizer": plan_row.optimizer.name,
                "function": plan_row.function,
                "dimension": plan_row.dimension if plan_row.dimension is not None else _default_dimension(plan_row.function),
                "budget": plan_row.resolved_budget(),
                "seed": o.seed,
                "final_value": float("nan"),
                "evaluations_used": 0,
                "status": o.status,
            })
        return results_frame(rows)


def _default_dimension(function: str) -> int:
    entry = FUNCTIONS.get(function)
    return entry.dimension if entry is not None else 0


def build_plan(functions: Sequence[str], optimizers: Sequence[Any], runs: int = DEFAULT_RUNS,
               base_seed: int = DEFAULT_SEED, dimensions: Optional[Dict[str, int]] = None,
               budgets: Optional[Dict[str, int]] = None) -> ExperimentPlan:
    """函数在外层、优化器在内层展开为计划行。"""
    dimensions = dimensions or {}
    budgets = budgets or {}
    rows = []
    for fn in functions:
        for opt in optimizers:
            rows.append(PlanRow(
                optimizer=opt,
                function=fn,
                dimension=dimensions.get(fn),
                budget=budgets.get(fn),
                runs=int(runs),
                base_seed=int(base_seed),
            ))
    return ExperimentPlan(rows=rows)


def _run_task(task: Tuple[int, int, PlanRow]) -> RunOutcome:
    """工作进程入口：在进程内重建目标函数，只依赖任务参数。"""
    row_index, run_index, row = task
    seed = row.base_seed + run_index
    try:
        spec = spec_for(row.function, row.dimension)
        record = run_optimizer(row.optimizer, spec, row.resolved_budget(), seed)
        return RunOutcome(row_index, run_index, seed, record)
    except Exception as e:
        return RunOutcome(row_index, run_index, seed, None, status=f"failed:{type(e).__name__}", message=str(e))


def _f_min(row: PlanRow) -> float:
    try:
        return spec_for(row.function, row.dimension).f_min
    except OscilswarmError:
        return float("nan")


def execute_plan(plan: ExperimentPlan, jobs: int = 1) -> PlanResult:
    logger = get_logger("harness")
    if not plan.rows:
        raise EmptyInput("experiment plan has no rows")
    tasks = [(i, k, row) for i, row in enumerate(plan.rows) for k in range(int(row.runs))]
    logger.info(f"Executing plan: {len(plan.rows)} rows, {len(tasks)} runs, jobs={jobs}")

    if jobs is not None and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (int(jobs) * 4))))
    else:
        outcomes = [_run_task(t) for t in tasks]
    # 合并顺序只由 (行, 运行) 下标决定
    outcomes.sort(key=lambda o: (o.row_index, o.run_index))

    rows = []
    summaries: List[Optional[SummaryStats]] = []
    for i, row in enumerate(plan.rows):
        mine = [o for o in outcomes if o.row_index == i]
        failures = [o for o in mine if o.status != "ok"]
        for o in failures:
            logger.warning(f"Row {i} ({row.optimizer.name}/{row.function}) seed={o.seed} {o.status}: {o.message}")
        values = [o.record.best_value for o in mine if o.record is not None]
        stats = summarize(values) if values else None
        summaries.append(stats)
        rows.append(stats_row(row.function, row.resolved_budget(), _f_min(row), row.optimizer.name, stats))
        if stats is not None:
            logger.info(
                f"{row.optimizer.name:>5} {row.function:<16} B={row.resolved_budget():>6} "
                f"mean={stats.mean:.5g} median={stats.median:.5g} runs={stats.n_runs} failed={len(failures)}"
            )
    return PlanResult(plan=plan, outcomes=outcomes, stats=stats_frame(rows), summaries=summaries)


def scaling_factor_sweep(function: str, s_values: Sequence[float], runs: int = DEFAULT_RUNS,
                         base_seed: int = DEFAULT_SEED, dimension: Optional[int] = None,
                         budget: Optional[int] = None, jobs: int = 1,
                         hopso_params: Optional[Dict[str, Any]] = None) -> Tuple[pd.DataFrame, PlanResult]:
    """每个 s 一行 HOPSO 统计；每次运行的 λ 由 s 与预算推出。"""
    s_values = list(s_values)
    if not s_values:
        raise EmptyInput("s_values must not be empty")
    params = dict(hopso_params or {})
    params.pop("damping", None)
    params.pop("scale", None)
    configs = [optimizer_config("hopso", scale=float(s), **params) for s in s_values]
    plan = build_plan([function], configs, runs, base_seed,
                      dimensions={function: dimension} if dimension is not None else None,
                      budgets={function: budget} if budget is not None else None)
    result = execute_plan(plan, jobs)
    table = result.stats.copy()
    table.insert(0, "s", [float(s) for s in s_values])
    return table, result


# === 外部结果导入 ===

@dataclass(frozen=True)
class ExternalResult:
    optimizer: str
    function: str
    dimension: int
    budget: int
    seed: int
    final_value: float
    evaluations_used: int
    status: str
    source: str = "external"


_LINE_RE = re.compile(r"line (\d+)")


def import_external_results(path: str) -> List[ExternalResult]:
    """读取与结果 CSV 同表头的外部文件（例如其他库跑出的 COBYLA 结果）。"""
    logger = get_logger("harness")
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SchemaMismatch(RESULTS_COLUMNS)
    except pd.errors.ParserError as e:
        m = _LINE_RE.search(str(e))
        raise ParseError(str(e), int(m.group(1)) if m else None)

    missing = [c for c in RESULTS_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaMismatch(missing)

    out = []
    for idx, r in df.iterrows():
        line = int(idx) + 2  # 表头占第 1 行
        try:
            out.append(ExternalResult(
                optimizer=r["optimizer"].strip(),
                function=r["function"].strip().lower(),
                dimension=int(r["dimension"]),
                budget=int(r["budget"]),
                seed=int(r["seed"]),
                final_value=float(r["final_value"]),
                evaluations_used=int(r["evaluations_used"]),
                status=r["status"].strip() or "ok",
            ))
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad value in {path}: {e}", line)
    logger.info(f"Imported {len(out)} external results from {path}")
    return out


def external_stats(results: Iterable[ExternalResult]) -> pd.DataFrame:
    """按 (函数, 优化器) 汇总外部结果，标记 source=external。"""
    groups: Dict[Tuple[str, str], List[ExternalResult]] = {}
    for r in results:
        if r.status != "ok":
            continue
        groups.setdefault((r.function, r.optimizer), []).append(r)
    rows = []
    for (function, optimizer), items in groups.items():
        try:
            f_min = spec_for(function, items[0].dimension).f_min
        except OscilswarmError:
            f_min = float("nan")
        stats = summarize([r.final_value for r in items])
        rows.append(stats_row(function, items[0].budget, f_min, optimizer, stats, source="external"))
    return stats_frame(rows)


def merge_external(stats: pd.DataFrame, paths: Sequence[str]) -> pd.DataFrame:
    frames = [stats]
    for p in paths:
        ext = external_stats(import_external_results(p))
        if not ext.empty:
            frames.append(ext)
    merged = pd.concat(frames, ignore_index=True) if len(frames) > 1 else stats
    # 外部行排在同一函数的内部行之后
    order = {fn: i for i, fn in enumerate(dict.fromkeys(stats["function"]))}
    merged = merged.assign(_fn=merged["function"].map(lambda f: order.get(f, len(order))))
    merged = merged.sort_values(["_fn"], kind="stable").drop(columns="_fn").reset_index(drop=True)
    return merged


# === 计划文件 ===

def load_plan(path: str) -> Tuple[ExperimentPlan, Dict[str, Any]]:
    """YAML 计划：runs/seed/jobs/functions/optimizers，可选 dimensions、budgets 与各优化器参数。"""
    from omegaconf import OmegaConf

    raw = OmegaConf.to_container(OmegaConf.load(path), resolve=True)
    if not isinstance(raw, dict):
        raise ParseError(f"plan {path} must be a mapping")
    functions = raw.get("functions") or function_names()
    optimizers = raw.get("optimizers") or list(DEFAULT_OPTIMIZERS)
    if isinstance(functions, str):
        functions = [x.strip() for x in functions.split(",") if x.strip()]
    if isinstance(optimizers, str):
        optimizers = [x.strip() for x in optimizers.split(",") if x.strip()]
    configs = [optimizer_config(name, **(raw.get(str(name).lower()) or {})) for name in optimizers]
    plan = build_plan(
        [str(f).lower() for f in functions],
        configs,
        runs=int(raw.get("runs", DEFAULT_RUNS)),
        base_seed=int(raw.get("seed", DEFAULT_SEED)),
        dimensions={str(k).lower(): int(v) for k, v in (raw.get("dimensions") or {}).items()},
        budgets={str(k).lower(): int(v) for k, v in (raw.get("budgets") or {}).items()},
    )
    plan.results_path = raw.get("results")
    plan.stats_path = raw.get("stats")
    return plan, raw
