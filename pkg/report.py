from dataclasses import dataclass, asdict
from typing import Dict, Iterable, List, Optional
import json
import math
import os

import numpy as np
import pandas as pd

from config import IQR_WHISKER
from core import EmptyInput, RunRecord
from utils import get_logger


RESULTS_COLUMNS = [
    "optimizer", "function", "dimension", "budget", "seed", "final_value", "evaluations_used", "status",
]
STATS_COLUMNS = [
    "function", "budget", "f_min", "optimizer", "mean", "median", "q1", "q3",
    "whisker_lo", "whisker_hi", "n_outliers", "n_runs",
]
# 统计表末尾附加来源列：internal（本仓库运行）或 external（导入文件）
STATS_TABLE_COLUMNS = STATS_COLUMNS + ["source"]
TABLE_FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    n_outliers: int
    n_runs: int


def summarize(values: Iterable[float]) -> SummaryStats:
    """箱线图统计：四分位数用线性插值；须在 1.5·IQR 围栏内取最极端的数据点；均值包含全部数据。"""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise EmptyInput("cannot summarize an empty list of values")
    q1, median, q3 = np.percentile(arr, [25, 50, 75])
    iqr = q3 - q1
    lo_fence = q1 - IQR_WHISKER * iqr
    hi_fence = q3 + IQR_WHISKER * iqr
    inside = arr[(arr >= lo_fence) & (arr <= hi_fence)]
    if inside.size == 0:
        inside = arr
    return SummaryStats(
        # fsum 与输入顺序无关
        mean=math.fsum(arr.tolist()) / arr.size,
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        whisker_lo=float(min(inside.min(), q1)),
        whisker_hi=float(max(inside.max(), q3)),
        n_outliers=int(arr.size - inside.size),
        n_runs=int(arr.size),
    )


def stats_row(function: str, budget: int, f_min: float, optimizer: str, stats: Optional[SummaryStats],
              source: str = "internal") -> Dict[str, object]:
    """一行统计表。stats 为空（整行失败）时统计列填 NaN、n_runs=0。"""
    row: Dict[str, object] = {"function": function, "budget": int(budget), "f_min": float(f_min), "optimizer": optimizer}
    if stats is None:
        for k in STATS_COLUMNS[4:]:
            row[k] = float("nan")
        row["n_outliers"] = 0
        row["n_runs"] = 0
    else:
        row.update(asdict(stats))
    row["source"] = source
    return row


def stats_frame(rows: List[Dict[str, object]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=STATS_TABLE_COLUMNS)


def results_frame(rows: List[Dict[str, object]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=RESULTS_COLUMNS)


def record_row(record: RunRecord, status: str = "ok") -> Dict[str, object]:
    return {
        "optimizer": record.optimizer,
        "function": record.objective,
        "dimension": record.dimension,
        "budget": record.budget,
        "seed": record.seed,
        "final_value": record.best_value,
        "evaluations_used": record.evaluations_used,
        "status": status,
    }


def _optimizer_label(optimizer: str, source: str) -> str:
    return f"{optimizer} (external)" if source == "external" else optimizer


def _markdown_table(df: pd.DataFrame) -> str:
    """透视形式：每个函数一行，各优化器均值各占一列。"""
    labels: List[str] = []
    for _, r in df.iterrows():
        label = _optimizer_label(r["optimizer"], r.get("source", "internal"))
        if label not in labels:
            labels.append(label)

    keys: List[tuple] = []
    cells: Dict[tuple, Dict[str, float]] = {}
    for _, r in df.iterrows():
        key = (r["function"], int(r["budget"]), float(r["f_min"]))
        if key not in cells:
            keys.append(key)
            cells[key] = {}
        cells[key][_optimizer_label(r["optimizer"], r.get("source", "internal"))] = float(r["mean"])

    lines = [
        "| Function | Function evaluations | F_min | " + " | ".join(labels) + " |\n",
        "|---|---:|---:|" + "---:|" * len(labels) + "\n",
    ]
    for key in keys:
        function, budget, f_min = key
        values = [_fmt(cells[key][lab]) if lab in cells[key] else "" for lab in labels]
        lines.append(f"| {function} | {budget} | {_fmt(f_min)} | " + " | ".join(values) + " |\n")
    return "".join(lines)


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return f"{value:.5g}"


def _json_value(value):
    # JSON 没有 NaN：缺失统计量写 null
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def emit_table(stats: pd.DataFrame, fmt: str = "csv") -> str:
    if stats is None or stats.empty:
        raise EmptyInput("no stats rows to emit")
    fmt = str(fmt).lower()
    df = stats.reindex(columns=STATS_TABLE_COLUMNS)
    if "source" in stats.columns:
        df["source"] = stats["source"].fillna("internal").values
    else:
        df["source"] = "internal"
    if fmt == "csv":
        return df.to_csv(index=False, lineterminator="\n")
    if fmt == "json":
        records = []
        for r in df.to_dict(orient="records"):
            r["budget"] = int(r["budget"])
            r["n_outliers"] = int(r["n_outliers"])
            r["n_runs"] = int(r["n_runs"])
            records.append({k: _json_value(v) for k, v in r.items()})
        return json.dumps(records, indent=2, allow_nan=False) + "\n"
    if fmt == "markdown":
        return _markdown_table(df)
    raise ValueError(f"unknown table format '{fmt}', expected one of {', '.join(TABLE_FORMATS)}")


def load_stats_json(text: str) -> pd.DataFrame:
    """emit_table(..., "json") 的逆操作；null 读回为 NaN。"""
    df = stats_frame(json.loads(text))
    numeric = ["budget", "f_min"] + STATS_COLUMNS[4:]
    df[numeric] = df[numeric].apply(pd.to_numeric)
    return df


def _write_text(text: str, path: str) -> str:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def save_table(stats: pd.DataFrame, path: str, fmt: str = "csv") -> str:
    logger = get_logger("report")
    _write_text(emit_table(stats, fmt), path)
    logger.info(f"Stats table ({fmt}) saved to {path}")
    return path


def save_results_csv(results: pd.DataFrame, path: str) -> str:
    """逐次运行结果；表头固定为 RESULTS_COLUMNS（无 BOM）。"""
    logger = get_logger("report")
    df = results.reindex(columns=RESULTS_COLUMNS)
    _write_text(df.to_csv(index=False, lineterminator="\n"), path)
    logger.info(f"Results saved to {path} ({len(df)} rows)")
    return path


def save_frame_csv(df: pd.DataFrame, path: str) -> str:
    """扫描表、轨迹表等绘图用数据。"""
    logger = get_logger("report")
    _write_text(df.to_csv(index=False, lineterminator="\n"), path)
    logger.info(f"Table saved to {path}")
    return path
