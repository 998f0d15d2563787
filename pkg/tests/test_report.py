import io
import json

import numpy as np
import pandas as pd
import pytest

from core import EmptyInput, RunRecord
from report import (
    RESULTS_COLUMNS,
    STATS_COLUMNS,
    emit_table,
    load_stats_json,
    record_row,
    results_frame,
    save_results_csv,
    stats_frame,
    stats_row,
    summarize,
)


def test_summarize_single():
    s = summarize([5.0])
    assert (s.mean, s.median, s.q1, s.q3) == (5.0, 5.0, 5.0, 5.0)
    assert s.n_outliers == 0 and s.n_runs == 1


def test_summarize_outlier():
    s = summarize([1, 2, 3, 4, 100])
    assert s.mean == 22.0
    assert s.median == 3.0
    assert (s.q1, s.q3) == (2.0, 4.0)
    assert s.n_outliers == 1
    assert s.whisker_hi == 4.0 and s.whisker_lo == 1.0


def test_summarize_linear_quartiles():
    s = summarize([1, 2, 3, 4])
    assert s.q1 == pytest.approx(1.75)
    assert s.q3 == pytest.approx(3.25)


def test_summarize_empty():
    with pytest.raises(EmptyInput):
        summarize([])


def test_summarize_permutation_invariant_and_ordered():
    rng = np.random.default_rng(3)
    for _ in range(200):
        values = np.concatenate([rng.lognormal(0, 2, rng.integers(1, 40)), rng.normal(0, 1, 3)])
        a = summarize(values)
        b = summarize(rng.permutation(values))
        assert a == b
        assert a.q1 <= a.median <= a.q3
        assert a.whisker_lo <= a.q1 and a.q3 <= a.whisker_hi


def _stats():
    rows = [
        stats_row("sphere", 1000, 0.0, "hopso", summarize([1e-9, 2e-9, 3e-9])),
        stats_row("sphere", 1000, 0.0, "pso", summarize([1e-6, 4e-6])),
        stats_row("ackley", 10000, 0.0, "hopso", summarize([0.01, 0.02, 0.5])),
    ]
    return stats_frame(rows)


def test_emit_csv_header_and_rows():
    text = emit_table(stats_frame([stats_row("sphere", 1000, 0.0, "hopso", summarize([0.5]))]), "csv")
    lines = text.strip().split("\n")
    assert len(lines) == 2
    assert lines[0].split(",")[:len(STATS_COLUMNS)] == STATS_COLUMNS


def test_emit_markdown_pivot():
    text = emit_table(_stats(), "markdown")
    lines = text.strip().split("\n")
    assert lines[0] == "| Function | Function evaluations | F_min | hopso | pso |"
    assert lines[2].startswith("| sphere | 1000 | 0 | 2e-09 | 2.5e-06 |")
    assert lines[3].startswith("| ackley | 10000 | 0 | 0.17667 |")


def test_emit_json_round_trip():
    stats = _stats()
    back = load_stats_json(emit_table(stats, "json"))
    assert list(back.columns) == list(stats.columns)
    for col in STATS_COLUMNS[4:]:
        assert np.allclose(back[col].astype(float), stats[col].astype(float), rtol=0, atol=1e-12)
    assert list(back["optimizer"]) == list(stats["optimizer"])


def test_emit_json_writes_null_for_missing_stats():
    rows = [
        stats_row("beale", 1000, 0.0, "de", None),
        stats_row("michalewicz", 10000, float("nan"), "hopso", summarize([-4.5, -4.6])),
    ]
    text = emit_table(stats_frame(rows), "json")
    assert "NaN" not in text

    def reject(token):
        raise ValueError(f"non-standard JSON constant {token}")

    records = json.loads(text, parse_constant=reject)
    assert records[0]["mean"] is None and records[0]["n_runs"] == 0
    assert records[1]["f_min"] is None
    back = load_stats_json(text)
    assert np.isnan(back.loc[0, "mean"]) and np.isnan(back.loc[1, "f_min"])
    assert back.loc[1, "mean"] == pytest.approx(-4.55)


def test_emit_rejects_empty_and_unknown_format():
    with pytest.raises(EmptyInput):
        emit_table(stats_frame([]), "csv")
    with pytest.raises(ValueError):
        emit_table(_stats(), "xml")


def test_failed_row_has_nan_stats():
    row = stats_row("beale", 1000, 0.0, "de", None)
    assert row["n_runs"] == 0 and np.isnan(row["mean"])


def test_results_csv_exact_header(tmp_path):
    record = RunRecord("hopso", "sphere", 3, 1000, 5, {}, ((20, 1.0), (1000, 0.25)), (0.0,) * 5, 0.25)
    path = tmp_path / "r.csv"
    save_results_csv(results_frame([record_row(record)]), str(path))
    text = path.read_text(encoding="utf-8")
    assert text.split("\n")[0] == "optimizer,function,dimension,budget,seed,final_value,evaluations_used,status"
    df = pd.read_csv(io.StringIO(text))
    assert list(df.columns) == RESULTS_COLUMNS
    assert df.loc[0, "evaluations_used"] == 1000 and df.loc[0, "status"] == "ok"
