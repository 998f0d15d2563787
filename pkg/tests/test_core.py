import numpy as np
import pytest

from core import (
    BudgetExhausted,
    BudgetMeter,
    BudgetTooSmall,
    DimensionMismatch,
    InvalidBudget,
    InvalidInterval,
    ObjectiveSpec,
    RngStream,
    RunRecord,
    TraceRecorder,
    UnknownOptimizer,
    checked_evaluate,
    optimizer_config,
    run_optimizer,
    uniform_in,
)
from testbed import function_names, spec_for, sphere


def counting(spec):
    calls = {"n": 0}

    def wrapped(x):
        calls["n"] += 1
        return spec.evaluate(x)

    counted = ObjectiveSpec(spec.name, spec.dimension, spec.lower, spec.upper, spec.f_min, wrapped,
                            spec.minimizer, spec.modality)
    return counted, calls


def test_checked_evaluate_counts_one(sphere5):
    meter = BudgetMeter(10)
    assert checked_evaluate(sphere5, np.zeros(5), meter) == 0.0
    assert meter.used == 1


def test_checked_evaluate_exhausted(sphere5):
    meter = BudgetMeter(2, used=2)
    with pytest.raises(BudgetExhausted):
        checked_evaluate(sphere5, np.zeros(5), meter)
    assert meter.used == 2


def test_checked_evaluate_dimension_mismatch(sphere5):
    meter = BudgetMeter(10)
    with pytest.raises(DimensionMismatch):
        checked_evaluate(sphere5, np.zeros(3), meter)
    assert meter.used == 0


def test_budget_meter_rejects_non_positive():
    with pytest.raises(InvalidBudget):
        BudgetMeter(0)


def test_spec_rejects_empty_interval():
    with pytest.raises(InvalidInterval):
        ObjectiveSpec("bad", 1, (1.0,), (1.0,), 0.0, sphere)


def test_uniform_in_deterministic():
    assert uniform_in(RngStream(5), 0.0, 1.0) == uniform_in(RngStream(5), 0.0, 1.0)


def test_uniform_in_degenerate_and_invalid():
    assert uniform_in(RngStream(1), 5.0, 5.0) == 5.0
    with pytest.raises(InvalidInterval):
        uniform_in(RngStream(1), 2.0, 1.0)


def test_uniform_in_mean():
    rng = RngStream(123)
    draws = [uniform_in(rng, 0.0, 1.0) for _ in range(100000)]
    assert min(draws) >= 0.0 and max(draws) < 1.0
    assert abs(np.mean(draws) - 0.5) < 0.01


def test_rng_spawn_is_reproducible():
    a = [s.random(3) for s in RngStream(9).spawn(4)]
    b = [s.random(3) for s in RngStream(9).spawn(4)]
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert not np.array_equal(a[0], a[1])


def test_trace_recorder_clamps_and_skips():
    t = TraceRecorder()
    t.record(20, 5.0)
    t.record(20, 1.0)
    t.record(40, 7.0)
    t.record(60, 2.0)
    assert t.as_tuple() == ((20, 5.0), (40, 5.0), (60, 2.0))


def test_run_record_validates_trace():
    with pytest.raises(ValueError):
        RunRecord("x", "sphere", 0, 100, 5, {}, ((10, 1.0), (10, 0.5)), (0.0,) * 5, 0.5)
    with pytest.raises(ValueError):
        RunRecord("x", "sphere", 0, 100, 5, {}, ((10, 1.0), (20, 2.0)), (0.0,) * 5, 2.0)


def test_optimizer_config_unknown():
    with pytest.raises(UnknownOptimizer):
        optimizer_config("nosuch")


@pytest.mark.parametrize("name", ["hopso", "pso", "de"])
def test_run_optimizer_deterministic(name, sphere5):
    cfg = optimizer_config(name)
    a = run_optimizer(cfg, sphere5, 400, 42)
    b = run_optimizer(cfg, sphere5, 400, 42)
    assert a == b
    assert a.evaluations_used <= 400


@pytest.mark.parametrize("name", ["hopso", "pso"])
def test_run_optimizer_budget_too_small(name, sphere5):
    with pytest.raises(BudgetTooSmall):
        run_optimizer(optimizer_config(name), sphere5, 1, 0)


@pytest.mark.parametrize("name", ["hopso", "pso", "de"])
@pytest.mark.parametrize("function", ["sphere", "rastrigin", "beale", "griewank"])
def test_meter_matches_evaluate_calls(name, function):
    spec, calls = counting(spec_for(function))
    record = run_optimizer(optimizer_config(name), spec, 500, 3)
    assert calls["n"] == record.evaluations_used
    assert calls["n"] <= 500


def test_traces_monotone_over_many_runs():
    functions = ["sphere", "ackley", "beale", "drop-wave", "levy"]
    rng = np.random.default_rng(0)
    for k in range(100):
        function = functions[k % len(functions)]
        name = ("hopso", "pso", "de")[k % 3]
        seed = int(rng.integers(0, 2 ** 31))
        record = run_optimizer(optimizer_config(name), spec_for(function), 200, seed)
        bests = [b for _, b in record.trace]
        used = [u for u, _ in record.trace]
        assert all(b2 <= b1 for b1, b2 in zip(bests, bests[1:]))
        assert all(u2 > u1 for u1, u2 in zip(used, used[1:]))
        assert record.best_value == bests[-1]


@pytest.mark.parametrize("name", ["hopso", "pso", "de"])
@pytest.mark.parametrize("function", function_names())
def test_final_value_not_below_f_min(name, function):
    spec = spec_for(function)
    for seed in range(3):
        record = run_optimizer(optimizer_config(name), spec, 400, seed)
        assert record.best_value >= spec.f_min - 1e-3
