import numpy as np
import pytest

from baselines import (
    DeConfig,
    DePopulation,
    PsoConfig,
    PsoSwarm,
    binomial_crossover,
    constriction_factor,
    de_mutant,
    de_step,
    mutation_indices,
    optimize_de,
    optimize_pso,
    polish_best,
    pso_position_update,
    pso_step,
    pso_velocity_update,
)
from core import BudgetMeter, BudgetTooSmall, InvalidPhi, PopulationTooSmall, RngStream
from dynamics import convergence_check
from testbed import spec_for


def test_velocity_update_examples():
    assert pso_velocity_update(0.0, 1.0, 1.0, 1.0, 0.7298, 2.05, 2.05, 0.3, 0.9) == 0.0
    assert pso_velocity_update(1.0, 0.0, 1.0, 1.0, 0.5, 2.0, 2.0, 0.5, 0.5) == pytest.approx(1.5)
    assert pso_velocity_update(2.0, 0.0, 3.0, -1.0, 0.729, 0.0, 0.0, 0.5, 0.5) == pytest.approx(1.458)


def test_position_update():
    assert pso_position_update(0.0, 0.0) == 0.0
    assert pso_position_update(1.0, 1.5) == 2.5


def test_constriction_factor():
    assert constriction_factor(2.05, 2.05) == pytest.approx(0.7298, abs=1e-4)
    assert constriction_factor(3.0, 3.0) == pytest.approx(0.2679, abs=1e-4)
    with pytest.raises(InvalidPhi):
        constriction_factor(2.0, 2.0)


def test_pso_config_derives_chi():
    assert PsoConfig(chi=None).chi == pytest.approx(constriction_factor(2.05, 2.05))
    assert PsoConfig().chi == 0.7298


def test_fixed_rollout_converges():
    """r1 = r2 = 0.5 时每维是常系数线性系统，应收敛到吸引子。"""
    chi = constriction_factor(2.05, 2.05)
    assert convergence_check(chi, 0.5 * 2.05 + 0.5 * 2.05)
    x, v = np.array([3.0, -2.0]), np.array([1.0, 0.5])
    p = g = np.zeros(2)
    start = np.hypot(np.linalg.norm(x), np.linalg.norm(v))
    for _ in range(200):
        v = pso_velocity_update(v, x, p, g, chi, 2.05, 2.05, 0.5, 0.5)
        x = pso_position_update(x, v)
    assert np.hypot(np.linalg.norm(x), np.linalg.norm(v)) < 1e-6 * start
    assert np.linalg.norm(x) < 1e-3


def test_pso_fixed_point():
    spec = spec_for("sphere", 3)
    meter = BudgetMeter(100)
    swarm = PsoSwarm(PsoConfig(particles=4), spec, RngStream(1))
    swarm.initialize(meter)
    swarm.x[:] = 0.0
    swarm.v[:] = 0.0
    swarm.pbest_x[:] = 0.0
    swarm.pbest_f[:] = 0.0
    swarm.gbest_x = np.zeros(3)
    swarm.gbest_f = 0.0
    pso_step(swarm, meter)
    assert np.array_equal(swarm.x, np.zeros((4, 3)))


def test_pso_initial_velocity_is_zero(sphere5):
    meter = BudgetMeter(100)
    swarm = PsoSwarm(PsoConfig(), sphere5, RngStream(5))
    swarm.initialize(meter)
    lo, hi = sphere5.bounds()
    assert np.array_equal(swarm.v, np.zeros_like(swarm.x))
    assert np.all((swarm.x >= lo) & (swarm.x < hi))
    assert meter.used == swarm.size


def test_pso_run_improves(sphere5):
    meter = BudgetMeter(1000)
    _, best, trace = optimize_pso(PsoConfig(), sphere5, meter, RngStream(11))
    assert meter.used == 1000
    assert best < trace.as_tuple()[0][1]
    assert best < 0.1


def test_pso_sphere_typical_run_is_small(sphere5):
    # 单个种子不一定低于 1e-3；这里约束 20 个种子的中位数
    finals = []
    for seed in range(20):
        _, best, _ = optimize_pso(PsoConfig(), sphere5, BudgetMeter(1000), RngStream(seed))
        finals.append(best)
    assert np.median(finals) < 2e-2


def test_de_mutant_example():
    m = de_mutant(np.array([0.0, 0.0]), np.array([1.0, 2.0]), np.array([1.0, 0.0]), 0.5)
    assert np.allclose(m, [0.0, 1.0])


def test_mutation_indices_distinct():
    rng = RngStream(3)
    for size in (4, 5, 30):
        for target in range(size):
            r1, r2, r3 = mutation_indices(rng, size, target)
            assert len({r1, r2, r3, target}) == 4
            assert all(0 <= r < size for r in (r1, r2, r3))
    with pytest.raises(PopulationTooSmall):
        mutation_indices(rng, 3, 0)


def test_binomial_crossover_keeps_one_mutant_coordinate():
    rng = RngStream(0)
    target, mutant = np.zeros(6), np.ones(6)
    for _ in range(100):
        trial = binomial_crossover(target, mutant, 0.0, rng)
        assert trial.sum() == 1.0
    assert np.array_equal(binomial_crossover(target, mutant, 1.0, rng), mutant)


def test_de_copy_mutation_selection():
    spec = spec_for("sphere", 2)
    members = np.array([[3.0, 3.0], [1.0, 0.0], [0.0, 2.0], [4.0, 1.0], [0.5, 0.5]])
    values = np.array([spec.evaluate(m) for m in members])
    pop = DePopulation(members, values)
    meter = BudgetMeter(10)
    out = de_step(pop, spec, meter, RngStream(2), DeConfig(mutation=0.0, crossover=1.0))
    assert meter.used == 5
    member_set = {tuple(m) for m in members}
    for i in range(5):
        assert tuple(out.members[i]) in member_set
        assert out.values[i] <= values[i]


def test_de_selection_is_elitist():
    spec = spec_for("rastrigin", 4)
    meter = BudgetMeter(4000)
    rng = RngStream(9)
    cfg = DeConfig(population=12)
    lo, hi = spec.bounds()
    members = rng.uniform(lo, hi, (12, 4))
    pop = DePopulation(members, np.array([spec.evaluate(m) for m in members]))
    for _ in range(100):
        new = de_step(pop, spec, meter, rng, cfg)
        assert np.all(new.values <= pop.values)
        pop = new


def test_de_population_size_rules(sphere5):
    assert DeConfig().population_size(sphere5, 10000) == 75
    assert DeConfig().population_size(sphere5, 100) == 50
    with pytest.raises(BudgetTooSmall):
        DeConfig().population_size(sphere5, 7)
    with pytest.raises(PopulationTooSmall):
        DeConfig(population=3)
    with pytest.raises(PopulationTooSmall):
        de_step(DePopulation(np.zeros((3, 5)), np.zeros(3)), sphere5, BudgetMeter(10), RngStream(0), DeConfig())


def test_de_respects_budget_with_polish(sphere5):
    meter = BudgetMeter(1000)
    best_x, best_f, trace = optimize_de(DeConfig(), sphere5, meter, RngStream(4))
    assert meter.used <= 1000
    assert trace.as_tuple()[-1][1] == best_f
    assert sphere5.evaluate(best_x) == best_f


@pytest.mark.parametrize("seed", [0, 7, 11])
def test_de_sphere_reaches_zero(sphere5, seed):
    _, best_f, _ = optimize_de(DeConfig(), sphere5, BudgetMeter(1000), RngStream(seed))
    assert best_f < 1e-3


def test_polish_only_accepts_improvement(sphere5):
    meter = BudgetMeter(50)
    x0 = np.full(5, 0.5)
    x, f = polish_best(sphere5, x0, -1.0, meter)
    assert f == -1.0
    assert np.array_equal(x, x0)
    assert meter.used <= 50


def test_polish_stops_at_budget(sphere5):
    meter = BudgetMeter(3)
    x, f = polish_best(sphere5, np.full(5, 2.0), 20.0, meter)
    assert meter.used == 3
    assert f <= 20.0
