import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantga import ga


def flip_bits(rng, genes):
    return 1 - genes


def bit_problem(evaluate, length=5):
    return ga.Problem(
        evaluate=evaluate,
        initialize=lambda rng, n: rng.integers(0, 2, size=(n, length)),
        gene_mutator=flip_bits,
        name="bits",
    )


def one_max(length):
    return ga.Problem(
        evaluate=lambda m: m.sum(axis=1).astype(float),
        initialize=lambda rng, n: rng.integers(0, 2, size=(n, length)),
        gene_mutator=flip_bits,
        name="one-max",
    )


# -- config -------------------------------------------------------------------

def test_config_defaults_valid():
    cfg = ga.GaConfig()
    assert cfg.elitism == 1
    assert cfg.to_dict()["population_size"] == 50


@pytest.mark.parametrize("overrides", [
    {"population_size": 1},
    {"crossover_rate": 1.5},
    {"mutation_rate": -0.1},
    {"site_mutation_rate": 2.0},
    {"max_generations": 0},
    {"elitism": 50},
    {"elitism": -1},
    {"rng_seed": -1},
])
def test_config_rejects_bad_values(overrides):
    with pytest.raises(ga.GaConfigError):
        ga.GaConfig(**overrides)


# -- selection ----------------------------------------------------------------

def test_roulette_frequencies_follow_fitness(rng):
    f = np.array([1.0, 2.0, 3.0, 4.0])
    n = 40_000
    idx, all_zero = ga.roulette_indices(f, n, rng)
    assert not all_zero
    counts = np.bincount(idx, minlength=4)
    p = f / f.sum()
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) < 4 * sigma)


def test_roulette_never_picks_zero_fitness(rng):
    idx, _ = ga.roulette_indices(np.array([0.0, 1.0, 0.0, 1.0]), 5000, rng)
    assert set(np.unique(idx)) == {1, 3}


def test_roulette_all_zero_falls_back_to_uniform(rng):
    idx, all_zero = ga.roulette_indices(np.zeros(4), 8000, rng)
    assert all_zero
    counts = np.bincount(idx, minlength=4)
    assert np.all(np.abs(counts - 2000) < 4 * np.sqrt(8000 * 0.25 * 0.75))


def test_roulette_select_keeps_population_size(rng):
    pop = ga.Population(np.arange(12).reshape(6, 2), np.ones(6))
    selected, _ = ga.roulette_select(pop, rng)
    assert selected.members.shape == (6, 2)
    for row, f in zip(selected.members, selected.fitnesses):
        assert f == 1.0
        assert any(np.array_equal(row, r) for r in pop.members)


def test_duel_prefers_fitter():
    f = np.array([0.1, 0.9, 0.5])
    assert ga.duel(f, 0, 1) == 1
    assert ga.duel(f, 2, 0) == 2


def test_duel_tie_goes_to_lower_index():
    f = np.array([0.5, 0.7, 0.5])
    assert ga.duel(f, 2, 0) == 0
    assert ga.duel(f, 0, 2) == 0
    assert ga.duel(f, 1, 1) == 1


def test_tournament_pair_returns_members(rng):
    pop = ga.Population(np.arange(10).reshape(5, 2), np.array([1.0, 2, 3, 4, 5]))
    a, b = ga.tournament_pair(pop, rng)
    assert a.shape == (2,) and b.shape == (2,)


# -- crossover ----------------------------------------------------------------

def test_crossover_worked_example():
    c1, c2 = ga.crossover_at(np.array([1, 1, 1, 1, 1]), np.array([0, 0, 0, 0, 0]), 2)
    assert c1.tolist() == [1, 1, 0, 0, 0]
    assert c2.tolist() == [0, 0, 1, 1, 1]


def test_crossover_identical_parents_is_identity(rng):
    a = np.array([3, 1, 4, 1, 5, 9])
    c1, c2 = ga.one_point_crossover(a, a.copy(), rng)
    assert np.array_equal(c1, a) and np.array_equal(c2, a)


def test_crossover_length_mismatch(rng):
    with pytest.raises(ga.LengthMismatchError):
        ga.one_point_crossover(np.zeros(4), np.zeros(5), rng)


@given(st.lists(st.integers(-5, 5), min_size=2, max_size=20), st.data())
def test_crossover_swap_symmetry_and_gene_conservation(genes_a, data):
    a = np.array(genes_a)
    b = np.array(data.draw(st.lists(st.integers(-5, 5), min_size=len(a), max_size=len(a))))
    cut = data.draw(st.integers(1, len(a) - 1))
    c1, c2 = ga.crossover_at(a, b, cut)
    d1, d2 = ga.crossover_at(b, a, cut)
    assert np.array_equal(c1, d2) and np.array_equal(c2, d1)
    # every position keeps the same pair of genes
    assert np.array_equal(np.sort(np.stack([c1, c2]), axis=0), np.sort(np.stack([a, b]), axis=0))


def test_cut_point_in_open_range():
    rng = np.random.default_rng(0)
    a, b = np.zeros(6, dtype=int), np.ones(6, dtype=int)
    cuts = set()
    for _ in range(500):
        c1, _ = ga.one_point_crossover(a, b, rng)
        cuts.add(int(np.argmax(c1 == 1)))
    assert cuts == {1, 2, 3, 4, 5}


def test_pairing_without_recombination_copies_members(rng):
    members = np.arange(21).reshape(7, 3)
    out = ga._pair_and_cross(members, np.ones(7), 0.0, rng)
    rows = {tuple(r) for r in members}
    assert out.shape == members.shape
    assert all(tuple(r) in rows for r in out)


# -- mutation -----------------------------------------------------------------

def test_mutation_rate_zero_is_identity(rng):
    genes = np.array([1, 0, 0, 1, 1])
    assert np.array_equal(ga.mutate(genes, flip_bits, 0.0, 1.0, rng), genes)


def test_full_flip_mutation(rng):
    out = ga.mutate(np.array([1, 0, 0, 1, 1]), flip_bits, 1.0, 1.0, rng)
    assert out.tolist() == [0, 1, 1, 0, 0]


def test_mutation_count_statistics():
    # L=100, p_m=1, p_s=0.1: mutated-site count is Binomial(100, 0.1)
    rng = np.random.default_rng(7)
    trials, length, p_s = 10_000, 100, 0.1
    members = np.zeros((trials, length), dtype=int)
    out = ga.mutate_population(members, flip_bits, 1.0, p_s, rng)
    counts = out.sum(axis=1)
    mean, var = length * p_s, length * p_s * (1 - p_s)
    assert abs(counts.mean() - mean) < 3 * np.sqrt(var / trials)


def test_mutation_two_level_statistics():
    # p_m=0.5, p_s=0.2, L=10: count is a mixture; mean 1.0
    rng = np.random.default_rng(8)
    trials = 10_000
    out = ga.mutate_population(np.zeros((trials, 10), dtype=int), flip_bits, 0.5, 0.2, rng)
    counts = out.sum(axis=1)
    mean = 0.5 * 10 * 0.2
    var = 0.5 * (10 * 0.2 * 0.8 + 2.0**2) - mean**2
    assert abs(counts.mean() - mean) < 3 * np.sqrt(var / trials)
    untouched = np.mean(counts == 0)
    p_untouched = 0.5 + 0.5 * 0.8**10
    assert abs(untouched - p_untouched) < 3 * np.sqrt(p_untouched * (1 - p_untouched) / trials)


# -- driver -------------------------------------------------------------------

def test_constant_fitness_hits_threshold_in_first_generation():
    trace = ga.run(bit_problem(lambda m: np.ones(len(m))),
                   ga.GaConfig(population_size=8, fitness_threshold=1.0, max_generations=50))
    assert trace.generations == 1
    assert trace.termination_reason == ga.THRESHOLD_REACHED


def test_no_threshold_runs_to_max_generations():
    trace = ga.run(bit_problem(lambda m: m.sum(axis=1) + 1.0),
                   ga.GaConfig(population_size=8, fitness_threshold=None, max_generations=17))
    assert len(trace.records) == 17
    assert trace.termination_reason == ga.MAX_GENERATIONS
    assert [r.generation for r in trace.records] == list(range(1, 18))


def test_one_max_benchmark():
    solved = 0
    for seed in range(10):
        cfg = ga.GaConfig(population_size=44, crossover_rate=0.65, mutation_rate=0.2,
                          site_mutation_rate=0.1, max_generations=3200, fitness_threshold=20.0,
                          rng_seed=seed)
        trace = ga.run(one_max(20), cfg)
        solved += trace.best_fitness.max() == 20.0
    assert solved >= 9


def test_same_seed_same_trace():
    cfg = ga.GaConfig(population_size=20, max_generations=30, rng_seed=99)
    t1 = ga.run(one_max(12), cfg)
    t2 = ga.run(one_max(12), cfg)
    assert np.array_equal(t1.best_fitness, t2.best_fitness)
    assert np.array_equal(t1.mean_fitness, t2.mean_fitness)
    assert all(np.array_equal(a.best_chromosome, b.best_chromosome) for a, b in zip(t1.records, t2.records))


def test_different_seed_differs():
    t1 = ga.run(one_max(30), ga.GaConfig(population_size=20, max_generations=30, rng_seed=1))
    t2 = ga.run(one_max(30), ga.GaConfig(population_size=20, max_generations=30, rng_seed=2))
    assert not np.array_equal(t1.mean_fitness, t2.mean_fitness)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(2, 15), gens=st.integers(1, 25),
       p_r=st.floats(0, 1), p_m=st.floats(0, 1), p_s=st.floats(0, 1))
def test_trace_invariants(seed, n, gens, p_r, p_m, p_s):
    cfg = ga.GaConfig(population_size=n, crossover_rate=p_r, mutation_rate=p_m, site_mutation_rate=p_s,
                      max_generations=gens, rng_seed=seed)
    trace = ga.run(one_max(8), cfg)
    assert 1 <= len(trace.records) <= gens
    assert np.all(trace.best_fitness >= trace.mean_fitness - 1e-12)
    # with one elite the best never gets worse
    assert np.all(np.diff(trace.best_fitness) >= 0)


def test_zero_fitness_generation_is_logged():
    trace = ga.run(bit_problem(lambda m: np.zeros(len(m))),
                   ga.GaConfig(population_size=6, max_generations=3, fitness_threshold=None))
    assert trace.zero_fitness_generations == [1, 2]


def test_evaluator_error_carries_generation():
    calls = {"n": 0}

    def flaky(m):
        calls["n"] += 1
        if calls["n"] == 3:
            raise RuntimeError("boom")
        return np.ones(len(m))

    with pytest.raises(ga.FitnessEvaluationError) as info:
        ga.run(bit_problem(flaky), ga.GaConfig(population_size=4, max_generations=10, fitness_threshold=None))
    assert info.value.generation == 3


@pytest.mark.parametrize("bad", [np.nan, -1.0, np.inf])
def test_invalid_fitness_rejected(bad):
    with pytest.raises(ga.FitnessEvaluationError):
        ga.run(bit_problem(lambda m: np.full(len(m), bad)), ga.GaConfig(population_size=4, max_generations=2))
