import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heppso import ga
from heppso.core import Bounds, EvaluationCounter, RngStream
from heppso.ga import GaConfig, MicroGaConfig, decode, encode, gene_difference, needs_restart
from heppso.harness import final_at, run_trials
from heppso.problems import sphere_objective

BOX = Bounds.uniform(0.0, 4.0, 1)


def _bits(value, width=16):
    return np.array([(value >> s) & 1 for s in range(width - 1, -1, -1)], dtype=np.uint8)


def test_decode_endpoints():
    assert decode(np.zeros(16), BOX)[0] == 0.0
    assert decode(np.ones(16), BOX)[0] == 4.0


def test_decode_high_bit_only():
    assert decode(_bits(0x8000), BOX)[0] == pytest.approx(4 * 32768 / 65535, abs=1e-12)


def test_decode_length_mismatch():
    with pytest.raises(ValueError):
        decode(np.zeros(15), BOX)
    with pytest.raises(ValueError):
        decode(np.zeros(16), Bounds.uniform(0, 4, 2))


@given(st.integers(0, 65534))
def test_decode_monotone(k):
    assert decode(_bits(k), BOX)[0] < decode(_bits(k + 1), BOX)[0]


@given(st.lists(st.floats(0, 4), min_size=1, max_size=9))
def test_encode_round_trip_within_resolution(xs):
    b = Bounds.uniform(0.0, 4.0, len(xs))
    back = decode(encode(xs, b), b)
    assert np.all(np.abs(back - np.array(xs)) <= 0.5 * 4 / 65535 + 1e-12)


def test_crossover_identical_parents():
    a = RngStream(0).bits(64)
    c, d = ga.uniform_crossover(a, a.copy(), RngStream(1))
    np.testing.assert_array_equal(c, a)
    np.testing.assert_array_equal(d, a)


@given(st.integers(0, 2**32))
def test_crossover_takes_each_bit_from_a_parent(seed):
    rng = RngStream(seed)
    a, b = rng.bits(48), rng.bits(48)
    c, d = ga.uniform_crossover(a, b, rng)
    assert np.all((c == a) | (c == b))
    # complementary children: together they hold both parents' bits
    np.testing.assert_array_equal(np.sort(np.stack([c, d]), axis=0), np.sort(np.stack([a, b]), axis=0))


def test_crossover_swap_frequency():
    a, b = np.zeros(100, dtype=np.uint8), np.ones(100, dtype=np.uint8)
    rng = RngStream(3)
    swapped = sum(int(ga.uniform_crossover(a, b, rng)[0].sum()) for _ in range(1000))
    assert abs(swapped / 100_000 - 0.5) < 0.01


def test_crossover_length_mismatch():
    with pytest.raises(ValueError):
        ga.uniform_crossover(np.zeros(4), np.zeros(5), RngStream(0))


def test_binary_tournament_prefers_lower_fitness():
    rng = RngStream(0)
    picks = [ga.binary_tournament([3.0, 1.0, 2.0], rng) for _ in range(3000)]
    counts = np.bincount(picks, minlength=3) / 3000
    # P(best) = 1 - (2/3)^2, P(worst) = (1/3)^2
    assert counts[1] == pytest.approx(5 / 9, abs=0.03)
    assert counts[0] == pytest.approx(1 / 9, abs=0.03)


def test_no_variation_copies_parents_and_keeps_best():
    obj = sphere_objective(3)
    cfg = GaConfig(pop_size=10, pc=0.0, pm=0.0)
    rng, counter = RngStream(5), EvaluationCounter()
    pop = ga.initialize(obj, cfg, rng, counter)
    parents = {m.bits.tobytes() for m in pop}
    best0 = ga.best(pop)[1]
    for _ in range(5):
        pop = ga.ga_generation(pop, obj, cfg, rng, counter)
        assert {m.bits.tobytes() for m in pop} <= parents
        assert ga.best(pop)[1] == best0


def test_generation_counts_pop_minus_elite():
    obj = sphere_objective(9)
    rng, counter = RngStream(1), EvaluationCounter()
    pop = ga.initialize(obj, GaConfig(), rng, counter)
    assert counter.count == 50
    pop = ga.ga_generation(pop, obj, GaConfig(), rng, counter)
    assert counter.count == 99 and len(pop) == 50


def test_elite_best_never_worsens():
    obj = sphere_objective(4)
    rng, counter = RngStream(2), EvaluationCounter()
    pop = ga.initialize(obj, GaConfig(pop_size=20), rng, counter)
    prev = ga.best(pop)[1]
    for _ in range(30):
        pop = ga.ga_generation(pop, obj, GaConfig(pop_size=20), rng, counter)
        assert ga.best(pop)[1] <= prev
        prev = ga.best(pop)[1]


def test_restart_boundary_bits():
    elite = np.zeros(100, dtype=np.uint8)
    at = elite.copy()
    at[:20] = 1  # exactly 20 % differs: not a collapse
    below = elite.copy()
    below[:19] = 1
    assert gene_difference(elite, at) == 0.20
    assert not needs_restart(elite, [below, at])
    assert needs_restart(elite, [below, below])


def test_restart_boundary_genes():
    elite = np.zeros(5 * 16, dtype=np.uint8)
    one_gene = elite.copy()
    one_gene[3] = 1  # one of five parameters differs -> 20 %
    assert gene_difference(elite, one_gene, 16) == 0.20
    assert not needs_restart(elite, [one_gene], bits_per_param=16)
    assert needs_restart(elite, [elite.copy()], bits_per_param=16)
    # the same child looks collapsed when counted bit by bit
    assert needs_restart(elite, [one_gene])


def test_micro_ga_counts_and_elite():
    obj = sphere_objective(9)
    for mode in ("genes", "bits"):
        cfg = MicroGaConfig(difference=mode)
        rng, counter = RngStream(4), EvaluationCounter()
        pop = ga.micro_initialize(obj, cfg, rng, counter)
        assert counter.count == 6
        for g in range(50):
            elite = pop[int(np.argmin([m.fitness for m in pop]))]
            pop = ga.micro_ga_generation(pop, obj, cfg, rng, counter)
            assert counter.count == 6 + 5 * (g + 1)
            assert pop[0] is elite and len(pop) == 6


def test_micro_ga_restarts_on_collapse():
    obj = sphere_objective(2)
    cfg = MicroGaConfig(pc=0.0)
    rng, counter = RngStream(0), EvaluationCounter()
    pop = ga.micro_initialize(obj, cfg, rng, counter)
    clone = [pop[0]] * 6  # a fully converged population
    new = ga.micro_ga_generation(clone, obj, cfg, rng, counter)
    assert any(not np.array_equal(m.bits, pop[0].bits) for m in new[1:])


def test_config_validation():
    with pytest.raises(ValueError):
        GaConfig(pc=1.5)
    with pytest.raises(ValueError):
        MicroGaConfig(difference="hamming")
    with pytest.raises(ValueError):
        MicroGaConfig(members=7)


@pytest.mark.parametrize("name, cfg", [("ga", GaConfig()), ("micro-ga", MicroGaConfig())])
def test_sphere_sanity(calibration, name, cfg):
    c = calibration[name]
    budget = calibration["budget"]
    gens = budget if name == "micro-ga" else budget // 49 + 1
    recs = run_trials(cfg, sphere_objective(9), 20, calibration["seed"], gens,
                      max_evaluations=budget)
    assert np.mean(final_at(recs, budget) < c["target"]) >= c["rate"]
