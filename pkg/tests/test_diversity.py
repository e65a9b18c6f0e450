#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import numpy as np
import pytest

from nas_evo.search.cost import CostTable, genome_costs
from nas_evo.search.diversity import (
    NsdiConfig, Population, average_population_similarity,
    expected_random_aps, max_similarity_to, nsdi_init,
    pairwise_similarity_matrix, random_init, similarity)
from nas_evo.search.space import ArchGenome, SearchSpaceSpec
from nas_evo.utils.exceptions import (
    DimensionError, EmptyPopulationError, InfeasibleConstraintError,
    InsufficientPopulationError)


def _pop(spec, rows):
    return Population(spec, [ArchGenome(spec, row) for row in rows])


def test_similarity_examples():
    spec = SearchSpaceSpec(4, 4)
    a = ArchGenome(spec, [0, 1, 2, 3])
    assert similarity(a, a) == 4
    assert similarity(a, ArchGenome(spec, [1, 2, 3, 0])) == 0
    assert similarity(a, ArchGenome(spec, [0, 1, 3, 2])) == 2
    with pytest.raises(DimensionError):
        similarity(a, ArchGenome(SearchSpaceSpec(3, 4), [0, 1, 2]))


def test_self_similarity_is_num_layers(space_20x4, rng):
    genome = ArchGenome(space_20x4, rng.integers(0, 4, size=20))
    assert similarity(genome, genome) == 20


def test_max_similarity_to():
    spec = SearchSpaceSpec(2, 2)
    g = ArchGenome(spec, [0, 0])
    with pytest.raises(EmptyPopulationError):
        max_similarity_to(_pop(spec, [[0, 0]]), g, exclude_index=0)
    assert max_similarity_to(_pop(spec, [[0, 0], [1, 1]]),
                             ArchGenome(spec, [0, 1])) == 1
    assert max_similarity_to(_pop(spec, [[0, 0], [0, 1]]), g) == 2
    assert max_similarity_to(_pop(spec, [[0, 0], [0, 1]]), g,
                             exclude_index=0) == 1


def test_aps_examples(space_20x4):
    assert average_population_similarity(
        _pop(space_20x4, [[1] * 20, [1] * 20])) == 20.
    spec = SearchSpaceSpec(2, 2)
    assert average_population_similarity(_pop(spec, [[0, 1], [1, 0]])) == 0.
    spec = SearchSpaceSpec(3, 3)
    aps = average_population_similarity(
        _pop(spec, [[0, 0, 0], [0, 0, 1], [2, 2, 2]]))
    assert aps == pytest.approx(4. / 3.)


def test_aps_needs_two_members(space_20x4):
    with pytest.raises(InsufficientPopulationError):
        average_population_similarity(_pop(space_20x4, [[0] * 20]))


def test_pairwise_matrix(space_20x4, rng):
    pop = Population.from_array(space_20x4, rng.integers(0, 4, size=(8, 20)))
    sims = pairwise_similarity_matrix(pop)
    assert sims.shape == (8, 8)
    assert np.all(np.diag(sims) == 20)
    np.testing.assert_array_equal(sims, sims.T)
    assert sims[2, 5] == similarity(pop[2], pop[5])


def test_expected_random_aps(space_20x4):
    assert expected_random_aps(space_20x4, 50) == pytest.approx(9.59,
                                                                abs=0.05)
    # two layers, two choices: the other genome agrees on 0, 1 or 2 layers
    # with probabilities 1/4, 1/2, 1/4
    assert expected_random_aps(SearchSpaceSpec(2, 2), 2) == pytest.approx(1.)


def test_random_init_sizes(space_20x4):
    pop = random_init(space_20x4, 50, rng=0)
    assert len(pop) == 50
    single = random_init(space_20x4, 1, rng=0)
    assert len(single) == 1
    with pytest.raises(ValueError):
        random_init(space_20x4, 0, rng=0)


def test_random_init_vacuous_bound(space_20x4):
    table = CostTable(np.zeros((20, 4)))
    pop = random_init(space_20x4, 30, cost_model=table, cost_bound=0., rng=1)
    assert len(pop) == 30


def test_random_init_respects_bound(space_20x4, cost_table):
    pop = random_init(space_20x4, 40, cost_model=cost_table,
                      cost_bound=1650., rng=2)
    assert np.all(genome_costs(cost_table, pop.as_array()) <= 1650.)


def test_random_init_deterministic(space_20x4):
    a = random_init(space_20x4, 20, rng=11).as_array()
    b = random_init(space_20x4, 20, rng=11).as_array()
    np.testing.assert_array_equal(a, b)


def test_nsdi_full_threshold_is_random_init(space_20x4):
    cfg = NsdiConfig(population_size=25, aps_max=20, timeout=10)
    pop, stats = nsdi_init(space_20x4, cfg, rng=4)
    np.testing.assert_array_equal(
        pop.as_array(), random_init(space_20x4, 25, rng=4).as_array())
    assert stats.threshold_bumps == 0
    assert stats.samples_drawn == 25


def test_nsdi_zero_threshold_tiny_space():
    spec = SearchSpaceSpec(2, 2)
    cfg = NsdiConfig(population_size=2, aps_max=0, timeout=1000)
    for seed in range(10):
        pop, stats = nsdi_init(spec, cfg, rng=seed)
        a, b = pop.members
        assert similarity(a, b) == 0
        assert average_population_similarity(pop) == 0.
        assert stats.final_threshold == 0


def test_nsdi_acceptance_invariant(space_20x4):
    cfg = NsdiConfig(population_size=30, aps_max=6, timeout=3000)
    pop, stats = nsdi_init(space_20x4, cfg, rng=8)
    sims = pairwise_similarity_matrix(pop)
    for i in range(1, len(pop)):
        assert sims[i, :i].max() <= stats.final_threshold
    assert stats.final_threshold >= cfg.aps_max
    assert stats.final_threshold - cfg.aps_max == stats.threshold_bumps
    assert stats.accepted == 30
    assert stats.samples_drawn >= 30


def test_nsdi_threshold_capped_by_num_layers():
    # three genomes cannot all be mutually disjoint with two choices
    spec = SearchSpaceSpec(3, 2)
    cfg = NsdiConfig(population_size=3, aps_max=0, timeout=5)
    pop, stats = nsdi_init(spec, cfg, rng=0)
    assert len(pop) == 3
    assert 1 <= stats.final_threshold <= 3


def test_nsdi_rejects_threshold_above_num_layers():
    with pytest.raises(ValueError):
        nsdi_init(SearchSpaceSpec(4, 2), NsdiConfig(5, aps_max=5), rng=0)


@pytest.mark.slow
def test_nsdi_lower_threshold_lowers_aps(space_20x4):
    means = []
    for aps_max in (4, 6, 8):
        cfg = NsdiConfig(population_size=20, aps_max=aps_max, timeout=50000)
        values = []
        for seed in range(20):
            pop, stats = nsdi_init(space_20x4, cfg, rng=seed)
            aps = average_population_similarity(pop)
            assert aps <= stats.final_threshold
            values.append(aps)
        means.append(np.mean(values))
    assert means[0] < means[1] < means[2]


@pytest.mark.slow
def test_infeasible_bound_raises(space_20x4):
    table = CostTable(np.full((20, 4), 10.))
    with pytest.raises(InfeasibleConstraintError) as excinfo:
        random_init(space_20x4, 5, cost_model=table, cost_bound=0., rng=0)
    assert excinfo.value.samples_drawn == 10**7
    cfg = NsdiConfig(population_size=5, aps_max=2, timeout=100,
                     cost_bound=0.)
    with pytest.raises(InfeasibleConstraintError):
        nsdi_init(space_20x4, cfg, cost_model=table, rng=0)


def test_nsdi_config_replace():
    cfg = NsdiConfig(10, aps_max=3, timeout=7)
    other = cfg.replace(population_size=20)
    assert other.population_size == 20
    assert other.aps_max == 3 and other.timeout == 7
    assert cfg != other
    with pytest.raises(ValueError):
        NsdiConfig(10, timeout=0)
