#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import numpy as np
import pytest

from nas_evo.fitness.base_evaluator import evaluate, evaluate_many
from nas_evo.fitness.oracles import (
    CORRELATION_REGIMES, CorrelatedOracle, SyntheticLandscape,
    TabularBenchmark, build_evaluator, export_tabular, get_correlation_regime)
from nas_evo.search.cost import CostTable, default_cost_table
from nas_evo.search.space import (
    ArchGenome, SearchSpaceSpec, enumerate_genomes, genome_to_id,
    id_to_genome)
from nas_evo.utils.exceptions import (
    ConfigError, CostMismatchError, DegenerateDataError, UnknownGenomeError)


def test_flat_landscape_scores_zero(space_20x4, rng):
    flat = SyntheticLandscape(space_20x4, np.zeros((20, 4)),
                              np.zeros((19, 4, 4)))
    for _ in range(20):
        report = evaluate(flat, ArchGenome(space_20x4,
                                           rng.integers(0, 4, size=20)))
        assert report.val_score == 0.
        assert report.test_score == 0.
        assert report.cost_mflops == 0.


def test_landscape_is_deterministic(space_20x4, cost_table, rng):
    a = SyntheticLandscape.from_seed(space_20x4, 5, noise_std=0.5,
                                     cost_table=cost_table)
    b = SyntheticLandscape.from_seed(space_20x4, 5, noise_std=0.5,
                                     cost_table=cost_table)
    genomes = [ArchGenome(space_20x4, rng.integers(0, 4, size=20))
               for _ in range(10)]
    assert evaluate_many(a, genomes) == evaluate_many(b, genomes)
    assert evaluate_many(a, genomes) == evaluate_many(a, genomes)
    report = a.evaluate(genomes[0])
    assert report.val_score != report.test_score
    assert report.cost_mflops > 0


def test_landscape_moments_match_enumeration(space_4x3):
    landscape = SyntheticLandscape.from_seed(space_4x3, 21, unary_scale=0.3,
                                             pairwise_scale=1.2, offset=5.)
    scores = np.array([landscape.evaluate(g).test_score
                       for g in enumerate_genomes(space_4x3)])
    mean, std = landscape.score_moments()
    assert mean == pytest.approx(scores.mean(), abs=1e-12)
    assert std == pytest.approx(scores.std(), abs=1e-12)


def test_landscape_accepts_plain_lists(space_4x3):
    landscape = SyntheticLandscape.from_seed(space_4x3, 1)
    assert landscape.evaluate([0, 1, 2, 0]) == landscape.evaluate(
        ArchGenome(space_4x3, [0, 1, 2, 0]))


def test_correlated_oracle_perfect_correlation_keeps_order(landscape, rng):
    oracle = CorrelatedOracle(landscape, 1.)
    genomes = [ArchGenome(landscape.spec, rng.integers(0, 4, size=20))
               for _ in range(200)]
    reports = evaluate_many(oracle, genomes)
    val = np.array([r.val_score for r in reports])
    test = np.array([r.test_score for r in reports])
    np.testing.assert_array_equal(np.argsort(val), np.argsort(test))


def test_correlated_oracle_passes_test_scores_through(landscape, rng):
    oracle = CorrelatedOracle.from_regime(landscape, 'baseline',
                                          oracle_seed=3)
    assert oracle.target_pearson == CORRELATION_REGIMES['baseline']
    genome = ArchGenome(landscape.spec, rng.integers(0, 4, size=20))
    base_report = landscape.evaluate(genome)
    report = oracle.evaluate(genome)
    assert report.test_score == base_report.test_score
    assert report.cost_mflops == base_report.cost_mflops
    assert oracle.evaluate(genome) == report


def test_correlated_oracle_validation(landscape, space_20x4):
    with pytest.raises(ValueError):
        CorrelatedOracle(landscape, 1.5)
    flat = SyntheticLandscape(space_20x4, np.zeros((20, 4)),
                              np.zeros((19, 4, 4)))
    with pytest.raises(DegenerateDataError):
        CorrelatedOracle(flat, 0.5)


def test_regimes():
    assert get_correlation_regime('domain_adapted') == 0.6985
    assert get_correlation_regime('domain_adapted_finetuned') == 0.7096
    with pytest.raises(ValueError):
        get_correlation_regime('supernet')


def test_tabular_round_trip(tmp_path, space_4x3):
    landscape = SyntheticLandscape.from_seed(space_4x3, 2, noise_std=0.1)
    genomes = [id_to_genome(space_4x3, i) for i in (0, 5, 5, 80)]
    path = str(tmp_path / 'bench.csv')
    export_tabular(path, landscape, genomes)
    bench = TabularBenchmark.from_csv(space_4x3, path)
    assert len(bench) == 3
    assert bench.genome_ids == [0, 5, 80]
    for genome in genomes:
        assert bench.evaluate(genome) == landscape.evaluate(genome)
    with pytest.raises(UnknownGenomeError):
        bench.evaluate(id_to_genome(space_4x3, 1))


def test_tabular_rejects_bad_files(tmp_path, space_4x3):
    path = tmp_path / 'bad.csv'
    path.write_text(u'id,val,test,cost\n0,1,1,1\n')
    with pytest.raises(ValueError):
        TabularBenchmark.from_csv(space_4x3, str(path))
    path.write_text(u'genome_id,val_score,test_score,cost_mflops\n'
                    u'0,1,1,1\n0,2,2,2\n')
    with pytest.raises(ValueError):
        TabularBenchmark.from_csv(space_4x3, str(path))
    path.write_text(u'genome_id,val_score,test_score,cost_mflops\n'
                    u'81,1,1,1\n')
    with pytest.raises(ValueError):
        TabularBenchmark.from_csv(space_4x3, str(path))


def test_tabular_moments(space_4x3):
    bench = TabularBenchmark(space_4x3, {0: (1., 2., 0.), 1: (1., 4., 0.)})
    assert bench.score_moments() == (3., 1.)


def test_build_evaluator(space_20x4, cost_table):
    evaluator = build_evaluator(
        space_20x4, {'kind': 'correlated', 'regime': 'baseline',
                     'base': {'kind': 'landscape', 'seed': 1}}, cost_table)
    assert isinstance(evaluator, CorrelatedOracle)
    assert isinstance(evaluator.base, SyntheticLandscape)

    with pytest.raises(ConfigError) as excinfo:
        build_evaluator(space_20x4, {'kind': 'supernet'})
    assert excinfo.value.field == 'evaluator.kind'
    with pytest.raises(ConfigError) as excinfo:
        build_evaluator(space_20x4, {'kind': 'correlated',
                                     'target_pearson': 0.5,
                                     'base': {'kind': 'landscape',
                                              'sigma': 1}})
    assert excinfo.value.field == 'evaluator.base'
    with pytest.raises(ConfigError):
        build_evaluator(space_20x4, {'kind': 'correlated',
                                     'target_pearson': 0.5,
                                     'regime': 'baseline',
                                     'base': {'kind': 'landscape'}})


def test_describe(landscape):
    oracle = CorrelatedOracle(landscape, 0.7, oracle_seed=4)
    description = oracle.describe()
    assert description['kind'] == 'correlated'
    assert description['base']['kind'] == 'landscape'
    assert SearchSpaceSpec.from_dict(landscape.spec.to_dict()) == \
        landscape.spec


def _tabular_with_first_layer_costs(spec):
    records = {}
    for genome in enumerate_genomes(spec):
        score = float(sum(genome))
        records[genome_to_id(spec, genome)] = (score, score, 100. * genome[0])
    return TabularBenchmark(spec, records)


def test_tabular_costs_must_match_bound_table(space_4x3):
    bench = _tabular_with_first_layer_costs(space_4x3)
    with pytest.raises(CostMismatchError) as excinfo:
        bench.check_cost_model(CostTable(np.zeros((4, 3))))
    assert 'genome id 1 ' in str(excinfo.value)
    matching = np.zeros((4, 3))
    matching[0] = [0., 100., 200.]
    bench.check_cost_model(CostTable(matching))
    oracle = CorrelatedOracle(bench, 0.5)
    with pytest.raises(CostMismatchError):
        oracle.check_cost_model(CostTable(np.zeros((4, 3))))


def test_landscape_cost_table_must_match_bound_table(space_20x4):
    table = default_cost_table()
    bare = SyntheticLandscape.from_seed(space_20x4, 1)
    with pytest.raises(CostMismatchError):
        bare.check_cost_model(table)
    landscape = SyntheticLandscape.from_seed(space_20x4, 1,
                                             cost_table=table)
    landscape.check_cost_model(default_cost_table())
    with pytest.raises(CostMismatchError):
        landscape.check_cost_model(CostTable(table.per_layer_choice_cost,
                                             base_cost=0.))
