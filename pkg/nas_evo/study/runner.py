#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Runs seeded trials of an experiment and writes their outputs.

Every (strategy, seed) pair is an independent trial with its own random
generator, so results do not depend on the number of worker processes.
'''
from __future__ import print_function, division

import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from nas_evo.fitness.oracles import (
    CORRELATION_REGIMES, CorrelatedOracle, TabularBenchmark)
from nas_evo.fitness.statistics import pearson
from nas_evo.search.diversity import (
    average_population_similarity, nsdi_init, random_init)
from nas_evo.search.evolve import (
    INIT_RANDOM, TrialRecord, ea_search, random_search)
from nas_evo.search.space import genome_to_id, id_to_genome
from nas_evo.study.report import (
    STATUS_FAILED, TRIALS_DIR, StudyReport, TrialOutcome, trial_file_name,
    write_csv)
from nas_evo.utils.exceptions import NasEvoError
from nas_evo.utils.logger import log_error, log_info

APS_COLUMNS = ['method', 'seed', 'aps', 'samples_drawn', 'final_threshold']
CORRELATION_COLUMNS = ['regime', 'genome_id', 'val_score', 'test_score']
APS_CSV = 'aps.csv'
CORRELATION_CSV = 'correlation.csv'
DEFAULT_CORRELATION_SAMPLES = 1000


def run_trial(cfg, strategy, seed):
    '''Run one (strategy, seed) pair.

    Parameters
    ----------
    cfg : ExperimentConfig
        Experiment.
    strategy : StrategyConfig
        Strategy to run.
    seed : int
        Seed of the trial's random generator.

    Returns
    -------
    TrialRecord

    Raises
    ------
    InfeasibleConstraintError
        If the cost bound cannot be met.
    '''
    log_info('Starting {} seed {}'.format(strategy.name, seed), unit='runner')
    rng = np.random.default_rng(seed)
    settings = strategy.settings
    if strategy.kind == 'random':
        record = random_search(cfg.space, settings.budget, cfg.evaluator,
                               cost_model=cfg.cost_table,
                               cost_bound=settings.cost_bound,
                               rng=rng,
                               topk_report=settings.topk_report,
                               report_every=settings.report_every,
                               strategy=strategy.name)
    elif strategy.kind == 'ea':
        record = ea_search(cfg.space, settings, cfg.evaluator,
                           cost_model=cfg.cost_table, rng=rng,
                           strategy=strategy.name)
    else:
        pop, stats = _initialize(cfg, settings, rng)
        record = TrialRecord(seed=seed, per_generation=[], evaluated_count=0,
                             topk=[], init_stats=stats,
                             strategy=strategy.name,
                             init_aps=average_population_similarity(pop),
                             space=cfg.space)
    record.seed = seed
    return record


def run_study(cfg, parallel=None):
    '''Run every (strategy, seed) pair of an experiment.

    Writes ``trials/<strategy>_seed<seed>.json`` per trial, failures
    included, plus study.csv, generations.csv and summary.json into
    cfg.output_dir. A failing trial does not abort the study.

    Parameters
    ----------
    cfg : ExperimentConfig
        Experiment.
    parallel : int, optional
        Number of worker processes. Defaults to the number of CPUs, 1 runs
        everything in this process.

    Returns
    -------
    StudyReport
    '''
    tasks = [(strategy.name, seed) for strategy in cfg.strategies
             for seed in cfg.seeds]
    results = _map_trials(_trial_task, cfg, tasks, parallel)

    trials_dir = os.path.join(cfg.output_dir, TRIALS_DIR)
    _makedirs(trials_dir)
    outcomes = []
    for (name, seed), (record_data, error) in zip(tasks, results):
        if error is None:
            record = TrialRecord.from_dict(record_data, spec=cfg.space)
            text = record.to_json()
        else:
            record = None
            text = json.dumps({'strategy': name, 'seed': seed,
                               'status': STATUS_FAILED, 'error': error},
                              sort_keys=True, indent=2)
        with open(os.path.join(trials_dir, trial_file_name(name, seed)),
                  'w') as open_file:
            open_file.write(text)
            open_file.write('\n')
        outcomes.append(TrialOutcome(name, seed, record, error))

    report = StudyReport(outcomes)
    report.write(cfg.output_dir)
    log_info('Study finished: {} trials, {} failed'.format(
        len(outcomes), len(report.failures)), unit='runner')
    return report


def aps_study(cfg, parallel=None):
    '''Initial population similarity per (method, seed).

    Every strategy with an initializer ('init' and 'ea') takes part, random
    search strategies are skipped. The table is written to aps.csv.

    Returns
    -------
    list of dict
        Rows with the columns of APS_COLUMNS. A failed initialization has
        an empty aps.
    '''
    names = [s.name for s in cfg.strategies if s.kind != 'random']
    if not names:
        raise ValueError('No strategy with an initializer in the config')
    tasks = [(name, seed) for name in names for seed in cfg.seeds]
    results = _map_trials(_aps_task, cfg, tasks, parallel)
    rows = [dict(zip(APS_COLUMNS, (name, seed) + values))
            for (name, seed), values in zip(tasks, results)]
    _makedirs(cfg.output_dir)
    write_csv(os.path.join(cfg.output_dir, APS_CSV), APS_COLUMNS, rows)
    return rows


def correlation_study(cfg, num_samples=DEFAULT_CORRELATION_SAMPLES, seed=0,
                      regimes=None):
    '''Validation/test correlation of the named regimes.

    Draws num_samples uniform genomes and scores them with a
    CorrelatedOracle per regime on top of the configured base evaluator.
    A tabular base evaluator is sampled from its records instead. Writes
    correlation.csv with one row per (regime, genome).

    Parameters
    ----------
    cfg : ExperimentConfig
        Experiment with an evaluator. A correlated evaluator contributes its
        base.
    num_samples : int, optional
        Genomes per regime.
    seed : int, optional
        Seed of the genome sample and of the oracle noise.
    regimes : list of str, optional
        Regime names, all of CORRELATION_REGIMES by default.

    Returns
    -------
    dict
        Measured Pearson correlation per regime.
    '''
    if cfg.evaluator is None:
        raise ValueError('The correlation study needs an evaluator')
    if num_samples < 2:
        raise ValueError('num_samples must be >= 2, got {!r}'.format(
            num_samples))
    base = cfg.evaluator
    if isinstance(base, CorrelatedOracle):
        base = base.base
    if regimes is None:
        regimes = sorted(CORRELATION_REGIMES)

    rng = np.random.default_rng(seed)
    if isinstance(base, TabularBenchmark):
        ids = rng.choice(base.genome_ids, size=num_samples)
        genomes = [id_to_genome(cfg.space, int(i)) for i in ids]
    else:
        genomes = random_init(cfg.space, num_samples, rng=rng).members

    rows = []
    measured = {}
    for regime in regimes:
        oracle = CorrelatedOracle.from_regime(base, regime, oracle_seed=seed)
        reports = [oracle.evaluate(g) for g in genomes]
        measured[regime] = pearson([r.val_score for r in reports],
                                   [r.test_score for r in reports])
        rows.extend({'regime': regime,
                     'genome_id': genome_to_id(cfg.space, g),
                     'val_score': r.val_score,
                     'test_score': r.test_score}
                    for g, r in zip(genomes, reports))
        log_info('Regime {}: pearson {:.4f}'.format(regime, measured[regime]),
                 unit='runner')
    _makedirs(cfg.output_dir)
    write_csv(os.path.join(cfg.output_dir, CORRELATION_CSV),
              CORRELATION_COLUMNS, rows)
    return measured


def _initialize(cfg, settings, rng):
    if settings.init_kind == INIT_RANDOM:
        size = getattr(settings, 'population_size', None) or \
            settings.init_population
        return random_init(cfg.space, size, cfg.cost_table,
                           settings.cost_bound, rng, return_stats=True)
    return nsdi_init(cfg.space, settings.init_method, cfg.cost_table, rng)


def _trial_task(cfg, name, seed):
    """Worker entry point: (record dict, None) or (None, error message)."""
    try:
        record = run_trial(cfg, cfg.strategy(name), seed)
    except NasEvoError as e:
        log_error('{} seed {} failed: {}'.format(name, seed, e),
                  unit='runner')
        return None, str(e)
    return record.to_dict(), None


def _aps_task(cfg, name, seed):
    rng = np.random.default_rng(seed)
    try:
        pop, stats = _initialize(cfg, cfg.strategy(name).settings, rng)
    except NasEvoError as e:
        log_error('{} seed {} failed: {}'.format(name, seed, e),
                  unit='runner')
        samples = getattr(e, 'samples_drawn', None)
        return None, samples, None
    return (average_population_similarity(pop), stats.samples_drawn,
            stats.final_threshold)


def _map_trials(task, cfg, tasks, parallel):
    if parallel is None:
        parallel = os.cpu_count() or 1
    if parallel < 1:
        raise ValueError('parallel must be >= 1, got {!r}'.format(parallel))
    if parallel == 1 or len(tasks) == 1:
        return [task(cfg, name, seed) for name, seed in tasks]
    with ProcessPoolExecutor(max_workers=min(parallel, len(tasks))) as pool:
        futures = [pool.submit(task, cfg, name, seed) for name, seed in tasks]
        return [future.result() for future in futures]


def _makedirs(path):
    if not os.path.isdir(path):
        os.makedirs(path)
