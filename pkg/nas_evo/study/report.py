#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Study reports: per trial rows, per strategy aggregates and the
validation/test correlation, assembled from trial records.
'''
from __future__ import print_function, division

import csv
import glob
import json
import os
from collections import namedtuple

import numpy as np

from nas_evo.fitness.statistics import (
    pearson, std_standard_error, summary_statistics)
from nas_evo.search.evolve import TrialRecord
from nas_evo.utils.exceptions import DegenerateDataError
from nas_evo.utils.logger import log_info, log_warn

STATUS_OK = 'ok'
STATUS_FAILED = 'failed'

TRIALS_DIR = 'trials'
STUDY_CSV = 'study.csv'
GENERATIONS_CSV = 'generations.csv'
SUMMARY_JSON = 'summary.json'

STUDY_COLUMNS = ['strategy', 'seed', 'status', 'best_val', 'best_test',
                 'best_cost_mflops', 'evaluated_count', 'init_aps',
                 'samples_drawn', 'final_threshold', 'threshold_bumps']
GENERATION_COLUMNS = ['strategy', 'seed', 'generation', 'best_val',
                      'mean_val']

# a trial's outcome: record is None for failed trials
TrialOutcome = namedtuple('TrialOutcome',
                          ['strategy', 'seed', 'record', 'error'])

DominanceResult = namedtuple('DominanceResult',
                             ['mean_holds', 'std_holds', 'mean_difference',
                              'std_difference', 'std_margin'])

STD_MARGIN_STANDARD_ERROR = 'standard_error'


def trial_file_name(strategy, seed):
    return '{}_seed{}.json'.format(strategy, seed)


class StudyReport(object):

    """Results of a study.

    Parameters
    ----------
    outcomes : list of TrialOutcome
        One entry per (strategy, seed). Order does not matter, rows are
        sorted by strategy and seed.
    """

    def __init__(self, outcomes):
        self.outcomes = sorted(outcomes, key=lambda o: (o.strategy, o.seed))
        self.rows = [_study_row(o) for o in self.outcomes]
        self.generation_rows = [
            {'strategy': o.strategy, 'seed': o.seed, 'generation': g,
             'best_val': best, 'mean_val': mean}
            for o in self.outcomes if o.record is not None
            for g, best, mean in o.record.per_generation]
        self.aggregates = self._aggregate()
        self.correlation = self._correlation()
        self.failures = [{'strategy': o.strategy, 'seed': o.seed,
                          'error': o.error}
                         for o in self.outcomes if o.record is None]

    @property
    def strategies(self):
        return sorted(set(o.strategy for o in self.outcomes))

    def values(self, strategy, column='best_val'):
        """Column values of the successful trials of a strategy."""
        return [row[column] for row in self.rows
                if row['strategy'] == strategy and row['status'] == STATUS_OK
                and row[column] is not None]

    def to_summary(self):
        return {'aggregates': self.aggregates,
                'correlation': self.correlation,
                'failures': self.failures,
                'trials': self.rows}

    def write(self, output_dir):
        '''Write study.csv, generations.csv and summary.json.

        Returns
        -------
        dict
            Paths of the written files.
        '''
        paths = {'study': os.path.join(output_dir, STUDY_CSV),
                 'generations': os.path.join(output_dir, GENERATIONS_CSV),
                 'summary': os.path.join(output_dir, SUMMARY_JSON)}
        write_csv(paths['study'], STUDY_COLUMNS, self.rows)
        write_csv(paths['generations'], GENERATION_COLUMNS,
                  self.generation_rows)
        with open(paths['summary'], 'w') as open_file:
            open_file.write(json.dumps(self.to_summary(), sort_keys=True,
                                       indent=2))
            open_file.write('\n')
        return paths

    @classmethod
    def load(cls, output_dir):
        '''Rebuild the report from the trial files of a study.

        If a summary.json exists its aggregates must agree with the
        recomputed ones.

        Raises
        ------
        ValueError
            If the stored aggregates differ from the recomputation.
        '''
        report = cls(harvest_trial_records(output_dir))
        summary_path = os.path.join(output_dir, SUMMARY_JSON)
        if os.path.exists(summary_path):
            with open(summary_path, 'r') as open_file:
                stored = json.load(open_file)
            mismatch = _first_mismatch(stored.get('aggregates', {}),
                                       report.aggregates)
            if mismatch is not None:
                raise ValueError(
                    '{}: aggregates do not match the trial files ({})'.format(
                        summary_path, mismatch))
        return report

    def _aggregate(self):
        aggregates = {}
        for strategy in self.strategies:
            entry = {'n_ok': len(self.values(strategy, 'seed')),
                     'n_failed': sum(1 for o in self.outcomes
                                     if o.strategy == strategy and
                                     o.record is None)}
            for column, prefix in (('best_val', 'val'), ('best_test', 'test'),
                                   ('init_aps', 'init_aps')):
                values = self.values(strategy, column)
                if values:
                    mean, std = summary_statistics(values)
                else:
                    mean, std = None, None
                entry[prefix + '_mean'] = mean
                entry[prefix + '_std'] = std
            aggregates[strategy] = entry
        return aggregates

    def _correlation(self):
        correlation = {}
        for strategy in self.strategies:
            reports = [r for o in self.outcomes
                       if o.strategy == strategy and o.record is not None
                       for _, r in o.record.history]
            value = None
            if len(reports) >= 2:
                try:
                    value = pearson([r.val_score for r in reports],
                                    [r.test_score for r in reports])
                except DegenerateDataError:
                    pass
            correlation[strategy] = value
        return correlation


def harvest_trial_records(output_dir):
    '''Load every trial file of a study.

    Files that cannot be read or parsed are logged and skipped.

    Parameters
    ----------
    output_dir : str
        Study output directory containing ``trials/``.

    Returns
    -------
    list of TrialOutcome
        Sorted by file name.
    '''
    paths = sorted(glob.glob(os.path.join(output_dir, TRIALS_DIR, '*.json')))
    outcomes = []
    for path in paths:
        try:
            with open(path, 'r') as open_file:
                data = json.load(open_file)
            if data.get('status') == STATUS_FAILED:
                outcome = TrialOutcome(data['strategy'], data['seed'], None,
                                       data.get('error'))
            else:
                record = TrialRecord.from_dict(data)
                outcome = TrialOutcome(record.strategy, record.seed, record,
                                       None)
        except (IOError, OSError, ValueError, KeyError, TypeError) as e:
            log_warn('Skipping unreadable trial file {}: {}'.format(path, e),
                     unit='report')
            continue
        log_info('Found trial {} seed {} in {}'.format(
            outcome.strategy, outcome.seed, path), unit='report')
        outcomes.append(outcome)
    return outcomes


def check_dominance(report, better, worse, mean_margin=0., std_margin=None,
                    column='best_val'):
    '''Compare two strategies of a report.

    Parameters
    ----------
    report : StudyReport
        The study.
    better, worse : str
        Strategy names.
    mean_margin : float, optional
        The mean of better may fall below the mean of worse by this much.
    std_margin : float or str, optional
        If given, the std of better may exceed the std of worse by this
        much. STD_MARGIN_STANDARD_ERROR allows the combined standard error
        of the two std estimates. Not checked if None.
    column : str, optional
        Study column to compare.

    Returns
    -------
    DominanceResult
        mean_difference and std_difference are better minus worse,
        std_margin is the margin applied.
    '''
    better_values = report.values(better, column)
    worse_values = report.values(worse, column)
    if not better_values or not worse_values:
        raise ValueError('No successful trials for {!r} or {!r}'.format(
            better, worse))
    better_mean, better_std = summary_statistics(better_values)
    worse_mean, worse_std = summary_statistics(worse_values)
    mean_difference = better_mean - worse_mean
    std_difference = better_std - worse_std
    if std_margin == STD_MARGIN_STANDARD_ERROR:
        std_margin = float(np.hypot(std_standard_error(better_values),
                                    std_standard_error(worse_values)))
    elif std_margin is not None:
        std_margin = float(std_margin)
    std_holds = None
    if std_margin is not None:
        std_holds = std_difference <= std_margin
    return DominanceResult(mean_holds=mean_difference >= -mean_margin,
                           std_holds=std_holds,
                           mean_difference=mean_difference,
                           std_difference=std_difference,
                           std_margin=std_margin)


def write_csv(path, fieldnames, rows):
    """Write dict rows, floats in repr form and None as empty cells."""
    with open(path, 'w') as open_file:
        writer = csv.DictWriter(open_file, fieldnames=fieldnames,
                                extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(dict((k, _csv_value(row.get(k)))
                                 for k in fieldnames))


def _csv_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return value


def _study_row(outcome):
    row = dict((column, None) for column in STUDY_COLUMNS)
    row['strategy'] = outcome.strategy
    row['seed'] = outcome.seed
    record = outcome.record
    if record is None:
        row['status'] = STATUS_FAILED
        return row
    row['status'] = STATUS_OK
    row['evaluated_count'] = record.evaluated_count
    row['init_aps'] = record.init_aps
    if record.best is not None:
        _, best = record.best
        row['best_val'] = best.val_score
        row['best_test'] = best.test_score
        row['best_cost_mflops'] = best.cost_mflops
    if record.init_stats is not None:
        row['samples_drawn'] = record.init_stats.samples_drawn
        row['final_threshold'] = record.init_stats.final_threshold
        row['threshold_bumps'] = record.init_stats.threshold_bumps
    return row


def _first_mismatch(stored, computed):
    if sorted(stored) != sorted(computed):
        return 'strategies {!r} vs {!r}'.format(sorted(stored),
                                                sorted(computed))
    for strategy in sorted(computed):
        for key in sorted(computed[strategy]):
            a = stored[strategy].get(key)
            b = computed[strategy][key]
            if a is None or b is None:
                if a is not b:
                    return '{}.{}'.format(strategy, key)
            elif not np.isclose(a, b, rtol=1e-12, atol=1e-12):
                return '{}.{}: {!r} vs {!r}'.format(strategy, key, a, b)
    return None
