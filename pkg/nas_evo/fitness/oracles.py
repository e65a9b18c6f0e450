#!/usr/bin/env python
# -*- coding: utf-8 -*
''' Fitness oracles standing in for supernet based scoring
'''
from __future__ import print_function, division

import csv
import os

import numpy as np

from nas_evo.fitness.base_evaluator import (
    EvaluatorBase, FitnessReport, NOISE_STREAM_CORRELATED,
    NOISE_STREAM_LANDSCAPE, per_genome_normal)
from nas_evo.search.cost import genome_costs
from nas_evo.search.space import genome_to_id, id_to_genome
from nas_evo.utils.exceptions import (
    ConfigError, CostMismatchError, DegenerateDataError, DimensionError,
    GenomeRangeError, UnknownGenomeError)

TABULAR_HEADER = ['genome_id', 'val_score', 'test_score', 'cost_mflops']


class SyntheticLandscape(EvaluatorBase):

    """Chain-structured fitness landscape.

    The true score of a genome g is

        sum_k unary[k, g_k] + sum_k pair[k, g_k, g_{k+1}]

    and is reported as test score. The validation score adds optional
    per-genome Gaussian noise.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space.
    unary_utilities : array-like, shape=(N, M)
        Per-layer utilities.
    pairwise_utilities : array-like, shape=(N - 1, M, M)
        Utilities coupling adjacent layers.
    noise_std : float, optional
        Standard deviation of the validation noise.
    noise_seed : int, optional
        Seed of the validation noise.
    cost_table : CostTable, optional
        Source of ``cost_mflops``.
    """

    kind = 'landscape'

    def __init__(self, spec, unary_utilities, pairwise_utilities,
                 noise_std=0., noise_seed=0, cost_table=None):
        super(SyntheticLandscape, self).__init__(spec, cost_table)
        unary = np.array(unary_utilities, dtype=float)
        pair = np.array(pairwise_utilities, dtype=float)
        n_layers, n_choices = spec.num_layers, spec.num_choices
        if unary.shape != (n_layers, n_choices):
            raise DimensionError(
                'Unary utilities have shape {}, expected {}'.format(
                    unary.shape, (n_layers, n_choices)))
        if pair.size == 0:
            pair = pair.reshape(n_layers - 1, n_choices, n_choices)
        if pair.shape != (n_layers - 1, n_choices, n_choices):
            raise DimensionError(
                'Pairwise utilities have shape {}, expected {}'.format(
                    pair.shape, (n_layers - 1, n_choices, n_choices)))
        if not (np.isfinite(unary).all() and np.isfinite(pair).all()):
            raise ValueError('Utilities must be finite')
        noise_std = float(noise_std)
        if noise_std < 0:
            raise ValueError('noise_std must be >= 0, got {!r}'.format(
                noise_std))
        if int(noise_seed) < 0:
            raise ValueError('noise_seed must be >= 0, got {!r}'.format(
                noise_seed))
        unary.flags.writeable = False
        pair.flags.writeable = False
        self._unary = unary
        self._pair = pair
        self._noise_std = noise_std
        self._noise_seed = int(noise_seed)
        self._layers = np.arange(n_layers)
        self._moments = None

    @classmethod
    def from_seed(cls, spec, seed, unary_scale=0.25, pairwise_scale=1.,
                  noise_std=0., offset=0., cost_table=None):
        '''Landscape with Gaussian utilities drawn from a seed.

        Parameters
        ----------
        spec : SearchSpaceSpec
            Search space.
        seed : int
            Seed of the utilities and of the validation noise.
        unary_scale : float, optional
            Standard deviation of the unary utilities.
        pairwise_scale : float, optional
            Standard deviation of the pairwise utilities. A landscape is
            rugged when this dominates unary_scale.
        noise_std : float, optional
            Validation noise.
        offset : float, optional
            Added to every genome's score, spread over the unary table.
        cost_table : CostTable, optional
            Source of ``cost_mflops``.

        Returns
        -------
        SyntheticLandscape
        '''
        rng = np.random.default_rng(seed)
        n_layers, n_choices = spec.num_layers, spec.num_choices
        unary = rng.normal(0., unary_scale, size=(n_layers, n_choices))
        pair = rng.normal(0., pairwise_scale,
                          size=(n_layers - 1, n_choices, n_choices))
        unary += float(offset) / n_layers
        return cls(spec, unary, pair, noise_std=noise_std, noise_seed=seed,
                   cost_table=cost_table)

    @property
    def unary_utilities(self):
        return self._unary

    @property
    def pairwise_utilities(self):
        return self._pair

    @property
    def noise_std(self):
        return self._noise_std

    def true_scores(self, choice_matrix):
        """Vectorized true score of a (n, N) choice matrix."""
        choice_matrix = np.asarray(choice_matrix, dtype=np.int64)
        scores = self._unary[self._layers, choice_matrix].sum(axis=1)
        if len(self._pair):
            scores = scores + self._pair[
                self._layers[:-1],
                choice_matrix[:, :-1],
                choice_matrix[:, 1:]].sum(axis=1)
        return scores

    def score_moments(self):
        '''Exact mean and std of the true score under uniform genomes.

        The pairwise tables are split into row, column and interaction
        effects. Row and column effects join the unary effect of their
        layer, which leaves mutually uncorrelated terms whose variances
        add up.
        '''
        if self._moments is None:
            mean = self._unary.mean(axis=1).sum()
            main = self._unary - self._unary.mean(axis=1, keepdims=True)
            interaction_var = 0.
            if len(self._pair):
                mean += self._pair.mean(axis=(1, 2)).sum()
                centered = self._pair - self._pair.mean(axis=(1, 2),
                                                        keepdims=True)
                row = centered.mean(axis=2)
                col = centered.mean(axis=1)
                inter = centered - row[:, :, None] - col[:, None, :]
                main[:-1] += row
                main[1:] += col
                interaction_var = (inter**2).mean(axis=(1, 2)).sum()
            var = (main**2).mean(axis=1).sum() + interaction_var
            self._moments = (float(mean), float(np.sqrt(var)))
        return self._moments

    def describe(self):
        return {'kind': self.kind, 'noise_std': self._noise_std,
                'noise_seed': self._noise_seed}

    def _evaluate(self, genome):
        test_score = float(self.true_scores(genome.choices[np.newaxis])[0])
        val_score = test_score
        if self._noise_std > 0:
            val_score += self._noise_std * per_genome_normal(
                NOISE_STREAM_LANDSCAPE, self._noise_seed, self._spec, genome)
        return FitnessReport(val_score=val_score,
                             test_score=test_score,
                             cost_mflops=self.cost_of(genome))


class CorrelatedOracle(EvaluatorBase):

    """Validation scores with a controlled correlation to test scores.

    With z the standardized test score of the base evaluator and eps a
    per-genome standard normal, the validation score is

        mean + std * (rho * z + sqrt(1 - rho**2) * eps)

    where mean and std are the base evaluator's score moments. Test scores
    and costs are passed through unchanged.

    Parameters
    ----------
    base : EvaluatorBase
        SyntheticLandscape or TabularBenchmark.
    target_pearson : float
        rho in [-1, 1].
    oracle_seed : int
        Non-negative seed of the per-genome noise.
    """

    kind = 'correlated'

    def __init__(self, base, target_pearson, oracle_seed=0):
        super(CorrelatedOracle, self).__init__(base.spec, base.cost_table)
        target_pearson = float(target_pearson)
        if not -1. <= target_pearson <= 1.:
            raise ValueError('target_pearson must be in [-1, 1], '
                             'got {!r}'.format(target_pearson))
        if int(oracle_seed) < 0:
            raise ValueError('oracle_seed must be >= 0, got {!r}'.format(
                oracle_seed))
        mean, std = base.score_moments()
        if not std > 0:
            raise DegenerateDataError(
                'Base evaluator has constant test scores')
        self._base = base
        self._rho = target_pearson
        self._noise_weight = float(np.sqrt(1. - target_pearson**2))
        self._oracle_seed = int(oracle_seed)
        self._mean = mean
        self._std = std

    @classmethod
    def from_regime(cls, base, regime, oracle_seed=0):
        """Oracle with the correlation of a named regime, see
        CORRELATION_REGIMES."""
        return cls(base, get_correlation_regime(regime), oracle_seed)

    @property
    def base(self):
        return self._base

    @property
    def target_pearson(self):
        return self._rho

    def score_moments(self):
        return self._base.score_moments()

    def check_cost_model(self, cost_model):
        self._base.check_cost_model(cost_model)

    def describe(self):
        return {'kind': self.kind, 'target_pearson': self._rho,
                'oracle_seed': self._oracle_seed,
                'base': self._base.describe()}

    def _evaluate(self, genome):
        base_report = self._base.evaluate(genome)
        z = (base_report.test_score - self._mean) / self._std
        eps = per_genome_normal(NOISE_STREAM_CORRELATED, self._oracle_seed,
                                self._spec, genome)
        val_z = self._rho * z + self._noise_weight * eps
        return FitnessReport(val_score=self._mean + self._std * val_z,
                             test_score=base_report.test_score,
                             cost_mflops=base_report.cost_mflops)


class TabularBenchmark(EvaluatorBase):

    """Lookup table of precomputed scores keyed by genome id.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space the ids refer to.
    records : dict
        Maps genome id to (val_score, test_score, cost_mflops).
    """

    kind = 'tabular'

    def __init__(self, spec, records):
        super(TabularBenchmark, self).__init__(spec)
        self._records = {}
        for genome_id, values in records.items():
            genome_id = int(genome_id)
            if not 0 <= genome_id < spec.num_architectures:
                raise GenomeRangeError('Genome id {!r} outside [0, {})'.format(
                    genome_id, spec.num_architectures))
            report = FitnessReport(*[float(v) for v in values])
            if not np.isfinite(report).all() or report.cost_mflops < 0:
                raise ValueError('Invalid record for genome {!r}: {!r}'.format(
                    genome_id, report))
            self._records[genome_id] = report
        if not self._records:
            raise ValueError('Tabular benchmark has no records')

    @classmethod
    def from_csv(cls, spec, path):
        '''Load a benchmark CSV with header
        ``genome_id,val_score,test_score,cost_mflops``.

        Raises
        ------
        ValueError
            On a wrong header, unparsable rows or duplicate ids.
        '''
        records = {}
        with open(path, 'r') as open_file:
            reader = csv.reader(open_file)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != TABULAR_HEADER:
                raise ValueError('{}: expected header {!r}, got {!r}'.format(
                    path, ','.join(TABULAR_HEADER), header))
            for line_number, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(TABULAR_HEADER):
                    raise ValueError('{}:{}: expected {} columns, got {}'.format(
                        path, line_number, len(TABULAR_HEADER), len(row)))
                try:
                    genome_id = int(row[0])
                    values = tuple(float(v) for v in row[1:])
                except ValueError as e:
                    raise ValueError('{}:{}: {}'.format(path, line_number, e))
                if genome_id in records:
                    raise ValueError('{}:{}: duplicate genome id {}'.format(
                        path, line_number, genome_id))
                records[genome_id] = values
        return cls(spec, records)

    @property
    def genome_ids(self):
        return sorted(self._records)

    def __len__(self):
        return len(self._records)

    def score_moments(self):
        test_scores = np.array([r.test_score for r in
                                self._records.values()])
        return float(test_scores.mean()), float(test_scores.std())

    def cost_of(self, genome):
        return self.evaluate(genome).cost_mflops

    def check_cost_model(self, cost_model):
        """Every recorded cost must equal the cost table's cost of its
        genome, otherwise CostMismatchError."""
        ids = self.genome_ids
        choices = [id_to_genome(self._spec, i).choices for i in ids]
        expected = genome_costs(cost_model, choices)
        recorded = np.array([self._records[i].cost_mflops for i in ids])
        bad = np.flatnonzero(~np.isclose(recorded, expected))
        if bad.size:
            i = bad[0]
            raise CostMismatchError(
                '{} of {} tabular costs disagree with the cost table, e.g. '
                'genome id {} records {!r} but the table gives {!r}'.format(
                    bad.size, len(ids), ids[i], recorded[i], expected[i]))

    def describe(self):
        return {'kind': self.kind, 'num_records': len(self._records)}

    def _evaluate(self, genome):
        genome_id = genome_to_id(self._spec, genome)
        try:
            return self._records[genome_id]
        except KeyError:
            raise UnknownGenomeError(
                'Genome {} (id {}) is not in the tabular benchmark'.format(
                    genome.tolist(), genome_id))


def export_tabular(path, evaluator, genomes):
    '''Write the reports of genomes as a tabular benchmark CSV.

    Parameters
    ----------
    path : str
        Output file.
    evaluator : EvaluatorBase
        Source of the reports.
    genomes : iterable of ArchGenome
        Genomes to export. Duplicates are written once.
    '''
    seen = set()
    with open(path, 'w') as open_file:
        writer = csv.writer(open_file, lineterminator='\n')
        writer.writerow(TABULAR_HEADER)
        for genome in genomes:
            genome_id = genome_to_id(evaluator.spec, genome)
            if genome_id in seen:
                continue
            seen.add(genome_id)
            report = evaluator.evaluate(genome)
            writer.writerow([genome_id, repr(report.val_score),
                             repr(report.test_score),
                             repr(report.cost_mflops)])


# Validation/test Pearson correlations measured for three kinds of
# supernet training:
#   baseline: classification loss only
#   domain_adapted: classification + MMD domain adaptation loss
#   domain_adapted_finetuned: as above, encoder fine-tuned with frozen
#                             classifier
CORRELATION_REGIMES = {'baseline': 0.1794,
                       'domain_adapted': 0.6985,
                       'domain_adapted_finetuned': 0.7096}


def get_correlation_regime(name):
    try:
        return CORRELATION_REGIMES[name]
    except KeyError:
        raise ValueError('Unknown correlation regime {!r}, choose from '
                         '{!r}'.format(name, sorted(CORRELATION_REGIMES)))


def build_evaluator(spec, params, cost_table=None, base_dir=None,
                    field='evaluator'):
    '''Create an evaluator from its config dictionary.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space.
    params : dict
        Must contain ``kind``: one of 'landscape', 'correlated', 'tabular'.
        landscape: seed, unary_scale, pairwise_scale, noise_std, offset.
        correlated: base (nested evaluator dict), target_pearson or regime,
                    oracle_seed.
        tabular: path (relative paths resolve against base_dir).
    cost_table : CostTable, optional
        Cost source of landscapes.
    base_dir : str, optional
        Directory of the config file.
    field : str, optional
        Dotted config path used in error messages.

    Returns
    -------
    EvaluatorBase

    Raises
    ------
    ConfigError
        For unknown kinds, unknown keys or invalid values.
    '''
    if not isinstance(params, dict):
        raise ConfigError('expected a mapping, got {!r}'.format(params), field)
    kind = params.get('kind')
    if kind not in EVALUATOR_BUILDERS:
        raise ConfigError('unknown evaluator kind {!r}, choose from {!r}'.format(
            kind, sorted(EVALUATOR_BUILDERS)), field + '.kind')
    allowed, builder = EVALUATOR_BUILDERS[kind]
    unknown = sorted(set(params) - set(allowed) - {'kind'})
    if unknown:
        raise ConfigError('unknown keys {!r}'.format(unknown), field)
    try:
        return builder(spec, params, cost_table, base_dir, field)
    except ConfigError:
        raise
    except (ValueError, TypeError, IOError, OSError) as e:
        raise ConfigError(str(e), field)


def _build_landscape(spec, params, cost_table, base_dir, field):
    return SyntheticLandscape.from_seed(
        spec,
        seed=int(params.get('seed', 0)),
        unary_scale=float(params.get('unary_scale', 0.25)),
        pairwise_scale=float(params.get('pairwise_scale', 1.)),
        noise_std=float(params.get('noise_std', 0.)),
        offset=float(params.get('offset', 0.)),
        cost_table=cost_table)


def _build_correlated(spec, params, cost_table, base_dir, field):
    if 'base' not in params:
        raise ConfigError('missing base evaluator', field + '.base')
    base = build_evaluator(spec, params['base'], cost_table, base_dir,
                           field + '.base')
    if ('target_pearson' in params) == ('regime' in params):
        raise ConfigError('give exactly one of target_pearson and regime',
                          field)
    if 'regime' in params:
        target_pearson = get_correlation_regime(params['regime'])
    else:
        target_pearson = float(params['target_pearson'])
    return CorrelatedOracle(base, target_pearson,
                            oracle_seed=int(params.get('oracle_seed', 0)))


def _build_tabular(spec, params, cost_table, base_dir, field):
    if 'path' not in params:
        raise ConfigError('missing path', field + '.path')
    path = params['path']
    if base_dir is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    return TabularBenchmark.from_csv(spec, path)


EVALUATOR_BUILDERS = {
    'landscape': (('seed', 'unary_scale', 'pairwise_scale', 'noise_std',
                   'offset'), _build_landscape),
    'correlated': (('base', 'target_pearson', 'regime', 'oracle_seed'),
                   _build_correlated),
    'tabular': (('path',), _build_tabular),
}
