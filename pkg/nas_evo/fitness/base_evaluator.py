#!/usr/bin/env python
# -*- coding: utf-8 -*
''' Evaluator Base Class
'''
from __future__ import print_function, division
from collections import namedtuple

import numpy as np

from nas_evo.search.cost import genome_cost
from nas_evo.search.space import ArchGenome, genome_to_id
from nas_evo.utils.exceptions import CostMismatchError


FitnessReport = namedtuple('FitnessReport',
                           ['val_score', 'test_score', 'cost_mflops'])

# keep the per-genome noise streams of different oracles apart
NOISE_STREAM_LANDSCAPE = 1
NOISE_STREAM_CORRELATED = 2


class EvaluatorBase(object):

    """Base class for fitness oracles.

    An evaluator maps a genome to a FitnessReport. ``val_score`` is what a
    search optimizes, ``test_score`` is the held-out ground truth that only
    shows up in analysis. Reports must be deterministic: evaluating the same
    genome twice gives the identical report.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space of the genomes to evaluate.
    cost_table : CostTable, optional
        Used for ``cost_mflops`` by oracles without their own costs.
    """

    kind = None

    def __init__(self, spec, cost_table=None):
        if cost_table is not None:
            cost_table.check_space(spec)
        self._spec = spec
        self._cost_table = cost_table

    @property
    def spec(self):
        return self._spec

    @property
    def cost_table(self):
        return self._cost_table

    def evaluate(self, genome):
        if not isinstance(genome, ArchGenome):
            genome = ArchGenome(self._spec, genome)
        self._spec.check_genome(genome)
        report = self._evaluate(genome)
        if not np.isfinite(report).all():
            raise ValueError('Non-finite fitness report {!r} for {!r}'.format(
                report, genome))
        return report

    def score_moments(self):
        """Mean and standard deviation of the test score under uniformly
        random genomes."""
        raise NotImplementedError

    def cost_of(self, genome):
        if self._cost_table is None:
            return 0.
        return genome_cost(self._cost_table, genome)

    def check_cost_model(self, cost_model):
        '''Check that reported costs agree with the table a search is
        bounded by.

        Parameters
        ----------
        cost_model : CostTable
            Table the cost bound is checked against.

        Raises
        ------
        CostMismatchError
            If the evaluator reports no costs or its cost table differs.
        '''
        own = self._cost_table
        if own is None:
            raise CostMismatchError(
                '{} evaluator reports no costs, attach the cost table of '
                'the bound'.format(self.kind))
        if own is cost_model:
            return
        if own.per_layer_choice_cost.shape != \
                cost_model.per_layer_choice_cost.shape or \
                not np.allclose(own.per_layer_choice_cost,
                                cost_model.per_layer_choice_cost) or \
                not np.isclose(own.base_cost, cost_model.base_cost):
            raise CostMismatchError(
                '{} evaluator uses {!r}, the bound uses {!r}'.format(
                    self.kind, own, cost_model))

    def describe(self):
        """JSON friendly description stored in trial records."""
        return {'kind': self.kind}

    def _evaluate(self, genome):
        raise NotImplementedError


def evaluate(evaluator, genome):
    """Evaluate a genome with the given evaluator."""
    return evaluator.evaluate(genome)


def evaluate_many(evaluator, genomes):
    """Evaluate genomes in order, returns a list of FitnessReport."""
    return [evaluator.evaluate(genome) for genome in genomes]


def per_genome_normal(stream, seed, spec, genome):
    '''Standard normal variate tied to one genome.

    The value only depends on (stream, seed, genome id), so repeated
    evaluations agree without memoization.

    Parameters
    ----------
    stream : int
        Identifies the consumer, e.g. NOISE_STREAM_CORRELATED.
    seed : int
        Non-negative oracle seed.
    spec : SearchSpaceSpec
        Search space of the genome.
    genome : ArchGenome
        The genome.

    Returns
    -------
    float
    '''
    genome_id = genome_to_id(spec, genome)
    return float(np.random.default_rng(
        [stream, seed, genome_id]).standard_normal())
