#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Resource cost model (MFLOPs) of genomes and the complexity constraint.
'''
from __future__ import print_function, division

import numpy as np

from nas_evo.search.space import ArchGenome
from nas_evo.utils.exceptions import DimensionError

# Synthetic per-choice costs [MFLOPs] of the shipped default table, one row
# per stage: (number of layers, [3x3, 5x5, 7x7, xception]).
# Values are made up so that a uniformly random genome costs 1700 MFLOPs on
# average. They are not measured on any network.
DEFAULT_STAGES = [
    (4, [60., 66., 72., 76.]),
    (4, [64., 70., 77., 81.]),
    (8, [68., 74., 82., 86.]),
    (4, [70., 77., 85., 90.]),
]
DEFAULT_BASE_MFLOPS = 192.
DEFAULT_CHOICE_NAMES = ['shuffle_3x3', 'shuffle_5x5', 'shuffle_7x7',
                        'xception']


class CostTable(object):

    """Per-layer, per-choice cost table.

    Parameters
    ----------
    per_layer_choice_cost : array-like, shape=(N, M)
        Cost [MFLOPs] of selecting choice m at layer k.
    base_cost : float, optional
        Cost [MFLOPs] added to every genome (stem and head).
    """

    def __init__(self, per_layer_choice_cost, base_cost=0.):
        table = np.array(per_layer_choice_cost, dtype=float)
        if table.ndim != 2:
            raise DimensionError(
                'Cost table must be a N x M matrix, got shape {}'.format(
                    table.shape))
        if not np.isfinite(table).all() or (table < 0).any():
            raise ValueError('Cost table entries must be finite and >= 0')
        base_cost = float(base_cost)
        if not np.isfinite(base_cost) or base_cost < 0:
            raise ValueError('base_cost must be finite and >= 0, '
                             'got {!r}'.format(base_cost))
        table.flags.writeable = False
        self._table = table
        self._base_cost = base_cost
        self._layer_index = np.arange(table.shape[0])

    @property
    def per_layer_choice_cost(self):
        return self._table

    @property
    def base_cost(self):
        return self._base_cost

    @property
    def num_layers(self):
        return self._table.shape[0]

    @property
    def num_choices(self):
        return self._table.shape[1]

    def check_space(self, spec):
        """Raise DimensionError if the table does not match the space."""
        if self._table.shape != (spec.num_layers, spec.num_choices):
            raise DimensionError(
                'Cost table has shape {}, space is {} x {}'.format(
                    self._table.shape, spec.num_layers, spec.num_choices))

    def to_dict(self):
        return {'base_mflops': self._base_cost,
                'layers': self._table.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(per_layer_choice_cost=data['layers'],
                   base_cost=data.get('base_mflops', 0.))

    def __repr__(self):
        return 'CostTable(shape={}, base_cost={})'.format(
            self._table.shape, self._base_cost)


def default_cost_table():
    '''The shipped synthetic cost table for N=20 layers and M=4 choices.

    Choices are ordered 3x3 < 5x5 < 7x7 < xception in cost within every
    layer. The all-zero genome costs 1512 MFLOPs, the uniform average is
    1700 MFLOPs and the most expensive genome costs 1868 MFLOPs.

    Returns
    -------
    CostTable
    '''
    rows = []
    for n_layers, costs in DEFAULT_STAGES:
        rows.extend([list(costs)] * n_layers)
    return CostTable(rows, base_cost=DEFAULT_BASE_MFLOPS)


def genome_costs(table, choice_matrix):
    '''Cost of many genomes at once.

    Parameters
    ----------
    table : CostTable
        The cost table.
    choice_matrix : array-like, shape=(n, N)
        One genome per row.

    Returns
    -------
    np.ndarray, shape=(n,)
        base_cost + sum of the selected per-layer costs.
    '''
    choice_matrix = np.asarray(choice_matrix, dtype=np.int64)
    if choice_matrix.ndim != 2 or choice_matrix.shape[1] != table.num_layers:
        raise DimensionError(
            'Expected a (n, {}) choice matrix, got shape {}'.format(
                table.num_layers, choice_matrix.shape))
    selected = table.per_layer_choice_cost[table._layer_index, choice_matrix]
    return table.base_cost + selected.sum(axis=1)


def genome_cost(table, genome):
    '''Cost [MFLOPs] of a single genome.

    Computed through genome_costs so single and batched costs agree
    exactly, which matters at an inclusive bound.
    '''
    choices = genome.choices if isinstance(genome, ArchGenome) else genome
    choices = np.asarray(choices, dtype=np.int64)
    if choices.ndim != 1 or choices.shape[0] != table.num_layers:
        raise DimensionError('Genome has {} layers, cost table has {}'.format(
            choices.shape[0] if choices.ndim == 1 else choices.shape,
            table.num_layers))
    return float(genome_costs(table, choices[np.newaxis])[0])


def satisfies_bound(table, genome, bound):
    """True if genome_cost(table, genome) <= bound (inclusive)."""
    return genome_cost(table, genome) <= bound


def feasible_mask(table, choice_matrix, bound):
    """Boolean mask of rows satisfying the bound; all True without a
    table or bound."""
    choice_matrix = np.asarray(choice_matrix)
    if table is None or bound is None:
        return np.ones(len(choice_matrix), dtype=bool)
    return genome_costs(table, choice_matrix) <= bound
