#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Discrete layered search space, genome representation and encodings.

A search space has ``num_layers`` (N) layers with ``num_choices`` (M)
candidate operations each. A genome stores one choice index per layer.
Genome ids use a mixed-radix encoding with layer 0 as the least
significant digit: ``id = sum_k choices[k] * M**k``.
'''
from __future__ import print_function, division

import numpy as np

from nas_evo.utils.exceptions import (
    CapacityError, DimensionError, GenomeRangeError)

# largest id representable as a signed 64 bit integer
MAX_GENOME_ID = 2**63 - 1

# enumerate_genomes refuses spaces larger than this
MAX_ENUMERATION = 10**6


class SearchSpaceSpec(object):

    """Dimensions and display names of a layered search space.

    Parameters
    ----------
    num_layers : int
        Number of layers N, at least 1.
    num_choices : int
        Number of candidate operations per layer M, at least 2.
    layer_names : list of str, optional
        N display names.
    choice_names : list of str, optional
        M display names.
    """

    def __init__(self, num_layers, num_choices,
                 layer_names=None, choice_names=None):
        num_layers = _as_int(num_layers, 'num_layers')
        num_choices = _as_int(num_choices, 'num_choices')
        if num_layers < 1:
            raise ValueError('num_layers must be >= 1, got {!r}'.format(
                num_layers))
        if num_choices < 2:
            raise ValueError('num_choices must be >= 2, got {!r}'.format(
                num_choices))
        if layer_names is not None:
            layer_names = tuple(str(n) for n in layer_names)
            if len(layer_names) != num_layers:
                raise DimensionError(
                    'Expected {} layer names, got {}'.format(
                        num_layers, len(layer_names)))
        if choice_names is not None:
            choice_names = tuple(str(n) for n in choice_names)
            if len(choice_names) != num_choices:
                raise DimensionError(
                    'Expected {} choice names, got {}'.format(
                        num_choices, len(choice_names)))

        self._num_layers = num_layers
        self._num_choices = num_choices
        self._layer_names = layer_names
        self._choice_names = choice_names
        self._num_architectures = num_choices ** num_layers

        if self._num_architectures - 1 <= MAX_GENOME_ID:
            self._radix = np.array([num_choices ** k
                                    for k in range(num_layers)],
                                   dtype=np.int64)
        else:
            self._radix = None

    @property
    def num_layers(self):
        return self._num_layers

    @property
    def num_choices(self):
        return self._num_choices

    @property
    def layer_names(self):
        return self._layer_names

    @property
    def choice_names(self):
        return self._choice_names

    @property
    def num_architectures(self):
        """Exact size M**N of the space (python int)."""
        return self._num_architectures

    @property
    def radix(self):
        """Per-layer place values M**k, or None if ids would overflow."""
        return self._radix

    def check_genome(self, genome):
        """Raise DimensionError if genome does not belong to this space."""
        if len(genome) != self._num_layers:
            raise DimensionError(
                'Genome has {} layers, space has {}'.format(
                    len(genome), self._num_layers))

    def to_dict(self):
        data = {'num_layers': self._num_layers,
                'num_choices': self._num_choices}
        if self._layer_names is not None:
            data['layer_names'] = list(self._layer_names)
        if self._choice_names is not None:
            data['choice_names'] = list(self._choice_names)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(num_layers=data['num_layers'],
                   num_choices=data['num_choices'],
                   layer_names=data.get('layer_names'),
                   choice_names=data.get('choice_names'))

    def __eq__(self, other):
        if not isinstance(other, SearchSpaceSpec):
            return NotImplemented
        return (self._num_layers == other._num_layers and
                self._num_choices == other._num_choices and
                self._layer_names == other._layer_names and
                self._choice_names == other._choice_names)

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self._num_layers, self._num_choices))

    def __repr__(self):
        return 'SearchSpaceSpec(num_layers={}, num_choices={})'.format(
            self._num_layers, self._num_choices)


class ArchGenome(object):

    """Immutable per-layer choice vector.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The owning search space.
    choices : array-like of int, shape=(N,)
        Choice index per layer, each in [0, M).
    """

    __slots__ = ('_spec', '_choices', '_key')

    def __init__(self, spec, choices):
        raw = np.asarray(choices)
        if raw.dtype.kind not in 'iu':
            if raw.dtype.kind != 'f' or not np.all(np.isfinite(raw)) or \
                    not np.all(raw == np.floor(raw)):
                raise TypeError('Choices must be integers, got {!r}'.format(
                    raw.tolist()))
        choices = np.array(raw, dtype=np.int64).reshape(-1)
        spec.check_genome(choices)
        if choices.size and (choices.min() < 0 or
                             choices.max() >= spec.num_choices):
            raise GenomeRangeError(
                'Choices must be in [0, {}), got {!r}'.format(
                    spec.num_choices, choices.tolist()))
        choices.flags.writeable = False
        self._spec = spec
        self._choices = choices
        self._key = tuple(choices.tolist())

    @property
    def spec(self):
        return self._spec

    @property
    def choices(self):
        """Read-only numpy view of the choices."""
        return self._choices

    def tolist(self):
        return list(self._key)

    def __len__(self):
        return len(self._key)

    def __iter__(self):
        return iter(self._key)

    def __getitem__(self, index):
        return self._key[index]

    def __eq__(self, other):
        if not isinstance(other, ArchGenome):
            return NotImplemented
        return self._key == other._key

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return 'ArchGenome({!r})'.format(list(self._key))


def _as_int(value, name):
    if isinstance(value, bool):
        raise TypeError('{} must be an integer, got {!r}'.format(name, value))
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise TypeError('{} must be an integer, got {!r}'.format(name, value))


def genome_from_list(spec, choices):
    """Validated genome from a plain sequence of choice indices."""
    return ArchGenome(spec, choices)


def random_genome(spec, rng):
    '''Draw a genome uniformly from the search space.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    rng : numpy.random.Generator
        Seeded random source owned by the caller.

    Returns
    -------
    ArchGenome
        Each layer's choice is drawn independently from [0, M).
    '''
    choices = rng.integers(0, spec.num_choices, size=spec.num_layers)
    return ArchGenome(spec, choices)


def genome_to_id(spec, genome):
    '''Mixed-radix id of a genome, layer 0 least significant.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    genome : ArchGenome or array-like
        Genome of the space.

    Returns
    -------
    int
        ``sum_k choices[k] * M**k``, in [0, M**N).

    Raises
    ------
    DimensionError
        If the genome length differs from the number of layers.
    CapacityError
        If M**N does not fit a signed 64 bit integer.
    '''
    choices = genome.choices if isinstance(genome, ArchGenome) else \
        np.asarray(genome, dtype=np.int64)
    spec.check_genome(choices)
    if spec.radix is None:
        raise CapacityError(
            'Space with {}**{} architectures exceeds 64 bit genome ids'.format(
                spec.num_choices, spec.num_layers))
    return int(np.dot(choices, spec.radix))


def genome_ids(spec, choice_matrix):
    """Vectorized genome_to_id for a (n, N) choice matrix."""
    choice_matrix = np.asarray(choice_matrix, dtype=np.int64)
    if choice_matrix.ndim != 2 or choice_matrix.shape[1] != spec.num_layers:
        raise DimensionError('Expected a (n, {}) choice matrix, got {}'.format(
            spec.num_layers, choice_matrix.shape))
    if spec.radix is None:
        raise CapacityError(
            'Space with {}**{} architectures exceeds 64 bit genome ids'.format(
                spec.num_choices, spec.num_layers))
    return choice_matrix.dot(spec.radix)


def id_to_genome(spec, genome_id):
    '''Inverse of genome_to_id.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    genome_id : int
        Id in [0, M**N).

    Returns
    -------
    ArchGenome

    Raises
    ------
    GenomeRangeError
        If the id is outside [0, M**N).
    '''
    genome_id = _as_int(genome_id, 'genome_id')
    if genome_id < 0 or genome_id >= spec.num_architectures:
        raise GenomeRangeError('Genome id {!r} outside [0, {})'.format(
            genome_id, spec.num_architectures))
    choices = []
    remainder = genome_id
    for _ in range(spec.num_layers):
        remainder, digit = divmod(remainder, spec.num_choices)
        choices.append(digit)
    return ArchGenome(spec, choices)


def enumerate_genomes(spec):
    '''Iterate over every genome of a small space in id order.

    Raises
    ------
    CapacityError
        If the space has more than MAX_ENUMERATION architectures.
    '''
    if spec.num_architectures > MAX_ENUMERATION:
        raise CapacityError(
            'Refusing to enumerate {} architectures (limit {})'.format(
                spec.num_architectures, MAX_ENUMERATION))
    for genome_id in range(spec.num_architectures):
        yield id_to_genome(spec, genome_id)
