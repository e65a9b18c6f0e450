#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Population similarity metrics and population initialization.

Similarity between two genomes is the number of layers on which they
select the same operation. This is the XNOR count of their one-hot
encodings. The average population similarity (APS) is the mean over all
members of each member's largest similarity to any other member.

Two initializers are provided. ``random_init`` draws uniformly.
``nsdi_init`` (network similarity directed initialization) only accepts a
candidate if its largest similarity to the already accepted members does
not exceed a threshold. The threshold is raised by one whenever
``timeout`` consecutive candidates have been rejected.
'''
from __future__ import print_function, division

from collections import namedtuple

import numpy as np
from scipy import stats

from nas_evo.search.cost import feasible_mask
from nas_evo.search.space import ArchGenome
from nas_evo.utils.exceptions import (
    DimensionError, EmptyPopulationError, InfeasibleConstraintError,
    InsufficientPopulationError)
from nas_evo.utils.logger import log_debug

# hard limit on the number of candidates drawn by one initializer call
SAMPLE_CAP = 10**7

# candidates are drawn from the random source in blocks of this size
CHUNK_SIZE = 4096

NSDI_DEFAULT_APS_MAX = 6
NSDI_DEFAULT_TIMEOUT = 200000


NsdiStats = namedtuple('NsdiStats', ['samples_drawn', 'final_threshold',
                                     'threshold_bumps', 'accepted'])


class Population(object):

    """Ordered collection of genomes of one search space.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Shared search space of all members.
    members : list of ArchGenome
        The genomes. Duplicates are allowed.
    """

    def __init__(self, spec, members):
        members = tuple(members)
        for member in members:
            spec.check_genome(member)
        self._spec = spec
        self._members = members
        if members:
            self._array = np.vstack([m.choices for m in members])
        else:
            self._array = np.empty((0, spec.num_layers), dtype=np.int64)
        self._array.flags.writeable = False

    @classmethod
    def from_array(cls, spec, choice_matrix):
        return cls(spec, [ArchGenome(spec, row) for row in choice_matrix])

    @property
    def spec(self):
        return self._spec

    @property
    def members(self):
        return list(self._members)

    def as_array(self):
        """Read-only (P, N) int array of the members' choices."""
        return self._array

    def __len__(self):
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    def __getitem__(self, index):
        return self._members[index]

    def __repr__(self):
        return 'Population(size={}, spec={!r})'.format(
            len(self._members), self._spec)


class NsdiConfig(object):

    """Parameters of the similarity directed initialization.

    Parameters
    ----------
    population_size : int
        Number of genomes P to produce.
    aps_max : int
        Initial similarity threshold. Must not exceed the number of layers
        of the space it is used with.
    timeout : int
        Consecutive rejections before the threshold is raised by one.
    cost_bound : float, optional
        Maximum genome cost [MFLOPs]. No bound if None.
    """

    def __init__(self, population_size, aps_max=NSDI_DEFAULT_APS_MAX,
                 timeout=NSDI_DEFAULT_TIMEOUT, cost_bound=None):
        population_size = int(population_size)
        aps_max = int(aps_max)
        timeout = int(timeout)
        if population_size < 1:
            raise ValueError('population_size must be >= 1, got {!r}'.format(
                population_size))
        if aps_max < 0:
            raise ValueError('aps_max must be >= 0, got {!r}'.format(aps_max))
        if timeout < 1:
            raise ValueError('timeout must be >= 1, got {!r}'.format(timeout))
        if cost_bound is not None:
            cost_bound = float(cost_bound)
            if not cost_bound >= 0:
                raise ValueError('cost_bound must be >= 0, got {!r}'.format(
                    cost_bound))
        self.population_size = population_size
        self.aps_max = aps_max
        self.timeout = timeout
        self.cost_bound = cost_bound

    def check_space(self, spec):
        if self.aps_max > spec.num_layers:
            raise ValueError(
                'aps_max {!r} exceeds the number of layers {!r}'.format(
                    self.aps_max, spec.num_layers))

    def replace(self, **kwargs):
        params = self.to_dict()
        params.update(kwargs)
        return NsdiConfig(**params)

    def to_dict(self):
        return {'population_size': self.population_size,
                'aps_max': self.aps_max,
                'timeout': self.timeout,
                'cost_bound': self.cost_bound}

    def __eq__(self, other):
        if not isinstance(other, NsdiConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __repr__(self):
        return 'NsdiConfig({})'.format(', '.join(
            '{}={!r}'.format(k, v) for k, v in sorted(self.to_dict().items())))


def as_generator(rng):
    """Seeded numpy Generator from a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def one_hot(choice_matrix, num_choices):
    '''Binary encoding of genomes, one block of num_choices bits per layer.

    The dot product of two encodings counts the layers on which both
    genomes agree.

    Parameters
    ----------
    choice_matrix : array-like, shape=(n, N)
        Genomes, one per row.
    num_choices : int
        M, number of choices per layer.

    Returns
    -------
    np.ndarray, shape=(n, N * M)
    '''
    choice_matrix = np.asarray(choice_matrix, dtype=np.int64)
    n, n_layers = choice_matrix.shape
    return np.eye(num_choices)[choice_matrix].reshape(n, n_layers * num_choices)


def similarity(a, b):
    '''Number of layers on which two genomes select the same choice.

    Parameters
    ----------
    a, b : ArchGenome
        Genomes of the same search space.

    Returns
    -------
    int
        Value in [0, N]. Equals N minus the Hamming distance.

    Raises
    ------
    DimensionError
        If the genomes have different lengths.
    '''
    if len(a) != len(b):
        raise DimensionError('Genomes have {} and {} layers'.format(
            len(a), len(b)))
    return int(np.count_nonzero(_choices(a) == _choices(b)))


def max_similarity_to(pop, genome, exclude_index=None):
    '''Largest similarity between a genome and the members of a population.

    Parameters
    ----------
    pop : Population
        Members to compare against.
    genome : ArchGenome
        The query genome.
    exclude_index : int, optional
        Index of a member to skip, e.g. the query itself.

    Returns
    -------
    int

    Raises
    ------
    EmptyPopulationError
        If no member is left after the exclusion.
    '''
    members = pop.as_array()
    if exclude_index is not None:
        keep = np.ones(len(members), dtype=bool)
        keep[exclude_index] = False
        members = members[keep]
    if len(members) == 0:
        raise EmptyPopulationError('No population members to compare with')
    query = _choices(genome)
    if len(query) != members.shape[1]:
        raise DimensionError('Genome has {} layers, population has {}'.format(
            len(query), members.shape[1]))
    return int((members == query).sum(axis=1).max())


def pairwise_similarity_matrix(pop):
    '''Similarity between every pair of members.

    Returns
    -------
    np.ndarray, shape=(P, P), dtype=int64
        Symmetric, diagonal equal to N.
    '''
    encoded = one_hot(pop.as_array(), pop.spec.num_choices)
    return np.rint(encoded.dot(encoded.T)).astype(np.int64)


def average_population_similarity(pop):
    '''Average population similarity (APS).

    Parameters
    ----------
    pop : Population
        At least two members.

    Returns
    -------
    float
        Mean over members i of max_{j != i} similarity(v_i, v_j).

    Raises
    ------
    InsufficientPopulationError
        For fewer than two members.
    '''
    if len(pop) < 2:
        raise InsufficientPopulationError(
            'APS needs at least 2 members, got {}'.format(len(pop)))
    sims = pairwise_similarity_matrix(pop)
    np.fill_diagonal(sims, -1)
    return int(sims.max(axis=1).sum()) / len(pop)


def expected_random_aps(spec, size):
    '''Expected APS of a uniformly random population.

    Given a member, its similarities to the other size - 1 members are
    independent and Binomial(N, 1/M) distributed. The expected maximum of
    those is sum_m (1 - F(m)**(size - 1)) over m in [0, N).

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    size : int
        Population size, at least 2.

    Returns
    -------
    float
    '''
    if size < 2:
        raise InsufficientPopulationError(
            'APS needs at least 2 members, got {}'.format(size))
    m = np.arange(spec.num_layers)
    cdf = stats.binom.cdf(m, spec.num_layers, 1. / spec.num_choices)
    return float(np.sum(1. - cdf**(size - 1)))


def random_init(spec, size, cost_model=None, cost_bound=None, rng=None,
                return_stats=False):
    '''Uniform random population, optionally under a cost bound.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    size : int
        Number of genomes.
    cost_model : CostTable, optional
        Cost table used with cost_bound.
    cost_bound : float, optional
        Maximum genome cost (inclusive).
    rng : numpy.random.Generator or int, optional
        Random source or seed.
    return_stats : bool, optional
        If True, also return the sampling statistics.

    Returns
    -------
    Population or (Population, NsdiStats)

    Raises
    ------
    InfeasibleConstraintError
        If SAMPLE_CAP candidates were drawn without filling the population.
    '''
    pop, sample_stats = _directed_sample(
        spec, size,
        threshold=spec.num_layers,
        timeout=SAMPLE_CAP,
        cost_model=cost_model,
        cost_bound=cost_bound,
        rng=as_generator(rng))
    if return_stats:
        return pop, sample_stats
    return pop


def nsdi_init(spec, cfg, cost_model=None, rng=None):
    '''Similarity directed population initialization.

    Parameters
    ----------
    spec : SearchSpaceSpec
        The search space.
    cfg : NsdiConfig
        Population size, initial threshold, timeout and cost bound.
    cost_model : CostTable, optional
        Cost table used with cfg.cost_bound.
    rng : numpy.random.Generator or int, optional
        Random source or seed.

    Returns
    -------
    Population
        Each member's similarity to every member accepted before it was at
        most the threshold in force when it was accepted.
    NsdiStats
        Samples drawn, final threshold, number of threshold raises and
        population size.

    Raises
    ------
    InfeasibleConstraintError
        If SAMPLE_CAP candidates were drawn without filling the population.
    '''
    cfg.check_space(spec)
    return _directed_sample(
        spec, cfg.population_size,
        threshold=cfg.aps_max,
        timeout=cfg.timeout,
        cost_model=cost_model,
        cost_bound=cfg.cost_bound,
        rng=as_generator(rng))


def _choices(genome):
    if isinstance(genome, ArchGenome):
        return genome.choices
    return np.asarray(genome, dtype=np.int64)


def _directed_sample(spec, size, threshold, timeout, cost_model, cost_bound,
                     rng, sample_cap=SAMPLE_CAP):
    '''Rejection sampling loop shared by random_init and nsdi_init.

    Candidates are drawn CHUNK_SIZE at a time and consumed in order, so
    the accepted genomes only depend on the seed and not on how the loop
    walks through a chunk. With threshold == N only the cost bound can
    reject, which makes random_init a special case.

    Rejection counter semantics: ``t`` counts consecutive rejections and
    is reset by an acceptance or a threshold raise. The threshold is raised
    once ``t`` exceeds ``timeout``, but never beyond N.
    '''
    size = int(size)
    if size < 1:
        raise ValueError('Population size must be >= 1, got {!r}'.format(size))
    if cost_model is not None and cost_bound is not None:
        cost_model.check_space(spec)

    n_layers = spec.num_layers
    n_choices = spec.num_choices
    members = np.empty((size, n_layers), dtype=np.int64)
    n_accepted = 0
    t = 0
    bumps = 0
    samples = 0

    while n_accepted < size:
        block = rng.integers(0, n_choices, size=(CHUNK_SIZE, n_layers))
        cost_ok = feasible_mask(cost_model, block, cost_bound)
        if n_accepted == 0:
            sims = np.full(CHUNK_SIZE, -1, dtype=np.int64)
        else:
            sims = np.rint(
                one_hot(block, n_choices).dot(
                    one_hot(members[:n_accepted], n_choices).T)
            ).astype(np.int64).max(axis=1)

        pos = 0
        while pos < CHUNK_SIZE and n_accepted < size:
            hits = np.flatnonzero(cost_ok[pos:] & (sims[pos:] <= threshold))
            # rejections until the threshold would be raised
            to_bump = timeout - t + 1
            can_bump = threshold < n_layers and to_bump <= CHUNK_SIZE - pos

            if can_bump and (hits.size == 0 or hits[0] >= to_bump):
                samples = _count(samples, to_bump, sample_cap)
                pos += to_bump
                threshold += 1
                bumps += 1
                t = 0
                log_debug('Raised similarity threshold to {} after {} '
                          'samples'.format(threshold, samples), unit='nsdi')
            elif hits.size:
                j = hits[0]
                samples = _count(samples, j + 1, sample_cap)
                accepted = block[pos + j]
                members[n_accepted] = accepted
                n_accepted += 1
                t = 0
                pos += j + 1
                sims[pos:] = np.maximum(
                    sims[pos:], (block[pos:] == accepted).sum(axis=1))
            else:
                n_rejected = CHUNK_SIZE - pos
                samples = _count(samples, n_rejected, sample_cap)
                t += n_rejected
                pos = CHUNK_SIZE

    pop = Population.from_array(spec, members)
    return pop, NsdiStats(samples_drawn=samples,
                          final_threshold=threshold,
                          threshold_bumps=bumps,
                          accepted=n_accepted)


def _count(samples, n_new, sample_cap):
    samples += int(n_new)
    if samples > sample_cap:
        raise InfeasibleConstraintError(
            'No feasible population after {} samples; check the cost bound '
            'and population size'.format(sample_cap),
            samples_drawn=sample_cap)
    return samples
