#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Constrained evolutionary search and the random search baseline.

Evolution schedule: an initial population is evaluated and its best
``survivor_count`` members form the parent pool. Then, alternately, a batch
of ``batch_size`` mutation children and a batch of ``batch_size`` crossover
children are produced and evaluated, and after every batch the best
``survivor_count`` genomes among parents and children become the new parent
pool. The search stops once ``total_budget`` genomes (initial population
included) have been evaluated.

No genome is evaluated twice within one trial, and every evaluated genome
satisfies the cost bound if one is set.
'''
from __future__ import print_function, division

import json

import numpy as np

from nas_evo.fitness.base_evaluator import FitnessReport
from nas_evo.search.cost import genome_costs
from nas_evo.search.diversity import (
    CHUNK_SIZE, SAMPLE_CAP, NsdiConfig, NsdiStats, as_generator,
    average_population_similarity, nsdi_init, random_init)
from nas_evo.search.space import (
    MAX_ENUMERATION, ArchGenome, SearchSpaceSpec, genome_to_id)
from nas_evo.utils.exceptions import DimensionError, InfeasibleConstraintError
from nas_evo.utils.logger import log_debug, log_info, log_warn

DEFAULT_INIT_POPULATION = 100
DEFAULT_SURVIVOR_COUNT = 50
DEFAULT_MUTATION_PROB = 0.1
DEFAULT_BATCH_SIZE = 25
DEFAULT_TOTAL_BUDGET = 1000
DEFAULT_TOPK_REPORT = 10

# attempts per child slot before falling back to a fresh random genome
MAX_SLOT_REJECTIONS = 10**4

CROSSOVER_KINDS = ('uniform', 'single_point')
INIT_RANDOM = 'random'
INIT_NSDI = 'nsdi'


class EaConfig(object):

    """Evolution schedule.

    Parameters
    ----------
    init_population : int, optional
        Size of the initial population.
    survivor_count : int, optional
        Size of the parent pool, at most init_population.
    mutation_prob : float, optional
        Per-layer probability of redrawing a choice.
    batch_size : int, optional
        Children per operator batch.
    total_budget : int, optional
        Evaluations including the initial population.
    cost_bound : float, optional
        Maximum genome cost [MFLOPs].
    init_method : str or NsdiConfig, optional
        'random' or an NsdiConfig. The NsdiConfig's population size and
        cost bound are replaced by init_population and cost_bound.
    topk_report : int, optional
        Number of best genomes kept in the trial record.
    crossover : str, optional
        'uniform' or 'single_point'.
    """

    def __init__(self, init_population=DEFAULT_INIT_POPULATION,
                 survivor_count=DEFAULT_SURVIVOR_COUNT,
                 mutation_prob=DEFAULT_MUTATION_PROB,
                 batch_size=DEFAULT_BATCH_SIZE,
                 total_budget=DEFAULT_TOTAL_BUDGET,
                 cost_bound=None,
                 init_method=INIT_RANDOM,
                 topk_report=DEFAULT_TOPK_REPORT,
                 crossover='uniform'):
        self.init_population = int(init_population)
        self.survivor_count = int(survivor_count)
        self.mutation_prob = float(mutation_prob)
        self.batch_size = int(batch_size)
        self.total_budget = int(total_budget)
        self.cost_bound = None if cost_bound is None else float(cost_bound)
        self.topk_report = int(topk_report)
        self.crossover = crossover

        if self.init_population < 1:
            raise ValueError('init_population must be >= 1')
        if not 1 <= self.survivor_count <= self.init_population:
            raise ValueError(
                'survivor_count must be in [1, init_population], '
                'got {!r}'.format(self.survivor_count))
        if not 0. <= self.mutation_prob <= 1.:
            raise ValueError('mutation_prob must be in [0, 1], got {!r}'.format(
                self.mutation_prob))
        if self.batch_size < 1:
            raise ValueError('batch_size must be >= 1')
        if self.total_budget < self.init_population:
            raise ValueError('total_budget {!r} is below init_population '
                             '{!r}'.format(self.total_budget,
                                           self.init_population))
        if self.cost_bound is not None and not self.cost_bound >= 0:
            raise ValueError('cost_bound must be >= 0')
        if self.topk_report < 1:
            raise ValueError('topk_report must be >= 1')
        if crossover not in CROSSOVER_KINDS:
            raise ValueError('Unknown crossover {!r}, choose from {!r}'.format(
                crossover, CROSSOVER_KINDS))

        if isinstance(init_method, NsdiConfig):
            self.init_method = init_method.replace(
                population_size=self.init_population,
                cost_bound=self.cost_bound)
        elif init_method == INIT_RANDOM:
            self.init_method = INIT_RANDOM
        else:
            raise ValueError('init_method must be {!r} or an NsdiConfig, '
                             'got {!r}'.format(INIT_RANDOM, init_method))

    @property
    def init_kind(self):
        return INIT_RANDOM if self.init_method == INIT_RANDOM else INIT_NSDI

    def to_dict(self):
        if self.init_kind == INIT_RANDOM:
            init_method = INIT_RANDOM
        else:
            init_method = {INIT_NSDI: {'aps_max': self.init_method.aps_max,
                                       'timeout': self.init_method.timeout}}
        return {'init_population': self.init_population,
                'survivor_count': self.survivor_count,
                'mutation_prob': self.mutation_prob,
                'batch_size': self.batch_size,
                'total_budget': self.total_budget,
                'cost_bound': self.cost_bound,
                'init_method': init_method,
                'topk_report': self.topk_report,
                'crossover': self.crossover}


class TrialRecord(object):

    """Trace of one seeded search run.

    Attributes
    ----------
    seed : int
        Seed of the run.
    strategy : str
        Strategy name.
    per_generation : list of (int, float, float)
        (generation, best val score so far, mean val score of the
        population).
    evaluated_count : int
        Number of distinct genomes evaluated.
    topk : list of (ArchGenome, FitnessReport)
        Best genomes by val score, descending.
    init_stats : NsdiStats or None
        Sampling statistics of the initializer.
    init_aps : float or None
        APS of the initial population.
    history : list of (int, FitnessReport)
        Every evaluation in order, keyed by genome id.
    space : SearchSpaceSpec or None
        Search space of the run.
    evaluator : dict or None
        Description of the fitness oracle, see EvaluatorBase.describe.
    """

    def __init__(self, seed, per_generation, evaluated_count, topk,
                 init_stats=None, strategy=None, init_aps=None, history=None,
                 space=None, evaluator=None):
        self.seed = seed
        self.strategy = strategy
        self.per_generation = [(int(g), float(b), float(m))
                               for g, b, m in per_generation]
        self.evaluated_count = int(evaluated_count)
        self.topk = list(topk)
        self.init_stats = init_stats
        self.init_aps = None if init_aps is None else float(init_aps)
        self.history = list(history or [])
        self.space = space
        self.evaluator = evaluator

    @property
    def best(self):
        """(genome, report) with the best val score, None if empty."""
        return self.topk[0] if self.topk else None

    def to_dict(self):
        return {
            'seed': self.seed,
            'strategy': self.strategy,
            'space': None if self.space is None else self.space.to_dict(),
            'evaluator': self.evaluator,
            'evaluated_count': self.evaluated_count,
            'per_generation': [list(row) for row in self.per_generation],
            'topk': [{'genome': genome.tolist(),
                      'genome_id': genome_to_id(genome.spec, genome),
                      'val_score': report.val_score,
                      'test_score': report.test_score,
                      'cost_mflops': report.cost_mflops}
                     for genome, report in self.topk],
            'init_stats': (None if self.init_stats is None
                           else dict(self.init_stats._asdict())),
            'init_aps': self.init_aps,
            'history': [[genome_id, r.val_score, r.test_score, r.cost_mflops]
                        for genome_id, r in self.history],
        }

    @classmethod
    def from_dict(cls, data, spec=None):
        '''Inverse of to_dict.

        Parameters
        ----------
        data : dict
            Serialized record.
        spec : SearchSpaceSpec, optional
            Search space of the genomes. Read from the record if None.
        '''
        if spec is None and data.get('space') is not None:
            spec = SearchSpaceSpec.from_dict(data['space'])
        if spec is None and data['topk']:
            raise ValueError('Record has genomes but no search space')
        topk = [(ArchGenome(spec, row['genome']),
                 FitnessReport(row['val_score'], row['test_score'],
                               row['cost_mflops']))
                for row in data['topk']]
        init_stats = data.get('init_stats')
        if init_stats is not None:
            init_stats = NsdiStats(**init_stats)
        history = [(int(row[0]), FitnessReport(*row[1:]))
                   for row in data.get('history', [])]
        return cls(seed=data['seed'],
                   per_generation=data['per_generation'],
                   evaluated_count=data['evaluated_count'],
                   topk=topk,
                   init_stats=init_stats,
                   strategy=data.get('strategy'),
                   init_aps=data.get('init_aps'),
                   history=history,
                   space=spec,
                   evaluator=data.get('evaluator'))

    def to_json(self):
        """Canonical serialization: sorted keys, two space indent."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def mutate(genome, prob, rng):
    '''Redraw each layer's choice with probability prob.

    The redraw is uniform over all M choices and may return the original
    choice, so a layer changes with probability prob * (M - 1) / M.

    Parameters
    ----------
    genome : ArchGenome
        Parent genome.
    prob : float
        Per-layer mutation probability in [0, 1].
    rng : numpy.random.Generator
        Random source.

    Returns
    -------
    ArchGenome
    '''
    if not 0. <= prob <= 1.:
        raise ValueError('prob must be in [0, 1], got {!r}'.format(prob))
    spec = genome.spec
    return ArchGenome(spec, _mutate_choices(genome.choices, prob,
                                            spec.num_choices, rng))


def crossover(a, b, rng, kind='uniform'):
    '''Child of two parents.

    Parameters
    ----------
    a, b : ArchGenome
        Parents of the same search space.
    rng : numpy.random.Generator
        Random source.
    kind : str, optional
        'uniform': each layer is copied from a or b with probability 1/2.
        'single_point': layers before a random cut come from a, the rest
        from b.

    Returns
    -------
    ArchGenome

    Raises
    ------
    DimensionError
        If the parents have different lengths.
    '''
    if len(a) != len(b):
        raise DimensionError('Parents have {} and {} layers'.format(
            len(a), len(b)))
    if kind not in CROSSOVER_KINDS:
        raise ValueError('Unknown crossover {!r}'.format(kind))
    return ArchGenome(a.spec, _crossover_choices(a.choices, b.choices, rng,
                                                 kind))


def select_survivors(entries, k):
    '''Truncation selection.

    Parameters
    ----------
    entries : list of (int, ArchGenome, FitnessReport)
        (genome id, genome, report) triples.
    k : int
        Number to keep.

    Returns
    -------
    list
        The k best entries ordered by val score descending, ties broken by
        lower cost and then lower genome id.
    '''
    return sorted(entries, key=_selection_key)[:k]


def ea_search(spec, cfg, evaluator, cost_model=None, rng=None,
              strategy='ea'):
    '''Constrained evolutionary search.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space.
    cfg : EaConfig
        Evolution schedule.
    evaluator : EvaluatorBase
        Fitness oracle.
    cost_model : CostTable, optional
        Required if cfg.cost_bound is set.
    rng : numpy.random.Generator or int, optional
        Random source or seed.
    strategy : str, optional
        Name stored in the trial record.

    Returns
    -------
    TrialRecord

    Raises
    ------
    InfeasibleConstraintError
        If the initializer cannot satisfy the cost bound.
    '''
    rng = as_generator(rng)
    trial = _Trial(spec, evaluator, cost_model, cfg.cost_bound, rng)

    if cfg.init_kind == INIT_RANDOM:
        pop, init_stats = random_init(spec, cfg.init_population, cost_model,
                                      cfg.cost_bound, rng, return_stats=True)
    else:
        pop, init_stats = nsdi_init(spec, cfg.init_method, cost_model, rng)
    init_aps = (average_population_similarity(pop) if len(pop) > 1
                else None)

    for genome in pop:
        if trial.is_seen(genome.choices):
            # duplicate in the initial population, replace it
            genome = trial.draw_unseen()
            if genome is None:
                break
        trial.evaluate(genome)

    parents = select_survivors(trial.entries, cfg.survivor_count)
    trial.record(0, parents)
    log_debug('Initial population evaluated, best val {:.4f}'.format(
        trial.best_val), unit='evolve')

    generation = 0
    exhausted = False
    while trial.count < cfg.total_budget and not exhausted:
        for operator in ('mutation', 'crossover'):
            children = []
            for _ in range(cfg.batch_size):
                if trial.count >= cfg.total_budget:
                    break
                if operator == 'mutation':
                    child = trial.next_child(
                        lambda: _mutation_child(parents, cfg, spec, rng))
                else:
                    child = trial.next_child(
                        lambda: _crossover_child(parents, cfg, rng))
                if child is None:
                    exhausted = True
                    break
                children.append(trial.evaluate(child))
            if children:
                parents = select_survivors(parents + children,
                                           cfg.survivor_count)
                generation += 1
                trial.record(generation, parents)
            if exhausted or trial.count >= cfg.total_budget:
                break

    if exhausted:
        log_warn('Search space exhausted after {} evaluations'.format(
            trial.count), unit='evolve')
    return trial.finish(cfg.topk_report, init_stats=init_stats,
                        init_aps=init_aps, strategy=strategy,
                        seed=_seed_of(rng))


def random_search(spec, budget, evaluator, cost_model=None, cost_bound=None,
                  rng=None, topk_report=DEFAULT_TOPK_REPORT, report_every=50,
                  strategy='random'):
    '''Evaluate distinct uniformly random genomes under a cost bound.

    Parameters
    ----------
    spec : SearchSpaceSpec
        Search space.
    budget : int
        Number of genomes to evaluate.
    evaluator : EvaluatorBase
        Fitness oracle.
    cost_model : CostTable, optional
        Required if cost_bound is set.
    cost_bound : float, optional
        Maximum genome cost [MFLOPs].
    rng : numpy.random.Generator or int, optional
        Random source or seed.
    topk_report : int, optional
        Number of best genomes kept in the record.
    report_every : int, optional
        Evaluations per trace entry.
    strategy : str, optional
        Name stored in the trial record.

    Returns
    -------
    TrialRecord

    Raises
    ------
    InfeasibleConstraintError
        If no feasible genome is found within the global sample cap.
    '''
    budget = int(budget)
    if budget < 1:
        raise ValueError('budget must be >= 1, got {!r}'.format(budget))
    if report_every < 1:
        raise ValueError('report_every must be >= 1')
    rng = as_generator(rng)
    trial = _Trial(spec, evaluator, cost_model, cost_bound, rng)

    samples = 0
    chunk_start = 0
    generation = 0
    while trial.count < budget:
        if trial.space_exhausted():
            log_warn('Search space exhausted after {} evaluations'.format(
                trial.count), unit='evolve')
            break
        block = rng.integers(0, spec.num_choices,
                             size=(CHUNK_SIZE, spec.num_layers))
        used = CHUNK_SIZE
        for index in np.flatnonzero(trial.feasible(block)):
            row = block[index]
            if trial.is_seen(row):
                continue
            trial.evaluate(ArchGenome(spec, row))
            if trial.count % report_every == 0:
                trial.record_chunk(generation, chunk_start)
                generation += 1
                chunk_start = trial.count
            if trial.count >= budget:
                used = index + 1
                break
        samples += used
        if samples >= SAMPLE_CAP and trial.count < budget:
            if trial.count == 0:
                raise InfeasibleConstraintError(
                    'No feasible genome after {} samples'.format(samples),
                    samples_drawn=samples)
            log_warn('Stopping random search after {} samples with {} '
                     'evaluations'.format(samples, trial.count),
                     unit='evolve')
            break
    if chunk_start < trial.count:
        trial.record_chunk(generation, chunk_start)
    return trial.finish(topk_report, strategy=strategy, seed=_seed_of(rng))


class _Trial(object):

    """Bookkeeping shared by the search strategies: dedup, cost checks,
    evaluation history and the trace."""

    def __init__(self, spec, evaluator, cost_model, cost_bound, rng):
        if cost_bound is not None and cost_model is None:
            raise ValueError('A cost bound needs a cost model')
        if cost_model is not None:
            cost_model.check_space(spec)
        if evaluator.spec.num_layers != spec.num_layers or \
                evaluator.spec.num_choices != spec.num_choices:
            raise DimensionError('Evaluator space {!r} does not match {!r}'.format(
                evaluator.spec, spec))
        if cost_bound is not None:
            evaluator.check_cost_model(cost_model)
        if spec.radix is None:
            raise DimensionError('Search needs 64 bit genome ids')
        self.spec = spec
        self.evaluator = evaluator
        self.cost_model = cost_model
        self.cost_bound = cost_bound
        self.rng = rng
        self.seen = set()
        self.entries = []
        self.per_generation = []
        self.best_val = -np.inf

    @property
    def count(self):
        return len(self.entries)

    def genome_id(self, choices):
        return int(np.dot(choices, self.spec.radix))

    def is_seen(self, choices):
        return self.genome_id(choices) in self.seen

    def feasible(self, choice_matrix):
        if self.cost_bound is None:
            return np.ones(len(choice_matrix), dtype=bool)
        return genome_costs(self.cost_model, choice_matrix) <= self.cost_bound

    def acceptable(self, choices):
        return (not self.is_seen(choices) and
                bool(self.feasible(choices[np.newaxis])[0]))

    def space_exhausted(self):
        return (self.cost_bound is None and
                self.count >= self.spec.num_architectures)

    def evaluate(self, genome):
        genome_id = self.genome_id(genome.choices)
        report = self.evaluator.evaluate(genome)
        self.seen.add(genome_id)
        entry = (genome_id, genome, report)
        self.entries.append(entry)
        self.best_val = max(self.best_val, report.val_score)
        return entry

    def next_child(self, make_child):
        '''Child from make_child that is feasible and not yet evaluated.

        After MAX_SLOT_REJECTIONS failed attempts a fresh random genome is
        used instead, picked from the unseen genomes directly when the space
        can be enumerated. Returns None if none can be found either.
        '''
        for _ in range(MAX_SLOT_REJECTIONS):
            choices = make_child()
            if self.acceptable(choices):
                return ArchGenome(self.spec, choices)
        log_debug('Child slot fell back to a random genome', unit='evolve')
        return self.draw_unseen()

    def draw_unseen(self):
        if self.space_exhausted():
            return None
        for _ in range(MAX_SLOT_REJECTIONS):
            choices = self.rng.integers(0, self.spec.num_choices,
                                        size=self.spec.num_layers)
            if self.acceptable(choices):
                return ArchGenome(self.spec, choices)
        if self.spec.num_architectures <= MAX_ENUMERATION:
            return self._pick_unseen()
        return None

    def _pick_unseen(self):
        """Uniform pick among all unseen feasible genomes of a small space."""
        seen = np.fromiter(self.seen, dtype=np.int64, count=len(self.seen))
        ids = np.setdiff1d(np.arange(self.spec.num_architectures,
                                     dtype=np.int64), seen)
        choices = (ids[:, np.newaxis] // self.spec.radix) % \
            self.spec.num_choices
        choices = choices[self.feasible(choices)]
        if len(choices) == 0:
            return None
        return ArchGenome(self.spec, choices[self.rng.integers(len(choices))])

    def record(self, generation, population):
        mean_val = float(np.mean([r.val_score for _, _, r in population]))
        self.per_generation.append((generation, self.best_val, mean_val))

    def record_chunk(self, generation, start):
        self.record(generation, self.entries[start:])

    def finish(self, topk_report, init_stats=None, init_aps=None,
               strategy=None, seed=None):
        topk = [(genome, report) for _, genome, report in
                select_survivors(self.entries, topk_report)]
        history = [(genome_id, report)
                   for genome_id, _, report in self.entries]
        log_info('{} finished: {} evaluations, best val {:.4f}'.format(
            strategy, self.count, self.best_val), unit='evolve')
        return TrialRecord(seed=seed,
                           per_generation=self.per_generation,
                           evaluated_count=self.count,
                           topk=topk,
                           init_stats=init_stats,
                           strategy=strategy,
                           init_aps=init_aps,
                           history=history,
                           space=self.spec,
                           evaluator=self.evaluator.describe())


def _selection_key(entry):
    genome_id, _, report = entry
    return (-report.val_score, report.cost_mflops, genome_id)


def _mutate_choices(choices, prob, num_choices, rng):
    mask = rng.random(len(choices)) < prob
    redraw = rng.integers(0, num_choices, size=len(choices))
    return np.where(mask, redraw, choices)


def _crossover_choices(a, b, rng, kind):
    if kind == 'uniform':
        from_a = rng.random(len(a)) < 0.5
        return np.where(from_a, a, b)
    if len(a) < 2:
        return np.array(a)
    cut = rng.integers(1, len(a))
    return np.concatenate((a[:cut], b[cut:]))


def _mutation_child(parents, cfg, spec, rng):
    parent = parents[rng.integers(len(parents))][1]
    return _mutate_choices(parent.choices, cfg.mutation_prob,
                           spec.num_choices, rng)


def _crossover_child(parents, cfg, rng):
    if len(parents) > 1:
        i, j = rng.choice(len(parents), size=2, replace=False)
    else:
        i = j = 0
    return _crossover_choices(parents[i][1].choices, parents[j][1].choices,
                              rng, cfg.crossover)


def _seed_of(rng):
    """Entropy of the generator's seed sequence if it was an int seed."""
    seed_seq = getattr(rng.bit_generator, 'seed_seq', None)
    entropy = getattr(seed_seq, 'entropy', None)
    if isinstance(entropy, (int, np.integer)):
        return int(entropy)
    return None
