#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Experiment configuration.

A config file is JSON or YAML with the keys

    space:      {num_layers, num_choices, [layer_names], [choice_names]}
    cost_table: "default", {base_mflops, layers} or null
    evaluator:  evaluator dict, see nas_evo.fitness.oracles.build_evaluator
    strategies: list of strategy dicts, each with a unique ``name`` and a
                ``kind`` of 'random', 'ea' or 'init'
    seeds:      list of non-negative integers
    output_dir: output directory

Relative paths are resolved against the directory of the config file.
Validation errors are raised as ConfigError naming the dotted field.
'''
from __future__ import print_function, division

import json
import os

import yaml

from nas_evo.fitness.oracles import build_evaluator
from nas_evo.search.cost import CostTable, default_cost_table
from nas_evo.search.diversity import (
    NSDI_DEFAULT_APS_MAX, NSDI_DEFAULT_TIMEOUT, NsdiConfig)
from nas_evo.search.evolve import (
    INIT_NSDI, INIT_RANDOM, DEFAULT_TOPK_REPORT, EaConfig)
from nas_evo.search.space import SearchSpaceSpec
from nas_evo.utils.exceptions import ConfigError, CostMismatchError

STRATEGY_KINDS = ('random', 'ea', 'init')
TOP_LEVEL_KEYS = ('space', 'cost_table', 'evaluator', 'strategies', 'seeds',
                  'output_dir')
DEFAULT_OUTPUT_DIR = 'nas_evo_output'


class RandomSearchConfig(object):

    """Settings of the random search baseline."""

    def __init__(self, budget, cost_bound=None,
                 topk_report=DEFAULT_TOPK_REPORT, report_every=50):
        self.budget = int(budget)
        self.cost_bound = None if cost_bound is None else float(cost_bound)
        self.topk_report = int(topk_report)
        self.report_every = int(report_every)
        if self.budget < 1:
            raise ValueError('budget must be >= 1, got {!r}'.format(
                self.budget))
        if self.cost_bound is not None and not self.cost_bound >= 0:
            raise ValueError('cost_bound must be >= 0')
        if self.topk_report < 1:
            raise ValueError('topk_report must be >= 1')
        if self.report_every < 1:
            raise ValueError('report_every must be >= 1')

    def to_dict(self):
        return {'budget': self.budget, 'cost_bound': self.cost_bound,
                'topk_report': self.topk_report,
                'report_every': self.report_every}


class InitConfig(object):

    """Settings of an initialization-only strategy.

    ``init_method`` is 'random' or an NsdiConfig whose population size and
    cost bound are replaced by the ones given here.
    """

    def __init__(self, population_size, init_method=INIT_RANDOM,
                 cost_bound=None):
        self.population_size = int(population_size)
        self.cost_bound = None if cost_bound is None else float(cost_bound)
        if self.population_size < 2:
            raise ValueError('population_size must be >= 2, got {!r}'.format(
                self.population_size))
        if isinstance(init_method, NsdiConfig):
            init_method = init_method.replace(
                population_size=self.population_size,
                cost_bound=self.cost_bound)
        elif init_method != INIT_RANDOM:
            raise ValueError('init_method must be {!r} or an NsdiConfig'.format(
                INIT_RANDOM))
        self.init_method = init_method

    @property
    def init_kind(self):
        return INIT_RANDOM if self.init_method == INIT_RANDOM else INIT_NSDI

    def to_dict(self):
        if self.init_kind == INIT_RANDOM:
            init_method = INIT_RANDOM
        else:
            init_method = {INIT_NSDI: {'aps_max': self.init_method.aps_max,
                                       'timeout': self.init_method.timeout}}
        return {'population_size': self.population_size,
                'init_method': init_method,
                'cost_bound': self.cost_bound}


class StrategyConfig(object):

    """Named search strategy.

    Parameters
    ----------
    name : str
        Unique name, used in output file names.
    kind : str
        'random', 'ea' or 'init'.
    settings : RandomSearchConfig, EaConfig or InitConfig
        Settings matching kind.
    """

    def __init__(self, name, kind, settings):
        self.name = name
        self.kind = kind
        self.settings = settings

    @property
    def init_kind(self):
        if self.kind == 'random':
            return None
        return self.settings.init_kind

    def to_dict(self):
        data = {'name': self.name, 'kind': self.kind}
        data.update(self.settings.to_dict())
        return data

    def __repr__(self):
        return 'StrategyConfig(name={!r}, kind={!r})'.format(
            self.name, self.kind)


class ExperimentConfig(object):

    """Validated experiment configuration.

    Attributes
    ----------
    space : SearchSpaceSpec
    cost_table : CostTable or None
    evaluator_params : dict or None
        Raw evaluator dict, None if only 'init' strategies are run.
    evaluator : EvaluatorBase or None
        Evaluator built from evaluator_params.
    strategies : list of StrategyConfig
    seeds : list of int
    output_dir : str
    base_dir : str or None
        Directory relative paths were resolved against.
    """

    def __init__(self, space, cost_table, evaluator_params, strategies, seeds,
                 output_dir, base_dir=None):
        self.space = space
        self.cost_table = cost_table
        self.evaluator_params = evaluator_params
        self.strategies = list(strategies)
        self.seeds = list(seeds)
        self.output_dir = output_dir
        self.base_dir = base_dir
        self.evaluator = None
        if evaluator_params is not None:
            self.evaluator = build_evaluator(space, evaluator_params,
                                             cost_table, base_dir)
            self._check_bounded_costs()

    def _check_bounded_costs(self):
        bounded = [s.name for s in self.strategies
                   if s.kind != 'init' and s.settings.cost_bound is not None]
        if not bounded:
            return
        try:
            self.evaluator.check_cost_model(self.cost_table)
        except CostMismatchError as e:
            raise ConfigError('{!r} are cost bounded but {}'.format(
                bounded, e), 'evaluator')

    def strategy(self, name=None):
        '''Strategy by name, the first one if name is None.

        Raises
        ------
        ConfigError
            For an unknown name.
        '''
        if name is None:
            return self.strategies[0]
        for strategy in self.strategies:
            if strategy.name == name:
                return strategy
        raise ConfigError('unknown strategy {!r}, choose from {!r}'.format(
            name, [s.name for s in self.strategies]), 'strategies')

    def with_output_dir(self, output_dir):
        """Copy of the config writing to another directory."""
        return ExperimentConfig(self.space, self.cost_table,
                                self.evaluator_params, self.strategies,
                                self.seeds, output_dir, self.base_dir)

    def with_seeds(self, seeds):
        return ExperimentConfig(self.space, self.cost_table,
                                self.evaluator_params, self.strategies,
                                seeds, self.output_dir, self.base_dir)

    def to_dict(self):
        return {
            'space': self.space.to_dict(),
            'cost_table': (None if self.cost_table is None
                           else self.cost_table.to_dict()),
            'evaluator': self.evaluator_params,
            'strategies': [s.to_dict() for s in self.strategies],
            'seeds': list(self.seeds),
        }


def load_config(path):
    '''Read and validate a JSON or YAML experiment config.

    Parameters
    ----------
    path : str
        Config file, ``.json``, ``.yaml`` or ``.yml``.

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigError
        If the file cannot be parsed or a field is invalid.
    IOError
        If the file cannot be read.
    '''
    with open(path, 'r') as open_file:
        text = open_file.read()
    extension = os.path.splitext(path)[1].lower()
    try:
        if extension in ('.yaml', '.yml'):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (ValueError, yaml.YAMLError) as e:
        raise ConfigError('cannot parse {}: {}'.format(path, e))
    base_dir = os.path.dirname(os.path.abspath(path))
    return parse_config(data, base_dir=base_dir)


def parse_config(data, base_dir=None):
    '''Validate a config dictionary.

    Parameters
    ----------
    data : dict
        Parsed config file.
    base_dir : str, optional
        Directory relative paths resolve against.

    Returns
    -------
    ExperimentConfig
    '''
    if not isinstance(data, dict):
        raise ConfigError('config must be a mapping, got {!r}'.format(
            type(data).__name__))
    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise ConfigError('unknown keys {!r}'.format(unknown))

    space = _parse_space(_require(data, 'space', ''))
    cost_table = _parse_cost_table(data.get('cost_table'), space)

    strategies = _require(data, 'strategies', '')
    if not isinstance(strategies, list) or not strategies:
        raise ConfigError('at least one strategy is required', 'strategies')
    strategies = [_parse_strategy(params, space, cost_table,
                                  'strategies[{}]'.format(i))
                  for i, params in enumerate(strategies)]
    names = [s.name for s in strategies]
    for i, name in enumerate(names):
        if name in names[:i]:
            raise ConfigError('duplicate strategy name {!r}'.format(name),
                              'strategies[{}].name'.format(i))

    seeds = _parse_seeds(_require(data, 'seeds', ''))

    evaluator_params = data.get('evaluator')
    needs_evaluator = any(s.kind != 'init' for s in strategies)
    if evaluator_params is None and needs_evaluator:
        raise ConfigError('an evaluator is required for search strategies',
                          'evaluator')

    output_dir = data.get('output_dir', DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError('expected a path', 'output_dir')
    if base_dir is not None and not os.path.isabs(output_dir):
        output_dir = os.path.join(base_dir, output_dir)

    return ExperimentConfig(space, cost_table, evaluator_params, strategies,
                            seeds, output_dir, base_dir)


def _require(data, key, prefix):
    field = prefix + '.' + key if prefix else key
    if key not in data:
        raise ConfigError('missing required field', field)
    return data[key]


def _check_keys(params, allowed, field):
    if not isinstance(params, dict):
        raise ConfigError('expected a mapping, got {!r}'.format(params), field)
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ConfigError('unknown keys {!r}'.format(unknown), field)


def _parse_space(params):
    _check_keys(params, ('num_layers', 'num_choices', 'layer_names',
                         'choice_names'), 'space')
    for key in ('num_layers', 'num_choices'):
        _require(params, key, 'space')
    try:
        return SearchSpaceSpec.from_dict(params)
    except (ValueError, TypeError, OverflowError) as e:
        raise ConfigError(str(e), 'space')


def _parse_cost_table(params, space):
    if params is None:
        return None
    try:
        if params == 'default':
            table = default_cost_table()
        elif isinstance(params, dict):
            _check_keys(params, ('base_mflops', 'layers'), 'cost_table')
            table = CostTable.from_dict(params)
        else:
            raise ConfigError('expected "default", a mapping or null',
                              'cost_table')
        table.check_space(space)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise ConfigError(str(e), 'cost_table')
    return table


def _parse_seeds(seeds):
    if not isinstance(seeds, list) or not seeds:
        raise ConfigError('at least one seed is required', 'seeds')
    for i, seed in enumerate(seeds):
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError('expected a non-negative integer, got '
                              '{!r}'.format(seed), 'seeds[{}]'.format(i))
        if seed in seeds[:i]:
            raise ConfigError('duplicate seed {!r}'.format(seed),
                              'seeds[{}]'.format(i))
    return list(seeds)


def _parse_init_method(value, space, field):
    if value == INIT_RANDOM:
        return INIT_RANDOM
    if not isinstance(value, dict) or list(value) != [INIT_NSDI]:
        raise ConfigError('expected "random" or {{"nsdi": {{...}}}}, got '
                          '{!r}'.format(value), field)
    params = value[INIT_NSDI]
    nsdi_field = field + '.' + INIT_NSDI
    _check_keys(params, ('aps_max', 'timeout'), nsdi_field)
    aps_max = params.get('aps_max', NSDI_DEFAULT_APS_MAX)
    timeout = params.get('timeout', NSDI_DEFAULT_TIMEOUT)
    if not isinstance(aps_max, int) or not 0 <= aps_max <= space.num_layers:
        raise ConfigError('expected an integer in [0, {}], got {!r}'.format(
            space.num_layers, aps_max), nsdi_field + '.aps_max')
    if not isinstance(timeout, int) or timeout < 1:
        raise ConfigError('expected a positive integer, got {!r}'.format(
            timeout), nsdi_field + '.timeout')
    # population size is filled in by the owning strategy
    return NsdiConfig(population_size=1, aps_max=aps_max, timeout=timeout)


def _parse_strategy(params, space, cost_table, field):
    if not isinstance(params, dict):
        raise ConfigError('expected a mapping, got {!r}'.format(params), field)
    name = _require(params, 'name', field)
    if not isinstance(name, str) or not name or \
            not name.replace('_', '').replace('-', '').isalnum():
        raise ConfigError('names may only use letters, digits, "_" and "-", '
                          'got {!r}'.format(name), field + '.name')
    kind = _require(params, 'kind', field)
    if kind not in STRATEGY_KINDS:
        raise ConfigError('unknown kind {!r}, choose from {!r}'.format(
            kind, STRATEGY_KINDS), field + '.kind')
    settings_params = dict((k, v) for k, v in params.items()
                           if k not in ('name', 'kind'))

    if kind == 'random':
        allowed = ('budget', 'cost_bound', 'topk_report', 'report_every')
        factory = RandomSearchConfig
    elif kind == 'ea':
        allowed = ('init_population', 'survivor_count', 'mutation_prob',
                   'batch_size', 'total_budget', 'cost_bound', 'init_method',
                   'topk_report', 'crossover')
        factory = EaConfig
    else:
        allowed = ('population_size', 'init_method', 'cost_bound')
        factory = InitConfig
    _check_keys(settings_params, allowed, field)
    if kind == 'random':
        _require(settings_params, 'budget', field)
    if kind == 'init':
        _require(settings_params, 'population_size', field)
    if 'init_method' in settings_params:
        settings_params['init_method'] = _parse_init_method(
            settings_params['init_method'], space, field + '.init_method')
    if settings_params.get('cost_bound') is not None and cost_table is None:
        raise ConfigError('a cost bound needs a cost_table', field +
                          '.cost_bound')

    try:
        settings = factory(**settings_params)
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e), field)
    return StrategyConfig(name, kind, settings)
