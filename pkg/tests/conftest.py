#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import json
import logging
import os

import numpy as np
import pytest

from nas_evo.fitness.oracles import SyntheticLandscape
from nas_evo.search.cost import default_cost_table
from nas_evo.search.space import SearchSpaceSpec
from nas_evo.utils.logger import LOGGER_NAME

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), 'fixtures')


def load_fixture(name):
    with open(os.path.join(FIXTURE_DIR, name), 'r') as open_file:
        return json.load(open_file)


@pytest.fixture(autouse=True)
def reset_package_logger():
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def space_20x4():
    return SearchSpaceSpec(20, 4)


@pytest.fixture
def space_4x3():
    return SearchSpaceSpec(4, 3)


@pytest.fixture
def cost_table():
    return default_cost_table()


@pytest.fixture
def landscape(space_20x4, cost_table):
    return SyntheticLandscape.from_seed(space_20x4, seed=7, offset=60.,
                                        cost_table=cost_table)


@pytest.fixture
def small_config_data():
    """Quick experiment on the default 20 x 4 space."""
    return {
        'space': {'num_layers': 20, 'num_choices': 4},
        'cost_table': 'default',
        'evaluator': {'kind': 'landscape', 'seed': 3, 'offset': 60.},
        'strategies': [
            {'name': 'random', 'kind': 'random', 'budget': 60,
             'cost_bound': 1800},
            {'name': 'ea_ri', 'kind': 'ea', 'init_population': 20,
             'survivor_count': 10, 'batch_size': 5, 'total_budget': 60,
             'cost_bound': 1800},
            {'name': 'ea_nsdi', 'kind': 'ea', 'init_population': 20,
             'survivor_count': 10, 'batch_size': 5, 'total_budget': 60,
             'cost_bound': 1800,
             'init_method': {'nsdi': {'aps_max': 6, 'timeout': 500}}},
        ],
        'seeds': [0, 1],
        'output_dir': 'out',
    }
