#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from nas_evo.fitness.mmd import KernelSpec, mmd_biased
from nas_evo.study.cli import EXIT_RUNTIME, EXIT_USAGE, cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_path(tmp_path, small_config_data):
    path = tmp_path / 'study.json'
    path.write_text(json.dumps(small_config_data))
    return str(path)


def _write_points(path, points):
    np.savetxt(str(path), np.asarray(points, dtype=float), delimiter=',')
    return str(path)


def test_mmd_identical_files(runner, tmp_path, rng):
    points = rng.normal(size=(20, 3))
    path = _write_points(tmp_path / 'a.csv', points)
    result = runner.invoke(cli, ['mmd', path, path])
    assert result.exit_code == 0, result.output
    values = json.loads(result.output)
    assert values['biased'] <= 1e-10
    assert values['kernel'] == 'rbf'
    assert values['bandwidth'] > 0


def test_mmd_linear_kernel_matches_hand_value(runner, tmp_path):
    padding = [[1.], [1.], [1.]]
    a = _write_points(tmp_path / 'a.csv', [[0.]] + padding)
    b = _write_points(tmp_path / 'b.csv', [[2.]] + padding)
    result = runner.invoke(cli, ['mmd', a, b, '--kernel', 'linear'])
    assert result.exit_code == 0, result.output
    values = json.loads(result.output)
    # difference of the means is (0 - 2) / 4
    assert values['biased'] == pytest.approx(0.25)
    assert values['unbiased_printed'] == pytest.approx(0.25)
    xs = np.array([[0.]] + padding)
    ys = np.array([[2.]] + padding)
    assert values['biased'] == pytest.approx(
        mmd_biased(xs, ys, KernelSpec('linear')))
    assert 'unbiased_ustat' in values


def test_mmd_errors(runner, tmp_path):
    a = _write_points(tmp_path / 'a.csv', [[0., 1.], [1., 1.]])
    b = _write_points(tmp_path / 'b.csv', [[0.], [1.]])
    result = runner.invoke(cli, ['mmd', a, str(tmp_path / 'missing.csv')])
    assert result.exit_code == EXIT_RUNTIME
    assert 'missing.csv' in result.output
    result = runner.invoke(cli, ['mmd', a, b])
    assert result.exit_code == EXIT_RUNTIME
    assert 'columns' in result.output
    result = runner.invoke(cli, ['mmd', a, a, '--kernel', 'cosine'])
    assert result.exit_code == EXIT_USAGE


def test_usage_errors(runner):
    assert runner.invoke(cli, ['frobnicate']).exit_code == EXIT_USAGE
    assert runner.invoke(cli, ['study']).exit_code == EXIT_USAGE
    result = runner.invoke(cli, ['study', '--config', 'nowhere.json'])
    assert result.exit_code == EXIT_USAGE


def test_invalid_config_is_runtime_error(runner, tmp_path, small_config_data):
    small_config_data['seeds'] = []
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps(small_config_data))
    result = runner.invoke(cli, ['study', '--config', str(path)])
    assert result.exit_code == EXIT_RUNTIME
    assert 'seeds' in result.output


def test_search_writes_trial_file(runner, tmp_path, config_path):
    out = str(tmp_path / 'search')
    result = runner.invoke(cli, ['search', '--config', config_path,
                                 '--strategy', 'ea_ri', '--seed', '4',
                                 '--out', out])
    assert result.exit_code == 0, result.output
    summary = json.loads(result.output)
    assert summary['evaluated_count'] == 60
    assert len(summary['best']['genome']) == 20
    path = os.path.join(out, 'trials', 'ea_ri_seed4.json')
    assert summary['trial_file'] == path
    with open(path) as open_file:
        trial = json.load(open_file)
    assert trial['seed'] == 4
    assert trial['evaluator']['kind'] == 'landscape'


def test_study_then_report(runner, tmp_path, config_path):
    out = str(tmp_path / 'study')
    result = runner.invoke(cli, ['study', '--config', config_path,
                                 '--parallel', '1', '--seed', '5',
                                 '--out', out])
    assert result.exit_code == 0, result.output
    aggregates = json.loads(result.output)['aggregates']
    assert aggregates['ea_nsdi']['n_ok'] == 1
    assert len(os.listdir(os.path.join(out, 'trials'))) == 3

    result = runner.invoke(cli, ['report', '--out', out])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)['aggregates'] == aggregates


def test_aps_command(runner, tmp_path, config_path):
    result = runner.invoke(cli, ['aps', '--config', config_path,
                                 '--parallel', '1', '--out',
                                 str(tmp_path / 'aps')])
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == 'method,seed,aps,samples_drawn,final_threshold'
    assert len(lines) == 5


def test_correlation_command(runner, tmp_path, config_path):
    result = runner.invoke(cli, ['correlation', '--config', config_path,
                                 '--samples', '200', '--regime', 'baseline',
                                 '--out', str(tmp_path / 'corr')])
    assert result.exit_code == 0, result.output
    assert list(json.loads(result.output)) == ['baseline']


def test_verbose_flag(runner, tmp_path, config_path):
    result = runner.invoke(cli, ['-v', 'search', '--config', config_path,
                                 '--out', str(tmp_path / 'v')])
    assert result.exit_code == 0
    assert 'nas_evo.' in result.output
