#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Command line interface.

    nas-evo [-v] search       one trial of a strategy
    nas-evo [-v] study        every (strategy, seed) pair of a config
    nas-evo [-v] aps          initial population similarity per seed
    nas-evo [-v] mmd          MMD between two CSV feature files
    nas-evo [-v] report       re-aggregate the trial files of a study
    nas-evo [-v] correlation  validation/test correlation per regime

Exit status is 0 on success, 1 on usage errors and 2 on runtime errors.
'''
from __future__ import print_function, division

import json
import logging
import os
import sys

import click
import numpy as np

from nas_evo import __version__
from nas_evo.fitness.mmd import KERNELS, KernelSpec, mmd_biased, mmd_unbiased
from nas_evo.fitness.oracles import CORRELATION_REGIMES
from nas_evo.study.config import load_config
from nas_evo.study.report import TRIALS_DIR, StudyReport, trial_file_name
from nas_evo.study.runner import (
    APS_COLUMNS, DEFAULT_CORRELATION_SAMPLES, aps_study, correlation_study,
    run_study, run_trial)
from nas_evo.utils.exceptions import DimensionError, NasEvoError
from nas_evo.utils.logger import setup_logging

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class NasEvoGroup(click.Group):

    """Group mapping failures onto the exit codes of this tool."""

    def main(self, args=None, prog_name=None, complete_var=None,
             standalone_mode=True, **extra):
        try:
            rv = super(NasEvoGroup, self).main(
                args=args, prog_name=prog_name, complete_var=complete_var,
                standalone_mode=False, **extra)
        except click.UsageError as e:
            e.show()
            code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            code = EXIT_RUNTIME
        except click.exceptions.Abort:
            click.echo('Aborted!', err=True)
            code = EXIT_USAGE
        except (NasEvoError, OSError, ValueError) as e:
            click.echo('Error: {}'.format(e), err=True)
            code = EXIT_RUNTIME
        else:
            code = rv if isinstance(rv, int) else EXIT_OK
        if not standalone_mode:
            return code
        sys.exit(code)


def _echo_json(data):
    click.echo(json.dumps(data, sort_keys=True, indent=2))


def _load(config_path, out=None, seeds=None):
    cfg = load_config(config_path)
    if out is not None:
        cfg = cfg.with_output_dir(out)
    if seeds:
        cfg = cfg.with_seeds(list(seeds))
    return cfg


config_option = click.option(
    '--config', 'config_path', required=True,
    type=click.Path(exists=True, dir_okay=False),
    help='Experiment config (JSON or YAML).')
out_option = click.option(
    '--out', type=click.Path(file_okay=False),
    help='Output directory, overrides output_dir of the config.')
parallel_option = click.option(
    '--parallel', type=click.IntRange(min=1), default=None,
    help='Worker processes. Defaults to the number of CPUs.')


@click.group(cls=NasEvoGroup)
@click.version_option(__version__)
@click.option('-v', '--verbose', is_flag=True, help='Debug logging.')
def cli(verbose):
    setup_logging(logging.DEBUG if verbose else logging.WARNING)


@cli.command()
@config_option
@click.option('--strategy', 'strategy_name', default=None,
              help='Strategy name, defaults to the first one.')
@click.option('--seed', type=click.IntRange(min=0), default=None,
              help='Trial seed, defaults to the first seed of the config.')
@out_option
def search(config_path, strategy_name, seed, out):
    '''Run a single trial and write its trial file.'''
    cfg = _load(config_path, out)
    strategy = cfg.strategy(strategy_name)
    if seed is None:
        seed = cfg.seeds[0]
    record = run_trial(cfg, strategy, seed)
    trials_dir = os.path.join(cfg.output_dir, TRIALS_DIR)
    if not os.path.isdir(trials_dir):
        os.makedirs(trials_dir)
    path = os.path.join(trials_dir, trial_file_name(strategy.name, seed))
    with open(path, 'w') as open_file:
        open_file.write(record.to_json())
        open_file.write('\n')
    summary = {'strategy': strategy.name, 'seed': seed,
               'evaluated_count': record.evaluated_count,
               'init_aps': record.init_aps, 'trial_file': path}
    if record.best is not None:
        genome, report = record.best
        summary['best'] = dict(report._asdict(), genome=genome.tolist())
    _echo_json(summary)


@cli.command()
@config_option
@click.option('--seed', 'seeds', type=click.IntRange(min=0), multiple=True,
              help='Seeds to run instead of the config seeds. Repeatable.')
@parallel_option
@out_option
def study(config_path, seeds, parallel, out):
    '''Run every strategy for every seed.'''
    cfg = _load(config_path, out, seeds)
    report = run_study(cfg, parallel=parallel)
    _echo_json({'aggregates': report.aggregates,
                'correlation': report.correlation,
                'failures': report.failures,
                'output_dir': cfg.output_dir})


@cli.command()
@config_option
@click.option('--seed', 'seeds', type=click.IntRange(min=0), multiple=True,
              help='Seeds to run instead of the config seeds. Repeatable.')
@parallel_option
@out_option
def aps(config_path, seeds, parallel, out):
    '''Average population similarity of the initializers.'''
    cfg = _load(config_path, out, seeds)
    rows = aps_study(cfg, parallel=parallel)
    click.echo(','.join(APS_COLUMNS))
    for row in rows:
        click.echo(','.join('' if row[k] is None else str(row[k])
                            for k in APS_COLUMNS))


@cli.command()
@click.argument('file_a', type=click.Path(dir_okay=False))
@click.argument('file_b', type=click.Path(dir_okay=False))
@click.option('--kernel', type=click.Choice(KERNELS), default='rbf',
              show_default=True)
@click.option('--bandwidth', type=float, default=None,
              help='RBF bandwidth, median heuristic if omitted.')
def mmd(file_a, file_b, kernel, bandwidth):
    '''MMD estimates between two CSV feature files, one sample per row.'''
    xs = np.loadtxt(file_a, delimiter=',', ndmin=2)
    ys = np.loadtxt(file_b, delimiter=',', ndmin=2)
    if xs.shape[1] != ys.shape[1]:
        raise DimensionError('{} has {} columns, {} has {}'.format(
            file_a, xs.shape[1], file_b, ys.shape[1]))
    spec = KernelSpec(kernel, bandwidth).resolve(xs, ys)
    result = {'kernel': spec.name,
              'bandwidth': spec.bandwidth,
              'biased': mmd_biased(xs, ys, spec)}
    if len(xs) >= 2 and len(ys) >= 2:
        result['unbiased_printed'] = mmd_unbiased(xs, ys, spec, 'printed')
        result['unbiased_ustat'] = mmd_unbiased(xs, ys, spec, 'ustat')
    _echo_json(result)


@cli.command()
@click.option('--out', required=True,
              type=click.Path(exists=True, file_okay=False),
              help='Output directory of a study.')
def report(out):
    '''Re-aggregate the trial files of a study.'''
    study_report = StudyReport.load(out)
    study_report.write(out)
    _echo_json(study_report.to_summary())


@cli.command()
@config_option
@click.option('--samples', type=click.IntRange(min=2),
              default=DEFAULT_CORRELATION_SAMPLES, show_default=True)
@click.option('--seed', type=click.IntRange(min=0), default=0,
              show_default=True)
@click.option('--regime', 'regimes', multiple=True,
              type=click.Choice(sorted(CORRELATION_REGIMES)),
              help='Regimes to measure, all by default. Repeatable.')
@out_option
def correlation(config_path, samples, seed, regimes, out):
    '''Validation/test correlation of the named regimes.'''
    cfg = _load(config_path, out)
    measured = correlation_study(cfg, num_samples=samples, seed=seed,
                                 regimes=list(regimes) or None)
    _echo_json(measured)


def main(args=None):
    cli.main(args=args, prog_name='nas-evo')


if __name__ == '__main__':
    main()
