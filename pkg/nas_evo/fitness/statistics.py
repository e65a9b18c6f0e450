#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Summary statistics for search results.
'''
from __future__ import print_function, division

import numpy as np
from scipy import stats

from nas_evo.utils.exceptions import DegenerateDataError, DimensionError


def pearson(xs, ys):
    '''Sample Pearson correlation coefficient.

    Parameters
    ----------
    xs, ys : array-like, shape=(n,)
        Paired samples, n >= 2.

    Returns
    -------
    float
        Value in [-1, 1].

    Raises
    ------
    DegenerateDataError
        If either sequence is constant.
    '''
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise DimensionError('Expected two sequences of equal length, got '
                             'shapes {} and {}'.format(xs.shape, ys.shape))
    if len(xs) < 2:
        raise ValueError('Need at least 2 pairs, got {}'.format(len(xs)))
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise DegenerateDataError('Pearson correlation of a constant series')
    r = stats.pearsonr(xs, ys)[0]
    return float(np.clip(r, -1., 1.))


def summary_statistics(values):
    '''Mean and sample standard deviation (ddof=1).

    Returns
    -------
    (float, float)
        The standard deviation of a single value is 0.
    '''
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError('Cannot summarize an empty sequence')
    if values.size == 1:
        return float(values[0]), 0.
    return float(values.mean()), float(values.std(ddof=1))


def std_standard_error(values):
    '''Standard error of the sample standard deviation.

    Uses the normal approximation std / sqrt(2 (n - 1)). For the ten seeds
    of a study this is about a quarter of the std itself.

    Returns
    -------
    float
        0 for fewer than two values.
    '''
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.
    _, std = summary_statistics(values)
    return float(std / np.sqrt(2. * (values.size - 1)))
