#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import itertools

import numpy as np
import pytest

from nas_evo.fitness.mmd import (
    KernelSpec, combined_loss, linear_kernel, median_heuristic_bandwidth,
    mmd_biased, mmd_unbiased, rbf_kernel)
from nas_evo.utils.exceptions import DegenerateDataError, DimensionError


def test_rbf_kernel():
    assert rbf_kernel([1., 2.], [1., 2.], 0.5) == 1.
    # squared distance of 2 bandwidth**2
    assert rbf_kernel([0.], [np.sqrt(2.) * 1.5], 1.5) == pytest.approx(
        np.exp(-1.))
    x = np.array([1., 0.])
    y = np.array([0., 1.])
    assert rbf_kernel(x, y, 1e6) >= 0.999999
    with pytest.raises(ValueError):
        rbf_kernel(x, y, 0.)
    with pytest.raises(DimensionError):
        rbf_kernel([1.], [1., 2.], 1.)


def test_median_heuristic():
    assert median_heuristic_bandwidth([0., 2.]) == pytest.approx(np.sqrt(2.))
    grid = np.array(list(itertools.product(range(3), range(3))), dtype=float)
    sq = [np.sum((a - b)**2) for a, b in itertools.combinations(grid, 2)]
    assert median_heuristic_bandwidth(grid) == pytest.approx(
        np.sqrt(np.median(sq) / 2.))
    with pytest.raises(DegenerateDataError):
        median_heuristic_bandwidth([[1., 1.]] * 4)


def test_median_heuristic_mostly_duplicated_points():
    # 6 of the 10 pairs coincide, the other 4 are 3 apart
    points = [0., 0., 0., 0., 3.]
    assert median_heuristic_bandwidth(points) == pytest.approx(
        np.sqrt(9. / 2.))
    points = [[1., 1.]] * 7 + [[1., 2.], [1., 3.]]
    non_zero = [1.] * 7 + [4.] * 7 + [1.]
    assert median_heuristic_bandwidth(points) == pytest.approx(
        np.sqrt(np.median(non_zero) / 2.))


def test_identical_sets_have_zero_mmd(rng):
    xs = rng.normal(size=(30, 3))
    assert mmd_biased(xs, xs) <= 1e-10
    assert abs(mmd_unbiased(xs, xs)) <= 1e-10
    assert mmd_unbiased(xs, xs) == pytest.approx(mmd_biased(xs, xs),
                                                 abs=1e-10)


def test_linear_kernel_hand_values():
    linear = KernelSpec('linear')
    assert mmd_biased([[0.]], [[2.]], linear) == pytest.approx(4.)
    assert mmd_unbiased([1., 3.], [2., 2.], linear,
                        form='ustat') == pytest.approx(-1.)
    assert linear_kernel([1., 2.], [3., 4.]) == 11.


def test_rbf_mmd_is_bounded(rng):
    xs = rng.normal(size=(20, 2))
    ys = rng.normal(3., size=(25, 2))
    value = mmd_biased(xs, ys)
    assert 0. <= value <= 2.


def test_input_errors(rng):
    with pytest.raises(ValueError):
        mmd_biased(np.empty((0, 2)), rng.normal(size=(3, 2)))
    with pytest.raises(DimensionError):
        mmd_biased(rng.normal(size=(3, 2)), rng.normal(size=(3, 3)))
    with pytest.raises(ValueError):
        mmd_unbiased(rng.normal(size=(1, 2)), rng.normal(size=(3, 2)))
    with pytest.raises(ValueError):
        mmd_unbiased(rng.normal(size=(3, 2)), rng.normal(size=(3, 2)),
                     form='exact')
    with pytest.raises(ValueError):
        KernelSpec('laplace')
    with pytest.raises(ValueError):
        KernelSpec('rbf', bandwidth=-1.)


def test_combined_loss():
    assert combined_loss(1., [0.3, 0.1], 0.5) == pytest.approx(1.2)
    assert combined_loss(0.7, [0.3, 0.1], 0.) == 0.7
    assert combined_loss(1., [0.3, 0.1]) == pytest.approx(1.2)


@pytest.mark.parametrize('kernel', [None, KernelSpec('rbf', 1.5),
                                    KernelSpec('linear')])
def test_biased_mmd_is_symmetric(rng, kernel):
    xs = rng.normal(size=(40, 3))
    ys = rng.normal(loc=0.5, size=(25, 3))
    assert mmd_biased(xs, ys, kernel) == pytest.approx(
        mmd_biased(ys, xs, kernel), rel=1e-12, abs=1e-12)
