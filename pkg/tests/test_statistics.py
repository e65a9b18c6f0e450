#!/usr/bin/env python
# -*- coding: utf-8 -*
from __future__ import print_function, division

import numpy as np
import pytest

from nas_evo.fitness.statistics import (
    pearson, std_standard_error, summary_statistics)
from nas_evo.utils.exceptions import DegenerateDataError


def test_pearson_examples():
    xs = np.arange(10.)
    assert pearson(xs, 2 * xs) == pytest.approx(1.)
    assert pearson(xs, -xs) == pytest.approx(-1.)
    # centered: (-1, 0, 1) and (0, -1, 1), covariance 1, variances 2
    assert pearson([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5)


def test_pearson_errors():
    with pytest.raises(DegenerateDataError):
        pearson([1., 1., 1.], [1., 2., 3.])
    with pytest.raises(ValueError):
        pearson([1.], [2.])
    with pytest.raises(ValueError):
        pearson([1., 2.], [1., 2., 3.])


def test_summary_statistics():
    mean, std = summary_statistics([1., 2., 3., 4.])
    assert mean == 2.5
    assert std == pytest.approx(np.std([1., 2., 3., 4.], ddof=1))
    assert summary_statistics([5.]) == (5., 0.)
    with pytest.raises(ValueError):
        summary_statistics([])


def test_std_standard_error():
    values = [1., 2., 3., 4., 5., 6., 7., 8., 9., 10.]
    _, std = summary_statistics(values)
    assert std_standard_error(values) == pytest.approx(std / np.sqrt(18.))
    assert std_standard_error([3.]) == 0.
    assert std_standard_error([3., 3., 3.]) == 0.
