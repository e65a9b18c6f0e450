#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Maximum mean discrepancy (MMD) estimators and kernels.

The squared MMD between distributions p and q is the squared RKHS
distance between their mean embeddings. With source samples xs (n_s) and
target samples ys (n_t) it is estimated by kernel sums:

    1/n_s^2 sum k(x, x') + 1/n_t^2 sum k(y, y') - 2/(n_s n_t) sum k(x, y)

The same expression is commonly labelled an unbiased estimator although
it keeps the diagonal terms. ``mmd_unbiased`` therefore offers both that
printed form (the default) and the diagonal-free U-statistic.
'''
from __future__ import print_function, division

import numpy as np
from scipy.spatial.distance import cdist, pdist

from nas_evo.utils.exceptions import DegenerateDataError, DimensionError

# weight of the domain adaptation terms in the combined training loss
DEFAULT_MMD_WEIGHT = 0.5

KERNELS = ('rbf', 'linear')
UNBIASED_FORMS = ('printed', 'ustat')


class KernelSpec(object):

    """Kernel choice for the MMD estimators.

    Parameters
    ----------
    name : str, optional
        'rbf' (default) or 'linear'.
    bandwidth : float, optional
        RBF bandwidth. If None it is chosen by the median heuristic on the
        pooled samples of each MMD call.
    """

    def __init__(self, name='rbf', bandwidth=None):
        if name not in KERNELS:
            raise ValueError('Unknown kernel {!r}, choose from {!r}'.format(
                name, KERNELS))
        if bandwidth is not None:
            bandwidth = float(bandwidth)
            if not bandwidth > 0:
                raise ValueError('Bandwidth must be > 0, got {!r}'.format(
                    bandwidth))
        self.name = name
        self.bandwidth = bandwidth

    def resolve(self, xs, ys):
        """Kernel with a concrete bandwidth for the given samples."""
        if self.name != 'rbf' or self.bandwidth is not None:
            return self
        return KernelSpec('rbf', median_heuristic_bandwidth(
            np.vstack((xs, ys))))

    def gram(self, a, b):
        '''Kernel matrix between the rows of a and b.

        Parameters
        ----------
        a : np.ndarray, shape=(n, d)
        b : np.ndarray, shape=(m, d)

        Returns
        -------
        np.ndarray, shape=(n, m)
        '''
        if self.name == 'linear':
            return np.dot(a, b.T)
        if self.bandwidth is None:
            raise ValueError('Unresolved RBF bandwidth, call resolve() first')
        return np.exp(-cdist(a, b, 'sqeuclidean') / (2. * self.bandwidth**2))

    def __repr__(self):
        return 'KernelSpec(name={!r}, bandwidth={!r})'.format(
            self.name, self.bandwidth)


def rbf_kernel(x, y, bandwidth):
    '''Gaussian kernel exp(-||x - y||^2 / (2 bandwidth^2)).

    Parameters
    ----------
    x, y : array-like, shape=(d,)
        Points of equal dimension.
    bandwidth : float
        Positive kernel width.

    Returns
    -------
    float
        Value in (0, 1].
    '''
    if not bandwidth > 0:
        raise ValueError('Bandwidth must be > 0, got {!r}'.format(bandwidth))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DimensionError('Points have shapes {} and {}'.format(
            x.shape, y.shape))
    return float(np.exp(-np.sum((x - y)**2) / (2. * bandwidth**2)))


def linear_kernel(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DimensionError('Points have shapes {} and {}'.format(
            x.shape, y.shape))
    return float(np.dot(x, y))


def median_heuristic_bandwidth(points):
    '''RBF bandwidth from the median pairwise squared distance.

    Parameters
    ----------
    points : array-like, shape=(n, d)
        At least two points. A flat sequence is read as 1-d points.

    Returns
    -------
    float
        sqrt(median(||p_i - p_j||^2) / 2) over all pairs i < j. When more
        than half of the pairs coincide the median is taken over the
        non-zero distances only.

    Raises
    ------
    DegenerateDataError
        If all points are identical.
    '''
    points = _as_points(points, 'points')
    if len(points) < 2:
        raise ValueError('Need at least 2 points, got {}'.format(len(points)))
    distances = pdist(points, 'sqeuclidean')
    median = np.median(distances)
    if not median > 0:
        distances = distances[distances > 0]
        if not distances.size:
            raise DegenerateDataError(
                'All points are identical, cannot choose a bandwidth')
        median = np.median(distances)
    return float(np.sqrt(median / 2.))


def mmd_biased(xs, ys, kernel=None):
    '''Biased (V-statistic) estimate of the squared MMD.

    Parameters
    ----------
    xs : array-like, shape=(n_s, d)
        Source samples.
    ys : array-like, shape=(n_t, d)
        Target samples.
    kernel : KernelSpec, optional
        Defaults to RBF with median heuristic bandwidth.

    Returns
    -------
    float
        Non-negative. Round-off below zero is clipped to 0.
    '''
    xs, ys, kernel = _prepare(xs, ys, kernel, min_size=1)
    value = _kernel_means(xs, ys, kernel)
    return max(value, 0.)


def mmd_unbiased(xs, ys, kernel=None, form='printed'):
    '''Squared MMD estimate as labelled unbiased.

    Parameters
    ----------
    xs : array-like, shape=(n_s, d)
        Source samples, n_s >= 2.
    ys : array-like, shape=(n_t, d)
        Target samples, n_t >= 2.
    kernel : KernelSpec, optional
        Defaults to RBF with median heuristic bandwidth.
    form : str, optional
        'printed': 1/n^2 normalization including the diagonal terms. This
        coincides with mmd_biased up to the clipping at zero.
        'ustat': diagonal terms dropped and 1/(n (n - 1)) normalization.
        Can be slightly negative.

    Returns
    -------
    float
    '''
    if form not in UNBIASED_FORMS:
        raise ValueError('Unknown form {!r}, choose from {!r}'.format(
            form, UNBIASED_FORMS))
    xs, ys, kernel = _prepare(xs, ys, kernel, min_size=2)
    if form == 'printed':
        return _kernel_means(xs, ys, kernel)

    n_s, n_t = len(xs), len(ys)
    k_xx = kernel.gram(xs, xs)
    k_yy = kernel.gram(ys, ys)
    k_xy = kernel.gram(xs, ys)
    term_x = (k_xx.sum() - np.trace(k_xx)) / (n_s * (n_s - 1))
    term_y = (k_yy.sum() - np.trace(k_yy)) / (n_t * (n_t - 1))
    return float(term_x + term_y - 2. * k_xy.mean())


def combined_loss(cls_loss, mmd_terms, weight=DEFAULT_MMD_WEIGHT):
    '''Classification loss plus weighted domain adaptation terms.

    Parameters
    ----------
    cls_loss : float
        Classification loss.
    mmd_terms : list of float
        One MMD estimate per target distribution.
    weight : float, optional
        Balancing coefficient lambda.

    Returns
    -------
    float
        cls_loss + weight * sum(mmd_terms)
    '''
    return float(cls_loss) + float(weight) * float(sum(mmd_terms))


def _as_points(values, name):
    points = np.asarray(values, dtype=float)
    if points.ndim == 1:
        points = points[:, np.newaxis]
    if points.ndim != 2:
        raise DimensionError('{} must be a list of vectors, got shape {}'.format(
            name, points.shape))
    if not np.isfinite(points).all():
        raise ValueError('{} contains non-finite values'.format(name))
    return points


def _prepare(xs, ys, kernel, min_size):
    xs = _as_points(xs, 'xs')
    ys = _as_points(ys, 'ys')
    if len(xs) < min_size or len(ys) < min_size:
        raise ValueError('Need at least {} samples per set, got {} and {}'.format(
            min_size, len(xs), len(ys)))
    if xs.shape[1] != ys.shape[1]:
        raise DimensionError('Sample dimensions differ: {} and {}'.format(
            xs.shape[1], ys.shape[1]))
    if kernel is None:
        kernel = KernelSpec()
    return xs, ys, kernel.resolve(xs, ys)


def _kernel_means(xs, ys, kernel):
    return float(kernel.gram(xs, xs).mean() +
                 kernel.gram(ys, ys).mean() -
                 2. * kernel.gram(xs, ys).mean())
