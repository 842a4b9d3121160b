# -*- coding: utf-8 -*-
"""Nakagami fitting and the Kolmogorov-Smirnov distance of a sample to a
fitted law
"""
import logging

import numpy as np
from scipy import stats

from ..errors import (DegenerateSampleError, EmptyInputError,
                      InvalidArgumentError, TooFewSamplesError)

__author__ = 'ristide'
__all__ = ['MIN_SAMPLES', 'NakagamiFit', 'fit_nakagami', 'ks_distance']

MIN_SAMPLES = 20
#: relative variance floor under which a sample counts as constant
DEGENERATE_RATIO = 1e-12

logger = logging.getLogger(__name__)


class NakagamiFit(object):
    """A fitted Nakagami law with shape ``m`` and spread ``omega``"""
    def __init__(self, m, omega, n_samples):
        self._m = float(m)
        self._omega = float(omega)
        self._n_samples = int(n_samples)

    @property
    def m(self):
        return self._m

    @property
    def omega(self):
        return self._omega

    @property
    def n_samples(self):
        return self._n_samples

    @property
    def _dist(self):
        return stats.nakagami(self._m, scale=np.sqrt(self._omega))

    def cdf(self, x):
        return self._dist.cdf(x)

    def ppf(self, q):
        return self._dist.ppf(q)

    @property
    def _json(self):
        return {'m': self._m, 'omega': self._omega,
                'n_samples': self._n_samples}

    def __str__(self):
        return '<NakagamiFit>: m={:.4f} omega={:.4g} n={}'.format(
            self._m, self._omega, self._n_samples)
    __repr__ = __str__


def _finite(samples):
    x = np.asarray(samples, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError('samples', 'non-finite values',
                                   'finite gains')
    return x


def fit_nakagami(samples, refine=False):
    """Fit a Nakagami law by moments: ``omega = mean(x**2)`` and
    ``m = omega**2 / var(x**2)``, with m clamped to at least 0.5

    :param samples: linear gains; zeros are kept in the moments
    :param refine: polish the moment estimate by maximum likelihood over the
        positive samples, location fixed at zero
    :raises TooFewSamplesError: with fewer than 20 positive samples
    :raises DegenerateSampleError: when ``x**2`` has (numerically) no spread
    """
    x = _finite(samples)
    positive = x[x > 0]
    if len(positive) < MIN_SAMPLES:
        raise TooFewSamplesError('Nakagami fit needs {} positive samples, '
                                 'got {}'.format(MIN_SAMPLES, len(positive)))
    power = x ** 2
    omega = float(np.mean(power))
    spread = float(np.var(power))
    if spread <= (DEGENERATE_RATIO * omega) ** 2:
        raise DegenerateSampleError('Samples are constant, no Nakagami fit')
    m = max(0.5, omega ** 2 / spread)
    if refine:
        shape, _, scale = stats.nakagami.fit(positive, m, floc=0,
                                             scale=np.sqrt(omega))
        if np.isfinite(shape) and np.isfinite(scale) and scale > 0:
            m, omega = max(0.5, float(shape)), float(scale) ** 2
        else:
            logger.warning('likelihood refinement diverged, keeping moments')
    return NakagamiFit(m, omega, len(x))


def ks_distance(samples, fit):
    """Largest gap between the empirical CDF of *samples* and ``fit.cdf``,
    checked on both sides of every step

    :param fit: :class:`NakagamiFit` or any object with a vectorized ``cdf``
    :return: D* in [0, 1]
    """
    x = np.sort(_finite(samples))
    n = len(x)
    if n == 0:
        raise EmptyInputError('KS distance of an empty sample')
    model = np.asarray(fit.cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / float(n) - model
    lower = model - np.arange(0, n) / float(n)
    return float(np.clip(max(upper.max(), lower.max()), 0.0, 1.0))
