# -*- coding: utf-8 -*-
"""Partial autocorrelation through the Durbin-Levinson recursion"""
import numpy as np
from statsmodels.tsa.stattools import acovf, levinson_durbin

from ..errors import (DegenerateSampleError, InvalidArgumentError,
                      SeriesTooShortError)

__author__ = 'ristide'
__all__ = ['pacf', 'confidence_band']


def pacf(series, max_lag):
    """PACF of *series* up to *max_lag*, from the biased, demeaned sample
    autocovariance. Element 0 is 1

    :raises SeriesTooShortError: unless ``len(series) > max_lag + 1``
    :raises DegenerateSampleError: for a constant series
    """
    x = np.asarray(series, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError('series', 'non-finite values')
    max_lag = int(max_lag)
    if max_lag < 1:
        raise InvalidArgumentError('max_lag', max_lag, '>= 1')
    if len(x) <= max_lag + 1:
        raise SeriesTooShortError('PACF to lag {} needs more than {} '
                                  'values, got {}'.format(max_lag,
                                                          max_lag + 1,
                                                          len(x)))
    if np.var(x) <= 0:
        raise DegenerateSampleError('PACF of a constant series')
    cov = acovf(x, adjusted=False, demean=True, fft=False, nlag=max_lag)
    values = levinson_durbin(cov, nlags=max_lag, isacov=True)[2]
    values = np.asarray(values, dtype=float)
    values[0] = 1.0
    return values


def confidence_band(n):
    """Half width of the 95% band for white noise of length *n*"""
    return 2.0 / np.sqrt(n)
