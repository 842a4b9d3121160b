# -*- coding: utf-8 -*-
"""Windowed drift statistics over a stream of gain samples.

A stream is cut into consecutive, non-overlapping windows of ``stride``
steps, dropping a trailing partial window. Every window gets a Nakagami fit
and its KS distance to that fit; every adjacent pair of windows gets the
normalized Jensen-Shannon divergence of their histograms on a shared
binning. Histograms are taken on a dB scale by default; outage samples sit
one decade under the weakest positive gain of the stream. One tile series
gets a PACF.
"""
import logging

import numpy as np

from ..errors import (DegenerateSampleError, InvalidArgumentError,
                      SeriesTooShortError, StreamTooShortError,
                      TooFewSamplesError)
from .divergence import (DEFAULT_BINS, js_divergence_normalized,
                         shared_edges, shared_histograms)
from .fit import fit_nakagami, ks_distance
from .pacf import pacf

__author__ = 'ristide'
__all__ = ['STRIDES', 'SCALES', 'GainStream', 'DriftReport', 'to_db',
           'windowed_drift_report']

STRIDES = (5, 10, 20, 50, 100)
SCALES = ('db', 'linear')

logger = logging.getLogger(__name__)


class GainStream(object):
    """Gain samples over time

    :param samples: one 1-D array of gain samples per step
    :param series: optional (steps, tiles) matrix of per-tile gains, used for
        the PACF. Defaults to the stacked samples when every step has the
        same number of samples
    :param alive: optional (steps, tiles) matrix of per-tile alive rates
    :param times: optional time of every step, in seconds
    """
    def __init__(self, samples, series=None, alive=None, times=None):
        self._samples = [np.asarray(s, dtype=float).ravel() for s in samples]
        if series is None and self._samples and \
                len(set(len(s) for s in self._samples)) == 1:
            series = np.vstack(self._samples)
        self._series = None if series is None else np.asarray(series,
                                                              dtype=float)
        self._alive = None if alive is None else np.asarray(alive,
                                                            dtype=float)
        self._times = None if times is None else list(times)

    @classmethod
    def from_array(cls, matrix, times=None):
        """Stream from a (steps, tiles) array"""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(list(matrix), series=matrix, times=times)

    @property
    def samples(self):
        return self._samples

    @property
    def series(self):
        return self._series

    @property
    def alive(self):
        return self._alive

    @property
    def times(self):
        return self._times

    def __len__(self):
        return len(self._samples)

    def __str__(self):
        return '<GainStream>: {} steps'.format(len(self))
    __repr__ = __str__


class DriftReport(object):
    """Result of :func:`windowed_drift_report`. A window whose fit was
    degenerate has None for its fit and its KSD
    """
    def __init__(self, window_stride, fits, ksd_series, jsd_series, pacf,
                 pacf_tile=None, pdf_edges=None, pdf_series=None,
                 scale='linear'):
        self.window_stride = window_stride
        self.fits = fits
        self.ksd_series = ksd_series
        self.jsd_series = jsd_series
        self.pacf = pacf
        self.pacf_tile = pacf_tile
        self.pdf_edges = pdf_edges
        self.pdf_series = pdf_series
        self.scale = scale

    @property
    def n_windows(self):
        return len(self.fits)

    @property
    def max_ksd(self):
        values = [k for k in self.ksd_series if k is not None]
        return max(values) if values else None

    @property
    def mean_jsd(self):
        return float(np.mean(self.jsd_series)) if self.jsd_series else None

    @property
    def _json(self):
        return {
            'window_stride': self.window_stride,
            'fits': [None if f is None else f._json for f in self.fits],
            'ksd_series': list(self.ksd_series),
            'jsd_series': list(self.jsd_series),
            'pacf': None if self.pacf is None else
            [float(v) for v in self.pacf],
            'pacf_tile': self.pacf_tile,
            'pdf_edges': None if self.pdf_edges is None else
            [float(v) for v in self.pdf_edges],
            'pdf_series': None if self.pdf_series is None else
            [[float(v) for v in row] for row in self.pdf_series],
            'scale': self.scale,
        }

    def __str__(self):
        return '<DriftReport>: stride={} windows={}'.format(
            self.window_stride, self.n_windows)
    __repr__ = __str__


def to_db(windows):
    """Return *windows* in dB. Values at or under zero are floored one
    decade below the smallest positive value across all of them
    """
    pooled = np.concatenate([np.ravel(w) for w in windows])
    positive = pooled[pooled > 0]
    floor = positive.min() / 10.0 if len(positive) else 1.0
    return [10.0 * np.log10(np.maximum(w, floor)) for w in windows]


def _pacf_of(stream, tile, kind, max_lag):
    matrix = stream.series if kind == 'gain' else stream.alive
    if matrix is None:
        raise InvalidArgumentError('pacf_series', kind,
                                   'a stream carrying that series')
    if tile is None:
        tile = int(np.argmax(stream.series.mean(axis=0)))
    try:
        return pacf(matrix[:, tile], max_lag), tile
    except (SeriesTooShortError, DegenerateSampleError) as err:
        logger.warning('no PACF for tile %d: %s', tile, err)
        return None, tile


def windowed_drift_report(stream, stride, bins=DEFAULT_BINS, max_lag=20,
                          pacf_tile=None, pacf_series='gain',
                          include_outage=True, threshold=None,
                          refine=False, scale='db'):
    """Compute the windowed drift statistics of *stream*

    :param stream: :class:`GainStream` or a (steps, tiles) array
    :param stride: window length in steps, one of :data:`STRIDES`
    :param bins: histogram bins for the JSD and the PDF evolution
    :param max_lag: PACF depth
    :param pacf_tile: tile whose series gets the PACF; defaults to the tile
        with the largest time-mean gain
    :param pacf_series: 'gain' or 'alive'
    :param include_outage: keep samples under *threshold* in the fits
    :param threshold: outage threshold, needed when *include_outage* is off
    :param refine: refine fits by maximum likelihood
    :param scale: 'db' or 'linear', the axis the JSD and PDF histograms
        are taken on. Fits always see the linear gains
    :raises StreamTooShortError: with fewer than two full windows
    """
    if stride not in STRIDES:
        raise InvalidArgumentError('stride', stride, STRIDES)
    if scale not in SCALES:
        raise InvalidArgumentError('scale', scale, SCALES)
    if not isinstance(stream, GainStream):
        stream = GainStream.from_array(stream)
    n_windows = len(stream) // stride
    if n_windows < 2:
        raise StreamTooShortError('Stream of {} steps is shorter than two '
                                  'windows of {}'.format(len(stream), stride))
    windows = [np.concatenate(stream.samples[w * stride:(w + 1) * stride])
               for w in range(n_windows)]

    fits, ksd = [], []
    for w, window in enumerate(windows):
        sample = window
        if not include_outage and threshold is not None:
            sample = window[window >= threshold]
        try:
            fit = fit_nakagami(sample, refine=refine)
        except (TooFewSamplesError, DegenerateSampleError) as err:
            logger.warning('window %d has no fit: %s', w, err)
            fits.append(None)
            ksd.append(None)
            continue
        fits.append(fit)
        ksd.append(ks_distance(sample, fit))

    binned = to_db(windows) if scale == 'db' else windows
    jsd = []
    for first, second in zip(binned[:-1], binned[1:]):
        p, q = shared_histograms(first, second, bins)
        jsd.append(js_divergence_normalized(p, q))

    edges = shared_edges(np.concatenate(binned), bins)
    pdf = []
    for window in binned:
        counts = np.histogram(window, edges)[0].astype(float)
        pdf.append(counts / counts.sum())

    values, tile = None, pacf_tile
    if stream.series is not None:
        values, tile = _pacf_of(stream, pacf_tile, pacf_series, max_lag)
    report = DriftReport(stride, fits, ksd, jsd, values, tile, edges, pdf,
                         scale)
    logger.debug('%s', report)
    return report
