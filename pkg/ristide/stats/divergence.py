# -*- coding: utf-8 -*-
"""Histograms on a shared binning and the normalized (base 2)
Jensen-Shannon divergence between them
"""
import numpy as np
from scipy.stats import entropy

from ..errors import BinningMismatchError, EmptyInputError

__author__ = 'ristide'
__all__ = ['DEFAULT_BINS', 'SMOOTHING', 'Histogram', 'shared_edges',
           'shared_histograms', 'js_divergence_normalized']

DEFAULT_BINS = 64
SMOOTHING = 1e-12


class Histogram(object):
    """Bin counts with their edges. ``smoothing`` is added to every bin
    before normalizing
    """
    def __init__(self, counts, edges=None, smoothing=0.0):
        self._counts = np.asarray(counts, dtype=float)
        self._edges = None if edges is None else np.asarray(edges,
                                                            dtype=float)
        self._smoothing = float(smoothing)

    @property
    def counts(self):
        return self._counts

    @property
    def edges(self):
        return self._edges

    @property
    def total(self):
        return float(self._counts.sum())

    def same_binning(self, other):
        if len(self._counts) != len(other.counts):
            return False
        if self._edges is None or other.edges is None:
            return self._edges is None and other.edges is None
        return np.array_equal(self._edges, other.edges)

    def probabilities(self):
        """Normalized bin masses"""
        if self.total <= 0:
            raise EmptyInputError('Histogram is empty')
        mass = self._counts + self._smoothing
        return mass / mass.sum()

    def __len__(self):
        return len(self._counts)

    def __str__(self):
        return '<Histogram>: {} bins, total {}'.format(len(self),
                                                       self.total)
    __repr__ = __str__


def shared_edges(values, bins=DEFAULT_BINS):
    """Uniform edges over the min-max range of *values*"""
    values = np.asarray(values, dtype=float).ravel()
    if len(values) == 0:
        raise EmptyInputError('No values to bin')
    return np.histogram_bin_edges(values, bins=bins)


def shared_histograms(x, y, bins=DEFAULT_BINS, smoothing=SMOOTHING):
    """Histogram two samples on uniform bins spanning their pooled range

    :return: a pair of :class:`Histogram` sharing one set of edges
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if len(x) == 0 or len(y) == 0:
        raise EmptyInputError('Cannot histogram an empty window')
    edges = shared_edges(np.concatenate([x, y]), bins)
    return (Histogram(np.histogram(x, edges)[0], edges, smoothing),
            Histogram(np.histogram(y, edges)[0], edges, smoothing))


def js_divergence_normalized(p, q):
    """Jensen-Shannon divergence of *p* and *q* with base 2 logarithms, so
    the value lies in [0, 1]

    :param p: :class:`Histogram`, or a sequence of bin masses
    :param q: same binning as *p*
    :raises BinningMismatchError: when the binnings differ
    :raises EmptyInputError: when either histogram is empty
    """
    if not isinstance(p, Histogram):
        p = Histogram(p)
    if not isinstance(q, Histogram):
        q = Histogram(q)
    if not p.same_binning(q):
        raise BinningMismatchError('Histograms must share their binning')
    p_mass = p.probabilities()
    q_mass = q.probabilities()
    mixed = 0.5 * (p_mass + q_mass)
    value = 0.5 * (entropy(p_mass, mixed, base=2) +
                   entropy(q_mass, mixed, base=2))
    return float(np.clip(value, 0.0, 1.0))
