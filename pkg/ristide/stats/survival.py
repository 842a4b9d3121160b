# -*- coding: utf-8 -*-
"""Survival fields and shadow fractions"""
import numpy as np

from ..errors import EmptyInputError, InvalidArgumentError

__author__ = 'ristide'
__all__ = ['SurvivalField', 'SurvivalAccumulator', 'survival_field',
           'union_masks', 'shadow_fraction', 'wall_symmetry']


class SurvivalField(object):
    """Per-tile fraction of alive samples on one wall"""
    def __init__(self, wall_id, rates, n_samples):
        self._wall_id = wall_id
        self._rates = np.asarray(rates, dtype=float)
        self._n_samples = int(n_samples)

    @property
    def wall_id(self):
        return self._wall_id

    @property
    def rates(self):
        return self._rates

    @property
    def n_samples(self):
        return self._n_samples

    @property
    def mean(self):
        return float(self._rates.mean())

    def __len__(self):
        return len(self._rates)

    def __str__(self):
        return '<SurvivalField>: {} mean={:.4f} n={}'.format(
            self._wall_id, self.mean, self._n_samples)
    __repr__ = __str__


class SurvivalAccumulator(object):
    """Running alive counts per tile for one wall"""
    def __init__(self, wall_id, n_tiles):
        self._wall_id = wall_id
        self._alive = np.zeros(n_tiles, dtype=np.int64)
        self._count = 0

    def add(self, alive):
        """Add one or more rows of alive flags"""
        alive = np.atleast_2d(np.asarray(alive, dtype=bool))
        self._alive += alive.sum(axis=0)
        self._count += alive.shape[0]

    @property
    def count(self):
        return self._count

    def field(self):
        if self._count == 0:
            raise EmptyInputError('No samples for wall {}'.format(
                self._wall_id))
        return SurvivalField(self._wall_id, self._alive / float(self._count),
                             self._count)


def survival_field(fields, window=None):
    """Per-tile mean of the alive flags of *fields*

    :param fields: :class:`~ristide.sim.channel.GainField` objects of one
        wall
    :param window: optional ``(start, stop)`` slice into *fields*
    :raises EmptyInputError: when the window holds no field
    """
    fields = list(fields)
    if window is not None:
        fields = fields[window[0]:window[1]]
    if not fields:
        raise EmptyInputError('Survival over an empty window')
    wall_id = fields[0].wall_id
    size = len(fields[0])
    for field in fields:
        if field.wall_id != wall_id or len(field) != size:
            raise InvalidArgumentError('fields', field,
                                       'fields of wall {}'.format(wall_id))
    alive = np.vstack([field.alive for field in fields])
    return SurvivalField(wall_id, alive.mean(axis=0), len(fields))


def union_masks(masks):
    """OR together :class:`~ristide.sim.visibility.TileMask` objects of one
    wall
    """
    masks = list(masks)
    if not masks:
        raise EmptyInputError('No masks to combine')
    union = masks[0]
    for mask in masks[1:]:
        union = union | mask
    return union


def shadow_fraction(mask):
    """Share of shadowed tiles in a mask (or a boolean array)"""
    bits = np.asarray(getattr(mask, 'bits', mask), dtype=bool)
    if bits.size == 0:
        raise EmptyInputError('Shadow fraction of an empty mask')
    return float(bits.sum()) / bits.size


def wall_symmetry(summary, first='S3', second='S4'):
    """Absolute difference of mean survival between two walls, overall and
    per phase. Phases where either wall has no survival sample are left out

    :param summary: :class:`~ristide.sim.engine.RunSummary`
    """
    result = {}
    sliced = [('all', summary.survival)] + sorted(
        summary.phase_survival.items())
    for phase, fields in sliced:
        if first in fields and second in fields:
            result[phase] = abs(fields[first].mean - fields[second].mean)
    return result
