# -*- coding: utf-8 -*-
"""ristide.core is a utilities module for use internally within the ristide
library itself: seeded generator streams, small vector helpers and the
timestamped event history used by run manifests.
"""
import logging
import zlib
from collections import OrderedDict
from datetime import datetime

import numpy as np

from .errors import GeometryError, InvalidArgumentError

__author__ = 'ristide'
__all__ = ['settings_dict', 'as_point', 'unit', 'SeedStreams',
           'History']


def settings_dict(section):
    """Return the settings of a scenario *section* that were actually set,
    in key order. Settings left at None are omitted, so a scenario echo in
    meta.json lists only what the run was given
    """
    return OrderedDict((key, value) for key, value in section.items()
                       if value is not None and not callable(value))


def as_point(value, dim=3, name='point'):
    """Return *value* as a finite float array of length *dim*

    :param value: any sequence of numbers, or an object exposing a
        ``position`` attribute
    :param dim: expected dimension
    :param name: argument name reported on error
    """
    value = getattr(value, 'position', value)
    arr = np.asarray(value, dtype=float)
    if arr.shape != (dim,) or not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(name, value)
    return arr


def unit(vector, name='vector'):
    """Return *vector* scaled to unit length

    :raises GeometryError: for a zero length vector
    """
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if norm <= 0.0:
        raise GeometryError('Zero length {} has no direction'.format(name))
    return vector / norm


class SeedStreams(object):
    """Derive independent, named :class:`numpy.random.Generator` streams from
    one master seed. A stream is identified by a subsystem name and an index,
    so the order in which streams are requested never changes their content
    """
    def __init__(self, seed):
        """Create a :class:`~ristide.core.SeedStreams` object

        :param seed: non-negative master seed, up to 64 bits
        """
        try:
            seed = int(seed)
        except (TypeError, ValueError):
            raise InvalidArgumentError('seed', seed)
        if seed < 0 or seed >= 2 ** 64:
            raise InvalidArgumentError('seed', seed, '0 <= seed < 2**64')
        self._seed = seed

    @property
    def seed(self):
        """The master seed"""
        return self._seed

    def generator(self, subsystem, index=0):
        """Return the generator for (*subsystem*, *index*)"""
        key = (zlib.crc32(subsystem.encode('utf-8')), int(index))
        sequence = np.random.SeedSequence(self._seed, spawn_key=key)
        return np.random.default_rng(sequence)

    def __str__(self):
        return '<SeedStreams>: {}'.format(self._seed)
    __repr__ = __str__


class History(list):
    """Run events as ``(iso_time, event, *details)`` tuples, such as
    ``('...', 'start', seed)`` or ``('...', 'finish', audited, mismatches)``.
    Written to meta.json as the run history
    """
    def __init__(self, *args, **kwargs):
        super(History, self).__init__(*args, **kwargs)
        self.logger = logging.getLogger('History')

    def append(self, event):
        """Record *event*, an event name or a sequence of the name followed
        by its details, stamped with the current time
        """
        if isinstance(event, str):
            event = [event]
        entry = (datetime.now().isoformat(),) + tuple(event)
        self.logger.debug('%s %s', entry[1], list(entry[2:]))
        super(History, self).append(entry)
