# -*- coding: utf-8 -*-
"""Scenario configuration. A scenario is a versioned JSON document with a
few top-level run settings and one section per concern::

    {"schema_version": 1, "band": "mmw28", "n_users": 8, "n_aps": 4,
     "duration_steps": 2000, "dt": 0.1, "seed": 0, "snapshot_every": 5,
     "layout": {...}, "mobility": {...}, "orientation": {...},
     "schedule": {...}, "stats": {...}, "outputs": {...},
     "fixed_receivers": [...]}

The shipped presets R1, R2 and R3 load by name through
:func:`load_scenario`.
"""
import copy
import json
import logging
import os
import pkgutil

from ..core import settings_dict
from ..errors import ConfigError, InvalidArgumentError
from ..stats.report import SCALES, STRIDES
from .channel import BANDS, Receiver, get_band
from .geometry import WALL_IDS, LayoutSpec
from .mobility import MobilityParams, OrientationParams, PhaseSchedule

__author__ = 'ristide'
__all__ = ['SCHEMA_VERSION', 'PRESETS', 'STRIDES', 'SINKS', 'StatsConfig',
           'OutputsConfig', 'ScenarioConfig', 'load_scenario']

SCHEMA_VERSION = 1
PRESETS = ('R1', 'R2', 'R3')
SINKS = ('trajectory', 'gains', 'masks', 'report')
AP_COUNTS = (1, 4, 9)

logger = logging.getLogger(__name__)


class StatsConfig(object):
    """Settings of the drift statistics computed for a run"""
    _defaults = {'stride': 20, 'bins': 64, 'max_lag': 20,
                 'pacf_series': 'gain', 'pacf_tile': None,
                 'include_outage': True, 'refine_fit': False,
                 'jsd_scale': 'db', 'walls': list(WALL_IDS)}

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self._defaults)
        if unknown:
            raise InvalidArgumentError('stats', sorted(unknown),
                                       sorted(self._defaults))
        self._build(dict(copy.deepcopy(self._defaults), **kwargs))

    def _build(self, data):
        for key, val in data.items():
            setattr(self, '_' + key, val)
        if self._stride not in STRIDES:
            raise InvalidArgumentError('stride', self._stride, STRIDES)
        if not isinstance(self._bins, int) or self._bins < 1:
            raise InvalidArgumentError('bins', self._bins)
        if not isinstance(self._max_lag, int) or self._max_lag < 1:
            raise InvalidArgumentError('max_lag', self._max_lag)
        if self._pacf_series not in ('gain', 'alive'):
            raise InvalidArgumentError('pacf_series', self._pacf_series,
                                       ('gain', 'alive'))
        if self._jsd_scale not in SCALES:
            raise InvalidArgumentError('jsd_scale', self._jsd_scale, SCALES)
        bad = [w for w in self._walls if w not in WALL_IDS]
        if bad:
            raise InvalidArgumentError('walls', bad, WALL_IDS)

    @property
    def stride(self):
        return self._stride

    @stride.setter
    def stride(self, value):
        if value not in STRIDES:
            raise InvalidArgumentError('stride', value, STRIDES)
        self._stride = value

    @property
    def bins(self):
        return self._bins

    @property
    def max_lag(self):
        return self._max_lag

    @property
    def pacf_series(self):
        return self._pacf_series

    @property
    def pacf_tile(self):
        return self._pacf_tile

    @property
    def include_outage(self):
        return self._include_outage

    @property
    def refine_fit(self):
        return self._refine_fit

    @property
    def jsd_scale(self):
        return self._jsd_scale

    @property
    def walls(self):
        return list(self._walls)

    @property
    def _json(self):
        return {key: getattr(self, '_' + key) for key in self._defaults}


class OutputsConfig(object):
    """Which sinks a run writes and how the gain CSV is thinned"""
    def __init__(self, sinks=None, gains=None):
        """Create an :class:`~ristide.sim.config.OutputsConfig`

        :param sinks: subset of :data:`SINKS`; ``masks`` is off by default
        :param gains: optional filter dict with ``walls`` (list of wall ids)
            and ``every`` (write every n-th emitted field)
        """
        if sinks is None:
            sinks = ['trajectory', 'gains', 'report']
        bad = [s for s in sinks if s not in SINKS]
        if bad:
            raise InvalidArgumentError('outputs.sinks', bad, SINKS)
        gains = dict(gains or {})
        walls = gains.pop('walls', list(WALL_IDS))
        every = gains.pop('every', 1)
        if gains:
            raise InvalidArgumentError('outputs.gains', sorted(gains),
                                       ['walls', 'every'])
        if [w for w in walls if w not in WALL_IDS]:
            raise InvalidArgumentError('outputs.gains.walls', walls, WALL_IDS)
        if not isinstance(every, int) or every < 1:
            raise InvalidArgumentError('outputs.gains.every', every)
        self._sinks = list(sinks)
        self._gain_walls = list(walls)
        self._gain_every = every

    @property
    def sinks(self):
        return list(self._sinks)

    @property
    def gain_walls(self):
        return list(self._gain_walls)

    @property
    def gain_every(self):
        return self._gain_every

    def __contains__(self, sink):
        return sink in self._sinks

    @classmethod
    def from_dict(cls, data):
        if isinstance(data, list):
            return cls(sinks=data)
        data = dict(data or {})
        try:
            return cls(**data)
        except TypeError:
            raise InvalidArgumentError('outputs', sorted(data),
                                       ['sinks', 'gains'])

    @property
    def _json(self):
        return {'sinks': self.sinks,
                'gains': {'walls': self.gain_walls,
                          'every': self._gain_every}}


def _fixed_receiver(data):
    try:
        return Receiver.from_angles(data['position'],
                                    data.get('polar_deg', 0.0),
                                    data.get('azimuth_deg', 0.0))
    except (KeyError, TypeError):
        raise InvalidArgumentError('fixed_receivers', data,
                                   'position, polar_deg, azimuth_deg')


class ScenarioConfig(object):
    """Everything needed to run one simulation. Top-level keys map onto
    ``_``-prefixed attributes, sections onto their own config objects
    """
    _top = {'band': 'mmw28', 'n_users': 8, 'n_aps': 4,
            'duration_steps': 2000, 'dt': 0.1, 'seed': 0,
            'snapshot_every': 5, 'calibration': None, 'workers': 1}
    _sections = ('layout', 'mobility', 'orientation', 'schedule', 'stats',
                 'outputs', 'fixed_receivers')

    def __init__(self, *args, **kwargs):
        """Create a :class:`~ristide.sim.config.ScenarioConfig` from a
        scenario dict, or from keyword arguments

        :raises InvalidArgumentError: for an unknown key or a bad value
        :raises ConfigError: for an unsupported ``schema_version``
        """
        data = dict(args[0]) if args else {}
        data.update(kwargs)
        self.name = 'ScenarioConfig'
        self.logger = logging.getLogger(self.name)
        self._build(data)

    def _build(self, data):
        data = copy.deepcopy(data)
        version = data.pop('schema_version', SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError('Unsupported schema_version {}, expected '
                              '{}'.format(version, SCHEMA_VERSION))
        unknown = set(data) - set(self._top) - set(self._sections)
        if unknown:
            raise InvalidArgumentError('scenario', sorted(unknown),
                                       sorted(set(self._top) |
                                              set(self._sections)))
        for key, default in self._top.items():
            setattr(self, '_' + key, data.get(key, default))
        layout = data.get('layout') or {}
        self._layout = layout if isinstance(layout, LayoutSpec) else \
            LayoutSpec.from_dict(layout)
        self._mobility = MobilityParams.from_dict(data.get('mobility'))
        self._orientation = OrientationParams.from_dict(
            data.get('orientation'))
        self._schedule = PhaseSchedule.from_dict(data.get('schedule'))
        self._stats = StatsConfig(**(data.get('stats') or {}))
        self._outputs = OutputsConfig.from_dict(data.get('outputs'))
        self._fixed_receivers = list(data.get('fixed_receivers') or [])
        self.validate()

    def validate(self):
        """Check the run-level invariants and the layout spec"""
        if self._band not in BANDS:
            raise InvalidArgumentError('band', self._band, sorted(BANDS))
        for key in ('n_users', 'duration_steps', 'snapshot_every',
                    'workers'):
            value = getattr(self, '_' + key)
            low = 0 if key == 'n_users' else 1
            if isinstance(value, bool) or not isinstance(value, int) or \
                    value < low:
                raise InvalidArgumentError(key, value,
                                           'an integer >= {}'.format(low))
        if self._n_aps not in AP_COUNTS:
            raise InvalidArgumentError('n_aps', self._n_aps, AP_COUNTS)
        if not (isinstance(self._dt, (int, float)) and self._dt > 0):
            raise InvalidArgumentError('dt', self._dt, '> 0')
        if not (isinstance(self._seed, int) and 0 <= self._seed < 2 ** 64):
            raise InvalidArgumentError('seed', self._seed, '0 <= seed < 2**64')
        if self._calibration is not None:
            if isinstance(self._calibration, (int, float)):
                self._calibration = {self.band.id: self._calibration}
            for value in self._calibration.values():
                if not (isinstance(value, (int, float)) and value > 0):
                    raise InvalidArgumentError('calibration',
                                               self._calibration)
        for receiver in self._fixed_receivers:
            _fixed_receiver(receiver)
        self._layout.ap_count = self._n_aps
        self._layout.validate()

    @property
    def layout(self):
        """The :class:`~ristide.sim.geometry.LayoutSpec` of this scenario"""
        return self._layout

    @property
    def band(self):
        """The :class:`~ristide.sim.channel.Band` of this scenario"""
        return get_band(self._band)

    @band.setter
    def band(self, value):
        if value not in BANDS:
            raise InvalidArgumentError('band', value, sorted(BANDS))
        self._band = value

    @property
    def n_users(self):
        return self._n_users

    @property
    def n_aps(self):
        return self._n_aps

    @n_aps.setter
    def n_aps(self, value):
        if value not in AP_COUNTS:
            raise InvalidArgumentError('n_aps', value, AP_COUNTS)
        self._n_aps = value
        self._layout.ap_count = value

    @property
    def duration_steps(self):
        return self._duration_steps

    @property
    def dt(self):
        return self._dt

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, value):
        if not (isinstance(value, int) and 0 <= value < 2 ** 64):
            raise InvalidArgumentError('seed', value, '0 <= seed < 2**64')
        self._seed = value

    @property
    def snapshot_every(self):
        return self._snapshot_every

    @property
    def workers(self):
        """Worker threads; ``RIS_TIDE_THREADS`` caps the configured value"""
        cap = os.environ.get('RIS_TIDE_THREADS')
        if cap:
            try:
                return max(1, min(self._workers, int(cap)))
            except ValueError:
                raise InvalidArgumentError('RIS_TIDE_THREADS', cap)
        return self._workers

    @property
    def mobility(self):
        return self._mobility

    @property
    def orientation(self):
        return self._orientation

    @property
    def schedule(self):
        return self._schedule

    @property
    def stats(self):
        return self._stats

    @property
    def outputs(self):
        return self._outputs

    @property
    def fixed_receivers(self):
        """Fixed receivers without a body, ids ``F0, F1, ...``"""
        receivers = []
        for i, data in enumerate(self._fixed_receivers):
            receiver = _fixed_receiver(data)
            receivers.append(Receiver(receiver.position, receiver.axis,
                                      'F{}'.format(i)))
        return receivers

    def calibration_for(self, band=None):
        """Calibration override for *band*, or None for the default"""
        band = get_band(band or self._band)
        if not self._calibration:
            return None
        return self._calibration.get(band.id)

    def replace(self, **changes):
        """Return a copy of this scenario with top-level *changes* applied"""
        data = self._json
        data.update(changes)
        return ScenarioConfig(data)

    @property
    def _json(self):
        data = {'schema_version': SCHEMA_VERSION}
        for key in self._top:
            data[key] = getattr(self, '_' + key)
        data.update({'layout': self._layout._json,
                     'mobility': self._mobility._json,
                     'orientation': self._orientation._json,
                     'schedule': self._schedule._json,
                     'stats': self._stats._json,
                     'outputs': self._outputs._json,
                     'fixed_receivers':
                     copy.deepcopy(self._fixed_receivers)})
        return settings_dict(data)

    def __str__(self):
        return '<ScenarioConfig>: {} {} users={} seed={}'.format(
            self._layout.layout_id, self._band, self._n_users, self._seed)
    __repr__ = __str__


def load_scenario(source):
    """Load a scenario by preset name or from a JSON file path

    :param source: one of :data:`PRESETS`, or a path
    :raises ConfigError: when the file is missing or not valid JSON
    """
    if source in PRESETS:
        raw = pkgutil.get_data('ristide', 'presets/{}.json'.format(source))
        origin = 'preset ' + source
    else:
        origin = source
        try:
            with open(source, 'rb') as handle:
                raw = handle.read()
        except (IOError, OSError) as err:
            raise ConfigError('Cannot read scenario {}: {}'.format(
                source, err.strerror or err))
    try:
        data = json.loads(raw.decode('utf-8'))
    except ValueError as err:
        raise ConfigError('Scenario {} is not valid JSON: {}'.format(origin,
                                                                     err))
    if not isinstance(data, dict):
        raise ConfigError('Scenario {} must be a JSON object'.format(origin))
    logger.debug('loaded scenario from %s', origin)
    return ScenarioConfig(data)
