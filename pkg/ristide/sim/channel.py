# -*- coding: utf-8 -*-
"""Far-field AP -> tile -> UE cascade gains.

mmWave tiles scatter with the usual far-field form
``(A cos(theta_i) cos(theta_r) / (4 pi d1 d2))^2`` scaled by a calibration
constant and a frequency factor ``(28 GHz / f)^3`` shared by both mmWave
bands. Visible light uses a first order Lambertian source on the ceiling,
Lambertian re-emission from the tile and a photodiode with a cosine response
and a 90 degree field of view.
"""
import logging
import math

import numpy as np

from ..core import as_point, unit
from ..errors import GeometryError, InvalidArgumentError

__author__ = 'ristide'
__all__ = ['Band', 'BANDS', 'get_band', 'Receiver', 'GainField',
           'MirrorTile', 'unit_gains', 'cascade_gains', 'tile_cascade_gain',
           'default_calibration', 'is_outage', 'mirror_tile',
           'link_gain_map']

REFERENCE_CARRIER = 28e9
FREQUENCY_EXPONENT = 3.0
LAMBERTIAN_ORDER = 1
FOV_DEG = 90.0
CALIBRATION_MARGIN_DB = 15.0

logger = logging.getLogger(__name__)


class Band(object):
    """Carrier band with its outage threshold and blockage penalty. A
    penalty of None means a blocked segment extinguishes the link
    """
    def __init__(self, band_id, carrier_hz, outage_threshold,
                 blockage_penalty_db, optical=False):
        self._id = band_id
        self._carrier_hz = carrier_hz
        self._outage_threshold = float(outage_threshold)
        self._blockage_penalty_db = blockage_penalty_db
        self._optical = optical

    @property
    def id(self):
        return self._id

    @property
    def carrier_hz(self):
        return self._carrier_hz

    @property
    def outage_threshold(self):
        return self._outage_threshold

    @property
    def blockage_penalty_db(self):
        return self._blockage_penalty_db

    @property
    def optical(self):
        return self._optical

    @property
    def blocked_factor(self):
        """Linear gain factor applied once per blocked segment"""
        if self._blockage_penalty_db is None:
            return 0.0
        return 10.0 ** (-self._blockage_penalty_db / 10.0)

    def with_threshold(self, threshold):
        """Return a copy of this band with another outage threshold"""
        return Band(self._id, self._carrier_hz, threshold,
                    self._blockage_penalty_db, self._optical)

    @property
    def _json(self):
        return {'id': self._id, 'carrier_hz': self._carrier_hz,
                'outage_threshold': self._outage_threshold,
                'blockage_penalty_db': self._blockage_penalty_db}

    def __str__(self):
        return '<Band>: {}'.format(self._id)
    __repr__ = __str__


BANDS = {
    'mmw28': Band('mmw28', 28e9, 2e-7, 30.0),
    'mmw73': Band('mmw73', 73e9, 2e-8, 40.0),
    'vl': Band('vl', None, 2e-9, None, optical=True),
}


def get_band(band):
    """Return the :class:`Band` for a band id, or *band* itself"""
    if isinstance(band, Band):
        return band
    try:
        return BANDS[band]
    except (KeyError, TypeError):
        raise InvalidArgumentError('band', band, sorted(BANDS))


class Receiver(object):
    """A UE antenna: position and pointing axis. The axis matters for the
    optical band only
    """
    def __init__(self, position, axis=None, receiver_id=None):
        self._position = as_point(position, 3, 'receiver position')
        if axis is None:
            axis = (0.0, 0.0, 1.0)
        self._axis = unit(axis, 'receiver axis')
        self._id = receiver_id

    @classmethod
    def from_angles(cls, position, polar_deg, azimuth_deg, receiver_id=None):
        polar = math.radians(polar_deg)
        azimuth = math.radians(azimuth_deg)
        axis = (math.sin(polar) * math.cos(azimuth),
                math.sin(polar) * math.sin(azimuth), math.cos(polar))
        return cls(position, axis, receiver_id)

    @property
    def id(self):
        return self._id

    @property
    def position(self):
        return self._position

    @property
    def axis(self):
        return self._axis

    def __str__(self):
        return '<Receiver>: {} {}'.format(self._id, self._position.tolist())
    __repr__ = __str__


class GainField(object):
    """Per-tile cascade gains of one (AP, UE, wall) link at one time"""
    def __init__(self, time, ap_id, ue_id, wall_id, gains, threshold):
        self._time = time
        self._threshold = float(threshold)
        self._ap_id = ap_id
        self._ue_id = ue_id
        self._wall_id = wall_id
        self._gains = np.array(gains, dtype=float)
        self._gains.setflags(write=False)
        self._alive = self._gains >= threshold
        self._alive.setflags(write=False)

    @property
    def time(self):
        return self._time

    @property
    def ap_id(self):
        return self._ap_id

    @property
    def ue_id(self):
        return self._ue_id

    @property
    def wall_id(self):
        return self._wall_id

    @property
    def gains(self):
        return self._gains

    @property
    def threshold(self):
        return self._threshold

    @property
    def alive(self):
        return self._alive

    def __len__(self):
        return len(self._gains)

    def __str__(self):
        return '<GainField>: t={} {}->{}->{}'.format(
            self._time, self._ap_id, self._wall_id, self._ue_id)
    __repr__ = __str__


def _frequency_factor(band):
    if band.optical:
        return 1.0
    return (REFERENCE_CARRIER / band.carrier_hz) ** FREQUENCY_EXPONENT


def unit_gains(ap, centers, normal, area, receiver, band):
    """Uncalibrated, unblocked gains of the tiles at *centers*

    :param ap: AP position (3,)
    :param centers: (n, 3) tile centers
    :param normal: inward unit normal shared by the tiles
    :param area: tile area, m^2
    :param receiver: :class:`Receiver`
    :param band: :class:`Band`
    :raises GeometryError: when the AP or the UE coincides with a tile center
    """
    ap = np.asarray(ap, dtype=float)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    ue = receiver.position
    to_ap = ap - centers
    to_ue = ue - centers
    d1 = np.linalg.norm(to_ap, axis=1)
    d2 = np.linalg.norm(to_ue, axis=1)
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise GeometryError('AP or UE coincides with a tile center')
    cos_i = np.clip(to_ap @ normal / d1, 0.0, 1.0)
    cos_r = np.clip(to_ue @ normal / d2, 0.0, 1.0)
    if not band.optical:
        return _frequency_factor(band) * (
            area * cos_i * cos_r / (4.0 * np.pi * d1 * d2)) ** 2
    # AP radiates downwards; photodiode cuts off beyond its field of view
    cos_emit = np.clip(to_ap[:, 2] / d1, 0.0, 1.0)
    cos_view = -to_ue @ receiver.axis / d2
    cos_view = np.where(cos_view >= math.cos(math.radians(FOV_DEG)),
                        np.clip(cos_view, 0.0, 1.0), 0.0)
    m = LAMBERTIAN_ORDER
    source = (m + 1) / (2.0 * np.pi) * cos_emit ** m * cos_i / d1 ** 2
    return source * area * cos_r / (np.pi * d2 ** 2) * cos_view


_CALIBRATION = {}


def default_calibration(band):
    """Calibration constant placing the unblocked mirror-tile gain 15 dB
    above the band threshold in the reference room: 5 x 5 x 3 m, AP at the
    ceiling center, UE at the room center 1.2 m high facing S1. mmWave bands
    share the constant derived at 28 GHz
    """
    band = get_band(band)
    reference = BANDS['vl'] if band.optical else BANDS['mmw28']
    if reference.id not in _CALIBRATION:
        ap = np.array([2.5, 2.5, 3.0])
        receiver = Receiver.from_angles((2.5, 2.5, 1.2), 45.0, 90.0)
        specular = np.array([2.5, 5.0, 2.1])
        unit_gain = unit_gains(ap, specular, np.array([0.0, -1.0, 0.0]),
                               0.01, receiver, reference)[0]
        target = reference.outage_threshold * 10.0 ** (
            CALIBRATION_MARGIN_DB / 10.0)
        _CALIBRATION[reference.id] = float(target / unit_gain)
    return _CALIBRATION[reference.id]


def cascade_gains(ap, centers, normal, area, receiver, band,
                  blocked_in=None, blocked_out=None, calibration=None):
    """Calibrated gains for many tiles, with blockage applied per segment

    :param blocked_in: per-tile booleans for the AP -> tile segment
    :param blocked_out: per-tile booleans for the tile -> UE segment
    :param calibration: override of :func:`default_calibration`
    """
    band = get_band(band)
    if calibration is None:
        calibration = default_calibration(band)
    gains = calibration * unit_gains(ap, centers, normal, area, receiver,
                                     band)
    factor = band.blocked_factor
    for mask in (blocked_in, blocked_out):
        if mask is not None:
            gains = np.where(np.asarray(mask, dtype=bool), gains * factor,
                             gains)
    return gains


def tile_cascade_gain(ap, tile, ue_pose, band, blocked_in=False,
                      blocked_out=False, calibration=None):
    """Linear cascade gain through a single tile

    :param ap: :class:`~ristide.sim.geometry.AccessPoint` or 3-D point
    :param tile: :class:`~ristide.sim.geometry.Tile`
    :param ue_pose: :class:`Receiver`
    :param band: :class:`Band` or band id
    """
    ap = as_point(ap, 3, 'ap')
    return float(cascade_gains(ap, tile.center, tile.normal, tile.area,
                               ue_pose, band, [blocked_in], [blocked_out],
                               calibration)[0])


def is_outage(gain, band):
    """True when *gain* is strictly below the band threshold"""
    return gain < get_band(band).outage_threshold


class MirrorTile(object):
    """Tile at the specular reflection point of an AP and a UE"""
    def __init__(self, index, row, col, point, clamped):
        self.index = index
        self.row = row
        self.col = col
        self.point = point
        self.clamped = clamped

    def __int__(self):
        return self.index

    def __str__(self):
        flag = ' clamped' if self.clamped else ''
        return '<MirrorTile>: {} ({}, {}){}'.format(self.index, self.row,
                                                    self.col, flag)
    __repr__ = __str__


def _cell(coord, size, count):
    ratio = coord / size
    nearest = int(round(ratio))
    if abs(ratio - nearest) <= 1e-9 and nearest >= 1:
        cell = nearest - 1
    else:
        cell = int(math.floor(ratio))
    return min(max(cell, 0), count - 1)


def mirror_tile(ap, ue, wall, tile_size=0.1):
    """Find the tile containing the specular point of *ap* and *ue* on
    *wall*. A point on a tile border belongs to the lower index. A point off
    the wall maps to the nearest tile and the result is flagged ``clamped``

    :raises GeometryError: when either point is not on the room side
    """
    ap = as_point(ap, 3, 'ap')
    ue = as_point(ue, 3, 'ue')
    h_ap = float(wall.depth(ap))
    h_ue = float(wall.depth(ue))
    if h_ap <= 0 or h_ue <= 0:
        raise GeometryError('AP and UE must lie on the room side of '
                            'wall {}'.format(wall.id))
    image = ue + 2.0 * h_ue * wall.normal
    point = ap + (image - ap) * (h_ap / (h_ap + h_ue))
    a, b = wall.to_local(point)
    cols = int(round(wall.width / tile_size))
    rows = int(round(wall.height / tile_size))
    clamped = not (-1e-9 <= a <= wall.width + 1e-9 and
                   -1e-9 <= b <= wall.height + 1e-9)
    col = _cell(a, tile_size, cols)
    row = _cell(b, tile_size, rows)
    return MirrorTile(row * cols + col, row, col, np.array([a, b]), clamped)


def link_gain_map(ap, ue_pose, grid, mask_in, mask_out, band, time=0.0,
                  calibration=None):
    """Gain field of one AP -> wall -> UE link

    :param ap: :class:`~ristide.sim.geometry.AccessPoint`
    :param ue_pose: :class:`Receiver`
    :param grid: the wall's :class:`~ristide.sim.geometry.TileGrid`
    :param mask_in: AP-side :class:`~ristide.sim.visibility.TileMask`
    :param mask_out: UE-side :class:`~ristide.sim.visibility.TileMask`
    :param band: :class:`Band` or band id
    """
    band = get_band(band)
    for mask in (mask_in, mask_out):
        if mask is not None and (mask.wall_id != grid.wall_id or
                                 len(mask) != grid.n_tiles):
            raise InvalidArgumentError('mask', mask, str(grid))
    gains = cascade_gains(
        as_point(ap, 3, 'ap'), grid.tile_centers, grid.tile_normal,
        grid.tile_area, ue_pose, band,
        None if mask_in is None else mask_in.bits,
        None if mask_out is None else mask_out.bits, calibration)
    return GainField(time, getattr(ap, 'id', None), ue_pose.id, grid.wall_id,
                     gains, band.outage_threshold)
