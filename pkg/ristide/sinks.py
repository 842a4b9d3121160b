# -*- coding: utf-8 -*-
"""Run directories and the files written into them.

A run directory holds ``meta.json`` (the scenario echo, calibration, tool
version and git description), ``trajectory.csv``, ``gains.csv``, optional
``masks/`` heatmaps and ``report.json``. CSV files use ``,`` separators,
``.`` decimals, LF line endings and a header row.
"""
import csv
import errno
import json
import logging
import os
import subprocess
from collections import OrderedDict
from contextlib import contextmanager
from datetime import datetime
from itertools import groupby

import numpy as np

from . import __version__
from .errors import ConfigError, EmptyInputError, RunDirectoryError
from .sim.channel import GainField
from .sim.config import ScenarioConfig
from .sim.engine import BOUNDARIES, Snapshot
from .sim.geometry import WALL_IDS
from .sim.mobility import phase_of

__author__ = 'ristide'
__all__ = ['TRAJECTORY_HEADER', 'GAINS_HEADER', 'RunDirectory', 'write_pgm',
           'git_describe', 'write_json', 'read_json', 'TrajectorySink',
           'GainSink', 'MaskSink', 'write_series_csv', 'read_gain_stream',
           'run_meta']

TRAJECTORY_HEADER = ('step', 'time_s', 'phase', 'user_id', 'x', 'y', 'vx',
                     'vy', 'posture', 'ue_x', 'ue_y', 'ue_z', 'polar_deg',
                     'azimuth_deg')
GAINS_HEADER = ('time_s', 'ap_id', 'ue_id', 'wall_id', 'tile_row',
                'tile_col', 'gain', 'alive')
LOCK_NAME = '.lock'

logger = logging.getLogger(__name__)


def _num(value):
    """Shortest text that reads back as the same float"""
    return repr(float(value))


def _writer(handle):
    return csv.writer(handle, delimiter=',', lineterminator='\n')


class RunDirectory(object):
    """A run output directory and its lock"""
    name = 'RunDirectory'

    def __init__(self, path):
        self.logger = logging.getLogger(self.name)
        self._path = path

    @classmethod
    def create(cls, out, seed, now=None):
        """Create ``<out>/<YYYYmmddTHHMMSS>-seed<seed>``, adding ``-k`` when
        that name is taken

        :raises RunDirectoryError: when the directory cannot be created
        """
        stamp = (now or datetime.now()).strftime('%Y%m%dT%H%M%S')
        base = os.path.join(out, '{}-seed{}'.format(stamp, seed))
        try:
            if not os.path.isdir(out):
                os.makedirs(out)
            path, k = base, 0
            while True:
                try:
                    os.mkdir(path)
                    break
                except OSError as err:
                    if err.errno != errno.EEXIST:
                        raise
                    k += 1
                    path = '{}-{}'.format(base, k)
        except OSError as err:
            raise RunDirectoryError('Cannot create run directory under {}: '
                                    '{}'.format(out, err.strerror or err))
        return cls(path)

    @classmethod
    def open(cls, path):
        """Open an existing run directory

        :raises ConfigError: when *path* is not a directory
        """
        if not os.path.isdir(path):
            raise ConfigError('Run directory {} does not exist'.format(path))
        return cls(path)

    @classmethod
    def ensure(cls, path):
        """Open *path*, creating it when missing"""
        try:
            if not os.path.isdir(path):
                os.makedirs(path)
        except OSError as err:
            raise RunDirectoryError('Cannot create {}: {}'.format(
                path, err.strerror or err))
        return cls(path)

    @property
    def path(self):
        return self._path

    def join(self, *parts):
        return os.path.join(self._path, *parts)

    def subdir(self, name):
        path = self.join(name)
        try:
            if not os.path.isdir(path):
                os.makedirs(path)
        except OSError as err:
            raise RunDirectoryError('Cannot create {}: {}'.format(
                path, err.strerror or err))
        return path

    @contextmanager
    def lock(self):
        """Hold ``.lock`` exclusively for the duration of the block

        :raises RunDirectoryError: when the lock is already held
        """
        path = self.join(LOCK_NAME)
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except OSError as err:
            raise RunDirectoryError('Cannot lock {}: {}'.format(
                self._path, err.strerror or err))
        try:
            os.write(fd, str(os.getpid()).encode('ascii'))
            os.close(fd)
            yield self
        finally:
            try:
                os.remove(path)
            except OSError:
                self.logger.warning('could not remove %s', path)

    def __str__(self):
        return '<RunDirectory>: {}'.format(self._path)
    __repr__ = __str__


def write_pgm(path, image):
    """Write *image* as an 8-bit binary PGM, scaled so its maximum is 255.
    An image without a positive maximum is written all black

    :param image: 2-D array, first row at the top
    """
    image = np.asarray(image, dtype=float)
    peak = float(image.max()) if image.size else 0.0
    if peak > 0 and np.isfinite(peak):
        pixels = np.rint(np.clip(image, 0.0, None) / peak * 255.0)
    else:
        pixels = np.zeros_like(image)
    pixels = pixels.astype(np.uint8)
    rows, cols = pixels.shape
    try:
        with open(path, 'wb') as handle:
            handle.write('P5\n{} {}\n255\n'.format(cols, rows).encode('ascii'))
            handle.write(pixels.tobytes())
    except (IOError, OSError) as err:
        raise RunDirectoryError('Cannot write {}: {}'.format(
            path, err.strerror or err))
    return path


def git_describe(cwd=None):
    """``git describe --always --dirty`` of the source tree, or None"""
    if cwd is None:
        cwd = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.check_output(
            ['git', 'describe', '--always', '--dirty'], cwd=cwd,
            stderr=subprocess.DEVNULL)
    except (OSError, subprocess.CalledProcessError):
        return None
    return out.decode('utf-8').strip() or None


def write_json(path, data):
    try:
        with open(path, 'w') as handle:
            json.dump(data, handle, indent=2, sort_keys=False)
            handle.write('\n')
    except (IOError, OSError) as err:
        raise RunDirectoryError('Cannot write {}: {}'.format(
            path, err.strerror or err))
    return path


def read_json(path):
    """Read a JSON file

    :raises ConfigError: when it is missing or malformed
    """
    try:
        with open(path) as handle:
            return json.load(handle, object_pairs_hook=OrderedDict)
    except (IOError, OSError) as err:
        raise ConfigError('Cannot read {}: {}'.format(path,
                                                      err.strerror or err))
    except ValueError as err:
        raise ConfigError('{} is not valid JSON: {}'.format(path, err))


class _CsvSink(object):
    header = ()
    name = 'CsvSink'

    def __init__(self, path):
        self.logger = logging.getLogger(self.name)
        self._path = path
        try:
            self._handle = open(path, 'w', newline='')
        except (IOError, OSError) as err:
            raise RunDirectoryError('Cannot open {}: {}'.format(
                path, err.strerror or err))
        self._csv = _writer(self._handle)
        self._csv.writerow(self.header)
        self.rows = 0

    @property
    def path(self):
        return self._path

    def close(self):
        self._handle.close()
        self.logger.info('wrote %d rows to %s', self.rows, self._path)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


class TrajectorySink(_CsvSink):
    """Writes one row per user per step"""
    header = TRAJECTORY_HEADER
    name = 'TrajectorySink'

    def consume(self, snapshot):
        for user, rx in zip(snapshot.users, snapshot.receivers):
            ue = rx.position
            self._csv.writerow([
                snapshot.step, _num(snapshot.time), user.phase, user.id,
                _num(user.position[0]), _num(user.position[1]),
                _num(user.velocity[0]), _num(user.velocity[1]), user.posture,
                _num(ue[0]), _num(ue[1]), _num(ue[2]),
                _num(user.ue_pose.polar_deg), _num(user.ue_pose.azimuth_deg)])
            self.rows += 1


class GainSink(_CsvSink):
    """Writes one row per tile per link of every emitted step, limited to
    the configured walls and to every n-th emitted step. Phase boundary
    steps are always written. A wall without any link on a written step
    gets one marker row with only its time and wall id, so readers see
    every written step
    """
    header = GAINS_HEADER
    name = 'GainSink'

    def __init__(self, path, layout, walls=None, every=1):
        super(GainSink, self).__init__(path)
        self._layout = layout
        self._walls = set(walls) if walls else None
        self._every = every
        self._seen = 0
        self.markers = 0

    def consume(self, snapshot):
        if not snapshot.emitted:
            return
        self._seen += 1
        if (self._seen - 1) % self._every and not snapshot.boundaries:
            return
        time = _num(snapshot.time)
        written = set()
        for (ap_id, ue_id, wall_id), field in snapshot.gain_fields.items():
            if self._walls is not None and wall_id not in self._walls:
                continue
            cols = self._layout.grid(wall_id).cols
            for index, (gain, alive) in enumerate(zip(field.gains,
                                                      field.alive)):
                self._csv.writerow([time, ap_id, ue_id, wall_id,
                                    index // cols, index % cols, _num(gain),
                                    int(alive)])
            self.rows += len(field)
            written.add(wall_id)
        if self._walls is not None:
            sampled = sorted(self._walls)
        elif snapshot.gain_fields:
            sampled = sorted({w for _, _, w in snapshot.gain_fields})
        else:
            sampled = list(WALL_IDS)
        for wall_id in sampled:
            if wall_id not in written:
                self._csv.writerow([time, '', '', wall_id, '', '', '', ''])
                self.markers += 1


class MaskSink(object):
    """Writes every shadow mask of an emitted step as a PGM under masks/"""
    name = 'MaskSink'

    def __init__(self, directory, layout):
        self.logger = logging.getLogger(self.name)
        self._directory = directory
        self._layout = layout
        self.written = 0

    def consume(self, snapshot):
        if not snapshot.emitted:
            return
        for kind, masks in (('ap', snapshot.ap_masks),
                            ('ue', snapshot.ue_masks)):
            for (source, wall_id), mask in masks.items():
                grid = self._layout.grid(wall_id)
                name = '{:06d}_{}_{}_{}.pgm'.format(snapshot.step, kind,
                                                    source, wall_id)
                write_pgm(os.path.join(self._directory, name),
                          grid.image(mask.bits.astype(float)))
                self.written += 1

    def close(self):
        self.logger.info('wrote %d masks to %s', self.written,
                         self._directory)


def write_series_csv(path, header, rows):
    """Write *rows* under *header* with the pinned CSV dialect"""
    try:
        with open(path, 'w', newline='') as handle:
            writer = _writer(handle)
            writer.writerow(header)
            for row in rows:
                writer.writerow(['' if v is None else
                                 _num(v) if isinstance(v, float) else v
                                 for v in row])
    except (IOError, OSError) as err:
        raise RunDirectoryError('Cannot write {}: {}'.format(
            path, err.strerror or err))
    return path


def _grid_shapes(config):
    length, width, height = config.layout.room_size
    size = config.layout.tiles.tile_size
    rows = int(round(height / size))
    return {'S1': (rows, int(round(length / size))),
            'S2': (rows, int(round(length / size))),
            'S3': (rows, int(round(width / size))),
            'S4': (rows, int(round(width / size)))}


def read_gain_stream(run_dir, meta=None):
    """Rebuild the emitted snapshots of a run from its gains.csv. Every
    distinct time becomes one emitted :class:`~ristide.sim.engine.Snapshot`
    without users or masks; marker rows become walls sampled without links

    :param run_dir: :class:`RunDirectory`
    :param meta: parsed meta.json, read from *run_dir* when omitted
    :return: ``(config, snapshots)``, the snapshots as a generator
    :raises ConfigError: when meta.json or gains.csv is missing or unusable
    :raises EmptyInputError: when gains.csv holds no rows
    """
    if meta is None:
        meta = read_json(run_dir.join('meta.json'))
    config = ScenarioConfig(meta['scenario'])
    threshold = meta.get('outage_threshold', config.band.outage_threshold)
    path = run_dir.join('gains.csv')
    try:
        handle = open(path, newline='')
    except (IOError, OSError) as err:
        raise ConfigError('Cannot read {}: {}'.format(path,
                                                      err.strerror or err))
    reader = csv.reader(handle)
    header = next(reader, None)
    if header is None or tuple(header) != GAINS_HEADER:
        handle.close()
        raise ConfigError('{} has no gains header'.format(path))
    first = next(reader, None)
    if first is None:
        handle.close()
        raise EmptyInputError('{} holds no gain rows'.format(path))
    shapes = _grid_shapes(config)
    steps = config.schedule.boundary_steps(config.duration_steps)
    boundary_at = OrderedDict()
    for label, step in zip(BOUNDARIES, steps):
        boundary_at.setdefault(max(1, step), []).append(label)

    def rows():
        yield first
        for row in reader:
            yield row

    def snapshots():
        try:
            for time_s, group in groupby(rows(), key=lambda r: r[0]):
                time = float(time_s)
                step = int(round(time / config.dt))
                fields = OrderedDict()
                buffers = OrderedDict()
                walls = OrderedDict()
                for _, ap_id, ue_id, wall_id, row, col, gain, _ in group:
                    if not ap_id:
                        r, c = shapes[wall_id]
                        walls[wall_id] = r * c
                        continue
                    key = (ap_id, ue_id, wall_id)
                    if key not in buffers:
                        r, c = shapes[wall_id]
                        buffers[key] = np.zeros(r * c)
                    cols = shapes[wall_id][1]
                    buffers[key][int(row) * cols + int(col)] = float(gain)
                for (ap_id, ue_id, wall_id), gains in buffers.items():
                    fields[(ap_id, ue_id, wall_id)] = GainField(
                        time, ap_id, ue_id, wall_id, gains, threshold)
                progress = min(1.0, step / float(config.duration_steps))
                yield Snapshot(step, time, progress,
                               phase_of(progress, config.schedule), (),
                               gain_fields=fields,
                               boundaries=boundary_at.get(step, []),
                               emitted=True, walls=walls)
        except (ValueError, KeyError) as err:
            raise ConfigError('Malformed row in {}: {}'.format(path, err))
        finally:
            handle.close()
    return config, snapshots()


def run_meta(config, simulation, scenario=None, started=None, finished=None):
    """Content of meta.json for a finished run

    :param config: the :class:`~ristide.sim.config.ScenarioConfig` run
    :param simulation: the :class:`~ristide.sim.engine.Simulation` that ran
    :param scenario: preset name or path the scenario came from
    """
    band = config.band
    return OrderedDict([
        ('tool', 'ristide'),
        ('version', __version__),
        ('git', git_describe()),
        ('scenario_source', scenario),
        ('seed', config.seed),
        ('started', started),
        ('finished', finished),
        ('band', band._json),
        ('outage_threshold', band.outage_threshold),
        ('calibration', simulation.calibration),
        ('audit', {'tiles': simulation.audited,
                   'mismatches': simulation.mismatches}),
        ('history', [list(entry) for entry in simulation.history]),
        ('scenario', config._json),
    ])
