# -*- coding: utf-8 -*-
"""The simulation loop and the run summary.

Each step advances the crowd. On emitted steps (every ``snapshot_every``
steps and at every phase boundary) the blocker set is rebuilt from the
furniture and the bodies, AP-side and UE-side shadow masks are computed for
every wall, and one gain field is evaluated per (AP, UE, wall) link.
"""
import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..core import History, SeedStreams
from ..errors import StreamTooShortError
from ..stats.report import GainStream, windowed_drift_report
from ..stats.survival import (SurvivalAccumulator, shadow_fraction,
                              union_masks)
from .channel import Receiver, default_calibration, link_gain_map
from .geometry import build_layout
from .mobility import PHASES, Crowd
from .visibility import oracle_hits, shadowed_tiles

__author__ = 'ristide'
__all__ = ['BOUNDARIES', 'AUDIT_SHARE', 'Snapshot', 'Simulation',
           'run_simulation', 'WallSeries', 'RunSummary', 'summarize_run']

BOUNDARIES = ('enter', 'wander', 'exit')
#: share of tiles per AP-side mask re-checked against the oracle
AUDIT_SHARE = 0.01
#: UE receivers are kept this far inside the walls, in meters
UE_MARGIN = 0.02

logger = logging.getLogger(__name__)


class Snapshot(object):
    """State of a run after one step. ``gain_fields``, ``ap_masks`` and
    ``ue_masks`` are empty on steps that are not emitted. ``walls`` maps
    wall ids to tile counts for walls sampled on this step without any link
    or mask, as in a step of a gain CSV with nobody in the room
    """
    def __init__(self, step, time, progress, phase, users,
                 fixed_receivers=None, gain_fields=None, ap_masks=None,
                 ue_masks=None, boundaries=(), emitted=False, spawned=0,
                 despawned=0, receivers=None, walls=None):
        self.step = step
        self.time = time
        self.progress = progress
        self.phase = phase
        self.users = tuple(users)
        self.fixed_receivers = list(fixed_receivers or [])
        self.gain_fields = gain_fields or OrderedDict()
        self.ap_masks = ap_masks or OrderedDict()
        self.ue_masks = ue_masks or OrderedDict()
        self.boundaries = tuple(boundaries)
        self.emitted = emitted
        self.spawned = spawned
        self.despawned = despawned
        self._receivers = receivers
        self.walls = OrderedDict(walls or ())

    @property
    def receivers(self):
        """Receivers of this step: the users' UEs, then the fixed receivers"""
        if self._receivers is not None:
            return list(self._receivers)
        return [user.receiver for user in self.users] + self.fixed_receivers

    def fields_on(self, wall_id):
        return [f for (_, _, wid), f in self.gain_fields.items()
                if wid == wall_id]

    def __str__(self):
        return '<Snapshot>: step={} t={:.2f} {} users={}'.format(
            self.step, self.time, self.phase, len(self.users))
    __repr__ = __str__


class Simulation(object):
    """One run of a :class:`~ristide.sim.config.ScenarioConfig`"""
    name = 'Simulation'

    def __init__(self, config):
        self.logger = logging.getLogger(self.name)
        config.validate()
        self._config = config
        self._band = config.band
        self._layout = build_layout(config.layout, self._band.id)
        self._streams = SeedStreams(config.seed)
        self._audit_rng = self._streams.generator('audit')
        self._calibration = config.calibration_for() or \
            default_calibration(self._band)
        self._crowd = Crowd(self._layout, config.n_users, config.mobility,
                            config.orientation, config.schedule,
                            config.duration_steps, config.dt, self._streams)
        self._fixed_receivers = config.fixed_receivers
        self._boundaries = OrderedDict()
        steps = config.schedule.boundary_steps(config.duration_steps)
        for label, step in zip(BOUNDARIES, steps):
            self._boundaries.setdefault(max(1, step), []).append(label)
        self.audited = 0
        self.mismatches = 0
        self.history = History()

    @property
    def config(self):
        return self._config

    @property
    def layout(self):
        return self._layout

    @property
    def calibration(self):
        return self._calibration

    @property
    def crowd(self):
        return self._crowd

    @property
    def boundary_steps(self):
        """Map of step to the phase boundary labels closing on it"""
        return OrderedDict((k, list(v)) for k, v in self._boundaries.items())

    def _map(self, executor, func, jobs):
        if executor is None:
            return [func(*job) for job in jobs]
        return list(executor.map(lambda job: func(*job), jobs))

    def _audit(self, ap_masks, blockers):
        for (ap_id, wall_id), mask in ap_masks.items():
            grid = self._layout.grid(wall_id)
            size = max(1, int(round(AUDIT_SHARE * grid.n_tiles)))
            sample = self._audit_rng.choice(grid.n_tiles, size, replace=False)
            ap = next(a for a in self._layout.aps if a.id == ap_id)
            hits = oracle_hits(ap.position, blockers,
                               grid.tile_centers[sample])
            wrong = int(np.count_nonzero(hits != mask.bits[sample]))
            self.audited += size
            if wrong:
                self.mismatches += wrong
                self.logger.warning('mask audit: %d of %d tiles disagree '
                                    'for %s on %s', wrong, size, ap_id,
                                    wall_id)

    def _receivers(self, users):
        """UE receivers kept inside the room, then the fixed receivers"""
        receivers = []
        for user in users:
            rx = user.receiver
            held = self._layout.contain(rx.position, UE_MARGIN)
            if not np.array_equal(held, rx.position):
                rx = Receiver(held, rx.axis, rx.id)
            receivers.append(rx)
        return receivers + self._fixed_receivers

    def _evaluate(self, executor, time, users, receivers):
        layout = self._layout
        grids = list(layout.grids.values())
        blockers = list(layout.furniture) + [u.body for u in users]

        jobs = [(ap.position, blockers, grid) for ap in layout.aps
                for grid in grids]
        masks = self._map(executor, shadowed_tiles, jobs)
        ap_masks = OrderedDict()
        for (ap, grid), mask in zip([(a, g) for a in layout.aps
                                     for g in grids], masks):
            ap_masks[(ap.id, grid.wall_id)] = mask

        jobs = [(rx.position, blockers, grid) for rx in receivers
                for grid in grids]
        masks = self._map(executor, shadowed_tiles, jobs)
        ue_masks = OrderedDict()
        for (rx, grid), mask in zip([(r, g) for r in receivers
                                     for g in grids], masks):
            ue_masks[(rx.id, grid.wall_id)] = mask

        jobs = [(ap, rx, grid, ap_masks[(ap.id, grid.wall_id)],
                 ue_masks[(rx.id, grid.wall_id)], self._band, time,
                 self._calibration)
                for ap in layout.aps for rx in receivers for grid in grids]
        fields = self._map(executor, link_gain_map, jobs)
        gain_fields = OrderedDict(
            ((f.ap_id, f.ue_id, f.wall_id), f) for f in fields)
        self._audit(ap_masks, blockers)
        return gain_fields, ap_masks, ue_masks

    def run(self):
        """Yield one :class:`Snapshot` per step"""
        config = self._config
        duration = config.duration_steps
        workers = config.workers
        self.logger.info('run start: %s, %d steps, %d workers', config,
                         duration, workers)
        self.history.append(['start', config.seed])
        executor = ThreadPoolExecutor(workers) if workers > 1 else None
        try:
            for step in range(1, duration + 1):
                phase = self._crowd.step(step)
                time = step * config.dt
                boundaries = self._boundaries.get(step, [])
                emitted = step % config.snapshot_every == 0 or \
                    bool(boundaries)
                users = self._crowd.users
                receivers = self._receivers(users)
                extras = {}
                if emitted:
                    fields, ap_masks, ue_masks = self._evaluate(
                        executor, time, users, receivers)
                    extras = {'gain_fields': fields, 'ap_masks': ap_masks,
                              'ue_masks': ue_masks}
                self.logger.debug('step %d %s: %d active, %d spawned, '
                                  '%d despawned', step, phase,
                                  self._crowd.active, self._crowd.spawned,
                                  self._crowd.despawned)
                yield Snapshot(step, time, step / float(duration), phase,
                               users, self._fixed_receivers,
                               boundaries=boundaries,
                               emitted=emitted,
                               spawned=self._crowd.spawned,
                               despawned=self._crowd.despawned,
                               receivers=receivers, **extras)
        finally:
            if executor is not None:
                executor.shutdown()
        self.history.append(['finish', self.audited, self.mismatches])
        self.logger.info('run finished: %d tiles audited, %d mismatches',
                         self.audited, self.mismatches)


def run_simulation(config):
    """Run *config*, yielding a :class:`Snapshot` per step. Config errors are
    raised here, before the first step
    """
    return Simulation(config).run()


class WallSeries(object):
    """Per-wall aggregation of the emitted steps of a run. The field of a
    step is the per-tile mean over every active link
    """
    def __init__(self, wall_id, n_tiles):
        self.wall_id = wall_id
        self.n_tiles = n_tiles
        self.times = []
        self.phases = []
        self.fields = []
        self.alive = []
        self.shadow = []
        self.survival = SurvivalAccumulator(wall_id, n_tiles)
        self.phase_survival = OrderedDict(
            (phase, SurvivalAccumulator(wall_id, n_tiles))
            for phase in PHASES)

    def add(self, time, phase, gains, alive, shadow):
        """Add one emitted step

        :param gains: (links, tiles) gains, possibly with no link
        :param alive: (links, tiles) alive flags
        :param shadow: AP-side union shadow fraction
        """
        self.times.append(time)
        self.phases.append(phase)
        self.shadow.append(shadow)
        if len(gains):
            self.fields.append(np.asarray(gains).mean(axis=0))
            self.alive.append(np.asarray(alive).mean(axis=0))
            self.survival.add(alive)
            self.phase_survival[phase].add(alive)
        else:
            self.fields.append(np.zeros(self.n_tiles))
            self.alive.append(np.zeros(self.n_tiles))

    @property
    def mean_gain(self):
        """Per-step mean over tiles of the link-mean field"""
        return [float(f.mean()) for f in self.fields]

    def stream(self):
        return GainStream(self.fields, series=np.vstack(self.fields),
                          alive=np.vstack(self.alive), times=self.times)

    def phase_variance(self):
        """Variance of the mean-gain series within each phase"""
        series = np.asarray(self.mean_gain)
        labels = np.asarray(self.phases)
        return OrderedDict(
            (phase, float(np.var(series[labels == phase]))
             if np.any(labels == phase) else None) for phase in PHASES)

    def phase_mean(self, values=None):
        """Mean of *values* (default: the mean-gain series) per phase"""
        series = np.asarray(self.mean_gain if values is None else values)
        labels = np.asarray(self.phases)
        return OrderedDict(
            (phase, float(np.mean(series[labels == phase]))
             if np.any(labels == phase) else None) for phase in PHASES)


class RunSummary(object):
    """Everything :func:`summarize_run` derives from a snapshot stream"""
    def __init__(self, walls, reports, boundary_steps, boundary_fields,
                 boundary_survival, spawned=0, despawned=0):
        self.walls = walls
        self.reports = reports
        self.boundary_steps = boundary_steps
        self.boundary_fields = boundary_fields
        self.boundary_survival = boundary_survival
        self.spawned = spawned
        self.despawned = despawned

    @property
    def survival(self):
        """Whole-run :class:`~ristide.stats.survival.SurvivalField` per wall
        (walls without any link sample are left out)
        """
        return OrderedDict((wid, s.survival.field())
                           for wid, s in self.walls.items()
                           if s.survival.count)

    @property
    def phase_survival(self):
        result = OrderedDict()
        for phase in PHASES:
            fields = OrderedDict(
                (wid, s.phase_survival[phase].field())
                for wid, s in self.walls.items()
                if s.phase_survival[phase].count)
            if fields:
                result[phase] = fields
        return result

    def mean_survival(self):
        """Survival averaged over the tiles of every wall"""
        fields = list(self.survival.values())
        if not fields:
            return None
        return float(np.mean([f.mean for f in fields]))

    @property
    def _json(self):
        walls = OrderedDict()
        for wid, series in self.walls.items():
            report = self.reports.get(wid)
            survival = self.survival.get(wid)
            walls[wid] = {
                'report': None if report is None else report._json,
                'mean_survival': None if survival is None else survival.mean,
                'phase_survival': OrderedDict(
                    (phase, fields[wid].mean)
                    for phase, fields in self.phase_survival.items()
                    if wid in fields),
                'mean_gain': {'times': series.times,
                              'phases': series.phases,
                              'values': series.mean_gain},
                'phase_variance': series.phase_variance(),
                'phase_mean_gain': series.phase_mean(),
                'shadow_fraction': series.shadow,
                'phase_shadow_fraction': None if None in series.shadow
                else series.phase_mean(series.shadow),
            }
        return {'boundary_steps': self.boundary_steps,
                'spawned': self.spawned, 'despawned': self.despawned,
                'walls': walls}


def _wall_ids(snapshot):
    ids = {wid for _, wid in snapshot.ap_masks}
    ids.update(wid for _, _, wid in snapshot.gain_fields)
    ids.update(snapshot.walls)
    return sorted(ids)


def summarize_run(stream, stats_config):
    """Consume a snapshot stream into a :class:`RunSummary`: per-wall
    series, survival fields overall and per phase, snapshots at every phase
    boundary and one drift report per wall. Snapshots without masks (as
    rebuilt from a gain CSV) simply carry no shadow fraction

    :param stream: iterable of :class:`Snapshot`
    :param stats_config: :class:`~ristide.sim.config.StatsConfig`
    :raises StreamTooShortError: when *stream* is empty
    """
    walls = OrderedDict()
    boundary_steps = OrderedDict()
    boundary_fields = OrderedDict()
    boundary_survival = OrderedDict()
    pending = OrderedDict()
    threshold = None
    last = None
    for snapshot in stream:
        last = snapshot
        if snapshot.emitted:
            for wid in _wall_ids(snapshot):
                fields = snapshot.fields_on(wid)
                masks = [m for (_, w), m in snapshot.ap_masks.items()
                         if w == wid]
                if fields and threshold is None:
                    threshold = fields[0].threshold
                series = walls.get(wid)
                if series is None:
                    n_tiles = len(fields[0]) if fields else \
                        len(masks[0]) if masks else snapshot.walls[wid]
                    series = walls[wid] = WallSeries(wid, n_tiles)
                if wid not in pending:
                    pending[wid] = SurvivalAccumulator(wid, series.n_tiles)
                alive = np.vstack([f.alive for f in fields]) if fields \
                    else []
                series.add(snapshot.time, snapshot.phase,
                           np.vstack([f.gains for f in fields])
                           if fields else [], alive,
                           shadow_fraction(union_masks(masks))
                           if masks else None)
                if fields:
                    pending[wid].add(alive)
                for label in snapshot.boundaries:
                    boundary_fields.setdefault(label, OrderedDict())[wid] = \
                        series.fields[-1]
                    if pending[wid].count:
                        boundary_survival.setdefault(
                            label, OrderedDict())[wid] = pending[wid].field()
        for label in snapshot.boundaries:
            boundary_steps[label] = snapshot.step
        if snapshot.boundaries:
            pending = OrderedDict()
    if last is None:
        raise StreamTooShortError('Cannot summarize an empty run')

    reports = OrderedDict()
    for wid in stats_config.walls:
        series = walls.get(wid)
        if series is None:
            continue
        try:
            reports[wid] = windowed_drift_report(
                series.stream(), stats_config.stride, stats_config.bins,
                stats_config.max_lag, stats_config.pacf_tile,
                stats_config.pacf_series, stats_config.include_outage,
                threshold, stats_config.refine_fit,
                stats_config.jsd_scale)
        except StreamTooShortError as err:
            logger.warning('no drift report for %s: %s', wid, err)
    return RunSummary(walls, reports, boundary_steps, boundary_fields,
                      boundary_survival, last.spawned, last.despawned)
