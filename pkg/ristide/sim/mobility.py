# -*- coding: utf-8 -*-
"""Crowd mobility: a semi-Markov waypoint process mixing returns to resident
nodes with bounded Levy-walk steps, steering with four virtual forces, UE
orientation sampling and the entering / wandering / exiting schedule.
"""
import logging
import math
from collections import OrderedDict

import numpy as np

from ..core import as_point, unit
from ..errors import InvalidArgumentError
from .channel import Receiver
from .geometry import resident_nodes, seat_anchors
from .visibility import Blocker

__author__ = 'ristide'
__all__ = ['PHASES', 'POSTURES', 'MobilityParams', 'OrientationParams',
           'PhaseSchedule', 'UEPose', 'UserState', 'truncated_pareto_cdf',
           'truncated_pareto_ppf', 'sample_truncated_pareto',
           'next_waypoint', 'steering_step', 'sample_ue_orientation',
           'phase_of', 'Crowd']

PHASES = ('entering', 'wandering', 'exiting')
POSTURES = ('sitting', 'walking')

logger = logging.getLogger(__name__)


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and
            value > 0):
        raise InvalidArgumentError(name, value, 'a positive number')
    return float(value)


class MobilityParams(object):
    """Parameters of the waypoint process and of steering"""
    _defaults = {
        'displacement_exponent': 0.5,
        'sojourn_exponent': 1.0,
        'displacement_bounds': (0.5, None),
        'sojourn_bounds': (2.0, 300.0),
        'return_probability': 0.3,
        'walk_speed': 1.2,
        'force_gains': {'seek': 1.0, 'arrival': 1.0, 'ue_avoid': 2.0,
                        'obstacle_avoid': 2.0},
        'avoid_radius': 0.8,
        'slow_radius': 0.5,
        'arrive_radius': 0.15,
        'despawn_radius': 0.3,
        'seat_radius': 0.3,
        'leg_timeout': 30.0,
        'body_radius': 0.15,
        'body_height': 1.7,
        'max_retries': 64,
    }

    def __init__(self, **kwargs):
        """Create a :class:`~ristide.sim.mobility.MobilityParams`. Every key
        of ``MobilityParams._defaults`` may be overridden. The upper
        displacement bound defaults to the room diagonal
        """
        unknown = set(kwargs) - set(self._defaults)
        if unknown:
            raise InvalidArgumentError('mobility', sorted(unknown),
                                       sorted(self._defaults))
        self._build(dict(self._defaults, **kwargs))
        self.validate()

    def _build(self, data):
        for key, val in data.items():
            if key == 'force_gains':
                val = dict(self._defaults['force_gains'], **val)
            elif key in ('displacement_bounds', 'sojourn_bounds'):
                val = tuple(val)
            setattr(self, '_' + key, val)

    def validate(self):
        _positive('displacement_exponent', self._displacement_exponent)
        _positive('sojourn_exponent', self._sojourn_exponent)
        d_min, d_max = self._displacement_bounds
        _positive('displacement_bounds', d_min)
        if d_max is not None and not _positive('displacement_bounds',
                                               d_max) >= d_min:
            raise InvalidArgumentError('displacement_bounds',
                                       self._displacement_bounds)
        t_min, t_max = self._sojourn_bounds
        if not _positive('sojourn_bounds', t_min) <= \
                _positive('sojourn_bounds', t_max):
            raise InvalidArgumentError('sojourn_bounds', self._sojourn_bounds)
        if not 0.0 <= self._return_probability <= 1.0:
            raise InvalidArgumentError('return_probability',
                                       self._return_probability, '[0, 1]')
        for key in ('walk_speed', 'avoid_radius', 'slow_radius',
                    'arrive_radius', 'despawn_radius', 'seat_radius',
                    'leg_timeout', 'body_radius', 'body_height'):
            _positive(key, getattr(self, '_' + key))
        for key, val in self._force_gains.items():
            if not (isinstance(val, (int, float)) and val >= 0):
                raise InvalidArgumentError('force_gains.' + key, val)
        if int(self._max_retries) < 1:
            raise InvalidArgumentError('max_retries', self._max_retries)

    @property
    def displacement_exponent(self):
        return self._displacement_exponent

    @property
    def sojourn_exponent(self):
        return self._sojourn_exponent

    @property
    def sojourn_bounds(self):
        return self._sojourn_bounds

    @property
    def return_probability(self):
        return self._return_probability

    @property
    def walk_speed(self):
        return self._walk_speed

    @property
    def force_gains(self):
        return dict(self._force_gains)

    @property
    def avoid_radius(self):
        return self._avoid_radius

    @property
    def slow_radius(self):
        return self._slow_radius

    @property
    def arrive_radius(self):
        return self._arrive_radius

    @property
    def despawn_radius(self):
        return self._despawn_radius

    @property
    def seat_radius(self):
        return self._seat_radius

    @property
    def leg_timeout(self):
        return self._leg_timeout

    @property
    def body_radius(self):
        return self._body_radius

    @property
    def body_height(self):
        return self._body_height

    @property
    def max_retries(self):
        return int(self._max_retries)

    def displacement_bounds(self, layout=None):
        """(d_min, d_max) with d_max falling back to the room diagonal"""
        d_min, d_max = self._displacement_bounds
        if d_max is None:
            d_max = layout.diagonal if layout is not None else d_min
        return d_min, max(d_min, d_max)

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    @property
    def _json(self):
        return {key: getattr(self, '_' + key) for key in self._defaults}


class OrientationParams(object):
    """UE polar angle distributions per posture, in degrees, plus how the UE
    is carried
    """
    _defaults = {
        'sitting_mean': 45.11, 'sitting_std': 7.84,
        'walking_mean': 31.79, 'walking_std': 7.61,
        'azimuth_jitter': 10.0, 'ue_height': 1.2, 'ue_offset': 0.3,
    }

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self._defaults)
        if unknown:
            raise InvalidArgumentError('orientation', sorted(unknown),
                                       sorted(self._defaults))
        for key, val in dict(self._defaults, **kwargs).items():
            if not (isinstance(val, (int, float)) and math.isfinite(val)):
                raise InvalidArgumentError(key, val)
            setattr(self, '_' + key, float(val))
        for key in ('sitting_std', 'walking_std', 'azimuth_jitter',
                    'ue_offset'):
            if getattr(self, '_' + key) < 0:
                raise InvalidArgumentError(key, getattr(self, '_' + key),
                                           '>= 0')
        _positive('ue_height', self._ue_height)

    @property
    def sitting(self):
        """(mean, std) of the Laplace polar angle while sitting"""
        return self._sitting_mean, self._sitting_std

    @property
    def walking(self):
        """(mean, std) of the Gaussian polar angle while walking"""
        return self._walking_mean, self._walking_std

    @property
    def azimuth_jitter(self):
        return self._azimuth_jitter

    @property
    def ue_height(self):
        return self._ue_height

    @property
    def ue_offset(self):
        return self._ue_offset

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    @property
    def _json(self):
        return {key: getattr(self, '_' + key) for key in self._defaults}


class PhaseSchedule(object):
    """Fractions of total progress at which entering and wandering end"""
    def __init__(self, enter_end=0.15, wander_end=0.70):
        if not 0.0 < enter_end < wander_end < 1.0:
            raise InvalidArgumentError('schedule', (enter_end, wander_end),
                                       '0 < enter_end < wander_end < 1')
        self._enter_end = float(enter_end)
        self._wander_end = float(wander_end)

    @property
    def enter_end(self):
        return self._enter_end

    @property
    def wander_end(self):
        return self._wander_end

    def boundary_steps(self, duration_steps):
        """Steps closing the entering, wandering and exiting phases"""
        return (int(round(self._enter_end * duration_steps)),
                int(round(self._wander_end * duration_steps)),
                int(duration_steps))

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    @property
    def _json(self):
        return {'enter_end': self._enter_end, 'wander_end': self._wander_end}


def phase_of(progress, schedule=None):
    """Return the phase label for *progress* in [0, 1]"""
    if schedule is None:
        schedule = PhaseSchedule()
    if not 0.0 <= progress <= 1.0:
        raise InvalidArgumentError('progress', progress, '[0, 1]')
    if progress < schedule.enter_end:
        return PHASES[0]
    if progress < schedule.wander_end:
        return PHASES[1]
    return PHASES[2]


def _check_pareto(exponent, lo, hi):
    if not (exponent > 0 and 0 < lo <= hi and math.isfinite(hi)):
        raise InvalidArgumentError('truncated pareto', (exponent, lo, hi),
                                   'exponent > 0 and 0 < lo <= hi')


def truncated_pareto_cdf(x, exponent, lo, hi):
    """CDF of the Pareto law with *exponent* truncated to [lo, hi]"""
    _check_pareto(exponent, lo, hi)
    x = np.clip(np.asarray(x, dtype=float), lo, hi)
    if lo == hi:
        return np.ones_like(x)
    return (1.0 - (lo / x) ** exponent) / (1.0 - (lo / hi) ** exponent)


def truncated_pareto_ppf(u, exponent, lo, hi):
    """Inverse of :func:`truncated_pareto_cdf`"""
    _check_pareto(exponent, lo, hi)
    u = np.asarray(u, dtype=float)
    if lo == hi:
        return np.full_like(u, lo)
    ratio = (lo / hi) ** exponent
    values = lo * (1.0 - u * (1.0 - ratio)) ** (-1.0 / exponent)
    return np.clip(values, lo, hi)


def sample_truncated_pareto(rng, exponent, lo, hi, size=None):
    """Draw from the truncated Pareto law by inverse transform

    :param rng: :class:`numpy.random.Generator`
    :param size: None for a single float, else an output shape
    :raises InvalidArgumentError: unless ``exponent > 0`` and
        ``0 < lo <= hi``
    """
    _check_pareto(exponent, lo, hi)
    if lo == hi:
        return float(lo) if size is None else np.full(size, float(lo))
    values = truncated_pareto_ppf(rng.random(size), exponent, lo, hi)
    return float(values) if size is None else values


class UEPose(object):
    """How a UE is held: height, forward offset from the body center, polar
    angle from the vertical and azimuth, all angles in degrees. ``jitter``
    is the azimuth offset from the carrier's heading
    """
    def __init__(self, height, offset, polar_deg, azimuth_deg, jitter_deg=0.0):
        self.height = height
        self.offset = offset
        self.polar_deg = polar_deg
        self.azimuth_deg = azimuth_deg
        self.jitter_deg = jitter_deg

    def facing(self, heading):
        """Return this pose turned to follow *heading*"""
        azimuth = math.degrees(math.atan2(heading[1], heading[0]))
        return UEPose(self.height, self.offset, self.polar_deg,
                      azimuth + self.jitter_deg, self.jitter_deg)

    def __str__(self):
        return '<UEPose>: polar={:.2f} azimuth={:.2f}'.format(
            self.polar_deg, self.azimuth_deg)
    __repr__ = __str__


def sample_ue_orientation(posture, params, heading, rng):
    """Sample a UE pose for a user in *posture* walking along *heading*.
    Sitting polar angles are Laplace with scale ``std / sqrt(2)``, walking
    ones Gaussian, both clamped to [0, 90] degrees

    :param posture: 'sitting' or 'walking'
    :param params: :class:`OrientationParams`
    :param heading: unit 2-D heading
    :param rng: :class:`numpy.random.Generator`
    """
    heading = unit(as_point(heading, 2, 'heading'), 'heading')
    if posture == 'sitting':
        mean, std = params.sitting
        polar = rng.laplace(mean, std / math.sqrt(2.0)) if std > 0 else mean
    elif posture == 'walking':
        mean, std = params.walking
        polar = rng.normal(mean, std) if std > 0 else mean
    else:
        raise InvalidArgumentError('posture', posture, POSTURES)
    polar = min(max(float(polar), 0.0), 90.0)
    jitter = 0.0
    if params.azimuth_jitter > 0:
        jitter = float(rng.normal(0.0, params.azimuth_jitter))
    pose = UEPose(params.ue_height, params.ue_offset, polar, 0.0, jitter)
    return pose.facing(heading)


class UserState(object):
    """Snapshot of one user. Instances are not changed in place; use
    :meth:`evolve` to derive the next state
    """
    _fields = ('id', 'position', 'velocity', 'phase', 'posture', 'waypoint',
               'sojourn_remaining', 'heading', 'ue_pose', 'body_radius',
               'body_height', 'leg_time')

    def __init__(self, id, position, velocity=(0.0, 0.0), phase='entering',
                 posture='walking', waypoint=None, sojourn_remaining=0.0,
                 heading=(0.0, 1.0), ue_pose=None, body_radius=0.15,
                 body_height=1.7, leg_time=0.0):
        self.id = id
        self.position = np.asarray(position, dtype=float)
        self.velocity = np.asarray(velocity, dtype=float)
        self.phase = phase
        self.posture = posture
        self.waypoint = self.position.copy() if waypoint is None else \
            np.asarray(waypoint, dtype=float)
        self.sojourn_remaining = float(sojourn_remaining)
        self.heading = np.asarray(heading, dtype=float)
        if ue_pose is None:
            ue_pose = UEPose(1.2, 0.3, 31.79, 0.0).facing(self.heading)
        self.ue_pose = ue_pose
        self.body_radius = body_radius
        self.body_height = body_height
        self.leg_time = leg_time

    def evolve(self, **changes):
        """Return a copy of this state with *changes* applied"""
        values = {key: getattr(self, key) for key in self._fields}
        values.update(changes)
        return UserState(**values)

    @property
    def speed(self):
        return float(np.hypot(*self.velocity))

    @property
    def body(self):
        """The user's body as a :class:`~ristide.sim.visibility.Blocker`"""
        return Blocker.cylinder(self.position, self.body_radius,
                                self.body_height, label=self.id)

    @property
    def ue_position(self):
        """3-D position of the UE held ahead of the body"""
        pose = self.ue_pose
        return np.array([self.position[0] + pose.offset * self.heading[0],
                         self.position[1] + pose.offset * self.heading[1],
                         pose.height])

    @property
    def receiver(self):
        """The UE as a :class:`~ristide.sim.channel.Receiver`"""
        pose = self.ue_pose
        return Receiver.from_angles(self.ue_position, pose.polar_deg,
                                    pose.azimuth_deg, self.id)

    def __str__(self):
        return '<UserState>: {} {} {} {}'.format(
            self.id, np.round(self.position, 3).tolist(), self.phase,
            self.posture)
    __repr__ = __str__


def next_waypoint(user, layout, params, rng, nodes=None):
    """Draw the next waypoint of *user*. With the return probability the
    user heads for a resident node picked by truncated-Pareto rank over the
    nodes sorted by distance, otherwise it takes a Levy step of truncated
    Pareto length in a uniform direction. A step landing outside free space
    keeps its length and redraws its direction, up to ``max_retries`` times,
    then falls back to the nearest free point

    :param nodes: resident nodes, computed from *layout* when omitted
    """
    margin = params.body_radius
    position = np.asarray(user.position, dtype=float)
    if rng.random() < params.return_probability:
        if nodes is None:
            nodes = resident_nodes(layout, margin)
        dists = np.array([np.hypot(*(n - position)) for n in nodes])
        order = np.argsort(dists, kind='stable')
        ranked = [i for i in order if dists[i] > 1e-6] or list(order)
        draw = sample_truncated_pareto(rng, params.displacement_exponent,
                                       1.0, len(ranked) + 1.0)
        rank = min(int(math.floor(draw)) - 1, len(ranked) - 1)
        return np.array(nodes[ranked[rank]], dtype=float)
    d_min, d_max = params.displacement_bounds(layout)
    length = sample_truncated_pareto(rng, params.displacement_exponent,
                                     d_min, d_max)
    target = position
    for _ in range(params.max_retries):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        target = position + length * np.array([math.cos(angle),
                                               math.sin(angle)])
        if layout.is_free(target, margin):
            return target
    return layout.nearest_free_point(target, margin)


def _clamp_speed(velocity, limit):
    speed = np.hypot(*velocity)
    if speed > limit:
        velocity = velocity * (limit / speed)
    return velocity


def steering_step(user, others, layout, params, dt):
    """Advance *user* by *dt* seconds under seek, arrival, UE-avoidance and
    obstacle-avoidance forces. *others* must be states from the same step.
    Velocity is capped at the walk speed and a position leaving free space
    is projected back into it
    """
    if not dt > 0:
        raise InvalidArgumentError('dt', dt, '> 0')
    gains = params.force_gains
    speed = params.walk_speed
    radius = params.avoid_radius
    position, velocity = user.position, user.velocity
    accel = np.zeros(2)

    to_target = user.waypoint - position
    dist = float(np.hypot(*to_target))
    direction = to_target / dist if dist > 1e-12 else np.zeros(2)
    if dist > params.slow_radius:
        accel += gains['seek'] * (speed * direction - velocity)
    else:
        desired = speed * (dist / params.slow_radius) * direction
        accel += gains['arrival'] * (desired - velocity)

    for other in others:
        if other.id == user.id:
            continue
        away = position - other.position
        gap = float(np.hypot(*away))
        if 1e-9 < gap < radius:
            accel += gains['ue_avoid'] * (1.0 / gap - 1.0 / radius) * \
                away / gap

    gap, surface = layout.nearest_obstacle(position)
    if 1e-9 < gap < radius:
        accel += gains['obstacle_avoid'] * (1.0 / gap - 1.0 / radius) * \
            (position - surface) / gap

    new_velocity = _clamp_speed(velocity + accel * dt, speed)
    new_position = position + new_velocity * dt
    if not layout.is_free(new_position, params.body_radius):
        new_position = layout.nearest_free_point(new_position,
                                                 params.body_radius)
        new_velocity = _clamp_speed((new_position - position) / dt, speed)
    heading = user.heading
    moving = float(np.hypot(*new_velocity))
    if moving > 1e-6:
        heading = new_velocity / moving
    return user.evolve(position=new_position, velocity=new_velocity,
                       heading=heading, ue_pose=user.ue_pose.facing(heading),
                       leg_time=user.leg_time + dt)


class Crowd(object):
    """All users of one run. Users spawn at the door during the entering
    phase, roam by the waypoint process while wandering, and head back to the
    door once exiting starts, leaving the room on arrival
    """
    name = 'Crowd'

    def __init__(self, layout, n_users, params, orientation, schedule,
                 duration_steps, dt, streams):
        """Create a :class:`~ristide.sim.mobility.Crowd`

        :param layout: built :class:`~ristide.sim.geometry.Layout`
        :param n_users: number of users to spawn
        :param params: :class:`MobilityParams`
        :param orientation: :class:`OrientationParams`
        :param schedule: :class:`PhaseSchedule`
        :param duration_steps: length of the run in steps
        :param dt: step length in seconds
        :param streams: :class:`~ristide.core.SeedStreams`
        """
        self.logger = logging.getLogger(self.name)
        self._layout = layout
        self._params = params
        self._orientation = orientation
        self._schedule = schedule
        self._duration = int(duration_steps)
        self._dt = float(dt)
        self._nodes = resident_nodes(layout, params.body_radius)
        self._seats = seat_anchors(layout, params.body_radius)
        self._door = layout.door_anchor
        self._rngs = {}
        self._active = OrderedDict()
        self._exiting = False
        self.spawned = 0
        self.despawned = 0
        spawn_rng = streams.generator('spawn')
        # spawns land strictly before the entering boundary step
        window = max(1, schedule.boundary_steps(self._duration)[0] - 1)
        self._pending = []
        for i in range(int(n_users)):
            step = 1 + int(spawn_rng.integers(0, window))
            jitter = float(spawn_rng.uniform(-0.1, 0.1))
            user_id = 'U{}'.format(i)
            self._rngs[user_id] = streams.generator('user', i)
            self._pending.append((step, i, user_id, jitter))
        self._pending.sort()

    @property
    def users(self):
        """Active users in spawn order"""
        return list(self._active.values())

    @property
    def active(self):
        return len(self._active)

    @property
    def resident_nodes(self):
        return list(self._nodes)

    def _renew(self, user, rng):
        waypoint = next_waypoint(user, self._layout, self._params, rng,
                                 self._nodes)
        pose = sample_ue_orientation('walking', self._orientation,
                                     user.heading, rng)
        return user.evolve(waypoint=waypoint, posture='walking',
                           sojourn_remaining=0.0, ue_pose=pose, leg_time=0.0)

    def _spawn(self, step, phase):
        while self._pending and self._pending[0][0] <= step:
            _, _, user_id, jitter = self._pending.pop(0)
            start = self._layout.nearest_free_point(
                self._door + np.array([jitter, 0.0]),
                self._params.body_radius)
            user = UserState(user_id, start, phase=phase,
                             body_radius=self._params.body_radius,
                             body_height=self._params.body_height)
            user = self._renew(user, self._rngs[user_id])
            self._active[user_id] = user
            self.spawned += 1
            self.logger.debug('spawned %s at step %d', user_id, step)

    def _near_seat(self, position):
        radius = self._params.seat_radius
        return any(np.hypot(*(seat - position)) <= radius
                   for seat in self._seats)

    def _start_exit(self):
        for user_id, user in self._active.items():
            pose = sample_ue_orientation('walking', self._orientation,
                                         user.heading, self._rngs[user_id])
            self._active[user_id] = user.evolve(
                waypoint=self._door.copy(), posture='walking',
                sojourn_remaining=0.0, ue_pose=pose, leg_time=0.0)
        self._exiting = True
        self.logger.debug('exit phase: %d users heading out', self.active)

    def _settle(self, user, rng):
        """Apply semi-Markov renewal to a freshly stepped user"""
        params = self._params
        if user.sojourn_remaining > 0:
            remaining = max(0.0, user.sojourn_remaining - self._dt)
            if remaining <= 0.0:
                return self._renew(user, rng)
            return user.evolve(sojourn_remaining=remaining)
        if np.hypot(*(user.waypoint - user.position)) < params.arrive_radius:
            lo, hi = params.sojourn_bounds
            sojourn = sample_truncated_pareto(rng, params.sojourn_exponent,
                                              lo, hi)
            posture = 'sitting' if self._near_seat(user.position) else \
                'walking'
            pose = user.ue_pose
            if posture != user.posture:
                pose = sample_ue_orientation(posture, self._orientation,
                                             user.heading, rng)
            return user.evolve(sojourn_remaining=sojourn, posture=posture,
                               ue_pose=pose, leg_time=0.0)
        if user.leg_time > params.leg_timeout:
            return self._renew(user, rng)
        return user

    def step(self, step):
        """Advance every user by one step

        :param step: step number, 1 to ``duration_steps``
        :return: the phase label of this step
        """
        phase = phase_of(step / float(self._duration), self._schedule)
        self._spawn(step, phase)
        if phase == PHASES[2] and not self._exiting:
            self._start_exit()
        snapshot = list(self._active.values())
        stepped = [steering_step(user, snapshot, self._layout, self._params,
                                 self._dt) for user in snapshot]
        for user in stepped:
            user = user.evolve(phase=phase)
            if self._exiting:
                if np.hypot(*(self._door - user.position)) < \
                        self._params.despawn_radius:
                    del self._active[user.id]
                    self.despawned += 1
                    self.logger.debug('%s left at step %d', user.id, step)
                    continue
                self._active[user.id] = user
                continue
            self._active[user.id] = self._settle(user, self._rngs[user.id])
        return phase
