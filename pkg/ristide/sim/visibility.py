# -*- coding: utf-8 -*-
"""Shadow regions on tiled walls.

A tile is shadowed for a point source when the open segment from the source
to the tile center passes through the interior of a blocker. Shadows are
found by projecting blocker silhouettes from the source onto the wall plane.
Cylinders are bracketed between an inscribed and a circumscribed 16-gon
prism: tiles inside the inscribed shadow are shadowed, tiles outside the
circumscribed shadow are clear, and the thin band between them is settled by
:func:`segment_blocked_oracle`.
"""
import logging

import numpy as np
from scipy.spatial import ConvexHull

try:
    from scipy.spatial import QhullError
except ImportError:  # scipy < 1.8
    from scipy.spatial.qhull import QhullError

from ..core import as_point
from ..errors import GeometryError, InvalidArgumentError

__author__ = 'ristide'
__all__ = ['Blocker', 'TileMask', 'shadow_polygon', 'shadowed_tiles',
           'segment_blocked_oracle', 'oracle_hits', 'oracle_mask']

N_SIDES = 16
#: silhouette points nearer than this to the source plane are pushed to it
NEAR_PLANE = 1e-6
#: tiles this close to a shadow edge are resolved by the oracle
EDGE_BAND = 1e-7

logger = logging.getLogger(__name__)

_BOX_EDGES = [(0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (1, 3), (4, 6), (5, 7),
              (0, 4), (1, 5), (2, 6), (3, 7)]


class Blocker(object):
    """An opaque obstacle: a vertical cylinder (a user's body) or an axis
    aligned box (furniture)
    """
    CYLINDER = 'cylinder'
    BOX = 'box'

    def __init__(self, kind, lo, hi, center=None, radius=None, label=None):
        self._kind = kind
        self._lo = np.asarray(lo, dtype=float)
        self._hi = np.asarray(hi, dtype=float)
        self._center = None if center is None else np.asarray(center,
                                                              dtype=float)
        self._radius = radius
        self._label = label
        if not np.all(self._hi > self._lo):
            raise InvalidArgumentError('blocker extents', (lo, hi),
                                       'positive dimensions')

    @classmethod
    def cylinder(cls, center, radius, height, base=0.0, label=None):
        """Vertical cylinder standing on ``z = base``"""
        center = as_point(center, 2, 'center')
        if not radius > 0 or not height > 0:
            raise InvalidArgumentError('cylinder', (radius, height),
                                       'positive radius and height')
        lo = (center[0] - radius, center[1] - radius, base)
        hi = (center[0] + radius, center[1] + radius, base + height)
        return cls(cls.CYLINDER, lo, hi, center=center, radius=float(radius),
                   label=label)

    @classmethod
    def box(cls, lo, hi, label=None):
        """Axis aligned box with corners *lo* and *hi*"""
        return cls(cls.BOX, as_point(lo, 3, 'lo'), as_point(hi, 3, 'hi'),
                   label=label)

    @property
    def kind(self):
        return self._kind

    @property
    def lo(self):
        """Lower corner of the bounding box"""
        return self._lo

    @property
    def hi(self):
        """Upper corner of the bounding box"""
        return self._hi

    @property
    def center(self):
        return self._center

    @property
    def radius(self):
        return self._radius

    @property
    def base(self):
        return self._lo[2]

    @property
    def height(self):
        return self._hi[2] - self._lo[2]

    @property
    def label(self):
        return self._label

    def prism(self, n_sides=N_SIDES, circumscribe=False):
        """Return ``(vertices, edges)`` of the convex polytope used for
        projection. Boxes are exact; cylinders become regular *n_sides*
        prisms, inscribed or circumscribed
        """
        if self._kind == self.BOX:
            lo, hi = self._lo, self._hi
            vertices = np.array([[x, y, z] for x in (lo[0], hi[0])
                                 for y in (lo[1], hi[1])
                                 for z in (lo[2], hi[2])])
            return vertices, _BOX_EDGES
        radius = self._radius
        if circumscribe:
            radius = radius / np.cos(np.pi / n_sides)
        angles = 2.0 * np.pi * np.arange(n_sides) / n_sides
        ring = np.stack([self._center[0] + radius * np.cos(angles),
                         self._center[1] + radius * np.sin(angles)], axis=1)
        bottom = np.column_stack([ring, np.full(n_sides, self._lo[2])])
        top = np.column_stack([ring, np.full(n_sides, self._hi[2])])
        edges = []
        for i in range(n_sides):
            j = (i + 1) % n_sides
            edges.extend([(i, j), (n_sides + i, n_sides + j),
                          (i, n_sides + i)])
        return np.vstack([bottom, top]), edges

    def encloses(self, point, n_sides=N_SIDES):
        """True when *point* lies in the closed circumscribed polytope, where
        projected shadows are not reliable
        """
        if self._kind == self.BOX:
            return bool(np.all((self._lo <= point) & (point <= self._hi)))
        if not self._lo[2] <= point[2] <= self._hi[2]:
            return False
        reach = self._radius / np.cos(np.pi / n_sides)
        return bool(np.hypot(*(point[:2] - self._center[:2])) <= reach)

    def __str__(self):
        if self._kind == self.CYLINDER:
            return '<Blocker>: cylinder {} r={} h={}'.format(
                self._center.tolist(), self._radius, self.height)
        return '<Blocker>: box {} {}'.format(self._lo.tolist(),
                                             self._hi.tolist())
    __repr__ = __str__


class TileMask(object):
    """One boolean per tile of a wall, True where the tile is shadowed"""
    def __init__(self, wall_id, bits):
        self._wall_id = wall_id
        self._bits = np.asarray(bits, dtype=bool)

    @property
    def wall_id(self):
        return self._wall_id

    @property
    def bits(self):
        return self._bits

    @property
    def count(self):
        return int(self._bits.sum())

    def __len__(self):
        return len(self._bits)

    def __or__(self, other):
        if other.wall_id != self._wall_id or len(other) != len(self):
            raise InvalidArgumentError('mask', other.wall_id, self._wall_id)
        return TileMask(self._wall_id, self._bits | other.bits)

    def __eq__(self, other):
        return isinstance(other, TileMask) and \
            other.wall_id == self._wall_id and \
            np.array_equal(other.bits, self._bits)

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __str__(self):
        return '<TileMask>: {} {}/{}'.format(self._wall_id, self.count,
                                             len(self))
    __repr__ = __str__


def _clip_half_plane(poly, axis, bound, keep_above):
    out = []
    count = len(poly)
    for i in range(count):
        cur, prev = poly[i], poly[i - 1]
        if keep_above:
            cur_in, prev_in = cur[axis] >= bound, prev[axis] >= bound
        else:
            cur_in, prev_in = cur[axis] <= bound, prev[axis] <= bound
        if cur_in != prev_in:
            s = (bound - prev[axis]) / (cur[axis] - prev[axis])
            crossing = prev + s * (cur - prev)
            crossing[axis] = bound
            out.append(crossing)
        if cur_in:
            out.append(cur)
    return np.asarray(out, dtype=float).reshape(-1, 2)


def _clip_to_rect(poly, width, height):
    """Sutherland-Hodgman clip of a convex polygon to the wall rectangle"""
    for axis, bound, keep_above in ((0, 0.0, True), (0, width, False),
                                    (1, 0.0, True), (1, height, False)):
        poly = _clip_half_plane(poly, axis, bound, keep_above)
        if len(poly) == 0:
            break
    if len(poly):
        step = np.roll(poly, -1, axis=0) - poly
        poly = poly[np.hypot(step[:, 0], step[:, 1]) > 1e-12]
    if len(poly) < 3:
        return np.zeros((0, 2))
    return poly


def _projected_silhouette(source, blocker, wall, n_sides, circumscribe):
    """Project the blocker polytope from *source* onto the wall plane. Parts
    of the blocker nearer than :data:`NEAR_PLANE` to the source plane are cut
    away first, so projections that would run off to infinity stay finite
    """
    depth = float(wall.depth(source))
    if abs(depth) < 1e-12:
        raise GeometryError('Source {} lies on wall {} plane'.format(
            source.tolist(), wall.id))
    if depth < 0:
        raise GeometryError('Source {} is outside wall {}'.format(
            source.tolist(), wall.id))
    vertices, edges = blocker.prism(n_sides, circumscribe)
    t = (vertices - source) @ wall.normal
    kept = [vertices[t >= NEAR_PLANE]]
    for i, j in edges:
        if (t[i] >= NEAR_PLANE) != (t[j] >= NEAR_PLANE):
            s = (NEAR_PLANE - t[i]) / (t[j] - t[i])
            kept.append((vertices[i] + s * (vertices[j] - vertices[i]))[None])
    points = np.vstack(kept)
    if len(points) == 0:
        return points.reshape(0, 2)
    t = np.maximum((points - source) @ wall.normal, NEAR_PLANE)
    projected = source + (points - source) * (depth / t)[:, None]
    return wall.to_local(projected)


def _hull(points):
    if len(points) < 3:
        return np.zeros((0, 2))
    hull = ConvexHull(points)
    return points[hull.vertices]


def shadow_polygon(source, blocker, wall, n_sides=N_SIDES,
                   circumscribe=False):
    """Return the shadow of *blocker* cast from *source* on *wall* as a
    counter-clockwise polygon in wall-plane coordinates, clipped to the wall.
    The polygon is empty when the blocker is behind the source

    :param source: 3-D point strictly on the room side of the wall
    :param blocker: a :class:`Blocker`
    :param wall: a :class:`~ristide.sim.geometry.Wall`
    :param n_sides: sides of the prism standing in for a cylinder
    :param circumscribe: use the prism around the cylinder instead of the one
        inside it
    :raises GeometryError: when the source lies on the wall plane
    """
    source = as_point(source, 3, 'source')
    points = _projected_silhouette(source, blocker, wall, n_sides,
                                   circumscribe)
    try:
        hull = _hull(points)
    except QhullError:
        return np.zeros((0, 2))
    if len(hull) == 0:
        return hull
    return _clip_to_rect(hull, wall.width, wall.height)


def _polygon_depth(poly, points):
    """Signed distance of *points* inside a CCW convex polygon, positive
    inside
    """
    step = np.roll(poly, -1, axis=0) - poly
    lengths = np.hypot(step[:, 0], step[:, 1])
    normals = np.stack([-step[:, 1], step[:, 0]], axis=1) / lengths[:, None]
    rel = points[:, None, :] - poly[None, :, :]
    return (rel * normals[None, :, :]).sum(axis=2).min(axis=1)


def _interval(lo_t, hi_t, start, delta, lo, hi):
    """Narrow the open parameter interval (lo_t, hi_t) to the slab
    ``lo < start + t * delta < hi``
    """
    parallel = delta == 0
    with np.errstate(divide='ignore', invalid='ignore'):
        t1 = (lo - start) / delta
        t2 = (hi - start) / delta
    t_min = np.minimum(t1, t2)
    t_max = np.maximum(t1, t2)
    inside = (lo < start) & (start < hi)
    t_min = np.where(parallel, np.where(inside, -np.inf, np.inf), t_min)
    t_max = np.where(parallel, np.where(inside, np.inf, -np.inf), t_max)
    return np.maximum(lo_t, t_min), np.minimum(hi_t, t_max)


def _segments_hit(start, ends, blocker):
    """For each open segment ``start -> ends[k]`` tell whether it meets the
    open interior of *blocker*
    """
    delta = ends - start
    lo_t = np.zeros(len(ends))
    hi_t = np.ones(len(ends))
    if blocker.kind == Blocker.BOX:
        for axis in range(3):
            lo_t, hi_t = _interval(lo_t, hi_t, start[axis], delta[:, axis],
                                   blocker.lo[axis], blocker.hi[axis])
        return lo_t < hi_t
    lo_t, hi_t = _interval(lo_t, hi_t, start[2], delta[:, 2],
                           blocker.lo[2], blocker.hi[2])
    fx = start[0] - blocker.center[0]
    fy = start[1] - blocker.center[1]
    a = delta[:, 0] ** 2 + delta[:, 1] ** 2
    b = 2.0 * (fx * delta[:, 0] + fy * delta[:, 1])
    c = fx * fx + fy * fy - blocker.radius ** 2
    disc = b * b - 4.0 * a * c
    vertical = a == 0
    with np.errstate(divide='ignore', invalid='ignore'):
        root = np.sqrt(np.where(disc > 0, disc, 0.0))
        t1 = (-b - root) / (2.0 * a)
        t2 = (-b + root) / (2.0 * a)
    crosses = ~vertical & (disc > 0)
    t1 = np.where(crosses, t1, np.where(vertical & (c < 0), -np.inf, np.inf))
    t2 = np.where(crosses, t2, np.where(vertical & (c < 0), np.inf, -np.inf))
    return np.maximum(lo_t, t1) < np.minimum(hi_t, t2)


def segment_blocked_oracle(p, q, blockers):
    """Brute force test of the open segment *p* -> *q* against the open
    interior of every blocker. Touching a blocker surface does not block
    """
    p = as_point(p, 3, 'p')
    q = as_point(q, 3, 'q')
    for blocker in blockers:
        if _segments_hit(p, q[None, :], blocker)[0]:
            return True
    return False


def oracle_hits(source, blockers, points):
    """Vectorized oracle from one *source* to many *points*"""
    source = as_point(source, 3, 'source')
    points = np.atleast_2d(np.asarray(points, dtype=float))
    bits = np.zeros(len(points), dtype=bool)
    for blocker in blockers:
        bits |= _segments_hit(source, points, blocker)
    return bits


def oracle_mask(source, blockers, grid):
    """Build the mask of *grid* by testing every tile center with the
    segment oracle
    """
    source = as_point(source, 3, 'source')
    return TileMask(grid.wall_id,
                    oracle_hits(source, blockers, grid.tile_centers))


def _in_front(source, blocker, wall):
    """Bounding box cull: False when the whole blocker is behind the source
    """
    corners = np.array([[x, y, z] for x in (blocker.lo[0], blocker.hi[0])
                        for y in (blocker.lo[1], blocker.hi[1])
                        for z in (blocker.lo[2], blocker.hi[2])])
    return bool(np.any((corners - source) @ wall.normal >= NEAR_PLANE))


def _shadow_or_none(source, blocker, wall, circumscribe):
    points = _projected_silhouette(source, blocker, wall, N_SIDES,
                                   circumscribe)
    hull = _hull(points)
    if len(hull) == 0:
        return hull
    return _clip_to_rect(hull, wall.width, wall.height)


def shadowed_tiles(source, blockers, grid):
    """Mark every tile of *grid* whose center lies in the shadow of any of
    *blockers* as seen from *source*

    :param source: 3-D point source (an AP, or a UE for the UE-side mask)
    :param blockers: iterable of :class:`Blocker`
    :param grid: the :class:`~ristide.sim.geometry.TileGrid` of one wall
    :return: a :class:`TileMask`
    """
    source = as_point(source, 3, 'source')
    wall = grid.wall
    local = grid.local_centers
    bits = np.zeros(grid.n_tiles, dtype=bool)
    for blocker in blockers:
        if not _in_front(source, blocker, wall):
            continue
        open_idx = np.flatnonzero(~bits)
        if len(open_idx) == 0:
            break
        if blocker.encloses(source):
            hit = _segments_hit(source, grid.tile_centers[open_idx], blocker)
            bits[open_idx[hit]] = True
            continue
        try:
            outer = _shadow_or_none(source, blocker, wall, True)
            if len(outer) == 0:
                continue
            depth_out = _polygon_depth(outer, local[open_idx])
            cand = open_idx[depth_out > -EDGE_BAND]
            if len(cand) == 0:
                continue
            if blocker.kind == Blocker.BOX:
                depth_in = depth_out[depth_out > -EDGE_BAND]
            else:
                inner = _shadow_or_none(source, blocker, wall, False)
                if len(inner):
                    depth_in = _polygon_depth(inner, local[cand])
                else:
                    depth_in = np.full(len(cand), -np.inf)
        except QhullError:
            logger.debug('degenerate shadow of %s, using oracle', blocker)
            cand = open_idx
            depth_in = np.full(len(cand), -np.inf)
        sure = depth_in > EDGE_BAND
        bits[cand[sure]] = True
        unsure = cand[~sure]
        if len(unsure):
            hit = _segments_hit(source, grid.tile_centers[unsure], blocker)
            bits[unsure[hit]] = True
    return TileMask(grid.wall_id, bits)
