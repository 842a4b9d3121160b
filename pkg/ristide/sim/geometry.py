# -*- coding: utf-8 -*-
"""Room construction: walls S1-S4, furniture blockers, ceiling access points
and the evenly spaced RIS tile grid covering every wall.

The room spans ``[0, length] x [0, width] x [0, height]``. S2 is the door wall
at ``y = 0``, S1 opposes it at ``y = width``, S3 is ``x = 0`` (left of a user
entering through the door) and S4 is ``x = length``.
"""
import logging
import math
from collections import OrderedDict

import numpy as np

from ..core import settings_dict
from ..errors import InvalidSpecError, TilingError
from .visibility import Blocker

__author__ = 'ristide'
__all__ = ['WALL_IDS', 'RisTileSpec', 'LayoutSpec', 'Wall', 'TileGrid',
           'Tile', 'AccessPoint', 'Layout', 'build_layout',
           'generate_tile_grid', 'ap_positions', 'seat_anchors',
           'resident_nodes']

WALL_IDS = ('S1', 'S2', 'S3', 'S4')
DOOR_WIDTH = 0.9
SEAT_STANDOFF = 0.4
SEAT_PITCH = 0.6
FREE_MARGIN = 0.15
TOLERANCE = 1e-9

logger = logging.getLogger(__name__)


class RisTileSpec(object):
    """Square RIS tile made of a square lattice of meta-surfaces"""
    def __init__(self, tile_size=0.1, meta_surface_size=None,
                 meta_per_tile=100):
        """Create a :class:`~ristide.sim.geometry.RisTileSpec`

        :param tile_size: edge of one tile, in meters
        :param meta_surface_size: edge of one meta-surface, in meters. Defaults
            to ``tile_size / sqrt(meta_per_tile)``
        :param meta_per_tile: number of meta-surfaces in one tile
        """
        self._tile_size = float(tile_size)
        self._meta_per_tile = int(meta_per_tile)
        if meta_surface_size is None:
            meta_surface_size = self._tile_size / math.sqrt(
                max(self._meta_per_tile, 1))
        self._meta_surface_size = float(meta_surface_size)

    @property
    def tile_size(self):
        return self._tile_size

    @property
    def meta_surface_size(self):
        return self._meta_surface_size

    @property
    def meta_per_tile(self):
        return self._meta_per_tile

    @property
    def area(self):
        """Tile area in square meters"""
        return self._tile_size ** 2

    def validate(self):
        """Raise :class:`~ristide.errors.InvalidSpecError` unless the tile is
        exactly covered by its meta-surfaces
        """
        if not self._tile_size > 0 or not self._meta_surface_size > 0 or \
                self._meta_per_tile < 1:
            raise InvalidSpecError('tile dimensions strictly positive')
        covered = self._meta_per_tile * self._meta_surface_size ** 2
        if abs(covered - self.area) > TOLERANCE * max(self.area, 1.0):
            raise InvalidSpecError(
                'tile_size^2 = meta_per_tile x meta_surface_size^2',
                '{} != {}'.format(self.area, covered))

    @classmethod
    def from_dict(cls, data):
        return cls(**dict(data or {}))

    @property
    def _json(self):
        return {'tile_size': self._tile_size,
                'meta_surface_size': self._meta_surface_size,
                'meta_per_tile': self._meta_per_tile}


class LayoutSpec(object):
    """Declarative description of one room: size, door, furniture and AP
    count. :func:`build_layout` turns it into a :class:`Layout`
    """
    def __init__(self, room_size=(5.0, 3.0, 3.0), door=None, furniture=None,
                 ap_count=4, layout_id='custom', tiles=None,
                 ap_spread=None):
        """Create a :class:`~ristide.sim.geometry.LayoutSpec`

        :param room_size: (length, width, height) in meters
        :param door: dict with ``wall`` (must be ``'S2'``) and ``span``, the
            horizontal (start, end) of the opening along S2. Defaults to a
            0.9 m door centered on S2
        :param furniture: list of boxes, each a dict with ``lo``, ``hi`` and
            an optional ``label``
        :param ap_count: number of ceiling access points, 1 to 9
        :param layout_id: label, one of R1, R2, R3 or custom
        :param tiles: :class:`RisTileSpec` or a dict of its fields
        :param ap_spread: (x, y) sides in meters of the ceiling rectangle,
            centered on the ceiling, that the APs are evenly spread over.
            Defaults to the whole ceiling
        """
        self._room_size = tuple(float(x) for x in room_size)
        self._door = dict(door) if door else None
        self._furniture = [dict(f) for f in (furniture or [])]
        self._ap_count = ap_count
        self._ap_spread = None if ap_spread is None else \
            tuple(float(x) for x in ap_spread)
        self._layout_id = layout_id
        if not isinstance(tiles, RisTileSpec):
            tiles = RisTileSpec.from_dict(tiles)
        self._tiles = tiles

    @property
    def room_size(self):
        return self._room_size

    @property
    def door(self):
        """The door as ``{'wall': 'S2', 'span': (start, end)}``"""
        if self._door is not None:
            return {'wall': self._door.get('wall', 'S2'),
                    'span': tuple(float(x) for x in self._door['span'])}
        length = self._room_size[0]
        width = min(DOOR_WIDTH, length)
        start = (length - width) / 2.0
        return {'wall': 'S2', 'span': (start, start + width)}

    @property
    def furniture(self):
        return list(self._furniture)

    @property
    def ap_count(self):
        return self._ap_count

    @ap_count.setter
    def ap_count(self, value):
        self._ap_count = value

    @property
    def ap_spread(self):
        """(x, y) sides of the ceiling rectangle holding the APs"""
        if self._ap_spread is None:
            return self._room_size[:2]
        return self._ap_spread

    @property
    def layout_id(self):
        return self._layout_id

    @property
    def tiles(self):
        return self._tiles

    def validate(self):
        """Check every invariant of this spec

        :raises InvalidSpecError: naming the first violated invariant
        """
        if len(self._room_size) != 3 or not all(
                math.isfinite(x) and x > 0 for x in self._room_size):
            raise InvalidSpecError('room dimensions strictly positive',
                                   str(self._room_size))
        length, width, height = self._room_size
        door = self.door
        if door['wall'] != 'S2':
            raise InvalidSpecError('S2 contains the door', door['wall'])
        start, end = door['span']
        if not (-TOLERANCE <= start < end <= length + TOLERANCE):
            raise InvalidSpecError('door span lies within its wall',
                                   str(door['span']))
        for box in self._furniture:
            lo = np.asarray(box['lo'], dtype=float)
            hi = np.asarray(box['hi'], dtype=float)
            if lo.shape != (3,) or hi.shape != (3,) or \
                    not np.all(lo < hi) or \
                    np.any(lo < -TOLERANCE) or \
                    np.any(hi > np.asarray(self._room_size) + TOLERANCE):
                raise InvalidSpecError('furniture boxes lie inside the room',
                                       str(box))
        if isinstance(self._ap_count, bool) or \
                not isinstance(self._ap_count, int) or \
                not 1 <= self._ap_count <= 9:
            raise InvalidSpecError('ap_count in {1,...,9}',
                                   str(self._ap_count))
        if self._ap_spread is not None and (
                len(self._ap_spread) != 2 or
                not all(0 < s <= d + TOLERANCE for s, d in
                        zip(self._ap_spread, self._room_size[:2]))):
            raise InvalidSpecError('AP spread fits the ceiling',
                                   str(self._ap_spread))
        self._tiles.validate()

    @classmethod
    def from_dict(cls, data):
        """Build a spec from the ``layout`` section of a scenario file"""
        data = dict(data)
        kwargs = {}
        for key in ('room_size', 'door', 'furniture', 'ap_count',
                    'layout_id', 'tiles', 'ap_spread'):
            if key in data:
                kwargs[key] = data.pop(key)
        if data:
            raise InvalidSpecError('known layout keys only',
                                   ', '.join(sorted(data)))
        return cls(**kwargs)

    @property
    def _json(self):
        return settings_dict({
            'layout_id': self._layout_id,
            'room_size': list(self._room_size),
            'door': {'wall': self.door['wall'],
                     'span': list(self.door['span'])},
            'furniture': self._furniture,
            'ap_count': self._ap_count,
            'ap_spread': None if self._ap_spread is None
            else list(self._ap_spread),
            'tiles': self._tiles._json})

    def __str__(self):
        return '<LayoutSpec>: {} {}'.format(self._layout_id, self._room_size)
    __repr__ = __str__


class Wall(object):
    """A planar wall: origin at its lower corner, horizontal in-plane axis
    ``u``, vertical axis ``v`` and outward normal
    """
    def __init__(self, wall_id, origin, u, normal, width, height):
        self._id = wall_id
        self._origin = np.asarray(origin, dtype=float)
        self._u = np.asarray(u, dtype=float)
        self._v = np.array([0.0, 0.0, 1.0])
        self._normal = np.asarray(normal, dtype=float)
        self._width = float(width)
        self._height = float(height)

    @property
    def id(self):
        return self._id

    @property
    def origin(self):
        return self._origin

    @property
    def u(self):
        return self._u

    @property
    def v(self):
        return self._v

    @property
    def normal(self):
        """Outward unit normal"""
        return self._normal

    @property
    def inward(self):
        return -self._normal

    @property
    def width(self):
        return self._width

    @property
    def height(self):
        return self._height

    @property
    def extent(self):
        return self._width, self._height

    def depth(self, points):
        """Distance from *points* to the wall plane, positive on the room
        side
        """
        points = np.asarray(points, dtype=float)
        return (self._origin - points) @ self._normal

    def to_local(self, points):
        """Project 3-D *points* to wall-plane (a, b) coordinates"""
        rel = np.asarray(points, dtype=float) - self._origin
        return np.stack([rel @ self._u, rel @ self._v], axis=-1)

    def to_world(self, local):
        """Map wall-plane (a, b) coordinates back to 3-D points on the wall"""
        local = np.asarray(local, dtype=float)
        return (self._origin + local[..., :1] * self._u +
                local[..., 1:2] * self._v)

    def __str__(self):
        return '<Wall>: {} {}x{}'.format(self._id, self._width, self._height)
    __repr__ = __str__


class Tile(object):
    """One RIS tile of a :class:`TileGrid`"""
    def __init__(self, index, row, col, center, normal, area):
        self.index = index
        self.row = row
        self.col = col
        self.center = center
        self.normal = normal
        self.area = area

    def __str__(self):
        return '<Tile>: {} ({}, {})'.format(self.index, self.row, self.col)
    __repr__ = __str__


class TileGrid(object):
    """Uniform lattice of square tiles fully covering one wall. Row 0 is the
    bottom row and tile ``index = row * cols + col``
    """
    def __init__(self, wall, rows, cols, tile_size):
        self._wall = wall
        self._rows = rows
        self._cols = cols
        self._tile_size = tile_size
        cc, rr = np.meshgrid(np.arange(cols), np.arange(rows))
        self._local = np.stack([(cc.ravel() + 0.5) * tile_size,
                                (rr.ravel() + 0.5) * tile_size], axis=1)
        self._centers = wall.to_world(self._local)
        self._local.setflags(write=False)
        self._centers.setflags(write=False)

    @property
    def wall(self):
        return self._wall

    @property
    def wall_id(self):
        return self._wall.id

    @property
    def rows(self):
        return self._rows

    @property
    def cols(self):
        return self._cols

    @property
    def n_tiles(self):
        return self._rows * self._cols

    @property
    def tile_size(self):
        return self._tile_size

    @property
    def tile_area(self):
        return self._tile_size ** 2

    @property
    def tile_centers(self):
        """(n_tiles, 3) array of tile centers"""
        return self._centers

    @property
    def local_centers(self):
        """(n_tiles, 2) array of tile centers in wall-plane coordinates"""
        return self._local

    @property
    def tile_normal(self):
        """Unit normal of every tile, facing into the room"""
        return self._wall.inward

    def index(self, row, col):
        return row * self._cols + col

    def row_col(self, index):
        return divmod(int(index), self._cols)

    def tile(self, index):
        row, col = self.row_col(index)
        return Tile(int(index), row, col, self._centers[index],
                    self.tile_normal, self.tile_area)

    def image(self, values):
        """Reshape a per-tile vector to a (rows, cols) array with the top row
        of the wall first
        """
        values = np.asarray(values)
        return values.reshape(self._rows, self._cols)[::-1]

    def __len__(self):
        return self.n_tiles

    def __str__(self):
        return '<TileGrid>: {} {}x{}'.format(self.wall_id, self._rows,
                                             self._cols)
    __repr__ = __str__


class AccessPoint(object):
    """Ceiling mounted access point"""
    def __init__(self, ap_id, position, band=None):
        self._id = ap_id
        self._position = np.asarray(position, dtype=float)
        self._band = band

    @property
    def id(self):
        return self._id

    @property
    def position(self):
        return self._position

    @property
    def band(self):
        return self._band

    @band.setter
    def band(self, value):
        self._band = value

    def __str__(self):
        return '<AccessPoint>: {} {}'.format(self._id,
                                             self._position.tolist())
    __repr__ = __str__


def _build_walls(length, width, height):
    walls = OrderedDict()
    walls['S1'] = Wall('S1', (0.0, width, 0.0), (1.0, 0.0, 0.0),
                       (0.0, 1.0, 0.0), length, height)
    walls['S2'] = Wall('S2', (0.0, 0.0, 0.0), (1.0, 0.0, 0.0),
                       (0.0, -1.0, 0.0), length, height)
    walls['S3'] = Wall('S3', (0.0, 0.0, 0.0), (0.0, 1.0, 0.0),
                       (-1.0, 0.0, 0.0), width, height)
    walls['S4'] = Wall('S4', (length, 0.0, 0.0), (0.0, 1.0, 0.0),
                       (1.0, 0.0, 0.0), width, height)
    return walls


def generate_tile_grid(wall, tiles):
    """Cover *wall* with square tiles of ``tiles.tile_size``

    :param wall: a :class:`Wall`
    :param tiles: a :class:`RisTileSpec`
    :raises TilingError: when either wall extent is not a whole number of
        tiles within 1e-9 m
    """
    size = tiles.tile_size
    if not size > 0:
        raise TilingError('tile dimensions strictly positive', str(size))
    counts = []
    for extent in (wall.height, wall.width):
        count = int(round(extent / size))
        if count < 1 or abs(count * size - extent) > TOLERANCE:
            raise TilingError('wall extent divisible by tile_size',
                              '{} / {} on {}'.format(extent, size, wall.id))
        counts.append(count)
    rows, cols = counts
    return TileGrid(wall, rows, cols, size)


def ap_positions(count, length, width, height, spread=None):
    """Evenly spread *count* APs over the ceiling, row-major, one per grid
    cell center

    :param spread: (x, y) sides of the centered ceiling rectangle the grid
        covers, the whole ceiling when omitted
    """
    span_x, span_y = (length, width) if spread is None else spread
    x0 = (length - span_x) / 2.0
    y0 = (width - span_y) / 2.0
    cols = int(math.ceil(math.sqrt(count)))
    rows = int(math.ceil(count / float(cols)))
    positions = []
    for r in range(rows):
        in_row = cols if r < rows - 1 else count - cols * (rows - 1)
        y = y0 + (r + 0.5) * span_y / rows
        for i in range(in_row):
            positions.append((x0 + (i + 0.5) * span_x / in_row, y, height))
    return np.asarray(positions, dtype=float)


class Layout(object):
    """A built room: walls, tile grids, furniture blockers and APs. Instances
    are read only after :func:`build_layout` returns
    """
    def __init__(self, spec, walls, grids, furniture, aps):
        self._spec = spec
        self._walls = walls
        self._grids = grids
        self._furniture = furniture
        self._aps = aps
        self._size = np.asarray(spec.room_size, dtype=float)
        self._lattice = {}
        if furniture:
            self._footprints = np.array([[f.lo[0], f.lo[1], f.hi[0], f.hi[1]]
                                         for f in furniture])
        else:
            self._footprints = np.zeros((0, 4))

    @property
    def spec(self):
        return self._spec

    @property
    def layout_id(self):
        return self._spec.layout_id

    @property
    def size(self):
        return self._size

    @property
    def walls(self):
        return self._walls

    @property
    def grids(self):
        return self._grids

    @property
    def furniture(self):
        return list(self._furniture)

    @property
    def aps(self):
        return list(self._aps)

    @property
    def door_span(self):
        return self._spec.door['span']

    @property
    def diagonal(self):
        return float(np.hypot(self._size[0], self._size[1]))

    @property
    def door_anchor(self):
        """Floor point just inside the door"""
        start, end = self.door_span
        standoff = min(SEAT_STANDOFF, self._size[1] / 2.0)
        return np.array([(start + end) / 2.0, standoff])

    def contain(self, point, margin=0.02):
        """Clip the 3-D *point* into the room, *margin* away from every
        surface
        """
        point = np.asarray(point, dtype=float)
        return np.clip(point, margin, self._size - margin)

    def wall(self, wall_id):
        return self._walls[wall_id]

    def grid(self, wall_id):
        return self._grids[wall_id]

    def _inflated(self, margin):
        fp = self._footprints
        return np.stack([fp[:, 0] - margin, fp[:, 1] - margin,
                         fp[:, 2] + margin, fp[:, 3] + margin], axis=1)

    def is_free(self, point, margin=FREE_MARGIN):
        """Return True when the floor *point* keeps at least *margin* from
        every wall and from every furniture footprint
        """
        x, y = float(point[0]), float(point[1])
        length, width = self._size[0], self._size[1]
        if not (margin <= x <= length - margin and
                margin <= y <= width - margin):
            return False
        if len(self._footprints):
            box = self._inflated(margin)
            inside = ((box[:, 0] < x) & (x < box[:, 2]) &
                      (box[:, 1] < y) & (y < box[:, 3]))
            if inside.any():
                return False
        return True

    def _clamp(self, point, margin):
        lo = np.minimum(margin, self._size[:2] / 2.0)
        hi = np.maximum(self._size[:2] - margin, self._size[:2] / 2.0)
        return np.clip(point, lo, hi)

    def _free_lattice(self, margin):
        if margin not in self._lattice:
            step = 0.05
            xs = np.arange(step / 2.0, self._size[0], step)
            ys = np.arange(step / 2.0, self._size[1], step)
            pts = np.array([(x, y) for y in ys for x in xs])
            free = np.array([self.is_free(p, margin) for p in pts],
                            dtype=bool)
            self._lattice[margin] = pts[free] if len(pts) else pts
        return self._lattice[margin]

    def nearest_free_point(self, point, margin=FREE_MARGIN):
        """Project *point* to the nearest free floor point. Candidates are
        the point clamped into the room and pushed out of every inflated
        footprint containing it; when none is free a 0.05 m lattice of free
        points is searched instead
        """
        point = np.asarray(point, dtype=float)[:2]
        if self.is_free(point, margin):
            return point.copy()
        candidates = [self._clamp(point, margin)]
        for lo_x, lo_y, hi_x, hi_y in self._inflated(margin):
            for base in (point, candidates[0]):
                if lo_x < base[0] < hi_x and lo_y < base[1] < hi_y:
                    for pushed in ((lo_x, base[1]), (hi_x, base[1]),
                                   (base[0], lo_y), (base[0], hi_y)):
                        candidates.append(np.asarray(pushed))
        best, best_dist = None, np.inf
        for cand in candidates:
            dist = np.hypot(*(cand - point))
            if dist < best_dist and self.is_free(cand, margin):
                best, best_dist = np.asarray(cand, dtype=float), dist
        if best is not None:
            return best
        lattice = self._free_lattice(margin)
        if len(lattice) == 0:
            return candidates[0]
        dist = np.hypot(lattice[:, 0] - point[0], lattice[:, 1] - point[1])
        return lattice[int(np.argmin(dist))].copy()

    def nearest_obstacle(self, point):
        """Return ``(distance, surface_point)`` of the closest wall or
        furniture surface to the floor *point*. The door opening on S2 is
        not an obstacle
        """
        x, y = float(point[0]), float(point[1])
        length, width = self._size[0], self._size[1]
        candidates = [(x, (0.0, y)), (length - x, (length, y)),
                      (width - y, (x, width))]
        start, end = self.door_span
        if not start <= x <= end:
            candidates.append((y, (x, 0.0)))
        for lo_x, lo_y, hi_x, hi_y in self._footprints:
            qx = min(max(x, lo_x), hi_x)
            qy = min(max(y, lo_y), hi_y)
            candidates.append((math.hypot(x - qx, y - qy), (qx, qy)))
        dist, surface = min(candidates, key=lambda c: c[0])
        return dist, np.asarray(surface, dtype=float)

    def __str__(self):
        return '<Layout>: {} {}'.format(self.layout_id, self._size.tolist())
    __repr__ = __str__


def build_layout(spec, band=None):
    """Construct the :class:`Layout` described by *spec*. This is a pure
    function: identical specs give identical layouts

    :param spec: a :class:`LayoutSpec`
    :param band: optional band id attached to every access point
    :raises InvalidSpecError: naming the violated invariant
    """
    spec.validate()
    length, width, height = spec.room_size
    walls = _build_walls(length, width, height)
    grids = OrderedDict((wid, generate_tile_grid(w, spec.tiles))
                        for wid, w in walls.items())
    furniture = [Blocker.box(f['lo'], f['hi'], label=f.get('label'))
                 for f in spec.furniture]
    aps = [AccessPoint('AP{}'.format(i), pos, band) for i, pos in
           enumerate(ap_positions(spec.ap_count, length, width, height,
                                  spec.ap_spread))]
    logger.debug('built layout %s: %d furniture, %d APs, %d tiles per wall',
                 spec.layout_id, len(furniture), len(aps),
                 grids['S1'].n_tiles)
    return Layout(spec, walls, grids, furniture, aps)


def seat_anchors(layout, margin=FREE_MARGIN):
    """Seats along the two longer sides of every furniture box, 0.4 m out"""
    anchors = []
    for box in layout.furniture:
        lo, hi = box.lo, box.hi
        span_x, span_y = hi[0] - lo[0], hi[1] - lo[1]
        along = 0 if span_x >= span_y else 1
        other = 1 - along
        side = hi[along] - lo[along]
        count = max(1, int(math.floor(side / SEAT_PITCH + TOLERANCE)))
        for offset in (lo[other] - SEAT_STANDOFF, hi[other] + SEAT_STANDOFF):
            for i in range(count):
                point = np.zeros(2)
                point[along] = lo[along] + (i + 0.5) * side / count
                point[other] = offset
                if layout.is_free(point, margin):
                    anchors.append(point)
    return anchors


def resident_nodes(layout, margin=FREE_MARGIN):
    """Return the resident nodes of *layout*: the door anchor first, then one
    anchor per seat. A room without a free seat falls back to its center when
    that is free

    :param layout: a built :class:`Layout`
    :param margin: free-space margin around each node, in meters
    """
    nodes = [layout.door_anchor]
    seats = seat_anchors(layout, margin)
    if seats:
        nodes.extend(seats)
    else:
        center = layout.size[:2] / 2.0
        if layout.is_free(center, margin):
            nodes.append(center)
    return nodes
