# -*- coding: utf-8 -*-
import numpy as np
import pytest

from ristide.errors import InvalidSpecError, TilingError
from ristide.sim.geometry import (LayoutSpec, RisTileSpec, ap_positions,
                                  build_layout, resident_nodes, seat_anchors)


def test_every_wall_is_fully_tiled(table_layout):
    assert list(table_layout.grids) == ['S1', 'S2', 'S3', 'S4']
    for grid in table_layout.grids.values():
        assert (grid.rows, grid.cols) == (30, 50)
        assert grid.n_tiles == 1500
        assert grid.tile_area == pytest.approx(0.01)


def test_tile_index_is_row_major_from_the_bottom(table_layout):
    grid = table_layout.grid('S2')
    tile = grid.tile(0)
    assert np.allclose(tile.center, [0.05, 0.0, 0.05])
    assert np.allclose(tile.normal, [0.0, 1.0, 0.0])
    assert grid.row_col(grid.index(3, 7)) == (3, 7)
    image = grid.image(np.arange(grid.n_tiles))
    assert image.shape == (30, 50)
    assert image[-1, 0] == 0
    assert image[0, 0] == 29 * 50


def test_tile_normals_face_the_room(table_layout):
    center = table_layout.size / 2.0
    for wall in table_layout.walls.values():
        assert wall.depth(center) > 0
        to_center = center - wall.origin
        assert to_center @ wall.inward > 0


def test_wall_extent_must_be_whole_tiles():
    spec = LayoutSpec(room_size=(5.05, 5.0, 3.0))
    with pytest.raises(TilingError):
        build_layout(spec)


def test_meta_surfaces_must_cover_a_tile():
    with pytest.raises(InvalidSpecError):
        RisTileSpec(tile_size=0.1, meta_surface_size=0.03,
                    meta_per_tile=100).validate()


@pytest.mark.parametrize('kwargs', [
    {'room_size': (5.0, 0.0, 3.0)},
    {'door': {'wall': 'S1', 'span': (1.0, 2.0)}},
    {'door': {'wall': 'S2', 'span': (4.5, 5.5)}},
    {'furniture': [{'lo': [4.0, 1.0, 0.0], 'hi': [5.5, 2.0, 0.7]}]},
    {'ap_count': 10},
])
def test_invalid_specs_are_rejected(kwargs):
    base = {'room_size': (5.0, 5.0, 3.0)}
    base.update(kwargs)
    with pytest.raises(InvalidSpecError):
        LayoutSpec(**base).validate()


def test_unknown_layout_key():
    with pytest.raises(InvalidSpecError):
        LayoutSpec.from_dict({'room_size': [5, 5, 3], 'windows': 2})


def test_default_door_is_centered_on_s2():
    door = LayoutSpec(room_size=(5.0, 5.0, 3.0)).door
    assert door['wall'] == 'S2'
    assert door['span'] == pytest.approx((2.05, 2.95))


def test_ap_positions():
    assert np.allclose(ap_positions(1, 5.0, 5.0, 3.0), [[2.5, 2.5, 3.0]])
    four = ap_positions(4, 5.0, 5.0, 3.0)
    assert np.allclose(four, [[1.25, 1.25, 3.0], [3.75, 1.25, 3.0],
                              [1.25, 3.75, 3.0], [3.75, 3.75, 3.0]])
    nine = ap_positions(9, 6.0, 6.0, 3.0)
    assert len(nine) == 9
    assert np.allclose(nine[:, 2], 3.0)
    assert len({tuple(p) for p in nine}) == 9


def test_nine_aps_in_the_default_room():
    nine = ap_positions(9, 5.0, 3.0, 3.0)
    assert np.allclose(sorted(set(nine[:, 0])), [5 / 6., 15 / 6., 25 / 6.])
    assert np.allclose(sorted(set(nine[:, 1])), [3 / 6., 9 / 6., 15 / 6.])
    layout = build_layout(LayoutSpec(ap_count=9))
    assert np.allclose([ap.position for ap in layout.aps], nine)


def test_ap_spread_centers_the_grid():
    one = ap_positions(1, 5.0, 5.0, 3.0, (0.45, 0.45))
    assert np.allclose(one, [[2.5, 2.5, 3.0]])
    four = ap_positions(4, 5.0, 5.0, 3.0, (0.4, 0.4))
    assert np.allclose(four, [[2.4, 2.4, 3.0], [2.6, 2.4, 3.0],
                              [2.4, 2.6, 3.0], [2.6, 2.6, 3.0]])
    nine = ap_positions(9, 5.0, 5.0, 3.0, (0.45, 0.45))
    assert np.allclose(sorted(set(nine[:, 0])), [2.35, 2.5, 2.65])
    # the 9-AP grid reaches further out than the 4-AP one
    assert np.abs(nine[:, :2] - 2.5).max() > np.abs(
        ap_positions(4, 5.0, 5.0, 3.0, (0.45, 0.45))[:, :2] - 2.5).max()


@pytest.mark.parametrize('spread', [(0.0, 0.4), (5.5, 0.4), (0.4,)])
def test_ap_spread_must_fit_the_ceiling(spread):
    with pytest.raises(InvalidSpecError):
        LayoutSpec(room_size=(5.0, 5.0, 3.0), ap_spread=spread).validate()


def test_ap_spread_round_trips():
    spec = LayoutSpec.from_dict({'room_size': [5, 5, 3],
                                 'ap_spread': [0.45, 0.45]})
    assert spec.ap_spread == (0.45, 0.45)
    assert spec._json['ap_spread'] == [0.45, 0.45]
    assert 'ap_spread' not in LayoutSpec()._json
    assert LayoutSpec().ap_spread == (5.0, 3.0)


def test_narrow_room_has_one_tile_column():
    layout = build_layout(LayoutSpec(room_size=(0.1, 0.1, 3.0), ap_count=1))
    for grid in layout.grids.values():
        assert (grid.rows, grid.cols) == (30, 1)
        assert grid.n_tiles == 30


def test_furnished_room_keeps_only_the_door():
    full = {'label': 'floor', 'lo': [0.0, 0.0, 0.0], 'hi': [5.0, 5.0, 0.75]}
    layout = build_layout(LayoutSpec(room_size=(5.0, 5.0, 3.0),
                                     furniture=[full]))
    nodes = resident_nodes(layout)
    assert len(nodes) == 1
    assert np.allclose(nodes[0], layout.door_anchor)


def test_build_layout_is_pure(table_layout):
    again = build_layout(table_layout.spec)
    for wid, grid in table_layout.grids.items():
        assert np.array_equal(grid.tile_centers, again.grid(wid).tile_centers)
    assert [ap.position.tolist() for ap in table_layout.aps] == \
        [ap.position.tolist() for ap in again.aps]


def test_free_space(table_layout):
    assert table_layout.is_free((0.5, 0.5))
    assert not table_layout.is_free((2.5, 2.5))
    assert not table_layout.is_free((0.1, 2.0))
    assert not table_layout.is_free((2.5, 2.0))
    assert table_layout.is_free((2.5, 1.9))


def test_nearest_free_point_leaves_the_table(table_layout):
    point = table_layout.nearest_free_point((2.5, 2.5))
    assert table_layout.is_free(point)
    assert np.hypot(*(point - [2.5, 2.5])) == pytest.approx(0.55)


def test_nearest_free_point_of_a_free_point(table_layout):
    assert np.allclose(table_layout.nearest_free_point((0.7, 0.9)),
                       [0.7, 0.9])


def test_nearest_obstacle_skips_the_door(table_layout):
    dist, surface = table_layout.nearest_obstacle((2.5, 0.2))
    assert dist == pytest.approx(1.9)
    assert np.allclose(surface, [2.5, 2.1])
    dist, surface = table_layout.nearest_obstacle((1.0, 0.2))
    assert dist == pytest.approx(0.2)
    assert np.allclose(surface, [1.0, 0.0])


def test_seats_around_the_table(table_layout):
    seats = seat_anchors(table_layout)
    assert len(seats) == 6
    xs = sorted({round(float(s[0]), 6) for s in seats})
    ys = sorted({round(float(s[1]), 6) for s in seats})
    assert xs == pytest.approx([1.9, 2.5, 3.1])
    assert ys == pytest.approx([1.7, 3.3])


def test_resident_nodes_start_at_the_door(table_layout, empty_layout):
    nodes = resident_nodes(table_layout)
    assert np.allclose(nodes[0], [2.5, 0.4])
    assert len(nodes) == 7
    nodes = resident_nodes(empty_layout)
    assert len(nodes) == 2
    assert np.allclose(nodes[1], [2.5, 2.5])


def test_contain_clips_into_the_room(empty_layout):
    assert np.allclose(empty_layout.contain((5.2, -0.1, 1.2)),
                       [4.98, 0.02, 1.2])
