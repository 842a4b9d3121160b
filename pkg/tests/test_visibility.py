# -*- coding: utf-8 -*-
import numpy as np
import pytest

from ristide.errors import GeometryError, InvalidArgumentError
from ristide.experiments import random_visibility_case
from ristide.sim.visibility import (Blocker, TileMask, oracle_hits,
                                    oracle_mask, segment_blocked_oracle,
                                    shadow_polygon, shadowed_tiles)


@pytest.fixture
def unit_box():
    return Blocker.box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


def test_cylinder_needs_positive_size():
    with pytest.raises(InvalidArgumentError):
        Blocker.cylinder((1.0, 1.0), 0.0, 1.7)
    with pytest.raises(InvalidArgumentError):
        Blocker.cylinder((1.0, 1.0), 0.15, -1.0)


def test_oracle_through_a_box(unit_box):
    assert segment_blocked_oracle((-1.0, 0.5, 0.5), (2.0, 0.5, 0.5),
                                  [unit_box])
    assert not segment_blocked_oracle((-1.0, 2.0, 0.5), (2.0, 2.0, 0.5),
                                      [unit_box])


def test_grazing_a_face_does_not_block(unit_box):
    assert not segment_blocked_oracle((-1.0, 0.5, 1.0), (2.0, 0.5, 1.0),
                                      [unit_box])


def test_oracle_through_a_cylinder():
    body = Blocker.cylinder((0.0, 0.0), 0.5, 2.0)
    assert segment_blocked_oracle((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0), [body])
    assert not segment_blocked_oracle((-1.0, 0.5, 1.0), (1.0, 0.5, 1.0),
                                      [body])
    assert not segment_blocked_oracle((-1.0, 0.0, 2.5), (1.0, 0.0, 2.5),
                                      [body])


def test_oracle_hits_matches_the_scalar_oracle(unit_box, rng):
    source = np.array([-0.5, 0.5, 0.5])
    points = rng.uniform(-1.0, 3.0, size=(200, 3))
    hits = oracle_hits(source, [unit_box], points)
    expected = [segment_blocked_oracle(source, p, [unit_box]) for p in points]
    assert hits.tolist() == expected


def test_box_between_ap_and_wall(empty_layout):
    grid = empty_layout.grid('S1')
    box = Blocker.box((2.3, 3.5, 1.8), (2.7, 3.7, 2.2))
    mask = shadowed_tiles((2.5, 2.5, 2.0), [box], grid)
    assert mask.wall_id == 'S1'
    assert mask.bits[grid.index(20, 25)]
    assert not mask.bits[grid.index(5, 5)]
    assert mask == oracle_mask((2.5, 2.5, 2.0), [box], grid)


def test_blocker_behind_the_source_casts_nothing(empty_layout):
    grid = empty_layout.grid('S1')
    box = Blocker.box((2.0, 0.5, 0.0), (3.0, 1.0, 2.0))
    mask = shadowed_tiles((2.5, 2.5, 2.9), [box], grid)
    assert mask.count == 0
    wall = empty_layout.wall('S1')
    assert len(shadow_polygon((2.5, 2.5, 2.9), box, wall)) == 0


def test_source_inside_a_body(empty_layout):
    body = Blocker.cylinder((2.5, 2.5), 0.15, 1.7)
    for grid in empty_layout.grids.values():
        mask = shadowed_tiles((2.5, 2.5, 1.2), [body], grid)
        assert mask.count == grid.n_tiles


def test_source_on_the_wall_plane(empty_layout, unit_box):
    with pytest.raises(GeometryError):
        shadow_polygon((2.5, 5.0, 1.0), unit_box, empty_layout.wall('S1'))


def test_shadow_polygon_is_inside_the_wall(empty_layout):
    wall = empty_layout.wall('S1')
    body = Blocker.cylinder((2.5, 4.0), 0.15, 1.7)
    poly = shadow_polygon((2.5, 1.0, 2.9), body, wall, circumscribe=True)
    assert len(poly) >= 3
    assert np.all(poly[:, 0] >= 0.0) and np.all(poly[:, 0] <= wall.width)
    assert np.all(poly[:, 1] >= 0.0) and np.all(poly[:, 1] <= wall.height)


def test_masks_match_the_oracle(table_layout, rng):
    for _ in range(25):
        source, blockers, grid = random_visibility_case(rng, table_layout)
        assert shadowed_tiles(source, blockers, grid) == \
            oracle_mask(source, blockers, grid)


def test_more_blockers_never_clear_a_tile(empty_layout, rng):
    grid = empty_layout.grid('S3')
    source = (4.0, 2.5, 2.99)
    blockers = []
    previous = np.zeros(grid.n_tiles, dtype=bool)
    for _ in range(6):
        center = rng.uniform(0.5, 4.5, 2)
        blockers.append(Blocker.cylinder(center, 0.15, 1.7))
        bits = shadowed_tiles(source, blockers, grid).bits
        assert np.all(bits[previous])
        previous = bits


def test_tile_mask_union():
    a = TileMask('S1', [True, False, False])
    b = TileMask('S1', [False, False, True])
    assert (a | b).bits.tolist() == [True, False, True]
    with pytest.raises(InvalidArgumentError):
        a | TileMask('S2', [False, False, False])
