# -*- coding: utf-8 -*-
import json

import mock
import numpy as np
import pytest

from ristide.sim.config import load_scenario
from ristide.sim.geometry import LayoutSpec, build_layout

TABLE = {'label': 'table', 'lo': [1.6, 2.1, 0.0], 'hi': [3.4, 2.9, 0.75]}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def empty_layout():
    """5 x 5 x 3 m room without furniture"""
    return build_layout(LayoutSpec(room_size=(5.0, 5.0, 3.0)))


@pytest.fixture
def table_layout():
    """The R1 room: one table in the middle"""
    return build_layout(LayoutSpec(room_size=(5.0, 5.0, 3.0),
                                   furniture=[TABLE], layout_id='R1'))


@pytest.fixture
def small_config():
    """A short R1 run: three users, one AP, 100 steps"""
    return load_scenario('R1').replace(seed=7, n_users=3, n_aps=1,
                                       duration_steps=100, snapshot_every=25)


@pytest.fixture
def scenario_file(tmpdir):
    """A short scenario on disk writing every emitted gain of S1"""
    config = load_scenario('R1').replace(n_users=2, n_aps=1,
                                         duration_steps=60, snapshot_every=2)
    data = config._json
    data['stats']['stride'] = 5
    data['outputs'] = {'sinks': ['trajectory', 'gains', 'report'],
                       'gains': {'walls': ['S1'], 'every': 1}}
    path = tmpdir.join('short.json')
    path.write(json.dumps(data))
    return str(path)


@pytest.fixture
def no_git():
    with mock.patch('ristide.sinks.git_describe', return_value='v0-test'):
        yield
