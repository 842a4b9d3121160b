# -*- coding: utf-8 -*-
"""The simulator: room geometry, crowd mobility, shadow masks, cascade
gains and the run loop that ties them together
"""
from .geometry import *  # NOQA
from .visibility import *  # NOQA
from .channel import *  # NOQA
from .mobility import *  # NOQA
from .config import *  # NOQA
from .engine import *  # NOQA

__author__ = 'ristide'
