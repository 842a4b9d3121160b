# -*- coding: utf-8 -*-
"""Drift statistics: Nakagami fits, KS distances, Jensen-Shannon
divergences, PACF, survival fields and shadow fractions
"""
from .divergence import *  # NOQA
from .fit import *  # NOQA
from .pacf import *  # NOQA
from .report import *  # NOQA
from .survival import *  # NOQA

__author__ = 'ristide'
