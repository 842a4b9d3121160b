# -*- coding: utf-8 -*-
"""This library simulates crowd mobility inside rooms whose walls are covered
by reconfigurable intelligent surface (RIS) tiles, evaluates per-tile
AP-RIS-UE cascade gains over time, and measures the resulting concept drift.

Requires Python 3.8 or higher, numpy, scipy and statsmodels.
"""
version_info = (0, 4, 0)
__name__ = 'ristide'
__doc__ = 'Mobility-driven drift statistics for RIS-covered rooms'
__author__ = '''
    Ristide maintainers'''
__version__ = '.'.join([str(x) for x in version_info])
__status__ = 'Beta'
__title__ = '{0} version {1}'.format(__name__, __version__)
