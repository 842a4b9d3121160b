# -*- coding: utf-8 -*-
"""This module contains all ristide Errors. Each Error subclass inherits from
the base RisTideError class which is only ever directly raised if something
completely unexpected happens. The CLI maps groups of these errors onto exit
codes, see :data:`CONFIG_ERRORS` and :data:`IO_ERRORS`.
"""
__author__ = 'ristide'
__all__ = ['RisTideError', 'InvalidArgumentError', 'InvalidSpecError',
           'TilingError', 'GeometryError', 'ConfigError',
           'TooFewSamplesError', 'DegenerateSampleError',
           'BinningMismatchError', 'EmptyInputError', 'SeriesTooShortError',
           'StreamTooShortError', 'RunDirectoryError', 'UsageError']


class RisTideError(Exception):
    """Base ristide Error class"""
    def __init__(self, reason):
        """Create the error with a single human readable message

        :param reason: single message describing the reason behind this error
            being raised
        """
        super(RisTideError, self).__init__(reason)
        self.message = reason

    def __repr__(self):
        return self.message

    def __str__(self):
        return self.message


class InvalidArgumentError(RisTideError):
    """Error raised if a given argument is determined to be invalid"""
    def __init__(self, arg, value, valid_args=None):
        """Format this error's message to report back the invalid argument and
        a list of valid arguments, if such a list exists
        """
        message = 'Invalid argument ({}, {})'.format(arg, value)
        if valid_args is not None:
            message += ' :: valid values are: {}'.format(valid_args)
        super(InvalidArgumentError, self).__init__(message)
        self.arg = arg
        self.value = value


class InvalidSpecError(RisTideError):
    """Error raised when a :class:`~ristide.sim.geometry.LayoutSpec` violates
    one of its invariants. The violated invariant is kept on the error
    """
    def __init__(self, invariant, detail=''):
        message = 'Invalid layout spec: {}'.format(invariant)
        if detail:
            message += ' ({})'.format(detail)
        super(InvalidSpecError, self).__init__(message)
        self.invariant = invariant


class TilingError(InvalidSpecError):
    """Error raised when a wall extent is not an integral number of tiles"""
    pass


class GeometryError(RisTideError):
    """Error raised for degenerate geometry, such as coincident points or a
    source lying on a wall plane
    """
    pass


class ConfigError(RisTideError):
    """Error raised when a scenario file is missing, malformed or fails
    validation
    """
    pass


class UsageError(ConfigError):
    """Error raised for a malformed command line"""
    pass


class TooFewSamplesError(RisTideError):
    """Error raised when a statistic is asked for with too few samples"""
    pass


class DegenerateSampleError(RisTideError):
    """Error raised when samples have zero variance and no fit exists"""
    pass


class BinningMismatchError(RisTideError):
    """Error raised when two histograms do not share bin edges"""
    pass


class EmptyInputError(RisTideError):
    """Error raised for empty histograms, windows or streams"""
    pass


class SeriesTooShortError(RisTideError):
    """Error raised when a series is too short for the requested lag"""
    pass


class StreamTooShortError(RisTideError):
    """Error raised when a gain stream holds fewer than two windows"""
    pass


class RunDirectoryError(RisTideError):
    """Error raised if a run directory cannot be created, locked, read or
    written
    """
    pass


#: Errors reported with exit code 2
CONFIG_ERRORS = (InvalidArgumentError, InvalidSpecError, GeometryError,
                 ConfigError, EmptyInputError)
#: Errors reported with exit code 1
IO_ERRORS = (RunDirectoryError,)
ALL = (RisTideError,) + CONFIG_ERRORS + IO_ERRORS + (
    TooFewSamplesError, DegenerateSampleError, BinningMismatchError,
    SeriesTooShortError, StreamTooShortError, UsageError)
