#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Exceptions raised by nas_evo.

Every exception derives from NasEvoError and from the builtin exception
a caller would naturally catch, so ``except ValueError`` keeps working.
'''


class NasEvoError(Exception):
    """Base class of all nas_evo errors."""


class DimensionError(NasEvoError, ValueError):
    """Sizes of genomes, spaces, cost tables or feature vectors disagree."""


class GenomeRangeError(NasEvoError, ValueError):
    """A genome id or a per-layer choice is outside the search space."""


class CapacityError(NasEvoError, OverflowError):
    """The search space is too large for the requested operation."""


class EmptyPopulationError(NasEvoError, ValueError):
    """No population members are left to compare against."""


class InsufficientPopulationError(NasEvoError, ValueError):
    """The population has too few members for the requested statistic."""


class InfeasibleConstraintError(NasEvoError, RuntimeError):
    """Rejection sampling hit its global sample cap.

    Attributes
    ----------
    samples_drawn : int
        Number of candidates drawn before giving up.
    """

    def __init__(self, message, samples_drawn=None):
        super(InfeasibleConstraintError, self).__init__(message)
        self.samples_drawn = samples_drawn


class UnknownGenomeError(NasEvoError, KeyError):
    """A genome is not present in a tabular benchmark."""

    def __str__(self):
        # KeyError quotes its argument, keep the plain message
        return str(self.args[0]) if self.args else ''


class DegenerateDataError(NasEvoError, ValueError):
    """Data has zero spread (identical points or a constant series)."""


class ConfigError(NasEvoError, ValueError):
    """Invalid experiment configuration.

    Attributes
    ----------
    field : str or None
        Dotted path of the offending field, e.g. ``strategies[0].seed``.
    """

    def __init__(self, message, field=None):
        if field is not None:
            message = '{}: {}'.format(field, message)
        super(ConfigError, self).__init__(message)
        self.field = field


class CostMismatchError(NasEvoError, ValueError):
    """An evaluator reports costs that disagree with the cost table a
    search is bounded by."""
