#!/usr/bin/env python
# -*- coding: utf-8 -*
'''Logging helpers.

Call style follows ``log_info(message, unit='...')``: ``unit`` names the
component and maps to the child logger ``nas_evo.<unit>``.
'''
from __future__ import print_function, division

import logging

LOGGER_NAME = 'nas_evo'
LOG_FORMAT = '%(asctime)s %(levelname)-7s [%(name)s] %(message)s'


def get_logger(unit=None):
    if unit is None:
        return logging.getLogger(LOGGER_NAME)
    return logging.getLogger('{}.{}'.format(LOGGER_NAME, unit))


def log_debug(message, unit=None):
    get_logger(unit).debug(message)


def log_info(message, unit=None):
    get_logger(unit).info(message)


def log_warn(message, unit=None):
    get_logger(unit).warning(message)


def log_error(message, unit=None):
    get_logger(unit).error(message)


def setup_logging(level=logging.WARNING, stream=None):
    """Attach a single stream handler to the package logger.

    Calling this repeatedly replaces the handler instead of stacking them.

    Parameters
    ----------
    level : int or str, optional
        Logging level of the package logger.
    stream : file-like, optional
        Target stream. Defaults to standard error.

    Returns
    -------
    logging.Logger
        The configured package logger.
    """
    logger = get_logger()
    for handler in list(logger.handlers):
        if getattr(handler, '_nas_evo_handler', False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._nas_evo_handler = True
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
