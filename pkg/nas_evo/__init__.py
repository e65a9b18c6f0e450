"""Evolutionary neural architecture search with similarity directed
population initialization.

Contains the package version number
"""

__version__ = '0.1.0-dev'
