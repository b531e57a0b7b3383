"""Numerical parallel transport on path spaces and surface holonomy for crossed modules."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .liecore import crossed_module, crossed_module_check, get_group  # noqa: E402,F401
