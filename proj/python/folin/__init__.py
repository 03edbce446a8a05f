"""Functional observer synthesis and simulation."""

from ._folin import *  # noqa: F401,F403
from ._folin import __doc__  # noqa: F401
