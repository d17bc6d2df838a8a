"""Reflectionless (N-soliton) potentials of the 1D Schrodinger operator."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
