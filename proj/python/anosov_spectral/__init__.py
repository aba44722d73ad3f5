"""Periodic orbits, dynamical zeta functions and resonances of model Anosov flows."""

from ._core import *  # noqa: F401,F403
from ._core import AnosovError, __version__

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
