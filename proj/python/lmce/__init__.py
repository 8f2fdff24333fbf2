"""Numerical lab for the 2D Lagrangian mean curvature equation."""

from lmce._core import *  # noqa: F401,F403
from lmce._core import NonConvergenceError, PreconditionError

__all__ = [name for name in dir() if not name.startswith("_")]
__all__ += ["NonConvergenceError", "PreconditionError"]
