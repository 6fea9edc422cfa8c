"""Consistent-histories quantum mechanics on finite-dimensional Hilbert spaces."""

from ._kernels import BACKEND
from .errors import QHistError
from .tolerance import DEFAULT_TOL, default_tol, get_tol, set_default_tol

__version__ = "0.1.0"

__all__ = ["BACKEND", "DEFAULT_TOL", "QHistError", "default_tol", "get_tol", "set_default_tol"]
