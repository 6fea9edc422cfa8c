"""Process-wide default tolerance, overridable per call or per context."""

from __future__ import annotations

import contextlib
import contextvars
from collections.abc import Iterator

DEFAULT_TOL = 1e-10

_tol: contextvars.ContextVar[float] = contextvars.ContextVar("qhist_tol", default=DEFAULT_TOL)


def get_tol(tol: float | None = None) -> float:
    """Return ``tol`` if given, else the current default."""
    return _tol.get() if tol is None else float(tol)


def set_default_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _tol.set(float(tol))


@contextlib.contextmanager
def default_tol(tol: float | None) -> Iterator[float]:
    """Temporarily replace the default; ``None`` leaves it unchanged."""
    if tol is None:
        yield _tol.get()
        return
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    token = _tol.set(float(tol))
    try:
        yield float(tol)
    finally:
        _tol.reset(token)
