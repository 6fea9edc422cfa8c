"""Free diffusion density in three dimensions."""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from ..errors import NonpositiveDiffusion, NonpositiveTime
from .report import ScenarioReport

DEFAULT_CASES = ((1.0, 1.0), (0.5, 2.0), (2.0, 0.25))
NORMALIZATION_TOL = 1e-4


def brownian_density(r, t: float, diffusion: float):
    """(4 pi D t)^(-3/2) exp(-r^2 / 4 D t), in units of length^-3.

    ``r`` may be a scalar or an array of nonnegative radii.
    """
    if not t > 0:
        raise NonpositiveTime(f"t must be positive, got {t}")
    if not diffusion > 0:
        raise NonpositiveDiffusion(f"D must be positive, got {diffusion}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    four_dt = 4.0 * diffusion * t
    out = (math.pi * four_dt) ** -1.5 * np.exp(-(r ** 2) / four_dt)
    return float(out) if out.ndim == 0 else out


def radial_normalization(t: float, diffusion: float) -> float:
    """Integral of 4 pi r^2 rho(r, t) over 0 <= r < inf."""
    value, _ = quad(lambda r: 4 * math.pi * r * r * brownian_density(r, t, diffusion), 0, math.inf)
    return value


def brownian_scenario(cases=DEFAULT_CASES) -> ScenarioReport:
    rep = ScenarioReport("brownian")
    for diffusion, t in cases:
        tag = f"D={diffusion!r}, t={t!r}"
        rep.check(f"normalization ({tag})", radial_normalization(t, diffusion), 1.0, "==",
                  NORMALIZATION_TOL)
        rep.check(f"rho(0) ({tag})", brownian_density(0.0, t, diffusion),
                  (4 * math.pi * diffusion * t) ** -1.5, "==", 1e-15)
        r = np.linspace(0.0, 6 * math.sqrt(diffusion * t), 200)
        rep.check(f"decreasing in r ({tag})",
                  bool(np.all(np.diff(brownian_density(r, t, diffusion)) < 0)), True)
    return rep
