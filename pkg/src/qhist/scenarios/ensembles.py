"""Ensemble ambiguity of a mixed density matrix, and its classical
counterpart: two processes with equal single-time marginals but different
two-time joints."""

from __future__ import annotations

import numpy as np

from ..hilbert import X, Z, max_abs, spin_ket
from ..probability import ensemble_to_density
from ..sampling import random_direction, rng_from
from .report import ScenarioReport, matrix_to_json

MATRIX_TOL = 1e-12


def ensemble_ambiguity_scenario(seed: int = 0, random_ensembles: int = 5) -> ScenarioReport:
    rng = rng_from(seed)
    half = np.eye(2) / 2
    rho_z = ensemble_to_density([(0.5, spin_ket(Z, 1)), (0.5, spin_ket(Z, -1))]).matrix
    rho_x = ensemble_to_density([(0.5, spin_ket(X, 1)), (0.5, spin_ket(X, -1))]).matrix
    rep = ScenarioReport("ensemble")
    rep.check("||rho_z - rho_x||_max", max_abs(rho_z - rho_x), MATRIX_TOL, "<=")
    rep.check("||rho_z - I/2||_max", max_abs(rho_z - half), MATRIX_TOL, "<=")
    rep.check("||rho_x - I/2||_max", max_abs(rho_x - half), MATRIX_TOL, "<=")
    rep.data["rho_z"] = matrix_to_json(rho_z)
    rep.data["rho_x"] = matrix_to_json(rho_x)
    for k in range(random_ensembles):
        # equal weight on each antipodal pair: [w+] + [w-] = I
        pairs = int(rng.integers(1, 4))
        weights = rng.dirichlet(np.ones(pairs))
        members = []
        for wt in weights:
            w = random_direction(rng)
            members += [(wt / 2, spin_ket(w, 1)), (wt / 2, spin_ket(w, -1))]
        rho = ensemble_to_density(members).matrix
        rep.check(f"random antipodal ensemble {k} ({2 * pairs} kets): ||rho - I/2||_max",
                  max_abs(rho - half), MATRIX_TOL, "<=")
    return rep


def two_time_joint_table(process: str) -> np.ndarray:
    """Joint Pr(s1, s2) over outcomes (+, -) for a uniform start.

    ``persist`` keeps the outcome; ``randomize`` redraws it uniformly.
    """
    start = np.array([0.5, 0.5])
    if process == "persist":
        transition = np.eye(2)
    elif process == "randomize":
        transition = np.full((2, 2), 0.5)
    else:
        raise ValueError(f"unknown process {process!r}")
    return start[:, None] * transition


def marginal_ambiguity_scenario() -> ScenarioReport:
    rep = ScenarioReport("marginals")
    tables = {name: two_time_joint_table(name) for name in ("persist", "randomize")}
    for name, t in tables.items():
        rep.data[f"{name}_joint"] = t.tolist()
        for label, marg in (("t1", t.sum(axis=1)), ("t2", t.sum(axis=0))):
            rep.check(f"{name} marginal {label} Pr(+)", marg[0], 0.5, "==", 0.0)
            rep.check(f"{name} marginal {label} Pr(-)", marg[1], 0.5, "==", 0.0)
    p, r = tables["persist"], tables["randomize"]
    rep.check("persist Pr(+,+)", p[0, 0], 0.5, "==", 0.0)
    rep.check("persist Pr(+,-)", p[0, 1], 0.0, "==", 0.0)
    for i, a in enumerate("+-"):
        for j, b in enumerate("+-"):
            rep.check(f"randomize Pr({a},{b})", r[i, j], 0.25, "==", 0.0)
    rep.check("joints differ", bool(np.any(p != r)), True)
    return rep
