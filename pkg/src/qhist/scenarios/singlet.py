"""Einstein locality for a spin singlet, checked with three-time histories.

Particle a carries S_w at t1 and t3; S_v of particle b is measured at t2.
The a side evolves trivially; b may be rotated by an arbitrary unitary on
every step.
"""

from __future__ import annotations

import numpy as np

from ..framework import Framework
from ..hilbert import Direction, Operator, Z, identity, singlet, spin_projector, tensor
from ..histories import Dynamics, HistoryFamily, consistency_check, two_time_conditional, two_time_joint
from ..sampling import random_direction, random_unitary, rng_from
from .report import ScenarioReport

LOCALITY_TOL = 1e-12


def locality_setup(w: Direction, v: Direction, b_unitary: Operator | None = None):
    """Initial state, dynamics, a-side projectors and the t2 measurement framework."""
    i2 = identity(2)
    step = tensor(Operator(np.eye(2)), b_unitary if b_unitary is not None else Operator(np.eye(2)))
    dyn = Dynamics([step] * 3)
    a_plus = tensor(spin_projector(w, 1), i2)
    a_minus = tensor(spin_projector(w, -1), i2)
    measure_b = Framework(
        [tensor(i2, spin_projector(v, 1)), tensor(i2, spin_projector(v, -1))], ["v+_b", "v-_b"]
    )
    return singlet(), dyn, a_plus, a_minus, measure_b


def singlet_locality_scenario(w: Direction = Z, v: Direction = Z,
                              b_unitary: Operator | None = None) -> ScenarioReport:
    psi, dyn, a_plus, a_minus, measure_b = locality_setup(w, v, b_unitary)
    a_frame = Framework([a_plus, a_minus], ["w+_a", "w-_a"])
    rep = ScenarioReport("singlet")
    rep.data["w"] = [w.theta, w.phi]
    rep.data["v"] = [v.theta, v.phi]
    rep.data["b_unitary"] = b_unitary is not None

    full = HistoryFamily(psi, dyn, [a_frame, measure_b, a_frame])
    rep.check("family consistent", consistency_check(full).consistent, True)

    mid = {2: measure_b}
    rep.check("Pr([w+_a],t3; [w-_a],t1)",
              two_time_joint(psi, dyn, (1, a_minus), (3, a_plus), mid), LOCALITY_TOL, "<=")
    rep.check("Pr([w-_a],t3; [w+_a],t1)",
              two_time_joint(psi, dyn, (1, a_plus), (3, a_minus), mid), LOCALITY_TOL, "<=")
    rep.check("Pr([w+_a],t3 | [w+_a],t1)",
              two_time_conditional(psi, dyn, (3, a_plus), (1, a_plus), mid), 1.0, "==", LOCALITY_TOL)
    rep.check("Pr([w-_a],t3 | [w-_a],t1)",
              two_time_conditional(psi, dyn, (3, a_minus), (1, a_minus), mid), 1.0, "==", LOCALITY_TOL)
    return rep


def singlet_locality_sweep(trials: int = 100, seed: int = 0,
                           with_unitary: bool = True) -> ScenarioReport:
    """Worst-case locality values over seeded random (w, v, U_b) draws."""
    rng = rng_from(seed)
    rep = ScenarioReport("singlet-sweep")
    worst_joint, worst_cond, all_consistent = 0.0, 0.0, True
    for _ in range(trials):
        w, v = random_direction(rng), random_direction(rng)
        u = random_unitary(2, rng) if with_unitary and rng.random() < 0.75 else None
        one = singlet_locality_scenario(w, v, u)
        values = {c.label: c.value for c in one.checks}
        all_consistent &= bool(values["family consistent"])
        worst_joint = max(worst_joint, values["Pr([w+_a],t3; [w-_a],t1)"],
                          values["Pr([w-_a],t3; [w+_a],t1)"])
        worst_cond = max(worst_cond, abs(values["Pr([w+_a],t3 | [w+_a],t1)"] - 1.0),
                         abs(values["Pr([w-_a],t3 | [w-_a],t1)"] - 1.0))
    rep.data["trials"] = trials
    rep.data["seed"] = seed if not isinstance(seed, np.random.Generator) else None
    rep.check("all families consistent", all_consistent, True)
    rep.check("max two-time joint", worst_joint, LOCALITY_TOL, "<=")
    rep.check("max |conditional - 1|", worst_cond, LOCALITY_TOL, "<=")
    return rep
