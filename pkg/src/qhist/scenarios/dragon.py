"""Measurement toy model: a spin measured by a one-qubit pointer.

The interaction is a controlled flip, |z+,0> -> |z+,0>, |z-,0> -> |z-,1>.
Three incompatible ways of describing the same run are compared: the
unitary framework containing [Psi_1], the pointer ("dragon") framework at
t1, and the measurement framework that also assigns S_z just before the
interaction.
"""

from __future__ import annotations

import numpy as np

from ..errors import UnnormalizedState
from ..framework import Framework
from ..hilbert import Ket, Operator, Z, basis_ket, identity, ket_projector, spin_ket, spin_projector, tensor
from ..histories import Dynamics, HistoryFamily, consistency_check, two_time_conditional
from ..logic import commutator_norm
from ..probability import born_probability
from ..tolerance import get_tol
from .report import ScenarioReport

DRAGON_TOL = 1e-12

CONTROLLED_FLIP = Operator([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
])


def dragon_scenario(alpha: complex = 2 ** -0.5, beta: complex = 2 ** -0.5,
                    tol: float | None = None) -> ScenarioReport:
    tol = get_tol(tol)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > tol:
        raise UnnormalizedState(f"|alpha|^2 + |beta|^2 = {abs(alpha) ** 2 + abs(beta) ** 2!r}")
    system = Ket(alpha * spin_ket(Z, 1).amplitudes + beta * spin_ket(Z, -1).amplitudes)
    psi0 = tensor(system, basis_ket(2, 0))
    i2 = identity(2)
    pointer = [tensor(i2, ket_projector(basis_ket(2, k))) for k in (0, 1)]
    spin = [tensor(spin_projector(Z, 1), i2), tensor(spin_projector(Z, -1), i2)]

    # t_0 (prep) -> t_1 (just before) is trivial; t_1 -> t_2 is the interaction
    dyn = Dynamics([Operator(np.eye(4)), CONTROLLED_FLIP])
    psi1 = CONTROLLED_FLIP @ psi0
    unitary_proj = ket_projector(psi1)

    rep = ScenarioReport("dragon")
    rep.data["alpha"] = [float(np.real(alpha)), float(np.imag(alpha))]
    rep.data["beta"] = [float(np.real(beta)), float(np.imag(beta))]
    mqs = abs(alpha * beta) > tol
    rep.check("||[Psi1] (I x [0]) - (I x [0]) [Psi1]||", commutator_norm(unitary_proj, pointer[0]),
              abs(alpha * beta), "==", DRAGON_TOL)
    rep.check("[Psi1] incompatible with pointer", commutator_norm(unitary_proj, pointer[0]) > tol, mqs)
    rep.check("Pr(pointer=0)", born_probability(pointer[0], psi1), abs(alpha) ** 2, "==", DRAGON_TOL)
    rep.check("Pr(pointer=1)", born_probability(pointer[1], psi1), abs(beta) ** 2, "==", DRAGON_TOL)

    fam = HistoryFamily(psi0, dyn, [Framework(spin, ["z+", "z-"]), Framework(pointer, ["0", "1"])])
    rep.check("measurement family consistent", consistency_check(fam).consistent, True)
    if abs(beta) ** 2 > DRAGON_TOL:
        rep.check("Pr(S_z=-1/2 at t0 | pointer=1 at t1)",
                  two_time_conditional(psi0, dyn, (1, spin[1]), (2, pointer[1])),
                  1.0, "==", DRAGON_TOL)
    if abs(alpha) ** 2 > DRAGON_TOL:
        rep.check("Pr(S_z=+1/2 at t0 | pointer=0 at t1)",
                  two_time_conditional(psi0, dyn, (1, spin[0]), (2, pointer[0])),
                  1.0, "==", DRAGON_TOL)
    return rep
