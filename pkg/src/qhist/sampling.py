"""Seeded random draws of states, unitaries, projectors and frameworks."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import unitary_group

from .framework import Framework
from .hilbert import Direction, Ket, Operator, Projector, projector_onto_rows


def rng_from(seed: int | np.random.Generator | None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_direction(rng: np.random.Generator) -> Direction:
    """Uniform on the sphere."""
    theta = math.acos(1.0 - 2.0 * rng.random())
    phi = 2 * math.pi * rng.random()
    return Direction(min(theta, math.pi), phi % (2 * math.pi))


def random_ket(dim: int, rng: np.random.Generator) -> Ket:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Ket(v / np.linalg.norm(v))


def random_unitary(dim: int, rng: np.random.Generator) -> Operator:
    """Haar-random unitary."""
    if dim == 1:
        return Operator([[np.exp(2j * math.pi * rng.random())]])
    return Operator(unitary_group.rvs(dim, random_state=rng))


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> Projector:
    u = random_unitary(dim, rng).matrix
    return projector_onto_rows(u[:, :rank].T, dim)


def random_framework(dim: int, rng: np.random.Generator, blocks: int | None = None) -> Framework:
    """Split a random orthonormal basis into ``blocks`` nonempty groups."""
    if blocks is None:
        blocks = int(rng.integers(1, dim + 1))
    u = random_unitary(dim, rng).matrix
    cuts = np.sort(rng.choice(np.arange(1, dim), size=blocks - 1, replace=False)) if blocks > 1 else []
    bounds = [0, *map(int, cuts), dim]
    elements = [projector_onto_rows(u[:, lo:hi].T, dim) for lo, hi in zip(bounds, bounds[1:])]
    return Framework(elements)
