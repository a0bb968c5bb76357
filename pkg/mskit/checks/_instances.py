"""Seeded problem instances shared by the invariant checks."""

import dataclasses

import numpy as np

from mskit.checks.base import Level
from mskit.operators import sampling
from mskit.operators.circle_fun import CircleFn
from mskit.operators.crofoot import CrofootPair, transform
from mskit.operators.inner import InnerFn, crofoot_inner, random_blaschke_potapov
from mskit.operators.model_space import ModelSpaceBasis, basis
from mskit.utils import make_rng

# Zeros stay well inside the disk so that Crofoot transforms of degree-4
# products remain resolved on the default grid.
BP_RADIUS = 0.5
MAX_DEGREE = 4
SYMBOL_DEGREE = 3


def rng_for(check: str, seed: int) -> np.random.Generator:
    return make_rng(seed, "check", check)


def size_for(level: Level, seed: int) -> int:
    """Matrix size cycling through 1..max_d."""
    return 1 + seed % level.max_d


def random_inner(rng: np.random.Generator, d: int, grid: int, degree: int | None = None) -> InnerFn:
    """Pure Blaschke-Potapov product of degree between d and max(d, 4)."""
    if degree is None:
        degree = int(rng.integers(d, max(d, MAX_DEGREE) + 1))
    return random_blaschke_potapov(rng, d, degree, grid, max_radius=BP_RADIUS)


@dataclasses.dataclass(frozen=True)
class PairInstance:
    theta1: InnerFn
    theta2: InnerFn
    b1: ModelSpaceBasis
    b2: ModelSpaceBasis
    phi: CircleFn


def pair_instance(rng: np.random.Generator, d: int, grid: int) -> PairInstance:
    """Two model spaces and a seeded Laurent symbol between them."""
    theta1 = random_inner(rng, d, grid)
    theta2 = random_inner(rng, d, grid)
    phi = sampling.random_laurent(rng, d, SYMBOL_DEGREE, grid)
    return PairInstance(theta1=theta1, theta2=theta2, b1=basis(theta1), b2=basis(theta2), phi=phi)


@dataclasses.dataclass(frozen=True)
class CrofootInstance:
    pair1: CrofootPair
    pair2: CrofootPair
    phi: CircleFn


def crofoot_pair(rng: np.random.Generator, theta: InnerFn, enforce: bool = False) -> CrofootPair:
    w = sampling.random_strict_contraction(rng, theta.d)
    return transform(basis(theta), basis(crofoot_inner(theta, w)), w, enforce=enforce)


def crofoot_instance(rng: np.random.Generator, d: int, grid: int) -> CrofootInstance:
    """Crofoot transforms on both sides of a seeded pair, with ||W|| <= 0.8."""
    theta1 = random_inner(rng, d, grid)
    theta2 = random_inner(rng, d, grid)
    pair1 = crofoot_pair(rng, theta1)
    pair2 = crofoot_pair(rng, theta2)
    phi = sampling.random_laurent(rng, d, SYMBOL_DEGREE, grid)
    return CrofootInstance(pair1=pair1, pair2=pair2, phi=phi)


def unit_disk_point(rng: np.random.Generator, radius: float = 0.8) -> complex:
    return complex(radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()))
