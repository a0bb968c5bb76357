"""Invariants of sampled functions on the circle."""

import numpy as np

from mskit.exceptions import DegreeOverflowError
from mskit.operators import circle_fun as cf
from mskit.operators import sampling

from ._instances import rng_for, size_for
from .base import InvariantCheck, Level

EXACT_TOL = 1e-10


def _random_vector_fn(rng: np.random.Generator, d: int, degree: int, m: int) -> cf.CircleFn:
    return cf.from_fourier({k: sampling.random_cmat(rng, d, 1) for k in range(-degree, degree + 1)}, m)


class RieszProjectionCheck(InvariantCheck):
    """riesz_plus is an orthogonal projection: idempotent and self-adjoint."""

    fixed_tolerance = EXACT_TOL

    @property
    def name(self) -> str:
        return "circle_fun.riesz_projection"

    @property
    def description(self) -> str:
        return "riesz_plus is idempotent and self-adjoint on seeded vector functions"

    @property
    def module(self) -> str:
        return "circle_fun"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed)
        f = _random_vector_fn(rng, d, 6, level.grid)
        g = _random_vector_fn(rng, d, 6, level.grid)
        pf = cf.riesz_plus(f)
        idempotence = cf.norm(cf.riesz_plus(pf) - pf)
        symmetry = abs(cf.inner_product(pf, g) - cf.inner_product(f, cf.riesz_plus(g)))
        return max(idempotence, symmetry)


class MulAssociativityCheck(InvariantCheck):
    fixed_tolerance = EXACT_TOL

    @property
    def name(self) -> str:
        return "circle_fun.mul_associativity"

    @property
    def description(self) -> str:
        return "exact products of polynomials below the aliasing limit are associative"

    @property
    def module(self) -> str:
        return "circle_fun"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed)
        f, g, h = (sampling.random_laurent(rng, d, 4, level.grid) for _ in range(3))
        left = cf.mul(cf.mul(f, g, exact=True), h, exact=True)
        right = cf.mul(f, cf.mul(g, h, exact=True), exact=True)
        return cf.sup_distance(left, right)


class AliasDetectionCheck(InvariantCheck):
    """Exact products reaching index M/2 are rejected, products just below are not."""

    fixed_tolerance = 0.5

    @property
    def name(self) -> str:
        return "circle_fun.alias_detection"

    @property
    def description(self) -> str:
        return "mul(exact=True) raises DegreeOverflowError exactly when the product aliases"

    @property
    def module(self) -> str:
        return "circle_fun"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        m = level.grid
        quarter = m // 4
        split = int(rng.integers(1, quarter))
        fits = cf.from_fourier({split: sampling.random_cmat(rng, 1, 1)}, m)
        rest = cf.from_fourier({m // 2 - 1 - split: sampling.random_cmat(rng, 1, 1)}, m)
        failures = 0
        try:
            cf.mul(fits, rest, exact=True)
        except DegreeOverflowError:
            failures += 1
        over = cf.from_fourier({m // 2 - split: sampling.random_cmat(rng, 1, 1)}, m)
        try:
            cf.mul(fits, over, exact=True)
            failures += 1
        except DegreeOverflowError:
            pass
        return float(failures)
