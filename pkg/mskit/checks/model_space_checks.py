"""Invariants of model spaces, their kernels and bases."""

from mskit.operators import circle_fun as cf
from mskit.operators import sampling
from mskit.operators.inner import blaschke_potapov
from mskit.operators.model_space import basis, inclusion_defect, project, reproduction_defect

from ._instances import BP_RADIUS, MAX_DEGREE, random_inner, rng_for, size_for, unit_disk_point
from .base import InvariantCheck, Level

PAIRS_PER_INSTANCE = 5


class ReproductionCheck(InvariantCheck):
    """<f, k_lam x> = <f(lam), x> for f in K_Theta."""

    tolerance_key = "reproduction_tol"

    @property
    def name(self) -> str:
        return "model_space.reproduction"

    @property
    def description(self) -> str:
        return "reproducing kernels evaluate model space elements at seeded points"

    @property
    def module(self) -> str:
        return "model_space"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        theta = random_inner(rng, size_for(level, seed), level.grid)
        b = basis(theta)
        f = b.synthesize(sampling.random_vector(rng, b.dim))
        worst = 0.0
        for _ in range(PAIRS_PER_INSTANCE):
            lam = unit_disk_point(rng)
            x = sampling.random_vector(rng, theta.d)
            worst = max(worst, reproduction_defect(theta, f, lam, x))
        return worst


class ProjectionCheck(InvariantCheck):
    """P_Theta is idempotent and its range is orthogonal to Theta H2."""

    tolerance_key = "reproduction_tol"

    @property
    def name(self) -> str:
        return "model_space.projection"

    @property
    def description(self) -> str:
        return "project is idempotent with range orthogonal to Theta H2"

    @property
    def module(self) -> str:
        return "model_space"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        theta = random_inner(rng, size_for(level, seed), level.grid)
        f = sampling.random_analytic(rng, theta.d, 1, 6, level.grid)
        g = sampling.random_analytic(rng, theta.d, 1, 6, level.grid)
        projected = project(theta, f)
        idempotence = cf.norm(project(theta, projected) - projected)
        orthogonality = abs(cf.inner_product(projected, cf.mul(theta.fn, g)))
        return max(idempotence, orthogonality)


class BasisDimensionCheck(InvariantCheck):
    fixed_tolerance = 0.5

    @property
    def name(self) -> str:
        return "model_space.basis_dimension"

    @property
    def description(self) -> str:
        return "orthonormal bases of K_Theta have dimension equal to the degree"

    @property
    def module(self) -> str:
        return "model_space"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        theta = random_inner(rng, size_for(level, seed), level.grid)
        return float(abs(basis(theta).dim - (theta.degree_hint or 0)))


class InclusionCheck(InvariantCheck):
    """K_{Theta1} never lies in Theta2 H2 once Theta2 has a zero in the disk.

    Theta2 is Theta1 itself or Theta1 followed by one more factor, so it
    always shares the zeros of Theta1.
    """

    fixed_tolerance = 0.1
    higher_is_better = True

    @property
    def name(self) -> str:
        return "model_space.inclusion"

    @property
    def description(self) -> str:
        return "model spaces stay away from Theta2 H2 when Theta2 has a zero"

    @property
    def module(self) -> str:
        return "model_space"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed)
        factors = sampling.random_bp_factors(rng, d, int(rng.integers(d, MAX_DEGREE + 1)), max_radius=BP_RADIUS)
        theta1 = blaschke_potapov(factors, d, level.grid)
        if seed % 2:
            factors = factors + sampling.random_bp_factors(rng, d, d, max_radius=BP_RADIUS)[:1]
        theta2 = blaschke_potapov(factors, d, level.grid)
        return inclusion_defect(theta1, theta2)
