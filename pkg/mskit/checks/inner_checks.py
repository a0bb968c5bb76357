"""Invariants of inner functions and their Crofoot transforms."""

from mskit.operators import matops, sampling
from mskit.operators.inner import crofoot_identity_defect, crofoot_inner, crofoot_inverse_defect, purify

from ._instances import random_inner, rng_for, size_for
from .base import InvariantCheck, Level

INVERSE_TOL = 1e-8


class BlaschkePotapovUnitarityCheck(InvariantCheck):
    fixed_tolerance = 1e-10

    @property
    def name(self) -> str:
        return "inner.bp_unitarity"

    @property
    def description(self) -> str:
        return "Blaschke-Potapov products are unitary at every grid point"

    @property
    def module(self) -> str:
        return "inner"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        return random_inner(rng, size_for(level, seed), level.grid).unitarity_defect


class CrofootIdentityCheck(InvariantCheck):
    """I + Theta' W* = D_{W*} (I - Theta W*)^{-1} D_{W*} on the grid."""

    tolerance_key = "identity_tol"

    @property
    def name(self) -> str:
        return "inner.crofoot_identity"

    @property
    def description(self) -> str:
        return "the resolvent identity linking Theta, Theta' and W holds at every grid point"

    @property
    def module(self) -> str:
        return "inner"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        theta = random_inner(rng, size_for(level, seed), level.grid)
        w = sampling.random_strict_contraction(rng, theta.d)
        return crofoot_identity_defect(theta, crofoot_inner(theta, w), w)


class CrofootInverseCheck(InvariantCheck):
    """Transforming back with -W recovers Theta.

    The property is reported rather than enforced: every instance passes and
    the defect is written as a finding.
    """

    fixed_tolerance = INVERSE_TOL

    @property
    def name(self) -> str:
        return "inner.crofoot_inverse"

    @property
    def description(self) -> str:
        return "crofoot_inner(crofoot_inner(Theta, W), -W) recovers Theta (reported)"

    @property
    def module(self) -> str:
        return "inner"

    def passes(self, value: float) -> bool:
        return True

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        theta = random_inner(rng, size_for(level, seed), level.grid)
        w = sampling.random_strict_contraction(rng, theta.d)
        defect = crofoot_inverse_defect(theta, w)
        self.add_finding(seed, defect, 0.0, INVERSE_TOL, "finding" if defect > INVERSE_TOL else "pass")
        return defect


class PurityTransferCheck(InvariantCheck):
    """W = Theta(0) produces an inner function vanishing at the origin."""

    tolerance_key = "purity_transfer_tol"

    @property
    def name(self) -> str:
        return "inner.purity_transfer"

    @property
    def description(self) -> str:
        return "the Crofoot transform with W = Theta(0) vanishes at the origin"

    @property
    def module(self) -> str:
        return "inner"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed)
        theta = random_inner(rng, d, level.grid, degree=d + seed % 2)
        theta_prime, _ = purify(theta)
        return matops.operator_norm(theta_prime.at_origin())
