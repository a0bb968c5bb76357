"""Invariants of the generalized Crofoot transform."""

from mskit.operators import sampling
from mskit.operators.crofoot import SymbolFormula, intertwining_residuals, kernel_action_defect, push_pull_defect

from ._instances import crofoot_instance, rng_for, size_for, unit_disk_point
from .base import InvariantCheck, Level

KERNEL_PAIRS = 10
REFINEMENT_TOL = 1e-8


class UnitarityCheck(InvariantCheck):
    tolerance_key = "unitary_tol"

    @property
    def name(self) -> str:
        return "crofoot.unitarity"

    @property
    def description(self) -> str:
        return "J_W is unitary between K_Theta and K_Theta'"

    @property
    def module(self) -> str:
        return "crofoot"

    def measure(self, level: Level, seed: int) -> float:
        inst = crofoot_instance(rng_for(self.name, seed), size_for(level, seed), level.grid)
        return max(inst.pair1.unitarity_defect, inst.pair2.unitarity_defect)


class IntertwiningCheck(InvariantCheck):
    """J2 A_Phi J1* = A_Psi and its reverse, relative to the operator norm.

    The verbatim symbol formulas are measured on the same instance and
    reported as findings.
    """

    tolerance_key = "intertwining_tol"

    @property
    def name(self) -> str:
        return "crofoot.intertwining"

    @property
    def description(self) -> str:
        return "Crofoot transforms conjugate A_Phi to A_Psi in both directions"

    @property
    def module(self) -> str:
        return "crofoot"

    def measure(self, level: Level, seed: int) -> float:
        inst = crofoot_instance(rng_for(self.name, seed), size_for(level, seed), level.grid)
        residuals = intertwining_residuals(inst.pair1, inst.pair2, inst.phi)
        literal = intertwining_residuals(inst.pair1, inst.pair2, inst.phi, formula=SymbolFormula.LITERAL)
        worst_literal = max(literal.forward, literal.reverse)
        self.add_finding(
            seed,
            worst_literal,
            0.0,
            self.tolerance,
            "finding" if worst_literal > self.tolerance else "pass",
        )
        return max(residuals.forward, residuals.reverse)


class PushPullCheck(InvariantCheck):
    tolerance_key = "push_pull_tol"

    @property
    def name(self) -> str:
        return "crofoot.push_pull"

    @property
    def description(self) -> str:
        return "symbol_pull inverts symbol_push at every grid point"

    @property
    def module(self) -> str:
        return "crofoot"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = crofoot_instance(rng, size_for(level, seed), level.grid)
        pair1, pair2 = inst.pair1, inst.pair2
        return push_pull_defect(inst.phi, pair1.w, pair2.w, pair1.theta, pair2.theta)


class KernelActionCheck(InvariantCheck):
    """J_W maps the kernel k_lam (I - W Theta(lam)*)^{-1} D_{W*} y to k'_lam y."""

    tolerance_key = "kernel_action_tol"

    @property
    def name(self) -> str:
        return "crofoot.kernel_action"

    @property
    def description(self) -> str:
        return "J_W sends reproducing kernels of K_Theta to those of K_Theta'"

    @property
    def module(self) -> str:
        return "crofoot"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = crofoot_instance(rng, size_for(level, seed), level.grid)
        worst = 0.0
        for _ in range(KERNEL_PAIRS):
            lam = unit_disk_point(rng)
            y = sampling.random_vector(rng, inst.pair1.theta.d)
            worst = max(worst, kernel_action_defect(inst.pair1, lam, y))
        return worst


class GridRefinementCheck(InvariantCheck):
    """Unitarity and intertwining residuals barely move when the grid doubles."""

    fixed_tolerance = REFINEMENT_TOL

    @property
    def name(self) -> str:
        return "crofoot.grid_refinement"

    @property
    def description(self) -> str:
        return "Crofoot residuals change by at most 1e-8 from M to 2M"

    @property
    def module(self) -> str:
        return "crofoot"

    def _residuals(self, level: Level, seed: int, grid: int) -> list[float]:
        inst = crofoot_instance(rng_for(self.name, seed), size_for(level, seed), grid)
        inter = intertwining_residuals(inst.pair1, inst.pair2, inst.phi)
        return [inst.pair1.unitarity_defect, inst.pair2.unitarity_defect, inter.forward, inter.reverse]

    def measure(self, level: Level, seed: int) -> float:
        coarse = self._residuals(level, seed, level.grid)
        fine = self._residuals(level, seed, 2 * level.grid)
        return max(abs(a - b) for a, b in zip(coarse, fine, strict=True))
