"""Invariants of zero symbols, symbol pairs and the TTO space dimension."""

import itertools

import numpy as np

from mskit.operators import circle_fun as cf
from mskit.operators import matops, sampling
from mskit.operators.inner import monomial
from mskit.operators.model_space import basis
from mskit.operators.tto import block_toeplitz_rank, build
from mskit.operators.zerosym import (
    ShiftOrder,
    SymbolDecomposition,
    class_shift,
    combine_pair,
    lift_witnesses,
    symbol_pair,
    tto_space_dim,
    zero_equivalence_check,
    zero_residual,
)

from ._instances import PairInstance, pair_instance, random_inner, rng_for, size_for
from .base import InvariantCheck, Level

CONVERSE_FLOOR = 1e-4
CONVERSE_GATE = 0.1
LIFT_TOL = 1e-8
MAX_BLOCKS = 4
WITNESS_DEGREE = 2


def _in_class_symbol(level: Level, seed: int, name: str) -> tuple[cf.CircleFn, float, PairInstance]:
    rng = rng_for(name, seed)
    inst = pair_instance(rng, size_for(level, seed), level.grid)
    d = inst.theta1.d
    phi1 = sampling.random_analytic(rng, d, d, WITNESS_DEGREE, level.grid)
    phi2 = sampling.random_analytic(rng, d, d, WITNESS_DEGREE, level.grid)
    phi = cf.adjoint_fn(cf.mul(inst.theta1.fn, phi1)) + cf.mul(inst.theta2.fn, phi2)
    return phi, cf.norm(phi1) + cf.norm(phi2), inst


class SufficiencyCheck(InvariantCheck):
    """(Theta1 Phi1)* + Theta2 Phi2 always gives the zero operator."""

    tolerance_key = "op_zero_rel"

    @property
    def name(self) -> str:
        return "zerosym.sufficiency"

    @property
    def description(self) -> str:
        return "symbols of the form (Theta1 Phi1)* + Theta2 Phi2 compress to zero"

    @property
    def module(self) -> str:
        return "zerosym"

    def seeds(self, level: Level) -> range:
        return range(level.bulk_seeds)

    def measure(self, level: Level, seed: int) -> float:
        phi, scale, inst = _in_class_symbol(level, seed, self.name)
        return build(inst.b1, inst.b2, phi).norm / scale


class ZeroEquivalenceCheck(InvariantCheck):
    """The operator test and the symbol test agree on in-class and generic symbols."""

    fixed_tolerance = 0.5

    @property
    def name(self) -> str:
        return "zerosym.equivalence"

    @property
    def description(self) -> str:
        return "A_Phi = 0 exactly when Phi splits as (Theta1 Phi1)* + Theta2 Phi2"

    @property
    def module(self) -> str:
        return "zerosym"

    def seeds(self, level: Level) -> range:
        return range(2 * level.bulk_seeds)

    def measure(self, level: Level, seed: int) -> float:
        if seed % 2 == 0:
            phi, _, inst = _in_class_symbol(level, seed, self.name)
        else:
            inst = pair_instance(rng_for(self.name, seed), size_for(level, seed), level.grid)
            phi = inst.phi
        t = self.tolerances
        report = zero_equivalence_check(phi, inst.b1, inst.b2, t.op_zero_rel, t.sym_zero_rel)
        if not report.consistent:
            self.add_finding(seed, report.op_norm, report.residual, t.op_zero_rel * report.phi_norm)
        return 0.0 if report.consistent else 1.0


class ConverseCheck(InvariantCheck):
    """Symbols far from the zero class give operators bounded away from zero."""

    fixed_tolerance = CONVERSE_FLOOR
    higher_is_better = True

    @property
    def name(self) -> str:
        return "zerosym.converse"

    @property
    def description(self) -> str:
        return "||A_Phi|| >= 1e-4 ||Phi|| whenever the zero residual is at least 0.1 ||Phi||"

    @property
    def module(self) -> str:
        return "zerosym"

    def seeds(self, level: Level) -> range:
        return range(level.bulk_seeds)

    def measure(self, level: Level, seed: int) -> float | None:
        inst = pair_instance(rng_for(self.name, seed), size_for(level, seed), level.grid)
        phi_norm = cf.norm(inst.phi)
        residual = zero_residual(inst.phi, inst.theta1, inst.theta2).residual
        if residual < CONVERSE_GATE * phi_norm:
            return None
        return build(inst.b1, inst.b2, inst.phi).norm / phi_norm


class ClassShiftCheck(InvariantCheck):
    """Symbol pairs reproduce A_Phi and class_shift leaves the operator unchanged.

    The verbatim factor order of the shift is measured too and reported.
    """

    tolerance_key = "shift_tol"

    @property
    def name(self) -> str:
        return "zerosym.class_shift"

    @property
    def description(self) -> str:
        return "A_{Psi1 + Psi2*} = A_Phi, also after shifting the pair by X"

    @property
    def module(self) -> str:
        return "zerosym"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = pair_instance(rng, size_for(level, seed), level.grid)
        reference = build(inst.b1, inst.b2, inst.phi).mat
        scale = max(matops.operator_norm(reference), 1e-300)
        psi1, psi2 = symbol_pair(inst.phi, inst.theta1, inst.theta2)
        x = sampling.random_cmat(rng, inst.theta1.d, inst.theta1.d)

        def drift(pair: tuple[cf.CircleFn, cf.CircleFn]) -> float:
            return matops.operator_norm(build(inst.b1, inst.b2, combine_pair(*pair)).mat - reference) / scale

        shifted = class_shift(psi1, psi2, x, inst.theta1, inst.theta2)
        literal = drift(class_shift(psi1, psi2, x, inst.theta1, inst.theta2, ShiftOrder.LITERAL))
        self.add_finding(seed, literal, 0.0, self.tolerance, "finding" if literal > self.tolerance else "pass")
        return max(drift((psi1, psi2)), drift(shifted))


def _dimension_cases(level: Level) -> list[tuple[str, int, int, int]]:
    """Monomial (z^n1 I, z^n2 I) for n1, n2 <= 4, then seeded Blaschke-Potapov pairs."""
    blocks = range(1, MAX_BLOCKS + 1)
    cases = [("monomial", n1, n2, d) for d in range(1, level.max_d + 1) for n1, n2 in itertools.product(blocks, blocks)]
    cases += [("bp", 0, 0, 1 + i % level.max_d) for i in range(level.seeds)]
    return cases


class DimensionCheck(InvariantCheck):
    """The computed dimension is saturated and equals d m + d n - d^2.

    For monomial pairs the block-layout count is a second, independent oracle.
    Whenever m^d + n^d - d^2 differs from the computed value a finding is
    recorded.
    """

    fixed_tolerance = 0.5

    @property
    def name(self) -> str:
        return "zerosym.dimension"

    @property
    def description(self) -> str:
        return "dim of the TTO space from a rank count matches d m + d n - d^2"

    @property
    def module(self) -> str:
        return "zerosym"

    def seeds(self, level: Level) -> range:
        return range(len(_dimension_cases(level)))

    def measure(self, level: Level, seed: int) -> float:
        kind, n1, n2, d = _dimension_cases(level)[seed]
        if kind == "monomial":
            theta1, theta2 = monomial(n1, d, level.grid), monomial(n2, d, level.grid)
        else:
            rng = rng_for(self.name, seed)
            theta1, theta2 = random_inner(rng, d, level.grid), random_inner(rng, d, level.grid)
        report = tto_space_dim(basis(theta1), basis(theta2), self.tolerances.dim_rel_tol)
        error = abs(report.computed - report.column_formula) + (0 if report.saturated else 1)
        if kind == "monomial":
            error += abs(report.computed - block_toeplitz_rank(max(n1, n2), min(n1, n2), d))
        if not report.formula_agrees:
            self.add_finding(seed, report.computed, report.paper_formula, 0.0)
        return float(error)


class LiftWitnessesCheck(InvariantCheck):
    """Witnesses on the transformed spaces carry back to a pointwise split of the pulled symbol.

    Analyticity of the lifted second witness is reported, not enforced.
    """

    fixed_tolerance = LIFT_TOL

    @property
    def name(self) -> str:
        return "zerosym.lift_witnesses"

    @property
    def description(self) -> str:
        return "lifted witnesses rebuild the original symbol as (Theta1 Phi1)* + Theta2 Phi2"

    @property
    def module(self) -> str:
        return "zerosym"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed)
        theta1, theta2 = random_inner(rng, d, level.grid), random_inner(rng, d, level.grid)
        w1, w2 = sampling.random_strict_contraction(rng, d), sampling.random_strict_contraction(rng, d)
        primed = SymbolDecomposition(
            phi1=sampling.random_analytic(rng, d, d, WITNESS_DEGREE, level.grid),
            phi2=sampling.random_analytic(rng, d, d, WITNESS_DEGREE, level.grid),
            const_split=np.zeros((d, d), dtype=np.complex128),
            residual=0.0,
        )
        lifted = lift_witnesses(primed, theta1, theta2, w1, w2)
        self.add_finding(
            seed,
            lifted.h2_distance_phi2,
            0.0,
            LIFT_TOL,
            "finding" if lifted.h2_distance_phi2 > LIFT_TOL else "pass",
        )
        return lifted.residual / max(cf.norm(lifted.phi), 1.0)
