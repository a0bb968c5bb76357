"""Invariants of truncated Toeplitz operator matrices."""

import itertools

import numpy as np

from mskit.operators import circle_fun as cf
from mskit.operators import matops, sampling
from mskit.operators.inner import monomial
from mskit.operators.model_space import basis
from mskit.operators.tto import adjoint_pair_check, block_toeplitz, build, build_via_projection, symbol_from_blocks

from ._instances import pair_instance, rng_for, size_for
from .base import InvariantCheck, Level

MAX_BLOCKS = 4


class LinearityCheck(InvariantCheck):
    fixed_tolerance = 1e-10

    @property
    def name(self) -> str:
        return "tto.linearity"

    @property
    def description(self) -> str:
        return "build is linear in the symbol"

    @property
    def module(self) -> str:
        return "tto"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = pair_instance(rng, size_for(level, seed), level.grid)
        psi = sampling.random_laurent(rng, inst.theta1.d, 2, level.grid)
        alpha, beta = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        combined = build(inst.b1, inst.b2, inst.phi * alpha + psi * beta).mat
        separate = alpha * build(inst.b1, inst.b2, inst.phi).mat + beta * build(inst.b1, inst.b2, psi).mat
        return matops.operator_norm(combined - separate)


def _block_cases(level: Level) -> list[tuple[int, int, int]]:
    """All (n, m, d) with 1 <= m <= n <= 4 and d up to the level's limit."""
    blocks = range(1, MAX_BLOCKS + 1)
    return [(n, m, d) for d in range(1, level.max_d + 1) for n, m in itertools.product(blocks, blocks) if m <= n]


class BlockToeplitzCheck(InvariantCheck):
    """Between monomial spaces, A_Phi is the block Toeplitz layout of the coefficients."""

    tolerance_key = "block_tol"

    @property
    def name(self) -> str:
        return "tto.block_toeplitz"

    @property
    def description(self) -> str:
        return "build agrees entrywise with block_toeplitz between z^n I and z^m I spaces"

    @property
    def module(self) -> str:
        return "tto"

    def seeds(self, level: Level) -> range:
        return range(len(_block_cases(level)))

    def measure(self, level: Level, seed: int) -> float:
        n, m, d = _block_cases(level)[seed]
        rng = rng_for(self.name, seed)
        deltas = {s: sampling.random_cmat(rng, d, d) for s in range(-(m - 1), n)}
        phi = symbol_from_blocks(deltas, level.grid)
        computed = build(basis(monomial(n, d, level.grid)), basis(monomial(m, d, level.grid)), phi).mat
        expected = block_toeplitz(n, m, deltas, d)
        return float(np.max(np.abs(computed - expected)))


class ZeroSymbolWitnessCheck(InvariantCheck):
    """Theta2 Phi2 and (Theta1 Phi1)* give the zero operator for analytic Phi1, Phi2."""

    tolerance_key = "op_zero_rel"

    @property
    def name(self) -> str:
        return "tto.zero_witness"

    @property
    def description(self) -> str:
        return "symbols Theta2 Phi2 and (Theta1 Phi1)* compress to zero"

    @property
    def module(self) -> str:
        return "tto"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = pair_instance(rng, size_for(level, seed), level.grid)
        d = inst.theta1.d
        phi1 = sampling.random_analytic(rng, d, d, 2, level.grid)
        phi2 = sampling.random_analytic(rng, d, d, 2, level.grid)
        right = build(inst.b1, inst.b2, cf.mul(inst.theta2.fn, phi2)).norm / cf.norm(phi2)
        left = build(inst.b1, inst.b2, cf.adjoint_fn(cf.mul(inst.theta1.fn, phi1))).norm / cf.norm(phi1)
        return max(left, right)


class AdjointCheck(InvariantCheck):
    """(A_Phi)* = A_{Phi*} as maps K_{Theta2} -> K_{Theta1}."""

    tolerance_key = "adjoint_tol"

    @property
    def name(self) -> str:
        return "tto.adjoint"

    @property
    def description(self) -> str:
        return "the adjoint of A_Phi is the operator of the adjoint symbol"

    @property
    def module(self) -> str:
        return "tto"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = pair_instance(rng, size_for(level, seed), level.grid)
        return adjoint_pair_check(inst.b1, inst.b2, inst.phi)


class ProjectionOracleCheck(InvariantCheck):
    tolerance_key = "block_tol"

    @property
    def name(self) -> str:
        return "tto.projection_oracle"

    @property
    def description(self) -> str:
        return "build matches the explicit P_Theta2 P_+ (Phi f) construction"

    @property
    def module(self) -> str:
        return "tto"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        inst = pair_instance(rng, size_for(level, seed), level.grid)
        direct = build(inst.b1, inst.b2, inst.phi).mat
        oracle = build_via_projection(inst.b1, inst.b2, inst.phi).mat
        return matops.operator_norm(direct - oracle)
