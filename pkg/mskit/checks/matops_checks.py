"""Invariants of the dense matrix kernel."""

import numpy as np

from mskit.operators import matops, sampling
from mskit.operators.matops import Side

from ._instances import rng_for, size_for
from .base import InvariantCheck, Level


class DefectIntertwiningCheck(InvariantCheck):
    """W D_W = D_{W*} W for strict contractions."""

    tolerance_key = "tol_psd"

    @property
    def name(self) -> str:
        return "matops.defect_intertwining"

    @property
    def description(self) -> str:
        return "W D_W equals D_W* W for seeded strict contractions"

    @property
    def module(self) -> str:
        return "matops"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        w = sampling.random_strict_contraction(rng, size_for(level, seed) + 1)
        lhs = w @ matops.defect(w, Side.RIGHT)
        rhs = matops.defect(w, Side.LEFT) @ w
        return matops.operator_norm(lhs - rhs)


class HermitianSqrtCheck(InvariantCheck):
    tolerance_key = "tol_psd"

    @property
    def name(self) -> str:
        return "matops.hermitian_sqrt"

    @property
    def description(self) -> str:
        return "hermitian_sqrt(A)^2 reproduces positive semidefinite A"

    @property
    def module(self) -> str:
        return "matops"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed) + 1
        # rank-deficient half of the time
        factor = sampling.random_cmat(rng, d, d if seed % 2 else d - 1)
        a = factor @ factor.conj().T
        root = matops.hermitian_sqrt(a)
        return matops.operator_norm(root @ root - a) / max(1.0, matops.operator_norm(a))


class RankInvarianceCheck(InvariantCheck):
    """rank(U A V) = rank(A) for unitary U, V."""

    fixed_tolerance = 0.5

    @property
    def name(self) -> str:
        return "matops.rank_invariance"

    @property
    def description(self) -> str:
        return "rank is unchanged by multiplication with seeded unitaries"

    @property
    def module(self) -> str:
        return "matops"

    def measure(self, level: Level, seed: int) -> float:
        rng = rng_for(self.name, seed)
        d = size_for(level, seed) + 2
        r = int(rng.integers(0, d + 1))
        a = sampling.random_cmat(rng, d, r) @ sampling.random_cmat(rng, r, d) if r else np.zeros((d, d))
        u, v = sampling.random_unitary(rng, d), sampling.random_unitary(rng, d)
        expected = matops.rank(a) if r else 0
        return float(abs(matops.rank(u @ a @ v) - expected) + abs(expected - r))
