"""Asymmetric truncated Toeplitz operators as finite matrices.

The matrix of A_Phi from K_{Theta1} to K_{Theta2} in orthonormal bases has
entries ``<Phi b1_j, b2_i>`` in L2. Since each ``b2_i`` lies in K_{Theta2},
this equals ``<P_{Theta2} P_+ (Phi b1_j), b2_i>`` and needs no projection.
"""

import dataclasses
import logging
from collections.abc import Mapping
from typing import Any

import numpy as np
import numpy.typing as npt

from mskit.exceptions import BadShapeError, ShapeMismatchError
from mskit.operators import circle_fun as cf
from mskit.operators import matops
from mskit.operators.inner import InnerFn
from mskit.operators.matops import CMat
from mskit.operators.model_space import ModelSpaceBasis, project
from mskit.utils import array_digest, matrix_to_json

logger = logging.getLogger(__name__)

BUILD_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class TTOMatrix:
    """Matrix of A_Phi: K_{Theta1} -> K_{Theta2}, shape dim K_{Theta2} x dim K_{Theta1}."""

    mat: CMat
    theta1: InnerFn
    theta2: InnerFn
    symbol_id: str
    tol: float = BUILD_TOL

    @property
    def shape(self) -> tuple[int, int]:
        return int(self.mat.shape[0]), int(self.mat.shape[1])

    @property
    def norm(self) -> float:
        return matops.operator_norm(self.mat) if self.mat.size else 0.0

    def to_json(self, symbol: cf.CircleFn | None = None) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "dims": list(self.shape),
            "entries": matrix_to_json(self.mat),
            "theta1": self.theta1.spec,
            "theta2": self.theta2.spec,
            "symbol_id": self.symbol_id,
        }
        if symbol is not None:
            payload["symbol"] = cf.to_json(symbol)
        return payload


def _check_symbol(b1: ModelSpaceBasis, b2: ModelSpaceBasis, phi: cf.CircleFn) -> None:
    if phi.shape != (b2.theta.d, b1.theta.d):
        raise ShapeMismatchError(f"Symbol shape {phi.shape} does not map C^{b1.theta.d} to C^{b2.theta.d}")
    if not phi.grid_size == b1.grid_size == b2.grid_size:
        raise ShapeMismatchError(
            f"Grid sizes differ: symbol {phi.grid_size}, bases {b1.grid_size} and {b2.grid_size}"
        )


def build(b1: ModelSpaceBasis, b2: ModelSpaceBasis, phi: cf.CircleFn, tol: float = BUILD_TOL) -> TTOMatrix:
    """Matrix of A_Phi in the given bases."""
    _check_symbol(b1, b2, phi)
    image = phi.samples @ b1.stack
    mat = np.einsum("mdi,mdj->ij", b2.stack.conj(), image) / phi.grid_size
    return TTOMatrix(mat=mat, theta1=b1.theta, theta2=b2.theta, symbol_id=array_digest(phi.samples), tol=tol)


def build_via_projection(b1: ModelSpaceBasis, b2: ModelSpaceBasis, phi: cf.CircleFn) -> TTOMatrix:
    """Same matrix, computed as P_{Theta2} P_+ (Phi b1_j) paired with b2_i."""
    _check_symbol(b1, b2, phi)
    image = cf.riesz_plus(cf.mul(phi, b1.as_function()))
    projected = project(b2.theta, image)
    mat = np.einsum("mdi,mdj->ij", b2.stack.conj(), projected.samples) / phi.grid_size
    return TTOMatrix(mat=mat, theta1=b1.theta, theta2=b2.theta, symbol_id=array_digest(phi.samples))


def block_toeplitz(n: int, m: int, deltas: Mapping[int, npt.ArrayLike], d: int | None = None) -> CMat:
    """``m x n`` grid of ``d x d`` blocks with block (r, c) = Delta_{c-r}; missing Delta are zero."""
    if m < 1 or n < 1 or m > n:
        raise BadShapeError(f"Block layout needs 1 <= m <= n, got n={n}, m={m}")
    blocks = {int(s): np.atleast_2d(np.asarray(v, dtype=np.complex128)) for s, v in deltas.items()}
    if d is None:
        if not blocks:
            raise BadShapeError("Block size is unknown: pass d or at least one block")
        d = next(iter(blocks.values())).shape[0]
    for s, block in blocks.items():
        if block.shape != (d, d):
            raise BadShapeError(f"Block Delta_{s} has shape {block.shape}, expected ({d}, {d})")
    out = np.zeros((m * d, n * d), dtype=np.complex128)
    for r in range(m):
        for c in range(n):
            block = blocks.get(c - r)
            if block is not None:
                out[r * d : (r + 1) * d, c * d : (c + 1) * d] = block
    return out


def symbol_from_blocks(deltas: Mapping[int, npt.ArrayLike], m: int = cf.DEFAULT_GRID) -> cf.CircleFn:
    """Symbol whose compression between monomial spaces is ``block_toeplitz(deltas)``.

    In the power-ordered monomial bases block (r, c) of A_Phi is the Fourier
    coefficient of index ``r - c``, so Delta_s sits at index ``-s``.
    """
    return cf.from_fourier({-int(s): block for s, block in deltas.items()}, m)


def blocks_from_symbol(phi: cf.CircleFn, n: int, m: int) -> dict[int, CMat]:
    return {s: phi.coefficient(-s) for s in range(-(m - 1), n)}


def block_toeplitz_rank(n: int, m: int, d: int) -> int:
    """Dimension of the span of all block layouts, counted by brute force."""
    columns = []
    for s in range(-(m - 1), n):
        for p in range(d):
            for q in range(d):
                unit = np.zeros((d, d))
                unit[p, q] = 1.0
                columns.append(block_toeplitz(n, m, {s: unit}, d).ravel())
    return matops.rank(np.stack(columns, axis=1))


def adjoint_pair_check(b1: ModelSpaceBasis, b2: ModelSpaceBasis, phi: cf.CircleFn) -> float:
    """||A_Phi* - A_{Phi*}|| in operator norm."""
    forward = build(b1, b2, phi).mat
    backward = build(b2, b1, cf.adjoint_fn(phi)).mat
    return matops.operator_norm(forward.conj().T - backward)
