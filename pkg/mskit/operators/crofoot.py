"""The generalized Crofoot transform between model spaces.

For a strict contraction W and Theta' = crofoot_inner(Theta, W), the unitary
J_W: K_Theta -> K_Theta' acts pointwise as multiplication by

    G(z) = D_{W*} (I - Theta(z) W*)^{-1},

and its adjoint as multiplication by ``G(z)^{-1} = D_{W*} (I + Theta'(z) W*)^{-1}``.
Consequently ``J2 A_Phi J1* = A_Psi`` exactly when ``Psi = G2^{-*} Phi G1^{-1}``.
"""

import dataclasses
import logging
from enum import StrEnum

import numpy as np
import numpy.typing as npt

from mskit.exceptions import DimMismatchError, NotUnitaryError, ShapeMismatchError
from mskit.operators import circle_fun as cf
from mskit.operators import matops
from mskit.operators.inner import InnerFn, crofoot_inner
from mskit.operators.matops import COND_MAX, EPS_STRICT, TOL_PSD, CMat, Side
from mskit.operators.model_space import ModelSpaceBasis, kernel
from mskit.operators.tto import build

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-7


class SymbolFormula(StrEnum):
    """Which symbol transport to use.

    ``corrected`` is ``Psi = G2^{-*} Phi G1^{-1}`` and its inverse. ``literal``
    uses the left factor G2 in place of G2^{-*} (and G2^{-1} in place of G2*
    when pulling back), which does not intertwine in general.
    """

    CORRECTED = "corrected"
    LITERAL = "literal"


@dataclasses.dataclass(frozen=True)
class CrofootPair:
    """J_W materialized in fixed bases of K_Theta and K_Theta'."""

    w: CMat
    basis: ModelSpaceBasis
    basis_prime: ModelSpaceBasis
    j: CMat
    unitarity_defect: float

    @property
    def theta(self) -> InnerFn:
        return self.basis.theta

    @property
    def theta_prime(self) -> InnerFn:
        return self.basis_prime.theta


def multiplier(
    theta: InnerFn,
    w: npt.ArrayLike,
    eps_strict: float = EPS_STRICT,
    tol_psd: float = TOL_PSD,
    cond_max: float = COND_MAX,
) -> cf.CircleFn:
    """G(z) = D_{W*} (I - Theta(z) W*)^{-1} on the grid."""
    wmat = matops.check_strict_contraction(w, eps_strict)
    d_left = matops.defect(wmat, Side.LEFT, eps_strict, tol_psd)
    resolvent = matops.inverse_stack(np.eye(theta.d) - theta.samples @ wmat.conj().T, cond_max)
    return cf.CircleFn(d_left @ resolvent, alias_bound=theta.fn.alias_bound)


def inverse_multiplier(
    theta_prime: InnerFn,
    w: npt.ArrayLike,
    eps_strict: float = EPS_STRICT,
    tol_psd: float = TOL_PSD,
    cond_max: float = COND_MAX,
) -> cf.CircleFn:
    """D_{W*} (I + Theta'(z) W*)^{-1}, the pointwise inverse of ``multiplier``."""
    wmat = matops.check_strict_contraction(w, eps_strict)
    d_left = matops.defect(wmat, Side.LEFT, eps_strict, tol_psd)
    resolvent = matops.inverse_stack(np.eye(theta_prime.d) + theta_prime.samples @ wmat.conj().T, cond_max)
    return cf.CircleFn(d_left @ resolvent, alias_bound=theta_prime.fn.alias_bound)


def apply_forward(theta: InnerFn, w: npt.ArrayLike, f: cf.CircleFn) -> cf.CircleFn:
    """J_W f computed pointwise."""
    return cf.mul(multiplier(theta, w), f)


def transform(
    b: ModelSpaceBasis,
    b_prime: ModelSpaceBasis,
    w: npt.ArrayLike,
    unitary_tol: float = UNITARY_TOL,
    enforce: bool = True,
    eps_strict: float = EPS_STRICT,
    tol_psd: float = TOL_PSD,
    cond_max: float = COND_MAX,
) -> CrofootPair:
    """Matrix of J_W with entries ``<J b_j, b'_i>``.

    ``enforce`` raises NotUnitaryError when ``J*J`` or ``JJ*`` is further than
    ``unitary_tol`` from the identity; otherwise the defect is only recorded.
    """
    wmat = matops.as_cmat(w)
    if b.dim != b_prime.dim:
        raise DimMismatchError(f"dim K_Theta = {b.dim} but dim K_Theta' = {b_prime.dim}")
    if b.theta.d != b_prime.theta.d or wmat.shape != (b.theta.d, b.theta.d):
        raise ShapeMismatchError(f"W of shape {wmat.shape} does not match d = {b.theta.d}")
    image = multiplier(b.theta, wmat, eps_strict, tol_psd, cond_max).samples @ b.stack
    j = np.einsum("mdi,mdj->ij", b_prime.stack.conj(), image) / b.grid_size
    eye = np.eye(b.dim)
    defect = max(matops.operator_norm(j.conj().T @ j - eye), matops.operator_norm(j @ j.conj().T - eye))
    logger.debug(f"Crofoot transform: dim {b.dim}, ||W|| = {matops.operator_norm(wmat):.3f}, defect {defect:.2e}")
    if enforce and defect > unitary_tol:
        raise NotUnitaryError(
            "Crofoot transform is not unitary; Theta' is inconsistent or the grid is too coarse",
            f"defect {defect:.3e} > {unitary_tol:.1e}",
        )
    return CrofootPair(w=wmat, basis=b, basis_prime=b_prime, j=j, unitarity_defect=defect)


def adjoint_apply(pair: CrofootPair, g: cf.CircleFn) -> cf.CircleFn:
    """J_W* g = D_{W*} (I + Theta'(z) W*)^{-1} g pointwise."""
    return cf.mul(inverse_multiplier(pair.theta_prime, pair.w), g)


def kernel_action_defect(pair: CrofootPair, lam: complex, y: npt.ArrayLike) -> float:
    """|| J(k_lam (I - W Theta(lam)*)^{-1} D_{W*} y) - k'_lam y || in L2."""
    theta, wmat = pair.theta, pair.w
    vector = np.asarray(y, dtype=np.complex128).reshape(-1, 1)
    d_left = matops.defect(wmat, Side.LEFT)
    direction = matops.solve(np.eye(theta.d) - wmat @ theta.value_at(lam).conj().T, d_left @ vector)
    lhs = apply_forward(theta, wmat, kernel(theta, lam, direction))
    rhs = kernel(pair.theta_prime, lam, vector)
    return cf.norm(lhs - rhs)


def _pointwise(left: npt.NDArray[np.complex128], phi: cf.CircleFn, right: npt.NDArray[np.complex128]) -> cf.CircleFn:
    return cf.CircleFn(left @ phi.samples @ right, alias_bound=phi.alias_bound)


def symbol_push(
    phi: cf.CircleFn,
    w1: npt.ArrayLike,
    w2: npt.ArrayLike,
    theta1: InnerFn,
    theta2: InnerFn,
    theta1_prime: InnerFn | None = None,
    formula: SymbolFormula | str = SymbolFormula.CORRECTED,
) -> cf.CircleFn:
    """Symbol Psi on the transformed spaces with A_Psi = J2 A_Phi J1*."""
    w1m, w2m = matops.as_cmat(w1), matops.as_cmat(w2)
    d1, d2 = matops.defect(w1m, Side.LEFT), matops.defect(w2m, Side.LEFT)
    if SymbolFormula(formula) is SymbolFormula.LITERAL:
        prime = theta1_prime if theta1_prime is not None else crofoot_inner(theta1, w1m)
        left = d2 @ matops.inverse_stack(np.eye(theta2.d) - theta2.samples @ w2m.conj().T)
        right = d1 @ matops.inverse_stack(np.eye(theta1.d) + prime.samples @ w1m.conj().T)
        return _pointwise(left, phi, right)
    theta2_adj = np.conj(np.swapaxes(theta2.samples, 1, 2))
    left = matops.inverse(d2) @ (np.eye(theta2.d) - w2m @ theta2_adj)
    right = (np.eye(theta1.d) - theta1.samples @ w1m.conj().T) @ matops.inverse(d1)
    return _pointwise(left, phi, right)


def symbol_pull(
    psi: cf.CircleFn,
    w1: npt.ArrayLike,
    w2: npt.ArrayLike,
    theta1: InnerFn,
    theta2: InnerFn,
    theta2_prime: InnerFn | None = None,
    formula: SymbolFormula | str = SymbolFormula.CORRECTED,
) -> cf.CircleFn:
    """Symbol Phi on the original spaces with A_Phi = J2* A_Psi J1."""
    w1m, w2m = matops.as_cmat(w1), matops.as_cmat(w2)
    d1, d2 = matops.defect(w1m, Side.LEFT), matops.defect(w2m, Side.LEFT)
    right = d1 @ matops.inverse_stack(np.eye(theta1.d) - theta1.samples @ w1m.conj().T)
    if SymbolFormula(formula) is SymbolFormula.LITERAL:
        prime = theta2_prime if theta2_prime is not None else crofoot_inner(theta2, w2m)
        left = d2 @ matops.inverse_stack(np.eye(theta2.d) + prime.samples @ w2m.conj().T)
        return _pointwise(left, psi, right)
    theta2_adj = np.conj(np.swapaxes(theta2.samples, 1, 2))
    left = matops.inverse_stack(np.eye(theta2.d) - w2m @ theta2_adj) @ d2
    return _pointwise(left, psi, right)


@dataclasses.dataclass(frozen=True)
class IntertwiningResiduals:
    forward: float
    reverse: float
    scale_forward: float
    scale_reverse: float


def _relative(residual: float, scale: float) -> float:
    return residual / scale if scale > 0.0 else residual


def intertwining_residuals(
    pair1: CrofootPair,
    pair2: CrofootPair,
    phi: cf.CircleFn,
    psi: cf.CircleFn | None = None,
    formula: SymbolFormula | str = SymbolFormula.CORRECTED,
) -> IntertwiningResiduals:
    """Relative residuals of both intertwining relations.

    forward: ||J2 A_Phi J1* - A_Psi|| / ||A_Phi|| with Psi = symbol_push(Phi).
    reverse: ||J2* A_Psi J1 - A_Phi|| / ||A_Psi|| with Phi = symbol_pull(Psi),
    where ``psi`` defaults to ``phi`` read as a symbol on the transformed spaces.
    """
    theta1, theta2 = pair1.theta, pair2.theta
    a_phi = build(pair1.basis, pair2.basis, phi).mat
    pushed = symbol_push(phi, pair1.w, pair2.w, theta1, theta2, pair1.theta_prime, formula)
    a_pushed = build(pair1.basis_prime, pair2.basis_prime, pushed).mat
    forward = matops.operator_norm(pair2.j @ a_phi @ pair1.j.conj().T - a_pushed)
    scale_forward = matops.operator_norm(a_phi)

    source = psi if psi is not None else phi
    a_psi = build(pair1.basis_prime, pair2.basis_prime, source).mat
    pulled = symbol_pull(source, pair1.w, pair2.w, theta1, theta2, pair2.theta_prime, formula)
    a_pulled = build(pair1.basis, pair2.basis, pulled).mat
    reverse = matops.operator_norm(pair2.j.conj().T @ a_psi @ pair1.j - a_pulled)
    scale_reverse = matops.operator_norm(a_psi)
    return IntertwiningResiduals(
        forward=_relative(forward, scale_forward),
        reverse=_relative(reverse, scale_reverse),
        scale_forward=scale_forward,
        scale_reverse=scale_reverse,
    )


def push_pull_defect(
    phi: cf.CircleFn, w1: npt.ArrayLike, w2: npt.ArrayLike, theta1: InnerFn, theta2: InnerFn
) -> float:
    """Grid distance between Phi and symbol_pull(symbol_push(Phi))."""
    pushed = symbol_push(phi, w1, w2, theta1, theta2)
    return cf.sup_distance(symbol_pull(pushed, w1, w2, theta1, theta2), phi)
