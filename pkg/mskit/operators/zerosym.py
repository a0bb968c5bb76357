"""Zero symbols, canonical symbol pairs and the dimension of the TTO space.

A_Phi: K_{Theta1} -> K_{Theta2} vanishes exactly when
``Phi = (Theta1 Phi1)* + Theta2 Phi2`` with analytic ``Phi1``, ``Phi2``. The
split is unique up to a constant matrix, which ``zero_residual`` fixes by
least squares.
"""

import dataclasses
import logging
from enum import StrEnum

import numpy as np
import numpy.typing as npt
import scipy.linalg

from mskit.exceptions import NoConvergenceError
from mskit.operators import circle_fun as cf
from mskit.operators import matops
from mskit.operators.inner import InnerFn, crofoot_inner
from mskit.operators.matops import CMat, Side
from mskit.operators.model_space import ModelSpaceBasis, m_space_defect, matrix_kernel, theta_part
from mskit.operators.tto import build

logger = logging.getLogger(__name__)

OP_ZERO_REL = 1e-7
SYM_ZERO_REL = 1e-6
DIM_REL_TOL = 1e-9
DIM_GUARD = 2


@dataclasses.dataclass(frozen=True)
class SymbolDecomposition:
    """Witnesses of ``Phi ~ (Theta1 Phi1)* + Theta2 Phi2`` and the reconstruction error."""

    phi1: cf.CircleFn
    phi2: cf.CircleFn
    const_split: CMat
    residual: float


@dataclasses.dataclass(frozen=True)
class ZeroReport:
    op_norm: float
    residual: float
    phi_norm: float
    op_zero: bool
    sym_zero: bool

    @property
    def consistent(self) -> bool:
        return self.op_zero == self.sym_zero


@dataclasses.dataclass(frozen=True)
class DimensionReport:
    computed: int
    paper_formula: int
    column_formula: int
    saturated: bool
    m: int
    n: int
    d: int
    cutoff: tuple[int, int]

    @property
    def formula_agrees(self) -> bool:
        return self.computed == self.paper_formula


@dataclasses.dataclass(frozen=True)
class LiftedWitnesses:
    """Witnesses carried back through the Crofoot transport, with their diagnostics."""

    phi: cf.CircleFn
    phi1: cf.CircleFn
    phi2: cf.CircleFn
    residual: float
    h2_distance_phi1: float
    h2_distance_phi2: float


class ShiftOrder(StrEnum):
    """Factor order in the shift of the second symbol.

    ``kernel_left`` uses ``Psi2 - k0^{Theta1} X*``; ``literal`` uses
    ``Psi2 - X* k0^{Theta1}``, which preserves the operator only when X
    commutes with Theta1(0) Theta1*.
    """

    KERNEL_LEFT = "kernel_left"
    LITERAL = "literal"


def _complement(theta: InnerFn, f: cf.CircleFn) -> cf.CircleFn:
    """(I - Pi_Theta) f for analytic matrix-valued ``f``."""
    return f - theta_part(theta, f)


def _real_columns(f: cf.CircleFn) -> npt.NDArray[np.float64]:
    flat = f.samples.ravel()
    return np.concatenate([flat.real, flat.imag])


def zero_residual(phi: cf.CircleFn, theta1: InnerFn, theta2: InnerFn) -> SymbolDecomposition:
    """Best split of Phi into (Theta1 Phi1)* + Theta2 Phi2.

    Minimizes ``||(I - Pi2)(Phi_0 - c + Phi_+)||^2 + ||(I - Pi1)((Phi_- + c)*)||^2``
    over constant ``c``. Both terms are affine in ``c`` because
    ``(I - Pi_Theta) c = k0^Theta c``.
    """
    d = theta1.d
    minus = cf.riesz_minus(phi)
    analytic = cf.riesz_plus(phi)
    base2 = _complement(theta2, analytic)
    base1 = _complement(theta1, cf.adjoint_fn(minus))
    k2 = matrix_kernel(theta2, 0.0)
    k1 = matrix_kernel(theta1, 0.0)
    columns = []
    for p in range(d):
        for q in range(d):
            for unit in (1.0, 1j):
                c = np.zeros((d, d), dtype=np.complex128)
                c[p, q] = unit
                # c enters the first term with a minus sign and the second adjointed
                first = _real_columns(-cf.right_mul(k2, c))
                second = _real_columns(cf.right_mul(k1, c.conj().T))
                columns.append(np.concatenate([first, second]))
    system = np.stack(columns, axis=1)
    target = -np.concatenate([_real_columns(base2), _real_columns(base1)])
    try:
        solution, *_ = scipy.linalg.lstsq(system, target)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Least squares split of the constant did not converge", str(e)) from e
    const = (solution[0::2] + 1j * solution[1::2]).reshape(d, d)

    shifted = analytic - cf.constant(const, phi.grid_size)
    phi2 = cf.riesz_plus(cf.mul(cf.adjoint_fn(theta2.fn), shifted))
    conj_part = cf.adjoint_fn(minus + cf.constant(const, phi.grid_size))
    phi1 = cf.riesz_plus(cf.mul(cf.adjoint_fn(theta1.fn), conj_part))
    rebuilt = cf.adjoint_fn(cf.mul(theta1.fn, phi1)) + cf.mul(theta2.fn, phi2)
    residual = cf.norm(phi - rebuilt)
    logger.debug(f"Zero split: constant norm {matops.operator_norm(const):.3e}, residual {residual:.3e}")
    return SymbolDecomposition(phi1=phi1, phi2=phi2, const_split=const, residual=residual)


def zero_equivalence_check(
    phi: cf.CircleFn,
    b1: ModelSpaceBasis,
    b2: ModelSpaceBasis,
    op_zero_rel: float = OP_ZERO_REL,
    sym_zero_rel: float = SYM_ZERO_REL,
) -> ZeroReport:
    """Compare the operator test A_Phi = 0 with the symbol-class test."""
    phi_norm = cf.norm(phi)
    op_norm = build(b1, b2, phi).norm
    residual = zero_residual(phi, b1.theta, b2.theta).residual
    report = ZeroReport(
        op_norm=op_norm,
        residual=residual,
        phi_norm=phi_norm,
        op_zero=op_norm <= op_zero_rel * phi_norm,
        sym_zero=residual <= sym_zero_rel * phi_norm,
    )
    if not report.consistent:
        logger.warning(
            f"Zero tests disagree: ||A_Phi|| = {op_norm:.3e}, symbol residual = {residual:.3e}, ||Phi|| = {phi_norm:.3e}"
        )
    return report


def symbol_pair(phi: cf.CircleFn, theta1: InnerFn, theta2: InnerFn) -> tuple[cf.CircleFn, cf.CircleFn]:
    """Reduced pair with A_Phi = A_{Psi1 + Psi2*}.

    Psi1 = (I - Pi2) P_+ Phi keeps the constant term and lies in M_{Theta2};
    Psi2 = (I - Pi1) (P_- Phi)* lies in M_{Theta1}.
    """
    psi1 = _complement(theta2, cf.riesz_plus(phi))
    psi2 = _complement(theta1, cf.adjoint_fn(cf.riesz_minus(phi)))
    return psi1, psi2


def membership_pattern(
    psi1: cf.CircleFn, psi2: cf.CircleFn, theta1: InnerFn, theta2: InnerFn
) -> dict[str, float]:
    """Distances of both symbols from both matrix model spaces."""
    return {
        "psi1_in_m1": m_space_defect(theta1, psi1),
        "psi1_in_m2": m_space_defect(theta2, psi1),
        "psi2_in_m1": m_space_defect(theta1, psi2),
        "psi2_in_m2": m_space_defect(theta2, psi2),
    }


def class_shift(
    psi1: cf.CircleFn,
    psi2: cf.CircleFn,
    x: npt.ArrayLike,
    theta1: InnerFn,
    theta2: InnerFn,
    order: ShiftOrder | str = ShiftOrder.KERNEL_LEFT,
) -> tuple[cf.CircleFn, cf.CircleFn]:
    """Move a symbol pair within its class: Psi1 + k0^{Theta2} X and Psi2 minus the matching term."""
    xmat = matops.as_cmat(x)
    k2 = matrix_kernel(theta2, 0.0)
    k1 = matrix_kernel(theta1, 0.0)
    shifted1 = psi1 + cf.right_mul(k2, xmat)
    if ShiftOrder(order) is ShiftOrder.LITERAL:
        return shifted1, psi2 - cf.left_mul(xmat.conj().T, k1)
    return shifted1, psi2 - cf.right_mul(k1, xmat.conj().T)


def combine_pair(psi1: cf.CircleFn, psi2: cf.CircleFn) -> cf.CircleFn:
    """Psi1 + Psi2*."""
    return psi1 + cf.adjoint_fn(psi2)


def _rank_at(b1: ModelSpaceBasis, b2: ModelSpaceBasis, low: int, high: int, rel_tol: float) -> int:
    """Rank of the map z^k E_pq -> A_{z^k E_pq} for ``-low <= k <= high``."""
    m = b1.grid_size
    # products[z, p, q, i, j] = conj(b2_i[z, p]) * b1_j[z, q]
    products = np.einsum("zpi,zqj->zpqij", b2.stack.conj(), b1.stack)
    spectrum = np.fft.fft(products, axis=0) / m
    half = m // 2
    ks = [k for k in range(-low, high + 1) if -half < k < half]
    # entry of A_{z^k E_pq} is coefficient -k of the product
    blocks = spectrum[[(-k) % m for k in ks]]
    columns = blocks.reshape(len(ks) * b2.theta.d * b1.theta.d, b2.dim * b1.dim).T
    return matops.rank(columns, rel_tol)


def tto_space_dim(
    b1: ModelSpaceBasis, b2: ModelSpaceBasis, rel_tol: float = DIM_REL_TOL, guard: int = DIM_GUARD
) -> DimensionReport:
    """Dimension of the space of truncated Toeplitz operators K_{Theta1} -> K_{Theta2}.

    Counts the rank of the symbol-to-matrix map over symbols z^k E_pq with
    ``-(m + guard) <= k <= n + guard`` and again with one more degree on each
    side to confirm saturation.
    """
    d = b1.theta.d
    m, n = b1.dim, b2.dim
    low, high = m + guard, n + guard
    computed = _rank_at(b1, b2, low, high, rel_tol)
    wider = _rank_at(b1, b2, low + 1, high + 1, rel_tol)
    report = DimensionReport(
        computed=computed,
        paper_formula=m**d + n**d - d * d,
        column_formula=d * m + d * n - d * d,
        saturated=computed == wider,
        m=m,
        n=n,
        d=d,
        cutoff=(-low, high),
    )
    if not report.formula_agrees:
        logger.warning(f"Dimension {computed} differs from m^d + n^d - d^2 = {report.paper_formula} (m={m}, n={n}, d={d})")
    return report


def lift_witnesses(
    decomposition: SymbolDecomposition,
    theta1: InnerFn,
    theta2: InnerFn,
    w1: npt.ArrayLike,
    w2: npt.ArrayLike,
) -> LiftedWitnesses:
    """Carry witnesses for the transported symbol back to the original spaces.

    Given ``Psi = (Theta1' Phi1')* + Theta2' Phi2'`` on the transformed spaces,
    rebuilds the original symbol

        Phi = (I - Theta2 W2*) D2^{-1} Psi D1 (I - Theta1 W1*)^{-1}

    and the explicit witnesses

        Phi1 = (I - W1* Theta1)^{-1} D_{W1} Phi1' D2^{-1},
        Phi2 = [(I - W2* Theta2)^{-1} (I - Theta2* W2) D_{W2}^{-1} Phi2'
                - W2* D2^{-1} (Theta1' Phi1')* - W2* D2^{-1} Theta2' Phi2'] D1 (I - Theta1 W1*)^{-1},

    where ``D_i = D_{Wi*}``. The identity ``Phi = (Theta1 Phi1)* + Theta2 Phi2``
    holds pointwise; analyticity of the lifted witnesses is reported, not assumed.
    """
    w1m, w2m = matops.as_cmat(w1), matops.as_cmat(w2)
    prime1, prime2 = crofoot_inner(theta1, w1m), crofoot_inner(theta2, w2m)
    eye = np.eye(theta1.d)
    d1_left, d2_left = matops.defect(w1m, Side.LEFT), matops.defect(w2m, Side.LEFT)
    d2_left_inv = matops.inverse(d2_left)
    d2_right_inv = matops.inverse(matops.defect(w2m, Side.RIGHT))
    d1_right = matops.defect(w1m, Side.RIGHT)
    t1, t2 = theta1.samples, theta2.samples
    t2_adj = np.conj(np.swapaxes(t2, 1, 2))

    first = cf.adjoint_fn(cf.mul(prime1.fn, decomposition.phi1))
    second = cf.mul(prime2.fn, decomposition.phi2)
    psi = first.samples + second.samples
    tail = d1_left @ matops.inverse_stack(eye - t1 @ w1m.conj().T)
    phi = (eye - t2 @ w2m.conj().T) @ d2_left_inv @ psi @ tail

    lifted1 = matops.inverse_stack(eye - w1m.conj().T @ t1) @ d1_right @ decomposition.phi1.samples @ d2_left_inv
    lead = matops.inverse_stack(eye - w2m.conj().T @ t2) @ (eye - t2_adj @ w2m) @ d2_right_inv
    lifted2 = (
        lead @ decomposition.phi2.samples - w2m.conj().T @ d2_left_inv @ first.samples
        - w2m.conj().T @ d2_left_inv @ second.samples
    ) @ tail

    phi_fn, phi1_fn, phi2_fn = cf.CircleFn(phi), cf.CircleFn(lifted1), cf.CircleFn(lifted2)
    rebuilt = cf.adjoint_fn(cf.mul(theta1.fn, phi1_fn)) + cf.mul(theta2.fn, phi2_fn)
    return LiftedWitnesses(
        phi=phi_fn,
        phi1=phi1_fn,
        phi2=phi2_fn,
        residual=cf.norm(phi_fn - rebuilt),
        h2_distance_phi1=cf.h2_distance(phi1_fn),
        h2_distance_phi2=cf.h2_distance(phi2_fn),
    )
