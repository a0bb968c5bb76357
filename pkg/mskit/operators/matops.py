"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function is
pure and returns fresh arrays, so values can be shared between workers.
"""

import logging
from enum import StrEnum

import numpy as np
import numpy.typing as npt
import scipy.linalg

from mskit.exceptions import (
    BadShapeError,
    NoConvergenceError,
    NotHermitianError,
    NotPSDError,
    NotStrictContractionError,
    ShapeMismatchError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

CMat = npt.NDArray[np.complex128]

EPS_STRICT = 1e-6
TOL_PSD = 1e-10
COND_MAX = 1e12
RANK_REL_TOL = 1e-10


class Side(StrEnum):
    """Which defect operator to build for a contraction W."""

    LEFT = "left"  # D_{W*} = (I - W W*)^{1/2}
    RIGHT = "right"  # D_W = (I - W* W)^{1/2}


def as_cmat(a: npt.ArrayLike) -> CMat:
    """Coerce to a nonempty two-dimensional complex array."""
    mat = np.asarray(a, dtype=np.complex128)
    if mat.ndim != 2 or mat.size == 0:
        raise BadShapeError(f"Expected a nonempty matrix, got shape {mat.shape}")
    return mat


def adjoint(a: npt.ArrayLike) -> CMat:
    """Conjugate transpose. Applying it twice returns the input exactly."""
    return as_cmat(a).conj().T.copy()


def identity(d: int) -> CMat:
    return np.eye(d, dtype=np.complex128)


def operator_norm(a: npt.ArrayLike) -> float:
    """Largest singular value."""
    mat = as_cmat(a)
    if not mat.any():
        return 0.0
    return float(singular_values(mat)[0])


def singular_values(a: npt.ArrayLike) -> npt.NDArray[np.float64]:
    try:
        return scipy.linalg.svdvals(as_cmat(a))
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Singular value decomposition did not converge", str(e)) from e


def rank(a: npt.ArrayLike, rel_tol: float = RANK_REL_TOL) -> int:
    """Number of singular values above ``rel_tol * sigma_max``; 0 for the zero matrix."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def hermitian_defect(a: npt.ArrayLike) -> float:
    mat = as_cmat(a)
    return operator_norm(mat - mat.conj().T)


def hermitian_sqrt(a: npt.ArrayLike, tol_psd: float = TOL_PSD) -> CMat:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-tol_psd, 0)`` are clamped to zero.
    """
    mat = as_cmat(a)
    if mat.shape[0] != mat.shape[1]:
        raise BadShapeError(f"Square matrix required, got shape {mat.shape}")
    skew = hermitian_defect(mat)
    if skew > tol_psd:
        raise NotHermitianError("Matrix is not Hermitian", f"||A - A*|| = {skew:.3e} > {tol_psd:.1e}")
    herm = 0.5 * (mat + mat.conj().T)
    try:
        eigvals, eigvecs = scipy.linalg.eigh(herm)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Hermitian eigendecomposition did not converge", str(e)) from e
    if eigvals[0] < -tol_psd:
        raise NotPSDError("Matrix is not positive semidefinite", f"smallest eigenvalue {eigvals[0]:.3e}")
    roots = np.sqrt(np.clip(eigvals, 0.0, None))
    root = (eigvecs * roots) @ eigvecs.conj().T
    return 0.5 * (root + root.conj().T)


def check_strict_contraction(w: npt.ArrayLike, eps_strict: float = EPS_STRICT) -> CMat:
    mat = as_cmat(w)
    norm = operator_norm(mat)
    if norm >= 1.0 - eps_strict:
        raise NotStrictContractionError(
            "Operator is not a strict contraction", f"||W|| = {norm:.12f} >= 1 - {eps_strict:.1e}"
        )
    return mat


def defect(
    w: npt.ArrayLike, side: Side | str = Side.RIGHT, eps_strict: float = EPS_STRICT, tol_psd: float = TOL_PSD
) -> CMat:
    """Defect operator of a strict contraction.

    ``right`` gives D_W = (I - W*W)^{1/2}, ``left`` gives D_{W*} = (I - WW*)^{1/2}.
    """
    mat = check_strict_contraction(w, eps_strict)
    if mat.shape[0] != mat.shape[1]:
        raise BadShapeError(f"Square matrix required, got shape {mat.shape}")
    eye = identity(mat.shape[0])
    if Side(side) is Side.RIGHT:
        gram = eye - mat.conj().T @ mat
    else:
        gram = eye - mat @ mat.conj().T
    return hermitian_sqrt(gram, tol_psd)


def solve(a: npt.ArrayLike, b: npt.ArrayLike, cond_max: float = COND_MAX) -> CMat:
    """Solve ``A X = B`` for square, well-conditioned ``A``."""
    mat = as_cmat(a)
    rhs = as_cmat(b)
    if mat.shape[0] != mat.shape[1]:
        raise BadShapeError(f"Square matrix required, got shape {mat.shape}")
    if rhs.shape[0] != mat.shape[0]:
        raise ShapeMismatchError(f"Cannot solve {mat.shape} system with right-hand side {rhs.shape}")
    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > cond_max:
        raise SingularMatrixError("Matrix is singular to working precision", f"condition number {cond:.3e}")
    try:
        return scipy.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularMatrixError("Matrix is singular", str(e)) from e


def inverse(a: npt.ArrayLike, cond_max: float = COND_MAX) -> CMat:
    mat = as_cmat(a)
    return solve(mat, identity(mat.shape[0]), cond_max)


def solve_stack(a: npt.ArrayLike, b: npt.ArrayLike, cond_max: float = COND_MAX) -> npt.NDArray[np.complex128]:
    """Batched ``solve`` over a leading axis of grid samples."""
    mats = np.asarray(a, dtype=np.complex128)
    rhs = np.asarray(b, dtype=np.complex128)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise BadShapeError(f"Expected a stack of square matrices, got shape {mats.shape}")
    if rhs.ndim != 3 or rhs.shape[0] != mats.shape[0] or rhs.shape[1] != mats.shape[1]:
        raise ShapeMismatchError(f"Cannot solve stack {mats.shape} with right-hand side {rhs.shape}")
    try:
        cond = np.linalg.cond(mats)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Condition estimate did not converge", str(e)) from e
    worst = float(np.max(cond))
    if not np.isfinite(worst) or worst > cond_max:
        raise SingularMatrixError(
            "Matrix function is singular on the grid", f"worst condition number {worst:.3e} at sample {int(np.argmax(cond))}"
        )
    try:
        return np.linalg.solve(mats, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularMatrixError("Matrix function is singular on the grid", str(e)) from e


def inverse_stack(a: npt.ArrayLike, cond_max: float = COND_MAX) -> npt.NDArray[np.complex128]:
    mats = np.asarray(a, dtype=np.complex128)
    eye = np.broadcast_to(np.eye(mats.shape[-1], dtype=np.complex128), mats.shape)
    return solve_stack(mats, eye, cond_max)


def norm_stack(a: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Operator norm of every matrix in a stack."""
    mats = np.asarray(a, dtype=np.complex128)
    try:
        return np.linalg.norm(mats, ord=2, axis=(-2, -1))
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Singular value decomposition did not converge", str(e)) from e
