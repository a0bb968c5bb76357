"""Model spaces K_Theta: projection, reproducing kernels and orthonormal bases.

A basis is stored as one sample array of shape ``(M, d, N)``; column ``i`` is
the ``i``-th orthonormal element of ``K_Theta`` sampled on the grid.
"""

import dataclasses
import logging
import math

import numpy as np
import numpy.typing as npt

from mskit.exceptions import (
    DeficientSpanError,
    InfiniteDimensionalError,
    NoConvergenceError,
    NotAnalyticError,
    PointTooCloseError,
    ShapeMismatchError,
)
from mskit.operators import circle_fun as cf
from mskit.operators import matops
from mskit.operators.inner import InnerFn

logger = logging.getLogger(__name__)

MAX_POINT = 0.9
SEED_RADIUS = 0.6
SEED_EXTRA = 4
ANALYTIC_TOL = 1e-8
MEMBERSHIP_TOL = 1e-8
GRAM_TOL = 1e-9
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclasses.dataclass(frozen=True)
class ModelSpaceBasis:
    """Orthonormal basis of K_Theta."""

    theta: InnerFn
    stack: npt.NDArray[np.complex128]
    gram_defect: float
    membership_defect: float
    method: str

    @property
    def dim(self) -> int:
        return int(self.stack.shape[2])

    @property
    def grid_size(self) -> int:
        return int(self.stack.shape[0])

    @property
    def basis(self) -> tuple[cf.CircleFn, ...]:
        return tuple(cf.CircleFn(self.stack[:, :, i : i + 1]) for i in range(self.dim))

    def coords(self, f: cf.CircleFn) -> npt.NDArray[np.complex128]:
        """Coordinates ``<f, b_i>`` of a vector-valued function."""
        if f.shape != (self.theta.d, 1) or f.grid_size != self.grid_size:
            raise ShapeMismatchError(f"Cannot take coordinates of {f!r} in a basis of K_Theta with d={self.theta.d}")
        return np.einsum("mdi,md->i", self.stack.conj(), f.samples[:, :, 0]) / self.grid_size

    def synthesize(self, coords: npt.ArrayLike) -> cf.CircleFn:
        vector = np.asarray(coords, dtype=np.complex128).reshape(self.dim)
        return cf.CircleFn(self.stack @ vector)

    def as_function(self) -> cf.CircleFn:
        """The whole basis as one ``d x N`` matrix-valued function."""
        return cf.CircleFn(self.stack)


def theta_part(theta: InnerFn, f: cf.CircleFn) -> cf.CircleFn:
    """Orthogonal projection of an analytic function onto Theta H2: Theta P_+(Theta* f)."""
    return cf.mul(theta.fn, cf.riesz_plus(cf.mul(cf.adjoint_fn(theta.fn), f)))


def project(theta: InnerFn, f: cf.CircleFn, analytic_tol: float = ANALYTIC_TOL) -> cf.CircleFn:
    """P_Theta f = f - Theta P_+(Theta* f) for analytic ``f``.

    Works column by column, so matrix-valued ``f`` is projected onto the
    matrix analogue of the model space.
    """
    if f.shape[0] != theta.d:
        raise ShapeMismatchError(f"Cannot project {f!r} with an inner function of size {theta.d}")
    off = cf.h2_distance(f)
    if off > analytic_tol * max(1.0, cf.norm(f)):
        raise NotAnalyticError("Projection needs an analytic function; apply riesz_plus first", f"H2 distance {off:.3e}")
    return f - theta_part(theta, f)


def _check_point(lam: complex) -> complex:
    lam = complex(lam)
    if abs(lam) > MAX_POINT:
        raise PointTooCloseError(f"|lambda| = {abs(lam):.4f} exceeds {MAX_POINT}")
    return lam


def matrix_kernel(theta: InnerFn, lam: complex) -> cf.CircleFn:
    """(I - Theta(z) Theta(lam)*) / (1 - conj(lam) z)."""
    lam = _check_point(lam)
    z = cf.grid_points(theta.grid_size)
    at_lam = theta.value_at(lam)
    numerator = np.eye(theta.d) - theta.samples @ at_lam.conj().T
    return cf.CircleFn(numerator / (1.0 - np.conj(lam) * z)[:, np.newaxis, np.newaxis])


def kernel(theta: InnerFn, lam: complex, x: npt.ArrayLike) -> cf.CircleFn:
    """Reproducing kernel k_lam x of K_Theta."""
    vector = np.asarray(x, dtype=np.complex128).reshape(-1, 1)
    if vector.shape[0] != theta.d:
        raise ShapeMismatchError(f"Kernel direction must have length {theta.d}, got {vector.shape[0]}")
    return cf.right_mul(matrix_kernel(theta, lam), vector)


def reproduction_defect(theta: InnerFn, f: cf.CircleFn, lam: complex, x: npt.ArrayLike) -> float:
    """|<f, k_lam x> - <f(lam), x>| for ``f`` in K_Theta."""
    vector = np.asarray(x, dtype=np.complex128).reshape(-1)
    lhs = cf.inner_product(f, kernel(theta, lam, vector))
    rhs = complex(np.vdot(vector, f.value_at(lam)[:, 0]))
    return abs(lhs - rhs)


def seed_points(count: int) -> npt.NDArray[np.complex128]:
    """Deterministic golden-angle spiral of ``count`` points inside |lam| <= 0.6."""
    index = np.arange(count)
    radius = SEED_RADIUS * np.sqrt((index + 0.5) / count)
    return radius * np.exp(1j * GOLDEN_ANGLE * index)


def _is_monomial(theta: InnerFn) -> bool:
    return bool(theta.spec) and theta.spec.get("type") == "monomial"  # type: ignore[union-attr]


def _monomial_stack(theta: InnerFn) -> npt.NDArray[np.complex128]:
    d = theta.d
    n = int(theta.spec["n"])  # type: ignore[index]
    z = cf.grid_points(theta.grid_size)
    stack = np.zeros((theta.grid_size, d, n * d), dtype=np.complex128)
    for j in range(n):
        power = z**j
        for i in range(d):
            stack[:, i, j * d + i] = power
    return stack


def _kernel_span_stack(theta: InnerFn, count: int, rel_tol: float) -> npt.NDArray[np.complex128]:
    m, d = theta.grid_size, theta.d
    columns = [matrix_kernel(theta, lam).samples for lam in seed_points(count)]
    spanning = np.concatenate(columns, axis=2).reshape(m * d, count * d) / math.sqrt(m)
    try:
        u, s, _ = np.linalg.svd(spanning, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError("Kernel span decomposition did not converge", str(e)) from e
    rank = int(np.count_nonzero(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
    logger.debug(f"Kernel span: {count} points, singular values down to {s[min(rank, s.size) - 1]:.2e}, rank {rank}")
    return (u[:, :rank] * math.sqrt(m)).reshape(m, d, rank)


def membership_defects(theta: InnerFn, stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    """L2 norm of ``b - P_Theta b`` for every column of a sample stack."""
    outside = theta_part(theta, cf.CircleFn(stack))
    return np.sqrt(np.sum(np.abs(outside.samples) ** 2, axis=(0, 1)) / stack.shape[0])


def basis(
    theta: InnerFn,
    seeds: int | None = None,
    rel_tol: float = matops.RANK_REL_TOL,
    gram_tol: float = GRAM_TOL,
    membership_tol: float = MEMBERSHIP_TOL,
) -> ModelSpaceBasis:
    """Orthonormal basis of K_Theta.

    Monomials ``z^n I`` use the basis ``z^j e_i`` ordered by power first.
    Everything else spans kernels at ``seeds`` spiral points (default
    ``degree + 4``) and orthonormalizes them.
    """
    if theta.degree_hint is None:
        raise InfiniteDimensionalError("Model space dimension is unknown; a finite degree is required")
    expected = theta.degree_hint
    if _is_monomial(theta):
        stack, method = _monomial_stack(theta), "monomial"
    else:
        count = seeds if seeds is not None else expected + SEED_EXTRA
        if count < expected:
            raise DeficientSpanError(f"{count} seed points cannot span a space of dimension {expected}")
        stack, method = _kernel_span_stack(theta, count, rel_tol), "kernel_span"
        if stack.shape[2] != expected:
            raise DeficientSpanError(
                f"Kernel span has dimension {stack.shape[2]}, expected {expected}", "increase the number of seed points"
            )
    gram = np.einsum("mdi,mdj->ij", stack.conj(), stack) / theta.grid_size
    gram_defect = matops.operator_norm(gram - np.eye(stack.shape[2])) if stack.shape[2] else 0.0
    membership = float(np.max(membership_defects(theta, stack))) if stack.shape[2] else 0.0
    if gram_defect > gram_tol:
        raise DeficientSpanError("Basis is not orthonormal", f"||Gram - I|| = {gram_defect:.3e}")
    if membership > membership_tol:
        raise DeficientSpanError("Basis leaves the model space", f"max ||b - P b|| = {membership:.3e}")
    stack.flags.writeable = False
    logger.debug(f"Basis of K_Theta: dim {stack.shape[2]} via {method}, Gram defect {gram_defect:.2e}")
    return ModelSpaceBasis(
        theta=theta, stack=stack, gram_defect=gram_defect, membership_defect=membership, method=method
    )


def inclusion_defect(theta1: InnerFn, theta2: InnerFn, basis1: ModelSpaceBasis | None = None) -> float:
    """max over orthonormal b in K_{Theta1} of ||b - Theta2 P_+(Theta2* b)||.

    This is the distance of K_{Theta1} from Theta2 H2; zero when the
    inclusion K_{Theta1} in Theta2 H2 holds, which forces both functions
    to have no zero in the disk.
    """
    if theta1.d != theta2.d:
        raise ShapeMismatchError(f"Inner functions have sizes {theta1.d} and {theta2.d}")
    b1 = basis1 if basis1 is not None else basis(theta1)
    if b1.dim == 0:
        return 0.0
    inside = theta_part(theta2, cf.CircleFn(b1.stack))
    residual = b1.stack - inside.samples
    return float(np.max(np.sqrt(np.sum(np.abs(residual) ** 2, axis=(0, 1)) / b1.grid_size)))


def m_space_defect(theta: InnerFn, f: cf.CircleFn) -> float:
    """Distance of a matrix-valued function from M_Theta = H2 minus Theta H2."""
    analytic = cf.riesz_plus(f)
    off = cf.h2_distance(f)
    inside = cf.norm(theta_part(theta, analytic))
    return math.hypot(off, inside)
