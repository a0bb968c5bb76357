"""Matrix-valued inner functions: monomials, Blaschke-Potapov products and Crofoot transforms."""

import dataclasses
import logging
from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np
import numpy.typing as npt

from mskit.exceptions import (
    BadDegreeError,
    NotInnerError,
    NotProjectionError,
    NotPureError,
    ShapeMismatchError,
    ValidationError,
    ZeroTooLargeError,
)
from mskit.operators import circle_fun as cf
from mskit.operators import matops
from mskit.operators.matops import COND_MAX, EPS_STRICT, TOL_PSD, CMat, Side
from mskit.operators.sampling import random_bp_factors
from mskit.tolerances import Tolerances
from mskit.utils import complex_from_json, complex_to_json, make_rng, matrix_from_json, matrix_to_json

logger = logging.getLogger(__name__)

TOL_INNER = 1e-8
TOL_PROJECTION = 1e-10
MAX_ZERO = 0.9
CONSTANT_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class InnerFn:
    """A certified inner function: unitary on the grid, analytic and (unless constant) pure."""

    fn: cf.CircleFn
    unitarity_defect: float
    purity: float
    degree_hint: int | None = None
    constant: bool = False
    spec: Mapping[str, Any] | None = dataclasses.field(default=None, compare=False)

    @property
    def d(self) -> int:
        return self.fn.shape[0]

    @property
    def grid_size(self) -> int:
        return self.fn.grid_size

    @property
    def samples(self) -> npt.NDArray[np.complex128]:
        return self.fn.samples

    @property
    def outside_hypotheses(self) -> bool:
        """Constant inner functions fall outside the nonconstant hypothesis of the characterization."""
        return self.constant

    def at_origin(self) -> CMat:
        return self.fn.coefficient(0)

    def value_at(self, lam: complex) -> CMat:
        return self.fn.value_at(lam)


def certify(
    f: cf.CircleFn,
    tol_inner: float = TOL_INNER,
    eps_strict: float = EPS_STRICT,
    degree_hint: int | None = None,
    spec: Mapping[str, Any] | None = None,
) -> InnerFn:
    """Check that ``f`` is analytic, unitary on every grid point and pure.

    Constant unitary functions are accepted and flagged ``constant``.
    """
    rows, cols = f.shape
    if rows != cols:
        raise ShapeMismatchError(f"Inner functions are square-valued, got shape {f.shape}")
    gram = np.conj(np.swapaxes(f.samples, 1, 2)) @ f.samples
    unitarity = float(np.max(matops.norm_stack(gram - np.eye(rows))))
    if unitarity > tol_inner:
        raise NotInnerError(
            "Function is not isometric on the circle", f"max ||F*F - I|| = {unitarity:.3e} > {tol_inner:.1e}"
        )
    anti = cf.h2_distance(f)
    if anti > tol_inner:
        raise NotInnerError("Function is not analytic", f"distance from H2 = {anti:.3e}")
    nonconstant = cf.norm(f - cf.constant_part(f))
    constant = nonconstant <= CONSTANT_TOL
    purity = matops.operator_norm(f.coefficient(0))
    if constant:
        logger.warning("Constant inner function accepted; it lies outside the nonconstant hypotheses")
    elif purity >= 1.0 - eps_strict:
        raise NotPureError("Inner function is not pure", f"||Theta(0)|| = {purity:.12f}")
    logger.debug(f"Certified inner function: defect {unitarity:.2e}, purity {purity:.4f}, degree {degree_hint}")
    return InnerFn(
        fn=f,
        unitarity_defect=unitarity,
        purity=purity,
        degree_hint=degree_hint,
        constant=constant,
        spec=spec,
    )


def monomial(
    n: int, d: int, m: int = cf.DEFAULT_GRID, tol_inner: float = TOL_INNER, eps_strict: float = EPS_STRICT
) -> InnerFn:
    """Theta(z) = z^n I_d."""
    cf.check_grid(m)
    if not 1 <= n < m // 4:
        raise BadDegreeError(f"Monomial degree must satisfy 1 <= n < {m // 4}, got {n}")
    return certify(
        cf.monomial_fn(n, d, m),
        tol_inner=tol_inner,
        eps_strict=eps_strict,
        degree_hint=n * d,
        spec={"type": "monomial", "n": n, "d": d},
    )


def blaschke_factor(w: complex, z: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    """Scalar factor normalised to be nonnegative at the origin."""
    if w == 0:
        return z
    return (abs(w) / w) * (w - z) / (1.0 - np.conj(w) * z)


def _check_projection(p: CMat, d: int, index: int) -> CMat:
    if p.shape != (d, d):
        raise NotProjectionError(f"Factor {index}: projection must be {d}x{d}, got {p.shape}")
    herm = matops.operator_norm(p - p.conj().T)
    idem = matops.operator_norm(p @ p - p)
    if herm > TOL_PROJECTION or idem > TOL_PROJECTION:
        raise NotProjectionError(
            f"Factor {index}: matrix is not an orthogonal projection",
            f"||P - P*|| = {herm:.2e}, ||P^2 - P|| = {idem:.2e}",
        )
    return p


def blaschke_potapov(
    factors: Sequence[tuple[complex, npt.ArrayLike]],
    d: int,
    m: int = cf.DEFAULT_GRID,
    max_zero: float = MAX_ZERO,
    tol_inner: float = TOL_INNER,
    eps_strict: float = EPS_STRICT,
) -> InnerFn:
    """Product of factors ``b_w(z) P + (I - P)`` taken left to right."""
    cf.check_grid(m)
    if not factors:
        raise BadDegreeError("A Blaschke-Potapov product needs at least one factor")
    z = cf.grid_points(m)
    eye = np.eye(d, dtype=np.complex128)
    product = np.broadcast_to(eye, (m, d, d)).copy()
    degree = 0
    alias = 0.0
    spec_factors = []
    for index, (w_raw, p_raw) in enumerate(factors):
        w = complex(w_raw)
        if abs(w) > max_zero:
            raise ZeroTooLargeError(f"Factor {index}: |w| = {abs(w):.4f} exceeds {max_zero}")
        p = _check_projection(np.asarray(p_raw, dtype=np.complex128), d, index)
        b = blaschke_factor(w, z)
        product = product @ (b[:, np.newaxis, np.newaxis] * p + (eye - p))
        degree += matops.rank(p)
        alias += abs(w) ** (m // 2)
        spec_factors.append({"w": complex_to_json(w), "P": matrix_to_json(p)})
    support = (0, len(factors)) if all(complex(w) == 0 for w, _ in factors) else None
    return certify(
        cf.CircleFn(product, support=support, alias_bound=alias),
        tol_inner=tol_inner,
        eps_strict=eps_strict,
        degree_hint=degree,
        spec={"type": "bp", "d": d, "factors": spec_factors},
    )


def random_blaschke_potapov(
    rng: np.random.Generator,
    d: int,
    degree: int,
    m: int = cf.DEFAULT_GRID,
    max_radius: float = 0.7,
    tol_inner: float = TOL_INNER,
    eps_strict: float = EPS_STRICT,
) -> InnerFn:
    """Seeded pure Blaschke-Potapov product of the given degree (at least ``d``)."""
    factors = random_bp_factors(rng, d, degree, max_radius=max_radius)
    return blaschke_potapov(factors, d, m, tol_inner=tol_inner, eps_strict=eps_strict)


def crofoot_inner(
    theta: InnerFn,
    w: npt.ArrayLike,
    eps_strict: float = EPS_STRICT,
    tol_inner: float = TOL_INNER,
    tol_psd: float = TOL_PSD,
    cond_max: float = COND_MAX,
) -> InnerFn:
    """Crofoot-transformed inner function

    Theta'(z) = -W + D_{W*} (I - Theta(z) W*)^{-1} Theta(z) D_W,

    evaluated on every grid point.
    """
    wmat = matops.check_strict_contraction(w, eps_strict)
    if wmat.shape != (theta.d, theta.d):
        raise ShapeMismatchError(f"W must be {theta.d}x{theta.d}, got {wmat.shape}")
    spec = {"type": "crofoot", "base": theta.spec, "W": matrix_to_json(wmat)}
    if not wmat.any():
        return dataclasses.replace(theta, spec=spec)
    d_left = matops.defect(wmat, Side.LEFT, eps_strict, tol_psd)
    d_right = matops.defect(wmat, Side.RIGHT, eps_strict, tol_psd)
    values = theta.samples
    resolvent = np.eye(theta.d) - values @ wmat.conj().T
    transformed = -wmat + d_left @ matops.solve_stack(resolvent, values, cond_max) @ d_right
    try:
        return certify(
            cf.CircleFn(transformed, alias_bound=theta.fn.alias_bound),
            tol_inner=tol_inner,
            eps_strict=eps_strict,
            degree_hint=theta.degree_hint,
            spec=spec,
        )
    except NotInnerError as e:
        raise NotInnerError("Crofoot transform failed certification; the grid may be too coarse", e.details) from e


def purify(theta: InnerFn, eps_strict: float = EPS_STRICT) -> tuple[InnerFn, CMat]:
    """Crofoot transform with W = Theta(0); the result vanishes at the origin."""
    w = theta.at_origin()
    return crofoot_inner(theta, w, eps_strict), w


def crofoot_identity_defect(theta: InnerFn, theta_prime: InnerFn, w: npt.ArrayLike) -> float:
    """max over the grid of ||I + Theta' W* - D_{W*} (I - Theta W*)^{-1} D_{W*}||."""
    wmat = matops.as_cmat(w)
    d_left = matops.defect(wmat, Side.LEFT)
    eye = np.eye(theta.d)
    resolvent = matops.inverse_stack(eye - theta.samples @ wmat.conj().T)
    lhs = eye + theta_prime.samples @ wmat.conj().T
    rhs = d_left @ resolvent @ d_left
    return float(np.max(matops.norm_stack(lhs - rhs)))


def crofoot_inverse_defect(theta: InnerFn, w: npt.ArrayLike) -> float:
    """Grid distance between Theta and the transform of Theta' with parameter -W."""
    wmat = matops.as_cmat(w)
    back = crofoot_inner(crofoot_inner(theta, wmat), -wmat)
    return cf.sup_distance(back.fn, theta.fn)


def inner_from_spec(
    spec: Mapping[str, Any],
    m: int = cf.DEFAULT_GRID,
    max_zero: float = MAX_ZERO,
    tolerances: Tolerances | None = None,
) -> InnerFn:
    """Build an inner function from its JSON description.

    ``tolerances`` supplies the certification thresholds (``tol_inner``,
    ``eps_strict``) and, for Crofoot transforms, ``tol_psd`` and ``cond_max``.
    """
    t = tolerances if tolerances is not None else Tolerances()
    if not isinstance(spec, Mapping) or "type" not in spec:
        raise ValidationError("Inner function spec must be an object with a 'type' member")
    kind = spec["type"]
    try:
        if kind == "monomial":
            return monomial(int(spec["n"]), int(spec["d"]), m, t.tol_inner, t.eps_strict)
        if kind == "bp":
            d = int(spec["d"])
            factors = [
                (
                    complex_from_json(factor["w"], where=f"factors[{i}].w"),
                    matrix_from_json(factor["P"], where=f"factors[{i}].P"),
                )
                for i, factor in enumerate(spec["factors"])
            ]
            return blaschke_potapov(factors, d, m, max_zero=max_zero, tol_inner=t.tol_inner, eps_strict=t.eps_strict)
        if kind == "random_bp":
            rng = make_rng(int(spec["seed"]), "random_bp")
            return random_blaschke_potapov(
                rng, int(spec["d"]), int(spec["degree"]), m, tol_inner=t.tol_inner, eps_strict=t.eps_strict
            )
        if kind == "crofoot":
            base = inner_from_spec(spec["base"], m, max_zero, t)
            w = matrix_from_json(spec["W"], where="W")
            return crofoot_inner(base, w, t.eps_strict, t.tol_inner, t.tol_psd, t.cond_max)
    except (KeyError, TypeError) as e:
        raise ValidationError(f"Inner function spec of type '{kind}' is incomplete", str(e)) from e
    except ValueError as e:
        raise ValidationError(f"Inner function spec of type '{kind}' is invalid", str(e)) from e
    raise ValidationError(f"Unknown inner function type '{kind}'")
