"""Matrix- and vector-valued functions on the unit circle, stored as grid samples.

Sample ``j`` of a function on an ``M``-point grid is its value at
``exp(2*pi*i*j/M)``. Fourier coefficient ``k`` is ``(1/M) sum_j f_j exp(-2*pi*i*j*k/M)``
with ``k`` in ``[-M/2, M/2)``; coefficients are cached on first use.

A function records its Fourier support when it is known exactly (trigonometric
polynomials built from coefficients and their sums and products). Rational
functions such as Blaschke-Potapov products carry ``support=None`` and an
``alias_bound`` estimate instead.
"""

import logging
import math
from collections.abc import Callable, Mapping
from functools import cached_property
from typing import Any

import numpy as np
import numpy.typing as npt

from mskit.exceptions import BadIndexError, DegreeOverflowError, GridError, ShapeMismatchError, ValidationError
from mskit.operators.matops import CMat
from mskit.utils import matrix_from_json, matrix_to_json

logger = logging.getLogger(__name__)

DEFAULT_GRID = 1024
MAX_GRID = 2**16
JSON_COEFF_TOL = 1e-15

Support = tuple[int, int]


def check_grid(m: int) -> int:
    """Validate a grid size: a power of two between 4 and 2^16."""
    if not isinstance(m, int | np.integer) or m < 4 or m > MAX_GRID or (int(m) & (int(m) - 1)) != 0:
        raise GridError(f"Grid size must be a power of two in [4, {MAX_GRID}], got {m}")
    return int(m)


def grid_points(m: int) -> npt.NDArray[np.complex128]:
    """The M equispaced points of the unit circle, starting at 1."""
    check_grid(m)
    return np.exp(2j * np.pi * np.arange(m) / m)


class CircleFn:
    """A function on the unit circle sampled on a uniform grid.

    Instances are immutable: the sample array is read-only and every operation
    returns a new function. The Fourier cache is filled at most once per value;
    concurrent readers computing it simultaneously store identical arrays.
    """

    def __init__(
        self,
        samples: npt.ArrayLike,
        support: Support | None = None,
        alias_bound: float = 0.0,
    ) -> None:
        data = np.array(samples, dtype=np.complex128)
        if data.ndim == 2:
            data = data[:, :, np.newaxis]
        if data.ndim != 3:
            raise ShapeMismatchError(f"Samples must have shape (M, rows, cols), got {data.shape}")
        check_grid(data.shape[0])
        data.flags.writeable = False
        self._samples = data
        self.support = support
        self.alias_bound = float(alias_bound)

    @classmethod
    def _from_coefficient_array(
        cls, coeffs: npt.NDArray[np.complex128], support: Support | None, alias_bound: float = 0.0
    ) -> "CircleFn":
        m = coeffs.shape[0]
        fn = cls(np.fft.ifft(coeffs, axis=0) * m, support=support, alias_bound=alias_bound)
        cached = np.array(coeffs, dtype=np.complex128)
        cached.flags.writeable = False
        fn.__dict__["fourier"] = cached
        return fn

    @property
    def samples(self) -> npt.NDArray[np.complex128]:
        return self._samples

    @property
    def grid_size(self) -> int:
        return int(self._samples.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return int(self._samples.shape[1]), int(self._samples.shape[2])

    @property
    def is_vector(self) -> bool:
        return self.shape[1] == 1

    @cached_property
    def fourier(self) -> npt.NDArray[np.complex128]:
        """Coefficient array in FFT order: entry ``k mod M`` holds coefficient ``k``."""
        coeffs = np.fft.fft(self._samples, axis=0) / self.grid_size
        coeffs.flags.writeable = False
        return coeffs

    def coefficient(self, k: int) -> CMat:
        half = self.grid_size // 2
        if not -half <= k < half:
            raise BadIndexError(f"Fourier index {k} outside [-{half}, {half})")
        return np.array(self.fourier[k % self.grid_size])

    def coefficients(self, tol: float = 0.0) -> dict[int, CMat]:
        """Coefficients whose largest entry exceeds ``tol``, keyed by signed index."""
        half = self.grid_size // 2
        out: dict[int, CMat] = {}
        for k in range(-half, half):
            block = self.fourier[k % self.grid_size]
            if np.max(np.abs(block)) > tol:
                out[k] = np.array(block)
        return out

    def value_at(self, lam: complex) -> CMat:
        """Evaluate the analytic part at an interior point of the disk."""
        if abs(lam) >= 1.0:
            raise BadIndexError(f"Evaluation point {lam} is not inside the unit disk")
        half = self.grid_size // 2
        steps = np.full(half, complex(lam), dtype=np.complex128)
        steps[0] = 1.0
        powers = np.cumprod(steps)
        return np.tensordot(powers, self.fourier[:half], axes=(0, 0))

    def __add__(self, other: "CircleFn") -> "CircleFn":
        return add(self, other)

    def __sub__(self, other: "CircleFn") -> "CircleFn":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "CircleFn":
        return scale(self, -1.0)

    def __mul__(self, alpha: complex) -> "CircleFn":
        return scale(self, alpha)

    __rmul__ = __mul__

    def __matmul__(self, other: Any) -> "CircleFn":
        if isinstance(other, CircleFn):
            return mul(self, other)
        return right_mul(self, np.asarray(other, dtype=np.complex128))

    def __rmatmul__(self, other: Any) -> "CircleFn":
        return left_mul(np.asarray(other, dtype=np.complex128), self)

    def __repr__(self) -> str:
        return f"CircleFn(shape={self.shape}, M={self.grid_size}, support={self.support})"


def _check_same_grid(f: CircleFn, g: CircleFn) -> None:
    if f.grid_size != g.grid_size:
        raise ShapeMismatchError(f"Grid sizes differ: {f.grid_size} vs {g.grid_size}")


def _merge_support(a: Support | None, b: Support | None) -> Support | None:
    if a is None or b is None:
        return None
    return min(a[0], b[0]), max(a[1], b[1])


def _fits(support: Support | None, m: int) -> bool:
    return support is not None and -(m // 2) <= support[0] and support[1] < m // 2


def from_fourier(coeffs: Mapping[int, npt.ArrayLike], m: int = DEFAULT_GRID) -> CircleFn:
    """Build the trigonometric polynomial with the given coefficients."""
    check_grid(m)
    if not coeffs:
        raise ShapeMismatchError("At least one coefficient is required to fix the shape")
    blocks = {int(k): np.atleast_2d(np.asarray(v, dtype=np.complex128)) for k, v in coeffs.items()}
    shapes = {block.shape for block in blocks.values()}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"Coefficient shapes differ: {sorted(shapes)}")
    half = m // 2
    bad = [k for k in blocks if abs(k) >= half]
    if bad:
        raise BadIndexError(f"Fourier indices {sorted(bad)} violate |k| < {half}")
    (rows, cols) = shapes.pop()
    array = np.zeros((m, rows, cols), dtype=np.complex128)
    for k, block in blocks.items():
        array[k % m] = block
    return CircleFn._from_coefficient_array(array, support=(min(blocks), max(blocks)))


def constant(a: npt.ArrayLike, m: int = DEFAULT_GRID) -> CircleFn:
    return from_fourier({0: a}, m)


def monomial_fn(k: int, d: int, m: int = DEFAULT_GRID) -> CircleFn:
    """The function z^k I_d."""
    return from_fourier({k: np.eye(d)}, m)


def from_callable(fn: Callable[[npt.NDArray[np.complex128]], npt.ArrayLike], m: int = DEFAULT_GRID) -> CircleFn:
    """Sample a vectorised function of z, returning shape (M, rows, cols)."""
    return CircleFn(fn(grid_points(m)))


def zeros(rows: int, cols: int, m: int = DEFAULT_GRID) -> CircleFn:
    return from_fourier({0: np.zeros((rows, cols))}, m)


def add(f: CircleFn, g: CircleFn) -> CircleFn:
    _check_same_grid(f, g)
    if f.shape != g.shape:
        raise ShapeMismatchError(f"Cannot add shapes {f.shape} and {g.shape}")
    return CircleFn(
        f.samples + g.samples, support=_merge_support(f.support, g.support), alias_bound=f.alias_bound + g.alias_bound
    )


def scale(f: CircleFn, alpha: complex) -> CircleFn:
    return CircleFn(complex(alpha) * f.samples, support=f.support, alias_bound=abs(alpha) * f.alias_bound)


def mul(f: CircleFn, g: CircleFn, exact: bool = False) -> CircleFn:
    """Pointwise product ``f(z) g(z)``.

    With ``exact=True`` the product must be representable without aliasing:
    both supports must be known and their sum must fit the grid.
    """
    _check_same_grid(f, g)
    if f.shape[1] != g.shape[0]:
        raise ShapeMismatchError(f"Cannot multiply shapes {f.shape} and {g.shape}")
    support: Support | None = None
    if f.support is not None and g.support is not None:
        support = (f.support[0] + g.support[0], f.support[1] + g.support[1])
    if exact and not _fits(support, f.grid_size):
        raise DegreeOverflowError(
            "Product is not exactly representable on the grid",
            f"supports {f.support} and {g.support}, grid {f.grid_size}",
        )
    alias = f.alias_bound + g.alias_bound
    if support is not None and not _fits(support, f.grid_size):
        logger.debug(f"Product support {support} aliases on grid {f.grid_size}")
        support, alias = None, math.inf
    return CircleFn(f.samples @ g.samples, support=support, alias_bound=alias)


def left_mul(a: npt.ArrayLike, f: CircleFn) -> CircleFn:
    """Multiply by a constant matrix on the left."""
    mat = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if mat.shape[1] != f.shape[0]:
        raise ShapeMismatchError(f"Cannot multiply {mat.shape} by function of shape {f.shape}")
    return CircleFn(np.einsum("ij,mjk->mik", mat, f.samples), support=f.support, alias_bound=f.alias_bound)


def right_mul(f: CircleFn, a: npt.ArrayLike) -> CircleFn:
    """Multiply by a constant matrix on the right."""
    mat = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if f.shape[1] != mat.shape[0]:
        raise ShapeMismatchError(f"Cannot multiply function of shape {f.shape} by {mat.shape}")
    return CircleFn(f.samples @ mat, support=f.support, alias_bound=f.alias_bound)


def adjoint_fn(f: CircleFn) -> CircleFn:
    """Pointwise conjugate transpose; coefficient k of the result is (coefficient -k)*."""
    support = None if f.support is None else (-f.support[1], -f.support[0])
    return CircleFn(np.conj(np.swapaxes(f.samples, 1, 2)), support=support, alias_bound=f.alias_bound)


def _masked(f: CircleFn, keep: npt.NDArray[np.bool_], support: Support | None) -> CircleFn:
    coeffs = np.where(keep[:, np.newaxis, np.newaxis], f.fourier, 0.0)
    return CircleFn._from_coefficient_array(coeffs, support=support, alias_bound=f.alias_bound)


def _signed_indices(m: int) -> npt.NDArray[np.int64]:
    return np.fft.fftfreq(m, d=1.0 / m).round().astype(np.int64)


def riesz_plus(f: CircleFn) -> CircleFn:
    """Keep the coefficients with k >= 0 (the constant term included)."""
    support = None
    if f.support is not None:
        support = (max(f.support[0], 0), max(f.support[1], 0))
    return _masked(f, _signed_indices(f.grid_size) >= 0, support)


def riesz_minus(f: CircleFn) -> CircleFn:
    """Keep the coefficients with k < 0, so that riesz_plus(f) + riesz_minus(f) = f."""
    support = None
    if f.support is not None:
        support = (min(f.support[0], 0), min(f.support[1], 0))
    return _masked(f, _signed_indices(f.grid_size) < 0, support)


def strict_plus(f: CircleFn) -> CircleFn:
    """Keep the coefficients with k > 0."""
    support = None
    if f.support is not None:
        support = (max(f.support[0], 0), max(f.support[1], 0))
    return _masked(f, _signed_indices(f.grid_size) > 0, support)


def constant_part(f: CircleFn) -> CircleFn:
    return _masked(f, _signed_indices(f.grid_size) == 0, (0, 0))


def inner_product(f: CircleFn, g: CircleFn) -> complex:
    """L2 inner product ``(1/M) sum_j <f_j, g_j>``, linear in ``f``.

    For matrix-valued functions this is the Hilbert-Schmidt pairing
    ``(1/M) sum_j tr(g_j* f_j)``.
    """
    _check_same_grid(f, g)
    if f.shape != g.shape:
        raise ShapeMismatchError(f"Cannot pair shapes {f.shape} and {g.shape}")
    return complex(np.vdot(g.samples, f.samples) / f.grid_size)


def norm(f: CircleFn) -> float:
    return math.sqrt(max(inner_product(f, f).real, 0.0))


def h2_distance(f: CircleFn) -> float:
    """Distance from H2: the L2 norm of the negative-frequency part."""
    negative = f.fourier[_signed_indices(f.grid_size) < 0]
    return float(np.sqrt(np.sum(np.abs(negative) ** 2)))


def sup_distance(f: CircleFn, g: CircleFn) -> float:
    """Largest operator-norm difference over the grid samples."""
    _check_same_grid(f, g)
    if f.shape != g.shape:
        raise ShapeMismatchError(f"Cannot compare shapes {f.shape} and {g.shape}")
    return float(np.max(np.linalg.norm(f.samples - g.samples, ord=2, axis=(1, 2))))


def to_json(f: CircleFn, tol: float = JSON_COEFF_TOL) -> dict[str, Any]:
    """Serialize as {shape, M, coeffs: [[k, {re, im}], ...]}, dropping coefficients below ``tol``."""
    return {
        "shape": list(f.shape),
        "M": f.grid_size,
        "coeffs": [[k, matrix_to_json(block)] for k, block in sorted(f.coefficients(tol).items())],
    }


def from_json(payload: Mapping[str, Any]) -> CircleFn:
    try:
        rows, cols = (int(v) for v in payload["shape"])
        m = int(payload["M"])
        entries = payload["coeffs"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError("Circle function JSON needs 'shape', 'M' and 'coeffs'", str(e)) from e
    coeffs: dict[int, CMat] = {}
    for index, entry in enumerate(entries):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValidationError(f"coeffs[{index}] must be a [k, matrix] pair")
        coeffs[int(entry[0])] = matrix_from_json(entry[1], where=f"coeffs[{index}]")
    if not coeffs:
        return zeros(rows, cols, m)
    fn = from_fourier(coeffs, m)
    if fn.shape != (rows, cols):
        raise ValidationError(f"Declared shape {(rows, cols)} does not match coefficient shape {fn.shape}")
    return fn
