"""Seeded random draws for test instances.

All draws come from an explicit ``numpy.random.Generator`` so that a run seed
fully determines every instance.
"""

import numpy as np
import scipy.stats

from mskit.operators import circle_fun as cf
from mskit.operators.matops import CMat

CONTRACTION_CAP = 0.8


def random_cmat(rng: np.random.Generator, rows: int, cols: int) -> CMat:
    """Standard complex Gaussian matrix."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_vector(rng: np.random.Generator, d: int) -> CMat:
    return random_cmat(rng, d, 1)


def random_unitary(rng: np.random.Generator, d: int) -> CMat:
    """Haar-distributed unitary matrix."""
    if d == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return np.asarray(scipy.stats.unitary_group.rvs(d, random_state=rng), dtype=np.complex128)


def random_strict_contraction(rng: np.random.Generator, d: int, cap: float = CONTRACTION_CAP) -> CMat:
    """``cap * U diag(s) V*`` with singular values ``s`` uniform in [0, 1)."""
    s = rng.random(d)
    return cap * (random_unitary(rng, d) * s) @ random_unitary(rng, d).conj().T


def contraction_with_norm(rng: np.random.Generator, d: int, norm: float) -> CMat:
    """Random matrix whose operator norm is exactly ``norm``."""
    s = np.sort(rng.random(d))[::-1]
    s[0] = 1.0
    return norm * (random_unitary(rng, d) * s) @ random_unitary(rng, d).conj().T


def random_projection(rng: np.random.Generator, d: int, rank: int) -> CMat:
    u = random_unitary(rng, d)[:, :rank]
    return u @ u.conj().T


def random_bp_factors(
    rng: np.random.Generator, d: int, degree: int, max_radius: float = 0.7, min_radius: float = 0.1
) -> list[tuple[complex, CMat]]:
    """Rank-one Blaschke-Potapov factors whose ranges span the whole space.

    The first ``d`` projections are onto the columns of a random unitary, which
    keeps the product pure; the remaining ``degree - d`` are random. Hence
    ``degree >= d`` is required.
    """
    if degree < d:
        raise ValueError(f"A pure product in dimension {d} needs degree >= {d}, got {degree}")
    basis = random_unitary(rng, d)
    projections = [np.outer(basis[:, i], basis[:, i].conj()) for i in range(d)]
    projections += [random_projection(rng, d, 1) for _ in range(degree - d)]
    order = rng.permutation(degree)
    factors = []
    for index in order:
        radius = min_radius + (max_radius - min_radius) * rng.random()
        angle = 2.0 * np.pi * rng.random()
        factors.append((complex(radius * np.exp(1j * angle)), projections[index]))
    return factors


def random_laurent(
    rng: np.random.Generator, d: int, degree: int, m: int = cf.DEFAULT_GRID, scale: float = 1.0
) -> cf.CircleFn:
    """Matrix Laurent polynomial with coefficients on ``[-degree, degree]``."""
    count = 2 * degree + 1
    coeffs = {k: scale * random_cmat(rng, d, d) / np.sqrt(count) for k in range(-degree, degree + 1)}
    return cf.from_fourier(coeffs, m)


def random_analytic(
    rng: np.random.Generator, rows: int, cols: int, degree: int, m: int = cf.DEFAULT_GRID, scale: float = 1.0
) -> cf.CircleFn:
    """Analytic polynomial with coefficients on ``[0, degree]``."""
    coeffs = {k: scale * random_cmat(rng, rows, cols) / np.sqrt(degree + 1) for k in range(degree + 1)}
    return cf.from_fourier(coeffs, m)
