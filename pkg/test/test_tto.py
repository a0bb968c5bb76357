"""Tests for asymmetric truncated Toeplitz operators."""

import numpy as np
import pytest

from mskit.exceptions import BadShapeError, ShapeMismatchError
from mskit.operators import circle_fun as cf
from mskit.operators import inner, sampling, tto
from mskit.operators.model_space import ModelSpaceBasis, basis

from .conftest import GRID


@pytest.fixture
def monomial_bases() -> tuple[ModelSpaceBasis, ModelSpaceBasis]:
    """Bases of K_{z^3 I} and K_{z^2 I} on C^2."""
    return basis(inner.monomial(3, 2, GRID)), basis(inner.monomial(2, 2, GRID))


class TestBuild:
    """Test cases for building TTO matrices."""

    def test_shape_is_target_by_source(self, basis_bp_d2: ModelSpaceBasis, rng: np.random.Generator) -> None:
        target = basis(inner.monomial(2, 2, GRID))
        matrix = tto.build(basis_bp_d2, target, sampling.random_laurent(rng, 2, 2, GRID))
        assert matrix.shape == (4, 3)

    def test_build_matches_projection(self, basis_bp_d2: ModelSpaceBasis, rng: np.random.Generator) -> None:
        target = basis(inner.monomial(3, 2, GRID))
        phi = sampling.random_laurent(rng, 2, 3, GRID)
        direct = tto.build(basis_bp_d2, target, phi).mat
        projected = tto.build_via_projection(basis_bp_d2, target, phi).mat
        assert np.max(np.abs(direct - projected)) <= 1e-10

    def test_linear_in_the_symbol(self, basis_bp: ModelSpaceBasis, rng: np.random.Generator) -> None:
        phi = sampling.random_laurent(rng, 1, 2, GRID)
        psi = sampling.random_laurent(rng, 1, 2, GRID)
        combined = tto.build(basis_bp, basis_bp, phi + 2.0 * psi).mat
        separate = tto.build(basis_bp, basis_bp, phi).mat + 2.0 * tto.build(basis_bp, basis_bp, psi).mat
        assert np.allclose(combined, separate, atol=1e-12)

    def test_symbol_beyond_the_layout_gives_zero(
        self, monomial_bases: tuple[ModelSpaceBasis, ModelSpaceBasis]
    ) -> None:
        source, target = monomial_bases
        assert tto.build(source, target, cf.monomial_fn(3, 2, GRID)).norm <= 1e-12

    def test_adjoint_pair(self, basis_bp_d2: ModelSpaceBasis, rng: np.random.Generator) -> None:
        target = basis(inner.monomial(2, 2, GRID))
        phi = sampling.random_laurent(rng, 2, 2, GRID)
        assert tto.adjoint_pair_check(basis_bp_d2, target, phi) <= 1e-12

    def test_symbol_shape_mismatch(self, basis_bp_d2: ModelSpaceBasis) -> None:
        with pytest.raises(ShapeMismatchError):
            tto.build(basis_bp_d2, basis_bp_d2, cf.constant([[1.0]], GRID))

    def test_to_json(self, basis_bp: ModelSpaceBasis) -> None:
        matrix = tto.build(basis_bp, basis_bp, cf.constant([[2.0]], GRID))
        payload = matrix.to_json(cf.constant([[2.0]], GRID))
        assert payload["dims"] == [3, 3]
        assert payload["symbol"]["M"] == GRID
        assert payload["theta1"]["type"] == "bp"


class TestBlockToeplitz:
    """Test cases for the block layout of TTOs between monomial spaces."""

    def test_layout_matches_compression(
        self, monomial_bases: tuple[ModelSpaceBasis, ModelSpaceBasis], rng: np.random.Generator
    ) -> None:
        source, target = monomial_bases
        deltas = {s: sampling.random_cmat(rng, 2, 2) for s in range(-1, 3)}
        phi = tto.symbol_from_blocks(deltas, GRID)
        expected = tto.block_toeplitz(3, 2, deltas, 2)
        assert expected.shape == (4, 6)
        assert np.max(np.abs(tto.build(source, target, phi).mat - expected)) <= 1e-12

    def test_blocks_round_trip(self, rng: np.random.Generator) -> None:
        deltas = {s: sampling.random_cmat(rng, 2, 2) for s in range(-1, 3)}
        recovered = tto.blocks_from_symbol(tto.symbol_from_blocks(deltas, GRID), 3, 2)
        assert set(recovered) == set(deltas)
        for s, block in deltas.items():
            assert np.allclose(recovered[s], block)

    def test_layout_places_blocks(self) -> None:
        layout = tto.block_toeplitz(3, 2, {1: [[5.0]], -1: [[7.0]]})
        assert layout.shape == (2, 3)
        assert layout[0, 1] == 5.0
        assert layout[1, 2] == 5.0
        assert layout[1, 0] == 7.0
        assert layout[0, 0] == 0.0

    @pytest.mark.parametrize("n,m,d", [(1, 1, 1), (3, 2, 1), (3, 2, 2), (4, 4, 2), (3, 1, 3)])
    def test_rank_counts_free_blocks(self, n: int, m: int, d: int) -> None:
        assert tto.block_toeplitz_rank(n, m, d) == (n + m - 1) * d * d

    @pytest.mark.parametrize("n,m", [(2, 3), (0, 0), (3, 0)])
    def test_bad_layout(self, n: int, m: int) -> None:
        with pytest.raises(BadShapeError):
            tto.block_toeplitz(n, m, {}, 1)

    def test_block_size_required(self) -> None:
        with pytest.raises(BadShapeError):
            tto.block_toeplitz(2, 1, {})
        with pytest.raises(BadShapeError):
            tto.block_toeplitz(2, 1, {0: np.eye(2), 1: np.eye(3)})
