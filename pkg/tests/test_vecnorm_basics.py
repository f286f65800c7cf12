import math

import numpy as np
import pytest

from nclp.errors import InvalidInputError, NumericalDegeneracyError
from nclp.schatten import polar_decompose, support_projection, trace_pairing
from nclp.vecnorm import (VecElem, diagonal_closed_form, min_tensor_col_norm,
                          min_tensor_row_norm, opposite_transform, pairing,
                          project_diagonal, row_stack_factorize)

from conftest import random_complex


def unit(k, i, j):
    m = np.zeros((k, k), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def witness(k):
    return VecElem(np.stack([unit(k, n, 0) for n in range(k)]))


class TestVecElem:
    def test_shape_validation(self):
        with pytest.raises(InvalidInputError):
            VecElem(np.zeros((2, 2, 3)))
        with pytest.raises(InvalidInputError):
            VecElem(np.full((1, 2, 2), np.inf))

    def test_diagonal_layout(self):
        y = VecElem.diagonal([2.0, 3.0])
        assert y.coords[0][0, 0] == 2.0
        assert y.coords[1][1, 1] == 3.0
        assert y.is_diagonal()

    def test_basis_triple_indexing(self):
        # e_i (x) e_j (x) e_m lands in coordinate j at entry (i, m)
        y = VecElem.basis_triple(3, 0, 1, 2)
        assert y.coords[1][0, 2] == 1.0
        assert np.count_nonzero(y.coords) == 1

    def test_arithmetic(self, rng):
        a = VecElem(random_complex(rng, 2, 3, 3))
        b = VecElem(random_complex(rng, 2, 3, 3))
        assert np.allclose((a + b).coords, a.coords + b.coords)
        assert np.allclose((a - b).coords, a.coords - b.coords)
        assert np.allclose(a.scaled(2.5).coords, 2.5 * a.coords)


class TestMinTensorNorms:
    def test_single_unit(self):
        assert min_tensor_row_norm(VecElem(unit(2, 0, 0)[None])) == pytest.approx(1.0)

    def test_row_of_units(self):
        for n in (2, 4):
            z = VecElem(np.stack([unit(n, 0, m) for m in range(n)]))
            assert min_tensor_row_norm(z) == pytest.approx(math.sqrt(n), abs=1e-12)

    def test_column_of_units(self):
        for k in (2, 4):
            z = witness(k)
            assert min_tensor_row_norm(z) == pytest.approx(1.0, abs=1e-12)
            assert min_tensor_col_norm(z) == pytest.approx(math.sqrt(k), abs=1e-12)


class TestPairing:
    def test_witness_against_transposed_units(self):
        k = 4
        y2 = VecElem(np.stack([unit(k, 0, n) for n in range(k)]))
        assert pairing(witness(k), y2) == pytest.approx(k)

    def test_zero(self):
        y = witness(3)
        assert pairing(y, VecElem.zeros(3, 3)) == 0

    def test_coordinatewise_oracle(self, rng):
        y = VecElem(random_complex(rng, 3, 2, 2))
        y2 = VecElem(random_complex(rng, 3, 2, 2))
        want = sum(trace_pairing(y.coords[n], y2.coords[n]) for n in range(3))
        assert pairing(y, y2) == pytest.approx(want, abs=1e-13)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            pairing(witness(2), witness(3))


class TestProjectDiagonal:
    def test_idempotent_on_range(self, rng):
        y = VecElem.diagonal(random_complex(rng, 3))
        assert np.allclose(project_diagonal(y).coords, y.coords)

    def test_kills_off_diagonal_basis(self):
        y = VecElem.basis_triple(3, 0, 1, 0)  # e_1 (x) e_2 (x) e_1
        assert not np.any(project_diagonal(y).coords)

    def test_witness_projects_to_first_diagonal(self):
        k = 4
        got = project_diagonal(witness(k))
        want = np.zeros((k, k, k), dtype=complex)
        want[0, 0, 0] = 1.0
        assert np.allclose(got.coords, want)

    def test_idempotent(self, rng):
        y = VecElem(random_complex(rng, 3, 3, 3))
        once = project_diagonal(y)
        assert np.allclose(project_diagonal(once).coords, once.coords)

    def test_requires_square(self):
        with pytest.raises(InvalidInputError):
            project_diagonal(VecElem.zeros(2, 3))


class TestDiagonalClosedForm:
    def test_unit_vector(self):
        assert diagonal_closed_form([1.0, 0.0, 0.0], 2.5) == pytest.approx(1.0)

    @pytest.mark.parametrize("k", [1, 3, 6])
    @pytest.mark.parametrize("p", [1.5, 3.0])
    def test_all_ones(self, k, p):
        assert diagonal_closed_form([1.0] * k, p) == pytest.approx(
            k ** (1.0 / p), rel=1e-14)

    def test_scalar_arithmetic(self, rng):
        lams = random_complex(rng, 5)
        p = 2.7
        want = float(np.sum(np.abs(lams) ** p)) ** (1 / p)
        assert diagonal_closed_form(lams, p) == pytest.approx(want, rel=1e-13)


class TestRowStackFactorize:
    def test_single_invertible(self, rng):
        d1 = random_complex(rng, 3, 3) + 2 * np.eye(3)
        d, ws = row_stack_factorize([d1], 2.0)
        parts = polar_decompose(d1)
        assert np.allclose(d, parts.modulus, atol=1e-10)
        assert np.allclose(ws[0], parts.partial_isometry, atol=1e-8)

    def test_scalar_line(self):
        lams = [3.0, 4.0]
        mats = [lam * unit(2, 0, 0) for lam in lams]
        d, ws = row_stack_factorize(mats, 2.0)
        assert np.allclose(d, 5.0 * unit(2, 0, 0), atol=1e-12)
        for lam, w in zip(lams, ws):
            assert np.allclose(w, (lam / 5.0) * unit(2, 0, 0), atol=1e-12)

    def test_random_residuals(self, rng):
        mats = [random_complex(rng, 3, 3) for _ in range(4)]
        d, ws = row_stack_factorize(mats, 3.0)
        gram = sum(m.conj().T @ m for m in mats)
        assert np.allclose(d @ d, gram, atol=1e-10)
        q = support_projection(gram)
        for m, w in zip(mats, ws):
            assert np.linalg.norm(w @ d - m) < 1e-10
            assert np.linalg.norm(w @ q - w) < 1e-10
        assert np.allclose(sum(w.conj().T @ w for w in ws), q, atol=1e-10)

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            row_stack_factorize([], 2.0)

    def test_degenerate_reported(self, rng):
        # rtol = 0 leaves no allowance for rounding, so the checks must trip
        mats = [random_complex(rng, 3, 3) for _ in range(2)]
        with pytest.raises(NumericalDegeneracyError):
            row_stack_factorize(mats, 2.0, rtol=0.0)


class TestOppositeTransform:
    def test_symmetric_fixed_point(self, rng):
        g = random_complex(rng, 2, 3, 3)
        sym = VecElem(g + np.transpose(g, (0, 2, 1)))
        assert np.allclose(opposite_transform(sym).coords, sym.coords)

    def test_matrix_units(self):
        k = 3
        got = opposite_transform(witness(k))
        want = np.stack([unit(k, 0, n) for n in range(k)])
        assert np.allclose(got.coords, want)

    def test_involution(self, rng):
        y = VecElem(random_complex(rng, 2, 3, 3))
        assert np.allclose(opposite_transform(opposite_transform(y)).coords,
                           y.coords)
