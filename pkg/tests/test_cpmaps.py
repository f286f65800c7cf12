import numpy as np
import pytest

from nclp.cpmaps import (KrausMap, adjoint_map, amplify_apply, apply,
                         build_counterexample_maps, choi, choi_min_eigenvalue,
                         compose, is_completely_positive,
                         sampled_contraction_ratio)
from nclp.errors import InvalidInputError
from nclp.schatten import trace_pairing
from nclp.vecnorm import VecElem

from conftest import random_complex


def unit(k, i, j):
    m = np.zeros((k, k), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def witness(k):
    return VecElem(np.stack([unit(k, n, 0) for n in range(k)]))


def transpose_map(k):
    return KrausMap.from_terms(
        [(unit(k, j, i), unit(k, i, j)) for i in range(k) for j in range(k)])


class TestApply:
    def test_identity(self, rng):
        x = random_complex(rng, 3, 3)
        assert np.allclose(apply(KrausMap.identity(3), x), x)

    def test_corner_map_u4(self, rng):
        k, p = 4, 3.0
        *_, u4, _ = build_counterexample_maps(k, p)
        x = random_complex(rng, k, k)
        assert np.allclose(apply(u4, x), k ** (-1 / p) * x[0, 0] * np.eye(k),
                           atol=1e-14)

    def test_diagonal_map_u3(self, rng):
        k = 4
        _, _, u3, _, _ = build_counterexample_maps(k, 3.0)
        x = random_complex(rng, k, k)
        assert np.allclose(apply(u3, x), np.diag(np.diag(x)), atol=1e-14)

    def test_shape_mismatch(self, rng):
        with pytest.raises(InvalidInputError):
            apply(KrausMap.identity(3), random_complex(rng, 2, 2))

    def test_linearity(self, rng):
        m = KrausMap.from_terms([(random_complex(rng, 3, 3),
                                  random_complex(rng, 3, 3))
                                 for _ in range(2)])
        x, y = random_complex(rng, 3, 3), random_complex(rng, 3, 3)
        a, b = 1.3 - 0.2j, -0.7j
        assert np.allclose(apply(m, a * x + b * y),
                           a * apply(m, x) + b * apply(m, y), atol=1e-12)


class TestChoi:
    def test_identity_is_psd_rank_one_gram(self):
        c = choi(KrausMap.identity(3))
        want = sum(np.kron(unit(3, i, j), unit(3, i, j))
                   for i in range(3) for j in range(3))
        assert np.allclose(c, want)
        assert is_completely_positive(KrausMap.identity(3))

    def test_transpose_not_cp(self):
        t = transpose_map(3)
        assert choi_min_eigenvalue(t) == pytest.approx(-1.0, abs=1e-12)
        assert not is_completely_positive(t)

    @pytest.mark.parametrize("p", [2.5, 3.0, 4.0])
    def test_average_map_is_cp(self, p):
        *_, u = build_counterexample_maps(4, p)
        assert is_completely_positive(u)
        assert choi_min_eigenvalue(u) >= -1e-12

    def test_matched_terms_always_cp(self, rng):
        mats = [random_complex(rng, 3, 3) for _ in range(3)]
        m = KrausMap.from_terms([(a, a) for a in mats])
        assert is_completely_positive(m)

    def test_non_star_preserving_rejected(self, rng):
        m = KrausMap.from_terms([(np.eye(2), 1j * np.eye(2))])
        assert not is_completely_positive(m)


class TestAdjoint:
    def test_identity(self, rng):
        x = random_complex(rng, 3, 3)
        assert np.allclose(apply(adjoint_map(KrausMap.identity(3)), x), x)

    def test_pairing_identity(self, rng):
        m = KrausMap.from_terms([(random_complex(rng, 3, 3),
                                  random_complex(rng, 3, 3))])
        madj = adjoint_map(m)
        for _ in range(5):
            x, y = random_complex(rng, 3, 3), random_complex(rng, 3, 3)
            assert trace_pairing(apply(m, x), y) == pytest.approx(
                trace_pairing(x, apply(madj, y)), abs=1e-12)

    def test_diagonal_projection_self_adjoint(self, rng):
        _, _, u3, _, _ = build_counterexample_maps(3, 3.0)
        x = random_complex(rng, 3, 3)
        assert np.allclose(apply(adjoint_map(u3), x), apply(u3, x), atol=1e-14)

    def test_involution(self, rng):
        m = KrausMap.from_terms([(random_complex(rng, 3, 3),
                                  random_complex(rng, 3, 3))
                                 for _ in range(2)])
        mm = adjoint_map(adjoint_map(m))
        x = random_complex(rng, 3, 3)
        assert np.allclose(apply(mm, x), apply(m, x), atol=1e-12)


class TestSectionFiveMaps:
    @pytest.mark.parametrize("k", [1, 3, 5])
    @pytest.mark.parametrize("p", [2.5, 3.0])
    def test_average_consistency(self, rng, k, p):
        u1, u2, u3, u4, u = build_counterexample_maps(k, p)
        x = random_complex(rng, k, k)
        avg = (apply(u1, x) + apply(u2, x) + apply(u3, x) + apply(u4, x)) / 4
        scale = max(np.abs(avg).max(), 1e-300)
        assert np.abs(apply(u, x) - avg).max() / scale < 1e-14

    def test_u1_structure(self):
        k, p = 4, 3.0
        u1, *_ = build_counterexample_maps(k, p)
        for i in range(k):
            img = apply(u1, unit(k, i, 0))
            assert np.allclose(img, k ** (-1 / (2 * p)) * unit(k, i, i),
                               atol=1e-15)
        for j in range(1, k):
            assert not np.any(apply(u1, unit(k, 0, j)))

    def test_u_on_corner_unit(self):
        k, p = 5, 3.0
        *_, u = build_counterexample_maps(k, p)
        want = 0.25 * ((2 * k ** (-1 / (2 * p)) + 1) * unit(k, 0, 0)
                       + k ** (-1 / p) * np.eye(k))
        assert np.allclose(apply(u, unit(k, 0, 0)), want, atol=1e-15)


class TestAmplify:
    def test_identity(self, rng):
        y = VecElem(random_complex(rng, 2, 3, 3))
        assert np.allclose(amplify_apply(KrausMap.identity(3), y).coords,
                           y.coords)

    def test_diagonal_projection_image(self):
        k = 4
        _, _, u3, _, _ = build_counterexample_maps(k, 3.0)
        img = amplify_apply(u3, witness(k))
        want = np.zeros((k, k, k), dtype=complex)
        want[0, 0, 0] = 1.0
        assert np.allclose(img.coords, want)

    def test_scaled_shift_image(self):
        k, p = 4, 3.0
        u1, *_ = build_counterexample_maps(k, p)
        img = amplify_apply(u1, witness(k))
        want = np.zeros((k, k, k), dtype=complex)
        for i in range(k):
            want[i, i, i] = k ** (-1 / (2 * p))
        assert np.allclose(img.coords, want)

    def test_size_mismatch(self, rng):
        with pytest.raises(InvalidInputError):
            amplify_apply(KrausMap.identity(2), VecElem(random_complex(rng, 2, 3, 3)))


class TestContractionRatio:
    def test_identity_is_one(self):
        assert sampled_contraction_ratio(KrausMap.identity(3), 3.0, 50) == \
            pytest.approx(1.0, abs=1e-12)

    def test_homogeneity(self):
        s = np.sqrt(2.0) * np.eye(3)
        doubled = KrausMap.from_terms([(s, s)])
        assert sampled_contraction_ratio(doubled, 3.0, 50) == \
            pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("which", [2, 3])
    def test_corner_maps_attain_one(self, which):
        k, p = 4, 3.0
        maps = build_counterexample_maps(k, p)
        ratio = sampled_contraction_ratio(maps[which], p, 200,
                                          probes=[unit(k, 0, 0)])
        assert ratio == pytest.approx(1.0, abs=1e-9)

    def test_average_map_contraction(self):
        k, p = 4, 3.0
        *_, u = build_counterexample_maps(k, p)
        assert sampled_contraction_ratio(u, p, 500) <= 1.0 + 1e-9

    def test_trials_validated(self):
        with pytest.raises(InvalidInputError):
            sampled_contraction_ratio(KrausMap.identity(2), 3.0, 0)


def test_compose_matches_sequential(rng):
    m1 = KrausMap.from_terms([(random_complex(rng, 3, 3),
                               random_complex(rng, 3, 3))])
    m2 = KrausMap.from_terms([(random_complex(rng, 3, 3),
                               random_complex(rng, 3, 3))
                              for _ in range(2)])
    x = random_complex(rng, 3, 3)
    assert np.allclose(apply(compose(m2, m1), x), apply(m2, apply(m1, x)),
                       atol=1e-12)
