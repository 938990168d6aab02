import numpy as np
import pytest

from aadual import algebra
from aadual.errors import NonInvertible, NotHermitian, Singular
from aadual.rng import SplitMix64


def rand_complex(rng, m):
    return np.array([[rng.complex_normal() for _ in range(m)] for _ in range(m)])


def rand_sl(rng, m):
    return algebra.sl_normalize(rand_complex(rng, m))


class TestIwasawa:
    def test_identity(self):
        k, b = algebra.iwasawa_decompose(np.eye(4, dtype=complex))
        assert np.allclose(k, np.eye(4), atol=1e-14)
        assert np.allclose(b, np.eye(4), atol=1e-14)

    def test_upper_triangular_fixed_point(self):
        rng = SplitMix64(1)
        b0 = np.triu(rand_complex(rng, 4), 1) * 0.3 + np.diag([1.2, 0.8, 1.5, 0.7])
        b0 = algebra.sl_normalize(b0)
        k, b = algebra.iwasawa_decompose(b0)
        assert np.allclose(k, np.eye(4), atol=1e-12)
        assert np.allclose(b, b0, atol=1e-12)

    def test_unitary_fixed_point_right(self):
        rng = SplitMix64(2)
        k0, _ = algebra.iwasawa_decompose(rand_sl(rng, 4))
        b_l, k_r = algebra.iwasawa_right(k0)
        assert np.allclose(b_l, np.eye(4), atol=1e-11)
        assert np.allclose(k_r, k0, atol=1e-11)

    def test_identity_right(self):
        b_l, k_r = algebra.iwasawa_right(np.eye(6, dtype=complex))
        assert np.allclose(b_l, np.eye(6), atol=1e-14)
        assert np.allclose(k_r, np.eye(6), atol=1e-14)

    def test_reconstruction_thousand_samples(self):
        # both factorizations reproduce the input to 1e-12 relative, n <= 3
        rng = SplitMix64(3)
        worst = 0.0
        for i in range(1000):
            m = 2 * (1 + i % 3)
            g = rand_sl(rng, m)
            scale = np.linalg.norm(g)
            k, b = algebra.iwasawa_decompose(g)
            worst = max(worst, np.linalg.norm(k @ b - g) / scale)
            assert algebra.is_unitary(k, 1e-12)
            assert algebra.is_upper_triangular_positive_diag(b, 1e-12)
            b_l, k_r = algebra.iwasawa_right(g)
            worst = max(worst, np.linalg.norm(b_l @ k_r - g) / scale)
        assert worst < 1e-12

    def test_det_one_factors(self):
        rng = SplitMix64(4)
        g = rand_sl(rng, 6)
        k, b = algebra.iwasawa_decompose(g)
        assert abs(np.linalg.det(k) - 1) < 1e-12
        assert abs(np.linalg.det(b) - 1) < 1e-12

    def test_noninvertible(self):
        g = np.eye(4, dtype=complex)
        g[:, 2] = g[:, 1]
        with pytest.raises(NonInvertible):
            algebra.iwasawa_decompose(g)


class TestHermitianEigensystem:
    def test_identity(self):
        vals, vecs = algebra.hermitian_eigensystem(np.eye(5, dtype=complex))
        assert np.allclose(vals, 1.0)
        assert np.allclose(vecs, np.eye(5), atol=1e-14)

    def test_diagonal_input(self):
        vals, vecs = algebra.hermitian_eigensystem(np.diag([3.0, 1.0, -2.0]).astype(complex))
        assert np.allclose(vals, [3.0, 1.0, -2.0])
        # eigenvectors are coordinate axes with positive pivot entries
        assert np.allclose(np.abs(vecs), np.eye(3), atol=1e-14)
        assert np.all(vecs[np.abs(vecs) > 0.5].real > 0)

    def test_reconstruction(self):
        rng = SplitMix64(5)
        a = rand_complex(rng, 6)
        a = a + a.conj().T
        vals, vecs = algebra.hermitian_eigensystem(a)
        res = np.linalg.norm(vecs @ np.diag(vals) @ vecs.conj().T - a)
        assert res < 1e-11 * max(1.0, np.linalg.norm(a))
        assert np.all(np.diff(vals) <= 1e-12)

    def test_deterministic(self):
        rng = SplitMix64(6)
        a = rand_complex(rng, 6)
        a = a + a.conj().T
        v1, u1 = algebra.hermitian_eigensystem(a)
        v2, u2 = algebra.hermitian_eigensystem(a.copy())
        assert np.array_equal(v1, v2)
        assert np.array_equal(u1, u2)

    def test_not_hermitian(self):
        a = np.eye(3, dtype=complex)
        a[0, 1] = 0.5
        with pytest.raises(NotHermitian):
            algebra.hermitian_eigensystem(a)


class TestPolarAndSvd:
    def test_polar_identity(self):
        p, u = algebra.polar_decompose(np.eye(3, dtype=complex))
        assert np.allclose(p, np.eye(3), atol=1e-14)
        assert np.allclose(u, np.eye(3), atol=1e-14)

    def test_polar_positive_fixed_point(self):
        rng = SplitMix64(7)
        a = rand_complex(rng, 3)
        pos = a @ a.conj().T + 0.5 * np.eye(3)
        p, u = algebra.polar_decompose(pos)
        assert np.allclose(p, pos, atol=1e-11)
        assert np.allclose(u, np.eye(3), atol=1e-11)

    def test_polar_reconstruction_and_square(self):
        rng = SplitMix64(8)
        chi = rand_complex(rng, 3) + 0.8 * np.eye(3)
        p, u = algebra.polar_decompose(chi)
        assert np.linalg.norm(p @ u - chi) < 1e-12 * np.linalg.norm(chi)
        assert algebra.is_unitary(u, 1e-12)
        assert np.linalg.norm(p @ p - chi @ chi.conj().T) < 1e-10 * np.linalg.norm(chi @ chi.conj().T)

    def test_polar_singular(self):
        with pytest.raises(Singular):
            algebra.polar_decompose(np.zeros((3, 3), dtype=complex))

    def test_svd_zero(self):
        _, s, _ = algebra.singular_values(np.zeros((2, 2), dtype=complex))
        assert np.allclose(s, 0.0)

    def test_svd_diagonal(self):
        u, s, v = algebra.singular_values(np.diag([2.0, 1.0]).astype(complex))
        assert np.allclose(s, [2.0, 1.0])
        assert np.allclose(np.abs(u), np.eye(2), atol=1e-14)
        assert np.allclose(np.abs(v), np.eye(2), atol=1e-14)

    def test_svd_squares_match_eigensystem(self):
        rng = SplitMix64(9)
        chi = rand_complex(rng, 4)
        u, s, v = algebra.singular_values(chi)
        assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - chi) < 1e-11 * np.linalg.norm(chi)
        eig = np.sort(np.linalg.eigvalsh(chi @ chi.conj().T))[::-1]
        assert np.allclose(s**2, eig, atol=1e-10 * max(1.0, eig[0]))


class TestPairingBasis:
    @pytest.mark.parametrize("n", [1, 2])
    def test_duality(self, n):
        basis = algebra.build_pairing_basis(n)
        dim = (2 * n) ** 2 - 1
        assert basis.dim == dim
        gram = np.array(
            [
                [np.imag(np.trace(x @ y)) for y in basis.basisB]
                for x in basis.basisK
            ]
        )
        assert np.max(np.abs(gram - np.eye(dim))) < 1e-12

    def test_structure(self):
        basis = algebra.build_pairing_basis(2)
        for x in basis.basisK:
            assert np.linalg.norm(x + x.conj().T) < 1e-14  # anti-Hermitian
            assert abs(np.trace(x)) < 1e-14
        for y in basis.basisB:
            assert np.linalg.norm(np.tril(y, -1)) < 1e-14
            assert np.linalg.norm(np.diag(y).imag) < 1e-14
            assert abs(np.trace(y)) < 1e-14

    def test_gram_condition_reported(self):
        basis = algebra.build_pairing_basis(2)
        cond = basis.gram_condition()
        assert np.isfinite(cond)
        assert cond < 10.0  # the construction is essentially symplectic-orthonormal
