"""Dense complex matrix core.

Small fixed-size (at most 8x8) decompositions used throughout: the two
Iwasawa factorizations of SL(2n,C), Hermitian eigensystems with a
deterministic phase gauge, polar and singular value decompositions, and
the dual bases that realize derivative extraction against the pairing
<X, Y> = Im tr(XY) on sl(2n,C) = su(2n) + sb(2n).

Matrices are plain complex numpy arrays; the predicates below give the
testable membership checks.  All tolerances are relative to the input
norm with an absolute floor of 1e-14.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonInvertible, NotHermitian, Singular

_FLOOR = 1e-14


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(a)))


def check_finite(a: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag)))


def is_unitary(a: np.ndarray, tol: float = 1e-12) -> bool:
    m = a.shape[0]
    return float(np.linalg.norm(a.conj().T @ a - np.eye(m))) <= tol * _scale(a)


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return float(np.linalg.norm(a - a.conj().T)) <= tol * _scale(a)


def is_upper_triangular_positive_diag(a: np.ndarray, tol: float = 1e-12) -> bool:
    lower = np.linalg.norm(np.tril(a, -1))
    d = np.diag(a)
    return (
        lower <= tol * _scale(a)
        and bool(np.all(np.abs(d.imag) <= tol * _scale(a)))
        and bool(np.all(d.real > 0))
    )


def sl_normalize(g: np.ndarray) -> np.ndarray:
    """Scale g into SL(m,C) by the principal m-th root of its determinant."""
    m = g.shape[0]
    det = np.linalg.det(g)
    if abs(det) < _FLOOR:
        raise NonInvertible("determinant magnitude below 1e-14")
    return g * det ** (-1.0 / m)


def iwasawa_decompose(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor g = k b with k in SU(m) and b upper triangular, positive diagonal.

    Modified Gram-Schmidt on the columns with one reorthogonalization pass.
    Raises NonInvertible when a pivot collapses.
    """
    g = np.asarray(g, dtype=complex)
    m = g.shape[0]
    thresh = _FLOOR * _scale(g)
    q = np.array(g, dtype=complex)
    r = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for _ in range(2):  # second pass restores orthogonality to working precision
            for j in range(i):
                c = q[:, j].conj() @ q[:, i]
                r[j, i] += c
                q[:, i] -= c * q[:, j]
        piv = np.linalg.norm(q[:, i])
        if piv < thresh:
            raise NonInvertible(f"pivot {i} magnitude {piv:.3e} below threshold")
        r[i, i] = piv
        q[:, i] /= piv
    return q, r


def iwasawa_right(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor g = b_L k_R with b_L upper triangular positive diagonal, k_R unitary.

    Reduces to the left factorization of g^{-1}: if g^{-1} = k' b' then
    g = b'^{-1} k'^{-1} and b'^{-1} is again upper triangular with
    positive diagonal.
    """
    g = np.asarray(g, dtype=complex)
    k_prime, b_prime = iwasawa_decompose(np.linalg.inv(g))
    b_l = np.linalg.inv(b_prime)
    return b_l, k_prime.conj().T


def hermitian_eigensystem(a: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and phase-fixed eigenvectors of a Hermitian matrix.

    Each eigenvector is normalized so its largest-magnitude entry is real
    and positive (ties broken at the lowest index), which makes repeated
    calls bit-identical and reconstruction tests reproducible.
    """
    a = np.asarray(a, dtype=complex)
    if float(np.linalg.norm(a - a.conj().T)) > tol * _scale(a):
        raise NotHermitian("symmetry defect exceeds tolerance")
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for i in range(vecs.shape[1]):
        idx = int(np.argmax(np.abs(vecs[:, i])))
        pivot = vecs[idx, i]
        if abs(pivot) > 0:
            vecs[:, i] *= np.conj(pivot) / abs(pivot)
    return vals, vecs


def polar_decompose(chi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor chi = p u with p positive definite Hermitian and u unitary."""
    chi = np.asarray(chi, dtype=complex)
    w, s, vh = np.linalg.svd(chi)
    if s[-1] <= 1e-13:
        raise Singular(f"smallest singular value {s[-1]:.3e} <= 1e-13")
    p = (w * s) @ w.conj().T
    u = w @ vh
    return p, u


def singular_values(chi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD chi = U diag(beta) V^dagger with beta descending."""
    w, s, vh = np.linalg.svd(np.asarray(chi, dtype=complex))
    return w, s, vh.conj().T


@dataclass(frozen=True)
class LiePairingBasis:
    """Dual bases of su(2n) and sb(2n) under <X,Y> = Im tr(XY).

    basisK[i] is anti-Hermitian traceless, basisB[j] upper triangular with
    real diagonal and traceless, and Im tr(basisK[i] basisB[j]) = delta_ij.
    Both subspaces are isotropic for the pairing, so expanding a gradient
    in one basis only needs directional derivatives along the other.
    """

    n: int
    basisK: list = field(repr=False)
    basisB: list = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basisK)

    @property
    def basisSL(self) -> list:
        return list(self.basisK) + list(self.basisB)

    def gram_condition(self) -> float:
        """Condition number of the Gram matrix of basisSL under Im tr."""
        full = self.basisSL
        gram = np.array([[np.imag(np.trace(x @ y)) for y in full] for x in full])
        return float(np.linalg.cond(gram))


def build_pairing_basis(n: int) -> LiePairingBasis:
    """Construct dual bases for sl(2n,C) = su(2n) + sb(2n)."""
    if n < 1:
        raise ValueError("n must be positive")
    m = 2 * n
    basis_k: list[np.ndarray] = []
    basis_b: list[np.ndarray] = []
    for a in range(m):
        for b in range(a + 1, m):
            e_ab = np.zeros((m, m), dtype=complex)
            e_ab[a, b] = 1.0
            e_ba = np.zeros((m, m), dtype=complex)
            e_ba[b, a] = 1.0
            basis_k.append(e_ab - e_ba)
            basis_b.append(-1j * e_ab)
            basis_k.append(1j * (e_ab + e_ba))
            basis_b.append(e_ab.copy())
    # traceless diagonals: duals solved through the real Gram matrix
    diag_h = []
    for a in range(m - 1):
        d = np.zeros((m, m))
        d[a, a] = 1.0
        d[a + 1, a + 1] = -1.0
        diag_h.append(d)
    gram = np.array([[np.trace(x @ y).real for y in diag_h] for x in diag_h])
    gram_inv = np.linalg.inv(gram)
    for a in range(m - 1):
        basis_k.append(1j * diag_h[a])
        dual = sum(gram_inv[c, a] * diag_h[c] for c in range(m - 1))
        basis_b.append(dual.astype(complex))
    return LiePairingBasis(n=n, basisK=basis_k, basisB=basis_b)
