"""Finite-difference Poisson bracket engine on the double and on SU(2n).

Gradients of scalar functions are extracted against the pairing
Im tr(XY): the two triangular-vs-unitary subalgebras are isotropic and
dual to each other, so the expansion coefficients of a gradient in one
basis are directional derivatives along the other.  All exponentials of
the (fixed) basis directions are precomputed once per engine, making a
full gradient a handful of small matrix products.

This is diagnostic machinery: brackets are evaluated numerically with a
fixed step and optional Richardson extrapolation, never symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import algebra
from .errors import StepRejected
from .model import Params
from .reconstruct import I_matrix


@dataclass(frozen=True)
class ScalarField:
    """A real-valued observable with a label for reports."""

    evaluator: Callable
    label: str

    def __call__(self, g):
        return self.evaluator(g)


def pi_B(m: np.ndarray) -> np.ndarray:
    """Projection onto upper triangular matrices with real diagonal."""
    lower = np.tril(m, -1)
    return np.triu(m, 1) + lower.conj().T + np.diag(np.diag(m).real)


def pi_K(m: np.ndarray) -> np.ndarray:
    """Projection onto anti-Hermitian matrices (complement of pi_B)."""
    return m - pi_B(m)


def r_operator(m: np.ndarray) -> np.ndarray:
    """Half difference of the two projections."""
    return 0.5 * (pi_K(m) - pi_B(m))


def _pairing(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.imag(np.trace(x @ y)))


class DerivativeEngine:
    """Cached-exponential directional derivatives and gradient extraction."""

    def __init__(self, n: int, step: float = 1e-5, richardson: bool = True):
        self.n = n
        self.step = step
        self.richardson = richardson
        self.basis = algebra.build_pairing_basis(n)
        self._exp = {}
        steps = (step, step / 2.0) if richardson else (step,)
        for h in steps:
            self._exp[h] = [
                (expm(h * x), expm(-h * x)) for x in self.basis.basisSL
            ]

    def _directional(self, func, g, idx: int, h: float, side: str) -> float:
        ep, em = self._exp[h][idx]
        if side == "left":
            return (func(ep @ g) - func(em @ g)) / (2.0 * h)
        return (func(g @ ep) - func(g @ em)) / (2.0 * h)

    def _derivative(self, func, g, idx: int, side: str) -> float:
        d = self._directional(func, g, idx, self.step, side)
        if not self.richardson:
            return d
        d_half = self._directional(func, g, idx, self.step / 2.0, side)
        return (4.0 * d_half - d) / 3.0

    def _grad(self, func, g, side: str) -> np.ndarray:
        dim = self.basis.dim
        out = np.zeros_like(g, dtype=complex)
        for i in range(dim):  # derivatives along K expand on the B side
            out += self._derivative(func, g, i, side) * self.basis.basisB[i]
        for i in range(dim):  # and vice versa
            out += self._derivative(func, g, dim + i, side) * self.basis.basisK[i]
        return out

    def grad_left(self, func, g) -> np.ndarray:
        return self._grad(func, g, "left")

    def grad_right(self, func, g) -> np.ndarray:
        return self._grad(func, g, "right")

    def D_left(self, func, k) -> np.ndarray:
        """Triangular-valued left derivative of a function on the unitary group."""
        dim = self.basis.dim
        out = np.zeros_like(k, dtype=complex)
        for i in range(dim):
            out += self._derivative(func, k, i, "left") * self.basis.basisB[i]
        return out

    def D_right(self, func, k) -> np.ndarray:
        dim = self.basis.dim
        out = np.zeros_like(k, dtype=complex)
        for i in range(dim):
            out += self._derivative(func, k, i, "right") * self.basis.basisB[i]
        return out


def bracket_heisenberg(f: ScalarField, h: ScalarField, g, engine: DerivativeEngine) -> float:
    """Poisson bracket of two observables on the double at the point g."""
    gf_l = engine.grad_left(f, g)
    gf_r = engine.grad_right(f, g)
    gh_l = engine.grad_left(h, g)
    gh_r = engine.grad_right(h, g)
    return _pairing(gf_l, r_operator(gh_l)) + _pairing(gf_r, r_operator(gh_r))


def bracket_K(f: ScalarField, h: ScalarField, k, engine: DerivativeEngine) -> float:
    """Multiplicative Poisson bracket on the unitary group at the point k."""
    df = engine.D_left(f, k)
    dh = engine.D_right(h, k)
    return float(np.imag(np.trace(df @ k @ dh @ np.linalg.inv(k))))


# ---------------------------------------------------------------------------
# gauge generators and invariance defects


def _u_n_basis(n: int) -> list:
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            e_ab = np.zeros((n, n), dtype=complex)
            e_ab[a, b] = 1.0
            e_ba = np.zeros((n, n), dtype=complex)
            e_ba[b, a] = 1.0
            out.append(e_ab - e_ba)
            out.append(1j * (e_ab + e_ba))
    for a in range(n):
        d = np.zeros((n, n), dtype=complex)
        d[a, a] = 1j
        out.append(d)
    return out


def _traceless_block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    m[:n, :n] = a
    m[n:, n:] = b
    tr = np.trace(m)
    return m - (tr / (2 * n)) * np.eye(2 * n)


def gauge_generators_right(n: int) -> list:
    """Spanning set of the right gauge algebra (block-diagonal, traceless)."""
    out = []
    zero = np.zeros((n, n), dtype=complex)
    for x in _u_n_basis(n):
        out.append(_traceless_block_diag(x, zero))
        out.append(_traceless_block_diag(zero, x))
    return out


def gauge_generators_left(params: Params) -> list:
    """Spanning set of the left gauge algebra (commutant of the momentum data).

    The upper block must commute with sigma sigma^dagger, which for the
    deterministic momentum choice is diag(alpha^2, ..., alpha^2, alpha^{2-2n}):
    a unitary algebra on the first n-1 slots plus an independent phase.
    """
    n = params.n
    out = []
    zero = np.zeros((n, n), dtype=complex)
    for x in _u_n_basis(n - 1) if n > 1 else []:
        a = np.zeros((n, n), dtype=complex)
        a[: n - 1, : n - 1] = x
        out.append(_traceless_block_diag(a, zero))
    phase = np.zeros((n, n), dtype=complex)
    phase[n - 1, n - 1] = 1j
    out.append(_traceless_block_diag(phase, zero))
    for x in _u_n_basis(n):
        out.append(_traceless_block_diag(zero, x))
    return out


def gauge_invariance_defect(f: ScalarField, g, params: Params, step: float = 1e-5) -> float:
    """Largest directional derivative of f along the two-sided gauge action.

    Normalized by the magnitude of f at the point, so the number is
    meaningful for trace observables that grow like e^{2 j lambda_1}.
    """
    defect = 0.0
    scale = max(1.0, abs(f(g)))
    for x in gauge_generators_left(params):
        ep, em = expm(step * x), expm(-step * x)
        defect = max(defect, abs(f(ep @ g) - f(em @ g)) / (2.0 * step))
    for ycand in gauge_generators_right(params.n):
        ep, em = expm(step * ycand), expm(-step * ycand)
        defect = max(defect, abs(f(g @ em) - f(g @ ep)) / (2.0 * step))
    return defect / scale


# ---------------------------------------------------------------------------
# collective flow on the unreduced factor pair


def collective_flow_step(h: ScalarField, k: np.ndarray, b: np.ndarray, dt: float,
                         engine: DerivativeEngine, reject_above: float = 1e-6):
    """One RK4 step of the decoupled flow driven by a function of k.

    k evolves by the projected right-derivative field, b by triangular
    transport; afterwards k is re-projected to the determinant-one unitary
    group (polar) and b to the triangular group (diagonal realified, unit
    determinant restored).
    """
    m = k.shape[0]

    def rhs(kc, bc):
        dph = engine.D_right(h, kc)
        kdot = pi_K(kc @ dph @ np.linalg.inv(kc)) @ kc
        bdot = -dph @ bc
        return kdot, bdot

    k1, b1 = rhs(k, b)
    k2, b2 = rhs(k + 0.5 * dt * k1, b + 0.5 * dt * b1)
    k3, b3 = rhs(k + 0.5 * dt * k2, b + 0.5 * dt * b2)
    k4, b4 = rhs(k + dt * k3, b + dt * b3)
    k_raw = k + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    b_raw = b + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)

    w, _, vh = np.linalg.svd(k_raw)
    k_new = w @ vh
    k_new = k_new * np.linalg.det(k_new) ** (-1.0 / m)
    b_new = np.triu(b_raw, 1) + np.diag(np.diag(b_raw).real)
    det = float(np.prod(np.diag(b_new).real))
    if det <= 0:
        raise StepRejected("triangular factor lost diagonal positivity")
    b_new = b_new * det ** (-1.0 / m)
    correction = float(np.linalg.norm(k_new - k_raw) + np.linalg.norm(b_new - b_raw))
    if correction > reject_above * max(1.0, float(np.linalg.norm(b_raw))):
        raise StepRejected(f"projection correction {correction:.3e} too large")
    return k_new, b_new


# convenience observables


def trace_field_b(j: int) -> ScalarField:
    def ev(g):
        _, b = algebra.iwasawa_decompose(g)
        bb = b @ b.conj().T
        return 0.5 * float(np.real(np.trace(np.linalg.matrix_power(bb, j))))

    return ScalarField(evaluator=ev, label=f"half_tr_bb_{j}")


def trace_field_k(j: int, n: int) -> ScalarField:
    imat = I_matrix(n)

    def ev(g):
        k, _ = algebra.iwasawa_decompose(g)
        w = k.conj().T @ imat @ k @ imat
        return 0.5 * float(np.real(np.trace(np.linalg.matrix_power(w, j))))

    return ScalarField(evaluator=ev, label=f"half_tr_kIkI_{j}")


def unitary_trace_field(j: int, n: int) -> ScalarField:
    """Same family as a function on the unitary group itself."""
    imat = I_matrix(n)

    def ev(k):
        w = k.conj().T @ imat @ k @ imat
        return 0.5 * float(np.real(np.trace(np.linalg.matrix_power(w, j))))

    return ScalarField(evaluator=ev, label=f"h_{j}")
