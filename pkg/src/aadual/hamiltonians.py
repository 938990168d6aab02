"""Hamiltonian evaluators.

The two many-body Hamiltonians on their Darboux charts, the commuting
reduced families on both sides, Chebyshev machinery, frequencies, the
semiclassical spectra, and the five-parameter trigonometric family with
its scaling limit and the residue identity behind its potential.

Values and chart gradients of the two main Hamiltonians are delegated to
the kernels backend (compiled extension when available, pure Python
otherwise); this module owns domain checking and everything scalar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, PoleCollision
from .model import DarbouxPoint, Params

# ---------------------------------------------------------------------------
# Chebyshev polynomials (three-term recurrence; trig forms live in tests)


def cheb_T(m: int, x):
    """Chebyshev polynomial of the first kind, T_m(x)."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if m == 0:
        return prev
    cur = x.copy()
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def cheb_U(m: int, x):
    """Chebyshev polynomial of the second kind, U_m(x)."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if m == 0:
        return prev
    cur = 2.0 * x
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def _int_coeff_table(kind: str, max_degree: int) -> list[list[int]]:
    table = [[1], [0, 1] if kind == "T" else [0, 2]]
    for m in range(2, max_degree + 1):
        prev2, prev1 = table[m - 2], table[m - 1]
        coeffs = [0] * (m + 1)
        for i, c in enumerate(prev1):
            coeffs[i + 1] += 2 * c
        for i, c in enumerate(prev2):
            coeffs[i] -= c
        table.append(coeffs)
    return table


@dataclass(frozen=True)
class ChebyshevCache:
    """Integer coefficient tables (ascending powers) for T_m and U_m."""

    max_degree: int
    T: list = field(repr=False, default=None)
    U: list = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "T", _int_coeff_table("T", self.max_degree))
        object.__setattr__(self, "U", _int_coeff_table("U", self.max_degree))

    def eval_T(self, m: int, x):
        if m > self.max_degree:
            raise ValueError("degree exceeds cache")
        return cheb_T(m, x)

    def eval_U(self, m: int, x):
        if m > self.max_degree:
            raise ValueError("degree exceeds cache")
        return cheb_U(m, x)


# ---------------------------------------------------------------------------
# main Hamiltonians


def _pack(point: DarbouxPoint) -> np.ndarray:
    return np.concatenate([point.lam, point.theta])


def H_main(point: DarbouxPoint, params: Params) -> float:
    """Deformed BC-type many-body Hamiltonian on the (lambda, theta) chart."""
    y = _pack(point)
    if kernels.sqrt_margin(kernels.KIND_H, y, params.n, params.mu, params.u, params.v) <= 0.0:
        raise DomainError("a square-root argument is non-positive at this point")
    return kernels.hamiltonian_value(
        kernels.KIND_H, 1, y, params.n, params.mu, params.u, params.v
    )


def Hhat_main(point: DarbouxPoint, params: Params) -> float:
    """Dual RSvD-type Hamiltonian on the (hat_lambda, hat_theta) chart."""
    y = _pack(point)
    if kernels.sqrt_margin(kernels.KIND_HHAT, y, params.n, params.mu, params.u, params.v) <= 0.0:
        raise DomainError("a square-root argument is non-positive at this point")
    return kernels.hamiltonian_value(
        kernels.KIND_HHAT, 1, y, params.n, params.mu, params.u, params.v
    )


def grad_H_main(point: DarbouxPoint, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """(dH/dlambda, dH/dtheta) on the chart."""
    g = kernels.hamiltonian_grad(
        kernels.KIND_H, 1, _pack(point), params.n, params.mu, params.u, params.v
    )
    return g[: params.n], g[params.n:]


def grad_Hhat_main(point: DarbouxPoint, params: Params) -> tuple[np.ndarray, np.ndarray]:
    g = kernels.hamiltonian_grad(
        kernels.KIND_HHAT, 1, _pack(point), params.n, params.mu, params.u, params.v
    )
    return g[: params.n], g[params.n:]


# ---------------------------------------------------------------------------
# reduced commuting families


def reduced_actions_hat(lam, j: int, params: Params) -> float:
    """Family sum cosh(2 j lambda_i): the reduced right-factor traces."""
    if not 1 <= j:
        raise ValueError("j must be >= 1")
    lam = np.asarray(lam, dtype=float)
    return float(np.sum(np.cosh(2.0 * j * lam)))


def reduced_actions_m(hat_lam, j: int, params: Params) -> float:
    """Family sum (-1)^j T_{2j}(e^{hat_lambda_a}) = sum cos(2 j q_a)."""
    h = np.asarray(hat_lam, dtype=float)
    x = np.exp(h)
    if np.any(x > 1.0 + 1e-12):
        raise DomainError("hat lambda must be <= 0")
    return float((-1.0) ** j * np.sum(cheb_T(2 * j, np.minimum(x, 1.0))))


def frequencies_hat(j: int, hat_lam, params: Params) -> np.ndarray:
    """Angular frequencies of the hat-side torus flows:
    2 (-1)^j j e^{hl} U_{2j-1}(e^{hl})."""
    h = np.asarray(hat_lam, dtype=float)
    x = np.exp(h)
    return 2.0 * (-1.0) ** j * j * x * cheb_U(2 * j - 1, x)


def frequencies_m(j: int, lam, params: Params) -> np.ndarray:
    """Angular frequencies of the position-side torus flows: 2 j sinh(2 j lam)."""
    lam = np.asarray(lam, dtype=float)
    return 2.0 * j * np.sinh(2.0 * j * lam)


def semiclassical_spectrum(j: int, occupations, params: Params) -> float:
    """Energy of the j-th family member at integer oscillator occupations."""
    if not params.section_S_valid:
        from .errors import SectionUnavailable

        raise SectionUnavailable("spectrum uses the gauge-section chart")
    occ = np.asarray(occupations, dtype=float)
    if occ.size != params.n or np.any(occ < 0):
        raise ValueError("occupations must be n nonnegative integers")
    n = params.n
    au = abs(params.u)
    lam = np.array(
        [au + (n - 1 - i) * params.mu + float(np.sum(occ[i:])) for i in range(n)]
    )
    return reduced_actions_hat(lam, j, params)


# ---------------------------------------------------------------------------
# five-parameter trigonometric family and its scaling limit


@dataclass(frozen=True)
class VDParams:
    a: float
    b: float
    c: float
    d: float
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")


def vd_V_pm(lam, vd: VDParams) -> tuple[np.ndarray, np.ndarray]:
    """The coefficient functions V_{+j}, V_{-j} of the kinetic term."""
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    vp = np.empty(n)
    vm = np.empty(n)
    for sign, out in ((1.0, vp), (-1.0, vm)):
        for j in range(n):
            lj = sign * lam[j]
            val = (
                math.cosh(vd.a + lj)
                * math.cosh(vd.b + lj)
                * math.sinh(vd.c + lj)
                * math.sinh(vd.d + lj)
                / (math.cosh(lam[j]) ** 2 * math.sinh(lam[j]) ** 2)
            )
            for k in range(n):
                if k == j:
                    continue
                val *= (
                    math.sinh(vd.mu + sign * (lam[j] + lam[k]))
                    * math.sinh(vd.mu + sign * (lam[j] - lam[k]))
                    / (math.sinh(lam[j] + lam[k]) * math.sinh(lam[j] - lam[k]))
                )
            out[j] = val
    return vp, vm


def vd_kinetic_factored(lam, vd: VDParams) -> np.ndarray:
    """Product V_j V_{-j} in everywhere-positive factored form."""
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    out = np.empty(n)
    for j in range(n):
        val = (
            (1.0 + math.sinh(vd.a) ** 2 / math.cosh(lam[j]) ** 2)
            * (1.0 + math.sinh(vd.b) ** 2 / math.cosh(lam[j]) ** 2)
            * (1.0 - math.sinh(vd.c) ** 2 / math.sinh(lam[j]) ** 2)
            * (1.0 - math.sinh(vd.d) ** 2 / math.sinh(lam[j]) ** 2)
        )
        for k in range(n):
            if k == j:
                continue
            val *= (1.0 - math.sinh(vd.mu) ** 2 / math.sinh(lam[j] - lam[k]) ** 2) * (
                1.0 - math.sinh(vd.mu) ** 2 / math.sinh(lam[j] + lam[k]) ** 2
            )
        out[j] = val
    return out


def vd_potential_direct(lam, vd: VDParams) -> float:
    vp, vm = vd_V_pm(lam, vd)
    return -0.5 * float(np.sum(vp + vm))


def vd_constant(n: int, vd: VDParams) -> float:
    """The lambda-independent part of the closed potential form."""
    s2 = math.sinh(vd.mu) ** 2
    return (
        (
            math.cosh(vd.a - vd.b) * math.cosh(vd.c - vd.d)
            - math.cosh(vd.a + vd.b - vd.mu) * math.cosh(vd.c + vd.d - vd.mu)
        )
        / (2.0 * s2)
        - math.sinh(vd.a + vd.b + vd.c + vd.d + (2 * n - 1) * vd.mu)
        / (2.0 * math.sinh(vd.mu))
    )


def vd_potential_closed(lam, vd: VDParams) -> float:
    """Closed form of the potential term: two hyperbolic products plus a constant."""
    lam = np.asarray(lam, dtype=float)
    s2 = math.sinh(vd.mu) ** 2
    p1 = float(np.prod(1.0 - s2 / np.sinh(lam) ** 2))
    p2 = float(np.prod(1.0 + s2 / np.cosh(lam) ** 2))
    return (
        math.cosh(vd.a) * math.cosh(vd.b) * math.sinh(vd.c) * math.sinh(vd.d) / s2 * p1
        + math.sinh(vd.a) * math.sinh(vd.b) * math.cosh(vd.c) * math.cosh(vd.d) / s2 * p2
        + vd_constant(lam.size, vd)
    )


def vd_hamiltonian(point: DarbouxPoint, vd: VDParams) -> float:
    """Five-parameter many-body Hamiltonian (kinetic + potential)."""
    lam, theta = point.lam, point.theta
    if np.any(lam == 0.0):
        raise DomainError("lambda entries must be nonzero")
    if lam.size > 1 and np.any(np.abs(np.subtract.outer(lam, lam))[~np.eye(lam.size, dtype=bool)] < 1e-13):
        raise DomainError("coinciding lambda entries")
    vp, vm = vd_V_pm(lam, vd)
    prod = vp * vm
    if np.any(prod < -1e-12):
        raise DomainError("kinetic product is negative; outside the real-form regime")
    kinetic = float(np.sum(np.cos(theta) * np.sqrt(np.maximum(prod, 0.0))))
    return kinetic - 0.5 * float(np.sum(vp + vm))


def vd_limit_error(point: DarbouxPoint, params: Params, a: float, b: float) -> float:
    """Defect of the scaling limit relating the five-parameter family to H_main.

    Returns |e^{v-u} * 4 e^{a} e^{-b} * H5[mu; a, b, u, v] + n - H_main|,
    which decays like O(e^{2a} + e^{-2b}) as a -> -inf, b -> +inf.
    """
    vd = VDParams(a=a, b=b, c=params.u, d=params.v, mu=params.mu)
    scaled = math.exp(params.v - params.u) * 4.0 * math.exp(a) * math.exp(-b) * vd_hamiltonian(
        point, vd
    )
    return abs(scaled + params.n - H_main(point, params))


# ---------------------------------------------------------------------------
# residue identity behind the closed potential form


def _residue_numerator(z: complex, vd: VDParams, Lams: np.ndarray, alpha: float) -> complex:
    A, B, C, D = math.exp(vd.a), math.exp(vd.b), math.exp(vd.c), math.exp(vd.d)
    val = 0.5 * (A * z + 1 / A) * (B * z + 1 / B) * (C * z - 1 / C) * (D * z - 1 / D)
    for lam_a in Lams:
        val *= z * lam_a / alpha - alpha
    return val


def residue_report(vd: VDParams, Lambda, params: Params) -> dict:
    """All residues of the rational one-form whose total residue vanishes.

    Simple poles at 0, +-1, +-alpha and at each Lambda_a are evaluated as
    N(p) / D'(p) with the fully factored denominator; the pole at infinity
    comes from the w = 1/z substitution, whose residue is the negated
    leading coefficient ratio.
    """
    Lams = np.asarray(Lambda, dtype=float)
    alpha = math.exp(-vd.mu)
    poles = np.concatenate([[0.0, 1.0, -1.0, alpha, -alpha], Lams])
    m = poles.size
    for i in range(m):
        for j in range(i + 1, m):
            if abs(poles[i] - poles[j]) < 1e-8:
                raise PoleCollision(f"poles {poles[i]} and {poles[j]} collide")
    lead = alpha ** (-2) - 1.0

    residues = {}
    for i, p in enumerate(poles):
        dprime = lead
        for j in range(m):
            if j != i:
                dprime *= p - poles[j]
        residues[f"pole_{i}"] = complex(_residue_numerator(p, vd, Lams, alpha)) / dprime
    # infinity: minus the z -> inf limit of z F(z)
    A, B, C, D = math.exp(vd.a), math.exp(vd.b), math.exp(vd.c), math.exp(vd.d)
    lead_num = 0.5 * A * B * C * D * float(np.prod(Lams / alpha))
    res_inf = -lead_num / lead
    labels = ["zero", "plus_one", "minus_one", "plus_alpha", "minus_alpha"] + [
        f"Lambda_{a + 1}" for a in range(Lams.size)
    ]
    out = {lab: residues[f"pole_{i}"] for i, lab in enumerate(labels)}
    out["infinity"] = complex(res_inf)
    out["sum"] = sum(out[lab] for lab in labels) + out["infinity"]
    scale = max(abs(v) for k, v in out.items() if k != "sum")
    out["relative_sum"] = abs(out["sum"]) / max(1.0, scale)
    return out


def residue_sum(vd: VDParams, Lambda, params: Params) -> complex:
    """Total residue (zero in exact arithmetic)."""
    return residue_report(vd, Lambda, params)["sum"]
