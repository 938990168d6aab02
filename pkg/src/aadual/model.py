"""Model parameters, admissible domains and coordinate charts.

The two position domains and the three charts used everywhere else:

* interior domain  D+   : lambda_1 > ... > lambda_n > max(|u|,|v|),
  consecutive gaps > mu;  its closure relaxes both to >=.
* hat domain       Dhat+: min(0, v-u) > hlam_1 > ... > hlam_n with gaps > mu.
* Darboux chart (lambda, theta), global complex chart zeta in C^n and the
  hat-side complex chart Z in C^n, with their mutual conversions.

Angles are stored in [0, 2*pi).  All functions are pure; parameters are
an immutable dataclass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import AngleUndefined, DomainError, ParamsError

TWO_PI = 2.0 * math.pi


def sinhc(x: float) -> float:
    """sinh(x)/x, stable through x = 0."""
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0
    return math.sinh(x) / x


def wrap_angle(theta):
    """Reduce angles to [0, 2*pi)."""
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


def angles_close(a, b, tol: float = 1e-9) -> bool:
    """Compare angles modulo 2*pi."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    d = np.minimum(d, TWO_PI - d)
    return bool(np.all(d <= tol))


@dataclass(frozen=True)
class Params:
    """Model parameters (n, mu, u, v) and derived constants.

    Requires mu > 0 and |u| != |v|.  The gauge section implemented by the
    triples module additionally needs |u| > |v| with u < 0, exposed as
    ``section_S_valid``.
    """

    n: int
    mu: float
    u: float
    v: float

    def __post_init__(self):
        if self.n < 1:
            raise ParamsError("n must be a positive integer")
        if not self.mu > 0:
            raise ParamsError("mu must be positive")
        if abs(abs(self.u) - abs(self.v)) == 0.0:
            raise ParamsError("|u| = |v| is excluded")

    @property
    def alpha(self) -> float:
        return math.exp(-self.mu)

    @property
    def x(self) -> float:
        return math.exp(-self.v)

    @property
    def y(self) -> float:
        return math.exp(-self.u)

    @property
    def s(self) -> float:
        return min(0.0, self.v - self.u)

    @property
    def floor(self) -> float:
        """Lower bound max(|u|, |v|) for the lambda domain."""
        return max(abs(self.u), abs(self.v))

    @property
    def section_S_valid(self) -> bool:
        return abs(self.u) > abs(self.v) and self.u < 0

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "mu": self.mu, "u": self.u, "v": self.v})

    @classmethod
    def from_dict(cls, d: dict) -> "Params":
        # derived fields are never stored; recompute from the four primaries
        return cls(n=int(d["n"]), mu=float(d["mu"]), u=float(d["u"]), v=float(d["v"]))

    @classmethod
    def from_json(cls, text: str) -> "Params":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DarbouxPoint:
    """Chart point (lambda, theta) with theta kept in [0, 2*pi)."""

    lam: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "theta", wrap_angle(self.theta))
        if self.lam.shape != self.theta.shape:
            raise ValueError("lambda and theta must have equal length")


# ---------------------------------------------------------------------------
# domains


def in_D_plus(lam, params: Params) -> bool:
    lam = np.asarray(lam, dtype=float)
    if lam.size != params.n:
        raise ValueError("lambda must have n entries")
    gaps_ok = bool(np.all(lam[:-1] - lam[1:] > params.mu)) if params.n > 1 else True
    return gaps_ok and lam[-1] > params.floor


def in_D_closure(lam, params: Params, eps: float = 0.0) -> bool:
    """Non-strict version; eps > 0 relaxes for numerical boundary classification."""
    lam = np.asarray(lam, dtype=float)
    if lam.size != params.n:
        raise ValueError("lambda must have n entries")
    gaps_ok = bool(np.all(lam[:-1] - lam[1:] >= params.mu - eps)) if params.n > 1 else True
    return gaps_ok and lam[-1] >= params.floor - eps


def in_Dhat_plus(hat_lam, params: Params) -> bool:
    h = np.asarray(hat_lam, dtype=float)
    if h.size != params.n:
        raise ValueError("hat lambda must have n entries")
    gaps_ok = bool(np.all(h[:-1] - h[1:] > params.mu)) if params.n > 1 else True
    return gaps_ok and params.s > h[0]


def in_Dhat_closure(hat_lam, params: Params, eps: float = 0.0) -> bool:
    h = np.asarray(hat_lam, dtype=float)
    if h.size != params.n:
        raise ValueError("hat lambda must have n entries")
    gaps_ok = bool(np.all(h[:-1] - h[1:] >= params.mu - eps)) if params.n > 1 else True
    return gaps_ok and params.s >= h[0] - eps


# ---------------------------------------------------------------------------
# zeta chart on M


def zeta_from_darboux(point: DarbouxPoint, params: Params) -> np.ndarray:
    """Complex coordinates: zeta_j = sqrt(gap_j - mu) * prod_{l<=j} e^{-i theta_l}."""
    lam, theta = point.lam, point.theta
    if not in_D_closure(lam, params, eps=1e-12):
        raise DomainError("lambda outside the closed domain")
    n = params.n
    zeta = np.zeros(n, dtype=complex)
    phase = 1.0 + 0.0j
    for j in range(n):
        phase *= np.exp(-1j * theta[j])
        if j < n - 1:
            zeta[j] = math.sqrt(max(lam[j] - lam[j + 1] - params.mu, 0.0)) * phase
        else:
            zeta[j] = math.sqrt(max(lam[n - 1] - abs(params.u), 0.0)) * phase
    return zeta


def lambda_from_zeta(zeta, params: Params) -> np.ndarray:
    """Positions from moduli: lambda_j = |u| + (n-j)mu + sum_{l>=j} |zeta_l|^2."""
    z = np.asarray(zeta, dtype=complex)
    n = params.n
    au = abs(params.u)
    mods = np.abs(z) ** 2
    return np.array(
        [au + (n - 1 - j) * params.mu + float(np.sum(mods[j:])) for j in range(n)]
    )


def darboux_from_zeta(zeta, params: Params) -> DarbouxPoint:
    """Invert the zeta chart; angles need every component nonzero."""
    z = np.asarray(zeta, dtype=complex)
    lam = lambda_from_zeta(z, params)
    if np.any(np.abs(z) == 0.0):
        raise AngleUndefined("theta undefined where some zeta_j = 0")
    args = np.angle(z)
    n = params.n
    theta = np.empty(n)
    theta[0] = -args[0]
    for j in range(1, n):
        theta[j] = args[j - 1] - args[j]
    return DarbouxPoint(lam=lam, theta=theta)


# ---------------------------------------------------------------------------
# Z chart on the hat model


def Z_from_hat_darboux(point: DarbouxPoint, params: Params) -> np.ndarray:
    """Z_j = sqrt(hgap_j - mu) prod_{k>j} e^{i htheta_k}; Z_n = sqrt(s - hlam_1) prod_k e^{i htheta_k}."""
    h, th = point.lam, point.theta
    if not in_Dhat_closure(h, params, eps=1e-12):
        raise DomainError("hat lambda outside the closed hat domain")
    n = params.n
    z = np.zeros(n, dtype=complex)
    for j in range(n - 1):
        z[j] = math.sqrt(max(h[j] - h[j + 1] - params.mu, 0.0)) * np.exp(
            1j * float(np.sum(th[j + 1:]))
        )
    z[n - 1] = math.sqrt(max(params.s - h[0], 0.0)) * np.exp(1j * float(np.sum(th)))
    return z


def hat_lambda_from_Z(Z, params: Params) -> np.ndarray:
    z = np.asarray(Z, dtype=complex)
    n = params.n
    mods = np.abs(z) ** 2
    return np.array(
        [
            params.s - j * params.mu - mods[n - 1] - float(np.sum(mods[:j]))
            for j in range(n)
        ]
    )


def hat_darboux_from_Z(Z, params: Params) -> DarbouxPoint:
    z = np.asarray(Z, dtype=complex)
    h = hat_lambda_from_Z(z, params)
    if np.any(np.abs(z) == 0.0):
        raise AngleUndefined("hat theta undefined where some Z_j = 0")
    args = np.angle(z)
    n = params.n
    th = np.empty(n)
    if n == 1:
        th[0] = args[0]
    else:
        th[0] = args[n - 1] - args[0]
        for j in range(1, n - 1):
            th[j] = args[j - 1] - args[j]
        th[n - 1] = args[n - 2]
    return DarbouxPoint(lam=h, theta=th)


# ---------------------------------------------------------------------------
# lambda-dependent building blocks


def cs_profile(t: float, params: Params) -> tuple[float, float]:
    """The orthogonal-profile pair (c(t), s(t)) with c^2 + s^2 = 1, t >= |v|.

    Evaluated through sinh(x)/x so the v = 0, t -> 0 limit is smooth; the
    exactly degenerate point returns (1/sqrt(2), 1/sqrt(2)).
    """
    v = params.v
    if t < abs(v) - 1e-12:
        raise DomainError(f"t = {t} below |v| = {abs(v)}")
    if t == 0.0 and v == 0.0:
        r = 1.0 / math.sqrt(2.0)
        return r, r
    den = 2.0 * t * sinhc(2.0 * t)
    c2 = math.exp(t + v) * (t - v) * sinhc(t - v) / den
    s2 = math.exp(v - t) * (t + v) * sinhc(t + v) / den
    return math.sqrt(max(c2, 0.0)), math.sqrt(max(s2, 0.0))


@dataclass(frozen=True)
class LambdaBlocks:
    Lambda: np.ndarray  # 2n positive reals (e^{2 lam}, e^{-2 lam})
    rho: np.ndarray  # 2n x 2n real symmetric orthogonal involution
    beta: np.ndarray  # n nonnegative reals
    b: np.ndarray  # quasi-diagonal upper triangular group element


def Lambda_vector(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return np.concatenate([np.exp(2.0 * lam), np.exp(-2.0 * lam)])


def lambda_blocks(lam, params: Params) -> LambdaBlocks:
    """Diagonalization data of the quasi-diagonal slice at positions lambda."""
    lam = np.asarray(lam, dtype=float)
    n = params.n
    if np.any(lam < abs(params.v) - 1e-12):
        raise DomainError("every lambda_i must be >= |v|")
    c = np.empty(n)
    s = np.empty(n)
    for i in range(n):
        c[i], s[i] = cs_profile(float(lam[i]), params)
    rho = np.zeros((2 * n, 2 * n))
    rho[:n, :n] = np.diag(c)
    rho[:n, n:] = np.diag(s)
    rho[n:, :n] = np.diag(s)
    rho[n:, n:] = -np.diag(c)
    beta = 2.0 * np.sqrt(
        np.maximum(np.sinh(lam + params.v) * np.sinh(lam - params.v), 0.0)
    )
    b = np.zeros((2 * n, 2 * n), dtype=complex)
    b[:n, :n] = math.exp(-params.v) * np.eye(n)
    b[n:, n:] = math.exp(params.v) * np.eye(n)
    b[:n, n:] = np.diag(beta.astype(complex))
    return LambdaBlocks(Lambda=Lambda_vector(lam), rho=rho, beta=beta, b=b)


def strong_regular(lam, params: Params, rel_tol: float = 1e-12) -> bool:
    """Nonvanishing of the discriminant-type factor products.

    Checked factor by factor against a relative threshold, so the test is
    meaningful for large position values where the full products overflow.
    """
    L = Lambda_vector(lam)
    a = params.alpha
    a2 = a * a
    y2 = params.y**2
    x2 = params.x**2

    def ok(val: float, scale: float) -> bool:
        return abs(val) > rel_tol * max(1.0, scale)

    m = L.size
    for k in range(m):
        for l in range(m):
            if k == l:
                continue
            if not ok(L[k] - L[l], max(L[k], L[l])):
                return False
            if not ok(L[k] * L[l] - a2, max(L[k] * L[l], a2)):
                return False
    for k in range(m):
        if not ok(L[k] - a, max(L[k], a)):
            return False
        if not ok(y2 * L[k] - a2, max(y2 * L[k], a2)):
            return False
        if not ok(L[k] - y2, max(L[k], y2)):
            return False
        if not ok(L[k] - x2, max(L[k], x2)):
            return False
    return True
