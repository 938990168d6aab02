"""Explicit solution of the constraint equation.

An admissible triple (wtilde, Q, lambda) packages a constraint-surface
point up to partial gauge: wtilde in C^{2n} is a unit-eigenvector datum,
Q is a Hermitian unitary traceless reflection, and the quadratic
constraint

    Lambda Q Lambda - alpha^2 Q = (Lambda^2 + alpha^2 - 2 y^2 Lambda) + 2 wtilde wtilde^dagger

ties them to the positions lambda.  This module builds all such triples
from (lambda, phases), verifies them, implements the torus gauge action,
the gauge-fixed normal form, and the resulting global complex coordinates
zeta in C^n together with their inverse.

Entries of Q with an apparent pole at gap = mu are always evaluated in a
factored form through sinh(x)/x, never by dividing nearly-zero numbers,
so the formulas extend continuously to the domain boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryPoint, DomainError, PhaseUndefined, SectionUnavailable
from .model import Lambda_vector, Params, in_D_closure, sinhc

RESIDUAL_TOL = 1e-10


def _require_section(params: Params):
    if not params.section_S_valid:
        raise SectionUnavailable("gauge section needs |u| > |v| and u < 0")


# ---------------------------------------------------------------------------
# scalar building blocks


def F_functions(lam, params: Params) -> np.ndarray:
    """The 2n interaction products (index a: +mu family, index n+a: -mu family)."""
    lam = np.asarray(lam, dtype=float)
    n, mu = params.n, params.mu
    if n > 1 and np.any(np.abs(lam[:-1] - lam[1:]) < 1e-13):
        raise DomainError("coinciding lambda entries")
    if np.any(lam < 1e-13):
        raise DomainError("lambda entries must be positive")
    out = np.ones(2 * n)
    for a in range(n):
        for i in range(n):
            if i == a:
                continue
            den = math.sinh(lam[a] - lam[i]) * math.sinh(lam[a] + lam[i])
            if abs(den) < 1e-280:
                raise DomainError("vanishing denominator in interaction product")
            out[a] *= math.sinh(lam[a] + lam[i] + mu) * math.sinh(lam[a] - lam[i] + mu) / den
            out[n + a] *= (
                math.sinh(lam[a] + lam[i] - mu) * math.sinh(lam[a] - lam[i] - mu) / den
            )
    return out


def calF(lam, params: Params) -> np.ndarray:
    """Squared moduli |wtilde_j|^2 as explicit functions of lambda."""
    lam = np.asarray(lam, dtype=float)
    n, mu = params.n, params.mu
    y2 = params.y**2
    f = F_functions(lam, params)
    out = np.empty(2 * n)
    for a in range(n):
        pref = math.exp(-mu) * math.sinh(mu) / math.sinh(2.0 * lam[a])
        out[a] = pref * (math.exp(2.0 * lam[a]) - y2) * f[a]
        out[n + a] = pref * (y2 - math.exp(-2.0 * lam[a])) * f[n + a]
    return out


def _calF_last(lam, params: Params) -> float:
    """calF_{2n} alone (used by the combined corner fraction)."""
    lam = np.asarray(lam, dtype=float)
    n, mu = params.n, params.mu
    y2 = params.y**2
    prod = 1.0
    for i in range(n - 1):
        den = math.sinh(lam[n - 1] - lam[i]) * math.sinh(lam[n - 1] + lam[i])
        prod *= math.sinh(lam[n - 1] + lam[i] - mu) * math.sinh(lam[n - 1] - lam[i] - mu) / den
    return (
        math.exp(-mu)
        * (y2 - math.exp(-2.0 * lam[n - 1]))
        * math.sinh(mu)
        / math.sinh(2.0 * lam[n - 1])
        * prod
    )


@dataclass(frozen=True)
class ModWFactors:
    """|wtilde| split into vanishing boundary roots times positive smooth factors."""

    moduli: np.ndarray  # product of the two columns below
    boundary: np.ndarray  # sqrt factors that vanish on domain facets
    smooth: np.ndarray  # strictly positive analytic factors f_l


def smooth_factors(lam, params: Params) -> np.ndarray:
    """The strictly positive factors f_l of |wtilde_l| on the closed domain.

    Valid on the implemented gauge-section branch (|u| > |v|, u < 0).  The
    boundary roots sqrt(gap - mu) and sqrt(lambda_n - |u|) are divided out
    through sinh(x)/x, so every f_l stays positive and analytic where the
    plain square root of calF would lose smoothness.
    """
    _require_section(params)
    lam = np.asarray(lam, dtype=float)
    n, mu = params.n, params.mu
    au = abs(params.u)
    y2 = params.y**2
    f = np.empty(2 * n)

    if n == 1:
        f[0] = math.sqrt(
            2.0 * sinhc(lam[0] - au) * math.exp(lam[0] + au - mu)
            * math.sinh(mu) / math.sinh(2.0 * lam[0])
        )
        f[1] = math.sqrt(
            math.exp(-mu) * (y2 - math.exp(-2.0 * lam[0]))
            * math.sinh(mu) / math.sinh(2.0 * lam[0])
        )
        return f

    def plus_product(j: int, skip: int) -> float:
        out = 1.0
        for i in range(n):
            if i == j or i == skip:
                continue
            den = math.sinh(lam[j] - lam[i]) * math.sinh(lam[j] + lam[i])
            out *= math.sinh(lam[j] + lam[i] + mu) * math.sinh(lam[j] - lam[i] + mu) / den
        return out

    def minus_product(j: int, skip: int) -> float:
        out = 1.0
        for i in range(n):
            if i == j or i == skip:
                continue
            den = math.sinh(lam[j] - lam[i]) * math.sinh(lam[j] + lam[i])
            out *= math.sinh(lam[j] + lam[i] - mu) * math.sinh(lam[j] - lam[i] - mu) / den
        return out

    f[0] = math.sqrt(
        math.exp(-mu) * (math.exp(2.0 * lam[0]) - y2)
        * math.sinh(mu) / math.sinh(2.0 * lam[0]) * plus_product(0, -1)
    )
    for j in range(1, n - 1):
        base = (
            sinhc(lam[j - 1] - lam[j] - mu)
            * math.exp(-mu) * math.sinh(mu) / math.sinh(2.0 * lam[j])
            * (math.exp(2.0 * lam[j]) - y2)
            * math.sinh(lam[j] + lam[j - 1] + mu)
            / (math.sinh(lam[j - 1] + lam[j]) * math.sinh(lam[j - 1] - lam[j]))
        )
        f[j] = math.sqrt(base * plus_product(j, j - 1))
    base = (
        2.0 * sinhc(lam[n - 2] - lam[n - 1] - mu)
        * math.sinh(mu) / math.sinh(2.0 * lam[n - 1])
        * math.exp(lam[n - 1] + au - mu)
        * math.sinh(lam[n - 1] + lam[n - 2] + mu)
        / (math.sinh(lam[n - 2] + lam[n - 1]) * math.sinh(lam[n - 2] - lam[n - 1]))
    )
    f[n - 1] = math.sqrt(base * sinhc(lam[n - 1] - au) * plus_product(n - 1, n - 2))
    for j in range(n - 1):
        base = (
            sinhc(lam[j] - lam[j + 1] - mu)
            * math.exp(-mu) * math.sinh(mu) / math.sinh(2.0 * lam[j])
            * (y2 - math.exp(-2.0 * lam[j]))
            * math.sinh(lam[j] + lam[j + 1] - mu)
            / (math.sinh(lam[j] + lam[j + 1]) * math.sinh(lam[j] - lam[j + 1]))
        )
        f[n + j] = math.sqrt(base * minus_product(j, j + 1))
    f[2 * n - 1] = math.sqrt(
        math.exp(-mu) * (y2 - math.exp(-2.0 * lam[n - 1]))
        * math.sinh(mu) / math.sinh(2.0 * lam[n - 1]) * minus_product(n - 1, -1)
    )
    return f


def boundary_roots(lam, params: Params) -> np.ndarray:
    """The vanishing square-root factors of |wtilde| on each domain facet."""
    _require_section(params)
    lam = np.asarray(lam, dtype=float)
    n = params.n
    au = abs(params.u)
    r = np.ones(2 * n)
    if n == 1:
        r[0] = math.sqrt(max(lam[0] - au, 0.0))
        return r
    for j in range(1, n - 1):
        r[j] = math.sqrt(max(lam[j - 1] - lam[j] - params.mu, 0.0))
    r[n - 1] = math.sqrt(max(lam[n - 1] - au, 0.0)) * math.sqrt(
        max(lam[n - 2] - lam[n - 1] - params.mu, 0.0)
    )
    for j in range(n - 1):
        r[n + j] = math.sqrt(max(lam[j] - lam[j + 1] - params.mu, 0.0))
    return r


def modW_factored(lam, params: Params) -> ModWFactors:
    """|wtilde_l| as boundary roots times smooth positive factors."""
    roots = boundary_roots(lam, params)
    f = smooth_factors(lam, params)
    return ModWFactors(moduli=roots * f, boundary=roots, smooth=f)


def pair_entry_magnitude(lam, params: Params, j: int) -> float:
    """|Q_{j+1, n+j}| (1-based j in 1..n-1) in factored form, boundary root included."""
    f = smooth_factors(lam, params)
    d = lam[j - 1] - lam[j]
    out = math.exp(params.mu + d) * f[j] * f[params.n + j - 1] / sinhc(d - params.mu)
    if j == params.n - 1:
        out *= math.sqrt(max(lam[params.n - 1] - abs(params.u), 0.0))
    return out


# ---------------------------------------------------------------------------
# triple container and verification


@dataclass(frozen=True)
class AdmissibleTriple:
    wtilde: np.ndarray  # 2n complex
    Q: np.ndarray  # 2n x 2n complex
    lam: np.ndarray  # n reals, descending

    def __post_init__(self):
        object.__setattr__(self, "wtilde", np.asarray(self.wtilde, dtype=complex))
        object.__setattr__(self, "Q", np.asarray(self.Q, dtype=complex))
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))

    @property
    def n(self) -> int:
        return self.lam.size

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda": [float(x) for x in self.lam],
                "wtilde": [[float(z.real), float(z.imag)] for z in self.wtilde],
                "Q": [
                    [[float(z.real), float(z.imag)] for z in row] for row in self.Q
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str, params: Params, tol: float = 1e-8) -> "AdmissibleTriple":
        d = json.loads(text)
        wt = np.array([complex(re, im) for re, im in d["wtilde"]])
        q = np.array([[complex(re, im) for re, im in row] for row in d["Q"]])
        t = cls(wtilde=wt, Q=q, lam=np.array(d["lambda"], dtype=float))
        report = verify_admissible(t, params)
        if report.max_residual > tol:
            raise DomainError(
                f"loaded triple fails admissibility: max residual {report.max_residual:.3e}"
            )
        return t


@dataclass(frozen=True)
class BuildSpec:
    """Positions in the closed domain plus 2n free phases."""

    lam: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        if self.xi.size != 2 * self.lam.size:
            raise ValueError("xi must have 2n entries")


@dataclass(frozen=True)
class AdmissibilityReport:
    constraint: float  # quadratic constraint residual (relative)
    unitarity: float
    hermiticity: float
    trace: float
    eigenvector: float  # |Q wtilde - wtilde|
    norm: float  # | |wtilde|^2 - alpha^2(alpha^{-2n}-1) |
    tol: float = RESIDUAL_TOL

    @property
    def max_residual(self) -> float:
        return max(
            self.constraint,
            self.unitarity,
            self.hermiticity,
            self.trace,
            self.eigenvector,
            self.norm,
        )

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def as_dict(self) -> dict:
        return {
            "constraint": self.constraint,
            "unitarity": self.unitarity,
            "hermiticity": self.hermiticity,
            "trace": self.trace,
            "eigenvector": self.eigenvector,
            "norm": self.norm,
            "max_residual": self.max_residual,
            "passed": self.passed,
        }


def wnorm_target(params: Params) -> float:
    """Forced squared norm of wtilde: alpha^2 (alpha^{-2n} - 1)."""
    a2 = params.alpha**2
    return a2 * (params.alpha ** (-2 * params.n) - 1.0)


def verify_admissible(triple: AdmissibleTriple, params: Params) -> AdmissibilityReport:
    """Pure report of the six admissibility residuals (matrix ones relative)."""
    wt, q, lam = triple.wtilde, triple.Q, triple.lam
    n = params.n
    a2 = params.alpha**2
    y2 = params.y**2
    L = Lambda_vector(lam)
    lhs = (np.outer(L, L) * q) - a2 * q
    rhs = np.diag(L**2 + a2 - 2.0 * y2 * L) + 2.0 * np.outer(wt, wt.conj())
    scale = max(1.0, float(np.linalg.norm(np.outer(L, L) * q)))
    return AdmissibilityReport(
        constraint=float(np.linalg.norm(lhs - rhs)) / scale,
        unitarity=float(np.linalg.norm(q.conj().T @ q - np.eye(2 * n))),
        hermiticity=float(np.linalg.norm(q - q.conj().T)),
        trace=abs(complex(np.trace(q))),
        eigenvector=float(np.linalg.norm(q @ wt - wt)) / max(1.0, float(np.linalg.norm(wt))),
        norm=abs(float(np.real(wt.conj() @ wt)) - wnorm_target(params)),
    )


# ---------------------------------------------------------------------------
# assembly


def _corner_fraction(lam, params: Params) -> float:
    """Q_{2n,2n} as a single fraction, with a two-term series when the
    denominator degenerates at lambda_n = mu/2 (possible only if mu/2 >= |u|)."""
    n, mu = params.n, params.mu
    a2 = params.alpha**2
    y2 = params.y**2

    def numerator(lv):
        lm = math.exp(-2.0 * lv[n - 1])
        return lm * lm + a2 - 2.0 * y2 * lm + 2.0 * _calF_last(lv, params)

    def denominator(lv):
        lm = math.exp(-2.0 * lv[n - 1])
        return lm * lm - a2

    lam = np.asarray(lam, dtype=float)
    if abs(lam[n - 1] - mu / 2.0) >= 1e-6:
        return numerator(lam) / denominator(lam)

    # series around the cancellation point: N and D both vanish linearly
    def num_prime(lv):
        ln = lv[n - 1]
        cf = _calF_last(lv, params)
        dlog = 2.0 * math.exp(-2.0 * ln) / (y2 - math.exp(-2.0 * ln)) - 2.0 / math.tanh(
            2.0 * ln
        )
        for i in range(n - 1):
            dlog += (
                1.0 / math.tanh(ln + lv[i] - mu)
                + 1.0 / math.tanh(ln - lv[i] - mu)
                - 1.0 / math.tanh(ln - lv[i])
                - 1.0 / math.tanh(ln + lv[i])
            )
        return -4.0 * math.exp(-4.0 * ln) + 4.0 * y2 * math.exp(-2.0 * ln) + 2.0 * cf * dlog

    def den_prime(lv):
        return -4.0 * math.exp(-4.0 * lv[n - 1])

    center = lam.copy()
    center[n - 1] = mu / 2.0
    delta = lam[n - 1] - mu / 2.0
    h = 1e-3
    up = center.copy()
    up[n - 1] += h
    dn = center.copy()
    dn[n - 1] -= h
    num_second = (num_prime(up) - num_prime(dn)) / (2.0 * h)
    den_second = (den_prime(up) - den_prime(dn)) / (2.0 * h)
    return (num_prime(center) + 0.5 * num_second * delta) / (
        den_prime(center) + 0.5 * den_second * delta
    )


def assemble_Q(lam, wtilde, pair_phase, params: Params) -> np.ndarray:
    """Build the reflection Q from positions, the vector and the pair phases.

    pair_phase[j-1] (1-based j = 1..n-1) is the unit number
    phase(wtilde_{j+1}) * conj(phase(wtilde_{n+j})), supplied by the caller
    because those component phases may be attached to vanishing moduli.
    """
    lam = np.asarray(lam, dtype=float)
    wt = np.asarray(wtilde, dtype=complex)
    n = params.n
    a2 = params.alpha**2
    y2 = params.y**2
    L = Lambda_vector(lam)
    q = np.zeros((2 * n, 2 * n), dtype=complex)
    for l in range(2 * n):
        for m in range(2 * n):
            if l == m:
                continue
            if 1 <= l <= n - 1 and m == n + l - 1:
                continue  # factored pair below
            if 1 <= m <= n - 1 and l == n + m - 1:
                continue
            q[l, m] = 2.0 * wt[l] * np.conj(wt[m]) / (L[l] * L[m] - a2)
    for j in range(1, n):  # 1-based pair (j+1, n+j) -> 0-based (j, n+j-1)
        mag = pair_entry_magnitude(lam, params, j)
        q[j, n + j - 1] = -pair_phase[j - 1] * mag
        q[n + j - 1, j] = np.conj(q[j, n + j - 1])
    for l in range(2 * n - 1):
        q[l, l] = (L[l] ** 2 + a2 - 2.0 * y2 * L[l] + 2.0 * abs(wt[l]) ** 2) / (
            L[l] ** 2 - a2
        )
    q[2 * n - 1, 2 * n - 1] = _corner_fraction(lam, params)
    return q


def build_triple(spec: BuildSpec, params: Params) -> AdmissibleTriple:
    """Construct the admissible triple with |wtilde_l| forced by lambda and
    the free phases supplied by the caller."""
    lam = spec.lam
    if not in_D_closure(lam, params, eps=1e-12):
        raise DomainError("lambda outside the closed domain")
    phases = np.exp(1j * spec.xi)
    wt = phases * modW_factored(lam, params).moduli
    n = params.n
    pair = np.array(
        [phases[j] * np.conj(phases[n + j - 1]) for j in range(1, n)], dtype=complex
    )
    q = assemble_Q(lam, wt, pair, params)
    return AdmissibleTriple(wtilde=wt, Q=q, lam=lam)


# ---------------------------------------------------------------------------
# gauge action, normal form, global coordinates


def torus_act(tau, triple: AdmissibleTriple) -> AdmissibleTriple:
    """Residual gauge action: wtilde -> tau wtilde, Q -> tau Q tau^{-1}."""
    tau = np.asarray(tau, dtype=complex)
    t = np.concatenate([tau, tau])
    return AdmissibleTriple(
        wtilde=t * triple.wtilde,
        Q=np.outer(t, t.conj()) * triple.Q,
        lam=triple.lam,
    )


def full_phase_act(xi, triple: AdmissibleTriple) -> AdmissibleTriple:
    """Independent phase rotation on all 2n components (still admissible)."""
    ph = np.exp(1j * np.asarray(xi, dtype=float))
    return AdmissibleTriple(
        wtilde=ph * triple.wtilde,
        Q=np.outer(ph, ph.conj()) * triple.Q,
        lam=triple.lam,
    )


def _unit(z: complex, what: str) -> complex:
    mag = abs(z)
    if mag < 1e-13:
        raise PhaseUndefined(f"{what} has vanishing modulus")
    return z / mag


def normal_form(triple: AdmissibleTriple, params: Params) -> tuple[AdmissibleTriple, np.ndarray]:
    """Unique torus-gauge representative.

    Conditions: first and last wtilde components real positive and the
    n-2 distinguished reflection entries real negative.  For n = 1 the
    only never-vanishing component is the last one, which is the single
    condition the one-phase gauge can fix.
    """
    _require_section(params)
    wt, q = triple.wtilde, triple.Q
    n = params.n
    tau = np.ones(n, dtype=complex)
    if n == 1:
        tau[0] = np.conj(_unit(wt[1], "last component"))
    else:
        tau[0] = np.conj(_unit(wt[0], "first component"))
        for j in range(1, n - 1):
            entry = _unit(-q[j, n + j - 1], "gauge-fixing reflection entry")
            tau[j] = tau[j - 1] * np.conj(entry)
        tau[n - 1] = np.conj(_unit(wt[2 * n - 1], "last component"))
    return torus_act(tau, triple), tau


def zeta_from_triple(triple: AdmissibleTriple, params: Params) -> np.ndarray:
    """Global coordinates of the gauge orbit of an admissible triple."""
    _require_section(params)
    n = params.n
    lam = triple.lam
    fixed, _ = normal_form(triple, params)
    f = smooth_factors(lam, params)
    zeta = np.zeros(n, dtype=complex)
    if n == 1:
        zeta[0] = np.conj(fixed.wtilde[0]) / f[0]
        return zeta
    for j in range(n - 1):
        zeta[j] = fixed.wtilde[n + j] / f[n + j]
    d = lam[n - 2] - lam[n - 1]
    corner_factor = math.exp(params.mu + d) * f[n - 1] * f[2 * n - 2] / sinhc(d - params.mu)
    zeta[n - 1] = -np.conj(fixed.Q[n - 1, 2 * n - 2]) / corner_factor
    return zeta


def triple_from_zeta(zeta, params: Params) -> AdmissibleTriple:
    """Inverse of the global chart: the gauge-fixed triple over zeta in C^n."""
    _require_section(params)
    z = np.asarray(zeta, dtype=complex)
    n = params.n
    if z.size != n:
        raise DomainError("zeta must have n entries")
    au = abs(params.u)
    mods = np.abs(z) ** 2
    lam = np.array(
        [au + (n - 1 - j) * params.mu + float(np.sum(mods[j:])) for j in range(n)]
    )
    f = smooth_factors(lam, params)
    wt = np.zeros(2 * n, dtype=complex)
    if n == 1:
        wt[0] = np.conj(z[0]) * f[0]
        wt[1] = f[1]
        pair = np.zeros(0, dtype=complex)
    else:
        wt[0] = f[0]
        for j in range(1, n - 1):
            wt[j] = z[j - 1] * f[j]
        wt[n - 1] = np.conj(z[n - 1]) * z[n - 2] * f[n - 1]
        for j in range(n - 1):
            wt[n + j] = z[j] * f[n + j]
        wt[2 * n - 1] = f[2 * n - 1]
        # gauge-fixed pair phases: all trivial except the corner, whose phase
        # carries conj(zeta_n); at zeta_n = 0 the entry vanishes anyway
        pair = np.ones(n - 1, dtype=complex)
        zn = z[n - 1]
        pair[n - 2] = np.conj(zn) / abs(zn) if abs(zn) > 0 else 1.0
    q = assemble_Q(lam, wt, pair, params)
    return AdmissibleTriple(wtilde=wt, Q=q, lam=lam)


def theta_from_triple(triple: AdmissibleTriple) -> np.ndarray:
    """Gauge-invariant angles from the phase ratios wtilde_j wtilde_{n+j}^*."""
    wt = triple.wtilde
    n = triple.n
    theta = np.empty(n)
    for j in range(n):
        prod = wt[j] * np.conj(wt[n + j])
        if abs(prod) <= 1e-12:
            raise BoundaryPoint(f"modulus of component pair {j + 1} underflows")
        theta[j] = math.atan2(prod.imag, prod.real) % (2.0 * math.pi)
    return theta
