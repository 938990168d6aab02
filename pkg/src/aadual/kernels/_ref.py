"""Pure-Python reference kernels.

Mirrors aadual.kernels._core operation for operation; keep the two files
in sync (the cross-backend test enforces agreement to 1e-12).

State layout: y = (lambda_1..lambda_n, theta_1..theta_n).
Hamilton's equations on the chart with form sum dtheta_j ^ dlambda_j:
lambda_dot = -dH/dtheta, theta_dot = +dH/dlambda.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _sqrt(x: float) -> float:
    """C-style sqrt: NaN for negative arguments instead of ValueError."""
    return math.sqrt(x) if x >= 0.0 else float("nan")


KIND_H = 0
KIND_HHAT = 1
KIND_ACTION = 2


def _value_H(y, n, mu, u, v):
    s2mu = math.sinh(mu) ** 2
    shv2 = math.sinh(v) ** 2
    shu2 = math.sinh(u) ** 2
    p1 = 1.0
    p2 = 1.0
    for k in range(n):
        sh2 = math.sinh(y[k]) ** 2
        ch2 = math.cosh(y[k]) ** 2
        p1 *= 1.0 - s2mu / sh2
        p2 *= 1.0 + s2mu / ch2
    c0 = n * math.exp(u - v) + math.cosh(v - u) / s2mu
    val = math.exp(v - u) * (
        math.sinh(v) * math.sinh(u) / s2mu * p1
        - math.cosh(v) * math.cosh(u) / s2mu * p2
        + c0
    )
    for j in range(n):
        w = (
            1.0
            / math.cosh(y[j]) ** 2
            * _sqrt(
                (1.0 - shv2 / math.sinh(y[j]) ** 2) * (1.0 - shu2 / math.sinh(y[j]) ** 2)
            )
        )
        for k in range(n):
            if k == j:
                continue
            w *= _sqrt(
                (1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
                * (1.0 - s2mu / math.sinh(y[j] + y[k]) ** 2)
            )
        val += math.exp(v - u) * math.cos(y[n + j]) * w
    return val


def _grad_H(y, n, mu, u, v, out):
    s2mu = math.sinh(mu) ** 2
    shv2 = math.sinh(v) ** 2
    shu2 = math.sinh(u) ** 2
    pref = math.exp(v - u)
    p1 = 1.0
    p2 = 1.0
    for k in range(n):
        p1 *= 1.0 - s2mu / math.sinh(y[k]) ** 2
        p2 *= 1.0 + s2mu / math.cosh(y[k]) ** 2
    # potential part
    for a in range(n):
        sh = math.sinh(y[a])
        ch = math.cosh(y[a])
        dlog1 = (2.0 * s2mu * ch / sh**3) / (1.0 - s2mu / sh**2)
        dlog2 = (-2.0 * s2mu * sh / ch**3) / (1.0 + s2mu / ch**2)
        out[a] = pref / s2mu * (
            math.sinh(v) * math.sinh(u) * p1 * dlog1
            - math.cosh(v) * math.cosh(u) * p2 * dlog2
        )
    # interaction part
    for j in range(n):
        shj = math.sinh(y[j])
        chj = math.cosh(y[j])
        kv = 1.0 - shv2 / shj**2
        ku = 1.0 - shu2 / shj**2
        w = _sqrt(kv * ku) / chj**2
        for k in range(n):
            if k == j:
                continue
            w *= _sqrt(
                (1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
                * (1.0 - s2mu / math.sinh(y[j] + y[k]) ** 2)
            )
        cw = pref * math.cos(y[n + j]) * w
        # own-variable derivative
        dlog = -2.0 * shj / chj
        dlog += 0.5 * (2.0 * shv2 * chj / shj**3) / kv
        dlog += 0.5 * (2.0 * shu2 * chj / shj**3) / ku
        for k in range(n):
            if k == j:
                continue
            xm = y[j] - y[k]
            xp = y[j] + y[k]
            gm_m = 1.0 - s2mu / math.sinh(xm) ** 2
            gm_p = 1.0 - s2mu / math.sinh(xp) ** 2
            dlog += 0.5 * (2.0 * s2mu * math.cosh(xm) / math.sinh(xm) ** 3) / gm_m
            dlog += 0.5 * (2.0 * s2mu * math.cosh(xp) / math.sinh(xp) ** 3) / gm_p
        out[j] += cw * dlog
        # cross derivatives
        for a in range(n):
            if a == j:
                continue
            xm = y[j] - y[a]
            xp = y[j] + y[a]
            gm_m = 1.0 - s2mu / math.sinh(xm) ** 2
            gm_p = 1.0 - s2mu / math.sinh(xp) ** 2
            cross = 0.5 * (
                -(2.0 * s2mu * math.cosh(xm) / math.sinh(xm) ** 3) / gm_m
                + (2.0 * s2mu * math.cosh(xp) / math.sinh(xp) ** 3) / gm_p
            )
            out[a] += cw * cross
        out[n + j] = -pref * math.sin(y[n + j]) * w


def _value_Hhat(y, n, mu, u, v):
    s2mu = math.sinh(mu) ** 2
    kap = (math.exp(-2.0 * u) + math.exp(2.0 * v)) / 2.0
    qv = math.exp(2.0 * (v - u))
    val = 0.0
    for j in range(n):
        val += kap * math.exp(-2.0 * y[j])
    for j in range(n):
        e2 = math.exp(-2.0 * y[j])
        u1 = 1.0 - (1.0 + qv) * e2 + qv * e2 * e2
        w = _sqrt(u1)
        for k in range(n):
            if k == j:
                continue
            w *= _sqrt(1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
        val -= math.cos(y[n + j]) * w
    return val


def _grad_Hhat(y, n, mu, u, v, out):
    s2mu = math.sinh(mu) ** 2
    kap = (math.exp(-2.0 * u) + math.exp(2.0 * v)) / 2.0
    qv = math.exp(2.0 * (v - u))
    for a in range(n):
        out[a] = -2.0 * kap * math.exp(-2.0 * y[a])
    for j in range(n):
        e2 = math.exp(-2.0 * y[j])
        u1 = 1.0 - (1.0 + qv) * e2 + qv * e2 * e2
        du1 = 2.0 * (1.0 + qv) * e2 - 4.0 * qv * e2 * e2
        w = _sqrt(u1)
        for k in range(n):
            if k == j:
                continue
            w *= _sqrt(1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
        cw = math.cos(y[n + j]) * w
        dlog = du1 / (2.0 * u1)
        for k in range(n):
            if k == j:
                continue
            xm = y[j] - y[k]
            gm = 1.0 - s2mu / math.sinh(xm) ** 2
            dlog += 0.5 * (2.0 * s2mu * math.cosh(xm) / math.sinh(xm) ** 3) / gm
        out[j] -= cw * dlog
        for a in range(n):
            if a == j:
                continue
            xm = y[j] - y[a]
            gm = 1.0 - s2mu / math.sinh(xm) ** 2
            out[a] -= cw * (-0.5) * (2.0 * s2mu * math.cosh(xm) / math.sinh(xm) ** 3) / gm
        out[n + j] = math.sin(y[n + j]) * w


def _value_action(y, n, jfam):
    val = 0.0
    for l in range(n):
        val += math.cosh(2.0 * jfam * y[l])
    return val


def _grad_action(y, n, jfam, out):
    for l in range(n):
        out[l] = 2.0 * jfam * math.sinh(2.0 * jfam * y[l])
        out[n + l] = 0.0


def hamiltonian_value(kind: int, jfam: int, y, n: int, mu: float, u: float, v: float) -> float:
    y = np.asarray(y, dtype=float)
    if kind == KIND_H:
        return _value_H(y, n, mu, u, v)
    if kind == KIND_HHAT:
        return _value_Hhat(y, n, mu, u, v)
    if kind == KIND_ACTION:
        return _value_action(y, n, jfam)
    raise ValueError(f"unknown kind {kind}")


def hamiltonian_grad(kind: int, jfam: int, y, n: int, mu: float, u: float, v: float) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    out = np.zeros(2 * n)
    if kind == KIND_H:
        _grad_H(y, n, mu, u, v, out)
    elif kind == KIND_HHAT:
        _grad_Hhat(y, n, mu, u, v, out)
    elif kind == KIND_ACTION:
        _grad_action(y, n, jfam, out)
    else:
        raise ValueError(f"unknown kind {kind}")
    return out


def sqrt_margin(kind: int, y, n: int, mu: float, u: float, v: float) -> float:
    """Smallest square-root argument of the chart Hamiltonian (inf if none)."""
    y = np.asarray(y, dtype=float)
    s2mu = math.sinh(mu) ** 2
    if kind == KIND_H:
        m = math.inf
        for j in range(n):
            sh2 = math.sinh(y[j]) ** 2
            m = min(m, 1.0 - math.sinh(v) ** 2 / sh2, 1.0 - math.sinh(u) ** 2 / sh2)
        for j in range(n):
            for k in range(j + 1, n):
                m = min(m, 1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
                m = min(m, 1.0 - s2mu / math.sinh(y[j] + y[k]) ** 2)
        return m
    if kind == KIND_HHAT:
        qv = math.exp(2.0 * (v - u))
        m = math.inf
        for j in range(n):
            e2 = math.exp(-2.0 * y[j])
            m = min(m, 1.0 - (1.0 + qv) * e2 + qv * e2 * e2)
        for j in range(n):
            for k in range(j + 1, n):
                m = min(m, 1.0 - s2mu / math.sinh(y[j] - y[k]) ** 2)
        return m
    return math.inf


def _rhs(kind, jfam, y, n, mu, u, v, grad_buf, rhs_buf):
    g = hamiltonian_grad(kind, jfam, y, n, mu, u, v)
    rhs_buf[:n] = -g[n:]
    rhs_buf[n:] = g[:n]
    return rhs_buf


def midpoint_step(kind: int, jfam: int, y, dt: float, n: int, mu: float, u: float,
                  v: float, tol: float = 1e-13, maxit: int = 50):
    """One implicit-midpoint step; returns (y_new, iterations).

    iterations = -1 signals that the fixed point did not converge.
    """
    y = np.asarray(y, dtype=float)
    dim = 2 * n
    rhs = np.empty(dim)
    _rhs(kind, jfam, y, n, mu, u, v, None, rhs)
    z = y + dt * rhs
    for it in range(1, maxit + 1):
        _rhs(kind, jfam, 0.5 * (y + z), n, mu, u, v, None, rhs)
        z_new = y + dt * rhs
        err = float(np.max(np.abs(z_new - z)))
        z = z_new
        if err <= tol * (1.0 + float(np.max(np.abs(z)))):
            return z, it
    return z, -1


def explicit_step(kind: int, jfam: int, y, h: float, n: int, mu: float, u: float,
                  v: float):
    """One explicit midpoint (RK2) step; returns (z, ok).

    ok = False when a stage point leaves the chart (some square-root
    argument non-positive), which is exactly the boundary signal the
    event bisection probes for.
    """
    y = np.asarray(y, dtype=float)
    rhs = np.empty(2 * n)
    _rhs(kind, jfam, y, n, mu, u, v, None, rhs)
    y_mid = y + 0.5 * h * rhs
    m = sqrt_margin(kind, y_mid, n, mu, u, v)
    if not (m > 0.0) or not np.all(np.isfinite(y_mid)):
        return y.copy(), False
    _rhs(kind, jfam, y_mid, n, mu, u, v, None, rhs)
    z = y + h * rhs
    if not np.all(np.isfinite(z)):
        return y.copy(), False
    return z, True


def advance(kind: int, jfam: int, y, dt: float, nsteps: int, n: int, mu: float,
            u: float, v: float, tol: float = 1e-13, maxit: int = 50,
            margin_stop: float = 0.0):
    """Take up to nsteps midpoint steps, stopping before a margin crossing.

    Returns (y_end, steps_taken, hit_boundary, converged).  On a boundary
    hit, y_end is the last state with margin >= margin_stop.
    """
    y = np.asarray(y, dtype=float).copy()
    for step in range(nsteps):
        z, it = midpoint_step(kind, jfam, y, dt, n, mu, u, v, tol, maxit)
        if it < 0:
            return y, step, False, False
        m = sqrt_margin(kind, z, n, mu, u, v)
        if not (m >= margin_stop):  # also catches NaN from an overshoot
            return y, step, True, True
        y = z
    return y, nsteps, False, True
