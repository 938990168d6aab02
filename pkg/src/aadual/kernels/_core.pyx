# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; arithmetic mirrors aadual.kernels._ref line for line."""

from libc.math cimport cos, cosh, exp, sin, sinh, sqrt

import numpy as np

BACKEND = "compiled"

KIND_H = 0
KIND_HHAT = 1
KIND_ACTION = 2

cdef double INF = float("inf")


cdef double _value_H(double[:] y, int n, double mu, double u, double v) noexcept:
    cdef double s2mu = sinh(mu) ** 2
    cdef double shv2 = sinh(v) ** 2
    cdef double shu2 = sinh(u) ** 2
    cdef double p1 = 1.0, p2 = 1.0, sh2, ch2, c0, val, w
    cdef int j, k
    for k in range(n):
        sh2 = sinh(y[k]) ** 2
        ch2 = cosh(y[k]) ** 2
        p1 *= 1.0 - s2mu / sh2
        p2 *= 1.0 + s2mu / ch2
    c0 = n * exp(u - v) + cosh(v - u) / s2mu
    val = exp(v - u) * (sinh(v) * sinh(u) / s2mu * p1
                        - cosh(v) * cosh(u) / s2mu * p2 + c0)
    for j in range(n):
        w = (1.0 / cosh(y[j]) ** 2
             * sqrt((1.0 - shv2 / sinh(y[j]) ** 2) * (1.0 - shu2 / sinh(y[j]) ** 2)))
        for k in range(n):
            if k == j:
                continue
            w *= sqrt((1.0 - s2mu / sinh(y[j] - y[k]) ** 2)
                      * (1.0 - s2mu / sinh(y[j] + y[k]) ** 2))
        val += exp(v - u) * cos(y[n + j]) * w
    return val


cdef void _grad_H(double[:] y, int n, double mu, double u, double v, double[:] out) noexcept:
    cdef double s2mu = sinh(mu) ** 2
    cdef double shv2 = sinh(v) ** 2
    cdef double shu2 = sinh(u) ** 2
    cdef double pref = exp(v - u)
    cdef double p1 = 1.0, p2 = 1.0
    cdef double sh, ch, dlog1, dlog2, shj, chj, kv, ku, w, cw, dlog, xm, xp, gm_m, gm_p, cross
    cdef int a, j, k
    for k in range(n):
        p1 *= 1.0 - s2mu / sinh(y[k]) ** 2
        p2 *= 1.0 + s2mu / cosh(y[k]) ** 2
    for a in range(n):
        sh = sinh(y[a])
        ch = cosh(y[a])
        dlog1 = (2.0 * s2mu * ch / sh ** 3) / (1.0 - s2mu / sh ** 2)
        dlog2 = (-2.0 * s2mu * sh / ch ** 3) / (1.0 + s2mu / ch ** 2)
        out[a] = pref / s2mu * (sinh(v) * sinh(u) * p1 * dlog1
                                - cosh(v) * cosh(u) * p2 * dlog2)
    for j in range(n):
        shj = sinh(y[j])
        chj = cosh(y[j])
        kv = 1.0 - shv2 / shj ** 2
        ku = 1.0 - shu2 / shj ** 2
        w = sqrt(kv * ku) / chj ** 2
        for k in range(n):
            if k == j:
                continue
            w *= sqrt((1.0 - s2mu / sinh(y[j] - y[k]) ** 2)
                      * (1.0 - s2mu / sinh(y[j] + y[k]) ** 2))
        cw = pref * cos(y[n + j]) * w
        dlog = -2.0 * shj / chj
        dlog += 0.5 * (2.0 * shv2 * chj / shj ** 3) / kv
        dlog += 0.5 * (2.0 * shu2 * chj / shj ** 3) / ku
        for k in range(n):
            if k == j:
                continue
            xm = y[j] - y[k]
            xp = y[j] + y[k]
            gm_m = 1.0 - s2mu / sinh(xm) ** 2
            gm_p = 1.0 - s2mu / sinh(xp) ** 2
            dlog += 0.5 * (2.0 * s2mu * cosh(xm) / sinh(xm) ** 3) / gm_m
            dlog += 0.5 * (2.0 * s2mu * cosh(xp) / sinh(xp) ** 3) / gm_p
        out[j] += cw * dlog
        for a in range(n):
            if a == j:
                continue
            xm = y[j] - y[a]
            xp = y[j] + y[a]
            gm_m = 1.0 - s2mu / sinh(xm) ** 2
            gm_p = 1.0 - s2mu / sinh(xp) ** 2
            cross = 0.5 * (-(2.0 * s2mu * cosh(xm) / sinh(xm) ** 3) / gm_m
                           + (2.0 * s2mu * cosh(xp) / sinh(xp) ** 3) / gm_p)
            out[a] += cw * cross
        out[n + j] = -pref * sin(y[n + j]) * w


cdef double _value_Hhat(double[:] y, int n, double mu, double u, double v) noexcept:
    cdef double s2mu = sinh(mu) ** 2
    cdef double kap = (exp(-2.0 * u) + exp(2.0 * v)) / 2.0
    cdef double qv = exp(2.0 * (v - u))
    cdef double val = 0.0
    cdef double e2, u1, w
    cdef int j, k
    for j in range(n):
        val += kap * exp(-2.0 * y[j])
    for j in range(n):
        e2 = exp(-2.0 * y[j])
        u1 = 1.0 - (1.0 + qv) * e2 + qv * e2 * e2
        w = sqrt(u1)
        for k in range(n):
            if k == j:
                continue
            w *= sqrt(1.0 - s2mu / sinh(y[j] - y[k]) ** 2)
        val -= cos(y[n + j]) * w
    return val


cdef void _grad_Hhat(double[:] y, int n, double mu, double u, double v, double[:] out) noexcept:
    cdef double s2mu = sinh(mu) ** 2
    cdef double kap = (exp(-2.0 * u) + exp(2.0 * v)) / 2.0
    cdef double qv = exp(2.0 * (v - u))
    cdef double e2, u1, du1, w, cw, dlog, xm, gm
    cdef int a, j, k
    for a in range(n):
        out[a] = -2.0 * kap * exp(-2.0 * y[a])
    for j in range(n):
        e2 = exp(-2.0 * y[j])
        u1 = 1.0 - (1.0 + qv) * e2 + qv * e2 * e2
        du1 = 2.0 * (1.0 + qv) * e2 - 4.0 * qv * e2 * e2
        w = sqrt(u1)
        for k in range(n):
            if k == j:
                continue
            w *= sqrt(1.0 - s2mu / sinh(y[j] - y[k]) ** 2)
        cw = cos(y[n + j]) * w
        dlog = du1 / (2.0 * u1)
        for k in range(n):
            if k == j:
                continue
            xm = y[j] - y[k]
            gm = 1.0 - s2mu / sinh(xm) ** 2
            dlog += 0.5 * (2.0 * s2mu * cosh(xm) / sinh(xm) ** 3) / gm
        out[j] -= cw * dlog
        for a in range(n):
            if a == j:
                continue
            xm = y[j] - y[a]
            gm = 1.0 - s2mu / sinh(xm) ** 2
            out[a] -= cw * (-0.5) * (2.0 * s2mu * cosh(xm) / sinh(xm) ** 3) / gm
        out[n + j] = sin(y[n + j]) * w


cdef double _value_action(double[:] y, int n, int jfam) noexcept:
    cdef double val = 0.0
    cdef int l
    for l in range(n):
        val += cosh(2.0 * jfam * y[l])
    return val


cdef void _grad_action(double[:] y, int n, int jfam, double[:] out) noexcept:
    cdef int l
    for l in range(n):
        out[l] = 2.0 * jfam * sinh(2.0 * jfam * y[l])
        out[n + l] = 0.0


def hamiltonian_value(int kind, int jfam, y, int n, double mu, double u, double v):
    cdef double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    if kind == KIND_H:
        return _value_H(yv, n, mu, u, v)
    if kind == KIND_HHAT:
        return _value_Hhat(yv, n, mu, u, v)
    if kind == KIND_ACTION:
        return _value_action(yv, n, jfam)
    raise ValueError(f"unknown kind {kind}")


def hamiltonian_grad(int kind, int jfam, y, int n, double mu, double u, double v):
    cdef double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    out = np.zeros(2 * n)
    cdef double[:] ov = out
    if kind == KIND_H:
        _grad_H(yv, n, mu, u, v, ov)
    elif kind == KIND_HHAT:
        _grad_Hhat(yv, n, mu, u, v, ov)
    elif kind == KIND_ACTION:
        _grad_action(yv, n, jfam, ov)
    else:
        raise ValueError(f"unknown kind {kind}")
    return out


cdef double _margin(int kind, double[:] y, int n, double mu, double u, double v) noexcept:
    cdef double s2mu = sinh(mu) ** 2
    cdef double m = INF
    cdef double sh2, e2, qv, cand
    cdef int j, k
    if kind == KIND_H:
        for j in range(n):
            sh2 = sinh(y[j]) ** 2
            cand = 1.0 - sinh(v) ** 2 / sh2
            if cand < m:
                m = cand
            cand = 1.0 - sinh(u) ** 2 / sh2
            if cand < m:
                m = cand
        for j in range(n):
            for k in range(j + 1, n):
                cand = 1.0 - s2mu / sinh(y[j] - y[k]) ** 2
                if cand < m:
                    m = cand
                cand = 1.0 - s2mu / sinh(y[j] + y[k]) ** 2
                if cand < m:
                    m = cand
        return m
    if kind == KIND_HHAT:
        qv = exp(2.0 * (v - u))
        for j in range(n):
            e2 = exp(-2.0 * y[j])
            cand = 1.0 - (1.0 + qv) * e2 + qv * e2 * e2
            if cand < m:
                m = cand
        for j in range(n):
            for k in range(j + 1, n):
                cand = 1.0 - s2mu / sinh(y[j] - y[k]) ** 2
                if cand < m:
                    m = cand
        return m
    return INF


def sqrt_margin(int kind, y, int n, double mu, double u, double v):
    cdef double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    return _margin(kind, yv, n, mu, u, v)


cdef void _rhs(int kind, int jfam, double[:] y, int n, double mu, double u,
               double v, double[:] grad_buf, double[:] rhs_buf) noexcept:
    cdef int i
    for i in range(2 * n):
        grad_buf[i] = 0.0
    if kind == KIND_H:
        _grad_H(y, n, mu, u, v, grad_buf)
    elif kind == KIND_HHAT:
        _grad_Hhat(y, n, mu, u, v, grad_buf)
    else:
        _grad_action(y, n, jfam, grad_buf)
    for i in range(n):
        rhs_buf[i] = -grad_buf[n + i]
        rhs_buf[n + i] = grad_buf[i]


cdef int _step(int kind, int jfam, double[:] y, double dt, int n, double mu,
               double u, double v, double tol, int maxit,
               double[:] grad_buf, double[:] rhs_buf, double[:] z,
               double[:] mid) noexcept:
    cdef int i, it
    cdef double err, zmax, d
    _rhs(kind, jfam, y, n, mu, u, v, grad_buf, rhs_buf)
    for i in range(2 * n):
        z[i] = y[i] + dt * rhs_buf[i]
    for it in range(1, maxit + 1):
        for i in range(2 * n):
            mid[i] = 0.5 * (y[i] + z[i])
        _rhs(kind, jfam, mid, n, mu, u, v, grad_buf, rhs_buf)
        err = 0.0
        zmax = 0.0
        for i in range(2 * n):
            d = y[i] + dt * rhs_buf[i]
            if not (abs(d - z[i]) <= err):  # NaN-propagating maximum
                err = abs(d - z[i])
            z[i] = d
            if not (abs(z[i]) <= zmax):
                zmax = abs(z[i])
        if err <= tol * (1.0 + zmax):
            return it
    return -1


def midpoint_step(int kind, int jfam, y, double dt, int n, double mu, double u,
                  double v, double tol=1e-13, int maxit=50):
    cdef double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    z = np.empty(2 * n)
    grad_buf = np.empty(2 * n)
    rhs_buf = np.empty(2 * n)
    mid = np.empty(2 * n)
    cdef int it = _step(kind, jfam, yv, dt, n, mu, u, v, tol, maxit,
                        grad_buf, rhs_buf, z, mid)
    return z, it


def explicit_step(int kind, int jfam, y, double h, int n, double mu, double u,
                  double v):
    cdef double[:] yv = np.ascontiguousarray(y, dtype=np.float64)
    rhs = np.empty(2 * n)
    cdef double[:] rv = rhs
    grad_buf = np.empty(2 * n)
    y_mid = np.empty(2 * n)
    cdef double[:] mv = y_mid
    z = np.empty(2 * n)
    cdef double[:] zv = z
    cdef int i
    cdef double m
    _rhs(kind, jfam, yv, n, mu, u, v, grad_buf, rv)
    for i in range(2 * n):
        mv[i] = yv[i] + 0.5 * h * rv[i]
    m = _margin(kind, mv, n, mu, u, v)
    if not (m > 0.0) or not np.all(np.isfinite(y_mid)):
        return np.array(y, dtype=np.float64, copy=True), False
    _rhs(kind, jfam, mv, n, mu, u, v, grad_buf, rv)
    for i in range(2 * n):
        zv[i] = yv[i] + h * rv[i]
    if not np.all(np.isfinite(z)):
        return np.array(y, dtype=np.float64, copy=True), False
    return z, True


def advance(int kind, int jfam, y, double dt, int nsteps, int n, double mu,
            double u, double v, double tol=1e-13, int maxit=50,
            double margin_stop=0.0):
    out = np.array(y, dtype=np.float64, copy=True)
    cdef double[:] yv = out
    z = np.empty(2 * n)
    cdef double[:] zv = z
    grad_buf = np.empty(2 * n)
    rhs_buf = np.empty(2 * n)
    mid = np.empty(2 * n)
    cdef int step, it, i
    cdef double m
    for step in range(nsteps):
        it = _step(kind, jfam, yv, dt, n, mu, u, v, tol, maxit,
                   grad_buf, rhs_buf, zv, mid)
        if it < 0:
            return out, step, False, False
        m = _margin(kind, zv, n, mu, u, v)
        if not (m >= margin_stop):  # also catches NaN from an overshoot
            return out, step, True, True
        for i in range(2 * n):
            yv[i] = zv[i]
    return out, nsteps, False, True
