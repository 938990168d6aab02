"""Reduced dynamics.

Exact torus flows on both global complex models, symplectic integration
of the two many-body Hamiltonians on their Darboux charts (implicit
midpoint through the kernels backend), boundary-event detection for the
chart-incomplete flow, and equilibrium diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError, NoConvergence
from .hamiltonians import frequencies_hat, frequencies_m, reduced_actions_hat
from .model import (DarbouxPoint, Params, darboux_from_zeta, hat_lambda_from_Z,
                    in_D_plus, lambda_from_zeta)
from .reconstruct import hat_actions
from .triples import BuildSpec, build_triple

_KINDS = {"H": kernels.KIND_H, "Hhat": kernels.KIND_HHAT}


@dataclass(frozen=True)
class BoundaryEvent:
    """Chart exit: the time at which a square-root argument hits the floor."""

    time: float
    margin: float
    state: np.ndarray
    bracket: float = 0.0  # width of the final bisection bracket


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # rows (lambda_1..n, theta_1..n)
    energy: np.ndarray
    actions: np.ndarray  # per-sample diagnostic action values
    boundary_event: Optional[BoundaryEvent] = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("states must be finite")

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2

    def write_csv(self, fh) -> None:
        n = self.n
        header = (
            ["t"]
            + [f"lambda_{i + 1}" for i in range(n)]
            + [f"theta_{i + 1}" for i in range(n)]
            + ["energy"]
            + [f"action_{i + 1}" for i in range(n)]
        )
        fh.write(",".join(header) + "\n")
        for i in range(self.times.size):
            row = (
                [self.times[i]]
                + list(self.states[i])
                + [self.energy[i]]
                + list(self.actions[i])
            )
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


# ---------------------------------------------------------------------------
# exact torus flows on the two complex models


def torus_flow_hat(Z0, j: int, t: float, params: Params) -> np.ndarray:
    """Exact flow of the j-th hat-side family member on the Z model.

    Moduli are preserved; each component picks up the partial frequency
    sum of the components below it, the last one the full sum.
    """
    z = np.asarray(Z0, dtype=complex)
    n = params.n
    hat_lam = hat_lambda_from_Z(z, params)
    om = frequencies_hat(j, hat_lam, params)
    out = np.empty(n, dtype=complex)
    for k in range(n - 1):
        out[k] = z[k] * np.exp(1j * t * float(np.sum(om[k + 1:])))
    out[n - 1] = z[n - 1] * np.exp(1j * t * float(np.sum(om)))
    return out


def torus_flow_m(zeta0, j: int, t: float, params: Params) -> np.ndarray:
    """Exact flow of the j-th position-side family member on the zeta model."""
    z = np.asarray(zeta0, dtype=complex)
    n = params.n
    lam = lambda_from_zeta(z, params)
    om = frequencies_m(j, lam, params)
    out = np.empty(n, dtype=complex)
    for k in range(n):
        out[k] = z[k] * np.exp(-1j * t * float(np.sum(om[: k + 1])))
    return out


# ---------------------------------------------------------------------------
# symplectic integration on the charts


def _resolve_kind(kind: str) -> tuple[int, int]:
    if kind in _KINDS:
        return _KINDS[kind], 1
    if kind.startswith("action:"):
        j = int(kind.split(":", 1)[1])
        if j < 1:
            raise ValueError("action family index must be >= 1")
        return kernels.KIND_ACTION, j
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


def _actions_for(kind_code: int, jfam: int, y: np.ndarray, params: Params,
                 with_dual: bool) -> np.ndarray:
    n = params.n
    lam, th = y[:n], y[n:]
    if kind_code == kernels.KIND_H and with_dual:
        triple = build_triple(BuildSpec(lam=lam, xi=np.concatenate([th, np.zeros(n)])), params)
        _, hat_lam = hat_actions_from_triple(triple, params)
        return hat_lam
    if kind_code == kernels.KIND_HHAT:
        # position-type moduli of the hat chart (gap coordinates)
        mods = np.empty(n)
        mods[: n - 1] = lam[:-1] - lam[1:] - params.mu
        mods[n - 1] = params.s - lam[0]
        return mods
    return lam.copy()


def hat_actions_from_triple(triple, params: Params):
    from .reconstruct import reconstruct_g

    return hat_actions(reconstruct_g(triple, params), params)


def _localize_boundary(kind_code: int, jfam: int, y: np.ndarray, t: float, dt: float,
                       params: Params, margin_floor: float, time_tol: float,
                       escape_margin: float = 1e-2):
    """Walk up to and bracket the chart exit with explicit trial steps.

    The implicit step cannot contract arbitrarily close to a square-root
    wall, but an explicit midpoint stage is evaluable wherever its stage
    points keep positive arguments, so the crossing time is bisected on
    explicit trial steps from the last good state.  A near miss (margin
    dips but recovers above ``escape_margin``) returns no event and the
    implicit integration resumes from the walked state.
    """
    n, mu, u, v = params.n, params.mu, params.u, params.v

    def margin(state) -> float:
        return float(kernels.sqrt_margin(kind_code, state, n, mu, u, v))

    def good(state) -> bool:
        return bool(margin(state) >= margin_floor) and bool(np.all(np.isfinite(state)))

    # walk forward while full explicit steps stay on the chart
    guard = int(round(1.0 / dt)) + 10
    crossed = False
    for _ in range(guard):
        z, ok = kernels.explicit_step(kind_code, jfam, y, dt, n, mu, u, v)
        if not ok or not good(z):
            crossed = True
            break
        y, t = z, t + dt
        if margin(y) >= escape_margin:
            return y, t, None  # near miss; back to the implicit integrator
    if not crossed:
        raise NoConvergence("boundary localization walked too far")
    lo, hi = 0.0, dt
    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        z, ok = kernels.explicit_step(kind_code, jfam, y, mid, n, mu, u, v)
        if ok and good(z):
            lo = mid
        else:
            hi = mid
    if lo > 0.0:
        y, _ = kernels.explicit_step(kind_code, jfam, y, lo, n, mu, u, v)
        t += lo
    event = BoundaryEvent(
        time=t,
        margin=margin(y),
        state=y.copy(),
        bracket=hi - lo,
    )
    return y, t, event


def integrate_many_body(kind: str, start: DarbouxPoint, t_end: float, dt: float,
                        params: Params, sample_every: int = 0,
                        compute_dual_actions: bool = True,
                        margin_floor: float = 1e-8,
                        event_time_tol: float = 1e-10) -> Trajectory:
    """Implicit-midpoint trajectory of a chart Hamiltonian.

    Integration stops early with a ``BoundaryEvent`` when any square-root
    argument of the Hamiltonian drops below ``margin_floor``; the crossing
    time is localized by bisection to ``event_time_tol``.
    """
    kind_code, jfam = _resolve_kind(kind)
    n, mu, u, v = params.n, params.mu, params.u, params.v
    y = np.concatenate([np.asarray(start.lam, float), np.asarray(start.theta, float)])
    if kind_code == kernels.KIND_H:
        if not in_D_plus(start.lam, params):
            raise DomainError("start outside the open domain")
    if kernels.sqrt_margin(kind_code, y, n, mu, u, v) <= margin_floor:
        raise DomainError("start too close to the chart boundary")

    nsteps = int(round(t_end / dt))
    if sample_every <= 0:
        sample_every = max(1, nsteps // 200)
    times = [0.0]
    states = [y.copy()]
    energies = [kernels.hamiltonian_value(kind_code, jfam, y, n, mu, u, v)]
    actions = [_actions_for(kind_code, jfam, y, params, compute_dual_actions)]
    event = None

    t = 0.0
    steps_left = nsteps
    while steps_left > 0:
        batch = min(sample_every, steps_left)
        y_new, done, hit, converged = kernels.advance(
            kind_code, jfam, y, dt, batch, n, mu, u, v, 1e-13, 50, margin_floor
        )
        t += done * dt
        y = y_new
        steps_left -= done
        if not converged:
            # near the square-root wall the implicit fixed point cannot
            # contract; treat that as a boundary approach, otherwise fail
            if kernels.sqrt_margin(kind_code, y, n, mu, u, v) >= 1e-2:
                raise NoConvergence("implicit midpoint fixed point failed")
            hit = True
        if hit:
            t_before = t
            y, t, event = _localize_boundary(
                kind_code, jfam, y, t, dt, params, margin_floor, event_time_tol
            )
            if event is None:
                # near miss: account for the walked time and resume
                steps_left = max(0, steps_left - int(round((t - t_before) / dt)) - 1)
                continue
            times.append(t)
            states.append(y.copy())
            energies.append(kernels.hamiltonian_value(kind_code, jfam, y, n, mu, u, v))
            actions.append(_actions_for(kind_code, jfam, y, params, compute_dual_actions))
            break
        times.append(t)
        states.append(y.copy())
        energies.append(kernels.hamiltonian_value(kind_code, jfam, y, n, mu, u, v))
        actions.append(_actions_for(kind_code, jfam, y, params, compute_dual_actions))

    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        energy=np.array(energies),
        actions=np.array(actions),
        boundary_event=event,
    )


# ---------------------------------------------------------------------------
# chart-exit demonstration


def _probe_min_margin(zeta0: np.ndarray, params: Params, t_max: float, dt: float,
                      window=None) -> tuple[float, float]:
    """Smallest square-root margin along the trajectory and the time of the dip.

    With a (t_a, t_b) window the fine step dt is only used inside it and the
    approach is covered at the coarse step, which keeps the pure-Python
    backend affordable during the aiming search.
    """
    point = darboux_from_zeta(zeta0, params)
    n, mu, u, v = params.n, params.mu, params.u, params.v
    y = np.concatenate([point.lam, point.theta])
    m_min = kernels.sqrt_margin(kernels.KIND_H, y, n, mu, u, v)
    t_min = 0.0
    t = 0.0
    coarse = 1e-3
    while t < t_max:
        if window is not None and not (window[0] <= t <= window[1]):
            step = coarse
        else:
            step = dt
        y, it = kernels.midpoint_step(kernels.KIND_H, 1, y, step, n, mu, u, v)
        if it < 0:
            break
        t += step
        m = kernels.sqrt_margin(kernels.KIND_H, y, n, mu, u, v)
        if m < m_min:
            m_min, t_min = m, t
        if m_min <= 0.0:
            break
    return m_min, t_min


def steer_to_boundary(params: Params, radius: float = 0.35, t_max: float = 4.0,
                      grid: int = 48, margin_floor: float = 1e-8) -> Trajectory:
    """Aim a trajectory of the main Hamiltonian at the chart boundary.

    The boundary facets have real codimension two, so generic trajectories
    only graze them; this scans the phase of the last complex coordinate
    and refines it by ternary search until the flow dips below the margin
    floor, then reruns the winner with event detection on.  The quadratic
    dip of the margin between steps forces the fine runs onto dt = 1e-4.
    """
    n = params.n
    base = np.array(
        [0.9 + 0.13j] * max(n - 1, 0) + [radius], dtype=complex
    )

    def zeta_of(alpha: float) -> np.ndarray:
        z = base.copy()
        z[n - 1] = radius * np.exp(1j * alpha)
        return z

    coarse = [(alpha, *_probe_min_margin(zeta_of(alpha), params, t_max, 1e-3))
              for alpha in np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)]
    coarse.sort(key=lambda row: row[1])
    width = 2.0 * np.pi / grid

    def refine(lo: float, hi: float, dt_probe: float, iters: int, target: float,
               window=None):
        best = math.inf
        best_alpha = 0.5 * (lo + hi)
        best_t = 0.0
        for _ in range(iters):
            a1 = lo + (hi - lo) / 3.0
            a2 = lo + 2.0 * (hi - lo) / 3.0
            m1, t1 = _probe_min_margin(zeta_of(a1), params, t_max, dt_probe, window)
            m2, t2 = _probe_min_margin(zeta_of(a2), params, t_max, dt_probe, window)
            if m1 < best:
                best, best_alpha, best_t = m1, a1, t1
            if m2 < best:
                best, best_alpha, best_t = m2, a2, t2
            if m1 < m2:
                hi = a2
            else:
                lo = a1
            if best < target:
                break
        return best, best_alpha, best_t, lo, hi

    for alpha0, _, _t0 in coarse[:6]:
        # locate the dip at the coarse step, then resolve it at the fine one
        best, alpha1, t_dip, lo, hi = refine(alpha0 - width, alpha0 + width,
                                             1e-3, 30, 1e-5)
        span = max(hi - lo, 1e-6)
        window = (max(0.0, t_dip - 1.0), min(t_max, t_dip + 1.0))
        best, best_alpha, _, _, _ = refine(alpha1 - 2 * span, alpha1 + 2 * span,
                                           1e-4, 60, margin_floor, window)
        if best >= margin_floor:
            # dip time may shift between step sizes; retry without the window
            best, best_alpha, _, _, _ = refine(alpha1 - 2 * span, alpha1 + 2 * span,
                                               1e-4, 60, margin_floor)
        if best >= margin_floor:
            continue
        start = darboux_from_zeta(zeta_of(best_alpha), params)
        traj = integrate_many_body(
            "H", start, t_max, 1e-4, params,
            sample_every=1000, compute_dual_actions=False,
            margin_floor=margin_floor,
        )
        if traj.boundary_event is not None:
            return traj
    raise DomainError("no boundary crossing found; widen the search")


# ---------------------------------------------------------------------------
# diagnostics


def frequency_report(j: int, values, params: Params, side: str = "hat") -> dict:
    """Frequencies of one family member plus a pairwise-distinctness flag."""
    if side == "hat":
        om = frequencies_hat(j, values, params)
    elif side == "m":
        om = frequencies_m(j, values, params)
    else:
        raise ValueError("side must be 'hat' or 'm'")
    om = np.asarray(om, dtype=float)
    diffs = np.abs(np.subtract.outer(om, om))
    off = diffs[~np.eye(om.size, dtype=bool)]
    min_gap = float(np.min(off)) if off.size else math.inf
    return {
        "frequencies": om,
        "pairwise_differences": diffs,
        "min_gap": min_gap,
        "pairwise_distinct": bool(min_gap > 1e-10),
    }


def equilibrium_scan(params: Params, rng, samples: int = 500) -> dict:
    """Fixed-point and minimality checks at the origin of both models."""
    n = params.n
    zero = np.zeros(n, dtype=complex)
    drift_m = 0.0
    drift_hat = 0.0
    for j in range(1, n + 1):
        for t in (0.4, 1.7):
            drift_m = max(drift_m, float(np.max(np.abs(torus_flow_m(zero, j, t, params)))))
            drift_hat = max(
                drift_hat, float(np.max(np.abs(torus_flow_hat(zero, j, t, params))))
            )
    vertex_lam = lambda_from_zeta(zero, params)
    vertex_value = reduced_actions_hat(vertex_lam, 1, params)
    min_margin_m = math.inf
    for _ in range(samples):
        z = np.array([rng.complex_normal() for _ in range(n)])
        if np.all(np.abs(z) == 0):
            continue
        val = reduced_actions_hat(lambda_from_zeta(z, params), 1, params)
        min_margin_m = min(min_margin_m, val - vertex_value)
    # hat side: family value sum cos(2 q) with sin q = e^{hat_lambda}
    vertex_hat = hat_lambda_from_Z(zero, params)
    hat_vertex_value = float(np.sum(1.0 - 2.0 * np.exp(2.0 * vertex_hat)))
    min_margin_hat = math.inf
    for _ in range(samples):
        z = np.array([rng.complex_normal() for _ in range(n)])
        if np.all(np.abs(z) == 0):
            continue
        h = hat_lambda_from_Z(z, params)
        val = float(np.sum(1.0 - 2.0 * np.exp(2.0 * h)))
        min_margin_hat = min(min_margin_hat, val - hat_vertex_value)
    return {
        "origin_fixed_m": drift_m,
        "origin_fixed_hat": drift_hat,
        "vertex_lambda": vertex_lam,
        "vertex_value_m": vertex_value,
        "min_excess_m": min_margin_m,
        "vertex_value_hat": hat_vertex_value,
        "min_excess_hat": min_margin_hat,
    }
