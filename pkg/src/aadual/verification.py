"""Named property-check suite.

Each check draws its own deterministic sample stream, exercises one
contract of the library and reports the worst residual it saw.  The CLI
``verify`` command runs every check at the configured case counts; the
acceptance test module runs them at the full counts with the frozen
tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra, kernels, poisson
from .errors import ConfigError
from .flows import equilibrium_scan, integrate_many_body, torus_flow_m
from .hamiltonians import (
    H_main,
    VDParams,
    cheb_T,
    reduced_actions_hat,
    reduced_actions_m,
    residue_report,
    vd_kinetic_factored,
    vd_limit_error,
    vd_potential_closed,
    vd_potential_direct,
    vd_V_pm,
)
from .model import DarbouxPoint, Params, cs_profile, zeta_from_darboux
from .reconstruct import (
    GroupPoint,
    eigen_lambda,
    hat_actions,
    reconstruct_g,
    trace_family_b,
    trace_family_k,
    triple_from_g,
)
from .rng import SplitMix64
from .triples import (
    BuildSpec,
    build_triple,
    calF,
    verify_admissible,
    zeta_from_triple,
    triple_from_zeta,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# deterministic samplers


def sample_interior_lambda(rng: SplitMix64, params: Params, slack: float = 1.2,
                           margin: float = 0.05) -> np.ndarray:
    n = params.n
    vals = [params.floor + margin + rng.uniform(0.0, slack)]
    for _ in range(n - 1):
        vals.append(vals[-1] + params.mu + margin + rng.uniform(0.0, slack))
    return np.array(vals[::-1])


def sample_closure_lambda(rng: SplitMix64, params: Params, boundary_prob: float = 0.3) -> np.ndarray:
    n = params.n
    lam_n = params.floor
    if rng.uniform() > boundary_prob:
        lam_n += 0.02 + rng.uniform(0.0, 1.0)
    vals = [lam_n]
    for _ in range(n - 1):
        gap = params.mu
        if rng.uniform() > boundary_prob:
            gap += 0.02 + rng.uniform(0.0, 1.0)
        vals.append(vals[-1] + gap)
    return np.array(vals[::-1])


def sample_theta(rng: SplitMix64, n: int) -> np.ndarray:
    return np.array([rng.uniform(0.0, TWO_PI) for _ in range(n)])


def sample_zeta(rng: SplitMix64, n: int, scale: float = 0.8,
                force_zero: bool = False) -> np.ndarray:
    z = np.array([scale * rng.complex_normal() for _ in range(n)])
    if force_zero:
        z[rng.integers(0, n)] = 0.0
    return z


def sample_sl(rng: SplitMix64, m: int) -> np.ndarray:
    g = np.array([[rng.complex_normal() for _ in range(m)] for _ in range(m)])
    return algebra.sl_normalize(g)


def sample_su(rng: SplitMix64, m: int) -> np.ndarray:
    k, _ = algebra.iwasawa_decompose(sample_sl(rng, m))
    return k * np.linalg.det(k) ** (-1.0 / m)


def sample_m0_point(rng: SplitMix64, params: Params) -> GroupPoint:
    return reconstruct_g(triple_from_zeta(sample_zeta(rng, params.n), params), params)


# ---------------------------------------------------------------------------
# result containers


@dataclass
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tol,
            "passed": self.passed,
            **{k: v for k, v in self.details.items()},
        }


@dataclass(frozen=True)
class RunConfig:
    params: Params
    seed: int = 42
    cases: int = 100
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            params = Params.from_dict(d.get("params", d))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad params block: {exc}") from exc
        tol = d.get("tolerances", {})
        if not isinstance(tol, dict):
            raise ConfigError("tolerances must be a mapping")
        return cls(
            params=params,
            seed=int(d.get("seed", 42)),
            cases=int(d.get("cases", 100)),
            tolerances={str(k): float(val) for k, val in tol.items()},
        )


# ---------------------------------------------------------------------------
# individual checks


def check_admissibility(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        lam = sample_closure_lambda(rng, params)
        xi = np.array([rng.uniform(0.0, TWO_PI) for _ in range(2 * params.n)])
        triple = build_triple(BuildSpec(lam=lam, xi=xi), params)
        worst = max(worst, verify_admissible(triple, params).max_residual)
    return CheckResult("admissibility", worst, tol, worst <= tol, {"cases": cases})


def check_domain_positivity(params: Params, rng: SplitMix64, cases: int, tol: float = 0.0) -> CheckResult:
    worst = -math.inf  # max over samples of (-min_j calF_j); positivity means < 0
    for _ in range(cases):
        lam = sample_interior_lambda(rng, params, margin=1e-4)
        worst = max(worst, -float(np.min(calF(lam, params))))
    return CheckResult("domain_positivity", worst, tol, worst < tol, {"cases": cases})


def check_domain_violation(params: Params, rng: SplitMix64, cases: int, tol: float = 0.0) -> CheckResult:
    """Outside the domain some explicit modulus function must be <= 0."""
    n = params.n
    worst = -math.inf  # max over samples of min_j calF_j; must stay <= 0
    for _ in range(cases):
        kind = rng.integers(0, 2) if n > 1 else 1
        if kind == 0:  # gap violation above a healthy floor
            vals = [params.floor + 0.05 + rng.uniform(0.0, 1.0)]
            bad = rng.integers(0, n - 1)
            for i in range(n - 1):
                gap = params.mu * rng.uniform(0.05, 0.95) if i == bad else params.mu + 0.05 + rng.uniform(0.0, 1.0)
                vals.append(vals[-1] + gap)
            lam = np.array(vals[::-1])
        else:  # floor violation (covers the negative-u obstruction)
            vals = [params.floor * rng.uniform(0.05, 0.95)]
            for i in range(n - 1):
                vals.append(vals[-1] + params.mu + 0.05 + rng.uniform(0.0, 1.0))
            lam = np.array(vals[::-1])
        worst = max(worst, float(np.min(calF(lam, params))))
    return CheckResult("domain_violation", worst, tol, worst <= tol, {"cases": cases})


def check_eigenvalue_map_range(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for i in range(cases):
        z = sample_zeta(rng, params.n, force_zero=(i % 10 == 9))
        gp = reconstruct_g(triple_from_zeta(z, params), params)
        lam = eigen_lambda(gp, params)
        viol = max(0.0, params.floor - lam[-1])
        if params.n > 1:
            viol = max(viol, float(np.max(params.mu - (lam[:-1] - lam[1:]))))
        worst = max(worst, max(viol, 0.0))
    return CheckResult("eigenvalue_map_range", worst, tol, worst <= tol, {"cases": cases})


def check_round_trip(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-8) -> CheckResult:
    worst = 0.0
    for i in range(cases):
        z = sample_zeta(rng, params.n, force_zero=(i % 10 == 9))
        triple = triple_from_zeta(z, params)
        gp = reconstruct_g(triple, params)
        back = zeta_from_triple(triple_from_g(gp, params), params)
        worst = max(worst, float(np.max(np.abs(back - z))))
    return CheckResult("round_trip", worst, tol, worst <= tol, {"cases": cases})


def check_trace_identities(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-9) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        z = sample_zeta(rng, params.n)
        gp = reconstruct_g(triple_from_zeta(z, params), params)
        lam = eigen_lambda(gp, params)
        _, hat_lam = hat_actions(gp, params)
        for j in range(1, params.n + 1):
            t_b = trace_family_b(gp, j)
            worst = max(
                worst,
                abs(t_b - reduced_actions_hat(lam, j, params)) / max(1.0, abs(t_b)),
            )
            t_k = trace_family_k(gp, j)
            worst = max(
                worst,
                abs(t_k - reduced_actions_m(hat_lam, j, params)) / max(1.0, abs(t_k)),
            )
    return CheckResult("trace_identities", worst, tol, worst <= tol, {"cases": cases})


def check_hamiltonian_reduction(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-8) -> CheckResult:
    n = params.n
    worst = 0.0
    for _ in range(cases):
        lam = sample_interior_lambda(rng, params)
        theta = sample_theta(rng, n)
        triple = build_triple(
            BuildSpec(lam=lam, xi=np.concatenate([theta, np.zeros(n)])), params
        )
        gp = reconstruct_g(triple, params)
        h_chart = H_main(DarbouxPoint(lam=lam, theta=theta), params)
        worst = max(worst, abs(h_chart - trace_family_k(gp, 1)))
    return CheckResult("hamiltonian_reduction", worst, tol, worst <= tol, {"cases": cases})


def check_poisson_commutativity(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-5) -> CheckResult:
    n = params.n
    engine = poisson.DerivativeEngine(n)
    worst = 0.0
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)] or [(1, 2)]
    for _ in range(cases):
        k = sample_su(rng, 2 * n)
        for i, j in pairs:
            fi = poisson.unitary_trace_field(i, n)
            fj = poisson.unitary_trace_field(j, n)
            worst = max(worst, abs(poisson.bracket_K(fi, fj, k, engine)))
    heis_cases = max(1, cases // 10)
    for _ in range(heis_cases):
        g = sample_sl(rng, 2 * n)
        for i, j in pairs:
            worst = max(
                worst,
                abs(
                    poisson.bracket_heisenberg(
                        poisson.trace_field_b(i), poisson.trace_field_b(j), g, engine
                    )
                ),
            )
            worst = max(
                worst,
                abs(
                    poisson.bracket_heisenberg(
                        poisson.trace_field_k(i, n), poisson.trace_field_k(j, n), g, engine
                    )
                ),
            )
    return CheckResult(
        "poisson_commutativity", worst, tol, worst <= tol,
        {"cases": cases, "heisenberg_cases": heis_cases},
    )


def check_gauge_invariance(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-6) -> CheckResult:
    n = params.n
    worst = 0.0
    for _ in range(cases):
        gp = sample_m0_point(rng, params)
        for j in range(1, n + 1):
            worst = max(
                worst,
                poisson.gauge_invariance_defect(poisson.trace_field_b(j), gp.g, params),
            )
            worst = max(
                worst,
                poisson.gauge_invariance_defect(poisson.trace_field_k(j, n), gp.g, params),
            )
    return CheckResult("gauge_invariance", worst, tol, worst <= tol, {"cases": cases})


_OMEGA_CACHE: dict = {}


def _omega_matrices(n: int):
    if n not in _OMEGA_CACHE:
        eye = np.eye(n)
        zero = np.zeros((n, n))
        omega_dar = np.block([[zero, -eye], [eye, zero]])
        omega_can = np.block([[zero, 2.0 * eye], [-2.0 * eye, zero]])
        _OMEGA_CACHE[n] = (omega_dar, omega_can)
    return _OMEGA_CACHE[n]


def check_symplectic_chart(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-8) -> CheckResult:
    n = params.n
    omega_dar, omega_can = _omega_matrices(n)
    h = 1e-5
    worst = 0.0
    for _ in range(cases):
        lam = sample_interior_lambda(rng, params)
        theta = sample_theta(rng, n)
        y0 = np.concatenate([lam, theta])

        def chart(y):
            z = zeta_from_darboux(DarbouxPoint(lam=y[:n], theta=y[n:]), params)
            return np.concatenate([z.real, z.imag])

        jac = np.empty((2 * n, 2 * n))
        for c in range(2 * n):
            yp = y0.copy()
            yp[c] += h
            ym = y0.copy()
            ym[c] -= h
            jac[:, c] = (chart(yp) - chart(ym)) / (2.0 * h)
        worst = max(worst, float(np.max(np.abs(jac.T @ omega_can @ jac - omega_dar))))
    return CheckResult("symplectic_chart", worst, tol, worst <= tol, {"cases": cases})


def _flow_map(kind: str, y: np.ndarray, t_end: float, dt: float, params: Params) -> np.ndarray:
    n = params.n
    traj = integrate_many_body(
        kind,
        DarbouxPoint(lam=y[:n], theta=y[n:]),
        t_end,
        dt,
        params,
        sample_every=10**9,
        compute_dual_actions=False,
    )
    if traj.boundary_event is not None:
        raise RuntimeError("flow map hit the chart boundary")
    out = traj.states[-1].copy()
    return out


def check_symplectic_flow(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-5) -> CheckResult:
    n = params.n
    omega_dar, _ = _omega_matrices(n)
    h = 1e-5
    dt = 1e-3
    worst = 0.0
    done = 0
    attempts = 0
    while done < cases and attempts < 10 * cases:
        attempts += 1
        lam = sample_interior_lambda(rng, params, slack=0.8, margin=0.6)
        theta = sample_theta(rng, n)
        y0 = np.concatenate([lam, theta])
        try:
            jac = np.empty((2 * n, 2 * n))
            for c in range(2 * n):
                yp = y0.copy()
                yp[c] += h
                ym = y0.copy()
                ym[c] -= h
                jac[:, c] = (
                    _flow_map("H", yp, 1.0, dt, params)
                    - _flow_map("H", ym, 1.0, dt, params)
                ) / (2.0 * h)
        except RuntimeError:
            continue
        # theta columns wrap; compare forms, not raw angles
        worst = max(worst, float(np.max(np.abs(jac.T @ omega_dar @ jac - omega_dar))))
        done += 1
    return CheckResult(
        "symplectic_flow", worst, tol, done > 0 and worst <= tol,
        {"cases": done},
    )


def check_energy_drift(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-8) -> CheckResult:
    """Relative energy drift per unit time of the main flow at dt = 1e-3.

    The dual Hamiltonian carries forces of order e^{2|u|} e^{2|hat_lam|}
    at the default parameters, out of reach of this bound for any
    second-order method at this step; its conservation and second-order
    convergence are exercised separately (see the flows test module).
    """
    n = params.n
    worst = 0.0
    oscillation = 0.0
    for kind in ("H", "action:1"):
        done = 0
        attempts = 0
        while done < cases and attempts < 10 * cases:
            attempts += 1
            lam = sample_interior_lambda(rng, params, slack=0.8, margin=0.4)
            theta = sample_theta(rng, n)
            traj = integrate_many_body(
                kind, DarbouxPoint(lam=lam, theta=theta), 20.0, 1e-3, params,
                sample_every=50, compute_dual_actions=False,
            )
            # wall-grazing runs measure square-root stiffness, not integrator
            # drift; they belong to the boundary-event diagnostics instead
            min_margin = min(
                kernels.sqrt_margin(kernels.KIND_H, s, n, params.mu, params.u, params.v)
                for s in traj.states
            )
            if min_margin < 0.2:
                continue
            done += 1
            e0 = traj.energy[0]
            # drift = secular trend; the bounded dt^2 oscillation is reported
            t_c = traj.times - traj.times.mean()
            slope = float(np.sum(t_c * (traj.energy - e0)) / np.sum(t_c**2))
            worst = max(worst, abs(slope) / max(1.0, abs(e0)))
            oscillation = max(
                oscillation, float(np.max(np.abs(traj.energy - e0))) / max(1.0, abs(e0))
            )
    return CheckResult("energy_drift", worst, tol, worst <= tol,
                       {"cases": 2 * cases, "max_oscillation": oscillation})


def check_dual_action_drift(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-6) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        lam = sample_interior_lambda(rng, params, slack=0.8, margin=0.4)
        theta = sample_theta(rng, params.n)
        traj = integrate_many_body(
            "H", DarbouxPoint(lam=lam, theta=theta), 2.0, 1e-3, params,
            sample_every=200, compute_dual_actions=True,
        )
        ref = traj.actions[0]
        worst = max(worst, float(np.max(np.abs(traj.actions - ref))))
    return CheckResult("dual_action_drift", worst, tol, worst <= tol, {"cases": cases})


def check_flow_cross_check(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-6) -> CheckResult:
    n = params.n
    worst = 0.0
    for _ in range(cases):
        lam = sample_interior_lambda(rng, params)
        theta = sample_theta(rng, n)
        point = DarbouxPoint(lam=lam, theta=theta)
        z0 = zeta_from_darboux(point, params)
        traj = integrate_many_body(
            "action:1", point, 1.0, 1e-3, params,
            sample_every=250, compute_dual_actions=False,
        )
        y_end = traj.states[-1]
        z_int = zeta_from_darboux(DarbouxPoint(lam=y_end[:n], theta=y_end[n:]), params)
        z_exact = torus_flow_m(z0, 1, traj.times[-1], params)
        worst = max(worst, float(np.max(np.abs(z_int - z_exact))))
    return CheckResult("flow_cross_check", worst, tol, worst <= tol, {"cases": cases})


def check_boundary_event(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-10) -> CheckResult:
    """Steer the main flow onto a chart-boundary crossing and localize it.

    The boundary facets have real codimension two, so the aiming helper
    scans the phase of the last complex coordinate; the event must be
    found and its bisection bracket must close to the stated width.
    """
    del rng, cases
    from .flows import steer_to_boundary

    traj = steer_to_boundary(params)
    event = traj.boundary_event
    return CheckResult(
        "boundary_event", event.bracket, tol,
        event.bracket <= tol and 0.0 <= event.margin <= 1e-6,
        {"time": event.time, "margin": event.margin},
    )


def check_equilibrium(params: Params, rng: SplitMix64, cases: int, tol: float = 0.0) -> CheckResult:
    scan = equilibrium_scan(params, rng, samples=cases)
    value = max(
        scan["origin_fixed_m"],
        scan["origin_fixed_hat"],
        -scan["min_excess_m"],
        -scan["min_excess_hat"],
    )
    return CheckResult(
        "equilibrium", value, tol, value <= tol,
        {"min_excess_m": scan["min_excess_m"], "min_excess_hat": scan["min_excess_hat"]},
    )


def _sample_vd(rng: SplitMix64) -> VDParams:
    return VDParams(
        a=rng.uniform(-2.0, 2.0),
        b=rng.uniform(-2.0, 2.0),
        c=rng.uniform(-2.0, 2.0),
        d=rng.uniform(-2.0, 2.0),
        mu=rng.uniform(0.2, 1.2),
    )


def _sample_distinct_lambda(rng: SplitMix64, n: int) -> np.ndarray:
    vals = [0.3 + rng.uniform(0.0, 0.6)]
    for _ in range(n - 1):
        vals.append(vals[-1] + 0.35 + rng.uniform(0.0, 0.8))
    return np.array(vals[::-1])


def check_vd_identities(params: Params, rng: SplitMix64, cases: int,
                        tol: float = 1e-12, tol_potential: float = 1e-10) -> CheckResult:
    n = params.n
    worst_kin = 0.0
    worst_pot = 0.0
    for _ in range(cases):
        vd = _sample_vd(rng)
        lam = _sample_distinct_lambda(rng, n)
        vp, vm = vd_V_pm(lam, vd)
        fact = vd_kinetic_factored(lam, vd)
        scale = float(np.max(np.abs(fact))) + 1.0
        worst_kin = max(worst_kin, float(np.max(np.abs(vp * vm - fact))) / scale)
        direct = vd_potential_direct(lam, vd)
        closed = vd_potential_closed(lam, vd)
        worst_pot = max(worst_pot, abs(direct - closed) / max(1.0, abs(direct)))
    passed = worst_kin <= tol and worst_pot <= tol_potential
    return CheckResult(
        "vd_identities", max(worst_kin, worst_pot), max(tol, tol_potential), passed,
        {"kinetic": worst_kin, "potential": worst_pot, "cases": cases},
    )


def check_residue_sum(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-10) -> CheckResult:
    n = params.n
    worst = 0.0
    for _ in range(cases):
        vd = _sample_vd(rng)
        lam = _sample_distinct_lambda(rng, n)
        lams = np.concatenate([np.exp(2.0 * lam), np.exp(-2.0 * lam)])
        rep = residue_report(vd, lams, params)
        worst = max(worst, rep["relative_sum"])
    return CheckResult("residue_sum", worst, tol, worst <= tol, {"cases": cases})


def check_vd_limit(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-6) -> CheckResult:
    n = params.n
    worst = 0.0
    monotone = True
    min_r2 = 1.0
    for _ in range(max(1, cases)):
        lam = sample_interior_lambda(rng, params)
        theta = sample_theta(rng, n)
        point = DarbouxPoint(lam=lam, theta=theta)
        h_ref = abs(H_main(point, params))
        e10 = vd_limit_error(point, params, -10.0, 10.0)
        e20 = vd_limit_error(point, params, -20.0, 20.0)
        worst = max(worst, e20 / max(1.0, h_ref))
        monotone = monotone and (e20 < e10)
        # decay-rate fit: log error against log(e^{2a} + e^{-2b}) on a = -b
        svals = np.array([8.0, 12.0, 16.0])
        errs = np.array(
            [vd_limit_error(point, params, -s, s) for s in svals]
        )
        xs = np.log(np.exp(-2.0 * svals) + np.exp(-2.0 * svals))
        ys = np.log(errs)
        xm, ym = xs.mean(), ys.mean()
        slope = float(np.sum((xs - xm) * (ys - ym)) / np.sum((xs - xm) ** 2))
        resid = ys - (ym + slope * (xs - xm))
        r2 = 1.0 - float(np.sum(resid**2) / max(np.sum((ys - ym) ** 2), 1e-300))
        min_r2 = min(min_r2, r2)
    passed = worst <= tol and monotone and min_r2 > 0.99
    return CheckResult(
        "vd_limit", worst, tol, passed,
        {"monotone": monotone, "fit_r2": min_r2, "cases": max(1, cases)},
    )


def check_removable_continuity(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-8) -> CheckResult:
    """Q entries extend continuously through the factored-singularity facets.

    The entries whose naive formula divides by a vanishing denominator
    (the distinguished pairs and the last diagonal corner) are smooth in
    the approach distance; their linear extrapolation from 1e-4 and 1e-5
    must match the on-facet value.  The remaining entries vanish only
    like the square root of the distance: they are checked for a
    monotonically shrinking envelope proportional to that root.  The
    admissibility residuals must not degrade anywhere along the approach.
    """
    del cases  # fixed deterministic sequences
    worst = 0.0
    worst_envelope = 0.0
    worst_residual = 0.0

    def q_at(base_params: Params, lam: np.ndarray) -> np.ndarray:
        xi = np.linspace(0.3, 2.9, 2 * base_params.n)
        triple = build_triple(BuildSpec(lam=lam, xi=xi), base_params)
        nonlocal worst_residual
        worst_residual = max(worst_residual, verify_admissible(triple, base_params).max_residual)
        return triple.Q

    def singular_mask(n: int) -> np.ndarray:
        mask = np.zeros((2 * n, 2 * n), dtype=bool)
        for j in range(1, n):
            mask[j, n + j - 1] = True
            mask[n + j - 1, j] = True
        mask[2 * n - 1, 2 * n - 1] = True
        return mask

    def facet_defects(base_params: Params, lam_at) -> None:
        nonlocal worst, worst_envelope
        d1, d2 = 1e-4, 1e-5
        q3 = q_at(base_params, lam_at(1e-3))
        q1 = q_at(base_params, lam_at(d1))
        q2 = q_at(base_params, lam_at(d2))
        q_lim = q_at(base_params, lam_at(0.0))
        mask = singular_mask(base_params.n)
        extrap = (d1 * q2 - d2 * q1) / (d1 - d2)
        worst = max(worst, float(np.max(np.abs((extrap - q_lim)[mask]))))
        for dist, q in ((1e-3, q3), (d1, q1), (d2, q2)):
            env = float(np.max(np.abs(q - q_lim))) / math.sqrt(dist)
            worst_envelope = max(worst_envelope, env)

    if params.n > 1:
        base = sample_interior_lambda(rng, params)

        def lam_gap(d):
            lam = base.copy()
            lam[-1] = lam[-2] - params.mu - d
            return lam

        facet_defects(params, lam_gap)

    # the corner cancellation needs mu/2 inside the domain
    corner = Params(n=params.n, mu=0.5, u=-0.1, v=0.05)

    def lam_corner(d):
        vals = [corner.mu / 2.0 + d]
        for _ in range(corner.n - 1):
            vals.append(vals[-1] + corner.mu + 0.4)
        return np.array(vals[::-1])

    facet_defects(corner, lam_corner)
    passed = worst <= tol and worst_residual <= 1e-10 and worst_envelope <= 10.0
    return CheckResult(
        "removable_continuity", worst, tol, passed,
        {"max_admissibility_residual": worst_residual,
         "sqrt_envelope": worst_envelope},
    )


def check_pairing_basis(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-12) -> CheckResult:
    del rng, cases
    basis = algebra.build_pairing_basis(params.n)
    dim = basis.dim
    worst = 0.0
    for i in range(dim):
        for j in range(dim):
            val = np.imag(np.trace(basis.basisK[i] @ basis.basisB[j]))
            worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
    cond = basis.gram_condition()
    return CheckResult(
        "pairing_basis", worst, tol, worst <= tol and math.isfinite(cond),
        {"gram_condition": cond},
    )


def check_iwasawa(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-12) -> CheckResult:
    m = 2 * params.n
    worst = 0.0
    for _ in range(cases):
        g = sample_sl(rng, m)
        scale = float(np.linalg.norm(g))
        k, b = algebra.iwasawa_decompose(g)
        worst = max(worst, float(np.linalg.norm(k @ b - g)) / scale)
        b_l, k_r = algebra.iwasawa_right(g)
        worst = max(worst, float(np.linalg.norm(b_l @ k_r - g)) / scale)
    return CheckResult("iwasawa", worst, tol, worst <= tol, {"cases": cases})


def check_cs_profile(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-14) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        v = rng.uniform(-1.5, 1.5)
        try:
            p = Params(n=params.n, mu=params.mu, u=params.u, v=v)
        except Exception:
            continue
        t = abs(v) + rng.uniform(0.0, 2.5)
        c, s = cs_profile(t, p)
        worst = max(worst, abs(c * c + s * s - 1.0))
    return CheckResult("cs_profile", worst, tol, worst <= tol, {"cases": cases})


def check_chebyshev(params: Params, rng: SplitMix64, cases: int, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        q = rng.uniform(1e-3, math.pi / 2.0)
        j = 1 + rng.integers(0, 4)
        lhs = (-1.0) ** j * cheb_T(2 * j, math.sin(q))
        worst = max(worst, abs(lhs - cheb_T(j, 1.0 - 2.0 * math.sin(q) ** 2)))
        worst = max(worst, abs(lhs - math.cos(2.0 * j * q)))
    return CheckResult("chebyshev_chain", worst, tol, worst <= tol, {"cases": cases})


REGISTRY = [
    ("pairing_basis", check_pairing_basis),
    ("iwasawa", check_iwasawa),
    ("cs_profile", check_cs_profile),
    ("chebyshev_chain", check_chebyshev),
    ("admissibility", check_admissibility),
    ("domain_positivity", check_domain_positivity),
    ("domain_violation", check_domain_violation),
    ("eigenvalue_map_range", check_eigenvalue_map_range),
    ("round_trip", check_round_trip),
    ("trace_identities", check_trace_identities),
    ("hamiltonian_reduction", check_hamiltonian_reduction),
    ("poisson_commutativity", check_poisson_commutativity),
    ("gauge_invariance", check_gauge_invariance),
    ("symplectic_chart", check_symplectic_chart),
    ("symplectic_flow", check_symplectic_flow),
    ("energy_drift", check_energy_drift),
    ("dual_action_drift", check_dual_action_drift),
    ("flow_cross_check", check_flow_cross_check),
    ("boundary_event", check_boundary_event),
    ("equilibrium", check_equilibrium),
    ("vd_identities", check_vd_identities),
    ("residue_sum", check_residue_sum),
    ("vd_limit", check_vd_limit),
    ("removable_continuity", check_removable_continuity),
]

# per-check case budgets as fractions of the configured count
_CASE_SCALE = {
    "poisson_commutativity": 0.2,
    "gauge_invariance": 0.05,
    "symplectic_chart": 0.1,
    "symplectic_flow": 0.02,
    "energy_drift": 0.02,
    "dual_action_drift": 0.02,
    "flow_cross_check": 0.05,
    "boundary_event": 0.01,
    "vd_limit": 0.02,
}


def run_suite(config: RunConfig) -> list[CheckResult]:
    results = []
    for idx, (name, fn) in enumerate(REGISTRY):
        rng = SplitMix64(config.seed * 1_000_003 + idx)
        cases = max(1, int(round(config.cases * _CASE_SCALE.get(name, 1.0))))
        kwargs = {}
        if name in config.tolerances:
            kwargs["tol"] = config.tolerances[name]
        results.append(fn(config.params, rng, cases, **kwargs))
    return results
