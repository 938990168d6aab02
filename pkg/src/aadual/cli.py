"""Command-line driver.

Subcommands: verify, triple, flow, duality, vdlimit, spectrum.  All
structured output is JSON rendered with 17 significant digits (CSV for
trajectories), so identical configuration and seed produce byte-identical
output.  Exit codes: 0 success, 1 failed checks/residuals, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import AADualError, ConfigError, ParamsError, SectionUnavailable
from .flows import integrate_many_body, torus_flow_m
from .hamiltonians import (
    reduced_actions_hat,
    reduced_actions_m,
    semiclassical_spectrum,
    vd_limit_error,
)
from .model import DarbouxPoint, Params, darboux_from_zeta, lambda_from_zeta
from .reconstruct import (
    eigen_lambda,
    hat_actions,
    reconstruct_g,
    trace_family_b,
    trace_family_k,
)
from .rng import SplitMix64
from .triples import triple_from_zeta, verify_admissible
from .verification import RunConfig, run_suite, sample_interior_lambda, sample_theta


def _render(obj) -> str:
    """JSON with every float printed at 17 significant digits."""
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_render(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return f"{float(obj):.17g}"
    if isinstance(obj, (complex, np.complexfloating)):
        return f'[{obj.real:.17g}, {obj.imag:.17g}]'
    if obj is None:
        return "null"
    return json.dumps(obj)


def _emit(obj) -> None:
    sys.stdout.write(_render(obj) + "\n")


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig(params=Params(n=2, mu=0.5, u=-1.0, v=0.3))
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(data)


def _parse_zeta(text: str, n: int) -> np.ndarray:
    text = text.strip()
    if text in {"0", "0.0"}:
        return np.zeros(n, dtype=complex)
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise ConfigError(f"expected {n} comma-separated complex numbers, got {len(parts)}")
    try:
        vals = [complex(p.replace("i", "j")) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"malformed complex entry: {exc}") from exc
    return np.array(vals, dtype=complex)


def _parse_floats(text: str, count: int, what: str) -> np.ndarray:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise ConfigError(f"expected {count} values for {what}, got {len(parts)}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"malformed {what}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    config = load_config(args.config)
    results = run_suite(config)
    report = {
        "params": {"n": config.params.n, "mu": config.params.mu,
                   "u": config.params.u, "v": config.params.v},
        "seed": config.seed,
        "cases": config.cases,
        "checks": [r.as_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    }
    _emit(report)
    return 0 if report["all_passed"] else 1


def cmd_triple(args) -> int:
    config = load_config(args.config)
    params = config.params
    zeta = _parse_zeta(args.zeta, params.n)
    triple = triple_from_zeta(zeta, params)
    report = verify_admissible(triple, params)
    _emit(
        {
            "triple": json.loads(triple.to_json()),
            "residuals": report.as_dict(),
        }
    )
    return 0 if report.passed else 1


def cmd_flow(args) -> int:
    config = load_config(args.config)
    params = config.params
    n = params.n
    kind = args.hamiltonian
    if kind.startswith("action:") and args.zeta is not None:
        j = int(kind.split(":", 1)[1])
        z0 = _parse_zeta(args.zeta, n)
        times = np.arange(0.0, args.t1 + 0.5 * args.dt, args.dt)
        rows = []
        for t in times:
            z = torus_flow_m(z0, j, float(t), params)
            lam = lambda_from_zeta(z, params)
            if np.all(np.abs(z) > 0):
                theta = darboux_from_zeta(z, params).theta
            else:
                theta = np.full(n, np.nan)
            energy = reduced_actions_hat(lam, j, params)
            rows.append((float(t), lam, theta, energy, lam))
        with open(args.out, "w") as fh:
            header = (
                ["t"]
                + [f"lambda_{i + 1}" for i in range(n)]
                + [f"theta_{i + 1}" for i in range(n)]
                + ["energy"]
                + [f"action_{i + 1}" for i in range(n)]
            )
            fh.write(",".join(header) + "\n")
            for t, lam, theta, energy, act in rows:
                vals = [t] + list(lam) + list(theta) + [energy] + list(act)
                fh.write(",".join(f"{x:.17g}" for x in vals) + "\n")
        e0 = rows[0][3]
        _emit(
            {
                "kind": kind,
                "samples": len(rows),
                "energy_drift": max(abs(r[3] - e0) for r in rows),
                "action_drift": 0.0,
                "boundary_event": None,
            }
        )
        return 0
    init = _parse_floats(args.init, 2 * n, "--init")
    point = DarbouxPoint(lam=init[:n], theta=init[n:])
    traj = integrate_many_body(
        kind, point, args.t1, args.dt, params,
        compute_dual_actions=not args.no_dual_actions,
    )
    with open(args.out, "w") as fh:
        traj.write_csv(fh)
    e0 = traj.energy[0]
    summary = {
        "kind": kind,
        "samples": int(traj.times.size),
        "energy_drift": float(np.max(np.abs(traj.energy - e0))),
        "action_drift": float(np.max(np.abs(traj.actions - traj.actions[0]))),
        "boundary_event": None
        if traj.boundary_event is None
        else {
            "time": traj.boundary_event.time,
            "margin": traj.boundary_event.margin,
            "bracket": traj.boundary_event.bracket,
        },
    }
    _emit(summary)
    return 0


def cmd_duality(args) -> int:
    config = load_config(args.config)
    params = config.params
    n = params.n
    zeta = _parse_zeta(args.zeta, n)
    triple = triple_from_zeta(zeta, params)
    gp = reconstruct_g(triple, params)
    lam = eigen_lambda(gp, params)
    q, hat_lam = hat_actions(gp, params)
    z_mods = np.empty(n)
    z_mods[: n - 1] = hat_lam[:-1] - hat_lam[1:] - params.mu
    z_mods[n - 1] = params.s - hat_lam[0]
    traces_b = [trace_family_b(gp, j) for j in range(1, n + 1)]
    traces_k = [trace_family_k(gp, j) for j in range(1, n + 1)]
    family_b = [reduced_actions_hat(lam, j, params) for j in range(1, n + 1)]
    family_k = [reduced_actions_m(hat_lam, j, params) for j in range(1, n + 1)]
    res = max(
        max(abs(a - b) / max(1.0, abs(a)) for a, b in zip(traces_b, family_b)),
        max(abs(a - b) / max(1.0, abs(a)) for a, b in zip(traces_k, family_k)),
    )
    _emit(
        {
            "lambda": lam,
            "hat_lambda": hat_lam,
            "Z_moduli_squared": z_mods,
            "traces_bb": traces_b,
            "traces_kIkI": traces_k,
            "family_cosh": family_b,
            "family_chebyshev": family_k,
            "max_residual": res,
            "admissibility": verify_admissible(triple, params).as_dict(),
        }
    )
    return 0 if res <= 1e-8 else 1


def cmd_vdlimit(args) -> int:
    config = load_config(args.config)
    params = config.params
    rng = SplitMix64(config.seed)
    lam = sample_interior_lambda(rng, params)
    theta = sample_theta(rng, params.n)
    point = DarbouxPoint(lam=lam, theta=theta)
    a_vals = _parse_floats(args.a, len(args.a.split(",")), "--a")
    b_vals = _parse_floats(args.b, len(args.b.split(",")), "--b")
    table = []
    for a in a_vals:
        for b in b_vals:
            table.append({"a": float(a), "b": float(b),
                          "error": vd_limit_error(point, params, float(a), float(b))})
    _emit({"lambda": lam, "theta": theta, "table": table})
    return 0


def cmd_spectrum(args) -> int:
    config = load_config(args.config)
    params = config.params
    n = params.n
    if args.max_occupation < 0:
        raise ConfigError("--max-occupation must be nonnegative")
    import itertools

    rows = []
    for occ in itertools.product(range(args.max_occupation + 1), repeat=n):
        rows.append(
            {"occupations": list(occ),
             "energy": semiclassical_spectrum(args.j, np.array(occ, dtype=float), params)}
        )
    _emit({"j": args.j, "rows": rows})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aadual",
        description="Action-angle dual pair of many-body systems: construction, "
        "verification and dynamics at desk scale.",
    )
    parser.add_argument("--config", default=None, help="path to a JSON run configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="run every property suite and report residuals")

    p_triple = sub.add_parser("triple", help="build the gauge-fixed triple over zeta")
    p_triple.add_argument("--zeta", required=True, help="comma-separated complex values, or 0")

    p_flow = sub.add_parser("flow", help="integrate a Hamiltonian flow and write CSV")
    p_flow.add_argument("--hamiltonian", required=True,
                        help="H, Hhat, or action:j (family index j >= 1)")
    p_flow.add_argument("--init", default=None,
                        help="2n comma-separated chart values (lambda then theta)")
    p_flow.add_argument("--zeta", default=None,
                        help="for action flows: initial zeta (exact torus flow)")
    p_flow.add_argument("--t1", type=float, required=True)
    p_flow.add_argument("--dt", type=float, required=True)
    p_flow.add_argument("--out", required=True, help="output CSV path")
    p_flow.add_argument("--no-dual-actions", action="store_true",
                        help="skip the per-sample dual action diagnostic")

    p_dual = sub.add_parser("duality", help="dual action/position report at zeta")
    p_dual.add_argument("--zeta", required=True)

    p_vd = sub.add_parser("vdlimit", help="scaling-limit error table")
    p_vd.add_argument("--a", required=True, help="comma-separated a values")
    p_vd.add_argument("--b", required=True, help="comma-separated b values")

    p_spec = sub.add_parser("spectrum", help="semiclassical spectrum over occupations")
    p_spec.add_argument("--j", type=int, default=1)
    p_spec.add_argument("--max-occupation", type=int, default=2)
    return parser


_HANDLERS = {
    "verify": cmd_verify,
    "triple": cmd_triple,
    "flow": cmd_flow,
    "duality": cmd_duality,
    "vdlimit": cmd_vdlimit,
    "spectrum": cmd_spectrum,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, ParamsError, SectionUnavailable) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except AADualError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
