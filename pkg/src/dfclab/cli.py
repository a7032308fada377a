"""Command-line interface: one executable, subcommand per operation.

Reports are machine readable: JSON documents carry ``schema_version`` so
downstream scripts can pin schemas; CSV output has a fixed header row per
subcommand. Randomized procedures take an explicit ``--seed`` (default 0),
and identical configuration + seed yields byte-identical output. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .cycles import find_cycles
from .maps import MapError, MapSpec, parse_map
from .polynomials import Polynomial, poly_roots
from .simulation import simulate
from .spectrum import GainVector, char_poly_closed
from .stability import (
    analyze,
    make_gains,
    min_N_to_stabilize,
    spectral_radius,
    stable_mu_interval,
)
from .verify import run_suite

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Invalid flag value; reported with exit status 2."""


class DomainError(Exception):
    """Valid usage but the operation cannot be performed; exit status 1."""


# ---------------------------------------------------------------------------
# Small parsing helpers
# ---------------------------------------------------------------------------


def _parse_kv_pairs(pairs: list[str] | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=val, got {item!r}")
        key, val = item.split("=", 1)
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--param {key}: bad numeric value {val!r}") from None
    return out


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"{flag} expects a comma-separated list of numbers") from None


def _parse_domain(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    vals = _parse_float_list(text, "--domain")
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise UsageError("--domain expects lo,hi with lo < hi")
    return (vals[0], vals[1])


def _load_map(args) -> MapSpec:
    params = _parse_kv_pairs(getattr(args, "param", None))
    domain = _parse_domain(getattr(args, "domain", None))
    return parse_map(args.map, params=params, domain=domain)


def _gains_for(args) -> GainVector:
    custom = None
    if getattr(args, "gains", None):
        custom = _parse_float_list(args.gains, "--gains")
    if args.scheme == "custom":
        if custom is None:
            raise UsageError("--scheme custom requires --gains")
        n = getattr(args, "N", None) or len(custom)
        if len(custom) != n:
            raise UsageError(f"--gains expects {n} values, got {len(custom)}")
        try:
            return GainVector(custom)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        return make_gains(args.scheme, args.N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _roots_doc(p: Polynomial) -> list[dict]:
    return [
        {"re": float(r.real), "im": float(r.imag), "modulus": float(abs(r))}
        for r in poly_roots(p)
    ]


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, doc: dict) -> None:
    _emit(args, json.dumps(doc, indent=2) + "\n")


def _emit_csv(args, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    _emit(args, "\n".join(lines) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_cycles(args) -> int:
    if args.period < 1:
        raise UsageError("--period must be >= 1")
    if args.grid < 100:
        raise UsageError("--grid must be >= 100")
    m = _load_map(args)
    cycles = find_cycles(m, args.period, args.grid, orbit_tol=args.tol)
    items = [
        {
            "points": list(c.points),
            "multipliers": list(c.multipliers),
            "product": c.multiplier_product,
        }
        for c in cycles
    ]
    if args.format == "csv":
        rows = []
        for idx, c in enumerate(cycles):
            for j, (x, mu) in enumerate(zip(c.points, c.multipliers)):
                rows.append([idx, j, x, mu, c.multiplier_product])
        _emit_csv(args, ["cycle", "point_index", "x", "multiplier", "product"], rows)
    else:
        _emit_json(
            args,
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "cycles",
                "map": m.source,
                "period": args.period,
                "cycles": items,
            },
        )
    return 0


def _cmd_charpoly(args) -> int:
    gains_list = _parse_float_list(args.gains, "--gains")
    mults = _parse_float_list(args.multipliers, "--multipliers")
    if len(gains_list) != args.N:
        raise UsageError(f"--gains expects {args.N} values, got {len(gains_list)}")
    if len(mults) != args.T:
        raise UsageError(f"--multipliers expects {args.T} values, got {len(mults)}")
    try:
        gains = GainVector(gains_list)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mu = float(np.prod(mults))
    p = char_poly_closed(args.N, args.T, gains, mu)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "charpoly",
        "N": args.N,
        "T": args.T,
        "gains": gains_list,
        "multipliers": mults,
        "mu": mu,
        "coeffs": p.coeffs.tolist(),
        "roots": _roots_doc(p),
    }
    if args.format == "csv":
        rows = [[k, c] for k, c in enumerate(p.coeffs)]
        _emit_csv(args, ["degree", "coefficient"], rows)
    else:
        _emit_json(args, doc)
    return 0


def _cmd_stability(args) -> int:
    gains = _gains_for(args)
    p = char_poly_closed(args.N, args.T, gains, args.mu)
    report = analyze(p)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "stability",
        "N": args.N,
        "T": args.T,
        "scheme": args.scheme,
        "mu": args.mu,
        "gains": list(gains.coeffs),
        "coeffs": p.coeffs.tolist(),
        "spectral_radius": report.spectral_radius,
        "stable": report.schur_stable,
        "jury_verdict": report.jury_verdict,
        "marginal": report.marginal,
        "roots": [
            {"re": r.real, "im": r.imag, "modulus": abs(r)} for r in report.roots
        ],
    }
    if args.format == "csv":
        rows = [
            [
                args.mu,
                report.spectral_radius,
                report.schur_stable,
                report.jury_verdict,
                report.marginal,
            ]
        ]
        _emit_csv(
            args, ["mu", "spectral_radius", "stable", "jury_verdict", "marginal"], rows
        )
    else:
        _emit_json(args, doc)
    return 0


def _cmd_gains(args) -> int:
    gains = _gains_for(args)
    if args.format == "csv":
        rows = [[j + 1, a] for j, a in enumerate(gains.coeffs)]
        _emit_csv(args, ["j", "a_j"], rows)
    else:
        _emit_json(
            args,
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "gains",
                "scheme": args.scheme,
                "N": args.N,
                "gains": list(gains.coeffs),
            },
        )
    return 0


def _cmd_simulate(args) -> int:
    if args.period < 1:
        raise UsageError("--period must be >= 1")
    m = _load_map(args)
    if args.scheme == "custom" and args.N is None and args.gains:
        args.N = len(_parse_float_list(args.gains, "--gains"))
    if args.N is None:
        raise UsageError("--N is required")
    gains = _gains_for(args)
    T = args.period
    M = (len(gains) - 1) * T + 1

    if args.history is not None:
        history = _parse_float_list(args.history, "--history")
        if len(history) != M:
            raise UsageError(f"--history expects {M} values, got {len(history)}")
    elif args.init is not None:
        history = [args.init] * M
    else:
        raise UsageError("one of --init or --history is required")
    if args.steps < 10 * T:
        raise UsageError(f"--steps must be at least 10*T = {10 * T}")

    cycles = find_cycles(m, T, args.grid)
    if not cycles:
        raise DomainError(f"no period-{T} cycle found on domain {m.domain}")
    if args.cycle_index is not None:
        if not 0 <= args.cycle_index < len(cycles):
            raise UsageError(
                f"--cycle-index out of range (found {len(cycles)} cycles)"
            )
        candidates = [cycles[args.cycle_index]]
    else:
        candidates = cycles

    # Target the cycle the trajectory actually approaches (deterministic:
    # first converged candidate in anchor order, else smallest final distance).
    best = None
    for cyc in candidates:
        traj = simulate(m, gains, T, history, args.steps, cyc, args.tol)
        final_dist = (
            float(np.mean([cyc.distance_to(x) for x in traj.states[-10 * T :]]))
            if len(traj.states)
            else float("inf")
        )
        key = (not traj.converged, final_dist)
        if best is None or key < best[0]:
            best = (key, cyc, traj)
    _, target, traj = best

    summary = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "simulate",
        "map": m.source,
        "period": T,
        "scheme": args.scheme,
        "N": len(gains),
        "target_points": list(target.points),
        "converged": traj.converged,
        "settle_step": traj.settle_step,
        "diverged": traj.diverged,
    }
    header = ["k", "x", "u"]
    rows = []
    n_hist = len(traj.states) - len(traj.controls)
    for k, x in enumerate(traj.states):
        # u(k) is the control applied on the step from state k to k+1;
        # history rows and the final state carry none.
        has_u = n_hist - 1 <= k < len(traj.states) - 1
        u = float(traj.controls[k - n_hist + 1]) if has_u else ""
        rows.append([k, float(x), u])

    if args.format == "json":
        doc = dict(summary)
        doc["trajectory"] = [
            {"k": r[0], "x": r[1], "u": (None if r[2] == "" else r[2])} for r in rows
        ]
        _emit_json(args, doc)
    else:
        # CSV trajectory to --out (or stdout), JSON summary to stdout.
        _emit_csv(args, header, rows)
        summary_text = json.dumps(summary, indent=2) + "\n"
        sys.stdout.write(summary_text)
    return 0


def _cmd_sweep(args) -> int:
    bounds = _parse_float_list(args.mu_range, "--mu-range")
    if len(bounds) != 2 or not bounds[0] <= bounds[1]:
        raise UsageError("--mu-range expects lo,hi with lo <= hi")
    if args.mu_step <= 0:
        raise UsageError("--mu-step must be positive")
    gains = _gains_for(args)
    rows = []
    mu = bounds[0]
    while mu <= bounds[1] + 1e-12:
        p = char_poly_closed(args.N, args.T, gains, mu)
        radius = spectral_radius(p)
        rows.append([float(mu), radius, bool(radius < 1.0 - 1e-9)])
        mu += args.mu_step
    if args.format == "json":
        _emit_json(
            args,
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "sweep",
                "N": args.N,
                "T": args.T,
                "scheme": args.scheme,
                "rows": [
                    {"mu": r[0], "spectral_radius": r[1], "stable": r[2]}
                    for r in rows
                ],
            },
        )
    else:
        _emit_csv(args, ["mu", "spectral_radius", "stable"], rows)
    return 0


def _cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    try:
        results = run_suite(args.suite, trials=args.trials, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        sys.stderr.write(
            f"{status} {res.name}: max_err={res.max_err:.3e} "
            f"tol={res.tolerance:.1e} ({res.trials} trials)\n"
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "verify",
        "suite": args.suite,
        "seed": args.seed,
        "trials": args.trials,
        "results": [r.to_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    }
    _emit_json(args, doc)
    return 0 if doc["all_passed"] else 1


def pipeline_stabilize(
    m: MapSpec, T: int, scheme: str, n_max: int, steps: int, tol: float, grid: int
) -> list[dict]:
    """End-to-end pipeline: find cycles, pick N, confirm by simulation.

    For each period-T cycle: compute the multiplier product, search the
    smallest stabilizing N for the scheme, then simulate from a slightly
    perturbed on-orbit history and report predicted vs observed stability.
    """
    cycles = find_cycles(m, T, grid)
    entries = []
    for cyc in cycles:
        mu = cyc.multiplier_product
        entry: dict = {
            "points": list(cyc.points),
            "multipliers": list(cyc.multipliers),
            "mu": mu,
        }
        if mu >= 1.0:
            entry["stabilizable"] = False
            entry["note"] = "not stabilizable by this control (mu >= 1)"
            entries.append(entry)
            continue
        n_found = min_N_to_stabilize(T, mu, scheme, n_max)
        if n_found is None:
            entry["stabilizable"] = False
            entry["note"] = f"no N <= {n_max} stabilizes this cycle"
            entries.append(entry)
            continue
        gains = make_gains(scheme, n_found)
        p = char_poly_closed(n_found, T, gains, mu)
        radius = spectral_radius(p)
        M = (n_found - 1) * T + 1
        history = [cyc.points[i % T] + 1e-4 for i in range(M)]
        traj = simulate(m, gains, T, history, steps, cyc, tol)
        entry.update(
            {
                "stabilizable": True,
                "min_N": n_found,
                "gains": list(gains.coeffs),
                "spectral_radius": radius,
                "predicted_stable": bool(radius < 1.0 - 1e-9),
                "converged": traj.converged,
                "settle_step": traj.settle_step,
                "agreement": bool(traj.converged == (radius < 1.0 - 1e-9)),
            }
        )
        entries.append(entry)
    return entries


def _cmd_stabilize(args) -> int:
    if args.period < 1:
        raise UsageError("--period must be >= 1")
    if args.n_max < 1:
        raise UsageError("--N-max must be >= 1")
    m = _load_map(args)
    steps = max(args.steps, 10 * args.period)
    entries = pipeline_stabilize(
        m, args.period, args.scheme, args.n_max, steps, args.tol, args.grid
    )
    _emit_json(
        args,
        {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "stabilize",
            "map": m.source,
            "period": args.period,
            "scheme": args.scheme,
            "N_max": args.n_max,
            "entries": entries,
        },
    )
    return 0


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


def _add_common(sub, fmt_default="json"):
    sub.add_argument("--format", choices=["json", "csv"], default=fmt_default)
    sub.add_argument("--out", help="write the report to this path instead of stdout")
    sub.add_argument("--seed", type=int, default=0)


def _add_map_flags(sub):
    sub.add_argument("--map", required=True, help='builtin designator ("logistic:r=4") or expression in x')
    sub.add_argument("--param", action="append", metavar="KEY=VAL", help="bind an expression parameter")
    sub.add_argument("--domain", help="override the scan domain as lo,hi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfclab",
        description="Delayed feedback control of cycles in 1-D maps: "
        "spectra, stability tests, and simulation.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("cycles", help="detect period-T orbits of a map")
    _add_map_flags(sub)
    sub.add_argument("--period", type=int, required=True)
    sub.add_argument("--grid", type=int, default=1000)
    sub.add_argument("--tol", type=float, default=1e-8)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_cycles)

    sub = subs.add_parser("charpoly", help="closed-form characteristic polynomial and roots")
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--T", type=int, required=True)
    sub.add_argument("--gains", required=True, help="comma-separated a_1..a_N")
    sub.add_argument("--multipliers", required=True, help="comma-separated mu_1..mu_T")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_charpoly)

    sub = subs.add_parser("stability", help="Schur stability report for one mu")
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--T", type=int, required=True)
    sub.add_argument("--scheme", choices=["uniform", "dk2013", "custom"], default="uniform")
    sub.add_argument("--gains", help="comma-separated gains (for --scheme custom)")
    sub.add_argument("--mu", type=float, required=True)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_stability)

    sub = subs.add_parser("gains", help="emit a gain scheme")
    sub.add_argument("--scheme", choices=["uniform", "dk2013", "custom"], required=True)
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--gains", help="comma-separated gains (for --scheme custom)")
    _add_common(sub)
    sub.set_defaults(handler=_cmd_gains)

    sub = subs.add_parser("simulate", help="run the controlled dynamics")
    _add_map_flags(sub)
    sub.add_argument("--period", type=int, required=True)
    sub.add_argument("--scheme", choices=["uniform", "dk2013", "custom"], default="uniform")
    sub.add_argument("--N", type=int)
    sub.add_argument("--gains", help="comma-separated gains (for --scheme custom)")
    sub.add_argument("--init", type=float, help="constant initial history value")
    sub.add_argument("--history", help="explicit initial history, (N-1)T+1 values")
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--tol", type=float, default=1e-6)
    sub.add_argument("--grid", type=int, default=1000)
    sub.add_argument("--cycle-index", type=int, help="target cycle index (anchor order)")
    _add_common(sub, fmt_default="csv")
    sub.set_defaults(handler=_cmd_simulate)

    sub = subs.add_parser("sweep", help="spectral radius over a mu range")
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--T", type=int, required=True)
    sub.add_argument("--scheme", choices=["uniform", "dk2013", "custom"], default="uniform")
    sub.add_argument("--gains", help="comma-separated gains (for --scheme custom)")
    sub.add_argument(
        "--mu-range", required=True,
        help="lo,hi (use --mu-range=-3,-1 when lo is negative)",
    )
    sub.add_argument("--mu-step", type=float, required=True)
    _add_common(sub, fmt_default="csv")
    sub.set_defaults(handler=_cmd_sweep)

    sub = subs.add_parser("verify", help="run seeded self-check suites")
    sub.add_argument(
        "--suite",
        choices=["lemma1", "chain", "rotation", "morgul", "all"],
        default="all",
    )
    sub.add_argument("--trials", type=int, default=100)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_verify)

    sub = subs.add_parser("stabilize", help="cycle -> gains -> simulation pipeline")
    _add_map_flags(sub)
    sub.add_argument("--period", type=int, required=True)
    sub.add_argument("--scheme", choices=["uniform", "dk2013"], default="uniform")
    sub.add_argument("--N-max", dest="n_max", type=int, default=32)
    sub.add_argument("--steps", type=int, default=5000)
    sub.add_argument("--tol", type=float, default=1e-6)
    sub.add_argument("--grid", type=int, default=1000)
    _add_common(sub)
    sub.set_defaults(handler=_cmd_stabilize)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (MapError, DomainError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
