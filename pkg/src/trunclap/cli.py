"""Command-line entry point: solve, bounds, verify, explore.

Exit codes: 0 success, 1 input error (bad flags, malformed domain JSON,
unreadable files, unusable h), 2 solver or suite failure. Output is
deterministic — identical invocations print identical bytes — except for the
optional timing field behind --timings.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

from . import explorer, geometry
from .bounds import bounds_report, slack
from .eigensolver import INNER_SOLVERS, SolverConfig, analytic_mu, solve
from .errors import GridTooCoarseError, TruncLapError

_DEFAULTS = SolverConfig()


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for solver failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"error: {message}\n")


def _length(text: str) -> float:
    """Positive length, accepting '0.25' as well as '1/128'."""
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            val = float(num) / float(den)
        else:
            val = float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (val > 0.0 and math.isfinite(val)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def _float_list(text: str) -> list:
    return [_length(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _load_domain(text: str):
    s = text.strip()
    if s.startswith("{"):
        return geometry.domain_from_json(s)
    try:
        with open(text) as fh:
            payload = fh.read()
    except OSError as exc:
        raise geometry.GeometryError(
            f"cannot read domain file {text!r}: {exc.strerror or exc}"
        ) from exc
    return geometry.domain_from_json(payload)


def _jobs(args) -> int | None:
    if getattr(args, "jobs", None):
        return args.jobs
    env = os.environ.get("TRUNCLAP_JOBS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"TRUNCLAP_JOBS must be an integer, got {env!r}")
    return None


def _cfg_from(args) -> SolverConfig:
    inner = "policy" if getattr(args, "policy_iteration", False) else args.inner_solver
    return SolverConfig(
        h=args.h,
        W=args.stencil,
        tol_bracket=args.tol_bracket,
        tol_inner=args.tol_inner,
        max_outer=args.max_outer,
        max_inner=args.max_inner,
        cw_floor=args.cw_floor,
        inner_solver=inner,
    )


def _emit(payload, out_path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")


def _add_solver_flags(p, h=_DEFAULTS.h, W=_DEFAULTS.W):
    p.add_argument("--h", type=_length, default=h, help="grid spacing (accepts 1/128)")
    p.add_argument("--stencil", type=int, default=W, metavar="W", help="stencil width")
    p.add_argument("--tol-bracket", type=float, default=_DEFAULTS.tol_bracket)
    p.add_argument("--tol-inner", type=float, default=_DEFAULTS.tol_inner)
    p.add_argument("--max-outer", type=int, default=_DEFAULTS.max_outer)
    p.add_argument("--max-inner", type=int, default=_DEFAULTS.max_inner)
    p.add_argument("--cw-floor", type=float, default=_DEFAULTS.cw_floor)
    p.add_argument(
        "--inner-solver", choices=INNER_SOLVERS, default=_DEFAULTS.inner_solver
    )
    p.add_argument(
        "--policy-iteration",
        action="store_true",
        help="force the policy-iteration inner solver (same as --inner-solver policy)",
    )


def _richardson_limit(levels, mus) -> dict:
    """Aitken-accelerated h->0 limit of a refinement sweep.

    For mu(h) = mu* + C*h^p with spacings in geometric progression the last
    three values determine mu* exactly (without knowing p); the observed
    order is reported alongside as a sanity check on the fit.
    """
    if len(mus) < 3:
        raise ValueError("--richardson needs at least three sweep spacings")
    d1 = mus[-2] - mus[-3]
    d2 = mus[-1] - mus[-2]
    denom = d2 - d1
    out = {"extrapolated": mus[-1], "observed_order": None}
    if denom != 0.0:
        out["extrapolated"] = mus[-1] - d2 * d2 / denom
    if d1 * d2 > 0.0 and abs(d2) < abs(d1) and levels[-2] > levels[-1]:
        r = levels[-2] / levels[-1]
        out["observed_order"] = math.log(abs(d1 / d2)) / math.log(r)
    return out


def cmd_solve(args) -> int:
    domain = _load_domain(args.domain)
    if args.richardson and args.sweep is None:
        raise ValueError("--richardson requires --sweep")
    closed_form = analytic_mu(domain)
    wants_numeric = (
        args.force_numeric
        or args.sweep is not None
        or args.dump_eigenfunction
        or args.dump_grid
    )
    if closed_form is not None and not wants_numeric:
        _emit(
            {
                "analytic": True,
                "mu": closed_form,
                "mu_low": closed_form,
                "mu_high": closed_form,
            },
            args.out,
        )
        return 0

    base = _cfg_from(args)
    t0 = time.perf_counter()
    if args.sweep is not None:
        levels = args.sweep if args.sweep else [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        entries = []
        for h in levels:
            cfg = SolverConfig(
                h=h,
                W=base.W,
                tol_bracket=base.tol_bracket,
                tol_inner=base.tol_inner,
                max_outer=base.max_outer,
                max_inner=base.max_inner,
                cw_floor=base.cw_floor,
                inner_solver=base.inner_solver,
            )
            entries.append(solve(domain, cfg).to_json_dict())
        payload = {"sweep": entries}
        if args.richardson:
            payload["richardson"] = _richardson_limit(levels, [e["mu"] for e in entries])
    else:
        est = solve(domain, base)
        if args.dump_eigenfunction:
            est.eigenfunction.dump_csv(args.dump_eigenfunction)
        if args.dump_grid:
            est.eigenfunction.grid.dump_csv(args.dump_grid)
        payload = est.to_json_dict()
    if args.timings:
        payload["seconds"] = time.perf_counter() - t0
    _emit(payload, args.out)
    return 0


def cmd_bounds(args) -> int:
    domain = _load_domain(args.domain)
    rep = bounds_report(domain, seed=args.seed)
    payload = rep.to_json_dict()
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        if args.out.endswith(".csv"):
            with open(args.out, "w", newline="") as fh:
                w = csv.writer(fh)
                keys = sorted(payload)
                w.writerow(keys)
                w.writerow([payload[k] for k in keys])
        else:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
    return 0


_ANALYTIC_CASES = (
    ("ball r=1", geometry.Ball(1.0), math.pi**2 / 4.0),
    ("ball r=2", geometry.Ball(2.0), math.pi**2 / 16.0),
    ("square (-1,1)^2", geometry.HyperRect((1.0, 1.0)), math.pi**2 / 8.0),
    ("square side 1", geometry.HyperRect((0.5, 0.5)), math.pi**2 / 2.0),
    ("rectangle 2:1", geometry.HyperRect((1.0, 0.5)), math.pi**2 / 5.0),
)


def _suite_analytic(args) -> int:
    cfg = _cfg_from(args)
    failures = 0
    for name, dom, target in _ANALYTIC_CASES:
        est = solve(dom, cfg)
        rel = abs(est.mu - target) / target
        ok = rel <= 0.02
        failures += 0 if ok else 1
        print(
            f"{'PASS' if ok else 'FAIL'} {name}: mu={est.mu:.6f} "
            f"target={target:.6f} rel_err={rel:.4%}"
        )
    print(f"analytic suite: {len(_ANALYTIC_CASES) - failures}/{len(_ANALYTIC_CASES)} passed")
    return 0 if failures == 0 else 2


def _suite_inequalities(args) -> int:
    cfg = _cfg_from(args)
    sl = slack(cfg.h, cfg.W)
    cases = (
        ("regular hexagon d=1", geometry.Polygon(geometry.regular_polygon(6, 0.5))),
        (
            "equilateral triangle d=1",
            geometry.Polygon(geometry.regular_polygon(3, 1.0 / math.sqrt(3.0))),
        ),
        ("square d=1", geometry.Polygon(geometry.regular_polygon(4, 0.5))),
        ("regular pentagon", geometry.Polygon(geometry.regular_polygon(5, 0.5))),
        ("reuleaux-3 width 1", geometry.ReuleauxPolygon(3, 1.0)),
    )
    failures = 0

    def check(label, ok, detail):
        nonlocal failures
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")

    for name, dom in cases:
        est = solve(dom, cfg)
        rep = bounds_report(dom)
        check(
            f"{name} diameter upper bound",
            est.mu_low <= rep.diam_upper + sl,
            f"mu_low={est.mu_low:.6f} <= pi^2/diam^2 + slack = {rep.diam_upper + sl:.6f}",
        )
        check(
            f"{name} Jung lower bound",
            est.mu_high >= rep.jung_lower - sl,
            f"mu_high={est.mu_high:.6f} >= jung - slack = {rep.jung_lower - sl:.6f}",
        )
        if rep.equality_certified:
            gap = abs(est.mu - rep.diam_upper)
            check(
                f"{name} equality case",
                gap <= sl,
                f"|mu - pi^2/diam^2| = {gap:.6f} <= slack = {sl:.6f}",
            )
        if isinstance(dom, geometry.ReuleauxPolygon):
            cap = math.pi**2 / dom.width**2
            check(
                f"{name} strictly below pi^2/w^2",
                est.mu_high < cap - sl,
                f"mu_high={est.mu_high:.6f} < {cap - sl:.6f} "
                f"(margin {cap - est.mu_high:.6f})",
            )
    total = failures == 0
    print(f"inequalities suite: {'all checks passed' if total else f'{failures} check(s) failed'}")
    return 0 if total else 2


def cmd_verify(args) -> int:
    if args.suite == "analytic":
        return _suite_analytic(args)
    return _suite_inequalities(args)


def _write_table(table, args) -> int:
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, f"{table.name}.csv")
    json_path = os.path.join(args.out, f"{table.name}.json")
    table.write_csv(csv_path)
    table.write_json(json_path)
    written = [csv_path, json_path]
    if args.plot_data:
        written += table.write_plot_data(args.out)
    print(f"verdict: {table.metadata.get('verdict', 'n/a')}")
    for p in written:
        print(f"wrote {p}")
    return 0


def cmd_explore_rectangles(args) -> int:
    table = explorer.degenerate_rectangles(args.constraint, args.level, args.n)
    return _write_table(table, args)


def cmd_explore_shrinking(args) -> int:
    table = explorer.shrinking_sequence(args.d, args.eps, _cfg_from(args))
    return _write_table(table, args)


def cmd_explore_reuleaux(args) -> int:
    table = explorer.reuleaux_scan(
        args.d, args.n, _cfg_from(args), arc_samples=args.arc_samples, jobs=_jobs(args)
    )
    return _write_table(table, args)


def cmd_explore_hausdorff(args) -> int:
    target = _load_domain(args.target)
    if isinstance(target, geometry.Ball):
        approximants = [geometry.regular_polygon(n, target.r) for n in args.n]
    else:
        base = geometry.as_polygon(target)
        approximants = [geometry.scale(base, 1.0 - 1.0 / n) for n in args.n]
    table = explorer.hausdorff_continuity_experiment(
        target, approximants, _cfg_from(args), jobs=_jobs(args)
    )
    return _write_table(table, args)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trunclap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="compute the principal eigenvalue")
    p_solve.add_argument("--domain", required=True, help="domain JSON (inline or file path)")
    _add_solver_flags(p_solve)
    p_solve.add_argument(
        "--sweep",
        type=_float_list,
        nargs="?",
        const=[],
        default=None,
        metavar="H1,H2,...",
        help="solve at several spacings (default 1/32,1/64,1/128)",
    )
    p_solve.add_argument(
        "--richardson",
        action="store_true",
        help="append an extrapolated h->0 value to the sweep output "
        "(needs --sweep with at least three spacings)",
    )
    p_solve.add_argument(
        "--force-numeric",
        action="store_true",
        help="run the solver even when a closed form exists",
    )
    p_solve.add_argument("--dump-eigenfunction", metavar="PATH", help="write u as CSV")
    p_solve.add_argument("--dump-grid", metavar="PATH", help="write the grid mask/arms as CSV")
    p_solve.add_argument("--out", metavar="PATH", help="also write the JSON result here")
    p_solve.add_argument("--timings", action="store_true", help="include wall-clock seconds")
    p_solve.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p_solve.set_defaults(func=cmd_solve)

    p_bounds = sub.add_parser("bounds", help="closed-form bound report for a domain")
    p_bounds.add_argument("--domain", required=True)
    p_bounds.add_argument("--seed", type=int, default=0)
    p_bounds.add_argument("--out", metavar="PATH", help="write the report (.csv or .json)")
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="run a validation suite")
    p_verify.add_argument("--suite", choices=("analytic", "inequalities"), required=True)
    _add_solver_flags(p_verify)
    p_verify.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p_verify.set_defaults(func=cmd_verify)

    p_explore = sub.add_parser("explore", help="run a limiting-sequence experiment")
    esub = p_explore.add_subparsers(dest="experiment", required=True, parser_class=_Parser)

    def common(p, *, solver=True):
        p.add_argument("--out", required=True, metavar="DIR", help="output directory")
        p.add_argument("--plot-data", action="store_true", help="emit (x,y) series files")
        p.add_argument("--seed", type=int, default=0)
        if solver:
            _add_solver_flags(p, h=1.0 / 64.0, W=4)
            p.add_argument("--jobs", type=int, default=0, help="worker threads")

    p_rect = esub.add_parser("rectangles", help="degenerating rectangles (closed form)")
    p_rect.add_argument("--constraint", choices=("volume", "perimeter"), default="volume")
    p_rect.add_argument("--level", type=float, default=1.0)
    p_rect.add_argument("--n", type=_float_list, default=[1, 2, 4, 8])
    common(p_rect, solver=False)
    p_rect.set_defaults(func=cmd_explore_rectangles)

    p_shrink = esub.add_parser("shrinking", help="thin rectangles of fixed diameter")
    p_shrink.add_argument("--d", type=_length, default=1.0)
    p_shrink.add_argument("--eps", type=_float_list, default=[0.4, 0.2, 0.1])
    common(p_shrink)
    p_shrink.set_defaults(func=cmd_explore_shrinking)

    p_reul = esub.add_parser("reuleaux", help="Reuleaux polygon width scan")
    p_reul.add_argument("--d", type=_length, default=1.0)
    p_reul.add_argument("--n", type=_int_list, default=[3, 5, 7, 9])
    p_reul.add_argument("--arc-samples", type=int, default=64)
    common(p_reul)
    p_reul.set_defaults(func=cmd_explore_reuleaux)

    p_haus = esub.add_parser("hausdorff", help="eigenvalue continuity under Hausdorff limits")
    p_haus.add_argument(
        "--target", default='{"type":"ball","r":1,"dim":2}', help="domain JSON (inline or file)"
    )
    p_haus.add_argument("--n", type=_int_list, default=[8, 16, 32])
    common(p_haus)
    p_haus.set_defaults(func=cmd_explore_hausdorff)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GridTooCoarseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TruncLapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
