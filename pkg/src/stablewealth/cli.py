"""Command-line surface over the bound, planning, oracle, and data tools.

Every subcommand emits CSV (UTF-8, header row) with the full run
configuration echoed as leading ``#`` comment lines, so any output file
reproduces its own run.  Figure-style outputs are data tables; plotting
is left to external tooling.

Exit codes: 0 success, 1 usage or validation error, 2 numerical
non-convergence, 3 oracle violation.
"""

from __future__ import annotations

import argparse
import sys
from math import log

import numpy as np

from .bounds import Schedule, bound_dca_closed_form, bound_general, dca_schedule, returns_from_bound
from .data import DataError, fit_stable, load_csv, to_returns
from .oracle import (
    check_domination,
    check_withdrawal_duality,
    estimate_success_prob,
    simulate_paths,
)
from .planner import (
    discrete_frontier,
    continuous_frontier,
    fit_surrogate,
    frontier_surface,
    lump_sum_discount,
    principal_curve,
)
from .quadrature import QuadratureError
from .stable import DEFAULT_QUANTILE_TOL, StableParams, quantile
from .withdrawals import (
    WithdrawalPlan,
    continuous_star_bound,
    equal_plan,
    necessary_principal,
    star_bound_closed_form,
    star_bound_general,
    success_prob_upper_bound,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VIOLATION = 3

# parameters of the fitted index process, the default everywhere
DEFAULT_ALPHA = 1.89
DEFAULT_BETA = 1.0
DEFAULT_SIGMA = 0.110
DEFAULT_MU = 0.0658


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    """Usage error carrying the message; mapped to exit code 1."""


def _write_csv(out_path, config: dict, header: list[str], rows) -> None:
    lines = [f"# {key}={value}" for key, value in config.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _process_from(args) -> StableParams:
    return StableParams(args.alpha, args.beta, args.sigma, args.mu)


def _config_echo(args, **extra) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    cfg.update(extra)
    return cfg


def _parse_quantile_list(text: str) -> list[float]:
    qs = [float(tok) for tok in text.split(",") if tok.strip()]
    if not qs or any(not (0.0 < q < 1.0) for q in qs):
        raise ValueError(f"quantile levels must lie in (0, 1): {text}")
    return qs


def cmd_bound(args) -> int:
    process = _process_from(args)
    qs = _parse_quantile_list(args.quantiles)
    if args.dca:
        sched = dca_schedule(args.k)
    else:
        if not args.times or not args.amounts:
            raise ValueError("general schedules need --times and --amounts")
        sched = Schedule(tuple(args.times), tuple(args.amounts))
    if args.closed_form:
        if process.alpha == 1.0 or process.mu == 0.0:
            raise ValueError(
                "--closed-form requires alpha != 1 and mu != 0 "
                "(the equal-schedule closed form is undefined there); "
                "drop --closed-form to use the general recursion"
            )
        steps = [bound_dca_closed_form(process, k) for k in range(1, sched.steps + 1)]
    else:
        steps = bound_general(process, sched)
    q_std = {q: quantile(StableParams(process.alpha, process.beta, 1.0, 0.0), q) for q in qs}
    header = ["k", "mu_k", "sigma_k"]
    header += [f"logZ_q{q:g}" for q in qs] + [f"logR_q{q:g}" for q in qs]
    rows = []
    for bp in steps:
        law = bp.law()
        ret = returns_from_bound(bp, sched)
        row = [bp.k, bp.mu, bp.sigma]
        row += [law.mu + law.sigma * q_std[q] for q in qs]
        row += [ret.mu + ret.sigma * q_std[q] for q in qs]
        rows.append(row)
    _write_csv(args.out, _config_echo(args, command="bound"), header, rows)
    return EXIT_OK


def cmd_withdraw(args) -> int:
    process = _process_from(args)
    rows = []
    if args.continuous:
        if args.n is None:
            raise ValueError("--continuous needs --n (years)")
        curve = principal_curve(
            args.n,
            args.C,
            alpha=process.alpha,
            beta=process.beta,
            sigma_annual=process.sigma,
            mu_annual=process.mu,
        )
        header = ["n", "C", "necessary_principal", "success_bound_at_P"]
        for c, p_needed in curve:
            rows.append([args.n, c, p_needed, ""])
        if args.P is not None:
            scaled = StableParams(
                process.alpha,
                process.beta,
                process.sigma * args.n ** (1.0 / process.alpha),
                process.mu * args.n,
            )
            sb = continuous_star_bound(scaled)
            bound_val = success_prob_upper_bound(sb, args.P)
            for row in rows:
                row[3] = bound_val
    else:
        if args.k is None:
            raise ValueError("discrete withdrawals need --k")
        if process.alpha == 1.0 or process.mu == 0.0:
            sb = star_bound_general(process, equal_plan(args.k))
        else:
            sb = star_bound_closed_form(process, args.k)
        header = ["k", "C", "necessary_principal", "success_bound_at_P"]
        for c in args.C:
            p_needed = necessary_principal(sb, c)
            bound_val = "" if args.P is None else success_prob_upper_bound(sb, args.P)
            rows.append([args.k, c, p_needed, bound_val])
    _write_csv(args.out, _config_echo(args, command="withdraw"), header, rows)
    return EXIT_OK


def cmd_frontier(args) -> int:
    if args.continuous:
        if len(args.alpha) != 1:
            raise ValueError("continuous frontier takes a single --alpha")
        table = continuous_frontier(args.C, args.alpha[0], args.beta)
        header = ["mu", "s_mu", "min_sigma"]
        rows = [
            [m, s, m / s] for m, s in zip(table.keys.tolist(), table.values.tolist())
        ]
        _write_csv(args.out, _config_echo(args, command="frontier"), header, rows)
        return EXIT_OK
    k_values = range(args.k_min, args.k_max + 1)
    extra = {}
    if len(args.alpha) == 1:
        tables = [discrete_frontier(args.C, args.alpha[0], args.beta, k_values=k_values)]
    else:
        tables = frontier_surface(args.C, args.beta, args.alpha, k_values=k_values)
    if args.fit_surrogate:
        fit = fit_surrogate(tables)
        extra["surrogate_max_abs_residual"] = f"{fit.max_abs_residual:.6g}"
        extra["surrogate_conservative_shift"] = f"{fit.conservative_shift:.6g}"
        extra["surrogate_coefficients"] = ";".join(
            ",".join(f"{c:.6f}" for c in row) for row in fit.coefficients
        )
    header = ["alpha", "k", "s_k"]
    rows = []
    for t in tables:
        for k, s in zip(t.keys.tolist(), t.values.tolist()):
            rows.append([t.alpha, k, s])
    _write_csv(args.out, _config_echo(args, command="frontier", **extra), header, rows)
    return EXIT_OK


def cmd_discount(args) -> int:
    mus = np.arange(args.mu_min, args.mu_max + 1e-12, args.mu_step)
    header = ["mu", "alpha", "x", "s"]
    rows = []
    for a in args.alpha:
        for m in mus:
            d = lump_sum_discount(StableParams(a, 0.0, 1.0, float(m)))
            rows.append([float(m), a, d.x, d.s])
    _write_csv(args.out, _config_echo(args, command="discount"), header, rows)
    return EXIT_OK


def cmd_oracle(args) -> int:
    process = _process_from(args)
    reports = []
    if args.check in ("domination", "all"):
        sched = dca_schedule(args.k)
        steps = bound_general(process, sched)
        paths = simulate_paths(process, sched, args.n_paths, args.seed)
        reports.append(
            check_domination(
                paths, sched, steps, seed=args.seed, bound_scale=args.bound_scale
            )
        )
    if args.check in ("star-domination", "all"):
        plan = equal_plan(args.k, principal=args.P)
        sb = star_bound_general(process, plan)
        paths = simulate_paths(process, plan, args.n_paths, args.seed)
        reports.append(
            check_domination(
                paths, plan, sb, seed=args.seed, bound_scale=args.bound_scale
            )
        )
    if args.check in ("duality", "all"):
        plan = equal_plan(args.k, principal=args.P)
        paths = simulate_paths(process, plan, args.n_paths, args.seed)
        reports.append(check_withdrawal_duality(paths, plan, seed=args.seed))
    if args.check in ("success", "all"):
        plan = equal_plan(args.k, principal=args.P)
        if process.alpha == 1.0 or process.mu == 0.0:
            sb = star_bound_general(process, plan)
        else:
            sb = star_bound_closed_form(process, args.k)
        reports.append(
            estimate_success_prob(process, plan, args.n_paths, args.seed, star=sb)
        )
    text = "\n\n".join(r.to_text() for r in reports) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if any(r.violations for r in reports):
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_data(args) -> int:
    raw = load_csv(args.csv)
    returns = to_returns(raw)
    out_dir = args.out_dir
    cfg = _config_echo(args, command="data", rows=len(raw), returns=len(returns))
    _write_csv(
        f"{out_dir}/returns.csv",
        cfg,
        ["year", "gross", "log"],
        zip(returns.years.tolist(), returns.gross.tolist(), returns.log_returns.tolist()),
    )
    init = StableParams(*(float(tok) for tok in args.init.split(",")))
    fit = fit_stable(returns, init)
    p = fit.params
    fit_cfg = dict(cfg)
    fit_cfg.update(
        fit_alpha=f"{p.alpha:.6g}",
        fit_beta=f"{p.beta:.6g}",
        fit_sigma=f"{p.sigma:.6g}",
        fit_mu=f"{p.mu:.6g}",
        fit_converged=fit.converged,
        fit_iterations=fit.iterations,
    )
    _write_csv(
        f"{out_dir}/qq.csv",
        fit_cfg,
        ["p", "empirical", "model"],
        fit.diagnostics,
    )
    sys.stdout.write(
        f"fitted: alpha={p.alpha:.6g} beta={p.beta:.6g} "
        f"sigma={p.sigma:.6g} mu={p.mu:.6g} "
        f"(converged={fit.converged}, iterations={fit.iterations})\n"
    )
    if not fit.converged:
        sys.stderr.write("fit did not converge; last iterate reported\n")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def _add_process_flags(sp, with_defaults=True):
    sp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA if with_defaults else None)
    sp.add_argument("--beta", type=float, default=DEFAULT_BETA if with_defaults else None)
    sp.add_argument("--sigma", type=float, default=DEFAULT_SIGMA if with_defaults else None)
    sp.add_argument("--mu", type=float, default=DEFAULT_MU if with_defaults else None)


def build_parser() -> _Parser:
    parser = _Parser(prog="stablewealth", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="root RNG seed")
    parser.add_argument("--out", default=None, help="output path ('-' for stdout)")
    parser.add_argument(
        "--tol", type=float, default=DEFAULT_QUANTILE_TOL, help="quantile tolerance"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="terminal-wealth bound parameters and quantiles")
    _add_process_flags(b)
    b.add_argument("--dca", action="store_true", help="equal amounts at unit spacing")
    b.add_argument("--k", type=int, default=10)
    b.add_argument("--times", type=float, nargs="+")
    b.add_argument("--amounts", type=float, nargs="+")
    b.add_argument("--closed-form", action="store_true", dest="closed_form")
    b.add_argument("--quantiles", default="0.05,0.95")
    b.set_defaults(func=cmd_bound)

    w = sub.add_parser("withdraw", help="necessary principal and success bound")
    _add_process_flags(w)
    w.add_argument("--k", type=int, default=None, help="number of equal withdrawals")
    w.add_argument("--continuous", action="store_true")
    w.add_argument("--n", type=int, default=None, help="years of continuous withdrawal")
    w.add_argument("--C", type=float, nargs="+", default=[0.95])
    w.add_argument("--P", type=float, default=None, help="principal for the success bound")
    w.set_defaults(func=cmd_withdraw)

    f = sub.add_parser("frontier", help="drift-over-scale frontier sweeps")
    f.add_argument("--C", type=float, default=0.95)
    f.add_argument("--alpha", type=float, nargs="+", default=[DEFAULT_ALPHA])
    f.add_argument("--beta", type=float, default=DEFAULT_BETA)
    f.add_argument("--continuous", action="store_true")
    f.add_argument("--k-min", type=int, default=2, dest="k_min")
    f.add_argument("--k-max", type=int, default=60, dest="k_max")
    f.add_argument("--fit-surrogate", action="store_true", dest="fit_surrogate")
    f.set_defaults(func=cmd_frontier)

    d = sub.add_parser("discount", help="lump-sum discount grid")
    d.add_argument("--alpha", type=float, nargs="+", default=[1.5, 2.0])
    d.add_argument("--mu-min", type=float, default=0.01, dest="mu_min")
    d.add_argument("--mu-max", type=float, default=0.5, dest="mu_max")
    d.add_argument("--mu-step", type=float, default=0.01, dest="mu_step")
    d.set_defaults(func=cmd_discount)

    o = sub.add_parser("oracle", help="Monte Carlo validation of the bounds")
    _add_process_flags(o)
    o.add_argument(
        "--check",
        choices=["domination", "star-domination", "duality", "success", "all"],
        default="all",
    )
    o.add_argument("--k", type=int, default=10)
    o.add_argument("--P", type=float, default=10.0)
    o.add_argument("--n-paths", type=int, default=100000, dest="n_paths")
    o.add_argument(
        "--bound-scale",
        type=float,
        default=1.0,
        dest="bound_scale",
        help="multiply the replayed bound (negative-control probe)",
    )
    o.set_defaults(func=cmd_oracle)

    dt = sub.add_parser("data", help="returns, stable fit, and QQ table from a CSV")
    dt.add_argument("--csv", required=True)
    dt.add_argument("--out-dir", default=".", dest="out_dir")
    dt.add_argument(
        "--init",
        default="1.91,1,0.115,0.0658",
        help="initial estimate alpha,beta,sigma,mu",
    )
    dt.set_defaults(func=cmd_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit2 as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE
    except (ValueError, DataError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE
    except QuadratureError as err:
        sys.stderr.write(f"numerical error: {err}\n")
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
