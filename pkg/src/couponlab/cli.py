"""Command-line front end.

Subcommands::

    couponlab exact    --n 100 --m 1 --d 4
    couponlab simulate --n 100 --m 2 --d 3 --policy keep_fewest --reps 100000 --seed 42
    couponlab bounds   --n 100 --m 1 --d 3
    couponlab table    --n 100 --m 1,2,3 --d 1,2,3,4,5 [--reps R --seed S] [--format csv|markdown]
    couponlab sweep    --n-start 100 --n-end 500 --n-step 50 --m 1 --d 3 --methods exact,lower_bound,upper_bound

Exit codes: 0 success, 2 usage error, 3 state-cap exceeded, 4 numerical or
simulation failure.  ``COUPONLAB_STATE_CAP`` overrides the solver's state cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from . import bounds, closed_forms, exact_solver
from .errors import CouponLabError, InputError
from .simulator import Policy, simulate

__all__ = ["CSV_FIELDS", "RunRecord", "evaluate", "main", "parse_records", "render_records"]

CSV_FIELDS = ("n", "m", "d", "method", "value", "std_err", "replications", "seed")
METHODS = (
    "exact",
    "oracle",
    "closed_form",
    "newman_shepp",
    "best_of_d",
    "lower_bound",
    "upper_bound",
    "asymptotic",
)
SIMULATE_PREFIX = "simulate:"


def _fmt(x: float) -> str:
    return format(x, ".6g")


@dataclass(frozen=True)
class RunRecord:
    n: int
    m: int
    d: int
    method: str
    value: float
    std_err: float | None = None
    replications: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        simulated = self.method.startswith(SIMULATE_PREFIX)
        extras = (self.std_err, self.replications, self.seed)
        if simulated and any(x is None for x in extras):
            raise InputError(f"{self.method} record needs std_err, replications and seed")
        if not simulated and any(x is not None for x in extras):
            raise InputError(f"{self.method} record must not carry simulation fields")

    def to_row(self) -> list[str]:
        return [
            str(self.n),
            str(self.m),
            str(self.d),
            self.method,
            _fmt(self.value),
            "" if self.std_err is None else _fmt(self.std_err),
            "" if self.replications is None else str(self.replications),
            "" if self.seed is None else str(self.seed),
        ]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> RunRecord:
        n, m, d, method, value, std_err, reps, seed = row
        return cls(
            n=int(n),
            m=int(m),
            d=int(d),
            method=method,
            value=float(value),
            std_err=float(std_err) if std_err else None,
            replications=int(reps) if reps else None,
            seed=int(seed) if seed else None,
        )


def render_records(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow(r.to_row())
    return buf.getvalue()


def parse_records(text: str) -> list[RunRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_FIELDS:
        raise InputError(f"unexpected CSV header {header}")
    return [RunRecord.from_row(row) for row in reader]


def _need(cond: bool, method: str, what: str) -> None:
    if not cond:
        raise InputError(f"method {method!r} applies only when {what}")


def evaluate(
    method: str,
    n: int,
    m: int,
    d: int,
    *,
    replications: int | None = None,
    seed: int | None = None,
    e1: float | None = None,
) -> RunRecord:
    """Compute one ``RunRecord``.  ``e1`` (single-offer expectation) may be
    passed in to avoid recomputing it for both bounds."""
    if method.startswith(SIMULATE_PREFIX):
        policy = Policy.parse(method[len(SIMULATE_PREFIX) :])
        if seed is None:
            raise InputError("simulation requires --seed")
        if replications is None:
            raise InputError("simulation requires --reps")
        res = simulate(n, m, d, policy, replications, seed)
        return RunRecord(n, m, d, SIMULATE_PREFIX + policy.value, res.mean, res.std_err, replications, seed)
    if method == "exact":
        value = exact_solver.solve(n, m, d).expected_runs
    elif method == "oracle":
        value = float(exact_solver.solve_exact_rational(n, m, d))
    elif method == "closed_form":
        _need(m == 1 and d == 1, method, "m = 1 and d = 1")
        value = closed_forms.expected_runs_d1_m1(n)
    elif method == "newman_shepp":
        _need(d == 1, method, "d = 1")
        value = closed_forms.expected_runs_d1(n, m)
    elif method == "best_of_d":
        _need(m == 1, method, "m = 1")
        value = closed_forms.expected_runs_m1(n, d)
    elif method in ("lower_bound", "upper_bound"):
        if e1 is None:
            e1 = bounds.single_offer_expectation(n, m)
        fn = bounds.lower_bound if method == "lower_bound" else bounds.upper_bound
        value = fn(n, m, d, e1)
    elif method == "asymptotic":
        value = bounds.asymptotic_estimate(n, m, d)
    else:
        raise InputError(f"unknown method {method!r}")
    return RunRecord(n, m, d, method, value)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _method_list(text: str) -> list[str]:
    methods = [x.strip() for x in text.split(",") if x.strip()]
    if not methods:
        raise argparse.ArgumentTypeError("empty methods list")
    for meth in methods:
        if meth.startswith(SIMULATE_PREFIX):
            try:
                Policy.parse(meth[len(SIMULATE_PREFIX) :])
            except InputError as exc:
                raise argparse.ArgumentTypeError(str(exc)) from None
        elif meth not in METHODS:
            raise argparse.ArgumentTypeError(
                f"unknown method {meth!r}; choose from {', '.join(METHODS)} or simulate:<policy>"
            )
    return methods


def _check_sim_flags(args: argparse.Namespace, needed: bool) -> None:
    if not needed:
        return
    if args.seed is None:
        raise InputError("simulation requires an explicit --seed")
    if args.reps is None or args.reps < 2:
        raise InputError("simulation requires --reps >= 2")


def cmd_exact(args: argparse.Namespace, out) -> None:
    if args.profile:
        res = exact_solver.solve_profile(args.n, args.m, args.d)
        print(
            f"# states={res.state_count} bytes={res.memory_bytes} "
            + " ".join(f"{k}={v:.6f}s" for k, v in res.timings.items()),
            file=sys.stderr,
        )
        rec = RunRecord(args.n, args.m, args.d, "exact", res.expected_runs)
    else:
        rec = evaluate("exact", args.n, args.m, args.d)
    out.write(render_records([rec]))


def cmd_simulate(args: argparse.Namespace, out) -> None:
    _check_sim_flags(args, True)
    rec = evaluate(SIMULATE_PREFIX + args.policy, args.n, args.m, args.d, replications=args.reps, seed=args.seed)
    out.write(render_records([rec]))


def cmd_bounds(args: argparse.Namespace, out) -> None:
    report = bounds.bounds_report(args.n, args.m, args.d)
    out.write(json.dumps(report.to_dict(), indent=2) + "\n")


def cmd_table(args: argparse.Namespace, out) -> None:
    simulated = args.reps is not None and args.reps > 0
    _check_sim_flags(args, simulated)
    policy = Policy.parse(args.policy)
    rows = []
    for m in args.m:
        for d in args.d:
            exact = exact_solver.solve(args.n, m, d).expected_runs
            sim = simulate(args.n, m, d, policy, args.reps, args.seed) if simulated else None
            rows.append(
                [
                    str(args.n),
                    str(m),
                    str(d),
                    f"{exact:.2f}",
                    "" if sim is None else f"{sim.mean:.2f}",
                    "" if sim is None else f"{sim.std_err:.2f}",
                ]
            )
    header = ["n", "m", "d", "algorithm", "simulation", "std_err"]
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    else:
        out.write("| " + " | ".join(header) + " |\n")
        out.write("|" + "---|" * len(header) + "\n")
        for row in rows:
            out.write("| " + " | ".join(cell or "-" for cell in row) + " |\n")


def cmd_sweep(args: argparse.Namespace, out) -> None:
    if args.n_step < 1:
        raise InputError(f"--n-step must be >= 1, got {args.n_step}")
    if args.n_start > args.n_end:
        raise InputError(f"--n-start {args.n_start} exceeds --n-end {args.n_end}")
    _check_sim_flags(args, any(meth.startswith(SIMULATE_PREFIX) for meth in args.methods))
    needs_e1 = any(meth in ("lower_bound", "upper_bound") for meth in args.methods)
    records = []
    for n in range(args.n_start, args.n_end + 1, args.n_step):
        e1 = bounds.single_offer_expectation(n, args.m) if needs_e1 else None
        for meth in args.methods:
            records.append(evaluate(meth, n, args.m, args.d, replications=args.reps, seed=args.seed, e1=e1))
    text = render_records(records)
    if args.output:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="couponlab",
        description="Expected runs to collect m sets of n coupons when each run offers d distinct coupons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def nmd(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True, help="number of coupon types")
        p.add_argument("--m", type=int, required=True, help="copies needed of each type")
        p.add_argument("--d", type=int, required=True, help="distinct coupons offered per run")

    def sim_flags(p: argparse.ArgumentParser, reps_default: int | None = None) -> None:
        p.add_argument("--reps", type=int, default=reps_default, help="Monte Carlo replications")
        p.add_argument("--seed", type=int, default=None, help="simulation seed (required to simulate)")

    p = sub.add_parser("exact", help="exact expectation by dynamic programming")
    nmd(p)
    p.add_argument("--profile", action="store_true", help="print timing breakdown to stderr")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo estimate for one process")
    nmd(p)
    p.add_argument("--policy", default=Policy.KEEP_FEWEST.value, choices=[x.value for x in Policy])
    sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="lower/upper bounds, asymptotic estimate and exact value (JSON)")
    nmd(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", help="exact vs simulated table over m and d")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=_int_list, required=True, help="comma-separated m values")
    p.add_argument("--d", type=_int_list, required=True, help="comma-separated d values")
    p.add_argument("--policy", default=Policy.KEEP_FEWEST.value, choices=[x.value for x in Policy])
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    sim_flags(p, reps_default=0)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", help="CSV rows over a range of n")
    p.add_argument("--n-start", type=int, required=True)
    p.add_argument("--n-end", type=int, required=True)
    p.add_argument("--n-step", type=int, default=1)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--methods", type=_method_list, required=True, help="comma-separated methods")
    p.add_argument("--output", help="write CSV here instead of stdout")
    sim_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler: Callable[[argparse.Namespace, object], None] = args.func
    try:
        handler(args, out)
    except CouponLabError as exc:
        print(f"couponlab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
