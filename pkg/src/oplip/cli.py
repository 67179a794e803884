"""Command-line surface: seeded, reproducible experiment sweeps and checks.

Identical invocations produce byte-identical output files: records appear in
trial order, floats carry 17 significant digits, and reports contain no
wall-clock data.  The worker pool size is capped by the OPLIP_THREADS
environment variable (default 1); it never changes the output.
"""

import argparse
import sys

import numpy as np

from . import experiments, suite
from .errors import BadExponentError, BadLawError, GuardViolationError
from .functions import builtin_function, contraction_names
from .serialize import canonical_json, format_float
from .spectral import joint_diagonalize, planted_commuting_tuple
from .torus import signal_from_coefficients, frequency_index, periodization_probe
from .transference import (
    contraction_check,
    discretization_report,
    round_contraction,
    verify_conjugation,
)
from .experiments import ExperimentConfig, RatioRecord


def _record_line_json(record: RatioRecord) -> str:
    parts = []
    for name in RatioRecord.FIELDS:
        value = getattr(record, name)
        if isinstance(value, float):
            parts.append(f'"{name}": {format_float(value)}')
        elif isinstance(value, str):
            parts.append(f'"{name}": "{value}"')
        else:
            parts.append(f'"{name}": {int(value)}')
    return "{" + ", ".join(parts) + "}"


def _record_line_csv(record: RatioRecord) -> str:
    cells = []
    for name in RatioRecord.FIELDS:
        value = getattr(record, name)
        cells.append(format_float(value) if isinstance(value, float) else str(value))
    return ",".join(cells)


def write_records(records, fmt: str, out):
    if fmt == "csv":
        out.write(",".join(RatioRecord.FIELDS) + "\n")
        for r in records:
            out.write(_record_line_csv(r) + "\n")
    else:
        for r in records:
            out.write(_record_line_json(r) + "\n")


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


def _common_flags(parser, trials=10, n=8, d=1, f_name="euclid-norm"):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=n)
    parser.add_argument("--d", type=int, default=d)
    parser.add_argument("--trials", type=int, default=trials)
    parser.add_argument("--f", dest="f_name", default=f_name)
    parser.add_argument("--lipschitz", type=float, default=None,
                        help="override the function's Lipschitz constant")
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", dest="fmt", default="json-lines",
                        choices=["json-lines", "csv"])


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        seed=args.seed, n=args.n, d=args.d, trials=args.trials,
        f_name=args.f_name, lipschitz_bound=args.lipschitz,
        output_path=args.out, output_format=args.fmt,
    )


def _run_ratio(args, stream, **kwargs):
    records = stream(_config(args), **kwargs)
    out, should_close = _open_out(args.out)
    try:
        write_records(records, args.fmt, out)
    finally:
        if should_close:
            out.close()
    return 0


def cmd_ratio_commutator(args):
    return _run_ratio(args, experiments.commutator_ratio)


def cmd_ratio_difference(args):
    return _run_ratio(args, experiments.difference_ratio)


def cmd_ratio_doi(args):
    return _run_ratio(args, experiments.doi_ratio)


def cmd_ratio_lp(args):
    return _run_ratio(args, experiments.lp_ratio, p=args.p)


def cmd_ratio_normal(args):
    return _run_ratio(args, experiments.normal_ratio)


def cmd_transference_check(args):
    out, should_close = _open_out(args.out)
    try:
        worst = 0.0
        for index, (it, h, name, v, k0) in enumerate(
            suite.conjugation_instances(args.seed, args.trials)
        ):
            residual = verify_conjugation(it, h, v, args.grid, k0)
            worst = max(worst, residual)
            out.write(
                f"instance={index} d={it.d} n={it.dim} f={name} k0={k0} "
                f"residual={format_float(residual)}\n"
            )
        out.write(f"max-residual={format_float(worst)}\n")
        if args.discretization:
            f = builtin_function(args.f_name, args.d)
            tup, _, _ = planted_commuting_tuple(args.n, args.d, "uniform", seed=args.seed)
            js = joint_diagonalize(tup)
            out.write("discretization report (symbol vs half divided difference):\n")
            for n_round in (1, 2, 4, 8, 16, 32):
                rep = discretization_report(js, f, n_round)
                out.write(
                    f"n={rep.n} identity-residual={format_float(rep.identity_residual)} "
                    f"sup|xi_n - f_k0/2|={format_float(rep.symbol_sup_difference)}\n"
                )
        return 0 if worst <= args.tolerance else 1
    finally:
        if should_close:
            out.close()


def cmd_deleeuw_sweep(args):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    results = suite.deleeuw_ratios(args.seed, sizes=sizes, signals=args.trials, d=args.d)
    out, should_close = _open_out(args.out)
    try:
        out.write("signal," + ",".join(f"N={s}" for s in sizes) + ",spread\n")
        worst = 1.0
        for index, ratios in enumerate(results):
            vals = [ratios[s] for s in sizes]
            spread = max(vals) / min(vals) if min(vals) > 0 else float("inf")
            worst = max(worst, spread)
            out.write(
                f"{index}," + ",".join(format_float(v) for v in vals)
                + f",{format_float(spread)}\n"
            )
        out.write(f"max-spread,{format_float(worst)}\n")
        return 0 if worst < 2.0 else 1
    finally:
        if should_close:
            out.close()


def cmd_periodization(args):
    d_torus = args.d + 1 if args.torus_dim is None else args.torus_dim
    n_grid = 16
    coeffs = np.zeros((n_grid,) * d_torus + (1, 1), dtype=complex)
    coeffs[frequency_index(np.zeros(d_torus, int), n_grid)] = 1.0
    unit = np.zeros(d_torus, int)
    unit[0] = 1
    coeffs[frequency_index(unit, n_grid)] = 0.4
    if d_torus == 2:
        coeffs[frequency_index(np.array([0, 1]), n_grid)] = 0.3
    w = signal_from_coefficients(coeffs)
    result = periodization_probe(w, args.l, args.radius, args.step)
    out, should_close = _open_out(args.out)
    try:
        out.write(f"ratio={format_float(result.ratio)}\n")
        out.write(f"weak-ratio={format_float(result.weak_ratio)}\n")
        out.write(f"truncation-bound={format_float(result.truncation_bound)}\n")
        out.write(f"step={format_float(result.step)}\n")
        out.write(f"points-per-axis={result.points_per_axis}\n")
        return 0 if abs(result.ratio - 1.0) <= 0.05 else 1
    finally:
        if should_close:
            out.close()


def cmd_contraction_test(args):
    out, should_close = _open_out(args.out)
    try:
        failures = 0
        for name in contraction_names(args.d):
            f = builtin_function(name, args.d)
            for n_round in range(1, args.max_rounding + 1):
                h = round_contraction(f, n_round)
                report = contraction_check(h, args.radius, args.d, seed=args.seed)
                status = "ok" if report.ok else "VIOLATION"
                if not report.ok:
                    failures += 1
                out.write(
                    f"f={name} n={n_round} {status} "
                    f"margin={format_float(report.margin)} "
                    f"worst=({list(map(int, report.worst_pair[0]))},"
                    f"{list(map(int, report.worst_pair[1]))})\n"
                )
        out.write(f"violations={failures}\n")
        return 0 if failures == 0 else 1
    finally:
        if should_close:
            out.close()


def cmd_identity_suite(args):
    report = suite.run_identity_suite(args.seed, tolerance_scale=args.tolerance_scale)
    text = canonical_json(report) + "\n"
    out, should_close = _open_out(args.out)
    try:
        out.write(text)
    finally:
        if should_close:
            out.close()
    return 0 if report["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oplip",
        description="Seeded experiments on double operator integrals, weak-L1 "
                    "ratios, torus multipliers and the transference identity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ratio-commutator", help="weak-L1([f(A),B]) ratios")
    _common_flags(p)
    p.set_defaults(func=cmd_ratio_commutator)

    p = sub.add_parser("ratio-difference", help="weak-L1(f(X)-f(Y)) ratios")
    _common_flags(p)
    p.set_defaults(func=cmd_ratio_difference)

    p = sub.add_parser("ratio-doi", help="weak-L1(T_{f_k}(V)) ratios")
    _common_flags(p)
    p.set_defaults(func=cmd_ratio_doi)

    p = sub.add_parser("ratio-lp", help="Schatten-p ratios of T_{f_k}")
    _common_flags(p)
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=cmd_ratio_lp)

    p = sub.add_parser("ratio-normal", help="difference ratios for normal operators")
    _common_flags(p, d=2)
    p.set_defaults(func=cmd_ratio_normal)

    p = sub.add_parser("transference-check", help="verify S(I(V)) = I(T(V))")
    _common_flags(p, trials=10)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--discretization", action="store_true",
                   help="also print the floored-symbol comparison table")
    p.set_defaults(func=cmd_transference_check)

    p = sub.add_parser("deleeuw-sweep", help="weak-L1/L1 ratio stability across grids")
    _common_flags(p, trials=10)
    p.add_argument("--sizes", default="32,64,128")
    p.set_defaults(func=cmd_deleeuw_sweep)

    p = sub.add_parser("periodization", help="Gaussian periodization probe")
    _common_flags(p, trials=1)
    p.add_argument("--l", type=float, default=32.0)
    p.add_argument("--radius", type=float, default=None,
                   help="truncation radius (default 8*l)")
    p.add_argument("--step", type=float, default=None,
                   help="midpoint step (default 2*pi/64)")
    p.add_argument("--torus-dim", type=int, default=None)
    p.set_defaults(func=cmd_periodization)

    p = sub.add_parser("contraction-test", help="exhaustive contraction rounding check")
    _common_flags(p, trials=1)
    p.add_argument("--radius", type=int, default=30)
    p.add_argument("--max-rounding", type=int, default=8)
    p.set_defaults(func=cmd_contraction_test)

    p = sub.add_parser("identity-suite", help="run every identity/property check")
    _common_flags(p, trials=1)
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="test hook: scales every tolerance")
    p.set_defaults(func=cmd_identity_suite)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "command", None) == "periodization":
        if args.radius is None:
            args.radius = 8.0 * args.l
        if args.step is None:
            args.step = 2.0 * np.pi / 64.0
    try:
        return args.func(args)
    except (GuardViolationError, BadExponentError, BadLawError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
