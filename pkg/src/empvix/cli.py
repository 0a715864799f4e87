"""Command-line interface.

Every command writes machine-readable JSON or CSV to stdout (or ``--out``)
and logs to stderr. Exit codes: 0 ok, 2 input error, 3 numerical error,
4 calibration estimate on a search bound.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from .calibration import CalibrationProblem, calibrate_32, calibrate_k
from .data import load_observations, load_vix_csv
from .diffusion import DEFAULT_DT, DiffusionParams, simulate_path
from .empirical import (
    MONOTONE_TOL,
    ecdf,
    fit_quantile_polynomial,
    h_inverse,
    load_quantile_map,
    save_quantile_map,
)
from .exceptions import CalibrationError, DataError, DomainError, FitError, NumericalError
from .pricing import DEFAULT_TERMS, PricingParams, price, project, truncation_report
from .three_halves import ThreeHalvesParams, price_call_32

log = logging.getLogger("empvix")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_AT_BOUND = 0, 2, 3, 4


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _emit_json(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(rows, out=None):
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    finally:
        if out:
            fh.close()


def cmd_fit(args) -> int:
    series = load_vix_csv(args.data)
    qmap = fit_quantile_polynomial(ecdf(series), args.degree, monotone_tol=args.monotone_tol)
    save_quantile_map(qmap, args.out)
    log.info("wrote %s", args.out)
    _emit_json({
        "degree": qmap.degree,
        "n_observations": len(series),
        "h_min": qmap.h_min,
        "h_max": qmap.h_max,
        "max_monotonicity_violation": qmap.monotonicity_violation(),
        "model_file": str(args.out),
    })
    return EXIT_OK


def cmd_price(args) -> int:
    qmap = load_quantile_map(args.model_file, tol=args.monotone_tol)
    params = PricingParams(k=args.k, T=args.T, r=args.r, K=args.K)
    x = h_inverse(qmap, args.vix)
    coeffs = project(qmap, args.instrument, args.K, args.terms)
    value = price(args.t, x, coeffs, params)
    _emit_json({"price": float(value), "x": float(x), "terms": args.terms, "instrument": args.instrument})
    return EXIT_OK


def cmd_tables(args) -> int:
    qmap = load_quantile_map(args.model_file, tol=args.monotone_tol)
    params = PricingParams(k=args.k, T=args.T, r=args.r, K=args.K)
    table = truncation_report(qmap, _floats(args.vix_levels), _ints(args.terms), params, args.t)
    _emit_csv(table.rows(args.decimals), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    path = simulate_path(DiffusionParams(args.k, args.x0), args.years, args.dt, args.seed)
    qmap = load_quantile_map(args.model_file, tol=args.monotone_tol) if args.model_file else None
    header = ["time", "x"] + (["vix"] if qmap else [])
    vix = qmap.tilde(path.states) if qmap else None

    def rows():
        yield header
        for i, (t, x) in enumerate(zip(path.times, path.states)):
            row = [repr(float(t)), repr(float(x))]
            if qmap:
                row.append(repr(float(vix[i])))
            yield row

    _emit_csv(rows(), args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    qmap = load_quantile_map(args.model_file, tol=args.monotone_tol)
    problem = CalibrationProblem(load_observations(args.observations), qmap, args.K, args.r,
                                 (args.k_lo, args.k_hi), args.terms)
    fit = calibrate_k(problem)
    _emit_json(fit.to_dict())
    if fit.at_bound:
        log.warning("k estimate %.6g sits on a search bound", fit.k_hat)
        return EXIT_AT_BOUND
    return EXIT_OK


def cmd_calibrate32(args) -> int:
    fit = calibrate_32(load_observations(args.observations), args.k32, args.K, args.r)
    _emit_json(fit.to_dict())
    return EXIT_OK


def cmd_compare32(args) -> int:
    qmap = load_quantile_map(args.model_file, tol=args.monotone_tol)
    grid = np.asarray(_floats(args.vix_grid)) if args.vix_grid else np.round(np.arange(0.10, 0.801, 0.01), 10)
    inside = (grid >= qmap.h_min) & (grid <= qmap.h_max)
    if not np.all(inside):
        log.warning("dropping %d VIX levels outside the fitted range [%.4g, %.4g]",
                    int(np.sum(~inside)), qmap.h_min, qmap.h_max)
    grid = grid[inside]
    params = PricingParams(k=args.k, T=args.T, r=args.r, K=args.K)
    coeffs = project(qmap, "call", args.K)
    emp = price(args.t, h_inverse(qmap, grid), coeffs, params)
    prm = ThreeHalvesParams(args.alpha, args.beta, args.k32, args.K, args.T, args.t, args.r)
    rows = [["V", "empirical_price", "three_halves_price"]]
    for v, e in zip(grid, np.atleast_1d(emp)):
        rows.append([f"{v:g}", repr(float(e)), repr(price_call_32(float(v), prm))])
    _emit_csv(rows, args.out)
    return EXIT_OK


def _model_flags(p, required=True):
    p.add_argument("--model-file", "--model", dest="model_file", required=required,
                   help="quantile map JSON written by `fit`")
    p.add_argument("--monotone-tol", type=float, default=MONOTONE_TOL,
                   help="allowed decrease of h per grid step, as a fraction of its range (default %(default)g)")


def _option_flags(p, need_t=True):
    p.add_argument("--k", type=float, required=True, help="speed of the factor diffusion, 1/years")
    p.add_argument("--r", type=float, default=0.0, help="risk-free rate, 1/years (default %(default)g)")
    p.add_argument("--T", type=float, required=True, help="maturity, years")
    if need_t:
        p.add_argument("--t", type=float, default=0.0, help="valuation time, years (default %(default)g)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="empvix", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the quantile polynomial h to VIX history")
    p.add_argument("--data", required=True, help="CSV of date,close VIX levels (points or decimal)")
    p.add_argument("--degree", type=int, default=30, help="polynomial degree of h, a count (default %(default)s)")
    p.add_argument("--out", required=True, help="path of the quantile map JSON to write")
    p.add_argument("--monotone-tol", type=float, default=MONOTONE_TOL,
                   help="allowed decrease of h per grid step, as a fraction of its range (default %(default)g)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("price", help="price a VIX future, call or put")
    _model_flags(p)
    _option_flags(p)
    p.add_argument("--K", type=float, default=None, help="strike, decimal VIX (calls and puts)")
    p.add_argument("--vix", type=float, required=True, help="current VIX level, decimal")
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="number of Legendre terms (default %(default)s)")
    p.add_argument("--instrument", choices=["futures", "call", "put"], default="futures",
                   help="contract to price (default %(default)s)")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("tables", help="futures and call prices by truncation length, as CSV")
    _model_flags(p)
    _option_flags(p)
    p.add_argument("--K", type=float, required=True, help="call strike, decimal VIX")
    p.add_argument("--vix-levels", default="0.1,0.3,0.5,0.7", help="comma-separated decimal VIX levels")
    p.add_argument("--terms", default="6,11,21,31", help="comma-separated term counts")
    p.add_argument("--decimals", type=int, default=4, help="decimal places printed, a count (default %(default)s)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("simulate", help="Euler sample path of the factor (and VIX) as CSV")
    p.add_argument("--k", type=float, required=True, help="speed of the factor diffusion, 1/years")
    p.add_argument("--years", type=float, required=True, help="horizon, years")
    p.add_argument("--dt", type=float, default=DEFAULT_DT, help="time step, years (default %(default)g)")
    p.add_argument("--x0", type=float, default=0.0, help="initial factor value in (-1, 1), dimensionless")
    p.add_argument("--seed", type=int, default=0, help="random seed, an integer")
    p.add_argument("--out", help="CSV path (default stdout)")
    _model_flags(p, required=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="least-squares estimate of k from observed calls")
    _model_flags(p)
    p.add_argument("--observations", required=True, help="CSV with columns t,vix,call_price,tau (years)")
    p.add_argument("--K", type=float, required=True, help="call strike, decimal VIX")
    p.add_argument("--r", type=float, default=0.0, help="risk-free rate, 1/years (default %(default)g)")
    p.add_argument("--k-lo", type=float, default=1e-3, help="lower search bound for k, 1/years")
    p.add_argument("--k-hi", type=float, default=50.0, help="upper search bound for k, 1/years")
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="number of Legendre terms (default %(default)s)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("calibrate32", help="least-squares fit of the 3/2 model's alpha and beta")
    p.add_argument("--observations", required=True, help="CSV with columns t,vix,call_price,tau (years)")
    p.add_argument("--k32", type=float, default=2.04, help="3/2 volatility coefficient, 1/sqrt(years * decimal VIX) (default %(default)g)")
    p.add_argument("--K", type=float, required=True, help="call strike, decimal VIX")
    p.add_argument("--r", type=float, default=0.0, help="risk-free rate, 1/years (default %(default)g)")
    p.set_defaults(func=cmd_calibrate32)

    p = sub.add_parser("compare32", help="empirical-model and 3/2 call prices over a VIX grid, as CSV")
    _model_flags(p)
    _option_flags(p)
    p.add_argument("--K", type=float, required=True, help="call strike, decimal VIX")
    p.add_argument("--alpha", type=float, required=True, help="3/2 linear drift coefficient, 1/years")
    p.add_argument("--beta", type=float, required=True, help="3/2 quadratic drift coefficient (< 0), 1/(years * decimal VIX)")
    p.add_argument("--k32", type=float, default=2.04, help="3/2 volatility coefficient, 1/sqrt(years * decimal VIX) (default %(default)g)")
    p.add_argument("--vix-grid", help="comma-separated decimal VIX levels (default 0.10..0.80 by 0.01)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_compare32)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        log.error("file not found: %s", exc.filename)
        return EXIT_INPUT
    except (DataError, DomainError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except (FitError, NumericalError, CalibrationError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
