"""Batch front-end: oracles, estimates, diagnostics, machine-readable reports.

Exit codes: 0 success; 2 usage/spec/domain error; 3 range or overflow while
generating coefficients; 4 at least one x had no saddle (rows are marked and
the run continues); 5 regression mismatch in diagnose mode; 6 quadrature
nonconvergence in perron mode.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import catalog
from .admissibility import (
    Witness,
    check_A,
    check_A_minus,
    check_corollary_trends,
    check_T,
    classify,
    default_delta,
    product,
)
from .errors import ConvergenceError, DomainError, NoSaddleError, RangeError
from .perron import ContourSpec, perron_hat
from .saddle import estimate_F, rv_ratio_check, solve_saddle
from .series import hat_F, read_coefficient_file, write_coefficient_file

_N_GUARD = 10 ** 8


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _threads():
    env = os.environ.get("DSADDLE_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _out_stream(path):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


class _Source:
    """Exactly one series source: a catalog key or a coefficient file."""

    def __init__(self, args, need_coeffs=False, N=None):
        if bool(args.series) == bool(args.coeff_file):
            raise DomainError("exactly one of --series / --coeff-file is required")
        self.entry = None
        if args.series:
            self.entry = catalog.get(args.series)
            self.series = self.entry.closed
            self.coeffs = self.entry.coeffs(N) if N else None
            self.label = self.entry.key
        else:
            self.coeffs = read_coefficient_file(args.coeff_file)
            self.series = self.coeffs
            self.label = self.coeffs.label or args.coeff_file
        if need_coeffs and self.coeffs is None:
            raise DomainError("this command needs coefficients: pass --N with --series")


def _parse_x_list(args):
    xs = []
    if args.x:
        xs.extend(float(v) for v in args.x)
    if args.x_decades:
        lo, hi = args.x_decades
        k = int(lo)
        while k <= int(hi):
            xs.append(10.0 ** k)
            k += 1
    if not xs:
        raise DomainError("no x values: pass --x or --x-decades")
    return xs


def _witness_from_file(path, beta):
    import numpy as np

    table = np.loadtxt(path, ndmin=2)
    sig, val = table[:, 0], table[:, 1]
    order = np.argsort(sig)
    sig, val = sig[order], val[order]

    def fn(sigma):
        return float(np.interp(sigma, sig, val))

    return fn, beta


def _resolve_witness(args, src):
    if args.delta == "default" and src.entry is not None:
        w = src.entry.witness()
    elif args.delta == "default":
        w = default_delta(src.series)
    elif args.delta.startswith("file:"):
        base = (src.entry.witness() if src.entry is not None
                else default_delta(src.series))
        fn, beta = _witness_from_file(args.delta[5:], base.beta)
        w = Witness(delta=fn, beta=beta, T=base.T, source="file")
    else:
        raise DomainError(f"bad --delta {args.delta!r}")
    if args.T == "b":
        from .series import eval_derivatives

        series = src.series
        w = Witness(delta=w.delta, beta=w.beta,
                    T=lambda s: eval_derivatives(series, s)[1], source=w.source)
    elif args.T and args.T.startswith("file:"):
        fn, _ = _witness_from_file(args.T[5:], w.beta)
        w = Witness(delta=w.delta, beta=w.beta, T=fn, source=w.source)
    return w


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_coeffs(args):
    if args.N is None or not 1 <= args.N <= _N_GUARD:
        raise DomainError(f"--N required, 1 <= N <= {_N_GUARD}")
    src = _Source(args, need_coeffs=True, N=args.N)
    with _out_stream(args.out) as fh:
        write_coefficient_file(fh, src.coeffs, keep_zeros=args.keep_zeros)
    return 0


def _estimate_row(series, oracle, x, tol, rv_y):
    row = {"x": x}
    try:
        sol = solve_saddle(series, x, tol=tol)
    except (NoSaddleError, ConvergenceError) as exc:
        row["status"] = "NO_SADDLE"
        row["detail"] = str(exc)
        return row
    row["status"] = "OK"
    row["sigma_x"] = sol.sigma_x
    row["residual"] = sol.residual
    rep = estimate_F(series, x, oracle=oracle, tol=tol)
    row["hat_est"] = rep.hat_estimate
    row["hat_exact"] = rep.exact_hat
    row["rel_err_hat"] = rep.rel_err_hat
    row["F_est"] = rep.F_estimate
    row["F_exact"] = rep.exact_F
    row["rel_err_F"] = rep.rel_err_F
    if rv_y is not None and oracle is not None and x * rv_y <= oracle.N:
        rv = rv_ratio_check(series, x, rv_y, oracle=oracle)
        row["rv_observed"] = rv.observed
        row["rv_predicted"] = rv.predicted
        row["rv_finite"] = rv.predicted_finite
    return row


def cmd_estimate(args):
    src = _Source(args, N=args.N)
    xs = _parse_x_list(args)
    rv_y = None
    if args.rv:
        if not args.rv.startswith("y="):
            raise DomainError("--rv expects y=<value>")
        rv_y = float(args.rv[2:])
    oracle = src.coeffs
    series = src.series

    cols = ["x", "status", "sigma_x", "residual", "hat_est", "hat_exact",
            "rel_err_hat", "F_est", "F_exact", "rel_err_F"]
    if rv_y is not None:
        cols += ["rv_observed", "rv_predicted", "rv_finite"]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(
            lambda x: _estimate_row(series, oracle, x, args.tol, rv_y), xs))

    failed = any(r["status"] != "OK" for r in rows)
    with _out_stream(args.out) as fh:
        if args.format == "json":
            doc = {"schema": "1", "command": "estimate", "series": src.label,
                   "tol": args.tol, "rows": [{c: r.get(c) for c in cols} for r in rows]}
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        else:
            fh.write("# schema=1 command=estimate series=%s tol=%r\n"
                     % (src.label, args.tol))
            fh.write(",".join(cols) + "\n")
            for r in rows:
                fh.write(",".join(_fmt(r.get(c)) for c in cols) + "\n")
    return 4 if failed else 0


def _diagnose_one(entry, args):
    w = _resolve_witness(args, _EntrySource(entry))
    K = args.sigma_grid if args.sigma_grid is not None else entry.grid_K
    a = check_A(entry.closed, w, K=K)
    t = check_T(entry.closed, w, K=K) if w.T is not None else None
    trends = check_corollary_trends(entry.closed, K=K, beta=w.beta)
    am = check_A_minus(entry.closed, w, K=min(K, 20))
    got = classify(a, t, trends)
    out = {
        "schema": "1",
        "label": entry.key,
        "alpha": entry.alpha,
        "expected": entry.expected,
        "classified": got,
        "A": a.to_json_dict(),
        "A_minus": am.to_json_dict(),
        "corollary_trends": trends.to_json_dict(),
    }
    if t is not None:
        out["T"] = t.to_json_dict()
    return out, got == entry.expected


class _EntrySource:
    def __init__(self, entry):
        self.entry = entry
        self.series = entry.closed


def cmd_diagnose(args):
    flags = {"sigma_grid": args.sigma_grid, "delta": args.delta, "T": args.T}
    if args.regression:
        results = []
        ok = True
        for key in catalog.REGRESSION_KEYS:
            out, match = _diagnose_one(catalog.get(key), args)
            results.append(out)
            ok = ok and match
        doc = {"schema": "1", "mode": "regression", "flags": flags,
               "all_matched": ok, "entries": results}
        with _out_stream(args.out) as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        return 0 if ok else 5
    if args.product:
        e1, e2 = (catalog.get(k) for k in args.product)
        prod = product(e1.witnessed(), e2.witnessed())
        K = args.sigma_grid if args.sigma_grid is not None else max(e1.grid_K, e2.grid_K)
        a = check_A(prod.series, prod.witness, K=K)
        trends = check_corollary_trends(prod.series, K=K, beta=prod.witness.beta)
        got = classify(a, None, trends)
        doc = {"schema": "1", "mode": "product", "flags": flags,
               "label": prod.series.label, "classified": got,
               "A": a.to_json_dict(), "corollary_trends": trends.to_json_dict()}
        with _out_stream(args.out) as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        return 0
    if args.coeff_file:
        src = _Source(args)
        w = _resolve_witness(args, src)
        K = args.sigma_grid if args.sigma_grid is not None else 20
        a = check_A(src.series, w, K=K)
        t = check_T(src.series, w, K=K) if w.T is not None else None
        trends = check_corollary_trends(src.series, K=K, beta=w.beta)
        doc = {
            "schema": "1", "label": src.label, "alpha": src.series.alpha,
            "expected": None, "classified": classify(a, t, trends),
            "flags": flags, "A": a.to_json_dict(),
            "corollary_trends": trends.to_json_dict(),
        }
        if t is not None:
            doc["T"] = t.to_json_dict()
        with _out_stream(args.out) as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        return 0
    if not args.series:
        raise DomainError("diagnose needs --series, --coeff-file, --product, "
                          "or --regression")
    entry = catalog.get(args.series)
    out, match = _diagnose_one(entry, args)
    out["flags"] = flags
    with _out_stream(args.out) as fh:
        fh.write(json.dumps(out, sort_keys=True, indent=1) + "\n")
    return 0 if match else 5


def cmd_perron(args):
    src = _Source(args, N=args.N)
    xs = _parse_x_list(args)
    series = src.coeffs if src.coeffs is not None else src.series
    if args.c is None:
        raise DomainError("--c is required")
    spec = ContourSpec(c=args.c, T=args.T_height, tol=args.tol)
    code = 0
    rows = []
    for x in xs:
        try:
            res = perron_hat(series, x, spec)
        except ConvergenceError:
            rows.append({"x": x, "status": "UNCONVERGED"})
            code = 6
            continue
        exact = rel = None
        if src.coeffs is not None and 1.0 <= x <= src.coeffs.N:
            exact = hat_F(src.coeffs, x)
            if exact:
                rel = abs(res.value.real - exact) / abs(exact)
        rows.append({"x": x, "status": "OK", "value": res.value.real,
                     "tail_bound": res.tail_bound, "T_used": res.T_used,
                     "evals": res.evals, "exact": exact, "rel_err": rel})
    cols = ["x", "status", "value", "tail_bound", "T_used", "evals", "exact", "rel_err"]
    with _out_stream(args.out) as fh:
        if args.format == "json":
            doc = {"schema": "1", "command": "perron", "series": src.label,
                   "c": args.c, "tol": args.tol, "rows": rows}
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        else:
            fh.write("# schema=1 command=perron series=%s c=%r tol=%r\n"
                     % (src.label, args.c, args.tol))
            fh.write(",".join(cols) + "\n")
            for r in rows:
                fh.write(",".join(_fmt(r.get(c)) for c in cols) + "\n")
    return code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser():
    p = argparse.ArgumentParser(
        prog="dsaddle",
        description="Dirichlet-series saddle point toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(q, coeffs=False):
        q.add_argument("--series", help="catalog key, e.g. exp_zeta or exp_geom:2")
        q.add_argument("--coeff-file", help="coefficient file path")
        q.add_argument("--N", type=int, help="truncation length for coefficients")
        q.add_argument("--out", help="output path (default stdout)")
        q.add_argument("--format", choices=("csv", "json"), default="csv")
        q.add_argument("--tol", type=float, default=1e-8 if coeffs else 1e-12)

    q = sub.add_parser("coeffs", help="generate a coefficient file")
    common(q)
    q.add_argument("--keep-zeros", action="store_true")
    q.set_defaults(fn=cmd_coeffs)

    q = sub.add_parser("estimate", help="saddle-point estimates vs exact oracles")
    common(q)
    q.add_argument("--x", nargs="+", help="x values")
    q.add_argument("--x-decades", nargs=2, type=float, metavar=("LO", "HI"),
                   help="powers of ten, inclusive")
    q.add_argument("--rv", help="y=<v>: add regular-variation ratio columns")
    q.set_defaults(fn=cmd_estimate)

    q = sub.add_parser("diagnose", help="admissibility condition audits")
    common(q)
    q.add_argument("--sigma-grid", type=int, metavar="K",
                   help="grid depth (default: per-entry recommendation)")
    q.add_argument("--delta", default="default",
                   help="'default' or file:<path> with 'sigma value' lines")
    q.add_argument("--T", default=None,
                   help="'b' for T(sigma)=b(sigma), or file:<path>")
    q.add_argument("--product", nargs=2, metavar=("KEY1", "KEY2"),
                   help="diagnose the product of two catalog entries")
    q.add_argument("--regression", action="store_true",
                   help="run the expected-classification matrix; exit 5 on mismatch")
    q.set_defaults(fn=cmd_diagnose)

    q = sub.add_parser("perron", help="contour-integral evaluation of F-hat")
    common(q)
    q.add_argument("--x", nargs="+", help="x values")
    q.add_argument("--x-decades", nargs=2, type=float, metavar=("LO", "HI"))
    q.add_argument("--c", type=float, help="contour line Re(s) = c")
    q.add_argument("--T-height", type=float, default=None,
                   help="fixed truncation height (default: adaptive)")
    q.set_defaults(fn=cmd_perron, tol=1e-6)
    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except RangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 6


if __name__ == "__main__":
    sys.exit(main())
