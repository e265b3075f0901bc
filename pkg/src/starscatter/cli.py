"""Command-line front end.

    starscatter forward  --config net.json --kmin 60 --kmax 160 --dk 0.005 --out sweep.csv
    starscatter invert   --csv sweep.csv --max-n 8 --out report.json
    starscatter validate --config net.json

Exit codes: 0 ok, 2 config/parse failure, 3 solver failure, 4 insufficient
samples, 5 validation failure.  STAR_SCATTER_THREADS caps the sweep pool.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import fundamental, inversion, jost, oracle, scattering
from .config import load_network
from .errors import ConfigError, InsufficientDataError, StarScatterError


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _thread_count() -> int:
    threads = os.cpu_count() or 1
    cap = os.environ.get("STAR_SCATTER_THREADS")
    if cap:
        try:
            threads = min(threads, max(int(cap), 1))
        except ValueError:
            pass
    return threads


def cmd_forward(args) -> int:
    try:
        net, _ = load_network(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.dk <= 0:
        print("error: --dk must be positive", file=sys.stderr)
        return 2
    if args.kmin < net.k_floor:
        print(f"error: --kmin must be >= k_floor ({net.k_floor})",
              file=sys.stderr)
        return 2
    n_pts = int(math.floor((args.kmax - args.kmin) / args.dk + 1e-9)) + 1
    if n_pts < 1:
        print("error: empty frequency grid", file=sys.stderr)
        return 2
    grid = args.kmin + args.dk * np.arange(n_pts)
    try:
        entries = scattering.reflectogram(net, grid, threads=_thread_count())
    except StarScatterError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    m = net.m
    header = ["k", "re_R1", "im_R1", "abs_R1"]
    for j in range(2, m + 1):
        header += [f"re_T{j}", f"im_T{j}"]
    lines = [",".join(header)]
    for e in entries:
        if e.resonant or e.coeffs is None:
            row = [_fmt(e.k)] + ["NaN"] * (len(header) - 1)
        else:
            c = e.coeffs
            row = [_fmt(e.k), _fmt(c.R1.real), _fmt(c.R1.imag),
                   _fmt(abs(c.R1))]
            for t in c.T:
                row += [_fmt(t.real), _fmt(t.imag)]
        lines.append(",".join(row))
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(entries)} rows to {args.out}")
    return 0


def read_reflectogram_csv(path):
    """Parse a cmd_forward CSV back into ReflectogramSample rows (NaN rows,
    i.e. flagged resonances, are skipped)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:4] != ["k", "re_R1", "im_R1", "abs_R1"]:
            raise ConfigError(f"{path}: not a reflectogram CSV (bad header)")
        samples = []
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) < 3 or not line.strip():
                continue
            k, re, im = (float(parts[0]), float(parts[1]), float(parts[2]))
            if math.isnan(re) or math.isnan(im):
                continue
            samples.append(inversion.ReflectogramSample(k, complex(re, im)))
    return samples


def cmd_invert(args) -> int:
    try:
        samples = read_reflectogram_csv(args.csv)
    except (OSError, ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = inversion.estimate_taus(samples, expected_max_n=args.max_n)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    doc = {
        "m_hat": report.m_hat,
        "taus": report.taus,
        "poles": report.poles,
        "diagnostics": {
            "m_samples_used": report.m_samples_used,
            "m_abs_deviation": report.m_abs_deviation,
            "tau_fit_rms": report.residual_diagnostics,
        },
        "warnings": report.warnings,
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    taus = ", ".join(f"{t:.6g}" for t in report.taus) or "none"
    print(f"m_hat={report.m_hat}  taus=[{taus}]  "
          f"poles={len(report.poles)}  warnings={len(report.warnings)}")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _run_checks(net):
    """Invariant battery for `validate`; yields (name, passed, detail)."""
    ks = [10.0, 17.3, 29.0]

    coeffs = [scattering.solve_scattering(net, k) for k in ks]
    flux_err = max(
        abs(abs(c.R1) ** 2 + sum(abs(t) ** 2 for t in c.T) - 1.0)
        for c in coeffs)
    yield ("flux_conservation", flux_err <= 1e-8, f"max err {flux_err:.3e}")

    res = 0.0
    for c in coeffs:
        vals = [y / b.geometry.A0
                for (y, _), b in zip(c.node_values, net.branches)]
        scale = max(abs(v) for v in vals) + 1e-30
        res = max(res, max(abs(v - vals[0]) for v in vals) / scale)
        lhs = sum(b.geometry.A0 * dy
                  for (_, dy), b in zip(c.node_values, net.branches))
        saap = sum(b.geometry.A0 * b.geometry.A0prime for b in net.branches)
        res = max(res, abs(lhs - saap * c.ybar) / (abs(lhs) + c.k))
    yield ("node_residuals", res <= 1e-10, f"max rel residual {res:.3e}")

    b1 = net.branches[0]
    k = ks[1]
    X = max(jost.truncation_point(b1.potential), 0.5)
    xs = np.linspace(0.0, X, 10)
    f, df = jost.jost_profile(b1.potential, k, xs)
    ft, dft = jost.jost_tilde_profile(b1.potential, k, xs)
    w_vals = f * dft - df * ft
    w_var = float(np.max(np.abs(w_vals - w_vals[0])) /
                  (abs(w_vals[0]) + 1e-30))
    yield ("wronskian_constancy", w_var <= 1e-8, f"rel variation {w_var:.3e}")

    ok = True
    detail = []
    for k in ks:
        dx = min(1e-3, (2.0 * math.pi / k) / 24.0)
        X_tr = max([b.potential.support_end
                    for b in net.infinite_branches] + [1.0]) + 0.5
        field = oracle.oracle_solve(net, k, dx, X_tr)
        c = scattering.solve_scattering(net, k)
        gap = abs(c.R1 - field.R1_est) / (abs(field.R1_est) + 1e-9)
        detail.append(f"k={k}: {gap:.2e}")
        ok = ok and gap <= 1e-3
    yield ("oracle_comparison", ok, "; ".join(detail))

    fins = net.finite_branches
    if fins:
        ok = True
        detail = []
        for b in fins:
            tau, h = b.geometry.tau, b.geometry.h
            K = fundamental.solve_kernel(b.potential, tau)
            for k in (6.0, 14.0):
                ivp = fundamental.fundamental_at(b.potential, tau, h, k)
                ker = fundamental.fundamental_via_kernel(K, h, k)
                gap = abs(ivp.omega_tau - ker)
                detail.append(f"b{b.id},k={k}: {gap:.2e}")
                ok = ok and gap <= 1e-6
        yield ("kernel_vs_ivp", ok, "; ".join(detail))


def cmd_validate(args) -> int:
    try:
        net, _ = load_network(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = []
    try:
        for name, passed, detail in _run_checks(net):
            print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
            if not passed:
                failed.append(name)
    except StarScatterError as exc:
        print(f"solver error during validation: {exc}", file=sys.stderr)
        return 3
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 5
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starscatter",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("forward", help="frequency sweep of R1 (and T_j)")
    f.add_argument("--config", required=True)
    f.add_argument("--kmin", type=float, required=True)
    f.add_argument("--kmax", type=float, required=True)
    f.add_argument("--dk", type=float, required=True)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_forward)

    i = sub.add_parser("invert", help="recover m and travel times from a sweep")
    i.add_argument("--csv", required=True)
    i.add_argument("--max-n", type=int, default=8, dest="max_n")
    i.add_argument("--out", default=None)
    i.set_defaults(func=cmd_invert)

    v = sub.add_parser("validate", help="run the invariant battery")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
