"""Command-line front end.

Subcommands: profile (model-family profile tables), flow (roundness flow
diagnostics), collar (collar construction and level diagnostics), extend
(full extension + certification report), bound (mass upper bounds), and
verify (re-derivation of certificates from an emitted profile).

Exit codes: 0 success/PASS, 2 input or schema errors, 3 hypothesis
violations (clause named), 4 numerical non-certification.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import spectral
from .ads import AdSSchwParams, profile_solve
from .errors import (AdmissibilityError, HypothesisError, InvalidMetricError,
                     InvalidProfileError, NotConvergedError)
from .extensions import (bartnik_mass_upper_bound, build_cmc_collar_b0,
                         build_cmc_collar_bpos, build_extension,
                         build_minimal_collar, prepare_path)
from .geometry import (AxisymmetricSurfaceMetric, BartnikData,
                       hawking_mass_level, mean_curvature_level,
                       omega_functional, profile_hawking_mass,
                       scalar_curvature_warped)
from .metric_path import eigenpath, flow_to_roundness

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_HYPOTHESIS = 3
EXIT_NUMERICAL = 4

_FMT = "%.17g"


class SchemaError(Exception):
    pass


def _fmt(x):
    return _FMT % float(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_bartnik_data(path):
    """Parse {"metric": {...}, "H0": h} into BartnikData."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read input JSON: {e}")
    if not isinstance(doc, dict) or "metric" not in doc or "H0" not in doc:
        raise SchemaError('input must be {"metric": {...}, "H0": number}')
    spec = doc["metric"]
    if not isinstance(spec, dict) or "type" not in spec:
        raise SchemaError('metric must carry a "type" of "round" or '
                          '"legendre"')
    try:
        h0 = float(doc["H0"])
    except (TypeError, ValueError):
        raise SchemaError("H0 must be a number")
    kind = spec["type"]
    try:
        if kind == "round":
            g = AxisymmetricSurfaceMetric.round_sphere(float(spec["r0"]))
        elif kind == "legendre":
            coeffs = [float(c) for c in spec.get("coefficients", [])]
            g = AxisymmetricSurfaceMetric.from_modes(float(spec["r0"]), coeffs)
        else:
            raise SchemaError(f'unknown metric type "{kind}"')
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad metric parameters: {e}")
    except InvalidMetricError as e:
        raise SchemaError(str(e))
    try:
        return BartnikData(g, h0)
    except InvalidMetricError as e:
        raise SchemaError(str(e))


def _report_dict(report, rec):
    return {
        "variant": report.variant,
        "passed": report.passed,
        "min_R_plus_6": report.min_R_plus_6,
        "boundary_metric_residual": report.boundary_metric_residual,
        "boundary_H_residual": report.boundary_H_residual,
        "exterior_mass": report.exterior_mass,
        "bound_values": report.bound_values,
        "parameters": {k: v for k, v in report.parameters.items()},
        "certificates": report.certificates,
        "level_masses": [[t, m] for t, m in report.level_masses],
        "zones": {
            "profile_start": rec.bridge.a1,
            "strict_end": rec.bridge.b2,
            "tail_start": rec.tail_start,
            "s_end": rec.s_end,
            "bend_delta": rec.bend.delta,
            "bend_min_bracket": rec.bend.min_bracket,
        },
    }


def _profile_rows(ext, n_rows=4097):
    s = np.linspace(ext.a, ext.b, n_rows)
    f = ext.f_fn(s)
    fp = ext.fp_fn(s)
    fpp = ext.fpp_fn(s)
    margin = ext.curvature_margin_fn(s)
    r6 = 4.0 * margin / f
    h = 2.0 * fp / f
    mass = profile_hawking_mass(f, fp)
    return s, zip(s, f, fp, fpp, margin, r6, h, mass)


_PROFILE_HEADER = ["s", "f", "f_prime", "f_double_prime", "margin",
                   "R_plus_6", "H", "hawking_mass"]


# ---------------------------------------------------------------------------
# subcommands


def cmd_profile(args):
    if args.r0 <= 0 or args.samples < 2 or args.smax <= 0:
        raise SchemaError("need r0 > 0, smax > 0, samples >= 2")
    params = AdSSchwParams(args.m, args.b)
    if args.m > 0 and args.r0 < params.r_plus:
        raise SchemaError(
            f"r0 = {args.r0} lies inside the horizon r_plus = "
            f"{params.r_plus:.17g}")
    try:
        p = profile_solve(params, args.r0, args.smax, args.samples)
    except InvalidProfileError as e:
        raise SchemaError(str(e))
    R = scalar_curvature_warped(p)
    H = 2.0 * p.f_prime / p.f
    mass = profile_hawking_mass(p.f, p.f_prime)
    rows = zip(p.s_grid, p.f, p.f_prime, p.f_double_prime, R, H, mass)
    _write_csv(args.output,
               ["s", "u", "u_prime", "u_double_prime", "R", "H",
                "hawking_mass"], rows)
    print(f"wrote {args.samples} rows to {args.output}")
    return EXIT_OK


def cmd_flow(args):
    data = load_bartnik_data(args.input)
    flow = flow_to_roundness(data.metric, tol=args.tol)
    n = len(flow.times)
    stride = max(1, n // 64)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    rows = [(flow.times[i],
             np.sqrt(np.sum(flow.w * np.exp(2.0 * flow.phis[i])) / 2.0),
             flow.max_K_deviation(i)) for i in idx]
    _write_csv(args.output, ["time", "area_radius", "max_K_deviation"], rows)
    rep = {"r0": flow.r0, "steps": n - 1, "flow_time": float(flow.times[-1]),
           "final_K_deviation": flow.max_K_deviation(),
           "area_drift_max": flow.area_drift_max}
    _write_json(args.report, rep)
    print(f"flow reached K-deviation {rep['final_K_deviation']:.3e} "
          f"at t = {rep['flow_time']:.6g}")
    return EXIT_OK


def _build_collar(args, data, path):
    if args.variant == "minimal":
        eigen = eigenpath(path)
        return build_minimal_collar(data, path, eigen, epsilon=args.epsilon)
    if args.variant == "cmc-b0":
        return build_cmc_collar_b0(data, path, args.m)
    if args.variant == "cmc-bpos":
        return build_cmc_collar_bpos(data, path, args.m, delta=args.delta)
    raise SchemaError(f"unknown variant {args.variant!r}")


def cmd_collar(args):
    data = load_bartnik_data(args.input)
    path = prepare_path(data.metric)
    collar = _build_collar(args, data, path)
    rows = []
    for i, t in enumerate(path.t_grid):
        H = mean_curvature_level(collar, i)
        rows.append((t, collar.E[i], np.min(collar.v[i]), np.max(collar.v[i]),
                     np.min(H), np.max(H), hawking_mass_level(collar, i)))
    _write_csv(args.output,
               ["t", "E", "v_min", "v_max", "H_min", "H_max", "hawking_mass"],
               rows)
    params = {k: v for k, v in vars(collar.params).items()
              if isinstance(v, (int, float, str))}
    rep = {"variant": args.variant, "min_R_plus_6": collar.min_R_plus_6,
           "parameters": params}
    _write_json(args.report, rep)
    print(f"collar min(R + 6) = {collar.min_R_plus_6:.6e}")
    return EXIT_OK


def cmd_extend(args):
    data = load_bartnik_data(args.input)
    report, ext = build_extension(data, args.mass, args.variant,
                                  m_model=args.m, epsilon=args.epsilon,
                                  delta=args.delta)
    _, rows = _profile_rows(ext)
    _write_csv(args.output, _PROFILE_HEADER, rows)
    _write_json(args.report, _report_dict(report, report.attachment))
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: min(R + 6) = {report.min_R_plus_6:.6e}, "
          f"exterior mass {report.exterior_mass:.17g}")
    if not report.passed:
        worst = min(report.certificates.items(),
                    key=lambda kv: kv[1]["pass"])
        raise NotConvergedError(f"certificate failed: {worst[0]}")
    return EXIT_OK


def cmd_bound(args):
    data = load_bartnik_data(args.input)
    path = prepare_path(data.metric)
    value = bartnik_mass_upper_bound(data, path, args.variant)
    print(_fmt(value))
    return EXIT_OK


def cmd_verify(args):
    with open(args.report) as fh:
        rep = json.load(fh)
    rows = []
    with open(args.profile, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header != _PROFILE_HEADER:
            raise SchemaError(f"unexpected profile header {header}")
        for row in rd:
            rows.append([float(v) for v in row])
    arr = np.asarray(rows)
    s, f, fp, fpp, margin, r6, h, mass = arr.T
    zones = rep["zones"]
    tol = 1e-12

    checks = {}
    # column self-consistency from the primary samples
    checks["margin_column"] = float(np.max(np.abs(
        r6 - 4.0 * margin / f)))
    checks["mass_column"] = float(np.max(np.abs(
        mass - profile_hawking_mass(f, fp))))
    checks["H_column"] = float(np.max(np.abs(h - 2.0 * fp / f)))
    strict = s <= zones["strict_end"]
    tail = s >= zones["tail_start"]
    bent = ~strict & ~tail
    # re-derived certificate values
    min_strict = float(np.min(margin[strict]))
    min_bent = float(np.min(margin[bent])) if np.any(bent) else 0.0
    direct_tail = float(np.max(np.abs(
        omega_functional(f[tail], fp[tail], 2, -6.0) - fpp[tail])))
    tail_mass_res = float(np.max(np.abs(mass[tail] - rep["exterior_mass"])))
    fp_min = float(np.min(fp))

    ok = (checks["margin_column"] <= tol and checks["mass_column"] <= tol
          and checks["H_column"] <= tol)
    ok = ok and min_strict > 0.0
    ok = ok and min_bent >= 0.0 and zones["bend_min_bracket"] > 0.0
    ok = ok and direct_tail <= 1e-8
    ok = ok and tail_mass_res <= 1e-8
    ok = ok and fp_min > 0.0
    # agreement with the reported certificates
    cert = rep["certificates"]
    ok = ok and abs(cert["profile_scalar_strict"]["value"]
                    - min_strict) <= 1e-12
    ok = ok and abs(cert["tail_mass"]["value"] - tail_mass_res) <= 1e-12

    result = {"pass": bool(ok), "min_margin_strict": min_strict,
              "min_margin_bent": min_bent, "tail_residual": direct_tail,
              "tail_mass_residual": tail_mass_res, "min_f_prime": fp_min,
              "column_consistency": checks}
    print(json.dumps(result, sort_keys=True, indent=2))
    if not ok:
        raise NotConvergedError("verification failed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    ap = argparse.ArgumentParser(
        prog="ahext",
        description="Asymptotically hyperbolic extensions of Bartnik "
                    "boundary data: construction, certification, and mass "
                    "bounds.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="model-family profile table")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--smax", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--output", default="profile.csv")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("flow", help="roundness flow diagnostics")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=5e-7)
    p.add_argument("--output", default="flow.csv")
    p.add_argument("--report", default="flow.json")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("collar", help="collar construction diagnostics")
    p.add_argument("--input", required=True)
    p.add_argument("--variant", required=True,
                   choices=["minimal", "cmc-b0", "cmc-bpos"])
    p.add_argument("--m", type=float, default=-1.0e4)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--output", default="collar.csv")
    p.add_argument("--report", default="collar.json")
    p.set_defaults(fn=cmd_collar)

    p = sub.add_parser("extend", help="full extension + certification")
    p.add_argument("--input", required=True)
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--variant", default="auto",
                   choices=["auto", "minimal", "cmc-b0", "cmc-bpos"])
    p.add_argument("--m", type=float, default=-1.0e4,
                   help="model mass for CMC collars")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--output", default="extend_profile.csv")
    p.add_argument("--report", default="extend_report.json")
    p.set_defaults(fn=cmd_extend)

    p = sub.add_parser("bound", help="mass upper bound")
    p.add_argument("--input", required=True)
    p.add_argument("--variant", default="auto",
                   choices=["auto", "minimal", "cmc-b0", "cmc-bpos"])
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("verify", help="re-derive certificates from output")
    p.add_argument("--profile", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None):
    # spectral.thread_count() caps any internal sweep parallelism
    _ = spectral.thread_count()
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (HypothesisError, AdmissibilityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (NotConvergedError, InvalidProfileError, InvalidMetricError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
