"""Command line interface ``ctht``.

Exit codes: 0 all checks pass, 2 an inequality check reported a bound
finding, 3 configuration error, 4 accuracy error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import besov, spectral as sp, verify
from .characters import evaluate, write_phi_csv
from .errors import AccuracyError, ConfigurationError
from .families import FAMILY, make_function, spectral_quadrature_for
from .hypergroup import JacobiParams
from .quadrature import QuadratureSpec

EXIT_OK, EXIT_FINDING, EXIT_CONFIG, EXIT_ACCURACY = 0, 2, 3, 4

VERIFY_CHOICES = {
    "hardy-littlewood": ("hardy-littlewood",),
    "lemma2": ("lemma2",),
    "riemann-lebesgue": ("riemann-lebesgue",),
    "low-frequency": ("low-frequency",),
    "eq12": ("eq12",),
    "theorems": ("theorems",),
    "all": None,
}


def _floats(text):
    """Comma separated floats, or ``logspace:a:b:n``."""
    if text.startswith("logspace:"):
        try:
            _, a, b, n = text.split(":")
            return [float(v) for v in np.logspace(float(a), float(b), int(n))]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad logspace spec {text!r}") from None
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _dump(obj, path=None):
    text = json.dumps(verify._clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _setup(args):
    """Parameters and quadrature layouts from --config plus overrides."""
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from None
        if "scenarios" in data:
            data = data["scenarios"][0]
    pdata = dict(data.get("params", data if "alpha" in data else {}))
    if getattr(args, "alpha", None) is not None:
        pdata["alpha"] = args.alpha
    if getattr(args, "beta", None) is not None:
        pdata["beta"] = args.beta
    if "alpha" not in pdata or "beta" not in pdata:
        raise ConfigurationError("alpha and beta are required (via --config or --alpha/--beta)")
    params = JacobiParams.from_dict(pdata)
    quad = QuadratureSpec.from_dict(data["quadrature"]) if data.get("quadrature") else None
    base = (QuadratureSpec.from_dict(data["spectral_quadrature"]) if data.get("spectral_quadrature")
            else sp.DEFAULT_SPECTRAL_QUAD)
    spec_quad = spectral_quadrature_for(args.function, base=base) if getattr(args, "function", None) else base
    return params, quad, spec_quad


def _out(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_pair(obj, params, quad, out, stem):
    obj.to_csv(out / f"{stem}.csv")
    _dump(sp.envelope(obj, params, quad), out / f"{stem}.json")


def cmd_eval_phi(args):
    params = JacobiParams(args.alpha, args.beta)
    lams, ts = args.lam, args.t
    if args.grid:
        write_phi_csv(args.grid, params, lams, ts)
        return EXIT_OK
    rows = []
    for lv in lams:
        for tv in ts:
            ev = evaluate(params, lv, tv)
            rows.append({"lambda": lv, "t": tv, "phi": float(np.real(ev.value)),
                         "series_terms_used": ev.series_terms_used, "est_error": ev.est_error})
    _dump(rows[0] if len(rows) == 1 else rows)
    return EXIT_OK


def cmd_transform(args):
    params, quad, spec_quad = _setup(args)
    f = make_function(args.function)
    S = sp.forward_transform(f, params, spec_quad, quad)
    out = _out(args)
    _write_pair(f, params, quad, out, args.function)
    _write_pair(S, params, spec_quad, out, f"{args.function}_spectrum")
    return EXIT_OK


def cmd_inverse(args):
    params, _, spec_quad = _setup(args)
    try:
        with open(args.spectrum) as fh:
            env = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read spectrum {args.spectrum}: {exc}") from None
    S = sp.spectrum_from_envelope(env, params)
    if env.get("quadrature"):
        spec_quad = QuadratureSpec.from_dict(env["quadrature"])
    xs = np.linspace(0.0, args.xmax, args.points)
    g = sp.inverse_transform(S, params, xs, spec_quad, name="inverse")
    out = _out(args)
    _write_pair(g, params, None, out, "inverse")
    return EXIT_OK


def cmd_translate(args):
    params, quad, spec_quad = _setup(args)
    f = make_function(args.function)
    g = sp.translate(f, args.x0, params, quad, spec_quad)
    out = _out(args)
    _write_pair(g, params, quad, out, f"{args.function}_translate_{args.x0:g}")
    return EXIT_OK


def cmd_modulus(args):
    params, quad, spec_quad = _setup(args)
    f = make_function(args.function)
    deltas = np.asarray(sorted(args.delta_grid))
    omegas, _ = besov.omega_profile(f, args.p, params, deltas, quad, spec_quad)
    floor = sp.noise_floor(f, params, args.p, quad, spec_quad)
    prof = besov.profile_from_readings(f, args.p, params, deltas, omegas, floor,
                                       {"function": f.name, "p": args.p, "params": params.to_dict()})
    out = _out(args)
    prof.to_csv(out / f"{args.function}_modulus_p{args.p:g}.csv")
    prof.to_json(out / f"{args.function}_modulus_p{args.p:g}.json")
    return EXIT_OK


def cmd_besov(args):
    params, quad, spec_quad = _setup(args)
    f = make_function(args.function)
    spec = besov.BesovSpec(args.p, args.q, args.gamma)
    grid = None if args.delta_grid is None else np.asarray(sorted(args.delta_grid))
    v = besov.membership(f, spec, params, quad, grid, spec_quad)
    result = dict(v.to_dict(), function=args.function, p=spec.p, q=spec.q, gamma=spec.gamma,
                  params=params.to_dict())
    if args.out:
        out = _out(args)
        _dump(result, out / f"{args.function}_besov.json")
    else:
        _dump(result)
    return EXIT_OK


def cmd_verify(args):
    checks = VERIFY_CHOICES[args.which]
    results = verify.run_all(args.config, checks, args.out)
    failed = [r.scenario_id for reps in results.values() for r in reps if not r.passed]
    total = sum(len(reps) for reps in results.values())
    for sid, reps in results.items():
        bad = sum(not r.passed for r in reps)
        print(f"{sid}: {len(reps)} reports, {bad} findings")
    if failed:
        print(f"{len(failed)} of {total} reports flagged a bound finding", file=sys.stderr)
        return EXIT_FINDING
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors; exit code 2 means a bound finding
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="ctht", description="Harmonic analysis on the Jacobi hypergroup.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, function=True, out=True):
        p.add_argument("--config", help="JSON file with params and optional quadrature layouts")
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        if function:
            p.add_argument("--function", required=True, choices=sorted(FAMILY))
        if out:
            p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("eval-phi", help="evaluate characters phi_lambda(t)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=_floats, required=True, help="value or comma list")
    p.add_argument("--t", type=_floats, required=True, help="value or comma list")
    p.add_argument("--grid", help="write the lambda x t grid to this CSV instead of printing")
    p.set_defaults(func=cmd_eval_phi)

    p = sub.add_parser("transform", help="forward transform of a bundled function")
    common(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("inverse", help="inverse transform of a spectrum JSON envelope")
    common(p, function=False)
    p.add_argument("--spectrum", required=True)
    p.add_argument("--xmax", type=float, default=3.0)
    p.add_argument("--points", type=int, default=1501)
    p.set_defaults(func=cmd_inverse, function=None)

    p = sub.add_parser("translate", help="generalized translate of a bundled function")
    common(p)
    p.add_argument("--x0", type=float, required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("modulus", help="modulus of continuity over a delta grid")
    common(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--delta-grid", type=_floats, default=_floats("logspace:-3:-1:16"))
    p.set_defaults(func=cmd_modulus)

    p = sub.add_parser("besov", help="Besov-type seminorm and membership verdict")
    common(p, out=False)
    p.add_argument("--out")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=lambda s: math.inf if s in ("inf", "infinity") else float(s), required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta-grid", type=_floats)
    p.set_defaults(func=cmd_besov)

    p = sub.add_parser("verify", help="run inequality verification scenarios")
    p.add_argument("which", choices=sorted(VERIFY_CHOICES))
    p.add_argument("--config", default="all-lemmas",
                   help="scenario JSON file or a bundled name (default: all-lemmas)")
    p.add_argument("--out", default="ctht-reports", help="report directory")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as exc:
        msg = f"accuracy error: {exc}"
        if exc.estimate is not None:
            msg += f" (estimate {exc.estimate:.3e})"
        print(msg, file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
