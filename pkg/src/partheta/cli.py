"""Command-line front end: ``partheta <command> [options]``.

Every command prints a JSON document (default) or CSV rows to stdout or to
``--output``.  Complex arguments are written ``re+imi``, e.g. ``0.435+0.123i``.
Exit status is 0 on success, 2 for invalid input and 3 for a numerical
failure; errors are reported on stderr as a one-line JSON object.

The working precision defaults come from ``PARTHETA_BITS`` and
``PARTHETA_EPS`` when set.
"""
import argparse
import csv
import io
import json
import math
import os
import re
import sys

from .core import Precision, evaluate_dq, evaluate_dz
from .errors import DomainError, PartialThetaError


def parse_complex(text):
    """Parse ``re+imi`` (also ``re``, ``imi``, ``re-imj``) into a complex number."""
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a complex number") from exc


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_range(text):
    """``3``, ``1-5`` or ``1,2,4`` as a list of ints."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if re.fullmatch(r"\d+-\d+", part):
            a, b = map(int, part.split("-"))
            out.extend(range(a, b + 1))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise argparse.ArgumentTypeError(f"bad index list {text!r}")
    return out


def _precision(args):
    bits = args.bits if args.bits is not None else os.environ.get("PARTHETA_BITS")
    eps = args.eps if args.eps is not None else float(os.environ.get("PARTHETA_EPS", 1e-13))
    if bits is None:
        # enough bits for the requested accuracy
        return Precision.for_eps(eps)
    return Precision(int(bits), eps)


def _cx(prefix, z):
    z = complex(z)
    return {f"{prefix}_re": z.real, f"{prefix}_im": z.imag}


# --------------------------------------------------------------------------
# commands; each returns (summary dict, list of flat row dicts)


def cmd_eval(args, prec):
    if args.order == "q":
        r = evaluate_dq(args.q, args.z, prec)
    else:
        r = evaluate_dz(args.q, args.z, int(args.order), prec)
    row = {**_cx("q", args.q), **_cx("z", args.z), "order": args.order,
           **_cx("value", r.value), "tail_bound": r.tail_bound,
           "terms_used": r.terms_used, "bits": r.bits}
    return row, [row]


def cmd_zeros(args, prec):
    from .zeros import (
        count_in_disk, real_zeros_in_interval, separation_radius, zeros_in_disk,
    )
    if args.interval is not None:
        lo, hi = args.interval
        if args.q.imag != 0:
            raise DomainError("--interval needs a real q")
        recs = real_zeros_in_interval(args.q.real, lo, hi, prec, include_lo=True,
                                      include_hi=True)
        summary = {"lo": lo, "hi": hi, "count": sum(r.multiplicity for r in recs)}
    else:
        R = args.radius if args.radius is not None else separation_radius(args.q, args.kmax)
        if args.count_only:
            return {**_cx("q", args.q), "radius": R, "count": count_in_disk(args.q, R, prec)}, []
        recs = zeros_in_disk(args.q, R, prec)
        summary = {"radius": R, "count": sum(r.multiplicity for r in recs)}
    rows = [{**_cx("z", r.z), "residual": r.residual, "multiplicity": r.multiplicity,
             "annulus": r.annulus_index} for r in recs]
    return {**_cx("q", args.q), **summary, "zeros": rows}, rows


def cmd_separation(args, prec):
    from .zeros import check_strong_separation
    rep = check_strong_separation(args.q, args.n, args.kmax, prec)
    rows = [{"k": c.k, "count": c.count, "contour_integral": c.contour_integral_raw,
             "verified": c.verified} for c in rep.per_annulus]
    return {**_cx("q", args.q), "n": rep.n, "strong": rep.strong, "annuli": rows}, rows


def _point_row(p):
    return {"index": p.index, "branch": p.branch, **_cx("q", p.q), **_cx("y", p.y),
            "newton_residual": p.newton_residual}


def cmd_spectrum(args, prec):
    from . import spectrum as sp
    if args.branch == "positive":
        pts = sp.real_spectrum_positive(args.kmax, prec, k_min=args.kmin)
    elif args.branch == "negative":
        pts = sp.real_spectrum_negative(args.kmax, prec, k_min=args.kmin)
    else:
        if args.z0 is not None:
            pts = [sp.find_double_zero(args.q0, args.z0, prec, branch="complex_pair")]
        else:
            pts = [sp.complex_spectral_point(args.q0, prec)]
    rows = [_point_row(p) for p in pts]
    summary = {"branch": args.branch, "points": rows}
    if args.annulus_count is not None:
        r_in, r_out = args.annulus_count
        summary["annulus_count"] = sp.spectral_count_in_annulus(r_out, r_in)
    return summary, rows


def cmd_asymptotics(args, prec):
    from . import spectrum as sp
    spec = sp.real_spectrum_positive if args.branch == "positive" else sp.real_spectrum_negative
    rep = sp.asymptotic_residuals(spec(args.kmax, prec, k_min=args.kmin))
    scaled = rep.scaled_q_residuals()
    rows = [{"k": r.k, "q_measured": r.q_measured, "q_predicted": r.q_predicted,
             "scaled_q_residual": float(s), **_cx("y", r.y_measured),
             "y_predicted": r.y_predicted, "y_residual": r.y_residual}
            for r, s in zip(rep.rows, scaled)]
    return {"branch": rep.branch, "rows": rows}, rows


def _loop(args):
    from .continuation import build_loop, circle_loop, compose
    kinds = [k.strip() for k in args.loop.split(",") if k.strip()]
    paths = []
    for kind in kinds:
        if kind == "circle":
            paths.append(circle_loop(0j, args.a))
        else:
            paths.append(build_loop(kind, a=args.a))
    return paths[0] if len(paths) == 1 else compose(paths)


def cmd_track(args, prec):
    from .continuation import labelled_zeros, track_zero
    path = _loop(args)
    if args.z0 is not None:
        z0 = args.z0
    else:
        z0 = labelled_zeros(path.base_point, [args.label])[0][1]
    t = track_zero(path, z0, prec)
    rows = [{"step": i, "q_re": qr, "q_im": qi, "z_re": zr, "z_im": zi, "residual": r}
            for i, qr, qi, zr, zi, r in t.rows()]
    summary = {"path": path.name, **_cx("start", t.start), **_cx("end", t.end),
               "steps": len(rows), "max_residual": max(t.residual)}
    return summary, rows


def cmd_monodromy(args, prec):
    from .continuation import labelled_zeros, monodromy
    path = _loop(args)
    res = monodromy(path, labelled_zeros(path.base_point, args.labels), prec)
    rows = [{"label": k, "image": v} for k, v in res.permutation.items()]
    summary = {"path": path.name, "permutation": rows,
               "cycles": [list(c) for c in res.cycles()], "identity": res.is_identity,
               "max_step_residual": res.max_step_residual}
    return summary, rows


def cmd_density(args, prec):
    from .density import _csv_rows, CSV_COLUMNS, density_sweep, deviations_decreasing
    reps = density_sweep(args.branch, args.a, args.q_grid, prec)
    rows = [dict(zip(CSV_COLUMNS, r)) for r in _csv_rows(reps)]
    summary = {"branch": args.branch, "a": args.a,
               "deviation_decreasing": deviations_decreasing(reps),
               "reports": [{"q": r.q, "counts": r.counts, "normalized": r.normalized,
                            "predicted": r.predicted, "deviation": r.deviation,
                            "normalized_p": r.normalized_p, "deviation_p": r.deviation_p}
                           for r in reps]}
    return summary, rows


def cmd_dense_probe(args, prec):
    from .density import dense_zero_probe
    p = dense_zero_probe(args.k, args.branch, args.a, prec)
    rows = [{"lo": lo, "hi": hi, "zero": z} for (lo, hi), z in zip(p.intervals, p.zeros)]
    summary = {"k": p.k, "branch": p.branch, "q": p.q, "y": p.y, "max_gap": p.max_gap,
               "ladder": [{"x": x, "theta": v} for x, v in zip(p.points, p.values)],
               "zeros": rows}
    return summary, rows


# --------------------------------------------------------------------------
# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, help="minimum mantissa bits (env PARTHETA_BITS)")
    common.add_argument("--eps", type=float, help="target absolute accuracy (env PARTHETA_EPS)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    ap = argparse.ArgumentParser(prog="partheta", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("eval", help="theta or a derivative at one point")
    p.add_argument("--q", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--order", choices=("0", "1", "2", "q"), default="0")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("zeros", help="zeros in a disk or real zeros in an interval")
    p.add_argument("--q", type=parse_complex, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", type=float)
    g.add_argument("--kmax", type=int, help="use the circle C_kmax")
    g.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("separation", help="annulus census for k = n..kmax")
    p.add_argument("--q", type=parse_complex, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("spectrum", help="spectral numbers and their double zeros")
    p.add_argument("--branch", choices=("positive", "negative", "complex"), default="positive")
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--q0", type=parse_complex, default=0.4353184958 + 0.1230440086j)
    p.add_argument("--z0", type=parse_complex)
    p.add_argument("--annulus-count", type=float, nargs=2, metavar=("R_IN", "R_OUT"))
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("asymptotics", help="spectrum against its leading asymptotics")
    p.add_argument("--branch", choices=("positive", "negative"), default="positive")
    p.add_argument("--kmin", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.set_defaults(func=cmd_asymptotics)

    for name, func, help_ in (("track", cmd_track, "follow one zero along a loop"),
                              ("monodromy", cmd_monodromy, "permutation of zeros along a loop")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--loop", required=True,
                       help="gamma(j), delta(j), eta_plus, eta_minus or circle; "
                            "comma-separated loops are run in order")
        p.add_argument("--a", type=float, default=0.1, help="base point / circle radius")
        if name == "track":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--z0", type=parse_complex)
            g.add_argument("--label", type=int)
        else:
            p.add_argument("--labels", type=_int_range, default=[1, 2, 3, 4, 5])
        p.set_defaults(func=func)

    p = sub.add_parser("density", help="normalized real-zero counts along a q grid")
    p.add_argument("--branch", choices=("positive", "negative"), required=True)
    p.add_argument("--a", type=float, default=100.0)
    p.add_argument("--q-grid", type=_float_list, required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("dense-probe", help="sign ladder at a spectral point")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--branch", choices=("positive", "negative"), default="positive")
    p.add_argument("--a", type=float, default=100.0)
    p.set_defaults(func=cmd_dense_probe)
    return ap


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def render(summary, rows, fmt):
    if fmt == "json":
        return json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    else:
        w = csv.writer(buf, lineterminator="\n")
        flat = {k: v for k, v in summary.items() if not isinstance(v, (list, dict))}
        w.writerow(list(flat))
        w.writerow([repr(v) if isinstance(v, float) else v for v in flat.values()])
    return buf.getvalue()


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        prec = _precision(args)
        summary, rows = args.func(args, prec)
    except PartialThetaError as exc:
        code = 2 if isinstance(exc, DomainError) else 3
        kind = "config" if code == 2 else "numerical"
        print(json.dumps({"error": type(exc).__name__, "kind": kind, "message": str(exc)}),
              file=sys.stderr)
        return code
    except (ValueError, TypeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "kind": "config", "message": str(exc)}),
              file=sys.stderr)
        return 2
    text = render(summary, rows, args.format)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
