"""Command-line front end: ``mldcrit {critical,bounds,gv,simulate,plot}``.

Exit status is 0 on success, 2 for usage or domain errors and 3 when a
numerical invariant fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from . import bounds, critical, simulate, spectrum
from .codes import CATALOG, get_code

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _atomic_write(path: str, text: str) -> None:
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(p.parent) if str(p.parent) else ".", prefix=f".{p.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def parse_grid(spec: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must be start:stop:step in dB, got {spec!r}") from None
    try:
        return bounds.db_grid(start, stop, step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- critical


def cmd_critical(args) -> int:
    if args.spectrum:
        raise UsageError(
            "the closed-form critical point assumes the random-code spectrum; "
            "use 'bounds --spectrum FILE' to study a supplied spectrum"
        )
    params = spectrum.CodeParams(args.n, args.k, args.d)
    cp = critical.critical_point(params)
    print(cp.format())
    return EXIT_OK


# ---------------------------------------------------------------- bounds


def _bounds_setup(args) -> tuple[spectrum.LogWeightSpectrum, spectrum.CodeParams]:
    if args.spectrum:
        spec = spectrum.load_spectrum(args.spectrum)
        if args.k is None:
            raise UsageError("--k is required with --spectrum (the rate is not in the file)")
        if args.n is not None and args.n != spec.n:
            raise UsageError(f"--n {args.n} does not match the spectrum file (n={spec.n})")
        return spec, spectrum.CodeParams(spec.n, args.k, spec.d_min)
    if args.n is None or args.k is None or args.d is None:
        raise UsageError("give --n, --k and --d, or --spectrum with --k")
    params = spectrum.CodeParams(args.n, args.k, args.d)
    return spectrum.random_spectrum(params), params


def format_curves(curves: Sequence[bounds.BoundCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ebno_db"] + [f"{c.method}_log10_wer" for c in curves] + ["status"])
    for i, (db, _) in enumerate(curves[0].points):
        flags = [f"{c.method}:{c.statuses[i]}" for c in curves if c.statuses[i] != "ok"]
        w.writerow([f"{db:.4f}"] + [f"{c.points[i][1]:.6f}" for c in curves] + [";".join(flags) or "ok"])
    return buf.getvalue()


def cmd_bounds(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise UsageError("--methods must name at least one method")
    bad = [m for m in methods if m not in bounds.METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(bounds.METHODS)}")
    grid = parse_grid(args.ebno)
    spec, params = _bounds_setup(args)
    curves = [bounds.sweep(m, spec, params, grid, prefactor=args.prefactor, workers=args.workers) for m in methods]
    _emit(format_curves(curves), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- gv


def cmd_gv(args) -> int:
    if not 0 < args.k < args.n:
        raise UsageError(f"need 0 < k < n, got n={args.n}, k={args.k}")
    which = args.mode or "both"
    rate = args.k / args.n
    values = {}
    if which in ("asymptotic", "both"):
        values["asymptotic"] = spectrum.gv_distance_asymptotic(args.n, rate)
        print(f"asymptotic d_gv={values['asymptotic']} (round(n*H^-1(1-R)))")
    if which in ("exact", "both"):
        values["exact"] = spectrum.gv_distance_exact(args.n, args.k)
        print(f"exact d_gv={values['exact']} (largest d with sum_{{i<=d-2}} C(n-1,i) < 2^(n-k))")
    if args.reference is not None:
        ref = args.reference
        parts = [f"{name} {v - ref:+d}" for name, v in values.items()]
        name, v = min(values.items(), key=lambda kv: (abs(kv[1] - ref), kv[0]))
        within = "within" if abs(v - ref) <= 2 else "outside"
        print(f"reference d={ref}: {', '.join(parts)}; closest convention: {name} ({within} +-2)")
    return EXIT_OK


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    try:
        code = get_code(args.code)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    try:
        simulate.check_decoder(code, args.decoder)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = parse_grid(args.ebno)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ebno_db", "trials", "errors", "wer", "ci_low", "ci_high"])
    for db in grid:
        est = simulate.run_monte_carlo(
            code,
            args.decoder,
            bounds.SnrPoint.from_db(db),
            seed=args.seed,
            max_trials=args.max_trials,
            target_errors=args.target_errors,
            workers=args.workers,
        )
        w.writerow(
            [f"{db:.4f}", est.trials, est.word_errors, f"{est.wer_hat:.6e}", f"{est.ci95_low:.6e}", f"{est.ci95_high:.6e}"]
        )
        if est.fallbacks:
            print(f"{db:.4f} dB: {est.fallbacks} hard-decision fallbacks", file=sys.stderr)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- plot


def read_curves(path: str) -> list[tuple[str, list[tuple[float, float]]]]:
    """Curves ``(label, [(ebno_db, log10_wer), ...])`` from a bounds or simulate CSV."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0] or rows[0][0] != "ebno_db":
        raise UsageError(f"{path}: line 1: expected a header starting with 'ebno_db'")
    header = rows[0]
    if "wer" in header:
        cols = [(Path(path).stem, header.index("wer"), True)]
    else:
        cols = [(h[: -len("_log10_wer")], j, False) for j, h in enumerate(header) if h.endswith("_log10_wer")]
    if not cols:
        raise UsageError(f"{path}: line 1: no WER columns in header")
    curves = [(label, []) for label, _, _ in cols]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise UsageError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            db = float(row[0])
            for (label, j, linear), (_, pts) in zip(cols, curves):
                v = float(row[j])
                if linear:
                    if v <= 0.0:
                        continue
                    v = math.log10(v)
                pts.append((db, v))
        except ValueError:
            raise UsageError(f"{path}: line {lineno}: non-numeric field") from None
    return curves


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_svg(curves, marker: Optional[tuple[float, float]] = None) -> str:
    W, H = 720, 480
    left, right, top, bottom = 70, 170, 20, 50
    xs = [p[0] for _, pts in curves for p in pts]
    ys = [p[1] for _, pts in curves for p in pts]
    if marker:
        xs.append(marker[0])
        ys.append(marker[1])
    if not xs:
        raise UsageError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = math.floor(min(ys)), math.ceil(max(ys))
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = W - left - right, H - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    ystep = max(1, int(math.ceil((y1 - y0) / 10)))
    for yv in range(int(y0), int(y1) + 1, ystep):
        y = sy(yv)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{yv}</text>')
    xstep = _nice_step(x1 - x0)
    xv = math.ceil(x0 / xstep) * xstep
    while xv <= x1 + 1e-9:
        x = sx(xv)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#dddddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" font-size="11" text-anchor="middle">{xv:g}</text>')
        xv += xstep
    out.append(f'<text x="{left + pw / 2:.2f}" y="{H - 10}" font-size="12" text-anchor="middle">Eb/N0 (dB)</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.2f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.2f})">log10 WER</text>'
    )
    for idx, (label, pts) in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = top + 14 + 16 * idx
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 36}" y="{ly}" font-size="11">{_escape(label)}</text>')
    if marker:
        mx, my = sx(marker[0]), sy(marker[1])
        out.append(
            f'<circle class="critical" cx="{mx:.2f}" cy="{my:.2f}" r="5" fill="none" stroke="black" stroke-width="1.5"/>'
        )
        out.append(f'<text x="{mx + 8:.2f}" y="{my - 8:.2f}" font-size="11">critical</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _nice_step(span: float) -> float:
    raw = span / 8
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_plot(args) -> int:
    curves = []
    for path in args.inputs:
        try:
            curves.extend(read_curves(path))
        except OSError as exc:
            raise UsageError(f"{path}: {exc.strerror}") from None
    marker = None
    if args.mark_critical:
        try:
            a, b = args.mark_critical.split(":")
            marker = (float(a), float(b))
        except ValueError:
            raise UsageError(f"--mark-critical expects DB:LOG10, got {args.mark_critical!r}") from None
    _atomic_write(args.out, render_svg(curves, marker))
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mldcrit", description="Critical point and bounds for ML decoding.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("critical", help="critical SNR and WER of an (n, k, d) code")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--spectrum", help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_critical)

    b = sub.add_parser("bounds", help="sweep bounds over an SNR grid and write CSV")
    b.add_argument("--n", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--d", type=int)
    b.add_argument("--spectrum", help="weight spectrum file (default: truncated random spectrum)")
    b.add_argument("--methods", default="ub,first,approx,tsb", help="comma list of ub, first, approx, tsb")
    b.add_argument("--ebno", required=True, help="start:stop:step in dB")
    b.add_argument("--prefactor", action="store_true", help="use the max-term approximation with its prefactor")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", help="output CSV (default stdout)")
    b.set_defaults(func=cmd_bounds)

    g = sub.add_parser("gv", help="Gilbert-Varshamov distance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--asymptotic", dest="mode", action="store_const", const="asymptotic")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    g.add_argument("--reference", type=int, help="compare against a published distance")
    g.set_defaults(func=cmd_gv)

    s = sub.add_parser("simulate", help="Monte-Carlo WER of a catalog code")
    s.add_argument("--code", required=True, help=f"one of {', '.join(CATALOG)}")
    s.add_argument("--decoder", required=True, choices=sorted(simulate.DECODERS))
    s.add_argument("--ebno", required=True, help="start:stop:step in dB")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--target-errors", type=int, default=100)
    s.add_argument("--max-trials", type=int, default=10**6)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="output CSV (default stdout)")
    s.set_defaults(func=cmd_simulate)

    pl = sub.add_parser("plot", help="render bounds/simulate CSVs to SVG")
    pl.add_argument("inputs", nargs="+", help="CSV files from bounds or simulate")
    pl.add_argument("--out", required=True, help="output SVG path")
    pl.add_argument("--mark-critical", metavar="DB:LOG10")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, spectrum.SpectrumParseError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mldcrit {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"mldcrit {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
