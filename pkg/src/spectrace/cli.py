"""Command-line front end for spectrace.

Subcommands: trace (sample a kernel over a t-grid), coeffs (fit expansion
coefficients from a trace grid), verify (run the full coefficient-relation
pipeline and print a pass/fail table), moments (comb expansion studies),
riesz (Riesz-mean samples, fits, and Weyl remainders).

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical failure.  Identical configurations produce byte-identical
CSV/JSON output, and every output starts with a comment carrying the full
resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .fitkit import (
    FitReport,
    IllConditionedBasisError,
    cylinder_basis,
    dcylinder_basis,
    detect_log_term,
    fit_expansion,
    geometric_grid,
    heat_basis,
)
from .invariants import (
    AsymptoticExpansion,
    ExpansionTerm,
    casimir_energy,
    expansion_to_json,
    heat_to_cylinder,
    riesz_to_cylinder,
    riesz_to_heat,
)
from .moments import (
    TestFunction,
    euler_maclaurin_expansion,
    moment,
    omega_comb_expansion,
    squares_comb_expansion,
)
from .riesz import extract_riesz_coeffs, riesz_fit_basis, riesz_mean_grid, weyl_remainder
from .spectra import (
    Spectrum,
    SpectrumFormatError,
    interval_spectrum,
    load_spectrum,
    product_spectrum,
    torus_spectrum,
)
from .traces import ToleranceError, trace_grid

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    """Bad flag combination or unparsable configuration."""


# ---------------------------------------------------------------------------
# spectrum spec syntax
# ---------------------------------------------------------------------------

def parse_spectrum_spec(spec: str) -> Spectrum:
    """Parse 'interval:length=<r>:bc=<dirichlet|neumann>',
    'torus:circumference=<r>', 'product:(<spec>)x(<spec>)' or 'file:<path>'."""
    spec = spec.strip()
    if spec.startswith("interval:"):
        fields = _parse_fields(spec[len("interval:"):], {"length", "bc"})
        try:
            length = float(fields["length"])
        except ValueError:
            raise UsageError(f"bad interval length {fields['length']!r}") from None
        try:
            return interval_spectrum(length, fields["bc"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if spec.startswith("torus:"):
        fields = _parse_fields(spec[len("torus:"):], {"circumference"})
        try:
            circ = float(fields["circumference"])
        except ValueError:
            raise UsageError(f"bad circumference {fields['circumference']!r}") from None
        try:
            return torus_spectrum(circ)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if spec.startswith("product:"):
        a, b = _split_product(spec[len("product:"):])
        return product_spectrum(parse_spectrum_spec(a), parse_spectrum_spec(b))
    if spec.startswith("file:"):
        return load_spectrum(spec[len("file:"):])
    raise UsageError(
        f"unrecognized spectrum spec {spec!r}; expected interval:/torus:/product:/file:"
    )


def _parse_fields(body: str, required: set) -> dict:
    fields = {}
    for chunk in body.split(":"):
        if "=" not in chunk:
            raise UsageError(f"expected key=value, got {chunk!r}")
        k, v = chunk.split("=", 1)
        fields[k] = v
    missing = required - set(fields)
    if missing:
        raise UsageError(f"spectrum spec missing fields: {sorted(missing)}")
    return fields


def _split_product(body: str) -> tuple[str, str]:
    # body must look like (A)x(B) with balanced parentheses inside A and B
    def read_group(s: str, start: int) -> tuple[str, int]:
        if start >= len(s) or s[start] != "(":
            raise UsageError(f"expected '(' in product spec at {s[start:]!r}")
        depth = 0
        for i in range(start, len(s)):
            if s[i] == "(":
                depth += 1
            elif s[i] == ")":
                depth -= 1
                if depth == 0:
                    return s[start + 1:i], i
        raise UsageError("unbalanced parentheses in product spec")

    a, i = read_group(body, 0)
    if i + 1 >= len(body) or body[i + 1] != "x":
        raise UsageError("product spec must be product:(<spec>)x(<spec>)")
    b, j = read_group(body, i + 2)
    if j != len(body) - 1:
        raise UsageError(f"trailing junk after product spec: {body[j + 1:]!r}")
    return a, b


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _config_comment(command: str, args: argparse.Namespace) -> str:
    # out/svg destinations do not influence the computed payload, and keeping
    # them out preserves byte-identical output across target paths
    skip = {"func", "out", "svg"}
    parts = []
    for key in sorted(vars(args)):
        if key in skip:
            continue
        parts.append(f"{key}={vars(args)[key]}")
    return f"# spectrace {command} " + " ".join(parts)


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(header_comment_lines: list[str], header: str, rows: list[Sequence]) -> str:
    lines = list(header_comment_lines)
    lines.append(header)
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_doc(command: str, args: argparse.Namespace, payload: dict) -> str:
    doc = {"config": _config_comment(command, args), **payload}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_svg(path: str, xs: Sequence[float], ys: Sequence[float], title: str):
    """Minimal static SVG polyline of a single series.

    Axes switch to log10 automatically when the data are positive and span
    two or more decades; otherwise linear.
    """
    width, height, margin = 640.0, 480.0, 60.0

    def transform(vals):
        vmin, vmax = min(vals), max(vals)
        uselog = vmin > 0 and vmax / vmin >= 100.0
        if uselog:
            vals = [math.log10(v) for v in vals]
            vmin, vmax = min(vals), max(vals)
        span = (vmax - vmin) or 1.0
        return [(v - vmin) / span for v in vals], uselog

    tx, xlog = transform(list(xs))
    ty, ylog = transform(list(ys))
    pts = " ".join(
        f"{margin + u * (width - 2 * margin):.3f},{height - margin - v * (height - 2 * margin):.3f}"
        for u, v in zip(tx, ty)
    )
    xlab = "log10(x)" if xlog else "x"
    ylab = "log10(y)" if ylog else "y"
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}">\n'
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>\n'
        f'<text x="{width / 2:.0f}" y="24" text-anchor="middle">{title}</text>\n'
        f'<text x="{width / 2:.0f}" y="{height - 16:.0f}" text-anchor="middle">{xlab}</text>\n'
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {height / 2:.0f})">{ylab}</text>\n'
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>\n'
        "</svg>\n"
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)


def _loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if y > 0]
    if len(pts) < 2:
        return math.nan
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pts)
    return sxy / sxx if sxx else math.nan


# ---------------------------------------------------------------------------
# trace / coeffs
# ---------------------------------------------------------------------------

def _validate_grid_args(args):
    if not (args.tmin > 0 and args.tmax > 0):
        raise UsageError("tmin and tmax must be positive")
    if args.tmin >= args.tmax:
        raise UsageError(f"tmin must be < tmax, got {args.tmin} >= {args.tmax}")
    if args.points < 4:
        raise UsageError("need at least 4 grid points")
    if not (args.tol > 0):
        raise UsageError("tol must be positive")


def cmd_trace(args) -> int:
    _validate_grid_args(args)
    spectrum = parse_spectrum_spec(args.spectrum)
    ts = geometric_grid(args.tmin, args.tmax, args.points)
    samples = trace_grid(spectrum, args.kernel, ts, args.tol, args.max_terms)
    if args.format == "json":
        payload = {
            "samples": [
                {"t": s.t, "value": s.value, "tail_bound": s.tail_bound,
                 "terms_used": s.terms_used}
                for s in samples
            ]
        }
        _emit(_json_doc("trace", args, payload), args.out)
    else:
        rows = [(s.t, s.value, s.tail_bound, s.terms_used) for s in samples]
        _emit(_csv([_config_comment("trace", args)],
                   "t,value,tail_bound,terms_used", rows), args.out)
    if args.svg:
        render_svg(args.svg, [s.t for s in samples], [s.value for s in samples],
                   f"{args.kernel} trace")
    return EXIT_OK


def _fit_trace_expansion(spectrum, kernel, ts, tol, orders, max_terms,
                         include_logs=False) -> tuple[FitReport, list]:
    samples = trace_grid(spectrum, kernel, ts, tol, max_terms)
    anchor = math.sqrt(ts[0] * ts[-1])
    d = spectrum.dim
    if kernel == "heat":
        basis = heat_basis(d, orders, anchor)
    elif kernel == "cylinder":
        basis = cylinder_basis(d, orders, anchor, include_logs=include_logs)
    else:
        basis = dcylinder_basis(d, orders, anchor)
    report = fit_expansion([(s.t, s.value) for s in samples], basis)
    return report, samples


def cmd_coeffs(args) -> int:
    _validate_grid_args(args)
    if args.orders < 1:
        raise UsageError("orders must be >= 1")
    spectrum = parse_spectrum_spec(args.spectrum)
    ts = geometric_grid(args.tmin, args.tmax, args.points)
    report, _ = _fit_trace_expansion(
        spectrum, args.kernel, ts, args.tol, args.orders, args.max_terms,
        include_logs=args.with_logs,
    )
    payload = {"kernel": args.kernel, "dim": spectrum.dim,
               "fit_report": report.to_json_dict(),
               "expansion": expansion_to_json(expansion_from_fit(spectrum.dim, report))}
    _emit(_json_doc("coeffs", args, payload), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

class VerifyRow:
    def __init__(self, name: str, computed, expected, tol: float, note: str = ""):
        self.name = name
        self.computed = computed
        self.expected = expected
        self.tol = tol
        self.note = note
        if expected is None:
            self.delta = math.nan
            self.passed = True
        else:
            self.delta = abs(computed - expected)
            self.passed = self.delta <= tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        exp = "---" if self.expected is None else f"{self.expected:+.8e}"
        comp = f"{self.computed:+.8e}" if isinstance(self.computed, float) else str(self.computed)
        delta = "" if self.expected is None else f" delta={self.delta:.2e} tol={self.tol:.1e}"
        note = f"  [{self.note}]" if self.note else ""
        return f"{status}  {self.name:<38} {comp}  vs {exp}{delta}{note}"


def _first_positive_omega(s: Spectrum) -> float:
    w = 1.0
    for _ in range(60):
        for omega, _m in s.up_to(w):
            if omega > 0:
                return omega
        w *= 4.0
    raise UsageError("could not find a positive eigenfrequency")


def _recipe_energy(s: Spectrum) -> Optional[float]:
    label = s.label
    if label.startswith("interval:"):
        length = float(label.split("length=")[1].split(":")[0])
        return -math.pi / (24.0 * length)
    if label.startswith("torus:"):
        circ = float(label.split("circumference=")[1].split(":")[0])
        return -math.pi / (6.0 * circ)
    return None


def expansion_from_fit(dim: int, report: FitReport) -> AsymptoticExpansion:
    terms = tuple(
        ExpansionTerm(p, q, c, "fitted")
        for (p, q), c in zip(report.basis.terms, report.coefficients)
    )
    return AsymptoticExpansion(dim, terms)


def run_verification(spectrum: Spectrum, orders: int = 4, points: int = 64,
                     tol: float = 1e-13, max_terms: int = 10_000_000) -> list[VerifyRow]:
    """Fit all coefficient families for one spectrum and check every relation."""
    if spectrum.envelope is None:
        raise UsageError(
            "verification refused: spectrum supplies no envelope constants, so "
            "trace truncation cannot be certified (add an 'envelope C1 C2' line)"
        )
    d = spectrum.dim
    w1 = _first_positive_omega(spectrum)
    rows: list[VerifyRow] = []

    # window floors keep the per-point term count within budget: at time t a
    # trace needs eigenvalues out to ~x0/t (cylinder) or ~x0/t in lambda
    # (heat), and the envelope converts that into a count
    c1, c2 = spectrum.envelope
    cap = min(max_terms, 400_000)
    x0 = 80.0
    if c2 > 0:
        w_cap = ((cap - c1) / c2) ** (1.0 / d)
        t_cyl_floor = x0 / w_cap
        t_heat_floor = x0 / w_cap**2
    else:
        t_cyl_floor = t_heat_floor = 0.0
    if spectrum.truncated_at is not None and spectrum.truncated_at > 0:
        # a finite term list cannot certify below these times
        t_cyl_floor = max(t_cyl_floor, x0 / spectrum.truncated_at)
        t_heat_floor = max(t_heat_floor, x0 / spectrum.truncated_at**2)
    cyl_lo = max(1e-3 / w1, t_cyl_floor)
    cyl_hi = max(0.1 / w1, 8.0 * cyl_lo)
    heat_lo = max(1e-4 / (w1 * w1), t_heat_floor)
    heat_hi = max(0.1 / (w1 * w1), 8.0 * heat_lo)
    cyl_ts = geometric_grid(cyl_lo, cyl_hi, points)
    heat_ts = geometric_grid(heat_lo, heat_hi, points)

    heat_fit, _ = _fit_trace_expansion(spectrum, "heat", heat_ts, tol, orders, max_terms)
    cyl_fit, cyl_samples = _fit_trace_expansion(spectrum, "cylinder", cyl_ts, tol, orders, max_terms)
    dcyl_fit, _ = _fit_trace_expansion(spectrum, "dcylinder", cyl_ts, tol, orders + 1, max_terms)

    heat_exp = expansion_from_fit(d, heat_fit)
    cyl_from_heat = heat_to_cylinder(heat_exp)

    # power-coefficient relations: e_s from b_s against directly fitted e_s.
    # Tolerances carry the fits' own jackknife spreads, so a coarse window
    # (forced by the term budget in higher dimension) widens them honestly
    # while d=1 spectra run at the nominal figures.
    for s in range(orders + 1):
        p = Fraction(s - d)
        via = cyl_from_heat.term(p, 0)
        if via is None:
            continue
        direct = cyl_fit.coefficient(p, 0)
        if via.status == "undetermined":
            rows.append(VerifyRow(
                f"e_{s} undetermined by heat side", direct, None, 0.0,
                note="new invariant; reported from direct fit only"))
            continue
        slack = 10.0 * (cyl_fit.spread(p, 0) + heat_fit.spread(Fraction(s - d, 2), 0))
        rows.append(VerifyRow(
            f"e_{s} = 2^(d-s) Gamma((d-s+1)/2) b_{s}/sqrt(pi)",
            float(via.coefficient), direct, 1e-5 * max(1.0, abs(direct)) + slack))

    # log coefficients implied by the heat side must be tiny here
    for s in range(orders + 1):
        p = Fraction(s - d)
        via = cyl_from_heat.term(p, 1)
        if via is not None:
            slack = 10.0 * heat_fit.spread(Fraction(s - d, 2), 0)
            rows.append(VerifyRow(
                f"f_{s} from b_{s}", float(via.coefficient), 0.0, 1e-6 + slack))

    # index-term checks
    det = detect_log_term(
        [(s.t, s.value) for s in cyl_samples],
        Fraction(0),
        cylinder_basis(d, orders, math.sqrt(cyl_ts[0] * cyl_ts[-1])),
    )
    rows.append(VerifyRow(
        "no log t at t^0 in Tr T", det.magnitude, 0.0,
        1e-6 + 10.0 * det.coefficient_spread if not det.present else 0.0,
        note="detector says absent" if not det.present else "detector says PRESENT"))

    rows.append(VerifyRow(
        "no t^-1 in dTrT/dt", dcyl_fit.coefficient(Fraction(-1), 0), 0.0,
        1e-8 + 10.0 * dcyl_fit.spread(Fraction(-1), 0)))

    # vacuum energy
    cyl_exp = expansion_from_fit(d, cyl_fit)
    try:
        energy = casimir_energy(cyl_exp)
        expected = _recipe_energy(spectrum)
        if expected is not None:
            tol_e = 1e-4 * max(abs(expected), 1e-3) + 5.0 * cyl_fit.spread(Fraction(1), 0)
        else:
            tol_e = 0.0
        rows.append(VerifyRow("casimir energy -e_(d+1)/2", energy, expected, tol_e,
                              note="" if expected is not None else "no closed form for this recipe"))
    except ValueError:
        rows.append(VerifyRow("casimir energy -e_(d+1)/2", math.nan, None, 0.0,
                              note="expansion too shallow for s=d+1"))

    # Riesz relations (diagonal coefficients only); the fits are limited by
    # spectral oscillation, so these rows run at a looser tolerance than the
    # trace-to-trace relations above
    lam_grid = geometric_grid(1e2 * w1 * w1, 1e6 * w1 * w1, 128)
    om_grid = geometric_grid(10.0 * w1, 100.0 * w1, 128)
    riesz_tol = 2e-2 if d == 1 else 5e-2

    a_diag = []
    for alpha in range(min(2, orders) + 1):
        rep = extract_riesz_coeffs(spectrum, alpha, "lambda", grid=lam_grid)
        a_diag.append(rep.coefficient(Fraction(d - alpha, 2), 0))
    heat_from_riesz = riesz_to_heat(a_diag, d)
    for s, _a in enumerate(a_diag):
        via = heat_from_riesz.term(Fraction(s - d, 2), 0)
        direct = heat_fit.coefficient(Fraction(s - d, 2), 0)
        rows.append(VerifyRow(
            f"b_{s} = Gamma((d+{s})/2+1) a_{s}{s}/{s}!",
            float(via.coefficient), direct, riesz_tol * max(1.0, abs(direct))))

    c_diag, d_diag = [], []
    for alpha in range(min(2, orders) + 1):
        anchor = math.sqrt(om_grid[0] * om_grid[-1])
        base = riesz_fit_basis(d, alpha, "omega", anchor, include_logs=False)
        ds_val = 0.0
        p_diag = Fraction(d - alpha)
        if alpha - d > 0 and (alpha - d) % 2 == 1:
            # decide the log coefficient by detection before trusting a fit
            samples = [(mv.x, math.factorial(alpha) * mv.value)
                       for mv in riesz_mean_grid(spectrum, alpha, "omega", om_grid)]
            det_r = detect_log_term(samples, p_diag, base)
            rep = det_r.with_log if det_r.present else det_r.without_log
            if det_r.present:
                ds_val = rep.coefficient(p_diag, 1)
        else:
            rep = extract_riesz_coeffs(spectrum, alpha, "omega", grid=om_grid,
                                       basis=base)
        c_diag.append(rep.coefficient(p_diag, 0))
        d_diag.append(ds_val)
    cyl_from_riesz = riesz_to_cylinder(c_diag, d_diag, c_diag, d)
    for s in range(len(c_diag)):
        via = cyl_from_riesz.term(Fraction(s - d), 0)
        if via is None or via.status == "undetermined" or via.coefficient is None:
            continue
        direct = cyl_fit.coefficient(Fraction(s - d), 0)
        branch = "c" if (d - s) % 2 == 0 or d - s > 0 else "e"
        tol_s = (2e-2 if branch == "e" else riesz_tol) * max(1.0, abs(direct))
        rows.append(VerifyRow(
            f"e_{s} = d! {branch}_{s}{s}/{s}!" + (" (+psi d_ss)" if branch == "e" else ""),
            float(via.coefficient), direct, tol_s))

    return rows


def cmd_verify(args) -> int:
    spectrum = parse_spectrum_spec(args.spectrum)
    rows = run_verification(spectrum, orders=args.orders, points=args.points,
                            tol=args.tol, max_terms=args.max_terms)
    lines = [_config_comment("verify", args)]
    lines += [row.line() for row in rows]
    ok = all(row.passed for row in rows)
    lines.append(f"{'PASS' if ok else 'FAIL'}  overall: "
                 f"{sum(r.passed for r in rows)}/{len(rows)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# moments / riesz
# ---------------------------------------------------------------------------

def _test_function(args) -> TestFunction:
    name = args.fn
    if name == "gaussian":
        return TestFunction.gaussian()
    if name == "expdecay":
        return TestFunction.expdecay()
    if name == "odd-gaussian":
        return TestFunction.odd_gaussian()
    if name == "bump":
        lo, hi = args.support
        return TestFunction.bump(lo=lo, hi=hi)
    raise UsageError(f"unknown test function {name!r}")


def _parse_decades(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        lo, hi = float(lo), float(hi)
    except ValueError:
        raise UsageError(f"expected '<lo>:<hi>', got {text!r}") from None
    if not (0 < lo < hi):
        raise UsageError("need 0 < lo < hi for the epsilon range")
    return lo, hi


def cmd_moments(args) -> int:
    g = _test_function(args)
    lo, hi = _parse_decades(args.eps_decades)
    eps_grid = geometric_grid(lo, hi, args.points)
    if args.orders < 0:
        raise UsageError("orders must be >= 0")

    rows = []
    corrected_errors = []
    try:
        for eps in eps_grid:
            if args.comb == "linear":
                res = euler_maclaurin_expansion(g, eps, args.orders)
                corrected = res.abs_error
            elif args.comb == "squares":
                res = squares_comb_expansion(g, eps)
                corrected = abs(res.lhs - res.rhs + g(0.0) / 2.0)
            else:
                res = omega_comb_expansion(g, eps, args.orders)
                corrected = res.abs_error
            corrected_errors.append(corrected)
            rows.append((res.epsilon, res.lhs, res.rhs, res.abs_error))
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    slope = _loglog_slope(eps_grid, corrected_errors)
    comments = [_config_comment("moments", args)]
    if args.comb == "squares":
        comments.append(f"# boundary_correction=-g(0)/2={-g(0.0) / 2.0!r}")
        comments.append(f"# corrected_error_slope={slope!r}")
    else:
        comments.append(f"# error_slope={slope!r}")
    if args.comb == "linear":
        table = ", ".join(f"zeta(-{k})={moment('linear', k)}" for k in range(args.orders + 1))
        comments.append(f"# moments: {table}")
    _emit(_csv(comments, "epsilon,lhs,rhs,abs_error", rows), args.out)
    if args.svg:
        render_svg(args.svg, eps_grid, corrected_errors, f"{args.comb} comb error")
    return EXIT_OK


def cmd_riesz(args) -> int:
    spectrum = parse_spectrum_spec(args.spectrum)
    if args.alpha < 0:
        raise UsageError("alpha must be >= 0")
    if args.variable not in ("lambda", "omega"):
        raise UsageError("variable must be lambda or omega")
    if args.xmin is None or args.xmax is None:
        if args.variable == "lambda":
            args.xmin, args.xmax = 1e2, 1e4
        else:
            args.xmin, args.xmax = 10.0, 1e2
    if not (0 < args.xmin < args.xmax):
        raise UsageError("need 0 < xmin < xmax")
    grid = geometric_grid(args.xmin, args.xmax, args.points)

    if args.remainder is not None:
        if not args.weyl_coeffs:
            raise UsageError("--remainder needs --weyl-coeffs g0,g1,...")
        try:
            gs = [float(v) for v in args.weyl_coeffs.split(",")]
        except ValueError:
            raise UsageError(f"bad --weyl-coeffs {args.weyl_coeffs!r}") from None
        data = weyl_remainder(spectrum, args.remainder, gs, grid)
        comments = [_config_comment("riesz", args)]
        sup = max(abs(e) for _, e in data)
        comments.append(f"# sup_abs_remainder={sup!r}")
        _emit(_csv(comments, "x,value", data), args.out)
        if args.svg:
            render_svg(args.svg, [x for x, _ in data], [e for _, e in data],
                       f"Weyl remainder M={args.remainder}")
        return EXIT_OK

    if args.fit:
        report = extract_riesz_coeffs(spectrum, args.alpha, args.variable, grid=grid)
        payload = {"alpha": args.alpha, "variable": args.variable,
                   "fit_report": report.to_json_dict()}
        _emit(_json_doc("riesz", args, payload), args.out)
        return EXIT_OK

    means = riesz_mean_grid(spectrum, args.alpha, args.variable, grid)
    rows = [(mv.x, mv.value) for mv in means]
    _emit(_csv([_config_comment("riesz", args)], "x,value", rows), args.out)
    if args.svg:
        render_svg(args.svg, [r[0] for r in rows], [r[1] for r in rows],
                   f"R^{args.alpha}_{args.variable} N")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / main
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectrace",
        description="Spectral traces, expansion coefficients, and their relations.",
    )
    parser.add_argument("--version", action="version", version=f"spectrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_grid(p, tmin, tmax, points, tol):
        p.add_argument("--tmin", type=float, default=tmin)
        p.add_argument("--tmax", type=float, default=tmax)
        p.add_argument("--points", type=int, default=points)
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--max-terms", type=int, default=10_000_000)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--svg", default=None, help="also render a single-series SVG")

    p_trace = sub.add_parser("trace", help="sample a kernel trace over a t-grid")
    p_trace.add_argument("--spectrum", required=True)
    p_trace.add_argument("--kernel", choices=("heat", "cylinder", "dcylinder"),
                         default="heat")
    add_common_grid(p_trace, 1e-3, 1.0, 40, 1e-12)
    p_trace.set_defaults(func=cmd_trace)

    p_coeffs = sub.add_parser("coeffs", help="fit expansion coefficients from a trace grid")
    p_coeffs.add_argument("--spectrum", required=True)
    p_coeffs.add_argument("--kernel", choices=("heat", "cylinder", "dcylinder"),
                          default="cylinder")
    p_coeffs.add_argument("--orders", type=int, default=4,
                          help="basis depth: orders s = 0..S")
    p_coeffs.add_argument("--with-logs", action="store_true",
                          help="include t^(s-d) log t basis terms where the shape allows them")
    add_common_grid(p_coeffs, 1e-3, 1e-1, 64, 1e-13)
    p_coeffs.set_defaults(func=cmd_coeffs, format="json")

    p_verify = sub.add_parser("verify", help="run the coefficient-relation pipeline")
    p_verify.add_argument("--spectrum", required=True)
    p_verify.add_argument("--orders", type=int, default=4)
    p_verify.add_argument("--points", type=int, default=64)
    p_verify.add_argument("--tol", type=float, default=1e-13)
    p_verify.add_argument("--max-terms", type=int, default=10_000_000)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_mom = sub.add_parser("moments", help="comb pairings vs their expansions")
    p_mom.add_argument("--comb", choices=("linear", "squares", "omega"), default="linear")
    p_mom.add_argument("--fn", choices=("gaussian", "expdecay", "odd-gaussian", "bump"),
                       default="expdecay")
    p_mom.add_argument("--support", type=float, nargs=2, default=(0.5, 1.0),
                       metavar=("LO", "HI"), help="bump support interval")
    p_mom.add_argument("--orders", type=int, default=5, help="moment order M")
    p_mom.add_argument("--eps-decades", default="1e-3:1e-1",
                       help="epsilon range '<lo>:<hi>'")
    p_mom.add_argument("--points", type=int, default=16)
    p_mom.add_argument("--out", default=None)
    p_mom.add_argument("--svg", default=None)
    p_mom.set_defaults(func=cmd_moments)

    p_riesz = sub.add_parser("riesz", help="Riesz means, fits, and Weyl remainders")
    p_riesz.add_argument("--spectrum", required=True)
    p_riesz.add_argument("--alpha", type=int, default=0)
    p_riesz.add_argument("--variable", choices=("lambda", "omega"), default="lambda")
    p_riesz.add_argument("--xmin", type=float, default=None)
    p_riesz.add_argument("--xmax", type=float, default=None)
    p_riesz.add_argument("--points", type=int, default=64)
    p_riesz.add_argument("--fit", action="store_true",
                         help="emit a coefficient fit report instead of samples")
    p_riesz.add_argument("--remainder", type=int, default=None, metavar="M",
                         help="emit the Weyl remainder E_M instead of means")
    p_riesz.add_argument("--weyl-coeffs", default=None,
                         help="comma-separated g_0..g_M for --remainder")
    p_riesz.add_argument("--out", default=None)
    p_riesz.add_argument("--svg", default=None)
    p_riesz.set_defaults(func=cmd_riesz)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spectrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpectrumFormatError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"spectrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToleranceError as exc:
        print(f"spectrace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IllConditionedBasisError as exc:
        print(f"spectrace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
