"""Riesz means of the counting function, exactly, plus coefficient extraction.

The alpha-fold averaged counting function has the closed form
(1/alpha!) x^{-alpha} sum_{x_n <= x} mult (x - x_n)^alpha (the iterated
simplex integral of a unit step), in either the eigenvalue variable
(x_n = lambda_n) or the frequency variable (x_n = omega_n).  Averaging is
what turns the non-decaying spectral oscillations of the raw Weyl remainder
into a genuinely asymptotic series; weyl_remainder exhibits the raw
oscillation itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .fitkit import AsymptoticBasis, FitReport, fit_expansion, geometric_grid
from .spectra import Spectrum

__all__ = [
    "RieszMeanValue",
    "riesz_mean",
    "riesz_mean_grid",
    "extract_riesz_coeffs",
    "weyl_remainder",
    "default_riesz_grid",
    "riesz_fit_basis",
]

_VARIABLES = ("lambda", "omega")


@dataclass(frozen=True)
class RieszMeanValue:
    alpha: int
    variable: str
    x: float
    value: float


def riesz_mean(s: Spectrum, alpha: int, variable: str, x: float) -> RieszMeanValue:
    """Exact alpha-th Riesz mean of N at x, in the chosen variable.

    variable="lambda": (1/alpha!) x^{-alpha} sum_{lambda_n <= x} mult (x - lambda_n)^alpha.
    variable="omega":  the same with omega_n in place of lambda_n.
    Evaluated from the closed form (partial power sums), not by quadrature.
    """
    if variable not in _VARIABLES:
        raise ValueError(f"variable must be one of {_VARIABLES}, got {variable!r}")
    if alpha < 0 or int(alpha) != alpha:
        raise ValueError(f"alpha must be a nonnegative integer, got {alpha}")
    if not (x > 0):
        raise ValueError(f"x must be positive, got {x}")
    alpha = int(alpha)
    if variable == "omega":
        terms = [(w, m) for w, m in s.up_to(x * (1 + 1e-12) + 1e-12) if w <= x]
        acc = math.fsum(m * (x - w) ** alpha for w, m in terms)
    else:
        omega_hi = math.sqrt(x) * (1 + 1e-12) + 1e-12
        terms = [(w * w, m) for w, m in s.up_to(omega_hi)]
        acc = math.fsum(m * (x - lam) ** alpha for lam, m in terms if lam <= x)
    value = acc / (math.factorial(alpha) * x**alpha)
    return RieszMeanValue(alpha=alpha, variable=variable, x=x, value=value)


def riesz_mean_grid(s: Spectrum, alpha: int, variable: str,
                    grid: Sequence[float]) -> list[RieszMeanValue]:
    """Riesz means over a whole grid with a single spectrum enumeration.

    Same closed form as riesz_mean; the one enumeration (to the largest grid
    point) plus vectorized partial power sums is what keeps dense grids over
    product spectra affordable.
    """
    if variable not in _VARIABLES:
        raise ValueError(f"variable must be one of {_VARIABLES}, got {variable!r}")
    if alpha < 0 or int(alpha) != alpha:
        raise ValueError(f"alpha must be a nonnegative integer, got {alpha}")
    grid = [float(x) for x in grid]
    if any(not (x > 0) for x in grid):
        raise ValueError("grid points must be positive")
    if not grid:
        return []
    alpha = int(alpha)
    xmax = max(grid)
    if variable == "omega":
        terms = s.up_to(xmax * (1 + 1e-12) + 1e-12)
        keys = np.array([w for w, _ in terms])
    else:
        terms = s.up_to(math.sqrt(xmax) * (1 + 1e-12) + 1e-12)
        keys = np.array([w * w for w, _ in terms])
    mults = np.array([m for _, m in terms], dtype=float)
    fac = math.factorial(alpha)
    out = []
    for x in grid:
        idx = int(np.searchsorted(keys, x, side="right"))
        if idx == 0:
            value = 0.0
        else:
            value = float(np.sum(mults[:idx] * (x - keys[:idx]) ** alpha))
            value /= fac * x**alpha
        out.append(RieszMeanValue(alpha=alpha, variable=variable, x=x, value=value))
    return out


def default_riesz_grid(variable: str, points: int = 64) -> list[float]:
    """Default geometric fitting grids: [1e2, 1e4] in lambda, [10, 1e2] in omega."""
    if variable == "lambda":
        return geometric_grid(1e2, 1e4, points)
    return geometric_grid(10.0, 1e2, points)


def riesz_fit_basis(dim: int, alpha: int, variable: str,
                    scale_anchor: float = 1.0,
                    include_logs: bool = True,
                    guard_orders: int = 1) -> AsymptoticBasis:
    """Basis matching the Riesz-mean expansion shape.

    lambda variable: x^{(d-s)/2}; omega variable: x^{d-s}, plus x^{d-s} log x
    where s-d is odd and positive.  s runs to alpha + guard_orders: the terms
    beyond s = alpha absorb the smooth part of the remainder so the
    diagonal-range coefficients come out clean.
    """
    smax = alpha + guard_orders
    terms: list[tuple[Fraction, int]] = []
    for s in range(smax + 1):
        if variable == "lambda":
            terms.append((Fraction(dim - s, 2), 0))
        else:
            terms.append((Fraction(dim - s), 0))
            if include_logs and s - dim > 0 and (s - dim) % 2 == 1:
                terms.append((Fraction(dim - s), 1))
    return AsymptoticBasis(tuple(terms), scale_anchor)


def extract_riesz_coeffs(
    s: Spectrum,
    alpha: int,
    variable: str,
    grid: Optional[Sequence[float]] = None,
    basis: Optional[AsymptoticBasis] = None,
    include_logs: str | bool = "detect",
) -> FitReport:
    """Fit the asymptotic coefficients of the alpha-th Riesz mean.

    The fitted values follow the plain normalization x^{-alpha} sum (x-x_n)^alpha
    (alpha! times riesz_mean), which is the convention under which the
    coefficient-relation identities hold: in the lambda variable the diagonal
    coefficient a_{alpha,alpha} feeds b_s = Gamma((d+s)/2+1)/Gamma(s+1) a_ss,
    and in the omega variable c_ss feeds the cylinder relations.

    include_logs controls the x^{d-s} log x columns the omega-variable shape
    allows at s-d odd positive: True always includes them, False never, and
    "detect" (default) includes a log column only when the with/without
    comparison says the data carry it -- fitting a log column against data
    that have none mostly soaks up spectral oscillation and spoils the
    power coefficients.

    Coefficients at s < alpha repeat information available at lower alpha and
    are flagged informational in the report notes.
    """
    if variable not in _VARIABLES:
        raise ValueError(f"variable must be one of {_VARIABLES}, got {variable!r}")
    if include_logs not in ("detect", True, False):
        raise ValueError(f"include_logs must be 'detect', True, or False, got {include_logs!r}")
    if grid is None:
        grid = default_riesz_grid(variable)
    grid = list(grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    scale = math.factorial(int(alpha))
    samples = [(mv.x, scale * mv.value)
               for mv in riesz_mean_grid(s, alpha, variable, grid)]
    anchor = math.sqrt(grid[0] * grid[-1])
    if basis is None:
        if include_logs == "detect" and variable == "omega":
            basis = _detected_omega_basis(samples, s.dim, alpha, anchor)
        else:
            basis = riesz_fit_basis(s.dim, alpha, variable, anchor,
                                    include_logs=bool(include_logs))
    report = fit_expansion(samples, basis)
    notes = list(report.notes)
    redundant = []
    for ss in range(int(alpha)):
        p = Fraction(s.dim - ss, 2) if variable == "lambda" else Fraction(s.dim - ss)
        if (p, 0) in basis.terms:
            redundant.append(f"s={ss}")
    if redundant:
        notes.append(
            "informational only (redundant below the diagonal): " + ", ".join(redundant)
        )
    return FitReport(
        basis=report.basis,
        coefficients=report.coefficients,
        residual_rms=report.residual_rms,
        condition_estimate=report.condition_estimate,
        stability=report.stability,
        notes=tuple(notes),
    )


def _detected_omega_basis(samples, dim: int, alpha: int, anchor: float) -> AsymptoticBasis:
    """Log-free omega basis, augmented with the log columns the data support."""
    from .fitkit import detect_log_term

    basis = riesz_fit_basis(dim, alpha, "omega", anchor, include_logs=False)
    full = riesz_fit_basis(dim, alpha, "omega", anchor, include_logs=True)
    for p, q in full.terms:
        if q == 1:
            if detect_log_term(samples, p, basis).present:
                basis = basis.with_term(p, 1)
    return basis


def weyl_remainder(
    s: Spectrum,
    M: int,
    weyl_coeffs: Sequence[float],
    grid: Sequence[float],
) -> list[tuple[float, float]]:
    """E_M(omega) = N(omega^2) - sum_{s<=M} g_s omega^{d-s} on the grid.

    Beyond the leading term this remainder is oscillatory and does not decay;
    sampling it over decades makes that visible.
    """
    if len(weyl_coeffs) < M + 1:
        raise ValueError(f"need g_0..g_{M}, got {len(weyl_coeffs)} coefficients")
    d = s.dim
    grid = [float(w) for w in grid]
    if not grid:
        return []
    wmax = max(grid)
    terms = s.up_to(wmax * (1 + 1e-12) + 1e-12)
    omegas = np.array([w for w, _ in terms])
    counts = np.concatenate([[0.0], np.cumsum([m for _, m in terms])])
    out = []
    for w in grid:
        idx = int(np.searchsorted(omegas, w, side="right"))
        n = counts[idx]
        model = math.fsum(weyl_coeffs[k] * w ** (d - k) for k in range(M + 1))
        out.append((w, float(n) - model))
    return out
