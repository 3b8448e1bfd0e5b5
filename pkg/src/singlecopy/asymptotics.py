"""Block-length scans, scaling fits, and the closed-form integral check.

Scans share one coefficient table across their whole geometric grid, fit
quantities against log2(L), detect saturation over the top octave, report
the three-term determinant bound chain, and verify the closed integral
behind the 1/6 scaling coefficient by adaptive quadrature.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .entangle import single_copy_E1
from .errors import ModelError, ToolkitError
from .model import ModelSpec, classify_criticality
from .toeplitz import LN2, BlockSpectrum, block_spectrum, build_T, coefficient_table

MAX_SCAN_L = 4096

SCAN_FIELDS = ("e1_cont_bits", "E1_bits", "entropy_bits", "ln_absdet_T", "rms_term_bits")


def geometric_grid(L_min: int, L_max: int, per_octave: int = 2) -> tuple[int, ...]:
    """Strictly increasing integer grid, ``per_octave`` points per factor 2."""
    if L_min < 1 or L_max < L_min or per_octave < 1:
        raise ModelError("need 1 <= L_min <= L_max and per_octave >= 1")
    out = []
    e = math.log2(L_min)
    top = math.log2(L_max)
    while e <= top + 1e-9:
        out.append(int(round(2.0 ** e)))
        e += 1.0 / per_octave
    out.append(L_max)
    return tuple(sorted(set(out)))


@dataclass(frozen=True)
class ScanRow:
    L: int
    e1_cont_bits: float = math.nan
    E1_bits: float = math.nan
    entropy_bits: float = math.nan
    ln_absdet_T: float = math.nan
    rms_term_bits: float = math.nan
    error: str | None = None


@dataclass(frozen=True)
class ScanSeries:
    """Per-L entanglement quantities of one model over a block-length grid."""

    model: ModelSpec
    grid: tuple[int, ...]
    rows: tuple[ScanRow, ...]
    spectra: tuple[BlockSpectrum, ...] | None = None


def _row_from_spectrum(spec: BlockSpectrum) -> ScanRow:
    sc = single_copy_E1(ln_alpha1=spec.ln_alpha1)
    return ScanRow(
        L=spec.L,
        e1_cont_bits=sc.e1_cont_bits,
        E1_bits=sc.E1_bits,
        entropy_bits=spec.entropy_bits,
        ln_absdet_T=spec.ln_absdet_T,
        rms_term_bits=spec.rms_term_bits,
    )


def scan(model: ModelSpec, grid, abs_tol: float = 1e-12, threads: int = 1,
         keep_spectra: bool = False, progress=None) -> ScanSeries:
    """One spectrum per grid point, coefficients shared across the scan.

    Failures are recorded per row instead of aborting the scan.
    """
    grid = tuple(int(L) for L in grid)
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ModelError("grid must be non-empty and strictly increasing")
    if grid[0] < 1 or grid[-1] > MAX_SCAN_L:
        raise ModelError(f"grid must stay within [1, {MAX_SCAN_L}]")
    table = coefficient_table(model, grid[-1], abs_tol)

    def job(L: int):
        try:
            spec = block_spectrum(build_T(model, L, abs_tol, table))
            row = _row_from_spectrum(spec)
        except ToolkitError as exc:
            spec, row = None, ScanRow(L=L, error=str(exc))
        if progress is not None:
            progress(f"L={L} done" if row.error is None else f"L={L} failed: {row.error}")
        return row, spec

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, grid))
    else:
        results = [job(L) for L in grid]

    rows = tuple(r for r, _ in results)
    spectra = tuple(s for _, s in results if s is not None) if keep_spectra else None
    return ScanSeries(model=model, grid=grid, rows=rows, spectra=spectra)


@dataclass(frozen=True)
class TwoTermFit:
    a: float   # coefficient of log2 L
    b: float   # coefficient of log2 log2 L
    c: float   # constant


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of one scan quantity against log2(L)."""

    quantity: str
    slope: float
    intercept: float
    rms_residual: float
    grid_range: tuple[int, int]
    two_term: TwoTermFit | None = None
    predicted_slope: float | None = None
    n_excluded: int = 0


def _series_points(series: ScanSeries, quantity: str, window):
    if quantity not in SCAN_FIELDS:
        raise ModelError(f"unknown scan quantity {quantity!r}")
    lo, hi = window if window is not None else (series.grid[0], series.grid[-1])
    pts = []
    skipped = 0
    for row in series.rows:
        if not (lo <= row.L <= hi):
            continue
        y = getattr(row, quantity)
        if row.error is not None or not math.isfinite(y):
            skipped += 1
            continue
        pts.append((row.L, y))
    return pts, skipped


def fit_log(series: ScanSeries, quantity: str, window=None, two_term: bool = False) -> ScalingFit:
    """Ordinary least squares of ``quantity`` against log2(L)."""
    pts, skipped = _series_points(series, quantity, window)
    if len(pts) < 3:
        raise ModelError("need at least 3 usable grid points to fit")
    Ls = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    x = np.log2(Ls)
    design = np.vstack([x, np.ones_like(x)]).T
    if np.linalg.matrix_rank(design) < 2:
        raise ModelError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    two = None
    if two_term:
        design3 = np.vstack([x, np.log2(x), np.ones_like(x)]).T
        c3, *_ = np.linalg.lstsq(design3, y, rcond=None)
        two = TwoTermFit(float(c3[0]), float(c3[1]), float(c3[2]))
    return ScalingFit(
        quantity=quantity,
        slope=float(coef[0]),
        intercept=float(coef[1]),
        rms_residual=rms,
        grid_range=(int(Ls[0]), int(Ls[-1])),
        two_term=two,
        n_excluded=skipped,
    )


def saturation_test(series: ScanSeries, quantity: str, epsilon: float = 0.01) -> bool:
    """True iff the quantity varies less than ``epsilon`` over the top octave."""
    if series.grid[-1] < 4 * series.grid[0]:
        raise ModelError("grid must span at least two octaves")
    top = series.grid[-1]
    pts, skipped = _series_points(series, quantity, (top // 2, top))
    if skipped or len(pts) < 2:
        raise ModelError("top octave has missing or non-finite rows")
    ys = [p[1] for p in pts]
    return bool(max(ys) - min(ys) < epsilon)


@dataclass(frozen=True)
class BoundChain:
    """The three determinant-chain quantities, in natural-log units.

    Per singular value, ``(1-mu)^2 >= 0`` forces ``lhs >= mid`` and the
    arithmetic-geometric mean inequality forces ``lhs <= rhs``; the relative
    order of ``mid`` and ``rhs`` is data, not an identity, and is only
    reported.
    """

    lhs: float   # -ln alpha1
    mid: float   # -(1/2) ln prod (1+mu^2)/2
    rhs: float   # -(1/2) ln |det T|  (may be +inf)


def bound_chain(spectrum: BlockSpectrum) -> BoundChain:
    """Evaluate the chain from log-domain aggregates of one spectrum."""
    lhs = -spectrum.ln_alpha1
    mid = spectrum.rms_term_bits * LN2
    rhs = math.inf if spectrum.ln_absdet_T == -math.inf else -0.5 * spectrum.ln_absdet_T
    return BoundChain(lhs + 0.0, mid + 0.0, rhs + 0.0)


def fh_slope(model: ModelSpec, grid, abs_tol: float = 1e-12) -> ScalingFit:
    """Fit of ``-ln|det T_L|`` against ``ln L`` for a critical model.

    Attaches the jump-exponent prediction ``sum_j beta_j^2`` from the symbol
    profile as ``predicted_slope``; -inf determinants are excluded and
    counted in ``n_excluded``.
    """
    profile = classify_criticality(model)
    series = scan(model, grid, abs_tol)
    pts = [(r.L, -r.ln_absdet_T) for r in series.rows
           if r.error is None and math.isfinite(r.ln_absdet_T)]
    skipped = len(series.rows) - len(pts)
    if len(pts) < 3:
        raise ModelError("need at least 3 finite determinants to fit")
    x = np.log([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return ScalingFit(
        quantity="neg_ln_absdet_T",
        slope=float(coef[0]),
        intercept=float(coef[1]),
        rms_residual=float(np.sqrt(np.mean(resid ** 2))),
        grid_range=(pts[0][0], pts[-1][0]),
        predicted_slope=profile.beta_sq_sum(),
        n_excluded=skipped,
    )


@dataclass(frozen=True)
class IntegralCheck:
    value_natural_log: float
    value_log2: float
    abs_err_estimate: float


def _half_integrand(x: float) -> float:
    # ln((1+x)/2) / (1 - x^2) with the removable 0/0 at x -> 1 series-expanded
    u = 1.0 - x
    if u < 1e-6:
        return -(0.5 + u / 8.0 + u * u / 24.0) / (2.0 - u)
    return math.log1p((x - 1.0) / 2.0) / ((1.0 - x) * (1.0 + x))


def integral_check(abs_tol: float = 1e-12) -> IntegralCheck:
    """(2/pi^2) * integral over [-1, 1] of ln((1+|x|)/2)/(1-x^2).

    Evaluated as twice the half-interval integral (the integrand is even);
    the log2 variant divides by ln 2.
    """
    if abs_tol < 1e-12:
        raise ModelError("abs_tol must be >= 1e-12")
    half, err = quad(_half_integrand, 0.0, 1.0, epsabs=abs_tol / 16.0,
                     epsrel=1e-13, limit=200)
    scale = 4.0 / math.pi ** 2
    if err * scale > abs_tol:
        raise ToolkitError(
            f"integral tolerance not met: error estimate {err * scale:.3e} > {abs_tol:.3e}"
        )
    value = scale * half
    return IntegralCheck(value, value / LN2, err * scale)
