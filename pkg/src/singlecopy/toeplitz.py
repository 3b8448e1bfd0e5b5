"""Symbol Fourier coefficients, Toeplitz blocks, and their singular spectra.

The coefficients ``t_l = (1/2pi) int_0^{2pi} g(k) exp(-i l k) dk`` fill the
L x L block ``T[i, j] = t_{j-i}`` and the 2L x 2L Majorana covariance block
built from ``M_l = [[0, t_l], [-t_{-l}, 0]]``.  The singular values
``mu_1 >= ... >= mu_L`` of the block drive every entanglement quantity, so
they are aggregated here once, in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import xlogy

from .errors import CoefficientAccuracyError, DecompositionError, ModelError
from .model import TWO_PI, ModelSpec, SymbolProfile, classify_criticality, dispersion, symbol_eval

LN2 = math.log(2.0)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_NODE_BUDGET = 1 << 16    # max symbol evaluations per coefficient
_OSC_PER_PANEL = 6.0      # oscillations of exp(-ilk) served by one 64-node panel


@dataclass(frozen=True)
class ToeplitzCoeffs:
    """Fourier coefficients ``t_l`` for ``l = -(L-1) .. L-1``.

    ``t[L-1+l]`` holds ``t_l``; coefficients are real thanks to the
    conjugation symmetry ``g(-k) = conj(g(k))`` of real coupling tables.
    """

    L: int
    t: np.ndarray
    method: str          # "closed_form" | "quadrature"
    abs_tol: float

    def coeff(self, l: int) -> float:
        if abs(l) >= self.L:
            raise ModelError(f"coefficient t_{l} outside tabulated range (L={self.L})")
        return float(self.t[self.L - 1 + l])


def _closed_form(model: ModelSpec, profile: SymbolProfile):
    """Closed-form ``t_l`` for isotropic sign symbols, or None.

    Covers the constant symbol (no jumps) and the single-band case with
    reflection-symmetric Fermi points ``{k_F, 2pi - k_F}``.
    """
    if not model.isotropic:
        return None
    ks = np.linspace(0.0, TWO_PI, 2048, endpoint=False)
    lam = dispersion(model, ks).real
    scale = float(np.abs(lam).max())
    if not profile.jumps:
        s0 = math.copysign(1.0, lam[int(np.argmax(np.abs(lam)))])
        return lambda l: s0 if l == 0 else 0.0
    if len(profile.jumps) == 2 and not profile.marginal_points:
        k1, k2 = sorted(profile.fermi_points)
        if abs((k1 + k2) - TWO_PI) > 1e-8:
            return None
        lam0 = dispersion(model, 0.0).real
        if abs(lam0) < 1e-10 * scale:
            return None
        s0 = math.copysign(1.0, lam0)
        k_f = k1

        def t_l(l: int) -> float:
            if l == 0:
                return s0 * (2.0 * k_f / math.pi - 1.0)
            return s0 * 2.0 * math.sin(k_f * l) / (math.pi * l)

        return t_l
    return None


def _panel_pair(model, l, lo, hi, n_panels):
    """Composite 64-node Gauss-Legendre integrals of g(k) e^{-+ilk} on [lo, hi]."""
    edges = np.linspace(lo, hi, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    k = (mid + half * _GL_X[None, :]).ravel()
    wts = (half * _GL_W[None, :]).ravel()
    g = symbol_eval(model, k)
    phase = np.exp(-1j * l * k)
    return np.sum(wts * g * phase), np.sum(wts * g * np.conj(phase)), k.size


def _fourier_pair(model, l, abs_tol, cuts):
    """(t_l, t_{-l}) by adaptive panel quadrature split at the symbol cuts."""
    l = abs(int(l))
    if cuts:
        pts = sorted(cuts)
        intervals = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        intervals.append((pts[-1], pts[0] + TWO_PI))
    else:
        intervals = [(0.0, TWO_PI)]

    used = 0
    total_plus = 0.0 + 0.0j
    total_minus = 0.0 + 0.0j
    for lo, hi in intervals:
        width = hi - lo
        tol_i = 0.5 * abs_tol * width   # width-proportional share of 2*pi*abs_tol
        n = max(1, math.ceil(width * max(l, 1) / (TWO_PI * _OSC_PER_PANEL)))
        prev = None
        while True:
            ip, im, cnt = _panel_pair(model, l, lo, hi, n)
            used += cnt
            if prev is not None:
                err = max(abs(ip - prev[0]), abs(im - prev[1]))
                if err < tol_i:
                    break
                if used > _NODE_BUDGET:
                    raise CoefficientAccuracyError(
                        f"coefficient accuracy: t_{l} quadrature exhausted its node budget",
                        achieved=err / TWO_PI,
                    )
            prev = (ip, im)
            n *= 2
        total_plus += ip
        total_minus += im

    t_plus = total_plus / TWO_PI
    t_minus = total_minus / TWO_PI
    residue = max(abs(t_plus.imag), abs(t_minus.imag))
    if residue > abs_tol:
        raise CoefficientAccuracyError(
            f"coefficient accuracy: t_{l} kept an imaginary residue", achieved=residue
        )
    return float(t_plus.real), float(t_minus.real)


def coefficient_table(model: ModelSpec, L: int, abs_tol: float = 1e-12,
                      profile: SymbolProfile | None = None) -> ToeplitzCoeffs:
    """Tabulate ``t_l`` for ``|l| < L`` (closed form where available).

    The table for the largest block length of a scan is reused for every
    smaller block, since Toeplitz blocks nest.
    """
    if L < 1:
        raise ModelError("block length L must be >= 1")
    if abs_tol <= 0.0:
        raise ModelError("abs_tol must be positive")
    if profile is None:
        profile = classify_criticality(model)
    t = np.empty(2 * L - 1)
    closed = _closed_form(model, profile)
    if closed is not None:
        for l in range(L):
            t[L - 1 + l] = closed(l)
            t[L - 1 - l] = closed(-l)
        method = "closed_form"
    else:
        cuts = sorted(set(profile.fermi_points) | set(profile.marginal_points))
        for l in range(L):
            tp, tm = _fourier_pair(model, l, abs_tol, cuts)
            t[L - 1 + l] = tp
            t[L - 1 - l] = tm
        method = "quadrature"
    overshoot = float(np.abs(t).max()) - 1.0
    if overshoot > 1e-12:
        raise CoefficientAccuracyError(
            "coefficient accuracy: |t_l| exceeds 1", achieved=overshoot
        )
    return ToeplitzCoeffs(L, t, method, abs_tol)


def fourier_coefficient(model: ModelSpec, l: int, abs_tol: float = 1e-12) -> float:
    """Single coefficient ``t_l`` to absolute accuracy ``abs_tol``."""
    if abs_tol <= 0.0:
        raise ModelError("abs_tol must be positive")
    profile = classify_criticality(model)
    closed = _closed_form(model, profile)
    if closed is not None:
        return closed(int(l))
    cuts = sorted(set(profile.fermi_points) | set(profile.marginal_points))
    tp, tm = _fourier_pair(model, abs(int(l)), abs_tol, cuts)
    return tp if l >= 0 else tm


def _resolve_table(model, L, abs_tol, table):
    if table is None:
        return coefficient_table(model, L, abs_tol)
    if table.L < L:
        raise ModelError(f"coefficient table covers L={table.L} < requested {L}")
    return table


def build_T(model: ModelSpec, L: int, abs_tol: float = 1e-12,
            table: ToeplitzCoeffs | None = None) -> np.ndarray:
    """The L x L Toeplitz block ``T[i, j] = t_{j-i}``.

    Symmetric exactly when the model is isotropic.
    """
    if L < 1:
        raise ModelError("block length L must be >= 1")
    table = _resolve_table(model, L, abs_tol, table)
    idx = table.L - 1
    col = table.t[idx::-1][:L]           # t_0, t_{-1}, ..., t_{-(L-1)}
    row = table.t[idx:idx + L]           # t_0, t_1, ..., t_{L-1}
    return scipy.linalg.toeplitz(col, row)


def build_gamma(model: ModelSpec, L: int, abs_tol: float = 1e-12,
                table: ToeplitzCoeffs | None = None) -> np.ndarray:
    """The 2L x 2L skew-symmetric covariance block with 2x2 blocks ``M_{i-j}``."""
    T = build_T(model, L, abs_tol, table)
    g = np.zeros((2 * L, 2 * L))
    g[0::2, 1::2] = T.T                  # entry (2i, 2j+1) = t_{i-j}
    g[1::2, 0::2] = -T                   # entry (2i+1, 2j) = -t_{j-i}
    return g


@dataclass(frozen=True)
class BlockSpectrum:
    """Singular values of one block plus log-domain aggregates.

    ``ln_alpha1``  : sum of ln((1+mu)/2); log of the top reduced eigenvalue.
    ``ln_absdet_T``: sum of ln(mu); -inf once any mu underflows below 1e-300.
    ``entropy_bits``: binary-entropy sum H2((1+mu)/2), the block entropy.
    ``rms_term_bits``: -(1/2) sum log2((1+mu^2)/2), the quadratic-mean term
    sitting between ``-ln alpha1`` and ``-(1/2) ln|det T|``.
    """

    L: int
    mu: np.ndarray
    ln_alpha1: float
    ln_absdet_T: float
    entropy_bits: float
    rms_term_bits: float
    degenerate: bool = False


def spectrum_from_singular_values(values, degenerate: bool = False) -> BlockSpectrum:
    """Aggregate raw singular values into a :class:`BlockSpectrum`."""
    mu = np.sort(np.asarray(values, dtype=float))[::-1].copy()
    if mu.size == 0:
        raise ModelError("empty singular value array")
    overshoot = float(mu[0]) - 1.0
    if overshoot > 1e-8:
        raise ModelError(
            f"model violates |T| <= 1: singular value overshoot {overshoot:.3e}"
        )
    mu = np.clip(mu, 0.0, 1.0)
    ln_alpha1 = float(np.sum(np.log1p((mu - 1.0) / 2.0)))
    if float(mu[-1]) < 1e-300:
        ln_absdet = float("-inf")
    else:
        ln_absdet = float(np.sum(np.log(mu)))
    p = (1.0 + mu) / 2.0
    q = (1.0 - mu) / 2.0
    entropy_bits = float(-(xlogy(p, p) + xlogy(q, q)).sum() / LN2)
    rms_term_bits = float(-0.5 * np.sum(np.log1p((mu * mu - 1.0) / 2.0)) / LN2)
    return BlockSpectrum(
        L=int(mu.size),
        mu=mu,
        ln_alpha1=min(ln_alpha1, 0.0),
        ln_absdet_T=ln_absdet,
        entropy_bits=max(entropy_bits, 0.0) + 0.0,
        rms_term_bits=rms_term_bits + 0.0,
        degenerate=degenerate,
    )


def block_spectrum(T) -> BlockSpectrum:
    """Dense-SVD spectrum of a block with log-domain aggregates."""
    A = np.asarray(T, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ModelError("block must be a square matrix")
    if not np.all(np.isfinite(A)):
        raise ModelError("block entries must be finite")
    try:
        sv = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"decomposition failure: {exc}") from exc
    return spectrum_from_singular_values(sv)
