"""Finite-range quadratic chain models and their momentum-space symbol.

A chain is specified by symmetric couplings ``A_0 .. A_w`` (with
``A_{-j} = A_j`` implied) and antisymmetric couplings ``B_1 .. B_w``
(``B_{-j} = -B_j``, ``B_0 = 0``).  The dispersion

    lam(k) = A_0 + 2 * sum_j A_j cos(j k) - 4i * sum_j B_j sin(j k)

defines the unimodular symbol ``g(k) = lam(k) / |lam(k)|``.  Zeros of the
dispersion make ``g`` jump; the chain is classified as critical exactly
when such jumps exist (Fermi points).  Tangential zeros, where the
one-sided limits of ``g`` coincide, are reported as marginal instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateDispersionError, ModelError, SymbolSingularError

TWO_PI = 2.0 * math.pi

#: Threshold below which the symbol is treated as singular (undefined).
SINGULAR_FLOOR = 1e-300

_ZERO_REL = 1e-8       # refined |lam| below this (times scale) counts as a zero
_JUMP_TOL = 1e-6       # one-sided limits closer than this mean "no jump"
_LIMIT_DELTA = 1e-4    # offset used for one-sided limits (Richardson refined)


@dataclass(frozen=True)
class ModelSpec:
    """Couplings of a translationally invariant quadratic chain.

    Parameters
    ----------
    w : int
        Coupling range; couplings beyond ``w`` vanish.
    A : tuple of float
        Symmetric couplings ``A_0 .. A_w``.
    B : tuple of float
        Antisymmetric couplings ``B_1 .. B_w`` (empty for ``w = 0``).
    label : str
        Preset tag: ``xx``, ``xy``, ``ising`` or ``custom``.
    a, gamma : float, optional
        Preset parameters, kept for reporting when applicable.
    """

    w: int
    A: tuple[float, ...]
    B: tuple[float, ...]
    label: str = "custom"
    a: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.w < 0:
            raise ModelError("coupling range w must be non-negative")
        if len(self.A) != self.w + 1 or len(self.B) != self.w:
            raise ModelError(
                f"need w+1 symmetric and w antisymmetric couplings, got "
                f"|A|={len(self.A)}, |B|={len(self.B)} for w={self.w}"
            )
        entries = np.asarray(self.A + self.B, dtype=float)
        if not np.all(np.isfinite(entries)):
            raise ModelError("couplings must be finite")
        if not np.any(entries != 0.0):
            raise ModelError("all couplings vanish")

    @property
    def isotropic(self) -> bool:
        """True when every antisymmetric coupling vanishes."""
        return all(b == 0.0 for b in self.B)


@dataclass(frozen=True)
class Jump:
    """A discontinuity of the symbol at angle ``k``.

    ``jump_exponent`` is the principal exponent beta with
    ``exp(2 pi i beta) = left_limit / right_limit`` and
    ``Re(beta) in (-1/2, 1/2]``.
    """

    k: float
    left_limit: complex
    right_limit: complex
    jump_exponent: complex


@dataclass(frozen=True)
class SymbolProfile:
    """Discontinuity structure of the symbol of one model."""

    model: ModelSpec
    jumps: tuple[Jump, ...]
    critical: bool
    fermi_points: tuple[float, ...]
    marginal_points: tuple[float, ...] = ()

    def beta_sq_sum(self) -> float:
        """Sum of squared jump exponents (determinant-decay prediction)."""
        return float(sum(abs(j.jump_exponent) ** 2 for j in self.jumps))


def _xy_couplings(a: float, gamma: float):
    return (-1.0, a / 2.0), (-gamma * a / 4.0 + 0.0,)


def _require_param(name, value):
    if value is None:
        raise ModelError(f"preset requires parameter {name!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ModelError(f"parameter {name!r} must be finite")
    return value


def build_model(kind: str = "custom", *, a=None, gamma=None, A=None, B=None) -> ModelSpec:
    """Construct a validated :class:`ModelSpec`.

    Presets expand as ``xy(a, gamma) -> w=1, A=(-1, a/2), B=(-gamma*a/4,)``,
    ``xx(a) = xy(a, 0)`` and ``ising = xy(1, 1)``.  ``custom`` takes explicit
    coupling arrays (``B`` defaults to zeros of the right length).
    """
    if kind == "ising":
        if (a is not None and float(a) != 1.0) or (gamma is not None and float(gamma) != 1.0):
            raise ModelError("the ising preset fixes a=1, gamma=1")
        Ac, Bc = _xy_couplings(1.0, 1.0)
        return ModelSpec(1, Ac, Bc, "ising", 1.0, 1.0)
    if kind == "xx":
        av = _require_param("a", a)
        if gamma is not None and float(gamma) != 0.0:
            raise ModelError("the xx preset fixes gamma=0")
        Ac, Bc = _xy_couplings(av, 0.0)
        return ModelSpec(1, Ac, Bc, "xx", av, 0.0)
    if kind == "xy":
        av = _require_param("a", a)
        gv = _require_param("gamma", gamma)
        Ac, Bc = _xy_couplings(av, gv)
        return ModelSpec(1, Ac, Bc, "xy", av, gv)
    if kind == "custom":
        if A is None:
            raise ModelError("custom model needs the symmetric coupling array A")
        At = tuple(float(x) for x in np.atleast_1d(np.asarray(A, dtype=float)))
        w = len(At) - 1
        if B is None:
            Bt = (0.0,) * w
        else:
            Bt = tuple(float(x) for x in np.atleast_1d(np.asarray(B, dtype=float))) if np.size(B) else ()
        return ModelSpec(w, At, Bt, "custom")
    raise ModelError(f"unknown model kind {kind!r}")


def dispersion(model: ModelSpec, k):
    """Evaluate ``lam(k)``; accepts scalars or arrays, returns complex."""
    karr = np.asarray(k, dtype=float)
    out = np.full(karr.shape, complex(model.A[0]), dtype=complex)
    for j in range(1, model.w + 1):
        out += 2.0 * model.A[j] * np.cos(j * karr)
        out -= 4.0j * model.B[j - 1] * np.sin(j * karr)
    return complex(out) if karr.ndim == 0 else out


def dispersion_derivative(model: ModelSpec, k):
    """d lam / dk, same broadcasting as :func:`dispersion`."""
    karr = np.asarray(k, dtype=float)
    out = np.zeros(karr.shape, dtype=complex)
    for j in range(1, model.w + 1):
        out -= 2.0 * j * model.A[j] * np.sin(j * karr)
        out -= 4.0j * j * model.B[j - 1] * np.cos(j * karr)
    return complex(out) if karr.ndim == 0 else out


def symbol_eval(model: ModelSpec, k):
    """Unimodular symbol ``g(k) = lam(k)/|lam(k)|``.

    Raises
    ------
    SymbolSingularError
        If ``|lam(k)|`` falls below :data:`SINGULAR_FLOOR` anywhere in ``k``
        (the caller must treat that angle as a candidate Fermi point).
    """
    lam = dispersion(model, k)
    mag = np.abs(lam)
    if np.any(mag < SINGULAR_FLOOR):
        flat_k = np.atleast_1d(np.asarray(k, dtype=float))
        raise SymbolSingularError(float(flat_k[int(np.argmin(np.atleast_1d(mag)))]))
    return lam / mag


def _bisect_sign_change(model, lo, hi, tol):
    """Bisection of the (real) isotropic dispersion to width ``tol``."""
    flo = dispersion(model, lo).real
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = dispersion(model, mid).real
        if fm == 0.0:
            return mid
        if (flo < 0.0) != (fm < 0.0):
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _refine_minimum(model, lo, hi, tol):
    """Locate the minimum of |lam| inside (lo, hi) to angle tolerance ``tol``."""
    res = minimize_scalar(
        lambda k: abs(dispersion(model, k % TWO_PI)) ** 2,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol},
    )
    return float(res.x)


def _polish_zero(model, k0):
    """Newton-polish a transversal dispersion zero to machine precision.

    Iterates on the projection of lam along its local direction; keeps the
    input angle when no improvement is possible (tangential zeros).
    """
    best = k0
    best_mag = abs(dispersion(model, k0))
    k = k0
    for _ in range(8):
        lam = dispersion(model, k)
        dlam = dispersion_derivative(model, k)
        denom = (dlam.conjugate() * dlam).real
        if denom < 1e-30:
            break
        step = (dlam.conjugate() * lam).real / denom
        k -= step
        mag = abs(dispersion(model, k))
        if mag < best_mag:
            best, best_mag = k, mag
        if abs(step) < 1e-15:
            break
    return best % TWO_PI


def _one_sided_limits(model, k0):
    """Richardson-extrapolated limits of g at ``k0`` from the left and right."""

    def lim(side):
        g1 = symbol_eval(model, (k0 + side * _LIMIT_DELTA) % TWO_PI)
        g2 = symbol_eval(model, (k0 + side * _LIMIT_DELTA / 2.0) % TWO_PI)
        g = 2.0 * g2 - g1
        return g / abs(g)

    return lim(-1.0), lim(+1.0)


def _principal_exponent(left: complex, right: complex) -> complex:
    beta = cmath.phase(left / right) / TWO_PI
    if beta <= -0.5 + 1e-9:
        beta += 1.0
    return complex(beta)


def classify_criticality(model: ModelSpec, root_tol: float = 1e-10, samples: int = 4096) -> SymbolProfile:
    """Locate all dispersion zeros on [0, 2pi) and classify the model.

    Scans ``samples`` uniform angles (at least 4096), refines every local
    minimum of ``|lam|`` (sign-change bisection for isotropic models, bounded
    minimization otherwise) down to ``root_tol``, and keeps refined minima
    with ``|lam|`` below 1e-8 of the dispersion scale as zeros.  Zeros where
    the one-sided limits of the symbol differ become jumps (Fermi points);
    tangential zeros with equal limits are reported as marginal.  The model
    is critical exactly when the jump list is nonempty.
    """
    if root_tol <= 0.0:
        raise ModelError("root_tol must be positive")
    samples = max(int(samples), 4096)
    ks = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    lam = dispersion(model, ks)
    mag = np.abs(lam)
    scale = float(mag.max())
    if scale == 0.0 or np.mean(mag < 1e-13 * scale) > 0.1:
        raise DegenerateDispersionError("dispersion vanishes on an interval")

    isotropic = model.isotropic
    sgn = np.sign(lam.real) if isotropic else None
    h = TWO_PI / samples

    candidates = []
    for i in range(samples):
        prev_i = (i - 1) % samples
        next_i = (i + 1) % samples
        if not (mag[i] <= mag[prev_i] and mag[i] < mag[next_i]):
            continue
        lo = ks[i] - h
        hi = ks[i] + h
        if isotropic and sgn[prev_i] != 0 and sgn[next_i] != 0 and sgn[prev_i] != sgn[next_i]:
            k0 = _bisect_sign_change(model, lo, hi, root_tol)
        else:
            k0 = _refine_minimum(model, lo, hi, root_tol)
        if abs(dispersion(model, k0 % TWO_PI)) < _ZERO_REL * scale:
            candidates.append(_polish_zero(model, k0 % TWO_PI))

    zeros: list[float] = []
    for k0 in sorted(candidates):
        if zeros and min(abs(k0 - z) for z in zeros) < 1e-6:
            continue
        if zeros and abs((k0 - TWO_PI) - zeros[0]) < 1e-6:
            continue
        zeros.append(k0)

    jumps: list[Jump] = []
    marginal: list[float] = []
    for k0 in zeros:
        left, right = _one_sided_limits(model, k0)
        if abs(left - right) > _JUMP_TOL:
            jumps.append(Jump(k0, left, right, _principal_exponent(left, right)))
        else:
            marginal.append(k0)

    return SymbolProfile(
        model=model,
        jumps=tuple(jumps),
        critical=bool(jumps),
        fermi_points=tuple(j.k for j in jumps),
        marginal_points=tuple(marginal),
    )
