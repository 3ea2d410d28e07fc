"""Real-argument Airy functions Ai, Bi and their derivatives.

Four evaluation regimes, stitched at documented crossovers:

* |x| <= 4.25          Maclaurin series (entire-function expansions around 0).
* 4.25 < x < 8.0       Taylor re-expansion around precomputed knots, spaced
                       0.25 apart.  The knot values for Ai are generated once
                       by marching *down* from x = 8 (the numerically stable
                       direction for the decaying solution) and for Bi by
                       marching *up* from x = 4.25.
* -7.5 < x < -4.25     Same knot scheme marching down from -4.25; in the
                       oscillatory region both solutions are bounded so the
                       marching is neutrally stable.
* x >= 8.0             Poincare asymptotic expansions, truncated at the
                       smallest term.
* x <= -7.5            Trigonometric (oscillatory) asymptotic expansions.

Component-wise accuracy is ~1e-12 relative on the monotone side and ~1e-12
relative to the envelope sqrt(Ai^2 + Bi^2) on the oscillatory side (plain
relative error is unbounded at the isolated zeros of Ai and Bi).

The unscaled path overflows at X_MAX = 104.0 where Bi(x) approaches the
float64 ceiling; beyond it use :func:`airy_scaled`, which removes the factor
exp(zeta), zeta = (2/3) x**(3/2), from the growing pair (Bi, Bi') and the
factor exp(-zeta) from the decaying pair (Ai, Ai') for x > 0:

    ai = ai_scaled * exp(-zeta),   bi = bi_scaled * exp(+zeta)

(derivatives carry the same factors; for x <= 0 the scaled and unscaled
values coincide).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["AiryValues", "airy", "airy_scaled", "X_MAX", "SERIES_RADIUS"]

# Crossovers (see module docstring).
SERIES_RADIUS = 4.25
_KNOT_STEP = 0.25
_POS_ASYM = 8.0
_NEG_ASYM = -7.5
X_MAX = 104.0

_AI0 = 0.35502805388781723926      # Ai(0)  = 3**(-2/3) / Gamma(2/3)
_AIP0 = -0.25881940379280679840    # Ai'(0) = -3**(-1/3) / Gamma(1/3)
_SQRT3 = math.sqrt(3.0)
_SQRT_PI = math.sqrt(math.pi)

_TAYLOR_ORDER = 24


@dataclass(frozen=True)
class AiryValues:
    """Ai, Bi and derivatives at a common argument (scalars or arrays)."""

    ai: np.ndarray | float
    bi: np.ndarray | float
    ai_prime: np.ndarray | float
    bi_prime: np.ndarray | float

    def wronskian(self):
        """Ai*Bi' - Ai'*Bi; identically 1/pi for exact values."""
        return self.ai * self.bi_prime - self.ai_prime * self.bi


# ----------------------------------------------------------------------------
# Maclaurin series
# ----------------------------------------------------------------------------

def _maclaurin(x: np.ndarray):
    """Series sums f, g, f', g' with Kahan-compensated accumulation."""
    x = np.asarray(x, dtype=float)
    x3 = x**3

    def kadd(s, c, term):
        y = term - c
        t = s + y
        c = (t - s) - y
        return t, c

    f = np.ones_like(x)
    g = x.copy()
    fp = 0.5 * x * x
    gp = np.ones_like(x)
    cf = np.zeros_like(x)
    cg = np.zeros_like(x)
    cfp = np.zeros_like(x)
    cgp = np.zeros_like(x)
    tf = np.ones_like(x)
    tg = x.copy()
    tfp = fp.copy()
    tgp = np.ones_like(x)
    for k in range(1, 70):
        tf = tf * x3 / ((3 * k) * (3 * k - 1))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        tgp = tgp * x3 / ((3 * k) * (3 * k - 2))
        f, cf = kadd(f, cf, tf)
        g, cg = kadd(g, cg, tg)
        gp, cgp = kadd(gp, cgp, tgp)
        if k >= 2:
            tfp = tfp * x3 / ((3 * k - 1) * (3 * k - 3))
            fp, cfp = kadd(fp, cfp, tfp)
        if max(np.max(np.abs(tf)), np.max(np.abs(tg))) < 1e-20 * max(
            1.0, np.max(np.abs(f))
        ):
            break
    c1, c2 = _AI0, -_AIP0
    ai = c1 * f - c2 * g
    bi = _SQRT3 * (c1 * f + c2 * g)
    aip = c1 * fp - c2 * gp
    bip = _SQRT3 * (c1 * fp + c2 * gp)
    return ai, bi, aip, bip


# ----------------------------------------------------------------------------
# Asymptotic expansions
# ----------------------------------------------------------------------------

def _uv_coeffs(n: int):
    u = np.empty(n)
    v = np.empty(n)
    u[0] = v[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 1) / (72.0 * k)
        v[k] = u[k] * (6 * k + 1) / (1.0 - 6 * k)
    return u, v


_U, _V = _uv_coeffs(48)


def _asym_series(inv_zeta: np.ndarray, coeffs: np.ndarray, alternating: bool):
    """Sum coeffs[k] * inv_zeta**k, truncating each point at its smallest term."""
    total = np.ones_like(inv_zeta)
    power = np.ones_like(inv_zeta)
    best = np.ones_like(inv_zeta)
    live = np.ones_like(inv_zeta, dtype=bool)
    sign = 1.0
    for k in range(1, len(coeffs)):
        power = power * inv_zeta
        sign = -sign if alternating else 1.0
        term = coeffs[k] * power
        mag = np.abs(term)
        live &= mag < best
        np.minimum(best, mag, out=best, where=live)
        total = np.where(live, total + sign * term, total)
        if not live.any() or np.max(mag[live], initial=0.0) < 1e-18:
            break
    return total


def _asym_positive(x: np.ndarray, scaled: bool):
    zeta = (2.0 / 3.0) * x**1.5
    iz = 1.0 / zeta
    s_ai = _asym_series(iz, _U, alternating=True)
    s_aip = _asym_series(iz, _V, alternating=True)
    s_bi = _asym_series(iz, _U, alternating=False)
    s_bip = _asym_series(iz, _V, alternating=False)
    q = x**0.25
    e_minus = np.ones_like(x) if scaled else np.exp(-zeta)
    e_plus = np.ones_like(x) if scaled else np.exp(zeta)
    ai = e_minus * s_ai / (2.0 * _SQRT_PI * q)
    aip = -e_minus * q * s_aip / (2.0 * _SQRT_PI)
    bi = e_plus * s_bi / (_SQRT_PI * q)
    bip = e_plus * q * s_bip / _SQRT_PI
    return ai, bi, aip, bip


def _asym_negative(x: np.ndarray):
    t = -x
    zeta = (2.0 / 3.0) * t**1.5
    iz2 = 1.0 / zeta**2
    u_even = _asym_series(iz2, _U[0::2], alternating=True)
    u_odd = _asym_series(iz2, _U[1::2] / _U[1], alternating=True) * (_U[1] / zeta)
    v_even = _asym_series(iz2, _V[0::2], alternating=True)
    v_odd = _asym_series(iz2, _V[1::2] / _V[1], alternating=True) * (_V[1] / zeta)
    theta = zeta - 0.25 * math.pi
    c, s = np.cos(theta), np.sin(theta)
    q = t**0.25
    ai = (c * u_even + s * u_odd) / (_SQRT_PI * q)
    bi = (-s * u_even + c * u_odd) / (_SQRT_PI * q)
    aip = q * (s * v_even - c * v_odd) / _SQRT_PI
    bip = q * (c * v_even + s * v_odd) / _SQRT_PI
    return ai, bi, aip, bip


# ----------------------------------------------------------------------------
# Knot tables for the gap regions
# ----------------------------------------------------------------------------

def _taylor_coeffs(center: float, y: float, yp: float, order: int = _TAYLOR_ORDER):
    # y'' = x*y around x = center: a[k+2] = (center*a[k] + a[k-1]) / ((k+1)(k+2))
    a = np.zeros(order + 1)
    a[0], a[1] = y, yp
    for k in range(order - 1):
        prev = a[k - 1] if k >= 1 else 0.0
        a[k + 2] = (center * a[k] + prev) / ((k + 1) * (k + 2))
    return a

def _taylor_eval(a: np.ndarray, h):
    y = np.zeros_like(h) if isinstance(h, np.ndarray) else 0.0
    yp = np.zeros_like(h) if isinstance(h, np.ndarray) else 0.0
    for k in range(len(a) - 1, -1, -1):
        y = y * h + a[k]
    for k in range(len(a) - 1, 0, -1):
        yp = yp * h + k * a[k]
    return y, yp


class _KnotTable:
    """Taylor coefficients of an Airy solution at evenly spaced knots."""

    def __init__(self, start: float, stop: float, y: float, yp: float):
        step = _KNOT_STEP if stop > start else -_KNOT_STEP
        n = round((stop - start) / step) + 1
        self.knots = start + step * np.arange(n)
        self.coeffs = np.empty((n, _TAYLOR_ORDER + 1))
        for i, c in enumerate(self.knots):
            self.coeffs[i] = _taylor_coeffs(c, y, yp)
            if i + 1 < n:
                y, yp = _taylor_eval(self.coeffs[i], step)

    def eval(self, x: np.ndarray):
        idx = np.clip(
            np.rint((x - self.knots[0]) / (self.knots[1] - self.knots[0])).astype(int),
            0,
            len(self.knots) - 1,
        )
        h = x - self.knots[idx]
        a = self.coeffs[idx]  # (npts, order+1)
        y = np.zeros_like(x)
        yp = np.zeros_like(x)
        for k in range(a.shape[1] - 1, -1, -1):
            y = y * h + a[:, k]
        for k in range(a.shape[1] - 1, 0, -1):
            yp = yp * h + k * a[:, k]
        return y, yp


_tables: dict[str, _KnotTable] = {}


def _get_tables():
    if not _tables:
        x0 = np.asarray([_POS_ASYM])
        ai8, _, aip8, _ = _asym_positive(x0, scaled=False)
        _tables["ai_pos"] = _KnotTable(_POS_ASYM, SERIES_RADIUS, float(ai8[0]), float(aip8[0]))
        ser = _maclaurin(np.asarray([SERIES_RADIUS]))
        _tables["bi_pos"] = _KnotTable(SERIES_RADIUS, _POS_ASYM, float(ser[1][0]), float(ser[3][0]))
        neg = _maclaurin(np.asarray([-SERIES_RADIUS]))
        _tables["ai_neg"] = _KnotTable(-SERIES_RADIUS, _NEG_ASYM, float(neg[0][0]), float(neg[2][0]))
        _tables["bi_neg"] = _KnotTable(-SERIES_RADIUS, _NEG_ASYM, float(neg[1][0]), float(neg[3][0]))
    return _tables


# ----------------------------------------------------------------------------
# Public entry points
# ----------------------------------------------------------------------------

def _evaluate(x: np.ndarray, scaled: bool):
    ai = np.empty_like(x)
    bi = np.empty_like(x)
    aip = np.empty_like(x)
    bip = np.empty_like(x)

    m_ser = np.abs(x) <= SERIES_RADIUS
    m_pos_gap = (x > SERIES_RADIUS) & (x < _POS_ASYM)
    m_pos_asym = x >= _POS_ASYM
    m_neg_gap = (x < -SERIES_RADIUS) & (x > _NEG_ASYM)
    m_neg_asym = x <= _NEG_ASYM

    if m_ser.any():
        a, b, ap, bp = _maclaurin(x[m_ser])
        ai[m_ser], bi[m_ser], aip[m_ser], bip[m_ser] = a, b, ap, bp
    if m_pos_gap.any():
        tabs = _get_tables()
        xa = x[m_pos_gap]
        ai[m_pos_gap], aip[m_pos_gap] = tabs["ai_pos"].eval(xa)
        bi[m_pos_gap], bip[m_pos_gap] = tabs["bi_pos"].eval(xa)
    if m_pos_asym.any():
        a, b, ap, bp = _asym_positive(x[m_pos_asym], scaled=scaled)
        ai[m_pos_asym], bi[m_pos_asym] = a, b
        aip[m_pos_asym], bip[m_pos_asym] = ap, bp
    if m_neg_gap.any():
        tabs = _get_tables()
        xa = x[m_neg_gap]
        ai[m_neg_gap], aip[m_neg_gap] = tabs["ai_neg"].eval(xa)
        bi[m_neg_gap], bip[m_neg_gap] = tabs["bi_neg"].eval(xa)
    if m_neg_asym.any():
        a, b, ap, bp = _asym_negative(x[m_neg_asym])
        ai[m_neg_asym], bi[m_neg_asym] = a, b
        aip[m_neg_asym], bip[m_neg_asym] = ap, bp

    if scaled:
        # below the asymptotic switch the factors are applied explicitly
        m_lo = (x > 0) & (x < _POS_ASYM)
        if m_lo.any():
            zeta = (2.0 / 3.0) * x[m_lo] ** 1.5
            ai[m_lo] *= np.exp(zeta)
            aip[m_lo] *= np.exp(zeta)
            bi[m_lo] *= np.exp(-zeta)
            bip[m_lo] *= np.exp(-zeta)
    return ai, bi, aip, bip


def _call(x, scaled: bool) -> AiryValues:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise DomainError("airy: argument must be finite")
    if not scaled and np.any(arr > X_MAX):
        raise OverflowError(
            f"airy: Bi overflows float64 for x > {X_MAX}; use airy_scaled"
        )
    ai, bi, aip, bip = _evaluate(arr, scaled)
    if scalar:
        return AiryValues(float(ai[0]), float(bi[0]), float(aip[0]), float(bip[0]))
    return AiryValues(ai, bi, aip, bip)


def airy(x) -> AiryValues:
    """Ai(x), Bi(x), Ai'(x), Bi'(x) for real x (scalar or array).

    Raises OverflowError for x > X_MAX where Bi exceeds the float64 range;
    use :func:`airy_scaled` there.
    """
    return _call(x, scaled=False)


def airy_scaled(x) -> AiryValues:
    """Exponentially scaled Airy values, finite for every representable x.

    For x > 0 returns (Ai*e^zeta, Bi*e^-zeta, Ai'*e^zeta, Bi'*e^-zeta) with
    zeta = (2/3) x**(3/2); for x <= 0 returns the plain values.
    """
    return _call(x, scaled=True)
