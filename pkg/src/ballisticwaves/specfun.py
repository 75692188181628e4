"""Real-argument Airy functions and supporting classical special functions.

All higher-level machinery (auxiliary Q/Qi families, Green functions, beam
profiles) reduces to the four Airy values Ai, Bi, Ai', Bi' and a handful of
companions: the Airy Hankel combination Ci = Bi + i*Ai, higher derivatives of
Ai, the primitive of Ai, negative Airy zeros, and |P_l^m|^2 continued past
|x| = 1.

Evaluation is delegated to scipy.special behind the documented contracts;
scaled variants (with the exponential factor exp((2/3) x^(3/2)) split off)
are provided so that products like Ci(a+) Ai(a-) can be assembled without
intermediate under- or overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as sc

from .errors import DomainError, UnsupportedOrderError

#: Largest |x| accepted by the evaluation routines.  Beyond this window the
#: unscaled values are far outside double range and callers must use the
#: scaled variants explicitly.
X_MAX = 200.0

#: Maximum derivative order handled by airy_deriv_n.
DERIV_MAX = 40


@dataclass(frozen=True)
class AiryValues:
    """The four Airy values at a common real argument."""

    ai: float
    aip: float
    bi: float
    bip: float


@dataclass(frozen=True)
class ScaledAiryValues:
    """Airy values with the dominant exponential factor split off.

    For x > 0 the true values are  ai = ai_m * exp(-s),  aip = aip_m * exp(-s),
    bi = bi_m * exp(s),  bip = bip_m * exp(s)  with  s = (2/3) x^(3/2).
    For x <= 0 the values are unscaled and s = 0.
    """

    ai_m: float
    aip_m: float
    bi_m: float
    bip_m: float
    s: float


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Airy argument must be finite, got {x!r}")
    return x


#: Below this argument the oscillatory asymptotic series replaces the scipy
#: kernel, which returns nan for very large negative x.
_X_NEG_SWITCH = -5.0e5


def _airy_large_neg(x: float) -> AiryValues:
    # Oscillatory asymptotic expansion for x << -1 (two correction terms;
    # truncation error is far below the phase rounding at these arguments).
    t = -x
    xi = (2.0 / 3.0) * t**1.5
    u1 = 5.0 / 72.0
    u2 = 385.0 / 10368.0
    v1 = -7.0 / 72.0
    v2 = 455.0 / 10368.0
    ce = 1.0 - u2 / xi**2  # even u-sum
    co = u1 / xi  # odd u-sum
    de = 1.0 - v2 / xi**2
    do = v1 / xi
    ph = xi - 0.25 * math.pi
    s, c = math.sin(ph), math.cos(ph)
    pref = 1.0 / (math.sqrt(math.pi) * t**0.25)
    prefd = t**0.25 / math.sqrt(math.pi)
    ai = pref * (c * ce + s * co)
    bi = pref * (-s * ce + c * co)
    aip = prefd * (s * de - c * do)
    bip = prefd * (c * de + s * do)
    return AiryValues(ai, aip, bi, bip)


def airy_scaled_grid(x: np.ndarray):
    """Vectorized scaled Airy values on an array argument.

    Returns (ai_m, aip_m, bi_m, bip_m, s) arrays with the same convention as
    ScaledAiryValues: for x > 0 the true values carry factors e^{-s} (Ai) and
    e^{s} (Bi) with s = (2/3) x^{3/2}; for x <= 0 they are unscaled (s = 0),
    with the oscillatory asymptotic series below the scipy support window.
    """
    x = np.asarray(x, dtype=float)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)
    s = np.zeros_like(x)
    pos = x > 0.0
    if pos.any():
        ai[pos], aip[pos], bi[pos], bip[pos] = sc.airye(x[pos])
        s[pos] = (2.0 / 3.0) * x[pos] ** 1.5
    mid = (~pos) & (x >= _X_NEG_SWITCH)
    if mid.any():
        ai[mid], aip[mid], bi[mid], bip[mid] = sc.airy(x[mid])
    far = x < _X_NEG_SWITCH
    if far.any():
        ai[far], aip[far], bi[far], bip[far] = _airy_large_neg_arrays(x[far])
    return ai, aip, bi, bip, s


def _airy_large_neg_arrays(x: np.ndarray):
    # Vectorized form of _airy_large_neg.
    t = -x
    xi = (2.0 / 3.0) * t**1.5
    u1, u2 = 5.0 / 72.0, 385.0 / 10368.0
    v1, v2 = -7.0 / 72.0, 455.0 / 10368.0
    ce = 1.0 - u2 / xi**2
    co = u1 / xi
    de = 1.0 - v2 / xi**2
    do = v1 / xi
    ph = xi - 0.25 * math.pi
    sn, cs = np.sin(ph), np.cos(ph)
    pref = 1.0 / (math.sqrt(math.pi) * t**0.25)
    prefd = t**0.25 / math.sqrt(math.pi)
    return (
        pref * (cs * ce + sn * co),
        prefd * (sn * de - cs * do),
        pref * (-sn * ce + cs * co),
        prefd * (cs * de + sn * do),
    )


def airy_unrestricted(x: float) -> AiryValues:
    """Ai, Ai', Bi, Bi' without the |x| <= 200 documentation window.

    Large positive x overflows Bi (returns inf) and underflows Ai; very large
    negative x falls back to the oscillatory asymptotic series.
    """
    x = _check_finite(x)
    if x < _X_NEG_SWITCH:
        return _airy_large_neg(x)
    ai, aip, bi, bip = sc.airy(x)
    return AiryValues(float(ai), float(aip), float(bi), float(bip))


def airy(x: float) -> AiryValues:
    """Evaluate Ai, Ai', Bi, Bi' at real x, |x| <= 200.

    For large positive x, Ai underflows to (signed) zero; use airy_scaled
    when the exponentially small part is needed.
    """
    x = _check_finite(x)
    if abs(x) > X_MAX:
        raise DomainError(f"|x| <= {X_MAX} required, got {x}")
    ai, aip, bi, bip = sc.airy(x)
    return AiryValues(float(ai), float(aip), float(bi), float(bip))


def airy_scaled(x: float) -> ScaledAiryValues:
    """Scaled Airy values; see ScaledAiryValues for the scaling convention."""
    x = _check_finite(x)
    if x <= 0.0:
        v = airy_unrestricted(x)
        return ScaledAiryValues(v.ai, v.aip, v.bi, v.bip, 0.0)
    s = (2.0 / 3.0) * x ** 1.5
    ai_m, aip_m, bi_m, bip_m = sc.airye(x)
    return ScaledAiryValues(float(ai_m), float(aip_m), float(bi_m), float(bip_m), s)


def airy_ci(x: float) -> tuple[complex, complex]:
    """The Airy Hankel function Ci = Bi + i*Ai and its derivative."""
    v = airy(x)
    return complex(v.bi, v.ai), complex(v.bip, v.aip)


def airy_deriv_n(n: int, x: float) -> float:
    """n-th derivative of Ai at x via the closed recurrence.

    Uses Ai'' = x Ai and its differentiated form
    Ai^(n+2) = x Ai^(n) + n Ai^(n-1), seeded by Ai and Ai'.
    """
    if n < 0 or n > DERIV_MAX:
        raise UnsupportedOrderError(f"derivative order must be in [0, {DERIV_MAX}], got {n}")
    return _airy_deriv_table(n, x)[n]


def _airy_deriv_table(n: int, x: float) -> list[float]:
    v = airy(x)
    d = [0.0] * (n + 1)
    d[0] = v.ai
    if n >= 1:
        d[1] = v.aip
    for k in range(2, n + 1):
        # Ai^(k) = x Ai^(k-2) + (k-2) Ai^(k-3)
        d[k] = x * d[k - 2] + ((k - 2) * d[k - 3] if k >= 3 else 0.0)
    return d


def airy_derivs_upto(n: int, x: float) -> np.ndarray:
    """Derivatives Ai^(0..n) at x as an array (shared table for operators)."""
    if n < 0 or n > DERIV_MAX:
        raise UnsupportedOrderError(f"derivative order must be in [0, {DERIV_MAX}], got {n}")
    return np.asarray(_airy_deriv_table(n, x))


def airy_integral(x: float) -> float:
    """Ai_1(x) = integral of Ai from 0 to x; tends to 1/3 as x -> +infinity."""
    x = _check_finite(x)
    if abs(x) > X_MAX:
        raise DomainError(f"|x| <= {X_MAX} required, got {x}")
    return float(sc.itairy(x)[0])


def assoc_legendre_abs2(l: int, m: int, x: float) -> float:
    """|P_l^m(x)|^2, extended to real x with |x| > 1.

    For |x| <= 1 this is the square of the ordinary real associated Legendre
    polynomial (Condon-Shortley convention).  For |x| > 1 the polynomial is
    complex and double-valued, but its squared modulus is single-valued:
    every factor (1 - x^2)^(|m|/2) contributes |1 - x^2|^(|m|) to the square.
    """
    m_abs = abs(int(m))
    l = int(l)
    if m_abs > l:
        raise DomainError(f"|m| <= l required, got l={l}, m={m}")
    if l > 20:
        raise UnsupportedOrderError(f"l <= 20 required, got l={l}")
    # Evaluate P_l^{|m|} by the standard recurrence with the complex square
    # root of (1 - x^2); the modulus of the result is what we need, and
    # P_l^{-m} differs from P_l^{m} by a real ratio of factorials.
    z = complex(x)
    sroot = np.sqrt(1.0 - z * z)  # principal branch; only |.| matters
    p_mm = complex(1.0)
    for k in range(1, m_abs + 1):
        p_mm *= -(2 * k - 1) * sroot
    if l == m_abs:
        p_lm = p_mm
    else:
        p_prev, p_cur = p_mm, z * (2 * m_abs + 1) * p_mm
        for ll in range(m_abs + 2, l + 1):
            p_prev, p_cur = p_cur, (
                (2 * ll - 1) * z * p_cur - (ll - 1 + m_abs) * p_prev
            ) / (ll - m_abs)
        p_lm = p_cur if l > m_abs else p_prev
    val = abs(p_lm) ** 2
    if m < 0:
        val *= (math.factorial(l - m_abs) / math.factorial(l + m_abs)) ** 2
    return float(val)


def airy_zero(n: int) -> float:
    """n-th negative zero of Ai (n = 1, 2, ...), n <= 100."""
    n = int(n)
    if n < 1 or n > 100:
        raise DomainError(f"zero index must be in [1, 100], got {n}")
    return float(sc.ai_zeros(n)[0][-1])


def airy_prime_zero(n: int) -> float:
    """n-th negative zero of Ai' (n = 1, 2, ...), n <= 100."""
    n = int(n)
    if n < 1 or n > 100:
        raise DomainError(f"zero index must be in [1, 100], got {n}")
    return float(sc.ai_zeros(n)[1][-1])
