"""Auxiliary Airy-product families Q_k(rho, zeta; eps) and Qi_k(eps).

Q_k generalizes the uniform-field Green function to arbitrary odd spatial
dimension 2k+1 and carries all position dependence of the multipole Green
functions.  Its on-source imaginary part Qi_k carries the total currents.

Evaluation strategy:

* Q_0 = Ai(a-) Ci(a+) with a+- = eps - zeta -+ rho and Ci = Bi + i Ai.
* Negative orders Q_{-n} are n-fold zeta-derivatives of Q_0; these are built
  symbolically once per order (derivatives of Ai/Ci reduced through the Airy
  ODE) and cached as fast numeric callables.
* Positive orders follow from the five-point recursion
      rho^2 Q_{k+2} = (k + 1/2) Q_{k+1} - (zeta - eps) Q_k - 1/4 Q_{k-2},
  seeded by Q_{-3} ... Q_0.
* Everything is carried with a common exponential scale exp(s(a+) - s(a-)),
  s(x) = (2/3) x^(3/2) for x > 0, so products with exponentially large source
  strengths can be combined in log space without overflow.
* Qi_k follows the three-term recursion
      (k + 1/2) Qi_{k+1} + eps Qi_k - 1/4 Qi_{k-2} = 0
  from the seeds Qi_0 = Ai^2, Qi_{-1} = -2 Ai Ai', Qi_{-2} = 2 Ai'^2
  + 2 eps Ai^2.  For eps > 0 the recursion cancels catastrophically (the
  result is exponentially smaller than the terms), so the same recursion is
  re-run in adaptive-precision arithmetic whenever the estimated digit loss
  matters.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np
import sympy as sp

from .errors import (
    DomainError,
    RegimeError,
    SingularityError,
    StabilityWarning,
    UnsupportedOrderError,
)
from .specfun import airy_scaled, airy_scaled_grid

#: Supported index windows.
Q_NEG_MAX = 12      # Q_{-k} symbolic derivatives
Q_K_MAX = 42        # positive-index forward recursion depth
QI_K_MIN, QI_K_MAX = -24, 60

#: Below this radius the forward recursion for k >= 2 divides by rho^2 and
#: sheds digits; the divergence itself is the physical source singularity.
RHO_MIN = 1e-3


@dataclass(frozen=True)
class QArgs:
    """Dimensionless arguments: rho = beta*F*r, zeta = beta*F*z, eps = -2*beta*E."""

    rho: float
    zeta: float
    eps: float

    def __post_init__(self) -> None:
        if self.rho < 0.0:
            raise DomainError(f"rho >= 0 required, got {self.rho}")

    @property
    def alpha_minus(self) -> float:
        return self.eps - self.zeta + self.rho

    @property
    def alpha_plus(self) -> float:
        return self.eps - self.zeta - self.rho


# --------------------------------------------------------------------------
# Symbolic zeta-derivatives of Q_0 = A0(a-) C0(a+).
#
# Q_{-n} is stored as a dict {(i, j): P_ij(x, y)} meaning
#     sum_ij P_ij(a-, a+) * A_i(a-) * C_j(a+),
# where A_0 = Ai, A_1 = Ai', C_0 = Ci, C_1 = Ci', x = a-, y = a+.
# d/dzeta acts as -(d/dx + d/dy) on both arguments, and the Airy ODE closes
# the basis: A_0' = A_1, A_1' = x A_0 (same for C with y).
# --------------------------------------------------------------------------

_X, _Y = sp.symbols("x y")


@lru_cache(maxsize=None)
def _zeta_polys(n: int) -> tuple[tuple[int, int, sp.Expr], ...]:
    if n == 0:
        return ((0, 0, sp.Integer(1)),)
    acc: dict[tuple[int, int], sp.Expr] = defaultdict(lambda: sp.Integer(0))
    for i, j, poly in _zeta_polys(n - 1):
        acc[(i, j)] += -(sp.diff(poly, _X) + sp.diff(poly, _Y))
        if i == 0:
            acc[(1, j)] += -poly
        else:
            acc[(0, j)] += -_X * poly
        if j == 0:
            acc[(i, 1)] += -poly
        else:
            acc[(i, 0)] += -_Y * poly
    return tuple(
        (i, j, sp.expand(p)) for (i, j), p in sorted(acc.items()) if p != 0
    )


@lru_cache(maxsize=None)
def _zeta_funcs(n: int):
    return tuple(
        (i, j, sp.lambdify((_X, _Y), poly, modules="math"))
        for i, j, poly in _zeta_polys(n)
    )


def _airy_pair(a: QArgs):
    return airy_scaled(a.alpha_minus), airy_scaled(a.alpha_plus)


def _q_neg_scaled(n: int, a: QArgs, am=None, ap=None) -> tuple[complex, float]:
    """(mantissa, logscale) for Q_{-n}; value = mantissa * exp(logscale)."""
    if n < 0 or n > Q_NEG_MAX:
        raise UnsupportedOrderError(f"need 0 <= n <= {Q_NEG_MAX}, got {n}")
    if am is None or ap is None:
        am, ap = _airy_pair(a)
    x, y = a.alpha_minus, a.alpha_plus
    damp = math.exp(-2.0 * ap.s)  # Ai(a+) relative to Bi(a+)
    amod = (am.ai_m, am.aip_m)
    cmod = (
        complex(ap.bi_m, ap.ai_m * damp),
        complex(ap.bip_m, ap.aip_m * damp),
    )
    total = 0.0 + 0.0j
    for i, j, f in _zeta_funcs(n):
        total += f(x, y) * amod[i] * cmod[j]
    return total, ap.s - am.s


def q0(a: QArgs) -> complex:
    """Q_0 = Ai(eps - zeta + rho) * Ci(eps - zeta - rho)."""
    m, s = _q_neg_scaled(0, a)
    return m * math.exp(s)


def q_neg(k: int, a: QArgs) -> complex:
    """Q_{-k}, the k-fold zeta-derivative of Q_0 (k >= 0)."""
    m, s = _q_neg_scaled(k, a)
    return m * math.exp(s)


def _q_table_scaled(kmax: int, a: QArgs) -> tuple[dict[int, complex], float]:
    """Mantissas of Q_{-3} ... Q_{kmax} sharing one logscale."""
    am, ap = _airy_pair(a)
    table: dict[int, complex] = {}
    logscale = ap.s - am.s
    for n in range(0, 4):
        table[-n], _ = _q_neg_scaled(n, a, am, ap)
    if kmax >= 1:
        if a.rho == 0.0:
            raise SingularityError("Q_k diverges at rho = 0 for k >= 1")
        if a.rho < RHO_MIN and kmax >= 2:
            warnings.warn(
                f"forward Q recursion at rho={a.rho:g} < {RHO_MIN:g} loses digits",
                StabilityWarning,
                stacklevel=3,
            )
        r2 = a.rho * a.rho
        w = a.zeta - a.eps
        for k in range(-1, kmax - 1):
            # rho^2 Q_{k+2} = (k + 1/2) Q_{k+1} - (zeta - eps) Q_k - 1/4 Q_{k-2}
            table[k + 2] = (
                (k + 0.5) * table[k + 1] - w * table[k] - 0.25 * table[k - 2]
            ) / r2
    return table, logscale


def q_scaled(k: int, a: QArgs) -> tuple[complex, float]:
    """(mantissa, logscale) with Q_k = mantissa * exp(logscale)."""
    if k < -Q_NEG_MAX or k > Q_K_MAX:
        raise UnsupportedOrderError(f"need {-Q_NEG_MAX} <= k <= {Q_K_MAX}, got {k}")
    if k <= 0:
        return _q_neg_scaled(-k, a)
    table, logscale = _q_table_scaled(k, a)
    return table[k], logscale


def q(k: int, a: QArgs) -> complex:
    """Q_k(rho, zeta; eps) for -12 <= k <= 42."""
    m, s = q_scaled(k, a)
    return m * math.exp(s)


def q_grad(k: int, a: QArgs) -> tuple[complex, complex]:
    """(dQ_k/drho, dQ_k/dzeta) = (-2 rho Q_{k+1}, Q_{k-1})."""
    if k + 1 > Q_K_MAX:
        raise UnsupportedOrderError(f"gradient needs order {k + 1} > {Q_K_MAX}")
    if k + 1 <= 0:
        d_rho = -2.0 * a.rho * q_neg(-(k + 1), a)
        d_zeta = q_neg(-(k - 1), a)
        return d_rho, d_zeta
    table, logscale = _q_table_scaled(k + 1, a)
    scale = math.exp(logscale)
    return -2.0 * a.rho * table[k + 1] * scale, table[k - 1] * scale


def q_grad_scaled(k: int, a: QArgs) -> tuple[complex, complex, float]:
    """Scaled gradient: (d_rho mantissa, d_zeta mantissa, shared logscale)."""
    if k + 1 > Q_K_MAX:
        raise UnsupportedOrderError(f"gradient needs order {k + 1} > {Q_K_MAX}")
    kmax = max(k + 1, 1) if k + 1 >= 1 else 0
    if k + 1 <= 0:
        m1, s1 = _q_neg_scaled(-(k + 1), a)
        m2, s2 = _q_neg_scaled(-(k - 1), a)
        # both share the same logscale by construction
        return -2.0 * a.rho * m1, m2, s1
    table, logscale = _q_table_scaled(k + 1, a)
    return -2.0 * a.rho * table[k + 1], table[k - 1], logscale


@lru_cache(maxsize=None)
def _zeta_funcs_np(n: int):
    return tuple(
        (i, j, sp.lambdify((_X, _Y), poly, modules="numpy"))
        for i, j, poly in _zeta_polys(n)
    )


def q_table_scaled_grid(kmax: int, rho, zeta, eps: float):
    """Vectorized mantissa table of Q_{-3}..Q_{kmax} on array arguments.

    Returns (table, logscale) where table[k] and logscale are arrays
    broadcast from rho and zeta, with Q_k = table[k] * exp(logscale)
    elementwise.  Entries with rho = 0 are nan for k >= 1.
    """
    if kmax > Q_K_MAX:
        raise UnsupportedOrderError(f"need kmax <= {Q_K_MAX}, got {kmax}")
    rho = np.asarray(rho, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    rho, zeta = np.broadcast_arrays(rho, zeta)
    x = eps - zeta + rho  # alpha_minus
    y = eps - zeta - rho  # alpha_plus
    ai_m, aip_m, _, _, s_m = airy_scaled_grid(x)
    ai_p, aip_p, bi_p, bip_p, s_p = airy_scaled_grid(y)
    damp = np.exp(-2.0 * s_p)
    amod = (ai_m, aip_m)
    cmod = (bi_p + 1j * ai_p * damp, bip_p + 1j * aip_p * damp)
    table: dict[int, np.ndarray] = {}
    for n in range(0, 4):
        tot = np.zeros(rho.shape, dtype=complex)
        for i, j, f in _zeta_funcs_np(n):
            tot += f(x, y) * amod[i] * cmod[j]
        table[-n] = tot
    logscale = s_p - s_m
    if kmax >= 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(rho > 0.0, rho * rho, np.nan)
            w = zeta - eps
            for k in range(-1, kmax - 1):
                table[k + 2] = (
                    (k + 0.5) * table[k + 1] - w * table[k] - 0.25 * table[k - 2]
                ) / r2
    return table, logscale


def _double_factorial(n: int) -> float:
    # Convention: (-1)!! = 0!! = 1.
    if n <= 0:
        return 1.0
    out = 1.0
    while n > 0:
        out *= n
        n -= 2
    return out


def q_asym_origin(k: int, rho: float) -> float:
    """Leading divergence Re Q_k ~ (2k-3)!! / (2^k pi rho^(2k-1)) as rho -> 0."""
    if k < 1:
        raise DomainError(f"k >= 1 required, got {k}")
    if rho <= 0.0:
        raise DomainError(f"rho > 0 required, got {rho}")
    return _double_factorial(2 * k - 3) / (2**k * math.pi * rho ** (2 * k - 1))


# --------------------------------------------------------------------------
# Qi_k(eps): the on-source imaginary parts.
# --------------------------------------------------------------------------

_E = sp.symbols("e")


@lru_cache(maxsize=None)
def _qi_neg_polys(n: int) -> tuple[sp.Expr, sp.Expr, sp.Expr]:
    """Qi_{-n} = a(eps) Ai^2 + b(eps) Ai Ai' + c(eps) Ai'^2 (exact polys)."""
    if n == 0:
        return (sp.Integer(1), sp.Integer(0), sp.Integer(0))
    a_, b_, c_ = _qi_neg_polys(n - 1)
    # -d/deps on a Ai^2 + b Ai Ai' + c Ai'^2, with Ai'' = eps Ai:
    na = -(sp.diff(a_, _E) + b_ * _E)
    nb = -(sp.diff(b_, _E) + 2 * a_ + 2 * c_ * _E)
    nc = -(sp.diff(c_, _E) + b_)
    return (sp.expand(na), sp.expand(nb), sp.expand(nc))


@lru_cache(maxsize=None)
def _qi_neg_funcs(n: int):
    return tuple(sp.lambdify(_E, p, modules="math") for p in _qi_neg_polys(n))


def _qi_loss_digits(k: int, eps: float) -> float:
    """Rough decimal digits lost by the upward recursion to order k."""
    if eps <= 0.0 or k <= 0:
        return 0.0
    per = 2.0 * eps**1.5
    if per == 0.0:  # subnormal eps underflows
        return 0.0
    return sum(max(0.0, math.log10(per / (j + 0.5))) for j in range(k))


@lru_cache(maxsize=100000)
def _qi_scaled_mp(k: int, eps: float) -> tuple[float, float]:
    """Adaptive-precision upward recursion; returns (mantissa, logscale)."""
    dps = 25 + int(_qi_loss_digits(k, eps))
    with mp.workdps(dps):
        e = mp.mpf(eps)
        ai = mp.airyai(e)
        aip = mp.airyai(e, 1)
        t = {0: ai**2, -1: -2 * ai * aip, -2: 2 * aip**2 + 2 * e * ai**2}
        for j in range(0, k):
            t[j + 1] = (t[j - 2] / 4 - e * t[j]) / (j + mp.mpf("0.5"))
        val = t[k]
        if val == 0:
            return 0.0, 0.0
        logscale = -2.0 * max(eps, 0.0) ** 1.5 * (2.0 / 3.0)
        mant = val * mp.exp(-mp.mpf(logscale))
        return float(mant), logscale


def qi_scaled(k: int, eps: float) -> tuple[float, float]:
    """(mantissa, logscale) with Qi_k = mantissa * exp(logscale)."""
    if k < QI_K_MIN or k > QI_K_MAX:
        raise UnsupportedOrderError(f"need {QI_K_MIN} <= k <= {QI_K_MAX}, got {k}")
    v = airy_scaled(eps)
    logscale = -2.0 * v.s
    if k <= 0:
        fa, fb, fc = _qi_neg_funcs(-k)
        mant = (
            fa(eps) * v.ai_m * v.ai_m
            + fb(eps) * v.ai_m * v.aip_m
            + fc(eps) * v.aip_m * v.aip_m
        )
        return mant, logscale
    if _qi_loss_digits(k, eps) > 2.0:
        return _qi_scaled_mp(k, float(eps))
    t = {
        0: v.ai_m * v.ai_m,
        -1: -2.0 * v.ai_m * v.aip_m,
        -2: 2.0 * v.aip_m * v.aip_m + 2.0 * eps * v.ai_m * v.ai_m,
    }
    for j in range(0, k):
        t[j + 1] = (0.25 * t[j - 2] - eps * t[j]) / (j + 0.5)
    return t[k], logscale


def qi(k: int, eps: float) -> float:
    """Qi_k(eps) = lim_{rho,zeta -> 0} Im Q_k, for -12 <= k <= 60."""
    m, s = qi_scaled(k, eps)
    return m * math.exp(s)


_SQRT_PI = math.sqrt(math.pi)
_C = 2.0 ** (2.0 / 3.0)

#: Supported half-integer window (as twice the index: -5/2 ... 21/2).
QI_HALF_MIN2, QI_HALF_MAX2 = -5, 21


def qi_half(index: float, eps: float) -> float:
    """Qi at half-integer index in {-5/2, -3/2, ..., 21/2}.

    Qi_{1/2} = (1/(2 sqrt(pi))) [1/3 - Ai_1(2^(2/3) eps)]; lower indices by
    repeated -d/deps (closing on derivatives of Ai), higher indices by the
    three-term recursion.
    """
    two = 2.0 * index
    if abs(two - round(two)) > 1e-12 or round(two) % 2 == 0:
        raise DomainError(f"index must be half-integer, got {index}")
    two = int(round(two))
    if two < QI_HALF_MIN2 or two > QI_HALF_MAX2:
        raise UnsupportedOrderError(
            f"half-integer index must lie in [{QI_HALF_MIN2}/2, {QI_HALF_MAX2}/2]"
        )
    from .specfun import airy_derivs_upto, airy_integral

    u = _C * eps
    if two <= 1:
        n = (1 - two) // 2  # Qi_{1/2 - n}
        if n == 0:
            return (1.0 / 3.0 - airy_integral(u)) / (2.0 * _SQRT_PI)
        return (-1.0) ** (n - 1) * _C**n * airy_derivs_upto(n - 1, u)[n - 1] / (
            2.0 * _SQRT_PI
        )
    # Upward from the four seeds Qi_{-5/2} ... Qi_{1/2}.
    t = {two0: qi_half(two0 / 2.0, eps) for two0 in (-5, -3, -1, 1)}
    j2 = 1  # current top index, times two
    while j2 < two:
        kk = j2 / 2.0  # recursion instance (k + 1/2) Qi_{k+1} = 1/4 Qi_{k-2} - eps Qi_k
        t[j2 + 2] = (0.25 * t[j2 - 4] - eps * t[j2]) / (kk + 0.5)
        j2 += 2
    return t[two]


def qi_asym(k: int, eps: float, regime: str) -> float:
    """Leading large-|eps| forms of Qi_k.

    tunneling (eps -> +inf):
        (1/2pi) (2 sqrt(eps))^-(k+1) e^{-(4/3) eps^(3/2)}
            [1 - (3k^2 + 9k + 5)/(24 eps^(3/2))]
    classical (eps -> -inf): smooth (secular) term
        |eps|^(k-1/2) / (2 sqrt(pi) Gamma(k+1/2))
    plus the oscillation
        (1/2pi) (2 sqrt(|eps|))^-(k+1) sin((4/3)|eps|^(3/2) - k pi/2).
    """
    if regime == "tunneling":
        if eps <= 0.0:
            raise RegimeError("tunneling regime requires eps > 0")
        e32 = eps**1.5
        return (
            (1.0 / (2.0 * math.pi))
            * (2.0 * math.sqrt(eps)) ** (-(k + 1))
            * math.exp(-(4.0 / 3.0) * e32)
            * (1.0 - (3.0 * k * k + 9.0 * k + 5.0) / (24.0 * e32))
        )
    if regime == "classical":
        if eps >= 0.0:
            raise RegimeError("classical regime requires eps < 0")
        ae = abs(eps)
        secular = ae ** (k - 0.5) / (2.0 * _SQRT_PI * math.gamma(k + 0.5))
        osc = (
            (1.0 / (2.0 * math.pi))
            * (2.0 * math.sqrt(ae)) ** (-(k + 1))
            * math.sin((4.0 / 3.0) * ae**1.5 - k * math.pi / 2.0)
        )
        return secular + osc
    raise DomainError(f"regime must be 'tunneling' or 'classical', got {regime!r}")
