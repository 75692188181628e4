"""Free-particle partial waves, Wigner currents and extended-source strengths.

The field-free problem serves as the reference limit of the accelerated one:
its Green function is an outgoing spherical wave, multipole waves reduce to
spherical Hankel partial waves, and the emission rate of an (l, m) source
follows Wigner's threshold law.  Extended sources map onto point multipoles
with strengths given by a radial Bessel transform of the source profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special as sc

from .errors import DomainError, SingularityError
from .harmonics import MultipoleIndex, klm_eval

__all__ = [
    "RadialSourceProfile",
    "green_free",
    "green_free_lm",
    "wigner_current",
    "extended_source_strength",
    "free_total_current",
]


@dataclass(frozen=True)
class RadialSourceProfile:
    """Radial coefficient function sigma_lm(R) of an extended source.

    samples holds (R, sigma_lm(R)) pairs on an increasing radial grid with
    compact support; the profile is taken to vanish beyond the last sample.
    """

    idx: MultipoleIndex
    samples: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        radii = [r for r, _ in self.samples]
        if len(radii) < 3:
            raise DomainError("need at least 3 radial samples")
        if radii[0] < 0.0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("radial grid must be increasing and nonnegative")


def _wavenumber(E: float, mass: float, hbar: float) -> float:
    return math.sqrt(2.0 * mass * E) / hbar


def green_free(r, r_src, E: float, mass: float, hbar: float = 1.054571817e-34) -> complex:
    """Free outgoing-wave Green function -(M/2 pi hbar^2) e^{ikd}/d.

    For E <= 0 the analytic continuation k -> i kappa is returned (a decaying
    evanescent kernel), which is the natural extension below threshold.
    """
    d = math.dist(tuple(map(float, r)), tuple(map(float, r_src)))
    if d == 0.0:
        raise SingularityError("green_free diverges at r = r'")
    pref = -mass / (2.0 * math.pi * hbar**2)
    if E > 0.0:
        k = _wavenumber(E, mass, hbar)
        return pref * complex(math.cos(k * d), math.sin(k * d)) / d
    kappa = _wavenumber(-E, mass, hbar)
    return complex(pref * math.exp(-kappa * d) / d)


def _spherical_hankel_plus(l: int, u: float) -> complex:
    # Outgoing combination h_l^(+)(u) = n_l(u) + i j_l(u) with the Neumann
    # convention n_l = -y_l, so that h_0^(+)(u) = e^{iu}/u.
    return complex(-sc.spherical_yn(l, u), sc.spherical_jn(l, u))


def green_free_lm(
    idx: MultipoleIndex, R, E: float, mass: float, hbar: float = 1.054571817e-34
) -> complex:
    """Free multipole wave -(M k^{l+1}/2 pi hbar^2) h_l^{(+)}(kR) Y_lm(R_hat)."""
    if E <= 0.0:
        raise DomainError("green_free_lm requires E > 0")
    x, y, z = (float(c) for c in R)
    dist = math.sqrt(x * x + y * y + z * z)
    if dist == 0.0:
        raise SingularityError("green_free_lm diverges at the source point")
    k = _wavenumber(E, mass, hbar)
    ylm = klm_eval(idx, (x / dist, y / dist, z / dist))
    return (
        -mass
        * k ** (idx.l + 1)
        / (2.0 * math.pi * hbar**2)
        * _spherical_hankel_plus(idx.l, k * dist)
        * ylm
    )


def wigner_current(idx: MultipoleIndex, E: float, mass: float, hbar: float = 1.054571817e-34) -> float:
    """Free multipole emission rate J = M k^{2l+1} / (4 pi^2 hbar^3).

    Independent of m; vanishes at threshold for all l >= 0 (Wigner's law).
    """
    if E < 0.0:
        raise DomainError("wigner_current requires E >= 0")
    k = _wavenumber(E, mass, hbar)
    return mass * k ** (2 * idx.l + 1) / (4.0 * math.pi**2 * hbar**3)


def _double_factorial(n: int) -> float:
    return 1.0 if n <= 0 else float(math.prod(range(n, 0, -2)))


def extended_source_strength(
    profile: RadialSourceProfile, E: float, mass: float, hbar: float = 1.054571817e-34
) -> float:
    """Point-multipole strength lambda_lm of an extended source.

    lambda_lm = (4 pi / k^l) * integral R^{l+2} j_l(kR) sigma_lm(R) dR,
    reducing at threshold (E = 0) to 4 pi gamma_lm / (2l+1)!! with
    gamma_lm = integral R^{2l+2} sigma_lm(R) dR.
    """
    l = profile.idx.l
    radii = np.array([r for r, _ in profile.samples])
    vals = np.array([s for _, s in profile.samples])
    if E < 0.0:
        raise DomainError("extended_source_strength requires E >= 0")
    if E == 0.0:
        gamma = scipy.integrate.simpson(radii ** (2 * l + 2) * vals, x=radii)
        return 4.0 * math.pi * gamma / _double_factorial(2 * l + 1)
    k = _wavenumber(E, mass, hbar)
    integrand = radii ** (l + 2) * sc.spherical_jn(l, k * radii) * vals
    return 4.0 * math.pi / k**l * float(scipy.integrate.simpson(integrand, x=radii))


def free_total_current(
    strengths: dict[MultipoleIndex, complex], E: float, mass: float, hbar: float = 1.054571817e-34
) -> float:
    """Total rate of a source decomposed into multipole strengths lambda_lm.

    The free current matrix is diagonal, so the rate is the weighted sum
    sum |lambda_lm|^2 J_lm over the components.
    """
    return sum(
        abs(lam) ** 2 * wigner_current(idx, E, mass, hbar)
        for idx, lam in strengths.items()
    )
