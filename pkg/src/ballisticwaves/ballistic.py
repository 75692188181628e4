"""Multipole matter waves in a uniform force field.

Exact Green functions, their far-field asymptotics, current densities, total
current matrices, and the photodetachment closed forms built on them.  The
force points along +z with magnitude F; all internal evaluation happens in
the dimensionless variables rho = beta*F*r, zeta = beta*F*z, eps = -2*beta*E
with beta = (M / 4 hbar^2 F^2)^(1/3), and a PhysicalContext converts at the
boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.special as sc

from .airyq import QArgs, q, q_grad, qi
from .errors import DomainError, RegimeError, SingularityError, UnsupportedOrderError
from .specfun import airy_unrestricted
from .harmonics import (
    MultipoleIndex,
    klm_eval,
    klm_grad,
    klm_operator_on_airy,
    translation_coeff_t,
)

# SI constants (CODATA 2018).
HBAR = 1.054571817e-34  # J s
ELECTRON_MASS = 9.1093837015e-31  # kg
ELEMENTARY_CHARGE = 1.602176634e-19  # C
RB87_MASS = 1.44316e-25  # kg
G_EARTH = 9.81  # m/s^2

#: Far-field formulas are used only when -alpha_plus exceeds this threshold;
#: chosen so the l <= 2 far/exact discrepancy stays below 1e-3.
ALPHA_THRESHOLD = 15.0

#: Recursion depth limit for multipole Green functions.
GREEN_L_MAX = 12


@dataclass(frozen=True)
class PhysicalContext:
    """Particle mass, force magnitude (along +z) and hbar, with derived scales."""

    mass: float
    force: float
    hbar: float = HBAR

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.force <= 0 or self.hbar <= 0:
            raise DomainError("mass, force and hbar must all be positive")

    @property
    def beta(self) -> float:
        """Characteristic inverse energy (M / 4 hbar^2 F^2)^(1/3), in 1/J."""
        return (self.mass / (4.0 * self.hbar**2 * self.force**2)) ** (1.0 / 3.0)

    @property
    def beta_f(self) -> float:
        """Inverse length scale beta*F, in 1/m."""
        return self.beta * self.force

    def eps(self, energy: float) -> float:
        """Dimensionless energy eps = -2*beta*E."""
        return -2.0 * self.beta * energy

    def qargs(self, r, energy: float) -> QArgs:
        """Dimensionless arguments for a field point r (m) relative to the source."""
        x, y, z = r
        rnorm = math.sqrt(x * x + y * y + z * z)
        bf = self.beta_f
        return QArgs(bf * rnorm, bf * z, self.eps(energy))


@dataclass(frozen=True)
class SourceSuperposition:
    """Point multipole superposition sum_lm lambda_lm delta_lm(r - origin) at energy E."""

    amplitudes: dict[MultipoleIndex, complex]
    energy: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        for idx in self.amplitudes:
            if idx.l > GREEN_L_MAX:
                raise UnsupportedOrderError(f"l <= {GREEN_L_MAX} required, got {idx.l}")


@dataclass
class DetectorGrid:
    """Lateral sampling plane at height z with per-pixel values."""

    z: float
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray = field(default=None)

    @classmethod
    def centered(cls, z: float, width_x: float, width_y: float, nx: int, ny: int):
        if nx < 1 or ny < 1 or nx * ny > 4096 * 4096:
            raise DomainError("grid must have between 1 and 4096^2 pixels")
        return cls(
            z=z,
            x=np.linspace(-width_x / 2.0, width_x / 2.0, nx),
            y=np.linspace(-width_y / 2.0, width_y / 2.0, ny),
            values=np.zeros((ny, nx)),
        )


def green_swave(r, r_src, E: float, ctx: PhysicalContext) -> complex:
    """Uniform-field Green function G(r, r'; E) for a unit point source at r'."""
    d = np.asarray(r, dtype=float) - np.asarray(r_src, dtype=float)
    if not np.any(d):
        raise SingularityError("Green function evaluated at the source point")
    e_eff = E + ctx.force * float(np.asarray(r_src, dtype=float)[2])
    a = ctx.qargs(d, e_eff)
    return -4.0 * ctx.beta * ctx.beta_f**3 * q(1, a)


def green_lm(idx: MultipoleIndex, r, E: float, ctx: PhysicalContext) -> complex:
    """Multipole Green function G_lm(r, o; E) for a source at the origin."""
    if idx.l > GREEN_L_MAX:
        raise UnsupportedOrderError(f"l <= {GREEN_L_MAX} required, got {idx.l}")
    r = np.asarray(r, dtype=float)
    if not np.any(r):
        raise SingularityError("multipole Green function evaluated at the source")
    a = ctx.qargs(r, E)
    bf = ctx.beta_f
    l, m = idx.l, idx.m
    total = 0.0 + 0.0j
    for j in range(abs(m), l + 1):
        total += (
            (2.0 * bf) ** j
            * translation_coeff_t(j, l, m)
            * klm_eval(MultipoleIndex(j, m), r)
            * q(2 * j - l + 1, a)
        )
    return -4.0 * ctx.beta * bf ** (l + 3) * total


def green_lm_grad(
    idx: MultipoleIndex, r, E: float, ctx: PhysicalContext
) -> tuple[complex, np.ndarray]:
    """G_lm and its Cartesian gradient, assembled analytically.

    Uses dQ_k/drho = -2 rho Q_{k+1}, dQ_k/dzeta = Q_{k-1} plus the product
    rule on the solid harmonics; no numerical differentiation.
    """
    if idx.l > GREEN_L_MAX:
        raise UnsupportedOrderError(f"l <= {GREEN_L_MAX} required, got {idx.l}")
    r = np.asarray(r, dtype=float)
    if not np.any(r):
        raise SingularityError("multipole Green function evaluated at the source")
    a = ctx.qargs(r, E)
    bf = ctx.beta_f
    rnorm = float(np.linalg.norm(r))
    # d(rho)/dr = beta_f * r_hat ; d(zeta)/dr = beta_f * e_z
    drho = bf * r / rnorm
    l, m = idx.l, idx.m
    val = 0.0 + 0.0j
    grad = np.zeros(3, dtype=complex)
    for j in range(abs(m), l + 1):
        c = (2.0 * bf) ** j * translation_coeff_t(j, l, m)
        jdx = MultipoleIndex(j, m)
        k = 2 * j - l + 1
        qk = q(k, a)
        dq_rho, dq_zeta = q_grad(k, a)
        kval = klm_eval(jdx, r)
        kgrad = np.asarray(klm_grad(jdx, r), dtype=complex)
        val += c * kval * qk
        grad += c * (kgrad * qk + kval * (dq_rho * drho + dq_zeta * bf * np.array([0, 0, 1.0])))
    pref = -4.0 * ctx.beta * bf ** (l + 3)
    return pref * val, pref * grad


def green_lm_far(idx: MultipoleIndex, r, E: float, ctx: PhysicalContext) -> complex:
    """Far-field (z -> infinity) form of G_lm; valid for alpha_+ << -1."""
    r = np.asarray(r, dtype=float)
    a = ctx.qargs(r, E)
    ap = a.alpha_plus
    if ap >= -ALPHA_THRESHOLD:
        raise RegimeError(
            f"far-field form needs alpha_+ < -{ALPHA_THRESHOLD}, got {ap:.3g}"
        )
    bf = ctx.beta_f
    sa = math.sqrt(-ap)
    v = airy_unrestricted(ap)
    ci = complex(v.bi, v.ai)
    kop = klm_operator_on_airy(idx, bf * r[0] / sa, bf * r[1] / sa, a.alpha_minus)
    return (
        -0.5
        * ctx.beta
        * (2.0 * bf) ** (idx.l + 3)
        * 1j ** (idx.l + 3)
        * ci
        / sa
        * (-1.0) ** idx.m
        * kop
    )


def scattering_wave(src: SourceSuperposition, r, ctx: PhysicalContext) -> complex:
    """psi(r) = sum_lm lambda_lm G_lm(r - origin; E + F z_origin)."""
    d = np.asarray(r, dtype=float) - np.asarray(src.origin, dtype=float)
    e_eff = src.energy + ctx.force * src.origin[2]
    return sum(lam * green_lm(idx, d, e_eff, ctx) for idx, lam in src.amplitudes.items())


def current_density(src: SourceSuperposition, r, ctx: PhysicalContext) -> np.ndarray:
    """Particle current density j = (hbar/M) Im[psi* grad psi], in 1/(m^2 s)."""
    d = np.asarray(r, dtype=float) - np.asarray(src.origin, dtype=float)
    e_eff = src.energy + ctx.force * src.origin[2]
    psi = 0.0 + 0.0j
    grad = np.zeros(3, dtype=complex)
    for idx, lam in src.amplitudes.items():
        g, gg = green_lm_grad(idx, d, e_eff, ctx)
        psi += lam * g
        grad += lam * gg
    return (ctx.hbar / ctx.mass) * np.imag(np.conj(psi) * grad)


def current_density_z_far(
    idx_a: MultipoleIndex, idx_b: MultipoleIndex, r, E: float, ctx: PhysicalContext
) -> complex:
    """Far-field matrix element j^(z)_{lm,l'm'}(r, o; E)."""
    r = np.asarray(r, dtype=float)
    a = ctx.qargs(r, E)
    ap = a.alpha_plus
    if ap >= -ALPHA_THRESHOLD:
        raise RegimeError(
            f"far-field form needs alpha_+ < -{ALPHA_THRESHOLD}, got {ap:.3g}"
        )
    bf = ctx.beta_f
    sa = math.sqrt(-ap)
    X, Y = bf * r[0] / sa, bf * r[1] / sa
    ka = klm_operator_on_airy(idx_a, X, Y, a.alpha_minus)
    kb = klm_operator_on_airy(idx_b, X, Y, a.alpha_minus)
    return (
        -ctx.beta
        / (4.0 * math.pi * ctx.hbar * ap)
        * (2.0 * bf) ** (idx_a.l + idx_b.l + 5)
        * 1j ** (idx_b.l - idx_a.l)
        * (-1.0) ** (idx_a.m + idx_b.m)
        * np.conj(ka)
        * kb
    )


def _double_factorial(n: int) -> float:
    if n <= 0:
        return 1.0
    out = 1.0
    while n > 0:
        out *= n
        n -= 2
    return out


def total_current_matrix(
    idx_a: MultipoleIndex, idx_b: MultipoleIndex, E: float, ctx: PhysicalContext
) -> float:
    """Total multipole current matrix element J_{lm,l'm'}(E), in 1/s.

    Vanishes identically for m != m' (axial symmetry); diagonal elements are
    the emission rates J_lm(E).
    """
    if idx_a.l > GREEN_L_MAX or idx_b.l > GREEN_L_MAX:
        raise UnsupportedOrderError(f"l, l' <= {GREEN_L_MAX} required")
    if idx_a.m != idx_b.m:
        return 0.0
    l, lp, m = idx_a.l, idx_b.l, idx_a.m
    eps = ctx.eps(E)
    bf = ctx.beta_f
    total = 0.0
    for j in range(abs(m), min(l, lp) + 1):
        total += (
            2.0**j
            * _double_factorial(2 * j + 1)
            * translation_coeff_t(j, l, m)
            * translation_coeff_t(j, lp, m)
            * qi(3 * j - l - lp + 1, eps)
        )
    return (
        ctx.mass
        / (2.0 * math.pi * ctx.hbar**3)
        * bf ** (l + lp + 1)
        * (-1.0) ** (l + lp)
        * total
    )


def total_current_asym(
    idx: MultipoleIndex, E: float, ctx: PhysicalContext, regime: str
) -> float:
    """Large-|E| asymptotics of the diagonal current J_lm(E).

    tunneling (E < 0): exponentially suppressed rate with evanescent momentum
    kappa = sqrt(2M|E|)/hbar; classical (E > 0): Wigner (secular) current
    modulated by the closed-orbit oscillation.
    """
    eps = ctx.eps(E)
    if abs(eps) < 4.0:
        raise RegimeError(f"|eps| >= 4 required for the asymptotic forms, got {eps:.3g}")
    l, m = idx.l, abs(idx.m)
    bf = ctx.beta_f
    angular = (2 * l + 1) * math.factorial(l + m) / (
        math.factorial(m) * math.factorial(l - m)
    )
    if regime == "tunneling":
        if E >= 0.0:
            raise RegimeError("tunneling regime requires E < 0")
        kappa = math.sqrt(2.0 * ctx.mass * abs(E)) / ctx.hbar
        # First subleading correction of the dominant (j = |m|) term, carried
        # over from the large-eps expansion of Qi_{3|m| - 2l + 1}.
        kq = 3 * m - 2 * l + 1
        corr = 1.0 - (3.0 * kq * kq + 9.0 * kq + 5.0) / (24.0 * eps**1.5)
        return (
            ctx.mass
            * kappa ** (2 * l + 1)
            / (4.0 * math.pi**2 * ctx.hbar**3)
            * angular
            * (bf / kappa) ** (3 * m + 3)
            * math.exp(-(kappa**3) / (6.0 * bf**3))
            * corr
        )
    if regime == "classical":
        if E <= 0.0:
            raise RegimeError("classical regime requires E > 0")
        k = math.sqrt(2.0 * ctx.mass * E) / ctx.hbar
        wigner = ctx.mass * k ** (2 * l + 1) / (4.0 * math.pi**2 * ctx.hbar**3)
        osc = (
            (-1.0) ** l
            * 2.0
            * angular
            * (bf / k) ** (3 * m + 3)
            * math.cos((k / bf) ** 3 / 6.0 + m * math.pi / 2.0)
        )
        return wigner * (1.0 - osc)
    raise DomainError(f"regime must be 'tunneling' or 'classical', got {regime!r}")


def staircase_energies(l: int, nu_max: int, ctx: PhysicalContext) -> list[float]:
    """Energies E_nu_l where J_l0(E) becomes stationary (staircase plateaus)."""
    if l < 0:
        raise DomainError("l >= 0 required")
    nu_min = 1 if l == 0 else 0
    out = []
    for nu in range(nu_min, nu_max + 1):
        arg = 3.0 * math.pi * (4 * nu + 2 * l - 1)
        out.append(arg ** (2.0 / 3.0) / (8.0 * ctx.beta))
    return out


#: Effective polarization vectors (complex, unit norm) of the named presets.
_POLARIZATION_PRESETS = {
    "pi": (0.0, 0.0, 1.0),
    "sigma": (1.0, 0.0, 0.0),
    "circular": (1j / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)),
    "tilt45": (1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)),
}


def polarization_to_source(
    polarization, C: complex, E: float, ctx: PhysicalContext
) -> SourceSuperposition:
    """Map a dipole-transition polarization onto the p-wave source amplitudes.

    A (possibly complex) unit vector (ex, ey, ez) decomposes as
    lambda_10 = ez, lambda_11 = (-ex + i ey)/sqrt(2),
    lambda_1,-1 = (ex + i ey)/sqrt(2), all scaled by C.
    """
    if isinstance(polarization, str):
        try:
            ex, ey, ez = _POLARIZATION_PRESETS[polarization]
        except KeyError:
            raise DomainError(
                f"unknown polarization {polarization!r}; "
                f"expected one of {sorted(_POLARIZATION_PRESETS)} or a 3-vector"
            ) from None
    else:
        vec = np.asarray(polarization, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(vec) ** 2)))
        if norm == 0.0:
            raise DomainError("polarization vector must be nonzero")
        ex, ey, ez = vec / norm
    amps = {
        MultipoleIndex(1, 0): C * ez,
        MultipoleIndex(1, 1): C * (-ex + 1j * ey) / math.sqrt(2.0),
        MultipoleIndex(1, -1): C * (ex + 1j * ey) / math.sqrt(2.0),
    }
    amps = {idx: lam for idx, lam in amps.items() if lam != 0.0}
    return SourceSuperposition(amplitudes=amps, energy=E)


def _far_field_args(grid: DetectorGrid, E: float, ctx: PhysicalContext):
    """Vectorized alpha_-, alpha_+ and x-mesh over a detector plane."""
    xx, yy = np.meshgrid(grid.x, grid.y)
    rnorm = np.sqrt(xx**2 + yy**2 + grid.z**2)
    bf = ctx.beta_f
    eps = ctx.eps(E)
    a_minus = eps - bf * grid.z + bf * rnorm
    a_plus = eps - bf * grid.z - bf * rnorm
    if np.max(a_plus) >= -ALPHA_THRESHOLD:
        raise RegimeError(
            "far-field profile invalid: alpha_+ reaches "
            f"{np.max(a_plus):.3g} >= -{ALPHA_THRESHOLD} at z={grid.z:g} m, E={E:g} J"
        )
    return xx, a_minus, a_plus


def photodetachment_profile(
    polarization,
    grid: DetectorGrid,
    E: float,
    ctx: PhysicalContext,
    mode: str = "far-field",
    C: complex = 1.0,
) -> DetectorGrid:
    """Photocurrent density j_z on a detector plane for a p-wave source.

    mode='far-field' uses the closed asymptotic forms (vectorized); for the
    tilt45 preset this is pixelwise exactly the mean of the pi and sigma
    profiles.  mode='exact' differentiates the exact Green functions instead.
    """
    if mode == "exact":
        src = polarization_to_source(polarization, C, E, ctx)
        values = np.empty((len(grid.y), len(grid.x)))
        for iy, yv in enumerate(grid.y):
            for ix, xv in enumerate(grid.x):
                values[iy, ix] = current_density(src, (xv, yv, grid.z), ctx)[2]
        return DetectorGrid(z=grid.z, x=grid.x, y=grid.y, values=values)
    if mode != "far-field":
        raise DomainError(f"mode must be 'far-field' or 'exact', got {mode!r}")
    beta, F, hbar = ctx.beta, ctx.force, ctx.hbar
    scale = abs(C) ** 2
    if isinstance(polarization, str) and polarization in _POLARIZATION_PRESETS:
        xx, am, ap = _far_field_args(grid, E, ctx)
        ai, aip, _, _ = sc.airy(am)
        if polarization == "pi":
            values = 24.0 * beta**8 * F**7 / (math.pi**2 * hbar * (-ap)) * aip**2
        elif polarization == "sigma":
            values = (
                24.0 * beta**10 * F**9 / (math.pi**2 * hbar * ap**2) * xx**2 * ai**2
            )
        elif polarization == "circular":
            values = (
                12.0
                * beta**8
                * F**7
                / (math.pi**2 * hbar * (-ap))
                * (aip - ctx.beta_f * xx * ai / np.sqrt(-ap)) ** 2
            )
        else:  # tilt45: pixelwise mean of the pi and sigma profiles
            v_pi = 24.0 * beta**8 * F**7 / (math.pi**2 * hbar * (-ap)) * aip**2
            v_sig = 24.0 * beta**10 * F**9 / (math.pi**2 * hbar * ap**2) * xx**2 * ai**2
            values = (v_pi + v_sig) / 2.0
        return DetectorGrid(z=grid.z, x=grid.x, y=grid.y, values=scale * values)
    # General polarization vector: bilinear far-field current matrix.
    src = polarization_to_source(polarization, C, E, ctx)
    items = list(src.amplitudes.items())
    values = np.empty((len(grid.y), len(grid.x)))
    for iy, yv in enumerate(grid.y):
        for ix, xv in enumerate(grid.x):
            r = (xv, yv, grid.z)
            total = 0.0 + 0.0j
            for ia, (idx_a, la) in enumerate(items):
                for idx_b, lb in items:
                    total += np.conj(la) * lb * current_density_z_far(idx_a, idx_b, r, E, ctx)
            values[iy, ix] = total.real
    return DetectorGrid(z=grid.z, x=grid.x, y=grid.y, values=values)


def photodetachment_spectrum(
    polarization, energies, ctx: PhysicalContext, C: complex = 1.0
) -> list[tuple[float, float]]:
    """Total photocurrent J(E) over an energy range, from the current matrix."""
    src0 = polarization_to_source(polarization, C, 0.0, ctx)
    items = list(src0.amplitudes.items())
    out = []
    for E in energies:
        total = 0.0
        for idx_a, la in items:
            for idx_b, lb in items:
                if idx_a.m != idx_b.m:
                    continue
                total += (np.conj(la) * lb).real * total_current_matrix(
                    idx_a, idx_b, E, ctx
                )
        out.append((float(E), float(total)))
    return out
