"""Atom-laser beams outcoupled from Gaussian condensate sources by gravity.

A weakly rf-coupled Bose-Einstein condensate acts as a Gaussian source of
matter waves falling in the gravitational field.  In the far field the
Gaussian source maps onto a displaced virtual point source of strength
Lambda, so beams and outcoupling rates reduce to the same Q/Qi machinery as
point multipole sources, evaluated at shifted (tilde) variables.  Vortex
states carry angular momentum into the beam; a rotating vortex lattice
decomposes into circular (m, m) components with polynomial weights.

All compositions of the huge factors Lambda ~ e^(2 alpha^2 eps_t) with the
exponentially small Q/Qi values are performed in log space.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, roots_hermite

from .airyq import QArgs, q_scaled, q_table_scaled_grid, qi_scaled
from .ballistic import G_EARTH, HBAR, RB87_MASS, DetectorGrid, PhysicalContext, green_swave
from .errors import DomainError, RegimeError, StabilityWarning, UnsupportedOrderError
from .harmonics import MultipoleIndex

__all__ = [
    "GaussianSource",
    "ScaledVars",
    "VortexLattice",
    "rb87_context",
    "scaled_vars",
    "virtual_strength",
    "log_virtual_strength",
    "beam_psi_00",
    "beam_psi_1m",
    "beam_psi_perp",
    "gaussian_multipole_current",
    "vortex_current_1m",
    "perp_vortex_current",
    "perp_vortex_source",
    "farfield_density",
    "beam_density_grid",
    "lattice_beam_grid",
    "triangular_vortex_positions",
    "lattice_coeffs",
    "lattice_norm",
    "lattice_beam",
    "lattice_spectrum",
]

#: Highest vortex count handled by the lattice beam (Q recursion depth).
LATTICE_N_MAX = 40


@dataclass(frozen=True)
class GaussianSource:
    """Isotropic Gaussian condensate source of N atoms, rf coupling Omega.

    The source wave function is sigma_lm = N_l K_lm(grad) applied to the
    ground Gaussian of width a, normalized to integral |sigma|^2 = N (hbar
    Omega)^2.
    """

    n_atoms: float
    rabi: float
    width: float
    idx: MultipoleIndex = MultipoleIndex(0, 0)

    def __post_init__(self) -> None:
        if self.n_atoms <= 0 or self.rabi <= 0 or self.width <= 0:
            raise DomainError("n_atoms, rabi and width must all be positive")


@dataclass(frozen=True)
class ScaledVars:
    """Dimensionless beam variables shifted to the virtual point source.

    alpha = beta F a is the scaled condensate width; zeta_t = zeta + 2
    alpha^4 and eps_t = eps + 4 alpha^4 are the shifted height and energy,
    rho_t the shifted hyperradius.  The lateral coordinates xi, upsilon are
    unshifted.
    """

    alpha: float
    xi: float
    upsilon: float
    zeta_t: float
    rho_t: float
    eps_t: float


@dataclass(frozen=True)
class VortexLattice:
    """Vortex positions v_k = x_k + i y_k of a rotating condensate source."""

    positions: tuple[complex, ...]
    rot: float
    width: float
    n_atoms: float
    rabi: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.n_atoms <= 0 or self.rabi <= 0:
            raise DomainError("width, n_atoms and rabi must be positive")
        if len(self.positions) > LATTICE_N_MAX:
            raise UnsupportedOrderError(
                f"at most {LATTICE_N_MAX} vortices supported, got {len(self.positions)}"
            )

    @property
    def n(self) -> int:
        """Number of vortices = highest angular momentum component."""
        return len(self.positions)


def rb87_context() -> PhysicalContext:
    """Physical context for Rb-87 atoms falling under gravity."""
    return PhysicalContext(mass=RB87_MASS, force=RB87_MASS * G_EARTH)


def scaled_vars(r, E: float, ctx: PhysicalContext, a: float) -> ScaledVars:
    """Shifted dimensionless variables of the virtual point source."""
    x, y, z = (float(c) for c in r)
    bf = ctx.beta_f
    alpha = bf * a
    xi, ups = bf * x, bf * y
    zeta_t = bf * z + 2.0 * alpha**4
    eps_t = ctx.eps(E) + 4.0 * alpha**4
    rho_t = math.sqrt(xi * xi + ups * ups + zeta_t * zeta_t)
    return ScaledVars(alpha, xi, ups, zeta_t, rho_t, eps_t)


def log_virtual_strength(
    n_atoms: float, rabi: float, a: float, eps_t: float, ctx: PhysicalContext
) -> float:
    """log Lambda(eps_t); Lambda is strongly energy- and size-dependent."""
    alpha = ctx.beta_f * a
    return (
        0.5 * math.log(n_atoms)
        + math.log(ctx.hbar * rabi)
        + 1.5 * math.log(2.0 * math.sqrt(math.pi) * a)
        + 2.0 * alpha**2 * (eps_t - 4.0 * alpha**4 / 3.0)
    )


def virtual_strength(src: GaussianSource, E: float, ctx: PhysicalContext) -> float:
    """Virtual point-source strength Lambda(eps_t) (may overflow to inf)."""
    eps_t = ctx.eps(E) + 4.0 * (ctx.beta_f * src.width) ** 4
    logval = log_virtual_strength(src.n_atoms, src.rabi, src.width, eps_t, ctx)
    try:
        return math.exp(logval)
    except OverflowError:
        return math.inf


def _warn_inside(src: GaussianSource, r) -> None:
    if math.sqrt(sum(float(c) ** 2 for c in r)) < 3.0 * src.width:
        warnings.warn(
            "evaluation point lies within 3 source widths of the condensate; "
            "the virtual-source mapping is unreliable there",
            StabilityWarning,
            stacklevel=3,
        )


def beam_psi_00(src: GaussianSource, r, E: float, ctx: PhysicalContext) -> complex:
    """Beam wave function of the vortex-free Gaussian source.

    psi = -4 beta (beta F)^3 Lambda(eps_t) Q_1(rho_t, zeta_t; eps_t).
    """
    _warn_inside(src, r)
    sv = scaled_vars(r, E, ctx, src.width)
    logl = log_virtual_strength(src.n_atoms, src.rabi, src.width, sv.eps_t, ctx)
    mant, logq = q_scaled(1, QArgs(sv.rho_t, sv.zeta_t, sv.eps_t))
    return -4.0 * ctx.beta * ctx.beta_f**3 * mant * math.exp(logl + logq)


def beam_psi_1m(src: GaussianSource, r, E: float, ctx: PhysicalContext) -> complex:
    """Beam wave function of an l = 1 Gaussian multipole source.

    psi_10   =  4 sqrt(2) beta (bF)^3 alpha Lambda [2 zeta_t Q_2 - 4 alpha^2 Q_1 + Q_0],
    psi_1+-1 = -+ 8 beta (bF)^3 alpha Lambda (xi +- i upsilon) Q_2.
    """
    if src.idx.l != 1:
        raise DomainError(f"beam_psi_1m requires an l = 1 source, got l={src.idx.l}")
    _warn_inside(src, r)
    sv = scaled_vars(r, E, ctx, src.width)
    logl = log_virtual_strength(src.n_atoms, src.rabi, src.width, sv.eps_t, ctx)
    qa = QArgs(sv.rho_t, sv.zeta_t, sv.eps_t)
    pref = ctx.beta * ctx.beta_f**3 * sv.alpha
    if src.idx.m == 0:
        q0m, logq = q_scaled(0, qa)
        q1m, _ = q_scaled(1, qa)
        q2m, _ = q_scaled(2, qa)
        bracket = 2.0 * sv.zeta_t * q2m - 4.0 * sv.alpha**2 * q1m + q0m
        return 4.0 * math.sqrt(2.0) * pref * bracket * math.exp(logl + logq)
    q2m, logq = q_scaled(2, qa)
    lateral = complex(sv.xi, sv.upsilon if src.idx.m > 0 else -sv.upsilon)
    return -float(src.idx.m) * 8.0 * pref * lateral * q2m * math.exp(logl + logq)


def perp_vortex_source(src: GaussianSource) -> dict[MultipoleIndex, float]:
    """Weights of the x-axis (perpendicular) vortex in the (1, m) basis.

    sigma_perp = (1/2)[sigma_11 + sqrt(2) sigma_10 + sigma_1,-1]; the squared
    weights 1/4 + 1/2 + 1/4 sum to one.
    """
    if src.idx.l != 1:
        raise DomainError("perpendicular vortex requires an l = 1 source")
    return {
        MultipoleIndex(1, 1): 0.5,
        MultipoleIndex(1, 0): math.sqrt(2.0) / 2.0,
        MultipoleIndex(1, -1): 0.5,
    }


def beam_psi_perp(src: GaussianSource, r, E: float, ctx: PhysicalContext) -> complex:
    """Beam wave function of a vortex perpendicular to the force."""
    total = 0.0 + 0.0j
    for idx, w in perp_vortex_source(src).items():
        comp = GaussianSource(src.n_atoms, src.rabi, src.width, idx)
        total += w * beam_psi_1m(comp, r, E, ctx)
    return total


def gaussian_multipole_current(
    m: int, n_atoms: float, rabi: float, a: float, E: float, ctx: PhysicalContext
) -> float:
    """Outcoupling rate of the circular (m, m) Gaussian multipole source.

    J_mm = (8/hbar) beta (bF)^3 (2 alpha)^{2m} Lambda(eps_t)^2 Qi_{m+1}(eps_t).
    """
    if m < 0:
        m = -m
    alpha = ctx.beta_f * a
    eps_t = ctx.eps(E) + 4.0 * alpha**4
    logl = log_virtual_strength(n_atoms, rabi, a, eps_t, ctx)
    mant, logqi = qi_scaled(m + 1, eps_t)
    logmag = (
        math.log(8.0 / ctx.hbar * ctx.beta * ctx.beta_f**3)
        + 2.0 * m * math.log(2.0 * alpha)
        + 2.0 * logl
        + logqi
    )
    return mant * math.exp(logmag)


def vortex_current_1m(
    src: GaussianSource, E: float, ctx: PhysicalContext, mode: str = "exact"
) -> float:
    """Total current of an l = 1 Gaussian source (single vortex).

    mode "exact" uses the Qi combinations; "large-alpha" the Gaussian
    approximations around resonance; "slicing" the Franck-Condon integral of
    the condensate density over the resonance plane E + Fz = 0 (closed form
    for Gaussian sources; identical to "large-alpha" for this family).
    """
    if src.idx.l != 1:
        raise DomainError(f"vortex_current_1m requires l = 1, got l={src.idx.l}")
    m = abs(src.idx.m)
    a = src.width
    alpha = ctx.beta_f * a
    eps = ctx.eps(E)
    if mode in ("large-alpha", "slicing"):
        envelope = math.exp(-(eps**2) / (4.0 * alpha**2))
        nhw2 = src.n_atoms * (ctx.hbar * src.rabi) ** 2
        if m == 1:
            return 2.0 * math.sqrt(math.pi) * nhw2 / (ctx.hbar * ctx.force * a) * envelope
        return (
            4.0
            * math.sqrt(math.pi)
            * nhw2
            / (ctx.hbar * ctx.force * a)
            * (eps**2 / (4.0 * alpha**2))
            * envelope
        )
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    if m == 1:
        return gaussian_multipole_current(1, src.n_atoms, src.rabi, a, E, ctx)
    # J_10: the Qi_2 + 8 a^4 Qi_1 - 4 a^2 Qi_0 + Qi_{-1}/2 combination
    eps_t = eps + 4.0 * alpha**4
    logl = log_virtual_strength(src.n_atoms, src.rabi, a, eps_t, ctx)
    m2, logqi = qi_scaled(2, eps_t)
    m1, _ = qi_scaled(1, eps_t)
    m0, _ = qi_scaled(0, eps_t)
    mm1, _ = qi_scaled(-1, eps_t)
    bracket = m2 + 8.0 * alpha**4 * m1 - 4.0 * alpha**2 * m0 + 0.5 * mm1
    logmag = (
        math.log(32.0 / ctx.hbar * ctx.beta * ctx.beta_f**3 * alpha**2)
        + 2.0 * logl
        + logqi
    )
    return bracket * math.exp(logmag)


def perp_vortex_current(
    src: GaussianSource, E: float, ctx: PhysicalContext, mode: str = "exact"
) -> float:
    """Total current of the perpendicular vortex: J = [J_11 + J_10]/2."""
    j11 = vortex_current_1m(
        GaussianSource(src.n_atoms, src.rabi, src.width, MultipoleIndex(1, 1)),
        E, ctx, mode,
    )
    j10 = vortex_current_1m(
        GaussianSource(src.n_atoms, src.rabi, src.width, MultipoleIndex(1, 0)),
        E, ctx, mode,
    )
    return 0.5 * (j11 + j10)


def _sigma_1m_factor(idx: MultipoleIndex, x: float, y: float, z: float) -> complex:
    # Polynomial part of sigma_lm / [sqrt(N) hbar Omega pi^{-3/4} a^{-5/2}],
    # following sigma_lm = N_l K_lm(grad) sigma with Condon-Shortley phases.
    if idx.l == 0:
        return 1.0 + 0.0j
    if idx.m == 1:
        return complex(x, y)
    if idx.m == -1:
        return -complex(x, -y)
    return complex(-math.sqrt(2.0) * z)


def _gauss_hermite_psi(
    weights: dict[MultipoleIndex, float],
    src: GaussianSource,
    r,
    E: float,
    ctx: PhysicalContext,
    order: int = 24,
) -> complex:
    # psi(r) = integral G(r, r'; E) sigma(r') d^3r' by Gauss-Hermite nodes of
    # the Gaussian envelope e^{-r'^2 / 2a^2} (substitution r' = sqrt(2) a t).
    a = src.width
    nodes, wts = roots_hermite(order)
    s2a = math.sqrt(2.0) * a
    amp = math.sqrt(src.n_atoms) * ctx.hbar * src.rabi * math.pi**-0.75
    amp *= a**-1.5 if all(i.l == 0 for i in weights) else a**-2.5
    total = 0.0 + 0.0j
    for ix, tx in enumerate(nodes):
        for iy, ty in enumerate(nodes):
            for iz, tz in enumerate(nodes):
                xs, ys, zs = s2a * tx, s2a * ty, s2a * tz
                poly = sum(
                    w * _sigma_1m_factor(idx, xs, ys, zs)
                    for idx, w in weights.items()
                )
                if poly == 0.0:
                    continue
                g = green_swave(r, (xs, ys, zs), E, ctx)
                total += wts[ix] * wts[iy] * wts[iz] * poly * g
    return total * amp * s2a**3


def farfield_density(
    src: GaussianSource,
    grid: DetectorGrid,
    E: float,
    ctx: PhysicalContext,
    orientation: str = "parallel",
    mode: str = "closed-form",
) -> DetectorGrid:
    """Atom density on a detector plane below a single-vortex condensate.

    mode "closed-form" evaluates the asymptotic Gaussian envelope times the
    modulation factor f_11 (parallel vortex) or f_perp (perpendicular);
    "virtual-source" squares the Q-based beam wave function; "exact"
    integrates the Gaussian source against the ballistic Green function by
    Gauss-Hermite quadrature (slow; for validation).
    """
    if orientation not in ("parallel", "perpendicular"):
        raise DomainError(f"unknown orientation {orientation!r}")
    a = src.width
    alpha = ctx.beta_f * a
    if mode == "closed-form" and alpha < 2.0:
        warnings.warn(
            f"closed-form far-field density assumes alpha >> 1, got alpha={alpha:.3g}",
            StabilityWarning,
            stacklevel=2,
        )
    bf = ctx.beta_f
    eps = ctx.eps(E)
    zeta = bf * grid.z
    values = np.empty((len(grid.y), len(grid.x)))
    if mode == "closed-form":
        xi = bf * grid.x[None, :]
        ups = bf * grid.y[:, None]
        if orientation == "parallel":
            f = xi**2 + ups**2
        else:
            f = eps**2 / 4.0 + (
                ups - eps * math.sqrt(zeta) / (2.0 * math.sqrt(2.0) * alpha**2)
            ) ** 2
        pref = (
            16.0
            * src.n_atoms
            * (ctx.hbar * src.rabi) ** 2
            * ctx.beta**5
            * ctx.force**3
            * alpha**3
            / (math.sqrt(2.0 * math.pi * zeta) * (zeta + 2.0 * alpha**4) ** 2)
        )
        values = pref * f * np.exp(
            -(eps**2 / (4.0 * alpha**2) + 2.0 * alpha**2 * (xi**2 + ups**2) / (zeta + 2.0 * alpha**4))
        )
        return DetectorGrid(grid.z, grid.x, grid.y, values)
    if mode not in ("virtual-source", "exact"):
        raise DomainError(f"unknown mode {mode!r}")
    if orientation == "parallel":
        weights = {MultipoleIndex(1, 1): 1.0}
    else:
        weights = perp_vortex_source(
            GaussianSource(src.n_atoms, src.rabi, a, MultipoleIndex(1, 1))
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StabilityWarning)
        for iy, yv in enumerate(grid.y):
            for ix, xv in enumerate(grid.x):
                r = (float(xv), float(yv), grid.z)
                if mode == "virtual-source":
                    psi = sum(
                        w
                        * beam_psi_1m(
                            GaussianSource(src.n_atoms, src.rabi, a, idx), r, E, ctx
                        )
                        for idx, w in weights.items()
                    )
                else:
                    psi = _gauss_hermite_psi(weights, src, r, E, ctx)
                values[iy, ix] = abs(psi) ** 2
    return DetectorGrid(grid.z, grid.x, grid.y, values)


def _grid_scaled_vars(grid: DetectorGrid, ctx: PhysicalContext, a: float):
    bf = ctx.beta_f
    alpha = bf * a
    xi = bf * grid.x[None, :] + np.zeros((len(grid.y), 1))
    ups = bf * grid.y[:, None] + np.zeros((1, len(grid.x)))
    zeta_t = bf * grid.z + 2.0 * alpha**4
    rho_t = np.sqrt(xi * xi + ups * ups + zeta_t * zeta_t)
    return alpha, xi, ups, zeta_t, rho_t


def beam_density_grid(
    src: GaussianSource,
    grid: DetectorGrid,
    E: float,
    ctx: PhysicalContext,
    orientation: str | None = None,
) -> DetectorGrid:
    """Beam density |psi|^2 on a detector plane, evaluated grid-vectorized.

    Handles the s-wave Gaussian source (src.idx = (0, 0)), the single
    parallel vortex (l = 1 with m = +-1 or m = 0), and orientation
    "perpendicular" for the x-axis vortex superposition.
    """
    a = src.width
    alpha, xi, ups, zeta_t, rho_t = _grid_scaled_vars(grid, ctx, a)
    eps_t = ctx.eps(E) + 4.0 * alpha**4
    logl = log_virtual_strength(src.n_atoms, src.rabi, a, eps_t, ctx)
    pref = ctx.beta * ctx.beta_f**3
    if orientation == "perpendicular" or src.idx.l == 1:
        table, logq = q_table_scaled_grid(2, rho_t, zeta_t, eps_t)
        bracket10 = (
            2.0 * zeta_t * table[2] - 4.0 * alpha**2 * table[1] + table[0]
        )
        psi10 = 4.0 * math.sqrt(2.0) * pref * alpha * bracket10
        if orientation == "perpendicular":
            psi_p = -8.0 * pref * alpha * (xi + 1j * ups) * table[2]
            psi_m = 8.0 * pref * alpha * (xi - 1j * ups) * table[2]
            mant = 0.5 * (psi_p + math.sqrt(2.0) * psi10 + psi_m)
        elif src.idx.m == 0:
            mant = psi10
        else:
            lateral = xi + 1j * np.sign(src.idx.m) * ups
            mant = -float(src.idx.m) * 8.0 * pref * alpha * lateral * table[2]
    else:
        table, logq = q_table_scaled_grid(1, rho_t, zeta_t, eps_t)
        mant = -4.0 * pref * table[1]
    dens = np.abs(mant) ** 2 * np.exp(2.0 * (logl + logq))
    return DetectorGrid(grid.z, grid.x, grid.y, dens)


def lattice_beam_grid(
    latt: VortexLattice, grid: DetectorGrid, t: float, E: float, ctx: PhysicalContext
) -> DetectorGrid:
    """Beam density of the rotating lattice on a detector plane (vectorized).

    Per-m angular momentum components are evaluated over the whole grid and
    combined in log space with a streaming elementwise rescaling, keeping
    memory linear in the grid size.
    """
    w = lattice_coeffs(latt)
    a = latt.width
    alpha, xi, ups, zeta_t, rho_t = _grid_scaled_vars(grid, ctx, a)
    log_sum = _log_weight_norm(w, a)
    u = xi + 1j * ups
    absu = np.abs(u)
    on_axis = absu == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log2au = np.where(on_axis, -np.inf, np.log(2.0 * alpha * absu))
        phase_u = np.where(on_axis, 1.0 + 0.0j, u / np.where(on_axis, 1.0, absu))
    lmax = np.full(u.shape, -np.inf)
    acc = np.zeros(u.shape, dtype=complex)
    for m, wm in enumerate(w):
        if wm == 0.0:
            continue
        e_m = E + m * ctx.hbar * latt.rot
        eps_tm = ctx.eps(e_m) + 4.0 * alpha**4
        table, logq = q_table_scaled_grid(m + 1, rho_t, zeta_t, eps_tm)
        logl = log_virtual_strength(latt.n_atoms, latt.rabi, a, eps_tm, ctx)
        const = math.log(abs(wm)) + m * math.log(a) - 0.5 * log_sum + logl
        lm = const + m * log2au + logq
        qm = np.where(on_axis & (m > 0), 0.0, np.nan_to_num(table[m + 1]))
        cm = (wm / abs(wm)) * phase_u**m * qm * cmath.exp(-1j * e_m * t / ctx.hbar)
        new_max = np.maximum(lmax, lm)
        safe_max = np.where(np.isneginf(new_max), 0.0, new_max)
        acc = acc * np.exp(lmax - safe_max) + cm * np.exp(lm - safe_max)
        lmax = new_max
    pref = 4.0 * ctx.beta * ctx.beta_f**3
    dens = pref**2 * np.abs(acc) ** 2 * np.exp(2.0 * lmax)
    return DetectorGrid(grid.z, grid.x, grid.y, dens)


def triangular_vortex_positions(shells: int, spacing: float) -> tuple[complex, ...]:
    """Hexagonal (triangular-lattice) vortex positions within a shell count.

    shells = 3 with the origin gives the 37-site pattern 1 + 6 + 12 + 18.
    """
    a1 = complex(spacing, 0.0)
    a2 = spacing * cmath.exp(1j * math.pi / 3.0)
    pts = []
    for i in range(-shells, shells + 1):
        for j in range(-shells, shells + 1):
            if max(abs(i), abs(j), abs(i + j)) <= shells:
                pts.append(i * a1 + j * a2)
    pts.sort(key=lambda v: (abs(v), cmath.phase(v)))
    return tuple(pts)


def lattice_coeffs(latt: VortexLattice) -> list[complex]:
    """Coefficients w_k of the monic lattice polynomial prod[(x+iy) - v_k].

    Computed by direct incremental multiplication with roots sorted by
    magnitude; w[k] multiplies (x+iy)^k, w[n] = 1.
    """
    coeffs = np.array([1.0 + 0.0j])
    for v in sorted(latt.positions, key=abs):
        coeffs = np.convolve(coeffs, np.array([-v, 1.0 + 0.0j]))
    return list(coeffs)


def _log_weight_norm(w: list[complex], a: float) -> float:
    # log of sum_k k! |w_k|^2 a^{2k}
    terms = [
        gammaln(k + 1) + 2.0 * math.log(abs(wk)) + 2.0 * k * math.log(a)
        for k, wk in enumerate(w)
        if wk != 0.0
    ]
    return float(logsumexp(terms))


def lattice_norm(latt: VortexLattice, a_z: float | None = None) -> float:
    """Normalization constant N_n of the lattice source wave function.

    Only the isotropic trap a_x = a_z is supported; the anisotropic closed
    forms do not exist in this framework.
    """
    a = latt.width
    if a_z is not None and a_z != a:
        raise UnsupportedOrderError("anisotropic traps (a_x != a_z) are not supported")
    w = lattice_coeffs(latt)
    # sum_k k! |w_k|^2 a^{2k+2}, with the extra a^2 folded in
    log_sum = _log_weight_norm(w, a) + 2.0 * math.log(a)
    return math.exp(
        0.5 * math.log(latt.n_atoms)
        + math.log(HBAR * latt.rabi)
        - 0.75 * math.log(math.pi)
        - 0.5 * (math.log(a) + log_sum)
    )


def lattice_beam(
    latt: VortexLattice, r, t: float, E: float, ctx: PhysicalContext
) -> complex:
    """Beam wave function of the rotating vortex-lattice source.

    Coherent sum over angular momentum components m = 0..n, each outcoupled
    at its effective energy E + m hbar Omega_rot; per-m magnitudes are
    combined in log space.  The density profile at time t equals the t = 0
    profile rotated by Omega_rot * t about the beam axis.
    """
    w = lattice_coeffs(latt)
    a = latt.width
    alpha = ctx.beta_f * a
    sv = scaled_vars(r, E, ctx, a)
    log_sum = _log_weight_norm(w, a)
    u = complex(sv.xi, sv.upsilon)
    log2au = math.log(2.0 * alpha * abs(u)) if u != 0.0 else -math.inf
    phase_u = u / abs(u) if u != 0.0 else 1.0
    logs, mants = [], []
    for m, wm in enumerate(w):
        if wm == 0.0 or (u == 0.0 and m > 0):
            continue
        e_m = E + m * ctx.hbar * latt.rot
        eps_tm = ctx.eps(e_m) + 4.0 * alpha**4
        qa = QArgs(sv.rho_t, sv.zeta_t, eps_tm)
        qm, logq = q_scaled(m + 1, qa)
        logl = log_virtual_strength(latt.n_atoms, latt.rabi, a, eps_tm, ctx)
        logs.append(
            math.log(abs(wm)) + m * math.log(a) - 0.5 * log_sum
            + logl + m * log2au + logq
        )
        mants.append(
            (wm / abs(wm))
            * phase_u**m
            * qm
            * cmath.exp(-1j * e_m * t / ctx.hbar)
        )
    if not logs:
        return 0.0 + 0.0j
    lmax = max(logs)
    acc = sum(mm * math.exp(lg - lmax) for lg, mm in zip(logs, mants))
    return -4.0 * ctx.beta * ctx.beta_f**3 * acc * math.exp(lmax)


def lattice_spectrum(
    latt: VortexLattice, detunings, ctx: PhysicalContext
) -> list[tuple[float, float]]:
    """Outcoupling rate J_latt versus rf detuning (Hz).

    J_latt(E) is the weighted incoherent sum of the circular multipole
    currents J_mm(E + m hbar Omega_rot); the vortex structure is not visible
    in this integrated quantity.
    """
    w = lattice_coeffs(latt)
    a = latt.width
    log_sum = _log_weight_norm(w, a)
    out = []
    for dnu in detunings:
        E = 2.0 * math.pi * ctx.hbar * float(dnu)
        logs = []
        for m, wm in enumerate(w):
            if wm == 0.0:
                continue
            e_m = E + m * ctx.hbar * latt.rot
            j_mm = gaussian_multipole_current(m, latt.n_atoms, latt.rabi, a, e_m, ctx)
            if j_mm <= 0.0:
                continue
            logs.append(
                gammaln(m + 1) + 2.0 * math.log(abs(wm)) + 2.0 * m * math.log(a)
                - log_sum + math.log(j_mm)
            )
        out.append((float(dnu), float(math.exp(logsumexp(logs))) if logs else 0.0))
    return out
