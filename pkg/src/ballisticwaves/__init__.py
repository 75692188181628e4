"""Ballistic multipole matter waves in a uniform force field.

Exact and asymptotic Green functions, current densities and total currents
for quantum point sources of definite angular momentum accelerated by a
uniform force, with applications to photodetachment microscopy and to
atom-laser beams outcoupled from (vortex-bearing) Bose-Einstein condensates.
"""

from .airyq import QArgs, q, q0, q_asym_origin, q_grad, q_neg, qi, qi_asym, qi_half
from .ballistic import (
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    G_EARTH,
    HBAR,
    RB87_MASS,
    DetectorGrid,
    PhysicalContext,
    SourceSuperposition,
    current_density,
    current_density_z_far,
    green_lm,
    green_lm_far,
    green_lm_grad,
    green_swave,
    photodetachment_profile,
    photodetachment_spectrum,
    polarization_to_source,
    scattering_wave,
    staircase_energies,
    total_current_asym,
    total_current_matrix,
)
from .atomlaser import (
    GaussianSource,
    VortexLattice,
    beam_density_grid,
    beam_psi_00,
    beam_psi_1m,
    beam_psi_perp,
    farfield_density,
    gaussian_multipole_current,
    lattice_beam,
    lattice_beam_grid,
    lattice_coeffs,
    lattice_norm,
    lattice_spectrum,
    perp_vortex_current,
    rb87_context,
    triangular_vortex_positions,
    virtual_strength,
    vortex_current_1m,
)
from .errors import (
    BallisticError,
    DomainError,
    RegimeError,
    SingularityError,
    StabilityError,
    StabilityWarning,
    UnsupportedOrderError,
)
from .freespace import (
    RadialSourceProfile,
    extended_source_strength,
    free_total_current,
    green_free,
    green_free_lm,
    wigner_current,
)
from .harmonics import (
    MultipoleIndex,
    klm_coeffs,
    klm_eval,
    klm_general_translate,
    klm_operator_on_airy,
    klm_translate_z,
    translation_coeff_c,
    translation_coeff_t,
)
from .semiclassical import (
    ScreenPoint,
    classical_cross_section,
    classical_radius,
    closed_orbit_action,
    paraxial_tunneling_profile,
    reduced_action,
    semiclassical_profile,
    tunneling_profile,
    tunneling_radius,
    two_path_profile,
)
from .specfun import (
    airy,
    airy_ci,
    airy_deriv_n,
    airy_integral,
    airy_prime_zero,
    airy_scaled,
    airy_zero,
    assoc_legendre_abs2,
)

__version__ = "0.1.0"
