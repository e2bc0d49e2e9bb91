"""Phase-controlled forward-backward/up-down photoemission asymmetry toolkit.

Simulates the interference between one-photon (frequency 2w, x-polarized) and
two-photon (frequency w, y-polarized) ionization of randomly oriented chiral
molecules, and validates the closed-form interference coefficient against a
brute-force orientation-averaging quadrature.
"""

from .amplitudes import (
    AmplitudeSet,
    OnePhotonAmplitudes,
    TwoPhotonAmplitudes,
    achiralize,
    enantiomer,
    load_amplitudes,
    random_amplitudes,
    save_amplitudes,
)
from .analytic import (
    FBUD_PREFACTOR,
    AsymmetryCoefficient,
    analytic_A,
    b21_of_phi,
    b2minus1_of_phi,
    bracket_constant,
    fbud_value,
)
from .angular import (
    EulerAngles,
    spherical_harmonic,
    wigner_3j,
    wigner_D,
    wigner_small_d,
    ylm_product_expand,
)
from .averaging import (
    AsymmetryFit,
    BlmExpansion,
    QuadratureSpec,
    blm_phase_scan,
    extract_A_delta_numeric,
    orientation_averaged_blm,
    reconstruct_interference_coefficient,
)
from .dynamics import (
    EmissionDirection,
    FieldConfig,
    field_trajectory,
    fixed_orientation_dcs,
    total_amplitude,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSet",
    "AsymmetryCoefficient",
    "AsymmetryFit",
    "BlmExpansion",
    "EmissionDirection",
    "EulerAngles",
    "FBUD_PREFACTOR",
    "FieldConfig",
    "OnePhotonAmplitudes",
    "QuadratureSpec",
    "TwoPhotonAmplitudes",
    "achiralize",
    "analytic_A",
    "b21_of_phi",
    "b2minus1_of_phi",
    "blm_phase_scan",
    "bracket_constant",
    "enantiomer",
    "extract_A_delta_numeric",
    "fbud_value",
    "field_trajectory",
    "fixed_orientation_dcs",
    "load_amplitudes",
    "orientation_averaged_blm",
    "random_amplitudes",
    "reconstruct_interference_coefficient",
    "save_amplitudes",
    "spherical_harmonic",
    "total_amplitude",
    "wigner_3j",
    "wigner_D",
    "wigner_small_d",
    "ylm_product_expand",
]
