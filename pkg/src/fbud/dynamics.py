"""Bichromatic field and the fixed-orientation ionization amplitude.

The driving field is

    E(t) = ex * cos(2 w t) x_hat + ey * cos(w t + phi) y_hat,

i.e. a 2w component polarized along x and a w component along y, with lab
phase ``phi`` between them. Ionization proceeds either by one 2w photon or by
two w photons into the same continuum energy; only the absorption parts of
the rotating-wave split field enter the perturbative amplitudes. In the
helicity basis e_+/- = -/+ (x_hat +/- i y_hat)/sqrt(2), the x component
couples through (-d_{+1} + d_{-1}) * ex / (2 sqrt 2) and each y photon
through (d_{+1} + d_{-1}) * i ey / (2 sqrt 2) * e^{-i phi}, which makes the
two-photon route carry the overall factor -e^{-2i phi} * ey^2 / 8.

For a molecule at Euler orientation (alpha, beta, gamma) and photoelectron
lab direction p_hat, the total amplitude is the coherent sum over partial
waves (l, m') of both routes, with the molecular-frame tensors rotated by
the D matrices and the partial wave transported to the lab frame:

    D_T = sum_{l m'} (-i)^l sum_m conj(D^l_{m',m}) Y_{lm}(p_hat)
          * [ ex/(2 sqrt 2) sum_k' (-D^1_{k',+1} + D^1_{k',-1}) d_{l m' k'}
              - e^{-2i phi} ey^2/8
                sum_{k1' k2'} (D^1_{k1',+1} + D^1_{k1',-1})
                              (D^1_{k2',+1} + D^1_{k2',-1}) t_{l m' k1' k2'} ]

The carrier frequency ``omega`` never enters D_T (energy conservation is
implicit in the tensors); it only sets the time axis of the plotted field
trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import AmplitudeSet
from .angular import EulerAngles, spherical_harmonic, wigner_D_matrix

__all__ = [
    "EmissionDirection",
    "FieldConfig",
    "field_trajectory",
    "fixed_orientation_dcs",
    "total_amplitude",
]

_MINUS_I_POW = (1 + 0j, -1j, -1 + 0j, 1j)  # (-i)^l for l mod 4


@dataclass(frozen=True)
class FieldConfig:
    """Amplitudes and relative phase of the two-color field.

    ``phi`` is stored unwrapped (compare mod 2pi when needed); ``omega`` is
    used only by :func:`field_trajectory`.
    """

    ex: float
    ey: float
    phi: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if self.ex < 0 or self.ey < 0:
            raise ValueError("field amplitudes must be non-negative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    def with_phi(self, phi: float) -> "FieldConfig":
        return FieldConfig(self.ex, self.ey, phi, self.omega)

    @property
    def phi_mod_2pi(self) -> float:
        return self.phi % (2.0 * math.pi)


@dataclass(frozen=True)
class EmissionDirection:
    """Photoelectron direction (theta_p, phi_p) in the laboratory frame."""

    theta_p: float
    phi_p: float

    def __post_init__(self):
        if not 0.0 <= self.theta_p <= math.pi:
            raise ValueError(f"theta_p={self.theta_p} outside [0, pi]")
        if not 0.0 <= self.phi_p < 2.0 * math.pi:
            raise ValueError(f"phi_p={self.phi_p} outside [0, 2pi)")


def total_amplitude(
    amps: AmplitudeSet,
    field: FieldConfig,
    orientation: EulerAngles,
    direction: EmissionDirection,
) -> complex:
    """Coherent one- plus two-photon ionization amplitude D_T.

    Linear in the one-photon tensor and in the two-photon tensor separately;
    the relative phase enters only through the factor e^{-2i phi} on the
    two-photon route.
    """
    lmax = amps.lmax
    d1 = wigner_D_matrix(1, orientation)  # indices [k'+1, k+1]
    # Field coupling vectors over molecular-frame polarization k'.
    one_vec = field.ex / (2.0 * math.sqrt(2.0)) * (-d1[:, 2] + d1[:, 0])
    u = d1[:, 2] + d1[:, 0]
    two_mat = (
        -np.exp(-2j * field.phi) * field.ey**2 / 8.0 * np.outer(u, u)
    )

    d = amps.one_photon.values
    t = amps.two_photon.values
    total = 0.0 + 0.0j
    for l in range(lmax + 1):
        dl_conj = np.conj(wigner_D_matrix(l, orientation))  # [m'+l, m+l]
        for mp in range(-l, l + 1):
            source = d[l, mp + lmax] @ one_vec + np.sum(t[l, mp + lmax] * two_mat)
            if source == 0:
                continue
            transport = sum(
                dl_conj[mp + l, m + l]
                * spherical_harmonic(l, m, direction.theta_p, direction.phi_p)
                for m in range(-l, l + 1)
            )
            total += _MINUS_I_POW[l % 4] * source * transport
    return complex(total)


def fixed_orientation_dcs(
    amps: AmplitudeSet,
    field: FieldConfig,
    orientation: EulerAngles,
    direction: EmissionDirection,
) -> float:
    """Differential emission probability 2 pi |D_T|^2 at fixed orientation."""
    amp = total_amplitude(amps, field, orientation, direction)
    return 2.0 * math.pi * (amp.real**2 + amp.imag**2)


def field_trajectory(field: FieldConfig, n_samples: int) -> list[tuple[float, float, float]]:
    """Sample (t, Ex(t), Ey(t)) over one fundamental period T = 2 pi / omega.

    Samples are uniform and inclusive of both endpoints, so the first and
    last points coincide and the returned polyline is closed. The traced
    (Ex, Ey) curve is the Lissajous figure of the two-color field: a
    butterfly at phi = +/- pi/4, a horseshoe at phi in {0, +/- pi/2}.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    period = 2.0 * math.pi / field.omega
    out = []
    for i in range(n_samples):
        t = period * i / (n_samples - 1)
        ex_t = field.ex * math.cos(2.0 * field.omega * t)
        ey_t = field.ey * math.cos(field.omega * t + field.phi)
        out.append((t, ex_t, ey_t))
    return out
