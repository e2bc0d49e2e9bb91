"""Closed-form interference coefficient and the FBUD asymmetry law.

The orientation-averaged distribution carries a combined forward-backward
(+/-z) and up-down (+/-y) asymmetry driven purely by the interference of the
one- and two-photon routes. It lives in the (L, M) = (2, +/-1) coefficients,

    B_{2,+1}(phi) = C e^{-2i phi} - conj(C) e^{+2i phi},
    B_{2,-1}(phi) = -conj(B_{2,+1}(phi)),

and the angular observable assembled from that pair is

    FBUD(theta_p, phi_p) = A cos(theta_p) sin(theta_p) sin(phi_p) sin(2 phi - delta)

with A e^{i delta} = sqrt(30/pi) * C: the geometric factor sqrt(30/pi) that
converts the harmonic pair into the cos*sin*sin surface is absorbed into the
coefficient. :func:`analytic_A` returns that absorbed form, evaluated in
closed form by contracting the amplitude tensors with 3j symbols:

    A_coef = (5/8) ex ey^2 sum_{l1 l2} sqrt((2l1+1)(2l2+1)) i^{l1+l2} (-1)^{l2}
             3j(l1 l2 2; 0 0 0)
             sum_{m1' k1' k2' k''} (-1)^{m1'} conj(d_{l2 m2' k''}) t_{l1 m1' k1' k2'}
             3j(l1 l2 2; -m1' m2' k1'+k2'-k'')
             3j(2 1 2; m2'-m1' -k'' k1'+k2')
             3j(1 1 2; k1' k2' -(k1'+k2'))

with m2' = m1' + k'' - k1' - k2' fixed by projection conservation. The
parity symbol 3j(l1 l2 2; 000) kills odd l1 + l2, so only partial waves of
equal parity interfere, and the middle 3j symbol is antisymmetric under
reflection of all projections, which makes the coefficient vanish for
amplitude tensors with the achiral symmetry d_{l,m',k'} = d_{l,-m',-k'} and
flip sign under the enantiomer map. The whole coefficient scales exactly as
ex * ey^2.

Every numeric B_{2,+1} produced by the brute-force quadrature satisfies

    B_{2,+1}(phi) = (A_coef e^{-2i phi} - conj(A_coef) e^{2i phi}) / FBUD_PREFACTOR,

which is the cross-check exercised by the acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplitudes import AmplitudeSet
from .angular import triangle_ok, wigner_3j
from .dynamics import EmissionDirection

__all__ = [
    "FBUD_PREFACTOR",
    "AsymmetryCoefficient",
    "analytic_A",
    "b21_of_phi",
    "b2minus1_of_phi",
    "bracket_constant",
    "fbud_value",
]

# Geometric factor 2*sqrt(15/2pi) = sqrt(30/pi) relating the (2, +/-1)
# harmonic pair to the cos(theta) sin(theta) sin(phi_p) surface; absorbed
# into the coefficient returned by analytic_A.
FBUD_PREFACTOR = math.sqrt(30.0 / math.pi)

# Relative threshold below which the phase of a vanishing coefficient is
# reported as undefined.
_DELTA_FLOOR = 1e-14

_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)  # i^n for n mod 4


@dataclass(frozen=True)
class AsymmetryCoefficient:
    """Complex interference coefficient A e^{i delta}.

    ``scale`` is the reference magnitude used to decide whether the phase is
    meaningful; a coefficient with |value| < 1e-14 * scale reports
    ``delta = None``.
    """

    value: complex
    scale: float = 0.0

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def delta(self) -> float | None:
        if self.magnitude == 0.0 or self.magnitude < _DELTA_FLOOR * self.scale:
            return None
        d = math.atan2(self.value.imag, self.value.real)
        if d <= -math.pi:
            d += 2.0 * math.pi
        return d

    @classmethod
    def from_polar(cls, magnitude: float, delta: float) -> "AsymmetryCoefficient":
        if magnitude < 0:
            raise ValueError("magnitude must be non-negative")
        return cls(magnitude * complex(math.cos(delta), math.sin(delta)))


def bracket_constant() -> float:
    """The fixed 3j contraction appearing in the closed-form reduction.

    Evaluates -3j(2 1 2; 1 -1 0) * [3j(1 1 2; 1 -1 0) + 3j(1 1 2; -1 1 0)]
    + 3j(2 1 2; 1 1 -2) * 3j(1 1 2; -1 -1 2), which equals 2 / (5 sqrt 3).
    Any change of 3j or phase convention breaks this value, so it pins the
    conventions of the whole package.
    """
    return -wigner_3j(2, 1, 2, 1, -1, 0) * (
        wigner_3j(1, 1, 2, 1, -1, 0) + wigner_3j(1, 1, 2, -1, 1, 0)
    ) + wigner_3j(2, 1, 2, 1, 1, -2) * wigner_3j(1, 1, 2, -1, -1, 2)


def analytic_A(amps: AmplitudeSet, ex: float, ey: float) -> AsymmetryCoefficient:
    """Closed-form interference coefficient for the given field amplitudes.

    Terms violating the projection constraint m2' - m1' = k'' - k1' - k2' or
    any triangle rule contribute exactly zero; phase factors are evaluated
    with integer arithmetic, so parity cancellations are exact.
    """
    lmax = amps.lmax
    d_vals = amps.one_photon.values
    t_vals = amps.two_photon.values

    ks = (-1, 0, 1)
    total = 0.0 + 0.0j
    for l1 in range(lmax + 1):
        for l2 in range(lmax + 1):
            if (l1 + l2) % 2 or not triangle_ok(l1, l2, 2):
                continue
            w_parity = wigner_3j(l1, l2, 2, 0, 0, 0)
            if w_parity == 0.0:
                continue
            pref = (
                math.sqrt((2 * l1 + 1) * (2 * l2 + 1))
                * _I_POW[(l1 + l2) % 4]
                * (-1.0 if l2 % 2 else 1.0)
                * w_parity
            )
            inner = 0.0 + 0.0j
            for k1 in ks:
                for k2 in ks:
                    w_pol = wigner_3j(1, 1, 2, k1, k2, -(k1 + k2))
                    if w_pol == 0.0:
                        continue
                    for kpp in ks:
                        shift = kpp - k1 - k2
                        if abs(shift) > 2:
                            continue
                        w_mid = wigner_3j(2, 1, 2, shift, -kpp, k1 + k2)
                        if w_mid == 0.0:
                            continue
                        for m1p in range(-l1, l1 + 1):
                            m2p = m1p + shift
                            if abs(m2p) > l2:
                                continue
                            w_proj = wigner_3j(l1, l2, 2, -m1p, m2p, k1 + k2 - kpp)
                            if w_proj == 0.0:
                                continue
                            term = (
                                np.conj(d_vals[l2, m2p + lmax, kpp + 1])
                                * t_vals[l1, m1p + lmax, k1 + 1, k2 + 1]
                                * (w_proj * w_mid * w_pol)
                            )
                            inner += -term if m1p % 2 else term
            total += pref * inner

    coupling = 0.625 * ex * ey**2  # 5/8
    scale = (
        abs(coupling)
        * math.sqrt(float(np.sum(np.abs(d_vals) ** 2) * np.sum(np.abs(t_vals) ** 2)))
    )
    return AsymmetryCoefficient(complex(coupling * total), scale=scale)


def b21_of_phi(coeff: AsymmetryCoefficient, phi: float) -> complex:
    """C e^{-2i phi} - conj(C) e^{+2i phi} for C = coeff.value.

    Purely imaginary: equals -2i A sin(2 phi - delta). The coefficient is
    taken at face value; feed a quadrature-normalized coefficient to get the
    quadrature-normalized B_{2,+1} (see FBUD_PREFACTOR).
    """
    c = coeff.value
    rot = np.exp(-2j * phi)
    return complex(c * rot - np.conj(c * rot))


def b2minus1_of_phi(coeff: AsymmetryCoefficient, phi: float) -> complex:
    """Companion coefficient B_{2,-1} = -conj(B_{2,+1})."""
    return complex(-np.conj(b21_of_phi(coeff, phi)))


def fbud_value(coeff: AsymmetryCoefficient, phi: float, direction: EmissionDirection) -> float:
    """FBUD(theta_p, phi_p) = A cos(theta_p) sin(theta_p) sin(phi_p) sin(2 phi - delta).

    Evaluated as -Im(C e^{-2i phi}) * geometry, which is identical for
    C = A e^{i delta} and remains well defined when A = 0. No additional
    prefactor is applied: the geometric constant lives inside the coefficient.
    """
    c = coeff.value
    phase_part = -(c * np.exp(-2j * phi)).imag
    return float(
        phase_part
        * math.cos(direction.theta_p)
        * math.sin(direction.theta_p)
        * math.sin(direction.phi_p)
    )
