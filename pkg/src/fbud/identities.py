"""Product and averaging identities of the rotation-matrix algebra.

Each function evaluates both sides of one identity and returns them as a
``(lhs, rhs)`` pair so callers (tests, the ``verify`` command) can assert
agreement at their own tolerance. The identities underpin the closed-form
reduction of the orientation-averaged interference coefficient:

- ``coupled_d_product``: reduction of conj(D^l1) * D^l2 to single rotation
  matrices of rank J.
- ``coupled_helicity_product``: the rank-1 special case used for the photon
  polarization factors.
- ``projection_pair_sum``: the double projection sum that collapses to a
  Kronecker delta, selecting J = 2, M_J = 1.
- ``triple_rotation_average``: the SO(3) average of three rotation matrices
  expressed as a product of two 3j symbols (evaluated here by an exact
  tensor-product quadrature).
- ``rotated_harmonic``: consistency of the D matrices with the spherical
  harmonics under a frame rotation.
"""

from __future__ import annotations

import math

import numpy as np

from .angular import (
    EulerAngles,
    euler_to_matrix,
    spherical_harmonic,
    triangle_ok,
    wigner_3j,
    wigner_D,
)

__all__ = [
    "coupled_d_product",
    "coupled_helicity_product",
    "projection_pair_sum",
    "rotated_harmonic",
    "triple_rotation_average",
]


def coupled_d_product(
    l1: int, m1p: int, m1: int, l2: int, m2p: int, m2: int, euler: EulerAngles
) -> tuple[complex, complex]:
    """conj(D^l1_{m1' m1}) D^l2_{m2' m2} versus its single-matrix expansion.

    rhs = (-1)^{m1'-m1} sum_J (-1)^{M_J - M_J'} (2J+1)
          3j(l1 l2 J; -m1' m2' -M_J') 3j(l1 l2 J; -m1 m2 -M_J) D^J_{M_J' M_J}
    with M_J' = m2' - m1' and M_J = m2 - m1 forced by the 3j selection rules.
    """
    lhs = np.conj(wigner_D(l1, m1p, m1, euler)) * wigner_D(l2, m2p, m2, euler)

    mjp = m2p - m1p
    mj = m2 - m1
    rhs = 0.0 + 0.0j
    for big_j in range(abs(l1 - l2), l1 + l2 + 1):
        if abs(mjp) > big_j or abs(mj) > big_j:
            continue
        w1 = wigner_3j(l1, l2, big_j, -m1p, m2p, -mjp)
        w2 = wigner_3j(l1, l2, big_j, -m1, m2, -mj)
        if w1 == 0.0 or w2 == 0.0:
            continue
        phase = -1.0 if (mj - mjp) % 2 else 1.0
        rhs += phase * (2 * big_j + 1) * w1 * w2 * wigner_D(big_j, mjp, mj, euler)
    sign = -1.0 if (m1p - m1) % 2 else 1.0
    return lhs, sign * rhs


def coupled_helicity_product(
    k1p: int, s1: int, k2p: int, s2: int, euler: EulerAngles
) -> tuple[complex, complex]:
    """D^1_{k1' s1} D^1_{k2' s2} versus its rank-coupled expansion.

    rhs = sum_T (-1)^{M_T - M_T'} (2T+1)
          3j(1 1 T; k1' k2' -M_T') 3j(1 1 T; s1 s2 -M_T) D^T_{M_T' M_T}
    with M_T' = k1' + k2' and M_T = s1 + s2.
    """
    lhs = wigner_D(1, k1p, s1, euler) * wigner_D(1, k2p, s2, euler)

    mtp = k1p + k2p
    mt = s1 + s2
    rhs = 0.0 + 0.0j
    for big_t in range(0, 3):
        if abs(mtp) > big_t or abs(mt) > big_t:
            continue
        w1 = wigner_3j(1, 1, big_t, k1p, k2p, -mtp)
        w2 = wigner_3j(1, 1, big_t, s1, s2, -mt)
        if w1 == 0.0 or w2 == 0.0:
            continue
        phase = -1.0 if (mt - mtp) % 2 else 1.0
        rhs += phase * (2 * big_t + 1) * w1 * w2 * wigner_D(big_t, mtp, mt, euler)
    return lhs, rhs


def projection_pair_sum(l1: int, l2: int, big_j: int, mj: int) -> tuple[float, float]:
    """Explicit double projection sum versus its Kronecker-delta closed form.

    lhs = sum_{m1 m2} (-1)^{m2-m1} 3j(l1 l2 2; m1 -m2 +1) 3j(l1 l2 J; -m1 m2 -M_J)
    rhs = (-1)^{M_J} (-1)^{l1+l2+J} delta_{J,2} delta_{M_J,1} / (2J+1)

    The delta form implicitly carries the triangle condition on (l1, l2, J).
    """
    lhs = 0.0
    for m1 in range(-l1, l1 + 1):
        for m2 in range(-l2, l2 + 1):
            w1 = wigner_3j(l1, l2, 2, m1, -m2, 1)
            if w1 == 0.0:
                continue
            w2 = wigner_3j(l1, l2, big_j, -m1, m2, -mj)
            if w2 == 0.0:
                continue
            phase = -1.0 if (m2 - m1) % 2 else 1.0
            lhs += phase * w1 * w2

    rhs = 0.0
    if big_j == 2 and mj == 1 and triangle_ok(l1, l2, big_j):
        rhs = -1.0 if (mj + l1 + l2 + big_j) % 2 else 1.0
        rhs /= 2 * big_j + 1
    return lhs, rhs


def triple_rotation_average(
    mjp: int, kpp: int, lab_sign: int, big_t: int, mtp: int, mt: int,
    n_azimuthal: int = 8, n_polar: int = 6,
) -> tuple[complex, complex]:
    """SO(3) average of D^2_{M_J',+1} D^1_{-k'',s} D^T_{M_T',M_T} versus 3j x 3j.

    ``lab_sign`` is the lab-frame projection s = +1 or -1 of the rank-1 factor.
    The average (1/8pi^2) int da sinb db dg is evaluated with a uniform grid in
    alpha and gamma and Gauss-Legendre in cos(beta); the integrand is a
    trigonometric polynomial of azimuthal degree <= 5, so the default node
    counts are exact.

    rhs = 3j(2 1 T; M_J' -k'' M_T') * 3j(2 1 T; +1 s M_T)
    """
    if lab_sign not in (-1, 1):
        raise ValueError("lab_sign must be +1 or -1")

    alphas = 2.0 * math.pi * np.arange(n_azimuthal) / n_azimuthal
    gammas = alphas
    xs, ws = np.polynomial.legendre.leggauss(n_polar)
    betas = np.arccos(xs)

    lhs = 0.0 + 0.0j
    for b, wb in zip(betas, ws):
        for a in alphas:
            for g in gammas:
                e = EulerAngles(a, b, g)
                lhs += (
                    wb
                    * wigner_D(2, mjp, 1, e)
                    * wigner_D(1, -kpp, lab_sign, e)
                    * wigner_D(big_t, mtp, mt, e)
                )
    lhs /= 2.0 * n_azimuthal * n_azimuthal

    rhs = wigner_3j(2, 1, big_t, mjp, -kpp, mtp) * wigner_3j(2, 1, big_t, 1, lab_sign, mt)
    return lhs, complex(rhs)


def sweep_triple_rotation_average(n_azimuthal: int = 8, n_polar: int = 6) -> tuple[float, int]:
    """Worst deviation of :func:`triple_rotation_average` over all index choices.

    Covers M_J' in [-2, 2], k'' in [-1, 1], both lab signs, T in {0, 1, 2} and
    all (M_T', M_T); the rotation-matrix tables are built once on the shared
    grid, so the sweep is cheap. Returns (worst |lhs - rhs|, combinations).
    """
    alphas = 2.0 * math.pi * np.arange(n_azimuthal) / n_azimuthal
    gammas = alphas
    xs, ws = np.polynomial.legendre.leggauss(n_polar)
    betas = np.arccos(xs)

    from .angular import small_d_matrix

    tables = {}
    for j in (0, 1, 2):
        ms = np.arange(-j, j + 1)
        e_a = np.exp(-1j * np.outer(alphas, ms))
        e_g = np.exp(-1j * np.outer(gammas, ms))
        dj = small_d_matrix(j, betas)
        full = (
            e_a[:, None, None, :, None]
            * dj[None, :, None, :, :]
            * e_g[None, None, :, None, :]
        )
        tables[j] = full.reshape(-1, 2 * j + 1, 2 * j + 1)

    # Haar weights on the (alpha, beta, gamma) grid, flattened in table order.
    weights = (np.ones((n_azimuthal, n_polar, n_azimuthal)) * ws[None, :, None]).reshape(-1)
    weights = weights / (2.0 * n_azimuthal * n_azimuthal)

    worst = 0.0
    count = 0
    for mjp in range(-2, 3):
        left2 = tables[2][:, mjp + 2, 1 + 2]
        for kpp in (-1, 0, 1):
            for lab_sign in (-1, 1):
                left1 = tables[1][:, -kpp + 1, lab_sign + 1]
                base = weights * left2 * left1
                for big_t in (0, 1, 2):
                    for mtp in range(-big_t, big_t + 1):
                        for mt in range(-big_t, big_t + 1):
                            lhs = np.sum(base * tables[big_t][:, mtp + big_t, mt + big_t])
                            rhs = wigner_3j(2, 1, big_t, mjp, -kpp, mtp) * wigner_3j(
                                2, 1, big_t, 1, lab_sign, mt
                            )
                            worst = max(worst, abs(lhs - rhs))
                            count += 1
    return worst, count


def rotated_harmonic(
    l: int, mp: int, euler: EulerAngles, theta: float, phi: float
) -> tuple[complex, complex]:
    """Frame-rotation consistency of the D matrices with the harmonics.

    lhs = sum_m conj(D^l_{m' m}(euler)) Y_{lm}(theta, phi)
    rhs = Y_{lm'} evaluated at the direction R(euler) @ p, where p is the unit
          vector with polar angles (theta, phi) and R = Rz(a) Ry(b) Rz(g).
    """
    lhs = sum(
        np.conj(wigner_D(l, mp, m, euler)) * spherical_harmonic(l, m, theta, phi)
        for m in range(-l, l + 1)
    )
    p = np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )
    q = euler_to_matrix(euler) @ p
    theta_q = math.acos(min(1.0, max(-1.0, q[2])))
    phi_q = math.atan2(q[1], q[0])
    rhs = spherical_harmonic(l, mp, theta_q, phi_q)
    return lhs, rhs
