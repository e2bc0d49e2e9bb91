"""Angular-momentum algebra in a fixed z-y-z convention.

Conventions (pinned by the test suite, do not change independently):

- Euler rotations are z-y-z with angles ``(alpha, beta, gamma)``:

      D^j_{m'm}(alpha, beta, gamma) = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma)

  where ``d^j`` is the real reduced rotation matrix, e.g. ``d^1_{00} = cos(beta)``.
- Complex spherical harmonics carry the Condon-Shortley phase, so that
  ``Y_{2,+1}(theta, phi) = -(1/2) sqrt(15/2pi) cos(theta) sin(theta) e^{+i phi}``.
- 3j symbols follow the standard (Condon-Shortley consistent) sign convention;
  the Racah single-sum formula is evaluated on precomputed log-factorials in
  double precision. Integer angular momenta only.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import sph_harm_y

__all__ = [
    "EulerAngles",
    "compose_euler",
    "euler_to_matrix",
    "matrix_to_euler",
    "spherical_harmonic",
    "wigner_3j",
    "wigner_D",
    "wigner_D_matrix",
    "wigner_small_d",
    "small_d_matrix",
    "ylm_product_expand",
]

# Log-factorials up to 128 cover all triangle sums for j <= 20 (j1+j2+j3+1 <= 61).
_LOG_FACT = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, 129, dtype=float)))))
_MAX_J = 20

_TWO_PI = 2.0 * math.pi


def _require_int(name: str, value) -> int:
    if isinstance(value, bool) or round(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _validate_jm(j: int, *ms: int) -> None:
    if j < 0:
        raise ValueError(f"angular momentum must be non-negative, got j={j}")
    if j > _MAX_J:
        raise ValueError(f"angular momentum j={j} exceeds supported maximum {_MAX_J}")
    for m in ms:
        if abs(m) > j:
            raise ValueError(f"projection |m|={abs(m)} exceeds j={j}")


def triangle_ok(j1: int, j2: int, j3: int) -> bool:
    """True when (j1, j2, j3) can couple: |j1 - j2| <= j3 <= j1 + j2."""
    return abs(j1 - j2) <= j3 <= j1 + j2


@dataclass(frozen=True)
class EulerAngles:
    """z-y-z Euler angles with alpha, gamma in [0, 2pi) and beta in [0, pi]."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < _TWO_PI):
            raise ValueError(f"alpha={self.alpha} outside [0, 2pi)")
        if not (0.0 <= self.beta <= math.pi):
            raise ValueError(f"beta={self.beta} outside [0, pi]")
        if not (0.0 <= self.gamma < _TWO_PI):
            raise ValueError(f"gamma={self.gamma} outside [0, 2pi)")

    @classmethod
    def from_unwrapped(cls, alpha: float, beta: float, gamma: float) -> "EulerAngles":
        """Wrap alpha and gamma into [0, 2pi); beta must already lie in [0, pi]."""
        return cls(alpha % _TWO_PI, beta, gamma % _TWO_PI)

    @classmethod
    def identity(cls) -> "EulerAngles":
        return cls(0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Wigner 3j
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3) for integer arguments.

    Returns 0.0 when the triangle condition fails or m1 + m2 + m3 != 0;
    raises ValueError for negative j or |m| > j.
    """
    j1 = _require_int("j1", j1)
    j2 = _require_int("j2", j2)
    j3 = _require_int("j3", j3)
    m1 = _require_int("m1", m1)
    m2 = _require_int("m2", m2)
    m3 = _require_int("m3", m3)
    _validate_jm(j1, m1)
    _validate_jm(j2, m2)
    _validate_jm(j3, m3)

    if m1 + m2 + m3 != 0 or not triangle_ok(j1, j2, j3):
        return 0.0

    # Racah single-sum formula.
    lf = _LOG_FACT
    log_delta = 0.5 * (
        lf[j1 + j2 - j3] + lf[j1 - j2 + j3] + lf[-j1 + j2 + j3] - lf[j1 + j2 + j3 + 1]
    )
    log_norm = 0.5 * (
        lf[j1 + m1] + lf[j1 - m1] + lf[j2 + m2] + lf[j2 - m2] + lf[j3 + m3] + lf[j3 - m3]
    )

    t_min = max(0, j2 - j3 - m1, j1 - j3 + m2)
    t_max = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for t in range(t_min, t_max + 1):
        log_den = (
            lf[t]
            + lf[t - (j2 - j3 - m1)]
            + lf[t - (j1 - j3 + m2)]
            + lf[j1 + j2 - j3 - t]
            + lf[j1 - m1 - t]
            + lf[j2 + m2 - t]
        )
        term = math.exp(log_delta + log_norm - log_den)
        total += -term if t % 2 else term

    sign = -1.0 if (j1 - j2 - m3) % 2 else 1.0
    return sign * total


# ---------------------------------------------------------------------------
# Reduced rotation matrices d^j(beta)
# ---------------------------------------------------------------------------

def wigner_small_d(j: int, m_prime: int, m: int, beta: float) -> float:
    """Reduced rotation matrix element d^j_{m'm}(beta).

    Convention: d^1_{00}(beta) = cos(beta), d^j_{m'm}(0) = delta_{m'm}.
    """
    j = _require_int("j", j)
    m_prime = _require_int("m_prime", m_prime)
    m = _require_int("m", m)
    _validate_jm(j, m_prime, m)

    c = math.cos(0.5 * beta)
    s = math.sin(0.5 * beta)
    return _small_d_sum(j, m_prime, m, c, s)


def _small_d_sum(j, mp, m, c, s):
    lf = _LOG_FACT
    pref = 0.5 * (lf[j + mp] + lf[j - mp] + lf[j + m] + lf[j - m])
    k_min = max(0, m - mp)
    k_max = min(j + m, j - mp)
    total = 0.0
    for k in range(k_min, k_max + 1):
        log_den = lf[j + m - k] + lf[k] + lf[mp - m + k] + lf[j - mp - k]
        mag = math.exp(pref - log_den)
        term = mag * c ** (2 * j + m - mp - 2 * k) * s ** (mp - m + 2 * k)
        total += -term if (mp - m + k) % 2 else term
    return total


def small_d_matrix(j: int, beta) -> np.ndarray:
    """Full reduced matrix d^j(beta), rows/columns ordered m = -j..j.

    ``beta`` may be a scalar or an array; the matrix axes are appended last,
    so the result has shape ``beta.shape + (2j+1, 2j+1)``.
    """
    j = _require_int("j", j)
    if j < 0:
        raise ValueError("j must be non-negative")
    beta_arr = np.asarray(beta, dtype=float)
    c = np.cos(0.5 * beta_arr)
    s = np.sin(0.5 * beta_arr)
    out = np.zeros(beta_arr.shape + (2 * j + 1, 2 * j + 1))
    for mp in range(-j, j + 1):
        for m in range(-j, j + 1):
            out[..., mp + j, m + j] = _small_d_sum(j, mp, m, c, s)
    return out


# ---------------------------------------------------------------------------
# Full rotation matrices D^j(alpha, beta, gamma)
# ---------------------------------------------------------------------------

def wigner_D(j: int, m_prime: int, m: int, euler: EulerAngles) -> complex:
    """Rotation matrix element D^j_{m'm} = e^{-i m' alpha} d^j_{m'm}(beta) e^{-i m gamma}."""
    d = wigner_small_d(j, m_prime, m, euler.beta)
    return d * np.exp(-1j * (m_prime * euler.alpha + m * euler.gamma))


def wigner_D_matrix(j: int, euler: EulerAngles) -> np.ndarray:
    """Full (2j+1) x (2j+1) rotation matrix, rows/columns ordered m = -j..j."""
    ms = np.arange(-j, j + 1)
    d = small_d_matrix(j, euler.beta)
    return (
        np.exp(-1j * ms * euler.alpha)[:, None] * d * np.exp(-1j * ms * euler.gamma)[None, :]
    )


# ---------------------------------------------------------------------------
# Spherical harmonics
# ---------------------------------------------------------------------------

def spherical_harmonic(l: int, m: int, theta, phi):
    """Complex spherical harmonic Y_{lm}(theta, phi), Condon-Shortley phase.

    Accepts scalar or broadcastable array angles.
    """
    l = _require_int("l", l)
    m = _require_int("m", m)
    _validate_jm(l, m)
    val = sph_harm_y(l, m, theta, phi)
    if np.isscalar(theta) and np.isscalar(phi):
        return complex(val)
    return np.asarray(val, dtype=complex)


def ylm_product_expand(l1: int, m1: int, l2: int, m2: int) -> list[tuple[int, int, float]]:
    """Expand Y_{l1 m1}(u) * conj(Y_{l2 m2}(u)) over conjugated harmonics.

    Returns the nonzero coefficients c_{LM} of

        Y_{l1 m1} Y*_{l2 m2} = sum_{LM} c_{LM} Y*_{LM},

    as a list of (L, M, c) with M = m2 - m1 forced by projection conservation:

        c = (-1)^{m2} sqrt[(2l1+1)(2l2+1)(2L+1)/(4pi)]
            * 3j(l1 l2 L; 0 0 0) * 3j(l1 l2 L; m1 -m2 M)
    """
    l1 = _require_int("l1", l1)
    m1 = _require_int("m1", m1)
    l2 = _require_int("l2", l2)
    m2 = _require_int("m2", m2)
    _validate_jm(l1, m1)
    _validate_jm(l2, m2)

    big_m = m2 - m1
    sign = -1.0 if m2 % 2 else 1.0
    out = []
    for big_l in range(abs(l1 - l2), l1 + l2 + 1):
        if abs(big_m) > big_l:
            continue
        w0 = wigner_3j(l1, l2, big_l, 0, 0, 0)
        if w0 == 0.0:
            continue
        wm = wigner_3j(l1, l2, big_l, m1, -m2, big_m)
        if wm == 0.0:
            continue
        coeff = sign * math.sqrt(
            (2 * l1 + 1) * (2 * l2 + 1) * (2 * big_l + 1) / (4.0 * math.pi)
        ) * w0 * wm
        out.append((big_l, big_m, coeff))
    return out


# ---------------------------------------------------------------------------
# SO(3) helpers (used by composition and convention tests)
# ---------------------------------------------------------------------------

def euler_to_matrix(euler: EulerAngles) -> np.ndarray:
    """Cartesian rotation matrix R_z(alpha) R_y(beta) R_z(gamma)."""
    ca, sa = math.cos(euler.alpha), math.sin(euler.alpha)
    cb, sb = math.cos(euler.beta), math.sin(euler.beta)
    cg, sg = math.cos(euler.gamma), math.sin(euler.gamma)
    rz_a = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    ry_b = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    rz_g = np.array([[cg, -sg, 0.0], [sg, cg, 0.0], [0.0, 0.0, 1.0]])
    return rz_a @ ry_b @ rz_g


def matrix_to_euler(r: np.ndarray) -> EulerAngles:
    """Invert :func:`euler_to_matrix`. Gimbal-locked cases put the spin in alpha."""
    cb = min(1.0, max(-1.0, float(r[2, 2])))
    beta = math.acos(cb)
    if abs(cb) > 1.0 - 1e-12:
        # beta ~ 0 or pi: only alpha +/- gamma is determined; set gamma = 0.
        if cb > 0:
            alpha = math.atan2(r[1, 0], r[0, 0])
        else:
            alpha = math.atan2(r[1, 0], -r[0, 0])
        gamma = 0.0
    else:
        alpha = math.atan2(r[1, 2], r[0, 2])
        gamma = math.atan2(r[2, 1], -r[2, 0])
    return EulerAngles.from_unwrapped(alpha, beta, gamma)


def compose_euler(first: EulerAngles, second: EulerAngles) -> EulerAngles:
    """Euler angles of the composed rotation R(first) @ R(second)."""
    return matrix_to_euler(euler_to_matrix(first) @ euler_to_matrix(second))
