"""Brute-force orientation averaging of the emission distribution.

This module is the model-independent oracle of the package: it evaluates the
fixed-orientation distribution 2 pi |D_T|^2 on a tensor-product grid over
molecular orientations (alpha, beta, gamma) and emission directions
(theta_p, phi_p), averages over SO(3) with the normalized Haar measure
(1/8pi^2) int da sin(b) db dg, and projects onto spherical harmonics:

    B_LM = < int dp Y_LM(p) * 2 pi |D_T(orientation, p)|^2 >_orientations

Quadrature exactness
--------------------
The integrand is a trigonometric polynomial in each periodic variable and a
polynomial in cos(beta) and cos(theta_p) after azimuthal projection, with
degrees bounded by the tensor cutoff lmax and the fixed expansion limit
L <= 4:

- Fourier degree <= 2*lmax + 4 in alpha and in gamma,
- Fourier degree <= 2*lmax + 4 in phi_p (emission content 2*lmax plus the
  projector's |M| <= 4),
- polynomial degree <= 2*lmax + 4 in cos(beta) and cos(theta_p) for the terms
  that survive the azimuthal projections.

Uniform grids integrate Fourier modes exactly up to |k| < n, and n-point
Gauss-Legendre handles polynomial degree 2n - 1, so the node requirements are

    n_alpha, n_gamma, n_phi_p >= 2*lmax + 5,      n_beta, n_theta >= lmax + 3.

Under-resolved specs are rejected up front rather than silently aliased, and
any grid at or above these bounds returns the same coefficients to roundoff.

Determinism
-----------
The orientation reduction is chunked into fixed-size blocks whose partial
sums are combined by an in-order pairwise reduction, so results are
bit-identical for any worker-thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .amplitudes import AmplitudeSet
from .angular import small_d_matrix
from scipy.special import sph_harm_y

__all__ = [
    "AsymmetryFit",
    "BLM_LMAX",
    "BlmExpansion",
    "QuadratureSpec",
    "blm_phase_scan",
    "extract_A_delta_numeric",
    "orientation_averaged_blm",
    "reconstruct_interference_coefficient",
]

BLM_LMAX = 4

# Orientation nodes per reduction block; fixed so that partial sums do not
# depend on the worker count.
_BLOCK = 256


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for the tensor-product orientation/sphere quadrature.

    ``n_alpha``, ``n_gamma`` and ``n_phi_p`` are equally spaced periodic
    grids; ``n_beta`` and ``n_theta`` are Gauss-Legendre node counts in
    cos(beta) and cos(theta_p).
    """

    n_alpha: int
    n_beta: int
    n_gamma: int
    n_theta: int
    n_phi_p: int

    def __post_init__(self):
        for name in ("n_alpha", "n_beta", "n_gamma", "n_theta", "n_phi_p"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")

    @classmethod
    def default_for(cls, lmax: int) -> "QuadratureSpec":
        """Exact grid with headroom: (2*lmax+10) azimuthal, (lmax+5) polar nodes."""
        return cls(
            n_alpha=2 * lmax + 10,
            n_beta=lmax + 5,
            n_gamma=2 * lmax + 10,
            n_theta=lmax + 5,
            n_phi_p=2 * lmax + 10,
        )

    def validate_for(self, lmax: int) -> None:
        """Raise ValueError if any grid is too coarse for exact integration."""
        azim_min = 2 * lmax + 5
        polar_min = lmax + 3
        problems = []
        for name in ("n_alpha", "n_gamma", "n_phi_p"):
            if getattr(self, name) < azim_min:
                problems.append(f"{name}={getattr(self, name)} < {azim_min}")
        for name in ("n_beta", "n_theta"):
            if getattr(self, name) < polar_min:
                problems.append(f"{name}={getattr(self, name)} < {polar_min}")
        if problems:
            raise ValueError(
                f"quadrature under-resolved for lmax={lmax}: " + ", ".join(problems)
            )

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(
            2 * self.n_alpha, 2 * self.n_beta, 2 * self.n_gamma,
            2 * self.n_theta, 2 * self.n_phi_p,
        )


@dataclass(frozen=True, eq=False)
class BlmExpansion:
    """Coefficients of dsigma/dOmega = sum_{L<=4, |M|<=L} B_LM conj(Y_LM)."""

    coefficients: np.ndarray = field(repr=False)  # complex, shape (5, 9), M offset +4

    def __post_init__(self):
        arr = np.ascontiguousarray(self.coefficients, dtype=complex)
        if arr.shape != (BLM_LMAX + 1, 2 * BLM_LMAX + 1):
            raise ValueError(f"coefficient array must have shape (5, 9), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)

    @property
    def lmax(self) -> int:
        return BLM_LMAX

    def get(self, L: int, M: int) -> complex:
        if not (0 <= L <= BLM_LMAX and abs(M) <= L):
            raise ValueError(f"invalid (L, M) = ({L}, {M})")
        return complex(self.coefficients[L, M + BLM_LMAX])

    def items(self):
        """Yield (L, M, value) over all valid indices."""
        for L in range(BLM_LMAX + 1):
            for M in range(-L, L + 1):
                yield L, M, self.get(L, M)

    def scale(self) -> float:
        """|B_00|, the natural magnitude reference of the expansion."""
        return abs(self.get(0, 0))

    def hermiticity_deviation(self) -> float:
        """max |B_{L,-M} - (-1)^M conj(B_{L,M})| over all indices."""
        worst = 0.0
        for L in range(BLM_LMAX + 1):
            for M in range(0, L + 1):
                sign = -1.0 if M % 2 else 1.0
                worst = max(
                    worst, abs(self.get(L, -M) - sign * np.conj(self.get(L, M)))
                )
        return worst

    def reconstruct(self, theta, phi):
        """Real part of sum B_LM conj(Y_LM) at broadcastable angles."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
        for L, M, b in self.items():
            if b != 0:
                out += b * np.conj(sph_harm_y(L, M, theta, phi))
        return out.real if out.shape else float(out.real)

    def fbud_part(self, theta, phi):
        """Real part of B_{2,+1} conj(Y_{2,+1}) + B_{2,-1} conj(Y_{2,-1})."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        out = self.get(2, 1) * np.conj(sph_harm_y(2, 1, theta, phi))
        out = out + self.get(2, -1) * np.conj(sph_harm_y(2, -1, theta, phi))
        return out.real if out.shape else float(out.real)


@dataclass(frozen=True)
class AsymmetryFit:
    """Result of fitting Im B_{2,+1}(phi) to -2 A sin(2 phi - delta).

    ``delta`` is None when the fitted amplitude sits below the noise floor
    (1e-10 of |B_00|), in which case the phase is physically undefined.
    ``model_ok`` is False when the fit residual exceeds its tolerance, which
    signals that the samples do not follow the two-path interference law.
    """

    amplitude: float
    delta: float | None
    residual: float
    b00_scale: float
    model_ok: bool
    phis: tuple[float, ...]
    b21_samples: tuple[complex, ...]


# ---------------------------------------------------------------------------
# Grid machinery
# ---------------------------------------------------------------------------

class _Grids:
    """Precomputed orientation and sphere grids for one (lmax, quad) pair."""

    def __init__(self, lmax: int, quad: QuadratureSpec):
        self.lmax = lmax
        self.quad = quad

        alphas = 2.0 * math.pi * np.arange(quad.n_alpha) / quad.n_alpha
        gammas = 2.0 * math.pi * np.arange(quad.n_gamma) / quad.n_gamma
        beta_x, beta_w = np.polynomial.legendre.leggauss(quad.n_beta)
        betas = np.arccos(beta_x)

        # Normalized Haar weights: (1/2pi da)(1/2 sinb db)(1/2pi dg), flattened
        # in C order over (alpha, beta, gamma).
        w = np.ones((quad.n_alpha, quad.n_beta, quad.n_gamma))
        w *= beta_w[None, :, None] / 2.0
        w /= quad.n_alpha * quad.n_gamma
        self.orient_weights = w.reshape(-1)
        self.n_orient = self.orient_weights.size

        # Rotation matrices D^j on the flattened orientation grid.
        self.d_matrices: dict[int, np.ndarray] = {}
        for j in range(0, max(lmax, 1) + 1):
            ms = np.arange(-j, j + 1)
            e_alpha = np.exp(-1j * np.outer(alphas, ms))  # (n_alpha, 2j+1)
            e_gamma = np.exp(-1j * np.outer(gammas, ms))  # (n_gamma, 2j+1)
            dj = small_d_matrix(j, betas)  # (n_beta, 2j+1, 2j+1)
            full = (
                e_alpha[:, None, None, :, None]
                * dj[None, :, None, :, :]
                * e_gamma[None, None, :, None, :]
            )
            self.d_matrices[j] = full.reshape(self.n_orient, 2 * j + 1, 2 * j + 1)

        # Sphere grid, flattened in C order over (theta, phi_p).
        theta_x, theta_w = np.polynomial.legendre.leggauss(quad.n_theta)
        thetas = np.arccos(theta_x)
        phis = 2.0 * math.pi * np.arange(quad.n_phi_p) / quad.n_phi_p
        tt, pp = np.meshgrid(thetas, phis, indexing="ij")
        self.n_sphere = tt.size

        ws = np.broadcast_to(theta_w[:, None], tt.shape) * (2.0 * math.pi / quad.n_phi_p)
        sphere_weights = ws.reshape(-1)

        # Emission harmonics Y_{lm}(p) for the amplitude transport.
        n_lm = (lmax + 1) ** 2
        self.y_emit = np.zeros((n_lm, self.n_sphere), dtype=complex)
        self.lm_index: list[tuple[int, int]] = []
        i = 0
        for l in range(lmax + 1):
            for m in range(-l, l + 1):
                self.y_emit[i] = sph_harm_y(l, m, tt, pp).reshape(-1)
                self.lm_index.append((l, m))
                i += 1

        # Projection harmonics Y_LM(p) * sphere weight for the B_LM extraction.
        self.proj = np.zeros(((BLM_LMAX + 1) * (2 * BLM_LMAX + 1), self.n_sphere), dtype=complex)
        for L in range(BLM_LMAX + 1):
            for M in range(-L, L + 1):
                row = L * (2 * BLM_LMAX + 1) + (M + BLM_LMAX)
                self.proj[row] = sph_harm_y(L, M, tt, pp).reshape(-1) * sphere_weights
        self.proj_t = np.ascontiguousarray(self.proj.T)


def _route_grids(amps: AmplitudeSet, ex: float, ey: float, grids: _Grids):
    """One-photon and two-photon amplitude grids P, Q of shape (n_orient, n_sphere).

    The total amplitude at relative phase phi is D_T = P - exp(-2i phi) Q.
    """
    lmax = amps.lmax
    d1 = grids.d_matrices[1]  # (n_orient, 3, 3), indices [k'+1, k+1]
    v = -d1[:, :, 2] + d1[:, :, 0]  # (n_orient, 3)
    u = d1[:, :, 2] + d1[:, :, 0]

    d_vals = amps.one_photon.values
    t_vals = amps.two_photon.values
    src_one = (ex / (2.0 * math.sqrt(2.0))) * np.einsum("ok,lmk->olm", v, d_vals)
    uu = np.einsum("oa,ob->oab", u, u)
    src_two = (ey**2 / 8.0) * np.einsum("oab,lmab->olm", uu, t_vals)

    n_lm = (lmax + 1) ** 2
    coeff_one = np.zeros((grids.n_orient, n_lm), dtype=complex)
    coeff_two = np.zeros((grids.n_orient, n_lm), dtype=complex)
    minus_i_pow = (1 + 0j, -1j, -1 + 0j, 1j)
    i = 0
    for l in range(lmax + 1):
        dl_conj = np.conj(grids.d_matrices[l])  # (n_orient, 2l+1, 2l+1)
        sl = slice(lmax - l, lmax + l + 1)
        phase = minus_i_pow[l % 4]
        coeff_one[:, i : i + 2 * l + 1] = phase * np.einsum(
            "opm,op->om", dl_conj, src_one[:, l, sl]
        )
        coeff_two[:, i : i + 2 * l + 1] = phase * np.einsum(
            "opm,op->om", dl_conj, src_two[:, l, sl]
        )
        i += 2 * l + 1

    p_grid = coeff_one @ grids.y_emit
    q_grid = coeff_two @ grids.y_emit
    return p_grid, q_grid


def _pairwise_sum(parts: list[np.ndarray]) -> np.ndarray:
    """In-order pairwise reduction; independent of how parts were produced."""
    items = list(parts)
    if not items:
        raise ValueError("nothing to reduce")
    while len(items) > 1:
        items = [
            items[i] + items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _project_blocks(p_grid, q_grid, phis, grids: _Grids, threads: int) -> np.ndarray:
    """B_LM coefficient table for each phi: shape (len(phis), 5, 9)."""
    n_orient = grids.n_orient
    starts = range(0, n_orient, _BLOCK)
    factors = np.exp(-2j * np.asarray(phis, dtype=float))

    def block_partial(start: int) -> np.ndarray:
        stop = min(start + _BLOCK, n_orient)
        pb = p_grid[start:stop]
        qb = q_grid[start:stop]
        wb = grids.orient_weights[start:stop]
        out = np.empty((len(factors), grids.proj.shape[0]), dtype=complex)
        for i, c in enumerate(factors):
            amp = pb - c * qb
            w = 2.0 * math.pi * (amp.real**2 + amp.imag**2)
            out[i] = wb @ (w @ grids.proj_t)
        return out

    if threads == 0:
        threads = os.cpu_count() or 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block_partial, starts))
    else:
        parts = [block_partial(s) for s in starts]

    flat = _pairwise_sum(parts)
    return flat.reshape(len(factors), BLM_LMAX + 1, 2 * BLM_LMAX + 1)


def _clean_coefficients(table: np.ndarray) -> np.ndarray:
    # Zero the slots with |M| > L, which carry no meaning.
    for L in range(BLM_LMAX + 1):
        for M in range(-BLM_LMAX, BLM_LMAX + 1):
            if abs(M) > L:
                table[..., L, M + BLM_LMAX] = 0.0
    return table


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def orientation_averaged_blm(
    amps: AmplitudeSet,
    field,
    quad: QuadratureSpec | None = None,
    threads: int = 1,
) -> BlmExpansion:
    """Orientation-averaged B_LM coefficients by exact tensor quadrature.

    Deterministic for fixed inputs; ``threads`` only distributes the fixed
    reduction blocks and never changes the result.
    """
    return blm_phase_scan(amps, field, [field.phi], quad=quad, threads=threads)[0]


def blm_phase_scan(
    amps: AmplitudeSet,
    field,
    phis,
    quad: QuadratureSpec | None = None,
    threads: int = 1,
) -> list[BlmExpansion]:
    """B_LM expansions for a list of relative phases, reusing the route grids.

    The one- and two-photon grids are phase-independent, so a scan costs one
    grid build plus a cheap recombination per phase. ``field.phi`` is ignored
    in favor of the explicit ``phis``.
    """
    if quad is None:
        quad = QuadratureSpec.default_for(amps.lmax)
    quad.validate_for(amps.lmax)
    phis = list(phis)
    if not phis:
        raise ValueError("phis must be non-empty")

    grids = _Grids(amps.lmax, quad)
    p_grid, q_grid = _route_grids(amps, field.ex, field.ey, grids)
    tables = _project_blocks(p_grid, q_grid, phis, grids, threads)
    tables = _clean_coefficients(tables)
    return [BlmExpansion(tables[i]) for i in range(len(phis))]


def reconstruct_interference_coefficient(
    b21_a: complex, phi_a: float, b21_b: complex, phi_b: float
) -> complex:
    """Interference coefficient of B_{2,+1}(phi) from two phase samples.

    Solves B_{2,+1}(phi) = C e^{-2i phi} - conj(C) e^{+2i phi} for the complex
    coefficient C, using the imaginary parts (the real parts vanish up to
    quadrature noise). Requires sin(2(phi_b - phi_a)) != 0.
    """
    det = math.sin(2.0 * (phi_b - phi_a))
    if abs(det) < 1e-12:
        raise ValueError("phase samples are degenerate mod pi")
    # Im B(phi) = 2 (Im C cos 2phi - Re C sin 2phi)
    mat = np.array(
        [
            [-2.0 * math.sin(2.0 * phi_a), 2.0 * math.cos(2.0 * phi_a)],
            [-2.0 * math.sin(2.0 * phi_b), 2.0 * math.cos(2.0 * phi_b)],
        ]
    )
    rhs = np.array([b21_a.imag, b21_b.imag])
    x, y = np.linalg.solve(mat, rhs)
    return complex(x, y)


def extract_A_delta_numeric(
    amps: AmplitudeSet,
    field_base,
    phis,
    quad: QuadratureSpec | None = None,
    threads: int = 1,
) -> AsymmetryFit:
    """Least-squares fit of the numeric Im B_{2,+1}(phi) to -2 A sin(2 phi - delta).

    Needs at least three phases that are distinct mod pi. Returns A >= 0 and
    delta in (-pi, pi] (or None below the noise floor); the maximum absolute
    fit residual is reported, and ``model_ok`` is False when it exceeds
    max(1e-8 * A, 1e-12 * |B_00|).
    """
    phis = [float(p) for p in phis]
    reduced = sorted(p % math.pi for p in phis)
    distinct = 0
    prev = None
    for p in reduced:
        if prev is None or min(abs(p - prev), math.pi - abs(p - prev)) > 1e-9:
            distinct += 1
        prev = p
    if distinct < 3:
        raise ValueError("need at least 3 relative phases distinct mod pi")

    expansions = blm_phase_scan(amps, field_base, phis, quad=quad, threads=threads)
    b21 = np.array([e.get(2, 1) for e in expansions])
    b00_scale = expansions[0].scale()

    # Im B = a sin 2phi + b cos 2phi with a = -2 A cos delta, b = 2 A sin delta.
    phi_arr = np.asarray(phis)
    design = np.column_stack([np.sin(2.0 * phi_arr), np.cos(2.0 * phi_arr)])
    (a, b), *_ = np.linalg.lstsq(design, b21.imag, rcond=None)
    amplitude = 0.5 * math.hypot(a, b)
    residual = float(np.max(np.abs(design @ np.array([a, b]) - b21.imag)))

    if amplitude > 1e-10 * b00_scale:
        delta = math.atan2(b, -a)
        if delta <= -math.pi:
            delta += 2.0 * math.pi
    else:
        delta = None
    model_ok = residual <= max(1e-8 * amplitude, 1e-12 * b00_scale)

    return AsymmetryFit(
        amplitude=amplitude,
        delta=delta,
        residual=residual,
        b00_scale=b00_scale,
        model_ok=model_ok,
        phis=tuple(phis),
        b21_samples=tuple(complex(v) for v in b21),
    )
