"""Molecular-frame transition amplitude tensors.

The one-photon tensor ``d[l, m', k']`` couples the bound orbital to the
partial wave (l, m') by absorption of a single photon of molecular-frame
polarization k' in {-1, 0, +1}. The two-photon tensor ``t[l, m', k1', k2']``
plays the same role for sequential absorption of two photons; the sum over
intermediate states and the energy denominators are absorbed into its complex
values. Radial integrals, continuum normalization and scattering phases are
likewise folded into the entries, so the overall scale is arbitrary: the
observables built from these tensors depend only on ratios and phases.

Storage is dense: shape (lmax+1, 2*lmax+1, 3) and (lmax+1, 2*lmax+1, 3, 3)
with axis offsets m -> m + lmax and k -> k + 1. Entries with |m'| > l are
identically zero. Arrays are frozen (non-writeable) after construction.

A molecule is achiral, for the purposes of the interference asymmetry, when
d[l, m', k'] == d[l, -m', -k'] and t[l, m', k1', k2'] == t[l, -m', -k1', -k2'];
:func:`achiralize` projects onto that subspace and :func:`enantiomer` applies
the bare index reflection (no extra phase factors), which maps a molecule to
its mirror form.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AmplitudeSet",
    "AmplitudeSchemaError",
    "AmplitudeValueError",
    "OnePhotonAmplitudes",
    "TwoPhotonAmplitudes",
    "achiralize",
    "enantiomer",
    "load_amplitudes",
    "random_amplitudes",
    "save_amplitudes",
]


class AmplitudeSchemaError(ValueError):
    """Amplitude file violates the documented JSON schema."""


class AmplitudeValueError(ValueError):
    """Amplitude file carries non-finite (NaN/Inf) or non-numeric entries."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_tensor(name: str, values: np.ndarray, lmax: int, extra_axes: tuple[int, ...]):
    expected = (lmax + 1, 2 * lmax + 1) + extra_axes
    if values.shape != expected:
        raise ValueError(f"{name} tensor must have shape {expected}, got {values.shape}")
    if not np.all(np.isfinite(values.view(float))):
        raise AmplitudeValueError(f"{name} tensor contains non-finite entries")
    # Entries outside |m'| <= l must be exactly zero.
    for l in range(lmax + 1):
        for m in range(-lmax, lmax + 1):
            if abs(m) > l and np.any(values[l, m + lmax] != 0):
                raise ValueError(f"{name} tensor nonzero at invalid index l={l}, m={m}")


@dataclass(frozen=True, eq=False)
class OnePhotonAmplitudes:
    """Dense complex tensor d[l, m'+lmax, k'+1] for one-photon absorption."""

    lmax: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lmax < 0:
            raise ValueError("lmax must be non-negative")
        values = np.ascontiguousarray(self.values, dtype=complex)
        _check_tensor("one-photon", values, self.lmax, (3,))
        object.__setattr__(self, "values", _freeze(values))

    def get(self, l: int, m: int, k: int) -> complex:
        return complex(self.values[l, m + self.lmax, k + 1])

    @classmethod
    def zeros(cls, lmax: int) -> "OnePhotonAmplitudes":
        return cls(lmax, np.zeros((lmax + 1, 2 * lmax + 1, 3), dtype=complex))


@dataclass(frozen=True, eq=False)
class TwoPhotonAmplitudes:
    """Dense complex tensor t[l, m'+lmax, k1'+1, k2'+1] for two-photon absorption.

    The (k1', k2') slots keep the absorption ordering; no exchange symmetry is
    imposed (the observable sums all four helicity slots symmetrically, so
    symmetrizing is a modelling choice left to the caller).
    """

    lmax: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lmax < 0:
            raise ValueError("lmax must be non-negative")
        values = np.ascontiguousarray(self.values, dtype=complex)
        _check_tensor("two-photon", values, self.lmax, (3, 3))
        object.__setattr__(self, "values", _freeze(values))

    def get(self, l: int, m: int, k1: int, k2: int) -> complex:
        return complex(self.values[l, m + self.lmax, k1 + 1, k2 + 1])

    @classmethod
    def zeros(cls, lmax: int) -> "TwoPhotonAmplitudes":
        return cls(lmax, np.zeros((lmax + 1, 2 * lmax + 1, 3, 3), dtype=complex))


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    """Matched pair of one- and two-photon tensors for one model molecule."""

    one_photon: OnePhotonAmplitudes
    two_photon: TwoPhotonAmplitudes
    label: str = ""

    def __post_init__(self):
        if self.one_photon.lmax != self.two_photon.lmax:
            raise ValueError(
                f"lmax mismatch: one-photon {self.one_photon.lmax} vs "
                f"two-photon {self.two_photon.lmax}"
            )

    @property
    def lmax(self) -> int:
        return self.one_photon.lmax

    def norm_scale(self) -> float:
        """Root-mean-square tensor magnitude, used as the reference scale."""
        d = self.one_photon.values
        t = self.two_photon.values
        total = np.sum(np.abs(d) ** 2) + np.sum(np.abs(t) ** 2)
        return math.sqrt(total / (d.size + t.size))


DEFAULT_LMAX = 3


def random_amplitudes(seed: int, lmax: int = DEFAULT_LMAX, label: str = "") -> AmplitudeSet:
    """Generic chiral model: every valid entry an independent complex Gaussian.

    Real and imaginary parts are drawn with unit variance from a PCG64 stream
    seeded with ``seed`` (one-photon entries first, then two-photon, both in C
    order over valid (l, m') indices), so the result is deterministic per
    (seed, lmax) and platform-independent. A generic draw violates the achiral
    symmetry d[l,m',k'] == d[l,-m',-k'], i.e. it models a chiral molecule.
    """
    if lmax < 1:
        raise ValueError(f"lmax must be >= 1, got {lmax}")
    rng = np.random.Generator(np.random.PCG64(seed))

    d = np.zeros((lmax + 1, 2 * lmax + 1, 3), dtype=complex)
    t = np.zeros((lmax + 1, 2 * lmax + 1, 3, 3), dtype=complex)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            d[l, m + lmax] = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            t[l, m + lmax] = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))

    return AmplitudeSet(
        OnePhotonAmplitudes(lmax, d),
        TwoPhotonAmplitudes(lmax, t),
        label=label or f"random(seed={seed}, lmax={lmax})",
    )


def _reflected(values: np.ndarray) -> np.ndarray:
    # (m', k...) -> (-m', -k...): reverse every axis after the l axis.
    axes = tuple(range(1, values.ndim))
    return np.flip(values, axis=axes)


def achiralize(amp_set: AmplitudeSet) -> AmplitudeSet:
    """Project onto the achiral subspace by averaging index-reflected pairs.

    Idempotent linear projection; an already symmetric set is returned with
    identical values.
    """
    d = amp_set.one_photon.values
    t = amp_set.two_photon.values
    d_sym = 0.5 * (d + _reflected(d))
    t_sym = 0.5 * (t + _reflected(t))
    return AmplitudeSet(
        OnePhotonAmplitudes(amp_set.lmax, d_sym),
        TwoPhotonAmplitudes(amp_set.lmax, t_sym),
        label=f"achiral({amp_set.label})" if amp_set.label else "achiral",
    )


def enantiomer(amp_set: AmplitudeSet) -> AmplitudeSet:
    """Mirror molecule: bare index reflection (m', k) -> (-m', -k).

    Involution; achiral sets are fixed points. No phase factors are applied:
    any global phase convention cancels in the observables, and the induced
    sign flip of the interference coefficient is what defines handedness here.
    """
    return AmplitudeSet(
        OnePhotonAmplitudes(amp_set.lmax, _reflected(amp_set.one_photon.values).copy()),
        TwoPhotonAmplitudes(amp_set.lmax, _reflected(amp_set.two_photon.values).copy()),
        label=f"enantiomer({amp_set.label})" if amp_set.label else "enantiomer",
    )


# ---------------------------------------------------------------------------
# JSON serialization
#
# Schema: { "lmax": int,
#           "d": [ {"l": int, "m": int, "k": int, "re": float, "im": float}, ... ],
#           "t": [ {"l": int, "m": int, "k1": int, "k2": int, "re": float, "im": float}, ... ] }
# Omitted entries are zero. Duplicate indices are rejected.
# ---------------------------------------------------------------------------

def save_amplitudes(amp_set: AmplitudeSet, path) -> None:
    """Write the nonzero entries to ``path`` in the documented JSON schema."""
    lmax = amp_set.lmax
    d_rows = []
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            for k in (-1, 0, 1):
                v = amp_set.one_photon.get(l, m, k)
                if v != 0:
                    d_rows.append({"l": l, "m": m, "k": k, "re": v.real, "im": v.imag})
    t_rows = []
    for l in range(lmax + 1):
        for m in range(-l, l + 1):
            for k1 in (-1, 0, 1):
                for k2 in (-1, 0, 1):
                    v = amp_set.two_photon.get(l, m, k1, k2)
                    if v != 0:
                        t_rows.append(
                            {"l": l, "m": m, "k1": k1, "k2": k2, "re": v.real, "im": v.imag}
                        )
    doc = {"lmax": lmax, "d": d_rows, "t": t_rows}
    if amp_set.label:
        doc["label"] = amp_set.label
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _entry_value(entry: dict, where: str) -> complex:
    re, im = entry.get("re"), entry.get("im")
    for part, name in ((re, "re"), (im, "im")):
        if not isinstance(part, (int, float)) or isinstance(part, bool):
            raise AmplitudeValueError(f"{where}: field '{name}' is not a number: {part!r}")
        if not math.isfinite(part):
            raise AmplitudeValueError(f"{where}: field '{name}' is not finite: {part!r}")
    return complex(re, im)


def _entry_index(entry: dict, where: str, key: str, lo: int, hi: int) -> int:
    v = entry.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise AmplitudeSchemaError(f"{where}: field '{key}' must be an integer, got {v!r}")
    if not lo <= v <= hi:
        raise AmplitudeSchemaError(f"{where}: field '{key}'={v} outside [{lo}, {hi}]")
    return v


def load_amplitudes(path) -> AmplitudeSet:
    """Read an amplitude set from the documented JSON schema.

    Raises FileNotFoundError for a missing file, AmplitudeSchemaError for
    structural violations (bad types, out-of-range or duplicate indices) and
    AmplitudeValueError for non-finite entries.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"amplitude file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AmplitudeSchemaError(f"{path}: not valid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise AmplitudeSchemaError(f"{path}: top level must be an object")
    lmax = doc.get("lmax")
    if not isinstance(lmax, int) or isinstance(lmax, bool) or lmax < 0:
        raise AmplitudeSchemaError(f"{path}: 'lmax' must be a non-negative integer")
    for key in ("d", "t"):
        if not isinstance(doc.get(key), list):
            raise AmplitudeSchemaError(f"{path}: '{key}' must be a list of entries")

    d = np.zeros((lmax + 1, 2 * lmax + 1, 3), dtype=complex)
    seen: set[tuple] = set()
    for i, entry in enumerate(doc["d"]):
        where = f"{path}: d[{i}]"
        if not isinstance(entry, dict):
            raise AmplitudeSchemaError(f"{where}: entry must be an object")
        l = _entry_index(entry, where, "l", 0, lmax)
        m = _entry_index(entry, where, "m", -l, l)
        k = _entry_index(entry, where, "k", -1, 1)
        if ("d", l, m, k) in seen:
            raise AmplitudeSchemaError(f"{where}: duplicate index (l={l}, m={m}, k={k})")
        seen.add(("d", l, m, k))
        d[l, m + lmax, k + 1] = _entry_value(entry, where)

    t = np.zeros((lmax + 1, 2 * lmax + 1, 3, 3), dtype=complex)
    for i, entry in enumerate(doc["t"]):
        where = f"{path}: t[{i}]"
        if not isinstance(entry, dict):
            raise AmplitudeSchemaError(f"{where}: entry must be an object")
        l = _entry_index(entry, where, "l", 0, lmax)
        m = _entry_index(entry, where, "m", -l, l)
        k1 = _entry_index(entry, where, "k1", -1, 1)
        k2 = _entry_index(entry, where, "k2", -1, 1)
        if ("t", l, m, k1, k2) in seen:
            raise AmplitudeSchemaError(
                f"{where}: duplicate index (l={l}, m={m}, k1={k1}, k2={k2})"
            )
        seen.add(("t", l, m, k1, k2))
        t[l, m + lmax, k1 + 1, k2 + 1] = _entry_value(entry, where)

    label = doc.get("label", "")
    if not isinstance(label, str):
        raise AmplitudeSchemaError(f"{path}: 'label' must be a string")
    return AmplitudeSet(OnePhotonAmplitudes(lmax, d), TwoPhotonAmplitudes(lmax, t), label=label)
