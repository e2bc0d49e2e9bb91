"""Matplotlib rendering of the CLI outputs.

Each helper takes the same data that goes into the corresponding CSV and
writes a PNG next to it. Rendering is headless (Agg backend) and optional:
the CSV files are the primary interface.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_blm_figure",
    "save_field_figure",
    "save_map_figure",
    "save_phase_scan_figure",
]

_DPI = 150


def save_field_figure(trajectory, phi: float, path) -> None:
    """Lissajous curve of the total field vector over one period."""
    ts = [row[0] for row in trajectory]
    exs = [row[1] for row in trajectory]
    eys = [row[2] for row in trajectory]

    fig, (ax_xy, ax_t) = plt.subplots(1, 2, figsize=(9, 4))
    ax_xy.plot(exs, eys, lw=1.5)
    ax_xy.plot(exs[0], eys[0], "o", ms=5)
    ax_xy.set_xlabel("$E_x$")
    ax_xy.set_ylabel("$E_y$")
    ax_xy.set_title(f"field trajectory, phi = {phi / math.pi:.3f} pi")
    ax_xy.set_aspect("equal", adjustable="datalim")
    ax_xy.axhline(0.0, color="0.8", lw=0.6)
    ax_xy.axvline(0.0, color="0.8", lw=0.6)

    ax_t.plot(ts, exs, label="$E_x(t)$")
    ax_t.plot(ts, eys, label="$E_y(t)$")
    ax_t.set_xlabel("t")
    ax_t.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_blm_figure(rows, path) -> None:
    """Stem chart of |B_LM| with (L, M) labels."""
    labels = [f"{L},{M}" for L, M, _, _ in rows]
    mags = [math.hypot(re, im) for _, _, re, im in rows]

    fig, ax = plt.subplots(figsize=(max(6, 0.35 * len(rows)), 4))
    ax.bar(range(len(rows)), mags, width=0.6)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_xlabel("(L, M)")
    ax.set_ylabel("$|B_{LM}|$")
    ax.set_yscale("log")
    floor = max(mags) * 1e-16 if max(mags) > 0 else 1e-16
    ax.set_ylim(bottom=floor)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_phase_scan_figure(rows, a_fit: float, delta_fit, path) -> None:
    """Numeric Im B_{2,+1} samples against the fitted sinusoid."""
    phis = np.array([r["phi"] for r in rows])
    im_num = np.array([r["im_b21"] for r in rows])
    im_pred = np.array([r["im_b21_pred"] for r in rows])

    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(phis / math.pi, im_num, "o", ms=5, label="quadrature")
    ax.plot(phis / math.pi, im_pred, "x", ms=6, label="closed form")
    if delta_fit is not None:
        dense = np.linspace(phis.min(), phis.max(), 400)
        ax.plot(
            dense / math.pi,
            -2.0 * a_fit * np.sin(2.0 * dense - delta_fit),
            "-",
            lw=1.0,
            label="fit",
        )
    ax.set_xlabel(r"relative phase $\phi / \pi$")
    ax.set_ylabel(r"Im $B_{2,+1}$")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_map_figure(thetas, phis, dcs, fbud, path) -> None:
    """Angular maps of the full distribution and its FBUD part."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, data, title in ((ax1, dcs, r"$d\sigma/d\Omega$"), (ax2, fbud, "FBUD part")):
        mesh = ax.pcolormesh(
            np.asarray(phis) / math.pi,
            np.asarray(thetas) / math.pi,
            np.asarray(data),
            shading="nearest",
            cmap="RdBu_r" if title != r"$d\sigma/d\Omega$" else "viridis",
        )
        fig.colorbar(mesh, ax=ax)
        ax.set_xlabel(r"$\varphi_p / \pi$")
        ax.set_title(title)
    ax1.set_ylabel(r"$\theta_p / \pi$")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
