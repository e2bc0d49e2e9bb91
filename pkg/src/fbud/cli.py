"""Command-line frontend.

Subcommands
-----------
verify      run the internal consistency suite and write a JSON report
phase-scan  B_{2,+1} and the FBUD amplitude over a list of relative phases
blm         table of orientation-averaged B_LM coefficients
map         (theta_p, phi_p) grid of the full distribution and its FBUD part
field       sampled field trajectory over one fundamental period

Every data-producing command writes a CSV (the primary output) and, unless
``plot`` is disabled, a PNG figure next to it. Configuration comes from a
single JSON document (``--config``) merged over built-in defaults, with the
flags ``--seed/--lmax/--phi/--out/--threads`` taking final precedence.
Angles are accepted in radians or in units of pi ("0.25pi", "-pi").

Exit codes: 0 success, 1 check failure or runtime error, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import identities
from .amplitudes import (
    AmplitudeSchemaError,
    AmplitudeValueError,
    AmplitudeSet,
    achiralize,
    enantiomer,
    load_amplitudes,
    random_amplitudes,
)
from .analytic import FBUD_PREFACTOR, analytic_A, b21_of_phi, bracket_constant
from .averaging import (
    QuadratureSpec,
    blm_phase_scan,
    extract_A_delta_numeric,
    orientation_averaged_blm,
    reconstruct_interference_coefficient,
)
from .dynamics import FieldConfig, field_trajectory

__all__ = ["main"]


class ConfigError(Exception):
    """Invalid configuration or input file; maps to exit code 2."""


DEFAULT_CONFIG = {
    "seed": 1,
    "lmax": 3,
    "amplitude_file": None,
    "field": {"ex": 1.0, "ey": 1.0, "phi": "0.25pi", "omega": 1.0},
    "quad": None,
    "phi_scan": [f"{k / 8}pi" for k in range(16)],
    "out_dir": "fbud-out",
    "threads": 0,
    "map_grid": {"n_theta": 61, "n_phi": 121},
    "trajectory_samples": 513,
    "plot": True,
}


def parse_angle(value) -> float:
    """Angle in radians from a float or a string in units of pi."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text.endswith("pi"):
            head = text[:-2].strip()
            if head in ("", "+"):
                factor = 1.0
            elif head == "-":
                factor = -1.0
            else:
                try:
                    factor = float(head)
                except ValueError as exc:
                    raise ConfigError(f"cannot parse angle {value!r}") from exc
            return factor * math.pi
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"cannot parse angle {value!r}") from exc
    raise ConfigError(f"cannot parse angle {value!r}")


def _merge_config(args) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            user = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(user) - set(DEFAULT_CONFIG)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if user.get("amplitude_file") and ("seed" in user or "lmax" in user):
            raise ConfigError(
                "config must give exactly one amplitude source: "
                "either 'amplitude_file' or 'seed'/'lmax'"
            )
        for key, value in user.items():
            if isinstance(value, dict) and isinstance(config.get(key), dict):
                config[key].update(value)
            else:
                config[key] = value

    if args.seed is not None or args.lmax is not None:
        if config.get("amplitude_file"):
            raise ConfigError("--seed/--lmax conflict with the configured amplitude_file")
        if args.seed is not None:
            config["seed"] = args.seed
        if args.lmax is not None:
            config["lmax"] = args.lmax
    if args.phi is not None:
        config["phi_scan"] = [p for p in args.phi.split(",") if p.strip()]
        if not config["phi_scan"]:
            raise ConfigError("--phi must list at least one angle")
    if args.out is not None:
        config["out_dir"] = args.out
    if args.threads is not None:
        config["threads"] = args.threads
    if args.no_plot:
        config["plot"] = False

    if not isinstance(config["threads"], int) or config["threads"] < 0:
        raise ConfigError("threads must be a non-negative integer (0 = auto)")
    if not isinstance(config["lmax"], int) or config["lmax"] < 1:
        raise ConfigError("lmax must be an integer >= 1")
    return config


def _build_amplitudes(config) -> AmplitudeSet:
    if config["amplitude_file"]:
        try:
            return load_amplitudes(config["amplitude_file"])
        except (FileNotFoundError, AmplitudeSchemaError, AmplitudeValueError) as exc:
            raise ConfigError(str(exc)) from exc
    return random_amplitudes(config["seed"], config["lmax"])


def _build_field(config) -> FieldConfig:
    fc = config["field"]
    try:
        return FieldConfig(
            ex=float(fc["ex"]),
            ey=float(fc["ey"]),
            phi=parse_angle(fc["phi"]),
            omega=float(fc["omega"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid field config: {exc}") from exc


def _build_quad(config, lmax: int) -> QuadratureSpec:
    if config["quad"] is None:
        return QuadratureSpec.default_for(lmax)
    try:
        quad = QuadratureSpec(**config["quad"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quadrature config: {exc}") from exc
    try:
        quad.validate_for(lmax)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return quad


def _scan_phis(config) -> list[float]:
    return [parse_angle(p) for p in config["phi_scan"]]


def _single_phi_override(config, field: FieldConfig) -> FieldConfig:
    # Commands with one relative phase accept --phi only as a single value.
    phis = config["phi_scan"]
    if phis != DEFAULT_CONFIG["phi_scan"] and len(phis) == 1:
        return field.with_phi(parse_angle(phis[0]))
    return field


def _out_dir(config) -> Path:
    out = Path(config["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_field(config) -> int:
    field = _single_phi_override(config, _build_field(config))
    n = int(config["trajectory_samples"])
    try:
        rows = field_trajectory(field, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(config)
    _write_csv(out / "field.csv", ["t", "Ex", "Ey"], [[_fmt(a) for a in r] for r in rows])
    print(f"wrote {out / 'field.csv'} ({n} samples, phi = {field.phi / math.pi:.4f} pi)")
    if config["plot"]:
        from .plots import save_field_figure

        save_field_figure(rows, field.phi, out / "field.png")
        print(f"wrote {out / 'field.png'}")
    return 0


def cmd_blm(config) -> int:
    amps = _build_amplitudes(config)
    field = _single_phi_override(config, _build_field(config))
    quad = _build_quad(config, amps.lmax)
    expansion = orientation_averaged_blm(amps, field, quad, threads=config["threads"])
    rows = [(L, M, v.real, v.imag) for L, M, v in expansion.items()]
    out = _out_dir(config)
    _write_csv(
        out / "blm.csv",
        ["L", "M", "Re(B)", "Im(B)"],
        [[L, M, _fmt(re), _fmt(im)] for L, M, re, im in rows],
    )
    print(f"wrote {out / 'blm.csv'} (B_00 = {expansion.get(0, 0).real:.6g})")
    if config["plot"]:
        from .plots import save_blm_figure

        save_blm_figure(rows, out / "blm.png")
        print(f"wrote {out / 'blm.png'}")
    return 0


def cmd_phase_scan(config) -> int:
    phis = _scan_phis(config)
    if len(phis) < 3:
        raise ConfigError("phase scan needs at least 3 phases")
    amps = _build_amplitudes(config)
    field = _build_field(config)
    quad = _build_quad(config, amps.lmax)

    fit = extract_A_delta_numeric(amps, field, phis, quad=quad, threads=config["threads"])
    coeff = analytic_A(amps, field.ex, field.ey)

    rows = []
    for phi, b21 in zip(fit.phis, fit.b21_samples):
        pred = b21_of_phi(coeff, phi) / FBUD_PREFACTOR
        rows.append(
            {
                "phi": phi,
                "re_b21": b21.real,
                "im_b21": b21.imag,
                "im_b21_pred": pred.imag,
                # Signed FBUD amplitude: coefficient of cos(t)sin(t)sin(p).
                "fbud_amplitude": -0.5 * FBUD_PREFACTOR * b21.imag,
                "a_fit": fit.amplitude,
                "delta_fit": fit.delta if fit.delta is not None else float("nan"),
                "residual": fit.residual,
            }
        )
    out = _out_dir(config)
    header = [
        "phi", "re_b21", "im_b21", "im_b21_pred", "fbud_amplitude",
        "a_fit", "delta_fit", "residual",
    ]
    _write_csv(out / "phase_scan.csv", header, [[_fmt(r[k]) for k in header] for r in rows])
    delta_text = "undefined" if fit.delta is None else f"{fit.delta:+.6f}"
    print(
        f"wrote {out / 'phase_scan.csv'}: A_fit = {fit.amplitude:.6g}, "
        f"delta = {delta_text}, residual = {fit.residual:.3g}"
        + ("" if fit.model_ok else "  [MODEL VIOLATION]")
    )
    if config["plot"]:
        from .plots import save_phase_scan_figure

        save_phase_scan_figure(rows, fit.amplitude, fit.delta, out / "phase_scan.png")
        print(f"wrote {out / 'phase_scan.png'}")
    return 0


def cmd_map(config) -> int:
    amps = _build_amplitudes(config)
    field = _single_phi_override(config, _build_field(config))
    quad = _build_quad(config, amps.lmax)
    grid = config["map_grid"]
    n_theta, n_phi = int(grid["n_theta"]), int(grid["n_phi"])
    if n_theta < 2 or n_phi < 2:
        raise ConfigError("map grid must have at least 2 nodes per axis")

    expansion = orientation_averaged_blm(amps, field, quad, threads=config["threads"])
    thetas = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phis = np.arange(n_phi) * 2.0 * math.pi / n_phi
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    dcs = expansion.reconstruct(tt, pp)
    fbud = expansion.fbud_part(tt, pp)

    rows = []
    for i in range(n_theta):
        for j in range(n_phi):
            rows.append(
                [_fmt(thetas[i]), _fmt(phis[j]), _fmt(dcs[i, j]), _fmt(fbud[i, j])]
            )
    out = _out_dir(config)
    _write_csv(out / "map.csv", ["theta_p", "phi_p", "dcs", "fbud"], rows)
    print(f"wrote {out / 'map.csv'} ({n_theta} x {n_phi} grid)")
    if config["plot"]:
        from .plots import save_map_figure

        save_map_figure(thetas, phis, dcs, fbud, out / "map.png")
        print(f"wrote {out / 'map.png'}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_checks(config):
    """Yield (name, deviation, tolerance) for every consistency check."""
    rng = np.random.default_rng(2024)

    def random_euler():
        from .angular import EulerAngles

        return EulerAngles(
            rng.uniform(0.0, 2.0 * math.pi),
            math.acos(rng.uniform(-1.0, 1.0)),
            rng.uniform(0.0, 2.0 * math.pi),
        )

    # Convention anchor.
    yield (
        "bracket constant = 2/(5 sqrt 3)",
        abs(bracket_constant() - 2.0 / (5.0 * math.sqrt(3.0))),
        1e-12,
    )

    # Harmonic product expansion, checked pointwise.
    from .angular import spherical_harmonic, ylm_product_expand

    worst = 0.0
    for l1, m1, l2, m2 in [(1, 1, 1, 1), (2, 1, 1, 0), (3, -2, 2, 2), (2, 0, 2, 0)]:
        terms = ylm_product_expand(l1, m1, l2, m2)
        for _ in range(20):
            theta = math.acos(rng.uniform(-1, 1))
            phi = rng.uniform(0, 2 * math.pi)
            direct = spherical_harmonic(l1, m1, theta, phi) * np.conj(
                spherical_harmonic(l2, m2, theta, phi)
            )
            series = sum(
                c * np.conj(spherical_harmonic(L, M, theta, phi)) for L, M, c in terms
            )
            worst = max(worst, abs(direct - series))
    yield ("harmonic product expansion (pointwise)", worst, 1e-12)

    # Rotation-matrix product reductions at random rotations.
    worst = 0.0
    for _ in range(20):
        e = random_euler()
        for l1 in (0, 1, 2):
            for l2 in (0, 1, 2):
                for m1p in range(-l1, l1 + 1):
                    for m2p in range(-l2, l2 + 1):
                        lhs, rhs = identities.coupled_d_product(
                            l1, m1p, rng.integers(-l1, l1 + 1), l2, m2p,
                            rng.integers(-l2, l2 + 1), e,
                        )
                        worst = max(worst, abs(lhs - rhs))
    yield ("rotation-matrix product reduction", worst, 1e-12)

    worst = 0.0
    for _ in range(20):
        e = random_euler()
        for k1p in (-1, 0, 1):
            for k2p in (-1, 0, 1):
                for s1 in (-1, 1):
                    for s2 in (-1, 1):
                        lhs, rhs = identities.coupled_helicity_product(k1p, s1, k2p, s2, e)
                        worst = max(worst, abs(lhs - rhs))
    yield ("helicity product reduction", worst, 1e-12)

    # Projection pair sum, exact summation.
    worst = 0.0
    for l1 in range(4):
        for l2 in range(4):
            for big_j in range(5):
                for mj in range(-big_j, big_j + 1):
                    lhs, rhs = identities.projection_pair_sum(l1, l2, big_j, mj)
                    worst = max(worst, abs(lhs - rhs))
    yield ("projection pair sum", worst, 1e-13)

    # Orientation average of three rotation matrices.
    worst, _count = identities.sweep_triple_rotation_average()
    yield ("triple rotation-matrix average", worst, 1e-10)

    # Frame-rotation consistency of D with Y.
    worst = 0.0
    for _ in range(10):
        e = random_euler()
        theta = math.acos(rng.uniform(-1, 1))
        phi = rng.uniform(0, 2 * math.pi)
        for l in (1, 2, 3):
            for mp in range(-l, l + 1):
                lhs, rhs = identities.rotated_harmonic(l, mp, e, theta, phi)
                worst = max(worst, abs(lhs - rhs))
    yield ("rotated harmonic consistency", worst, 1e-12)

    # Configured amplitude set: oracle equivalence and chirality checks.
    amps = _build_amplitudes(config)
    field = _build_field(config)
    quad = _build_quad(config, amps.lmax)
    threads = config["threads"]

    scans = blm_phase_scan(amps, field, [0.0, math.pi / 8.0], quad=quad, threads=threads)
    c_num = reconstruct_interference_coefficient(
        scans[0].get(2, 1), 0.0, scans[1].get(2, 1), math.pi / 8.0
    )
    coeff = analytic_A(amps, field.ex, field.ey)
    denom = max(abs(coeff.value), coeff.scale * 1e-13)
    yield (
        "oracle equivalence (closed form vs quadrature)",
        abs(coeff.value - FBUD_PREFACTOR * c_num) / denom if denom else 0.0,
        1e-6,
    )

    ach = achiralize(amps)
    yield (
        "achiral closed-form coefficient vanishes",
        abs(analytic_A(ach, field.ex, field.ey).value) / max(1.0, coeff.scale),
        1e-12,
    )
    ach_scan = orientation_averaged_blm(ach, field, quad, threads=threads)
    yield (
        "achiral quadrature B_{2,+1} vanishes",
        abs(ach_scan.get(2, 1)) / ach_scan.scale(),
        1e-10,
    )
    flipped = analytic_A(enantiomer(amps), field.ex, field.ey)
    yield (
        "enantiomer flips the coefficient sign",
        abs(flipped.value + coeff.value) / max(abs(coeff.value), coeff.scale * 1e-13),
        1e-13,
    )

    # Structural rules of the expansion.
    one_only = orientation_averaged_blm(
        amps, FieldConfig(field.ex, 0.0, 0.0, field.omega), quad, threads=threads
    )
    worst = max(
        abs(one_only.get(L, M)) for L in (3, 4) for M in range(-L, L + 1)
    )
    yield ("one-photon-only expansion stops at L = 2", worst / one_only.scale(), 1e-10)

    probe = blm_phase_scan(
        amps, field, [0.1, 0.7, 1.9, 2.6], quad=quad, threads=threads
    )
    worst = max(
        abs(probe[0].get(4, M) - p.get(4, M)) for p in probe[1:] for M in range(-4, 5)
    )
    yield ("B_{4,M} independent of the relative phase", worst / probe[0].scale(), 1e-12)
    yield (
        "hermiticity B_{L,-M} = (-1)^M conj(B_{L,M})",
        max(p.hermiticity_deviation() for p in probe) / probe[0].scale(),
        1e-12,
    )
    yield (
        "Re B_{2,+1} = 0 at every phase",
        max(abs(p.get(2, 1).real) for p in probe) / probe[0].scale(),
        1e-10,
    )

    # Quadrature exactness and determinism.
    base = orientation_averaged_blm(amps, field, quad, threads=threads)
    doubled = orientation_averaged_blm(amps, field, quad.doubled(), threads=threads)
    worst = max(
        abs(base.get(L, M) - doubled.get(L, M)) / max(base.scale(), abs(base.get(L, M)))
        for L, M, _ in base.items()
    )
    yield ("node doubling leaves B_LM unchanged", worst, 1e-12)

    single = orientation_averaged_blm(amps, field, quad, threads=1)
    multi = orientation_averaged_blm(amps, field, quad, threads=8)
    yield (
        "bit-identical across worker counts",
        0.0 if np.array_equal(single.coefficients, multi.coefficients) else 1.0,
        0.5,
    )


def cmd_verify(config) -> int:
    checks = []
    all_passed = True
    for name, deviation, tolerance in _verify_checks(config):
        passed = bool(deviation <= tolerance)
        all_passed &= passed
        checks.append(
            {
                "name": name,
                "passed": passed,
                "deviation": float(deviation),
                "tolerance": float(tolerance),
            }
        )
        print(f"{'PASS' if passed else 'FAIL'}  {name}  (dev {deviation:.3e}, tol {tolerance:.0e})")

    report = {"all_passed": all_passed, "checks": checks}
    out = _out_dir(config)
    report_path = out / "verify_report.json"
    report_path.write_text(json.dumps(report, indent=1) + "\n", encoding="utf-8")
    print(f"{'all checks passed' if all_passed else 'CHECKS FAILED'}; report: {report_path}")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "verify": cmd_verify,
    "phase-scan": cmd_phase_scan,
    "blm": cmd_blm,
    "map": cmd_map,
    "field": cmd_field,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbud",
        description="Phase-controlled photoemission asymmetry for two-color ionization.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS), help="subcommand to run")
    parser.add_argument("--config", metavar="PATH", help="JSON configuration file")
    parser.add_argument("--seed", type=int, metavar="N", help="random amplitude seed")
    parser.add_argument("--lmax", type=int, metavar="N", help="partial-wave cutoff")
    parser.add_argument(
        "--phi", metavar="LIST", help="comma-separated angles (radians or e.g. 0.25pi)"
    )
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--threads", type=int, metavar="N", help="worker threads (0 = auto)")
    parser.add_argument("--no-plot", action="store_true", help="skip PNG rendering")
    parser.add_argument(
        "--print-config", action="store_true", help="print the merged config and exit"
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge_config(args)
        if args.print_config:
            print(json.dumps(config, indent=1))
            return 0
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
