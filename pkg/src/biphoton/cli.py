"""Command-line front end.

Subcommands: dressed | spectrum | wavepacket | filter | montecarlo |
fit | modulate | budget | sweep.  A YAML config file supplies the run
definition; command-line flags override individual fields.  All file
output is deterministic for a fixed config and seed (timestamps only
with --timestamps).

Exit codes: 0 success, 2 validation error, 3 numerical error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import NumericalError, ToolkitError, ValidationError
from .estimation import FitModel, fit_wavepacket, initial_guess
from .filtering import (
    apply_filter,
    beat_suppression,
    narrow_mode_center,
    narrowband_etalon,
)
from .io import read_histogram, write_csv, write_histogram
from .modulation import apply_mask, mask_values, suggest_mask_start
from .params import dressed_modes
from .photostatistics import (
    budget_report,
    expected_accidental_floor,
    histogram_metadata,
    simulate_coincidences,
)
from .susceptibility import chi3_approx, chi3_full, default_frequency_grid
from .wavepacket import beat_period, g2_analytic, psi_numeric, spectrum_power


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="YAML run configuration file")
    shared.add_argument("--out", help="output directory (overrides config)")
    shared.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    shared.add_argument("--workers", type=int, default=1,
                        help="parallel workers for shards/sweeps")
    shared.add_argument("--timestamps", action="store_true",
                        help="include wall-clock timestamps in file headers")
    for flag, why in (
        ("--delta-c", "coupling detuning (gamma13 units)"),
        ("--omega-c", "coupling Rabi frequency (gamma13 units)"),
        ("--gamma12", "ground-state dephasing (gamma13 units)"),
        ("--gamma14", "pump-level dephasing (gamma13 units)"),
        ("--delta-p", "pump detuning (gamma13 units)"),
        ("--od", "optical depth"),
    ):
        shared.add_argument(flag, type=float, help=why)
    shared.add_argument("--tau-max", type=float, help="time grid end (ns)")
    shared.add_argument("--n-points", type=int, help="time grid points")

    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Biphoton wavepacket simulation and analysis toolkit",
    )
    parser.add_argument("--version", action="version",
                        version=f"biphoton {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dressed", parents=[shared],
                       help="dressed-mode detunings, widths, linewidths")
    p.add_argument("--sweep", metavar="START:STOP:N",
                   help="write a delta_c sweep CSV instead of one report")
    p.set_defaults(func=cmd_dressed)

    p = sub.add_parser("spectrum", parents=[shared],
                       help="spectral power of the exact and two-pole forms")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("wavepacket", parents=[shared],
                       help="analytic and numeric wavepackets plus spectrum")
    p.set_defaults(func=cmd_wavepacket)

    p = sub.add_parser("filter", parents=[shared],
                       help="pass the spectrum through the configured etalon")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("montecarlo", parents=[shared],
                       help="synthetic coincidence histogram")
    p.add_argument("--shards", type=int, default=1,
                   help="independent measurement-time slices")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("fit", parents=[shared],
                       help="fit a model shape to a histogram CSV")
    p.add_argument("--data", required=True, help="histogram CSV from montecarlo")
    p.add_argument("--model", choices=["two_component", "resonant",
                                       "single_exponential", "auto"],
                   help="model shape (overrides config)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("modulate", parents=[shared],
                       help="carve the heralded wavepacket with a mask")
    p.set_defaults(func=cmd_modulate)

    p = sub.add_parser("budget", parents=[shared],
                       help="invert a detected rate through the loss chain")
    p.add_argument("--detected-rate", type=float,
                   help="detected pair rate in 1/s (overrides config)")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("sweep", parents=[shared],
                       help="beat period and linewidths across delta_c values")
    p.add_argument("--delta-c-list", help="comma-separated delta_c values")
    p.set_defaults(func=cmd_sweep)

    return parser


def _configure(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    for name in ("delta_c", "omega_c", "gamma12", "gamma14", "delta_p", "od"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if overrides:
        cfg.system = dataclasses.replace(cfg.system, **overrides)
        # filters centered by mode name must track the overridden system
        if cfg.echo.get("filter"):
            from .config import _filter_from
            entries = cfg.echo["filter"]
            if isinstance(entries, dict):
                entries = [entries]
            cfg.filters = [_filter_from(e or {}, cfg.system) for e in entries]
    grid_overrides = {}
    if args.tau_max is not None:
        grid_overrides["tau_max"] = args.tau_max
    if args.n_points is not None:
        grid_overrides["n_points"] = args.n_points
    if grid_overrides:
        cfg.grid = dataclasses.replace(cfg.grid, **grid_overrides)
    if args.out is not None:
        cfg.output.directory = args.out
    if args.timestamps:
        cfg.output.timestamps = True
    if args.seed is not None and cfg.detection is not None:
        cfg.detection = dataclasses.replace(cfg.detection, rng_seed=args.seed)
    elif args.seed is not None:
        from .photostatistics import DetectionConfig
        cfg.detection = DetectionConfig(rng_seed=args.seed)
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _meta(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "system": dataclasses.asdict(cfg.system),
    }
    if cfg.echo:
        meta["config"] = cfg.echo
    meta.update(extra)
    return meta


def _print_lines(pairs) -> None:
    for key, value in pairs:
        print(f"{key}: {value}")


def cmd_dressed(cfg: RunConfig, args: argparse.Namespace) -> int:
    p = cfg.system
    if args.sweep:
        try:
            start, stop, n = args.sweep.split(":")
            values = np.linspace(float(start), float(stop), int(n))
        except ValueError as exc:
            raise ValidationError("--sweep expects START:STOP:N") from exc
        rows = {"delta_c_gamma13": [], "omega_e_gamma13": [],
                "two_gamma_minus_gamma13": [], "two_gamma_plus_gamma13": [],
                "linewidth_minus_hz": []}
        for dc in values:
            d = dressed_modes(dataclasses.replace(p, delta_c=float(dc)))
            rows["delta_c_gamma13"].append(dc)
            rows["omega_e_gamma13"].append(d.omega_e)
            rows["two_gamma_minus_gamma13"].append(2.0 * d.gamma_minus)
            rows["two_gamma_plus_gamma13"].append(2.0 * d.gamma_plus)
            rows["linewidth_minus_hz"].append(p.rate_to_hz(2.0 * d.gamma_minus))
        path = _outdir(cfg) / "dressed_sweep.csv"
        write_csv(path, rows, _meta(cfg, "dressed"), cfg.output.timestamps)
        print(f"wrote {path}")
        return 0
    d = dressed_modes(p)
    _print_lines([
        ("delta_c_gamma13", f"{p.delta_c:.6g}"),
        ("omega_c_gamma13", f"{p.omega_c:.6g}"),
        ("omega_e_gamma13", f"{d.omega_e:.6g}"),
        ("delta_plus_gamma13", f"{d.delta_plus:.6g}"),
        ("delta_minus_gamma13", f"{d.delta_minus:.6g}"),
        ("gamma_plus_gamma13", f"{d.gamma_plus:.6g}"),
        ("gamma_minus_gamma13", f"{d.gamma_minus:.6g}"),
        ("fwhm_narrow_gamma13", f"{d.fwhm_narrow:.6g}"),
        ("fwhm_narrow_hz", f"{p.rate_to_hz(d.fwhm_narrow):.6g}"),
        ("fwhm_broad_gamma13", f"{d.fwhm_broad:.6g}"),
        ("fwhm_broad_hz", f"{p.rate_to_hz(d.fwhm_broad):.6g}"),
        ("beat_period_ns", f"{beat_period(p):.6g}"),
    ])
    return 0


def cmd_spectrum(cfg: RunConfig, args: argparse.Namespace) -> int:
    omegas = default_frequency_grid(cfg.system, cfg.freq_points)
    full = chi3_full(cfg.system, omegas)
    approx = chi3_approx(cfg.system, omegas)
    out = _outdir(cfg)
    write_csv(out / "spectrum_full.csv",
              {"omega_over_gamma13": omegas, "value": spectrum_power(full)},
              _meta(cfg, "spectrum", curve="exact"), cfg.output.timestamps)
    write_csv(out / "spectrum_approx.csv",
              {"omega_over_gamma13": omegas, "value": spectrum_power(approx)},
              _meta(cfg, "spectrum", curve="two_pole"), cfg.output.timestamps)
    written = ["spectrum_full.csv", "spectrum_approx.csv"]
    if cfg.filters:
        filtered = full
        for f in cfg.filters:
            filtered = apply_filter(filtered, f)
        rel = np.abs(filtered.values) ** 2 / np.abs(full.values).max() ** 2
        write_csv(out / "spectrum_filtered.csv",
                  {"omega_over_gamma13": omegas, "value": rel},
                  _meta(cfg, "spectrum", curve="filtered"),
                  cfg.output.timestamps)
        written.append("spectrum_filtered.csv")
    print(f"wrote {', '.join(written)} in {out}")
    return 0


def cmd_wavepacket(cfg: RunConfig, args: argparse.Namespace) -> int:
    analytic = g2_analytic(cfg.system, grid=cfg.grid)
    omegas = default_frequency_grid(cfg.system, cfg.freq_points)
    spectrum = chi3_approx(cfg.system, omegas)
    numeric = psi_numeric(spectrum, cfg.grid, cfg.system)
    out = _outdir(cfg)
    write_csv(out / "wavepacket_analytic.csv",
              {"tau_ns": analytic.taus, "value": analytic.g2},
              _meta(cfg, "wavepacket", curve="analytic"), cfg.output.timestamps)
    write_csv(out / "wavepacket_numeric.csv",
              {"tau_ns": numeric.taus, "value": numeric.g2},
              _meta(cfg, "wavepacket", curve="numeric"), cfg.output.timestamps)
    full = chi3_full(cfg.system, omegas)
    write_csv(out / "spectrum_power.csv",
              {"omega_over_gamma13": omegas, "value": spectrum_power(full)},
              _meta(cfg, "wavepacket", curve="spectrum"), cfg.output.timestamps)
    a = analytic.g2 / analytic.g2.max()
    n = numeric.g2 / numeric.g2.max()
    print(f"analytic vs numeric max deviation: {np.max(np.abs(a - n)):.3e}")
    print(f"beat_period_ns: {beat_period(cfg.system):.6g}")
    print(f"wrote 3 files in {out}")
    return 0


def cmd_filter(cfg: RunConfig, args: argparse.Namespace) -> int:
    p = cfg.system
    filters = cfg.filters or [narrowband_etalon(narrow_mode_center(p), p)]
    omegas = default_frequency_grid(p, cfg.freq_points)
    full = chi3_full(p, omegas)
    filtered = full
    for f in filters:
        filtered = apply_filter(filtered, f)
    before = psi_numeric(full, cfg.grid, p)
    after = psi_numeric(filtered, cfg.grid, p)
    depth_before, depth_after = beat_suppression(before, after)
    out = _outdir(cfg)
    peak = np.abs(full.values).max() ** 2
    write_csv(out / "spectrum_unfiltered.csv",
              {"omega_over_gamma13": omegas,
               "value": np.abs(full.values) ** 2 / peak},
              _meta(cfg, "filter", curve="unfiltered"), cfg.output.timestamps)
    write_csv(out / "spectrum_filtered.csv",
              {"omega_over_gamma13": omegas,
               "value": np.abs(filtered.values) ** 2 / peak},
              _meta(cfg, "filter", curve="filtered"), cfg.output.timestamps)
    write_csv(out / "wavepacket_unfiltered.csv",
              {"tau_ns": before.taus, "value": before.g2},
              _meta(cfg, "filter", curve="unfiltered"), cfg.output.timestamps)
    write_csv(out / "wavepacket_filtered.csv",
              {"tau_ns": after.taus, "value": after.g2},
              _meta(cfg, "filter", curve="filtered"), cfg.output.timestamps)
    _print_lines([
        ("beat_depth_before", f"{depth_before:.4f}"),
        ("beat_depth_after", f"{depth_after:.4f}"),
    ])
    print(f"wrote 4 files in {out}")
    return 0


def _model_wavepacket(cfg: RunConfig):
    """Analytic model, or the filtered numeric one when filters are set."""
    if not cfg.filters:
        return g2_analytic(cfg.system, grid=cfg.grid)
    omegas = default_frequency_grid(cfg.system, cfg.freq_points)
    spectrum = chi3_full(cfg.system, omegas)
    for f in cfg.filters:
        spectrum = apply_filter(spectrum, f)
    return psi_numeric(spectrum, cfg.grid, cfg.system)


def cmd_montecarlo(cfg: RunConfig, args: argparse.Namespace) -> int:
    from .photostatistics import DetectionConfig

    det = cfg.detection or DetectionConfig()
    model = _model_wavepacket(cfg)
    h = simulate_coincidences(model, det, n_shards=args.shards,
                              workers=args.workers)
    out = _outdir(cfg)
    path = out / "histogram.csv"
    meta = histogram_metadata(h, det, extra={
        "command": "montecarlo",
        "system": dataclasses.asdict(cfg.system),
        "n_shards": args.shards,
        "tool_version": __version__,
    })
    write_histogram(path, h, meta, cfg.output.timestamps)
    _print_lines([
        ("total_coincidences", int(h.counts.sum())),
        ("n_singles_s", h.n_singles_s),
        ("n_singles_as", h.n_singles_as),
        ("expected_accidentals_per_bin", f"{expected_accidental_floor(h):.4g}"),
    ])
    print(f"wrote {path} (+ sidecar)")
    return 0


def cmd_fit(cfg: RunConfig, args: argparse.Namespace) -> int:
    h, _ = read_histogram(args.data)
    model = cfg.fit.model
    if args.model:
        model = None if args.model == "auto" else FitModel(args.model)
    if model is None:
        guess = initial_guess(h, cfg.system.si_gamma13)
        model = FitModel(guess["suggested_model"])
        print(f"auto-selected model: {model.which}")
    result = fit_wavepacket(h, model, fit_window=cfg.fit.window_ns,
                            si_gamma13=cfg.system.si_gamma13)
    print(result.report())
    out = _outdir(cfg)
    path = out / "fit_result.txt"
    try:
        path.write_text(result.report() + "\n")
    except OSError as exc:
        from .errors import OutputError
        raise OutputError(f"cannot write {path}: {exc}") from exc
    print(f"wrote {path}")
    if not result.converged:
        raise NumericalError("fit did not converge; best-so-far written")
    return 0


def cmd_modulate(cfg: RunConfig, args: argparse.Namespace) -> int:
    from .config import MaskSettings
    from .modulation import ModulationMask

    settings = cfg.mask or MaskSettings(mask=ModulationMask(), start_auto=True)
    w = _model_wavepacket(cfg)
    mask = settings.mask
    if settings.start_auto:
        start = suggest_mask_start(w)
        mask = dataclasses.replace(mask, start_offset=start)
        print(f"mask_start_ns: {start:.6g}")
    masked = apply_mask(w, mask, settings.delay_ns, settings.convention,
                        settings.rise_time_ns)
    out = _outdir(cfg)
    write_csv(out / "wavepacket_unmasked.csv",
              {"tau_ns": w.taus, "value": w.g2},
              _meta(cfg, "modulate", curve="unmasked"), cfg.output.timestamps)
    write_csv(out / "mask.csv",
              {"tau_ns": w.taus,
               "value": mask_values(mask, w.taus - settings.delay_ns)},
              _meta(cfg, "modulate", curve="mask"), cfg.output.timestamps)
    write_csv(out / "wavepacket_modulated.csv",
              {"tau_ns": masked.taus, "value": masked.g2},
              _meta(cfg, "modulate", curve="modulated"), cfg.output.timestamps)
    print(f"beat_period_ns: {beat_period(cfg.system):.6g}")
    print(f"wrote 3 files in {out}")
    return 0


def cmd_budget(cfg: RunConfig, args: argparse.Namespace) -> int:
    detected = args.detected_rate
    if detected is None:
        detected = cfg.budget.detected_rate
    print(budget_report(detected, cfg.budget.budget))
    return 0


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.delta_c_list:
        values = [float(v) for v in args.delta_c_list.split(",")]
    elif cfg.sweep_delta_c:
        values = cfg.sweep_delta_c
    else:
        values = [0.0, 16.7, 28.3, 45.0]
    rows = {"delta_c_gamma13": [], "omega_e_gamma13": [], "beat_period_ns": [],
            "two_gamma_minus_gamma13": [], "two_gamma_plus_gamma13": [],
            "linewidth_minus_hz": []}
    for dc in values:
        p = dataclasses.replace(cfg.system, delta_c=float(dc))
        d = dressed_modes(p)
        rows["delta_c_gamma13"].append(dc)
        rows["omega_e_gamma13"].append(d.omega_e)
        rows["beat_period_ns"].append(beat_period(p))
        rows["two_gamma_minus_gamma13"].append(2.0 * d.gamma_minus)
        rows["two_gamma_plus_gamma13"].append(2.0 * d.gamma_plus)
        rows["linewidth_minus_hz"].append(p.rate_to_hz(2.0 * d.gamma_minus))
    path = _outdir(cfg) / "beat_periods.csv"
    write_csv(path, rows, _meta(cfg, "sweep"), cfg.output.timestamps)
    for dc, period in zip(rows["delta_c_gamma13"], rows["beat_period_ns"]):
        print(f"delta_c {dc:g}: beat period {period:.4g} ns")
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _configure(args)
        return args.func(cfg, args)
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
