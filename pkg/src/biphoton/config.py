"""Run configuration: one YAML file per run, sections per module.

Sections (all optional; physically sensible defaults apply):

    system:    gamma12, gamma14, delta_p, delta_c, omega_c, od, gamma13_mhz
    grid:      tau_max_ns, n_points, tau_min_ns, freq_points
    filter:    list of {center_gamma13, fwhm_mhz, fsr_ghz, peak_transmission}
               (center_gamma13 takes a number or "narrow"/"broad")
    detection: pair_rate, qe_stokes, qe_antistokes, channel_t_stokes,
               channel_t_antistokes, duty_cycle, measurement_time,
               bin_width_ns, background_s, background_as, rng_seed
    fit:       model (two_component|resonant|single_exponential|auto),
               window_ns ([lo, hi]), fixed_t0_ns
    mask:      kind, pulse_width_ns, pulse_separation_ns, n_pulses,
               start_offset_ns (number or "auto"), delay_ns, convention,
               rise_time_ns, samples
    budget:    detected_rate, factors ([[label, value], ...])
    sweep:     delta_c (list of values)
    output:    directory, format (csv|structured-text), timestamps

Every section is validated against its module's invariants before any
computation starts; unknown keys are rejected to catch typos early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ValidationError
from .estimation import FitModel
from .filtering import EtalonFilter, mhz_to_gamma13, narrow_mode_center
from .modulation import ModulationMask
from .params import SystemParams, dressed_modes
from .photostatistics import DetectionConfig, LossBudget
from .wavepacket import TimeGridConfig

DEFAULT_BUDGET_FACTORS = (
    ("detector_qe_stokes", 0.60),
    ("detector_qe_antistokes", 0.60),
    ("stokes_broadband_etalon", 0.45),
    ("antistokes_narrowband_etalon_fiber", 0.026),
    ("stokes_channel_transmittance", 0.50),
    ("antistokes_channel_transmittance", 0.50),
    ("duty_cycle", 0.20),
)


@dataclass
class MaskSettings:
    mask: ModulationMask
    start_auto: bool = False
    delay_ns: float = 0.0
    convention: str = "intensity"
    rise_time_ns: float = 0.0


@dataclass
class FitSettings:
    model: FitModel | None  # None means pick from the data
    window_ns: tuple[float, float] | None = None


@dataclass
class BudgetSettings:
    detected_rate: float = 2.18
    budget: LossBudget = field(
        default_factory=lambda: LossBudget(DEFAULT_BUDGET_FACTORS)
    )


@dataclass
class OutputSettings:
    directory: str = "out"
    format: str = "csv"
    timestamps: bool = False


@dataclass
class RunConfig:
    system: SystemParams = field(default_factory=SystemParams)
    grid: TimeGridConfig = field(default_factory=TimeGridConfig)
    freq_points: int | None = None
    filters: list = field(default_factory=list)
    detection: DetectionConfig | None = None
    fit: FitSettings = field(default_factory=lambda: FitSettings(FitModel()))
    mask: MaskSettings | None = None
    budget: BudgetSettings = field(default_factory=BudgetSettings)
    sweep_delta_c: list = field(default_factory=list)
    output: OutputSettings = field(default_factory=OutputSettings)
    echo: dict = field(default_factory=dict)


def _check_keys(section: str, given: dict, allowed: set) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ValidationError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
        )


def _num(section: str, key: str, value) -> float:
    # YAML 1.1 reads exponents without a sign ("4.0e4") as strings, so
    # coerce rather than trusting the loader's type
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"[{section}] {key} must be a number") from exc


def _intval(section: str, key: str, value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"[{section}] {key} must be an integer") from exc


def _system_from(d: dict) -> SystemParams:
    _check_keys(
        "system", d,
        {"gamma12", "gamma14", "delta_p", "delta_c", "omega_c", "od", "gamma13_mhz"},
    )
    kwargs = {k: _num("system", k, v) for k, v in d.items() if k != "gamma13_mhz"}
    if "gamma13_mhz" in d:
        kwargs["si_gamma13"] = (
            2.0 * math.pi * _num("system", "gamma13_mhz", d["gamma13_mhz"]) * 1e6
        )
    return SystemParams(**kwargs)


def _grid_from(d: dict) -> tuple[TimeGridConfig, int | None]:
    _check_keys("grid", d, {"tau_max_ns", "n_points", "tau_min_ns", "freq_points"})
    grid = TimeGridConfig(
        tau_max=_num("grid", "tau_max_ns", d.get("tau_max_ns", 400.0)),
        n_points=_intval("grid", "n_points", d.get("n_points", 2000)),
        tau_min=_num("grid", "tau_min_ns", d.get("tau_min_ns", 0.0)),
    )
    freq_points = (
        _intval("grid", "freq_points", d["freq_points"])
        if "freq_points" in d else None
    )
    return grid, freq_points


def _filter_from(d: dict, p: SystemParams) -> EtalonFilter:
    _check_keys(
        "filter", d, {"center_gamma13", "fwhm_mhz", "fsr_ghz", "peak_transmission"}
    )
    center = d.get("center_gamma13", "narrow")
    if isinstance(center, str):
        if center == "narrow":
            center_val = narrow_mode_center(p)
        elif center == "broad":
            center_val = dressed_modes(p).broad_detuning
        else:
            raise ValidationError(
                "center_gamma13 must be a number, 'narrow', or 'broad'"
            )
    else:
        center_val = _num("filter", "center_gamma13", center)
    return EtalonFilter(
        center=center_val,
        fwhm=mhz_to_gamma13(_num("filter", "fwhm_mhz", d.get("fwhm_mhz", 15.0)), p),
        fsr=mhz_to_gamma13(
            _num("filter", "fsr_ghz", d.get("fsr_ghz", 22.9)) * 1000.0, p
        ),
        peak_transmission=_num(
            "filter", "peak_transmission", d.get("peak_transmission", 0.12)
        ),
    )


def _detection_from(d: dict) -> DetectionConfig:
    _check_keys(
        "detection", d,
        {"pair_rate", "qe_stokes", "qe_antistokes", "channel_t_stokes",
         "channel_t_antistokes", "duty_cycle", "measurement_time",
         "bin_width_ns", "background_s", "background_as", "rng_seed"},
    )
    kwargs = {
        k: _num("detection", k, v) for k, v in d.items() if k != "rng_seed"
    }
    if "bin_width_ns" in kwargs:
        kwargs["bin_width"] = kwargs.pop("bin_width_ns")
    if "rng_seed" in d:
        kwargs["rng_seed"] = _intval("detection", "rng_seed", d["rng_seed"])
    return DetectionConfig(**kwargs)


def _fit_from(d: dict) -> FitSettings:
    _check_keys("fit", d, {"model", "window_ns", "fixed_t0_ns"})
    name = d.get("model", "two_component")
    fixed_t0 = d.get("fixed_t0_ns")
    if name == "auto":
        model = None
    else:
        model = FitModel(
            which=name,
            fixed_t0=(
                _num("fit", "fixed_t0_ns", fixed_t0)
                if fixed_t0 is not None else None
            ),
        )
    window = d.get("window_ns")
    if window is not None:
        try:
            lo, hi = (_num("fit", "window_ns", v) for v in window)
        except (TypeError, ValueError) as exc:
            raise ValidationError("fit window_ns must be [lo, hi]") from exc
        if not lo < hi:
            raise ValidationError("fit window_ns must satisfy lo < hi")
        window = (lo, hi)
    return FitSettings(model=model, window_ns=window)


def _mask_from(d: dict) -> MaskSettings:
    _check_keys(
        "mask", d,
        {"kind", "pulse_width_ns", "pulse_separation_ns", "n_pulses",
         "start_offset_ns", "delay_ns", "convention", "rise_time_ns", "samples"},
    )
    start = d.get("start_offset_ns", 0.0)
    start_auto = isinstance(start, str)
    if start_auto and start != "auto":
        raise ValidationError("start_offset_ns must be a number or 'auto'")
    mask = ModulationMask(
        kind=d.get("kind", "square_train"),
        pulse_width=_num("mask", "pulse_width_ns", d.get("pulse_width_ns", 50.0)),
        pulse_separation=_num(
            "mask", "pulse_separation_ns", d.get("pulse_separation_ns", 50.0)
        ),
        n_pulses=_intval("mask", "n_pulses", d.get("n_pulses", 2)),
        start_offset=0.0 if start_auto else _num("mask", "start_offset_ns", start),
        samples=d.get("samples"),
    )
    convention = d.get("convention", "intensity")
    if convention not in ("intensity", "amplitude"):
        raise ValidationError("mask convention must be intensity or amplitude")
    return MaskSettings(
        mask=mask,
        start_auto=start_auto,
        delay_ns=_num("mask", "delay_ns", d.get("delay_ns", 0.0)),
        convention=convention,
        rise_time_ns=_num("mask", "rise_time_ns", d.get("rise_time_ns", 0.0)),
    )


def _budget_from(d: dict) -> BudgetSettings:
    _check_keys("budget", d, {"detected_rate", "factors"})
    factors = d.get("factors")
    if factors is not None:
        try:
            pairs = tuple(
                (str(label), _num("budget", str(label), v)) for label, v in factors
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(
                "budget factors must be a list of [label, value] pairs"
            ) from exc
        budget = LossBudget(pairs)
    else:
        budget = LossBudget(DEFAULT_BUDGET_FACTORS)
    return BudgetSettings(
        detected_rate=_num("budget", "detected_rate", d.get("detected_rate", 2.18)),
        budget=budget,
    )


def _output_from(d: dict) -> OutputSettings:
    _check_keys("output", d, {"directory", "format", "timestamps"})
    fmt = d.get("format", "csv")
    if fmt not in ("csv", "structured-text"):
        raise ValidationError("output format must be csv or structured-text")
    return OutputSettings(
        directory=str(d.get("directory", "out")),
        format=fmt,
        timestamps=bool(d.get("timestamps", False)),
    )


def config_from_dict(raw: dict) -> RunConfig:
    """Build and validate a RunConfig from parsed YAML."""
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValidationError("config root must be a mapping of sections")
    _check_keys(
        "config", raw,
        {"system", "grid", "filter", "detection", "fit", "mask", "budget",
         "sweep", "output"},
    )
    cfg = RunConfig(echo=raw)
    if "system" in raw:
        cfg.system = _system_from(raw["system"] or {})
    if "grid" in raw:
        cfg.grid, cfg.freq_points = _grid_from(raw["grid"] or {})
    if "filter" in raw:
        entries = raw["filter"] or []
        if isinstance(entries, dict):
            entries = [entries]
        cfg.filters = [_filter_from(e or {}, cfg.system) for e in entries]
    if "detection" in raw:
        cfg.detection = _detection_from(raw["detection"] or {})
    if "fit" in raw:
        cfg.fit = _fit_from(raw["fit"] or {})
    if "mask" in raw:
        cfg.mask = _mask_from(raw["mask"] or {})
    if "budget" in raw:
        cfg.budget = _budget_from(raw["budget"] or {})
    if "sweep" in raw:
        section = raw["sweep"] or {}
        _check_keys("sweep", section, {"delta_c"})
        cfg.sweep_delta_c = [float(v) for v in section.get("delta_c", [])]
    if "output" in raw:
        cfg.output = _output_from(raw["output"] or {})
    return cfg


def load_config(path) -> RunConfig:
    """Parse a YAML config file into a validated RunConfig."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config is not valid YAML: {exc}") from exc
    return config_from_dict(raw)
