"""Simulation parameters, their file/CLI parsing, and CSV result writers.

A configuration file is a flat list of ``key = value`` lines with ``#``
comment lines; keys are exactly the :class:`SimulationConfig` field names.
Files are read through python-decouple, command-line flags are layered on
top of the file values, and every key is cast and validated before a
:class:`SimulationConfig` is built.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
from collections import ChainMap
from dataclasses import dataclass, fields
from enum import StrEnum
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd
from decouple import Choices, Config, Csv, RepositoryEmpty, RepositoryEnv

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping, Sequence

    from .montecarlo import EmpiricalCdf, SweepResult

logger = logging.getLogger(__name__)

SWEEP_CONFIG_FILENAME = "sweep_config.cfg"
SUMMARY_FILENAME = "summary.csv"
TRADEOFF_FILENAME = "tradeoff.csv"

_MAX_SEED = 2**64 - 1


class FadingMode(StrEnum):
    """How collected signal power treats small-scale fading."""

    HARDENED = "hardened"
    EXACT = "exact"


class InterferenceMode(StrEnum):
    """Which out-of-region UTs count as interferers."""

    ALL_OUT_OF_REGION = "all_out_of_region"
    PILOT_COLLISION_ONLY = "pilot_collision_only"


class Metric(StrEnum):
    """Per-UT quantities aggregated into one CDF per radius point."""

    SIGNAL = "signal"
    INTERFERENCE = "interference"
    SIR = "sir"
    SE = "se"

    @property
    def in_db(self) -> bool:
        """Power-like metrics are stored linear and rendered in dB."""
        return self is not Metric.SE


class ConfigError(ValueError):
    """A configuration key is missing, unparsable, or violates a constraint."""

    def __init__(self, key: str, reason: str) -> None:
        """Keep the offending key and reason; message is ``key: reason``."""
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


@dataclass(frozen=True)
class SimulationConfig:
    """All physical, geometric and run-control parameters of a sweep.

    Densities are per km², lengths in meters. The defaults are the values
    of the reference Fog massive MIMO scenario; ``window_nx``,
    ``window_ny`` and ``trials`` are desk-scale choices.
    """

    rho_u: float = 10.0
    rho_a: float = 40.0
    d_epu: float = 1000.0
    r_coord_list: tuple[float, ...] = (300.0, 500.0, 700.0, 1000.0)
    baseline_service_area: bool = False
    gamma0: float = 2.0
    gamma1: float = 3.5
    d0: float = 10.0
    d1: float = 100.0
    sigma_sh_db: float = 8.0
    n_r: int = 1
    tau_c: int = 200
    window_nx: int = 6
    window_ny: int = 6
    trials: int = 100
    master_seed: int = 0
    fading_mode: FadingMode = FadingMode.HARDENED
    interference_mode: InterferenceMode = InterferenceMode.ALL_OUT_OF_REGION
    max_sir_db: float = 60.0

    def __post_init__(self) -> None:
        """Normalise the radius list and reject invalid parameter sets."""
        object.__setattr__(
            self, "r_coord_list", tuple(float(r) for r in self.r_coord_list)
        )
        object.__setattr__(self, "fading_mode", FadingMode(self.fading_mode))
        object.__setattr__(
            self,
            "interference_mode",
            InterferenceMode(self.interference_mode),
        )
        _validate(self)

    @property
    def torus_width(self) -> float:
        """Torus extent along x in meters."""
        return self.window_nx * self.d_epu

    @property
    def torus_height(self) -> float:
        """Torus extent along y in meters (rows are √3/2·d_epu apart)."""
        return self.window_ny * math.sqrt(3) / 2 * self.d_epu

    @property
    def max_radius(self) -> float:
        """Largest admissible coordination radius (half the smaller side)."""
        return min(self.torus_width, self.torus_height) / 2

    @property
    def n_epus(self) -> int:
        """Number of EPU centers on the torus."""
        return self.window_nx * self.window_ny

    @property
    def radius_points(self) -> tuple[float | None, ...]:
        """Sorted sweep radii, then ``None`` for the hexagon baseline."""
        points: list[float | None] = sorted(set(self.r_coord_list))
        if self.baseline_service_area:
            points.append(None)
        return tuple(points)


def _require(condition: bool, key: str, reason: str) -> None:
    if not condition:
        raise ConfigError(key, reason)


def _validate(config: SimulationConfig) -> None:
    """Raise ConfigError naming the first violated constraint."""
    for key in ("rho_u", "rho_a", "d_epu", "gamma0", "gamma1", "d0", "d1"):
        value = getattr(config, key)
        _require(
            math.isfinite(value) and value > 0,
            key,
            f"must be > 0, got {value}",
        )
    _require(config.d0 < config.d1, "d0", "d0 < d1 violated")
    _require(
        math.isfinite(config.sigma_sh_db) and config.sigma_sh_db >= 0,
        "sigma_sh_db",
        f"must be >= 0, got {config.sigma_sh_db}",
    )
    _require(config.n_r >= 1, "n_r", f"must be >= 1, got {config.n_r}")
    _require(config.tau_c >= 2, "tau_c", f"must be >= 2, got {config.tau_c}")
    _require(
        config.window_nx >= 1,
        "window_nx",
        f"must be >= 1, got {config.window_nx}",
    )
    _require(
        config.window_ny >= 2 and config.window_ny % 2 == 0,
        "window_ny",
        f"must be even and >= 2, got {config.window_ny}",
    )
    _require(
        config.trials >= 1, "trials", f"must be >= 1, got {config.trials}"
    )
    _require(
        0 <= config.master_seed <= _MAX_SEED,
        "master_seed",
        f"must be an unsigned 64-bit integer, got {config.master_seed}",
    )
    _require(
        math.isfinite(config.max_sir_db),
        "max_sir_db",
        f"must be finite, got {config.max_sir_db}",
    )
    _require(bool(config.r_coord_list), "r_coord_list", "must not be empty")
    for radius in config.r_coord_list:
        _require(
            0 < radius <= config.max_radius,
            "r_coord_list",
            f"radius {radius} outside (0, {config.max_radius:.2f}] "
            "(half the smaller torus side)",
        )
    labels: dict[str, float] = {}
    for radius in config.r_coord_list:
        label = radius_label(radius)
        _require(
            label not in labels,
            "r_coord_list",
            f"radii {labels.get(label)} and {radius} share the file label "
            f"r{label}",
        )
        labels[label] = radius


# ---------------------------------------------------------------------------
# Key table: one entry per SimulationConfig field
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Key:
    name: str
    cast: Callable[[Any], Any]
    flag: str
    help: str


_KEYS: tuple[_Key, ...] = (
    _Key("rho_u", float, "--rho-u", "UT density per km²."),
    _Key("rho_a", float, "--rho-a", "AP density per km²."),
    _Key("d_epu", float, "--d-epu", "Spacing of EPU centers in meters."),
    _Key(
        "r_coord_list",
        Csv(cast=float, post_process=tuple),
        "--r-coord",
        "Comma-separated coordination radii in meters.",
    ),
    _Key(
        "baseline_service_area",
        bool,
        "--baseline-service-area",
        "Also evaluate coordination limited to the service hexagon.",
    ),
    _Key("gamma0", float, "--gamma0", "Path-loss exponent between d0 and d1."),
    _Key("gamma1", float, "--gamma1", "Path-loss exponent beyond d1."),
    _Key("d0", float, "--d0", "First path-loss breakpoint in meters."),
    _Key("d1", float, "--d1", "Second path-loss breakpoint in meters."),
    _Key("sigma_sh_db", float, "--sigma-sh-db", "Shadowing std in dB."),
    _Key("n_r", int, "--n-r", "Antennas per AP."),
    _Key("tau_c", int, "--tau-c", "Coherence interval in channel uses."),
    _Key("window_nx", int, "--window-nx", "EPU lattice columns."),
    _Key("window_ny", int, "--window-ny", "EPU lattice rows (even)."),
    _Key("trials", int, "--trials", "Number of Monte Carlo trials."),
    _Key("master_seed", int, "--seed", "Master seed (unsigned 64-bit)."),
    _Key(
        "fading_mode",
        Choices([m.value for m in FadingMode]),
        "--fading-mode",
        "hardened (N_r·Σβ) or exact (realized Rayleigh fading).",
    ),
    _Key(
        "interference_mode",
        Choices([m.value for m in InterferenceMode]),
        "--interference-mode",
        "all_out_of_region or pilot_collision_only.",
    ),
    _Key("max_sir_db", float, "--max-sir-db", "SIR cap in dB."),
)
_KEY_NAMES = frozenset(key.name for key in _KEYS)


def _render(value: object) -> str:
    """Render a field value in the config-file syntax."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, StrEnum):
        return value.value
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_DEFAULTS: dict[str, str] = {
    f.name: _render(f.default) for f in fields(SimulationConfig)
}


class _LayeredRepository(RepositoryEmpty):
    """decouple repository over several mappings; earlier layers win."""

    def __init__(self, *layers: Mapping[str, str]) -> None:
        self.data = ChainMap(*(dict(layer) for layer in layers))

    def __contains__(self, key: str) -> bool:
        return key in self.data

    def __getitem__(self, key: str) -> str:
        return self.data[key]


def _read_file(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    data = dict(RepositoryEnv(str(path)).data)
    for key in data:
        if key not in _KEY_NAMES:
            raise ConfigError(key, f"unknown configuration key in {path}")
    return data


# ---------------------------------------------------------------------------
# Public parsing API
# ---------------------------------------------------------------------------


def add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Register ``--config`` and one override flag per configuration key.

    Values are kept as strings; casting happens in :func:`load_config` so
    that parse errors are reported with the key name.
    """
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="Configuration file with key = value lines.",
    )
    for key in _KEYS:
        if key.cast is bool:
            parser.add_argument(
                key.flag,
                dest=key.name,
                action=argparse.BooleanOptionalAction,
                default=None,
                help=key.help,
            )
        else:
            parser.add_argument(
                key.flag, dest=key.name, default=None, help=key.help
            )


def overrides_from_options(options: Mapping[str, object]) -> dict[str, str]:
    """Collect the override flags that were actually given."""
    overrides: dict[str, str] = {}
    for key in _KEYS:
        value = options.get(key.name)
        if value is None:
            continue
        overrides[key.name] = (
            _render(value) if isinstance(value, bool) else str(value)
        )
    return overrides


def load_config(
    config_path: Path | str | None = None,
    overrides: Mapping[str, str] | None = None,
) -> SimulationConfig:
    """Build a validated config from an optional file plus overrides.

    Precedence is environment, then overrides, then file, then defaults:
    decouple reads an environment variable named exactly like a key before
    any repository, so such a variable shadows the other layers. A
    warning is logged for every shadowed key.
    """
    file_values = _read_file(Path(config_path)) if config_path else {}
    source = Config(_LayeredRepository(overrides or {}, file_values))
    for name in sorted(_KEY_NAMES.intersection(os.environ)):
        logger.warning(
            "Environment variable %s=%r overrides the configured value",
            name,
            os.environ[name],
        )

    values: dict[str, Any] = {}
    for key in _KEYS:
        raw = source(key.name, default=_DEFAULTS[key.name])
        try:
            values[key.name] = source(
                key.name, default=_DEFAULTS[key.name], cast=key.cast
            )
        except ValueError as exc:
            reason = f"cannot parse {raw!r} ({exc})"
            raise ConfigError(key.name, reason) from exc
    config = SimulationConfig(**values)
    logger.debug("Loaded configuration: %s", config)
    return config


def parse_config(cli_args: Sequence[str]) -> SimulationConfig:
    """Parse command-line arguments (and the file they name) into a config.

    Raises:
        ConfigError: missing file, unparsable value, or invariant violation.
    """
    parser = argparse.ArgumentParser(prog="fogsim", exit_on_error=False)
    add_config_arguments(parser)
    try:
        namespace = parser.parse_args(list(cli_args))
    except argparse.ArgumentError as exc:
        raise ConfigError(exc.argument_name or "cli", exc.message) from exc
    overrides = overrides_from_options(vars(namespace))
    return load_config(namespace.config, overrides)


def format_config(config: SimulationConfig) -> str:
    """Render a config in the file format; parse_config reads it back."""
    lines = ["# fogsim simulation configuration"]
    lines.extend(
        f"{f.name} = {_render(getattr(config, f.name))}"
        for f in fields(SimulationConfig)
    )
    return "\n".join(lines) + "\n"


def write_config_file(config: SimulationConfig, path: Path) -> Path:
    """Write ``config`` to ``path`` in the file format and return the path."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_config(config), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# CSV writers
# ---------------------------------------------------------------------------


def radius_label(r_coord: float | None) -> str:
    """Return the km rendering of a radius point (``baseline`` for None)."""
    return "baseline" if r_coord is None else f"{r_coord / 1000:.2f}"


def _to_output_units(metric: Metric, values: np.ndarray) -> np.ndarray:
    if not metric.in_db:
        return np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return 10 * np.log10(np.asarray(values, dtype=float))


def write_cdf_csv(
    metric_name: str,
    r_coord: float | None,
    cdf: EmpiricalCdf,
    out_dir: Path,
) -> Path:
    """Write one empirical CDF as ``{metric}_r{km:.2f}.csv``; return the path.

    Power-like metrics are written in dB relative to unit transmit power
    under the header ``value_db,cdf``; spectral efficiency is written in
    bits/s/Hz under ``value,cdf``.
    """
    metric = Metric(metric_name)
    if len(cdf) == 0:
        msg = f"Cannot write an empty CDF for {metric_name}"
        raise ValueError(msg)
    suffix = "baseline" if r_coord is None else f"r{radius_label(r_coord)}"
    path = Path(out_dir) / f"{metric.value}_{suffix}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)

    value_column = "value_db" if metric.in_db else "value"
    frame = pd.DataFrame(
        {
            value_column: _to_output_units(metric, cdf.sorted_values),
            "cdf": cdf.probabilities,
        }
    )
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path


def write_summary_csv(result: SweepResult, out_dir: Path) -> Path:
    """Write ``summary.csv``: median, 5th and 95th percentile per curve."""
    rows = []
    for (metric, r_coord), cdf in result.per_point.items():
        median, p05, p95 = _to_output_units(
            metric, cdf.quantiles((0.5, 0.05, 0.95))
        )
        rows.append(
            {
                "metric": metric.value,
                "r_coord_km": radius_label(r_coord),
                "median_db": median,
                "p05_db": p05,
                "p95_db": p95,
            }
        )
    path = Path(out_dir) / SUMMARY_FILENAME
    pd.DataFrame(rows).to_csv(
        path, index=False, float_format="%.6f", lineterminator="\n"
    )
    return path


def write_tradeoff_csv(result: SweepResult, out_dir: Path) -> Path:
    """Write ``tradeoff.csv``: realized pilot length and APs per radius."""
    frame = pd.DataFrame(
        [
            {
                "r_coord_km": radius_label(point.r_coord),
                "mean_tau_p": point.mean_tau_p,
                "expected_k_coord": point.expected_k_coord,
                "mean_coordinated_aps": point.mean_coordinated_aps,
                "expected_m_coord": point.expected_m_coord,
                "mean_data_fraction": point.mean_data_fraction,
                "median_se": point.median_se,
            }
            for point in result.tradeoff.values()
        ]
    )
    path = Path(out_dir) / TRADEOFF_FILENAME
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path


def write_sweep(result: SweepResult, out_dir: Path) -> list[Path]:
    """Write every CDF file plus the summary and trade-off tables."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        write_cdf_csv(metric.value, r_coord, cdf, out_dir)
        for (metric, r_coord), cdf in result.per_point.items()
    ]
    paths.append(write_summary_csv(result, out_dir))
    paths.append(write_tradeoff_csv(result, out_dir))
    logger.info("Wrote %d result files to %s", len(paths), out_dir)
    return paths
