"""Seeded Monte Carlo trials over the coordination-radius sweep.

One trial draws one layout and one channel realization and evaluates
every EPU at every radius point on them, so radii are compared on paired
samples. Trials are independent work units; their random streams derive
only from ``(master_seed, trial, purpose)``, and outcomes are merged by
trial index, so results do not depend on worker count or scheduling.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING

import numpy as np

from . import geometry
from .channel import build_channel
from .config_io import Metric
from .coordination import build_epu_view
from .metrics import data_fraction, evaluate_view

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from numpy.typing import ArrayLike

    from .config_io import SimulationConfig
    from .geometry import NetworkLayout
    from .metrics import MetricsRecord

logger = logging.getLogger(__name__)

RadiusPoint = float | None


# ---------------------------------------------------------------------------
# Seeding
# ---------------------------------------------------------------------------

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SeedPurpose(IntEnum):
    """Tag separating the random streams of one trial."""

    LAYOUT = 1
    SHADOWING = 2
    FADING = 3
    PILOTS = 4


def _mix64(z: int) -> int:
    """SplitMix64 output finalizer."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_trial_seed(
    master_seed: int, trial: int, purpose: SeedPurpose
) -> int:
    """Hash (master_seed, trial, purpose) into an unsigned 64-bit seed.

    Each word is absorbed as ``state = mix64((state ^ word) + gamma)``.
    Pinned outputs live in ``reference_vectors/derive_trial_seed.csv``.
    """
    state = _mix64((master_seed + _GOLDEN_GAMMA) & _MASK64)
    for word in (trial, int(purpose)):
        state = _mix64(((state ^ (word & _MASK64)) + _GOLDEN_GAMMA) & _MASK64)
    return state


def trial_stream(
    config: SimulationConfig, trial: int, purpose: SeedPurpose
) -> np.random.Generator:
    """Random stream of one trial for one purpose."""
    return np.random.default_rng(
        derive_trial_seed(config.master_seed, trial, purpose)
    )


def trial_layout(config: SimulationConfig, trial: int) -> NetworkLayout:
    """The layout drawn by trial ``trial``."""
    return geometry.build_layout(
        config, trial_stream(config, trial, SeedPurpose.LAYOUT)
    )


# ---------------------------------------------------------------------------
# Empirical CDFs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Sorted samples with probabilities (i + 1) / n."""

    sorted_values: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        """Check the CDF axioms."""
        values = np.asarray(self.sorted_values, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "sorted_values", values)
        object.__setattr__(self, "probabilities", probs)
        if values.shape != probs.shape or values.ndim != 1:
            msg = (
                f"values {values.shape} and probabilities {probs.shape} "
                "must be equal-length vectors"
            )
            raise ValueError(msg)
        if not values.size:
            return
        if np.any(np.diff(values) < 0):
            msg = "sorted_values must be ascending"
            raise ValueError(msg)
        if probs[0] <= 0 or np.any(np.diff(probs) <= 0) or probs[-1] != 1.0:
            msg = "probabilities must increase strictly in (0, 1] to 1.0"
            raise ValueError(msg)

    def __len__(self) -> int:
        """Number of samples."""
        return int(self.sorted_values.size)

    def quantiles(self, levels: ArrayLike) -> np.ndarray:
        """Empirical quantiles; each is one of the samples."""
        return np.quantile(self.sorted_values, levels, method="inverted_cdf")

    def median(self) -> float:
        """Empirical median."""
        return float(self.quantiles(0.5))

    def cdf_at(self, value: float) -> float:
        """Fraction of samples <= ``value``."""
        if not len(self):
            msg = "empty CDF"
            raise ValueError(msg)
        rank = np.searchsorted(self.sorted_values, value, side="right")
        return rank / len(self)


def empirical_cdf(samples: ArrayLike) -> EmpiricalCdf:
    """Build the empirical CDF of ``samples``; duplicates are kept."""
    values = np.sort(np.asarray(samples, dtype=float).ravel())
    if not values.size:
        msg = "empirical_cdf needs at least one sample"
        raise ValueError(msg)
    if np.any(np.isnan(values)):
        msg = "empirical_cdf got NaN samples"
        raise ValueError(msg)
    n = values.size
    return EmpiricalCdf(values, np.arange(1, n + 1) / n)


# ---------------------------------------------------------------------------
# Trials
# ---------------------------------------------------------------------------


class EmptyGroupError(ValueError):
    """A (metric, radius) group received no usable record."""


@dataclass(frozen=True, slots=True)
class ViewStat:
    """Pilot length and coordinated-AP count of one EPU view."""

    r_coord: RadiusPoint
    epu_index: int
    tau_p: int
    n_coordinated_aps: int


@dataclass
class TrialOutcome:
    """Everything one trial contributes to a sweep."""

    trial: int
    records: list[MetricsRecord] = field(default_factory=list)
    skipped: int = 0
    uncovered: int = 0
    view_stats: list[ViewStat] = field(default_factory=list)


def run_trial(config: SimulationConfig, trial: int) -> TrialOutcome:
    """Evaluate every EPU at every radius point on one shared channel."""
    layout = trial_layout(config, trial)
    chan = build_channel(
        layout,
        config,
        trial_stream(config, trial, SeedPurpose.SHADOWING),
        trial_stream(config, trial, SeedPurpose.FADING),
    )
    pilot_seed = derive_trial_seed(
        config.master_seed, trial, SeedPurpose.PILOTS
    )

    outcome = TrialOutcome(trial=trial)
    for slot, r_coord in enumerate(config.radius_points):
        for epu in range(layout.n_epus):
            rng = np.random.default_rng([pilot_seed, epu, slot])
            view = build_epu_view(epu, r_coord, layout, rng)
            evaluation = evaluate_view(view, chan, config)
            outcome.records.extend(evaluation.records)
            outcome.skipped += evaluation.skipped
            outcome.uncovered += evaluation.uncovered
            outcome.view_stats.append(
                ViewStat(
                    r_coord=r_coord,
                    epu_index=epu,
                    tau_p=view.tau_p,
                    n_coordinated_aps=int(view.coordinated_aps.size),
                )
            )
    logger.debug(
        "Trial %d: %d records, %d skipped, %d uncovered",
        trial,
        len(outcome.records),
        outcome.skipped,
        outcome.uncovered,
    )
    return outcome


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TradeoffPoint:
    """Realized pilot length and AP count at one radius, with expectations."""

    r_coord: RadiusPoint
    mean_tau_p: float
    expected_k_coord: float
    mean_coordinated_aps: float
    expected_m_coord: float
    mean_data_fraction: float
    median_se: float


@dataclass
class SweepResult:
    """One empirical CDF per (metric, radius point), plus sweep counters."""

    per_point: dict[tuple[Metric, RadiusPoint], EmpiricalCdf]
    skipped_records: int
    uncovered_records: int = 0
    radius_points: tuple[RadiusPoint, ...] = ()
    tradeoff: dict[RadiusPoint, TradeoffPoint] = field(default_factory=dict)
    trials: int = 0

    def cdf(self, metric: Metric | str, r_coord: RadiusPoint) -> EmpiricalCdf:
        """CDF of ``metric`` at ``r_coord`` (None for the baseline)."""
        return self.per_point[Metric(metric), r_coord]


def _metric_samples(
    metric: Metric, records: Sequence[MetricsRecord]
) -> np.ndarray:
    if metric is Metric.SIGNAL:
        return np.array([r.signal for r in records])
    if metric is Metric.INTERFERENCE:
        return np.array([r.interference for r in records])
    if metric is Metric.SIR:
        return 10 ** (np.array([r.sir_db for r in records]) / 10)
    return np.array([r.se for r in records])


def _expectations(
    config: SimulationConfig, r_coord: RadiusPoint
) -> tuple[float, float]:
    if r_coord is None:
        area = geometry.service_area_km2(config)
        return config.rho_u * area, config.rho_a * area
    return (
        geometry.expected_k_coord(config, r_coord),
        geometry.expected_m_coord(config, r_coord),
    )


def _radius_text(r_coord: RadiusPoint) -> str:
    return "baseline" if r_coord is None else f"r_coord={r_coord:g} m"


def aggregate_outcomes(
    config: SimulationConfig, outcomes: Iterable[TrialOutcome]
) -> SweepResult:
    """Pool trial outcomes (in trial order) into per-radius CDFs.

    Raises:
        EmptyGroupError: a (metric, radius) group has no record.
    """
    ordered = sorted(outcomes, key=lambda outcome: outcome.trial)
    records: dict[RadiusPoint, list[MetricsRecord]] = defaultdict(list)
    stats: dict[RadiusPoint, list[ViewStat]] = defaultdict(list)
    for outcome in ordered:
        for record in outcome.records:
            records[record.r_coord].append(record)
        for stat in outcome.view_stats:
            stats[stat.r_coord].append(stat)

    per_point: dict[tuple[Metric, RadiusPoint], EmpiricalCdf] = {}
    for metric in Metric:
        for r_coord in config.radius_points:
            group = records[r_coord]
            if not group:
                where = _radius_text(r_coord)
                msg = f"No usable records for {metric.value} at {where}"
                raise EmptyGroupError(msg)
            per_point[metric, r_coord] = empirical_cdf(
                _metric_samples(metric, group)
            )

    tradeoff: dict[RadiusPoint, TradeoffPoint] = {}
    for r_coord in config.radius_points:
        tau_p = np.array([s.tau_p for s in stats[r_coord]])
        n_aps = np.array([s.n_coordinated_aps for s in stats[r_coord]])
        expected_k, expected_m = _expectations(config, r_coord)
        tradeoff[r_coord] = TradeoffPoint(
            r_coord=r_coord,
            mean_tau_p=float(tau_p.mean()),
            expected_k_coord=expected_k,
            mean_coordinated_aps=float(n_aps.mean()),
            expected_m_coord=expected_m,
            mean_data_fraction=float(
                np.mean([data_fraction(t, config.tau_c) for t in tau_p])
            ),
            median_se=per_point[Metric.SE, r_coord].median(),
        )

    return SweepResult(
        per_point=per_point,
        skipped_records=sum(outcome.skipped for outcome in ordered),
        uncovered_records=sum(outcome.uncovered for outcome in ordered),
        radius_points=config.radius_points,
        tradeoff=tradeoff,
        trials=len(ordered),
    )


def _run_trials(config: SimulationConfig, workers: int) -> list[TrialOutcome]:
    if workers == 1:
        return [run_trial(config, trial) for trial in range(config.trials)]

    outcomes: dict[int, TrialOutcome] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(run_trial, config, trial): trial
            for trial in range(config.trials)
        }
        for future in as_completed(futures):
            outcomes[futures[future]] = future.result()
    return [outcomes[trial] for trial in range(config.trials)]


def run_simulation(config: SimulationConfig, workers: int = 1) -> SweepResult:
    """Run every trial (on ``workers`` processes) and aggregate the sweep."""
    if workers < 1:
        msg = f"workers must be >= 1, got {workers}"
        raise ValueError(msg)

    logger.info(
        "Starting sweep: %d trials, radius points %s, %d worker(s)",
        config.trials,
        [_radius_text(r) for r in config.radius_points],
        workers,
    )
    for r_coord in config.radius_points:
        expected_k, expected_m = _expectations(config, r_coord)
        logger.debug(
            "%s: expected %.3f UTs and %.3f APs per region",
            _radius_text(r_coord),
            expected_k,
            expected_m,
        )
    logger.debug(
        "Expected %.3f served UTs per EPU", geometry.expected_k_serv(config)
    )

    result = aggregate_outcomes(config, _run_trials(config, workers))
    logger.info(
        "Sweep finished: %d records per radius point on average, "
        "%d skipped, %d uncovered",
        sum(len(result.cdf(Metric.SIGNAL, r)) for r in result.radius_points)
        // len(result.radius_points),
        result.skipped_records,
        result.uncovered_records,
    )
    return result