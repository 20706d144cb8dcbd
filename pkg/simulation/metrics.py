"""Per-UT signal, interference, SIR and spectral efficiency for one EPU view.

All powers are linear and relative to unit UT transmit power; no noise is
modeled. Interference always uses the hardened ``N_r`` factor.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .config_io import FadingMode, InterferenceMode
from .coordination import pilot_collision_set, require_in_region

if TYPE_CHECKING:
    from .channel import ChannelRealization
    from .config_io import SimulationConfig
    from .coordination import EpuView

logger = logging.getLogger(__name__)


class DegenerateRecordError(ValueError):
    """A record cannot be formed (S = I = 0, or fading is missing)."""


@dataclass(frozen=True, slots=True)
class MetricsRecord:
    """Metrics of one served UT under its serving EPU's view at one radius."""

    ut_index: int
    epu_index: int
    r_coord: float | None
    signal: float
    interference: float
    sir_db: float
    overhead: float
    se: float
    tau_p: int
    n_coordinated_aps: int


@dataclass
class ViewEvaluation:
    """Records of one view plus the served UTs that produced none."""

    records: list[MetricsRecord] = field(default_factory=list)
    skipped: int = 0
    uncovered: int = 0


# ---------------------------------------------------------------------------
# Per-UT quantities
# ---------------------------------------------------------------------------


def signal_power(
    view: EpuView,
    chan: ChannelRealization,
    k: int,
    mode: FadingMode = FadingMode.HARDENED,
) -> float:
    """Power collected from UT ``k`` over the view's coordinated APs."""
    require_in_region(view, k)
    beta = chan.beta[view.coordinated_aps, k]
    if FadingMode(mode) is FadingMode.HARDENED:
        return float(chan.n_r * beta.sum())
    if chan.fading_power is None:
        msg = "exact fading mode needs a channel with realized fading"
        raise DegenerateRecordError(msg)
    return float(np.sum(chan.fading_power[view.coordinated_aps, k] * beta))


def _interferers(view: EpuView, k: int, mode: InterferenceMode) -> np.ndarray:
    if InterferenceMode(mode) is InterferenceMode.PILOT_COLLISION_ONLY:
        return pilot_collision_set(view, k)
    require_in_region(view, k)
    return view.out_of_region_uts


def interference_power(
    view: EpuView,
    chan: ChannelRealization,
    k: int,
    mode: InterferenceMode = InterferenceMode.ALL_OUT_OF_REGION,
) -> float:
    """Out-of-region power received at the coordinated APs of the view."""
    interferers = _interferers(view, k, mode)
    block = chan.beta[np.ix_(view.coordinated_aps, interferers)]
    return float(chan.n_r * block.sum())


def sir_db(signal: float, interference: float, cap_db: float) -> float:
    """10·log10(S/I) capped at ``cap_db``; I = 0 gives the cap exactly."""
    if signal < 0 or interference < 0:
        msg = f"powers must be non-negative, got S={signal}, I={interference}"
        raise ValueError(msg)
    if signal == 0 and interference == 0:
        msg = "S = I = 0 has no SIR"
        raise DegenerateRecordError(msg)
    if interference == 0:
        return float(cap_db)
    if signal == 0:
        return -math.inf
    return min(10 * math.log10(signal / interference), float(cap_db))


def data_fraction(tau_p: int, tau_c: int) -> float:
    """Share of the coherence interval left for data."""
    if tau_c < 1 or tau_p < 0:
        msg = f"need tau_c >= 1 and tau_p >= 0, got {tau_c=}, {tau_p=}"
        raise ValueError(msg)
    return max(0, tau_c - tau_p) / tau_c


def spectral_efficiency(sir: float, tau_p: int, tau_c: int) -> float:
    """Pilot-overhead-scaled log2(1 + SIR) in bits/s/Hz."""
    fraction = data_fraction(tau_p, tau_c)
    if fraction == 0:
        return 0.0
    return fraction * math.log2(1 + 10 ** (sir / 10))


# ---------------------------------------------------------------------------
# Whole-view evaluation
# ---------------------------------------------------------------------------


def _view_interference(
    view: EpuView,
    chan: ChannelRealization,
    uts: np.ndarray,
    mode: InterferenceMode,
) -> np.ndarray:
    """Interference of every UT in ``uts``, same sums as interference_power."""
    outside = view.out_of_region_uts
    per_interferer = chan.n_r * chan.beta[
        np.ix_(view.coordinated_aps, outside)
    ].sum(axis=0)
    if mode is InterferenceMode.ALL_OUT_OF_REGION:
        return np.full(uts.size, per_interferer.sum())
    per_pilot = np.bincount(
        view.pilot_of[outside], weights=per_interferer, minlength=view.tau_p
    )
    return per_pilot[view.pilot_of[uts]]


def evaluate_view(
    view: EpuView, chan: ChannelRealization, config: SimulationConfig
) -> ViewEvaluation:
    """One record per served UT inside the view's region.

    Served UTs outside the region are counted as uncovered. Every served UT
    of a degenerate view is counted as skipped.
    """
    served = view.served_uts
    if view.is_degenerate:
        logger.debug(
            "Skipping degenerate view of EPU %d at r_coord=%s (%d served)",
            view.epu_index,
            view.r_coord,
            served.size,
        )
        return ViewEvaluation(skipped=int(served.size))

    uts = view.served_in_region_uts
    evaluation = ViewEvaluation(uncovered=int(served.size - uts.size))
    interference = _view_interference(
        view, chan, uts, config.interference_mode
    )
    overhead = data_fraction(view.tau_p, config.tau_c)
    n_coordinated = int(view.coordinated_aps.size)

    for k, i_k in zip(uts.tolist(), interference.tolist(), strict=True):
        s_k = signal_power(view, chan, k, config.fading_mode)
        try:
            sir = sir_db(s_k, i_k, config.max_sir_db)
        except DegenerateRecordError:
            evaluation.skipped += 1
            continue
        evaluation.records.append(
            MetricsRecord(
                ut_index=k,
                epu_index=view.epu_index,
                r_coord=view.r_coord,
                signal=s_k,
                interference=i_k,
                sir_db=sir,
                overhead=overhead,
                se=spectral_efficiency(sir, view.tau_p, config.tau_c),
                tau_p=view.tau_p,
                n_coordinated_aps=n_coordinated,
            )
        )
    return evaluation
