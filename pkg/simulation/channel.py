"""Large-scale gains and Rayleigh fading for the simulation app.

Large-scale gain of AP m towards UT k is

    beta_mk = 10 ** (xi_mk / 10) * path_loss(d_mk)

with a three-slope distance law and one independent lognormal shadowing
draw per (AP, UT) pair. Small-scale fading is i.i.d. CN(0, 1) per AP
antenna and UT; it is only materialized in exact fading mode.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from .config_io import FadingMode

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from .config_io import SimulationConfig
    from .geometry import NetworkLayout

logger = logging.getLogger(__name__)


def path_loss(
    d: float | np.ndarray, config: SimulationConfig
) -> float | np.ndarray:
    """Shadowing-free three-slope gain at distance ``d`` (meters).

    Flat (1) below d0, slope ``gamma0`` up to d1, slope ``gamma1`` beyond.
    Scalars in, float out; arrays in, array out.
    """
    distances = np.asarray(d, dtype=float)
    if np.any(distances < 0) or np.any(np.isnan(distances)):
        msg = "path_loss requires non-negative distances"
        raise ValueError(msg)

    d0, d1 = config.d0, config.d1
    middle = (np.maximum(distances, d0) / d0) ** -config.gamma0
    far = (d1 / d0) ** -config.gamma0 * (
        np.maximum(distances, d1) / d1
    ) ** -config.gamma1
    gains = np.where(distances < d1, middle, far)

    if gains.ndim == 0:
        return float(gains)
    return gains


def sample_shadowing_db(
    rng: np.random.Generator,
    config: SimulationConfig,
    size: int | tuple[int, ...] | None = None,
) -> float | np.ndarray:
    """Draw shadowing ξ ~ N(0, sigma_sh_db²) in dB, one value or an array."""
    draws = rng.normal(0.0, config.sigma_sh_db, size=size)
    if size is None:
        return float(draws)
    return draws


def gains_from_shadowing(
    distances: ArrayLike,
    shadowing_db: ArrayLike,
    config: SimulationConfig,
) -> np.ndarray:
    """Combine distances and dB shadowing into linear large-scale gains."""
    return 10 ** (np.asarray(shadowing_db, dtype=float) / 10) * path_loss(
        np.asarray(distances, dtype=float), config
    )


def large_scale_gains(
    layout: NetworkLayout,
    config: SimulationConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Return beta with shape (n_aps, n_uts), one shadowing draw per pair."""
    distances = layout.ap_ut_distances
    shadowing = sample_shadowing_db(rng, config, size=distances.shape)
    return gains_from_shadowing(distances, shadowing, config)


def sample_fading(
    n_aps: int, n_r: int, n_uts: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw h with shape (n_aps, n_r, n_uts), entries i.i.d. CN(0, 1)."""
    if min(n_aps, n_r, n_uts) < 0 or n_r < 1:
        msg = (
            f"Invalid fading dimensions M={n_aps}, N_r={n_r}, K={n_uts}"
        )
        raise ValueError(msg)
    shape = (n_aps, n_r, n_uts)
    return (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ) / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Large-scale gains ``beta`` (M × K) and optional fading ``h``.

    ``h`` (M × N_r × K) exists only in exact fading mode; the channel of
    antenna n of AP m towards UT k is ``h[m, n, k] * sqrt(beta[m, k])``.
    """

    beta: np.ndarray
    n_r: int
    h: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Reject non-positive gains and mismatched fading shapes."""
        if self.beta.ndim != 2:
            msg = f"beta must be 2-D, got shape {self.beta.shape}"
            raise ValueError(msg)
        if self.beta.size and not (
            np.all(np.isfinite(self.beta)) and np.all(self.beta > 0)
        ):
            msg = "beta must be strictly positive and finite"
            raise ValueError(msg)
        if self.h is not None:
            expected = (self.beta.shape[0], self.n_r, self.beta.shape[1])
            if self.h.shape != expected:
                msg = f"h has shape {self.h.shape}, expected {expected}"
                raise ValueError(msg)

    @property
    def has_fading(self) -> bool:
        """Whether realized small-scale fading is available."""
        return self.h is not None

    @cached_property
    def fading_power(self) -> np.ndarray | None:
        """‖h_mk‖² summed over the N_r antennas, shape (M, K)."""
        if self.h is None:
            return None
        return np.sum(np.abs(self.h) ** 2, axis=1)


def build_channel(
    layout: NetworkLayout,
    config: SimulationConfig,
    shadowing_rng: np.random.Generator,
    fading_rng: np.random.Generator,
) -> ChannelRealization:
    """Sample one channel realization for every (AP, UT) pair of a layout."""
    beta = large_scale_gains(layout, config, shadowing_rng)
    h = None
    if config.fading_mode is FadingMode.EXACT:
        h = sample_fading(layout.n_aps, config.n_r, layout.n_uts, fading_rng)
    logger.debug(
        "Channel %s: beta %s, fading %s",
        config.fading_mode.value,
        beta.shape,
        None if h is None else h.shape,
    )
    return ChannelRealization(beta=beta, n_r=config.n_r, h=h)
