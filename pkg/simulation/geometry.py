"""Wrap-around hexagonal EPU lattice, Poisson AP/UT drops and region queries.

The simulation window is a torus of ``window_nx × window_ny`` EPU cells, so
every EPU sees the same neighbourhood and no simulation boundary exists.
Index sets are returned as ascending ``numpy`` integer arrays.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from .config_io import SimulationConfig

logger = logging.getLogger(__name__)

_M2_PER_KM2 = 1e6


@dataclass(frozen=True, eq=False)
class NetworkLayout:
    """EPU centers, AP and UT positions on a ``width × height`` torus (m)."""

    width: float
    height: float
    epu_centers: np.ndarray
    ap_positions: np.ndarray
    ut_positions: np.ndarray

    @property
    def n_epus(self) -> int:
        """Number of EPUs."""
        return len(self.epu_centers)

    @property
    def n_aps(self) -> int:
        """Number of APs in this drop."""
        return len(self.ap_positions)

    @property
    def n_uts(self) -> int:
        """Number of UTs in this drop."""
        return len(self.ut_positions)

    @property
    def max_radius(self) -> float:
        """Largest radius for which a region does not wrap onto itself."""
        return min(self.width, self.height) / 2

    @cached_property
    def ap_epu_distances(self) -> np.ndarray:
        """Toroidal AP-to-EPU-center distances, shape (M, E)."""
        return toroidal_distances(
            self.ap_positions, self.epu_centers, self.width, self.height
        )

    @cached_property
    def ut_epu_distances(self) -> np.ndarray:
        """Toroidal UT-to-EPU-center distances, shape (K, E)."""
        return toroidal_distances(
            self.ut_positions, self.epu_centers, self.width, self.height
        )

    @cached_property
    def ap_ut_distances(self) -> np.ndarray:
        """Toroidal AP-to-UT distances, shape (M, K)."""
        return toroidal_distances(
            self.ap_positions, self.ut_positions, self.width, self.height
        )

    @cached_property
    def ap_serving_epu(self) -> np.ndarray:
        """Service-hexagon owner of every AP."""
        return _nearest_center(self.ap_epu_distances)

    @cached_property
    def ut_serving_epu(self) -> np.ndarray:
        """Serving EPU of every UT."""
        return _nearest_center(self.ut_epu_distances)


def _nearest_center(distances: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum, i.e. the lowest EPU index on ties.
    if distances.shape[0] == 0:
        return np.zeros(0, dtype=np.intp)
    return np.argmin(distances, axis=1)


# ---------------------------------------------------------------------------
# Layout construction
# ---------------------------------------------------------------------------


def epu_lattice(config: SimulationConfig) -> np.ndarray:
    """Return the EPU centers, row by row, as an (nx·ny, 2) array.

    Odd rows are shifted by half a spacing, giving a triangular lattice of
    centers (hexagonal service cells) with nearest-neighbour spacing d_epu.
    """
    d = config.d_epu
    i, j = np.meshgrid(
        np.arange(config.window_nx), np.arange(config.window_ny)
    )
    x = np.mod(i * d + (j % 2) * d / 2, config.torus_width)
    y = j * math.sqrt(3) / 2 * d
    return np.column_stack((x.ravel(), y.ravel())).astype(float)


def _poisson_points(
    density_km2: float,
    width: float,
    height: float,
    rng: np.random.Generator,
) -> np.ndarray:
    count = rng.poisson(density_km2 * width * height / _M2_PER_KM2)
    return rng.uniform((0.0, 0.0), (width, height), size=(count, 2))


def build_layout(
    config: SimulationConfig, rng: np.random.Generator
) -> NetworkLayout:
    """Drop APs and UTs as homogeneous Poisson point processes on the torus.

    The AP drop is drawn first, then the UT drop, both from ``rng``.
    """
    width, height = config.torus_width, config.torus_height
    layout = NetworkLayout(
        width=width,
        height=height,
        epu_centers=epu_lattice(config),
        ap_positions=_poisson_points(config.rho_a, width, height, rng),
        ut_positions=_poisson_points(config.rho_u, width, height, rng),
    )
    logger.debug(
        "Layout %.0f x %.0f m: %d EPUs, %d APs, %d UTs",
        width,
        height,
        layout.n_epus,
        layout.n_aps,
        layout.n_uts,
    )
    return layout


# ---------------------------------------------------------------------------
# Distance and membership queries
# ---------------------------------------------------------------------------


def toroidal_distances(
    a: ArrayLike, b: ArrayLike, width: float, height: float
) -> np.ndarray:
    """Pairwise wrap-around distances between point sets (n, 2) and (m, 2)."""
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    delta = np.abs(a[:, np.newaxis, :] - b[np.newaxis, :, :])
    delta = np.minimum(delta, np.array([width, height]) - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def toroidal_distance(
    p: ArrayLike, q: ArrayLike, layout: NetworkLayout
) -> float:
    """Distance between two points with per-axis wrap-around."""
    return float(toroidal_distances(p, q, layout.width, layout.height)[0, 0])


def serving_epus(points: ArrayLike, layout: NetworkLayout) -> np.ndarray:
    """Nearest EPU center (lowest index on ties) for each point."""
    return _nearest_center(
        toroidal_distances(
            points, layout.epu_centers, layout.width, layout.height
        )
    )


def serving_epu(ut_index: int, layout: NetworkLayout) -> int:
    """EPU whose service hexagon holds UT ``ut_index``."""
    return int(layout.ut_serving_epu[ut_index])


def _check_radius(r_coord: float, layout: NetworkLayout) -> None:
    if not 0 < r_coord <= layout.max_radius:
        msg = (
            f"r_coord={r_coord} outside (0, {layout.max_radius:.2f}] "
            "for this torus"
        )
        raise ValueError(msg)


def coordination_set(
    epu_index: int, r_coord: float, layout: NetworkLayout
) -> np.ndarray:
    """APs within ``r_coord`` of the EPU center (its coordination region)."""
    _check_radius(r_coord, layout)
    return np.flatnonzero(layout.ap_epu_distances[:, epu_index] <= r_coord)


def in_region_uts(
    epu_index: int, r_coord: float, layout: NetworkLayout
) -> np.ndarray:
    """UTs within ``r_coord`` of the EPU center."""
    _check_radius(r_coord, layout)
    return np.flatnonzero(layout.ut_epu_distances[:, epu_index] <= r_coord)


def service_hexagon_aps(epu_index: int, layout: NetworkLayout) -> np.ndarray:
    """APs whose nearest EPU center is ``epu_index``."""
    return np.flatnonzero(layout.ap_serving_epu == epu_index)


def service_hexagon_uts(epu_index: int, layout: NetworkLayout) -> np.ndarray:
    """UTs served (and exclusively decoded) by ``epu_index``."""
    return np.flatnonzero(layout.ut_serving_epu == epu_index)


def coordination_multiplicity(
    r_coord: float, layout: NetworkLayout
) -> np.ndarray:
    """Number of EPUs coordinating each AP at radius ``r_coord``."""
    _check_radius(r_coord, layout)
    return np.count_nonzero(layout.ap_epu_distances <= r_coord, axis=1)


# ---------------------------------------------------------------------------
# Closed-form expectations
# ---------------------------------------------------------------------------


def expected_k_coord(config: SimulationConfig, r_coord: float) -> float:
    """Expected UTs in a coordination region, π r² ρ_u."""
    return math.pi * r_coord**2 * config.rho_u / _M2_PER_KM2


def expected_m_coord(config: SimulationConfig, r_coord: float) -> float:
    """Expected APs in a coordination region, π r² ρ_A."""
    return math.pi * r_coord**2 * config.rho_a / _M2_PER_KM2


def service_area_km2(config: SimulationConfig) -> float:
    """Area of one service hexagon, (√3/2) d_EPU²."""
    return math.sqrt(3) / 2 * config.d_epu**2 / _M2_PER_KM2


def expected_k_serv(config: SimulationConfig) -> float:
    """Expected UTs served by one EPU, (√3/2) ρ_u d_EPU²."""
    return config.rho_u * service_area_km2(config)
