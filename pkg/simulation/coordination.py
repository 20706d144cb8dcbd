"""Per-EPU views: coordinated APs, in-region UTs and pilot assignment.

Every UT in an EPU's coordination region gets its own orthogonal pilot
(numbered by ascending UT index). Every UT outside the region gets a
pilot drawn uniformly from the same ``tau_p`` sequences, so it may
collide with an in-region UT. Views are built independently per EPU.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from . import geometry

if TYPE_CHECKING:
    from .geometry import NetworkLayout

logger = logging.getLogger(__name__)

UNASSIGNED_PILOT = -1


class RegionMembershipError(ValueError):
    """A UT outside the coordination region was used as an in-region UT."""


@dataclass(frozen=True, eq=False)
class EpuView:
    """What one EPU coordinates and decodes at one radius point.

    ``r_coord`` is None for the service-hexagon baseline. ``pilot_of``
    holds a pilot index for every UT of the layout, or
    ``UNASSIGNED_PILOT`` everywhere when the view is degenerate.
    """

    epu_index: int
    r_coord: float | None
    coordinated_aps: np.ndarray
    in_region_uts: np.ndarray
    served_uts: np.ndarray
    tau_p: int
    pilot_of: np.ndarray

    @property
    def is_baseline(self) -> bool:
        """Whether this view coordinates only the service-hexagon APs."""
        return self.r_coord is None

    @property
    def is_degenerate(self) -> bool:
        """No in-region UT or no coordinated AP: nothing can be evaluated."""
        return self.tau_p == 0 or self.coordinated_aps.size == 0

    @cached_property
    def region_mask(self) -> np.ndarray:
        """Boolean mask over all UTs, True inside the region."""
        mask = np.zeros(self.pilot_of.shape[0], dtype=bool)
        mask[self.in_region_uts] = True
        return mask

    @cached_property
    def out_of_region_uts(self) -> np.ndarray:
        """UTs outside the region; they carry random pilots."""
        return np.flatnonzero(~self.region_mask)

    @cached_property
    def served_in_region_uts(self) -> np.ndarray:
        """Served UTs that lie inside the region (the evaluated UTs)."""
        return self.served_uts[self.region_mask[self.served_uts]]


def require_in_region(view: EpuView, k: int) -> None:
    """Raise RegionMembershipError unless UT ``k`` is in the view's region."""
    if not (0 <= k < view.region_mask.shape[0] and view.region_mask[k]):
        msg = (
            f"UT {k} is outside the coordination region of EPU "
            f"{view.epu_index}"
        )
        raise RegionMembershipError(msg)


def build_epu_view(
    epu_index: int,
    r_coord: float | None,
    layout: NetworkLayout,
    rng: np.random.Generator,
) -> EpuView:
    """Build the view of ``epu_index`` at radius ``r_coord`` (None = baseline).

    In-region UTs receive pilots 0..tau_p-1 in index order; every other UT
    receives an independent uniform pilot from ``rng``.
    """
    served = geometry.service_hexagon_uts(epu_index, layout)
    if r_coord is None:
        coordinated = geometry.service_hexagon_aps(epu_index, layout)
        in_region = served
    else:
        coordinated = geometry.coordination_set(epu_index, r_coord, layout)
        in_region = geometry.in_region_uts(epu_index, r_coord, layout)

    tau_p = int(in_region.size)
    pilot_of = np.full(layout.n_uts, UNASSIGNED_PILOT, dtype=np.int64)
    if tau_p:
        pilot_of[:] = rng.integers(0, tau_p, size=layout.n_uts)
        pilot_of[in_region] = np.arange(tau_p)
    else:
        logger.debug(
            "EPU %d has no UT within r_coord=%s", epu_index, r_coord
        )

    return EpuView(
        epu_index=epu_index,
        r_coord=r_coord,
        coordinated_aps=coordinated,
        in_region_uts=in_region,
        served_uts=served,
        tau_p=tau_p,
        pilot_of=pilot_of,
    )


def pilot_collision_set(view: EpuView, k: int) -> np.ndarray:
    """Out-of-region UTs that reuse the pilot of in-region UT ``k``."""
    require_in_region(view, k)
    return np.flatnonzero(
        (view.pilot_of == view.pilot_of[k]) & ~view.region_mask
    )
