"""Tests for EPU views and pilot assignment."""

import numpy as np
import pytest

from simulation.channel import ChannelRealization
from simulation.config_io import InterferenceMode
from simulation.coordination import (
    UNASSIGNED_PILOT,
    EpuView,
    RegionMembershipError,
    build_epu_view,
    pilot_collision_set,
    require_in_region,
)
from simulation.geometry import (
    build_layout,
    coordination_multiplicity,
    coordination_set,
    in_region_uts,
    service_hexagon_aps,
    service_hexagon_uts,
)
from simulation.metrics import interference_power
from simulation.montecarlo import trial_layout

# On the 2x2 torus EPU 0 sits at the origin and EPU 3 at (1500, 866).
_NEAR_EPU0 = [[100.0, 0.0], [0.0, 100.0], [50.0, 50.0]]
_NEAR_EPU3 = [[1500.0, 866.0], [1450.0, 900.0]]


def _manual_view(pilot_of, in_region, tau_p):
    in_region = np.asarray(in_region)
    return EpuView(
        epu_index=0,
        r_coord=300.0,
        coordinated_aps=np.array([0]),
        in_region_uts=in_region,
        served_uts=in_region,
        tau_p=tau_p,
        pilot_of=np.asarray(pilot_of),
    )


class TestBuildEpuView:
    def test_in_region_pilots_are_orthogonal(self, make_layout, rng):
        layout = make_layout([[10.0, 0.0]], _NEAR_EPU0 + _NEAR_EPU3)
        view = build_epu_view(0, 300.0, layout, rng)
        np.testing.assert_array_equal(view.in_region_uts, [0, 1, 2])
        assert view.tau_p == 3
        np.testing.assert_array_equal(view.pilot_of[:3], [0, 1, 2])
        assert ((view.pilot_of >= 0) & (view.pilot_of < 3)).all()
        np.testing.assert_array_equal(view.out_of_region_uts, [3, 4])
        np.testing.assert_array_equal(view.coordinated_aps, [0])

    def test_out_of_region_pilots_are_uniform(self, make_layout, rng):
        far = rng.uniform((1400, 800), (1600, 900), size=(100, 2))
        layout = make_layout([[10.0, 0.0]], np.vstack([_NEAR_EPU0, far]))
        pilots = np.concatenate(
            [
                build_epu_view(0, 300.0, layout, rng).pilot_of[3:]
                for _ in range(100)
            ]
        )
        frequencies = np.bincount(pilots, minlength=3) / pilots.size
        sigma = np.sqrt((1 / 3) * (2 / 3) / pilots.size)
        np.testing.assert_allclose(frequencies, 1 / 3, atol=3 * sigma)

    def test_radius_covering_every_ut(self, make_layout, rng):
        uts = [*_NEAR_EPU0, [700.0, 0.0]]
        layout = make_layout([[10.0, 0.0], [600.0, 0.0]], uts)
        view = build_epu_view(0, 800.0, layout, rng)
        assert view.out_of_region_uts.size == 0
        chan = ChannelRealization(np.ones((2, 4)), 1)
        for k in view.in_region_uts:
            assert pilot_collision_set(view, int(k)).size == 0
            for mode in InterferenceMode:
                assert interference_power(view, chan, int(k), mode) == 0.0

    def test_empty_region_is_degenerate(self, make_layout, rng):
        layout = make_layout([[10.0, 0.0]], _NEAR_EPU3)
        view = build_epu_view(0, 300.0, layout, rng)
        assert view.tau_p == 0
        assert view.is_degenerate
        assert (view.pilot_of == UNASSIGNED_PILOT).all()

    def test_no_coordinated_ap_is_degenerate(self, make_layout, rng):
        layout = make_layout([[1500.0, 866.0]], _NEAR_EPU0)
        view = build_epu_view(0, 300.0, layout, rng)
        assert view.tau_p == 3
        assert view.is_degenerate

    def test_baseline_uses_service_hexagon(self, default_config, rng):
        layout = build_layout(default_config, rng)
        view = build_epu_view(4, None, layout, rng)
        assert view.is_baseline
        np.testing.assert_array_equal(
            view.coordinated_aps, service_hexagon_aps(4, layout)
        )
        np.testing.assert_array_equal(
            view.in_region_uts, service_hexagon_uts(4, layout)
        )
        np.testing.assert_array_equal(view.served_uts, view.in_region_uts)
        assert view.tau_p == view.served_uts.size

    def test_circular_view_matches_geometry(self, default_config, rng):
        layout = build_layout(default_config, rng)
        view = build_epu_view(9, 500.0, layout, rng)
        np.testing.assert_array_equal(
            view.coordinated_aps, coordination_set(9, 500.0, layout)
        )
        np.testing.assert_array_equal(
            view.in_region_uts, in_region_uts(9, 500.0, layout)
        )
        assert view.region_mask.sum() == view.tau_p

    def test_served_inside_region_beyond_circumradius(
        self, default_config, rng
    ):
        layout = build_layout(default_config, rng)
        for epu in range(layout.n_epus):
            view = build_epu_view(epu, 600.0, layout, rng)
            assert np.isin(view.served_uts, view.in_region_uts).all()
            np.testing.assert_array_equal(
                view.served_in_region_uts, view.served_uts
            )

    def test_pilot_permutation_on_random_layouts(self, default_config, rng):
        layout = build_layout(default_config, rng)
        for epu in range(layout.n_epus):
            view = build_epu_view(epu, 700.0, layout, rng)
            np.testing.assert_array_equal(
                np.sort(view.pilot_of[view.in_region_uts]),
                np.arange(view.tau_p),
            )


class TestPilotCollisionSet:
    def test_no_out_of_region_uts(self):
        view = _manual_view([0, 1], [0, 1], 2)
        assert pilot_collision_set(view, 0).size == 0

    def test_shared_pilot(self):
        view = _manual_view([0, 1, 1, 0, 1], [0, 1], 2)
        np.testing.assert_array_equal(pilot_collision_set(view, 0), [3])
        np.testing.assert_array_equal(pilot_collision_set(view, 1), [2, 4])

    def test_out_of_region_ut_rejected(self):
        view = _manual_view([0, 1, 1], [0, 1], 2)
        with pytest.raises(RegionMembershipError):
            pilot_collision_set(view, 2)
        with pytest.raises(RegionMembershipError):
            require_in_region(view, 17)

    def test_expected_size(self, make_layout, rng):
        far = rng.uniform((1400, 800), (1600, 900), size=(100, 2))
        layout = make_layout([[10.0, 0.0]], np.vstack([_NEAR_EPU0, far]))
        sizes = [
            pilot_collision_set(build_epu_view(0, 300.0, layout, rng), 0).size
            for _ in range(200)
        ]
        # Binomial(100, 1/3) per draw
        sigma = np.sqrt(100 * (1 / 3) * (2 / 3) / 200)
        assert np.mean(sizes) == pytest.approx(100 / 3, abs=3 * sigma)


class TestOverlap:
    def test_adjacent_regions_share_aps(self, default_config):
        doubly = [
            coordination_multiplicity(700.0, trial_layout(default_config, t)).max()
            >= 2
            for t in range(20)
        ]
        assert sum(doubly) >= 19
