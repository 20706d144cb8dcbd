import numpy as np
import pytest

from simulation.config_io import SimulationConfig
from simulation.geometry import NetworkLayout, epu_lattice


@pytest.fixture(autouse=True)
def _isolated_output_dir(settings, tmp_path):
    """Redirect FOGSIM_OUTPUT_DIR so result files never land in the source tree."""
    settings.FOGSIM_OUTPUT_DIR = tmp_path / "results"


@pytest.fixture
def default_config():
    """Reference scenario: 6x6 torus, radii 300-1000 m."""
    return SimulationConfig()


@pytest.fixture
def small_config():
    """4x4 torus (max radius 1732 m) for fast end-to-end trials."""
    return SimulationConfig(
        window_nx=4,
        window_ny=4,
        r_coord_list=(300.0, 500.0, 700.0, 1000.0),
        trials=4,
        master_seed=7,
    )


@pytest.fixture
def tiny_config():
    """2x2 torus (max radius 866 m) for hand-placed layouts."""
    return SimulationConfig(
        window_nx=2, window_ny=2, r_coord_list=(300.0, 500.0), trials=1
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20180601)


@pytest.fixture
def make_layout(tiny_config):
    """Build a layout on the 2x2 torus from hand-placed APs and UTs."""

    def _make(aps, uts, config=tiny_config):
        return NetworkLayout(
            width=config.torus_width,
            height=config.torus_height,
            epu_centers=epu_lattice(config),
            ap_positions=np.asarray(aps, dtype=float).reshape(-1, 2),
            ut_positions=np.asarray(uts, dtype=float).reshape(-1, 2),
        )

    return _make
