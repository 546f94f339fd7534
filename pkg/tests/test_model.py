import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radarmotion import ConfigError, DataCube, RadarConfig, SeatRegion, segment_bounds, validate_config
from radarmotion.model import check_regions


def test_defaults_are_accepted():
    cfg = RadarConfig()
    assert validate_config(cfg) is cfg
    assert cfg.wavelength_m == 3.8e-3
    assert cfg.n_channels == 12
    assert cfg.slow_time_fs_hz == 100.0
    assert cfg.range_bin_m == 0.0447
    assert (cfg.clutter_segment_s, cfg.movement_window_s, cfg.corr_segment_s) == (30.0, 0.5, 60.0)


def test_zero_wavelength_rejected():
    with pytest.raises(ConfigError, match="wavelength must be positive"):
        validate_config(RadarConfig(wavelength_m=0))


def test_window_ordering_rejected():
    with pytest.raises(ConfigError, match="movement_window_s"):
        validate_config(RadarConfig(movement_window_s=60, clutter_segment_s=30))


@pytest.mark.parametrize("grid", [(-100.0, 60.0, 1.0), (10.0, -10.0, 1.0), (-60.0, 60.0, 0.0)])
def test_bad_angle_grid(grid):
    with pytest.raises(ConfigError):
        validate_config(RadarConfig(angle_grid_deg=grid))


def test_angle_grid_default():
    g = RadarConfig().angle_grid()
    assert g.size == 121
    assert math.isclose(g[0], math.radians(-60)) and math.isclose(g[-1], math.radians(60))


def test_config_dict_roundtrip():
    cfg = RadarConfig(taylor_nbar=3, angle_grid_deg=(-30.0, 30.0, 0.5))
    assert RadarConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError, match="unknown"):
        RadarConfig.from_dict({"bogus": 1})


@pytest.mark.parametrize("n, expected", [
    (9000, [(0, 3000), (3000, 6000), (6000, 9000)]),
    (9500, [(0, 3000), (3000, 6000), (6000, 9000)]),
    (100, []),
])
def test_segment_bounds_examples(n, expected):
    assert segment_bounds(n, 100, 30) == expected


@given(st.integers(1, 20000), st.sampled_from([10.0, 100.0]), st.sampled_from([0.5, 1.0, 30.0]))
def test_segment_bounds_cover_floor(n, fs, seg):
    b = segment_bounds(n, fs, seg)
    size = int(round(fs * seg))
    assert sum(e - s for s, e in b) == (n // size) * size
    assert all(b[i][1] == b[i + 1][0] for i in range(len(b) - 1))
    if b:
        assert b[0][0] == 0


def test_cube_invariants():
    cfg = RadarConfig(n_channels=4)
    cube = DataCube(cfg, np.zeros((5, 3, 4), complex))
    assert (cube.n_slow, cube.n_range, cube.n_channels) == (5, 3, 4)
    assert not cube.samples.flags.writeable
    with pytest.raises(ConfigError):
        DataCube(cfg, np.zeros((5, 3, 3), complex))
    bad = np.zeros((2, 2, 4), complex)
    bad[0, 0, 0] = np.nan
    with pytest.raises(ConfigError, match="non-finite"):
        DataCube(cfg, bad)


def test_region_validation():
    with pytest.raises(ConfigError):
        SeatRegion(1, 2.0, 1.0, 0.0, 0.1)
    a = SeatRegion(1, 1.0, 2.0, 0.0, 0.2)
    b = SeatRegion(2, 2.0, 3.0, 0.0, 0.2)  # shares an edge only
    c = SeatRegion(3, 1.5, 2.5, 0.1, 0.3)
    check_regions([a, b])
    with pytest.raises(ConfigError, match="1 and 3 overlap"):
        check_regions([a, b, c])
    with pytest.raises(ConfigError, match="duplicate"):
        check_regions([a, SeatRegion(1, 5.0, 6.0, 0.0, 0.1)])
    assert a.contains(2.0, 0.2) and not a.contains(2.01, 0.1)
