import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from radarmotion import ConfigError, DataCube, RadarConfig, SeatRegion
from radarmotion.analytics import ScoreTable
from radarmotion.io import (
    FormatError,
    cube_offset,
    read_config,
    read_cube,
    read_cube_header,
    read_regions,
    read_scene,
    read_scores,
    write_cube,
    write_regions,
    write_scene,
    write_scores,
)
from radarmotion.simulator import classroom_scene


def cube(rng, shape=(5, 3, 12), dtype=np.complex64, cfg=RadarConfig()):
    x = (rng.normal(size=shape) + 1j * rng.normal(size=shape)).astype(dtype)
    return DataCube(cfg, x, "radar2")


def test_cube_roundtrip_bitwise(tmp_path, rng):
    c = cube(rng)
    hdr = write_cube(c, tmp_path / "a")
    assert hdr.name == "a.hdr" and (tmp_path / "a.bin").stat().st_size == 5 * 3 * 12 * 8
    back = read_cube(hdr)
    assert back.radar_id == "radar2"
    assert back.samples.dtype == np.complex64
    np.testing.assert_array_equal(back.samples.view(np.uint64), c.samples.view(np.uint64))
    h = read_cube_header(hdr)
    assert (h["n_slow"], h["n_range"], h["n_channels"]) == (5, 3, 12)
    assert h["fs_hz"] == 100.0


def test_cube_complex128_rounds(tmp_path, rng):
    c = cube(rng, dtype=np.complex128)
    back = read_cube(write_cube(c, tmp_path / "b.hdr"), mmap=False)
    np.testing.assert_array_equal(back.samples, c.samples.astype(np.complex64))


def test_cube_header_overrides_config(tmp_path, rng):
    cfg = RadarConfig(slow_time_fs_hz=50.0, n_channels=4, taylor_nbar=2)
    hdr = write_cube(cube(rng, (3, 2, 4), cfg=cfg), tmp_path / "c")
    back = read_cube(hdr, RadarConfig())
    assert back.config.slow_time_fs_hz == 50.0 and back.n_channels == 4


def test_cube_offset_layout(tmp_path, rng):
    assert cube_offset(0, 1, 0, n_range=2, n_channels=12) == 96
    c = cube(rng, (4, 2, 12))
    write_cube(c, tmp_path / "d")
    raw = (tmp_path / "d.bin").read_bytes()
    for t, r, n in ((0, 0, 0), (0, 1, 0), (3, 1, 11), (2, 0, 5)):
        o = cube_offset(t, r, n, 2, 12)
        assert np.frombuffer(raw[o:o + 8], "<c8")[0] == c.samples[t, r, n]


def test_truncated_payload(tmp_path, rng):
    hdr = write_cube(cube(rng), tmp_path / "e")
    p = tmp_path / "e.bin"
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(FormatError, match="payload holds"):
        read_cube(hdr)


def test_bad_headers(tmp_path, rng):
    hdr = write_cube(cube(rng), tmp_path / "f")
    text = hdr.read_text()
    hdr.write_text(text.replace("version = 1", "version = 2"))
    with pytest.raises(FormatError, match="version"):
        read_cube(hdr)
    hdr.write_text(text.replace("format = radarmotion-cube", "format = other"))
    with pytest.raises(FormatError):
        read_cube(hdr)
    hdr.write_text(text + "garbage line\n")
    with pytest.raises(FormatError):
        read_cube(hdr)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(arrays(np.complex64, st.tuples(st.integers(1, 4), st.integers(1, 4), st.just(3)),
              elements=st.complex_numbers(max_magnitude=1e6, allow_nan=False, width=64)))
def test_cube_roundtrip_property(tmp_path, x):
    c = DataCube(RadarConfig(n_channels=3, taylor_nbar=1), x)
    back = read_cube(write_cube(c, tmp_path / "h"))
    np.testing.assert_array_equal(back.samples, x)


# -- regions ---------------------------------------------------------------

def six_regions():
    return [SeatRegion(m, 1.0 + 0.5 * m, 1.3 + 0.5 * m, math.radians(-5), math.radians(5))
            for m in range(1, 7)]


def test_regions_roundtrip(tmp_path):
    p = write_regions(tmp_path / "r.csv", six_regions())
    back = read_regions(p)
    assert len(back) == 6
    for a, b in zip(back, six_regions()):
        assert a.participant_id == b.participant_id
        assert a.r_min == b.r_min and a.theta_max == pytest.approx(b.theta_max, abs=1e-15)


def test_regions_errors(tmp_path):
    head = "participant_id,r_min_m,r_max_m,theta_min_deg,theta_max_deg\n"
    p = tmp_path / "r.csv"
    p.write_text(head + "1,2.0,1.0,-5,5\n")
    with pytest.raises(ConfigError, match="r_min"):
        read_regions(p)
    p.write_text(head + "3,1.0,2.0,-5,5\n7,1.5,2.5,0,10\n")
    with pytest.raises(ConfigError, match="3 and 7"):
        read_regions(p)
    p.write_text("id,a,b\n1,2,3\n")
    with pytest.raises(FormatError):
        read_regions(p)
    p.write_text(head + "1,x,2,0,1\n")
    with pytest.raises(FormatError):
        read_regions(p)


# -- scores ----------------------------------------------------------------

def test_scores_roundtrip(tmp_path, rng):
    s = ScoreTable(rng.integers(0, 3, (6, 9, 2)), rng.integers(0, 3, (6, 9, 2)))
    p = write_scores(tmp_path / "s.csv", s)
    assert len(p.read_text().splitlines()) == 1 + 108
    back = read_scores(p)
    np.testing.assert_array_equal(back.beta1, s.beta1)
    np.testing.assert_array_equal(back.beta2, s.beta2)
    assert back.participant_ids == tuple(range(1, 7))


def test_scores_errors(tmp_path):
    head = "participant,experiment,evaluator,beta1,beta2\n"
    p = tmp_path / "s.csv"
    p.write_text(head + "1,1,1,3,0\n")
    with pytest.raises(ConfigError, match="0..2"):
        read_scores(p)
    p.write_text(head + "1,1,1,1,0\n1,1,1,2,0\n")
    with pytest.raises(FormatError, match="duplicate"):
        read_scores(p)
    p.write_text(head + "1,1,1,1,0\n2,1,2,1,0\n")
    with pytest.raises(FormatError, match="missing"):
        read_scores(p)


# -- scenes and config -----------------------------------------------------

def test_scene_roundtrip(tmp_path):
    s = classroom_scene(120.0, noise_power=0.01, seed=9)
    back = read_scene(write_scene(tmp_path / "scene.json", s))
    assert back.duration_s == s.duration_s and back.seed == 9
    assert [r.radar_id for r in back.radars] == ["radar1", "radar2"]
    for a, b in zip(back.radars, s.radars):
        assert a.boresight == pytest.approx(b.boresight, abs=1e-15)
    for a, b in zip(back.scatterers, s.scatterers):
        assert a.position == b.position and a.label == b.label
        assert a.reflectivity == b.reflectivity
        assert a.motion.params == b.motion.params and a.motion.seed == b.motion.seed


def test_scene_and_config_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(FormatError):
        read_scene(p)
    with pytest.raises(FormatError):
        read_config(p)
    p.write_text('{"format": "radarmotion-scene", "version": 1}')
    with pytest.raises(FormatError):
        read_scene(p)
    p.write_text('{"wavelength_m": -1}')
    with pytest.raises(ConfigError):
        read_config(p)
