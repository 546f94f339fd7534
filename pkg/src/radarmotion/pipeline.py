"""Segment-by-segment processing of a cube into tracks, displacement and movement traces.

`process_cube` gives the same numbers as chaining `beamform`,
`suppress_clutter`, `build_track`, `extract_displacement` and
`movement_index`, but never holds more than one slow-time block of the
beamformed image in memory, which keeps 15-minute recordings tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import beamform_samples, beamformer_matrix, taylor_window
from .localization import tracks_from_images
from .model import (
    ConfigError,
    DataCube,
    DisplacementTrace,
    MovementTrace,
    PowerImage,
    RadarConfig,
    TargetTrack,
    segment_bounds,
)
from .motion import movement_index, segment_phase, stitch_displacement


@dataclass
class RadarResult:
    radar_id: str
    tracks: dict[int, TargetTrack]
    displacement: dict[int, DisplacementTrace]
    movement: dict[int, MovementTrace]
    power_images: list[PowerImage]


def segment_power_image(samples: np.ndarray, weights: np.ndarray, block: int = 500):
    """Clutter-suppressed power image of one segment and its removed mean image.

    Beamforming is linear, so the per-cell mean of the beamformed image is
    the beamformed per-channel mean.
    """
    mean_img = np.asarray(samples.mean(axis=0, dtype=np.complex128)) @ weights
    acc = np.zeros(mean_img.shape)
    for s in range(0, samples.shape[0], block):
        img = beamform_samples(samples[s:s + block], weights, block) - mean_img
        acc += np.sum(img.real**2 + img.imag**2, axis=0)
    return acc / samples.shape[0], mean_img


def process_cube(
    cube: DataCube,
    regions,
    config: RadarConfig | None = None,
    reference: str = "fit",
    angles=None,
    still_db: float | None = 3.0,
) -> RadarResult:
    """Locate every participant per segment and extract their d(t) and b(t).

    ``still_db=None`` turns off the still-target rule of `locate_in_regions`.
    """
    config = cube.config if config is None else config
    regions = list(regions)
    if not regions:
        raise ConfigError("no seat regions given")
    window = taylor_window(cube.n_channels, config.taylor_sidelobe_db, config.taylor_nbar)
    angles = config.angle_grid() if angles is None else np.asarray(angles, dtype=float)
    weights = beamformer_matrix(window, angles)
    bounds = segment_bounds(cube.n_slow, config.slow_time_fs_hz, config.clutter_segment_s)
    if not bounds:
        raise ConfigError("cube is shorter than one clutter segment")

    images, still, means = [], [], []
    for ell, (s, e) in enumerate(bounds):
        p, m = segment_power_image(cube.samples[s:e], weights)
        images.append(PowerImage(p, angles, config.range_bin_m, ell))
        # mean power before suppression = suppressed power + |removed mean|^2
        still.append(PowerImage(p + np.abs(m) ** 2, angles, config.range_bin_m, ell))
        means.append(m)
    tracks = tracks_from_images(images, regions, bounds, still, still_db)

    disp, move = {}, {}
    for pid, track in tracks.items():
        phases, invalids = [], []
        for (s, e), c, m in zip(track.segments, track.cells, means):
            raw = cube.samples[s:e, c.range_index, :].astype(np.complex128) @ weights[:, c.angle_index]
            mu = m[c.range_index, c.angle_index]
            ph, bad = segment_phase(raw - mu, mu, reference)
            phases.append(ph)
            invalids.append(bad)
        d, bad = stitch_displacement(phases, invalids, config.wavelength_m)
        trace = DisplacementTrace(
            d, config.slow_time_fs_hz, tuple(s for s, _ in bounds), pid, cube.radar_id, bad
        )
        disp[pid] = trace
        move[pid] = movement_index(trace, config.movement_window_s)
    return RadarResult(cube.radar_id, tracks, disp, move, images)
