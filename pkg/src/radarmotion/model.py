"""Configuration, time segmentation and the array types shared by every stage.

Angles are radians everywhere inside the package; degrees appear only in
``RadarConfig.angle_grid_deg`` and at file boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class ConfigError(ValueError):
    """Raised when a configuration or domain value violates an invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    # read-only view; no copy of large cubes
    v = np.asarray(a).view()
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class RadarConfig:
    """Processing parameters for one radar.

    Defaults reproduce a 79 GHz radar with a 12-element virtual array,
    100 Hz slow-time sampling and the 30 s / 0.5 s / 60 s segment lengths
    used for localization, movement index and correlation.
    """

    wavelength_m: float = 3.8e-3
    n_channels: int = 12
    element_spacing_wavelengths: float = 0.5
    slow_time_fs_hz: float = 100.0
    range_bin_m: float = 0.0447
    clutter_segment_s: float = 30.0
    movement_window_s: float = 0.5
    corr_segment_s: float = 60.0
    taylor_sidelobe_db: float = -25.0
    taylor_nbar: int = 4
    angle_grid_deg: tuple[float, float, float] = (-60.0, 60.0, 1.0)

    def angle_grid(self) -> np.ndarray:
        """Angle grid in radians, endpoints included."""
        lo, hi, step = self.angle_grid_deg
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.deg2rad(lo + step * np.arange(n))

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["angle_grid_deg"] = list(self.angle_grid_deg)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RadarConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "angle_grid_deg" in d:
            d["angle_grid_deg"] = tuple(float(v) for v in d["angle_grid_deg"])
        if "n_channels" in d:
            d["n_channels"] = int(d["n_channels"])
        if "taylor_nbar" in d:
            d["taylor_nbar"] = int(d["taylor_nbar"])
        return validate_config(cls(**d))


def validate_config(config: RadarConfig) -> RadarConfig:
    """Return ``config`` unchanged, or raise `ConfigError` naming the first violation."""
    c = config
    if not c.wavelength_m > 0:
        raise ConfigError("wavelength must be positive")
    if c.n_channels < 1:
        raise ConfigError("n_channels must be at least 1")
    if c.element_spacing_wavelengths != 0.5:
        raise ConfigError("element spacing is fixed at half a wavelength")
    if not c.slow_time_fs_hz > 0:
        raise ConfigError("slow-time sampling rate must be positive")
    if not c.range_bin_m > 0:
        raise ConfigError("range bin spacing must be positive")
    for name in ("clutter_segment_s", "movement_window_s", "corr_segment_s"):
        if not getattr(c, name) > 0:
            raise ConfigError(f"{name} must be positive")
    if not c.movement_window_s <= c.clutter_segment_s:
        raise ConfigError("movement_window_s must not exceed clutter_segment_s")
    if not c.clutter_segment_s <= c.corr_segment_s:
        raise ConfigError("clutter_segment_s must not exceed corr_segment_s")
    if not c.taylor_sidelobe_db < 0:
        raise ConfigError("taylor_sidelobe_db must be negative")
    if c.taylor_nbar < 1:
        raise ConfigError("taylor_nbar must be at least 1")
    lo, hi, step = c.angle_grid_deg
    if not (step > 0 and hi >= lo):
        raise ConfigError("angle grid must be strictly increasing")
    if lo < -90.0 or hi > 90.0:
        raise ConfigError("angle grid must lie within [-90, 90] degrees")
    if not all(math.isfinite(v) for v in (c.wavelength_m, c.slow_time_fs_hz, c.range_bin_m)):
        raise ConfigError("config values must be finite")
    return c


def segment_bounds(n_slow: int, fs: float, seg_len_s: float) -> list[tuple[int, int]]:
    """Full, non-overlapping ``(start, end)`` segments; a short tail is dropped.

    >>> segment_bounds(9500, 100, 30)
    [(0, 3000), (3000, 6000), (6000, 9000)]
    """
    if n_slow < 1:
        raise ConfigError("n_slow must be at least 1")
    seg = int(round(seg_len_s * fs))
    if seg < 1:
        raise ConfigError("segment shorter than one sample")
    return [(k * seg, (k + 1) * seg) for k in range(n_slow // seg)]


@dataclass(frozen=True)
class DataCube:
    """Range-compressed samples ``samples[t, r, n]`` of one radar."""

    config: RadarConfig
    samples: np.ndarray
    radar_id: str = "radar1"

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3:
            raise ConfigError(f"cube samples must be 3-D (slow, range, channel), got {s.shape}")
        if s.shape[2] != self.config.n_channels:
            raise ConfigError(
                f"cube has {s.shape[2]} channels, config says {self.config.n_channels}"
            )
        if not np.iscomplexobj(s):
            s = s.astype(np.complex128)
        if not np.all(np.isfinite(s)):
            raise ConfigError("cube contains non-finite samples")
        object.__setattr__(self, "samples", _frozen(s))

    @property
    def n_slow(self) -> int:
        return self.samples.shape[0]

    @property
    def n_range(self) -> int:
        return self.samples.shape[1]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[2]


@dataclass(frozen=True)
class ComplexImageSequence:
    """Beamformed complex image ``values[t, r, a]`` on a range x angle grid."""

    values: np.ndarray
    angles: np.ndarray
    range_bin_m: float
    fs_hz: float
    radar_id: str = "radar1"

    def __post_init__(self):
        v = np.asarray(self.values)
        a = np.asarray(self.angles, dtype=float)
        if v.ndim != 3 or v.shape[2] != a.size:
            raise ConfigError(f"image shape {v.shape} inconsistent with {a.size} angles")
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "angles", _frozen(a))

    @property
    def n_slow(self) -> int:
        return self.values.shape[0]

    @property
    def ranges(self) -> np.ndarray:
        return self.range_bin_m * np.arange(self.values.shape[1])


@dataclass(frozen=True)
class PowerImage:
    values: np.ndarray
    angles: np.ndarray
    range_bin_m: float
    segment: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != np.size(self.angles):
            raise ConfigError("power image must be (range, angle)")
        if np.any(v < 0):
            raise ConfigError("power image entries must be nonnegative")
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "angles", _frozen(np.asarray(self.angles, dtype=float)))

    @property
    def ranges(self) -> np.ndarray:
        return self.range_bin_m * np.arange(self.values.shape[0])


@dataclass(frozen=True)
class SeatRegion:
    """Polar rectangle ``[r_min, r_max] x [theta_min, theta_max]`` (meters, radians)."""

    participant_id: int
    r_min: float
    r_max: float
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not self.r_min < self.r_max:
            raise ConfigError(f"region {self.participant_id}: r_min must be below r_max")
        if not self.theta_min < self.theta_max:
            raise ConfigError(f"region {self.participant_id}: theta_min must be below theta_max")

    def contains(self, r, theta):
        """Closed-rectangle membership; works elementwise on arrays."""
        r = np.asarray(r)
        theta = np.asarray(theta)
        return (
            (r >= self.r_min) & (r <= self.r_max)
            & (theta >= self.theta_min) & (theta <= self.theta_max)
        )

    def overlaps(self, other: "SeatRegion") -> bool:
        # shared edges are allowed; only a positive-area intersection counts
        return (
            self.r_min < other.r_max and other.r_min < self.r_max
            and self.theta_min < other.theta_max and other.theta_min < self.theta_max
        )


def check_regions(regions) -> list[SeatRegion]:
    regions = list(regions)
    ids = [g.participant_id for g in regions]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise ConfigError(f"duplicate participant ids: {dup}")
    for i, a in enumerate(regions):
        for b in regions[i + 1:]:
            if a.overlaps(b):
                raise ConfigError(
                    f"regions {a.participant_id} and {b.participant_id} overlap"
                )
    return regions


class Cell(NamedTuple):
    range_index: int
    angle_index: int
    range_m: float
    angle_rad: float


@dataclass(frozen=True)
class TargetTrack:
    """Per-segment cell chosen for one participant."""

    participant_id: int
    segments: tuple[tuple[int, int], ...]
    cells: tuple[Cell, ...]

    def __post_init__(self):
        if len(self.segments) != len(self.cells):
            raise ConfigError("track needs exactly one cell per segment")


@dataclass(frozen=True)
class DisplacementTrace:
    """Displacement toward the radar in meters, one value per slow-time sample.

    ``boundaries`` holds the start index of every localization segment; the
    offset of each segment is set by extrapolating the local slope. ``invalid`` marks
    samples whose phase was undefined and held from the previous sample.
    """

    values: np.ndarray
    fs_hz: float
    boundaries: tuple[int, ...] = (0,)
    participant_id: int = 0
    radar_id: str = "radar1"
    invalid: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ConfigError("displacement trace must be 1-D")
        if not np.all(np.isfinite(v)):
            raise ConfigError("displacement trace must be finite")
        object.__setattr__(self, "values", _frozen(v))
        if self.invalid is not None:
            object.__setattr__(self, "invalid", _frozen(np.asarray(self.invalid, dtype=bool)))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) / self.fs_hz


@dataclass(frozen=True)
class MovementTrace:
    """Windowed RMS velocity b(t) in m/s."""

    values: np.ndarray
    fs_hz: float
    participant_id: int = 0
    radar_id: str = "radar1"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ConfigError("movement trace must be a finite, nonnegative 1-D array")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) / self.fs_hz
