"""Point-scatterer echo simulator producing range-compressed cubes with known ground truth.

Geometry is planar. A radar at ``position`` looks along ``boresight``
(radians, counterclockwise from +x); azimuths are measured counterclockwise
from boresight. Each scatterer contributes, for channel ``n = 1..N``::

    a * g(r_i - r(t)) * exp(-j 4 pi r(t) / lambda) * exp(-j pi n sin(theta))

where ``g`` is a Gaussian range kernel with a full width at half maximum of
one range bin and ``r(t)`` is the rest range plus the line-of-sight
projection of the scatterer's displacement waveform. With that channel
phase the beamformer weight ``exp(+j pi n sin(theta))`` adds coherently at
the true azimuth.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigError, DataCube, RadarConfig, SeatRegion, check_regions

WAVEFORM_KINDS = ("static", "sinusoid", "multisine", "noise", "burst")
_KERNEL_REACH_FWHM = 8.0  # kernel value there is ~1e-77 of its peak


@dataclass(frozen=True)
class RadarPose:
    position: tuple[float, float]
    boresight: float
    radar_id: str

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (*self.position, self.boresight)):
            raise ConfigError(f"radar {self.radar_id}: pose must be finite")


@dataclass(frozen=True)
class Motion:
    """Displacement waveform along a fixed unit ``direction``."""

    kind: str = "static"
    params: dict = field(default_factory=dict)
    direction: tuple[float, float] = (1.0, 0.0)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in WAVEFORM_KINDS:
            raise ConfigError(f"unknown waveform kind {self.kind!r}")
        if abs(math.hypot(*self.direction) - 1.0) > 1e-9:
            raise ConfigError("motion direction must be a unit vector")


@dataclass(frozen=True)
class Scatterer:
    position: tuple[float, float]
    reflectivity: complex = 1.0
    motion: Motion = field(default_factory=Motion)
    label: int | None = None

    @property
    def static(self) -> bool:
        return self.motion.kind == "static"


@dataclass(frozen=True)
class SceneSpec:
    scatterers: tuple[Scatterer, ...]
    radars: tuple[RadarPose, ...]
    duration_s: float
    noise_power: float = 0.0
    seed: int = 0
    n_range: int | None = None

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ConfigError("scene duration must be positive")
        if self.noise_power < 0:
            raise ConfigError("noise power must be nonnegative")
        ids = [p.radar_id for p in self.radars]
        if len(set(ids)) != len(ids):
            raise ConfigError("radar ids must be unique")
        object.__setattr__(self, "scatterers", tuple(self.scatterers))
        object.__setattr__(self, "radars", tuple(self.radars))


@dataclass
class Simulation:
    cubes: dict[str, DataCube]
    # range change of scatterer k seen by a radar, meters: truth[radar_id][k]
    truth: dict[str, np.ndarray]
    # rest (range m, azimuth rad) of scatterer k per radar: polar[radar_id][k]
    polar: dict[str, np.ndarray]


def synth_waveform(kind: str, params: dict, t, seed=None) -> np.ndarray:
    """Displacement waveform in meters on the time axis ``t``.

    Kinds and parameters::

        static                      -
        sinusoid(A, f, phase=0)     A sin(2 pi f t + phase)
        multisine(components)       sum of sinusoids; components = [(A, f, phase), ...]
        noise(sigma, f_cut)         Gaussian noise low-passed at f_cut, zero mean, RMS sigma
        burst(A, f, center, width)  A exp(-(t-center)^2 / (2 width^2)) sin(2 pi f (t-center))
    """
    t = np.asarray(t, dtype=float)
    fs = 1.0 / (t[1] - t[0]) if t.size > 1 else math.inf
    nyq = fs / 2.0

    def freq(f):
        if not 0 <= f < nyq:
            raise ConfigError(f"frequency {f} Hz must lie in [0, {nyq}) Hz")
        return f

    p = dict(params)
    if kind == "static":
        return np.zeros_like(t)
    if kind == "sinusoid":
        return p["A"] * np.sin(2 * np.pi * freq(p["f"]) * t + p.get("phase", 0.0))
    if kind == "multisine":
        out = np.zeros_like(t)
        for comp in p["components"]:
            a, f, ph = (tuple(comp) + (0.0,))[:3]
            out += a * np.sin(2 * np.pi * freq(f) * t + ph)
        return out
    if kind == "noise":
        sigma, f_cut = p["sigma"], freq(p["f_cut"])
        if not sigma > 0 or not f_cut > 0:
            raise ConfigError("noise waveform needs sigma > 0 and f_cut > 0")
        rng = np.random.default_rng(seed)
        spectrum = np.fft.rfft(rng.standard_normal(t.size))
        spectrum[np.fft.rfftfreq(t.size, 1.0 / fs) > f_cut] = 0.0
        spectrum[0] = 0.0
        x = np.fft.irfft(spectrum, t.size)
        x -= x.mean()
        sd = x.std()
        if sd == 0:
            raise ConfigError("noise waveform too short for the requested band")
        return x * (sigma / sd)
    if kind == "burst":
        if not p["width"] > 0:
            raise ConfigError("burst width must be positive")
        u = t - p["center"]
        return p["A"] * np.exp(-0.5 * (u / p["width"]) ** 2) * np.sin(2 * np.pi * freq(p["f"]) * u)
    raise ConfigError(f"unknown waveform kind {kind!r}")


def project_los(direction, radar_position, scatterer_position) -> float:
    """Cosine between a motion direction and the radar-to-scatterer line of sight."""
    los = np.subtract(scatterer_position, radar_position, dtype=float)
    dist = float(np.hypot(*los))
    if dist == 0:
        raise ConfigError("scatterer coincides with the radar")
    return float(np.dot(direction, los) / dist)


def polar_position(pose: RadarPose, point) -> tuple[float, float]:
    """(range, azimuth relative to boresight) of a point."""
    dx, dy = np.subtract(point, pose.position, dtype=float)
    r = float(np.hypot(dx, dy))
    az = math.atan2(dy, dx) - pose.boresight
    az = (az + math.pi) % (2 * math.pi) - math.pi
    return r, az


def _radar_seed(seed: int, radar_id: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, zlib.crc32(radar_id.encode())])


def _waveforms(scene: SceneSpec, t: np.ndarray) -> list[np.ndarray]:
    out = []
    for k, sc in enumerate(scene.scatterers):
        seed = sc.motion.seed
        if seed is None:
            seed = np.random.SeedSequence([scene.seed, 7919, k])
        out.append(synth_waveform(sc.motion.kind, sc.motion.params, t, seed))
    return out


def simulate(
    scene: SceneSpec,
    config: RadarConfig,
    radar_ids=None,
    dtype=np.complex128,
    block: int = 4096,
) -> Simulation:
    """Render one cube per radar plus each scatterer's ground-truth range change.

    ``radar_ids`` restricts rendering to a subset of the scene's radars;
    ground truth is unaffected by the subset. ``dtype=np.complex64``
    halves memory for long scenes.
    """
    fs = config.slow_time_fs_hz
    n_slow = int(round(scene.duration_s * fs))
    if n_slow < 1:
        raise ConfigError("scene shorter than one slow-time sample")
    t = np.arange(n_slow) / fs
    waves = _waveforms(scene, t)
    if radar_ids is not None and set(radar_ids) - {p.radar_id for p in scene.radars}:
        raise ConfigError(f"unknown radar ids {sorted(set(radar_ids))}")
    n = np.arange(1, config.n_channels + 1)
    fwhm = config.range_bin_m
    reach = _KERNEL_REACH_FWHM * fwhm

    geo = {}
    for pose in scene.radars:
        rows = []
        for k, sc in enumerate(scene.scatterers):
            r0, az = polar_position(pose, sc.position)
            if r0 == 0:
                raise ConfigError(f"scatterer {k} coincides with radar {pose.radar_id}")
            if abs(az) > math.pi / 2:
                raise ConfigError(
                    f"scatterer {k} is outside radar {pose.radar_id}'s angular coverage"
                )
            proj = project_los(sc.motion.direction, pose.position, sc.position)
            rows.append((r0, az, proj * waves[k]))
        geo[pose.radar_id] = rows

    n_range = scene.n_range
    if n_range is None:
        far = max(
            (float(np.max(r0 + d)) for rows in geo.values() for r0, _, d in rows), default=0.0
        )
        n_range = int(math.ceil(far / config.range_bin_m)) + 4

    cubes, truth, polar = {}, {}, {}
    for pose in scene.radars:
        if radar_ids is not None and pose.radar_id not in radar_ids:
            continue
        rows = geo[pose.radar_id]
        cube = np.zeros((n_slow, n_range, config.n_channels), dtype=dtype)
        for k, (r0, az, disp) in enumerate(rows):
            r = r0 + disp
            if r.min() < 0 or r.max() > (n_range - 1) * config.range_bin_m:
                raise ConfigError(
                    f"scatterer {k} leaves the unambiguous range of radar {pose.radar_id}"
                )
            lo = max(int(math.floor((r.min() - reach) / config.range_bin_m)), 0)
            hi = min(int(math.ceil((r.max() + reach) / config.range_bin_m)), n_range - 1)
            bins = config.range_bin_m * np.arange(lo, hi + 1)
            chan = np.exp(-1j * np.pi * n * math.sin(az))
            a = complex(scene.scatterers[k].reflectivity)
            for s in range(0, n_slow, block):
                rs = r[s:s + block]
                g = np.exp(-4.0 * math.log(2.0) * ((bins[None, :] - rs[:, None]) / fwhm) ** 2)
                echo = a * g * np.exp(-4j * np.pi * rs / config.wavelength_m)[:, None]
                cube[s:s + block, lo:hi + 1, :] += echo[:, :, None] * chan
        if scene.noise_power > 0:
            rng = np.random.default_rng(_radar_seed(scene.seed, pose.radar_id))
            amp = math.sqrt(scene.noise_power / 2.0)
            for s in range(0, n_slow, block):
                e = min(s + block, n_slow)
                w = rng.standard_normal((e - s, n_range, config.n_channels, 2))
                cube[s:e] += amp * (w[..., 0] + 1j * w[..., 1])
        cubes[pose.radar_id] = DataCube(config, cube, pose.radar_id)
        truth[pose.radar_id] = np.array([d for _, _, d in rows])
        polar[pose.radar_id] = np.array([(r0, az) for r0, az, _ in rows])
    return Simulation(cubes, truth, polar)


def seat_regions(scene: SceneSpec, pose: RadarPose, half_range_m: float = 0.15,
                 half_angle_rad: float = math.radians(5.0)) -> list[SeatRegion]:
    """Rectangles around each labelled scatterer's rest position as seen by ``pose``."""
    regions = []
    for sc in scene.scatterers:
        if sc.label is None:
            continue
        r0, az = polar_position(pose, sc.position)
        regions.append(SeatRegion(sc.label, r0 - half_range_m, r0 + half_range_m,
                                  az - half_angle_rad, az + half_angle_rad))
    return check_regions(regions)


def classroom_scene(
    duration_s: float = 900.0,
    noise_power: float = 0.0,
    seed: int = 0,
    sigma_m: float = 0.5e-3,
    f_cut_hz: float = 1.0,
    clutter: bool = True,
) -> SceneSpec:
    """Six seated participants in two rows, watched by radars at the rear left and rear right.

    Each participant is one scatterer swaying with independent band-limited
    noise along a direction tilted toward the back of the room, so both
    radars see a sizable line-of-sight component. Optional static clutter
    sits away from every seat.
    """
    rng = np.random.default_rng(seed)
    seats = [(x, y) for y in (1.1, 1.9) for x in (-0.8, 0.0, 0.8)]
    scatterers = []
    for m, pos in enumerate(seats, start=1):
        ang = -math.pi / 2 + rng.uniform(-0.3, 0.3)
        refl = rng.uniform(0.8, 1.2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        motion = Motion("noise", {"sigma": sigma_m, "f_cut": f_cut_hz},
                        (math.cos(ang), math.sin(ang)), seed=seed * 1000 + m)
        scatterers.append(Scatterer(pos, complex(refl), motion, label=m))
    if clutter:
        for pos, a in (((-1.5, 1.5), 3.0), ((1.5, 1.5), 3.0), ((0.0, 2.5), 2.0)):
            scatterers.append(Scatterer(pos, a))
    aim = (0.0, 1.5)
    radars = []
    for rid, pos in (("radar1", (-1.2, 0.0)), ("radar2", (1.2, 0.0))):
        radars.append(RadarPose(pos, math.atan2(aim[1] - pos[1], aim[0] - pos[0]), rid))
    return SceneSpec(tuple(scatterers), tuple(radars), duration_s, noise_power, seed)
