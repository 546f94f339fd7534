"""File formats: cubes, seat regions, score sheets, scenes and CSV reports.

Cube files come in pairs. ``NAME.hdr`` is a UTF-8 text header of
``key = value`` lines, and ``NAME.bin`` is the payload of little-endian
float32 (real, imag) pairs in (slow time, range, channel) order with the
channel index fastest, so sample ``(t, r, n)`` starts at byte
``((t * n_range + r) * n_channels + n) * 8``. See docs/formats.md.

Every writer goes through a temporary file and an atomic rename.
"""

from __future__ import annotations

import contextlib
import csv
import datetime as _dt
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import ScoreTable
from .model import ConfigError, DataCube, RadarConfig, SeatRegion, check_regions
from .simulator import Motion, RadarPose, Scatterer, SceneSpec

CUBE_FORMAT = "radarmotion-cube"
CUBE_VERSION = 1
_SAMPLE_BYTES = 8


class FormatError(ValueError):
    """A file is malformed, inconsistent or of an unsupported version."""


@contextlib.contextmanager
def atomic_write(path, mode="w", **kw):
    """Open a temporary sibling of ``path`` and rename it into place on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **kw) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


# -- cubes -----------------------------------------------------------------

def cube_offset(t: int, r: int, n: int, n_range: int, n_channels: int) -> int:
    """Byte offset of sample ``(t, r, n)`` in a cube payload."""
    return ((t * n_range + r) * n_channels + n) * _SAMPLE_BYTES


def _payload_path(header: Path) -> Path:
    return header.with_suffix(".bin")


def write_cube(cube: DataCube, path) -> Path:
    """Write ``cube`` as ``path`` (header, ``.hdr`` added if missing) plus its ``.bin`` payload.

    Samples are stored as complex64; complex128 cubes are rounded.
    """
    path = Path(path)
    if path.suffix != ".hdr":
        path = path.with_name(path.name + ".hdr")
    payload = _payload_path(path)
    c = cube.config
    header = {
        "format": CUBE_FORMAT,
        "version": CUBE_VERSION,
        "n_slow": cube.n_slow,
        "n_range": cube.n_range,
        "n_channels": cube.n_channels,
        "fs_hz": repr(float(c.slow_time_fs_hz)),
        "range_bin_m": repr(float(c.range_bin_m)),
        "wavelength_m": repr(float(c.wavelength_m)),
        "radar_id": cube.radar_id,
        "payload": payload.name,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "software": f"radarmotion {__version__}",
    }
    data = np.ascontiguousarray(cube.samples, dtype="<c8")
    with atomic_write(payload, "wb") as fh:
        data.tofile(fh)
    with atomic_write(path, "w", encoding="utf-8") as fh:
        for k, v in header.items():
            fh.write(f"{k} = {v}\n")
    return path


def read_cube_header(path) -> dict:
    path = Path(path)
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected 'key = value'")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    if out.get("format") != CUBE_FORMAT:
        raise FormatError(f"{path}: not a {CUBE_FORMAT} header")
    try:
        version = int(out["version"])
        for k in ("n_slow", "n_range", "n_channels"):
            out[k] = int(out[k])
        for k in ("fs_hz", "range_bin_m", "wavelength_m"):
            out[k] = float(out[k])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: bad or missing header field ({exc})") from None
    if version != CUBE_VERSION:
        raise FormatError(f"{path}: unsupported cube format version {version}")
    out["version"] = version
    return out


def read_cube(path, config: RadarConfig | None = None, mmap: bool = True) -> DataCube:
    """Read a cube written by `write_cube`.

    Header values (sampling rate, range bin, wavelength, channel count)
    override the matching fields of ``config``.
    """
    path = Path(path)
    h = read_cube_header(path)
    payload = path.parent / h.get("payload", _payload_path(path).name)
    expected = h["n_slow"] * h["n_range"] * h["n_channels"] * _SAMPLE_BYTES
    size = payload.stat().st_size
    if size != expected:
        raise FormatError(
            f"{payload}: payload holds {size} bytes, header implies {expected}"
        )
    shape = (h["n_slow"], h["n_range"], h["n_channels"])
    if mmap and expected:
        samples = np.memmap(payload, dtype="<c8", mode="r", shape=shape)
    else:
        samples = np.fromfile(payload, dtype="<c8").reshape(shape)
    base = config or RadarConfig()
    cfg = RadarConfig.from_dict({
        **base.to_dict(),
        "n_channels": h["n_channels"],
        "slow_time_fs_hz": h["fs_hz"],
        "range_bin_m": h["range_bin_m"],
        "wavelength_m": h["wavelength_m"],
    })
    try:
        return DataCube(cfg, samples, h["radar_id"])
    except ConfigError as exc:
        raise FormatError(f"{path}: {exc}") from None


# -- tables ----------------------------------------------------------------

def _read_rows(path, columns) -> list[dict]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != list(columns):
            raise FormatError(f"{path}: expected columns {','.join(columns)}")
        rows = []
        for row in reader:
            rows.append({k.strip(): (v or "").strip() for k, v in row.items()})
        return rows


def write_table(path, header, rows) -> Path:
    path = Path(path)
    with atomic_write(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty table")
    return rows[0], rows[1:]


REGION_COLUMNS = ("participant_id", "r_min_m", "r_max_m", "theta_min_deg", "theta_max_deg")


def read_regions(path) -> list[SeatRegion]:
    """Seat rectangles for one radar; angles in the file are degrees."""
    regions = []
    for i, row in enumerate(_read_rows(path, REGION_COLUMNS), 2):
        try:
            regions.append(SeatRegion(
                int(row["participant_id"]),
                float(row["r_min_m"]),
                float(row["r_max_m"]),
                math.radians(float(row["theta_min_deg"])),
                math.radians(float(row["theta_max_deg"])),
            ))
        except ConfigError as exc:
            raise ConfigError(f"{path}:{i}: {exc}") from None
        except ValueError as exc:
            raise FormatError(f"{path}:{i}: {exc}") from None
    if not regions:
        raise FormatError(f"{path}: no regions")
    return check_regions(regions)


def write_regions(path, regions) -> Path:
    return write_table(path, REGION_COLUMNS, [
        (g.participant_id, g.r_min, g.r_max, math.degrees(g.theta_min), math.degrees(g.theta_max))
        for g in regions
    ])


SCORE_COLUMNS = ("participant", "experiment", "evaluator", "beta1", "beta2")


def read_scores(path) -> ScoreTable:
    """Score sheet with one row per (participant, experiment, evaluator)."""
    entries = {}
    for i, row in enumerate(_read_rows(path, SCORE_COLUMNS), 2):
        try:
            key = (int(row["participant"]), int(row["experiment"]), int(row["evaluator"]))
            b1, b2 = int(row["beta1"]), int(row["beta2"])
        except ValueError as exc:
            raise FormatError(f"{path}:{i}: {exc}") from None
        for name, b in (("beta1", b1), ("beta2", b2)):
            if b not in (0, 1, 2):
                raise ConfigError(f"{path}:{i}: {name}={b} outside the 0..2 item scale")
        if key in entries:
            raise FormatError(f"{path}:{i}: duplicate row for {key}")
        entries[key] = (b1, b2)
    ms = sorted({k[0] for k in entries})
    js = sorted({k[1] for k in entries})
    ks = sorted({k[2] for k in entries})
    missing = [(m, j, k) for m in ms for j in js for k in ks if (m, j, k) not in entries]
    if missing:
        raise FormatError(f"{path}: missing score rows, e.g. {missing[:3]}")
    b1 = np.array([[[entries[m, j, k][0] for k in ks] for j in js] for m in ms])
    b2 = np.array([[[entries[m, j, k][1] for k in ks] for j in js] for m in ms])
    return ScoreTable(b1, b2, tuple(ms), tuple(js), tuple(ks))


def write_scores(path, scores: ScoreTable) -> Path:
    rows = []
    for a, m in enumerate(scores.participant_ids):
        for b, j in enumerate(scores.experiment_ids):
            for c, k in enumerate(scores.evaluator_ids):
                rows.append((m, j, k, scores.beta1[a, b, c], scores.beta2[a, b, c]))
    return write_table(path, SCORE_COLUMNS, rows)


# -- scenes ----------------------------------------------------------------

def scene_to_dict(scene: SceneSpec) -> dict:
    return {
        "format": "radarmotion-scene",
        "version": 1,
        "duration_s": scene.duration_s,
        "noise_power": scene.noise_power,
        "seed": scene.seed,
        "n_range": scene.n_range,
        "radars": [
            {"radar_id": p.radar_id, "position": list(p.position),
             "boresight_deg": math.degrees(p.boresight)}
            for p in scene.radars
        ],
        "scatterers": [
            {"position": list(s.position),
             "reflectivity": [complex(s.reflectivity).real, complex(s.reflectivity).imag],
             "label": s.label,
             "motion": {"kind": s.motion.kind, "params": s.motion.params,
                        "direction": list(s.motion.direction), "seed": s.motion.seed}}
            for s in scene.scatterers
        ],
    }


def scene_from_dict(d: dict) -> SceneSpec:
    if d.get("format") != "radarmotion-scene" or d.get("version") != 1:
        raise FormatError("not a version-1 radarmotion scene document")
    try:
        radars = tuple(
            RadarPose(tuple(r["position"]), math.radians(r["boresight_deg"]), str(r["radar_id"]))
            for r in d["radars"]
        )
        scatterers = []
        for s in d["scatterers"]:
            m = s.get("motion") or {}
            re, im = s.get("reflectivity", [1.0, 0.0])
            scatterers.append(Scatterer(
                tuple(s["position"]),
                complex(re, im),
                Motion(m.get("kind", "static"), dict(m.get("params", {})),
                       tuple(m.get("direction", (1.0, 0.0))), m.get("seed")),
                s.get("label"),
            ))
        return SceneSpec(tuple(scatterers), radars, float(d["duration_s"]),
                         float(d.get("noise_power", 0.0)), int(d.get("seed", 0)),
                         d.get("n_range"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise FormatError(f"malformed scene document: {exc!r}") from None


def write_scene(path, scene: SceneSpec) -> Path:
    path = Path(path)
    with atomic_write(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2)
        fh.write("\n")
    return path


def read_scene(path) -> SceneSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return scene_from_dict(d)


def read_config(path) -> RadarConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
    return RadarConfig.from_dict(d)
