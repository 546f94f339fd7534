"""Per-segment target localization on power images."""

from __future__ import annotations

import numpy as np

from .imaging import power_image
from .model import (
    Cell,
    ComplexImageSequence,
    ConfigError,
    PowerImage,
    SeatRegion,
    TargetTrack,
    segment_bounds,
)


def _argmax_masked(values: np.ndarray, mask: np.ndarray | None = None) -> tuple[int, int]:
    # np.argmax on a C-ordered (range, angle) array returns the first maximum,
    # i.e. lowest range index, then lowest angle index
    v = values if mask is None else np.where(mask, values, -np.inf)
    flat = int(np.argmax(v))
    return divmod(flat, values.shape[1])


def _cell(image: PowerImage, ri: int, ai: int) -> Cell:
    return Cell(ri, ai, float(image.range_bin_m * ri), float(image.angles[ai]))


def locate_global(image: PowerImage) -> Cell | None:
    """Cell of the image maximum, or ``None`` when the image holds no energy."""
    if image.values.size == 0:
        raise ConfigError("empty power image")
    if not np.any(image.values > 0):
        return None
    return _cell(image, *_argmax_masked(image.values))


def region_mask(image: PowerImage, region: SeatRegion) -> np.ndarray:
    rr, tt = np.meshgrid(image.ranges, image.angles, indexing="ij")
    return region.contains(rr, tt)


def locate_in_regions(image: PowerImage, regions, still_image: PowerImage | None = None,
                      still_db: float | None = 3.0) -> dict[int, Cell]:
    """Restricted argmax per region, keyed by participant id.

    With ``still_image`` (the mean power before clutter suppression), a
    region whose peak suppressed power is within ``still_db`` of the
    image's median (the noise floor) holds no detectable movement; its
    cell is then the strongest reflector of ``still_image`` instead of a
    noise peak.
    """
    floor = float(np.median(image.values))
    level = None
    if still_image is not None and still_db is not None:
        level = floor * 10.0 ** (still_db / 10.0)
    out = {}
    for g in regions:
        mask = region_mask(image, g)
        if not mask.any():
            raise ConfigError(f"region {g.participant_id} contains no grid cell")
        ri, ai = _argmax_masked(image.values, mask)
        if level is not None and image.values[ri, ai] <= level:
            ri, ai = _argmax_masked(still_image.values, mask)
        out[g.participant_id] = _cell(image, ri, ai)
    return out


def tracks_from_images(images, regions, bounds, still_images=None,
                       still_db: float | None = 3.0) -> dict[int, TargetTrack]:
    cells: dict[int, list[Cell]] = {g.participant_id: [] for g in regions}
    still_images = still_images or [None] * len(images)
    for img, still in zip(images, still_images):
        for pid, c in locate_in_regions(img, regions, still, still_db).items():
            cells[pid].append(c)
    return {
        pid: TargetTrack(pid, tuple(bounds), tuple(cs)) for pid, cs in cells.items()
    }


def build_track(seq: ComplexImageSequence, regions, seg_len_s: float,
                unsuppressed: ComplexImageSequence | None = None,
                still_db: float | None = 3.0) -> dict[int, TargetTrack]:
    """Locate every participant in every full segment of a clutter-suppressed sequence.

    ``unsuppressed`` enables the still-target rule of `locate_in_regions`.
    """
    regions = list(regions)
    bounds = segment_bounds(seq.n_slow, seq.fs_hz, seg_len_s) if seq.n_slow else []
    images = [power_image(seq, ell, seg_len_s) for ell in range(len(bounds))]
    still = None
    if unsuppressed is not None:
        still = [power_image(unsuppressed, ell, seg_len_s) for ell in range(len(bounds))]
    return tracks_from_images(images, regions, bounds, still, still_db)
