"""Phase-based displacement extraction and the windowed RMS-velocity movement index."""

from __future__ import annotations

import numpy as np

from .model import (
    ComplexImageSequence,
    ConfigError,
    DisplacementTrace,
    MovementTrace,
    RadarConfig,
    TargetTrack,
)

PHASE_REFERENCES = ("fit", "suppressed")

# a segment whose clutter-suppressed spread is this small relative to the
# removed mean is static to working precision; no arc can be fitted
_STATIC_SPREAD = 1e-9


def unwrap_phase(phases) -> np.ndarray:
    """Add multiples of 2*pi so every successive difference lies in (-pi, pi]."""
    p = np.asarray(phases, dtype=float)
    if p.size == 0:
        raise ConfigError("cannot unwrap an empty phase sequence")
    dp = np.diff(p)
    # integer turns that bring each step into (-pi, pi]
    turns = -np.ceil((dp - np.pi) / (2.0 * np.pi))
    return p + 2.0 * np.pi * np.concatenate(([0.0], np.cumsum(turns)))


def fit_circle(z: np.ndarray) -> tuple[complex, float]:
    """Algebraic least-squares circle through complex points; returns (center, radius)."""
    c0 = z.mean()
    w = z - c0
    scale = np.sqrt(np.mean(np.abs(w) ** 2))
    if not scale > 0:
        raise np.linalg.LinAlgError("points coincide")
    w = w / scale
    x, y = w.real, w.imag
    a = np.column_stack((x, y, np.ones_like(x)))
    sol, _, rank, _ = np.linalg.lstsq(a, -(x * x + y * y), rcond=None)
    if rank < 3:
        raise np.linalg.LinAlgError("points are collinear")
    cx, cy = -sol[0] / 2.0, -sol[1] / 2.0
    r2 = cx * cx + cy * cy - sol[2]
    if not r2 > 0:
        raise np.linalg.LinAlgError("degenerate circle fit")
    return c0 + scale * complex(cx, cy), scale * float(np.sqrt(r2))


def _modulus_spread(z: np.ndarray, center: complex) -> float:
    m = np.abs(z - center)
    mean = m.mean()
    return float(m.std() / mean) if mean > 0 else np.inf


def segment_phase(series: np.ndarray, removed_mean: complex = 0j, reference: str = "fit"):
    """Phase of one segment's clutter-suppressed cell series.

    ``reference="suppressed"`` takes the angle of the series itself.
    ``reference="fit"`` takes the angle about the center of the circle the
    samples trace, which undoes the shift mean subtraction gives a moving
    echo. The fitted center competes with the raw-signal origin
    ``-removed_mean``; whichever leaves the modulus ``|z - c|`` more nearly
    constant wins. A still or noise-dominated segment thus keeps the phase
    of the unsuppressed signal instead of the angle around a center fitted
    to noise.

    Returns the wrapped phase and a mask of samples whose angle is undefined.
    """
    z = np.asarray(series, dtype=np.complex128)
    if reference == "suppressed":
        center = 0j
    elif reference == "fit":
        center = -removed_mean
        spread = np.sqrt(np.mean(np.abs(z - z.mean()) ** 2))
        if spread > _STATIC_SPREAD * abs(removed_mean):
            try:
                fitted, _ = fit_circle(z)
            except np.linalg.LinAlgError:
                pass
            else:
                if _modulus_spread(z, fitted) < _modulus_spread(z, center):
                    center = fitted
    else:
        raise ConfigError(f"unknown phase reference {reference!r}")
    u = z - center
    invalid = u == 0
    return np.angle(u), invalid


def _hold_last(phase: np.ndarray, invalid: np.ndarray) -> np.ndarray:
    if not invalid.any():
        return phase
    valid = ~invalid
    if not valid.any():
        return np.zeros_like(phase)
    idx = np.where(valid, np.arange(phase.size), 0)
    np.maximum.accumulate(idx, out=idx)
    first = int(np.argmax(valid))
    idx[:first] = first
    return phase[idx]


def stitch_displacement(phases, invalids, wavelength_m: float) -> tuple[np.ndarray, np.ndarray]:
    """Unwrap each segment's phase, scale to meters and join the segments.

    Each segment's unknown offset is chosen so the step into it continues the
    local slope, which keeps the join error second order in the sample period.
    """
    parts = []
    for ph, bad in zip(phases, invalids):
        d = wavelength_m / (4.0 * np.pi) * unwrap_phase(_hold_last(ph, bad))
        if parts:
            prev = parts[-1]
            # the step across the join is unobserved; take the mean of the
            # neighbouring in-segment steps
            steps = []
            if prev.size > 1:
                steps.append(prev[-1] - prev[-2])
            if d.size > 1:
                steps.append(d[1] - d[0])
            step = float(np.mean(steps)) if steps else 0.0
            d = d - d[0] + prev[-1] + step
        parts.append(d)
    if not parts:
        return np.zeros(0), np.zeros(0, dtype=bool)
    return np.concatenate(parts), np.concatenate(invalids)


def extract_displacement(
    seq: ComplexImageSequence,
    track: TargetTrack,
    config: RadarConfig,
    reference: str = "fit",
    unsuppressed: ComplexImageSequence | None = None,
) -> DisplacementTrace:
    """Displacement trace of one tracked participant from a clutter-suppressed sequence.

    ``unsuppressed`` (the sequence before clutter suppression) supplies the
    removed segment means used by the static-segment fallback; without it
    the fallback uses the origin.
    """
    if not track.segments:
        raise ConfigError("track covers no segment")
    if track.segments[-1][1] > seq.n_slow:
        raise ConfigError("track extends past the end of the sequence")
    phases, invalids = [], []
    for (s, e), c in zip(track.segments, track.cells):
        z = seq.values[s:e, c.range_index, c.angle_index]
        m = 0j
        if unsuppressed is not None:
            m = unsuppressed.values[s:e, c.range_index, c.angle_index].mean()
        ph, bad = segment_phase(z, m, reference)
        phases.append(ph)
        invalids.append(bad)
    d, bad = stitch_displacement(phases, invalids, config.wavelength_m)
    return DisplacementTrace(
        d,
        seq.fs_hz,
        tuple(s for s, _ in track.segments),
        track.participant_id,
        seq.radar_id,
        bad,
    )


def velocity(trace: DisplacementTrace) -> np.ndarray:
    """Time derivative of d, differentiated separately inside each segment.

    Central differences inside a segment, one-sided at its ends, so no
    difference straddles a segment stitch.
    """
    d = trace.values
    edges = sorted(set(trace.boundaries) | {0}) + [d.size]
    v = np.empty_like(d)
    for s, e in zip(edges[:-1], edges[1:]):
        if e - s >= 2:
            v[s:e] = np.gradient(d[s:e], 1.0 / trace.fs_hz)
        elif e - s == 1:
            v[s:e] = 0.0
    return v


def movement_index(trace: DisplacementTrace, window_s: float, fs: float | None = None) -> MovementTrace:
    """b(t): square root of the windowed mean of the squared velocity.

    The window ``[t - window_s/2, t + window_s/2]`` is integrated with the
    trapezoid rule. Near the ends it is truncated and normalized by its
    remaining weight.
    """
    fs = trace.fs_hz if fs is None else fs
    if window_s * fs < 2:
        raise ConfigError("movement window must span at least two samples")
    if trace.values.size < 2:
        raise ConfigError("trace must have at least two samples")
    v2 = velocity(trace) ** 2
    h = int(round(window_s * fs / 2.0))
    kernel = np.ones(2 * h + 1)
    kernel[[0, -1]] = 0.5
    if v2.size < kernel.size:
        total = np.array([_trapz_sum(v2, i, h) for i in range(v2.size)])
        weight = np.array([_trapz_weight(v2.size, i, h) for i in range(v2.size)])
    else:
        total = np.convolve(v2, kernel, mode="same")
        weight = np.full(v2.size, 2.0 * h)
        for i in range(h):
            total[i] = _trapz_sum(v2, i, h)
            total[-1 - i] = _trapz_sum(v2, v2.size - 1 - i, h)
            weight[i] = weight[-1 - i] = _trapz_weight(v2.size, i, h)
    b = np.sqrt(np.maximum(total, 0.0) / weight)
    return MovementTrace(b, fs, trace.participant_id, trace.radar_id)


def _trapz_sum(v2: np.ndarray, i: int, h: int) -> float:
    lo, hi = max(i - h, 0), min(i + h, v2.size - 1)
    if lo == hi:
        return float(v2[i])
    return float(v2[lo:hi + 1].sum() - 0.5 * (v2[lo] + v2[hi]))


def _trapz_weight(n: int, i: int, h: int) -> float:
    return float(max(min(i + h, n - 1) - max(i - h, 0), 1))
