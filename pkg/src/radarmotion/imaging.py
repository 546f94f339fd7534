"""Array tapering, delay-and-sum beamforming and static clutter suppression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ComplexImageSequence, ConfigError, DataCube, PowerImage, segment_bounds


@dataclass(frozen=True)
class TaylorWindow:
    coefficients: np.ndarray
    sidelobe_db: float
    nbar: int

    def __len__(self):
        return self.coefficients.size


def taylor_window(n: int, sidelobe_db: float = -25.0, nbar: int = 4) -> TaylorWindow:
    """Taylor amplitude taper over ``n`` elements, scaled so its largest value is 1.

    Uses the classical synthesis with ``nbar - 1`` cosine terms. A single
    element gets the trivial window ``[1.0]``.
    """
    if n < 1:
        raise ConfigError("window length must be at least 1")
    if not sidelobe_db < 0:
        raise ConfigError("sidelobe_db must be negative")
    if n == 1:
        return TaylorWindow(np.ones(1), sidelobe_db, nbar)
    if not 1 <= nbar <= n / 2:
        raise ConfigError(f"nbar must satisfy 1 <= nbar <= n/2 (n={n}, nbar={nbar})")

    eta = 10.0 ** (-sidelobe_db / 20.0)
    a = np.arccosh(eta) / np.pi
    sigma2 = nbar**2 / (a**2 + (nbar - 0.5) ** 2)
    m = np.arange(1, nbar)
    fm = np.empty(nbar - 1)
    for i, mi in enumerate(m):
        num = np.prod(1.0 - mi**2 / (sigma2 * (a**2 + (m - 0.5) ** 2)))
        others = m[m != mi]
        den = 2.0 * np.prod(1.0 - mi**2 / others**2)
        fm[i] = (-1) ** (mi + 1) * num / den

    x = (np.arange(n) - (n - 1) / 2.0) / n
    w = 1.0 + 2.0 * np.cos(2.0 * np.pi * np.outer(x, m)) @ fm
    # exact symmetry regardless of rounding in the cosine sum
    w = 0.5 * (w + w[::-1])
    coeffs = w / w.max()
    coeffs.setflags(write=False)
    return TaylorWindow(coeffs, sidelobe_db, nbar)


def steering_weights(theta, n: int) -> np.ndarray:
    """Plane-wave weights ``exp(j*pi*k*sin(theta))`` for elements ``k = 1..n``.

    ``theta`` may be a scalar (returns shape ``(n,)``) or an array of angles
    (returns shape ``theta.shape + (n,)``).
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > np.pi / 2 + 1e-12):
        raise ConfigError("steering angle must lie within [-pi/2, pi/2]")
    k = np.arange(1, n + 1)
    return np.exp(1j * np.pi * np.sin(theta)[..., None] * k)


def beamformer_matrix(window: TaylorWindow, angles) -> np.ndarray:
    """``(n_channels, n_angles)`` matrix so that ``image = samples @ W``."""
    alpha = np.asarray(window.coefficients)
    return alpha[:, None] * steering_weights(angles, alpha.size).T


def beamform_samples(samples: np.ndarray, weights: np.ndarray, block: int = 512) -> np.ndarray:
    """Apply a beamformer matrix over the last axis, in slow-time blocks."""
    samples = np.asarray(samples)
    out = np.empty(samples.shape[:-1] + (weights.shape[1],), dtype=np.complex128)
    for s in range(0, samples.shape[0], block):
        out[s:s + block] = samples[s:s + block].astype(np.complex128, copy=False) @ weights
    return out


def beamform(cube: DataCube, window: TaylorWindow, angles) -> ComplexImageSequence:
    """Complex image ``sum_n alpha_n w_n(theta) s_n(t, r)`` for every grid angle."""
    if len(window) != cube.n_channels:
        raise ConfigError(
            f"window has {len(window)} coefficients, cube has {cube.n_channels} channels"
        )
    angles = np.asarray(angles, dtype=float)
    values = beamform_samples(cube.samples, beamformer_matrix(window, angles))
    return ComplexImageSequence(
        values, angles, cube.config.range_bin_m, cube.config.slow_time_fs_hz, cube.radar_id
    )


def suppress_clutter(seq: ComplexImageSequence, seg_len_s: float) -> ComplexImageSequence:
    """Subtract each segment's per-cell time average from that segment.

    Samples after the last full segment are dropped.
    """
    bounds = segment_bounds(seq.n_slow, seq.fs_hz, seg_len_s)
    if not bounds:
        raise ConfigError("sequence is shorter than one clutter segment")
    out = np.empty((bounds[-1][1],) + seq.values.shape[1:], dtype=np.complex128)
    for s, e in bounds:
        chunk = seq.values[s:e]
        out[s:e] = chunk - chunk.mean(axis=0)
    return ComplexImageSequence(out, seq.angles, seq.range_bin_m, seq.fs_hz, seq.radar_id)


def power_image(seq: ComplexImageSequence, ell: int, seg_len_s: float) -> PowerImage:
    """Time-averaged ``|I|^2`` over segment ``ell``."""
    bounds = segment_bounds(seq.n_slow, seq.fs_hz, seg_len_s)
    if not 0 <= ell < len(bounds):
        raise ConfigError(f"segment {ell} out of range ({len(bounds)} segments)")
    s, e = bounds[ell]
    chunk = seq.values[s:e]
    p = np.mean(chunk.real**2 + chunk.imag**2, axis=0)
    return PowerImage(p, seq.angles, seq.range_bin_m, ell)
