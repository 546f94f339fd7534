"""Cross-radar correlation, echo association and subjective/objective score analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigError, MovementTrace, segment_bounds


def _values(x) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, MovementTrace) else x, dtype=float)


def normalized_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Inner product of the mean-removed sequences over the product of their norms.

    NaN when either sequence is constant.
    """
    xh = x - x.mean()
    yh = y - y.mean()
    nx = np.sqrt(np.dot(xh, xh))
    ny = np.sqrt(np.dot(yh, yh))
    if nx == 0 or ny == 0:
        return float("nan")
    r = float(np.dot(xh, yh) / (nx * ny))
    return min(1.0, max(-1.0, r))


def segment_correlation(b1, b2, corr_segment_s: float, fs: float | None = None) -> np.ndarray:
    """Per-segment correlation of two movement traces on a common time axis."""
    x, y = _values(b1), _values(b2)
    if fs is None:
        fs = b1.fs_hz
    if x.shape != y.shape:
        raise ConfigError("movement traces must have equal length")
    bounds = segment_bounds(x.size, fs, corr_segment_s)
    if not bounds:
        raise ConfigError("traces are shorter than one correlation segment")
    return np.array([normalized_inner(x[s:e], y[s:e]) for s, e in bounds])


@dataclass(frozen=True)
class CorrelationMatrixSequence:
    """``values[l, m, m']``: radar-1 participant m against radar-2 participant m'."""

    values: np.ndarray
    corr_segment_s: float
    participant_ids: tuple = ()

    @property
    def n_segments(self) -> int:
        return self.values.shape[0]

    def mean_matrix(self) -> np.ndarray:
        """Segment-averaged matrix, ignoring undefined entries."""
        v = self.values
        with np.errstate(invalid="ignore"):
            counts = np.sum(~np.isnan(v), axis=0)
            sums = np.nansum(v, axis=0)
            return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def correlation_matrices(traces1, traces2, corr_segment_s: float, fs: float | None = None):
    """All-pairs segment correlation between two radars' traces (same participant order)."""
    traces1, traces2 = list(traces1), list(traces2)
    if len(traces1) != len(traces2):
        raise ConfigError("both radars must report the same participants")
    if fs is None:
        fs = traces1[0].fs_hz
    m = len(traces1)
    cols = [
        [segment_correlation(traces1[i], traces2[k], corr_segment_s, fs) for k in range(m)]
        for i in range(m)
    ]
    values = np.array(cols).transpose(2, 0, 1)
    ids = tuple(getattr(t, "participant_id", i + 1) for i, t in enumerate(traces1))
    return CorrelationMatrixSequence(values, corr_segment_s, ids)


@dataclass(frozen=True)
class AssociationReport:
    indicators: np.ndarray  # (M, L) of 0/1
    accuracy: float


def association_accuracy(corr) -> AssociationReport:
    """Fraction of (participant, segment) pairs whose own correlation tops its row.

    Undefined (NaN) correlations never dominate; a NaN diagonal always fails.
    """
    v = np.asarray(corr.values if isinstance(corr, CorrelationMatrixSequence) else corr, float)
    if v.ndim != 3 or v.shape[1] != v.shape[2]:
        raise ConfigError("correlations must be a sequence of square matrices")
    n_seg, m, _ = v.shape
    filled = np.where(np.isnan(v), -np.inf, v)
    diag = np.diagonal(filled, axis1=1, axis2=2)  # (L, M)
    others = filled.copy()
    idx = np.arange(m)
    others[:, idx, idx] = -np.inf
    best_other = others.max(axis=2) if m > 1 else np.full((n_seg, m), -np.inf)
    ok = (diag >= best_other) & np.isfinite(diag)
    ind = ok.T.astype(int)
    acc = float(ind.sum() / ind.size) if ind.size else float("nan")
    return AssociationReport(ind, acc)


@dataclass(frozen=True)
class ScoreTable:
    """Item scores indexed ``[m, j, k]`` (participant, experiment, evaluator)."""

    beta1: np.ndarray
    beta2: np.ndarray
    participant_ids: tuple = ()
    experiment_ids: tuple = ()
    evaluator_ids: tuple = ()

    def __post_init__(self):
        b1 = np.asarray(self.beta1)
        b2 = np.asarray(self.beta2)
        if b1.shape != b2.shape or b1.ndim != 3:
            raise ConfigError("item scores must be (participant, experiment, evaluator) arrays")
        for name, b in (("beta1", b1), ("beta2", b2)):
            if not np.all(np.isin(b, (0, 1, 2))):
                raise ConfigError(f"{name} item scores must be 0, 1 or 2")
        object.__setattr__(self, "beta1", b1.astype(int))
        object.__setattr__(self, "beta2", b2.astype(int))
        m, j, k = b1.shape
        if not self.participant_ids:
            object.__setattr__(self, "participant_ids", tuple(range(1, m + 1)))
        if not self.experiment_ids:
            object.__setattr__(self, "experiment_ids", tuple(range(1, j + 1)))
        if not self.evaluator_ids:
            object.__setattr__(self, "evaluator_ids", tuple(range(1, k + 1)))

    @property
    def total(self) -> np.ndarray:
        """Summed score in 0..4 per (m, j, k)."""
        return self.beta1 + self.beta2


def normalize_totals(total, evaluator_ids=None) -> np.ndarray:
    """Normalize ``total[m, j, k]`` by each evaluator's grand mean, then average evaluators.

    Any positive per-evaluator rescaling of ``total`` leaves the result unchanged.
    """
    total = np.asarray(total, dtype=float)
    if total.ndim != 3:
        raise ConfigError("totals must be (participant, experiment, evaluator)")
    grand = total.mean(axis=(0, 1))
    if np.any(grand <= 0):
        ids = evaluator_ids or tuple(range(1, total.shape[2] + 1))
        bad = [ids[i] for i in np.flatnonzero(grand <= 0)]
        raise ConfigError(f"evaluator(s) {bad} gave only zero scores")
    return (total / grand).mean(axis=2)


def normalize_scores(scores: ScoreTable) -> np.ndarray:
    """Evaluator-normalized subjective index ``beta[m, j]``; grand mean is 1."""
    return normalize_totals(scores.total, scores.evaluator_ids)


def objective_index(traces, corr_segment_s: float, n_segments: int, fs: float | None = None) -> float:
    """Average over radars of the RMS of the mean-removed movement trace over ``n_segments`` segments."""
    traces = list(traces)
    if not traces:
        raise ConfigError("need at least one radar trace")
    rms = []
    for tr in traces:
        x = _values(tr)
        rate = fs if fs is not None else tr.fs_hz
        n = int(round(n_segments * corr_segment_s * rate))
        if x.size < n or n < 1:
            raise ConfigError(f"trace covers {x.size} samples, need {n}")
        xh = x[:n] - x[:n].mean()
        rms.append(np.sqrt(np.mean(xh * xh)))
    return float(np.mean(rms))


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equal-length, non-constant sequences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ConfigError("pearson needs two equal-length sequences of length >= 2")
    r = normalized_inner(x, y)
    if np.isnan(r):
        raise ConfigError("pearson is undefined for a constant sequence")
    return r
