"""End-to-end analysis runs: cubes and seat regions in, CSV reports out."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytics import (
    association_accuracy,
    correlation_matrices,
    normalize_scores,
    objective_index,
    pearson,
)
from .io import (
    FormatError,
    atomic_write,
    read_config,
    read_cube,
    read_cube_header,
    read_regions,
    read_scores,
    write_table,
)
from .model import ConfigError, RadarConfig, validate_config
from .pipeline import process_cube

log = logging.getLogger(__name__)


class StageError(RuntimeError):
    """Failure inside one pipeline stage; ``stage`` names it, ``__cause__`` holds the error."""

    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage
        self.error = exc


@dataclass
class Experiment:
    experiment_id: int
    cubes: list[Path]


@dataclass
class AnalysisRun:
    config: RadarConfig
    regions: dict[str, Path]
    experiments: list[Experiment]
    output_dir: Path
    scores: Path | None = None
    plots: bool = False

    def validate(self) -> "AnalysisRun":
        validate_config(self.config)
        files = [*self.regions.values(), *(c for e in self.experiments for c in e.cubes)]
        if self.scores is not None:
            files.append(self.scores)
        missing = [str(p) for p in files if not Path(p).is_file()]
        if missing:
            raise FileNotFoundError(f"missing input files: {missing}")
        ids = [e.experiment_id for e in self.experiments]
        if not ids or any(not e.cubes for e in self.experiments):
            raise ConfigError("every experiment needs at least one cube")
        if len(set(ids)) != len(ids):
            raise ConfigError("experiment ids must be unique")
        return self


def load_run(path) -> AnalysisRun:
    """Parse a run document (JSON). Relative paths resolve against its directory.

    Keys: ``config`` (inline dict or path to a config JSON, optional),
    ``regions`` (radar id -> regions CSV), ``experiments`` (list of
    ``{"id": int, "cubes": [header paths]}``), ``scores`` (optional CSV),
    ``output_dir`` and ``plots`` (optional bool).
    """
    path = Path(path)
    base = path.parent
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None

    def res(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    cfg = d.get("config", {})
    if isinstance(cfg, str):
        config = read_config(res(cfg))
    else:
        config = RadarConfig.from_dict(cfg)
    try:
        run = AnalysisRun(
            config=config,
            regions={str(k): res(v) for k, v in d["regions"].items()},
            experiments=[
                Experiment(int(e["id"]), [res(c) for c in e["cubes"]]) for e in d["experiments"]
            ],
            output_dir=res(d.get("output_dir", "report")),
            scores=res(d["scores"]) if d.get("scores") else None,
            plots=bool(d.get("plots", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise FormatError(f"{path}: malformed run document ({exc!r})") from None
    return run.validate()


@dataclass
class RunReport:
    output_dir: Path
    files: list[Path] = field(default_factory=list)
    accuracy: dict[int, float] = field(default_factory=dict)
    pearson: dict[int, float] = field(default_factory=dict)
    partial: bool = False


def _stage(name):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(name, exc) from exc
        return inner
    return wrap


def write_traces(path, traces, attr="values"):
    """One time column plus one column per participant."""
    traces = sorted(traces, key=lambda t: t.participant_id)
    n = min(t.values.size for t in traces)
    times = traces[0].times[:n]
    cols = [getattr(t, attr)[:n] for t in traces]
    rows = zip(times, *cols)
    header = ["time_s"] + [f"p{t.participant_id}" for t in traces]
    return write_table(path, header, rows)


def write_correlations(path, corr):
    ids = corr.participant_ids
    rows = [
        (ell + 1, ids[i], ids[k], corr.values[ell, i, k])
        for ell in range(corr.n_segments) for i in range(len(ids)) for k in range(len(ids))
    ]
    return write_table(path, ("segment", "radar1_participant", "radar2_participant", "rho"), rows)


def write_tracks(path, result):
    rows = []
    for pid in sorted(result.tracks):
        tr = result.tracks[pid]
        for ell, ((s, e), c) in enumerate(zip(tr.segments, tr.cells)):
            rows.append((pid, ell + 1, s, e, c.range_index, c.angle_index, c.range_m,
                         float(np.degrees(c.angle_rad))))
    return write_table(path, ("participant", "segment", "start", "end", "range_index",
                              "angle_index", "range_m", "angle_deg"), rows)


@_stage("process")
def _process(run: AnalysisRun, cube_path: Path):
    radar_id = read_cube_header(cube_path)["radar_id"]
    if radar_id not in run.regions:
        raise ConfigError(f"no regions file for radar {radar_id!r}")
    cube = read_cube(cube_path, run.config)
    regions = read_regions(run.regions[radar_id])
    return process_cube(cube, regions, run.config)


def run_pipeline(run: AnalysisRun) -> RunReport:
    """Process every experiment and write the report tables into ``run.output_dir``."""
    out = Path(run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(out)
    cfg = run.config
    objective: dict[tuple[int, int], float] = {}
    participants: set[int] = set()

    for exp in sorted(run.experiments, key=lambda e: e.experiment_id):
        j = exp.experiment_id
        results = [_process(run, p) for p in exp.cubes]
        results.sort(key=lambda r: r.radar_id)
        log.info("experiment %s: processed radars %s", j, [r.radar_id for r in results])
        for r in results:
            tag = f"exp{j}_{r.radar_id}"
            rep.files.append(write_tracks(out / f"tracks_{tag}.csv", r))
            rep.files.append(write_traces(out / f"displacement_{tag}.csv", r.displacement.values()))
            rep.files.append(write_traces(out / f"movement_{tag}.csv", r.movement.values()))
        pids = sorted(set.intersection(*(set(r.movement) for r in results)))
        participants.update(pids)

        if len(results) == 2:
            corr = _stage("correlate")(correlation_matrices)(
                [results[0].movement[m] for m in pids],
                [results[1].movement[m] for m in pids],
                cfg.corr_segment_s,
            )
            rep.files.append(write_correlations(out / f"correlation_exp{j}.csv", corr))
            mean = corr.mean_matrix()
            rep.files.append(write_table(
                out / f"correlation_mean_exp{j}.csv",
                ["radar1_participant"] + [f"p{m}" for m in pids],
                [[m, *mean[i]] for i, m in enumerate(pids)],
            ))
            assoc = _stage("associate")(association_accuracy)(corr)
            rep.accuracy[j] = assoc.accuracy
            rep.files.append(write_table(
                out / f"association_exp{j}.csv", ("participant", "segment", "indicator"),
                [(m, ell + 1, int(assoc.indicators[i, ell]))
                 for i, m in enumerate(pids) for ell in range(assoc.indicators.shape[1])],
            ))
        elif len(results) != 2:
            log.warning("experiment %s has %d radars; correlation needs exactly 2", j, len(results))

        n_seg = min(r.movement[pids[0]].values.size for r in results) // int(
            round(cfg.corr_segment_s * cfg.slow_time_fs_hz))
        for m in pids:
            objective[m, j] = _stage("objective")(objective_index)(
                [r.movement[m] for r in results], cfg.corr_segment_s, n_seg
            )
        if run.plots:
            rep.files.extend(_plot(out, j, results, pids))

    exps = sorted(e.experiment_id for e in run.experiments)
    pids = sorted(participants)
    rep.files.append(write_table(
        out / "objective.csv", ("participant", "experiment", "b"),
        [(m, j, objective[m, j]) for j in exps for m in pids if (m, j) in objective],
    ))
    if rep.accuracy:
        rep.files.append(write_table(
            out / "association_summary.csv", ("experiment", "p"),
            [(j, rep.accuracy[j]) for j in sorted(rep.accuracy)],
        ))

    if run.scores is None:
        rep.partial = True
        log.warning("no score file; subjective analysis skipped")
        return rep

    scores = _stage("scores")(read_scores)(run.scores)
    beta = _stage("scores")(normalize_scores)(scores)
    rep.files.append(write_table(
        out / "beta.csv", ("participant", "experiment", "beta"),
        [(m, j, beta[a, b]) for b, j in enumerate(scores.experiment_ids)
         for a, m in enumerate(scores.participant_ids)],
    ))
    rows = []
    for j in exps:
        if j not in scores.experiment_ids:
            continue
        b = [objective[m, j] for m in pids if (m, j) in objective and m in scores.participant_ids]
        bb = [beta[scores.participant_ids.index(m), scores.experiment_ids.index(j)]
              for m in pids if (m, j) in objective and m in scores.participant_ids]
        try:
            r = pearson(b, bb)
        except ConfigError:
            r = float("nan")
        rep.pearson[j] = r
        rows.append((j, r))
    rep.files.append(write_table(out / "pearson.csv", ("experiment", "r"), rows))
    return rep


def _plot(out: Path, j: int, results, pids):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        log.warning("matplotlib not installed; skipping plots")
        return []
    colors = ("k", "r", "b", "g")
    fig, axes = plt.subplots(len(pids), 1, sharex=True, figsize=(8, 1.4 * len(pids) + 0.6))
    axes = np.atleast_1d(axes)
    for ax, m in zip(axes, pids):
        for c, r in zip(colors, results):
            tr = r.movement[m]
            ax.plot(tr.times, tr.values * 1e3, color=c, lw=0.6, label=r.radar_id)
        ax.set_ylabel(f"p{m}\nmm/s")
    axes[0].legend(loc="upper right", fontsize="small")
    axes[-1].set_xlabel("time (s)")
    path = out / f"movement_exp{j}.svg"
    fig.tight_layout()
    with atomic_write(path, "wb") as fh:
        fig.savefig(fh, format="svg")
    plt.close(fig)
    return [path]
