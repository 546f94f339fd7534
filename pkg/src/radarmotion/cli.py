"""Command-line workflow: simulate -> process -> correlate -> associate -> scores, or ``report``.

Exit codes::

    0  success
    1  partial success (report without a score file: radar-only analysis)
    2  usage error
    3  configuration / validation error
    4  file or format error
    5  numerical failure
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .analytics import (
    CorrelationMatrixSequence,
    association_accuracy,
    correlation_matrices,
    normalize_scores,
)
from .model import ConfigError, MovementTrace, RadarConfig
from .pipeline import process_cube
from .report import StageError, load_run, run_pipeline, write_correlations, write_traces, write_tracks
from .simulator import classroom_scene, seat_regions, simulate

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = range(6)

log = logging.getLogger("radarmotion")


def _config(args) -> RadarConfig:
    return io.read_config(args.config) if args.config else RadarConfig()


def cmd_config(args):
    cfg = _config(args)
    if args.show:
        print(json.dumps(cfg.to_dict(), indent=2))
    return EXIT_OK


def cmd_simulate(args):
    cfg = _config(args)
    if args.scene:
        scene = io.read_scene(args.scene)
    else:
        scene = classroom_scene(args.duration, args.noise_power, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_scene(out / "scene.json", scene)
    for pose in scene.radars:
        sim = simulate(scene, cfg, radar_ids=[pose.radar_id], dtype=np.complex64)
        path = io.write_cube(sim.cubes[pose.radar_id], out / f"{args.prefix}{pose.radar_id}.hdr")
        print(path)
        truth = sim.truth[pose.radar_id]
        t = np.arange(truth.shape[1]) / cfg.slow_time_fs_hz
        io.write_table(out / f"truth_{pose.radar_id}.csv",
                       ["time_s"] + [f"s{k}" for k in range(truth.shape[0])],
                       zip(t, *truth))
        if any(s.label is not None for s in scene.scatterers):
            io.write_regions(out / f"regions_{pose.radar_id}.csv", seat_regions(scene, pose))
        del sim
    return EXIT_OK


def cmd_process(args):
    cfg = _config(args)
    cube = io.read_cube(args.cube, cfg)
    regions = io.read_regions(args.regions)
    res = process_cube(cube, regions, cube.config, reference=args.phase_reference)
    out = Path(args.out)
    tag = args.tag or cube.radar_id
    for p in (
        write_tracks(out / f"tracks_{tag}.csv", res),
        write_traces(out / f"displacement_{tag}.csv", res.displacement.values()),
        write_traces(out / f"movement_{tag}.csv", res.movement.values()),
    ):
        print(p)
    return EXIT_OK


def _read_movement(path, fs):
    header, rows = io.read_table(path)
    if header[0] != "time_s" or len(header) < 2:
        raise io.FormatError(f"{path}: expected a movement table (time_s, p1, ...)")
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return [MovementTrace(data[:, i], fs, int(h.lstrip("p"))) for i, h in enumerate(header[1:], 1)]


def cmd_correlate(args):
    cfg = _config(args)
    b1 = _read_movement(args.movement1, cfg.slow_time_fs_hz)
    b2 = _read_movement(args.movement2, cfg.slow_time_fs_hz)
    if [t.participant_id for t in b1] != [t.participant_id for t in b2]:
        raise ConfigError("both movement tables must list the same participants")
    corr = correlation_matrices(b1, b2, cfg.corr_segment_s)
    print(write_correlations(args.out, corr))
    return EXIT_OK


def cmd_associate(args):
    header, rows = io.read_table(args.correlations)
    if header != ["segment", "radar1_participant", "radar2_participant", "rho"]:
        raise io.FormatError(f"{args.correlations}: not a correlation table")
    segs = sorted({int(r[0]) for r in rows})
    ids = sorted({int(r[1]) for r in rows})
    v = np.full((len(segs), len(ids), len(ids)), np.nan)
    for s, a, b, rho in rows:
        v[segs.index(int(s)), ids.index(int(a)), ids.index(int(b))] = float(rho)
    rep = association_accuracy(CorrelationMatrixSequence(v, 0.0, tuple(ids)))
    io.write_table(args.out, ("participant", "segment", "indicator"),
                   [(m, segs[ell], int(rep.indicators[i, ell]))
                    for i, m in enumerate(ids) for ell in range(len(segs))])
    print(f"p = {rep.accuracy:.4f}")
    return EXIT_OK


def cmd_scores(args):
    scores = io.read_scores(args.scores)
    beta = normalize_scores(scores)
    io.write_table(args.out, ("participant", "experiment", "beta"),
                   [(m, j, beta[a, b]) for b, j in enumerate(scores.experiment_ids)
                    for a, m in enumerate(scores.participant_ids)])
    print(args.out)
    return EXIT_OK


def cmd_report(args):
    run = load_run(args.run)
    if args.plots:
        run.plots = True
    rep = run_pipeline(run)
    for j, p in sorted(rep.accuracy.items()):
        print(f"experiment {j}: association accuracy p = {p:.3f}")
    for j, r in sorted(rep.pearson.items()):
        print(f"experiment {j}: pearson(b, beta) = {r:.3f}")
    return EXIT_PARTIAL if rep.partial else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radarmotion", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file overriding RadarConfig defaults")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("config", help="print the effective configuration")
    p.add_argument("--show", action="store_true")
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("simulate", help="render cubes, ground truth and seat regions")
    p.add_argument("--scene", help="scene JSON; default is the built-in classroom")
    p.add_argument("--out", required=True)
    p.add_argument("--prefix", default="", help="prefix for cube file names")
    p.add_argument("--sim-duration", dest="duration", type=float, default=900.0)
    p.add_argument("--sim-noise-power", dest="noise_power", type=float, default=1e-4)
    p.add_argument("--sim-seed", dest="seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("process", help="cube + seat regions -> tracks, d(t), b(t)")
    p.add_argument("--cube", required=True)
    p.add_argument("--regions", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tag")
    p.add_argument("--process-phase-reference", dest="phase_reference",
                   choices=("fit", "suppressed"), default="fit")
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("correlate", help="two movement tables -> per-segment correlations")
    p.add_argument("--movement1", required=True)
    p.add_argument("--movement2", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("associate", help="correlation table -> association indicators and p")
    p.add_argument("--correlations", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_associate)

    p = sub.add_parser("scores", help="score sheet -> normalized subjective index")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scores)

    p = sub.add_parser("report", help="run every stage from a run document")
    p.add_argument("--run", required=True)
    p.add_argument("--report-plots", dest="plots", action="store_true")
    p.set_defaults(func=cmd_report)
    return ap


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        exc = exc.error
    if isinstance(exc, io.FormatError) or isinstance(exc, OSError):
        return EXIT_IO
    # LinAlgError subclasses ValueError, so it is checked first
    if isinstance(exc, (ArithmeticError, np.linalg.LinAlgError)):
        return EXIT_NUMERIC
    if isinstance(exc, (ConfigError, KeyError, ValueError)):
        return EXIT_CONFIG
    return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to documented exit codes
        print(f"radarmotion: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
