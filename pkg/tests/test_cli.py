import json

import numpy as np
import pytest

from radarmotion.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_PARTIAL, _exit_code, main
from radarmotion.io import read_table, write_scene, write_scores
from radarmotion.analytics import ScoreTable
from radarmotion.simulator import classroom_scene


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A short two-radar recording simulated through the command line."""
    d = tmp_path_factory.mktemp("cli")
    cfg = {"clutter_segment_s": 2.0, "corr_segment_s": 4.0, "n_channels": 8, "taylor_nbar": 3,
           "angle_grid_deg": [-60.0, 60.0, 2.0]}
    (d / "config.json").write_text(json.dumps(cfg))
    write_scene(d / "in.json", classroom_scene(16.0, noise_power=1e-4, seed=5))
    code = main(["--config", str(d / "config.json"), "simulate", "--scene", str(d / "in.json"),
                 "--out", str(d / "sim")])
    assert code == EXIT_OK
    rng = np.random.default_rng(0)
    write_scores(d / "scores.csv", ScoreTable(rng.integers(0, 3, (6, 1, 2)), rng.integers(1, 3, (6, 1, 2))))
    return d


def run_doc(d, name, cubes, scores=True):
    doc = {"config": "config.json",
           "regions": {r: f"sim/regions_{r}.csv" for r in ("radar1", "radar2")},
           "experiments": [{"id": 1, "cubes": cubes}],
           "output_dir": f"out_{name}"}
    if scores:
        doc["scores"] = "scores.csv"
    (d / f"{name}.json").write_text(json.dumps(doc))
    return str(d / f"{name}.json")


def test_config_show(capsys):
    assert main(["config", "--show"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["n_channels"] == 12


def test_stage_chain(workdir, capsys):
    d, c = workdir, ["--config", str(workdir / "config.json")]
    for r in ("radar1", "radar2"):
        assert main(c + ["process", "--cube", str(d / f"sim/{r}.hdr"),
                         "--regions", str(d / f"sim/regions_{r}.csv"), "--out", str(d / "stages")]) == EXIT_OK
    assert main(c + ["correlate", "--movement1", str(d / "stages/movement_radar1.csv"),
                     "--movement2", str(d / "stages/movement_radar2.csv"),
                     "--out", str(d / "stages/corr.csv")]) == EXIT_OK
    header, rows = read_table(d / "stages/corr.csv")
    assert header == ["segment", "radar1_participant", "radar2_participant", "rho"]
    assert len(rows) == 4 * 36
    assert main(["associate", "--correlations", str(d / "stages/corr.csv"),
                 "--out", str(d / "stages/assoc.csv")]) == EXIT_OK
    assert "p = " in capsys.readouterr().out
    assert main(["scores", "--scores", str(d / "scores.csv"), "--out", str(d / "stages/beta.csv")]) == EXIT_OK
    _, rows = read_table(d / "stages/beta.csv")
    assert np.mean([float(r[2]) for r in rows]) == pytest.approx(1.0, abs=1e-12)


def test_report_is_partial_without_scores(workdir):
    doc = run_doc(workdir, "partial", ["sim/radar1.hdr", "sim/radar2.hdr"], scores=False)
    assert main(["report", "--run", doc]) == EXIT_PARTIAL
    assert (workdir / "out_partial/association_exp1.csv").is_file()
    assert not (workdir / "out_partial/pearson.csv").exists()


def test_report_is_order_independent(workdir):
    a = run_doc(workdir, "ab", ["sim/radar1.hdr", "sim/radar2.hdr"])
    b = run_doc(workdir, "ba", ["sim/radar2.hdr", "sim/radar1.hdr"])
    assert main(["report", "--run", a]) == EXIT_OK
    assert main(["report", "--run", b]) == EXIT_OK
    files = sorted(p.name for p in (workdir / "out_ab").iterdir())
    assert "pearson.csv" in files and "correlation_exp1.csv" in files
    assert files == sorted(p.name for p in (workdir / "out_ba").iterdir())
    for f in files:
        assert (workdir / "out_ab" / f).read_bytes() == (workdir / "out_ba" / f).read_bytes(), f


def test_exit_codes(workdir, tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["process"])
    assert e.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"wavelength_m": 0}')
    assert main(["--config", str(bad), "config", "--show"]) == EXIT_CONFIG
    assert main(["scores", "--scores", str(tmp_path / "none.csv"), "--out", str(tmp_path / "o.csv")]) == EXIT_IO
    (tmp_path / "junk.csv").write_text("a,b\n1,2\n")
    assert main(["associate", "--correlations", str(tmp_path / "junk.csv"), "--out", str(tmp_path / "o")]) == EXIT_IO
    doc = run_doc(workdir, "missing", ["sim/radar1.hdr", "sim/nothere.hdr"])
    assert main(["report", "--run", doc]) == EXIT_IO
    assert _exit_code(np.linalg.LinAlgError("x")) == EXIT_NUMERIC
    assert "error" in capsys.readouterr().err
