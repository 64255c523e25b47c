import json

import numpy as np
import pytest

from qpot.cli import main


@pytest.fixture
def files(tmp_path):
    cfg = tmp_path / "coex.json"
    cfg.write_text(json.dumps({"flux": "asep", "rho_l": 0.3, "rho_r": 0.7, "n_cells": 60, "seed": 2,
                               "horizon": 10.0}))
    ld = tmp_path / "ld.json"
    ld.write_text(json.dumps({"flux": "asep", "rho_l": 0.2, "rho_r": 0.6, "n_cells": 60, "seed": 2,
                              "horizon": 10.0}))
    prof = tmp_path / "uni.csv"
    prof.write_text("x,rho\n" + "".join(f"{(i + .5) / 40},0.5\n" for i in range(40)))
    stat = tmp_path / "stat.csv"
    stat.write_text("\n".join(["0.2"] * 40))
    return tmp_path, cfg, ld, prof, stat


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_static_stationary(files, capsys):
    _, _, ld, _, stat = files
    assert main(["static", str(ld), str(stat)]) == 0
    assert _json(capsys)["S"] == pytest.approx(0.0, abs=1e-12)


def test_static_coexistence_reports_Y(files, capsys):
    _, cfg, _, prof, _ = files
    assert main(["static", str(cfg), str(prof)]) == 0
    assert _json(capsys)["Y"] == [[0.0, 1.0]]


def test_malformed_json_exit_2(files, capsys):
    tmp, _, _, prof, _ = files
    bad = tmp / "bad.json"
    bad.write_text("{nope")
    assert main(["static", str(bad), str(prof)]) == 2
    assert main(["static", str(tmp / "missing.json"), str(prof)]) == 2
    assert main(["nonsense"]) == 2


def test_relax_ld_finite(files, capsys):
    tmp, _, ld, _, _ = files
    out = tmp / "relax.csv"
    assert main(["relax", str(ld), "--out", str(out)]) == 0
    rep = _json(capsys)
    assert rep["finite_time"] and rep["relaxation_time"] > 0
    assert out.read_text().startswith("t,x,rho")
    assert main(["action", str(ld), str(out)]) == 0
    assert _json(capsys)["bulk"] >= 0


def test_relax_is_deterministic(files, capsys):
    _, _, ld, _, _ = files
    main(["relax", str(ld)])
    a = _json(capsys)
    main(["relax", str(ld)])
    assert _json(capsys) == a


def test_path_enumerate_y(files, capsys):
    tmp, cfg, _, prof, _ = files
    out, svg = tmp / "p.csv", tmp / "p.svg"
    assert main(["path", str(cfg), str(prof), "--enumerate-y", "--out", str(out), "--plot", str(svg)]) == 0
    reps = _json(capsys)
    assert [r["y"] for r in reps] == [0.0, 0.5, 1.0]
    for i in range(3):
        assert (tmp / f"p_{i}.csv").exists()
        assert (tmp / f"p_{i}.svg").read_text().lstrip().startswith("<?xml")


def test_verify_involution(capsys):
    assert main(["verify", "--suite", "involution"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_threads_env(monkeypatch, files, capsys):
    _, cfg, _, prof, _ = files
    monkeypatch.setenv("QPOT_THREADS", "0")
    assert main(["path", str(cfg), str(prof), "--enumerate-y"]) == 2
