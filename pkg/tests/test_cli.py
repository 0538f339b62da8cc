import csv
import io
import json
import math

import pytest

from mengerlab.cli import EXIT_ACCURACY, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, load_config, main, verify_manifest


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def circle_file(tmp_path, capsys):
    code, out, _ = run(capsys, "--output-dir", tmp_path, "curve-make", "--shape", "circle", "--N", 4)
    assert code == EXIT_OK
    return json.loads(out)["curve"]


def test_curve_make_writes_curve_and_manifest(tmp_path, capsys, circle_file):
    data = json.loads(open(circle_file).read())
    assert data["topologyWarning"] is False
    man = tmp_path / "curve-make.manifest.json"
    assert verify_manifest(man)
    open(circle_file, "a").write(" ")
    assert not verify_manifest(man)


def test_curve_info(capsys, circle_file):
    code, out, _ = run(capsys, "curve-info", circle_file)
    info = json.loads(out)
    assert code == EXIT_OK and info["simple"] and info["bandwidth"] == 4


def test_circle_energy_matches_closed_form(capsys, circle_file):
    # p = q: the integrand is curvature^p = (2 pi)^p on the unit-length circle
    code, out, _ = run(capsys, "energy", circle_file, "--p", 2.5, "--q", 2.5)
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(math.pi**2.5, rel=1e-12)
    code, out, _ = run(capsys, "energy", circle_file, "--p", 2.5)
    assert json.loads(out)["value"] == pytest.approx(306.266315235, rel=1e-7)


def test_reruns_are_bitwise_reproducible(capsys, circle_file):
    outs = [run(capsys, "energy", circle_file, "--p", 2.4)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_self_crossing_knot_warns(tmp_path, capsys):
    code, out, _ = run(capsys, "--output-dir", tmp_path, "curve-make", "--shape", "torus-knot", "--N", 32, "--R", 1.0, "--r", 1.0)
    assert code == EXIT_OK and json.loads(out)["topologyWarning"] is True


def test_exit_codes(tmp_path, capsys, circle_file):
    assert run(capsys, "no-such-command")[0] == EXIT_USAGE
    assert run(capsys, "energy")[0] == EXIT_USAGE
    assert run(capsys, "energy", tmp_path / "missing.json")[0] == EXIT_PRECONDITION
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "energy", bad)[0] == EXIT_PRECONDITION
    assert run(capsys, "energy", circle_file, "--p", -1)[0] == EXIT_PRECONDITION
    assert run(capsys, "intersect", circle_file)[0] == EXIT_USAGE
    assert run(capsys, "--version")[0] == 0


def test_ini_config_and_environment(tmp_path, monkeypatch):
    ini = tmp_path / "run.ini"
    ini.write_text("[energy]\np = 2.4\n[quadrature]\ngaussOrder = 6\n[flow]\nmaxIters = 7\n[output]\ndir = from_ini\n")
    cfg = load_config(ini, env={})
    assert (cfg.p, cfg.quad.gaussOrder, cfg.flow.maxIters, cfg.outputDir) == (2.4, 6, 7, "from_ini")
    assert load_config(ini, env={"MENGERLAB_OUTPUT_DIR": "from_env"}).outputDir == "from_env"
    junk = tmp_path / "junk.ini"
    junk.write_text("[colour]\nx = 1\n")
    assert main(["--config", str(junk), "majorant", "--L", "3"]) == EXIT_PRECONDITION


def test_ini_sets_default_exponent(tmp_path, capsys, circle_file):
    ini = tmp_path / "run.ini"
    ini.write_text("[energy]\np = 2.4\n")
    a = json.loads(run(capsys, "--config", ini, "energy", circle_file)[1])["value"]
    b = json.loads(run(capsys, "energy", circle_file, "--p", 2.4)[1])["value"]
    assert a == b


def test_gradient_and_elresidual(tmp_path, capsys, circle_file):
    code, out, _ = run(capsys, "--output-dir", tmp_path, "gradient", circle_file)
    assert code == EXIT_OK and (tmp_path / "gradient.json").exists()
    code, out, _ = run(capsys, "elresidual", circle_file)
    assert code == EXIT_OK and json.loads(out)["relativeResidual"] < 1e-6


def test_intersect(capsys, circle_file):
    code, out, _ = run(capsys, "intersect", circle_file, "--plane", "0,1,0,0")
    assert code == EXIT_OK and json.loads(out)["count"] == 2
    code, out, _ = run(capsys, "intersect", circle_file, "--sphere", "0,0,0,10")
    assert json.loads(out)["count"] == 0
    assert run(capsys, "intersect", circle_file, "--plane", "0,1,0")[0] == EXIT_USAGE


def test_diagnose(capsys, circle_file):
    code, out, _ = run(capsys, "diagnose", circle_file)
    assert code == EXIT_OK and json.loads(out)["analyticToMachinePrecision"] is True


def test_faadibruno(tmp_path, capsys):
    inp = tmp_path / "fdb.json"
    inp.write_text(json.dumps({"k": 4, "n": 1, "yAll": 1, "x": [[1], [1], [1], [1]]}))
    code, out, _ = run(capsys, "faadibruno", inp)
    assert code == EXIT_OK and json.loads(out)["value"] == 15
    inp.write_text(json.dumps({"k": 2, "n": 1, "y": {"(0,)": 1}, "x": [[1], [1]]}))
    assert run(capsys, "faadibruno", inp)[0] == EXIT_PRECONDITION


def test_majorant_csv(tmp_path, capsys):
    cfgfile = tmp_path / "m.json"
    cfgfile.write_text(json.dumps({"C": 0.5, "r": 2.0, "K": 4}))
    out_csv = tmp_path / "maj.csv"
    code, out, _ = run(capsys, "--output-dir", tmp_path, "majorant", "--config", cfgfile, "--L", 10, "-o", out_csv)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11 and max(float(r["relDiff"]) for r in rows) < 1e-12
    assert json.loads((tmp_path / "maj.fit.json").read_text())["config"]["K"] == 4
    assert verify_manifest(tmp_path / "majorant.manifest.json")


def test_leibniz(capsys):
    code, out, _ = run(capsys, "leibniz", "--case", 2)
    assert code == EXIT_OK
    assert json.loads(out)["ratio"] == pytest.approx(33.75220080268565, rel=1e-9)
    assert run(capsys, "leibniz", "--case", 1, "--p", 3.0)[0] == EXIT_PRECONDITION


def test_multiplier(capsys):
    code, out, _ = run(capsys, "multiplier", "--p", 2.5, "--kmax", 2)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and float(rows[0]["rho"]) == pytest.approx(1635.695012123324, rel=1e-7)


def test_flow_smoke(tmp_path, capsys):
    code, out, _ = run(capsys, "--output-dir", tmp_path, "curve-make", "--shape", "perturbed", "--N", 6, "--mode", 2, "--amplitude", 0.01)
    init = json.loads(out)["curve"]
    code, out, _ = run(capsys, "--output-dir", tmp_path, "flow", "--init", init, "--iters", 2)
    res = json.loads(out)
    assert code in (EXIT_OK, EXIT_ACCURACY)
    assert (code == EXIT_OK) == res["converged"]
    hist = list(csv.DictReader(open(tmp_path / "history.csv")))
    assert len(hist) == res["iterations"] + 1
    assert float(hist[-1]["energy"]) <= float(hist[0]["energy"])
    assert verify_manifest(tmp_path / "flow.manifest.json")
