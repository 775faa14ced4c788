import json

import pytest

from hexlat.cli import EXIT_CERTIFICATION, EXIT_INVALID, EXIT_OK, parse_time_grid, run


def read(path):
    return json.loads(path.read_text())


def test_time_grids():
    assert parse_time_grid("1:3:1") == [1.0, 2.0, 3.0]
    g = parse_time_grid("20:200:log16")
    assert len(g) == 16 and g[0] == 20 and g[-1] == pytest.approx(200)
    assert parse_time_grid("5, 7") == [5.0, 7.0]
    for bad in ("1:2", "0:10:log5", "1:5:-1", "2:3:log1"):
        with pytest.raises(ValueError):
            parse_time_grid(bad)


def test_newton(tmp_path):
    assert run(["newton", "--support", "2,0;1,2;0,4", "--out", str(tmp_path)]) == EXIT_OK
    d = read(tmp_path / "newton.json")
    assert (d["distance_num"], d["distance_den"]) == (4, 3)
    assert (d["bound_beta_num"], d["bound_beta_den"], d["bound_p"]) == (-3, 4, 0)
    assert run(["newton", "--support", "2,0;0,3", "--out", str(tmp_path)]) == EXIT_OK
    assert read(tmp_path / "newton.json")["bound"] == ["-5/6", 0]


def test_invalid_input(tmp_path, capsys):
    assert run(["newton", "--bogus", "--out", str(tmp_path)]) == EXIT_INVALID
    assert "usage" in capsys.readouterr().err
    assert run(["frobnicate"]) == EXIT_INVALID
    assert run(["newton", "--support", "x,y", "--out", str(tmp_path)]) == EXIT_INVALID
    assert run(["kernel", "--t", "50", "--n", "128", "--out", str(tmp_path)]) == EXIT_INVALID
    assert run(["decay", "--t", "1:2", "--out", str(tmp_path)]) == EXIT_INVALID


def test_kernel(tmp_path):
    assert run(["kernel", "--t", "2", "--binary", "--out", str(tmp_path)]) == EXIT_OK
    d = read(tmp_path / "kernel.json")
    assert d["n"] == 256
    assert d["l2_mass"] == pytest.approx(1.0, abs=1e-12)
    assert (tmp_path / "kernel.bin").read_bytes()[:8] == b"HEXLATWF"
    assert (tmp_path / "kernel.csv").read_text().startswith("l1,l2,re,im\n")


def test_decay_and_fit(tmp_path):
    args = ["decay", "--lattice", "square", "--t", "2:40:log12", "--vgrid", "5", "--out", str(tmp_path)]
    assert run(args) == EXIT_OK
    fit = read(tmp_path / "fit.json")
    assert fit["n_samples"] == 12 and fit["lattice"] == "square"
    out2 = tmp_path / "refit"
    assert run(["fit", "--input", str(tmp_path / "decay.csv"), "--method", "direct", "--out", str(out2)]) == EXIT_OK
    assert read(out2 / "fit.json")["method"] == "direct"


def test_phase(tmp_path):
    assert run(["phase", "--v", "2,2", "--out", str(tmp_path)]) == EXIT_OK
    reports = read(tmp_path / "phase.json")["reports"]
    assert any(r["case"] == "A" and r["exponent_pair"] == ["-3/4", 0] for r in reports)


def test_curves(tmp_path):
    assert run(["curves", "--grid", "256", "--out", str(tmp_path)]) == EXIT_OK
    d = read(tmp_path / "curves.json")
    assert set(d["curves"]) == {"Sigma0", "Sigma1_2", "Sigma2prime"}
    assert all(c["max_residual"] < 1e-6 for c in d["curves"].values())


def test_certify_failure_exit_code(tmp_path):
    code = run(["certify", "--grid", "512", "--eps", "1e-3", "--out", str(tmp_path)])
    d = read(tmp_path / "certify.json")
    assert code == (EXIT_OK if d["pass"] else EXIT_CERTIFICATION)
    assert code == EXIT_CERTIFICATION
    assert run(["certify", "--grid", "512", "--eps", "0.5", "--out", str(tmp_path)]) == EXIT_INVALID


def test_dnls(tmp_path):
    assert run(["dnls", "--T", "1", "--dt", "0.05", "--snapshot", "0.5", "--out", str(tmp_path)]) == EXIT_OK
    d = read(tmp_path / "dnls.json")
    assert d["mass_drift"] < 1e-12
    assert len((tmp_path / "dnls.csv").read_text().splitlines()) == 4


def test_report(tmp_path):
    run(["newton", "--out", str(tmp_path)])
    run(["kernel", "--t", "1", "--out", str(tmp_path)])
    assert run(["report", "--out", str(tmp_path)]) == EXIT_OK
    assert set(read(tmp_path / "report.json")["artifacts"]) == {"kernel", "newton"}


def test_config_file(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 4\n[newton]\nsupport = "2,0;0,3"\n')
    out = tmp_path / "o"
    assert run(["newton", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    d = read(out / "newton.json")
    assert d["bound"] == ["-5/6", 0] and d["meta"]["seed"] == 4
    # flags override the config
    assert run(["newton", "--config", str(cfg), "--support", "2,0;0,2", "--out", str(out)]) == EXIT_OK
    assert read(out / "newton.json")["bound"] == ["-1", 0]
    cfg.write_text("[newton]\nnot_a_flag = 1\n")
    assert run(["newton", "--config", str(cfg), "--out", str(out)]) == EXIT_INVALID
    cfg.write_text("[newton\n")
    assert run(["newton", "--config", str(cfg), "--out", str(out)]) == EXIT_INVALID
    assert run(["newton", "--config", str(tmp_path / "missing.toml"), "--out", str(out)]) == EXIT_INVALID


def test_threads_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("HEXLAT_THREADS", "3")
    assert run(["kernel", "--t", "1", "--out", str(tmp_path)]) == EXIT_OK


@pytest.mark.parametrize(
    "argv, files",
    [
        (["phase", "--sweep", "12", "--seed", "5"], ["sweep.json"]),
        (["decay", "--t", "2:30:log9", "--vgrid", "7"], ["decay.csv", "fit.json"]),
        (["kernel", "--t", "3"], ["kernel.csv", "kernel.json"]),
        (["curves", "--grid", "256", "--label", "Sigma0"], ["curve_Sigma0.csv", "curves.json"]),
    ],
)
def test_byte_identical_outputs_across_runs_and_threads(tmp_path, argv, files):
    outs = []
    for i, threads in enumerate(("1", "1", "8")):
        out = tmp_path / f"run{i}"
        run([*argv, "--threads", threads, "--out", str(out)])
        outs.append(out)
    for name in files:
        a = (outs[0] / name).read_bytes()
        assert a == (outs[1] / name).read_bytes()
        assert a == (outs[2] / name).read_bytes()
