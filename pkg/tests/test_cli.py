import csv
import io

import pytest

from fluidgp.cli import RunConfig, main

FAST = ["--realizations", "2", "--aps", "12", "--users", "3", "--cluster-size", "2"]


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def values(text):
    return dict(line.split(" = ") for line in text.strip().splitlines())


def test_estimate_single_sample():
    code, out, _ = run("estimate --positions 1.0 --x-target 1.0 --beta 1 --eta 10 --sigma2 1 --tau-p 10".split())
    assert code == 0
    assert float(values(out)["nmse"]) == pytest.approx(9.90099e-3, rel=1e-5)


def test_estimate_noiseless():
    code, out, _ = run("estimate --positions 1.0 --x-target 1.0 --sigma2 0".split())
    assert code == 0 and float(values(out)["nmse"]) <= 1e-8


def test_estimate_beta_zero():
    code, _, err = run("estimate --positions 1.0 --beta 0".split())
    assert code == 2 and "normalization" in err


def test_estimate_position_outside_segment():
    assert run("estimate --positions 2.5".split())[0] == 2


def test_estimate_empirical():
    code, out, _ = run("estimate --positions 0.7,1.0,1.3 --empirical 2000 --seed 1".split())
    v = values(out)
    assert code == 0 and v["empirical_check"] == "pass"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_validate_codes(tmp_path):
    assert run(["validate", write(tmp_path, "a.csv", "position\n0\n0.3\n0.6\n")])[0] == 0
    code, out, _ = run(["validate", write(tmp_path, "b.csv", "position\n0\n0.31\n")])
    assert code == 1 and out.startswith("speed violation at index 1")
    code, out, _ = run(["validate", write(tmp_path, "c.csv", "position\n0\n2.5\n"), "--v-max", "5"])
    assert code == 1 and out.startswith("bounds violation")
    assert run(["validate", write(tmp_path, "d.csv", "x\n1\n")])[0] == 2
    code, out, _ = run(["validate", str(tmp_path / "a.csv"), "--q", "8"])
    assert code == 1 and "port" in out


def test_config_file_and_precedence(tmp_path):
    cfg = write(tmp_path, "run.cfg", "# test\ntau_p = 20  # pilots\nsigma2 = 1\n")
    code, out, _ = run(["estimate", "--config", cfg, "--positions", "1.0", "--x-target", "1.0"])
    assert float(values(out)["nmse"]) == pytest.approx(1 / 201)
    code, out, _ = run(["estimate", "--config", cfg, "--tau-p", "10", "--positions", "1.0", "--x-target", "1.0"])
    assert float(values(out)["nmse"]) == pytest.approx(1 / 101)


def test_unknown_key(tmp_path):
    cfg = write(tmp_path, "bad.cfg", "tau_pp = 10\n")
    code, _, err = run(["cdf", "--config", cfg])
    assert code == 2 and "tau_pp" in err


def test_bad_value_names_key():
    code, _, err = run(["cdf", "--seed", "1", "--eta", "loud"])
    assert code == 2 and "eta_p" in err


def test_runconfig_lists(tmp_path):
    cfg = RunConfig.from_file(write(tmp_path, "l.cfg", "q = 2, 4, 8\n"))
    assert cfg.get_list("q") == [2, 4, 8]


def test_cdf_writes_files(tmp_path):
    out_dir = tmp_path / "o"
    code, out, _ = run(["cdf", "--seed", "7", "--out", str(out_dir), "--export-network"] + FAST)
    assert code == 0 and out.startswith("sweep_value,scheme")
    for name in ("raw.csv", "summary.csv", "ecdf.csv", "network/r0/beta.csv"):
        assert (out_dir / name).exists()


def test_generated_seed_is_printed(tmp_path):
    code, _, err = run(["cdf", "--out", str(tmp_path)] + FAST)
    assert code == 0 and "generated seed:" in err


def test_sweep_ports_rows(tmp_path):
    code, _, _ = run(["sweep-ports", "--q", "2,4,8,16", "--seed", "1", "--out", str(tmp_path)] + FAST)
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert code == 0
    cont = [r for r in rows if r["scheme"] == "continuous"]
    assert len(cont) == 4 and len(rows) == 8
    assert len({r["mean_nmse"] for r in cont}) == 1


def test_list_rejected_outside_its_sweep(tmp_path):
    assert run(["cdf", "--seed", "1", "--q", "4,8", "--out", str(tmp_path)] + FAST)[0] == 2


def test_io_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["cdf", "--seed", "1", "--out", str(blocker / "sub")] + FAST)[0] == 3
