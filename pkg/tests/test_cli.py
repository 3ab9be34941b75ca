import json

import numpy as np
import pytest

from mimome_tas.channel import generate_rayleigh, load_matrix, store_matrix
from mimome_tas.cli import main


@pytest.fixture
def mats(tmp_path):
    hm, he, bad = tmp_path / "m.mat", tmp_path / "e.mat", tmp_path / "bad.mat"
    store_matrix(generate_rayleigh(4, 12, 1), hm)
    store_matrix(generate_rayleigh(8, 12, 2), he, binary=True)
    store_matrix(generate_rayleigh(8, 10, 3), bad)
    return hm, he, bad


def _report(capsys):
    out = json.loads(capsys.readouterr().out)
    out.pop("wall_time_s")
    return out


def test_gen(tmp_path):
    path = tmp_path / "g.mat"
    assert main(["gen", "--nr", "4", "--nt", "8", "--seed", "7", "--out", str(path)]) == 0
    assert np.array_equal(load_matrix(path), generate_rayleigh(4, 8, 7))


def test_select_ncsie(mats, capsys):
    hm, _, _ = mats
    assert main(["select", "--scenario", "ncsie", "--hm", str(hm), "-L", "4", "--rho-m-db", "9"]) == 0
    rep = _report(capsys)
    assert len(rep["indices"]) == 4 and rep["indices"] == sorted(rep["indices"])
    assert rep["secrecy_capacity_bits"] is None
    assert rep["visited_nodes"] >= 12


def test_select_is_deterministic(mats, capsys):
    hm, he, _ = mats
    argv = ["select", "--scenario", "csie", "--hm", str(hm), "--he", str(he), "-L", "3",
            "--rho-m-db", "5", "--rho-e-db", "1"]
    main(argv)
    first = _report(capsys)
    main(argv)
    assert _report(capsys) == first
    assert first["secrecy_capacity_bits"] == max(0.0, first["objective_bits"])


def test_select_methods_agree(mats, capsys):
    hm, he, _ = mats
    base = ["select", "--scenario", "csie", "--hm", str(hm), "--he", str(he), "-L", "3", "--rho-m-db", "5"]
    main(base)
    bab = _report(capsys)
    main(base + ["--method", "es"])
    es = _report(capsys)
    main(base + ["--method", "norm"])
    norm = _report(capsys)
    assert abs(bab["objective_bits"] - es["objective_bits"]) <= 1e-9
    assert norm["visited_nodes"] == 12
    assert norm["objective_bits"] <= bab["objective_bits"] + 1e-9


def test_select_from_seed(capsys):
    assert main(["select", "--scenario", "csie", "--seed", "3", "--nt", "16", "-L", "4",
                 "--rho-m-db", "9"]) == 0
    assert len(_report(capsys)["indices"]) == 4


def test_select_dimension_mismatch(mats, capsys):
    hm, _, bad = mats
    code = main(["select", "--scenario", "csie", "--hm", str(hm), "--he", str(bad), "-L", "2",
                 "--rho-m-db", "0"])
    assert code == 2
    assert "dimension mismatch" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["select", "--hm", str(tmp_path / "nope.mat"), "-L", "2", "--rho-m-db", "0"]) == 2


def test_select_budget_refusal(capsys):
    code = main(["select", "--method", "es", "--seed", "1", "--nt", "30", "-L", "4",
                 "--rho-m-db", "0", "--es-cap", "10000"])
    assert code == 4
    assert "27405" in capsys.readouterr().err


def test_sweep_csv_and_plot(tmp_path):
    out = tmp_path / "fig1.csv"
    argv = ["sweep", "--scenario", "ncsie", "--nt", "12", "--nr", "4", "--ne", "8", "-L", "4",
            "--rho-m-db", "-5", "0", "5", "--rho-e-db", "5", "--trials", "4",
            "--methods", "bab,norm", "--out", str(out), "--emit-plot"]
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 7
    assert {ln.split(",")[1] for ln in lines[1:]} == {"bab", "norm"}
    assert (tmp_path / "fig1.bab.mean_cs_bits.csv").exists()
    first = out.read_text()
    assert main(argv) == 0
    assert out.read_text() == first


def test_sweep_config_file(tmp_path, capsys):
    cfg = tmp_path / "fig4.json"
    cfg.write_text(json.dumps({"scenario": "csie", "nt": [8, 10], "nr": 4, "ne": 4, "L": 4,
                               "rho_m_db": [9], "rho_e_db": [1], "n_trials": 3,
                               "methods": ["bab", "norm", "es"]}))
    assert main(["sweep", "--config", str(cfg), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 6
    assert all(r["mean_nodes"] > 0 for r in rows)


def test_sweep_zero_trials(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n_trials": 0}))
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert main(["sweep", "--trials", "0"]) == 2


def test_bench_table(capsys):
    assert main(["bench", "--nt", "12", "-L", "4", "--trials", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    rows = {ln.split()[0]: ln.split() for ln in lines[1:]}
    assert float(rows["bab"][3]) < 1.0
    assert float(rows["norm"][1]) == 12.0


def test_bench_norm_only(capsys):
    assert main(["bench", "--nt", "20", "--methods", "norm", "--trials", "2"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split()
    assert row[0] == "norm" and float(row[1]) == 20.0


def test_bench_budget(capsys):
    assert main(["bench", "--nt", "30", "--methods", "es", "--es-cap", "10000", "--trials", "1"]) == 4
    assert main(["bench", "--nt", "30", "--methods", "bab,es", "--es-cap", "100000", "--trials", "1"]) == 0
