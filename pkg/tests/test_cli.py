import json

import numpy as np
import pytest

from wilsonlab import checks, cli, serialize, sympl


def _config(tmp_path, body, name="c.toml"):
    p = tmp_path / name
    p.write_text(body)
    return p


def _run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip_time(text):
    rep = json.loads(text)
    rep.pop("timestamp")
    return json.dumps(rep, sort_keys=True)


def test_run_passes_and_schema(tmp_path, capsys):
    cfg = _config(tmp_path, 'checks = ["frame_operator_ratio", "counterexample"]\n')
    code, out, err = _run(["run", cfg], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["summary"] == {"total": 2, "passed": 2, "failed": 0}
    assert [r["check"] for r in rep["records"]] == ["frame_operator_ratio", "counterexample"]
    for rec in rep["records"]:
        assert set(rec) >= {"check", "paper_claim_tag", "parameters", "value", "tolerance", "pass"}
        assert rec["pass"] == (rec["value"] <= rec["tolerance"])
    assert rep["config"]["grid"] == {"d": 1, "P": 4, "r": 8}
    assert "PASS frame_operator_ratio" in err


def test_determinism(tmp_path, capsys, monkeypatch):
    cfg = _config(tmp_path, 'seed = 5\nchecks = ["wilson_onb", "tight_autocorr", "ks_onb"]\n')
    _, a, _ = _run(["run", cfg], capsys)
    monkeypatch.setenv("WILSON_THREADS", "1")
    _, b, _ = _run(["run", cfg], capsys)
    assert _strip_time(a) == _strip_time(b)


def test_failure_exit(tmp_path, capsys):
    cfg = _config(tmp_path, 'checks = ["wilson_onb"]\n[tolerances]\nwilson_onb = 1e-30\n')
    code, out, _ = _run(["run", cfg], capsys)
    assert code == 1 and json.loads(out)["summary"]["failed"] == 1


@pytest.mark.parametrize("body", [
    "checks = []\n",
    'checks = ["no_such_check"]\n',
    'checks = ["wilson_onb"]\n[tolerances]\nwilson_onb = -1\n',
    'checks = ["wilson_onb"]\nbogus = 1\n',
    'checks = ["wilson_onb"]\n[grid]\nd = 1\nP = 3\nr = 8\n',
    'checks = ["wilson_onb"]\n[window]\nkind = "file"\npath = "missing.bin"\n',
    "checks = [\n",
])
def test_invalid_configs(tmp_path, capsys, body):
    code, _, err = _run(["run", _config(tmp_path, body)], capsys)
    assert code == 2 and "error" in err


def test_unknown_check_named(tmp_path, capsys):
    _, _, err = _run(["run", _config(tmp_path, 'checks = ["no_such_check"]\n')], capsys)
    assert "no_such_check" in err


def test_output_directory(tmp_path, capsys):
    cfg = _config(tmp_path, 'checks = ["counterexample"]\n[output]\ndirectory = "out"\ncsv = true\n')
    code, out, _ = _run(["run", cfg], capsys)
    assert code == 0 and out == ""
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["records"][0]["check"] == "counterexample"
    assert list((tmp_path / "out").glob("*.csv"))


def test_window_from_file(tmp_path, capsys):
    from wilsonlab import grid
    g = grid.random_symmetric_window(grid.make_grid(1, 4, 8), 3)
    serialize.write_signal_binary(g, tmp_path / "g.bin")
    cfg = _config(tmp_path, 'checks = ["frame_operator_ratio"]\n[window]\nkind = "file"\npath = "g.bin"\n')
    code, out, _ = _run(["run", cfg], capsys)
    assert code == 0


def test_list_checks(capsys):
    code, out, _ = _run(["list-checks", "--json"], capsys)
    rows = json.loads(out)
    assert code == 0 and len(rows) >= 12
    assert all(r["citation"] and r["paper_claim_tag"] for r in rows)
    assert len({r["paper_claim_tag"] for r in rows}) == len(rows)
    code, out, _ = _run(["list-checks"], capsys)
    assert "frame_operator_ratio" in out


def test_threads_env(monkeypatch):
    monkeypatch.setenv("WILSON_THREADS", "3")
    assert cli.thread_count() == 3 and cli.thread_count(2) == 2
    monkeypatch.setenv("WILSON_THREADS", "many")
    with pytest.raises(Exception):
        cli.thread_count()


def test_family_and_gram(tmp_path, capsys):
    cfg = _config(tmp_path, "[grid]\nd = 1\nP = 4\nr = 8\n")
    code, _, _ = _run(["family", cfg, "--kind", "gabor", "--out", tmp_path / "f.json"], capsys)
    assert code == 0
    code, out, _ = _run(["gram", tmp_path / "f.json", "--csv", tmp_path / "g.csv"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 64 and rep["flags"]["frame"]
    assert (tmp_path / "g.csv").exists()
    assert _run(["gram", tmp_path / "missing.json"], capsys)[0] == 2


def test_decompose_verb(tmp_path, capsys):
    serialize.write_matrix_csv(sympl.standard_J(1), tmp_path / "j.csv")
    code, out, _ = _run(["decompose", tmp_path / "j.csv"], capsys)
    assert code == 0 and [o["kind"] for o in json.loads(out)["ops"]] == ["Fourier"]
    serialize.write_matrix_csv([[1, 1], [0, 1]], tmp_path / "ks.csv")
    code, out, _ = _run(["decompose", tmp_path / "ks.csv", "--order", "KLRQ"], capsys)
    plan = serialize.plan_from_json(out)
    assert np.allclose(plan.matrix, [[1, 1], [0, 1]])
    serialize.write_matrix_csv(np.diag([2.0, 1.0]), tmp_path / "bad.csv")
    assert _run(["decompose", tmp_path / "bad.csv"], capsys)[0] == 2
    assert _run(["decompose", tmp_path / "j.csv", "--order", "KKLQ"], capsys)[0] == 2


def test_autocorr_verb(tmp_path, capsys):
    cfg = _config(tmp_path, '[autocorr]\nwindow = "cos"\nn_omega = 4\n')
    code, out, _ = _run(["autocorr", cfg], capsys)
    assert code == 0 and len(out.splitlines()) == 5 * 4
    cfg = _config(tmp_path, '[autocorr]\nfamily = "wilson"\n', "f.toml")
    code, _, _ = _run(["autocorr", cfg, "--output", tmp_path / "grids"], capsys)
    assert code == 0 and len(list((tmp_path / "grids").glob("t_alpha_*.csv"))) == 8


def test_claim_table_matches_registry():
    rows = checks.claim_table()
    assert [r[0] for r in rows] == list(checks.REGISTRY)
