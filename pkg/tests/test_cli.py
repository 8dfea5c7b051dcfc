import json

import jsonschema
import pytest

from hypersparse.cli import EXIT_INPUT, EXIT_OK, main
from hypersparse.io import read_any
from hypersparse.schema import REPORT_SCHEMA


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _report(path):
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, REPORT_SCHEMA)
    return rep


def test_gen_complete(tmp_path, capsys):
    f = tmp_path / "k5.hgr"
    code, out, _ = _run(capsys, "gen", "--model", "complete", "-n", 5, "-r", 3, "-o", f)
    assert code == EXIT_OK and "seed: 0" in out
    g = read_any(f)
    assert g.n == 5 and g.m == 10


def test_gen_to_stdout_is_clean(capsys):
    code, out, err = _run(capsys, "gen", "--model", "path", "-m", 3)
    assert code == EXIT_OK and out.startswith("hgr 4 3 0") and "seed: 0" in err


def test_gen_missing_parameter(capsys):
    code, _, err = _run(capsys, "gen", "--model", "uniform", "-n", 5)
    assert code == EXIT_INPUT and "requires" in err


def test_gen_bridge(tmp_path, capsys):
    f = tmp_path / "b.hgr"
    assert _run(capsys, "gen", "--model", "bridge", "-k", 4, "-r", 3, "-o", f)[0] == EXIT_OK
    assert read_any(f).m == 9


def test_sparsify_report_and_eval(tmp_path, capsys):
    g, sp, rep, ev = (tmp_path / n for n in ("g.hgr", "s.hgr", "r.json", "e.json"))
    _run(capsys, "gen", "--model", "uniform", "-n", 10, "-m", 40, "-r", 3, "--seed", 3, "-o", g)
    code, out, _ = _run(capsys, "sparsify", g, "--seed", 4, "--lambda-c", 1e6, "-o", sp, "--report", rep)
    assert code == EXIT_OK and "seed: 4" in out
    r = _report(rep)
    assert r["ok"] and r["seed"] == 4 and r["result"]["size"] == 40
    assert all(r["result"]["checks"].values())
    code, _, _ = _run(capsys, "eval", g, sp, "--all-cuts", "--samples", 50, "--report", ev)
    e = _report(ev)
    assert code == EXIT_OK and e["result"]["violations"] == 0


def test_eval_reports_violation(tmp_path, capsys):
    g, sp = tmp_path / "g.hgr", tmp_path / "s.hgr"
    _run(capsys, "gen", "--model", "complete", "-n", 6, "-r", 3, "-o", g)
    sp.write_text("hgr 6 1 1\n1.0 0 1 2\n")
    code, _, err = _run(capsys, "eval", g, sp, "--all-cuts")
    assert code == 1 and "FAILED" in err


def test_report_to_stdout_parses(tmp_path, capsys):
    g = tmp_path / "g.hgr"
    _run(capsys, "gen", "--model", "complete", "-n", 5, "-r", 3, "-o", g)
    code, out, _ = _run(capsys, "sparsify", g, "--report", "-")
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert code == EXIT_OK and rep["command"] == "sparsify"


def test_invalid_file(tmp_path, capsys):
    f = tmp_path / "bad.hgr"
    f.write_text("hgr 2 1 0\n0 9\n")
    code, _, err = _run(capsys, "sparsify", f)
    assert code == EXIT_INPUT and "line 2" in err


def test_missing_file(tmp_path, capsys):
    assert _run(capsys, "sparsify", tmp_path / "none.hgr")[0] == EXIT_INPUT


def test_bad_log_level(tmp_path, capsys, monkeypatch):
    g = tmp_path / "g.hgr"
    _run(capsys, "gen", "--model", "path", "-m", 2, "-o", g)
    monkeypatch.setenv("HYPERSPARSE_LOG", "chatty")
    assert _run(capsys, "sparsify", g)[0] == EXIT_INPUT


def test_jobs_identical(tmp_path, capsys):
    g = tmp_path / "g.hgr"
    _run(capsys, "gen", "--model", "uniform", "-n", 12, "-m", 60, "-r", 3, "--seed", 1, "-o", g)
    reps = []
    for jobs in (1, 4):
        out = tmp_path / f"s{jobs}.hgr"
        rp = tmp_path / f"r{jobs}.json"
        _run(capsys, "sparsify", g, "--seed", 7, "--delay", 1, "--jobs", jobs, "-o", out, "--report", rp)
        r = _report(rp)
        r["result"].pop("output")
        reps.append((r, out.read_text()))
    assert reps[0] == reps[1]


def test_directed_sparsify(tmp_path, capsys):
    d, rp = tmp_path / "d.dhgr", tmp_path / "r.json"
    _run(capsys, "gen", "--model", "bipartite-clique", "-n", 10, "-o", d)
    code, _, _ = _run(capsys, "sparsify", d, "--directed", "--report", rp)
    r = _report(rp)
    assert code == EXIT_OK and r["result"]["directed"] and r["result"]["size"] == 25


def test_directed_flag_requires_dhgr(tmp_path, capsys):
    g = tmp_path / "g.hgr"
    _run(capsys, "gen", "--model", "path", "-m", 2, "-o", g)
    assert _run(capsys, "sparsify", g, "--directed")[0] == EXIT_INPUT


def test_decompose(tmp_path, capsys):
    g, rp = tmp_path / "g.hgr", tmp_path / "r.json"
    _run(capsys, "gen", "--model", "bridge", "-k", 6, "-r", 3, "-o", g)
    code, out, _ = _run(capsys, "decompose", g, "--report", rp)
    assert code == EXIT_OK and "2 clusters" in out
    _report(rp)


def test_cheeger(tmp_path, capsys):
    g = tmp_path / "g.hgr"
    _run(capsys, "gen", "--model", "uniform", "-n", 8, "-m", 20, "-r", 3, "-o", g)
    code, out, _ = _run(capsys, "cheeger-check", g, "--samples", 20)
    assert code == EXIT_OK and "0 failures" in out


def test_lowerbound_flow(tmp_path, capsys):
    rs, inst, rp = tmp_path / "rs.json", tmp_path / "inst.json", tmp_path / "r.json"
    assert _run(capsys, "lowerbound", "gen-rs", "-n", 12, "-t", 12, "-a", 2, "-o", rs)[0] == EXIT_OK
    assert _run(capsys, "lowerbound", "encode", rs, "--seed", 2, "-o", inst)[0] == EXIT_OK
    code, out, _ = _run(capsys, "lowerbound", "decode", inst, "--density", 0.5)
    assert code == EXIT_OK and "estimate" in out
    code, _, _ = _run(capsys, "lowerbound", "audit", rs, "--trials", 20, "--report", rp)
    assert code == EXIT_OK and _report(rp)["result"]["trials"] == 20


def test_calibrate_cut_ratio(tmp_path, capsys):
    rp = tmp_path / "c.json"
    code, _, _ = _run(capsys, "calibrate", "cut-ratio", "--seeds", 4, "--report", rp)
    assert code == EXIT_OK
    _report(rp)


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


def test_gen_bridge_cut_is_sparsest(tmp_path, capsys):
    from hypersparse.generators import complete_uniform
    from hypersparse.hypercore import expansion_of_set
    from hypersparse.oracle import brute_sparsest_cut

    f = tmp_path / "b.hgr"
    _run(capsys, "gen", "--model", "bridge", "-o", f)
    g = read_any(f)
    k = g.n // 2
    bridge_phi = expansion_of_set(g, range(k))
    inner = brute_sparsest_cut(complete_uniform(k, 3))[1]
    assert bridge_phi < inner
    assert brute_sparsest_cut(g)[1] == pytest.approx(bridge_phi)


def test_gen_seed_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.hgr", tmp_path / "b.hgr"
    for f in (a, b):
        _run(capsys, "gen", "--model", "uniform", "-n", 8, "-m", 20, "-r", 3, "--seed", 5, "-o", f)
    assert a.read_text() == b.read_text()
