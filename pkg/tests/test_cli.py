import json
import random
import subprocess
import sys

import pytest

from clonelab.cli import main
from clonelab.core import FnTable, SmallnessIdeal
from clonelab.funcgraph import canonical_form, spectrum
from clonelab.monoids import membership_report


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_analyze_identity(tmp_path, capsys):
    f = write(tmp_path, "id.txt", "4\n0 1 2 3\n")
    code, out, _ = run(capsys, "analyze", f, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1
    assert doc["spectrum"] == {"1": 4}
    assert doc["config"]["seed"] == 0
    assert doc["decomposition"][0]["cycle"] == [0]


def test_analyze_constant_is_chi(tmp_path, capsys):
    f = write(tmp_path, "c.txt", "4\n2 2 2 2\n")
    for k in range(1, 5):
        code, out, _ = run(capsys, "analyze", f, "--k", k, "--format", "json")
        assert json.loads(out)["predicates"]["predicates"]["chi"] is True


def test_analyze_matches_library(tmp_path, capsys):
    rng = random.Random(11)
    g = FnTable(5, 1, tuple(rng.randrange(5) for _ in range(5)))
    f = write(tmp_path, "r.txt", f"5\n{' '.join(map(str, g.values))}\n")
    _, out, _ = run(capsys, "analyze", f, "--k", 3, "--format", "json")
    doc = json.loads(out)
    assert doc["canonical_form"] == str(canonical_form(g))
    assert doc["spectrum"] == {str(p): c for p, c in spectrum(g).items()}
    assert doc["predicates"] == membership_report(g, SmallnessIdeal(5, 3)).to_json()


def test_analyze_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.txt", "3\n0 1 x\n")
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2 and "line 2, column 5" in err
    binary = write(tmp_path, "b.txt", "2 2\n0 0 0 1\n")
    assert run(capsys, "analyze", binary)[0] == 2
    ok = write(tmp_path, "ok.txt", "3\n0 1 2\n")
    assert run(capsys, "analyze", ok, "--n", 4)[0] == 2
    assert run(capsys, "analyze", tmp_path / "missing.txt")[0] == 2


def test_conj(tmp_path, capsys):
    a = write(tmp_path, "a.txt", "4\n1 0 3 2\n")
    b = write(tmp_path, "b.txt", "4\n2 3 0 1\n")
    code, out, _ = run(capsys, "conj", a, b, "--find", "--format", "json")
    doc = json.loads(out)
    assert doc["conjugate"] and len(doc["gamma"]) == 4
    code, out, _ = run(capsys, "conj", a, a)
    assert out.startswith("CONJUGATE")
    c = write(tmp_path, "c.txt", "3\n0 0 0\n")
    d = write(tmp_path, "d.txt", "3\n0 0 1\n")
    code, out, _ = run(capsys, "conj", c, d, "--find")
    assert out.strip() == "NOT"
    assert run(capsys, "conj", a, c)[0] == 2


def test_closure_and_cache(tmp_path, capsys):
    gens = write(tmp_path, "gens.txt", "2 2\n0 0 0 1\n\n2 2\n0 1 1 1\n\n2\n1 0\n")
    cache = tmp_path / "cache"
    code, out, _ = run(capsys, "closure", gens, "--cache-dir", cache, "--format", "json")
    first = json.loads(out)
    assert code == 0 and first["counts"] == {"1": 4, "2": 16} and first["cache"] == "miss"
    code, out, _ = run(capsys, "closure", gens, "--cache-dir", cache, "--format", "json")
    second = json.loads(out)
    assert second["cache"] == "hit"
    assert second["counts"] == first["counts"]
    assert second["depth_histogram"] == first["depth_histogram"]


def test_closure_env_cache(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CLONELAB_CACHE", str(tmp_path / "env"))
    g = write(tmp_path, "and.txt", "2 2\n0 0 0 1\n")
    run(capsys, "closure", g)
    code, out, _ = run(capsys, "closure", g)
    assert "cache=hit" in out


def test_closure_projections_and_dump(tmp_path, capsys):
    dump = tmp_path / "members.txt"
    code, out, _ = run(capsys, "closure", "--n", 2, "--dump", dump)
    assert code == 0 and "arity 2: 2" in out
    assert dump.read_text().count("2 2\n") == 2
    assert run(capsys, "closure")[0] == 2


def test_closure_guard_message(tmp_path, capsys):
    g = write(tmp_path, "g.txt", "2 2\n0 0 0 1\n\n2\n1 0\n")
    code, _, err = run(capsys, "closure", g, "--arity-cap", 5)
    assert code == 2 and "arity_cap" in err


def test_lemma_check(capsys):
    code, out, _ = run(capsys, "lemma-check", "schreier-ulam", "--n", 4, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["stats"]["proper_subgroups"][0]["order"] == 4
    code, out, _ = run(capsys, "lemma-check", "glambda-oracle", "--n", 5)
    assert code == 0 and out.startswith("PASS")
    assert run(capsys, "lemma-check", "no-such-suite")[0] == 2


def test_gen_spectrum_round_trip(tmp_path, capsys):
    out_file = tmp_path / "s.txt"
    code, _, _ = run(capsys, "gen", "spectrum", "--spectrum", "1:2,2:1", "--sizes", "1,1,4",
                     "--n", 6, "-o", out_file)
    assert code == 0
    code, out, _ = run(capsys, "analyze", out_file, "--format", "json")
    assert json.loads(out)["spectrum"] == {"1": 2, "2": 1}
    code, out, _ = run(capsys, "gen", "spectrum", "--spectrum", "3:1")
    assert out == "3\n1 2 0\n"
    assert run(capsys, "gen", "spectrum", "--spectrum", "2:2", "--n", 3)[0] == 2


def test_gen_is_deterministic(capsys):
    a = run(capsys, "gen", "random", "--n", 6, "--seed", 9)[1]
    b = run(capsys, "gen", "random", "--n", 6, "--seed", 9)[1]
    assert a == b
    perm = run(capsys, "gen", "permutation", "--n", 6, "--seed", 2)[1]
    assert sorted(map(int, perm.split()[1:])) == list(range(6))
    op = run(capsys, "gen", "random", "--n", 2, "--arity", 3)[1]
    assert op.startswith("2 3\n")


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["closure", "--format", "xml"])
    assert e.value.code == 2
    assert run(capsys, "gen", "random", "--n", 3, "--k", 5)[0] == 2


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "f.txt", "3\n1 2 0\n")
    res = subprocess.run([sys.executable, "-m", "clonelab", "analyze", str(f)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "spectrum: {'3': 1}" in res.stdout
