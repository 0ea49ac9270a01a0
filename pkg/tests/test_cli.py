import json
import subprocess
import sys

import pytest

from qpadic.cli import COMMANDS, dumps, load_schema, main, run, validate
from qpadic.errors import ValidationError


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def result_of(argv):
    code, report, msg = run(argv)
    assert code == 0, msg
    validate(report, "report")
    return report["result"]


def test_radius_of_constant_system(tmp_path):
    f = write(tmp_path, "a2.json", {"matrix": [[2]]})
    res = result_of(["radius", f])
    assert res["log_radius"] == {"num": "3", "den": "2"} and res["certified"] is True
    assert {"n", "v_over_n"} <= set(res["rows"][0])


def test_expand_square(tmp_path):
    f = write(tmp_path, "sq.json", {"f": {"num": [9, -6, 1], "den": [1]}, "xi": 3, "N": 4})
    res = result_of(["expand", f])
    assert res["basis"] == "twisted"
    assert [int(c["num"]) for c in res["coeffs"]] == [0, 9, 1, 0, 0]      # (q - 1) xi = 9


def test_verify_leibniz_exit_zero():
    code, report, _ = run(["verify", "--suite", "leibniz"])
    assert code == 0
    assert list(report["result"]["suites"]) == ["leibniz"]
    assert report["result"]["failed"] == 0


def test_qtype_rows(tmp_path):
    f = write(tmp_path, "q.json", {"alpha": 2})
    res = result_of(["qtype", f, "--horizon", "200"])
    assert res["log_radius"] == {"num": "0", "den": "1"}
    assert len(res["rows"]) > 50


def test_effbound_and_phi(tmp_path):
    res = result_of(["effbound", write(tmp_path, "e.json", {"n": 10, "mu": 2})])
    assert res["constant"] == {"num": "-2", "den": "1"}
    sys_in = {"matrix": [[4]], "solution": [[{"num": [0, 1], "den": [1]}]]}
    res = result_of(["effbound", write(tmp_path, "e2.json", sys_in), "--horizon", "8"])
    # a vanishing left side shows up as the zero sentinel, otherwise the slack is non-negative
    assert all("sentinel" in r["slack"] or not r["slack"]["num"].startswith("-") for r in res["rows"])
    res = result_of(["phi", write(tmp_path, "p.json", {"alpha": 2}), "--horizon", "300"])
    assert set(res) == {"measured", "prediction"}


def test_regsing_and_deform(tmp_path):
    doc = {"matrix": [[{"num": [1, 1], "den": [1]}]], "eigenvalues": [1]}
    res = result_of(["regsing-solve", write(tmp_path, "r.json", doc), "--horizon", "300"])
    assert res["bound_holds"] is True
    assert res["radius"]["log_radius"] == {"num": "3", "den": "2"}
    res = result_of(["deform", write(tmp_path, "d.json", {"matrix": [[1]], "xi": 0, "ks": [1, 2, 3], "N": 12})])
    assert res["monotone"] is True and len(res["rows"]) == 3


def test_frobenius_rank_one(tmp_path):
    doc = {"matrix": [[{"num": [1, -1], "den": [1, -4]}]], "eigenvalues": [1]}
    cfg = write(tmp_path, "cfg.json", {"precision": {"padic_digits": 64, "series_order": 36}})
    res = result_of(["frobenius", write(tmp_path, "f.json", doc), "--config", cfg])
    assert res["F_rational"] == [[{"num": [{"num": "-1", "den": "64"}, {"num": "1", "den": "64"}],
                                   "den": [{"num": "-1", "den": "64"}, {"num": "1", "den": "1"}]}]]
    assert res["F_poles_off_unit_disk"] is True


def test_exit_codes(tmp_path):
    bad = write(tmp_path, "bad.json", {"matrix": "nope"})
    assert run(["radius", bad])[0] == 2
    assert run(["radius", str(tmp_path / "missing.json")])[0] == 2
    assert run(["verify", "--suite", "nosuch"])[0] == 2
    # eigenvalues 1 and q differ by a power of q, so the spectrum is resonant
    doc = {"matrix": [[1, {"num": [0, 1], "den": [1]}], [0, 4]], "eigenvalues": [1, 4]}
    assert run(["regsing-solve", write(tmp_path, "res.json", doc)])[0] == 3
    cfg = write(tmp_path, "c.json", {"p": 3, "q": 2})
    assert run(["radius", write(tmp_path, "a.json", {"matrix": [[2]]}), "--config", cfg])[0] == 3


def test_main_writes_out_and_stderr(tmp_path, capsys):
    f = write(tmp_path, "a2.json", {"matrix": [[2]]})
    out = tmp_path / "rep.json"
    assert main(["radius", f, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["command"] == "radius"
    assert main(["radius", str(tmp_path / "none.json")]) == 2
    assert "qpadic:" in capsys.readouterr().err


def test_determinism(tmp_path):
    f = write(tmp_path, "a2.json", {"matrix": [[2, 1], [0, {"num": [1, 1], "den": [1]}]]})
    a = dumps(run(["radius", f])[1])
    b = dumps(run(["radius", f])[1])
    assert a == b


def test_precision_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QPADIC_PRECISION", "40,50")
    code, report, _ = run(["qtype", write(tmp_path, "q.json", {"alpha": 2}), "--horizon", "50"])
    assert report["config"]["precision"] == {"padic_digits": 40, "series_order": 50}


def test_schemas_are_shipped():
    for name in [c for c in COMMANDS if c != "verify"] + ["config", "system", "report"]:
        assert load_schema(name)["$schema"].endswith("2020-12/schema")
    with pytest.raises(ValidationError):
        validate({"alpha": 1.5}, "qtype")


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "a2.json", {"matrix": [[2]]})
    proc = subprocess.run([sys.executable, "-m", "qpadic", "radius", f], capture_output=True, text=True)
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    assert rep["result"]["log_radius"] == {"num": "3", "den": "2"}
    assert proc.stdout == dumps(rep)
