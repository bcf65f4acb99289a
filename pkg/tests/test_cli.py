import json
import logging

import pytest

from framecert.certifier import InjectivityCertificate
from framecert.cli import data_path, run
from framecert.unipoly import UnivariatePoly


def _run(capsys, *argv):
    code = run(["-q", *argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_sturm_on_bundled_toy_polynomial(capsys):
    code, out, _ = _run(capsys, "sturm", str(data_path("cone_f_x1.txt")))
    assert code == 0 and out.strip() == "0"


def test_sturm_on_term_table(capsys, tmp_path):
    # (x - 1)(x + 2) y^0 written as a table; two real roots
    p = tmp_path / "t.txt"
    p.write_text("# exp_x exp_y c\n2 0 1\n1 0 1\n0 0 -2\n")
    code, out, _ = _run(capsys, "sturm", str(p))
    assert code == 0 and out.strip() == "2"


def test_sturm_two_variables_sets_second_to_one(capsys, tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("3*x^2 - 2*x*y + 3*y^2\n")
    code, out, _ = _run(capsys, "sturm", str(p))
    assert code == 0 and out.strip() == "0"


def test_roots_json_round_trip(capsys, tmp_path):
    out_path = tmp_path / "roots.json"
    code, _, _ = _run(capsys, "roots", str(data_path("cone_f_x1.txt")), "--precision-bits", "64",
                      "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["degree"] == 2 and len(doc["roots"]) == 2
    assert json.loads(json.dumps(doc)) == doc


def test_certify_and_verify_toy_system(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    code, _, err = _run(capsys, "certify", "--system", str(data_path("cone_2x2.json")), "--out", str(cert_path))
    assert code == 0 and "verdict: injective" in err
    cert = InjectivityCertificate.load(cert_path)
    assert cert.sturm["count"] == 0
    assert InjectivityCertificate.from_json(json.loads(cert_path.read_text())).to_json() == cert.to_json()
    code, out, _ = _run(capsys, "verify", "--system", str(data_path("cone_2x2.json")), "--cert", str(cert_path))
    assert code == 0 and "verdict: injective" in out


def test_identical_configs_give_identical_bytes(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert _run(capsys, "certify", "--system", str(data_path("cone_2x2.json")), "--lift", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_tampered_certificate_exit_code(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    _run(capsys, "certify", "--system", str(data_path("cone_2x2.json")), "--out", str(cert_path))
    doc = json.loads(cert_path.read_text())
    doc["f"][0][1][0] = "7"
    cert_path.write_text(json.dumps(doc))
    code, _, _ = _run(capsys, "verify", "--system", str(data_path("cone_2x2.json")), "--cert", str(cert_path))
    assert code == 2


def test_eliminate_writes_table(capsys, tmp_path):
    out_path = tmp_path / "f.txt"
    code, _, _ = _run(capsys, "eliminate", "--system", str(data_path("cone_2x2.json")), "--out", str(out_path))
    assert code == 0
    rows = [ln.split() for ln in out_path.read_text().splitlines() if not ln.startswith("#")]
    assert rows == [["2", "0", "3"], ["1", "1", "-2"], ["0", "2", "3"]]
    # the table feeds straight back into sturm
    code, out, _ = _run(capsys, "sturm", str(out_path))
    assert out.strip() == "0"


def test_non_injective_frame_exit_code(capsys, tmp_path):
    frame = tmp_path / "coords.txt"
    frame.write_text("1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")
    code, out, _ = _run(capsys, "certify", "--frame", str(frame))
    assert code == 1
    doc = json.loads(out)
    assert doc["verdict"] == "non-injective"


def test_parse_diagnostics_name_the_line(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 0 0 0\n0 3x 0 0\n")
    code, _, err = _run(capsys, "certify", "--frame", str(bad))
    assert code == 3 and "line 2" in err
    bad_sys = tmp_path / "bad.json"
    bad_sys.write_text(json.dumps({"variables": ["x"], "nonlinear": ["x^^2"], "forms": []}))
    code, _, err = _run(capsys, "certify", "--system", str(bad_sys))
    assert code == 3 and "nonlinear[0]" in err
    table = tmp_path / "table.txt"
    table.write_text("2 0 1\n1 0\n")
    code, _, err = _run(capsys, "sturm", str(table))
    assert code == 3 and "line 2" in err
    broken = tmp_path / "cert.json"
    broken.write_text("{\n  \"f\": \n")
    code, _, err = _run(capsys, "verify", "--system", str(data_path("cone_2x2.json")), "--cert", str(broken))
    assert code == 3 and "line" in err


def test_usage_errors(capsys, tmp_path):
    assert _run(capsys, "frobnicate")[0] == 3
    assert _run(capsys, "certify")[0] == 3
    assert _run(capsys, "sturm")[0] == 3
    assert _run(capsys, "verify", "--system", str(data_path("cone_2x2.json")))[0] == 3
    assert _run(capsys, "certify", "--system", str(data_path("cone_2x2.json")), "--threads", "0")[0] == 3
    assert _run(capsys, "sweep", "--grid", "1,2,3")[0] == 3
    assert _run(capsys, "eliminate", "--system", str(data_path("cone_2x2.json")), "--pair", "x,w")[0] == 3


def test_environment_overrides(capsys, tmp_path, monkeypatch):
    out_path = tmp_path / "env.json"
    monkeypatch.setenv("FRAMECERT_SYSTEM", str(data_path("cone_2x2.json")))
    monkeypatch.setenv("FRAMECERT_OUT", str(out_path))
    code, _, _ = _run(capsys, "certify")
    assert code == 0 and out_path.exists()
    monkeypatch.setenv("FRAMECERT_THREADS", "many")
    assert _run(capsys, "certify")[0] == 3


def test_config_is_logged(caplog):
    with caplog.at_level(logging.INFO, logger="framecert"):
        code = run(["sturm", str(data_path("cone_f_x1.txt"))])
    assert code == 0
    msg = next(r.getMessage() for r in caplog.records if r.getMessage().startswith("config"))
    config = json.loads(msg.split("config ", 1)[1])
    assert config["command"] == "sturm" and config["precision_bits"] == 256


def test_sweep_single_point(capsys, tmp_path):
    csv_path, svg_path = tmp_path / "s.csv", tmp_path / "s.svg"
    code, _, err = _run(capsys, "sweep", "--grid=-6,-4,1/10,0", "--threads", "1",
                        "--out", str(csv_path), "--svg", str(svg_path))
    assert code == 0 and "injective=1" in err
    assert csv_path.read_text().splitlines()[1].startswith("-6,-4,injective,")
    assert svg_path.read_text().startswith("<svg")


@pytest.mark.slow
def test_frame_certify_verify_recover(capsys, tmp_path):
    cert_path = tmp_path / "frame_cert.json"
    frame = str(data_path("eleven_vector_frame.txt"))
    code, _, _ = _run(capsys, "certify", "--frame", frame, "--threads", "1", "--out", str(cert_path))
    assert code == 0
    code, out, _ = _run(capsys, "verify", "--frame", frame, "--cert", str(cert_path))
    assert code == 0
    mats = tmp_path / "mats.json"
    code, _, _ = _run(capsys, "recover", "--frame", frame, "--cert", str(cert_path), "--threads", "1",
                      "--out", str(mats))
    assert code == 0
    doc = json.loads(mats.read_text())
    assert doc["count"] == 20 and all(m["rank"] == 2 for m in doc["matrices"])
    f1 = UnivariatePoly.from_polynomial(InjectivityCertificate.load(cert_path).f, "x34", {"y34": 1})
    assert f1.degree == 20
