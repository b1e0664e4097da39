import json
import subprocess
import sys

import pytest

from okounkov.cli import main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_body_segments(capsys):
    code, out, _ = run(capsys, "body", "--input", "cusp")
    assert code == 0 and json.loads(out)["segment"] == "[0/1, 3/1]"
    code, out, _ = run(capsys, "body", "--input", "veronese")
    assert json.loads(out)["segment"] == "[0/1, 2/1]"


def test_body_lattice_points_at_scale(capsys):
    code, out, _ = run(capsys, "body", "--input", "segre", "--d", "2")
    rep = json.loads(out)
    assert len(rep["lattice_points"]["points"]) == 9 and rep["lattice_points"]["interior"] == [[1, 1]]


def test_semigroup_writes_levels(capsys, tmp_path):
    code, out, _ = run(capsys, "semigroup", "--input", "cusp", "--dmax", "3", "--out", str(tmp_path))
    assert code == 0
    csv = (tmp_path / "levels.csv").read_text()
    assert csv.startswith("d,v1\n1,0\n1,2\n1,3\n2,0\n")
    assert json.loads((tmp_path / "report.json").read_text()) == json.loads(out)


def test_khovanskii_exit_codes(capsys):
    assert run(capsys, "khovanskii", "--input", "cusp")[0] == 0
    code, out, err = run(capsys, "khovanskii", "--input", "cusp_missing")
    assert code == 3 and json.loads(out)["missing"] == [[3]]


def test_degenerate(capsys):
    code, out, _ = run(capsys, "degenerate", "--input", "cusp")
    rep = json.loads(out)
    assert code == 0 and rep["W0"] == [[0], [2], [3]]
    assert {k: v["status"] for k, v in rep["hypotheses"].items()} == {
        "e": "pass", "f": "assumed", "g": "pass", "h": "pass"}


def test_degenerate_names_missing_value(capsys):
    code, _, err = run(capsys, "degenerate", "--input", "cusp_missing")
    assert code == 3 and "(3,)" in err


def test_verify_even_fails_g(capsys):
    code, out, _ = run(capsys, "verify", "--input", "even")
    assert code == 0 and json.loads(out)["hypotheses"]["g"]["status"] == "fail"


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.problem"
    bad.write_text("n = 1\ngenerators = 1, u1^^2\n")
    code, _, err = run(capsys, "body", "--input", str(bad))
    assert code == 2 and "line 2, column 20" in err


def test_missing_file_and_bad_flags(capsys, tmp_path):
    assert run(capsys, "body", "--input", str(tmp_path / "nope.problem"))[0] == 2
    assert run(capsys, "body", "--input", "cusp", "--threads", "0")[0] == 2


def test_quantize_needs_config(capsys):
    assert run(capsys, "quantize", "--input", "even")[0] == 2


def test_quantize_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "quantize", "--input", "veronese", "--resolution", "50",
                       "--out", str(tmp_path))
    rep = json.loads(out)
    assert code == 0 and all(rep["monotone_mass"].values())
    assert rep["s0"][0]["found"]
    assert (tmp_path / "trace.csv").read_text().startswith("s,t_of_s,m1,location,")


def test_quantize_segre_note(capsys):
    code, out, _ = run(capsys, "quantize", "--input", "segre", "--resolution", "10")
    assert any("no interior Bohr-Sommerfeld points" in n for n in json.loads(out)["notes"])


def test_quantize_reports_unreachable_epsilon(capsys, tmp_path):
    prob = tmp_path / "tight.problem"
    prob.write_text("n = 1\ngenerators = 1, u1^2, u1^3\n[quantize]\nsweep = 1, 2, 3\n"
                    "epsilon = 1/1000, 1e-300\ncap = 8\nresolution = 40\n")
    code, out, _ = run(capsys, "quantize", "--input", str(prob))
    s0 = json.loads(out)["s0"]
    assert code == 0 and [r["found"] for r in s0] == [False, False]
    assert s0[1]["s0"] is None


@pytest.mark.parametrize("command", ["degenerate", "quantize"])
def test_output_identical_across_threads(command, tmp_path):
    outs = []
    for t in (1, 2, 8):
        d = tmp_path / f"t{t}"
        r = subprocess.run([sys.executable, "-m", "okounkov.cli", command, "--input", "veronese",
                            "--threads", str(t), "--resolution", "50", "--out", str(d)],
                           capture_output=True, check=True)
        files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
        outs.append((r.stdout, files))
    assert outs[0] == outs[1] == outs[2]
