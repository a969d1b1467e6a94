import json
import subprocess
import sys

import numpy as np
import pytest

from regrich.cli import main
from regrich.linalg import matrix_to_json
from regrich.scanner import conjugated_diag_system


@pytest.fixture
def files(tmp_path):
    def put(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    om = np.exp(2j * np.pi / 3)
    return {
        "poor": put("poor2x2.json", {"A": matrix_to_json(np.diag([2.0, 1.0])),
                                     "B": [matrix_to_json(np.array([[0.0, -1.0], [0.0, 0.0]]))]}),
        "rich": put("rich.json", {"A": matrix_to_json(np.diag([1.0, 2.0, 3.0])),
                                  "B": [matrix_to_json(np.ones((3, 3)))]}),
        "tor": put("tor.json", matrix_to_json(np.diag([1, om, om * om]))),
        "diag124": put("d124.json", matrix_to_json(np.diag([4.0, 1.0, 2.0]))),
        "ones": put("ones.json", matrix_to_json(np.ones((3, 3)))),
        "space": put("space.json", {"basis": [matrix_to_json(np.eye(2)),
                                              matrix_to_json(np.array([[0.0, 1.0], [0.0, 0.0]]))]}),
        "exact_space": put("xspace.json", {"basis": [
            {"rows": 2, "cols": 2, "entries": [[[1, 1], [0, 1]], [[0, 1], [0, 1]], [[0, 1], [0, 1]], [[1, 1], [0, 1]]]},
            {"rows": 2, "cols": 2, "entries": [[[0, 1], [0, 1]], [[1, 1], [0, 1]], [[1, 1], [0, 1]], [[0, 1], [0, 1]]]},
            {"rows": 2, "cols": 2, "entries": [[[1, 1], [0, 1]], [[0, 1], [0, 1]], [[0, 1], [0, 1]], [[-1, 1], [0, 1]]]}]}),
        "conj2": put("conj2.json", conjugated_diag_system().to_json()),
        "bad": put("bad.json", {"A": {"rows": 2, "cols": 2, "entries": [[1, 0]]}, "B": []}),
        "dir": tmp_path,
    }


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_rich_poor(capsys, files):
    code, out = run(capsys, ["rich", "--datum", files["poor"]])
    assert code == 0
    assert out.splitlines()[0] == "POOR (conspicuous: P=Id, zero at (2,1))"


def test_rich_rich(capsys, files):
    code, out = run(capsys, ["rich", "--datum", files["rich"]])
    assert code == 0 and out.startswith("RICH")


def test_rank(capsys, files):
    assert run(capsys, ["rank", "--datum", files["poor"], "--x0", "1,0"])[1].startswith("rank 0")
    assert run(capsys, ["rank", "--datum", files["poor"], "--x0", "0,1", "--N", "2"])[1].startswith("rank 1")


def test_schubert(capsys):
    assert run(capsys, ["schubert", "cup", "--k", "2", "--n", "4", "--l", "2,0", "--m", "1,1"]) == (0, "ZERO\n")
    assert run(capsys, ["schubert", "jumps", "--k", "5", "--n", "12", "--jumps", "3,6,8,9,11"])[1] == "(5,3,2,2,1)\n"
    assert run(capsys, ["schubert", "minpartner", "--k", "4", "--n", "6", "--l", "2,2"])[1] == "(1,1,1,0) area 3\n"


def test_scan(capsys, files):
    out_json = str(files["dir"] / "scan.json")
    code, out = run(capsys, ["scan", "--system", files["conj2"], "--grid", "101", "--json-out", out_json])
    assert code == 0 and "1 refined root(s)" in out
    rep = json.load(open(out_json))
    assert len(rep["refined_roots"]) == 1 and abs(rep["refined_roots"][0]["u"][0]) <= 1e-8


def test_scan_json_deterministic(capsys, files):
    paths = [str(files["dir"] / f"s{i}.json") for i in range(2)]
    for p in paths:
        run(capsys, ["scan", "--system", files["conj2"], "--grid", "31", "--seed", "5", "--json-out", p])
    assert open(paths[0]).read() == open(paths[1]).read()


def test_rigidity(capsys, files):
    out_json = str(files["dir"] / "rig.json")
    code, out = run(capsys, ["rigidity", "--matrix", files["tor"], "--witness", "--json-out", out_json])
    assert code == 0 and "rigidity bound = 3" in out and "witness of length 3" in out
    assert len(json.load(open(out_json))["witness"]) == 3


def test_classify(capsys, files):
    code, out = run(capsys, ["classify", "--matrix", files["diag124"]])
    assert out == "IConstrained(1) at eigenvalues 1, 2, 4\n"
    code, out = run(capsys, ["classify", "--matrix", files["diag124"], "--with-B", files["ones"]])
    assert "good match: yes" in out


def test_transitive(capsys, files):
    code, out = run(capsys, ["transitive", "--space", files["space"]])
    assert code == 0 and out.startswith("NOT TRANSITIVE")
    code, out = run(capsys, ["transitive", "--space", files["exact_space"], "--exact"])
    assert out.startswith("TRANSITIVE")


def test_input_errors(capsys, files):
    assert main(["rich", "--datum", files["bad"]]) == 2
    assert main(["rich", "--datum", str(files["dir"] / "missing.json")]) == 2
    assert main(["--bogus"]) == 2
    assert main(["rich"]) == 2
    assert main(["transitive", "--space", files["space"], "--exact"]) == 2


def test_strict_inconclusive(capsys, files, monkeypatch):
    from regrich import cli
    from regrich.transitivity import INCONCLUSIVE
    monkeypatch.setitem(cli.COMMANDS, "rich", lambda args, cfg: ("INCONCLUSIVE", {}, INCONCLUSIVE))
    assert main(["rich", "--datum", files["poor"]]) == 0
    assert main(["--strict", "rich", "--datum", files["poor"]]) == 3
    assert main(["rich", "--strict", "--datum", files["poor"]]) == 3


def test_global_flag_positions(capsys, files):
    assert main(["--seed", "4", "--tol", "1e-8", "rich", "--datum", files["poor"]]) == 0
    assert main(["rich", "--seed", "4", "--datum", files["poor"]]) == 0


def test_console_script(files):
    r = subprocess.run([sys.executable, "-m", "regrich", "schubert", "cup", "--k", "5", "--n", "12",
                        "--l", "5,3,2,2,1", "--m", "5,5,4,2,0"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "NONZERO"
