import json
import subprocess
import sys

import jsonschema
import pytest

from permchain.cli import SCHEMA_FOR, load_schema, main

K3 = ["--k", "3", "--tau", "2 1", "--alpha", "1 2 3 4"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    name = SCHEMA_FOR.get(tuple(argv[:2]))
    if name:
        jsonschema.validate(data, load_schema(name))
    return code, data


def test_osc_sigma(capsys):
    assert run(capsys, "osc", "sigma", "4")[:2] == (0, "3 1 4 2\n")


def test_gf_expand(capsys):
    code, out, _ = run(capsys, "gf", "expand", "--num", "0,0,0,0,0,0,1", "--den", "1,-1", "--terms", "10")
    assert code == 0 and out == "0,0,0,0,0,1,1,1,1,1\n"
    code, data = run_json(capsys, "gf", "expand", "--num", "0,0,0,0,0,0,1", "--den", "1,-1", "--terms", "10")
    assert data["coeffs"] == [0, 0, 0, 0, 0, 1, 1, 1, 1, 1]


def test_perm_commands(capsys):
    code, out, _ = run(capsys, "perm", "contains", "3 9 1 8 6 7 4 5 2", "5 1 3 4 2")
    assert code == 0 and out.strip() == "2 3 5 6 7"
    assert run(capsys, "perm", "contains", "1 2 3", "2 1")[1] == "absent\n"
    assert run(capsys, "perm", "inflate", "2 1", "1 2", "1")[1] == "2 3 1\n"
    assert run(capsys, "perm", "patterns", "1 3 2", "--length", "2")[1] == "1 2\n2 1\n"
    assert "1 -- 2;" in run(capsys, "perm", "graph", "3 1 4 2", "--dot")[1]
    assert run(capsys, "perm", "decompose", "3 6 5 1 2 4")[1].startswith("2 4 1 3\n")


def test_osc_commands(capsys):
    assert run(capsys, "osc", "family", "4")[1] == "2 4 1 3\n3 1 4 2\n"
    out = run(capsys, "osc", "classify", "3 1 4 2")[1]
    assert len(out.splitlines()) == 4 and "other" not in out


def test_antichain_commands(capsys):
    code, data = run_json(capsys, "antichain", "elements", *K3, "--max-len", "14")
    assert code == 0 and len(data["elements"]) == 5
    code, data = run_json(capsys, "antichain", "verify", "--split-end-paths", "--max-len", "12")
    assert code == 0 and data["passed"] and data["elements"] == 7
    assert run(capsys, "antichain", "spec-check", *K3)[0] == 0
    assert run(capsys, "antichain", "spec-check", "--k", "3", "--tau", "2 1", "--alpha", "4 3 2 1")[0] == 1


def test_gf_commands(capsys):
    code, data = run_json(capsys, "gf", "antichain", *K3)
    assert data["den"] == ["1", "0", "-1", "-1"]
    code, data = run_json(capsys, "gf", "closure-paper", *K3)
    assert code == 0 and data["a"] == ["0", "1", "2", "1"]
    code, data = run_json(capsys, "gf", "growth", "--num", "1", "--den", "1,-1,-1")
    assert data["rate"] == pytest.approx(1.6180339887, abs=1e-9) and data["unique_dominant"]
    code, data = run_json(capsys, "gf", "fit", "--series", "1,1,2,3,5,8,13,21,34,55,89,144")
    assert code == 0 and data["fit"]["den"] == ["1", "-1", "-1"]
    assert run(capsys, "gf", "fit", "--series", "1,2,5,14,42,132,429,1430,4862,16796,58786,208012",
               "--max-den-degree", "2")[0] == 1


def test_gf_fit_from_file(capsys, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"n_min": 1, "coeffs": [1, 2, 4, 8, 16, 32, 64, 128, 256, 512]}))
    code, out, _ = run(capsys, "gf", "fit", "--file", str(path), "--max-den-degree", "1")
    assert code == 0 and out.strip() == "x/(1 - 2*x)"


def test_closure_commands(capsys, tmp_path):
    code, data = run_json(capsys, "closure", "counts", *K3, "--max-len", "6", "--cache-dir", str(tmp_path))
    assert code == 0 and data["counts"] == [1, 2, 6, 23, 85, 293] and data["stable"]
    assert any(tmp_path.iterdir())
    code, data = run_json(capsys, "closure", "grammar", *K3, "--max-len", "6", "--soundness")
    assert code == 0 and data["distinct"] == [1, 2, 6, 23, 85, 293]
    assert data["soundness"]["failures"] == []
    code, data = run_json(capsys, "closure", "reconcile", *K3, "--max-len", "6")
    assert code == 0 and data["tables_equal"]


def test_unstable_closure_exits_1(capsys):
    code, data = run_json(capsys, "closure", "counts", "--k", "4", "--tau", "1 3 2",
                          "--alpha", "1 2 3 4 5", "--max-len", "8")
    assert code == 1 and data["stable"] is False


def test_class_and_superclass(capsys, tmp_path):
    basis = tmp_path / "basis.txt"
    basis.write_text("1 2 3\n")
    assert run(capsys, "class", "counts", "--basis", str(basis), "--max-len", "6")[1] == "1,2,5,14,42,132\n"
    basis.write_text("1 2\n")
    code, data = run_json(capsys, "superclass", "build", "--basis", str(basis), *K3, "--max-len", "12")
    assert code == 0 and data["N"] == 12 and data["downward_closed"]
    code, data = run_json(capsys, "superclass", "build", "--basis", str(basis), *K3, "--max-len", "12",
                          "--paper-literal-xn")
    assert code == 0 and data["mode"] == "literal"
    code, data = run_json(capsys, "superclass", "build", "--basis", str(basis), *K3, "--max-len", "9")
    assert code == 1 and data["N"] is None


def test_verify_subset(capsys):
    code, data = run_json(capsys, "verify", "all", "--only", "1,6")
    assert code == 0 and data["passed"] and [r["criterion"] for r in data["results"]] == [1, 6]
    code, out, _ = run(capsys, "verify", "all", "--only", "1")
    assert out.splitlines()[0].startswith("[PASS]  1.")


def test_output_file_and_determinism(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        assert main(["gf", "closure-paper", *K3, "--format", "json", "--output", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and capsys.readouterr().out == ""


def test_exit_codes(capsys):
    assert run(capsys, "osc", "sigma", "2")[0] == 2
    assert run(capsys, "perm", "contains", "1 1", "1")[0] == 2
    assert run(capsys, "perm", "patterns", " ".join(map(str, range(1, 40))))[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["osc", "sigma", "4", "--no-such-flag"])
    assert exc.value.code == 2


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "permchain.cli", "osc", "sigma", "6"],
                         capture_output=True, text=True, check=True)
    assert out.stdout == "3 1 5 2 6 4\n"


def test_schemas_are_valid():
    for name in set(SCHEMA_FOR.values()):
        jsonschema.Draft202012Validator.check_schema(load_schema(name))
