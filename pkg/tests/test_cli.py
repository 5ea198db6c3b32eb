import json
import subprocess
import sys

import pytest

from ssmlang.cli import main
from ssmlang.ssm import load_model, run_model


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_star_free(capsys):
    code, out, _ = run(capsys, "classify", "--lang", "tomita4")
    assert code == 0 and out.startswith("STAR-FREE (minimal DFA states:")


def test_classify_non_star_free(capsys):
    code, out, _ = run(capsys, "classify", "--lang", "parity")
    assert code == 1 and out.startswith("NON-STAR-FREE")


def test_classify_dfa_file(capsys, tmp_path):
    path = tmp_path / "m.dfa"
    path.write_text("a b\n0 a -> 1\n0 b -> 0\n1 a -> 1\n1 b -> 1\nstart: 0\naccept: 1\n")
    code, out, _ = run(capsys, "classify", "--dfa", str(path))
    assert code == 0 and "states: 2" in out


def test_classify_counter_language_refused(capsys):
    code, _, err = run(capsys, "classify", "--lang", "dyck1")
    assert code == 2 and "not a regular language" in err


def test_compile_refusal(capsys, tmp_path):
    code, _, err = run(capsys, "compile", "--lang", "parity", "--out", str(tmp_path / "p.json"))
    assert code == 2 and "refused" in err
    assert not (tmp_path / "p.json").exists()


def test_compile_and_verify(capsys, tmp_path):
    model = tmp_path / "t4.json"
    code, _, err = run(capsys, "compile", "--lang", "tomita4", "--out", str(model))
    assert code == 0 and "compiled" in err
    assert run_model(load_model(model), "0001")[-1] is not None
    code, out, _ = run(capsys, "verify", str(model), "--lang", "tomita4", "--exhaustive", "8",
                       "--random", "50", "--max-len", "40")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "spec,strategy,checked,mismatches,pass"
    assert len(lines) == 3 and all(line.endswith(",0,true") for line in lines[1:])


def test_verify_failure_exit_code(capsys, tmp_path):
    model = tmp_path / "t4.json"
    run(capsys, "compile", "--lang", "tomita4", "--out", str(model))
    code, out, err = run(capsys, "verify", str(model), "--lang", "tomita1", "--exhaustive", "6")
    assert code == 1 and out.strip().endswith("false") and "mismatch" in err


def test_verify_json_report(capsys, tmp_path):
    model = tmp_path / "ff.json"
    report = tmp_path / "r.json"
    run(capsys, "compile", "--lang", "flipflop", "--out", str(model))
    code, _, _ = run(capsys, "verify", str(model), "--lang", "flipflop", "--random", "20",
                     "--max-len", "60", "--format", "json", "--out", str(report))
    assert code == 0 and json.loads(report.read_text())[0]["pass"] is True


def test_rotation_compile(capsys, tmp_path):
    model = tmp_path / "mod.json"
    code, _, _ = run(capsys, "compile", "--lang", "parity", "--gates", "rotation", "--out", str(model))
    assert code == 0
    code, out, _ = run(capsys, "verify", str(model), "--lang", "parity", "--exhaustive", "10")
    assert code == 0


def test_gen_is_deterministic(capsys):
    _, first, _ = run(capsys, "gen", "--lang", "dyck1", "--random", "5", "--bin", "1", "--seed", "4")
    _, second, _ = run(capsys, "gen", "--lang", "dyck1", "--random", "5", "--bin", "1", "--seed", "4")
    assert first == second and len(first.splitlines()) == 5


def test_trace_output(capsys, tmp_path):
    model = tmp_path / "ff.json"
    run(capsys, "compile", "--lang", "flipflop", "--out", str(model))
    code, out, _ = run(capsys, "trace", str(model), "w1r")
    assert code == 0
    assert out.splitlines()[0] == "t=1 symbol=w"
    assert sum(line.startswith("t=") for line in out.splitlines()) == 3


def test_demo_parity(capsys, tmp_path):
    model = tmp_path / "ff.json"
    run(capsys, "compile", "--lang", "flipflop", "--out", str(model))
    code, out, _ = run(capsys, "demo-parity", str(model), "--N", "500")
    assert code == 0 and "stationarityStep=1" in out
    signed = tmp_path / "s.json"
    run(capsys, "compile", "--lang", "parity", "--gates", "signed", "--out", str(signed))
    code, _, err = run(capsys, "demo-parity", str(signed))
    assert code == 2 and "NONNEGATIVE" in err


def test_missing_file_is_an_error(capsys, tmp_path):
    code, _, err = run(capsys, "verify", str(tmp_path / "nope.json"), "--lang", "tomita1")
    assert code == 3 and err.startswith("error:")


def test_bad_subcommand_usage():
    with pytest.raises(SystemExit):
        main(["bogus"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ssmlang", "classify", "--lang", "tomita1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("STAR-FREE")
