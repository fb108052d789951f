import importlib.util
import io as _io
import subprocess
import sys
from pathlib import Path

import pytest

from anyent.cli import main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

_spec = importlib.util.spec_from_file_location("make_corpus", ROOT / "scripts" / "make_corpus.py")
make_corpus = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(make_corpus)


def run(*argv):
    out, err = _io.StringIO(), _io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name,argv", make_corpus.RUNS, ids=[n for n, _ in make_corpus.RUNS])
def test_golden(name, argv):
    assert make_corpus.run(argv, CORPUS) == (CORPUS / "golden" / f"{name}.txt").read_text()


def test_corpus_documents_are_current():
    for rel, text in make_corpus.documents().items():
        assert (CORPUS / rel).read_text() == text, rel


def test_builtin_model_check():
    code, out, _ = run("model", "check", "fibonacci")
    assert code == 0 and out.endswith("status: ok\n")


def test_corrupt_model_names_failing_axioms():
    code, out, _ = run("model", "check", str(CORPUS / "models/ising_corrupt_F.json"))
    assert code == 1 and "F-unitarity" in out.splitlines()[-1]


def test_malformed_json_is_input_error():
    code, _, err = run("model", "check", str(CORPUS / "models/malformed.json"))
    assert code == 2 and "line" in err and "column" in err


def test_torus_is_unsupported():
    code, _, err = run("basis", "enum", "--system", str(CORPUS / "systems/torus.json"))
    assert code == 3 and err.startswith("error:")


def test_unknown_option_is_input_error(capsys):
    assert run("entropy", "--bogus")[0] == 2


def test_random_verification():
    code, out, _ = run("verify", "--model", "z_2", "--trials", "5", "--seed", "4")
    assert code == 0 and "status: ok" in out


def test_export_then_check(tmp_path):
    code, text, _ = run("model", "export", "z_n", "--parameter", "4")
    assert code == 0
    path = tmp_path / "z4.json"
    path.write_text(text)
    assert run("model", "check", str(path))[0] == 0


def test_csv_output(tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run("entropy", "--system", str(CORPUS / "systems/ising6.json"),
                       "--state", str(CORPUS / "states/ising6_equal_over.json"),
                       "--bipartition", str(CORPUS / "bipartitions/ising6_123.json"), "--csv", str(target))
    assert code == 0 and "S_1 = 1.00000000000e+00" in out
    assert target.read_text().startswith("sector,index,eigenvalue\n")


def test_console_script_is_deterministic():
    argv = [sys.executable, "-m", "anyent.cli", "entropy", "--system", "systems/fib4.json",
            "--state", "states/fib4_random.json", "--bipartition", "bipartitions/fib4_23.json",
            "--renyi", "0.5,2,3"]
    a = subprocess.run(argv, cwd=CORPUS, capture_output=True, check=True)
    b = subprocess.run(argv, cwd=CORPUS, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
