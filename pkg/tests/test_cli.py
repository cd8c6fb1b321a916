from __future__ import annotations

import subprocess
import sys

import pytest

from aalkit.cli import run
from aalkit.finalg import format_algebra
from aalkit.gallery import z3_algebra


@pytest.fixture
def z3(tmp_path):
    path = tmp_path / "z3.alg"
    path.write_text(format_algebra(z3_algebra()))
    return str(path)


def lines(text):
    return text.splitlines()


def test_leibniz_on_z3(z3):
    status, out = run(["leibniz", "--algebra", z3, "--filter", "1,2"])
    assert status == 0
    assert lines(out)[:3] == ["RESULT: PASS", "classes 0 | 1 | 2", "reduced yes"]


def test_leibniz_not_reduced(z3):
    status, out = run(["leibniz", "--algebra", z3, "--filter", "0,1,2", "--brute"])
    assert status == 1 and out.startswith("RESULT: FAIL")


def test_model_check(z3):
    status, out = run(["model-check", "--algebra", z3, "--filter", "1,2", "--calculus", "semilattice"])
    assert status == 0
    status, _ = run(["model-check", "--algebra", z3, "--filter", "1", "--calculus", "semilattice"])
    assert status == 1


def test_matrix_file(tmp_path, z3):
    (tmp_path / "m").write_text("algebra z3.alg\nfilter 1 2\n")
    assert run(["leibniz", "--matrix", str(tmp_path / "m")])[0] == 0


def test_normalize():
    status, out = run(["normalize", "(+ x (- x))"])
    assert (status, lines(out)) == (0, ["RESULT: PASS", "0"])
    assert run(["normalize", "(+ x 1)", "(+ 1 x)"])[0] == 0
    assert run(["normalize", "x", "(+ x 1)"])[0] == 1


def test_witness_emits_derivations(tmp_path):
    out_dir = tmp_path / "w"
    status, out = run(["witness", "--p", "(+ z (- (+ 1 1)))", "--solution", "2", "--out", str(out_dir)])
    assert status == 0, out
    assert out.startswith("RESULT: PASS")
    names = {p.name for p in out_dir.iterdir()}
    assert {"calculus", "theorem.proof", "G.1.proof", "Rep_plus.1.proof", "Rep_times.1.proof"} <= names
    # the emitted files replay through the checker
    status, out = run(["check-proof", str(out_dir / "theorem.proof"), "--calculus", str(out_dir / "calculus"), "--sig", "lp"])
    assert status == 0, out


def test_witness_wrong_solution():
    assert run(["witness", "--p", "(+ z (- (+ 1 1)))", "--solution", "3"])[0] == 1


def test_witness_lab():
    status, out = run(["witness", "--alpha", "(conv (conv x))", "--beta", "x"])
    assert status == 0, out


def test_countermodel():
    assert run(["countermodel", "--p", "(+ (* (+ 1 1) z) 1)", "--modulus", "4"])[0] == 0
    assert run(["countermodel", "--p", "(+ (* (+ 1 1) z) 1)", "--modulus", "3"])[0] == 1


def test_frege_model():
    status, out = run(["frege-model"])
    assert status == 0 and "PASS MP" in out


def test_prove_and_check(tmp_path):
    calc = tmp_path / "c"
    calc.write_text("mp : x ; (<-> x y) |- y\nr : |- (<-> x x)\n")
    proof = tmp_path / "p"
    status, out = run(["prove", "y", "--calculus", str(calc), "--sig", "lp", "--premise", "y", "--depth", "1", "--out", str(proof)])
    assert status == 0, out
    assert run(["check-proof", str(proof), "--calculus", str(calc), "--sig", "lp"])[0] == 0
    assert run(["prove", "x", "--calculus", str(calc), "--sig", "lp", "--depth", "3"])[0] == 1


def test_cr_chain_round_trip(tmp_path):
    path = tmp_path / "ch"
    assert run(["cr-chain", "(* (+ 1 1) 0)", "0", "--out", str(path)])[0] == 0
    status, out = run(["check-chain", str(path)])
    assert status == 0 and "endpoints normalize to 0 and 0" in out
    assert run(["cr-chain", "1", "0"])[0] == 1


def test_builders(tmp_path):
    status, out = run(["build-lp", "--p", "(+ z 1)"])
    assert status == 0 and "MP' :" in out
    status, out = run(["build-lab", "--alpha", "x", "--beta", "x", "--out", str(tmp_path / "lab")])
    assert status == 0 and "48 rules" in out


def test_filters_and_suszko(z3):
    status, out = run(["filters", "--algebra", z3, "--calculus", "semilattice"])
    assert status == 0 and lines(out)[1:] == ["4 filters", "{}", "{0}", "{1,2}", "{0,1,2}"]
    assert run(["suszko", "--algebra", z3, "--filter", "1,2", "--calculus", "semilattice"])[0] == 0


def test_parse_and_eval(z3):
    status, out = run(["parse", "(* (+ x 1) (- y))"])
    assert lines(out) == ["RESULT: PASS", "(* (+ x 1) (- y))", "size 6", "depth 2", "variables x y"]
    status, out = run(["eval", "(and x y)", "--algebra", z3, "--env", "x=1,y=2"])
    assert lines(out) == ["RESULT: PASS", "0"]


def test_errors_exit_2(tmp_path):
    assert run(["parse", "(+ x"])[0] == 2
    assert run(["no-such-command"])[0] == 2
    assert run(["leibniz", "--algebra", "missing.alg", "--filter", "0"])[0] == 2
    big = tmp_path / "big.alg"
    big.write_text("carrier 9\n")
    status, out = run(["filters", "--algebra", str(big), "--calculus", "semilattice"])
    assert status == 2 and out.startswith("RESULT: ERROR")


def test_gallery_command(tmp_path):
    status, out = run(["gallery", "semilattice", "--out", str(tmp_path)])
    assert status == 0
    assert (tmp_path / "semilattice" / "manifest").exists()


def test_output_is_deterministic():
    a = run(["gallery", "ring-oracle", "--seed", "5"])
    b = run(["gallery", "ring-oracle", "--seed", "5"])
    assert a == b and a[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aalkit", "normalize", "(* x 0)"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "RESULT: PASS\n0\n"
