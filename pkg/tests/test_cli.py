import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest

from liecurv import exact, formats
from liecurv.cli import main, random_basis_change
from liecurv.chevalley import chevalley
from liecurv.realforms import su2_cyclic


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def construct(capsys, tmp_path, name, *argv):
    path = tmp_path / f"{name}.json"
    code, _, _ = run(capsys, "construct", *argv, "--output", path)
    assert code == 0
    return path


def test_construct_examples(capsys, tmp_path):
    a2 = construct(capsys, tmp_path, "a2", "--family", "A", "--rank", 2)
    assert formats.load_structure(a2).dim == 8
    su21 = construct(capsys, tmp_path, "su21", "--family", "su", "--p", 2, "--q", 1)
    assert formats.load_structure(su21).dim == 8
    r = construct(capsys, tmp_path, "sl2c", "--family", "A", "--rank", 1, "--realify")
    assert formats.load_structure(r).dim == 6
    j = formats.load_form(tmp_path / "sl2c.J.json")
    assert np.all(exact.matmul(j, j) == -exact.fractions(np.eye(6, dtype=np.int64)))


def test_construct_is_deterministic(capsys):
    argv = ["construct", "--family", "su", "--p", 2, "--sum", "sl-real:2", "--scramble-seed", 4]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert json.loads(a)["dim"] == 6


def test_construct_emit_forms(capsys):
    code, out, _ = run(capsys, "construct", "--family", "A", "--rank", 1, "--emit", "three-form")
    data = json.loads(out)
    assert code == 0 and data["degree"] == 3 and data["entries"] == [[0, 1, 2, "8/1"]]
    code, out, _ = run(capsys, "construct", "--family", "A", "--rank", 1, "--emit", "killing")
    assert json.loads(out)["symmetric"] is True


@pytest.mark.parametrize("argv", [
    ["construct", "--family", "Z", "--rank", 2],
    ["construct", "--family", "A", "--rank", 0],
    ["construct", "--family", "su"],
    ["construct", "--family", "A", "--rank", 1, "--sum", "A:1@X"],
    ["construct"],
])
def test_construct_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_spectrum_command(capsys, tmp_path):
    su3 = construct(capsys, tmp_path, "su3", "--family", "su", "--p", 3)
    code, out, _ = run(capsys, "spectrum", "--input", su3, "--mode", "exact")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "spectrum", "--input", su3, "--format", "json")
    assert code == 0 and all(r["status"] == "pass" for r in json.loads(out)["rows"])
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps([{"eigenvalue": "2", "multiplicity": 1}, {"eigenvalue": "1", "multiplicity": 7},
                                 {"eigenvalue": "-2/3", "multiplicity": 28}]))
    code, out, _ = run(capsys, "spectrum", "--input", su3, "--expect", wrong, "--format", "csv")
    assert code == 4 and "fail" in out


def test_spectrum_cap_exceeded(capsys, tmp_path, monkeypatch):
    g2 = construct(capsys, tmp_path, "g2", "--family", "G", "--rank", 2)
    monkeypatch.setenv("LIE_CURV_CAPS", "exact_dim=10")
    code, _, err = run(capsys, "spectrum", "--input", g2)
    assert code == 3 and "matrix-free" in err


def test_spectrum_e6_matrix_free(capsys, tmp_path):
    e6 = construct(capsys, tmp_path, "e6", "--family", "E", "--rank", 6)
    assert run(capsys, "spectrum", "--input", e6, "--mode", "matrix-free")[0] == 0


def test_verify_su2_all_exact_zero(capsys, tmp_path):
    path = tmp_path / "su2.json"
    formats.write(path, formats.structure_to_json(su2_cyclic()))
    code, out, _ = run(capsys, "verify", "--input", path, "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert [r["residual"] for r in rep["results"]] == ["exact-zero"] * 6


def test_verify_f4_float(capsys, tmp_path):
    path = tmp_path / "f4.json"
    formats.write(path, formats.structure_to_json(chevalley("F", 4).as_float()))
    code, out, _ = run(capsys, "verify", "--input", path, "--checks", "theorem-a", "--samples", 10,
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["results"][0]["residual"] <= 1e-9


def test_verify_corrupted_and_unknown(capsys, tmp_path):
    data = formats.structure_to_json(chevalley("A", 2))
    data["entries"][0][3] = "5/1"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--input", path, "--checks", "jacobi")
    assert code == 4 and "fail" in out
    assert run(capsys, "verify", "--input", path, "--checks", "bogus")[0] == 2
    assert run(capsys, "verify", "--input", tmp_path / "missing.json")[0] == 2


@pytest.mark.parametrize("argv, text", [
    (["--family", "su", "--p", 3], "dim 1, spanned by Killing form"),
    (["--family", "A", "--rank", 2, "--realify"], "dim 2, pencil Re/Im"),
    (["--family", "A", "--rank", 1, "--realify"], "dim 12, dim-6 special case"),
])
def test_ker_lambda_classify(capsys, tmp_path, argv, text):
    path = construct(capsys, tmp_path, "alg", *argv)
    code, out, _ = run(capsys, "ker-lambda", "--input", path, "--classify")
    assert code == 0 and text in out


def test_decompose_scrambled(capsys, tmp_path):
    path = construct(capsys, tmp_path, "c3", "--family", "su", "--p", 2, "--sum", "sl-real:2",
                     "--scramble-seed", 7, "--emit", "three-form")
    code, out, _ = run(capsys, "decompose", "--three-form", path, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["dims"] == [3, 3] and rep["certified"]


def test_decompose_with_killing(capsys, tmp_path):
    c3 = construct(capsys, tmp_path, "c3", "--family", "su", "--p", 3, "--emit", "three-form")
    beta = construct(capsys, tmp_path, "beta", "--family", "su", "--p", 3, "--emit", "killing")
    sc = construct(capsys, tmp_path, "sc", "--family", "su", "--p", 3)
    code, out, _ = run(capsys, "decompose", "--three-form", c3, "--killing", beta, "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["killing_matches"] and rep["bracket_jacobi_clean"]
    got = formats.structure_from_json(rep["bracket"])
    assert np.all(got.dense() == formats.load_structure(sc).dense())


def test_decompose_random_form_rejected(capsys, tmp_path):
    rng = random.Random(2)
    d = 10
    entries = [[i, j, k, f"{rng.randint(-3, 3)}/1"] for i, j, k in itertools.combinations(range(d), 3)]
    data = {"name": "random", "dim": d, "scalar": "rational", "kind": "form", "degree": 3,
            "entries": [e for e in entries if e[3] != "0/1"], "metadata": {}}
    path = tmp_path / "rand.json"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "decompose", "--three-form", path)
    assert code == 4 and "not a semisimple Cartan three-form" in err


def test_decompose_usage(capsys, tmp_path):
    beta = construct(capsys, tmp_path, "beta", "--family", "A", "--rank", 1, "--emit", "killing")
    assert run(capsys, "decompose", "--three-form", beta)[0] == 2


def test_random_basis_change_seeded():
    a = random_basis_change(5, 3)
    assert np.all(a == random_basis_change(5, 3))
    assert exact.det(a) != 0
    assert all(Fraction(x).denominator in (1, 2) for x in a.ravel())
