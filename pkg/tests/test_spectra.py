import json
from fractions import Fraction as F

import numpy as np
import pytest

from liecurv import exact
from liecurv.caps import CapExceeded
from liecurv.chevalley import chevalley
from liecurv.curvops import sym_dim, sym_to_vector
from liecurv.liecore import killing_form
from liecurv.realforms import direct_sum, realify, sl_real, su2_cyclic, su_pq
from liecurv.spectra import (
    SpectrumTable,
    computed_spectrum,
    direct_sum_spectrum,
    eigenspace,
    eigenvalue_one_observed,
    has_eigenvalue_one,
    inclusion_chain,
    ker_lambda,
    meyberg_table,
    omega_nullity,
    real_form_spectrum,
    table_for_type,
    table_from_metadata,
    verify_spectrum,
)

from conftest import build


def table(d):
    return {F(k): v for k, v in d.items()}


@pytest.mark.parametrize("args, want", [
    (("sl", 4), {2: 1, 1: 15, F(1, 2): 20, F(-1, 2): 84}),
    (("sl", 2), {2: 1, -1: 5}),
    (("sl", 3), {2: 1, 1: 8, F(-2, 3): 27}),
    (("exceptional", "g2"), {2: 1, F(5, 6): 27, F(-1, 2): 77}),
    (("so", 7), {2: 1, F(3, 5): 27, F(4, 5): 35, F(-2, 5): 168}),
    (("so", 8), {2: 1, F(2, 3): 105, F(-1, 3): 300}),
    (("exceptional", "e6"), {2: 1, F(1, 2): 650, F(-1, 6): 2430}),
])
def test_meyberg_examples(args, want):
    assert meyberg_table(*args).as_dict() == table(want)


@pytest.mark.parametrize("family, params", [
    ("sl", range(2, 12)), ("sp", range(4, 20, 2)), ("so", [7] + list(range(8, 20))),
])
def test_tables_fill_symmetric_square_and_trace(family, params):
    for n in params:
        t = meyberg_table(family, n)
        d = {"sl": n * n - 1, "sp": n * (n + 1) // 2, "so": n * (n - 1) // 2}[family]
        assert t.space_dim == sym_dim(d)
        assert t.multiplicity(2) == 1


@pytest.mark.parametrize("name", ["sl2", "sl3", "g2", "so8", "f4", "e6", "e7", "e8"])
def test_exceptional_tables(name):
    t = meyberg_table("exceptional", name)
    assert t.multiplicity(2) == 1
    assert all(m > 0 for _, m in t.rows)


@pytest.mark.parametrize("args", [("sl", 1), ("sp", 5), ("so", 6), ("exceptional", "so9"), ("xx", 3)])
def test_meyberg_rejects(args):
    with pytest.raises(ValueError):
        meyberg_table(*args)


def test_spectrum_table_validation():
    with pytest.raises(ValueError):
        SpectrumTable(3, ((F(2), 1), (F(2), 2)))
    with pytest.raises(ValueError):
        SpectrumTable(4, ((F(2), 1),))
    t = SpectrumTable.build([(2, 1), (1, 0), (2, 1)])
    assert t.as_dict() == {F(2): 2}
    assert SpectrumTable.from_json(json.loads(json.dumps(t.to_json()))) == t


def test_real_form_cases():
    base = meyberg_table("sl", 3)
    assert real_form_spectrum(base, "a") == base
    assert real_form_spectrum(base, "b").as_dict() == table({2: 2, 1: 16, F(-2, 3): 54, 0: 64})
    assert real_form_spectrum(meyberg_table("sl", 2), "b").as_dict() == table({2: 2, -1: 10, 0: 9})
    with pytest.raises(ValueError):
        real_form_spectrum(base, "c")


def test_direct_sum_spectrum():
    t = direct_sum_spectrum([meyberg_table("sl", 2), meyberg_table("sl", 3)])
    assert t.as_dict() == table({2: 2, 1: 8, F(-2, 3): 27, -1: 5, 0: 24})


@pytest.mark.parametrize("label", ["su2", "sl2R", "su3", "su21", "sl3R", "sl4", "slH2", "sp4", "so7", "sp6",
                                   "g2", "sl2C_R", "sl3C_R", "su2+su3", "su2+sl2R"])
def test_exact_spectrum_matches_metadata_table(label):
    sc = build(label)
    rep = verify_spectrum(sc, table_from_metadata(sc.metadata), "exact")
    assert rep.passed, rep.to_json()


@pytest.mark.parametrize("label", ["su2", "su21", "sp4", "g2", "sl2C_R"])
def test_computed_spectrum_equals_table(label):
    # independent route: float eigenvalues rationalized then certified by exact nullity
    sc = build(label)
    assert computed_spectrum(sc) == table_from_metadata(sc.metadata)


def test_a2_trace():
    rep = verify_spectrum(chevalley("A", 2), meyberg_table("sl", 3), "float")
    assert rep.passed
    assert rep.checks["trace"]["value"] == -8


def test_d4_float_and_matrix_free():
    sc = chevalley("D", 4)
    t = table_for_type("D", 4)
    assert verify_spectrum(sc, t, "float").passed
    assert verify_spectrum(sc, t, "matrix-free").passed


@pytest.mark.slow
def test_e6_matrix_free():
    sc = chevalley("E", 6)
    rep = verify_spectrum(sc, meyberg_table("exceptional", "e6"), "matrix-free")
    assert rep.passed, rep.to_json()


def test_wrong_table_fails():
    sc = su_pq(2, 1)
    wrong = SpectrumTable.build([(2, 1), (1, 7), (F(-2, 3), 28)])
    assert not verify_spectrum(sc, wrong, "exact").passed
    assert not verify_spectrum(sc, wrong, "float").passed


def test_verify_rejections(monkeypatch):
    with pytest.raises(ValueError):
        verify_spectrum(su2_cyclic(), meyberg_table("sl", 3), "exact")
    with pytest.raises(ValueError):
        verify_spectrum(su2_cyclic(), meyberg_table("sl", 2), "nonsense")
    monkeypatch.setenv("LIE_CURV_CAPS", "exact_dim=5")
    with pytest.raises(CapExceeded):
        verify_spectrum(su_pq(3, 0), meyberg_table("sl", 3), "exact")


@pytest.mark.parametrize("label, expected", [
    ("su21", True), ("so7", False), ("su2", False), ("sl3R", True), ("slH2", True),
    ("sp4", False), ("g2", False), ("sl3C_R", True), ("sl2C_R", False), ("su2+su3", True),
])
def test_eigenvalue_one(label, expected):
    sc = build(label)
    assert has_eigenvalue_one(sc.metadata) is expected
    assert eigenvalue_one_observed(sc) is expected


def test_table_for_type_routing():
    assert table_for_type("B", 2) == meyberg_table("sp", 4)
    assert table_for_type("D", 4) == meyberg_table("exceptional", "so8")
    with pytest.raises(ValueError):
        table_for_type("E", 5)


def same_span(forms, vecs):
    rows = np.array([sym_to_vector(f) for f in forms], dtype=object)
    vecs = np.array([sym_to_vector(v) for v in vecs], dtype=object)
    return exact.same_span(rows, vecs)


def test_ker_lambda_su3():
    sc = build("su3")
    k = ker_lambda(sc)
    assert k.dim == 1 and k.classification == "killing"
    assert same_span(k.basis, [killing_form(sc)])


def test_ker_lambda_dim6_and_dim3():
    assert ker_lambda(build("sl2C_R")).dim == 12
    assert ker_lambda(build("sl2C_R")).classification == "dim-6"
    assert ker_lambda(su2_cyclic()).dim == 6


def test_ker_lambda_realified_sl3_is_pencil():
    sc, js = realify(chevalley("A", 2))
    k = ker_lambda(sc)
    assert k.dim == 2 and k.classification == "pencil"
    b = killing_form(sc)
    # beta = 2 Re beta^h and beta(Jx, y) = -2 Im beta^h(x, y)
    jb = exact.matmul(exact.fractions(np.asarray(js.J, dtype=object)).T, b)
    assert same_span(k.basis, [b, jb])
    assert same_span(eigenspace(sc, 2), [b, jb])


def test_ker_lambda_direct_sum():
    assert ker_lambda(build("su2+su3")).dim == 7
    assert ker_lambda(build("su2+su3")).classification == "other"


def test_eigenspaces():
    sc = build("su3")
    e2 = eigenspace(sc, 2)
    assert len(e2) == 1 and same_span(e2, [killing_form(sc)])
    assert eigenspace(su2_cyclic(), 0) == []
    assert omega_nullity(su2_cyclic(), -1) == 5


@pytest.mark.parametrize("label", ["su3", "sl2C_R", "su2+su3", "g2"])
def test_inclusion_chain(label):
    r = inclusion_chain(build(label))
    assert r["eig2_in_ker_lambda"] == 0
    assert r["ker_lambda_in_eig2_plus_eigm1"] == 0
    assert r["eig2_dim"] <= r["ker_lambda_dim"]


def test_report_json():
    rep = verify_spectrum(su2_cyclic(), meyberg_table("sl", 2), "exact")
    data = json.loads(json.dumps(rep.to_json()))
    assert data["passed"] and data["rows"][0]["eigenvalue"] == "2/1"
