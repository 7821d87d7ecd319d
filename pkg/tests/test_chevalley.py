from fractions import Fraction

import numpy as np
import pytest

from liecurv.chevalley import chevalley, chevalley_basis, verify_chevalley
from liecurv.liecore import killing_form
from liecurv.rootsystems import cartan_matrix, root_system
from liecurv.structure import StructureConstants

ALL_TYPES = [("A", n) for n in range(1, 7)] + [("B", n) for n in range(2, 5)] + [("C", n) for n in range(3, 5)] \
    + [("D", n) for n in range(4, 6)] + [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]

# dual Coxeter numbers of the simply laced types
DUAL_COXETER = {("A", n): n + 1 for n in range(1, 7)} | {("D", 4): 6, ("D", 5): 8, ("E", 6): 12, ("E", 7): 18, ("E", 8): 30}


def test_a1_constants():
    sc = chevalley("A", 1)
    # basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
    assert sc.entries == ((0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1))


def test_a1_matches_matrix_realization():
    h = np.diag([1, -1])
    e = np.array([[0, 1], [0, 0]])
    f = np.array([[0, 0], [1, 0]])
    basis = [h, e, f]
    sc = chevalley("A", 1)
    c = sc.dense()
    flat = np.array([b.reshape(-1) for b in basis]).T
    for i in range(3):
        for j in range(3):
            comm = basis[i] @ basis[j] - basis[j] @ basis[i]
            want = np.array([float(x) for x in c[i, j]])
            assert np.allclose(flat @ want, comm.reshape(-1))


def test_a2_constants_have_unit_magnitude():
    sc = chevalley("A", 2)
    rs = root_system("A", 2)
    r = rs.rank
    roots = set(range(r, sc.dim))
    vals = {abs(v) for i, j, k, v in sc.entries if i in roots and j in roots and k in roots}
    assert vals == {1}


def test_g2_max_constant():
    sc = chevalley("G", 2)
    r = 2
    assert max(abs(v) for i, j, k, v in sc.entries if i >= r and j >= r and k >= r) == 3


@pytest.mark.parametrize("family,n", ALL_TYPES)
def test_jacobi_and_integrality(family, n):
    rep = verify_chevalley(chevalley(family, n))
    assert rep.violations == []
    assert rep.integral
    assert rep.ok


@pytest.mark.parametrize("family,n", ALL_TYPES)
def test_dimension_determinism_and_sparsity(family, n):
    a = chevalley(family, n)
    b = chevalley_basis(root_system(family, n))
    assert a.entries == b.entries
    d = a.dim
    fill = a.nnz / (d**3 / 6)
    assert d < 8 or fill < 0.5
    if d >= 50:
        assert fill < 0.05
    counts = np.zeros(d, dtype=int)
    for i, j, k, v in a.entries:
        counts[i] += 1
    assert counts.max() <= d * (3 + n)


@pytest.mark.parametrize("key", sorted(DUAL_COXETER))
def test_killing_form_on_cartan_subalgebra(key):
    # beta(h_i, h_j) = 2 h^vee a_ij for simply laced types
    family, n = key
    beta = killing_form(chevalley(family, n))
    a = cartan_matrix(family, n).array
    assert np.array_equal(np.array(beta[:n, :n], dtype=object), 2 * DUAL_COXETER[key] * a.astype(object))


def test_corrupted_tensor_reports_violations():
    bad = StructureConstants.from_brackets("bad", 3, {(0, 1): {1: 3}, (0, 2): {2: -2}, (1, 2): {0: 1}})
    rep = verify_chevalley(bad)
    assert rep.violations
    assert not rep.ok
    assert any(v[:3] == (0, 1, 2) for v in rep.violations)


def test_rescaled_ef_bracket_is_still_a_lie_algebra():
    # [e,f] = 2h is sl2 with f rescaled, so it satisfies Jacobi
    sc = StructureConstants.from_brackets("resc", 3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 2}})
    assert verify_chevalley(sc).violations == []


def test_metadata():
    sc = chevalley("B", 3)
    assert sc.metadata["family"] == "B" and sc.metadata["rank"] == 3
    assert all(isinstance(v, Fraction) for *_, v in sc.entries)
