import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liecurv import exact
from liecurv.caps import CapExceeded, caps
from liecurv.chevalley import chevalley
from liecurv.curvops import (
    FourForm,
    basis_form,
    identity_32_residual,
    lambda_apply,
    lambda_matrix,
    omega_apply,
    omega_matrix,
    omega_operator,
    pi_apply,
    pi_matrix,
    quadruples,
    sym_dim,
    sym_to_vector,
    t_apply,
    theorem_a_basis_residual,
    theorem_a_residual,
    vector_to_sym,
)
from liecurv.liecore import killing_form, killing_inverse
from liecurv.realforms import su2_cyclic

from conftest import SMALL, build


def zeros(d):
    z = np.empty((d, d), dtype=object)
    z[...] = Fraction(0)
    return z


def random_sym(d, seed, span=4):
    rng = random.Random(seed)
    a = zeros(d)
    for i in range(d):
        for j in range(i, d):
            a[i, j] = a[j, i] = Fraction(rng.randint(-span, span), rng.randint(1, 3))
    return a


def omega_oracle(sc, sigma):
    """(Omega sigma)_ij = 2 tr(ad_i ad_j Sigma), looped entry by entry."""
    d = sc.dim
    c = sc.dense()
    big = exact.matmul(killing_inverse(sc), exact.fractions(sigma))
    out = zeros(d)
    for i in range(d):
        for j in range(d):
            s = Fraction(0)
            for a, b, e in itertools.product(range(d), repeat=3):
                # (ad_i)[a, b] = C[i, b, a]
                s += c[i, b, a] * c[j, e, b] * big[e, a]
            out[i, j] = 2 * s
    return out


def lambda_oracle(sc, sigma):
    d = sc.dim
    c = sc.dense()
    def s(i, j, k, l):
        return sum(c[i, j, a] * sigma[a, b] * c[k, l, b] for a in range(d) for b in range(d))
    return {q: s(*q) + s(q[1], q[2], q[0], q[3]) + s(q[2], q[0], q[1], q[3])
            for q in itertools.combinations(range(d), 4)}


@pytest.mark.parametrize("label", SMALL)
def test_omega_beta_is_twice_beta(label):
    sc = build(label)
    b = killing_form(sc)
    assert np.all(omega_apply(sc, b) == 2 * b)
    assert np.all(t_apply(sc, b) == 2 * b)


def test_omega_of_zero():
    assert np.all(omega_apply(su2_cyclic(), zeros(3)) == 0)


def test_omega_matches_trace_oracle_su2():
    sc = su2_cyclic()
    sigma = exact.fractions(np.diag([1, 0, 0]))
    got = omega_apply(sc, sigma)
    assert np.all(got == omega_oracle(sc, sigma))
    col = omega_matrix(sc).matrix[:, 0]
    assert col[0] == got[0, 0]


def test_omega_matches_trace_oracle_su21():
    sc = build("su21")
    sigma = random_sym(8, 3)
    assert np.all(omega_apply(sc, sigma) == omega_oracle(sc, sigma))


def test_t_apply_symmetric_and_antisymmetric():
    sc = build("sl3R")
    sigma = random_sym(8, 1)
    assert np.all(t_apply(sc, sigma) == omega_apply(sc, sigma))
    a = random_sym(8, 2)
    anti = np.triu(a, 1) - np.triu(a, 1).T
    out = t_apply(sc, exact.fractions(anti))
    assert np.all(out == -out.T)


def test_omega_matrix_columns_su3():
    sc = build("su3")
    m = omega_matrix(sc)
    assert m.shape == (36, 36) and m.space == "sym2"
    for col, (k, l) in enumerate((k, l) for k in range(8) for l in range(k, 8)):
        image = omega_apply(sc, basis_form(8, k, l))
        assert np.all(m.matrix[:, col] == sym_to_vector(image))


def test_omega_matrix_su2_beta_eigenvector():
    sc = su2_cyclic()
    m = omega_matrix(sc).matrix
    assert m.shape == (6, 6)
    v = sym_to_vector(killing_form(sc)).reshape(6, 1)
    assert np.all(exact.matmul(m, v) == 2 * v)


def test_sym_vector_round_trip():
    s = random_sym(5, 9)
    assert np.all(vector_to_sym(sym_to_vector(s), 5) == s)
    assert sym_dim(5) == 15


@pytest.mark.parametrize("label", SMALL)
def test_lambda_beta_vanishes(label):
    sc = build(label)
    assert lambda_apply(sc, killing_form(sc)).is_zero()


def test_lambda_dim3_is_zero():
    sc = su2_cyclic()
    assert lambda_apply(sc, random_sym(3, 0)).is_zero()
    m, _ = lambda_matrix(sc)
    assert m.shape == (0, 6)


def test_lambda_su3_basis_form_matches_direct_sum():
    sc = build("su3")
    sigma = basis_form(8, 0, 0)
    got = lambda_apply(sc, sigma)
    want = lambda_oracle(sc, sigma)
    for q, v in want.items():
        assert got.value(*q) == v
    assert set(got.entries) == {q for q, v in want.items() if v != 0}


def test_lambda_matrix_matches_apply():
    sc = build("sl3R")
    m, den = lambda_matrix(sc)
    sigma = random_sym(8, 4)
    vec = exact.matmul(exact.fractions(m.matrix), sym_to_vector(sigma).reshape(-1, 1)).ravel() / den
    assert np.all(vec == lambda_apply(sc, sigma).vector())


def test_four_form_value_signs():
    z = FourForm(5, {(0, 1, 2, 3): Fraction(3)})
    assert z.value(1, 0, 2, 3) == -3
    assert z.value(3, 2, 1, 0) == 3
    assert z.value(0, 0, 2, 3) == 0
    assert (z - z).is_zero()
    assert z.max_abs() == 3
    assert quadruples(5).shape == (5, 4)


def test_pi_examples():
    sc = build("su3")
    assert np.all(pi_apply(sc, FourForm(8)) == 0)
    assert np.all(pi_apply(sc, lambda_apply(sc, killing_form(sc))) == 0)
    out = pi_apply(sc, lambda_apply(sc, random_sym(8, 5)))
    assert np.all(out == out.T)


def test_pi_matrix_matches_apply():
    sc = build("su21")
    q, den = pi_matrix(sc)
    z = lambda_apply(sc, random_sym(8, 6))
    got = exact.matmul(exact.fractions(q), z.vector().reshape(-1, 1)).ravel() / den
    assert np.all(got == sym_to_vector(pi_apply(sc, z)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_quadratic_identity_su2_random(seed):
    assert theorem_a_residual(su2_cyclic(), random_sym(3, seed)) == 0


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["su3", "su21", "sl3R", "sp4"]))
def test_quadratic_identity_rank_two_random(seed, label):
    sc = build(label)
    assert theorem_a_residual(sc, random_sym(sc.dim, seed)) == 0


@pytest.mark.parametrize("label", ["sl2C_R", "su2+sl2R", "su3"])
def test_quadratic_identity_every_basis_form(label):
    assert theorem_a_basis_residual(build(label)) == 0


def test_quadratic_identity_f4_float():
    sc = chevalley("F", 4).as_float()
    rng = np.random.default_rng(0)
    a = rng.standard_normal((52, 52))
    assert theorem_a_residual(sc, a + a.T) <= 1e-9


@pytest.mark.parametrize("label", ["su2", "su3", "sl2C_R"])
def test_pair_contraction_identity(label):
    assert identity_32_residual(build(label)) == 0


def test_omega_operator_matches_matrix():
    sc = build("sp4")
    op = omega_operator(sc)
    m = np.asarray(omega_matrix(sc).matrix, dtype=float)
    v = np.random.default_rng(1).standard_normal(m.shape[1])
    assert np.allclose(op @ v, m @ v, atol=1e-10)


def test_cap_exceeded(monkeypatch):
    monkeypatch.setenv("LIE_CURV_CAPS", "sym2=10")
    assert caps().sym2 == 10
    with pytest.raises(CapExceeded, match="matrix-free"):
        omega_matrix(build("su3"))
    monkeypatch.setenv("LIE_CURV_CAPS", "bogus=1")
    with pytest.raises(ValueError):
        caps()


def pairing(sc, s, t):
    inv = killing_inverse(sc)
    return np.sum(exact.matmul(exact.matmul(inv, s), inv) * t)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["su2", "su21", "sl3R"]))
def test_omega_self_adjoint(seed, label):
    sc = build(label)
    s, t = random_sym(sc.dim, seed), random_sym(sc.dim, seed + 1)
    assert pairing(sc, omega_apply(sc, s), t) == pairing(sc, s, omega_apply(sc, t))
