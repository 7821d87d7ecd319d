from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from liecurv.rootsystems import (
    algebra_dimension,
    cartan_matrix,
    classical_dimension,
    generate_positive_roots,
    root_system,
)

VALID = [("A", n) for n in range(1, 8)] + [("B", n) for n in range(2, 6)] + [("C", n) for n in range(3, 6)] \
    + [("D", n) for n in range(4, 7)] + [("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]

H = Fraction(1, 2)


def euclidean_simple_roots(family, n):
    """Standard Euclidean realizations with Bourbaki numbering (G2 with alpha_1 long)."""
    def e(i, dim):
        v = [Fraction(0)] * dim
        v[i] = Fraction(1)
        return v

    def sub(a, b):
        return [x - y for x, y in zip(a, b)]

    def add(a, b):
        return [x + y for x, y in zip(a, b)]

    if family == "A":
        return [sub(e(i, n + 1), e(i + 1, n + 1)) for i in range(n)]
    if family in "BCD":
        chain = [sub(e(i, n), e(i + 1, n)) for i in range(n - 1)]
        last = {"B": e(n - 1, n), "C": [2 * x for x in e(n - 1, n)], "D": add(e(n - 2, n), e(n - 1, n))}[family]
        return chain + [last]
    if family == "G":
        return [[Fraction(-2), Fraction(1), Fraction(1)], [Fraction(1), Fraction(-1), Fraction(0)]]
    if family == "F":
        return [sub(e(1, 4), e(2, 4)), sub(e(2, 4), e(3, 4)), e(3, 4), [H, -H, -H, -H]]
    if family == "E":
        e8 = [[H, -H, -H, -H, -H, -H, -H, H], add(e(0, 8), e(1, 8))] + [sub(e(k, 8), e(k - 1, 8)) for k in range(1, 7)]
        return e8[:n]
    raise ValueError(family)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def oracle_cartan(family, n):
    al = euclidean_simple_roots(family, n)
    return [[int(2 * dot(al[j], al[i]) / dot(al[i], al[i])) for j in range(n)] for i in range(n)]


def oracle_positive_roots(family, n):
    """Weyl-orbit closure of the simple roots, expressed in simple-root coordinates."""
    al = euclidean_simple_roots(family, n)
    roots = {tuple(a) for a in al}
    frontier = list(roots)
    while frontier:
        nxt = []
        for r in frontier:
            for a in al:
                c = 2 * dot(r, a) / dot(a, a)
                s = tuple(x - c * y for x, y in zip(r, a))
                if s not in roots:
                    roots.add(s)
                    nxt.append(s)
        frontier = nxt
    basis = np.array([[float(x) for x in a] for a in al]).T
    out = set()
    for r in roots:
        coords, *_ = np.linalg.lstsq(basis, np.array([float(x) for x in r]), rcond=None)
        c = tuple(int(round(x)) for x in coords)
        if all(x >= 0 for x in c):
            out.add(c)
    return out


@pytest.mark.parametrize("family,n", VALID)
def test_cartan_matrix_matches_euclidean_realization(family, n):
    assert cartan_matrix(family, n).array.tolist() == oracle_cartan(family, n)


def test_cartan_matrix_examples():
    assert cartan_matrix("A", 2).array.tolist() == [[2, -1], [-1, 2]]
    assert cartan_matrix("A", 1).array.tolist() == [[2]]
    assert cartan_matrix("G", 2).array.tolist() == [[2, -1], [-3, 2]]


@pytest.mark.parametrize("family,n", [("A", 0), ("B", 1), ("C", 2), ("D", 3), ("E", 5), ("E", 9), ("F", 3), ("G", 3), ("H", 3)])
def test_invalid_types_are_rejected(family, n):
    with pytest.raises(ValueError, match=f"{family}"):
        cartan_matrix(family, n)


@pytest.mark.parametrize("family,n", VALID)
def test_positive_roots_match_weyl_orbit(family, n):
    rs = root_system(family, n)
    assert set(rs.positive_roots) == oracle_positive_roots(family, n)
    assert len(set(rs.positive_roots)) == len(rs.positive_roots)


@pytest.mark.parametrize("family,n", VALID)
def test_root_system_invariants(family, n):
    rs = root_system(family, n)
    roots = rs.positive_roots
    assert roots[:n] == tuple(tuple(int(i == k) for i in range(n)) for k in range(n))
    heights = [sum(r) for r in roots]
    assert heights == sorted(heights)
    for r in roots[n:]:
        assert any(r[i] > 0 and tuple(x - (k == i) for k, x in enumerate(r)) in rs.root_index for i in range(n))
    assert generate_positive_roots(rs.cartan).positive_roots == roots
    assert algebra_dimension(rs) == classical_dimension(family, n)


@pytest.mark.parametrize("family,n,count", [("A", 2, 3), ("G", 2, 6), ("E", 8, 120), ("F", 4, 24), ("E", 6, 36), ("E", 7, 63)])
def test_root_counts(family, n, count):
    assert len(root_system(family, n).positive_roots) == count


def test_g2_highest_root():
    # alpha_1 long with the row convention: highest root 2 alpha_1 + 3 alpha_2
    assert root_system("G", 2).positive_roots[-1] == (2, 3)


@pytest.mark.parametrize("family,n,d", [("A", 2, 8), ("G", 2, 14), ("B", 3, 21), ("F", 4, 52), ("E", 6, 78), ("E", 7, 133), ("E", 8, 248)])
def test_algebra_dimension(family, n, d):
    assert algebra_dimension(root_system(family, n)) == d


def test_classical_dimension_formulas():
    for n in range(1, 6):
        assert classical_dimension("A", n) == n * n + 2 * n
    for n in range(2, 6):
        assert classical_dimension("B", n) == n * (2 * n + 1)


def test_root_lengths_and_inner_product():
    rs = root_system("G", 2)
    assert rs.root_lengths() == [6, 2]
    assert rs.inner((1, 0), (0, 1)) == -3
    rs = root_system("B", 2)
    for a, b in product(rs.positive_roots, repeat=2):
        assert rs.inner(a, b) == rs.inner(b, a)
