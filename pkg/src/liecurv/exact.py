"""Exact rational linear algebra on numpy object arrays.

Exact arrays hold ``Fraction`` (or ``int``) entries with ``dtype=object``.
Heavy products are done on integer numerators with a common denominator;
int64 is used when a magnitude bound proves the product cannot overflow,
Python integers otherwise.  Rank, null spaces and inverses use fraction-free
Gauss-Jordan elimination on integer rows.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.sparse import csgraph, csr_matrix

_INT64_SAFE = 2**62

_numerator = np.frompyfunc(lambda x: Fraction(x).numerator, 1, 1)
_denominator = np.frompyfunc(lambda x: Fraction(x).denominator, 1, 1)
_to_fraction = np.frompyfunc(Fraction, 1, 1)


def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def fractions(a) -> np.ndarray:
    """Return ``a`` as an object array of Fractions."""
    a = np.asarray(a)
    if a.dtype.kind == "f":
        raise TypeError("refusing to convert a float array to exact rationals")
    out = np.empty(a.shape, dtype=object)
    if a.size:
        out[...] = _to_fraction(a.astype(object))
    return out


def to_integer(a) -> tuple[np.ndarray, int]:
    """Split an exact array into integer numerators and one common denominator."""
    a = np.asarray(a, dtype=object)
    if a.size == 0:
        return np.zeros(a.shape, dtype=np.int64), 1
    dens = _denominator(a)
    den = math.lcm(*{int(x) for x in dens.flat})
    num = _numerator(a) * (den // dens)
    return _compact(num), den


def from_integer(num, den: int = 1) -> np.ndarray:
    num = np.asarray(num)
    out = np.empty(num.shape, dtype=object)
    if num.size:
        obj = num.astype(object)
        out[...] = np.frompyfunc(lambda x: Fraction(int(x), den), 1, 1)(obj)
    return out


def _compact(num) -> np.ndarray:
    """Store integers as int64 when they fit, else keep Python ints."""
    num = np.asarray(num)
    if num.dtype != object:
        return num
    if num.size == 0:
        return num.astype(np.int64)
    big = max(abs(int(x)) for x in num.flat)
    if big < _INT64_SAFE:
        return num.astype(np.int64)
    return num


def _maxabs(a) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def int_matmul(a, b) -> np.ndarray:
    """Integer matrix product that never silently overflows."""
    a = np.asarray(a)
    b = np.asarray(b)
    inner = a.shape[-1] if a.ndim else 1
    ma, mb = _maxabs(a), _maxabs(b)
    if ma == 0 or mb == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    bound = max(inner, 1) * ma * mb
    if bound < _INT64_SAFE:
        return np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)
    return _compact(np.asarray(a, dtype=object) @ np.asarray(b, dtype=object))


def matmul(a, b) -> np.ndarray:
    """``a @ b`` for float arrays, exact for object arrays."""
    if not (is_exact(a) or is_exact(b)):
        return np.asarray(a) @ np.asarray(b)
    na, da = to_integer(a)
    nb, db = to_integer(b)
    return from_integer(int_matmul(na, nb), da * db)


def scale_rows_to_integers(m) -> np.ndarray:
    """Multiply each row by the lcm of its denominators (row space unchanged)."""
    m = np.asarray(m, dtype=object)
    out = np.empty(m.shape, dtype=object)
    for r in range(m.shape[0]):
        row = [Fraction(x) for x in m[r]]
        den = math.lcm(*(x.denominator for x in row)) if row else 1
        out[r] = [x.numerator * (den // x.denominator) for x in row]
    return out


def _bareiss_gauss_jordan(a: np.ndarray) -> tuple[np.ndarray, list[int], int]:
    """Fraction-free Gauss-Jordan elimination of an integer object matrix.

    Returns the reduced matrix, the pivot columns and the common pivot value:
    after elimination every pivot row ``r`` has the common pivot value at its
    pivot column and zeros at all other pivot columns.
    """
    a = np.array(a, dtype=object)
    m, n = a.shape
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        col = a[r:, c]
        nz = np.flatnonzero(col != 0)
        if nz.size == 0:
            continue
        # smallest pivot keeps the intermediate minors small
        k = r + int(nz[np.argmin([abs(int(col[i])) for i in nz])])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        others = np.r_[0:r, r + 1:m]
        if others.size:
            rows = a[others]
            upd = piv * rows - np.outer(rows[:, c], a[r])
            if prev != 1:
                q = upd // prev
                if np.any(q * prev != upd):
                    raise ArithmeticError("inexact division in fraction-free elimination")
                upd = q
            a[others] = upd
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots, prev


def _components(m: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a matrix into independent blocks by its sparsity pattern.

    Rows and columns are vertices of a bipartite graph joined by nonzero
    entries; each connected component is an independent sub-problem.
    """
    rows, cols = np.nonzero(m != 0)
    nr, nc = m.shape
    g = csr_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, nr + cols)),
        shape=(nr + nc, nr + nc),
    )
    _, labels = csgraph.connected_components(g, directed=False)
    out = []
    for lab in np.unique(labels):
        members = np.flatnonzero(labels == lab)
        rr = members[members < nr]
        cc = members[members >= nr] - nr
        out.append((rr, cc))
    return out


def rank(m) -> int:
    """Exact rank of a rational matrix."""
    m = np.asarray(m, dtype=object)
    if m.size == 0:
        return 0
    total = 0
    for rr, cc in _components(m):
        if rr.size == 0 or cc.size == 0:
            continue
        sub = m[np.ix_(rr, cc)]
        if sub.size >= _MODULAR_MIN_SIZE:
            ns = _nullspace_modular(sub)
            if ns is not None:
                total += cc.size - len(ns[1])
                continue
        block = scale_rows_to_integers(sub)
        _, piv, _ = _bareiss_gauss_jordan(block)
        total += len(piv)
    return total


def nullspace(m) -> np.ndarray:
    """Exact null space basis (rows), normalized so each vector has a unit free entry.

    The result is the canonical reduced basis: for the free column ``f`` the
    vector has 1 at ``f``, 0 at the other free columns.
    """
    m = np.asarray(m, dtype=object)
    n = m.shape[1]
    if m.shape[0] == 0:
        return fractions(np.eye(n, dtype=np.int64))
    vecs: list[tuple[int, np.ndarray]] = []
    handled = np.zeros(n, dtype=bool)

    def unit(c) -> np.ndarray:
        v = np.empty(n, dtype=object)
        v[:] = Fraction(0)
        v[c] = Fraction(1)
        return v

    for rr, cc in _components(m):
        handled[cc] = True
        if rr.size == 0:
            vecs.extend((int(c), unit(c)) for c in cc)
            continue
        sub = m[np.ix_(rr, cc)]
        if sub.size >= _MODULAR_MIN_SIZE:
            ns = _nullspace_modular(sub)
            if ns is not None:
                for row, f in zip(*ns):
                    v = unit(cc[f])
                    v[cc] = row
                    vecs.append((int(cc[f]), v))
                continue
        block = scale_rows_to_integers(sub)
        red, piv, d = _bareiss_gauss_jordan(block)
        pset = set(piv)
        for f in (j for j in range(cc.size) if j not in pset):
            v = unit(cc[f])
            for r, p in enumerate(piv):
                v[cc[p]] = Fraction(-int(red[r, f]), int(d))
            vecs.append((int(cc[f]), v))
    vecs.extend((int(c), unit(c)) for c in np.flatnonzero(~handled))
    if not vecs:
        return np.zeros((0, n), dtype=object)
    vecs.sort(key=lambda t: t[0])
    return np.array([v for _, v in vecs], dtype=object).reshape(len(vecs), n)


# ------------------------------------------------------------ multi-modular

_MODULAR_MIN_SIZE = 4000
_MAX_PRIMES = 400


def _primes():
    """Primes below 2^31 in decreasing order."""
    from sympy import prevprime

    p = 2**31
    for _ in range(_MAX_PRIMES):
        p = prevprime(p)
        yield p


def _rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an int64 matrix over GF(p), p < 2^31."""
    a = a % p
    m, n = a.shape
    piv: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        f = a[:, c].copy()
        f[r] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            a[hit] = (a[hit] - np.outer(f[hit], a[r]) % p) % p
        piv.append(c)
        r += 1
    return a[:r], piv


def _rational_reconstruct(a: int, mod: int) -> Fraction | None:
    bound = math.isqrt(mod // 2)
    r0, r1 = mod, a % mod
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _nullspace_modular(m: np.ndarray) -> tuple[np.ndarray, list[int]] | None:
    """Null space by elimination modulo primes, CRT and rational reconstruction.

    The candidate is accepted only after an exact check ``m @ N == 0``; since
    the nullity modulo a prime never undercounts, a verified candidate is the
    full rational null space.  Returns the basis rows and their free columns,
    or None when the primes run out.
    """
    num = scale_rows_to_integers(m)
    n = num.shape[1]
    best: list[int] | None = None
    residues: list[np.ndarray] = []
    moduli: list[int] = []
    for p in _primes():
        red, piv = _rref_mod(np.array(num % p, dtype=np.int64), p)
        if best is None or len(piv) > len(best) or (len(piv) == len(best) and piv < best):
            if best is not None and piv != best:
                residues, moduli = [], []
            best = piv
        elif piv != best:
            continue
        free = [c for c in range(n) if c not in set(piv)]
        basis = np.zeros((len(free), n), dtype=np.int64)
        for t, f in enumerate(free):
            basis[t, f] = 1
            basis[t, piv] = (-red[:, f]) % p
        residues.append(basis.astype(object))
        moduli.append(p)
        if len(free) == 0:
            return np.zeros((0, n), dtype=object), []
        if len(moduli) & (len(moduli) - 1):
            continue  # attempt reconstruction after 1, 2, 4, 8, ... agreeing primes
        modulus = math.prod(moduli)
        acc = residues[0]
        mm = moduli[0]
        for res, q in zip(residues[1:], moduli[1:]):
            inv = pow(mm, -1, q)
            acc = acc + mm * (((res - acc) * inv) % q)
            mm *= q
        cand = np.empty(acc.shape, dtype=object)
        ok = True
        for idx, v in np.ndenumerate(acc):
            f = _rational_reconstruct(int(v), modulus)
            if f is None:
                ok = False
                break
            cand[idx] = f
        if not ok:
            continue
        cn, cd = to_integer(cand)
        if not np.any(int_matmul(num, np.asarray(cn, dtype=object).T)):
            return cand, free
    return None


def rref(m) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    m = np.asarray(m, dtype=object)
    if m.shape[0] == 0:
        return np.zeros((0, m.shape[1]), dtype=object), []
    red, piv, d = _bareiss_gauss_jordan(scale_rows_to_integers(m))
    if not piv:
        return np.zeros((0, m.shape[1]), dtype=object), []
    out = np.array([[Fraction(int(x), int(d)) for x in row] for row in red[: len(piv)]], dtype=object)
    return out, piv


def inverse(m) -> np.ndarray:
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    num, den = to_integer(m)
    aug = np.concatenate([np.asarray(num, dtype=object), np.eye(n, dtype=np.int64).astype(object) * den], axis=1)
    red, piv, d = _bareiss_gauss_jordan(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise np.linalg.LinAlgError("singular matrix")
    # rows: d * x = rhs, so the inverse of num/den is den-scaled rhs / d
    return np.array([[Fraction(int(x), int(d)) for x in row] for row in red[:n, n:]], dtype=object)


def det(m) -> Fraction:
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if n == 0:
        return Fraction(1)
    num, den = to_integer(m)
    a = np.array(num, dtype=object)
    sign = 1
    prev = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c] != 0)
        if nz.size == 0:
            return Fraction(0)
        k = c + int(nz[0])
        if k != c:
            a[[c, k]] = a[[k, c]]
            sign = -sign
        piv = a[c, c]
        if c + 1 < n:
            sub = a[c + 1:, c:]
            upd = piv * sub - np.outer(sub[:, 0], a[c, c:])
            a[c + 1:, c:] = upd // prev
        prev = piv
    return Fraction(sign * int(a[n - 1, n - 1]), den**n)


def solve(m, b) -> np.ndarray:
    """Exact solution of ``m x = b`` for square nonsingular ``m``."""
    return matmul(inverse(m), np.asarray(b, dtype=object))


def column_space(m) -> np.ndarray:
    """Canonical basis (rows, reduced) of the column space of ``m``."""
    basis, _ = rref(np.asarray(m, dtype=object).T)
    return basis


def same_span(a, b) -> bool:
    """True when the row spaces of ``a`` and ``b`` coincide."""
    ra, _ = rref(a)
    rb, _ = rref(b)
    return ra.shape == rb.shape and bool(np.all(ra == rb))


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None when irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def rational_cbrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    sign = -1 if q < 0 else 1
    def icbrt(n: int) -> int | None:
        r = round(n ** (1 / 3)) if n else 0
        for c in (r - 1, r, r + 1):
            if c >= 0 and c**3 == n:
                return c
        return None
    a, b = icbrt(abs(q.numerator)), icbrt(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(sign * a, b)


# float counterparts -------------------------------------------------------

def float_rank(m, rtol: float = 1e-9) -> int:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > rtol * max(s[0], 1.0)))


def float_nullspace(m, rtol: float = 1e-9) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(m)
    tol = rtol * max(s[0] if s.size else 0.0, 1.0)
    r = int(np.sum(s > tol))
    return vt[r:]


def float_inverse(m, rtol: float = 1e-12) -> np.ndarray:
    """Inverse by pivoted LU with a relative singularity threshold."""
    from scipy.linalg import lu_factor, lu_solve

    m = np.asarray(m, dtype=float)
    lu, piv = lu_factor(m, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.size and diag.min() <= rtol * max(diag.max(), 1e-300):
        raise np.linalg.LinAlgError("matrix is numerically singular")
    return lu_solve((lu, piv), np.eye(m.shape[0]))
