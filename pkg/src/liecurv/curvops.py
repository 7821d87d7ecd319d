"""The operators Omega, T, Lambda and Pi, assembled and matrix-free.

Symmetric 2-tensors are coordinatized by their components ``sigma_ij`` with
``i <= j`` (row-major); the basis form of a pair ``i < j`` has
``sigma_ij = sigma_ji = 1``.  Four-forms are stored sparsely, keyed by sorted
quadruples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator

from . import exact
from .caps import caps, check
from .liecore import (
    _cached,
    cartan_three_form,
    killing_form,
    killing_inverse,
    require_semisimple,
    sharp,
)
from .structure import StructureConstants


# ---------------------------------------------------------------- index maps

@lru_cache(maxsize=None)
def sym_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major ``(i, j)`` with ``i <= j``: coordinate order on Sym^2."""
    i, j = np.triu_indices(d)
    return i, j


@lru_cache(maxsize=None)
def wedge_pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(d, 1)
    return i, j


@lru_cache(maxsize=8)
def pair_index(d: int) -> np.ndarray:
    """``idx[a, b]`` = position of the sorted pair ``(min, max)`` in ``wedge_pairs``; -1 on the diagonal."""
    idx = -np.ones((d, d), dtype=np.int64)
    i, j = wedge_pairs(d)
    idx[i, j] = np.arange(i.size)
    idx[j, i] = np.arange(i.size)
    return idx


@lru_cache(maxsize=4)
def quadruples(d: int) -> np.ndarray:
    if d < 4:
        return np.zeros((0, 4), dtype=np.int64)
    flat = np.fromiter((x for q in combinations(range(d), 4) for x in q), dtype=np.int64, count=4 * comb(d, 4))
    return flat.reshape(-1, 4)


def sym_dim(d: int) -> int:
    return d * (d + 1) // 2


def sym_to_vector(sigma) -> np.ndarray:
    s = np.asarray(sigma)
    i, j = sym_pairs(s.shape[0])
    return s[i, j]


def vector_to_sym(v, d: int) -> np.ndarray:
    v = np.asarray(v)
    out = np.zeros((d, d), dtype=v.dtype)
    if v.dtype == object:
        out[...] = Fraction(0)
    i, j = sym_pairs(d)
    out[i, j] = v
    out[j, i] = v
    return out


def basis_form(d: int, k: int, l: int, exact_mode: bool = True) -> np.ndarray:
    s = np.zeros((d, d), dtype=np.int64)
    s[k, l] = s[l, k] = 1
    return exact.fractions(s) if exact_mode else s.astype(float)


# ------------------------------------------------------------------ FourForm

@dataclass(frozen=True)
class FourForm:
    """Totally antisymmetric 4-tensor; ``entries`` maps sorted quadruples to nonzero values."""

    dim: int
    entries: dict = field(default_factory=dict)

    def value(self, i, j, k, l):
        idx = (i, j, k, l)
        if len(set(idx)) < 4:
            return 0
        order = sorted(range(4), key=lambda t: idx[t])
        sign = _perm_sign(order)
        return sign * self.entries.get(tuple(sorted(idx)), 0)

    def max_abs(self):
        return max((abs(v) for v in self.entries.values()), default=0)

    def is_zero(self) -> bool:
        return not self.entries

    def vector(self, exact_mode: bool = True) -> np.ndarray:
        """Coordinates on the sorted-quadruple basis, in ``quadruples(dim)`` order."""
        q = quadruples(self.dim)
        n = q.shape[0]
        out = np.empty(n, dtype=object) if exact_mode else np.zeros(n)
        if exact_mode:
            out[:] = Fraction(0)
        if self.entries:
            pos = _quad_positions(self.dim, np.array(list(self.entries.keys()), dtype=np.int64))
            out[pos] = list(self.entries.values())
        return out

    def __sub__(self, other: "FourForm") -> "FourForm":
        keys = set(self.entries) | set(other.entries)
        ent = {}
        for k in keys:
            v = self.entries.get(k, 0) - other.entries.get(k, 0)
            if v != 0:
                ent[k] = v
        return FourForm(self.dim, ent)


def _perm_sign(order) -> int:
    sign = 1
    order = list(order)
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                sign = -sign
    return sign


def _quad_positions(d: int, quads: np.ndarray) -> np.ndarray:
    """Position of sorted quadruples in the lexicographic ``quadruples(d)`` order."""
    a, b, c, e = quads.T
    # number of 4-subsets lexicographically before (a, b, c, e)
    def count(lo, hi, k):
        # sum over x in [lo, hi) of C(d - 1 - x, k)
        return np.array([sum(comb(d - 1 - x, k) for x in range(l0, h0)) for l0, h0 in zip(lo, hi)], dtype=np.int64)
    return count(np.zeros_like(a), a, 3) + count(a + 1, b, 2) + count(b + 1, c, 1) + (e - c - 1)


# ------------------------------------------------------------- helper arrays

def _is_exact(sc: StructureConstants) -> bool:
    return sc.is_exact


def _cdense(sc: StructureConstants) -> np.ndarray:
    return sc.dense() if sc.is_exact else sc.float_dense()


def _mm(a, b, exact_mode: bool):
    return exact.matmul(a, b) if exact_mode else np.asarray(a) @ np.asarray(b)


def pair_constants(sc: StructureConstants) -> np.ndarray:
    """Cm[(i<j), r] = C_ij^r."""
    def build():
        i, j = wedge_pairs(sc.dim)
        return np.array(_cdense(sc)[i, j, :])
    return _cached(sc, "pair_constants", build)


def raised_pair_constants(sc: StructureConstants) -> np.ndarray:
    """U[(i<j), p] = C^{ij}_p = beta^{ia} beta^{jb} C_abp."""
    def build():
        d = sc.dim
        c3 = cartan_three_form(sc)
        inv = killing_inverse(sc)
        ex = sc.is_exact
        # raise the first two indices of C_abp
        t = _mm(inv, c3.reshape(d, d * d), ex).reshape(d, d, d)                     # [i, b, p]
        t = _mm(inv, t.transpose(1, 0, 2).reshape(d, d * d), ex).reshape(d, d, d)   # [j, i, p]
        t = t.transpose(1, 0, 2)
        i, j = wedge_pairs(d)
        return np.array(t[i, j, :])
    return _cached(sc, "raised_pairs", build)


# ------------------------------------------------------------------- Omega, T

def omega_apply(sc: StructureConstants, sigma) -> np.ndarray:
    """(Omega sigma)_ij = 2 tr(A_i A_j Sigma), Sigma = sharp(sigma)."""
    require_semisimple(sc)
    d = sc.dim
    ex = sc.is_exact
    big_sigma = sharp(sc, sigma)
    c = _cdense(sc)
    a = c.transpose(0, 2, 1)  # a[i] = ad e_i
    b = _mm(a.reshape(d * d, d), big_sigma, ex).reshape(d, d, d)  # b[j] = A_j Sigma
    out = _mm(a.reshape(d, d * d), b.transpose(0, 2, 1).reshape(d, d * d).T, ex)
    return 2 * out


def t_matrix(sc: StructureConstants, as_sparse: bool | None = None):
    """T as a d^2 x d^2 matrix, ``T[(i,j), (k,l)] = T_ij^kl = 2 C_ip^k beta^{lm} C_jm^p``.

    Exact tensors give a dense object array; float tensors a dense array or,
    with ``as_sparse``, a scipy CSR matrix.
    """
    require_semisimple(sc)
    d = sc.dim
    if sc.is_exact:
        def build():
            c = sc.dense()
            inv = killing_inverse(sc)
            # H[j, p, l] = C_jm^p beta^{ml}
            h = exact.matmul(c.transpose(0, 2, 1).reshape(d * d, d), inv).reshape(d, d, d)
            g = c.transpose(0, 2, 1).reshape(d * d, d)                    # [(i, k), p]
            t = exact.matmul(g, h.transpose(1, 0, 2).reshape(d, d * d))    # [(i, k), (j, l)]
            t = 2 * t.reshape(d, d, d, d).transpose(0, 2, 1, 3)
            return np.ascontiguousarray(t).reshape(d * d, d * d)
        return _cached(sc, "t_dense", build)
    if as_sparse is None:
        as_sparse = d > 40
    if as_sparse:
        return _cached(sc, "t_sparse", lambda: _t_sparse_float(sc))
    def build_f():
        c = sc.float_dense()
        inv = killing_inverse(sc)
        h = (c.transpose(0, 2, 1).reshape(d * d, d) @ inv).reshape(d, d, d)
        g = c.transpose(0, 2, 1).reshape(d * d, d)
        t = (g @ h.transpose(1, 0, 2).reshape(d, d * d)).reshape(d, d, d, d).transpose(0, 2, 1, 3)
        return 2 * np.ascontiguousarray(t).reshape(d * d, d * d)
    return _cached(sc, "t_dense_f", build_f)


def _t_sparse_float(sc: StructureConstants) -> sparse.csr_matrix:
    d = sc.dim
    c = sc.float_dense()
    inv = killing_inverse(sc)
    inv = np.where(np.abs(inv) > 1e-14 * np.abs(inv).max(), inv, 0.0)
    h = (c.transpose(0, 2, 1).reshape(d * d, d) @ inv).reshape(d, d, d)  # [j, p, l]
    rows, cols, vals = [], [], []
    for p in range(d):
        gi, gk = np.nonzero(c[:, p, :])
        hj, hl = np.nonzero(h[:, p, :])
        if gi.size == 0 or hj.size == 0:
            continue
        gv = c[gi, p, gk]
        hv = h[hj, p, hl]
        rows.append((gi[:, None] * d + hj[None, :]).ravel())
        cols.append((gk[:, None] * d + hl[None, :]).ravel())
        vals.append((2 * gv[:, None] * hv[None, :]).ravel())
    if not rows:
        return sparse.csr_matrix((d * d, d * d))
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(d * d, d * d)
    )


def t_tensor(sc: StructureConstants) -> np.ndarray:
    """T[i, j, k, l] = T_ij^kl (dense)."""
    d = sc.dim
    t = t_matrix(sc, as_sparse=False)
    return np.asarray(t).reshape(d, d, d, d)


def t_apply(sc: StructureConstants, tau) -> np.ndarray:
    """(T tau)_ij = T_ij^kl tau_kl for an arbitrary 2-tensor."""
    d = sc.dim
    ex = sc.is_exact
    tau = exact.fractions(tau) if ex else np.asarray(tau, dtype=float)
    t = t_matrix(sc)
    if ex:
        return exact.matmul(t, tau.reshape(d * d, 1)).reshape(d, d)
    return np.asarray(t @ tau.reshape(d * d)).reshape(d, d)


@dataclass(frozen=True)
class OperatorMatrix:
    """Assembled operator; ``space`` is "sym2" (square) or "wedge4" (wedge4 x sym2)."""

    space: str
    dim: int
    n: int
    matrix: object

    @property
    def shape(self):
        return self.matrix.shape


def _sym_embedding(d: int) -> sparse.csr_matrix:
    """S_in: Sym^2 coordinates -> full d^2 vectors."""
    i, j = sym_pairs(d)
    n = i.size
    col = np.arange(n)
    rows = np.concatenate([i * d + j, (j * d + i)[i != j]])
    cols = np.concatenate([col, col[i != j]])
    return sparse.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(d * d, n))


def omega_matrix(sc: StructureConstants, as_sparse: bool = False) -> OperatorMatrix:
    """Omega on Sym^2 in the pair basis; column m is the image of basis form m."""
    require_semisimple(sc)
    d = sc.dim
    n = sym_dim(d)
    check("sym2 dimension", n, caps().sym2, "use matrix-free mode")
    i, j = sym_pairs(d)
    sel = i * d + j
    if sc.is_exact:
        def build():
            t = t_matrix(sc)
            sub = t[sel, :]
            m = sub[:, i * d + j].copy()
            off = i != j
            m[:, off] = m[:, off] + sub[:, (j * d + i)[off]]
            return m
        return OperatorMatrix("sym2", d, n, _cached(sc, "omega_matrix", build))
    t = t_matrix(sc, as_sparse=as_sparse or d > 40)
    if sparse.issparse(t):
        m = (t[sel, :] @ _sym_embedding(d).astype(float)).tocsr()
        if not as_sparse:
            m = m.toarray()
    else:
        m = t[sel, :] @ _sym_embedding(d).toarray().astype(float)
    return OperatorMatrix("sym2", d, n, m)


def omega_operator(sc: StructureConstants) -> LinearOperator:
    """Matrix-free float Omega on Sym^2 coordinates via sparse T."""
    require_semisimple(sc)
    fsc = sc.as_float() if sc.is_exact else sc
    d = sc.dim
    t = _cached(fsc, "t_sparse", lambda: _t_sparse_float(fsc))
    i, j = sym_pairs(d)
    sel = i * d + j
    emb = _sym_embedding(d).astype(float)
    op = (t[sel, :] @ emb).tocsr()
    n = sym_dim(d)
    return LinearOperator((n, n), matvec=lambda v: op @ v, matmat=lambda v: op @ v, dtype=float)


# --------------------------------------------------------------------- Lambda

def _pair_matrix(left, mid, right, exact_mode: bool):
    return _mm(_mm(left, mid, exact_mode), np.asarray(right).T, exact_mode)


def _alternate(p, d: int, exact_mode: bool) -> FourForm:
    """Four-form with value P[ab,ce] + P[bc,ae] - P[ac,be] on sorted (a, b, c, e)."""
    q = quadruples(d)
    if q.shape[0] == 0:
        return FourForm(d, {})
    idx = pair_index(d)
    a, b, c, e = q.T
    vals = p[idx[a, b], idx[c, e]] + p[idx[b, c], idx[a, e]] - p[idx[a, c], idx[b, e]]
    nz = np.flatnonzero(vals != 0) if exact_mode else np.flatnonzero(vals)
    return FourForm(d, {tuple(int(x) for x in q[k]): vals[k] for k in nz})


def lambda_apply(sc: StructureConstants, sigma) -> FourForm:
    """(Lambda sigma)_ijkl = sigma([x_i,x_j],[x_k,x_l]) + sigma([x_j,x_k],[x_i,x_l]) + sigma([x_k,x_i],[x_j,x_l])."""
    ex = sc.is_exact
    sigma = exact.fractions(sigma) if ex else np.asarray(sigma, dtype=float)
    cm = pair_constants(sc)
    p = _pair_matrix(cm, sigma, cm, ex)
    return _alternate(p, sc.dim, ex)


def lambda_matrix(sc: StructureConstants):
    """Lambda as a C(d,4) x d(d+1)/2 integer matrix ``L`` with ``Lambda = L / den``.

    Rows follow ``quadruples(d)``, columns the Sym^2 pair basis.  Returns
    ``(OperatorMatrix, den)``; the matrix is int64 or a Python-int object array.
    """
    d = sc.dim
    check("wedge4 dimension", comb(d, 4), caps().wedge4, "use matrix-free residual checks")
    if sc.is_exact:
        num, den = exact.to_integer(pair_constants(sc))
    else:
        num, den = pair_constants(sc), 1
    mat = alternating_matrix(num, d)
    return OperatorMatrix("wedge4", d, mat.shape[0], mat), den * den


def alternating_matrix(pairs, d: int) -> np.ndarray:
    """Matrix of s -> (X s X^T)[ab,ce] + [bc,ae] - [ac,be] on Sym^2 pair coordinates.

    ``pairs[(i<j), r]`` is any pair table (bracket constants for Lambda, the
    3-form for Phi).  Integer input stays integral.
    """
    nq = comb(d, 4)
    n = sym_dim(d)
    pairs = np.asarray(pairs)
    if nq == 0:
        return np.zeros((0, n), dtype=np.int64)
    q = quadruples(d)
    idx = pair_index(d)
    a, b, c, e = q.T
    i, j = sym_pairs(d)
    terms = ((idx[a, b], idx[c, e], 1), (idx[b, c], idx[a, e], 1), (idx[a, c], idx[b, e], -1))
    big = pairs.dtype == object or (
        pairs.dtype.kind in "iu" and 6 * int(np.abs(pairs).max(initial=0)) ** 2 >= 2**62)
    dtype = object if big else pairs.dtype
    out = np.zeros((nq, n), dtype=dtype)
    offdiag = i != j
    for r1, r2, sgn in terms:
        x = pairs[r1].astype(dtype)
        y = pairs[r2].astype(dtype)
        # column (k, l): x_k y_l + x_l y_k for k < l, x_k y_k on the diagonal
        blk = x[:, i] * y[:, j]
        blk[:, offdiag] += x[:, j[offdiag]] * y[:, i[offdiag]]
        out += sgn * blk
    return out


# ------------------------------------------------------------------------- Pi

def _wedge_matrix(zeta: FourForm, exact_mode: bool) -> np.ndarray:
    """Z[(i<j), (k<l)] = zeta_ijkl."""
    d = zeta.dim
    npairs = d * (d - 1) // 2
    z = np.zeros((npairs, npairs), dtype=object if exact_mode else float)
    if exact_mode:
        z[...] = Fraction(0)
    if not zeta.entries:
        return z
    idx = pair_index(d)
    quads = np.array(list(zeta.entries.keys()), dtype=np.int64)
    vals = np.array(list(zeta.entries.values()), dtype=object if exact_mode else float)
    a, b, c, e = quads.T
    for (p1, p2), s in (
        ((idx[a, b], idx[c, e]), 1), ((idx[c, e], idx[a, b]), 1),
        ((idx[a, c], idx[b, e]), -1), ((idx[b, e], idx[a, c]), -1),
        ((idx[a, e], idx[b, c]), 1), ((idx[b, c], idx[a, e]), 1),
    ):
        z[p1, p2] = s * vals
    return z


def pi_apply(sc: StructureConstants, zeta: FourForm) -> np.ndarray:
    """(Pi zeta)_pq = C^{ij}_p C^{kl}_q zeta_ijkl summed over all ordered indices."""
    require_semisimple(sc)
    ex = sc.is_exact
    u = raised_pair_constants(sc)
    z = _wedge_matrix(zeta, ex)
    return 4 * _mm(_mm(np.asarray(u).T, z, ex), u, ex)


def pi_matrix(sc: StructureConstants):
    """Pi as a d(d+1)/2 x C(d,4) integer matrix ``Q`` with ``Pi = Q / den``.

    Rows are Sym^2 output coordinates, columns follow ``quadruples(d)``.
    """
    require_semisimple(sc)
    d = sc.dim
    nq = comb(d, 4)
    check("wedge4 dimension", nq, caps().wedge4, "use matrix-free residual checks")
    n = sym_dim(d)
    if nq == 0:
        return np.zeros((n, 0), dtype=np.int64), 1
    num, den = exact.to_integer(raised_pair_constants(sc)) if sc.is_exact else (raised_pair_constants(sc), 1)
    q = quadruples(d)
    idx = pair_index(d)
    a, b, c, e = q.T
    i, j = sym_pairs(d)
    big = sc.is_exact and 48 * int(np.abs(num).max(initial=0)) ** 2 >= 2**62
    dtype = object if big else num.dtype
    out = np.zeros((nq, n), dtype=dtype)
    for r1, r2, sgn in ((idx[a, b], idx[c, e], 1), (idx[a, c], idx[b, e], -1), (idx[a, e], idx[b, c], 1)):
        x = num[r1].astype(dtype)
        y = num[r2].astype(dtype)
        out += sgn * (x[:, i] * y[:, j] + x[:, j] * y[:, i])
    return 4 * out.T, den * den


def theorem_a_basis_residual(sc: StructureConstants):
    """Exact max residual of 2 Pi Lambda = -(Omega + Id)(Omega - 2 Id) over every Sym^2 basis form at once.

    Uses the assembled matrices: 2 Pi Lambda + Omega^2 - Omega - 2 Id.
    """
    if not sc.is_exact:
        raise ValueError("assembled quadratic identity check needs rational structure constants")
    n = sym_dim(sc.dim)
    m = omega_matrix(sc).matrix
    lam, lden = lambda_matrix(sc)
    pim, pden = pi_matrix(sc)
    pl = exact.int_matmul(pim, lam.matrix) if lam.matrix.size else np.zeros((n, n), dtype=np.int64)
    pl = exact.from_integer(2 * np.asarray(pl, dtype=object), lden * pden)
    eye = exact.fractions(np.eye(n, dtype=np.int64))
    res = pl + exact.matmul(m, m) - m - 2 * eye
    return np.abs(res).max(initial=Fraction(0))


# ------------------------------------------- 2 Pi Lambda = -(Omega + Id)(Omega - 2 Id)

def theorem_a_terms(sc: StructureConstants, sigma) -> dict:
    ex = sc.is_exact
    sigma = exact.fractions(sigma) if ex else np.asarray(sigma, dtype=float)
    om = omega_apply(sc, sigma)
    return {
        "2PiLambda": 2 * pi_apply(sc, lambda_apply(sc, sigma)),
        "Omega2": omega_apply(sc, om),
        "Omega": om,
        "2sigma": 2 * sigma,
    }


def theorem_a_residual(sc: StructureConstants, sigma, relative: bool | None = None):
    """Max-norm of 2 Pi Lambda sigma + Omega^2 sigma - Omega sigma - 2 sigma.

    Exact tensors return the exact maximum; float tensors return it relative
    to the largest max-norm among the four terms (absolute with
    ``relative=False``).
    """
    t = theorem_a_terms(sc, sigma)
    res = t["2PiLambda"] + t["Omega2"] - t["Omega"] - t["2sigma"]
    worst = np.abs(res).max(initial=0)
    if sc.is_exact and not relative:
        return worst
    scale = max(float(np.abs(np.asarray(v, dtype=float)).max(initial=0.0)) for v in t.values())
    if relative is False or scale == 0:
        return float(worst)
    return float(worst) / scale


# ------------------------------------------- pair contraction of Lambda through T

def identity_32_residual(sc: StructureConstants):
    """Max over p,q,r,s of |2 C^{ij}_p C^{kl}_q Lambda_ijkl^rs - (2 d d + T - T T)_pq^rs|."""
    require_semisimple(sc)
    d = sc.dim
    ex = sc.is_exact
    c = _cdense(sc)
    u_pairs = raised_pair_constants(sc)
    # full antisymmetric U[i, j, p]
    u = np.zeros((d, d, d), dtype=object if ex else float)
    if ex:
        u[...] = Fraction(0)
    i, j = wedge_pairs(d)
    u[i, j, :] = u_pairs
    u[j, i, :] = -u_pairs
    # term 1: 2 (U^T Cm)[p, r] (U^T Cm)[q, s]
    uc = _mm(u.reshape(d * d, d).T, c.reshape(d * d, d), ex)             # [p, r]
    lhs = 2 * np.einsum("pr,qs->pqrs", uc, uc)
    # term 2: 2 U[i,j,p] U[k,l,q] C[j,k,r] C[i,l,s]
    x = _mm(u.transpose(2, 0, 1).reshape(d * d, d), c.reshape(d, d * d), ex).reshape(d, d, d, d)   # [p, i, k, r]
    # term 3: 2 U[i,j,p] U[k,l,q] C[k,i,r] C[j,l,s]
    y = _mm(u.transpose(2, 1, 0).reshape(d * d, d), c.transpose(1, 0, 2).reshape(d, d * d), ex).reshape(d, d, d, d)  # [p, j, k, r]
    for w, first in ((x, "i"), (y, "j")):
        # contract w[p, m, k, r] with C[m, l, s] then U[k, l, q]
        z = _mm(w.transpose(0, 2, 3, 1).reshape(d * d * d, d), c.reshape(d, d * d), ex).reshape(d, d, d, d, d)  # [p, k, r, l, s]
        z = z.transpose(0, 2, 4, 1, 3).reshape(d * d * d, d * d)                                             # [(p, r, s), (k, l)]
        v = _mm(z, u.reshape(d * d, d), ex).reshape(d, d, d, d)                                              # [p, r, s, q]
        lhs = lhs + 2 * v.transpose(0, 3, 1, 2)
    t = t_matrix(sc, as_sparse=False)
    t = np.asarray(t)
    eye = np.eye(d * d, dtype=np.int64)
    rhs = 2 * (exact.fractions(eye) if ex else eye) + t - _mm(t, t, ex)
    diff = lhs.reshape(d * d, d * d) - rhs
    return np.abs(diff).max(initial=0)
