"""Killing form, Cartan 3-form, index raising/lowering, ad matrices, curvature.

Exact tensors yield object arrays of Fractions; float tensors yield float64
arrays.  Derived quantities are cached on the (immutable) tensor object.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import exact
from .structure import StructureConstants


class NotSemisimpleError(ValueError):
    """The Killing form is degenerate."""

    def __init__(self, name: str, rank: int, dim: int):
        super().__init__(f"{name} is not semisimple: Killing form has rank {rank} < {dim} (defect {dim - rank})")
        self.rank = rank
        self.dim = dim


FLOAT_SINGULAR_RTOL = 1e-12


def _cached(sc: StructureConstants, key: str, fn):
    cache = sc.__dict__.setdefault("_liecore_cache", {})
    if key not in cache:
        val = fn()
        if isinstance(val, np.ndarray):
            val.setflags(write=False)
        cache[key] = val
    return cache[key]


def _matmul(a, b, exact_mode: bool):
    return exact.matmul(a, b) if exact_mode else np.asarray(a) @ np.asarray(b)


def killing_form(sc: StructureConstants) -> np.ndarray:
    """beta_ij = C_ip^q C_jq^p."""

    def build():
        d = sc.dim
        if sc.is_exact:
            c, den = sc.integer_dense()
            x = c.reshape(d, d * d)
            y = c.transpose(0, 2, 1).reshape(d, d * d)
            return exact.from_integer(exact.int_matmul(x, y.T), den * den)
        c = sc.float_dense()
        return c.reshape(d, d * d) @ c.transpose(0, 2, 1).reshape(d, d * d).T

    return _cached(sc, "beta", build)


def killing_rank(sc: StructureConstants) -> int:
    def build():
        b = killing_form(sc)
        if sc.is_exact:
            return exact.rank(b)
        return exact.float_rank(b, rtol=FLOAT_SINGULAR_RTOL)

    return _cached(sc, "beta_rank", build)


def is_semisimple(sc: StructureConstants) -> bool:
    return killing_rank(sc) == sc.dim


def require_semisimple(sc: StructureConstants) -> None:
    r = killing_rank(sc)
    if r != sc.dim:
        raise NotSemisimpleError(sc.name, r, sc.dim)


def killing_inverse(sc: StructureConstants) -> np.ndarray:
    """beta^{ij}, the reciprocal of the Killing form."""
    require_semisimple(sc)

    def build():
        b = killing_form(sc)
        if sc.is_exact:
            return exact.inverse(b)
        inv = exact.float_inverse(b, rtol=FLOAT_SINGULAR_RTOL)
        return (inv + inv.T) / 2

    return _cached(sc, "beta_inv", build)


def cartan_three_form(sc: StructureConstants) -> np.ndarray:
    """C_ijk = C_ij^r beta_kr, dense and fully antisymmetric."""
    require_semisimple(sc)

    def build():
        d = sc.dim
        b = killing_form(sc)
        if sc.is_exact:
            c, den = sc.integer_dense()
            bn, bd = exact.to_integer(b)
            out = exact.from_integer(exact.int_matmul(c.reshape(d * d, d), bn), den * bd)
        else:
            out = sc.float_dense().reshape(d * d, d) @ b
        return out.reshape(d, d, d)

    return _cached(sc, "three_form", build)


def three_form_antisymmetry_residual(c3: np.ndarray):
    """Largest deviation of C_ijk from full antisymmetry over all six permutations."""
    perms = [((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 2, 0), 1), ((2, 0, 1), 1)]
    worst = 0
    for perm, sign in perms:
        diff = np.abs(c3 - sign * c3.transpose(perm))
        worst = max(worst, diff.max(initial=0))
    return worst


def sharp(sc: StructureConstants, sigma) -> np.ndarray:
    """Sigma = beta^{-1} sigma, so that sigma(x, y) = beta(Sigma x, y)."""
    return _matmul(killing_inverse(sc), _as(sc, sigma), sc.is_exact)


def flat(sc: StructureConstants, Sigma) -> np.ndarray:
    """sigma = Sigma^T beta."""
    require_semisimple(sc)
    return _matmul(_as(sc, Sigma).T, killing_form(sc), sc.is_exact)


def raise_both(sc: StructureConstants, sigma) -> np.ndarray:
    """beta^{-1} sigma beta^{-1}."""
    inv = killing_inverse(sc)
    return _matmul(_matmul(inv, _as(sc, sigma), sc.is_exact), inv, sc.is_exact)


def _as(sc: StructureConstants, m) -> np.ndarray:
    if sc.is_exact:
        return exact.fractions(m)
    return np.asarray(m, dtype=float)


def ad_matrix(sc: StructureConstants, i: int) -> np.ndarray:
    """(ad e_i)^k_j = C_ij^k."""
    if not 0 <= i < sc.dim:
        raise IndexError(f"basis index {i} out of range for dim {sc.dim}")
    return np.array(sc.dense()[i].T)


def ad_matrices(sc: StructureConstants) -> np.ndarray:
    """Stack A with A[i] = ad e_i."""
    c = sc.dense() if sc.is_exact else sc.float_dense()
    return np.ascontiguousarray(c.transpose(0, 2, 1))


def _trace_triples(sc: StructureConstants):
    """t[i, j, k] = tr(ad_i ad_j ad_k), integer-scaled for exact tensors."""
    d = sc.dim
    if sc.is_exact:
        c, den = sc.integer_dense()
        a = c.transpose(0, 2, 1)
        scale = den**3
    else:
        a = ad_matrices(sc)
        scale = 1
    out = np.zeros((d, d, d), dtype=a.dtype if not sc.is_exact else np.int64)
    ak_t = a.transpose(0, 2, 1).reshape(d, d * d)   # row k holds vec(A_k^T)
    for i in range(d):
        pij = np.einsum("pr,jrq->jpq", a[i], a).reshape(d, d * d)
        if sc.is_exact:
            out[i] = exact.int_matmul(pij, ak_t.T)
        else:
            out[i] = pij @ ak_t.T
    return out, scale


def cartan_identity_check(sc: StructureConstants):
    """max |2 C_ir^p C_jq^r C_kp^q - C_ijk| over all index triples."""
    require_semisimple(sc)
    trip, scale = _trace_triples(sc)
    c3 = cartan_three_form(sc)
    if sc.is_exact:
        lhs = exact.from_integer(2 * trip.astype(object), scale)
        return np.abs(lhs - c3).max(initial=Fraction(0))
    return float(np.abs(2 * trip - c3).max(initial=0.0))


def curvature_tensor(sc: StructureConstants) -> np.ndarray:
    """R[i, j, k, l] = R_ijk^l with 4 R_ijk^l = C_ij^p C_pk^l."""
    require_semisimple(sc)
    d = sc.dim
    if sc.is_exact:
        c, den = sc.integer_dense()
        r = exact.int_matmul(c.reshape(d * d, d), c.reshape(d, d * d))
        return exact.from_integer(r.astype(object), 4 * den * den).reshape(d, d, d, d)
    c = sc.float_dense()
    return (c.reshape(d * d, d) @ c.reshape(d, d * d)).reshape(d, d, d, d) / 4


def curvature_t_residuals(sc: StructureConstants) -> dict:
    """Compare T_ij^kl with -8 beta^kp R_jpi^l.

    Returns the residual of the literal index placement, of the placement
    with the two upper indices exchanged (``T_ij^lk = -8 beta^kp R_jpi^l``),
    and of both sides symmetrized in the upper pair (their action on
    symmetric 2-tensors).
    """
    from .curvops import t_tensor

    d = sc.dim
    t = t_tensor(sc)  # [i, j, k, l]
    r = curvature_tensor(sc)
    inv = killing_inverse(sc)
    # S[i, j, k, l] = beta^{kp} R_{j p i}^l
    rr = r.transpose(1, 0, 2, 3).reshape(d, d * d * d)     # [p, (j, i, l)]
    s = _matmul(inv, rr, sc.is_exact).reshape(d, d, d, d)  # [k, j, i, l]
    s = -8 * s.transpose(2, 1, 0, 3)                       # [i, j, k, l]
    literal = np.abs(t - s).max(initial=0)
    swapped = np.abs(t.transpose(0, 1, 3, 2) - s).max(initial=0)
    sym = np.abs((t + t.transpose(0, 1, 3, 2)) - (s + s.transpose(0, 1, 3, 2))).max(initial=0)
    return {"literal": literal, "upper_swapped": swapped, "symmetric": sym}
