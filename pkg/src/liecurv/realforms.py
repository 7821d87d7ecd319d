"""Real forms named in the operator theory: sl(n,R), su(p,q), sl(m,H), realifications.

Matrix algebras over R, C and H are handled uniformly: a matrix is an integer
array of shape ``(u, n, n)`` holding its components along the units of a
hypercomplex multiplication table (``u`` = 1, 2 or 4).  Commutators are
expanded in the chosen basis by exact linear solves, so every structure
constant is rational (integral for the bases used here).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .structure import FLOAT, RATIONAL, StructureConstants

# unit products e_a e_b = sign * e_c, as (c, sign) tables
_REAL = {(0, 0): (0, 1)}
_COMPLEX = {(0, 0): (0, 1), (0, 1): (1, 1), (1, 0): (1, 1), (1, 1): (0, -1)}
_QUAT: dict[tuple[int, int], tuple[int, int]] = {}
for _a in range(4):
    _QUAT[(0, _a)] = (_a, 1)
    _QUAT[(_a, 0)] = (_a, 1)
for _a in (1, 2, 3):
    _QUAT[(_a, _a)] = (0, -1)
for _a, _b, _c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
    _QUAT[(_a, _b)] = (_c, 1)
    _QUAT[(_b, _a)] = (_c, -1)


def _mul(x: np.ndarray, y: np.ndarray, table) -> np.ndarray:
    out = np.zeros_like(x)
    for (a, b), (c, s) in table.items():
        out[c] += s * (x[a] @ y[b])
    return out


def _unit(units: int, n: int, j: int, k: int, u: int = 0, coef: int = 1) -> np.ndarray:
    m = np.zeros((units, n, n), dtype=np.int64)
    m[u, j, k] = coef
    return m


def from_matrices(name: str, basis: list[np.ndarray], table=_REAL, metadata=None) -> StructureConstants:
    """Structure constants of the span of ``basis`` under the commutator."""
    d = len(basis)
    vecs = np.array([b.reshape(-1) for b in basis], dtype=np.int64).T  # (N, d)
    _, pivots = exact.rref(exact.fractions(vecs.T))
    if len(pivots) != d:
        raise ValueError("basis matrices are linearly dependent")
    rows = list(pivots)
    left = exact.inverse(exact.fractions(vecs[rows, :]))
    brackets = {}
    for i in range(d):
        for j in range(i + 1, d):
            comm = _mul(basis[i], basis[j], table) - _mul(basis[j], basis[i], table)
            flat = comm.reshape(-1)
            if not flat.any():
                continue
            coords = exact.matmul(left, exact.fractions(flat[rows]))
            if np.any(vecs @ np.array(coords, dtype=object) != flat):
                raise ValueError("basis span is not closed under the commutator")
            brackets[(i, j)] = {k: c for k, c in enumerate(coords) if c != 0}
    return StructureConstants.from_brackets(name, d, brackets, metadata=metadata)


def sl_real(n: int) -> StructureConstants:
    """sl(n, R) in the basis E_jk (j != k, row-major) followed by D_i = E_ii - E_{i+1,i+1}."""
    if n < 2:
        raise ValueError(f"sl_real needs n >= 2, got {n}")
    basis = [_unit(1, n, j, k) for j in range(n) for k in range(n) if j != k]
    for i in range(n - 1):
        basis.append(_unit(1, n, i, i) - _unit(1, n, i + 1, i + 1))
    return from_matrices(f"sl{n}R", basis, _REAL, {"kind": "sl_real", "n": n})


def su_pq(p: int, q: int) -> StructureConstants:
    """su(p, q) for eta = diag(+1 x p, -1 x q); q = 0 gives the compact form."""
    if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer))) or q < 0 or p < q or p + q < 2:
        raise ValueError(f"invalid su(p,q) signature ({p}, {q})")
    n = p + q
    eta = [1] * p + [-1] * q
    real_part = []
    imag_part = []
    for j in range(n):
        for k in range(j + 1, n):
            s = eta[j] * eta[k]
            real_part.append(_unit(2, n, j, k) - s * _unit(2, n, k, j))
            imag_part.append(_unit(2, n, j, k, 1) + s * _unit(2, n, k, j, 1))
    diag = [_unit(2, n, i, i, 1) - _unit(2, n, i + 1, i + 1, 1) for i in range(n - 1)]
    name = f"su{p}" if q == 0 else f"su{p}{q}" if p < 10 and q < 10 else f"su({p},{q})"
    return from_matrices(name, real_part + imag_part + diag, _COMPLEX, {"kind": "su", "p": p, "q": q})


def sl_quaternion(m: int) -> StructureConstants:
    """sl(m, H): quaternionic m x m matrices with vanishing real trace."""
    if m < 1:
        raise ValueError(f"sl_quaternion needs m >= 1, got {m}")
    basis = []
    for j in range(m):
        for k in range(m):
            if j != k:
                basis.extend(_unit(4, m, j, k, u) for u in range(4))
    for j in range(m):
        basis.extend(_unit(4, m, j, j, u) for u in (1, 2, 3))
    for i in range(m - 1):
        basis.append(_unit(4, m, i, i) - _unit(4, m, i + 1, i + 1))
    return from_matrices(f"sl{m}H", basis, _QUAT, {"kind": "sl_quat", "m": m})


def su2_cyclic() -> StructureConstants:
    """su(2) = so(3) in the basis with [u_i, u_j] = eps_ijk u_k."""
    br = {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}
    return StructureConstants.from_brackets("su2", 3, br, metadata={"kind": "su", "p": 2, "q": 0})


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """A matrix J with J^2 = -Id commuting with all ad maps of its algebra."""

    dim: int
    J: np.ndarray
    parent: str = ""

    def square_is_minus_identity(self) -> bool:
        j = self.J
        sq = exact.matmul(j, j) if exact.is_exact(j) else j @ j
        target = -np.eye(self.dim, dtype=np.int64)
        if exact.is_exact(j):
            return bool(np.all(sq == target))
        return bool(np.allclose(sq, target, atol=1e-9))

    def commutes_with(self, sc: StructureConstants) -> bool:
        from .liecore import ad_matrices

        ads = ad_matrices(sc)
        j = self.J
        for a in ads:
            lhs = exact.matmul(a, j) if sc.is_exact else a @ np.asarray(j, dtype=float)
            rhs = exact.matmul(j, a) if sc.is_exact else np.asarray(j, dtype=float) @ a
            if sc.is_exact:
                if not np.all(lhs == rhs):
                    return False
            elif not np.allclose(lhs, rhs, atol=1e-9):
                return False
        return True


def _is_complex_tagged(sc: StructureConstants) -> bool:
    md = sc.metadata
    return md.get("form") == "split" and "family" in md or bool(md.get("complex_basis"))


def realify(sc: StructureConstants, assume_complex: bool = False) -> tuple[StructureConstants, ComplexStructure]:
    """The complex algebra spanned by ``sc``'s basis, viewed as a real algebra of twice the dimension."""
    if not (assume_complex or _is_complex_tagged(sc)):
        raise ValueError(f"{sc.name} is not tagged as a complex algebra in a complex basis")
    d = sc.dim
    br: dict[tuple[int, int], dict[int, Fraction | float]] = {}
    for i, j, k, v in sc.entries:
        br.setdefault((i, j), {})[k] = v
        br.setdefault((d + i, d + j), {})[k] = -v
        br.setdefault((i, d + j), {})[d + k] = v
        br.setdefault((j, d + i), {})[d + k] = -v
    md = {"kind": "realified", "complex": dict(sc.metadata), "complex_name": sc.name}
    out = StructureConstants.from_brackets(f"{sc.name}_R", 2 * d, br, sc.scalar, md)
    jm = np.zeros((2 * d, 2 * d), dtype=np.int64)
    for a in range(d):
        jm[d + a, a] = 1
        jm[a, d + a] = -1
    jmat = exact.fractions(jm) if sc.is_exact else jm.astype(float)
    return out, ComplexStructure(2 * d, jmat, out.name)


def direct_sum(parts: list[StructureConstants], name: str | None = None) -> StructureConstants:
    if not parts:
        raise ValueError("direct_sum needs at least one summand")
    if len(parts) == 1 and name is None:
        return parts[0]
    scalar = RATIONAL if all(p.is_exact for p in parts) else FLOAT
    entries = []
    blocks = []
    off = 0
    for p in parts:
        for i, j, k, v in p.entries:
            entries.append((i + off, j + off, k + off, v if scalar == RATIONAL else float(v)))
        blocks.append({"start": off, "stop": off + p.dim, "name": p.name, "metadata": dict(p.metadata)})
        off += p.dim
    label = name or "+".join(p.name for p in parts)
    return StructureConstants(label, off, tuple(sorted(entries)), scalar, {
        "kind": "direct_sum",
        "blocks": blocks,
        "summands": [dict(p.metadata) for p in parts],
    })


def change_basis(sc: StructureConstants, P) -> StructureConstants:
    """Structure constants in the basis ``e'_i = P^a_i e_a`` (columns of P)."""
    d = sc.dim
    if sc.is_exact:
        P = exact.fractions(P)
        try:
            Pinv = exact.inverse(P)
        except np.linalg.LinAlgError:
            raise ValueError("change_basis: matrix is singular") from None
        c = sc.dense()
        # C'[i,j,k] = Pinv[k,c] C[a,b,c] P[a,i] P[b,j]
        t = exact.matmul(P.T, c.reshape(d, d * d)).reshape(d, d, d)                     # [i, b, c]
        t = exact.matmul(t.transpose(0, 2, 1).reshape(d * d, d), P).reshape(d, d, d)    # [i, c, j]
        t = exact.matmul(t.transpose(0, 2, 1).reshape(d * d, d), Pinv.T).reshape(d, d, d)
    else:
        from .exact import float_inverse

        P = np.asarray(P, dtype=float)
        try:
            Pinv = float_inverse(P)
        except np.linalg.LinAlgError:
            raise ValueError("change_basis: matrix is singular") from None
        t = np.einsum("kc,abc,ai,bj->ijk", Pinv, sc.float_dense(), P, P, optimize=True)
    md = {k: v for k, v in sc.metadata.items() if k != "blocks"}
    md["scrambled"] = True
    return StructureConstants.from_dense(sc.name, t, sc.scalar, md)
