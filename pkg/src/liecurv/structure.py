"""The structure-constant tensor C_ij^k of a finite-dimensional real Lie algebra."""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import numpy as np
from scipy import sparse

from . import exact

RATIONAL = "rational"
FLOAT = "float64"


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Sparse storage of ``C_ij^k`` for ``i < j``; antisymmetry is implied.

    ``entries`` is a sorted tuple of ``(i, j, k, value)`` with nonzero values.
    Values are ``Fraction`` when ``scalar == "rational"`` and ``float`` otherwise.
    """

    name: str
    dim: int
    entries: tuple[tuple[int, int, int, Fraction | float], ...]
    scalar: str = RATIONAL
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scalar not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown scalar backend {self.scalar!r}")
        d = self.dim
        for i, j, k, _ in self.entries:
            if not (0 <= i < j < d and 0 <= k < d):
                raise ValueError(f"bad structure-constant index ({i}, {j}, {k}) for dim {d}")

    @classmethod
    def from_brackets(cls, name: str, dim: int, brackets, scalar: str = RATIONAL, metadata=None):
        """Build from a mapping ``(i, j) -> {k: value}``; pairs with ``i > j`` are flipped."""
        acc: dict[tuple[int, int, int], Fraction | float] = {}
        zero = Fraction(0) if scalar == RATIONAL else 0.0
        for (i, j), row in brackets.items():
            if i == j:
                if any(v != 0 for v in row.values()):
                    raise ValueError(f"nonzero self-bracket at index {i}")
                continue
            sign = 1 if i < j else -1
            a, b = min(i, j), max(i, j)
            for k, v in row.items():
                v = Fraction(v) if scalar == RATIONAL else float(v)
                key = (a, b, k)
                prev = acc.get(key)
                val = sign * v
                if prev is not None and prev != val:
                    raise ValueError(f"conflicting values for C_{a}{b}^{k}")
                acc[key] = val
        entries = tuple(sorted((i, j, k, v) for (i, j, k), v in acc.items() if v != zero))
        return cls(name, dim, entries, scalar, dict(metadata or {}))

    @classmethod
    def from_dense(cls, name: str, array, scalar: str | None = None, metadata=None, atol: float = 0.0):
        c = np.asarray(array)
        d = c.shape[0]
        if c.shape != (d, d, d):
            raise ValueError("dense structure constants must have shape (d, d, d)")
        if scalar is None:
            scalar = RATIONAL if c.dtype == object or c.dtype.kind in "iu" else FLOAT
        if scalar == RATIONAL:
            c = exact.fractions(c)
            if not np.all(c + c.transpose(1, 0, 2) == 0):
                raise ValueError("structure constants are not antisymmetric")
        else:
            c = np.asarray(c, dtype=float)
            if np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0) > max(atol, 1e-12) * max(1.0, np.abs(c).max(initial=0.0)):
                raise ValueError("structure constants are not antisymmetric")
        i, j, k = np.nonzero(c)
        keep = i < j
        entries = []
        for a, b, e in zip(i[keep], j[keep], k[keep]):
            v = c[a, b, e]
            if scalar == FLOAT and abs(v) <= atol:
                continue
            entries.append((int(a), int(b), int(e), Fraction(v) if scalar == RATIONAL else float(v)))
        return cls(name, d, tuple(sorted(entries)), scalar, dict(metadata or {}))

    @property
    def is_exact(self) -> bool:
        return self.scalar == RATIONAL

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @cached_property
    def _dense(self) -> np.ndarray:
        d = self.dim
        if self.is_exact:
            c = np.empty((d, d, d), dtype=object)
            c[...] = Fraction(0)
        else:
            c = np.zeros((d, d, d))
        for i, j, k, v in self.entries:
            c[i, j, k] = v
            c[j, i, k] = -v
        c.setflags(write=False)
        return c

    def dense(self) -> np.ndarray:
        """Dense ``C[i, j, k] = C_ij^k`` (object Fractions or float64), read-only."""
        return self._dense

    @cached_property
    def _integer(self) -> tuple[np.ndarray, int]:
        if not self.is_exact:
            raise TypeError("integer view requires exact structure constants")
        den = math.lcm(1, *(v.denominator for *_, v in self.entries))
        d = self.dim
        big = max((abs(v.numerator) * (den // v.denominator) for *_, v in self.entries), default=0)
        c = np.zeros((d, d, d), dtype=np.int64 if big < 2**62 else object)
        for i, j, k, v in self.entries:
            n = v.numerator * (den // v.denominator)
            c[i, j, k] = n
            c[j, i, k] = -n
        c.setflags(write=False)
        return c, int(den)

    def integer_dense(self) -> tuple[np.ndarray, int]:
        """Integer numerators and common denominator: ``C = num / den``."""
        return self._integer

    @cached_property
    def _float(self) -> np.ndarray:
        if self.is_exact:
            num, den = self.integer_dense()
            c = num.astype(float) / den
        else:
            c = np.array(self._dense, dtype=float)
        c.setflags(write=False)
        return c

    def float_dense(self) -> np.ndarray:
        return self._float

    def as_float(self) -> "StructureConstants":
        if not self.is_exact:
            return self
        entries = tuple((i, j, k, float(v)) for i, j, k, v in self.entries)
        return StructureConstants(self.name, self.dim, entries, FLOAT, dict(self.metadata))

    def bracket(self, x, y) -> np.ndarray:
        """Bracket of coordinate vectors ``x`` and ``y``."""
        c = self.dense()
        x = np.asarray(x, dtype=c.dtype)
        y = np.asarray(y, dtype=c.dtype)
        return np.einsum("i,j,ijk->k", x, y, c)

    def with_name(self, name: str, **meta) -> "StructureConstants":
        md = dict(self.metadata)
        md.update(meta)
        return StructureConstants(name, self.dim, self.entries, self.scalar, md)

    def scaled(self, r) -> "StructureConstants":
        """The bracket ``r [., .]``."""
        r = Fraction(r) if self.is_exact else float(r)
        entries = tuple((i, j, k, v * r) for i, j, k, v in self.entries if v * r != 0)
        return StructureConstants(f"{self.name}*{r}", self.dim, entries, self.scalar, dict(self.metadata))

    def same_tensor(self, other: "StructureConstants") -> bool:
        return self.dim == other.dim and self.entries == other.entries


def sparse_slices(sc: StructureConstants):
    """Sparse views ``(pairs, flat, den)`` of the (integer-scaled) tensor.

    ``pairs[(i*d + j), k] = flat[i, (j*d + k)] = den * C_ij^k``.
    """
    d = sc.dim
    if sc.is_exact:
        num, den = sc.integer_dense()
        vals = num
    else:
        vals, den = sc.float_dense(), 1
    ii, jj, kk = np.nonzero(vals)
    data = vals[ii, jj, kk]
    pairs = sparse.csr_matrix((data, (ii * d + jj, kk)), shape=(d * d, d))
    flat = sparse.csr_matrix((data, (ii, jj * d + kk)), shape=(d, d * d))
    return pairs, flat, den


def jacobi_tensor_slices(sc: StructureConstants) -> Iterable[tuple[int, sparse.csr_matrix, int]]:
    """Yield ``(i, J_i, den)`` with ``J_i`` the ``d x d^2`` sparse Jacobiator for fixed ``i``.

    ``J_i[j, k*d + l] = C_ij^q C_qk^l + C_jk^q C_qi^l + C_ki^q C_qj^l``; exact
    tensors are processed as integers and the true value is ``J_i / den``.
    """
    d = sc.dim
    pairs, flat, den = sparse_slices(sc)
    if sc.is_exact:
        if _int_overflow(sc):
            raise OverflowError("structure constants too large for the integer Jacobi check")
    for i in range(d):
        t1 = (flat[i].reshape(d, d) @ flat).tocoo()          # [j, (k, l)]
        m_i = flat[:, i * d:(i + 1) * d]                      # [q, l] = C_qi^l
        t2 = (pairs @ m_i).tocoo()                            # [(j, k), l]
        j2, k2 = np.divmod(t2.row, d)
        rows = np.concatenate([t1.row, t1.col // d, j2])
        cols = np.concatenate([t1.col, t1.row * d + t1.col % d, k2 * d + t2.col])
        data = np.concatenate([t1.data, -t1.data, t2.data])
        out = sparse.csr_matrix((data, (rows, cols)), shape=(d, d * d))
        out.eliminate_zeros()
        yield i, out, den * den


def jacobi_violations(sc: StructureConstants, limit: int = 50, atol: float = 0.0) -> tuple[list, float]:
    """Return up to ``limit`` violating index tuples ``(i, j, k, l, value)`` and the maximal residual."""
    if sc.is_exact and _int_overflow(sc):
        return _jacobi_violations_big(sc, limit)
    bad: list[tuple[int, int, int, int, Fraction | float]] = []
    worst: Fraction | float = Fraction(0) if sc.is_exact else 0.0
    d = sc.dim
    for i, j, den in jacobi_tensor_slices(sc):
        coo = j.tocoo()
        mag = np.abs(coo.data)
        keep = mag > atol if not sc.is_exact else mag != 0
        if not np.any(keep):
            continue
        m = mag.max()
        worst = max(worst, Fraction(int(m), den) if sc.is_exact else float(m))
        for a, col, v in zip(coo.row[keep], coo.col[keep], coo.data[keep]):
            if len(bad) >= limit:
                break
            val = Fraction(int(v), den) if sc.is_exact else float(v)
            bad.append((i, int(a), int(col // d), int(col % d), val))
    return bad, worst


def _int_overflow(sc: StructureConstants) -> bool:
    num, _ = sc.integer_dense()
    if num.dtype == object:
        return True
    m = int(np.abs(num).max(initial=0))
    return 3 * sc.dim * m * m >= 2**62


def _jacobi_violations_big(sc: StructureConstants, limit: int) -> tuple[list, Fraction]:
    """Dense object-integer Jacobi check for constants too large for int64 products."""
    from . import exact

    d = sc.dim
    c = sc.dense()
    num, den = exact.to_integer(c)
    num = np.asarray(num, dtype=object)
    pairs = num.reshape(d * d, d)           # [(i, j), q]
    flat = num.reshape(d, d * d)            # [q, (k, l)]
    t = exact.int_matmul(pairs, flat).reshape(d, d, d, d)   # t[i,j,k,l] = C_ij^q C_qk^l
    jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    bad: list = []
    worst = Fraction(0)
    for idx in zip(*np.nonzero(jac)):
        val = Fraction(int(jac[idx]), den * den)
        worst = max(worst, abs(val))
        if len(bad) < limit:
            bad.append((*(int(x) for x in idx), val))
    return bad, worst
