"""Integer structure constants of the split form in a Chevalley basis.

Basis order: ``h_1..h_r``, then ``x_beta`` for the positive roots in root order,
then ``x_{-beta}`` in the same order.  Signs of ``N_{alpha,beta}`` are fixed by
declaring every extraspecial pair positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rootsystems import RootSystem, algebra_dimension, root_system
from .structure import StructureConstants, jacobi_violations


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _is_positive(a) -> bool:
    return any(x > 0 for x in a)


class _Constants:
    """Lazy table of ``N_{alpha,beta}`` for arbitrary roots with a root sum."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.pos = list(rs.positive_roots)
        self.order = rs.root_index
        self.special: dict[tuple, int] = {}
        self._norm: dict[tuple, Fraction] = {}
        self._build()

    def norm(self, a) -> Fraction:
        a = a if _is_positive(a) else _neg(a)
        if a not in self._norm:
            self._norm[a] = self.rs.inner(a, a)
        return self._norm[a]

    def is_root(self, a) -> bool:
        return any(a) and self.rs.is_root(a)

    def p_value(self, a, b) -> int:
        p = 0
        cur = b
        while True:
            cur = tuple(x - y for x, y in zip(cur, a))
            if self.is_root(cur):
                p += 1
            else:
                return p

    def _build(self):
        for xi in self.pos:
            if sum(xi) == 1:
                continue
            pairs = []
            for a in self.pos:
                b = tuple(x - y for x, y in zip(xi, a))
                if b in self.order and self.order[a] < self.order[b]:
                    pairs.append((a, b))
            pairs.sort(key=lambda t: self.order[t[0]])
            a1, b1 = pairs[0]
            self.special[(a1, b1)] = self.p_value(a1, b1) + 1
            for a, b in pairs[1:]:
                self.special[(a, b)] = self._from_extraspecial(a, b, a1, b1, xi)

    def _from_extraspecial(self, a, b, a1, b1, xi) -> int:
        ma1, mb1 = _neg(a1), _neg(b1)
        total = Fraction(0)
        s = _add(b, ma1)
        if self.is_root(s):
            total -= Fraction(self.n(b, ma1) * self.n(a, mb1)) / self.norm(s)
        s = _add(a, ma1)
        if self.is_root(s):
            total -= Fraction(self.n(ma1, a) * self.n(b, mb1)) / self.norm(s)
        val = self.norm(xi) / self.n(ma1, mb1) * total
        if val.denominator != 1:
            raise ArithmeticError("non-integer structure constant")
        return int(val)

    def n(self, a, b) -> int:
        """N_{a,b}, defined when a, b and a + b are roots."""
        pa, pb = _is_positive(a), _is_positive(b)
        if pa and pb:
            if (a, b) in self.special:
                return self.special[(a, b)]
            return -self.special[(b, a)]
        if not pa and not pb:
            return -self.n(_neg(a), _neg(b))
        if not pa:
            return -self.n(b, a)
        c = _add(a, b)
        if _is_positive(c):
            val = self.norm(c) / self.norm(a) * -self.n(_neg(b), c)
        else:
            val = self.norm(c) / self.norm(b) * self.n(_neg(c), a)
        if val.denominator != 1:
            raise ArithmeticError("non-integer structure constant")
        return int(val)


def chevalley_basis(rs: RootSystem, name: str | None = None) -> StructureConstants:
    r = rs.rank
    pos = list(rs.positive_roots)
    npos = len(pos)
    d = algebra_dimension(rs)
    cm = rs.cartan.array
    lens = rs.root_lengths()
    consts = _Constants(rs)

    index = {}
    for k, b in enumerate(pos):
        index[b] = r + k
        index[_neg(b)] = r + npos + k

    br: dict[tuple[int, int], dict[int, int]] = {}
    for k, b in enumerate(pos):
        pair = cm @ np.array(b)
        for i in range(r):
            if pair[i]:
                br[(i, index[b])] = {index[b]: int(pair[i])}
                br[(i, index[_neg(b)])] = {index[_neg(b)]: -int(pair[i])}
        # coroot expansion h_b = sum_i c_i (a_i, a_i) / (b, b) h_i
        nb = consts.norm(b)
        hb = {}
        for i, c in enumerate(b):
            if c:
                coef = Fraction(c) * lens[i] / nb
                assert coef.denominator == 1
                hb[i] = int(coef)
        br[(index[b], index[_neg(b)])] = hb
    roots = pos + [_neg(b) for b in pos]
    for a in roots:
        for b in roots:
            if index[a] >= index[b]:
                continue
            s = _add(a, b)
            if consts.is_root(s):
                br[(index[a], index[b])] = {index[s]: consts.n(a, b)}
    label = name or rs.cartan.label
    meta = {"family": rs.cartan.family, "rank": r, "form": "split"}
    return StructureConstants.from_brackets(label, d, br, metadata=meta)


def chevalley(family: str, rank: int) -> StructureConstants:
    return chevalley_basis(root_system(family, rank))


@dataclass
class ChevalleyReport:
    violations: list
    max_residual: Fraction | float
    integral: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_chevalley(sc: StructureConstants, limit: int = 50) -> ChevalleyReport:
    bad, worst = jacobi_violations(sc, limit=limit)
    integral = sc.is_exact and all(Fraction(v).denominator == 1 for *_, v in sc.entries)
    return ChevalleyReport(bad, worst, integral)
