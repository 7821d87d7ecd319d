"""Cartan matrices and positive root systems of the simple types A to G.

Convention: ``a[i][j] = <alpha_j, alpha_i^vee>``, Bourbaki node numbering.
With this convention G2 is ``[[2, -1], [-3, 2]]`` and alpha_1 is the long root.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

_VALID = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 3,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


@dataclass(frozen=True)
class CartanMatrix:
    family: str
    rank: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        a = self.array
        n = self.rank
        if a.shape != (n, n):
            raise ValueError(f"Cartan matrix of {self.label} must be {n}x{n}")
        if not np.all(np.diag(a) == 2):
            raise ValueError("Cartan matrix diagonal must be 2")
        off = a[~np.eye(n, dtype=bool)]
        if not np.all(np.isin(off, (0, -1, -2, -3))):
            raise ValueError("off-diagonal Cartan entries must lie in {0,-1,-2,-3}")
        if not np.array_equal(a == 0, a.T == 0):
            raise ValueError("Cartan matrix zero pattern must be symmetric")
        if round(np.linalg.det(a)) <= 0:
            raise ValueError("Cartan matrix is not of finite type")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rank, self.rank)

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class RootSystem:
    cartan: CartanMatrix
    positive_roots: tuple[tuple[int, ...], ...]
    root_index: dict = field(compare=False, repr=False)

    @property
    def rank(self) -> int:
        return self.cartan.rank

    def pairing(self, beta, i: int) -> int:
        """<beta, alpha_i^vee> for beta in simple-root coordinates."""
        return int(self.cartan.array[i] @ np.asarray(beta, dtype=np.int64))

    def is_root(self, v) -> bool:
        v = tuple(int(x) for x in v)
        return v in self.root_index or tuple(-x for x in v) in self.root_index

    def root_lengths(self) -> list[Fraction]:
        """Squared lengths (alpha_i, alpha_i) of the simple roots, shortest = 2."""
        return simple_root_lengths(self.cartan)

    def inner(self, a, b) -> Fraction:
        """Invariant inner product with the shortest roots of squared length 2."""
        lens = self.root_lengths()
        cm = self.cartan.array
        total = Fraction(0)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    # (alpha_i, alpha_j) = a_ij (alpha_i, alpha_i) / 2
                    total += ai * bj * Fraction(int(cm[i, j])) * lens[i] / 2
        return total


def cartan_matrix(family: str, rank: int) -> CartanMatrix:
    family = str(family).upper()
    if family not in _VALID or not isinstance(rank, (int, np.integer)) or not _VALID[family](rank):
        raise ValueError(f"invalid Cartan type ({family}, {rank})")
    n = int(rank)
    a = 2 * np.eye(n, dtype=np.int64)
    if family in "ABCD":
        for i in range(n - 1):
            a[i, i + 1] = a[i + 1, i] = -1
        if family == "B":
            a[n - 1, n - 2] = -2
        elif family == "C":
            a[n - 2, n - 1] = -2
        elif family == "D":
            a[n - 2, n - 1] = a[n - 1, n - 2] = 0
            a[n - 3, n - 1] = a[n - 1, n - 3] = -1
    elif family == "E":
        # Bourbaki: chain 1-3-4-5-6-..., node 2 attached to node 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for i, j in edges:
            a[i, j] = a[j, i] = -1
    elif family == "F":
        a[0, 1] = a[1, 0] = -1
        a[2, 3] = a[3, 2] = -1
        a[1, 2] = -1
        a[2, 1] = -2
    elif family == "G":
        a[0, 1] = -1
        a[1, 0] = -3
    return CartanMatrix(family, n, tuple(tuple(int(x) for x in row) for row in a))


def simple_root_lengths(cm: CartanMatrix) -> list[Fraction]:
    """Solve a_ij l_i = a_ji l_j over each connected component, shortest length 2."""
    a = cm.array
    n = cm.rank
    lens: list[Fraction | None] = [None] * n
    for start in range(n):
        if lens[start] is not None:
            continue
        lens[start] = Fraction(1)
        comp = [start]
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if j != i and a[i, j] != 0 and lens[j] is None:
                    lens[j] = lens[i] * Fraction(int(a[i, j]), int(a[j, i]))
                    comp.append(j)
                    queue.append(j)
        low = min(lens[k] for k in comp)
        for k in comp:
            lens[k] = lens[k] * 2 / low
    return lens  # type: ignore[return-value]


def _sort_key(v: tuple[int, ...]):
    # height ascending, ties in descending lexicographic order, so that the
    # simple roots come first and in node order
    return (sum(v), tuple(-x for x in v))


def generate_positive_roots(cartan: CartanMatrix) -> RootSystem:
    a = cartan.array
    n = cartan.rank
    simple = [tuple(int(i == k) for i in range(n)) for k in range(n)]
    roots = set(simple)
    queue = deque(simple)
    while queue:
        beta = queue.popleft()
        for i in range(n):
            p = 0
            down = list(beta)
            while True:
                down[i] -= 1
                if tuple(down) in roots:
                    p += 1
                else:
                    break
            pairing = int(a[i] @ np.array(beta))
            if p - pairing > 0:
                up = list(beta)
                up[i] += 1
                up = tuple(up)
                if up not in roots:
                    roots.add(up)
                    queue.append(up)
    ordered = tuple(sorted(roots, key=_sort_key))
    return RootSystem(cartan, ordered, {r: k for k, r in enumerate(ordered)})


def algebra_dimension(rs: RootSystem) -> int:
    return rs.rank + 2 * len(rs.positive_roots)


def root_system(family: str, rank: int) -> RootSystem:
    return generate_positive_roots(cartan_matrix(family, rank))


def classical_dimension(family: str, rank: int) -> int:
    n = rank
    return {
        "A": lambda: n * n + 2 * n,
        "B": lambda: n * (2 * n + 1),
        "C": lambda: n * (2 * n + 1),
        "D": lambda: n * (2 * n - 1),
        "E": lambda: {6: 78, 7: 133, 8: 248}[n],
        "F": lambda: 52,
        "G": lambda: 14,
    }[family.upper()]()
