"""Shared algebra builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from liecurv import exact
from liecurv.chevalley import chevalley
from liecurv.realforms import direct_sum, realify, sl_quaternion, sl_real, su2_cyclic, su_pq


def random_rational_matrix(d: int, seed: int, span: int = 3) -> np.ndarray:
    """Seeded invertible rational matrix with small numerators and denominators."""
    rng = random.Random(seed)
    while True:
        p = np.array([[Fraction(rng.randint(-span, span), rng.randint(1, 2)) for _ in range(d)]
                      for _ in range(d)], dtype=object)
        if exact.det(p) != 0:
            return p


def build(label: str):
    """Named suite algebras."""
    table = {
        "su2": su2_cyclic,
        "sl2": lambda: chevalley("A", 1),
        "sl2R": lambda: sl_real(2),
        "sl3": lambda: chevalley("A", 2),
        "su3": lambda: su_pq(3, 0),
        "su21": lambda: su_pq(2, 1),
        "sl3R": lambda: sl_real(3),
        "sl4": lambda: chevalley("A", 3),
        "slH2": lambda: sl_quaternion(2),
        "sp4": lambda: chevalley("B", 2),
        "so7": lambda: chevalley("B", 3),
        "sp6": lambda: chevalley("C", 3),
        "g2": lambda: chevalley("G", 2),
        "sl2C_R": lambda: realify(chevalley("A", 1))[0],
        "sl3C_R": lambda: realify(chevalley("A", 2))[0],
        "su2+su2": lambda: direct_sum([su2_cyclic(), su2_cyclic()]),
        "su2+sl2R": lambda: direct_sum([su2_cyclic(), sl_real(2)]),
        "su2+su3": lambda: direct_sum([su2_cyclic(), su_pq(3, 0)]),
    }
    return table[label]()


SMALL = ["su2", "sl2", "sl2R", "sl3", "su3", "su21", "sl3R", "sp4", "sl2C_R", "su2+su2", "su2+sl2R"]
MEDIUM = SMALL + ["sl4", "slH2", "so7", "sp6", "g2", "sl3C_R", "su2+su3"]


@pytest.fixture(scope="session")
def algebra():
    cache: dict = {}

    def get(label: str):
        if label not in cache:
            cache[label] = build(label)
        return cache[label]

    return get


ACCEPTANCE: dict[int, str] = {}


def record(number: int, passed: bool, detail: str) -> None:
    """Log one acceptance criterion outcome; printed again in the terminal summary."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
