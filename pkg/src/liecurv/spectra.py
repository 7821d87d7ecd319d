"""Closed-form spectrum tables for Omega and their verification.

Also the eigenvalue-1 classifier, the kernel of Lambda and the inclusion
chain Ker(Omega - 2) in Ker Lambda in Ker(Omega - 2) + Ker(Omega + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .caps import CapExceeded, caps
from .curvops import (
    lambda_matrix,
    omega_apply,
    omega_matrix,
    omega_operator,
    sym_dim,
    sym_to_vector,
    vector_to_sym,
)
from .liecore import killing_form, require_semisimple
from .structure import StructureConstants

EXCEPTIONAL_DIMS = {"sl2": 3, "sl3": 8, "g2": 14, "so8": 28, "f4": 52, "e6": 78, "e7": 133, "e8": 248}


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues with multiplicities on a space of dimension ``space_dim``."""

    space_dim: int
    rows: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        seen = set()
        for lam, m in self.rows:
            if m <= 0:
                raise ValueError("spectrum rows must have positive multiplicity")
            if lam in seen:
                raise ValueError(f"duplicate eigenvalue {lam}")
            seen.add(lam)
        if sum(m for _, m in self.rows) != self.space_dim:
            raise ValueError(f"multiplicities sum to {sum(m for _, m in self.rows)}, expected {self.space_dim}")

    @classmethod
    def build(cls, pairs, space_dim: int | None = None) -> "SpectrumTable":
        """Merge duplicate eigenvalues and drop zero multiplicities."""
        acc: dict[Fraction, int] = {}
        for lam, m in pairs:
            m = int(m)
            if m < 0:
                raise ValueError(f"negative multiplicity {m} for eigenvalue {lam}")
            if m:
                acc[Fraction(lam)] = acc.get(Fraction(lam), 0) + m
        rows = tuple(sorted(acc.items(), key=lambda t: -t[0]))
        total = sum(acc.values())
        return cls(total if space_dim is None else space_dim, rows)

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.rows)

    @property
    def eigenvalues(self) -> list[Fraction]:
        return [lam for lam, _ in self.rows]

    def multiplicity(self, lam) -> int:
        return self.as_dict().get(Fraction(lam), 0)

    def trace_power(self, k: int) -> Fraction:
        return sum((m * lam**k for lam, m in self.rows), Fraction(0))

    def to_json(self) -> list[dict]:
        return [{"eigenvalue": _frac_str(lam), "multiplicity": m} for lam, m in self.rows]

    @classmethod
    def from_json(cls, data) -> "SpectrumTable":
        return cls.build((Fraction(r["eigenvalue"]), r["multiplicity"]) for r in data)


def _frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# ------------------------------------------------------------ Meyberg tables

def _exceptional(d: int) -> SpectrumTable:
    w = exact.rational_sqrt(Fraction(d + 242, d + 2))
    if w is None:
        raise ValueError(f"exceptional formula needs a rational w; d = {d} gives an irrational value")
    m1 = Fraction(3 * d) * ((d + 2) * w - (d + 32)) / (w * (11 - w))
    m2 = Fraction(3 * d) * ((d + 2) * w + (d + 32)) / (w * (11 + w))
    if m1.denominator != 1 or m2.denominator != 1:
        raise ValueError(f"non-integer multiplicities from the exceptional formula at d = {d}")
    n = sym_dim(d)
    return SpectrumTable.build([(2, 1), ((1 + w) / 6, int(m1)), ((1 - w) / 6, int(m2))], n)


def meyberg_table(family: str, param) -> SpectrumTable:
    """Spectrum of Omega for a complex simple algebra.

    ``family`` is "sl", "sp" or "so" with ``param`` = n, or "exceptional"
    with ``param`` one of sl2, sl3, g2, so8, f4, e6, e7, e8.
    """
    family = family.lower()
    if family == "exceptional":
        name = str(param).lower()
        if name not in EXCEPTIONAL_DIMS:
            raise ValueError(f"unknown exceptional-formula algebra {param!r}")
        return _exceptional(EXCEPTIONAL_DIMS[name])
    n = int(param)
    if family == "sl":
        if n < 2:
            raise ValueError(f"sl_n needs n >= 2, got {n}")
        if n in (2, 3):
            return _exceptional(n * n - 1)
        d = n * n - 1
        rows = [
            (2, 1),
            (1, n * n - 1),
            (Fraction(2, n), n * n * (n - 3) * (n + 1) // 4),
            (Fraction(-2, n), n * n * (n + 3) * (n - 1) // 4),
        ]
        return SpectrumTable.build(rows, sym_dim(d))
    if family == "sp":
        if n < 4 or n % 2:
            raise ValueError(f"sp_n needs even n >= 4, got {n}")
        d = n * (n + 1) // 2
        rows = [
            (2, 1),
            (Fraction(n + 4, n + 2), (n - 2) * (n + 1) // 2),
            (Fraction(-4, n + 2), n * (n + 1) * (n + 2) * (n + 3) // 24),
            (Fraction(2, n + 2), n * (n - 1) * (n - 2) * (n + 3) // 12),
        ]
        return SpectrumTable.build(rows, sym_dim(d))
    if family == "so":
        if n == 8:
            return _exceptional(28)
        if not (n == 7 or n >= 9):
            raise ValueError(f"so_n table needs n = 7 or n >= 9, got {n}")
        d = n * (n - 1) // 2
        rows = [
            (2, 1),
            (Fraction(n - 4, n - 2), (n + 2) * (n - 1) // 2),
            (Fraction(4, n - 2), n * (n - 1) * (n - 2) * (n - 3) // 24),
            (Fraction(-2, n - 2), n * (n + 1) * (n + 2) * (n - 3) // 12),
        ]
        return SpectrumTable.build(rows, sym_dim(d))
    raise ValueError(f"unknown family {family!r}")


def table_for_type(family: str, rank: int) -> SpectrumTable:
    """Table for the complex simple algebra of Cartan type (family, rank)."""
    f = family.upper()
    n = int(rank)
    if f == "A":
        return meyberg_table("sl", n + 1)
    if f == "B":
        return meyberg_table("sp", 4) if n == 2 else meyberg_table("so", 2 * n + 1)
    if f == "C":
        return meyberg_table("sp", 2 * n)
    if f == "D":
        return meyberg_table("so", 2 * n)
    exc = {("G", 2): "g2", ("F", 4): "f4", ("E", 6): "e6", ("E", 7): "e7", ("E", 8): "e8"}
    if (f, n) in exc:
        return meyberg_table("exceptional", exc[(f, n)])
    raise ValueError(f"no table for type ({family}, {rank})")


def real_form_spectrum(base: SpectrumTable, case: str) -> SpectrumTable:
    """Case "a": a real form of the complex algebra; case "b": its realification."""
    if case == "a":
        return base
    if case != "b":
        raise ValueError(f"case must be 'a' or 'b', got {case!r}")
    dh = _dim_from_sym(base.space_dim)
    n = sym_dim(2 * dh)
    doubled = [(lam, 2 * m) for lam, m in base.rows]
    zero = n - sum(m for _, m in doubled)
    return SpectrumTable.build(doubled + [(0, zero)], n)


def _dim_from_sym(n: int) -> int:
    d = (math.isqrt(8 * n + 1) - 1) // 2
    if d * (d + 1) // 2 != n:
        raise ValueError(f"{n} is not the dimension of a symmetric square")
    return d


def direct_sum_spectrum(tables: list[SpectrumTable]) -> SpectrumTable:
    """Omega of a direct sum: summand spectra plus 0 on the mixed terms."""
    dims = [_dim_from_sym(t.space_dim) for t in tables]
    pairs = [row for t in tables for row in t.rows]
    cross = sum(dims[a] * dims[b] for a in range(len(dims)) for b in range(a + 1, len(dims)))
    d = sum(dims)
    return SpectrumTable.build(pairs + [(0, cross)], sym_dim(d))


def table_from_metadata(md: dict) -> SpectrumTable:
    """Expected table derived from construction metadata."""
    kind = md.get("kind")
    if "family" in md and kind is None:
        return table_for_type(md["family"], md["rank"])
    if kind == "su":
        return meyberg_table("sl", md["p"] + md["q"])
    if kind == "sl_real":
        return meyberg_table("sl", md["n"])
    if kind == "sl_quat":
        return meyberg_table("sl", 2 * md["m"])
    if kind == "realified":
        return real_form_spectrum(table_from_metadata(md["complex"]), "b")
    if kind == "direct_sum":
        return direct_sum_spectrum([table_from_metadata(s) for s in md["summands"]])
    raise ValueError("metadata does not identify a constructible family")


# -------------------------------------------------------------- verification

@dataclass
class SpectrumRow:
    eigenvalue: Fraction
    expected: int
    verified: int | None
    passed: bool


@dataclass
class SpectrumReport:
    mode: str
    rows: list[SpectrumRow]
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(v.get("passed", True) for v in self.checks.values())

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "rows": [
                {
                    "eigenvalue": _frac_str(r.eigenvalue),
                    "expected": r.expected,
                    "verified": r.verified,
                    "status": "pass" if r.passed else "fail",
                }
                for r in self.rows
            ],
            "checks": {k: {kk: _jsonable(vv) for kk, vv in v.items()} for k, v in self.checks.items()},
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return _frac_str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _shift(m: np.ndarray, lam) -> np.ndarray:
    out = np.array(m, dtype=object)
    idx = np.arange(out.shape[0])
    out[idx, idx] = out[idx, idx] - Fraction(lam)
    return out


def omega_nullity(sc: StructureConstants, lam) -> int:
    """Exact dim Ker(Omega - lam Id) on Sym^2."""
    m = omega_matrix(sc).matrix
    return m.shape[0] - exact.rank(_shift(m, lam))


def verify_spectrum(sc: StructureConstants, expected: SpectrumTable, mode: str = "exact",
                    tol: float = 1e-7) -> SpectrumReport:
    require_semisimple(sc)
    d = sc.dim
    n = sym_dim(d)
    if expected.space_dim != n:
        raise ValueError(f"expected table has space dimension {expected.space_dim}, algebra needs {n}")
    cp = caps()
    if mode == "exact":
        if not sc.is_exact:
            raise ValueError("exact mode needs rational structure constants")
        if d > cp.exact_dim:
            raise CapExceeded(f"dim {d} exceeds exact cap {cp.exact_dim}; use float or matrix-free mode")
        rows = []
        for lam, m in expected.rows:
            got = omega_nullity(sc, lam)
            rows.append(SpectrumRow(lam, m, got, got == m))
        return SpectrumReport(mode, rows, {"sum": {"value": sum(r.verified for r in rows), "target": n,
                                                   "passed": sum(r.verified for r in rows) == n}})
    if mode == "float":
        if d > cp.float_dim:
            raise CapExceeded(f"dim {d} exceeds float cap {cp.float_dim}; use matrix-free mode")
        _gap_check(expected, tol)
        fsc = sc.as_float()
        m = omega_matrix(fsc).matrix
        ev = np.linalg.eigvals(m)
        imag = float(np.abs(ev.imag).max(initial=0.0))
        re = ev.real
        rows = []
        claimed = np.zeros(re.size, dtype=bool)
        for lam, mult in expected.rows:
            hit = np.abs(re - float(lam)) < tol
            claimed |= hit
            got = int(hit.sum())
            rows.append(SpectrumRow(lam, mult, got, got == mult))
        checks = {
            "imaginary": {"value": imag, "passed": imag < tol},
            "unclaimed": {"value": int((~claimed).sum()), "passed": not (~claimed).any()},
        }
        checks.update(_trace_checks_exact(sc, expected) if sc.is_exact and d <= cp.exact_dim else {})
        return SpectrumReport(mode, rows, checks)
    if mode == "matrix-free":
        return _verify_matrix_free(sc, expected, tol)
    raise ValueError(f"unknown mode {mode!r}")


def _gap_check(expected: SpectrumTable, tol: float) -> None:
    lams = sorted(float(l) for l in expected.eigenvalues)
    gaps = [b - a for a, b in zip(lams, lams[1:])]
    if gaps and min(gaps) <= 10 * tol:
        raise ValueError(f"expected eigenvalues too close for tolerance {tol}")


def _trace_checks_exact(sc: StructureConstants, expected: SpectrumTable) -> dict:
    m = omega_matrix(sc).matrix
    tr1 = sum(m[k, k] for k in range(m.shape[0]))
    return {"trace": {"value": tr1, "target": expected.trace_power(1), "passed": tr1 == expected.trace_power(1)}}


def _verify_matrix_free(sc: StructureConstants, expected: SpectrumTable, tol: float,
                        chunk: int = 256) -> SpectrumReport:
    """Annihilating polynomial on every basis form plus power traces for the multiplicities."""
    op = omega_operator(sc)
    n = op.shape[0]
    lams = [float(l) for l in expected.eigenvalues]
    k_max = len(lams) - 1
    traces = np.zeros(k_max + 1)
    traces[0] = n
    worst = 0.0
    scale = 0.0
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        e = np.zeros((n, stop - start))
        e[np.arange(start, stop), np.arange(stop - start)] = 1.0
        # powers for the traces
        v = e
        cols = np.arange(start, stop)
        for k in range(1, k_max + 1):
            v = op.matmat(v)
            traces[k] += v[cols, np.arange(stop - start)].sum()
        # annihilating polynomial
        w = e
        for lam in lams:
            nxt = op.matmat(w) - lam * w
            scale = max(scale, float(np.abs(op.matmat(w)).max(initial=0.0)), abs(lam) * float(np.abs(w).max(initial=0.0)))
            w = nxt
        worst = max(worst, float(np.abs(w).max(initial=0.0)))
    rel = worst / scale if scale else worst
    vander = np.array([[l**k for l in lams] for k in range(k_max + 1)])
    mults = np.linalg.solve(vander, traces)
    rows = []
    for (lam, m), got in zip(expected.rows, mults):
        ok = abs(got - m) < 1e-6 * max(1.0, n)
        rows.append(SpectrumRow(lam, m, int(round(got)), ok and int(round(got)) == m))
    checks = {
        "annihilating_polynomial": {"value": rel, "passed": rel < 1e-9},
        "traces": {"value": traces.tolist(),
                   "target": [float(expected.trace_power(k)) for k in range(k_max + 1)],
                   "passed": bool(np.allclose(traces, [float(expected.trace_power(k)) for k in range(k_max + 1)],
                                              rtol=1e-8, atol=1e-6))},
    }
    return SpectrumReport("matrix-free", rows, checks)


def computed_spectrum(sc: StructureConstants, max_den: int = 1000) -> SpectrumTable:
    """Spectrum of Omega found from float eigenvalues, rationalized and certified exactly."""
    fsc = sc.as_float()
    ev = np.linalg.eigvals(omega_matrix(fsc).matrix).real
    guesses = sorted({Fraction(float(x)).limit_denominator(max_den) for x in np.round(ev, 6)})
    merged: list[Fraction] = []
    for g in guesses:
        if not merged or abs(float(g - merged[-1])) > 1e-6:
            merged.append(g)
    if sc.is_exact:
        rows = [(g, omega_nullity(sc, g)) for g in merged]
    else:
        rows = [(g, int(np.sum(np.abs(ev - float(g)) < 1e-7))) for g in merged]
    return SpectrumTable.build(rows, sym_dim(sc.dim))


# ------------------------------------------------------ eigenvalue-1 classifier

def has_eigenvalue_one(md: dict) -> bool:
    """Whether 1 is an eigenvalue of Omega, from the algebra's construction metadata.

    True exactly for sl(n, C) with n >= 3 and its real forms su(p, q),
    sl(n, R), sl(m, H), and (through a summand) for sums containing one.
    """
    kind = md.get("kind")
    if "family" in md and kind is None:
        return md["family"].upper() == "A" and md["rank"] >= 2
    if kind == "su":
        return md["p"] + md["q"] >= 3
    if kind == "sl_real":
        return md["n"] >= 3
    if kind == "sl_quat":
        return md["m"] >= 2
    if kind == "realified":
        return has_eigenvalue_one(md["complex"])
    if kind == "direct_sum":
        return any(has_eigenvalue_one(s) for s in md["summands"])
    raise ValueError("metadata does not identify a constructible family")


def eigenvalue_one_observed(sc: StructureConstants) -> bool:
    if sc.is_exact and sc.dim <= caps().exact_dim:
        return omega_nullity(sc, 1) > 0
    ev = np.linalg.eigvals(omega_matrix(sc.as_float()).matrix)
    return bool(np.any(np.abs(ev - 1.0) < 1e-7))


# ------------------------------------------------------------------ kernels

def _forms_from_rows(rows: np.ndarray, d: int) -> list[np.ndarray]:
    return [vector_to_sym(r, d) for r in rows]


def eigenspace(sc: StructureConstants, lam) -> list[np.ndarray]:
    """Exact basis of Ker(Omega - lam Id) as symmetric matrices (reduced form)."""
    require_semisimple(sc)
    if sc.dim > caps().exact_dim:
        raise CapExceeded(f"dim {sc.dim} exceeds exact cap {caps().exact_dim}")
    m = omega_matrix(sc).matrix
    return _forms_from_rows(exact.nullspace(_shift(m, lam)), sc.dim)


def lambda_kernel_vectors(sc: StructureConstants) -> np.ndarray:
    """Reduced basis (rows, Sym^2 coordinates) of Ker Lambda, exact."""
    if not sc.is_exact:
        raise ValueError("exact kernel needs rational structure constants")
    op, _ = lambda_matrix(sc)
    mat = op.matrix
    n = sym_dim(sc.dim)
    if mat.shape[0] == 0:
        return exact.fractions(np.eye(n, dtype=np.int64))
    return exact.nullspace(np.asarray(mat, dtype=object))


@dataclass
class KerLambda:
    dim: int
    basis: list[np.ndarray]
    classification: str


def ker_lambda(sc: StructureConstants) -> KerLambda:
    rows = lambda_kernel_vectors(sc)
    basis = _forms_from_rows(rows, sc.dim)
    return KerLambda(len(basis), basis, classify_kernel(sc, rows))


def classify_kernel(sc: StructureConstants, rows: np.ndarray) -> str:
    k = rows.shape[0]
    d = sc.dim
    if d == 3 and k == 6:
        return "dim-3"
    if d == 6 and k == 12:
        return "dim-6"
    if k == 1:
        beta = sym_to_vector(killing_form(sc))
        if exact.rank(np.vstack([rows, beta[None, :]])) == 1:
            return "killing"
    if k == 2:
        beta = sym_to_vector(killing_form(sc))
        if exact.rank(np.vstack([rows, beta[None, :]])) == 2:
            return "pencil"
    return "other"


KERNEL_LABELS = {
    "killing": "spanned by Killing form",
    "pencil": "pencil Re/Im of the complex Killing form",
    "dim-3": "dim-3 case, all of Sym^2",
    "dim-6": "dim-6 special case",
    "other": "unclassified (not simple of the listed kinds)",
}


def span_contains(basis_rows: np.ndarray, vecs: np.ndarray) -> bool:
    basis_rows = np.asarray(basis_rows, dtype=object)
    vecs = np.atleast_2d(np.asarray(vecs, dtype=object))
    r = exact.rank(basis_rows) if basis_rows.size else 0
    return exact.rank(np.vstack([basis_rows, vecs]) if basis_rows.size else vecs) == r


def inclusion_chain(sc: StructureConstants) -> dict:
    """Exact membership residuals for Ker(Omega-2) in Ker Lambda in Ker(Omega-2) + Ker(Omega+1)."""
    from .curvops import lambda_apply

    d = sc.dim
    e2 = eigenspace(sc, 2)
    k_rows = lambda_kernel_vectors(sc)
    lam_res = Fraction(0)
    for s in e2:
        f = lambda_apply(sc, s)
        lam_res = max(lam_res, Fraction(f.max_abs()))
    poly_res = Fraction(0)
    for r in k_rows:
        s = vector_to_sym(r, d)
        o = omega_apply(sc, s)
        oo = omega_apply(sc, o)
        res = oo - o - 2 * s  # (Omega - 2)(Omega + 1)
        poly_res = max(poly_res, np.abs(res).max(initial=Fraction(0)))
    return {
        "eig2_dim": len(e2),
        "ker_lambda_dim": int(k_rows.shape[0]),
        "eig2_in_ker_lambda": lam_res,
        "ker_lambda_in_eig2_plus_eigm1": poly_res,
    }
