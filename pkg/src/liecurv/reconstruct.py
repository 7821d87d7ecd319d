"""Recovering simple ideals, brackets and complex structures from a bare Cartan 3-form.

The kernel of Delta: mu -> Phi(C, mu) is a direct sum over the simple ideals.
Products ``mu nu^{-1}`` with ``nu`` a nondegenerate kernel element are
block-diagonal; the centre of the algebra they generate is spanned by
field-valued blocks whose primitive idempotents project onto the ideals.
Each candidate ideal is then certified: a kernel element with exactly that
image (rank 3 or at least 6), block-diagonality of the 3-form, and the
Jacobi identity of the bracket rebuilt from it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import exact
from .curvops import FourForm, _alternate, alternating_matrix, sym_dim, vector_to_sym, wedge_pairs
from .liecore import killing_form
from .structure import FLOAT, RATIONAL, StructureConstants, jacobi_violations


class NotCartanFormError(ValueError):
    """The input is not the Cartan 3-form of a semisimple Lie algebra."""

    def __init__(self, detail: str):
        super().__init__(f"not a semisimple Cartan three-form: {detail}")


class ComplexTypeError(ValueError):
    """The pencil does not define a complex structure."""


# ----------------------------------------------------------------- Phi, Delta

def _pairs3(c3: np.ndarray) -> np.ndarray:
    i, j = wedge_pairs(c3.shape[0])
    return np.array(c3[i, j, :])


def phi(c3, mu) -> FourForm:
    """Phi(C, mu)(x,y,z,w) = mu(C(x,y),C(z,w)) + mu(C(y,z),C(x,w)) + mu(C(z,x),C(y,w))."""
    c3 = np.asarray(c3)
    mu = np.asarray(mu)
    d = c3.shape[0]
    if c3.shape != (d, d, d) or mu.shape != (d, d):
        raise ValueError(f"dimension mismatch: 3-form {c3.shape}, 2-tensor {mu.shape}")
    ex = c3.dtype == object
    pc = _pairs3(c3)
    if ex:
        mu = exact.fractions(mu)
        p = exact.matmul(exact.matmul(pc, mu), pc.T)
    else:
        p = pc @ np.asarray(mu, dtype=float) @ pc.T
    return _alternate(p, d, ex)


def delta_kernel(c3) -> list[np.ndarray]:
    """Exact basis (reduced) of {mu symmetric : Phi(C, mu) = 0}."""
    c3 = exact.fractions(c3)
    d = c3.shape[0]
    num, _ = exact.to_integer(_pairs3(c3))
    mat = alternating_matrix(num, d)
    n = sym_dim(d)
    if mat.shape[0] == 0:
        rows = exact.fractions(np.eye(n, dtype=np.int64))
    else:
        rows = exact.nullspace(np.asarray(mat, dtype=object))
    return [vector_to_sym(r, d) for r in rows]


# ----------------------------------------------------------- bracket from C, beta

@dataclass
class BracketReport:
    bracket: StructureConstants
    jacobi_violations: list
    killing_matches: bool

    @property
    def ok(self) -> bool:
        return not self.jacobi_violations and self.killing_matches


def bracket_from(c3, upper, name: str = "recovered") -> StructureConstants:
    """C_ij^k = C_ijr upper^{rk}."""
    c3 = np.asarray(c3)
    d = c3.shape[0]
    if c3.dtype == object:
        c = exact.matmul(c3.reshape(d * d, d), exact.fractions(upper)).reshape(d, d, d)
        return StructureConstants.from_dense(name, c, RATIONAL)
    c = (c3.reshape(d * d, d) @ np.asarray(upper, dtype=float)).reshape(d, d, d)
    return StructureConstants.from_dense(name, c, FLOAT, atol=1e-12)


def recover_bracket(c3, beta, name: str = "recovered") -> BracketReport:
    """Rebuild the bracket from a Cartan 3-form and its Killing form."""
    c3 = np.asarray(c3)
    ex = c3.dtype == object
    if ex:
        beta = exact.fractions(beta)
        if exact.rank(beta) < beta.shape[0]:
            raise ValueError("Killing form is degenerate")
        inv = exact.inverse(beta)
    else:
        beta = np.asarray(beta, dtype=float)
        inv = exact.float_inverse(beta)
    sc = bracket_from(c3, inv, name)
    bad, _ = jacobi_violations(sc, limit=20, atol=0.0 if ex else 1e-9)
    kb = killing_form(sc)
    match = bool(np.all(kb == beta)) if ex else bool(np.allclose(kb, beta, atol=1e-9))
    return BracketReport(sc, bad, match)


# ------------------------------------------------------------ complex structure

@dataclass
class ComplexStructureResult:
    J: np.ndarray
    exact: bool
    c: Fraction | float


def recover_complex_structure(kappa, lam) -> ComplexStructureResult:
    """J = traceless part of kappa^{-1} lambda, scaled so that J^2 = -Id (up to sign)."""
    kappa = np.asarray(kappa)
    ex = kappa.dtype == object or np.asarray(lam).dtype == object
    d = kappa.shape[0]
    if ex:
        kappa = exact.fractions(kappa)
        lam = exact.fractions(lam)
        try:
            m = exact.matmul(exact.inverse(kappa), lam)
        except np.linalg.LinAlgError:
            raise ComplexTypeError("pencil not of complex type: first form is degenerate") from None
        tr = sum(m[k, k] for k in range(d))
        m0 = m - exact.fractions(np.eye(d, dtype=np.int64)) * (tr / d)
        sq = exact.matmul(m0, m0)
        c = sq[0, 0]
        if not np.all(sq == exact.fractions(np.eye(d, dtype=np.int64)) * c) or c >= 0:
            raise ComplexTypeError("pencil not of complex type")
        root = exact.rational_sqrt(-c)
        if root is not None:
            return ComplexStructureResult(m0 / root, True, c)
        mf = np.array(m0, dtype=float)
        return ComplexStructureResult(mf / np.sqrt(float(-c)), False, c)
    kappa = np.asarray(kappa, dtype=float)
    lam = np.asarray(lam, dtype=float)
    m = np.linalg.solve(kappa, lam)
    m0 = m - np.trace(m) / d * np.eye(d)
    sq = m0 @ m0
    c = float(np.trace(sq) / d)
    if c >= 0 or not np.allclose(sq, c * np.eye(d), atol=1e-9 * max(1.0, abs(c))):
        raise ComplexTypeError("pencil not of complex type")
    return ComplexStructureResult(m0 / np.sqrt(-c), False, c)


# ---------------------------------------------------------------- decomposition

def _matpow_poly(z: np.ndarray, coeffs: list[Fraction]) -> np.ndarray:
    """Evaluate sum coeffs[k] z^k (coefficients from the highest degree down)."""
    d = z.shape[0]
    eye = exact.fractions(np.eye(d, dtype=np.int64))
    acc = eye * Fraction(0)
    for c in coeffs:
        acc = exact.matmul(acc, z) + eye * c
    return acc


def minimal_polynomial(z: np.ndarray) -> list[Fraction]:
    """Monic minimal polynomial of a rational matrix, coefficients from the highest degree."""
    d = z.shape[0]
    powers = [exact.fractions(np.eye(d, dtype=np.int64))]
    while True:
        powers.append(exact.matmul(powers[-1], z))
        stack = np.array([p.reshape(-1) for p in powers], dtype=object)
        ns = exact.nullspace(stack.T)
        if ns.shape[0]:
            v = ns[0]
            top = v[len(powers) - 1]
            return [v[k] / top for k in range(len(powers) - 1, -1, -1)]


def _factor(coeffs: list[Fraction]) -> list[list[Fraction]]:
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    _, facs = poly.factor_list()
    out = []
    for f, mult in facs:
        g = f ** mult
        lc = g.LC()
        out.append([Fraction(int(sympy.fraction(c / lc)[0]), int(sympy.fraction(c / lc)[1])) for c in g.all_coeffs()])
    return out


def _columns(rows: np.ndarray) -> np.ndarray:
    return np.asarray(rows, dtype=object).T


def _restrict(z: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Matrix of z on the invariant subspace spanned by the columns of ``basis``."""
    rows = list(exact.rref(basis.T)[1])
    sub = basis[rows, :]
    left = exact.inverse(sub)
    img = exact.matmul(z, basis)
    y = exact.matmul(left, img[rows, :])
    if not np.all(exact.matmul(basis, y) == img):
        raise NotCartanFormError("candidate block is not invariant")
    return y


def _split_block(z: np.ndarray, basis: np.ndarray) -> list[np.ndarray]:
    """Split an invariant subspace by the rational factorization of z's minimal polynomial."""
    y = _restrict(z, basis)
    facs = _factor(minimal_polynomial(y))
    if len(facs) == 1:
        return [basis]
    parts = []
    for f in facs:
        ker = exact.nullspace(_matpow_poly(y, f))
        parts.append(exact.matmul(basis, _columns(ker)))
    return parts


def _algebra_closure(gens: list[np.ndarray], limit: int) -> list[np.ndarray]:
    """Basis of the unital associative algebra generated by ``gens``."""
    d = gens[0].shape[0]
    eye = exact.fractions(np.eye(d, dtype=np.int64))
    basis: list[np.ndarray] = []
    echelon: dict[int, np.ndarray] = {}   # pivot position -> reduced vector with 1 there

    def add(m) -> bool:
        v = m.reshape(-1).copy()
        for piv, b in echelon.items():
            if v[piv] != 0:
                v = v - v[piv] * b
        nz = np.flatnonzero(v != 0)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        v = v / v[piv]
        for q, b in echelon.items():
            if b[piv] != 0:
                echelon[q] = b - b[piv] * v
        echelon[piv] = v
        basis.append(m)
        return True

    add(eye)
    for g in gens:
        add(g)
    frontier = list(basis)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                p = exact.matmul(a, g)
                if add(p):
                    nxt.append(p)
            if len(basis) > limit:
                raise NotCartanFormError("generated algebra too large")
        frontier = nxt
    return basis


def _center(basis: list[np.ndarray], gens: list[np.ndarray]) -> list[np.ndarray]:
    d = basis[0].shape[0]
    k = len(basis)
    eqs = []
    for g in gens:
        cols = [(exact.matmul(b, g) - exact.matmul(g, b)).reshape(-1) for b in basis]
        eqs.append(np.array(cols, dtype=object).T)
    system = np.vstack(eqs) if eqs else np.zeros((0, k), dtype=object)
    coeffs = exact.nullspace(system)
    out = []
    for c in coeffs:
        m = basis[0] * c[0]
        for t in range(1, k):
            m = m + basis[t] * c[t]
        out.append(m)
    return out


def _nondegenerate(kernel: list[np.ndarray], rng: random.Random) -> np.ndarray:
    for mu in kernel:
        if exact.det(mu) != 0:
            return mu
    for _ in range(40):
        mu = sum((k * Fraction(rng.randint(-5, 5)) for k in kernel), kernel[0] * 0)
        if exact.det(mu) != 0:
            return mu
    raise NotCartanFormError("no nondegenerate element in the kernel of Delta")


@dataclass
class Summand:
    basis: np.ndarray                 # d x k columns spanning the ideal
    dim: int
    witness: np.ndarray               # kernel element with image = span(basis)
    bracket: StructureConstants      # bracket on the ideal rebuilt from C and the witness
    jacobi_ok: bool
    ker_lambda_dim: int | None = None
    has_complex_structure: bool | None = None
    fingerprint: dict = field(default_factory=dict)


@dataclass
class SummandReport:
    summands: list[Summand]
    kernel_dim: int

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.summands]

    @property
    def subspaces(self) -> list[np.ndarray]:
        return [s.basis for s in self.summands]

    @property
    def certified(self) -> bool:
        return all(s.jacobi_ok for s in self.summands)


def summands_from_threeform(c3, seed: int = 0, identify: bool = True) -> SummandReport:
    """Recover the simple ideals of the algebra whose Cartan 3-form is ``c3``."""
    c3 = exact.fractions(c3)
    d = c3.shape[0]
    rng = random.Random(seed)
    kernel = delta_kernel(c3)
    if not kernel:
        raise NotCartanFormError("the kernel of Delta is trivial")
    nu = _nondegenerate(kernel, rng)
    nu_inv = exact.inverse(nu)
    gens = [exact.matmul(mu, nu_inv) for mu in kernel]
    alg = _algebra_closure(gens, limit=d * d)
    centre = _center(alg, gens)

    blocks = [exact.fractions(np.eye(d, dtype=np.int64))]
    probes = list(centre)
    for _ in range(3):
        probes.append(sum((z * Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for z in centre), centre[0] * 0))
    for z in probes:
        nxt = []
        for b in blocks:
            nxt.extend(_split_block(z, b))
        blocks = nxt
    blocks = [_column_echelon(b) for b in blocks]
    blocks.sort(key=lambda b: (b.shape[1], _first_support(b)))

    full = np.concatenate(blocks, axis=1)
    if full.shape[1] != d or exact.rank(full) != d:
        raise NotCartanFormError("recovered blocks do not span the space")
    dual = exact.inverse(full)  # rows: dual basis adapted to the blocks
    _check_block_diagonal(c3, full, [b.shape[1] for b in blocks])

    summands = []
    start = 0
    for b in blocks:
        k = b.shape[1]
        rows = dual[start:start + k, :]
        start += k
        # kernel element nu restricted to the block: nu = sum_t B_t nu_t B_t^T
        nu_t = exact.matmul(exact.matmul(rows, nu), rows.T)
        witness = exact.matmul(exact.matmul(b, nu_t), b.T)
        if any(v != 0 for v in phi(c3, witness).entries.values()):
            raise NotCartanFormError("block projection of the kernel element leaves the kernel")
        rank = exact.rank(witness)
        if rank != k or not (k == 3 or k >= 6):
            raise NotCartanFormError(f"block of dimension {k} has an image of rank {rank}")
        c3b = _restrict_form(c3, b)
        br = bracket_from(c3b, nu_t, name=f"block{len(summands)}")
        bad, _ = jacobi_violations(br, limit=1)
        summands.append(Summand(b, k, witness, br, not bad))
    report = SummandReport(summands, len(kernel))
    if not report.certified:
        raise NotCartanFormError("a recovered block fails the Jacobi identity")
    if identify:
        for s in summands:
            s.fingerprint = identify_summand(s.basis, c3)
            s.ker_lambda_dim = s.fingerprint["ker_lambda_dim"]
            s.has_complex_structure = s.fingerprint["complex"]
    return report


def _column_echelon(b: np.ndarray) -> np.ndarray:
    """Reduced column echelon basis of the column space, scaled to primitive integer columns."""
    red, _ = exact.rref(b.T)
    return _columns(exact.fractions(exact.scale_rows_to_integers(red[: b.shape[1]])))


def _first_support(b: np.ndarray) -> int:
    nz = np.flatnonzero(np.any(b != 0, axis=1))
    return int(nz[0]) if nz.size else 0


def _restrict_form(c3: np.ndarray, basis: np.ndarray) -> np.ndarray:
    d = c3.shape[0]
    k = basis.shape[1]
    t = exact.matmul(basis.T, c3.reshape(d, d * d)).reshape(k, d, d)
    t = exact.matmul(t.transpose(0, 2, 1).reshape(k * d, d), basis).reshape(k, d, k)
    t = exact.matmul(t.transpose(0, 2, 1).reshape(k * k, d), basis).reshape(k, k, k)
    return t


def _check_block_diagonal(c3: np.ndarray, full: np.ndarray, sizes: list[int]) -> None:
    adapted = _restrict_form(c3, full)
    label = np.repeat(np.arange(len(sizes)), sizes)
    i, j, k = np.nonzero(adapted != 0)
    if np.any((label[i] != label[j]) | (label[j] != label[k])):
        raise NotCartanFormError("the 3-form mixes recovered blocks")


# -------------------------------------------------------------- identification

def _catalog(max_dim: int) -> list[tuple[str, int, bool, object]]:
    from .spectra import meyberg_table, real_form_spectrum

    out = []
    for n in range(2, 12):
        if n * n - 1 <= max_dim:
            out.append((f"sl{n}", n * n - 1, False, meyberg_table("sl", n)))
    for n in range(4, 14, 2):
        if n * (n + 1) // 2 <= max_dim:
            out.append((f"sp{n}", n * (n + 1) // 2, False, meyberg_table("sp", n)))
    for n in [7, 8] + list(range(9, 16)):
        if n * (n - 1) // 2 <= max_dim:
            out.append((f"so{n}", n * (n - 1) // 2, False, meyberg_table("so", n)))
    for name, dim in (("g2", 14), ("f4", 52), ("e6", 78)):
        if dim <= max_dim:
            out.append((name, dim, False, meyberg_table("exceptional", name)))
    complex_entries = [(f"{nm} realified", 2 * dm, True, real_form_spectrum(t, "b")) for nm, dm, _, t in out if 2 * dm <= max_dim]
    return out + complex_entries


def identify_summand(subspace, c3) -> dict:
    """Dimension, kernel dimension, complex flag and spectrum match for one recovered ideal."""
    from .spectra import computed_spectrum, lambda_kernel_vectors

    basis = exact.fractions(subspace)
    k = basis.shape[1]
    if k == 3:
        return {"dim": 3, "ker_lambda_dim": 6, "complex": False, "match": "type undetermined beyond dimension"}
    c3b = _restrict_form(exact.fractions(c3), basis)
    kernel = delta_kernel(c3b)
    if not kernel:
        raise NotCartanFormError("summand has trivial Delta kernel")
    nu = _nondegenerate(kernel, random.Random(0))
    br = bracket_from(c3b, nu, name="summand")
    kdim = int(lambda_kernel_vectors(br).shape[0])
    cx = kdim in (2, 12)
    info = {"dim": k, "ker_lambda_dim": kdim, "complex": cx}
    if k == 6 and kdim == 12:
        info["match"] = "sl2 realified (dim-6 special case)"
        return info
    found = computed_spectrum(br)
    info["spectrum"] = found.to_json()
    matches = [nm for nm, dm, c, t in _catalog(k) if dm == k and c == cx and t.as_dict() == found.as_dict()]
    info["match"] = matches[0] if matches else "unrecognized"
    return info
