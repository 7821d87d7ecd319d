"""Command-line interface: construct algebras, verify identities and spectra, decompose 3-forms.

Exit codes: 0 success, 2 usage error, 3 size cap exceeded, 4 mathematical rejection
(a failed check, a degenerate Killing form, or a 3-form that is not a Cartan form).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact, formats
from .caps import CapExceeded, caps
from .chevalley import chevalley
from .curvops import sym_dim, theorem_a_basis_residual, theorem_a_residual, identity_32_residual, lambda_apply
from .liecore import (
    NotSemisimpleError,
    cartan_identity_check,
    cartan_three_form,
    killing_form,
    killing_rank,
    require_semisimple,
    three_form_antisymmetry_residual,
)
from .realforms import change_basis, direct_sum, realify, sl_quaternion, sl_real, su_pq
from .reconstruct import ComplexTypeError, NotCartanFormError, recover_bracket, summands_from_threeform
from .spectra import KERNEL_LABELS, SpectrumTable, ker_lambda, table_from_metadata, verify_spectrum
from .structure import StructureConstants, jacobi_violations

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_REJECT = 0, 2, 3, 4
CHECKS = ("theorem-a", "jacobi", "killing", "cartan-identity", "lambda-beta", "identity-32")


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ output

def _text(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def _json_default(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer, np.floating)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def emit(report: dict, rows: list[dict], fmt: str, out) -> None:
    """Print a report: JSON (whole report), aligned table or CSV (rows only)."""
    if fmt == "json":
        out.write(json.dumps(report, default=_json_default, indent=1) + "\n")
        return
    if not rows:
        out.write(f"{report.get('summary', '')}\n")
        return
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_text(r.get(c, "")) for c in cols])
        out.write(buf.getvalue())
        return
    cells = [[_text(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() + "\n")
    if report.get("summary"):
        out.write(f"{report['summary']}\n")


# ------------------------------------------------------------------ construct

def algebra_from_text(text: str) -> tuple[StructureConstants, object]:
    """Parse ``FAMILY:ARGS[@R]``, e.g. ``A:2``, ``su:2,1``, ``sl-real:3``, ``sl-quat:2``, ``A:1@R``."""
    body, _, suffix = text.partition("@")
    fam, _, args = body.partition(":")
    nums = [int(x) for x in args.split(",") if x.strip()] if args else []
    sc = _build(fam.strip(), nums)
    if suffix:
        if suffix.upper() != "R":
            raise UsageError(f"unknown suffix @{suffix} in {text!r}; only @R (realify) is supported")
        return realify(sc)
    return sc, None


def _build(family: str, nums: list[int]) -> StructureConstants:
    try:
        if family.upper() in "ABCDEFG" and len(family) == 1:
            if len(nums) != 1:
                raise UsageError(f"family {family} needs exactly one rank")
            return chevalley(family.upper(), nums[0])
        if family == "sl-real":
            (n,) = nums
            return sl_real(n)
        if family == "su":
            p, q = nums
            return su_pq(p, q)
        if family == "sl-quat":
            (m,) = nums
            return sl_quaternion(m)
    except ValueError as e:
        if isinstance(e, UsageError):
            raise
        raise UsageError(str(e)) from None
    raise UsageError(f"unknown family {family!r}")


def random_basis_change(d: int, seed: int) -> np.ndarray:
    """Seeded invertible rational matrix with entries in {-3..3} plus small fractions."""
    rng = np.random.default_rng(seed)
    while True:
        num = rng.integers(-3, 4, size=(d, d))
        den = rng.integers(1, 3, size=(d, d))
        p = np.array([[Fraction(int(a), int(b)) for a, b in zip(ra, rb)] for ra, rb in zip(num, den)], dtype=object)
        if exact.det(p) != 0:
            return p


def cmd_construct(args) -> int:
    params = {"rank": args.rank, "p": args.p, "q": args.q, "m": args.m, "n": args.n}
    fam = args.family
    if fam in tuple("ABCDEFG"):
        nums = [params["rank"]]
    elif fam == "sl-real":
        nums = [params["n"] if params["n"] is not None else params["rank"]]
    elif fam == "su":
        nums = [params["p"], params["q"] if params["q"] is not None else 0]
    else:
        nums = [params["m"]]
    if any(x is None for x in nums):
        raise UsageError(f"family {fam} is missing a size parameter")
    sc = _build(fam, nums)
    jm = None
    if args.realify:
        sc, cs = realify(sc)
        jm = cs.J
    if args.sum:
        parts = [sc] + [algebra_from_text(s)[0] for s in args.sum]
        if jm is not None:
            jm = _pad(jm, sum(p.dim for p in parts))
        sc = direct_sum(parts)
    if args.scramble_seed is not None:
        p = random_basis_change(sc.dim, args.scramble_seed)
        sc = change_basis(sc, p)
        sc = sc.with_name(sc.name, scramble_seed=args.scramble_seed)
        if jm is not None:
            jm = exact.matmul(exact.matmul(exact.inverse(p), jm), p)
    if args.emit == "structure-constants":
        data = formats.structure_to_json(sc)
    else:
        try:
            require_semisimple(sc)
        except NotSemisimpleError as e:
            raise UsageError(str(e)) from None
        if args.emit == "three-form":
            data = formats.form_to_json(sc.name, cartan_three_form(sc), 3)
        else:
            data = formats.form_to_json(sc.name, killing_form(sc), 2, symmetric=True)
    if args.output:
        formats.write(args.output, data)
        if jm is not None:
            side = Path(args.output).with_suffix(".J.json")
            formats.write(side, formats.form_to_json(f"{sc.name} J", jm, 2, symmetric=False,
                                                     metadata={"role": "complex-structure"}))
            print(f"wrote {args.output} (dim {sc.dim}) and {side}", file=sys.stderr)
        else:
            print(f"wrote {args.output} (dim {sc.dim})", file=sys.stderr)
    else:
        sys.stdout.write(formats.dumps(data) + "\n")
    return EXIT_OK


def _pad(jm: np.ndarray, d: int) -> np.ndarray:
    out = exact.fractions(np.zeros((d, d), dtype=np.int64))
    k = jm.shape[0]
    out[:k, :k] = jm
    return out


# ------------------------------------------------------------------ spectrum

def cmd_spectrum(args) -> int:
    sc = formats.load_structure(args.input)
    if args.expect == "auto":
        try:
            table = table_from_metadata(sc.metadata)
        except (ValueError, KeyError) as e:
            raise UsageError(f"cannot derive expected table from metadata: {e}") from None
    else:
        table = SpectrumTable.from_json(formats.read(args.expect))
    if table.space_dim != sym_dim(sc.dim):
        raise UsageError(f"expected table covers a space of dimension {table.space_dim}, need {sym_dim(sc.dim)}")
    rep = verify_spectrum(sc, table, args.mode, tol=args.tol)
    data = rep.to_json()
    data["algebra"] = sc.name
    rows = [{"eigenvalue": r["eigenvalue"], "expected": r["expected"], "verified": r["verified"],
             "status": r["status"]} for r in data["rows"]]
    data["summary"] = f"{sc.name}: {'PASS' if rep.passed else 'FAIL'} ({args.mode})"
    emit(data, rows, args.format, sys.stdout)
    return EXIT_OK if rep.passed else EXIT_REJECT


# ------------------------------------------------------------------ verify

def _check(sc: StructureConstants, name: str, samples: int, seed: int) -> dict:
    ex = sc.is_exact
    if name == "jacobi":
        bad, worst = jacobi_violations(sc, limit=10, atol=0.0 if ex else 1e-9)
        return {"residual": worst, "passed": not bad, "details": {"violations": [list(b) for b in bad]}}
    if name == "killing":
        beta = killing_form(sc)
        rank = killing_rank(sc)
        sym = np.abs(beta - beta.T).max(initial=0)
        res = sym
        details = {"rank": rank, "dim": sc.dim}
        if rank == sc.dim:
            res = max(res, three_form_antisymmetry_residual(cartan_three_form(sc)))
        return {"residual": res, "passed": rank == sc.dim and _zero(res, ex), "details": details}
    require_semisimple(sc)
    if name == "cartan-identity":
        res = cartan_identity_check(sc)
        return {"residual": _rel(res, sc), "passed": _zero(_rel(res, sc), ex)}
    if name == "identity-32":
        res = identity_32_residual(sc)
        return {"residual": res, "passed": _zero(res, ex)}
    if name == "lambda-beta":
        res = lambda_apply(sc, killing_form(sc)).max_abs()
        return {"residual": _rel(res, sc), "passed": _zero(_rel(res, sc), ex)}
    if name == "theorem-a":
        if ex and sym_dim(sc.dim) <= caps().sym2 and sc.dim <= 21:
            res = theorem_a_basis_residual(sc)
            return {"residual": res, "passed": res == 0, "details": {"forms": "all basis forms"}}
        rng = np.random.default_rng(seed)
        fsc = sc.as_float()
        worst = 0.0
        for _ in range(samples):
            a = rng.standard_normal((sc.dim, sc.dim))
            worst = max(worst, theorem_a_residual(fsc, (a + a.T) / 2, relative=True))
        return {"residual": worst, "passed": worst <= 1e-9, "details": {"forms": f"{samples} random, seed {seed}"}}
    raise UsageError(f"unknown check {name!r}; known: {', '.join(CHECKS)}")


def _rel(res, sc: StructureConstants):
    if sc.is_exact:
        return res
    scale = float(np.abs(sc.float_dense()).max(initial=1.0)) ** 3
    return float(res) / max(scale, 1e-300)


def _zero(res, ex: bool) -> bool:
    return res == 0 if ex else float(res) <= 1e-9


def cmd_verify(args) -> int:
    names = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s) {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    sc = formats.load_structure(args.input)
    results = []
    for name in names:
        try:
            r = _check(sc, name, args.samples, args.seed)
        except NotSemisimpleError as e:
            r = {"residual": None, "passed": False, "details": {"error": str(e)}}
        status = "pass" if r["passed"] else "fail"
        shown = r["residual"]
        if r["passed"] and sc.is_exact and shown == 0:
            shown = "exact-zero"
        results.append({"check": name, "status": status, "residual": shown, "details": r.get("details", {})})
    ok = all(r["status"] == "pass" for r in results)
    report = {"algebra": sc.name, "scalar": sc.scalar, "passed": ok, "results": results,
              "summary": f"{sc.name}: {'all checks pass' if ok else 'FAILED'}"}
    rows = [{k: r[k] for k in ("check", "status", "residual")} for r in results]
    emit(report, rows, args.format, sys.stdout)
    return EXIT_OK if ok else EXIT_REJECT


# ------------------------------------------------------------------ ker-lambda

def cmd_ker_lambda(args) -> int:
    sc = formats.load_structure(args.input)
    require_semisimple(sc)
    if not sc.is_exact:
        raise UsageError("ker-lambda needs rational structure constants")
    k = ker_lambda(sc)
    report = {"algebra": sc.name, "dim": k.dim, "classification": k.classification,
              "basis": [formats.form_to_json(f"{sc.name} ker {t}", b, 2, symmetric=True)["entries"]
                        for t, b in enumerate(k.basis)]}
    label = KERNEL_LABELS[k.classification]
    report["summary"] = f"dim {k.dim}, {label}" if args.classify else f"dim {k.dim}"
    rows = [{"algebra": sc.name, "dim": k.dim, **({"case": label} if args.classify else {})}]
    emit(report, rows, args.format, sys.stdout)
    if args.classify and k.classification == "other":
        return EXIT_REJECT
    return EXIT_OK


# ------------------------------------------------------------------ decompose

def cmd_decompose(args) -> int:
    data = formats.read(args.three_form)
    if data.get("kind") != formats.FORM or int(data.get("degree", 0)) != 3:
        raise UsageError("--three-form must be a degree-3 form file")
    c3 = formats.form_from_json(data)
    if c3.dtype != object:
        raise UsageError("decompose needs a rational 3-form")
    rep = summands_from_threeform(c3, seed=args.seed)
    summands = []
    for s in rep.summands:
        summands.append({
            "dim": s.dim,
            "basis": [[formats.value_to_json(x, "rational") for x in col] for col in s.basis.T],
            "has_complex_structure": s.has_complex_structure,
            "ker_lambda_dim": s.ker_lambda_dim,
            "match": s.fingerprint.get("match"),
            "certified": s.jacobi_ok,
        })
    report = {"dim": int(c3.shape[0]), "kernel_dim": rep.kernel_dim, "dims": rep.dims,
              "summands": summands, "certified": rep.certified}
    ok = rep.certified
    if args.killing:
        beta = formats.load_form(args.killing)
        br = recover_bracket(c3, beta)
        report["bracket"] = formats.structure_to_json(br.bracket)
        report["bracket_jacobi_clean"] = not br.jacobi_violations
        report["killing_matches"] = br.killing_matches
        ok = ok and br.ok
    report["summary"] = f"{len(summands)} summand(s) of dims {rep.dims}; {'certified' if ok else 'NOT certified'}"
    rows = [{"summand": t, "dim": s["dim"], "ker_lambda_dim": s["ker_lambda_dim"],
             "complex": s["has_complex_structure"], "match": s["match"]} for t, s in enumerate(summands)]
    emit(report, rows, args.format, sys.stdout)
    return EXIT_OK if ok else EXIT_REJECT


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liecurv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def fmt(p, default="table"):
        p.add_argument("--format", choices=("json", "table", "csv"), default=default)

    c = sub.add_parser("construct", help="write structure constants (or derived forms) as JSON")
    c.add_argument("--family", required=True, choices=list("ABCDEFG") + ["sl-real", "su", "sl-quat"])
    for name in ("rank", "p", "q", "m", "n"):
        c.add_argument(f"--{name}", type=int)
    c.add_argument("--realify", action="store_true", help="view the complex algebra as a real one (writes a J sidecar)")
    c.add_argument("--sum", action="append", metavar="SPEC",
                   help="add a direct summand, e.g. A:2, su:2,1, sl-real:3, sl-quat:2, A:1@R (repeatable)")
    c.add_argument("--scramble-seed", type=int, help="apply a seeded random rational basis change")
    c.add_argument("--emit", choices=("structure-constants", "three-form", "killing"), default="structure-constants")
    c.add_argument("--output", "-o")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("spectrum", help="verify the Omega spectrum against a table")
    s.add_argument("--input", required=True)
    s.add_argument("--expect", default="auto", help="'auto' (from metadata) or a spectrum JSON file")
    s.add_argument("--mode", choices=("exact", "float", "matrix-free"), default="exact")
    s.add_argument("--tol", type=float, default=1e-7)
    fmt(s)
    s.set_defaults(func=cmd_spectrum)

    v = sub.add_parser("verify", help="run identity checks")
    v.add_argument("--input", required=True)
    v.add_argument("--checks", default=",".join(CHECKS))
    v.add_argument("--samples", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    fmt(v)
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("ker-lambda", help="kernel of Lambda")
    k.add_argument("--input", required=True)
    k.add_argument("--classify", action="store_true")
    fmt(k)
    k.set_defaults(func=cmd_ker_lambda)

    d = sub.add_parser("decompose", help="recover simple ideals from a bare Cartan 3-form")
    d.add_argument("--three-form", required=True)
    d.add_argument("--killing", help="Killing form file; enables bracket reconstruction")
    d.add_argument("--seed", type=int, default=0)
    fmt(d)
    d.set_defaults(func=cmd_decompose)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        caps()
        return args.func(args)
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (NotCartanFormError, NotSemisimpleError, ComplexTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REJECT
    except (UsageError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
