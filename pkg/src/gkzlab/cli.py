"""Command-line front end: JSON job specs in, deterministic JSON reports out.

Exit codes: 0 success, 2 schema error, 3 precondition failure, 4 numerical
failure, 5 indeterminate decision.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .arrangement import (Box, Hyperplane, Zonotope, fixed_arrangement, periodic_arrangement,
                          stratify, supporting_hyperplanes)
from .errors import DimensionMismatch, IndeterminateError, NumericalFailure, PreconditionError
from .exact import fmt, same_row_space, to_fraction
from .gkz import apply_operator, build_gkz, check_nonresonant, series_solution
from .lattice import (IntegerMatrix, KernelBasis, ToricInput, is_quasi_symmetric, is_unimodular_weights,
                      kernel_basis, smith_invariants)
from .monodromy import (GaussParams, Loop, circle_loop, compare_up_to_conjugacy, companion_system,
                        conifold_k0_rep, conifold_torus_point, continue_along, euler_ode, gauss_closed_form,
                        gauss_closed_form_rep, gauss_integer_matrices, gauss_ode, monodromy_rep)
from .perverse import (CLASSES, PerverseDatum, cross_poset, example_datum_rank1, identity_datum, line_poset,
                       mutated_cross_datum, square_poset, validate)
from .windows import enumerate_window, lift_characters, specialize

EXIT_OK, EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_NUMERICAL, EXIT_INDETERMINATE = 0, 2, 3, 4, 5

DEFAULT_ODE_TOL = 1e-12
DEFAULT_COMPARE_TOL = 1e-8


class SchemaError(Exception):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("gkzlab").joinpath("schemas", name).read_text())


def spec_hash(spec: dict) -> str:
    canon = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# value decoding
# --------------------------------------------------------------------------

def _rational(v) -> Fraction:
    return to_fraction(v)


def _complex_or_rational(v):
    """Rationals stay exact; ``[re, im]`` pairs become complex."""
    if isinstance(v, list):
        return complex(v[0], v[1])
    return to_fraction(v)


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _matrix_json(M) -> list:
    return [[_cplx(x) for x in row] for row in np.asarray(M)]


def _toric(spec) -> ToricInput:
    if "B" not in spec:
        raise SchemaError("this command needs a weight matrix 'B'")
    rows = spec["B"]
    if len({len(r) for r in rows}) != 1:
        raise SchemaError("rows of 'B' must have equal length")
    return ToricInput.from_rows(rows)


def _box(spec, n: int):
    b = spec.get("box")
    if b is None:
        return Box.default(n)
    if isinstance(b, str):
        return Box.parse(b, n)
    if len(b) != n:
        raise SchemaError(f"'box' needs {n} intervals")
    return Box(tuple(_rational(lo) for lo, _ in b), tuple(_rational(hi) for _, hi in b))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_analyze(spec: dict) -> dict:
    inp = _toric(spec)
    kb = kernel_basis(inp)
    z = Zonotope.from_input(inp)
    hs = supporting_hyperplanes(z)
    arr = periodic_arrangement(inp, _box(spec, inp.n), spec.get("translation"))
    poset = stratify(arr)
    return {
        "B": inp.B.to_rows(),
        "kernel_basis": [list(r) for r in kb.rows()],
        "unimodular": is_unimodular_weights(inp),
        "quasi_symmetric": is_quasi_symmetric(inp),
        "delta": {"hyperplanes": [h.to_json() for h in hs],
                  "bounding_box": [[fmt(a), fmt(b)] for a, b in z.bounding_box()]},
        "arrangement": arr.to_json(),
        "faces": [f.to_json() for f in poset.faces],
        "face_counts": {str(k): v for k, v in poset.counts_by_dim().items()},
    }


def cmd_windows(spec: dict) -> dict:
    inp = _toric(spec)
    if "nu" not in spec:
        raise SchemaError("'windows' needs 'nu'")
    if len(spec["nu"]) != inp.n:
        raise SchemaError(f"'nu' must have length {inp.n}")
    w = enumerate_window([_rational(x) for x in spec["nu"]], Zonotope.from_input(inp))
    lifts = lift_characters(w, inp)
    return {"window": w.to_json(), "count": len(w.characters),
            "lifts": [{"mu": list(c.mu), "mu_hat": list(c.mu_hat)} for c in lifts]}


def _kernel_for(spec, inp: ToricInput) -> KernelBasis:
    kb = kernel_basis(inp)
    if "A" not in spec:
        return kb
    A = IntegerMatrix.from_rows(spec["A"], cols=inp.d)
    if A.rows != kb.rank or not same_row_space(A.to_rows(), kb.A.to_rows()) or \
            (A.rows and not (A @ inp.B.T).is_zero()):
        raise DimensionMismatch("'A' is not a lattice basis of the kernel of B")
    if A.rows and any(s != 1 for s in smith_invariants(A)):
        raise DimensionMismatch("'A' is not saturated")
    return KernelBasis(A)


def cmd_gkz(spec: dict, truncation: int | None = None) -> dict:
    inp = _toric(spec)
    kb = _kernel_for(spec, inp)
    gamma = [_complex_or_rational(g) for g in spec["gamma"]] if "gamma" in spec else None
    if gamma is not None and len(gamma) != inp.d:
        raise SchemaError(f"'gamma' must have length {inp.d}")
    if "alpha" in spec:
        alpha = [_complex_or_rational(a) for a in spec["alpha"]]
    elif gamma is not None:
        alpha = [sum((a * g for a, g in zip(kb.A.row(i), gamma)), Fraction(0)) for i in range(kb.rank)]
    else:
        raise SchemaError("'gkz' needs 'alpha' or 'gamma'")
    system = build_gkz(inp, kb, alpha, spec.get("L", 2))
    try:
        nonres = check_nonresonant(kb, alpha)
    except PreconditionError as exc:
        nonres = None
        note = str(exc)
    else:
        note = None
    out = {"system": system.to_json(), "nonresonant": nonres}
    if note:
        out["nonresonant_note"] = note
    if gamma is not None:
        N = truncation if truncation is not None else spec.get("N", 3)
        s = series_solution(system, gamma, N)
        residuals = []
        for kind, ops, labels in (("homogeneity", system.homogeneity_ops, range(len(system.homogeneity_ops))),
                                  ("box", system.box_ops, system.box_vectors)):
            for lab, op in zip(labels, ops):
                r = apply_operator(op, s)
                residuals.append({"kind": kind, "label": lab if kind == "homogeneity" else list(lab),
                                  "interior_max": float(r.interior_max), "boundary_max": float(r.boundary_max),
                                  "interior_exact_zero": not r.interior,
                                  "boundary_sources": sorted(list(m) for m in r.boundary_sources)})
        out["series"] = s.to_json()
        out["residuals"] = residuals
        out["interior_all_zero"] = all(r["interior_exact_zero"] for r in residuals)
    return out


def cmd_monodromy(spec: dict, tol: float = DEFAULT_ODE_TOL, compare_tol: float = DEFAULT_COMPARE_TOL) -> dict:
    base = complex(*spec["base"]) if "base" in spec else None
    m = spec.get("polygon_vertices", 32)
    if "gauss" in spec:
        g = spec["gauss"]
        a, b, c = (_complex_or_rational(g[k]) for k in "abc")
        p = GaussParams(a, b, c)
        out = {"equation": {"type": "gauss", "a": _cplx(a), "b": _cplx(b), "c": _cplx(c)}, "warnings": []}
        closed = gauss_closed_form(p)
        out["closed_form"] = {k: _matrix_json(v) for k, v in sorted(closed.items())}
        if all(isinstance(v, Fraction) and v == 0 for v in (a, b, c)):
            out["integer_matrices"] = gauss_integer_matrices()
        h = conifold_torus_point(a, b, c)
        k0 = conifold_k0_rep()
        out["k0_specialization_defect"] = max(float(np.max(np.abs(specialize(k0[k], h) - closed[k]))) for k in closed)
        if p.resonant():
            out["warnings"].append("resonant parameters: numeric continuation skipped, closed form only")
            return out
        base = base if base is not None else complex(0.5, -0.5)
        rep = monodromy_rep(companion_system(gauss_ode(a, b, c)), base, tol, m)
        cmp = compare_up_to_conjugacy(rep, gauss_closed_form_rep(p), compare_tol)
        out["numeric"] = rep.to_json()
        out["comparison"] = cmp.to_json()
        return out
    if "euler" in spec:
        alpha = _complex_or_rational(spec["euler"]["alpha"])
        sys_ = companion_system(euler_ode(alpha))
        base = base if base is not None else complex(1, 0)
        rep = monodromy_rep(sys_, base, tol, m)
        transports = []
        for k in spec["euler"].get("windings", [1]):
            T = continue_along(sys_, winding_loop(k, m), tol)
            expect = np.exp(2j * np.pi * k * complex(alpha))
            transports.append({"winding": k, "transport": _cplx(T[0, 0]), "expected": _cplx(expect),
                               "error": float(abs(T[0, 0] - expect))})
        return {"equation": {"type": "euler", "alpha": _cplx(alpha)}, "warnings": [],
                "numeric": rep.to_json(), "windings": transports}
    raise SchemaError("'monodromy' needs 'gauss' or 'euler'")


def winding_loop(k: int, m: int) -> Loop:
    """Unit circle about 0 traversed ``k`` times; ``k = 0`` goes around and back."""
    if k:
        return circle_loop(0, 1, m, k)
    out, back = circle_loop(0, 1, m, 1), circle_loop(0, 1, m, -1)
    return Loop(out.base, out.vertices + back.vertices[1:])


_POSETS = {"line": line_poset, "cross": cross_poset, "square": square_poset}


def cmd_verify_perverse(spec: dict, seed: int = 0, tol: float | None = None) -> dict:
    pv = spec.get("perverse", {"fixture": "rank1", "a": 1, "b": 1})
    exact = spec.get("collinear_exact", True)
    fixture = pv["fixture"]
    if fixture == "rank1":
        a, b = _complex_or_rational(pv.get("a", 1)), _complex_or_rational(pv.get("b", 1))
        p, d = line_poset(), example_datum_rank1(a, b)
    elif fixture == "identity":
        p = _POSETS[pv.get("poset", "line")]()
        d = identity_datum(p)
    elif fixture == "custom":
        if "hyperplanes" not in pv or "datum" not in pv:
            raise SchemaError("custom fixture needs 'hyperplanes' and 'datum'")
        hs = [Hyperplane.make(h["normal"], _rational(h["offset"])) for h in pv["hyperplanes"]]
        n = len(hs[0].normal) if hs else 1
        p = stratify(fixed_arrangement(hs, _box(spec, n)))
        d = PerverseDatum.from_json(pv["datum"])
    elif fixture == "fuzz":
        rng = np.random.default_rng(seed)
        trials = pv.get("trials", 20)
        kinds = ("valid",) + CLASSES
        rows = []
        for t in range(trials):
            kind = kinds[t % len(kinds)]
            p, d = mutated_cross_datum(kind, rng)
            r = validate(p, d, tol, exact=exact)
            found = sorted(r.classes())
            rows.append({"trial": t, "mutation": kind, "classes": found,
                         "ok": found == ([] if kind == "valid" else [kind])})
        return {"pass": all(r["ok"] for r in rows), "seed": seed, "trials": rows}
    else:  # guarded by the schema
        raise SchemaError(f"unknown fixture {fixture!r}")
    rep = validate(p, d, tol, exact=exact)
    out = rep.to_json()
    out["faces"] = [f.signs for f in p.faces]
    out["fixture"] = fixture
    return out


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

COMMANDS = ("analyze", "windows", "gkz", "monodromy", "verify-perverse")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkzlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gkzlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--spec", required=name not in ("verify-perverse",), help="job spec JSON file")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--tol", type=float, help="numerical tolerance override")
        sp.add_argument("--box", help='clipping box "lo,hi" or "lo1,hi1,...,lon,hin"')
        sp.add_argument("--truncation", type=int, help="series truncation order N")
        sp.add_argument("--seed", type=int, default=0, help="seed for fuzz fixtures")
    return ap


def run(argv=None) -> tuple[int, str, str]:
    """Run the CLI and return ``(exit code, stdout text, stderr text)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            with open(args.spec) as fh:
                spec = json.load(fh)
        else:
            spec = {}
        if args.box is not None:
            spec["box"] = args.box
        if args.truncation is not None:
            spec["N"] = args.truncation
        if args.tol is not None:
            spec["tol"] = args.tol
        jsonschema.validate(spec, load_schema("jobspec.schema.json"))
    except (OSError, json.JSONDecodeError) as exc:
        return EXIT_SCHEMA, "", f"error: cannot read spec: {exc}\n"
    except jsonschema.ValidationError as exc:
        return EXIT_SCHEMA, "", f"schema error: {exc.message}\n"
    ode_tol = spec.get("tol", DEFAULT_ODE_TOL)
    compare_tol = DEFAULT_COMPARE_TOL
    tolerances = {"ode": ode_tol, "compare": compare_tol, "matrix": spec.get("tol")}
    try:
        if args.command == "analyze":
            result = cmd_analyze(spec)
        elif args.command == "windows":
            result = cmd_windows(spec)
        elif args.command == "gkz":
            result = cmd_gkz(spec)
        elif args.command == "monodromy":
            result = cmd_monodromy(spec, ode_tol, compare_tol)
        else:
            result = cmd_verify_perverse(spec, args.seed, spec.get("tol"))
    except SchemaError as exc:
        return EXIT_SCHEMA, "", f"schema error: {exc}\n"
    except PreconditionError as exc:
        return EXIT_PRECONDITION, "", f"precondition failed ({type(exc).__name__}): {exc}\n"
    except NumericalFailure as exc:
        return EXIT_NUMERICAL, "", f"numerical failure ({type(exc).__name__}): {exc}\n"
    except IndeterminateError as exc:
        return EXIT_INDETERMINATE, "", f"indeterminate ({type(exc).__name__}): {exc}\n"
    except ValueError as exc:
        return EXIT_PRECONDITION, "", f"precondition failed: {exc}\n"
    report = {"command": args.command, "version": __version__, "spec_sha256": spec_hash(spec),
              "tolerances": tolerances, "result": result}
    jsonschema.validate(report, load_schema("report.schema.json"))
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        return EXIT_OK, "", ""
    return EXIT_OK, text, ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
