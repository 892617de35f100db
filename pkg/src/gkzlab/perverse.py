"""Diagram data (E_C, gamma, delta) over a face poset and their validation.

A datum assigns a vector space ``E_C`` (by dimension) to each face and maps
``gamma[(lo, hi)]: E_lo -> E_hi`` and ``delta[(hi, lo)]: E_hi -> E_lo`` to
each comparable pair ``lo <= hi``.  Faces are keyed by their sign strings.

Matrices are numpy arrays.  Object arrays of ``Fraction`` are compared
exactly; anything else is compared with a tolerance.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from .arrangement import (Box, FacePoset, Hyperplane, adjacent_pairs, collinear_triples,
                          fixed_arrangement, stratify)
from .errors import IllDefinedPhi, NoCommonFace, ShapeMismatch
from .exact import rank as exact_rank

FLOAT_TOL = 1e-10

CLASSES = ("functoriality", "inverse", "isomorphism", "composition")


def _is_exact(M: np.ndarray) -> bool:
    return M.dtype == object and all(isinstance(x, (int, Fraction)) for x in M.flat)


def _eye(n: int, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                out[i, j] = Fraction(int(i == j))
        return out
    return np.eye(n, dtype=complex)


def exact_matrix(rows) -> np.ndarray:
    rows = [list(r) for r in rows]
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            out[i, j] = Fraction(v)
    return out


@dataclass
class PerverseDatum:
    dims: dict
    gamma: dict
    delta: dict
    labels: dict = field(default_factory=dict)

    @functools.cached_property
    def exact(self) -> bool:
        # data are treated as immutable once validated
        return all(_is_exact(M) for M in itertools.chain(self.gamma.values(), self.delta.values()))

    def g(self, lo: str, hi: str) -> np.ndarray:
        if lo == hi and (lo, hi) not in self.gamma:
            return _eye(self.dims[lo], self.exact)
        return self.gamma[(lo, hi)]

    def d(self, hi: str, lo: str) -> np.ndarray:
        if lo == hi and (hi, lo) not in self.delta:
            return _eye(self.dims[lo], self.exact)
        return self.delta[(hi, lo)]

    def to_json(self) -> dict:
        def enc(M):
            return [[[complex(x).real, complex(x).imag] for x in row] for row in np.asarray(M)]

        return {
            "faces": [{"signs": s, "dim": n, "label": self.labels.get(s, s)} for s, n in sorted(self.dims.items())],
            "gamma": [{"lower": lo, "upper": hi, "matrix": enc(M)} for (lo, hi), M in sorted(self.gamma.items())],
            "delta": [{"upper": hi, "lower": lo, "matrix": enc(M)} for (hi, lo), M in sorted(self.delta.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "PerverseDatum":
        def dec(rows):
            arr = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
            if np.all(arr.imag == 0) and np.all(arr.real == np.round(arr.real)):
                return exact_matrix([[int(x.real) for x in row] for row in arr])
            return arr.reshape(len(rows), len(rows[0]) if rows else 0)

        dims = {f["signs"]: f["dim"] for f in obj["faces"]}
        labels = {f["signs"]: f.get("label", f["signs"]) for f in obj["faces"]}
        gamma = {(e["lower"], e["upper"]): dec(e["matrix"]) for e in obj["gamma"]}
        delta = {(e["upper"], e["lower"]): dec(e["matrix"]) for e in obj["delta"]}
        return cls(dims, gamma, delta, labels)


@dataclass(frozen=True)
class Violation:
    axiom: str
    cls: str
    faces: tuple[str, ...]
    defect: float

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "class": self.cls, "faces": list(self.faces), "defect": self.defect}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    unchecked: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def classes(self) -> set[str]:
        return {v.cls for v in self.violations}

    def to_json(self) -> dict:
        return {"pass": self.passed, "violations": [v.to_json() for v in self.violations],
                "unchecked": [{"reason": r, "faces": list(f)} for r, f in self.unchecked]}


def _defect(A: np.ndarray, B: np.ndarray) -> float:
    if A.shape != B.shape:
        return float("inf")
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs((A - B).astype(complex))))


def _equal(A, B, tol) -> tuple[bool, float]:
    if tol is None and _is_exact(A) and _is_exact(B):
        eq = A.shape == B.shape and all(x == y for x, y in zip(A.flat, B.flat))
        return eq, 0.0 if eq else _defect(A, B)
    dfc = _defect(A, B)
    return dfc <= (FLOAT_TOL if tol is None else tol), dfc


def _invertible(M: np.ndarray, tol) -> tuple[bool, float]:
    """(invertible, smallest singular value)."""
    if M.shape[0] != M.shape[1]:
        return False, 0.0
    if M.shape[0] == 0:
        return True, float("inf")
    smin = float(np.linalg.svd(M.astype(complex), compute_uv=False)[-1])
    if tol is None and _is_exact(M):
        return exact_rank(M.tolist()) == M.shape[0], smin
    return smin > (FLOAT_TOL if tol is None else tol), smin


# --------------------------------------------------------------------------
# phi
# --------------------------------------------------------------------------

def phi(p: FacePoset, d: PerverseDatum, c1, c2, tol=None) -> np.ndarray:
    """``gamma(C', C2) delta(C1, C')`` for a common lower face ``C'``; every
    choice of ``C'`` is computed and required to agree."""
    s1, s2 = p.face(c1).signs, p.face(c2).signs
    lows = p.lower_bounds(s1, s2)
    if not lows:
        raise NoCommonFace(f"faces {s1} and {s2} have no common lower face")
    first = None
    for k in lows:
        sp = p.faces[k].signs
        val = d.g(sp, s2) @ d.d(s1, sp)
        if first is None:
            first = (sp, val)
            continue
        ok, dfc = _equal(first[1], val, tol)
        if not ok:
            raise IllDefinedPhi(f"phi({s1},{s2}) depends on the lower face: {first[0]} vs {sp} "
                                f"(defect {dfc:.3g})", choices=(first[0], sp))
    return first[1]


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def _check_shapes(p: FacePoset, d: PerverseDatum):
    signs = {f.signs for f in p.faces}
    if set(d.dims) != signs:
        raise ShapeMismatch(f"datum faces {sorted(d.dims)} do not match poset faces {sorted(signs)}")
    for i, j in p.comparable_pairs():
        lo, hi = p.faces[i].signs, p.faces[j].signs
        if i != j and ((lo, hi) not in d.gamma or (hi, lo) not in d.delta):
            raise ShapeMismatch(f"missing maps for {lo} <= {hi}")
        G, D = d.g(lo, hi), d.d(hi, lo)
        if G.shape != (d.dims[hi], d.dims[lo]) or D.shape != (d.dims[lo], d.dims[hi]):
            raise ShapeMismatch(f"maps for {lo} <= {hi} have shapes {G.shape}, {D.shape}")


def validate(p: FacePoset, d: PerverseDatum, tol=None, *, grid: int = 16, exact: bool = True) -> ValidationReport:
    """Check functoriality, ``gamma delta = id``, invertibility of ``phi`` on
    facet-sharing faces of one flat, and ``phi`` composition on collinear
    triples.

    ``phi`` is only well defined once the first two conditions hold, so when
    either fails the last two are recorded as unchecked instead.
    """
    _check_shapes(p, d)
    rep = ValidationReport()
    faces = [f.signs for f in p.faces]
    pairs = [(faces[i], faces[j]) for i, j in p.comparable_pairs()]
    # identities and functoriality
    for s in faces:
        for axiom, M in (("gamma-identity", d.g(s, s)), ("delta-identity", d.d(s, s))):
            ok, dfc = _equal(M, _eye(d.dims[s], d.exact), tol)
            if not ok:
                rep.violations.append(Violation(axiom, "functoriality", (s,), dfc))
    for a, b, c in itertools.product(range(len(faces)), repeat=3):
        if a in (b, c) or b == c or not (p.leq(a, b) and p.leq(b, c)):
            continue
        lo, mid, hi = faces[a], faces[b], faces[c]
        ok, dfc = _equal(d.g(lo, hi), d.g(mid, hi) @ d.g(lo, mid), tol)
        if not ok:
            rep.violations.append(Violation("gamma-functor", "functoriality", (lo, mid, hi), dfc))
        ok, dfc = _equal(d.d(hi, lo), d.d(mid, lo) @ d.d(hi, mid), tol)
        if not ok:
            rep.violations.append(Violation("delta-functor", "functoriality", (hi, mid, lo), dfc))
    for lo, hi in pairs:
        if lo == hi:
            continue
        ok, dfc = _equal(d.g(lo, hi) @ d.d(hi, lo), _eye(d.dims[hi], d.exact), tol)
        if not ok:
            rep.violations.append(Violation("gamma-delta-id", "inverse", (lo, hi), dfc))
    if rep.violations:
        rep.unchecked.append(("phi checks skipped: structural axioms fail", ()))
        return rep
    # isomorphism
    for i, j in adjacent_pairs(p):
        try:
            M = phi(p, d, i, j, tol)
        except IllDefinedPhi as exc:
            rep.violations.append(Violation("phi-well-defined", "isomorphism", exc.choices, float("inf")))
            continue
        ok, smin = _invertible(M, tol)
        if not ok:
            rep.violations.append(Violation("phi-iso", "isomorphism", (faces[i], faces[j]), smin))
    # composition
    triples, undecided = collinear_triples(p, grid=grid, exact=exact)
    for i, j, k in undecided:
        rep.unchecked.append(("collinearity undecided", (faces[i], faces[j], faces[k])))
    for i, j, k in triples:
        try:
            lhs = phi(p, d, i, k, tol)
            rhs = phi(p, d, j, k, tol) @ phi(p, d, i, j, tol)
        except IllDefinedPhi as exc:
            rep.violations.append(Violation("phi-well-defined", "composition", exc.choices, float("inf")))
            continue
        ok, dfc = _equal(lhs, rhs, tol)
        if not ok:
            rep.violations.append(Violation("phi-composition", "composition", (faces[i], faces[j], faces[k]), dfc))
    return rep


# --------------------------------------------------------------------------
# fixtures
# --------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def line_poset(points: tuple = (0,), lo=-1, hi=1) -> FacePoset:
    hs = [Hyperplane.make((1,), x) for x in points]
    return stratify(fixed_arrangement(hs, Box.cube(lo, hi, 1)))


@functools.lru_cache(maxsize=None)
def cross_poset() -> FacePoset:
    """The two coordinate axes in the open square ``(-1, 1)^2`` (shared instance)."""
    hs = [Hyperplane.make((1, 0), 0), Hyperplane.make((0, 1), 0)]
    return stratify(fixed_arrangement(hs, Box.cube(-1, 1, 2)))


@functools.lru_cache(maxsize=None)
def square_poset() -> FacePoset:
    """Lines ``x = +-1/2`` and ``y = +-1/2`` in the open square ``(-1, 1)^2``."""
    h = Fraction(1, 2)
    hs = [Hyperplane.make((1, 0), -h), Hyperplane.make((1, 0), h),
          Hyperplane.make((0, 1), -h), Hyperplane.make((0, 1), h)]
    return stratify(fixed_arrangement(hs, Box.cube(-1, 1, 2)))


def identity_datum(p: FacePoset) -> PerverseDatum:
    dims = {f.signs: 1 for f in p.faces}
    gamma, delta = {}, {}
    for i, j in p.comparable_pairs():
        if i != j:
            lo, hi = p.faces[i].signs, p.faces[j].signs
            gamma[(lo, hi)] = exact_matrix([[1]])
            delta[(hi, lo)] = exact_matrix([[1]])
    return PerverseDatum(dims, gamma, delta)


def _num_matrix(rows, exact: bool) -> np.ndarray:
    return exact_matrix(rows) if exact else np.array(rows, dtype=complex)


def line_datum(p: FacePoset, params: dict | None = None) -> PerverseDatum:
    """Rank-one datum on a point arrangement of a line.

    Each point ``v`` gets ``E_v`` of dimension 2; intervals get dimension 1.
    With ``(a, b) = params[v]``: ``delta`` from the right interval is
    ``e_1``, from the left ``e_2``; ``gamma`` to the right is ``(1, a)`` and to
    the left ``(b, 1)``.  Then ``phi(right, left) = b`` and
    ``phi(left, right) = a``.
    """
    params = params or {}
    dims = {f.signs: (2 if f.dim == 0 else 1) for f in p.faces}
    vals = [v for pair in params.values() for v in pair]
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    gamma, delta = {}, {}
    for i, j in p.comparable_pairs():
        if i == j:
            continue
        v, c = p.faces[i].signs, p.faces[j].signs
        a, b = params.get(v, (1, 1))
        k = v.index("0")
        if c[k] == "+":
            delta[(c, v)] = _num_matrix([[1], [0]], exact)
            gamma[(v, c)] = _num_matrix([[1, a]], exact)
        else:
            delta[(c, v)] = _num_matrix([[0], [1]], exact)
            gamma[(v, c)] = _num_matrix([[b, 1]], exact)
    return PerverseDatum(dims, gamma, delta)


def example_datum_rank1(a, b) -> PerverseDatum:
    """The rank-one datum on the one-point line with faces ``-``, ``0``, ``+``."""
    d = line_datum(line_poset(), {"0": (a, b)})
    d.labels.update({"-": "C-", "0": "C0", "+": "C+"})
    return d


def product_datum(dx: PerverseDatum, dy: PerverseDatum, p: FacePoset, split: int = 1) -> PerverseDatum:
    """Tensor product of data on two factors; product faces are keyed by the
    concatenation of the factor sign strings (first ``split`` characters)."""
    dims = {f.signs: dx.dims[f.signs[:split]] * dy.dims[f.signs[split:]] for f in p.faces}
    gamma, delta = {}, {}
    for i, j in p.comparable_pairs():
        if i == j:
            continue
        lo, hi = p.faces[i].signs, p.faces[j].signs
        lx, ly, hx, hy = lo[:split], lo[split:], hi[:split], hi[split:]
        gamma[(lo, hi)] = np.kron(dx.g(lx, hx), dy.g(ly, hy))
        delta[(hi, lo)] = np.kron(dx.d(hx, lx), dy.d(hy, ly))
    return PerverseDatum(dims, gamma, delta)


def gauge(d: PerverseDatum, g: dict) -> PerverseDatum:
    """Change of basis ``E_C -> g_C E_C``; preserves every axiom and defect pattern."""
    inv = {s: np.linalg.inv(M) for s, M in g.items()}
    gamma = {(lo, hi): g[hi] @ M @ inv[lo] for (lo, hi), M in d.gamma.items()}
    delta = {(hi, lo): g[lo] @ M @ inv[hi] for (hi, lo), M in d.delta.items()}
    return PerverseDatum(dict(d.dims), gamma, delta, dict(d.labels))


# --------------------------------------------------------------------------
# single-axiom mutations for fuzzing
# --------------------------------------------------------------------------

def _rand_c(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def _cross_factors(rng, ax=None, bx=None):
    lp = line_poset()
    ax = _rand_c(rng) if ax is None else ax
    bx = _rand_c(rng) if bx is None else bx
    ay, by = _rand_c(rng), _rand_c(rng)
    return line_datum(lp, {"0": (ax, bx)}), line_datum(lp, {"0": (ay, by)}), (ax, bx, ay, by)


def _kernels(a, b):
    """Kernel vectors of ``gamma_+ = (1, a)`` and ``gamma_- = (b, 1)``."""
    return {"+": np.array([-a, 1], dtype=complex), "-": np.array([1, -b], dtype=complex)}


def mutated_cross_datum(kind: str, rng: np.random.Generator) -> tuple[FacePoset, PerverseDatum]:
    """A datum on the cross arrangement violating exactly the axiom class ``kind``
    (or none for ``"valid"``), randomly gauge transformed."""
    p = cross_poset()
    if kind == "isomorphism":
        dx, dy, _ = _cross_factors(rng, ax=0)
    else:
        dx, dy, (ax, bx, ay, by) = _cross_factors(rng)
    d = product_datum(dx, dy, p)
    d = PerverseDatum(d.dims, {k: v.astype(complex) for k, v in d.gamma.items()},
                      {k: v.astype(complex) for k, v in d.delta.items()})
    chambers = [f.signs for f in p.faces if f.dim == 2]
    if kind == "inverse":
        q = chambers[rng.integers(len(chambers))]
        s = 2.0 + rng.random()
        for key in list(d.delta):
            if key[0] == q:
                d.delta[key] = d.delta[key] * s
    elif kind == "functoriality":
        q = chambers[rng.integers(len(chambers))]
        D = d.delta[(q, "00")][:, 0]
        x = _rand_c(rng, 4)
        x = x - (x @ D) * D.conj() / np.vdot(D, D)  # now x @ D == 0
        d.gamma[("00", q)] = d.gamma[("00", q)] + x.reshape(1, 4)
    elif kind == "composition":
        kx, ky = _kernels(ax, bx), _kernels(ay, by)
        z = {(s, t): _rand_c(rng) for s in "+-" for t in "+-"}
        col = {"+": 0, "-": 1}
        for s in "+-":
            Y = np.zeros((4, 2), dtype=complex)
            for t in "+-":
                Y[:, col[t]] = z[(s, t)] * np.kron(kx[s], ky[t])
            d.delta[(s + "0", "00")] = d.delta[(s + "0", "00")] + Y
        for t in "+-":
            Y = np.zeros((4, 2), dtype=complex)
            for s in "+-":
                Y[:, col[s]] = z[(s, t)] * np.kron(kx[s], ky[t])
            d.delta[("0" + t, "00")] = d.delta[("0" + t, "00")] + Y
        for s in "+-":
            for t in "+-":
                Z = z[(s, t)] * np.kron(kx[s], ky[t])
                d.delta[(s + t, "00")] = d.delta[(s + t, "00")] + Z.reshape(4, 1)
    elif kind not in ("valid", "isomorphism"):
        raise ValueError(f"unknown mutation {kind!r}")
    g = {}
    for f in p.faces:
        n = d.dims[f.signs]
        g[f.signs] = np.eye(n) + 0.3 * _rand_c(rng, (n, n))
    return p, gauge(d, g)
