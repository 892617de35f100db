"""Zonotope, periodic hyperplane arrangement and its face poset.

Everything is exact.  The periodic arrangement is infinite, so it is always
studied inside a rational clipping box; local finiteness makes that enough
for the face-level predicates below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateZonotope, IncompleteDecision, PosetInconsistency
from .exact import dot, fmt, nullspace, primitive, rank, same_row_space, strict_point, to_fraction
from .lattice import ToricInput

SIGNS = "-0+"


@dataclass(frozen=True)
class Hyperplane:
    """The affine hyperplane ``{x : <normal, x> = offset}``.

    ``normal`` is primitive with positive leading entry; use :meth:`make`
    to build one from arbitrary data.
    """

    normal: tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        if primitive(self.normal) != tuple(self.normal):
            raise ValueError(f"normal {self.normal} is not primitive/canonical")
        object.__setattr__(self, "offset", to_fraction(self.offset))

    @classmethod
    def make(cls, normal: Sequence, offset) -> "Hyperplane":
        normal = [to_fraction(x) for x in normal]
        offset = to_fraction(offset)
        prim = primitive(normal)
        # prim = normal * s for a nonzero rational s
        k = next(i for i, x in enumerate(normal) if x != 0)
        s = Fraction(prim[k]) / normal[k]
        return cls(prim, offset * s)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def value(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) - self.offset

    def sign(self, x: Sequence) -> str:
        v = self.value(x)
        return "+" if v > 0 else "-" if v < 0 else "0"

    def negated(self) -> "Hyperplane":
        """The image under ``x -> -x``."""
        return Hyperplane(self.normal, -self.offset)

    def shifted(self, t: Sequence) -> "Hyperplane":
        """The image under ``x -> x + t``."""
        return Hyperplane(self.normal, self.offset + dot(self.normal, t))

    def to_json(self) -> dict:
        return {"normal": [fmt(x) for x in self.normal], "offset": fmt(self.offset)}

    @classmethod
    def from_json(cls, obj) -> "Hyperplane":
        return cls.make(obj["normal"], obj["offset"])


@dataclass(frozen=True)
class Zonotope:
    """Minkowski sum of the segments ``[0, g]`` over the generators ``g``."""

    generators: tuple[tuple[Fraction, ...], ...]
    dim: int

    @classmethod
    def from_input(cls, inp: ToricInput) -> "Zonotope":
        half = Fraction(1, 2)
        gens = tuple(tuple(half * x for x in w) for w in inp.weights)
        return cls(gens, inp.n)

    def support(self, u: Sequence) -> tuple[Fraction, Fraction]:
        """(min, max) of ``<u, x>`` over the zonotope."""
        lo = hi = Fraction(0)
        for g in self.generators:
            v = dot(u, g)
            if v < 0:
                lo += v
            else:
                hi += v
        return lo, hi

    def is_full_dimensional(self) -> bool:
        return rank([g for g in self.generators if any(g)] or [[0] * self.dim]) == self.dim

    def bounding_box(self) -> list[tuple[Fraction, Fraction]]:
        return [self.support([int(i == j) for j in range(self.dim)]) for i in range(self.dim)]

    @property
    def center(self) -> tuple[Fraction, ...]:
        return tuple(sum((g[i] for g in self.generators), Fraction(0)) / 2 for i in range(self.dim))


def _facet_normals(gens: Sequence[Sequence[Fraction]], n: int) -> list[tuple[int, ...]]:
    if n == 1:
        return [(1,)]
    gens = [g for g in gens if any(g)]
    normals = set()
    for subset in itertools.combinations(gens, n - 1):
        ns = nullspace(list(subset), n)
        if len(ns) == 1:
            normals.add(primitive(ns[0]))
    return sorted(normals)


def supporting_hyperplanes(z: Zonotope) -> list[Hyperplane]:
    """Facet-supporting hyperplanes of the zonotope, sorted."""
    if not z.is_full_dimensional():
        raise DegenerateZonotope("zonotope generators do not span Q^n")
    out = set()
    for u in _facet_normals(z.generators, z.dim):
        lo, hi = z.support(u)
        # a normal orthogonal to n-1 spanning generators gives two facets
        out.add(Hyperplane(u, lo))
        out.add(Hyperplane(u, hi))
    return sorted(out, key=lambda h: (h.normal, h.offset))


def zonotope_contains(z: Zonotope, x: Sequence, shift: Sequence | None = None,
                      hyperplanes: Sequence[Hyperplane] | None = None) -> tuple[bool, bool]:
    """Return ``(inside_closed, on_boundary)`` for ``x`` against ``shift + z``."""
    if hyperplanes is None:
        hyperplanes = supporting_hyperplanes(z)
    if shift is not None:
        x = [to_fraction(a) - to_fraction(b) for a, b in zip(x, shift)]
    inside, boundary = True, False
    for u in {h.normal for h in hyperplanes}:
        lo, hi = z.support(u)
        v = dot(u, x)
        if v < lo or v > hi:
            inside = False
        elif v == lo or v == hi:
            boundary = True
    return inside, inside and boundary


# --------------------------------------------------------------------------
# clipped periodic arrangement
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(to_fraction(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(to_fraction(x) for x in self.hi))
        if len(self.lo) != len(self.hi) or any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box needs lo < hi in every coordinate")

    @classmethod
    def cube(cls, lo, hi, n: int) -> "Box":
        return cls((lo,) * n, (hi,) * n)

    @classmethod
    def default(cls, n: int) -> "Box":
        """The unit fundamental domain scaled by 2 about its center."""
        return cls.cube(Fraction(-1, 2), Fraction(3, 2), n)

    @classmethod
    def parse(cls, text: str, n: int) -> "Box":
        """``"lo,hi"`` (same for all coordinates) or ``"lo1,hi1,...,lon,hin"``."""
        vals = [to_fraction(v) for v in text.split(",")]
        if len(vals) == 2:
            return cls.cube(vals[0], vals[1], n)
        if len(vals) != 2 * n:
            raise ValueError(f"box needs 2 or {2 * n} numbers, got {len(vals)}")
        return cls(tuple(vals[0::2]), tuple(vals[1::2]))

    @property
    def dim(self) -> int:
        return len(self.lo)

    def range_of(self, u: Sequence) -> tuple[Fraction, Fraction]:
        lo = sum((a * (l if a > 0 else h) for a, l, h in zip(u, self.lo, self.hi)), Fraction(0))
        hi = sum((a * (h if a > 0 else l) for a, l, h in zip(u, self.lo, self.hi)), Fraction(0))
        return lo, hi

    def contains_open(self, x: Sequence) -> bool:
        return all(l < v < h for v, l, h in zip(x, self.lo, self.hi))

    def constraints(self) -> list[tuple[list[int], Fraction]]:
        """Strict constraints ``a.x < b`` describing the open box."""
        out = []
        n = self.dim
        for i in range(n):
            e = [int(i == j) for j in range(n)]
            out.append((e, self.hi[i]))
            out.append(([-v for v in e], -self.lo[i]))
        return out

    def to_json(self) -> list:
        return [[fmt(a), fmt(b)] for a, b in zip(self.lo, self.hi)]


@dataclass(frozen=True)
class ClippedArrangement:
    base_hyperplanes: tuple[Hyperplane, ...]
    box: Box
    active: tuple[Hyperplane, ...]
    translation: tuple[Fraction, ...]
    periodic: bool = True

    @property
    def dim(self) -> int:
        return self.box.dim

    def to_json(self) -> dict:
        return {
            "periodic": self.periodic,
            "translation": [fmt(x) for x in self.translation],
            "box": self.box.to_json(),
            "base": [h.to_json() for h in self.base_hyperplanes],
            "active": [h.to_json() for h in self.active],
        }


def _meets_open_box(h: Hyperplane, box: Box) -> bool:
    lo, hi = box.range_of(h.normal)
    return lo < h.offset < hi


def clip_periodic(base: Sequence[Hyperplane], box: Box,
                  translation: Sequence | None = None) -> ClippedArrangement:
    """All ``Z^n``-translates of ``-H + translation`` (``H`` in ``base``)
    that meet the open box.

    Since each normal is primitive, the translates of ``{<u,x> = c}`` are
    exactly ``{<u,x> = c + k}`` for ``k`` in ``Z``.
    """
    n = box.dim
    t = tuple(to_fraction(x) for x in translation) if translation is not None else (Fraction(0),) * n
    families = {}
    for h in base:
        g = h.negated().shifted(t)
        frac = g.offset - (g.offset.numerator // g.offset.denominator)
        families[(g.normal, frac)] = g
    active = set()
    for (u, frac) in families:
        lo, hi = box.range_of(u)
        k = (lo - frac).__floor__()
        while frac + k < hi:
            if frac + k > lo:
                active.add(Hyperplane(u, frac + k))
            k += 1
    return ClippedArrangement(tuple(base), box, tuple(sorted(active, key=lambda h: (h.normal, h.offset))), t)


def fixed_arrangement(hyperplanes: Iterable[Hyperplane], box: Box) -> ClippedArrangement:
    """A finite (non-periodic) arrangement restricted to a box."""
    hs = [h for h in hyperplanes if _meets_open_box(h, box)]
    hs = tuple(sorted(set(hs), key=lambda h: (h.normal, h.offset)))
    return ClippedArrangement(hs, box, hs, (Fraction(0),) * box.dim, periodic=False)


def periodic_arrangement(inp: ToricInput, box: Box | None = None,
                         translation: Sequence | None = None) -> ClippedArrangement:
    z = Zonotope.from_input(inp)
    if box is None:
        box = Box.default(inp.n)
    return clip_periodic(supporting_hyperplanes(z), box, translation)


# --------------------------------------------------------------------------
# faces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    signs: str
    dim: int
    witness: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"signs": self.signs, "dim": self.dim, "witness": [fmt(x) for x in self.witness]}


def relint_constraints(hyperplanes: Sequence[Hyperplane], box: Box, signs: str):
    """(strict, equal) constraint lists for the relative interior of a face."""
    strict = box.constraints()
    equal = []
    for h, s in zip(hyperplanes, signs):
        if s == "+":
            strict.append(([-a for a in h.normal], -h.offset))
        elif s == "-":
            strict.append((list(h.normal), h.offset))
        else:
            equal.append((list(h.normal), h.offset))
    return strict, equal


def _realizes(hyperplanes, box, signs, x) -> bool:
    return box.contains_open(x) and all(h.sign(x) == s for h, s in zip(hyperplanes, signs))


def _simplify_witness(hyperplanes, box, signs, x, max_den: int = 64):
    for den in range(1, max_den + 1):
        cand = tuple(Fraction(round(v * den), den) for v in x)
        if _realizes(hyperplanes, box, signs, cand):
            return cand
    return tuple(x)


@dataclass
class FacePoset:
    """Faces of a clipped arrangement inside the open box, with closure order."""

    arrangement: ClippedArrangement
    faces: list[Face]
    _leq: list[list[bool]] = field(repr=False, default_factory=list)
    _cache: dict = field(repr=False, default_factory=dict, compare=False)

    def __post_init__(self):
        self._by_sign = {f.signs: i for i, f in enumerate(self.faces)}

    def __len__(self):
        return len(self.faces)

    def index(self, face) -> int:
        if isinstance(face, int):
            return face
        if isinstance(face, Face):
            face = face.signs
        try:
            return self._by_sign[face]
        except KeyError:
            raise KeyError(f"no face with sign vector {face!r}") from None

    def face(self, key) -> Face:
        return self.faces[self.index(key)]

    def leq(self, a, b) -> bool:
        return self._leq[self.index(a)][self.index(b)]

    def lower_bounds(self, *keys) -> list[int]:
        idx = [self.index(k) for k in keys]
        return [c for c in range(len(self.faces)) if all(self._leq[c][i] for i in idx)]

    def comparable_pairs(self) -> list[tuple[int, int]]:
        """All ``(lower, upper)`` index pairs with ``lower <= upper``."""
        n = len(self.faces)
        return [(i, j) for i in range(n) for j in range(n) if self._leq[i][j]]

    def counts_by_dim(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for f in self.faces:
            out[f.dim] = out.get(f.dim, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {
            "arrangement": self.arrangement.to_json(),
            "faces": [f.to_json() for f in self.faces],
            "counts_by_dim": {str(k): v for k, v in self.counts_by_dim().items()},
        }


def _sign_refines(lower: str, upper: str) -> bool:
    return all(a == b or a == "0" for a, b in zip(lower, upper))


def _in_closure(hyperplanes, signs: str, x) -> bool:
    for h, s in zip(hyperplanes, signs):
        v = h.value(x)
        if (s == "+" and v < 0) or (s == "-" and v > 0) or (s == "0" and v != 0):
            return False
    return True


def stratify(arr: ClippedArrangement) -> FacePoset:
    """Enumerate every realizable sign vector inside the open box.

    Sign vectors are grown one hyperplane at a time; each extension is kept
    only if an exact LP finds a point in its relative interior.
    """
    hs = arr.active
    box = arr.box
    n = arr.dim
    partial = [""]
    for k in range(len(hs)):
        nxt = []
        for s in partial:
            for ch in SIGNS:
                strict, equal = relint_constraints(hs[:k + 1], box, s + ch)
                if strict_point(n, strict, equal) is not None:
                    nxt.append(s + ch)
        partial = nxt
    faces = []
    for s in partial:
        strict, equal = relint_constraints(hs, box, s)
        x, _ = strict_point(n, strict, equal)
        x = _simplify_witness(hs, box, s, x)
        zero = [list(h.normal) for h, c in zip(hs, s) if c == "0"]
        dim = n - (rank(zero) if zero else 0)
        faces.append(Face(s, dim, x))
    faces.sort(key=lambda f: (f.dim, f.signs))
    leq = [[False] * len(faces) for _ in faces]
    for i, a in enumerate(faces):
        for j, b in enumerate(faces):
            comb = _sign_refines(a.signs, b.signs)
            geom = _in_closure(hs, b.signs, a.witness)
            if comb != geom:
                raise PosetInconsistency(f"order mismatch for {a.signs} <= {b.signs}")
            leq[i][j] = comb
    return FacePoset(arr, faces, leq)


def face_leq(p: FacePoset, lower, upper) -> bool:
    """``lower <= upper`` iff ``lower`` lies in the closure of ``upper``."""
    a, b = p.face(lower), p.face(upper)
    comb = _sign_refines(a.signs, b.signs)
    geom = _in_closure(p.arrangement.active, b.signs, a.witness)
    if comb != geom:
        raise PosetInconsistency(f"order mismatch for {a.signs} <= {b.signs}")
    return comb


def _equations(p: FacePoset, f: Face):
    return [(list(h.normal), h.offset) for h, s in zip(p.arrangement.active, f.signs) if s == "0"]


def same_flat(p: FacePoset, c1, c2) -> bool:
    """Whether two faces span the same affine subspace."""
    f1, f2 = p.face(c1), p.face(c2)
    e1, e2 = _equations(p, f1), _equations(p, f2)
    if not same_row_space([a for a, _ in e1], [a for a, _ in e2]):
        return False
    return all(dot(a, f1.witness) == b for a, b in e2)


def same_dim_adjacent(p: FacePoset, c1, c2) -> bool:
    """Distinct faces of equal dimension in one affine span sharing a facet."""
    i, j = p.index(c1), p.index(c2)
    if i == j:
        return False
    f1, f2 = p.faces[i], p.faces[j]
    if f1.dim != f2.dim or f1.dim == 0:
        return False
    if not same_flat(p, i, j):
        return False
    return any(p.faces[k].dim == f1.dim - 1 for k in p.lower_bounds(i, j))


# --------------------------------------------------------------------------
# collinearity
# --------------------------------------------------------------------------

def _attainable(s1: str, s3: str) -> str:
    """Signs a convex combination ``(1-t) f1 + t f3`` (0<t<1) can take."""
    if s1 == s3:
        return s1
    if "0" in (s1, s3):
        return s1 if s3 == "0" else s3
    return SIGNS


def grid_points(max_den: int) -> list[Fraction]:
    """Rationals in (0, 1) with denominator at most ``max_den``, simplest first."""
    seen = set()
    out = []
    for q in range(2, max_den + 1):
        for num in range(1, q):
            t = Fraction(num, q)
            if t not in seen:
                seen.add(t)
                out.append(t)
    return out


def _fixed_t_point(p: FacePoset, f1: Face, f2: Face, f3: Face, t: Fraction):
    hs, box, n = p.arrangement.active, p.arrangement.box, p.arrangement.dim
    s1, e1 = relint_constraints(hs, box, f1.signs)
    s3, e3 = relint_constraints(hs, box, f3.signs)
    s2, e2 = relint_constraints(hs, box, f2.signs)
    z = [0] * n
    strict = [(a + z, b) for a, b in s1] + [(z + a, b) for a, b in s3]
    equal = [(a + z, b) for a, b in e1] + [(z + a, b) for a, b in e3]
    strict += [([(1 - t) * v for v in a] + [t * v for v in a], b) for a, b in s2]
    equal += [([(1 - t) * v for v in a] + [t * v for v in a], b) for a, b in e2]
    res = strict_point(2 * n, strict, equal)
    if res is None:
        return None
    x = res[0]
    c1, c3 = x[:n], x[n:]
    c2 = tuple((1 - t) * a + t * b for a, b in zip(c1, c3))
    return c1, c2, c3


def _homogenized_point(p: FacePoset, f1: Face, f2: Face, f3: Face):
    """Decide the interior case exactly.

    With ``u = (1-t) c1`` and ``w = t c3`` every constraint becomes linear in
    ``(u, w, t)``, so one LP settles existence for all ``t`` in (0, 1).
    """
    hs, box, n = p.arrangement.active, p.arrangement.box, p.arrangement.dim
    s1, e1 = relint_constraints(hs, box, f1.signs)
    s3, e3 = relint_constraints(hs, box, f3.signs)
    s2, e2 = relint_constraints(hs, box, f2.signs)
    z = [0] * n
    strict, equal = [], []
    # a.c1 < b  <=>  a.u < b (1 - t)
    strict += [(list(a) + z + [b], b) for a, b in s1]
    equal += [(list(a) + z + [b], b) for a, b in e1]
    # a.c3 < b  <=>  a.w < b t
    strict += [(z + list(a) + [-b], 0) for a, b in s3]
    equal += [(z + list(a) + [-b], 0) for a, b in e3]
    # c2 = u + w
    strict += [(list(a) + list(a) + [0], b) for a, b in s2]
    equal += [(list(a) + list(a) + [0], b) for a, b in e2]
    strict += [(z + z + [-1], 0), (z + z + [1], 1)]
    res = strict_point(2 * n + 1, strict, equal)
    if res is None:
        return None
    x = res[0]
    u, w, t = x[:n], x[n:2 * n], x[2 * n]
    c1 = tuple(a / (1 - t) for a in u)
    c3 = tuple(a / t for a in w)
    c2 = tuple(a + b for a, b in zip(u, w))
    return c1, c2, c3


def collinear_witness(p: FacePoset, c1, c2, c3, *, grid: int = 16, exact: bool = True):
    """Witness ``(x1, x2, x3)`` with ``x_i`` in face ``c_i`` and ``x2`` on the
    segment ``[x1, x3]``, or None if the triple is not collinear.

    A common lower face is required first.  Interior cases try the rational
    grid of ``t`` values (denominators up to ``grid``).  With ``exact`` the
    answer is then settled by a homogenized LP; without it an unresolved
    case raises :class:`IncompleteDecision`.
    """
    i1, i2, i3 = p.index(c1), p.index(c2), p.index(c3)
    if not p.lower_bounds(i1, i2, i3):
        return None
    f1, f2, f3 = p.faces[i1], p.faces[i2], p.faces[i3]
    if i2 == i1:
        return f1.witness, f1.witness, f3.witness
    if i2 == i3:
        return f1.witness, f3.witness, f3.witness
    for a, b, c in zip(f1.signs, f2.signs, f3.signs):
        if b not in _attainable(a, c):
            return None
    if exact:
        found = _homogenized_point(p, f1, f2, f3)
        if found is None:
            return None
    for t in grid_points(grid):
        w = _fixed_t_point(p, f1, f2, f3, t)
        if w is not None:
            return w
    if exact:
        return found
    raise IncompleteDecision(f"no witness for ({f1.signs}, {f2.signs}, {f3.signs}) "
                             f"at grid denominators <= {grid}")


def collinear(p: FacePoset, c1, c2, c3, *, grid: int = 16, exact: bool = True) -> bool:
    return collinear_witness(p, c1, c2, c3, grid=grid, exact=exact) is not None


def check_witness(p: FacePoset, c1, c2, c3, witness) -> bool:
    """Independent check that a witness triple certifies collinearity."""
    hs, box = p.arrangement.active, p.arrangement.box
    x1, x2, x3 = witness
    for key, x in zip((c1, c2, c3), (x1, x2, x3)):
        if not _realizes(hs, box, p.face(key).signs, x):
            return False
    d = [b - a for a, b in zip(x1, x3)]
    off = [b - a for a, b in zip(x1, x2)]
    if not any(d):
        return not any(off)
    k = next(i for i, v in enumerate(d) if v != 0)
    t = off[k] / d[k]
    return 0 <= t <= 1 and all(o == t * v for o, v in zip(off, d))


def adjacent_pairs(p: FacePoset) -> list[tuple[int, int]]:
    """All ordered pairs flagged by :func:`same_dim_adjacent` (memoized)."""
    key = ("adjacent",)
    if key not in p._cache:
        n = len(p.faces)
        p._cache[key] = [(i, j) for i in range(n) for j in range(n) if same_dim_adjacent(p, i, j)]
    return p._cache[key]


def collinear_triples(p: FacePoset, *, grid: int = 16, exact: bool = True):
    """``(collinear, undecided)`` lists of index triples (memoized)."""
    key = ("collinear", grid, exact)
    if key not in p._cache:
        yes, undecided = [], []
        n = len(p.faces)
        for t in itertools.product(range(n), repeat=3):
            try:
                if collinear(p, *t, grid=grid, exact=exact):
                    yes.append(t)
            except IncompleteDecision:
                undecided.append(t)
        p._cache[key] = (yes, undecided)
    return p._cache[key]
