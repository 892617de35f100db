"""Fuchsian equations, numerical monodromy and the Gauss closed forms.

Conventions
-----------
* Systems are ``Y' = A(z) Y``; scalar equations are
  ``sum_i q_i(z) y^(n-i) = 0`` with leading coefficient ``q_0 = 1``.
* Transport along a path ``p`` is the value at the end point of the
  fundamental solution equal to the identity at the start.  For a
  concatenation (``p`` first, then ``q``) this gives ``T(pq) = T(q) T(p)``.
* Finite singular points get counterclockwise lassos.  The loop ``inf`` is a
  large clockwise circle about the base point, i.e. positively oriented as
  seen from infinity.  Ordering lassos counterclockwise by ray angle, starting
  just after the tail of the ``inf`` loop, makes ``M_inf M_k ... M_1 = I``.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import ClearanceTooSmall, NotFuchsian, RankUnsupported
from .integrate import StepStats, transport_polygon
from .windows import LaurentMatrix

_EPS = 1e-12


# --------------------------------------------------------------------------
# polynomials and rational functions (coefficient lists, low degree first)
# --------------------------------------------------------------------------

def _num(x):
    if isinstance(x, Rational) and not isinstance(x, bool):
        return Fraction(x)
    return complex(x)


def _is_zero(c) -> bool:
    return c == 0 if isinstance(c, Fraction) else abs(c) <= _EPS


def _trim(p) -> tuple:
    p = list(p)
    while p and _is_zero(p[-1]):
        p.pop()
    return tuple(p)


def _padd(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def _peval(p, z):
    acc = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def _multiplicity(p, a) -> int:
    """Order of vanishing of ``p`` at ``a`` (synthetic division)."""
    if not p:
        return 10 ** 9
    k = 0
    p = list(p)
    while len(p) > 1:
        # divide by (z - a)
        q = [0] * (len(p) - 1)
        acc = 0
        for i in range(len(p) - 1, 0, -1):
            acc = acc * a + p[i]
            q[i - 1] = acc
        rem = acc * a + p[0]
        if not _is_zero(rem):
            break
        p = list(_trim(q))
        k += 1
    return k


@dataclass(frozen=True)
class RationalFunction:
    num: tuple
    den: tuple = (1,)

    def __post_init__(self):
        num = _trim(_num(c) for c in self.num)
        den = _trim(_num(c) for c in self.den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls((c,))

    def __call__(self, z):
        return _peval(self.num, z) / _peval(self.den, z)

    def is_zero(self) -> bool:
        return not self.num

    def __neg__(self):
        return RationalFunction(tuple(-c for c in self.num), self.den)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                                _pmul(self.den, other.den))

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def pole_order(self, a) -> int:
        if self.is_zero():
            return 0
        return max(0, _multiplicity(self.den, a) - _multiplicity(self.num, a))

    def degree_at_infinity(self) -> int:
        """``deg num - deg den`` (minus infinity is represented by a large negative)."""
        if self.is_zero():
            return -10 ** 9
        return (len(self.num) - 1) - (len(self.den) - 1)

    def to_json(self) -> dict:
        def enc(c):
            z = complex(c)
            return [z.real, z.imag]

        return {"num": [enc(c) for c in self.num], "den": [enc(c) for c in self.den]}


def _linear(a) -> tuple:
    """The polynomial ``z - a``."""
    return (-_num(a), 1)


# --------------------------------------------------------------------------
# equations and systems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarFuchsianODE:
    """``y^(n) + q_1 y^(n-1) + ... + q_n y = 0``; ``q[0]`` must be 1."""

    q: tuple[RationalFunction, ...]
    singular: tuple = ()

    @property
    def order(self) -> int:
        return len(self.q) - 1

    def check_fuchsian(self):
        lead = self.q[0]
        if not (len(lead.num) == 1 and len(lead.den) == 1 and lead.num[0] == lead.den[0]):
            raise NotFuchsian("leading coefficient must be normalized to 1", index=0, point=None)
        for i, qi in enumerate(self.q):
            if i == 0:
                continue
            for a in self.singular:
                if qi.pole_order(a) > i:
                    raise NotFuchsian(f"q_{i} has a pole of order {qi.pole_order(a)} > {i} at {a}", index=i, point=a)
            # poles outside the declared set
            for a in _roots(qi.den):
                if qi.pole_order(a) and not any(abs(complex(a) - complex(s)) <= 1e-9 for s in self.singular):
                    raise NotFuchsian(f"q_{i} has an undeclared pole at {a}", index=i, point=a)
            if qi.degree_at_infinity() + i > 0:
                raise NotFuchsian(f"q_{i} * z^{i} is not holomorphic at infinity", index=i, point="inf")


def _roots(p) -> list[complex]:
    p = _trim(p)
    if len(p) <= 1:
        return []
    return [complex(r) for r in np.roots([complex(c) for c in reversed(p)])]


def gauss_ode(a, b, c) -> ScalarFuchsianODE:
    """``z(1-z) y'' + (c - (a+b+1) z) y' - ab y = 0``."""
    a, b, c = _num(a), _num(b), _num(c)
    den = (0, 1, -1)  # z - z^2
    q1 = RationalFunction((c, -(a + b + 1)), den)
    q2 = RationalFunction((-a * b,), den)
    return ScalarFuchsianODE((RationalFunction.constant(1), q1, q2), (0, 1))


def euler_ode(alpha) -> ScalarFuchsianODE:
    """``z y' - alpha y = 0``."""
    return ScalarFuchsianODE((RationalFunction.constant(1), RationalFunction((-_num(alpha),), (0, 1))), (0,))


@dataclass(frozen=True)
class FuchsianSystem:
    """``Y' = A(z) Y`` with rational entries and declared finite singular points."""

    A: tuple[tuple[RationalFunction, ...], ...]
    singular: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.A)

    @classmethod
    def from_residues(cls, residues: dict) -> "FuchsianSystem":
        """``A(z) = sum_j R_j / (z - a_j)``."""
        pts = list(residues)
        n = len(next(iter(residues.values()))) if pts else 0
        rows = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = RationalFunction((0,))
                for a in pts:
                    r = residues[a][i][k]
                    if r != 0:
                        acc = acc + RationalFunction((r,), _linear(a))
                row.append(acc)
            rows.append(tuple(row))
        return cls(tuple(rows), tuple(pts))

    def __call__(self, z) -> np.ndarray:
        return np.array([[complex(f(z)) for f in row] for row in self.A], dtype=complex)

    def evaluator(self):
        """A fast complex evaluator for the integrator."""
        coeffs = [[(np.array([complex(c) for c in reversed(f.num)] or [0j]),
                    np.array([complex(c) for c in reversed(f.den)])) for f in row] for row in self.A]
        n = self.dim

        def A(z):
            out = np.empty((n, n), dtype=complex)
            for i in range(n):
                for k in range(n):
                    p, q = coeffs[i][k]
                    out[i, k] = np.polyval(p, z) / np.polyval(q, z)
            return out

        return A

    def check_simple_poles(self):
        for i, row in enumerate(self.A):
            for k, f in enumerate(row):
                for a in self.singular:
                    if f.pole_order(a) > 1:
                        raise NotFuchsian(f"entry ({i},{k}) has a pole of order {f.pole_order(a)} at {a}",
                                          index=(i, k), point=a)
                for r in _roots(f.den):
                    if f.pole_order(r) and not any(abs(r - complex(s)) <= 1e-9 for s in self.singular):
                        raise NotFuchsian(f"entry ({i},{k}) has an undeclared pole at {r}", index=(i, k), point=r)

    def singular_at_infinity(self) -> bool:
        """Infinity is a regular point iff ``A(z) = O(z^-2)``."""
        return any(f.degree_at_infinity() > -2 for row in self.A for f in row)

    def trace(self, z) -> complex:
        return sum(complex(self.A[i][i](z)) for i in range(self.dim))

    def to_json(self) -> dict:
        return {"A": [[f.to_json() for f in row] for row in self.A],
                "singular": [[complex(s).real, complex(s).imag] for s in self.singular]}


def companion_system(ode: ScalarFuchsianODE) -> FuchsianSystem:
    """First-order system in ``(y, y', ..., y^(n-1))``.

    The derivative companion keeps simple poles exactly when each ``q_i`` has
    at most simple poles; otherwise ``NotFuchsian`` names the offending entry.
    """
    ode.check_fuchsian()
    n = ode.order
    zero, one = RationalFunction((0,)), RationalFunction.constant(1)
    rows = []
    for i in range(n - 1):
        rows.append(tuple(one if k == i + 1 else zero for k in range(n)))
    rows.append(tuple(-ode.q[n - k] for k in range(n)))
    sys = FuchsianSystem(tuple(rows), tuple(ode.singular))
    sys.check_simple_poles()
    return sys


# --------------------------------------------------------------------------
# loops
# --------------------------------------------------------------------------

def _segment_distance(p: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


@dataclass(frozen=True)
class Loop:
    base: complex
    vertices: tuple[complex, ...]
    clearance: float = 1e-6

    def __post_init__(self):
        vs = tuple(complex(v) for v in self.vertices)
        if len(vs) < 2 or vs[0] != complex(self.base) or vs[-1] != complex(self.base):
            raise ValueError("loop must start and end at its base point")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "base", complex(self.base))

    def min_distance(self, points: Sequence) -> float:
        best = math.inf
        for p in points:
            p = complex(p)
            for a, b in zip(self.vertices[:-1], self.vertices[1:]):
                best = min(best, _segment_distance(p, a, b))
        return best

    def winding(self, p: complex) -> int:
        total = 0.0
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            total += cmath.phase((b - p) / (a - p))
        return round(total / (2 * math.pi))

    def to_json(self) -> dict:
        return {"base": [self.base.real, self.base.imag],
                "vertices": [[v.real, v.imag] for v in self.vertices]}


def circle_loop(center: complex, radius: float, m: int = 32, winding: int = 1,
                start_angle: float = 0.0) -> Loop:
    """Regular ``m``-gon traversed ``|winding|`` times, based on the circle."""
    center = complex(center)
    sign = 1 if winding >= 0 else -1
    pts = [center + radius * cmath.exp(1j * (start_angle + sign * 2 * math.pi * j / m))
           for j in range(m * abs(winding) + 1)]
    pts[-1] = pts[0]
    return Loop(pts[0], tuple(pts))


def lasso(base: complex, center: complex, radius: float, m: int = 32, ccw: bool = True) -> Loop:
    """Straight tail from ``base`` to the circle about ``center``, one turn, back."""
    base, center = complex(base), complex(center)
    theta = cmath.phase(base - center)
    sign = 1 if ccw else -1
    ring = [center + radius * cmath.exp(1j * (theta + sign * 2 * math.pi * j / m)) for j in range(m)]
    ring.append(ring[0])
    return Loop(base, (base, *ring, base))


def infinity_loop(base: complex, points: Sequence[complex], m: int = 64) -> Loop:
    """Clockwise circle about ``base`` enclosing all ``points``, with its tail
    leaving along the middle of the widest angular gap between them."""
    base = complex(base)
    R = 2 * max((abs(complex(p) - base) for p in points), default=1.0) + 1.0
    theta = _gap_direction(base, points)
    ring = [base + R * cmath.exp(1j * (theta - 2 * math.pi * j / m)) for j in range(m)]
    ring.append(ring[0])
    return Loop(base, (base, *ring, base))


def _gap_direction(base: complex, points: Sequence[complex]) -> float:
    angles = sorted(cmath.phase(complex(p) - base) % (2 * math.pi) for p in points)
    if not angles:
        return -math.pi / 2
    best, where = -1.0, 0.0
    for i, a in enumerate(angles):
        b = angles[(i + 1) % len(angles)] + (2 * math.pi if i + 1 == len(angles) else 0)
        if b - a > best:
            best, where = b - a, (a + b) / 2
    return where


def continue_along(sys: FuchsianSystem, loop: Loop, tol: float = 1e-12, clearance: float | None = None,
                   fraction: float = 0.25, max_steps: int = 200_000, stats: StepStats | None = None) -> np.ndarray:
    """Transport matrix of the fundamental solution along ``loop``."""
    need = loop.clearance if clearance is None else clearance
    if sys.singular and loop.min_distance(sys.singular) <= need:
        raise ClearanceTooSmall(f"loop passes within {loop.min_distance(sys.singular):.3g} of a singular point")
    return transport_polygon(sys.evaluator(), loop.vertices, sys.dim,
                             [complex(s) for s in sys.singular], tol, fraction, max_steps, stats)


# --------------------------------------------------------------------------
# representations
# --------------------------------------------------------------------------

@dataclass
class MonodromyRep:
    labels: tuple[str, ...]
    matrices: dict
    base: complex | None = None
    order: tuple[str, ...] = ()
    product_defect: float | None = None
    warnings: list = field(default_factory=list)

    def __getitem__(self, label) -> np.ndarray:
        return self.matrices[label]

    def ordered_product(self) -> np.ndarray:
        """``M_last ... M_first`` for the stored order."""
        dim = next(iter(self.matrices.values())).shape[0]
        P = np.eye(dim, dtype=complex)
        for lab in self.order:
            P = self.matrices[lab] @ P
        return P

    def to_json(self) -> dict:
        def enc(M):
            return [[[complex(x).real, complex(x).imag] for x in row] for row in np.asarray(M)]

        return {
            "labels": list(self.labels),
            "base": None if self.base is None else [self.base.real, self.base.imag],
            "order": list(self.order),
            "generators": {lab: enc(self.matrices[lab]) for lab in self.labels},
            "product_defect": self.product_defect,
            "warnings": list(self.warnings),
        }


def _label(p) -> str:
    z = complex(p)
    if z.imag == 0 and z.real == int(z.real):
        return str(int(z.real))
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{z.imag:+}j"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GKZLAB_THREADS", "1")))
    except ValueError:
        return 1


def monodromy_rep(sys: FuchsianSystem, base: complex, tol: float = 1e-12, m: int = 32,
                  threads: int | None = None) -> MonodromyRep:
    """One generator per finite singular point (counterclockwise lasso) and
    one for infinity when it is singular; see the module notes for the
    ordering under which the generators multiply to the identity."""
    if m < 16:
        raise ValueError("polygons need at least 16 vertices")
    base = complex(base)
    pts = [complex(p) for p in sys.singular]
    if any(abs(p - base) <= _EPS for p in pts):
        raise ClearanceTooSmall("base point lies on the singular set")
    loops = {}
    for p in pts:
        others = [abs(q - p) for q in pts if q != p]
        r = 0.5 * min([abs(base - p)] + [o / 2 for o in others] + [1.0])
        loops[_label(p)] = lasso(base, p, r, m)
    gap = _gap_direction(base, pts)
    at_inf = sys.singular_at_infinity()
    if at_inf:
        loops["inf"] = infinity_loop(base, pts, 2 * m)
    order = sorted((_label(p) for p in pts),
                   key=lambda lab: (cmath.phase(complex(next(q for q in pts if _label(q) == lab)) - base) - gap)
                   % (2 * math.pi))
    if at_inf:
        order.append("inf")
    workers = threads or _threads()
    labels = list(loops)
    if workers > 1 and len(labels) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(labels))) as ex:
            mats = list(ex.map(lambda lab: continue_along(sys, loops[lab], tol), labels))
    else:
        mats = [continue_along(sys, loops[lab], tol) for lab in labels]
    rep = MonodromyRep(tuple(labels), dict(zip(labels, mats)), base, tuple(order))
    rep.product_defect = float(np.max(np.abs(rep.ordered_product() - np.eye(sys.dim))))
    return rep


# --------------------------------------------------------------------------
# Gauss closed forms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussParams:
    a: complex
    b: complex
    c: complex

    def resonant(self, tol: float = 1e-12) -> bool:
        def integral(x):
            x = complex(x)
            return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol

        return any(integral(v) for v in (self.a, self.b, self.c - self.a, self.c - self.b))


def _e(x) -> complex:
    return cmath.exp(2j * math.pi * complex(x))


def gauss_closed_form(p: GaussParams) -> dict:
    """The three generators ``{"1": g1, "0": g0, "inf": ginf}``."""
    a, b, c = (complex(v) for v in (p.a, p.b, p.c))
    g1 = np.array([[1, -_e(c - b) - _e(c - a) + _e(c) + 1], [0, _e(c - a - b)]], dtype=complex)
    g0 = np.array([[1 + _e(-c), 1], [-_e(-c), 0]], dtype=complex)
    ginf = np.array([[0, -_e(a + b)], [1, _e(a) + _e(b)]], dtype=complex)
    return {"1": g1, "0": g0, "inf": ginf}


def gauss_closed_form_rep(p: GaussParams) -> MonodromyRep:
    mats = gauss_closed_form(p)
    rep = MonodromyRep(("0", "1", "inf"), mats, None, ("0", "1", "inf"))
    rep.product_defect = float(np.max(np.abs(rep.ordered_product() - np.eye(2))))
    return rep


def gauss_integer_matrices() -> dict:
    """Exact integer generators at ``a = b = c = 0``."""
    return {"1": [[1, 0], [0, 1]], "0": [[2, 1], [-1, 0]], "inf": [[0, -1], [1, 2]]}


@dataclass
class ConjugacyReport:
    invariants: dict
    passed: bool
    tol: float
    caveat: str = ("trace data determine a rank-2 representation up to conjugacy only when it is "
                   "irreducible")

    def to_json(self) -> dict:
        return {"pass": self.passed, "tol": self.tol, "caveat": self.caveat,
                "invariants": {k: {"left": [v[0].real, v[0].imag], "right": [v[1].real, v[1].imag],
                                   "diff": abs(v[0] - v[1])} for k, v in self.invariants.items()}}


def trace_invariants(rep: MonodromyRep, first: str = "0", second: str = "1") -> dict:
    M0, M1 = rep[first], rep[second]
    return {
        f"tr {first}": complex(np.trace(M0)),
        f"tr {second}": complex(np.trace(M1)),
        f"tr {first}{second}": complex(np.trace(M0 @ M1)),
        f"det {first}": complex(np.linalg.det(M0)),
        f"det {second}": complex(np.linalg.det(M1)),
    }


def compare_up_to_conjugacy(r1: MonodromyRep, r2: MonodromyRep, tol: float = 1e-8,
                            first: str = "0", second: str = "1") -> ConjugacyReport:
    for r in (r1, r2):
        for lab in (first, second):
            if r[lab].shape != (2, 2):
                raise RankUnsupported(f"only rank 2 is supported, got {r[lab].shape}")
    i1, i2 = trace_invariants(r1, first, second), trace_invariants(r2, first, second)
    inv = {k: (i1[k], i2[k]) for k in i1}
    passed = all(abs(x - y) <= tol for x, y in inv.values())
    return ConjugacyReport(inv, passed, tol)


# --------------------------------------------------------------------------
# conifold K-theory generators over the Laurent ring
# --------------------------------------------------------------------------

def conifold_torus_point(a, b, c) -> tuple[complex, complex, complex]:
    """``exp(-2 pi i alpha)`` for ``alpha = (c - 1, -a, -b)``."""
    alpha = (complex(c) - 1, -complex(a), -complex(b))
    return tuple(_e(-x) for x in alpha)


def conifold_k0_rep() -> dict:
    """Gauss generators over ``C[t1^+-1, t2^+-1, t3^+-1]``.

    With ``t = exp(-2 pi i alpha)`` and ``alpha = (c - 1, -a, -b)`` one has
    ``t1 = e(-c)``, ``t2 = e(a)``, ``t3 = e(b)`` where ``e(x) = exp(2 pi i x)``.
    """
    g0 = LaurentMatrix.from_rows([
        [{(0, 0, 0): 1, (1, 0, 0): 1}, {(0, 0, 0): 1}],
        [{(1, 0, 0): -1}, {}],
    ], 3)
    g1 = LaurentMatrix.from_rows([
        [{(0, 0, 0): 1}, {(-1, 0, -1): -1, (-1, -1, 0): -1, (-1, 0, 0): 1, (0, 0, 0): 1}],
        [{}, {(-1, -1, -1): 1}],
    ], 3)
    ginf = LaurentMatrix.from_rows([
        [{}, {(0, 1, 1): -1}],
        [{(0, 0, 0): 1}, {(0, 1, 0): 1, (0, 0, 1): 1}],
    ], 3)
    return {"0": g0, "1": g1, "inf": ginf}
