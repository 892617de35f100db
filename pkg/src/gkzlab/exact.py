"""Exact rational helpers: parsing, row reduction and a small simplex solver.

Everything here works on plain lists of :class:`fractions.Fraction`.  Sizes
are desk scale (tens of rows), so clarity beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

from gmpy2 import mpq


def to_fraction(x) -> Fraction:
    """Convert ``int``, ``Fraction``, ``"p/q"`` strings or floats exactly.

    Floats go through their shortest ``repr`` so that ``0.25`` becomes 1/4
    rather than the binary expansion.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def is_exact(x) -> bool:
    return isinstance(x, (Rational, str)) and not isinstance(x, bool)


def fmt(q) -> str:
    """Serialize a rational as ``"p/q"`` (or ``"p"`` when integral)."""
    q = to_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to a primitive integer vector.

    The first nonzero entry of the result is positive.
    """
    v = [to_fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    m = [[to_fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel {x : M x = 0} over Q."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -m[i][f]
        basis.append(x)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One solution of M x = b over Q, or None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = m[i][ncols]
    return x


def same_row_space(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    ra, rb = rank(a) if a else 0, rank(b) if b else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank(list(a) + list(b)) == ra


# --------------------------------------------------------------------------
# simplex
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T, basis, r, c):
    inv = 1 / T[r][c]
    T[r] = [x * inv for x in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            Ti, Tr = T[i], T[r]
            T[i] = [a - f * b for a, b in zip(Ti, Tr)]
    basis[r] = c


def _run_simplex(T, basis, allowed):
    """Maximize the objective stored in the last row (as reduced costs).

    The last row holds ``-c`` style reduced costs: a negative entry means the
    column improves the objective.  Bland's rule prevents cycling.
    """
    m = len(T) - 1
    while True:
        obj = T[m]
        enter = next((j for j in allowed if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], enter)


def linprog_max(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    """Maximize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Two-phase tableau simplex in exact arithmetic.  The tableau runs on
    ``gmpy2.mpq`` for speed; results come back as ``Fraction``.
    """
    n = len(c)
    c = [mpq(to_fraction(v)) for v in c]
    rows = []
    rhs = []
    n_ub = len(A_ub)
    for k, (row, b) in enumerate(zip(A_ub, b_ub)):
        slack = [mpq(0)] * n_ub
        slack[k] = mpq(1)
        rows.append([mpq(to_fraction(v)) for v in row] + slack)
        rhs.append(mpq(to_fraction(b)))
    for row, b in zip(A_eq, b_eq):
        rows.append([mpq(to_fraction(v)) for v in row] + [mpq(0)] * n_ub)
        rhs.append(mpq(to_fraction(b)))
    m = len(rows)
    nv = n + n_ub
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # tableau: [vars | artificials | rhs]
    T = []
    for i in range(m):
        art = [mpq(0)] * m
        art[i] = mpq(1)
        T.append(rows[i] + art + [rhs[i]])
    basis = [nv + i for i in range(m)]
    # phase 1: maximize -sum(artificials)
    obj = [mpq(0)] * (nv + m + 1)
    for i in range(m):
        obj = [a - b for a, b in zip(obj, T[i])]
    for i in range(m):
        obj[nv + i] = mpq(0)
    T.append(obj)
    _run_simplex(T, basis, range(nv))
    if T[m][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= nv:
            c_in = next((j for j in range(nv) if T[i][j] != 0), None)
            if c_in is None:
                continue  # redundant row
            _pivot(T, basis, i, c_in)
        keep.append(i)
    T = [T[i][:nv] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    # phase 2 objective row: reduced costs of -c
    obj = [-v for v in c] + [mpq(0)] * n_ub + [mpq(0)]
    for i, bv in enumerate(basis):
        if obj[bv] != 0:
            f = obj[bv]
            obj = [a - f * b for a, b in zip(obj, T[i])]
    T.append(obj)
    status = _run_simplex(T, basis, range(nv))
    if status == "unbounded":
        return LPResult("unbounded")
    x = [mpq(0)] * nv
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    return LPResult("optimal", tuple(Fraction(v) for v in x[:n]), Fraction(T[-1][-1]))


def strict_point(n: int, strict: Iterable[tuple[Sequence, object]] = (),
                 equal: Iterable[tuple[Sequence, object]] = ()) -> tuple[tuple[Fraction, ...], Fraction] | None:
    """Find x in Q^n with ``a.x < b`` for every strict pair and ``a.x = b`` for
    every equality pair; variables are free.

    Returns ``(x, margin)`` where ``margin > 0`` is the common slack achieved
    (capped at 1), or None when the open system is empty.
    """
    strict = [([to_fraction(v) for v in a], to_fraction(b)) for a, b in strict]
    equal = [([to_fraction(v) for v in a], to_fraction(b)) for a, b in equal]
    # x = xp - xm, plus the margin variable s (index 2n)
    def split(a):
        return list(a) + [-v for v in a]

    A_ub = [split(a) + [Fraction(1)] for a, _ in strict]
    b_ub = [b for _, b in strict]
    A_ub.append([Fraction(0)] * (2 * n) + [Fraction(1)])
    b_ub.append(Fraction(1))
    A_eq = [split(a) + [Fraction(0)] for a, _ in equal]
    b_eq = [b for _, b in equal]
    cost = [Fraction(0)] * (2 * n) + [Fraction(1)]
    res = linprog_max(cost, A_ub, b_ub, A_eq, b_eq)
    if res.status != "optimal" or res.value <= 0:
        return None
    x = tuple(res.x[i] - res.x[n + i] for i in range(n))
    return x, res.value
