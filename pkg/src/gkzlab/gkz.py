"""GKZ hypergeometric systems, Gamma-series solutions and operator residuals.

Coefficient arithmetic is generic: exact ``Fraction`` when the inputs are
rational, complex floats otherwise, and anything with ``+``/``*`` (e.g.
sympy symbols for ``alpha``) when only the operators are built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, floor
from numbers import Rational
from typing import Sequence

from .errors import DegenerateCone, DimensionMismatch, GammaNormalizationUndefined
from .exact import dot, fmt, nullspace, primitive, rank, solve, to_fraction
from .lattice import IntegerMatrix, KernelBasis, ToricInput


@dataclass(frozen=True)
class DifferentialOperator:
    """``sum coeff * x^xexp * d^dexp`` with all multiplications on the left."""

    terms: tuple[tuple[tuple[int, ...], tuple[int, ...], object], ...]

    def __post_init__(self):
        merged: dict = {}
        for x, d, c in self.terms:
            if any(v < 0 for v in d):
                raise ValueError("derivative exponents must be nonnegative")
            key = (tuple(x), tuple(d))
            merged[key] = merged.get(key, 0) + c
        terms = tuple((x, d, c) for (x, d), c in sorted(merged.items()) if c != 0)
        object.__setattr__(self, "terms", terms)

    @property
    def order(self) -> int:
        return max((sum(d) for _, d, _ in self.terms), default=0)

    def to_json(self) -> list:
        out = []
        for x, d, c in self.terms:
            z = complex(c)
            out.append([list(x), list(d), z.real, z.imag])
        return out

    @classmethod
    def from_json(cls, obj) -> "DifferentialOperator":
        return cls(tuple((tuple(x), tuple(d), complex(re, im)) for x, d, re, im in obj))


def _unit(d: int, j: int) -> tuple[int, ...]:
    return tuple(int(i == j) for i in range(d))


def homogeneity_operator(a_row: Sequence[int], alpha_i) -> DifferentialOperator:
    d = len(a_row)
    terms = [(_unit(d, j), _unit(d, j), a) for j, a in enumerate(a_row) if a != 0]
    terms.append(((0,) * d, (0,) * d, -alpha_i))
    return DifferentialOperator(tuple(terms))


def box_operator(l: Sequence[int]) -> DifferentialOperator:
    """``prod_{l_i>0} d_i^{l_i} - prod_{l_i<0} d_i^{-l_i}``."""
    d = len(l)
    plus = tuple(max(v, 0) for v in l)
    minus = tuple(max(-v, 0) for v in l)
    return DifferentialOperator((((0,) * d, plus, 1), ((0,) * d, minus, -1)))


@dataclass(frozen=True)
class GkzSystem:
    B: IntegerMatrix
    A: IntegerMatrix
    alpha: tuple
    homogeneity_ops: tuple[DifferentialOperator, ...]
    box_vectors: tuple[tuple[int, ...], ...]
    box_ops: tuple[DifferentialOperator, ...]
    L: int

    @property
    def d(self) -> int:
        return self.B.cols

    @property
    def n(self) -> int:
        return self.B.rows

    def dual(self, m: Sequence) -> tuple:
        """``B^* m``: the lattice vector of ``Z^d`` attached to ``m`` in ``Z^n``."""
        return self.B.T.apply(m)

    def to_json(self) -> dict:
        return {
            "A": self.A.to_rows(),
            "B": self.B.to_rows(),
            "alpha": [_num_json(a) for a in self.alpha],
            "L": self.L,
            "homogeneity": [op.to_json() for op in self.homogeneity_ops],
            "box": [{"l": list(l), "op": op.to_json()} for l, op in zip(self.box_vectors, self.box_ops)],
        }


def _num_json(v):
    if isinstance(v, Rational):
        return fmt(v)
    z = complex(v)
    return [z.real, z.imag]


def _m_bound(B: IntegerMatrix, L: int) -> int:
    """Bound on ``|m|_inf`` over all ``m`` with ``|B^T m|_inf <= L``."""
    rows = [[Fraction(x) for x in B.row(i)] for i in range(B.rows)]
    gram = [[dot(r, s) for s in rows] for r in rows]
    # m = (B B^T)^{-1} B l, so |m|_inf <= max row-sum of |(B B^T)^{-1} B| * L
    worst = Fraction(0)
    for i in range(B.rows):
        e = [Fraction(int(i == j)) for j in range(B.rows)]
        g_row = solve(gram, e)  # row i of the inverse Gram matrix (symmetric)
        p_row = [sum((g * r[j] for g, r in zip(g_row, rows)), Fraction(0)) for j in range(B.cols)]
        worst = max(worst, sum(abs(v) for v in p_row))
    return floor(worst * L)


def build_gkz(inp: ToricInput, A: KernelBasis, alpha: Sequence, L: int = 2) -> GkzSystem:
    """Homogeneity operators from the rows of ``A`` and box operators for the
    generators ``B^* e_k`` together with every lattice vector ``l`` in
    ``B^* Z^n`` with ``|l|_inf <= L`` (one of ``l``, ``-l``).
    """
    d, n = inp.d, inp.n
    if A.A.cols != d or A.A.rows != d - n:
        raise DimensionMismatch(f"kernel basis must be {d - n}x{d}, got {A.A.rows}x{A.A.cols}")
    if len(alpha) != d - n:
        raise DimensionMismatch(f"alpha must have length {d - n}, got {len(alpha)}")
    if L < 1:
        raise ValueError("L must be at least 1")
    if A.rank and not (A.A @ inp.B.T).is_zero():
        raise DimensionMismatch("rows of A are not in the kernel of B")
    homog = tuple(homogeneity_operator(A.A.row(i), alpha[i]) for i in range(d - n))
    if d == n:
        return GkzSystem(inp.B, A.A, tuple(alpha), homog, (), (), L)
    Bt = inp.B.T
    vectors = []
    seen = set()
    for k in range(n):
        l = inp.B.row(k)
        vectors.append(tuple(l))
        seen.update({tuple(l), tuple(-v for v in l)})
    bound = _m_bound(inp.B, L)
    extra = []
    for m in itertools.product(range(-bound, bound + 1), repeat=n):
        if not any(m) or next(v for v in m if v != 0) < 0:
            continue
        l = Bt.apply(m)
        if max(abs(v) for v in l) <= L and tuple(l) not in seen:
            seen.update({tuple(l), tuple(-v for v in l)})
            extra.append(tuple(l))
    extra.sort(key=lambda l: (max(abs(v) for v in l), l))
    vectors += extra
    return GkzSystem(inp.B, A.A, tuple(alpha), homog, tuple(vectors),
                     tuple(box_operator(l) for l in vectors), L)


# --------------------------------------------------------------------------
# resonance
# --------------------------------------------------------------------------

def cone_facet_normals(A: KernelBasis) -> list[tuple[int, ...]]:
    """Inward primitive normals of the facets of the cone spanned by the
    columns of ``A``."""
    r = A.rank
    cols = [A.A.col(j) for j in range(A.A.cols)]
    if r == 0 or rank([list(c) for c in cols]) < r:
        raise DegenerateCone("columns of A do not span Q^(d-n)")
    normals = set()
    for subset in itertools.combinations(cols, r - 1):
        ns = nullspace([list(c) for c in subset], r)
        if len(ns) != 1:
            continue
        u = primitive(ns[0])
        vals = [dot(u, c) for c in cols]
        if all(v >= 0 for v in vals):
            normals.add(u)
        elif all(v <= 0 for v in vals):
            normals.add(tuple(-x for x in u))
    return sorted(normals)


def check_nonresonant(A: KernelBasis, alpha: Sequence, tol: float = 1e-12) -> bool:
    """True iff ``alpha`` avoids every integer translate of every facet
    hyperplane of the cone ``R_+ A``.

    A facet hyperplane ``{<u, x> = 0}`` with primitive ``u`` has translates
    ``{<u, x> = k}``, ``k`` in ``Z``, so the test is ``<u, alpha>`` not in
    ``Z``; no enumeration bound is needed.  Inexact ``alpha`` uses ``tol``.
    """
    for u in cone_facet_normals(A):
        if all(isinstance(a, Rational) or isinstance(a, str) for a in alpha):
            v = dot(u, [to_fraction(a) for a in alpha])
            if v.denominator == 1:
                return False
        else:
            v = sum(ui * complex(a) for ui, a in zip(u, alpha))
            if abs(v.imag) <= tol and abs(v.real - round(v.real)) <= tol:
                return False
    return True


# --------------------------------------------------------------------------
# Gamma series
# --------------------------------------------------------------------------

def _as_integer(g):
    """Return ``int(g)`` if ``g`` is an integer (exactly, for rationals)."""
    if isinstance(g, Rational):
        return int(g) if Fraction(g).denominator == 1 else None
    z = complex(g)
    if z.imag == 0 and z.real == int(z.real):
        return int(z.real)
    return None


def gamma_factor(g, k: int):
    """``1/Gamma(g + k + 1)`` up to a ``k``-independent constant.

    For integral ``g`` this is exactly ``1/(g+k)!`` (zero past the pole);
    otherwise it is ``Gamma(g+1)/Gamma(g+k+1)`` as a finite product.
    """
    gi = _as_integer(g)
    one = Fraction(1) if isinstance(g, Rational) else 1.0 + 0j
    if gi is not None:
        return one / factorial(gi + k) if gi + k >= 0 else one * 0
    out = one
    if k >= 0:
        for j in range(1, k + 1):
            out /= (g + j)
    else:
        for j in range(0, -k):
            out *= (g - j)
    return out


def falling(e, v: int):
    out = 1
    for j in range(v):
        out *= (e - j)
    return out


@dataclass(frozen=True)
class HypergeometricSeries:
    """Truncation of ``sum_m x^(B^* m + gamma) / prod Gamma(B^* m + gamma + 1)``.

    ``coefficients`` is keyed by ``m`` in ``Z^n`` with ``|m|_inf <= N`` and
    normalized so that the base coefficient equals 1.
    """

    B: IntegerMatrix
    gamma: tuple
    N: int
    coefficients: dict
    base_index: tuple[int, ...]

    def shift(self, m) -> tuple[int, ...]:
        return self.B.T.apply(m)

    def exponent(self, m) -> tuple:
        return tuple(g + s for g, s in zip(self.gamma, self.shift(m)))

    def to_json(self) -> dict:
        return {
            "gamma": [_num_json(g) for g in self.gamma],
            "N": self.N,
            "base_index": list(self.base_index),
            "coefficients": [{"m": list(m), "value": _num_json(c)}
                             for m, c in sorted(self.coefficients.items())],
        }


def _index_order(n: int, N: int):
    pts = list(itertools.product(range(-N, N + 1), repeat=n))
    pts.sort(key=lambda m: (max((abs(v) for v in m), default=0), m))
    return pts


def series_solution(sys: GkzSystem, gamma: Sequence, N: int, tol: float = 1e-12) -> HypergeometricSeries:
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    if len(gamma) != sys.d:
        raise DimensionMismatch(f"gamma must have length {sys.d}")
    exact = all(isinstance(g, Rational) for g in gamma)
    gamma = tuple(Fraction(g) if exact else complex(g) for g in gamma)
    for i in range(sys.A.rows):
        lhs = sum((a * g for a, g in zip(sys.A.row(i), gamma)), 0)
        rhs = sys.alpha[i]
        if exact and isinstance(rhs, Rational):
            if lhs != rhs:
                raise ValueError(f"A gamma != alpha in row {i}")
        elif abs(complex(lhs) - complex(rhs)) > tol:
            raise ValueError(f"A gamma != alpha in row {i}")
    Bt = sys.B.T
    raw = {}
    for m in _index_order(sys.n, N):
        c = Fraction(1) if exact else 1.0 + 0j
        for g, s in zip(gamma, Bt.apply(m)):
            c *= gamma_factor(g, s)
            if c == 0:
                break
        raw[m] = c
    base = next((m for m in _index_order(sys.n, N) if raw[m] != 0), None)
    if base is None:
        poles = [i for i, g in enumerate(gamma) if (_as_integer(g) is not None and _as_integer(g) < 0)]
        raise GammaNormalizationUndefined(
            f"every coefficient with |m| <= {N} sits at a Gamma pole (coordinates {poles})",
            index=poles[0] if poles else None)
    c0 = raw[base]
    coeffs = {m: c / c0 for m, c in raw.items()}
    return HypergeometricSeries(sys.B, gamma, N, coeffs, base)


# --------------------------------------------------------------------------
# residuals
# --------------------------------------------------------------------------

@dataclass
class Residual:
    """Result of applying an operator to a truncated series.

    Keys are integer shift vectors ``delta`` for the monomial
    ``x^(gamma + delta)``.  A key is *interior* when every series index that
    would feed it in the untruncated sum lies inside the truncation.
    """

    gamma: tuple
    interior: dict = field(default_factory=dict)
    boundary: dict = field(default_factory=dict)
    boundary_sources: set = field(default_factory=set)

    @property
    def interior_max(self):
        return max((abs(v) for v in self.interior.values()), default=0)

    @property
    def boundary_max(self):
        return max((abs(v) for v in self.boundary.values()), default=0)

    def weighted_boundary_max(self, x: Sequence[float]) -> float:
        """Largest ``|c x^(gamma+delta)|`` over boundary terms at positive ``x``."""
        best = 0.0
        for delta, c in self.boundary.items():
            w = abs(complex(c))
            for xi, g, s in zip(x, self.gamma, delta):
                w *= float(xi) ** (complex(g).real + s)
            best = max(best, w)
        return best

    def to_json(self) -> dict:
        def enc(d):
            return [{"delta": list(k), "value": _num_json(v)} for k, v in sorted(d.items())]

        return {"interior": enc(self.interior), "boundary": enc(self.boundary),
                "interior_max": float(self.interior_max), "boundary_max": float(self.boundary_max),
                "boundary_sources": sorted(list(m) for m in self.boundary_sources)}


def _preimage(B: IntegerMatrix, gram_rows, delta) -> tuple[int, ...] | None:
    """The ``m`` with ``B^T m = delta``, if it exists and is integral."""
    rhs = [Fraction(sum(b * x for b, x in zip(B.row(i), delta))) for i in range(B.rows)]
    m = solve(gram_rows, rhs)
    if m is None or any(v.denominator != 1 for v in m):
        return None
    m = tuple(int(v) for v in m)
    return m if tuple(B.T.apply(m)) == tuple(delta) else None


def apply_operator(op: DifferentialOperator, s: HypergeometricSeries) -> Residual:
    """Apply ``op`` term by term; ``d_i`` sends ``x^e`` to ``e_i x^(e - 1_i)``."""
    acc: dict = {}
    for m, c in s.coefficients.items():
        if c == 0:
            continue
        sh = s.shift(m)
        for x, dv, k in op.terms:
            f = c * k
            for g, e_int, v in zip(s.gamma, sh, dv):
                if v:
                    f *= falling(g + e_int, v)
            if f == 0:
                continue
            delta = tuple(a + b - v for a, b, v in zip(sh, x, dv))
            acc[delta] = acc.get(delta, 0) + f
    acc = {k: v for k, v in acc.items() if v != 0}
    B = s.B
    rows = [[Fraction(v) for v in B.row(i)] for i in range(B.rows)]
    gram = [[dot(r, t) for t in rows] for r in rows]
    res = Residual(s.gamma)
    for delta, v in acc.items():
        sources = []
        for x, dv, _ in op.terms:
            src = tuple(a - b + c for a, b, c in zip(delta, x, dv))
            m = _preimage(B, gram, src)
            if m is not None:
                sources.append(m)
        if all(max((abs(t) for t in m), default=0) <= s.N for m in sources):
            res.interior[delta] = v
        else:
            res.boundary[delta] = v
            res.boundary_sources.update(m for m in sources if max((abs(t) for t in m), default=0) <= s.N)
    return res
