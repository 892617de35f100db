"""Exact integer linear algebra for torus weight matrices.

Conventions
-----------
``B`` is the ``n x d`` weight matrix whose column ``j`` is the character of
the torus on the ``j``-th coordinate of ``C^d``.  The kernel lattice of
``B : Z^d -> Z^n`` is stored as a ``(d-n) x d`` matrix ``A`` whose *rows*
span the kernel.  That is the transpose of the map ``Z^{d-n} -> Z^d`` in the
short exact sequence, and it is the shape in which row ``i`` reads off the
coefficients ``a_ij`` of the ``i``-th homogeneity operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import NotSurjective


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative shape")
        if self.rows * self.cols != len(self.entries):
            raise ValueError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                             f"got {len(self.entries)}")
        for e in self.entries:
            if isinstance(e, bool) or not isinstance(e, int):
                raise TypeError(f"entries must be Python ints, got {e!r}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        entries = []
        for r in rows:
            for e in r:
                if isinstance(e, bool) or int(e) != e:
                    raise TypeError(f"non-integer entry {e!r}")
                entries.append(int(e))
        return cls(len(rows), cols, tuple(entries))

    @classmethod
    def identity(cls, k: int) -> "IntegerMatrix":
        return cls.from_rows([[int(i == j) for j in range(k)] for i in range(k)], k)

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def T(self) -> "IntegerMatrix":
        return IntegerMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = [other.col(j) for j in range(other.cols)]
        out = [[sum(a * b for a, b in zip(self.row(i), c)) for c in cols] for i in range(self.rows)]
        return IntegerMatrix.from_rows(out, other.cols)

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product (works for rational or complex vectors too)."""
        return tuple(sum((a * x for a, x in zip(self.row(i), v)), 0) for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def __repr__(self):
        return f"IntegerMatrix({self.to_rows()!r})"


@dataclass(frozen=True)
class ToricInput:
    """Weight matrix of a torus ``(C*)^n`` acting diagonally on ``C^d``."""

    B: IntegerMatrix

    def __post_init__(self):
        if not self.B.cols >= self.B.rows >= 1:
            raise ValueError(f"need d >= n >= 1, got n={self.B.rows}, d={self.B.cols}")

    @classmethod
    def from_rows(cls, rows) -> "ToricInput":
        return cls(IntegerMatrix.from_rows(rows))

    @property
    def n(self) -> int:
        return self.B.rows

    @property
    def d(self) -> int:
        return self.B.cols

    @property
    def weights(self) -> list[tuple[int, ...]]:
        return [self.B.col(j) for j in range(self.d)]


@dataclass(frozen=True)
class KernelBasis:
    A: IntegerMatrix

    @property
    def rank(self) -> int:
        return self.A.rows

    def rows(self) -> list[tuple[int, ...]]:
        return [self.A.row(i) for i in range(self.A.rows)]


# --------------------------------------------------------------------------
# normal forms
# --------------------------------------------------------------------------

def _swap_rows(M, i, j):
    M[i], M[j] = M[j], M[i]


def _swap_cols(M, i, j):
    for r in M:
        r[i], r[j] = r[j], r[i]


def _add_row(M, dst, src, q):
    """row[dst] += q * row[src]"""
    M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]


def _add_col(M, dst, src, q):
    for r in M:
        r[dst] += q * r[src]


def smith_normal_form(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return unimodular ``U``, ``V`` and diagonal ``S`` with ``U @ M @ V == S``.

    The diagonal entries are nonnegative and each divides the next.
    """
    m, k = M.rows, M.cols
    S = M.to_rows()
    U = IntegerMatrix.identity(m).to_rows()
    V = IntegerMatrix.identity(k).to_rows()
    for t in range(min(m, k)):
        nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, k) if S[i][j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        _swap_rows(S, t, i)
        _swap_rows(U, t, i)
        _swap_cols(S, t, j)
        _swap_cols(V, t, j)
        while True:
            # bring the smallest entry of row/column t to the pivot
            cand = [(abs(S[i][t]), i, t) for i in range(t, m) if S[i][t] != 0]
            cand += [(abs(S[t][j]), t, j) for j in range(t + 1, k) if S[t][j] != 0]
            _, i, j = min(cand)
            if i != t:
                _swap_rows(S, t, i)
                _swap_rows(U, t, i)
            if j != t:
                _swap_cols(S, t, j)
                _swap_cols(V, t, j)
            p = S[t][t]
            for i in range(t + 1, m):
                q = S[i][t] // p
                if q:
                    _add_row(S, i, t, -q)
                    _add_row(U, i, t, -q)
            for j in range(t + 1, k):
                q = S[t][j] // p
                if q:
                    _add_col(S, j, t, -q)
                    _add_col(V, j, t, -q)
            if any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, k)):
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, k) if S[i][j] % p), None)
            if bad is None:
                break
            _add_row(S, t, bad[0], 1)
            _add_row(U, t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return (IntegerMatrix.from_rows(U, m), IntegerMatrix.from_rows(S, k),
            IntegerMatrix.from_rows(V, k))


def smith_invariants(M: IntegerMatrix) -> list[int]:
    """Diagonal of the Smith form, length ``min(rows, cols)`` (zeros included)."""
    _, S, _ = smith_normal_form(M)
    return [S[i, i] for i in range(min(M.rows, M.cols))]


def hermite_normal_form(M: IntegerMatrix) -> IntegerMatrix:
    """Row-style Hermite normal form of the row lattice of ``M``.

    Zero rows are dropped.  Pivots are positive and entries above a pivot lie
    in ``[0, pivot)``, so two matrices have the same row lattice iff their
    Hermite forms are equal.
    """
    H = M.to_rows()
    m, k = M.rows, M.cols
    r = 0
    for c in range(k):
        if r == m:
            break
        while True:
            nz = [(abs(H[i][c]), i) for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            _, i = min(nz)
            _swap_rows(H, r, i)
            done = True
            for i in range(r + 1, m):
                q = H[i][c] // H[r][c]
                if q:
                    _add_row(H, i, r, -q)
                if H[i][c]:
                    done = False
            if done:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    _add_row(H, i, r, -q)
            r += 1
    return IntegerMatrix.from_rows(H[:r], k)


def determinant(M: IntegerMatrix) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    k = M.rows
    if k == 0:
        return 1
    a = M.to_rows()
    sign = 1
    prev = 1
    for t in range(k - 1):
        if a[t][t] == 0:
            swap = next((i for i in range(t + 1, k) if a[i][t] != 0), None)
            if swap is None:
                return 0
            _swap_rows(a, t, swap)
            sign = -sign
        for i in range(t + 1, k):
            for j in range(t + 1, k):
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
        prev = a[t][t]
    return sign * a[k - 1][k - 1]


def is_surjective(inp: ToricInput) -> bool:
    return all(s == 1 for s in smith_invariants(inp.B))


def kernel_basis(inp: ToricInput) -> KernelBasis:
    """Lattice basis of ``ker(B)`` as rows, in Hermite normal form.

    Raises :class:`NotSurjective` unless every Smith invariant of ``B`` is 1.
    """
    U, S, V = smith_normal_form(inp.B)
    inv = [S[i, i] for i in range(inp.n)]
    if any(s != 1 for s in inv):
        raise NotSurjective(f"B is not surjective onto Z^{inp.n}: Smith invariants {inv}")
    rows = [V.col(j) for j in range(inp.n, inp.d)]
    if not rows:
        return KernelBasis(IntegerMatrix(0, inp.d, ()))
    return KernelBasis(hermite_normal_form(IntegerMatrix.from_rows(rows, inp.d)))


def is_unimodular_weights(inp: ToricInput) -> bool:
    """True iff the weights sum to zero."""
    return all(sum(inp.B.row(i)) == 0 for i in range(inp.n))


def _direction(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    w = [x // g for x in v]
    lead = next(x for x in w if x != 0)
    return tuple(w) if lead > 0 else tuple(-x for x in w)


def is_quasi_symmetric(inp: ToricInput) -> bool:
    """For every line through 0, the weights on that line sum to zero.

    Zero weights lie on every line and are ignored.
    """
    sums: dict[tuple[int, ...], list[int]] = {}
    for w in inp.weights:
        if not any(w):
            continue
        acc = sums.setdefault(_direction(w), [0] * inp.n)
        for i, x in enumerate(w):
            acc[i] += x
    return all(not any(s) for s in sums.values())


def lift(inp: ToricInput, mu: Sequence[int], kernel: KernelBasis | None = None) -> tuple[int, ...]:
    """Integer ``x`` with ``B x = mu``, reduced to a short representative.

    A particular solution comes from the Smith decomposition; it is then
    moved by kernel vectors (rounded least squares followed by greedy
    descent) to minimize the squared norm, ties broken lexicographically.
    """
    U, S, V = smith_normal_form(inp.B)
    if any(S[i, i] != 1 for i in range(inp.n)):
        raise NotSurjective("B is not surjective")
    y = list(U.apply(mu)) + [0] * (inp.d - inp.n)
    x = list(V.apply(y))
    if kernel is None:
        kernel = kernel_basis(inp)
    K = kernel.rows()
    if not K:
        return tuple(x)
    # rounded least squares: (K K^T) c = K x
    from .exact import solve

    gram = [[Fraction(sum(a * b for a, b in zip(r, s))) for s in K] for r in K]
    c = solve(gram, [Fraction(sum(a * b for a, b in zip(r, x))) for r in K])
    for coef, r in zip(c, K):
        q = round(coef)
        x = [xi - q * ri for xi, ri in zip(x, r)]

    def key(v):
        return (sum(t * t for t in v), tuple(v))

    improved = True
    while improved:
        improved = False
        for r in K:
            for s in (1, -1):
                cand = [xi - s * ri for xi, ri in zip(x, r)]
                if key(cand) < key(x):
                    x = cand
                    improved = True
    return tuple(x)
