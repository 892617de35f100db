"""Window characters and matrices over a Laurent polynomial ring."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from numbers import Number, Rational
from typing import Mapping, Sequence

import numpy as np

from .arrangement import Zonotope, supporting_hyperplanes, zonotope_contains
from .errors import DegenerateZonotope, NonGenericNu, ZeroCoordinate
from .exact import fmt, to_fraction
from .lattice import KernelBasis, ToricInput, kernel_basis, lift


@dataclass(frozen=True)
class WindowSet:
    nu: tuple[Fraction, ...]
    characters: tuple[tuple[int, ...], ...]
    delta: Zonotope

    def to_json(self) -> dict:
        return {"nu": [fmt(x) for x in self.nu], "characters": [list(c) for c in self.characters]}


@dataclass(frozen=True)
class CharacterLift:
    mu: tuple[int, ...]
    mu_hat: tuple[int, ...]


def _lattice_candidates(nu, delta: Zonotope):
    ranges = []
    for (lo, hi), v in zip(delta.bounding_box(), nu):
        ranges.append(range(ceil(v + lo), floor(v + hi) + 1))
    return itertools.product(*ranges)


def check_nu_generic(nu: Sequence, delta: Zonotope) -> bool:
    """True iff no lattice point lies on the boundary of ``nu + delta``."""
    if not delta.is_full_dimensional():
        raise DegenerateZonotope("window zonotope is not full dimensional")
    nu = tuple(to_fraction(x) for x in nu)
    hs = supporting_hyperplanes(delta)
    return not any(zonotope_contains(delta, m, nu, hs)[1] for m in _lattice_candidates(nu, delta))


def enumerate_window(nu: Sequence, delta: Zonotope) -> WindowSet:
    """Lattice points of the closed set ``nu + delta``, sorted."""
    nu = tuple(to_fraction(x) for x in nu)
    if not check_nu_generic(nu, delta):
        raise NonGenericNu(f"nu={[fmt(x) for x in nu]} puts lattice points on the window boundary")
    hs = supporting_hyperplanes(delta)
    chars = sorted(tuple(m) for m in _lattice_candidates(nu, delta)
                   if zonotope_contains(delta, m, nu, hs)[0])
    return WindowSet(nu, tuple(chars), delta)


def lift_characters(w: WindowSet, inp: ToricInput) -> list[CharacterLift]:
    kb = kernel_basis(inp)
    return [CharacterLift(mu, lift(inp, mu, kb)) for mu in w.characters]


def lift_difference_coefficients(kb: KernelBasis, diff: Sequence[int]) -> list[Fraction] | None:
    """Coefficients ``y`` with ``A^T y = diff``, or None when no solution."""
    from .exact import solve

    if kb.rank == 0:
        return None if any(diff) else []
    rows = [list(kb.A.col(j)) for j in range(kb.A.cols)]
    return solve(rows, list(diff))


# --------------------------------------------------------------------------
# Laurent matrices
# --------------------------------------------------------------------------

Laurent = Mapping[tuple[int, ...], Number]


def _clean(p: Mapping) -> dict:
    return {tuple(int(e) for e in k): v for k, v in p.items() if v != 0}


def laurent_mul(p: Laurent, q: Laurent) -> dict:
    out: dict = {}
    for e1, a in p.items():
        for e2, b in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + a * b
    return _clean(out)


def laurent_add(p: Laurent, q: Laurent) -> dict:
    out = dict(p)
    for e, b in q.items():
        out[e] = out.get(e, 0) + b
    return _clean(out)


@dataclass(frozen=True)
class LaurentMatrix:
    """Matrix with entries in ``C[t_1^{+-1}, ..., t_k^{+-1}]``.

    Each entry maps exponent vectors to nonzero coefficients.
    """

    rows: int
    cols: int
    nvars: int
    entries: tuple[Mapping[tuple[int, ...], Number], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        cleaned = tuple(_clean(e) for e in self.entries)
        for e in cleaned:
            if any(len(k) != self.nvars for k in e):
                raise ValueError("exponent length does not match the number of variables")
        object.__setattr__(self, "entries", cleaned)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Laurent]], nvars: int) -> "LaurentMatrix":
        return cls(len(rows), len(rows[0]), nvars, tuple(e for r in rows for e in r))

    def entry(self, i: int, j: int) -> dict:
        return dict(self.entries[i * self.cols + j])

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows or self.nvars != other.nvars:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc: dict = {}
                for k in range(self.cols):
                    acc = laurent_add(acc, laurent_mul(self.entry(i, k), other.entry(k, j)))
                out.append(acc)
        return LaurentMatrix(self.rows, other.cols, self.nvars, tuple(out))

    def to_json(self) -> dict:
        def coef(v):
            v = complex(v)
            return v.real, v.imag

        ents = []
        for e in self.entries:
            ents.append([{"exp": list(k), "re": coef(v)[0], "im": coef(v)[1]} for k, v in sorted(e.items())])
        return {"rows": self.rows, "cols": self.cols, "nvars": self.nvars, "entries": ents}

    @classmethod
    def from_json(cls, obj) -> "LaurentMatrix":
        ents = []
        for e in obj["entries"]:
            d = {}
            for term in e:
                v = complex(term["re"], term["im"])
                d[tuple(term["exp"])] = int(v.real) if v.imag == 0 and v.real == int(v.real) else v
            ents.append(d)
        return cls(obj["rows"], obj["cols"], obj["nvars"], tuple(ents))


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def specialize(M: LaurentMatrix, h: Sequence) -> np.ndarray:
    """Evaluate every entry at the point ``h`` of the torus.

    With rational coordinates and rational coefficients the result is exact
    (an object array of ``Fraction``); otherwise it is complex floating point.
    """
    if len(h) != M.nvars:
        raise ValueError(f"expected {M.nvars} coordinates, got {len(h)}")
    if any(x == 0 for x in h):
        raise ZeroCoordinate("cannot specialize a Laurent polynomial at a zero coordinate")
    exact = all(_is_rational(x) for x in h) and all(_is_rational(v) for e in M.entries for v in e.values())
    if exact:
        hq = [Fraction(x) for x in h]
        out = np.empty((M.rows, M.cols), dtype=object)
        for i in range(M.rows):
            for j in range(M.cols):
                acc = Fraction(0)
                for k, v in M.entry(i, j).items():
                    term = Fraction(v)
                    for base, e in zip(hq, k):
                        term *= base ** e
                    acc += term
                out[i, j] = acc
        return out
    hc = np.asarray([complex(x) for x in h])
    out = np.zeros((M.rows, M.cols), dtype=complex)
    for i in range(M.rows):
        for j in range(M.cols):
            acc = 0j
            for k, v in M.entry(i, j).items():
                acc += complex(v) * np.prod(hc ** np.asarray(k))
            out[i, j] = acc
    return out
