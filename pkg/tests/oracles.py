"""Independent reference computations shared by the test modules."""

from fractions import Fraction

import mpmath


def interval_faces(p):
    """Each face of a 1D stratification as an explicit closed interval (lo, hi)."""
    box = p.arrangement.box
    cuts = [box.lo[0]] + [h.offset for h in p.arrangement.active] + [box.hi[0]]
    out = {}
    for f in p.faces:
        x = f.witness[0]
        if f.dim == 0:
            out[f.signs] = (x, x)
        else:
            out[f.signs] = (max(c for c in cuts if c < x), min(c for c in cuts if c > x))
    return out


def brute_force_collinear(intervals, box, a, b, c):
    """Sample points of each open face; require a common closed lower face."""
    def samples(iv):
        lo, hi = iv
        return [lo] if lo == hi else [lo + (hi - lo) * Fraction(k, 8) for k in range(1, 8)]

    def lower(iv):
        lo, hi = iv
        if lo == hi:
            return {iv}
        return {iv} | {(v, v) for v in (lo, hi) if box.lo[0] < v < box.hi[0]}

    if not (lower(intervals[a]) & lower(intervals[b]) & lower(intervals[c])):
        return False
    return any(min(x, z) <= y <= max(x, z)
               for x in samples(intervals[a]) for y in samples(intervals[b]) for z in samples(intervals[c]))


def gauss_series_coefficient(a, b, c, k):
    """(a)_k (b)_k / ((c)_k k!) from Pochhammer symbols."""
    a, b, c = (mpmath.mpf(v.numerator) / v.denominator for v in (a, b, c))
    return mpmath.rf(a, k) * mpmath.rf(b, k) / (mpmath.rf(c, k) * mpmath.factorial(k))
