"""Adaptive Dormand-Prince 5(4) stepping for complex linear matrix ODEs.

The integrator walks along a straight segment ``z(s) = z0 + s (z1 - z0)``,
``s`` in ``[0, 1]``, solving ``dY/dz = A(z) Y``.  Step size is limited both by
the embedded error estimate and by a fixed fraction of the distance to the
nearest singular point, so steps shrink when the path passes close to a pole.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import StepUnderflow

# Dormand-Prince coefficients
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


class StepStats:
    __slots__ = ("accepted", "rejected")

    def __init__(self):
        self.accepted = 0
        self.rejected = 0


def transport_segment(A: Callable[[complex], np.ndarray], Y: np.ndarray, z0: complex, z1: complex,
                      singular: Sequence[complex], tol: float = 1e-12, fraction: float = 0.25,
                      max_steps: int = 200_000, stats: StepStats | None = None) -> np.ndarray:
    """Continue ``Y`` from ``z0`` to ``z1`` along the straight segment."""
    dz = z1 - z0
    length = abs(dz)
    if length == 0:
        return Y
    sing = np.asarray(list(singular), dtype=complex)

    def clearance(z):
        return float(np.min(np.abs(sing - z))) if sing.size else np.inf

    def f(s, Y):
        return dz * (A(z0 + s * dz) @ Y)

    s = 0.0
    h = min(1.0, fraction * clearance(z0) / length, 0.05)
    k1 = f(s, Y)
    steps = 0
    while s < 1.0:
        if steps >= max_steps:
            raise StepUnderflow(f"step budget of {max_steps} exhausted on segment {z0} -> {z1}")
        z = z0 + s * dz
        h = min(h, 1.0 - s, fraction * clearance(z) / length)
        if h <= 1e-14:
            raise StepUnderflow(f"step size underflow at z={z}")
        ks = [k1]
        for i in range(1, 7):
            Yi = Y + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(f(s + _C[i] * h, Yi))
        Y5 = Y + h * sum(b * k for b, k in zip(_B5, ks) if b)
        err_vec = h * sum(e * k for e, k in zip(_E, ks) if e)
        scale = tol * max(1.0, float(np.max(np.abs(Y5))))
        err = float(np.max(np.abs(err_vec))) / scale
        steps += 1
        if err <= 1.0:
            s += h
            Y = Y5
            k1 = ks[6]  # first-same-as-last
            if stats:
                stats.accepted += 1
            grow = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
            h *= grow
        else:
            if stats:
                stats.rejected += 1
            h *= max(0.1, 0.9 * err ** -0.2)
    return Y


def transport_polygon(A: Callable[[complex], np.ndarray], vertices: Sequence[complex], dim: int,
                      singular: Sequence[complex], tol: float = 1e-12, fraction: float = 0.25,
                      max_steps: int = 200_000, stats: StepStats | None = None) -> np.ndarray:
    """Fundamental-matrix transport along a polyline, starting from the identity."""
    Y = np.eye(dim, dtype=complex)
    for z0, z1 in zip(vertices[:-1], vertices[1:]):
        Y = transport_segment(A, Y, complex(z0), complex(z1), singular, tol, fraction, max_steps, stats)
    return Y
