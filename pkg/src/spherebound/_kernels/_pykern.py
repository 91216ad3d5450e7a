"""Pure NumPy implementations of the hot kernels.

These mirror the compiled kernels in ``_ckern.pyx`` operation-for-operation:
every per-element arithmetic expression is written with the same association
order, so the two backends produce bitwise-identical results (the extension
is compiled with FP contraction disabled).
"""

from __future__ import annotations

import numpy as np

__all__ = ["gegenbauer_table", "eval_series", "classify_tetra_points"]


def gegenbauer_table(nmax: int, lam: float, t: np.ndarray) -> np.ndarray:
    """Table ``T[k, j] = C_k^lam(t[j])`` for k = 0..nmax by forward recurrence.

    Recurrence: k*C_k = 2*(k+lam-1)*t*C_{k-1} - (k+2*lam-2)*C_{k-2},
    with C_0 = 1 and C_1 = 2*lam*t.
    """
    t = np.ascontiguousarray(t, dtype=np.float64)
    out = np.empty((nmax + 1, t.shape[0]), dtype=np.float64)
    out[0] = 1.0
    if nmax >= 1:
        pkm2 = out[0]
        pkm1 = 2.0 * lam * t
        out[1] = pkm1
        for k in range(2, nmax + 1):
            a = 2.0 * (k + lam - 1.0)
            b = k + 2.0 * lam - 2.0
            pk = (a * t * pkm1 - b * pkm2) / k
            out[k] = pk
            pkm2 = pkm1
            pkm1 = pk
    return out


def eval_series(coeffs: np.ndarray, lam: float, t: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_k coeffs[k] * C_k^lam(t)`` in one forward pass."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    t = np.ascontiguousarray(t, dtype=np.float64)
    n = coeffs.shape[0] - 1
    acc = np.full(t.shape[0], coeffs[0], dtype=np.float64)
    if n >= 1:
        pkm2 = np.ones(t.shape[0], dtype=np.float64)
        pkm1 = 2.0 * lam * t
        acc = acc + coeffs[1] * pkm1
        for k in range(2, n + 1):
            a = 2.0 * (k + lam - 1.0)
            b = k + 2.0 * lam - 2.0
            pk = (a * t * pkm1 - b * pkm2) / k
            acc = acc + coeffs[k] * pk
            pkm2 = pkm1
            pkm1 = pk
    return acc


def classify_tetra_points(
    pts: np.ndarray,
    normals: np.ndarray,
    offsets: np.ndarray,
    verts: np.ndarray,
    radii: np.ndarray,
) -> np.ndarray:
    """Classify sample points against a tetrahedron and its vertex balls.

    Returns an int8 array: 0 = outside the tetrahedron, 1 = inside but in
    no vertex ball, 2 = inside and within distance radii[m] of vertex m.
    ``normals``/``offsets`` describe the four face planes as n.x <= offset
    for interior points.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    inside = np.ones(pts.shape[0], dtype=bool)
    for f in range(4):
        s = normals[f, 0] * x + normals[f, 1] * y + normals[f, 2] * z
        inside &= s <= offsets[f]
    hit = np.zeros(pts.shape[0], dtype=bool)
    for m in range(4):
        dx = x - verts[m, 0]
        dy = y - verts[m, 1]
        dz = z - verts[m, 2]
        d2 = dx * dx + dy * dy + dz * dz
        hit |= d2 <= radii[m] * radii[m]
    status = inside.astype(np.int8)
    status[inside & hit] = 2
    return status
