# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: polynomial-basis tables and Monte Carlo point tests.

Arithmetic is ordered exactly as in the NumPy fallback (``_pykern``) and the
extension is built with -ffp-contract=off, so both backends agree bitwise.
"""

import numpy as np


def gegenbauer_table(int nmax, double lam, const double[::1] t):
    """Table T[k, j] = C_k^lam(t[j]) for k = 0..nmax by forward recurrence."""
    cdef Py_ssize_t j, npts = t.shape[0]
    cdef int k
    cdef double x, a, b, pk, pkm1, pkm2
    out = np.empty((nmax + 1, npts), dtype=np.float64)
    cdef double[:, ::1] v = out
    for j in range(npts):
        x = t[j]
        pkm2 = 1.0
        v[0, j] = 1.0
        if nmax >= 1:
            pkm1 = 2.0 * lam * x
            v[1, j] = pkm1
            for k in range(2, nmax + 1):
                a = 2.0 * (k + lam - 1.0)
                b = k + 2.0 * lam - 2.0
                pk = (a * x * pkm1 - b * pkm2) / k
                v[k, j] = pk
                pkm2 = pkm1
                pkm1 = pk
    return out


def eval_series(const double[::1] coeffs, double lam, const double[::1] t):
    """Evaluate sum_k coeffs[k] * C_k^lam(t) in one forward pass."""
    cdef Py_ssize_t j, npts = t.shape[0]
    cdef int k, n = coeffs.shape[0] - 1
    cdef double x, a, b, s, pk, pkm1, pkm2
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] v = out
    for j in range(npts):
        x = t[j]
        s = coeffs[0]
        if n >= 1:
            pkm2 = 1.0
            pkm1 = 2.0 * lam * x
            s = s + coeffs[1] * pkm1
            for k in range(2, n + 1):
                a = 2.0 * (k + lam - 1.0)
                b = k + 2.0 * lam - 2.0
                pk = (a * x * pkm1 - b * pkm2) / k
                s = s + coeffs[k] * pk
                pkm2 = pkm1
                pkm1 = pk
        v[j] = s
    return out


def classify_tetra_points(const double[:, ::1] pts, const double[:, ::1] normals,
                          const double[::1] offsets, const double[:, ::1] verts,
                          const double[::1] radii):
    """Status per point: 0 outside tetra, 1 inside, 2 inside a vertex ball."""
    cdef Py_ssize_t i, npts = pts.shape[0]
    cdef int f, m, inside, hit
    cdef double x, y, z, s, dx, dy, dz, d2
    out = np.empty(npts, dtype=np.int8)
    cdef signed char[::1] v = out
    for i in range(npts):
        x = pts[i, 0]
        y = pts[i, 1]
        z = pts[i, 2]
        inside = 1
        for f in range(4):
            s = normals[f, 0] * x + normals[f, 1] * y + normals[f, 2] * z
            if s > offsets[f]:
                inside = 0
                break
        if not inside:
            v[i] = 0
            continue
        hit = 0
        for m in range(4):
            dx = x - verts[m, 0]
            dy = y - verts[m, 1]
            dz = z - verts[m, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 <= radii[m] * radii[m]:
                hit = 1
                break
        v[i] = 2 if hit else 1
    return out
