"""Shared helpers for the test suite: seeded geometry draws and references."""

import numpy as np

from spherebound import DegenerateSimplexError, RadiiQuadruple, embed


def draw_embeddable(rng, lo=0.3, hi=3.0):
    """One tangent tetrahedron with log-uniform radii, resampled until the
    quadruple admits a nondegenerate embedding."""
    while True:
        radii = np.exp(rng.uniform(np.log(lo), np.log(hi), size=4))
        try:
            return embed(RadiiQuadruple(tuple(float(r) for r in radii)))
        except DegenerateSimplexError:
            continue


def min_angle_reference(points):
    """Plain double-loop minimum pairwise angle, kept independent of the
    library's scan so the two can be compared bitwise."""
    import math

    n = points.shape[0]
    best = math.pi
    for a in range(n - 1):
        xa, ya, za = points[a, 0], points[a, 1], points[a, 2]
        for b in range(a + 1, n):
            dot = xa * points[b, 0] + ya * points[b, 1] + za * points[b, 2]
            ang = math.acos(min(1.0, max(-1.0, dot)))
            if ang < best:
                best = ang
    return best
