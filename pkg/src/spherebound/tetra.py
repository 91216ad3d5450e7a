"""Geometry of four mutually tangent spheres and the density bound.

Four spheres of radii r_i <= r_j <= r_k <= r_l, all pairs touching, have
centers forming a tetrahedron with edge lengths r_a + r_b. This module
embeds that tetrahedron by trilateration, computes its face normals,
interior dihedral angles (two independent methods), vertex solid angles
(spherical excess, plus an independent tangent-half-angle method), wedge
volumes, and the simplicial density: the fraction of the tetrahedron
covered by the four balls. The density upper bound for a finite radius set
maximizes a caller-supplied tetrahedron-packing factor times the simplicial
density over all radius quadruples drawn from the set.

Not every positive quadruple embeds: a sphere much smaller than the other
three cannot touch all three at once (its center would have to sit closer
to the big centers than their circumradius allows), and the Cayley-Menger
determinant of the six tangency distances goes negative. Such quadruples
raise DegenerateSimplexError.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "DegenerateSimplexError",
    "RadiiQuadruple",
    "TangentTetrahedron",
    "FaceNormals",
    "DihedralAngles",
    "SolidAngles",
    "DensityBound",
    "cayley_menger",
    "embed",
    "face_normals",
    "dihedral_angles",
    "dihedral_angles_projection",
    "solid_angles",
    "solid_angles_tangent",
    "wedge_volume",
    "simplicial_density",
    "density_upper_bound",
]

_DEGENERACY_TOL = 1e-12


class DegenerateSimplexError(ValueError):
    """Distances that do not embed as a nondegenerate tetrahedron in R^3."""


@dataclass(frozen=True)
class RadiiQuadruple:
    """Four sphere radii, stored ascending."""

    r: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.r))
        if len(vals) != 4:
            raise ValueError("exactly four radii are required")
        if not all(math.isfinite(v) and v > 0.0 for v in vals):
            raise ValueError("radii must be positive finite reals")
        object.__setattr__(self, "r", vals)

    def asarray(self) -> np.ndarray:
        return np.asarray(self.r, dtype=np.float64)


def _as_quadruple(radii) -> RadiiQuadruple:
    if isinstance(radii, RadiiQuadruple):
        return radii
    return RadiiQuadruple(tuple(radii))


@dataclass(frozen=True, eq=False)
class TangentTetrahedron:
    """Embedded center tetrahedron of four mutually tangent spheres.

    ``vertices[0]`` is at the origin, ``vertices[1]`` on the positive
    x-axis, ``vertices[2]`` in the upper half xy-plane, ``vertices[3]``
    above it (positive z); row m holds the center of the radius ``radii[m]``
    sphere, and ``|vertices[a] - vertices[b]| = radii[a] + radii[b]``.
    """

    radii: tuple[float, float, float, float]
    vertices: np.ndarray

    def edge_length(self, a: int, b: int) -> float:
        return self.radii[a] + self.radii[b]

    def volume(self) -> float:
        return abs(self.triple_product()) / 6.0

    def triple_product(self) -> float:
        """Scalar triple product of the three non-origin vertices."""
        v = self.vertices
        return float(np.dot(v[1], np.cross(v[2], v[3])))


def cayley_menger(d2: np.ndarray) -> float:
    """Cayley-Menger determinant of a 4x4 squared-distance matrix.

    Positive iff the distances embed as a nondegenerate tetrahedron in R^3
    (the value equals 288 * volume^2); zero for flat configurations and
    negative for unrealizable distance sets.
    """
    m = np.ones((5, 5), dtype=np.float64)
    m[0, 0] = 0.0
    m[1:, 1:] = np.asarray(d2, dtype=np.float64)
    return float(np.linalg.det(m))


def embed(radii) -> TangentTetrahedron:
    """Embed the tangency tetrahedron of a radius quadruple.

    Places vertex 0 at the origin, vertex 1 on the positive x-axis, vertex
    2 in the upper half xy-plane, and vertex 3 at positive z, solving each
    position from its distances to the already-placed vertices. All six
    distances are the radius sums; raises DegenerateSimplexError when the
    scale-normalized Cayley-Menger determinant is at or below 1e-12, i.e.
    the quadruple admits no mutually tangent configuration.
    """
    rq = _as_quadruple(radii)
    r = rq.asarray()
    dist = r[:, None] + r[None, :]
    np.fill_diagonal(dist, 0.0)
    scale = float(dist[np.triu_indices(4, 1)].mean())
    cm = cayley_menger(dist * dist)
    if cm / scale**6 <= _DEGENERACY_TOL:
        raise DegenerateSimplexError(
            f"radii {rq.r} do not admit a mutually tangent embedding "
            f"(normalized Cayley-Menger {cm / scale**6:.3e})"
        )
    d01, d02, d03 = dist[0, 1], dist[0, 2], dist[0, 3]
    d12, d13, d23 = dist[1, 2], dist[1, 3], dist[2, 3]
    x2 = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01)
    y2_sq = d02 * d02 - x2 * x2
    x3 = (d01 * d01 + d03 * d03 - d13 * d13) / (2.0 * d01)
    if y2_sq <= 0.0:
        raise DegenerateSimplexError(f"radii {rq.r}: base triangle is flat")
    y2 = math.sqrt(y2_sq)
    y3 = (d03 * d03 - d23 * d23 + x2 * x2 + y2 * y2 - 2.0 * x2 * x3) / (2.0 * y2)
    z3_sq = d03 * d03 - x3 * x3 - y3 * y3
    if z3_sq <= 0.0:
        raise DegenerateSimplexError(f"radii {rq.r}: apex has no real height")
    verts = np.array(
        [
            [0.0, 0.0, 0.0],
            [d01, 0.0, 0.0],
            [x2, y2, 0.0],
            [x3, y3, math.sqrt(z3_sq)],
        ],
        dtype=np.float64,
    )
    verts.setflags(write=False)
    return TangentTetrahedron(radii=rq.r, vertices=verts)


@dataclass(frozen=True, eq=False)
class FaceNormals:
    """Outward face normals, one per face, named by the face's vertices.

    Computed as the cross products of the vertex vectors (vertex 0 at the
    origin makes three of the four products direct), then each flipped if
    needed to point away from the face's opposite vertex; ``flipped``
    records which ones were.
    """

    u_012: np.ndarray
    u_023: np.ndarray
    u_013: np.ndarray
    u_123: np.ndarray
    flipped: tuple[bool, bool, bool, bool]

    def as_rows(self) -> np.ndarray:
        return np.stack([self.u_012, self.u_023, self.u_013, self.u_123])


def _require_nondegenerate(tet: TangentTetrahedron) -> None:
    v = tet.vertices
    scale = max(float(np.abs(v).max()), 1e-300)
    if abs(tet.triple_product()) <= 1e-12 * scale**3:
        raise DegenerateSimplexError("tetrahedron has (numerically) zero volume")


def face_normals(tet: TangentTetrahedron) -> FaceNormals:
    _require_nondegenerate(tet)
    v = tet.vertices
    raw = [
        np.cross(v[1], v[2]),
        np.cross(v[2], v[3]),
        np.cross(v[1], v[3]),
        np.cross(v[2] - v[1], v[3] - v[1]),
    ]
    opposite = (3, 1, 2, 0)
    scale = float(np.abs(v).max()) ** 2
    out = []
    flips = []
    for f, (u, opp) in enumerate(zip(raw, opposite)):
        if float(np.linalg.norm(u)) <= 1e-12 * max(scale, 1e-300):
            raise DegenerateSimplexError(f"face {f} of the tetrahedron is flat")
        if f < 3:
            # Face plane passes through the origin; outward means the
            # opposite vertex lies on the negative side.
            flip = float(np.dot(u, v[opp])) > 0.0
        else:
            # Face 123: outward points away from the origin.
            flip = float(np.dot(u, v[1])) < 0.0
        flips.append(flip)
        out.append(-u if flip else u)
    return FaceNormals(
        u_012=out[0], u_023=out[1], u_013=out[2], u_123=out[3],
        flipped=tuple(flips),
    )


# Each edge lies on exactly two faces; faces are indexed in FaceNormals
# order: 0 = (012), 1 = (023), 2 = (013), 3 = (123).
_EDGE_FACES = {
    (0, 1): (0, 2),
    (0, 2): (0, 1),
    (0, 3): (1, 2),
    (1, 2): (0, 3),
    (1, 3): (2, 3),
    (2, 3): (1, 3),
}


@dataclass(frozen=True)
class DihedralAngles:
    """Interior dihedral angles of the tetrahedron, one per edge, radians.

    The spherical triangle cut out at a vertex has one angle per incident
    edge, so each vertex's three angles are the dihedrals along its three
    edges; ``at_vertex`` returns exactly that triple. Opposite edges (01|23,
    02|13, 03|12) pair up the six angles.
    """

    along_01: float
    along_02: float
    along_03: float
    along_12: float
    along_13: float
    along_23: float

    def along(self, a: int, b: int) -> float:
        key = (min(a, b), max(a, b))
        return getattr(self, f"along_{key[0]}{key[1]}")

    def at_vertex(self, m: int) -> tuple[float, float, float]:
        others = [v for v in range(4) if v != m]
        return tuple(self.along(m, v) for v in others)

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.along_01, self.along_02, self.along_03,
            self.along_12, self.along_13, self.along_23,
        )


def _interior_angle(n1: np.ndarray, n2: np.ndarray) -> float:
    c = float(np.dot(n1, n2) / (np.linalg.norm(n1) * np.linalg.norm(n2)))
    return math.pi - math.acos(min(1.0, max(-1.0, c)))


def dihedral_angles(tet: TangentTetrahedron) -> DihedralAngles:
    """Interior dihedral angles from outward face normals.

    Along each edge, the interior angle is pi minus the angle between the
    outward normals of the two faces meeting there.
    """
    fn = face_normals(tet).as_rows()
    vals = {}
    for edge, (f1, f2) in _EDGE_FACES.items():
        vals[edge] = _interior_angle(fn[f1], fn[f2])
    return DihedralAngles(
        along_01=vals[(0, 1)], along_02=vals[(0, 2)], along_03=vals[(0, 3)],
        along_12=vals[(1, 2)], along_13=vals[(1, 3)], along_23=vals[(2, 3)],
    )


def dihedral_angles_projection(tet: TangentTetrahedron) -> DihedralAngles:
    """Interior dihedral angles by in-plane projection, a second method.

    For the edge (a, b), project the two remaining vertices onto the plane
    orthogonal to the edge and measure the angle between the projections at
    the edge's foot. Shares no code with the normal-based route.
    """
    _require_nondegenerate(tet)
    v = tet.vertices
    vals = {}
    for a, b in _EDGE_FACES:
        e = v[b] - v[a]
        e = e / np.linalg.norm(e)
        c, d = (x for x in range(4) if x not in (a, b))
        w1 = v[c] - v[a]
        w2 = v[d] - v[a]
        p1 = w1 - np.dot(w1, e) * e
        p2 = w2 - np.dot(w2, e) * e
        n1 = float(np.linalg.norm(p1))
        n2 = float(np.linalg.norm(p2))
        if n1 <= 1e-300 or n2 <= 1e-300:
            raise DegenerateSimplexError(f"edge ({a},{b}) has a flat adjacent face")
        vals[(a, b)] = math.atan2(
            float(np.linalg.norm(np.cross(p1, p2))), float(np.dot(p1, p2))
        )
    return DihedralAngles(
        along_01=vals[(0, 1)], along_02=vals[(0, 2)], along_03=vals[(0, 3)],
        along_12=vals[(1, 2)], along_13=vals[(1, 3)], along_23=vals[(2, 3)],
    )


@dataclass(frozen=True)
class SolidAngles:
    """Solid angles subtended by the tetrahedron at its four vertices."""

    omega: tuple[float, float, float, float]

    def __post_init__(self):
        if not all(0.0 < w < 2.0 * math.pi for w in self.omega):
            raise ValueError("each vertex solid angle must lie in (0, 2*pi)")


def solid_angles(angles: DihedralAngles) -> SolidAngles:
    """Vertex solid angles by spherical excess.

    The three face planes at a vertex cut a spherical triangle whose angles
    are the dihedrals along the vertex's edges; its area (the solid angle)
    is the angle sum minus pi.
    """
    return SolidAngles(
        omega=tuple(sum(angles.at_vertex(m)) - math.pi for m in range(4))
    )


def solid_angles_tangent(tet: TangentTetrahedron) -> SolidAngles:
    """Vertex solid angles by the tangent half-angle formula.

    An independent method: with edge vectors a, b, c from the vertex,
    tan(omega/2) = |a.(b x c)| / (|a||b||c| + (a.b)|c| + (a.c)|b| + (b.c)|a|),
    taking the atan2 branch so obtuse cases land in (0, 2*pi).
    """
    v = tet.vertices
    out = []
    for m in range(4):
        a, b, c = (v[x] - v[m] for x in range(4) if x != m)
        na = float(np.linalg.norm(a))
        nb = float(np.linalg.norm(b))
        nc = float(np.linalg.norm(c))
        numer = abs(float(np.dot(a, np.cross(b, c))))
        denom = (
            na * nb * nc
            + float(np.dot(a, b)) * nc
            + float(np.dot(a, c)) * nb
            + float(np.dot(b, c)) * na
        )
        out.append(2.0 * math.atan2(numer, denom))
    return SolidAngles(omega=tuple(out))


def wedge_volume(r_m: float, omega_m: float) -> float:
    """Volume of the spherical wedge a vertex ball cuts from the tetrahedron.

    The ball of radius ``r_m`` around a vertex meets the tetrahedron in a
    cone over a spherical triangle of area r_m^2 * omega_m, so the volume is
    (r_m^3 / 3) * omega_m. ``omega_m`` may be anything up to the full 4*pi
    (the full-ball check value).
    """
    r = float(r_m)
    w = float(omega_m)
    if not (math.isfinite(r) and r > 0.0):
        raise ValueError("wedge radius must be a positive finite real")
    if not (math.isfinite(w) and 0.0 < w <= 4.0 * math.pi + 1e-12):
        raise ValueError("solid angle must lie in (0, 4*pi]")
    return (r * r * r / 3.0) * w


def simplicial_density(radii) -> float:
    """Fraction of the tangency tetrahedron covered by its four balls.

    2 * sum_m r_m^3 * omega_m divided by the absolute triple product of the
    three non-origin vertices (six times the volume); equals the sum of the
    wedge volumes over the tetrahedron volume. Always in (0, 1); equal
    radii give the classical value 0.77963...
    """
    tet = embed(radii)
    omg = solid_angles(dihedral_angles(tet)).omega
    r = tet.radii
    weighted = sum(r[m] ** 3 * omg[m] for m in range(4))
    return 2.0 * weighted / abs(tet.triple_product())


@dataclass(frozen=True)
class DensityBound:
    """Result of the density maximization over radius quadruples."""

    value: float
    quadruple: tuple[float, float, float, float]
    evaluated: int
    skipped: tuple[tuple[float, float, float, float], ...] = ()


def density_upper_bound(
    radii_set: Iterable[float],
    delta_max: Callable[[tuple[float, float, float, float]], float] | None = None,
    on_degenerate: str = "raise",
) -> DensityBound:
    """Density bound for packings drawing radii from a finite set.

    Maximizes delta_max(quadruple) * simplicial_density(quadruple) over all
    multisets of four radii from the set. ``delta_max`` is the packing
    density of the tetrahedron's interior for that quadruple; the default
    (constant 1) is always valid, just conservative. Ties go to the
    lexicographically smallest quadruple.

    ``on_degenerate`` decides what happens when a quadruple admits no
    mutually tangent embedding: "raise" (default) propagates the error
    naming the quadruple, "skip" drops it from the maximization (such a
    quadruple cannot occur as a tangency cell of any packing) and records
    it in the result.
    """
    if on_degenerate not in ("raise", "skip"):
        raise ValueError("on_degenerate must be 'raise' or 'skip'")
    radii = sorted(set(float(r) for r in radii_set))
    if not radii:
        raise ValueError("the radius set must be nonempty")
    if not all(math.isfinite(r) and r > 0.0 for r in radii):
        raise ValueError("radii must be positive finite reals")
    best_val = -math.inf
    best_q: tuple[float, float, float, float] | None = None
    skipped: list[tuple[float, float, float, float]] = []
    evaluated = 0
    for quad in itertools.combinations_with_replacement(radii, 4):
        try:
            dens = simplicial_density(quad)
        except DegenerateSimplexError:
            if on_degenerate == "raise":
                raise
            skipped.append(quad)
            continue
        evaluated += 1
        factor = 1.0 if delta_max is None else float(delta_max(quad))
        if not (math.isfinite(factor) and 0.0 < factor <= 1.0):
            raise ValueError(f"delta_max({quad}) = {factor!r} is outside (0, 1]")
        val = factor * dens
        if val > best_val:
            best_val = val
            best_q = quad
    if best_q is None:
        raise DegenerateSimplexError(
            "no quadruple from the radius set admits a tangent embedding"
        )
    return DensityBound(
        value=best_val, quadruple=best_q, evaluated=evaluated, skipped=tuple(skipped)
    )
