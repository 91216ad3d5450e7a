"""Constructive witnesses and brute-force cross-checks.

Known spherical codes with exact coordinates, a seeded maximin search
producing code lower bounds, Monte Carlo estimation of the ball-covered
fraction of a tangency tetrahedron, and greedy contact-packing deposition.
Everything here sits on the opposite side of the certified bounds: codes
and packings are explicit witnesses (lower bounds), the Monte Carlo
estimate is an independent measurement, and together they sandwich the
analytic results from the other modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import classify_tetra_points
from .packing import PackingSpec
from .tetra import DegenerateSimplexError, embed, face_normals

__all__ = [
    "SphericalCode",
    "PackedSphere",
    "ContactPacking",
    "known_code",
    "KNOWN_CODE_NAMES",
    "min_angle",
    "greedy_code_search",
    "monte_carlo_tetra_density",
    "greedy_contact_packing",
]

_UNIT_TOL = 1e-12
_ANGLE_TOL = 1e-12
_CONTACT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SphericalCode:
    """A finite set of unit vectors with its minimum pairwise angle.

    The stored ``min_angle`` must equal the exhaustively recomputed value,
    so an instance is always a valid witness for separation >= min_angle.
    """

    points: np.ndarray
    min_angle: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise ValueError("a code needs at least two points in R^3")
        norms = np.sqrt((pts * pts).sum(axis=1))
        if float(np.abs(norms - 1.0).max()) > _UNIT_TOL:
            raise ValueError("code points must be unit vectors")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        recomputed = min_angle(pts)
        if abs(recomputed - self.min_angle) > _ANGLE_TOL:
            raise ValueError(
                f"declared min angle {self.min_angle!r} disagrees with "
                f"recomputed {recomputed!r}"
            )

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


def min_angle(points) -> float:
    """Minimum pairwise angle of a point set, by exhaustive pair scan.

    Scalar arithmetic in a fixed pair order, so the result is reproducible
    bit for bit; intended as the reference all other angle computations in
    the package are checked against.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise ValueError("need at least two points in R^3")
    best = math.pi
    n = pts.shape[0]
    for a in range(n - 1):
        xa, ya, za = float(pts[a, 0]), float(pts[a, 1]), float(pts[a, 2])
        for b in range(a + 1, n):
            d = xa * pts[b, 0] + ya * pts[b, 1] + za * pts[b, 2]
            ang = math.acos(min(1.0, max(-1.0, float(d))))
            if ang < best:
                best = ang
    return best


def _unit_rows(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m, axis=1, keepdims=True)


_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def _icosahedron_points() -> np.ndarray:
    pts = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            pts.append([0.0, s1, s2 * _PHI])
            pts.append([s1, s2 * _PHI, 0.0])
            pts.append([s2 * _PHI, 0.0, s1])
    return _unit_rows(np.asarray(pts))


def _fcc_kissing_points() -> np.ndarray:
    pts = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                v = [0.0, 0.0, 0.0]
                v[i] = s1
                v[j] = s2
                pts.append(v)
    return np.asarray(pts) / math.sqrt(2.0)


def _known_point_sets() -> dict[str, np.ndarray]:
    s3 = 1.0 / math.sqrt(3.0)
    return {
        "antipodal": np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]),
        "tetrahedron": s3 * np.array(
            [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        ),
        "octahedron": np.array(
            [
                [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
            ]
        ),
        "cube": s3 * np.array(
            [
                [1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [1.0, -1.0, -1.0],
                [-1.0, 1.0, 1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0], [-1.0, -1.0, -1.0],
            ]
        ),
        "icosahedron": _icosahedron_points(),
        "fcc_kissing": _fcc_kissing_points(),
    }


KNOWN_CODE_NAMES = tuple(sorted(_known_point_sets()))


def known_code(name: str) -> SphericalCode:
    """Classical spherical codes by name, with exact coordinates.

    antipodal (2 points, angle pi), tetrahedron (4, arccos(-1/3)),
    octahedron (6, pi/2), cube (8, arccos(1/3)), icosahedron (12,
    arccos(1/sqrt(5))), fcc_kissing (12 touching-point directions of the
    face-centered cubic packing, pi/3).
    """
    sets = _known_point_sets()
    if name not in sets:
        raise ValueError(f"unknown code name {name!r}; choose from {KNOWN_CODE_NAMES}")
    pts = sets[name]
    return SphericalCode(points=pts, min_angle=min_angle(pts))


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    return v / norms


def _set_min_angle(pts: np.ndarray) -> float:
    g = np.clip(pts @ pts.T, -1.0, 1.0)
    np.fill_diagonal(g, -1.0)
    return float(np.arccos(float(g.max())))


def _repulsion_polish(pts: np.ndarray, iters: int) -> np.ndarray:
    """Push points apart on the sphere, keeping the best maximin iterate."""
    cur = pts.copy()
    best = cur
    best_ang = _set_min_angle(cur)
    step = 0.15
    for _ in range(iters):
        diff = cur[:, None, :] - cur[None, :, :]
        chord2 = np.einsum("ijk,ijk->ij", diff, diff)
        np.fill_diagonal(chord2, np.inf)
        w = 1.0 / np.maximum(chord2, 1e-9) ** 1.5
        force = (diff * w[:, :, None]).sum(axis=1)
        fnorm = np.linalg.norm(force, axis=1, keepdims=True)
        cur = cur + step * force / np.maximum(fnorm, 1e-12)
        cur = _unit_rows(cur)
        ang = _set_min_angle(cur)
        if ang > best_ang:
            best_ang = ang
            best = cur.copy()
        step *= 0.96
    return best


def _maximin_ascent(pts: np.ndarray, iters: int) -> np.ndarray:
    """Directly widen the closest pair, keeping the best iterate.

    Complements the all-pairs repulsion: energy descent equalizes spacing
    but can equilibrate with the minimum angle below target, while pushing
    only the worst pair apart climbs the maximin objective itself.
    """
    cur = pts.copy()
    best = cur
    best_ang = _set_min_angle(cur)
    step = 0.08
    n = cur.shape[0]
    for _ in range(iters):
        g = cur @ cur.T
        np.fill_diagonal(g, -1.0)
        flat = int(np.argmax(g))
        a, b = divmod(flat, n)
        away = cur[a] - cur[b]
        norm = float(np.linalg.norm(away))
        if norm < 1e-12:
            break
        away /= norm
        cur = cur.copy()
        cur[a] = cur[a] + step * away
        cur[b] = cur[b] - step * away
        cur[a] /= np.linalg.norm(cur[a])
        cur[b] /= np.linalg.norm(cur[b])
        ang = _set_min_angle(cur)
        if ang > best_ang:
            best_ang = ang
            best = cur.copy()
        step *= 0.995
    return best


def _insert_feasible(pts: np.ndarray, theta: float, rng: np.random.Generator,
                     batches: int = 4, batch_size: int = 128) -> np.ndarray:
    cos_t = math.cos(theta)
    for _ in range(batches):
        cands = _random_directions(rng, batch_size)
        # Try the emptiest spots first; each acceptance shrinks what fits.
        order = np.argsort((cands @ pts.T).max(axis=1))
        for c in cands[order]:
            if float((pts @ c).max()) <= cos_t + 1e-15:
                pts = np.vstack([pts, c])
    return pts


def _best_candidate(pts: np.ndarray, rng: np.random.Generator,
                    n_cand: int = 256) -> np.ndarray:
    cands = _random_directions(rng, n_cand)
    worst_dot = (cands @ pts.T).max(axis=1)
    return cands[int(np.argmin(worst_dot))]


def _search_once(rng: np.random.Generator, theta: float) -> np.ndarray:
    p = _random_directions(rng, 1)[0]
    pts = np.vstack([p, -p])
    stall = 0
    while stall < 3:
        grown = _insert_feasible(pts, theta, rng)
        if grown.shape[0] > pts.shape[0]:
            polished = _maximin_ascent(_repulsion_polish(grown, 60), 120)
            pts = polished if _set_min_angle(polished) >= theta else grown
            stall = 0
            continue
        trial = np.vstack([pts, _best_candidate(pts, rng)])
        trial = _maximin_ascent(_repulsion_polish(trial, 120), 400)
        if _set_min_angle(trial) >= theta:
            pts = trial
            stall = 0
        else:
            stall += 1
    return pts


def greedy_code_search(theta: float, restarts: int = 20, seed: int = 0) -> SphericalCode:
    """Search for a large point set with pairwise angles >= theta.

    Each restart drops random points where they fit, then alternates
    repulsion polishing (to open holes) with attempts to squeeze in one
    more point. Deterministic for a fixed seed; restarts draw independent
    generators from one seed sequence, and the best size wins with earlier
    restarts preferred on ties. The result is always a valid witness, so
    its size is a lower bound for the true maximum at this angle.
    """
    if not (0.0 < theta <= math.pi):
        raise ValueError("theta must lie in (0, pi]")
    if restarts < 1:
        raise ValueError("need at least one restart")
    root = np.random.SeedSequence(seed)
    best: np.ndarray | None = None
    for child in root.spawn(restarts):
        rng = np.random.default_rng(child)
        pts = _search_once(rng, theta)
        if best is None or pts.shape[0] > best.shape[0]:
            best = pts
    return SphericalCode(points=best, min_angle=min_angle(best))


def monte_carlo_tetra_density(radii, samples: int, seed: int = 0,
                              per_vertex: bool = False):
    """Monte Carlo estimate of the ball-covered fraction of the tetrahedron.

    Draws uniform points inside the tangency tetrahedron by rejection from
    its bounding box until ``samples`` interior points have been seen, and
    counts how many fall within distance r_m of vertex m. The vertex balls
    are pairwise tangent, so the wedge regions are disjoint and the summed
    fraction estimates the simplicial density; the standard error is
    binomial. With ``per_vertex`` set, returns the four per-wedge volume
    fractions and their standard errors instead of the totals.
    """
    samples = int(samples)
    if samples < 10_000:
        raise ValueError("use at least 10^4 samples")
    tet = embed(radii)
    verts = tet.vertices
    radii_arr = np.asarray(tet.radii, dtype=np.float64)
    normals = face_normals(tet).as_rows()
    # The first three faces pass through the origin.
    offsets = np.array([0.0, 0.0, 0.0, float(np.dot(normals[3], verts[1]))])
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    seen = 0
    covered_total = 0
    covered_vertex = np.zeros(4, dtype=np.int64)
    box_vol_ratio = 6.0 * tet.volume() / float(np.prod(hi - lo))
    while seen < samples:
        want = samples - seen
        draw = max(10_000, int(1.3 * want / max(box_vol_ratio, 1e-3)))
        pts = rng.uniform(lo, hi, size=(draw, 3))
        cls = classify_tetra_points(pts, normals, offsets, verts, radii_arr)
        inside = cls > 0
        idx = np.flatnonzero(inside)
        if idx.size > want:
            idx = idx[:want]
        take = cls[idx]
        seen += idx.size
        hits = idx[take == 2]
        covered_total += hits.size
        if per_vertex and hits.size:
            d2 = ((pts[hits][:, None, :] - verts[None, :, :]) ** 2).sum(axis=2)
            owner = (d2 <= (radii_arr**2)[None, :] + 1e-12).argmax(axis=1)
            covered_vertex += np.bincount(owner, minlength=4)
    if per_vertex:
        p = covered_vertex / samples
        return p, np.sqrt(p * (1.0 - p) / samples)
    p = covered_total / samples
    return float(p), float(math.sqrt(p * (1.0 - p) / samples))


@dataclass(frozen=True, eq=False)
class PackedSphere:
    center: np.ndarray
    radius: float
    species: int

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64).reshape(3).copy()
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError("sphere radius must be positive and finite")


@dataclass(frozen=True, eq=False)
class ContactPacking:
    """A finite sphere packing with its complete tangency edge list.

    Construction verifies the non-overlap inequality (to -1e-9) and that
    ``edges`` lists exactly the pairs at tangency distance (to 1e-9), so an
    instance is always a valid witness for measured contact counts.
    """

    spheres: tuple[PackedSphere, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.spheres)
        centers = np.array([s.center for s in self.spheres])
        radii = np.array([s.radius for s in self.spheres])
        listed = set()
        for a, b in self.edges:
            if not (0 <= a < b < n):
                raise ValueError(f"edge ({a},{b}) is not an ordered sphere pair")
            listed.add((a, b))
        if len(listed) != len(self.edges):
            raise ValueError("duplicate edges")
        for a in range(n - 1):
            d = np.linalg.norm(centers[a + 1:] - centers[a], axis=1)
            gap = d - (radii[a] + radii[a + 1:])
            if float(gap.min(initial=np.inf)) < -_CONTACT_TOL:
                raise ValueError(f"sphere {a} overlaps a later sphere")
            touching = {(a, a + 1 + int(i)) for i in np.flatnonzero(np.abs(gap) <= _CONTACT_TOL)}
            claimed = {e for e in listed if e[0] == a}
            if touching != claimed:
                raise ValueError(f"edge list incomplete or wrong at sphere {a}")

    @property
    def contact_count(self) -> int:
        return len(self.edges)

    @property
    def average_kissing(self) -> float:
        return 2.0 * len(self.edges) / len(self.spheres)

    def degree(self, a: int) -> int:
        return sum(1 for e in self.edges if a in e)


def _tangent_point_three(c1, r1, c2, r2, c3, r3, r):
    """Positions tangent to three spheres; zero, one, or two points."""
    d1, d2, d3 = r1 + r, r2 + r, r3 + r
    ex = c2 - c1
    dx = float(np.linalg.norm(ex))
    if dx < 1e-12:
        return []
    ex = ex / dx
    v = c3 - c1
    i = float(np.dot(ex, v))
    ey = v - i * ex
    ny = float(np.linalg.norm(ey))
    if ny < 1e-12:
        return []
    ey = ey / ny
    ez = np.cross(ex, ey)
    x = (d1 * d1 - d2 * d2 + dx * dx) / (2.0 * dx)
    y = (d1 * d1 - d3 * d3 + i * i + ny * ny - 2.0 * i * x) / (2.0 * ny)
    z2 = d1 * d1 - x * x - y * y
    if z2 < -1e-12 * d1 * d1:
        return []
    base = c1 + x * ex + y * ey
    if z2 <= 0.0:
        return [base]
    z = math.sqrt(z2)
    return [base + z * ez, base - z * ez]


def _tangent_circle_two(c1, r1, c2, r2, r, angles):
    """Sampled positions tangent to two spheres (a circle of solutions)."""
    d1, d2 = r1 + r, r2 + r
    axis = c2 - c1
    dx = float(np.linalg.norm(axis))
    if dx < 1e-12 or dx > d1 + d2 or dx < abs(d1 - d2):
        return []
    ex = axis / dx
    x = (d1 * d1 - d2 * d2 + dx * dx) / (2.0 * dx)
    rho2 = d1 * d1 - x * x
    if rho2 <= 0.0:
        return [c1 + x * ex] if rho2 > -1e-12 * d1 * d1 else []
    rho = math.sqrt(rho2)
    ref = np.array([1.0, 0.0, 0.0]) if abs(ex[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    ey = np.cross(ex, ref)
    ey /= np.linalg.norm(ey)
    ez = np.cross(ex, ey)
    base = c1 + x * ex
    return [base + rho * (math.cos(t) * ey + math.sin(t) * ez) for t in angles]


def greedy_contact_packing(spec: PackingSpec, seed: int = 0,
                           attempts: int = 32) -> ContactPacking:
    """Deposit the spec's spheres one at a time, maximizing new contacts.

    Each new sphere evaluates exact three-sphere tangency points first,
    then two-sphere tangency circles (at ``attempts`` sampled angles), then
    single-sphere tangencies in random directions, and takes the first
    position with the most tangencies among non-overlapping candidates. A
    sphere that fits nowhere is parked outside the cluster with zero
    contacts. Deterministic for a fixed seed; the result is a valid
    packing whose measured contact counts are honest lower bounds.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    queue: list[tuple[float, int]] = []
    for sp_idx, sp in enumerate(spec.species):
        queue.extend((sp.radius, sp_idx) for _ in range(sp.count))
    centers: list[np.ndarray] = []
    radii: list[float] = []
    species: list[int] = []

    for r, sp_idx in queue:
        if not centers:
            pos = np.zeros(3)
        else:
            n = len(centers)
            ctr = np.array(centers)
            rad = np.array(radii)
            cand_order: list[np.ndarray] = []
            # Pairs whose spheres could both touch the new one.
            pair_dist = np.linalg.norm(ctr[:, None, :] - ctr[None, :, :], axis=2)
            reach = pair_dist <= rad[:, None] + rad[None, :] + 2.0 * r + _CONTACT_TOL
            adj = [np.flatnonzero(reach[a, a + 1:]) + a + 1 for a in range(n)]
            for a in range(n):
                nb = adj[a]
                for i in range(nb.size - 1):
                    b = int(nb[i])
                    for c in nb[i + 1:]:
                        c = int(c)
                        if reach[b, c]:
                            cand_order.extend(
                                _tangent_point_three(
                                    ctr[a], rad[a], ctr[b], rad[b],
                                    ctr[c], rad[c], r,
                                )
                            )
                        if len(cand_order) >= 8000:
                            break
                    if len(cand_order) >= 8000:
                        break
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            angles = phase + 2.0 * math.pi * np.arange(attempts) / attempts
            circle_pairs = 0
            for a in range(n):
                for b in adj[a]:
                    cand_order.extend(
                        _tangent_circle_two(ctr[a], rad[a], ctr[int(b)], rad[int(b)], r, angles)
                    )
                    circle_pairs += 1
                    if circle_pairs >= 400:
                        break
                if circle_pairs >= 400:
                    break
            dirs = _random_directions(rng, attempts)
            for a in range(n):
                cand_order.extend(ctr[a] + (rad[a] + r) * d for d in dirs)
            cand = np.array(cand_order)
            d = np.linalg.norm(cand[:, None, :] - ctr[None, :, :], axis=2)
            gap = d - (rad[None, :] + r)
            contacts = (np.abs(gap) <= _CONTACT_TOL).sum(axis=1)
            contacts[gap.min(axis=1) < -_CONTACT_TOL] = -1
            best = int(np.argmax(contacts))
            if contacts[best] < 0:
                span = float((np.linalg.norm(ctr, axis=1) + rad).max())
                pos = np.array([span + 2.0 * r, 0.0, 0.0])
            else:
                pos = cand[best]
        centers.append(np.asarray(pos, dtype=np.float64))
        radii.append(float(r))
        species.append(sp_idx)

    spheres = tuple(
        PackedSphere(center=c, radius=r, species=s)
        for c, r, s in zip(centers, radii, species)
    )
    edges = []
    for a in range(len(spheres) - 1):
        for b in range(a + 1, len(spheres)):
            d = float(np.linalg.norm(centers[a] - centers[b]))
            if abs(d - (radii[a] + radii[b])) <= _CONTACT_TOL:
                edges.append((a, b))
    return ContactPacking(spheres=spheres, edges=tuple(edges))
