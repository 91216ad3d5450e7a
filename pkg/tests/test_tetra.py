"""Tangent-tetrahedron geometry: embedding, angles, wedges, the density bound."""

import math

import numpy as np
import pytest

from spherebound import (
    DegenerateSimplexError,
    RadiiQuadruple,
    TangentTetrahedron,
    density_upper_bound,
    dihedral_angles,
    embed,
    simplicial_density,
    solid_angles,
    wedge_volume,
)
from spherebound.tetra import (
    cayley_menger,
    dihedral_angles_projection,
    face_normals,
    solid_angles_tangent,
)
from helpers import draw_embeddable

REGULAR_DIHEDRAL = math.acos(1.0 / 3.0)
REGULAR_SOLID = 3.0 * REGULAR_DIHEDRAL - math.pi
REGULAR_DENSITY = math.sqrt(2.0) * (3.0 * REGULAR_DIHEDRAL - math.pi)


def test_radii_quadruple_sorts_and_validates():
    q = RadiiQuadruple((2.0, 0.5, 1.0, 1.5))
    assert q.r == (0.5, 1.0, 1.5, 2.0)
    assert q.asarray().tolist() == [0.5, 1.0, 1.5, 2.0]
    with pytest.raises(ValueError):
        RadiiQuadruple((1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        RadiiQuadruple((1.0, 1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        RadiiQuadruple((1.0, 1.0, 1.0, math.nan))


def test_embed_regular_tetrahedron_exact_coordinates():
    tet = embed((1.0, 1.0, 1.0, 1.0))
    want = np.array(
        [
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [1.0, math.sqrt(3.0), 0.0],
            [1.0, 1.0 / math.sqrt(3.0), 2.0 * math.sqrt(2.0 / 3.0)],
        ]
    )
    assert np.max(np.abs(tet.vertices - want)) <= 1e-12
    assert tet.volume() == pytest.approx(8.0 / (6.0 * math.sqrt(2.0)), abs=1e-12)
    assert not tet.vertices.flags.writeable


def test_embed_realizes_all_tangency_distances():
    rng = np.random.default_rng(21)
    for _ in range(200):
        tet = draw_embeddable(rng)
        for a in range(4):
            for b in range(a + 1, 4):
                dist = float(np.linalg.norm(tet.vertices[a] - tet.vertices[b]))
                assert dist == pytest.approx(tet.edge_length(a, b), abs=1e-9 * dist)
        # canonical frame: origin, +x axis, upper xy half-plane, positive z
        assert np.allclose(tet.vertices[0], 0.0)
        assert abs(tet.vertices[1][1]) == 0.0 and abs(tet.vertices[1][2]) == 0.0
        assert tet.vertices[2][1] > 0.0 and tet.vertices[2][2] == 0.0
        assert tet.vertices[3][2] > 0.0


def test_embed_accepts_any_radii_order_identically():
    a = embed((0.5, 1.0, 1.5, 2.0))
    b = embed((2.0, 1.5, 1.0, 0.5))
    assert np.array_equal(a.vertices, b.vertices)
    assert a.radii == b.radii


def test_cayley_menger_sign_convention():
    tet = embed((1.0, 1.0, 1.0, 1.0))
    d2 = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            d2[a, b] = float(np.sum((tet.vertices[a] - tet.vertices[b]) ** 2))
    det = cayley_menger(d2)
    assert det == pytest.approx(288.0 * tet.volume() ** 2, rel=1e-12)
    # unrealizable distances: one sphere far too small to touch the others
    r = (0.05, 1.0, 1.0, 1.0)
    bad = np.zeros((4, 4))
    for a in range(4):
        for b in range(4):
            if a != b:
                bad[a, b] = (r[a] + r[b]) ** 2
    assert cayley_menger(bad) < 0.0


def test_embeddability_threshold_for_one_small_sphere():
    # (eps, 1, 1, 1) stops embedding below eps = 2/sqrt(3) - 1 = 0.1547
    with pytest.raises(DegenerateSimplexError):
        embed((0.154, 1.0, 1.0, 1.0))
    tet = embed((0.155, 1.0, 1.0, 1.0))
    assert tet.volume() > 0.0
    threshold = 2.0 / math.sqrt(3.0) - 1.0
    with pytest.raises(DegenerateSimplexError):
        embed((threshold - 1e-4, 1.0, 1.0, 1.0))


def test_regular_dihedral_angles():
    tet = embed((1.0, 1.0, 1.0, 1.0))
    for method in (dihedral_angles, dihedral_angles_projection):
        angles = method(tet)
        for val in angles.as_tuple():
            assert val == pytest.approx(REGULAR_DIHEDRAL, abs=1e-10)


def test_dihedral_methods_agree_on_battery():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(300):
        tet = draw_embeddable(rng)
        d1 = np.asarray(dihedral_angles(tet).as_tuple())
        d2 = np.asarray(dihedral_angles_projection(tet).as_tuple())
        worst = max(worst, float(np.max(np.abs(d1 - d2))))
        assert np.all(d1 > 0.0) and np.all(d1 < math.pi)
    assert worst <= 1e-9


def test_regular_solid_angles():
    tet = embed((1.0, 1.0, 1.0, 1.0))
    omg = solid_angles(dihedral_angles(tet)).omega
    for val in omg:
        assert val == pytest.approx(REGULAR_SOLID, abs=1e-9)
    omg2 = solid_angles_tangent(tet).omega
    for val in omg2:
        assert val == pytest.approx(REGULAR_SOLID, abs=1e-9)


def test_solid_angle_methods_agree_on_battery():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(300):
        tet = draw_embeddable(rng)
        s1 = np.asarray(solid_angles(dihedral_angles(tet)).omega)
        s2 = np.asarray(solid_angles_tangent(tet).omega)
        worst = max(worst, float(np.max(np.abs(s1 - s2))))
    assert worst <= 1e-9


def test_face_normals_point_outward():
    rng = np.random.default_rng(29)
    for _ in range(50):
        tet = draw_embeddable(rng)
        normals = face_normals(tet)
        centroid = tet.vertices.mean(axis=0)
        rows = normals.as_rows()
        on_face = [tet.vertices[0], tet.vertices[0], tet.vertices[0], tet.vertices[1]]
        for u, p in zip(rows, on_face):
            assert float(np.dot(u, p - centroid)) > 0.0


def test_degenerate_flat_tetrahedron_is_rejected():
    # four coplanar points: faces exist but the volume vanishes
    flat = TangentTetrahedron(
        radii=(1.0, 1.0, 1.0, 1.0),
        vertices=np.array(
            [
                [0.0, 0.0, 0.0],
                [2.0, 0.0, 0.0],
                [1.0, math.sqrt(3.0), 0.0],
                [3.0, math.sqrt(3.0), 0.0],
            ]
        ),
    )
    with pytest.raises(DegenerateSimplexError):
        face_normals(flat)
    with pytest.raises(DegenerateSimplexError):
        dihedral_angles(flat)
    with pytest.raises(DegenerateSimplexError):
        dihedral_angles_projection(flat)


def test_wedge_volume_values_and_domain():
    assert wedge_volume(2.0, 4.0 * math.pi) == pytest.approx(
        4.0 * math.pi * 8.0 / 3.0, abs=1e-12
    )
    assert wedge_volume(1.0, 0.3) == pytest.approx(0.1, abs=1e-15)
    for r, w in ((0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -0.1), (1.0, 13.0)):
        with pytest.raises(ValueError):
            wedge_volume(r, w)


def test_simplicial_density_regular_anchor():
    val = simplicial_density((1.0, 1.0, 1.0, 1.0))
    assert val == pytest.approx(REGULAR_DENSITY, abs=1e-12)
    assert val == pytest.approx(0.7796355700442531, abs=1e-15)


def test_simplicial_density_equals_wedge_sum_over_volume():
    rng = np.random.default_rng(31)
    for _ in range(100):
        tet = draw_embeddable(rng)
        omg = solid_angles(dihedral_angles(tet)).omega
        wedges = sum(wedge_volume(tet.radii[m], omg[m]) for m in range(4))
        assert simplicial_density(tet.radii) == pytest.approx(
            wedges / tet.volume(), abs=1e-12
        )


def test_simplicial_density_in_unit_interval_and_scale_invariant():
    rng = np.random.default_rng(37)
    for _ in range(100):
        tet = draw_embeddable(rng)
        val = simplicial_density(tet.radii)
        assert 0.0 < val < 1.0
        scaled = tuple(r * 3.7 for r in tet.radii)
        assert abs(simplicial_density(scaled) - val) <= 1e-12


def test_density_upper_bound_single_radius():
    res = density_upper_bound([1.0])
    assert res.value == pytest.approx(REGULAR_DENSITY, abs=1e-12)
    assert res.quadruple == (1.0, 1.0, 1.0, 1.0)
    assert res.evaluated == 1
    assert res.skipped == ()


def test_density_upper_bound_two_radii():
    res = density_upper_bound([1.0, 2.0])
    assert res.evaluated == 5
    # the winner must be the best quadruple recomputed independently
    vals = {}
    import itertools

    for quad in itertools.combinations_with_replacement([1.0, 2.0], 4):
        vals[quad] = simplicial_density(quad)
    best = max(vals, key=vals.get)
    assert res.quadruple == best
    assert res.value == pytest.approx(vals[best], abs=1e-12)
    assert res.value >= REGULAR_DENSITY - 1e-12


def test_density_upper_bound_delta_factor():
    # a packing-fraction factor scales the objective and is range-checked
    res = density_upper_bound([1.0], delta_max=lambda quad: 0.5)
    assert res.value == pytest.approx(0.5 * REGULAR_DENSITY, abs=1e-12)
    with pytest.raises(ValueError):
        density_upper_bound([1.0], delta_max=lambda quad: 0.0)
    with pytest.raises(ValueError):
        density_upper_bound([1.0], delta_max=lambda quad: 1.5)


def test_density_upper_bound_degenerate_handling():
    with pytest.raises(DegenerateSimplexError):
        density_upper_bound([0.1, 1.0])
    res = density_upper_bound([0.1, 1.0], on_degenerate="skip")
    assert res.evaluated + len(res.skipped) == 5
    assert (0.1, 0.1, 1.0, 1.0) in res.skipped or (0.1, 1.0, 1.0, 1.0) in res.skipped
    with pytest.raises(ValueError):
        density_upper_bound([1.0], on_degenerate="ignore")
    with pytest.raises(ValueError):
        density_upper_bound([])
    with pytest.raises(ValueError):
        density_upper_bound([-1.0])


def test_density_upper_bound_tie_goes_to_lexicographic_smallest():
    res = density_upper_bound([1.0, 2.0])
    scaled = density_upper_bound([2.0, 4.0])
    assert scaled.value == pytest.approx(res.value, abs=1e-12)
    assert scaled.quadruple == tuple(2.0 * v for v in res.quadruple)
