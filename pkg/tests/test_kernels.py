"""Backend selection and compiled-vs-fallback parity for the numeric kernels."""

import numpy as np
import pytest

from spherebound import RadiiQuadruple, embed
from spherebound._kernels import (
    BACKEND,
    HAVE_EXT,
    classify_tetra_points,
    eval_series,
    gegenbauer_table,
)
from spherebound._kernels import _pykern

if HAVE_EXT:
    from spherebound._kernels import _ckern
else:
    _ckern = None

needs_ext = pytest.mark.skipif(not HAVE_EXT, reason="compiled extension not built")


def test_backend_flag_consistent():
    assert BACKEND in ("cython", "numpy")
    assert (BACKEND == "cython") == HAVE_EXT


def _tetra_fixture():
    tet = embed(RadiiQuadruple((0.7, 1.0, 1.3, 2.1)))
    rng = np.random.default_rng(5)
    lo = tet.vertices.min(axis=0) - 0.5
    hi = tet.vertices.max(axis=0) + 0.5
    pts = rng.uniform(lo, hi, size=(4096, 3))
    normals = np.ascontiguousarray(
        np.array(
            [
                np.cross(tet.vertices[1], tet.vertices[2]),
                np.cross(tet.vertices[2], tet.vertices[3]),
                np.cross(tet.vertices[1], tet.vertices[3]),
                np.cross(
                    tet.vertices[2] - tet.vertices[1], tet.vertices[3] - tet.vertices[1]
                ),
            ]
        )
    )
    # orient all four facets outward so the plane test reads n.x > offset
    center = tet.vertices.mean(axis=0)
    offsets = np.empty(4)
    on_face = [tet.vertices[0], tet.vertices[0], tet.vertices[0], tet.vertices[1]]
    for i in range(4):
        if np.dot(normals[i], on_face[i]) < np.dot(normals[i], center):
            normals[i] = -normals[i]
        offsets[i] = np.dot(normals[i], on_face[i])
    radii = np.asarray(tet.radii, dtype=np.float64)
    return tet, pts, normals, offsets, radii


@needs_ext
def test_gegenbauer_table_bitwise_parity():
    t = np.linspace(-1.0, 1.0, 777)
    for lam in (0.5, 1.5):
        a = _ckern.gegenbauer_table(24, lam, t)
        b = _pykern.gegenbauer_table(24, lam, t)
        assert a.shape == b.shape == (25, 777)
        assert np.array_equal(a, b)


@needs_ext
def test_eval_series_bitwise_parity():
    rng = np.random.default_rng(0)
    coeffs = rng.uniform(-2.0, 2.0, size=21)
    t = rng.uniform(-1.0, 1.0, size=2048)
    a = _ckern.eval_series(coeffs, 0.5, t)
    b = _pykern.eval_series(coeffs, 0.5, t)
    assert np.array_equal(a, b)


@needs_ext
def test_classify_points_bitwise_parity():
    tet, pts, normals, offsets, radii = _tetra_fixture()
    verts = tet.vertices
    a = _ckern.classify_tetra_points(pts, normals, offsets, verts, radii)
    b = _pykern.classify_tetra_points(pts, normals, offsets, verts, radii)
    assert a.dtype == b.dtype == np.int8
    assert np.array_equal(a, b)


def test_classify_points_against_plain_numpy():
    tet, pts, normals, offsets, radii = _tetra_fixture()
    got = classify_tetra_points(pts, normals, offsets, tet.vertices, radii)
    outside = np.zeros(len(pts), dtype=bool)
    for i in range(4):
        outside |= pts @ normals[i] > offsets[i]
    near = np.zeros(len(pts), dtype=bool)
    for m in range(4):
        near |= np.linalg.norm(pts - tet.vertices[m], axis=1) <= radii[m]
    want = np.where(outside, 0, np.where(near, 2, 1)).astype(np.int8)
    assert np.array_equal(got, want)
    assert set(np.unique(got)) <= {0, 1, 2}
    assert (got == 2).any() and (got == 0).any()


def test_kernels_accept_read_only_arrays():
    t = np.linspace(-1.0, 1.0, 64)
    t.setflags(write=False)
    coeffs = np.ones(5)
    coeffs.setflags(write=False)
    table = gegenbauer_table(4, 0.5, t)
    vals = eval_series(coeffs, 0.5, t)
    assert table.shape == (5, 64)
    assert vals.shape == (64,)
    tet, pts, normals, offsets, radii = _tetra_fixture()
    for arr in (pts, normals, offsets, radii):
        arr.setflags(write=False)
    out = classify_tetra_points(pts, normals, offsets, tet.vertices, radii)
    assert out.shape == (len(pts),)


def test_table_agrees_with_public_evaluator():
    from spherebound import gegenbauer_eval

    t = np.linspace(-1.0, 1.0, 33)
    table = gegenbauer_table(8, 0.5, t)
    for k in (0, 3, 8):
        assert np.array_equal(table[k], np.atleast_1d(gegenbauer_eval(k, t)))
