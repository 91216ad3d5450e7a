"""Timing comparison of the compiled kernels against the NumPy fallback.

Run from the repository root after an editable install:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --points 500000 --grid 20000 --repeats 7

Each kernel is timed best-of-N on identical inputs, and the two backends'
outputs are checked for bitwise equality before any number is reported.
When the extension is not built only the fallback column is filled in.
"""

import argparse
import time

import numpy as np

from spherebound import RadiiQuadruple, embed
from spherebound._kernels import HAVE_EXT, _pykern

if HAVE_EXT:
    from spherebound._kernels import _ckern
else:
    _ckern = None


def _best_of(repeats, fn, *args):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def _classifier_inputs(n_points, rng):
    tet = embed(RadiiQuadruple((0.7, 1.0, 1.3, 2.1)))
    lo = tet.vertices.min(axis=0) - 0.5
    hi = tet.vertices.max(axis=0) + 0.5
    pts = rng.uniform(lo, hi, size=(n_points, 3))
    normals = np.ascontiguousarray(
        np.array(
            [
                np.cross(tet.vertices[1], tet.vertices[2]),
                np.cross(tet.vertices[2], tet.vertices[3]),
                np.cross(tet.vertices[1], tet.vertices[3]),
                np.cross(
                    tet.vertices[2] - tet.vertices[1],
                    tet.vertices[3] - tet.vertices[1],
                ),
            ]
        )
    )
    center = tet.vertices.mean(axis=0)
    offsets = np.empty(4)
    on_face = [tet.vertices[0], tet.vertices[0], tet.vertices[0], tet.vertices[1]]
    for i in range(4):
        if np.dot(normals[i], on_face[i]) < np.dot(normals[i], center):
            normals[i] = -normals[i]
        offsets[i] = np.dot(normals[i], on_face[i])
    radii = np.asarray(tet.radii, dtype=np.float64)
    return pts, normals, offsets, tet.vertices, radii


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="time the compiled kernels against the NumPy fallback"
    )
    parser.add_argument(
        "--grid", type=int, default=4000,
        help="evaluation points for the polynomial kernels (default 4000)",
    )
    parser.add_argument(
        "--degree", type=int, default=24,
        help="polynomial table and series degree (default 24)",
    )
    parser.add_argument(
        "--points", type=int, default=100_000,
        help="sample points for the classifier kernel (default 100000)",
    )
    parser.add_argument(
        "--repeats", type=int, default=5,
        help="timing repeats per kernel, best is kept (default 5)",
    )
    parser.add_argument("--seed", type=int, default=0, help="input draw seed")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    t = rng.uniform(-1.0, 1.0, size=args.grid)
    coeffs = rng.uniform(-2.0, 2.0, size=args.degree + 1)
    classifier_args = _classifier_inputs(args.points, rng)

    cases = [
        ("gegenbauer_table", (args.degree, 0.5, t)),
        ("eval_series", (coeffs, 0.5, t)),
        ("classify_tetra_points", classifier_args),
    ]

    if HAVE_EXT:
        print("extension built; comparing both backends")
    else:
        print("extension not built; fallback timings only")
    header = "%-22s %12s %12s %9s" % ("kernel", "numpy (ms)", "cython (ms)", "speedup")
    print(header)
    print("-" * len(header))
    for name, call_args in cases:
        py_time, py_out = _best_of(args.repeats, getattr(_pykern, name), *call_args)
        if _ckern is None:
            print("%-22s %12.3f %12s %9s" % (name, py_time * 1e3, "-", "-"))
            continue
        c_time, c_out = _best_of(args.repeats, getattr(_ckern, name), *call_args)
        if not np.array_equal(py_out, c_out):
            raise SystemExit("backend outputs differ for %s" % name)
        print(
            "%-22s %12.3f %12.3f %8.1fx"
            % (name, py_time * 1e3, c_time * 1e3, py_time / c_time)
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
