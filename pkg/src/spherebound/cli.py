"""Command-line interface: bounds, geometry dumps, and self-verification.

Subcommands: ``lp`` (code-size bound for one angle), ``kissing`` and
``contact`` (packing bounds from a spec file), ``density`` (bound over a
radius set), ``tetra`` (geometry dump for one quadruple), ``verify`` (runs
the witness sandwich suite end to end). Text reports include timings;
machine-readable reports (``--format json``) are canonical and
byte-identical for identical inputs and seed.

Exit codes: 0 success, 1 malformed input, 2 the LP engine failed to
certify a bound, 3 a verification invariant was violated.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .lp_codes import Certificate, LPConfig, LPStatus, lp_upper_bound, verify_certificate
from .oracle import (
    KNOWN_CODE_NAMES,
    greedy_contact_packing,
    known_code,
    min_angle,
    monte_carlo_tetra_density,
)
from .packing import (
    KS_INTERVAL,
    PackingSpec,
    Species,
    UncertifiedBoundError,
    compute_bound_report,
    contact_angle,
)
from .polybasis import SeriesCoefficients
from .tetra import (
    DegenerateSimplexError,
    density_upper_bound,
    dihedral_angles,
    dihedral_angles_projection,
    embed,
    simplicial_density,
    solid_angles,
    solid_angles_tangent,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INVARIANT = 3

_SCALAR_SPEC_KEYS = ("degree", "grid", "tol", "delta_max", "seed")


class SpecFileError(ValueError):
    """A packing spec file that does not follow the documented schema."""


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the input-error exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_spec_file(text: str):
    """Parse the line-oriented packing spec format.

    One directive per line; ``#`` starts a comment. ``species <radius>
    <count>`` may repeat (distinct radii); the optional scalar keys are
    ``degree``, ``grid``, ``tol`` (LP parameters), ``delta_max``, and
    ``seed``. Anything else is rejected.
    """
    species: list[Species] = []
    opts: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "species":
                if len(parts) != 3:
                    raise SpecFileError(
                        f"line {lineno}: species takes exactly <radius> <count>"
                    )
                species.append(Species(radius=float(parts[1]), count=int(parts[2])))
            elif key in _SCALAR_SPEC_KEYS:
                if key in opts:
                    raise SpecFileError(f"line {lineno}: duplicate key {key!r}")
                if len(parts) != 2:
                    raise SpecFileError(f"line {lineno}: {key} takes one value")
                if key in ("degree", "grid", "seed"):
                    opts[key] = int(parts[1])
                else:
                    opts[key] = float(parts[1])
            else:
                raise SpecFileError(f"line {lineno}: unknown key {key!r}")
        except (ValueError, TypeError) as exc:
            if isinstance(exc, SpecFileError):
                raise
            raise SpecFileError(f"line {lineno}: {exc}") from exc
    if not species:
        raise SpecFileError("spec file declares no species")
    try:
        spec = PackingSpec(species=tuple(species))
    except (ValueError, TypeError) as exc:
        raise SpecFileError(str(exc)) from exc
    return spec, opts


def _lp_config(degree=None, grid=None, tol=None) -> LPConfig:
    base = LPConfig()
    d = base.degree if degree is None else int(degree)
    g = base.constraint_grid if grid is None else int(grid)
    t = base.feasibility_tol if tol is None else float(tol)
    return LPConfig(
        degree=d, constraint_grid=g, verify_grid=10 * g, feasibility_tol=t,
        refine_rounds=base.refine_rounds,
    )


def _input_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _emit(report: dict, fmt: str, timings: dict[str, float], out=None) -> None:
    out = out if out is not None else sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")
        return
    _emit_text(report, timings, out)


def _fmt_val(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt_val(x) for x in v) + ")"
    return str(v)


def _emit_text(report: dict, timings: dict[str, float], out) -> None:
    out.write(f"spherebound {report['version']} :: {report['command']}\n")
    out.write(f"input sha256 {report['input_hash'][:16]}\n")
    for key, val in report.get("parameters", {}).items():
        out.write(f"  {key} = {_fmt_val(val)}\n")
    _emit_text_section(report["results"], out, indent=0)
    for name, dt in timings.items():
        out.write(f"time {name}: {dt:.3f} s\n")


def _is_row_list(val) -> bool:
    return isinstance(val, list) and bool(val) and isinstance(val[0], dict)


def _emit_text_section(block, out, indent: int) -> None:
    pad = "  " * indent
    if isinstance(block, dict):
        for key, val in block.items():
            if isinstance(val, dict):
                out.write(f"{pad}{key}:\n")
                _emit_text_section(val, out, indent + 1)
            elif _is_row_list(val):
                out.write(f"{pad}{key}:\n")
                for row in val:
                    flat = {k: v for k, v in row.items() if not _is_row_list(v)}
                    line = ", ".join(f"{k}={_fmt_val(v)}" for k, v in flat.items())
                    out.write(f"{pad}  {line}\n")
                    for k, v in row.items():
                        if _is_row_list(v):
                            out.write(f"{pad}  {k}:\n")
                            for sub in v:
                                subline = ", ".join(
                                    f"{sk}={_fmt_val(sv)}" for sk, sv in sub.items()
                                )
                                out.write(f"{pad}    {subline}\n")
            else:
                out.write(f"{pad}{key} = {_fmt_val(val)}\n")


def _report_skeleton(command: str, inputs: dict, parameters: dict) -> dict:
    return {
        "version": __version__,
        "command": command,
        "input_hash": _input_hash({"command": command, "inputs": inputs}),
        "parameters": parameters,
        "results": {},
    }


def _angle_to_radians(value: float, units: str) -> float:
    return math.radians(value) if units == "deg" else value


def _ks_comparison(value: float) -> str:
    lo, hi = KS_INTERVAL
    if value < lo:
        return "below"
    if value > hi:
        return "above"
    return "inside"


def cmd_lp(args) -> int:
    theta = _angle_to_radians(args.theta, args.units)
    if not (0.0 < theta <= math.pi + 1e-12):
        print(f"lp: theta must lie in (0, pi] radians, got {theta!r}", file=sys.stderr)
        return EXIT_INPUT
    config = _lp_config(args.degree, args.grid, args.tol)
    t0 = time.perf_counter()
    result = lp_upper_bound(theta, config)
    dt = time.perf_counter() - t0
    report = _report_skeleton(
        "lp",
        {"theta": args.theta, "units": args.units},
        {
            "theta_rad": theta,
            "degree": config.degree,
            "grid": config.constraint_grid,
            "tol": config.feasibility_tol,
        },
    )
    res = {
        "status": result.status.name,
        "bound": result.bound if math.isfinite(result.bound) else str(result.bound),
        "strict_upper_bound": result.certified,
        "rounds_used": result.rounds_used,
        "constraint_points": result.constraint_points,
    }
    if result.certificate is not None:
        res["certificate"] = {
            "coefficients": list(result.certificate.coeffs.coeffs),
            "max_violation": result.certificate.max_violation,
        }
    report["results"] = res
    _emit(report, args.format, {"lp_solve": dt})
    if result.status is LPStatus.NOT_CONVERGED:
        return EXIT_NOT_CONVERGED
    if result.status is LPStatus.INFEASIBLE:
        # No finite certified bound at this truncation degree.
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _pair_rows(bound_report) -> list[dict]:
    rows = []
    for det in bound_report.pair_details:
        rows.append(
            {
                "i": det.i,
                "j": det.j,
                "theta_ij_rad": det.theta_ij,
                "theta_ji_rad": det.theta_ji,
                "tau_ij": det.tau_ij if math.isfinite(det.tau_ij) else "inf",
                "tau_ji": det.tau_ji if math.isfinite(det.tau_ji) else "inf",
                "edge_bound": det.edge_bound,
            }
        )
    return rows


def _packing_command(args, which: str) -> int:
    try:
        with open(args.specfile, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"{which}: cannot read spec file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        spec, opts = parse_spec_file(text)
    except SpecFileError as exc:
        print(f"{which}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = _lp_config(
        args.degree if args.degree is not None else opts.get("degree"),
        args.grid if args.grid is not None else opts.get("grid"),
        args.tol if args.tol is not None else opts.get("tol"),
    )
    t0 = time.perf_counter()
    try:
        bound_report = compute_bound_report(spec, config)
    except UncertifiedBoundError as exc:
        print(f"{which}: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    dt = time.perf_counter() - t0
    species_rows = [
        {"radius": sp.radius, "count": sp.count} for sp in spec.species
    ]
    report = _report_skeleton(
        which,
        {"species": species_rows, "kappa": spec.kappa},
        {
            "degree": config.degree,
            "grid": config.constraint_grid,
            "tol": config.feasibility_tol,
            "kappa": spec.kappa,
        },
    )
    value = (
        bound_report.avg_kissing_bound if which == "kissing"
        else bound_report.contact_bound
    )
    report["results"] = {
        "species": species_rows,
        "total_count": spec.total_count,
        "avg_kissing_bound": bound_report.avg_kissing_bound,
        "contact_bound": bound_report.contact_bound,
        "bound": value,
        "strict_upper_bound": True,
        "pair_table": _pair_rows(bound_report),
        "same_species_contact_terms": list(bound_report.same_species_bounds),
        "ks_interval": list(KS_INTERVAL),
        "ks_position": _ks_comparison(bound_report.avg_kissing_bound),
    }
    _emit(report, args.format, {"bounds": dt})
    return EXIT_OK


def cmd_kissing(args) -> int:
    return _packing_command(args, "kissing")


def cmd_contact(args) -> int:
    return _packing_command(args, "contact")


def cmd_density(args) -> int:
    radii = list(args.radii)
    if any(r <= 0 or not math.isfinite(r) for r in radii):
        print("density: radii must be positive finite reals", file=sys.stderr)
        return EXIT_INPUT
    factor = args.delta_max
    if factor is not None and not (0.0 < factor <= 1.0):
        print("density: --delta-max must lie in (0, 1]", file=sys.stderr)
        return EXIT_INPUT
    delta = None if factor is None else (lambda quad: factor)
    t0 = time.perf_counter()
    try:
        result = density_upper_bound(radii, delta_max=delta)
    except DegenerateSimplexError as exc:
        print(f"density: {exc}", file=sys.stderr)
        return EXIT_INPUT
    dt = time.perf_counter() - t0
    report = _report_skeleton(
        "density",
        {"radii": sorted(set(float(r) for r in radii)), "delta_max": factor},
        {"delta_max": 1.0 if factor is None else factor},
    )
    report["results"] = {
        "bound": result.value,
        "strict_upper_bound": True,
        "argmax_quadruple": list(result.quadruple),
        "quadruples_evaluated": result.evaluated,
    }
    _emit(report, args.format, {"density": dt})
    return EXIT_OK


def cmd_tetra(args) -> int:
    radii = list(args.radii)
    t0 = time.perf_counter()
    try:
        tet = embed(radii)
        angles = dihedral_angles(tet)
        omegas = solid_angles(angles)
    except (DegenerateSimplexError, ValueError, TypeError) as exc:
        print(f"tetra: {exc}", file=sys.stderr)
        return EXIT_INPUT
    dt = time.perf_counter() - t0
    conv = math.degrees if args.units == "deg" else (lambda x: x)
    report = _report_skeleton(
        "tetra", {"radii": list(tet.radii), "units": args.units}, {"units": args.units}
    )
    edge_rows = [
        {"edge": f"{a}{b}", "length": tet.edge_length(a, b),
         "dihedral": conv(angles.along(a, b))}
        for a in range(4) for b in range(a + 1, 4)
    ]
    report["results"] = {
        "radii": list(tet.radii),
        "vertices": [[float(x) for x in row] for row in tet.vertices],
        "volume": tet.volume(),
        "edges": edge_rows,
        "solid_angles_sr": list(omegas.omega),
        "simplicial_density": simplicial_density(tet.radii),
    }
    _emit(report, args.format, {"geometry": dt})
    return EXIT_OK


def _verify_checks(seed: int, scale: float, inject_fault: bool):
    """The witness sandwich suite; each check is (name, ok, details)."""
    checks = []
    config = _lp_config(degree=16, grid=128)

    for name in KNOWN_CODE_NAMES:
        code = known_code(name)
        ang = min_angle(code.points)
        result = lp_upper_bound(ang, config)
        cap = math.floor(result.bound + 1e-6) if math.isfinite(result.bound) else None
        ok = result.certified and cap is not None and code.size <= cap
        checks.append(
            (
                f"sandwich_{name}",
                bool(ok),
                {"code_size": code.size, "min_angle_rad": ang,
                 "lp_bound": result.bound, "floor_bound": cap},
            )
        )

    cert_result = lp_upper_bound(math.pi / 3.0, config)
    coeffs = list(cert_result.certificate.coeffs.coeffs)
    if inject_fault:
        # Deliberately corrupt the witness upward so g turns positive
        # somewhere on the forbidden interval; the checker must reject it.
        coeffs[0] += 0.25
    cert = Certificate(
        coeffs=SeriesCoefficients(tuple(coeffs)),
        theta=cert_result.certificate.theta,
        max_violation=cert_result.certificate.max_violation,
    )
    violation, min_coeff = verify_certificate(cert)
    cert_ok = violation <= config.feasibility_tol and min_coeff >= -1e-12
    checks.append(
        (
            "certificate_recheck",
            bool(cert_ok),
            {"theta_rad": math.pi / 3.0, "max_violation": violation,
             "min_coefficient": min_coeff, "fault_injected": inject_fault},
        )
    )

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    mc_rows = []
    mc_ok = True
    produced = 0
    while produced < 3:
        quad = tuple(float(x) for x in rng.uniform(0.4, 2.5, size=4))
        try:
            dens = simplicial_density(quad)
        except DegenerateSimplexError:
            continue
        produced += 1
        est, err = monte_carlo_tetra_density(
            quad, samples=100_000, seed=seed + produced
        )
        z = (est - dens) / err
        mc_ok = mc_ok and abs(z) <= 4.0
        mc_rows.append(
            {"quadruple": list(quad), "analytic": dens, "estimate": est,
             "stderr": err, "z": z}
        )
    checks.append(("monte_carlo_density", bool(mc_ok), {"cases": mc_rows}))

    tet = embed((1.0 * scale, 1.3 * scale, 0.8 * scale, 2.0 * scale))
    d1 = dihedral_angles(tet)
    d2 = dihedral_angles_projection(tet)
    s1 = solid_angles(d1)
    s2 = solid_angles_tangent(tet)
    geo_gap = max(
        max(abs(a - b) for a, b in zip(d1.as_tuple(), d2.as_tuple())),
        max(abs(a - b) for a, b in zip(s1.omega, s2.omega)),
    )
    base = simplicial_density((1.0, 1.3, 0.8, 2.0))
    scaled = simplicial_density((scale, 1.3 * scale, 0.8 * scale, 2.0 * scale))
    angle_base = contact_angle(1.0, 1.3)
    angle_scaled = contact_angle(scale, 1.3 * scale)
    scale_gap = max(abs(scaled - base), abs(angle_scaled - angle_base))
    checks.append(
        (
            "geometry_invariance",
            bool(geo_gap <= 1e-9 and scale_gap <= 1e-12),
            {"dual_method_gap": geo_gap, "scale_gap": scale_gap, "scale": scale},
        )
    )

    spec = PackingSpec(species=(Species(1.0, 9), Species(0.6, 4)))
    packing = greedy_contact_packing(spec, seed=seed)
    bounds = compute_bound_report(spec, config)
    identity_gap = abs(
        bounds.avg_kissing_bound - 2.0 * bounds.contact_bound / spec.total_count
    )
    pack_ok = (
        packing.contact_count < bounds.contact_bound
        and packing.average_kissing < bounds.avg_kissing_bound
        and identity_gap <= 1e-9
    )
    checks.append(
        (
            "packing_witness",
            bool(pack_ok),
            {
                "measured_contacts": packing.contact_count,
                "contact_bound": bounds.contact_bound,
                "measured_avg_kissing": packing.average_kissing,
                "avg_kissing_bound": bounds.avg_kissing_bound,
                "identity_gap": identity_gap,
            },
        )
    )
    return checks


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    checks = _verify_checks(args.seed, args.scale, args.inject_fault)
    dt = time.perf_counter() - t0
    report = _report_skeleton(
        "verify",
        {"seed": args.seed, "scale": args.scale, "fault": args.inject_fault},
        {"seed": args.seed, "scale": args.scale},
    )
    all_ok = all(ok for _, ok, _ in checks)
    report["results"] = {
        "all_ok": all_ok,
        "checks": [
            {"name": name, "ok": ok, **details} for name, ok, details in checks
        ],
    }
    _emit(report, args.format, {"verify": dt})
    return EXIT_OK if all_ok else EXIT_INVARIANT


def _add_common(p: argparse.ArgumentParser, units: bool = False) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="report format (default text)")
    if units:
        p.add_argument("--units", choices=("deg", "rad"), required=True,
                       help="angle units; explicit, no default")


def _add_lp_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degree", type=int, default=None,
                   help="polynomial degree of the bounding series")
    p.add_argument("--grid", type=int, default=None,
                   help="constraint grid size for the LP")
    p.add_argument("--tol", type=float, default=None,
                   help="feasibility tolerance for certification")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spherebound",
                     description="Certified upper bounds for sphere packings.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_lp = sub.add_parser("lp", parents=[], help="code-size bound at one angle")
    p_lp.add_argument("theta", type=float, help="separation angle")
    _add_common(p_lp, units=True)
    _add_lp_params(p_lp)
    p_lp.set_defaults(func=cmd_lp)

    for name, fn in (("kissing", cmd_kissing), ("contact", cmd_contact)):
        p = sub.add_parser(name, help=f"{name} bound from a packing spec file")
        p.add_argument("specfile", help="path to the spec file")
        _add_common(p)
        _add_lp_params(p)
        p.set_defaults(func=fn)

    p_d = sub.add_parser("density", help="density bound for a radius set")
    p_d.add_argument("radii", type=float, nargs="+", help="radius values")
    p_d.add_argument("--delta-max", type=float, default=None,
                     help="constant tetrahedron packing factor in (0, 1]")
    _add_common(p_d)
    p_d.set_defaults(func=cmd_density)

    p_t = sub.add_parser("tetra", help="geometry dump for a radius quadruple")
    p_t.add_argument("radii", type=float, nargs=4, help="four sphere radii")
    _add_common(p_t, units=True)
    p_t.set_defaults(func=cmd_tetra)

    p_v = sub.add_parser("verify", help="run the witness sandwich suite")
    p_v.add_argument("--seed", type=int, default=0, help="seed for the suite")
    p_v.add_argument("--scale", type=float, default=2.0,
                     help="homothety factor for invariance checks")
    p_v.add_argument("--inject-fault", action="store_true",
                     help=argparse.SUPPRESS)
    _add_common(p_v)
    p_v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
