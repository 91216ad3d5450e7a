"""Upper bounds on average kissing and contact numbers of sphere packings.

A finite packing is described by its composition: how many spheres of each
radius it contains. Tangencies split into same-radius pairs, bounded by the
congruent-packing edge bound 6n - kappa*n^(2/3), and mixed-radius pairs,
bounded through spherical-code sizes: the number of radius-b spheres that
can simultaneously touch one radius-a sphere is at most the maximum size of
a spherical code whose minimum angle is the contact angle of the pair. Code
sizes come from the LP engine and are floored, since they are integers.

Both reported bounds are strict ("<") and are affine images of the same
edge-count bounds, so twice the contact bound over the sphere count equals
the average-kissing bound exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lp_codes import LPConfig, LPStatus, lp_upper_bound

__all__ = [
    "DEFAULT_KAPPA",
    "KS_INTERVAL",
    "Species",
    "PackingSpec",
    "PairBoundDetail",
    "BoundReport",
    "UncertifiedBoundError",
    "contact_angle",
    "tau_upper",
    "pair_edge_bound",
    "avg_kissing_bound",
    "contact_number_bound",
    "compute_bound_report",
]

DEFAULT_KAPPA = 0.926675

# Reference interval for the supremal average kissing number of packings in
# R^3: (12.566, 8 + 4*sqrt(3)). Reports compare against it.
KS_INTERVAL = (12.566, 8.0 + 4.0 * math.sqrt(3.0))


class UncertifiedBoundError(RuntimeError):
    """An LP subproblem failed to certify, so no sound bound exists."""


@dataclass(frozen=True)
class Species:
    """One radius class of a packing composition."""

    radius: float
    count: int

    def __post_init__(self):
        if not (isinstance(self.count, int) and self.count >= 1):
            raise ValueError("species count must be an integer >= 1")
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0.0):
            raise ValueError("species radius must be a positive finite real")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class PackingSpec:
    """Composition of a finite packing: distinct radii with multiplicities."""

    species: tuple[Species, ...]
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        sp = tuple(self.species)
        if len(sp) < 1:
            raise ValueError("a packing needs at least one species")
        if not all(isinstance(s, Species) for s in sp):
            raise TypeError("species entries must be Species instances")
        radii = [s.radius for s in sp]
        if len(set(radii)) != len(radii):
            raise ValueError("species radii must be pairwise distinct")
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise ValueError("kappa must be a positive finite real")
        object.__setattr__(self, "species", sp)

    @property
    def total_count(self) -> int:
        return sum(s.count for s in self.species)


@dataclass(frozen=True)
class PairBoundDetail:
    """Mixed-pair tangency bound between species i and j.

    ``theta_ij`` is the minimum angular separation, seen from the center of
    a radius-r_i sphere, between two radius-r_j spheres touching it;
    ``tau_ij`` the floored LP code-size bound at that angle (inf when the
    truncated LP is infeasible at the configured degree, in which case the
    counts alone clamp the edge bound). ``edge_bound`` is the resulting
    strict bound on tangencies between the two species.
    """

    i: int
    j: int
    theta_ij: float
    theta_ji: float
    tau_ij: float
    tau_ji: float
    edge_bound: float


@dataclass(frozen=True)
class BoundReport:
    """Everything the two bound formulas produce, plus their ingredients."""

    spec: PackingSpec
    avg_kissing_bound: float
    contact_bound: float
    pair_details: tuple[PairBoundDetail, ...]
    same_species_bounds: tuple[float, ...]
    lp_config: LPConfig
    strict: bool = True
    ks_interval: tuple[float, float] = field(default=KS_INTERVAL)


def contact_angle(r_center: float, r_outer: float) -> float:
    """Minimum angle between two tangent radius-``r_outer`` spheres.

    Both spheres touch a central sphere of radius ``r_center``; the angle is
    measured from the central sphere's center. By the law of cosines on the
    isoceles triangle of centers (legs r_center + r_outer, base
    2*r_outer), the angle is arccos(1 - 2*r_outer^2 / (r_center + r_outer)^2),
    always in (0, pi). Depends only on the radius ratio.
    """
    rc = float(r_center)
    ro = float(r_outer)
    if not (math.isfinite(rc) and rc > 0.0) or not (math.isfinite(ro) and ro > 0.0):
        raise ValueError("radii must be positive finite reals")
    s = rc + ro
    return math.acos(1.0 - 2.0 * (ro / s) * (ro / s))


@lru_cache(maxsize=4096)
def _tau_for_ratio(ratio: float, config: LPConfig) -> float:
    """Floored LP code-size bound for a center/outer radius ratio of 1:ratio.

    The contact angle, hence the bound, depends only on the ratio, so this
    is the memoization point for repeated pairs.
    """
    theta = contact_angle(1.0, ratio)
    result = lp_upper_bound(theta, config)
    if result.status is LPStatus.NOT_CONVERGED:
        raise UncertifiedBoundError(
            f"code-size LP did not certify at angle {theta!r} "
            f"(degree {config.degree}); raise refine_rounds or the grids"
        )
    if result.status is LPStatus.INFEASIBLE:
        return math.inf
    return math.floor(result.bound + 1e-9)


def tau_upper(r_center: float, r_outer: float, config: LPConfig | None = None) -> float:
    """Upper bound on how many radius-``r_outer`` spheres can touch one
    radius-``r_center`` sphere.

    floor(LP bound + 1e-9) at the pair's contact angle; flooring is valid
    because the quantity being bounded is an integer. Returns ``inf`` when
    the truncated LP is infeasible at this degree (a vacuous bound; callers
    clamp by sphere counts).
    """
    cfg = config if config is not None else LPConfig()
    rc = float(r_center)
    ro = float(r_outer)
    if not (math.isfinite(rc) and rc > 0.0) or not (math.isfinite(ro) and ro > 0.0):
        raise ValueError("radii must be positive finite reals")
    return _tau_for_ratio(ro / rc, cfg)


def pair_edge_bound(si: Species, sj: Species, tau_ij: float, tau_ji: float) -> float:
    """Strict bound on tangencies between species i and j.

    Each of the n_i spheres of species i touches at most min(n_j, tau_ij)
    spheres of species j, and symmetrically; the smaller of the two counts
    bounds the pair's edge set.
    """
    if tau_ij < 0 or tau_ji < 0:
        raise ValueError("tau bounds must be nonnegative")
    ni = float(si.count)
    nj = float(sj.count)
    return min(ni * min(nj, tau_ij), nj * min(ni, tau_ji))


def _two_thirds(n: int) -> float:
    # cbrt keeps perfect cubes exact (27 -> 9), unlike n**(2/3)
    return float(np.cbrt(float(n)) ** 2)


def compute_bound_report(spec: PackingSpec, config: LPConfig | None = None) -> BoundReport:
    """Evaluate both bound formulas for a composition.

    The mixed-pair LP solves are shared between the two formulas and
    memoized per radius ratio. Summation order is fixed (species order,
    then nested pair order) so results are deterministic.
    """
    cfg = config if config is not None else LPConfig()
    species = spec.species
    k = len(species)
    n_total = spec.total_count

    details: list[PairBoundDetail] = []
    unordered_sum = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            si, sj = species[i], species[j]
            th_ij = contact_angle(si.radius, sj.radius)
            th_ji = contact_angle(sj.radius, si.radius)
            tau_ij = tau_upper(si.radius, sj.radius, cfg)
            tau_ji = tau_upper(sj.radius, si.radius, cfg)
            bound = pair_edge_bound(si, sj, tau_ij, tau_ji)
            details.append(
                PairBoundDetail(
                    i=i,
                    j=j,
                    theta_ij=th_ij,
                    theta_ji=th_ji,
                    tau_ij=tau_ij,
                    tau_ji=tau_ji,
                    edge_bound=bound,
                )
            )
            unordered_sum += bound
    # The cross-species sum in both formulas runs over ordered pairs, and
    # the pair bound is symmetric, so it is exactly twice the unordered sum.
    ordered_sum = 2.0 * unordered_sum

    same_bounds = tuple(
        6.0 * s.count - spec.kappa * _two_thirds(s.count) for s in species
    )
    sum_pow = 0.0
    for s in species:
        sum_pow += _two_thirds(s.count)

    avg_kissing = 12.0 + (ordered_sum - 2.0 * spec.kappa * sum_pow) / n_total
    contact = 0.0
    for s in species:
        contact += 6.0 * s.count
    contact -= spec.kappa * sum_pow
    contact += 0.5 * ordered_sum

    return BoundReport(
        spec=spec,
        avg_kissing_bound=avg_kissing,
        contact_bound=contact,
        pair_details=tuple(details),
        same_species_bounds=same_bounds,
        lp_config=cfg,
    )


def avg_kissing_bound(spec: PackingSpec, config: LPConfig | None = None) -> BoundReport:
    """Strict upper bound on the average kissing number 2|E|/n.

    12 + (sum over ordered species pairs of the pair edge bound
    - 2*kappa * sum_i n_i^(2/3)) / sum_i n_i. The full report carries the
    contact bound and per-pair details as well.
    """
    return compute_bound_report(spec, config)


def contact_number_bound(spec: PackingSpec, config: LPConfig | None = None) -> BoundReport:
    """Strict upper bound on the contact number |E|.

    sum_i (6 n_i - kappa * n_i^(2/3)) plus half the ordered-pair sum of
    edge bounds. The full report carries the average-kissing bound too.
    """
    return compute_bound_report(spec, config)
