"""Certified upper bounds for non-congruent sphere packings in R^3."""

from ._kernels import BACKEND, HAVE_EXT
from .lp_codes import (
    Certificate,
    LPBoundResult,
    LPConfig,
    LPStatus,
    lp_upper_bound,
    verify_certificate,
)
from .oracle import (
    ContactPacking,
    SphericalCode,
    greedy_code_search,
    greedy_contact_packing,
    known_code,
    min_angle,
    monte_carlo_tetra_density,
)
from .packing import (
    BoundReport,
    PackingSpec,
    Species,
    UncertifiedBoundError,
    avg_kissing_bound,
    compute_bound_report,
    contact_angle,
    contact_number_bound,
    pair_edge_bound,
    tau_upper,
)
from .polybasis import SeriesCoefficients, eval_series, gegenbauer_eval, weighted_mean
from .tetra import (
    DegenerateSimplexError,
    DensityBound,
    RadiiQuadruple,
    TangentTetrahedron,
    density_upper_bound,
    dihedral_angles,
    embed,
    simplicial_density,
    solid_angles,
    wedge_volume,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HAVE_EXT",
    "BoundReport",
    "Certificate",
    "ContactPacking",
    "DegenerateSimplexError",
    "DensityBound",
    "LPBoundResult",
    "LPConfig",
    "LPStatus",
    "PackingSpec",
    "RadiiQuadruple",
    "SeriesCoefficients",
    "Species",
    "SphericalCode",
    "TangentTetrahedron",
    "UncertifiedBoundError",
    "avg_kissing_bound",
    "compute_bound_report",
    "contact_angle",
    "contact_number_bound",
    "density_upper_bound",
    "dihedral_angles",
    "embed",
    "eval_series",
    "gegenbauer_eval",
    "greedy_code_search",
    "greedy_contact_packing",
    "known_code",
    "lp_upper_bound",
    "min_angle",
    "monte_carlo_tetra_density",
    "pair_edge_bound",
    "simplicial_density",
    "solid_angles",
    "tau_upper",
    "verify_certificate",
    "wedge_volume",
    "__version__",
]
