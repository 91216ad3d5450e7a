"""Gegenbauer (ultraspherical) polynomial basis on [-1, 1].

The basis parameter ``lam`` defaults to 1/2, the value for functions of
inner products on the unit sphere in R^3; C_k^{1/2} is the Legendre
polynomial P_k. Finite series in this basis represent candidate functions
for the linear-programming bounds on spherical code sizes, and the
weighted-average functional is the normalizing denominator of those bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import _kernels

__all__ = [
    "DEFAULT_LAMBDA",
    "SeriesCoefficients",
    "gegenbauer_eval",
    "eval_series",
    "weighted_mean",
    "gauss_legendre_rule",
]

DEFAULT_LAMBDA = 0.5

# Inputs this far outside [-1, 1] are treated as rounding noise and clipped;
# anything worse is a domain error.
_T_DOMAIN_TOL = 1e-9


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coefficients c_0..c_d of a finite series in the Gegenbauer basis."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) < 1:
            raise ValueError("series needs at least the degree-0 coefficient")
        if not all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def asarray(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.float64)


def _validate_t(t) -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("evaluation points must be finite")
    if np.any(np.abs(arr) > 1.0 + _T_DOMAIN_TOL):
        raise ValueError("evaluation point outside [-1, 1]")
    return np.clip(arr, -1.0, 1.0)


def _coeff_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, SeriesCoefficients):
        return coeffs.asarray()
    arr = np.asarray(coeffs, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("coefficients must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series coefficients must be finite")
    return arr


def gegenbauer_eval(k: int, t, lam: float = DEFAULT_LAMBDA):
    """Evaluate C_k^lam(t) by the stable three-term forward recurrence.

    ``t`` may be a scalar or an array; values must lie in [-1, 1] up to a
    small tolerance. For ``lam == 0.5`` this is the Legendre polynomial P_k.
    """
    if k < 0:
        raise ValueError("degree k must be nonnegative")
    if not lam > 0:
        raise ValueError("basis parameter lam must be positive")
    arr = _validate_t(t)
    table = _kernels.gegenbauer_table(int(k), float(lam), np.atleast_1d(arr).ravel())
    vals = table[int(k)].reshape(np.shape(arr))
    return float(vals) if np.isscalar(t) or np.ndim(t) == 0 else vals


def eval_series(coeffs, t, lam: float = DEFAULT_LAMBDA):
    """Evaluate ``sum_k c_k C_k^lam(t)`` in a single forward pass.

    Accepts a ``SeriesCoefficients`` or any coefficient sequence; ``t`` may
    be scalar or array. The recurrence is evaluated once per point (no
    per-degree re-evaluation).
    """
    if not lam > 0:
        raise ValueError("basis parameter lam must be positive")
    c = _coeff_array(coeffs)
    arr = _validate_t(t)
    vals = _kernels.eval_series(c, float(lam), np.atleast_1d(arr).ravel())
    vals = vals.reshape(np.shape(arr))
    return float(vals) if np.isscalar(t) or np.ndim(t) == 0 else vals


@lru_cache(maxsize=64)
def gauss_legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    if n < 2:
        raise ValueError("quadrature order must be at least 2")
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def weighted_mean(
    g: Callable[[np.ndarray], np.ndarray],
    weight_exponent: float = 0.0,
    quadrature_points: int = 64,
) -> float:
    """Average of g on [-1, 1] against the weight (1 - t^2)^w.

    Computed as a ratio of fixed-order Gauss-Legendre quadratures, so the
    result is exact (to ~1e-12) for polynomial g of degree up to
    ``2*quadrature_points - 1 - 2*w`` when ``w`` is an integer. For w = 0
    and g expanded in Legendre polynomials the mean equals the degree-0
    coefficient.
    """
    if weight_exponent < 0:
        raise ValueError("weight exponent must be nonnegative")
    nodes, weights = gauss_legendre_rule(int(quadrature_points))
    gvals = np.asarray(g(nodes), dtype=np.float64)
    if gvals.shape != nodes.shape:
        gvals = np.broadcast_to(gvals, nodes.shape)
    if not np.all(np.isfinite(gvals)):
        raise ValueError("integrand returned non-finite values")
    if weight_exponent == 0:
        wfactor = np.ones_like(nodes)
    else:
        wfactor = (1.0 - nodes * nodes) ** weight_exponent
    num = float(np.dot(weights, gvals * wfactor))
    den = float(np.dot(weights, wfactor))
    return num / den
