"""Convexity certification of scalarized objectives.

The Hessian of the scalarized quartic is an expectation of rank-one
terms weighted by the quadratic q(y) = 6*l4*y^2 - 3*l3*y + l2, where y
ranges over attainable portfolio returns. If q is nonnegative on the
whole attainable interval [lower, upper], the objective is convex on the
domain; if q is nonnegative on all of R (nonpositive discriminant), it
is convex everywhere. Working out when the parabola's negative dip, if
any, misses the interval gives four mutually exhaustive certificate
conditions; the classification below is exact (an if-and-only-if), not a
heuristic.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError
from .moments import Bounds
from .objective import convexity_weight, lambda_array


class RegionLabel(enum.Enum):
    GLOBAL_CONVEX = "GlobalConvex"
    DOMAIN_CONVEX = "DomainConvex"
    UNKNOWN = "Unknown"

    @property
    def rank(self) -> int:
        return {"GlobalConvex": 2, "DomainConvex": 1, "Unknown": 0}[self.value]

    def at_least(self, other: "RegionLabel") -> bool:
        return self.rank >= other.rank


def certificate_conditions(lam, bounds: Bounds) -> dict[str, bool]:
    """Evaluate the four certificate conditions for q >= 0 on [lower, upper].

    i:   no quartic term; the linear-in-y weight stays >= 0 up to upper.
    ii:  nonpositive discriminant; q >= 0 on all of R.
    iii: positive discriminant but both roots sit above upper.
    iv:  positive discriminant but both roots sit below lower.
    """
    _, l2, l3, l4 = (float(v) for v in lambda_array(lam))
    if min(l2, l3, l4) < 0:
        raise DomainError("certificate conditions require nonnegative weights")
    upper, lower = bounds.upper, bounds.lower
    no_real_roots = l3 <= np.sqrt((8.0 / 3.0) * l2 * l4)
    two_roots = l4 > 0 and not no_real_roots
    return {
        "i": l4 == 0 and 3.0 * upper * l3 <= l2,
        "ii": l4 > 0 and no_real_roots,
        "iii": two_roots and 3.0 * upper * l3 <= l2 + 6.0 * upper * upper * l4
        and 4.0 * upper * l4 <= l3,
        "iv": two_roots and 3.0 * lower * l3 <= l2 + 6.0 * lower * lower * l4
        and 4.0 * lower * l4 >= l3,
    }


def classify_lambda(lam, bounds: Bounds) -> RegionLabel:
    """Classify lam by provable convexity of the scalarized objective.

    GlobalConvex: convex on all of R^n (condition ii, or the degenerate
    l3 = l4 = 0 case where the objective is linear plus a PSD quadratic).
    DomainConvex: convex on the domain whose attainable-return bounds
    were supplied (any of conditions i-iv). Unknown otherwise: the
    quadratic weight is provably negative somewhere in [lower, upper].
    """
    _, l2, l3, l4 = (float(v) for v in lambda_array(lam))
    conds = certificate_conditions(lam, bounds)
    if conds["ii"] or (l4 == 0 and l3 == 0):
        return RegionLabel.GLOBAL_CONVEX
    if any(conds.values()):
        return RegionLabel.DOMAIN_CONVEX
    return RegionLabel.UNKNOWN


def classify_arrays(l2, l3, l4, bounds: Bounds) -> np.ndarray:
    """Vectorized twin of classify_lambda; returns the labels' ranks.

    Mirrors the scalar logic exactly so that grid counting and per-point
    classification can never disagree.
    """
    l2, l3, l4 = (np.asarray(a, dtype=float) for a in (l2, l3, l4))
    upper, lower = bounds.upper, bounds.lower
    no_real_roots = l3 <= np.sqrt((8.0 / 3.0) * l2 * l4)
    cond_ii = (l4 > 0) & no_real_roots
    global_convex = cond_ii | ((l4 == 0) & (l3 == 0))
    cond_i = (l4 == 0) & (3.0 * upper * l3 <= l2)
    two_roots = (l4 > 0) & ~no_real_roots
    cond_iii = two_roots & (3.0 * upper * l3 <= l2 + 6.0 * upper * upper * l4) \
        & (4.0 * upper * l4 <= l3)
    cond_iv = two_roots & (3.0 * lower * l3 <= l2 + 6.0 * lower * lower * l4) \
        & (4.0 * lower * l4 >= l3)
    domain_convex = cond_i | cond_ii | cond_iii | cond_iv
    ranks = np.zeros(l2.shape, dtype=int)
    ranks[domain_convex] = RegionLabel.DOMAIN_CONVEX.rank
    ranks[global_convex] = RegionLabel.GLOBAL_CONVEX.rank
    return ranks


def region_volume(bounds: Bounds, region: RegionLabel, resolution: int = 200) -> float:
    """Relative volume of a convexity region inside the weight tetrahedron.

    Counts the points of a uniform (resolution per axis) grid over
    {(l2, l3, l4) >= 0 : l2 + l3 + l4 <= 1} that classify into the target
    region, lifting each point by l1 = 1 - l2 - l3 - l4. Deterministic
    grid counting, so repeated calls reproduce the same estimate.
    """
    if resolution < 2:
        raise DomainError(f"resolution must be at least 2, got {resolution}")
    axis = np.linspace(0.0, 1.0, resolution)
    l2, l3, l4 = np.meshgrid(axis, axis, axis, indexing="ij")
    keep = (l2 + l3 + l4) <= 1.0 + 1e-12
    ranks = classify_arrays(l2[keep], l3[keep], l4[keep], bounds)
    if region is RegionLabel.UNKNOWN:
        hits = ranks == RegionLabel.UNKNOWN.rank
    else:
        hits = ranks >= region.rank
    return float(hits.sum()) / float(keep.sum())


def min_convexity_weight(lam, bounds: Bounds, samples: int = 10000) -> tuple[float, float]:
    """Minimum of the quadratic weight over an even sampling of [lower, upper].

    Returns (argmin_y, min_value). Used both as a soundness check for
    DomainConvex labels (min must not be meaningfully negative) and as a
    negativity witness for Unknown ones.
    """
    ys = np.linspace(bounds.lower, bounds.upper, samples)
    vals = convexity_weight(lam, ys)
    i = int(np.argmin(vals))
    return float(ys[i]), float(vals[i])
