import numpy as np
import pytest

from helpers import random_lambda, random_model, sample_domain_convex_lambda
from mvsk import (Bounds, Domain, DomainError, RegionLabel,
                  certificate_conditions, classify_lambda, hessian,
                  min_convexity_weight, region_volume)

FIG_BOUNDS_SIMPLEX = Bounds(lower=-0.2, upper=0.52)
FIG_BOUNDS_CUBE = Bounds(lower=-0.87, upper=0.87)


def test_classify_global_convex_example():
    # sqrt((8/3) * 0.3 * 0.3) ~ 0.4899 >= 0.3, quartic weight positive
    label = classify_lambda([0.1, 0.3, 0.3, 0.3], FIG_BOUNDS_SIMPLEX)
    assert label is RegionLabel.GLOBAL_CONVEX
    _, lo = min_convexity_weight([0.1, 0.3, 0.3, 0.3], Bounds(-10.0, 10.0))
    assert lo >= -1e-12


def test_classify_linear_objective():
    label = classify_lambda([1.0, 0.0, 0.0, 0.0], FIG_BOUNDS_SIMPLEX)
    # pure-mean weights satisfy the no-quartic condition; the degenerate
    # l3 = l4 = 0 closure upgrades the label to convex-everywhere
    assert label.at_least(RegionLabel.DOMAIN_CONVEX)
    assert certificate_conditions([1.0, 0.0, 0.0, 0.0], FIG_BOUNDS_SIMPLEX)["i"]


def test_classify_unknown_with_witness():
    lam = [0.1, 0.0, 0.9, 0.0]
    assert classify_lambda(lam, FIG_BOUNDS_SIMPLEX) is RegionLabel.UNKNOWN
    y, val = min_convexity_weight(lam, FIG_BOUNDS_SIMPLEX)
    assert val < 0 and FIG_BOUNDS_SIMPLEX.lower <= y <= FIG_BOUNDS_SIMPLEX.upper


def test_nesting_global_implies_domain():
    rng = np.random.default_rng(17)
    for _ in range(500):
        lam = random_lambda(rng)
        lo = -float(rng.uniform(0, 1))
        hi = float(rng.uniform(0, 1))
        conds = certificate_conditions(lam, Bounds(lo, hi))
        label = classify_lambda(lam, Bounds(lo, hi))
        if label is RegionLabel.GLOBAL_CONVEX:
            assert any(conds.values()) or lam[3] == 0
        if any(conds.values()):
            assert label.at_least(RegionLabel.DOMAIN_CONVEX)


def test_classification_monotone_in_bounds():
    # convex on a wider attainable interval implies convex on a narrower one
    rng = np.random.default_rng(18)
    for _ in range(300):
        lam = random_lambda(rng)
        lo, hi = sorted(rng.uniform(-1, 1, 2))
        if lo == hi:
            continue
        inner_lo = lo + 0.25 * (hi - lo)
        inner_hi = hi - 0.25 * (hi - lo)
        outer = classify_lambda(lam, Bounds(lo, hi))
        inner = classify_lambda(lam, Bounds(inner_lo, inner_hi))
        if outer.at_least(RegionLabel.DOMAIN_CONVEX):
            assert inner.at_least(RegionLabel.DOMAIN_CONVEX)


def test_soundness_and_completeness_against_weight_sampling():
    rng = np.random.default_rng(19)
    bounds = FIG_BOUNDS_SIMPLEX
    for _ in range(400):
        lam = random_lambda(rng)
        label = classify_lambda(lam, bounds)
        _, lo = min_convexity_weight(lam, bounds)
        if label.at_least(RegionLabel.DOMAIN_CONVEX):
            assert lo >= -1e-12
        else:
            assert lo < 1e-9  # negativity witness, sampling tolerance


def test_hessian_soundness_on_model():
    rng = np.random.default_rng(20)
    model = random_model(rng, n=5, m=60, scale=0.03)
    bounds = model.bounds_for(Domain.simplex())
    for _ in range(20):
        lam = sample_domain_convex_lambda(rng, bounds)
        for _ in range(100):
            w = rng.dirichlet(np.ones(5))
            H = hessian(model, lam, w)
            eigs = np.linalg.eigvalsh(H)
            assert eigs.min() >= -1e-8 * max(np.abs(eigs).max(), 1e-300)


def test_region_volume_matches_reported_fractions():
    # quick low-resolution variant of the acceptance volumes
    vol_plus = region_volume(FIG_BOUNDS_SIMPLEX, RegionLabel.GLOBAL_CONVEX, 100)
    vol_simplex = region_volume(FIG_BOUNDS_SIMPLEX, RegionLabel.DOMAIN_CONVEX, 100)
    vol_cube = region_volume(FIG_BOUNDS_CUBE, RegionLabel.DOMAIN_CONVEX, 100)
    assert abs(vol_plus - 0.59) <= 0.02
    assert abs(vol_simplex - 0.63) <= 0.02
    assert abs(vol_cube - 0.61) <= 0.02
    assert vol_plus <= vol_cube <= vol_simplex


def test_region_volume_unknown_complements():
    unknown = region_volume(FIG_BOUNDS_SIMPLEX, RegionLabel.UNKNOWN, 80)
    domain = region_volume(FIG_BOUNDS_SIMPLEX, RegionLabel.DOMAIN_CONVEX, 80)
    assert abs(unknown + domain - 1.0) < 1e-12


def test_region_volume_validation():
    with pytest.raises(DomainError):
        region_volume(FIG_BOUNDS_SIMPLEX, RegionLabel.DOMAIN_CONVEX, 1)


def test_certificate_conditions_rejects_negative_weights():
    with pytest.raises(DomainError):
        certificate_conditions([0.1, -0.2, 0.5, 0.6], FIG_BOUNDS_SIMPLEX)


def test_condition_iv_vacuous_for_negative_lower():
    # with a negative lower bound the both-roots-below case cannot trigger
    rng = np.random.default_rng(23)
    for _ in range(500):
        lam = random_lambda(rng)
        conds = certificate_conditions(lam, Bounds(-0.3, 0.6))
        assert not conds["iv"] or lam[2] == 0
