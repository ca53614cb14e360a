"""Shared test utilities: small random instances and oracle helpers."""

import numpy as np

from mvsk import Domain, ReturnsMatrix, build_moment_model, classify_lambda, RegionLabel


def random_returns(rng, n=None, m=None, scale=1.0):
    n = int(rng.integers(2, 8)) if n is None else n
    m = int(rng.integers(12, 40)) if m is None else m
    values = rng.normal(0.0, scale, (n, m))
    labels = tuple(f"A{i}" for i in range(n))
    return ReturnsMatrix(values=values, asset_labels=labels)


def random_model(rng, n=None, m=None, scale=1.0):
    return build_moment_model(random_returns(rng, n=n, m=m, scale=scale))


def random_lambda(rng):
    return rng.dirichlet(np.ones(4))


def sample_domain_convex_lambda(rng, bounds, want=RegionLabel.DOMAIN_CONVEX, attempts=100000):
    """Rejection-sample a weight vector with the requested classification."""
    for _ in range(attempts):
        lam = random_lambda(rng)
        label = classify_lambda(lam, bounds)
        if want is RegionLabel.UNKNOWN:
            if label is RegionLabel.UNKNOWN:
                return lam
        elif label.at_least(want):
            return lam
    raise AssertionError(f"could not sample a {want} point")


def random_simplex_points(rng, count, n):
    return rng.dirichlet(np.ones(n), size=count)


def simplex_domain():
    return Domain.simplex()
