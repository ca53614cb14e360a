"""Seeded synthetic return data.

One common market factor with an occasional crash regime (negative skew,
fat tails) plus heavy-tailed idiosyncratic noise, heterogeneous drifts,
betas and volatilities. Deterministic for a fixed seed, so generated
files are byte-identical across runs.
"""

from __future__ import annotations

import numpy as np

from .moments import ReturnsMatrix


def synthetic_returns(n: int = 20, m: int = 500, seed: int = 0) -> ReturnsMatrix:
    rng = np.random.default_rng(seed)
    drift = rng.uniform(-0.0005, 0.0025, n)
    beta = rng.uniform(0.4, 1.6, n)
    idio_vol = rng.uniform(0.004, 0.02, n)

    market = rng.normal(0.0005, 0.007, m)
    crash = rng.random(m) < 0.06
    market[crash] += rng.normal(-0.02, 0.015, int(crash.sum()))

    idio = rng.standard_t(5, size=(n, m)) * idio_vol[:, None]
    values = drift[:, None] + beta[:, None] * market[None, :] + idio
    labels = tuple(f"S{i + 1:02d}" for i in range(n))
    return ReturnsMatrix(values=values, asset_labels=labels, centralized=False)


def write_returns_csv(returns: ReturnsMatrix, path) -> None:
    """Write the returns table in the package CSV layout (labels row, one row per asset).

    Floats are written with repr for exact round-tripping, which also
    keeps the file byte-stable for a fixed seed.
    """
    lines = [",".join(returns.asset_labels)]
    for row in returns.values:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
