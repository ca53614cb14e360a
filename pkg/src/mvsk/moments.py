"""Return-data ingestion and empirical moment tensors.

A returns table is an n x m matrix: one row per asset, one column per
observation. From the centralized table T the model stores

    mean        M_i        = (1/m) sum_p raw_{i,p}
    covariance  V_{ij}     = (1/(m-1)) sum_p T_{i,p} T_{j,p}
    coskewness  S_{(ij),k} = (1/m) sum_p T_{i,p} T_{j,p} T_{k,p}
    cokurtosis  K_{(ij),(kl)} = (1/m) sum_p T_{i,p} T_{j,p} T_{k,p} T_{l,p}

with the third and fourth moment tensors materialized as flattened
(n^2, n) and (n^2, n^2) arrays (row-major over the paired indices).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, InsufficientSamples, ParseError
from .projection import CUBE, SIMPLEX, Domain

#: Largest asset count for which the n^4-entry kurtosis tensor is materialized.
MAX_ASSETS = 64

TENSOR_LAYOUT = (
    "coskewness_flat[(i*n+j)*n + k] = entry (i,j,k); "
    "cokurtosis_flat[((i*n+j)*n + k)*n + l] = entry (i,j,k,l); row-major"
)


@dataclass(frozen=True)
class Bounds:
    """Lower/upper bounds on the portfolio return <T_col, w> over a domain."""

    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError(f"bounds out of order: {self.lower} > {self.upper}")


@dataclass(frozen=True)
class ReturnsMatrix:
    """n x m table of relative returns plus asset labels."""

    values: np.ndarray
    asset_labels: tuple[str, ...]
    centralized: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionError(f"returns table must be 2-D, got shape {values.shape}")
        n, m = values.shape
        if n < 1:
            raise DimensionError("need at least one asset row")
        if m < 2:
            raise InsufficientSamples(f"need at least 2 observations per asset, got {m}")
        if len(self.asset_labels) != n:
            raise DimensionError(
                f"{len(self.asset_labels)} labels for {n} asset rows"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "asset_labels", tuple(str(s) for s in self.asset_labels))
        if self.centralized:
            scale = max(np.abs(values).max(), 1.0)
            if np.abs(values.sum(axis=1)).max() > 1e-10 * m * scale:
                raise DomainError("centralized returns must have zero row sums")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def load_returns(source) -> ReturnsMatrix:
    """Parse a returns CSV: header row of asset labels, then one row per asset.

    ``source`` may be a path, a text/byte stream, or raw bytes/str.
    Raises ParseError for ragged or non-numeric content and
    InsufficientSamples when fewer than two columns are present.
    """
    text = _read_text(source)
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    if len(rows) < 2:
        raise ParseError("expected a header row of asset labels plus one row per asset")
    labels = [c.strip() for c in rows[0]]
    data_rows = rows[1:]
    if len(data_rows) != len(labels):
        raise ParseError(
            f"header names {len(labels)} assets but file has {len(data_rows)} data rows"
        )
    m = len(data_rows[0])
    parsed = np.empty((len(data_rows), m), dtype=float)
    for i, row in enumerate(data_rows):
        if len(row) != m:
            raise ParseError(f"ragged row {i + 1}: expected {m} cells, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                parsed[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell at row {i + 1}, column {j + 1}: {cell!r}") from None
    if m < 2:
        raise InsufficientSamples(f"need at least 2 observations per asset, got {m}")
    return ReturnsMatrix(values=parsed, asset_labels=tuple(labels), centralized=False)


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    if isinstance(source, str) and "\n" in source:
        return source  # inline CSV content
    with open(source, "r", encoding="utf-8") as fh:  # path-like
        return fh.read()


def prices_to_returns(prices: ReturnsMatrix) -> ReturnsMatrix:
    """Convert a price series to relative returns (P_{t+1} - P_t) / P_t.

    Drops the first column; labels are kept.
    """
    p = prices.values
    if np.any(p[:, :-1] == 0):
        raise DomainError("cannot convert prices with zero entries to relative returns")
    rel = (p[:, 1:] - p[:, :-1]) / p[:, :-1]
    return ReturnsMatrix(values=rel, asset_labels=prices.asset_labels, centralized=False)


def centralize(raw: ReturnsMatrix) -> ReturnsMatrix:
    """Subtract the per-asset mean from every row."""
    if raw.centralized:
        return raw
    T = raw.values - raw.values.mean(axis=1, keepdims=True)
    return ReturnsMatrix(values=T, asset_labels=raw.asset_labels, centralized=True)


@dataclass(frozen=True)
class MomentModel:
    """Empirical moment tensors (mean, covariance, coskewness, cokurtosis).

    Immutable after construction; safe to share across concurrent solves.
    ``simplex_bounds`` and ``unit_cube_bound`` cache the attainable-return
    range of the underlying data (the cube bound scales linearly in B).
    """

    mean: np.ndarray          # (n,)
    covariance: np.ndarray    # (n, n)
    coskewness: np.ndarray    # (n*n, n)
    cokurtosis: np.ndarray    # (n*n, n*n)
    n: int
    m: int
    simplex_bounds: Bounds | None = None
    unit_cube_bound: float | None = None
    #: centralized return rows, kept when built from data; lets evaluation
    #: run in O(n*m) sample sums instead of O(n^4) tensor contractions
    centered: np.ndarray | None = None

    def __post_init__(self):
        n = self.n
        shapes = {
            "mean": (self.mean, (n,)),
            "covariance": (self.covariance, (n, n)),
            "coskewness": (self.coskewness, (n * n, n)),
            "cokurtosis": (self.cokurtosis, (n * n, n * n)),
        }
        for name, (arr, want) in shapes.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != want:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {want}")
            object.__setattr__(self, name, arr)
        if self.centered is not None:
            arr = np.ascontiguousarray(self.centered, dtype=float)
            if arr.shape != (n, self.m):
                raise DimensionError(
                    f"centered returns have shape {arr.shape}, expected {(n, self.m)}"
                )
            object.__setattr__(self, "centered", arr)

    @staticmethod
    def from_tensors(mean, covariance, coskewness, cokurtosis, m=0,
                     simplex_bounds=None, unit_cube_bound=None) -> "MomentModel":
        """Build a model from dense tensors shaped (n,), (n,n), (n,n,n), (n,n,n,n).

        Flattened (n^2, n) and (n^2, n^2) inputs are accepted as-is.
        """
        mean = np.asarray(mean, dtype=float)
        n = mean.shape[0]
        cosk = np.asarray(coskewness, dtype=float)
        if cosk.ndim == 3:
            cosk = cosk.reshape(n * n, n)
        cokt = np.asarray(cokurtosis, dtype=float)
        if cokt.ndim == 4:
            cokt = cokt.reshape(n * n, n * n)
        return MomentModel(
            mean=mean, covariance=np.asarray(covariance, dtype=float),
            coskewness=cosk, cokurtosis=cokt, n=n, m=int(m),
            simplex_bounds=simplex_bounds, unit_cube_bound=unit_cube_bound,
        )

    def bounds_for(self, domain: Domain) -> Bounds:
        """Attainable-return bounds for the given domain, from the cached data range."""
        if domain.kind == SIMPLEX:
            if self.simplex_bounds is None:
                raise DomainError("model carries no simplex bounds; rebuild from return data")
            return self.simplex_bounds
        if self.unit_cube_bound is None:
            raise DomainError("model carries no cube bounds; rebuild from return data")
        u = self.unit_cube_bound * domain.bound
        return Bounds(lower=-u, upper=u)


def build_moment_model(raw: ReturnsMatrix) -> MomentModel:
    """Estimate the moment model from raw (non-centralized) returns.

    Variance uses the unbiased divisor m-1; the third and fourth moments
    use m. Also caches the attainable-return bounds of both domains.
    """
    if raw.centralized:
        raise DomainError("build_moment_model expects raw (non-centralized) returns")
    n, m = raw.n, raw.m
    if n > MAX_ASSETS:
        raise DimensionError(
            f"n={n} assets would need an n^4 kurtosis tensor; supported maximum is {MAX_ASSETS}"
        )
    if m < 2:
        raise InsufficientSamples(f"need at least 2 observations per asset, got {m}")
    mean = raw.values.mean(axis=1)
    T = raw.values - mean[:, None]
    cov = T @ T.T / (m - 1)
    cov = 0.5 * (cov + cov.T)
    # pairwise products per sample: row (i*n+j) holds T_i * T_j elementwise
    Z = (T[:, None, :] * T[None, :, :]).reshape(n * n, m)
    cosk = Z @ T.T / m
    cokt = Z @ Z.T / m
    cokt = 0.5 * (cokt + cokt.T)
    centered = ReturnsMatrix(values=T, asset_labels=raw.asset_labels, centralized=True)
    return MomentModel(
        mean=mean, covariance=cov, coskewness=cosk, cokurtosis=cokt, n=n, m=m,
        simplex_bounds=domain_bounds(centered, Domain.simplex()),
        unit_cube_bound=float(np.abs(T).sum(axis=0).max()),
        centered=T,
    )


def domain_bounds(T: ReturnsMatrix, domain: Domain) -> Bounds:
    """Bounds on <T_col, w> over the domain, from the data extremes.

    Simplex: the entry-wise max/min of T (a relaxation of the exact
    linear-program optima, which would be the per-column best convex
    combination). Cube(B): +-B times the largest column sum of |T|.
    """
    if not T.centralized:
        raise DomainError("domain_bounds expects centralized returns")
    if domain.kind == SIMPLEX:
        return Bounds(lower=float(T.values.min()), upper=float(T.values.max()))
    if domain.kind == CUBE:
        u = domain.bound * float(np.abs(T.values).sum(axis=0).max())
        return Bounds(lower=-u, upper=u)
    raise DomainError(f"unknown domain kind {domain.kind!r}")


def model_to_dict(model: MomentModel) -> dict:
    out = {
        "layout": TENSOR_LAYOUT,
        "n": model.n,
        "m": model.m,
        "mean": model.mean.tolist(),
        "covariance": model.covariance.tolist(),
        "coskewness_flat": model.coskewness.ravel().tolist(),
        "cokurtosis_flat": model.cokurtosis.ravel().tolist(),
    }
    if model.simplex_bounds is not None:
        out["bounds"] = {
            "simplex": {"lower": model.simplex_bounds.lower, "upper": model.simplex_bounds.upper},
            "unit_cube": {"lower": -model.unit_cube_bound, "upper": model.unit_cube_bound},
        }
    if model.centered is not None:
        out["centralized_returns"] = model.centered.tolist()
    return out


def model_from_dict(payload: dict) -> MomentModel:
    n = int(payload["n"])
    bounds = payload.get("bounds")
    simplex_bounds = None
    unit_cube_bound = None
    if bounds is not None:
        simplex_bounds = Bounds(lower=float(bounds["simplex"]["lower"]),
                                upper=float(bounds["simplex"]["upper"]))
        unit_cube_bound = float(bounds["unit_cube"]["upper"])
    centered = payload.get("centralized_returns")
    return MomentModel(
        mean=np.asarray(payload["mean"], dtype=float),
        covariance=np.asarray(payload["covariance"], dtype=float),
        coskewness=np.asarray(payload["coskewness_flat"], dtype=float).reshape(n * n, n),
        cokurtosis=np.asarray(payload["cokurtosis_flat"], dtype=float).reshape(n * n, n * n),
        n=n,
        m=int(payload["m"]),
        simplex_bounds=simplex_bounds,
        unit_cube_bound=unit_cube_bound,
        centered=np.asarray(centered, dtype=float) if centered is not None else None,
    )


def save_model(model: MomentModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> MomentModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def model_fingerprint(model: MomentModel) -> str:
    """Stable content hash of the model, recorded in sweep metadata."""
    blob = json.dumps(model_to_dict(model), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
