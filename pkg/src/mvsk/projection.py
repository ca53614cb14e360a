"""Euclidean projections onto the simplex, the cube, and restricted faces.

These are the building blocks of every projected gradient step: the
feasible sets are the probability simplex (long-only portfolios), a
symmetric cube [-B, B]^n (shorting and leverage up to B), and faces of
either set obtained by forcing a subset of coordinates to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

SIMPLEX = "simplex"
CUBE = "cube"


_COUNTS_CACHE: dict[int, np.ndarray] = {}


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Project ``x`` onto {y : y >= 0, sum(y) = 1} in Euclidean norm.

    Sort-and-threshold algorithm, O(n log n). The projection is unique,
    so tie handling in the sort cannot change the result.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    counts = _COUNTS_CACHE.get(n)
    if counts is None:
        counts = _COUNTS_CACHE.setdefault(n, np.arange(1.0, n + 1.0))
    u = np.sort(x)[::-1]
    cumulative = np.cumsum(u)
    # the test u_k > (sum of k largest - 1)/k holds exactly for a prefix;
    # k=1 always qualifies
    rho = int(np.count_nonzero(u * counts > cumulative - 1.0))
    theta = (cumulative[rho - 1] - 1.0) / rho
    return np.maximum(x - theta, 0.0)


def project_cube(x: np.ndarray, bound: float) -> np.ndarray:
    """Clamp ``x`` entry-wise to [-bound, bound]."""
    if bound <= 0:
        raise DomainError(f"cube bound must be positive, got {bound}")
    return np.clip(np.asarray(x, dtype=float), -bound, bound)


def _as_support(support, n: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(support), dtype=int))
    if idx.size == 0:
        raise DomainError("support restriction must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise DomainError(f"support indices must lie in [0, {n})")
    return idx


def project_face(x: np.ndarray, support) -> np.ndarray:
    """Project onto the simplex face supported on ``support``.

    Coordinates outside the support are zeroed; the remaining ones are
    projected onto the lower-dimensional simplex and lifted back.
    """
    x = np.asarray(x, dtype=float)
    idx = _as_support(support, x.size)
    out = np.zeros_like(x)
    out[idx] = project_simplex(x[idx])
    return out


def project_cube_face(x: np.ndarray, bound: float, support) -> np.ndarray:
    """Clamp the supported coordinates to [-bound, bound], zero the rest."""
    x = np.asarray(x, dtype=float)
    idx = _as_support(support, x.size)
    out = np.zeros_like(x)
    out[idx] = np.clip(x[idx], -bound, bound)
    return out


@dataclass(frozen=True)
class Domain:
    """Feasible set for portfolio weights.

    kind is "simplex" or "cube"; ``bound`` is the cube half-width B and
    is ignored for the simplex. ``support`` optionally restricts the
    domain to the face where all other coordinates vanish.
    """

    kind: str
    bound: float = 1.0
    support: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in (SIMPLEX, CUBE):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.bound <= 0:
            raise DomainError(f"cube bound must be positive, got {self.bound}")
        if self.support is not None:
            if len(self.support) == 0:
                raise DomainError("support restriction must be nonempty")
            object.__setattr__(self, "support", tuple(sorted(int(i) for i in self.support)))

    @staticmethod
    def simplex(support=None) -> "Domain":
        return Domain(SIMPLEX, support=tuple(support) if support is not None else None)

    @staticmethod
    def cube(bound: float = 1.0, support=None) -> "Domain":
        return Domain(CUBE, bound=bound, support=tuple(support) if support is not None else None)

    @property
    def is_simplex(self) -> bool:
        return self.kind == SIMPLEX

    def restrict(self, support) -> "Domain":
        return replace(self, support=tuple(sorted(int(i) for i in support)))

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.projector()(x)

    def projector(self):
        """Projection as a bound closure, for use in solver inner loops."""
        if self.support is not None:
            idx = np.array(self.support, dtype=int)
            if self.is_simplex:
                def proj(x, idx=idx):
                    out = np.zeros(len(x))
                    out[idx] = project_simplex(np.asarray(x, dtype=float)[idx])
                    return out
            else:
                bound = self.bound

                def proj(x, idx=idx):
                    out = np.zeros(len(x))
                    out[idx] = np.clip(np.asarray(x, dtype=float)[idx], -bound, bound)
                    return out
            return proj
        if self.is_simplex:
            return project_simplex
        bound = self.bound
        return lambda x: np.clip(np.asarray(x, dtype=float), -bound, bound)

    def start_point(self, n: int) -> np.ndarray:
        """Deterministic feasible start: barycenter for the simplex, origin for the cube."""
        if self.is_simplex:
            if self.support is not None:
                out = np.zeros(n)
                out[list(self.support)] = 1.0 / len(self.support)
                return out
            return np.full(n, 1.0 / n)
        return np.zeros(n)

    def contains(self, x: np.ndarray, tol: float = 1e-10) -> bool:
        x = np.asarray(x, dtype=float)
        if self.support is not None:
            off = np.ones(x.size, dtype=bool)
            off[list(self.support)] = False
            if np.any(np.abs(x[off]) > tol):
                return False
        if self.is_simplex:
            return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)
        return bool(np.all(np.abs(x) <= self.bound + tol))
