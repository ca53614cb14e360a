"""Support-constrained solving by decomposition into restricted faces.

A bound |supp(w)| <= k decomposes the problem into one sub-problem per
size-k index set U: minimize the same objective over the face of the
domain supported on U, then take the best face. Two pruning heuristics
cut the candidate list down from C(n, k): restrict U to subsets of the
dense optimizer's support, and keep only the faces whose projection of
the dense optimizer is nearest to it. Both can be disabled, which makes
the enumeration exhaustive (useful for oracle testing). Forbidden index
pairs are handled the same way via the maximal supports that avoid
every pair.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import DomainError
from .moments import MomentModel
from .projection import Domain
from .solver import SolveResult, SolverOptions, solve, support_of

_MAX_ENUMERATION = 500_000


@dataclass(frozen=True)
class SparseOptions:
    """k is the maximum support size of the returned portfolio."""

    k: int
    use_support_heuristic: bool = True
    proximity_count: int | None = None  # None keeps the n closest candidates

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"max support size must be positive, got {self.k}")
        if self.proximity_count is not None and self.proximity_count < 1:
            raise DomainError("proximity_count must be positive")


def enumerate_candidates(w_dense: np.ndarray, k: int, opts: SparseOptions,
                         domain: Domain | None = None) -> list[tuple[int, ...]]:
    """Ordered candidate supports for the size-k sub-problems.

    If the dense optimizer is already k-sparse, its support is the only
    candidate. Otherwise all size-k subsets (of the dense support when
    the support heuristic is on, of [n] when off) are ranked by the
    distance between the dense optimizer and its projection onto the
    corresponding face, ascending, ties broken lexicographically, and
    the first ``proximity_count`` (default n) are kept.
    """
    w = np.asarray(w_dense, dtype=float)
    n = w.size
    domain = domain or Domain.simplex()
    if k > n:
        raise DomainError(f"max support size {k} exceeds asset count {n}")
    supp = support_of(w)
    if len(supp) <= k:
        return [supp]

    base = supp if opts.use_support_heuristic else tuple(range(n))
    total = math.comb(len(base), k)
    if total > _MAX_ENUMERATION:
        raise DomainError(
            f"{total} candidate supports to enumerate; enable the pruning heuristics"
        )
    keep = opts.proximity_count if opts.proximity_count is not None else n
    ranked = []
    for subset in itertools.combinations(base, k):
        projected = domain.restrict(subset).project(w)
        ranked.append((float(np.linalg.norm(projected - w)), subset))
    ranked.sort(key=lambda pair: (pair[0], pair[1]))
    return [subset for _, subset in ranked[:keep]]


def solve_sparse(model: MomentModel, lam, domain: Domain, opts: SparseOptions,
                 w_dense: SolveResult,
                 solver_opts: SolverOptions | None = None) -> SolveResult:
    """Best k-sparse portfolio via the face decomposition.

    ``w_dense`` must be a dense-domain result for the same model, lam
    and domain; it seeds every restricted solve (the solver projects the
    warm start onto each face). Returns the face result with the lowest
    scalarized value, ties resolved by lexicographic support.
    """
    if domain.support is not None:
        raise DomainError("solve_sparse expects the dense (unrestricted) domain")
    if len(support_of(w_dense.w)) <= opts.k:
        return w_dense
    candidates = enumerate_candidates(w_dense.w, opts.k, opts, domain)
    best: SolveResult | None = None
    best_key: tuple[float, tuple[int, ...]] | None = None
    for subset in candidates:
        result = solve(model, lam, domain.restrict(subset), solver_opts,
                       warm_start=w_dense.w)
        key = (result.scalarized_value, subset)
        if best_key is None or key < best_key:
            best, best_key = result, key
    assert best is not None
    return best


def maximal_supports(n: int, forbidden_pairs) -> list[tuple[int, ...]]:
    """Maximal index sets containing no forbidden pair.

    These are the maximal independent sets of the conflict graph,
    enumerated as maximal cliques of its complement. Exponential in
    general, so capped at n <= 20.
    """
    if n > 20:
        raise DomainError(f"maximal-support enumeration is limited to n <= 20, got n={n}")
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for i, j in forbidden_pairs:
        i, j = int(i), int(j)
        if i == j:
            raise DomainError(f"forbidden pair ({i}, {j}) is not a pair")
        if not (0 <= i < n and 0 <= j < n):
            raise DomainError(f"forbidden pair ({i}, {j}) out of range for n={n}")
        graph.add_edge(i, j)
    cliques = nx.find_cliques(nx.complement(graph))
    return sorted(tuple(sorted(c)) for c in cliques)


def solve_forbidden_pairs(model: MomentModel, lam, domain: Domain, forbidden_pairs,
                          w_dense: SolveResult | None = None,
                          solver_opts: SolverOptions | None = None) -> SolveResult:
    """Best portfolio whose support contains no forbidden pair."""
    if domain.support is not None:
        raise DomainError("solve_forbidden_pairs expects the dense (unrestricted) domain")
    warm = w_dense.w if w_dense is not None else None
    best: SolveResult | None = None
    best_key = None
    for subset in maximal_supports(model.n, forbidden_pairs):
        result = solve(model, lam, domain.restrict(subset), solver_opts, warm_start=warm)
        key = (result.scalarized_value, subset)
        if best_key is None or key < best_key:
            best, best_key = result, key
    assert best is not None
    return best
