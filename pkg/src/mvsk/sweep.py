"""Grid sweeps over the scalarization weights.

A sweep solves one scalarized problem per grid point of the weight
simplex, chaining warm starts between neighbouring points, then rescales
the four objective values across the sweep to [0, 1] so portfolios can
be compared on a common footing. Slices of constant quartic weight are
independent units: they can run in parallel while the warm-start chain
stays sequential inside each slice, and assembly back into grid order
makes the output independent of completion order.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .convexity import RegionLabel, classify_arrays
from .errors import DomainError, MvskError
from .moments import MomentModel
from .objective import LambdaPoint, ObjectiveValues
from .projection import Domain
from .solver import SolveResult, SolverOptions, solve
from .sparse import SparseOptions, solve_sparse


@dataclass(frozen=True)
class LambdaGrid:
    """Uniform mesh of the weight simplex with spacing 1/s.

    Points are ordered lexicographically in (l2, l3, l4); l1 is implied.
    With the mean-weight filter on, points with l1 = 0 are dropped.
    """

    s: int
    points: tuple[LambdaPoint, ...]
    lambda1_filtered: bool


def build_grid(s: int, require_positive_mean_weight: bool = True) -> LambdaGrid:
    """All weight 4-tuples with coordinates in {0, 1/s, ..., 1} summing to 1."""
    if s < 1:
        raise DomainError(f"grid subdivision must be positive, got {s}")
    points = []
    for l2 in range(s + 1):
        for l3 in range(s + 1 - l2):
            for l4 in range(s + 1 - l2 - l3):
                l1 = s - l2 - l3 - l4
                if require_positive_mean_weight and l1 == 0:
                    continue
                points.append(LambdaPoint(values=(l1 / s, l2 / s, l3 / s, l4 / s)))
    return LambdaGrid(s=s, points=tuple(points),
                      lambda1_filtered=require_positive_mean_weight)


@dataclass
class SweepResult:
    """Per-grid-point solve results plus sweep-level derived tables.

    ``results`` aligns with ``grid.points``; failed entries are None with
    the reason in ``failures``. ``scaled_values`` and ``aggregate`` are
    filled by scale_values. ``region_labels`` classify each point against
    the model's attainable-return bounds (None when the model carries no
    bounds for the domain).
    """

    grid: LambdaGrid
    domain: Domain
    solver_opts: SolverOptions
    results: list[SolveResult | None]
    failures: dict[int, str] = field(default_factory=dict)
    region_labels: list[RegionLabel] | None = None
    sparse_k: int | None = None
    scaled_values: np.ndarray | None = None  # (N, 4), NaN rows for failures
    aggregate: np.ndarray | None = None      # (N,)

    @property
    def raw_values(self) -> list[ObjectiveValues | None]:
        return [r.objectives if r is not None else None for r in self.results]

    def ok_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.results) if r is not None]


def _slices(grid: LambdaGrid) -> list[list[int]]:
    """Group grid indices by the quartic-weight level, preserving grid order."""
    by_level: dict[int, list[int]] = {}
    for idx, point in enumerate(grid.points):
        level = round(point.values[3] * grid.s)
        by_level.setdefault(level, []).append(idx)
    return [by_level[level] for level in sorted(by_level)]


def _solve_slice(model, domain, opts, sparse, payload):
    """Solve one slice sequentially, chaining warm starts between points."""
    out = []
    warm = None
    for idx, lam in payload:
        try:
            dense = solve(model, lam, domain, opts, warm_start=warm)
            warm = dense.w
            result = dense
            if sparse is not None:
                result = solve_sparse(model, lam, domain, sparse, dense,
                                      solver_opts=opts)
            out.append((idx, result, None))
        except MvskError as exc:
            out.append((idx, None, f"{type(exc).__name__}: {exc}"))
    return out


_WORKER_CTX: dict = {}


def _init_worker(model, domain, opts, sparse):
    _WORKER_CTX["args"] = (model, domain, opts, sparse)


def _worker_slice(payload):
    return _solve_slice(*_WORKER_CTX["args"], payload)


def run_sweep(model: MomentModel, domain: Domain, grid: LambdaGrid,
              opts: SolverOptions | None = None,
              sparse: SparseOptions | None = None,
              jobs: int = 1) -> SweepResult:
    """Solve every grid point; failures are recorded, not raised.

    Each constant-l4 slice chains warm starts from the previously solved
    point in the slice. With jobs > 1 the slices run in separate
    processes; results are assembled by grid index, so the output is
    identical for any job count.
    """
    opts = opts or SolverOptions()
    payloads = [[(idx, grid.points[idx]) for idx in sl] for sl in _slices(grid)]
    if jobs <= 1 or len(payloads) <= 1:
        chunks = [_solve_slice(model, domain, opts, sparse, p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(model, domain, opts, sparse)) as pool:
            chunks = list(pool.map(_worker_slice, payloads))

    results: list[SolveResult | None] = [None] * len(grid.points)
    failures: dict[int, str] = {}
    for chunk in chunks:
        for idx, result, err in chunk:
            if err is None:
                results[idx] = result
            else:
                failures[idx] = err

    labels = None
    try:
        bounds = model.bounds_for(domain)
    except DomainError:
        bounds = None
    if bounds is not None:
        lam_arr = np.array([p.values for p in grid.points])
        ranks = classify_arrays(lam_arr[:, 1], lam_arr[:, 2], lam_arr[:, 3], bounds)
        by_rank = {lbl.rank: lbl for lbl in RegionLabel}
        labels = [by_rank[int(r)] for r in ranks]

    return SweepResult(
        grid=grid, domain=domain, solver_opts=opts, results=results,
        failures=failures, region_labels=labels,
        sparse_k=sparse.k if sparse is not None else None,
    )


def scale_values(sweep: SweepResult) -> SweepResult:
    """Rescale each objective affinely to [0, 1] across the sweep.

    Mean and third moment keep orientation (1 is best); variance and
    fourth moment are flipped so that 1 is again best. A constant
    objective maps to 1 everywhere rather than penalizing the aggregate.
    Fills ``scaled_values`` and ``aggregate`` in place and returns the sweep.
    """
    ok = sweep.ok_indices()
    if not ok:
        raise DomainError("sweep has no successful results to scale")
    raw = np.array([sweep.results[i].objectives.as_array() for i in ok])
    scaled = np.full((len(sweep.results), 4), np.nan)
    for col in range(4):
        lo, hi = raw[:, col].min(), raw[:, col].max()
        if hi > lo:
            vals = (raw[:, col] - lo) / (hi - lo)
            if col in (1, 3):
                vals = 1.0 - vals
        else:
            vals = np.ones(len(ok))
        scaled[ok, col] = vals
    sweep.scaled_values = scaled
    sweep.aggregate = scaled.sum(axis=1)
    return sweep


def superior_set(sweep: SweepResult, eta: float) -> list[tuple[int, float]]:
    """Grid indices whose aggregate score is within a (1 - eta) factor of the best."""
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta must lie strictly between 0 and 1, got {eta}")
    if sweep.aggregate is None:
        raise DomainError("scale_values must run before superior_set")
    best = np.nanmax(sweep.aggregate)
    threshold = (1.0 - eta) * best
    hits = [(i, float(sweep.aggregate[i])) for i in sweep.ok_indices()
            if sweep.aggregate[i] >= threshold]
    return hits


def support_histogram(sweep: SweepResult) -> dict[int, float]:
    """Normalized frequency of support sizes over the successful solves."""
    ok = sweep.ok_indices()
    if not ok:
        return {}
    counts: dict[int, int] = {}
    for i in ok:
        size = len(sweep.results[i].support)
        counts[size] = counts.get(size, 0) + 1
    return {size: counts[size] / len(ok) for size in sorted(counts)}


def non_domination_check(sweep: SweepResult, restrict_to=None,
                         margin: float = 1e-9) -> list[tuple[int, int]]:
    """Pairs (a, b) where portfolio a is strictly dominated by portfolio b.

    Comparison is in the multi-objective sense: mean and third moment
    maximized, variance and fourth moment minimized; b must be at least
    as good everywhere (within margin) and strictly better by more than
    margin somewhere. By default only strictly positive weight points
    classified convex on the domain are compared, where domination would
    contradict Pareto optimality of exact optimizers.
    """
    if restrict_to is None:
        if sweep.region_labels is None:
            raise DomainError(
                "sweep carries no region labels; pass an explicit restrict_to predicate"
            )

        def restrict_to(i, lam):
            return lam.strictly_positive() and \
                sweep.region_labels[i].at_least(RegionLabel.DOMAIN_CONVEX)

    selected = [i for i in sweep.ok_indices()
                if restrict_to(i, sweep.grid.points[i])]
    if len(selected) < 2:
        return []
    raw = np.array([sweep.results[i].objectives.as_array() for i in selected])
    oriented = raw * np.array([1.0, -1.0, 1.0, -1.0])  # larger is better everywhere
    violations = []
    for b_pos in range(len(selected)):
        gb = oriented[b_pos]
        at_least = np.all(gb >= oriented - margin, axis=1)
        strictly = np.any(gb > oriented + margin, axis=1)
        dominated = at_least & strictly
        dominated[b_pos] = False
        for a_pos in np.flatnonzero(dominated):
            violations.append((selected[a_pos], selected[b_pos]))
    return sorted(violations)


def sweep_to_dict(sweep: SweepResult, eta: float | None = None,
                  data_fingerprint: str | None = None) -> dict:
    """JSON-ready view of the sweep (grid, per-point results, summary)."""
    meta = {
        "s": sweep.grid.s,
        "lambda1_filter": sweep.grid.lambda1_filtered,
        "domain": {"kind": sweep.domain.kind, "bound": sweep.domain.bound},
        "sparse_k": sweep.sparse_k,
        "eta": eta,
        "data_fingerprint": data_fingerprint,
        "solver": {
            "max_iterations": sweep.solver_opts.max_iterations,
            "backtracking_factor": sweep.solver_opts.backtracking_factor,
            "initial_step": sweep.solver_opts.initial_step,
            "stationarity_tolerance": sweep.solver_opts.stationarity_tolerance,
            "stop_on_stationarity": sweep.solver_opts.stop_on_stationarity,
        },
        "failures": len(sweep.failures),
    }
    entries = []
    for i, point in enumerate(sweep.grid.points):
        entry: dict = {"lambda": list(point.values)}
        result = sweep.results[i]
        if result is None:
            entry["error"] = sweep.failures.get(i, "failed")
        else:
            entry["w"] = result.w.tolist()
            entry["f"] = result.objectives.as_array().tolist()
            if sweep.scaled_values is not None and not math.isnan(sweep.scaled_values[i, 0]):
                entry["scaled"] = sweep.scaled_values[i].tolist()
                entry["aggregate"] = float(sweep.aggregate[i])
            entry["support_size"] = len(result.support)
            entry["converged"] = bool(
                result.projected_gradient_norm <= sweep.solver_opts.stationarity_tolerance
            )
        if sweep.region_labels is not None:
            entry["region_label"] = sweep.region_labels[i].value
        entries.append(entry)
    summary: dict = {"support_histogram": {str(k): v for k, v in support_histogram(sweep).items()}}
    if sweep.aggregate is not None:
        summary["max_aggregate"] = float(np.nanmax(sweep.aggregate))
        if eta is not None:
            summary["superior_count"] = len(superior_set(sweep, eta))
    return {
        "meta": meta,
        "grid": [list(p.values) for p in sweep.grid.points],
        "results": entries,
        "summary": summary,
    }


def write_sweep_json(sweep: SweepResult, path, eta: float | None = None,
                     data_fingerprint: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sweep_to_dict(sweep, eta, data_fingerprint), fh,
                  sort_keys=True, indent=1)
        fh.write("\n")


def write_sweep_csv(sweep: SweepResult, path) -> None:
    """Long-format companion CSV, one grid point per row, keyed by (l2, l3, l4)."""
    header = ["lambda2", "lambda3", "lambda4", "lambda1",
              "f1", "f2", "f3", "f4",
              "scaled_f1", "scaled_f2", "scaled_f3", "scaled_f4",
              "aggregate", "support_size", "region_label", "converged", "error"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, point in enumerate(sweep.grid.points):
            l1, l2, l3, l4 = point.values
            row: list = [repr(l2), repr(l3), repr(l4), repr(l1)]
            result = sweep.results[i]
            if result is None:
                row += [""] * 10 + [_label_str(sweep, i), "", sweep.failures.get(i, "failed")]
            else:
                fvals = result.objectives.as_array()
                row += [repr(float(v)) for v in fvals]
                if sweep.scaled_values is not None and not math.isnan(sweep.scaled_values[i, 0]):
                    row += [repr(float(v)) for v in sweep.scaled_values[i]]
                    row += [repr(float(sweep.aggregate[i]))]
                else:
                    row += [""] * 5
                converged = result.projected_gradient_norm <= sweep.solver_opts.stationarity_tolerance
                row += [str(len(result.support)), _label_str(sweep, i), str(bool(converged)), ""]
            writer.writerow(row)


def _label_str(sweep: SweepResult, i: int) -> str:
    if sweep.region_labels is None:
        return ""
    return sweep.region_labels[i].value


def write_trade_off_table(sweep: SweepResult, indices, path) -> None:
    """Table of scaled values for selected grid points.

    Columns: the weight 4-vector, the four scaled objective values, and
    the support size, one row per selected point.
    """
    if sweep.scaled_values is None:
        raise DomainError("scale_values must run before exporting the trade-off table")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "f1_scaled", "f2_scaled", "f3_scaled",
                         "f4_scaled", "support_size"])
        for i in indices:
            result = sweep.results[i]
            if result is None:
                continue
            lam = "[" + ", ".join(repr(v) for v in sweep.grid.points[i].values) + "]"
            writer.writerow([lam]
                            + [repr(float(v)) for v in sweep.scaled_values[i]]
                            + [str(len(result.support))])
