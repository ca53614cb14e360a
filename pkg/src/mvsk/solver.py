"""Accelerated projected-gradient (FISTA) minimization of the scalarization.

Backtracking variant: the step is halved (by ``backtracking_factor``)
until the candidate satisfies the quadratic upper-model decrease test,
which sidesteps estimating a Lipschitz constant for a quartic on a
compact set. The method is not monotone, so the best iterate seen (by
objective value, including the start point) is returned rather than the
last one. By default the full iteration budget is spent; stationarity
stopping is opt-in to keep run profiles reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .moments import MomentModel
from .objective import ObjectiveValues, ScalarizedObjective, eval_objectives
from .projection import Domain

#: Entries with |w_i| above this count toward the support.
SUPPORT_EPSILON = 1e-8

_MAX_INVERSE_STEP = 1e18


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 2000
    backtracking_factor: float = 2.0
    initial_step: float = 1.0
    stationarity_tolerance: float = 1e-9
    stop_on_stationarity: bool = False
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if self.backtracking_factor <= 1.0:
            raise DomainError("backtracking_factor must exceed 1")
        if self.initial_step <= 0:
            raise DomainError("initial_step must be positive")
        if self.stationarity_tolerance < 0:
            raise DomainError("stationarity_tolerance must be nonnegative")


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one scalarized solve.

    ``w`` is feasible for the domain; ``scalarized_value`` equals the
    scalarized objective at ``w``; ``support`` lists the indices with
    |w_i| > SUPPORT_EPSILON. ``trace`` holds per-iteration objective
    values when recording was requested.
    """

    w: np.ndarray
    objectives: ObjectiveValues
    scalarized_value: float
    iterations_used: int
    projected_gradient_norm: float
    support: tuple[int, ...]
    trace: tuple[float, ...] | None = None


def support_of(w: np.ndarray, epsilon: float = SUPPORT_EPSILON) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.abs(np.asarray(w)) > epsilon))


def _stationarity(objective: ScalarizedObjective, domain: Domain,
                  w: np.ndarray, step: float) -> float:
    moved = domain.project(w - step * objective.gradient(w))
    return float(np.linalg.norm(w - moved)) / step


def solve(model: MomentModel, lam, domain: Domain,
          opts: SolverOptions | None = None,
          warm_start: np.ndarray | None = None) -> SolveResult:
    """Minimize the scalarized objective over the domain with FISTA.

    The warm start, if given, is projected onto the domain before use;
    otherwise the run starts from the domain's deterministic start point
    (barycenter for the simplex, origin for the cube). Raises
    NumericalError with the iteration index if the objective or gradient
    turns non-finite.
    """
    opts = opts or SolverOptions()
    objective = ScalarizedObjective(model, lam)
    project = domain.projector()
    value = objective.value
    value_and_grad = objective.value_and_grad
    n = model.n

    if warm_start is not None:
        x = project(np.asarray(warm_start, dtype=float))
    else:
        x = domain.start_point(n)
    fx = value(x)
    if not math.isfinite(fx):
        raise NumericalError("objective non-finite at the start point", iteration=0)

    best_f, best_w = fx, x
    trace: list[float] | None = [fx] if opts.record_trace else None
    inv_step = 1.0 / opts.initial_step
    y = x
    t = 1.0
    iterations = 0

    for k in range(1, opts.max_iterations + 1):
        fy, grad = value_and_grad(y)
        if not math.isfinite(fy + grad.sum()):  # any non-finite entry poisons the sum
            raise NumericalError("objective or gradient non-finite", iteration=k)
        # backtracking: grow 1/step until the quadratic upper model holds
        while True:
            z = project(y - grad / inv_step)
            d = z - y
            fz = value(z)
            bound = fy + grad @ d + 0.5 * inv_step * (d @ d)
            if fz <= bound + 1e-12 * max(1.0, abs(fy)) or inv_step >= _MAX_INVERSE_STEP:
                break
            inv_step *= opts.backtracking_factor
        if not math.isfinite(fz):
            raise NumericalError("objective non-finite after projection step", iteration=k)

        iterations = k
        x_prev = x
        x = z
        if fz < best_f:
            best_f, best_w = fz, x
        if trace is not None:
            trace.append(fz)

        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x + ((t - 1.0) / t_next) * (x - x_prev)
        t = t_next

        if opts.stop_on_stationarity:
            measure = _stationarity(objective, domain, x, 1.0 / inv_step)
            if measure <= opts.stationarity_tolerance:
                break

    final_measure = _stationarity(objective, domain, best_w, 1.0 / inv_step)
    return SolveResult(
        w=best_w,
        objectives=eval_objectives(model, best_w),
        scalarized_value=objective.tensor_value(best_w),
        iterations_used=iterations,
        projected_gradient_norm=final_measure,
        support=support_of(best_w),
        trace=tuple(trace) if trace is not None else None,
    )


def scalarized_reference(model: MomentModel, lam, domain: Domain,
                         budget: int = 20000) -> float:
    """High-accuracy optimal-value surrogate: a solve with a 10x budget.

    Meaningful when lam is classified convex on the domain, where the
    value is unique; used as the reference in optimality-gap checks.
    """
    opts = SolverOptions(max_iterations=budget)
    return solve(model, lam, domain, opts).scalarized_value
