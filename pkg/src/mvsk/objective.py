"""The four portfolio objectives and their weighted scalarization.

For weights lam = (l1, l2, l3, l4), the scalarized objective is

    F(w) = -l1 * f1(w) + l2 * f2(w) - l3 * f3(w) + l4 * f4(w)

with f1 the mean return, f2 the variance, f3 the third moment and f4 the
fourth moment of the portfolio return. The sign convention turns the
maximize/minimize pattern (max f1, min f2, max f3, min f4) into a single
minimization. All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .moments import MomentModel


@dataclass(frozen=True)
class LambdaPoint:
    """A scalarization weight vector in the 4-simplex."""

    values: tuple[float, float, float, float]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != 4:
            raise DomainError(f"need 4 scalarization weights, got {len(vals)}")
        if min(vals) < 0:
            raise DomainError(f"scalarization weights must be nonnegative: {vals}")
        if abs(sum(vals) - 1.0) > 1e-12:
            raise DomainError(f"scalarization weights must sum to 1, got {sum(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def normalized(cls, values) -> "LambdaPoint":
        arr = np.asarray(values, dtype=float)
        total = arr.sum()
        if total <= 0:
            raise DomainError("cannot normalize nonpositive weight vector")
        return cls(values=tuple(arr / total))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def strictly_positive(self) -> bool:
        return min(self.values) > 0


def lambda_array(lam) -> np.ndarray:
    """Coerce a LambdaPoint or any length-4 array-like to a float array.

    Raw arrays are accepted un-normalized: the scalarization is linear in
    the weights, so callers may scale freely.
    """
    if isinstance(lam, LambdaPoint):
        return lam.as_array()
    arr = np.asarray(lam, dtype=float)
    if arr.shape != (4,):
        raise DomainError(f"need 4 scalarization weights, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ObjectiveValues:
    """Values of the four objectives at one portfolio."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def as_array(self) -> np.ndarray:
        return np.array([self.mean, self.variance, self.skewness, self.kurtosis])


def _check_weights(model: MomentModel, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (model.n,):
        raise DimensionError(f"weight vector has shape {w.shape}, model has n={model.n}")
    return w


class ScalarizedObjective:
    """Fast evaluator for F, its gradient and Hessian at a fixed lam.

    Two interchangeable engines compute the same sums. When the model
    retains its centralized return rows, value and gradient reduce to
    per-sample powers of the portfolio return y_p = <T_col_p, w> at
    O(n*m) cost; otherwise the stored tensors are contracted at O(n^4).
    This is the solver's inner-loop workhorse.
    """

    def __init__(self, model: MomentModel, lam):
        l1, l2, l3, l4 = (float(v) for v in lambda_array(lam))
        self.model = model
        self.lam = (l1, l2, l3, l4)
        if model.centered is not None:
            m = model.m
            self._samples = model.centered                       # (n, m)
            self._samples_t = np.ascontiguousarray(model.centered.T)  # (m, n)
            # per-sample polynomial coefficients, divisors m-1 / m / m baked in
            self._c2 = l2 / (m - 1)
            self._c3 = l3 / m
            self._c4 = l4 / m
            self.value = self._value_samples
            self.value_and_grad = self._value_and_grad_samples
        else:
            self.value = self._value_tensors
            self.value_and_grad = self._value_and_grad_tensors

    def _value_samples(self, w: np.ndarray) -> float:
        l1 = self.lam[0]
        y = self._samples_t @ w
        y2 = y * y
        return float(self._c2 * (y @ y) - l1 * (self.model.mean @ w)
                     - self._c3 * (y2 @ y) + self._c4 * (y2 @ y2))

    def _value_and_grad_samples(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        l1 = self.lam[0]
        mean = self.model.mean
        y = self._samples_t @ w
        y2 = y * y
        y3 = y2 * y
        val = self._c2 * (y @ y) - l1 * (mean @ w) - self._c3 * (y2 @ y) \
            + self._c4 * (y2 @ y2)
        poly = (2.0 * self._c2) * y
        poly -= (3.0 * self._c3) * y2
        poly += (4.0 * self._c4) * y3
        grad = self._samples @ poly
        grad -= l1 * mean
        return float(val), grad

    def _value_tensors(self, w: np.ndarray) -> float:
        l1, l2, l3, l4 = self.lam
        model = self.model
        val = l2 * (w @ (model.covariance @ w)) - l1 * (model.mean @ w)
        if l3 != 0.0 or l4 != 0.0:
            ww = np.multiply.outer(w, w).ravel()
            if l3 != 0.0:
                val -= l3 * ((ww @ model.coskewness) @ w)
            if l4 != 0.0:
                val += l4 * ((model.cokurtosis @ ww) @ ww)
        return float(val)

    def _value_and_grad_tensors(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        l1, l2, l3, l4 = self.lam
        model = self.model
        vw = model.covariance @ w
        val = l2 * (w @ vw) - l1 * (model.mean @ w)
        grad = 2.0 * l2 * vw - l1 * model.mean
        if l3 != 0.0 or l4 != 0.0:
            n = model.n
            ww = np.multiply.outer(w, w).ravel()
            if l3 != 0.0:
                skew_contracted = ww @ model.coskewness
                val -= l3 * (skew_contracted @ w)
                grad -= 3.0 * l3 * skew_contracted
            if l4 != 0.0:
                kurt_contracted = model.cokurtosis @ ww
                val += l4 * (kurt_contracted @ ww)
                grad += 4.0 * l4 * (kurt_contracted.reshape(n, n) @ w)
        return float(val), grad

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return self.value_and_grad(w)[1]

    def tensor_value(self, w: np.ndarray) -> float:
        """The contract value of F at w, contracted from the stored tensors.

        Agrees with the sample-sum engine up to rounding; reported solve
        values use this form so that serialized models reproduce them.
        """
        return self._value_tensors(w)

    def tensor_gradient(self, w: np.ndarray) -> np.ndarray:
        return self._value_and_grad_tensors(w)[1]

    def hessian(self, w: np.ndarray) -> np.ndarray:
        l1, l2, l3, l4 = self.lam
        model = self.model
        n = model.n
        H = 2.0 * l2 * model.covariance
        if l3 != 0.0:
            H = H - 6.0 * l3 * (model.coskewness @ w).reshape(n, n)
        if l4 != 0.0:
            ww = np.multiply.outer(w, w).ravel()
            H = H + 12.0 * l4 * (model.cokurtosis @ ww).reshape(n, n)
        return 0.5 * (H + H.T)


def eval_objectives(model: MomentModel, w) -> ObjectiveValues:
    """Evaluate f1..f4 at w via the stored tensors."""
    w = _check_weights(model, w)
    ww = np.multiply.outer(w, w).ravel()
    return ObjectiveValues(
        mean=float(model.mean @ w),
        variance=float(w @ (model.covariance @ w)),
        skewness=float((ww @ model.coskewness) @ w),
        kurtosis=float((model.cokurtosis @ ww) @ ww),
    )


def eval_scalarized(model: MomentModel, lam, w) -> float:
    """F(w) = -l1*f1 + l2*f2 - l3*f3 + l4*f4, from the stored tensors."""
    w = _check_weights(model, w)
    return ScalarizedObjective(model, lam).tensor_value(w)


def gradient(model: MomentModel, lam, w) -> np.ndarray:
    """Analytic gradient of the scalarized objective.

    The cubic and quartic terms use the full symmetry of the moment
    tensors: grad f3 = 3 * (w (x) w) contracted with the third-moment
    tensor, grad f4 = 4 * the once-contracted fourth moment applied to w.
    """
    w = _check_weights(model, w)
    return ScalarizedObjective(model, lam).tensor_gradient(w)


def hessian(model: MomentModel, lam, w) -> np.ndarray:
    """Analytic Hessian 2*l2*V - 6*l3*(S . w) + 12*l4*(K . w(x)w), symmetrized."""
    w = _check_weights(model, w)
    return ScalarizedObjective(model, lam).hessian(w)


def convexity_weight(lam, y):
    """The quadratic weight 6*l4*y^2 - 3*l3*y + l2 from the Hessian decomposition.

    The Hessian of F equals the expectation of twice this weight (at the
    portfolio return y) times the return outer product, so nonnegativity
    of this quadratic over the attainable range of y certifies convexity.
    Vectorized over y.
    """
    _, l2, l3, l4 = lambda_array(lam)
    y = np.asarray(y, dtype=float)
    out = 6.0 * l4 * y * y - 3.0 * l3 * y + l2
    return float(out) if out.ndim == 0 else out
