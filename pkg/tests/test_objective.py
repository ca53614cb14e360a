import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import random_lambda, random_model, random_returns
from mvsk import (DimensionError, DomainError, LambdaPoint, MomentModel,
                  ReturnsMatrix, ScalarizedObjective, build_moment_model,
                  convexity_weight, eval_objectives, eval_scalarized,
                  gradient, hessian)


def unit_variance_model(n=3):
    return MomentModel.from_tensors(
        mean=np.zeros(n), covariance=np.eye(n),
        coskewness=np.zeros((n, n, n)), cokurtosis=np.zeros((n, n, n, n)), m=10)


def single_asset_model():
    return build_moment_model(ReturnsMatrix(values=[[1.0, 3.0]], asset_labels=("x",)))


def finite_diff_gradient(model, lam, w, h=1e-5):
    g = np.zeros_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        g[i] = (eval_scalarized(model, lam, w + e) - eval_scalarized(model, lam, w - e)) / (2 * h)
    return g


def finite_diff_hessian(model, lam, w, h=1e-4):
    H = np.zeros((w.size, w.size))
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        H[:, i] = (gradient(model, lam, w + e) - gradient(model, lam, w - e)) / (2 * h)
    return H


def test_eval_objectives_examples():
    model = unit_variance_model()
    e1 = np.array([1.0, 0.0, 0.0])
    vals = eval_objectives(model, e1)
    assert vals.as_array().tolist() == [0.0, 1.0, 0.0, 0.0]

    vals = eval_objectives(single_asset_model(), np.array([1.0]))
    assert vals.as_array().tolist() == [2.0, 2.0, 0.0, 1.0]


def test_eval_objectives_zero_portfolio():
    rng = np.random.default_rng(3)
    model = random_model(rng)
    vals = eval_objectives(model, np.zeros(model.n))
    assert vals.as_array().tolist() == [0.0, 0.0, 0.0, 0.0]


def test_eval_scalarized_examples():
    rng = np.random.default_rng(4)
    model = random_model(rng, n=3)
    w = rng.dirichlet(np.ones(3))
    assert_allclose(eval_scalarized(model, [1, 0, 0, 0], w), -model.mean @ w, rtol=1e-12)

    assert eval_scalarized(unit_variance_model(), [0, 1, 0, 0], np.array([1.0, 0, 0])) == 1.0

    val = eval_scalarized(single_asset_model(), [0.25] * 4, np.array([1.0]))
    assert_allclose(val, 0.25, rtol=1e-12)


def test_gradient_examples():
    model = unit_variance_model(2)
    g = gradient(model, [0, 1, 0, 0], np.array([0.3, 0.7]))
    assert_allclose(g, [0.6, 1.4], rtol=1e-12)

    rng = np.random.default_rng(5)
    model = random_model(rng, n=4)
    for _ in range(3):
        w = rng.normal(0, 1, 4)
        assert_allclose(gradient(model, [1, 0, 0, 0], w), -model.mean, rtol=1e-12)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        model = random_model(rng)
        lam = random_lambda(rng)
        w = rng.normal(0, 1, model.n)
        g = gradient(model, lam, w)
        fd = finite_diff_gradient(model, lam, w)
        rel = np.abs(fd - g).max() / max(np.abs(g).max(), 1e-10)
        worst = max(worst, rel)
    assert worst <= 1e-5


def test_hessian_examples():
    rng = np.random.default_rng(7)
    model = random_model(rng, n=3)
    w = rng.normal(0, 1, 3)
    assert_allclose(hessian(model, [0, 1, 0, 0], w), 2 * model.covariance, rtol=1e-12)
    assert_allclose(hessian(model, [1, 0, 0, 0], w), np.zeros((3, 3)), atol=1e-15)


def test_hessian_matches_finite_differences_and_symmetry():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(40):
        model = random_model(rng)
        lam = random_lambda(rng)
        w = rng.normal(0, 1, model.n)
        H = hessian(model, lam, w)
        assert np.abs(H - H.T).max() <= 1e-10
        fd = finite_diff_hessian(model, lam, w)
        rel = np.abs(fd - H).max() / max(np.abs(H).max(), 1e-10)
        worst = max(worst, rel)
    assert worst <= 1e-4


def test_convexity_weight_examples():
    assert convexity_weight([0.5, 1, 0, 0], 7.3) == 1.0
    assert convexity_weight([0.0, 0, 1, 0], 1.0) == -3.0
    third = [0.0, 1 / 3, 1 / 3, 1 / 3]
    assert_allclose(convexity_weight(third, 0.5), 1 / 3, rtol=1e-12)
    ys = np.array([0.0, 1.0])
    assert_allclose(convexity_weight([0, 1, 1, 1], ys), [1.0, 4.0])


def test_scalarized_linear_in_weights():
    rng = np.random.default_rng(9)
    for _ in range(20):
        model = random_model(rng)
        lam = random_lambda(rng)
        w = rng.normal(0, 1, model.n)
        c = float(rng.uniform(0.1, 10))
        assert_allclose(eval_scalarized(model, c * lam, w),
                        c * eval_scalarized(model, lam, w), rtol=1e-12)


def test_hessian_psd_without_third_moment_weight():
    rng = np.random.default_rng(10)
    model = random_model(rng, n=5)
    for _ in range(50):
        lam = random_lambda(rng)
        lam[2] = 0.0
        w = rng.dirichlet(np.ones(5))
        H = hessian(model, lam, w)
        assert np.linalg.eigvalsh(H).min() >= -1e-9 * max(np.abs(H).max(), 1e-12)


def test_sample_engine_matches_tensor_engine():
    rng = np.random.default_rng(12)
    model = random_model(rng, n=5, m=40, scale=0.5)
    assert model.centered is not None
    for _ in range(30):
        lam = random_lambda(rng)
        obj = ScalarizedObjective(model, lam)
        w = rng.normal(0, 1, 5)
        fast_v, fast_g = obj.value_and_grad(w)
        slow_v, slow_g = obj._value_and_grad_tensors(w)
        assert_allclose(fast_v, slow_v, rtol=1e-11, atol=1e-14)
        assert_allclose(fast_g, slow_g, rtol=1e-11, atol=1e-13)
        assert_allclose(obj.value(w), obj.tensor_value(w), rtol=1e-11, atol=1e-14)


def test_hessian_identity_with_uniform_divisor():
    # with every moment divided by m (biased variance), the Hessian equals
    # (2/m) * sum_p q(y_p) T_p T_p' with q the convexity weight
    rng = np.random.default_rng(13)
    T = rng.normal(0, 1, (4, 30))
    T -= T.mean(axis=1, keepdims=True)
    m = 30
    n = 4
    Z = (T[:, None, :] * T[None, :, :]).reshape(n * n, m)
    model = MomentModel.from_tensors(
        mean=np.zeros(n), covariance=T @ T.T / m,
        coskewness=(Z @ T.T / m), cokurtosis=(Z @ Z.T / m), m=m)
    lam = random_lambda(rng)
    w = rng.normal(0, 1, n)
    H = hessian(model, lam, w)
    y = T.T @ w
    weights = 2.0 * convexity_weight(lam, y)
    H_data = (T * weights) @ T.T / m
    assert_allclose(H, H_data, rtol=1e-10, atol=1e-12)


def test_lambda_point_validation():
    p = LambdaPoint(values=(0.1, 0.2, 0.3, 0.4))
    assert p.strictly_positive()
    assert_allclose(p.as_array(), [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(DomainError):
        LambdaPoint(values=(0.5, 0.5, 0.5, 0.5))
    with pytest.raises(DomainError):
        LambdaPoint(values=(-0.1, 0.4, 0.4, 0.3))
    norm = LambdaPoint.normalized([1, 1, 1, 1])
    assert_allclose(norm.as_array(), [0.25] * 4)


def test_dimension_mismatch():
    model = unit_variance_model(3)
    with pytest.raises(DimensionError):
        eval_objectives(model, np.zeros(4))
    with pytest.raises(DimensionError):
        gradient(model, [1, 0, 0, 0], np.zeros(2))
