import math

import numpy as np
import pytest

from tfkac import (ModelParams, build_space_grid, build_time_grid, d_coeffs, example1, example2,
                   example3, example3_pdf, lift_boundary)
from tfkac.errors import IncompatibleData
from tfkac.history import HistoryWeights, substantial_history_sum
from tfkac.manufactured import ManufacturedProblem
from tfkac.oracle import adaptive_rl_oracle

X = np.linspace(0, 1, 11)


def test_trivial_lift_is_identity():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    src = lambda x, t: np.cos(x) * (1 + t) + 0j
    lifted = lift_boundary(ManufacturedProblem("plain", params, src))
    assert lifted.lifted
    for t in (0.0, 0.3, 1.0):
        np.testing.assert_allclose(lifted.source(X, t), src(X, t), atol=1e-15)
        np.testing.assert_allclose(lifted.offset(X, t), 0, atol=1e-15)
    assert lift_boundary(lifted) is lifted


def test_example1_offset():
    params = ModelParams(0.3, 3.0, 1.0, 1 + 1j)
    lifted = lift_boundary(example1(params))
    for t in (0.0, 0.4, 1.0):
        ref = (np.sin(X) - X * math.sin(1)) * np.exp(-(3.0 + (1 + 1j) * X) * t)
        np.testing.assert_allclose(lifted.offset(X, t), ref, atol=1e-15)


def _ex2_offset(x, t, lam, p):
    return (((np.exp(-t) - 1) * np.exp((lam + p) * t) * x + t * np.exp(lam * t) * (1 - x))
            * np.exp(-(lam + p * x) * t))


def test_example2_offset():
    params = ModelParams(0.5, 3.0, 1.0, 5j)
    lifted = lift_boundary(example2(params))
    for t in (0.0, 0.25, 0.5):
        np.testing.assert_allclose(lifted.offset(X, t), _ex2_offset(X, t, 3.0, 5j), atol=1e-14)


@pytest.mark.parametrize("make", [example1, example2])
def test_round_trip(make):
    params = ModelParams(0.5, 3.0, 1.0, 5j)
    prob = make(params)
    lifted = lift_boundary(prob)
    ends = np.array([0.0, 1.0])
    for t in np.linspace(0, 1, 9):
        g = lifted.reconstruct(ends, t, np.zeros(2))
        assert abs(g[0] - prob.boundary_left(t)) <= 1e-14
        assert abs(g[1] - prob.boundary_right(t)) <= 1e-14
    np.testing.assert_allclose(lifted.reconstruct(X, 0.0, 0 * X), prob.initial(X), atol=1e-14)
    # the W problem has homogeneous data
    assert np.all(lifted.initial(X) == 0)
    assert lifted.boundary_left(0.7) == 0 and lifted.boundary_right(0.7) == 0


def test_incompatible_data():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    prob = ManufacturedProblem("bad", params, lambda x, t: 0 * x, initial=lambda x: 1 + 0 * x)
    with pytest.raises(IncompatibleData):
        lift_boundary(prob)


def test_example1_exact():
    prob = example1(ModelParams(0.5, 3.0, 1.0, 5.0))
    np.testing.assert_allclose(prob.exact(X, 0.0), np.sin(X) - X * math.sin(1), atol=1e-16)
    for t in (0.0, 0.5, 1.0):
        assert np.all(np.abs(prob.exact(np.array([0.0, 1.0]), t)) <= 1e-16)


def _residual(params, n_count, m_count):
    # plug the exact W into the scheme; return the max residual at the final level
    prob = lift_boundary(example1(params))
    sg, tg = build_space_grid(0, 1, m_count), build_time_grid(1.0, n_count)
    x = sg.interior
    hist = np.array([prob.exact(x, t) for t in tg.levels])
    d = d_coeffs(params.gamma, params.lam, tg.tau, n_count)
    w = HistoryWeights.for_model(params, sg, tg.tau, n_count)
    full = np.concatenate([[0], hist[-1], [0]])
    lap = (full[2:] - 2 * full[1:-1] + full[:-2]) / sg.h**2
    res = (substantial_history_sum(d, w, hist, n_count, params.gamma) - params.k_gamma * lap
           - prob.source(x, 1.0))
    return np.max(np.abs(res))


def test_example1_residual_decays():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    r_tau = [_residual(params, n, 512) for n in (32, 64, 128)]
    assert r_tau[0] / r_tau[1] > 1.8 and r_tau[1] / r_tau[2] > 1.8
    # the steep exp(-p x) factor keeps h = 1/8 pre-asymptotic
    r_joint = [_residual(params, m * m, m) for m in (32, 64, 128)]
    assert r_joint[0] / r_joint[1] > 3.6 and r_joint[1] / r_joint[2] > 3.6


def test_example2_source_small_t():
    prob = example2(ModelParams(0.5, 3.0, 1.0, 5j))
    vals = np.array([prob.source(X, t) for t in np.logspace(-8, 0, 17)])
    assert np.all(np.isfinite(vals))
    at0 = prob.source(X, 0.0)
    assert np.all(np.isfinite(at0))
    np.testing.assert_allclose(prob.source(X, 1e-10), at0, atol=1e-4)


def test_example2_without_tempering():
    gamma, t = 0.3, 0.5
    prob = example2(ModelParams(gamma, 0.0, 1.0, 5j))
    # lam = 0: only the -lam**gamma term survives and 0**gamma = 0
    np.testing.assert_allclose(prob.source(X, t), 0, atol=1e-15)
    prob = example2(ModelParams(gamma, 1e-3, 1.0, 5j))
    integral = t ** (1 - gamma) / math.gamma(2 - gamma)
    approx = (prob.source(X, t) + 1e-3**gamma * np.exp(-5j * X * t)) / 1e-3
    np.testing.assert_allclose(approx, np.exp(-5j * X * t) * integral, rtol=1e-2)


def test_example2_lifted_source_against_oracle():
    gamma, lam, p, kg = 0.5, 3.0, 5j, 1.0
    x, t = 0.5, 0.25
    lifted = lift_boundary(example2(ModelParams(gamma, lam, kg, p)))
    c = lam + p * x
    alpha = lambda s: (np.exp(-s) - 1) * np.exp((lam + p) * s)
    beta = lambda s: s * np.exp(lam * s)
    dalpha = lambda s: -np.exp(-s) * np.exp((lam + p) * s) + (lam + p) * alpha(s)
    dbeta = lambda s: (1 + lam * s) * np.exp(lam * s)
    caputo = adaptive_rl_oracle(gamma, lambda s: x * dalpha(s) + (1 - x) * dbeta(s), t)
    e = np.exp(-c * t)
    bx = x * alpha(t) + (1 - x) * beta(t)
    lift = bx * e
    lift_xx = (-2 * p * t * (alpha(t) - beta(t)) + (p * t) ** 2 * bx) * e
    f = (-lam**gamma * np.exp(-p * x * t)
         + lam * e * adaptive_rl_oracle(gamma, lambda s: np.exp(lam * s), t))
    ref = f - (e * caputo - lam**gamma * lift - kg * lift_xx)
    got = complex(lifted.source(np.array(x), t))
    assert abs(got - ref) <= 1e-10 * abs(ref)


def test_example3():
    params = ModelParams(0.5, 3.0, 1.0, 5.0)
    prob = example3(params)
    for t in (0.1, 0.5):
        assert np.all(prob.exact(np.array([0.0, 1.0]), t) == 0)
    np.testing.assert_allclose(example3_pdf(0.5, 0.5, 0.0, 3.0), 0.25 * np.exp(-1.5) * 0.375)
    mags = [abs(example3(params.replace(p=p)).exact(0.5, 0.5)) for p in (1e2, 1e3, 1e4)]
    assert mags[0] / mags[1] == pytest.approx(10, rel=0.05)
    assert mags[1] / mags[2] == pytest.approx(10, rel=0.01)
