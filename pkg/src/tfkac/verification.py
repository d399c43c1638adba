"""Oracle-equivalence suite behind ``tfkac verify``.

Each check compares a fast routine with its slow counterpart from
:mod:`tfkac.oracle` (or with a closed form) and reports the worst
discrepancy against a fixed tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import oracle
from .coeffs import d_coeffs, grunwald, q_partial_sums
from .core import ModelParams, build_space_grid
from .fdm import TridiagonalOperator, assemble_fdm_system, tridiag_solve
from .history import HistoryConvolver, HistoryWeights, substantial_history_sum
from .laplace import InversionConfig, euler_invert
from .quadrature import gauss_jacobi, gauss_legendre, rl_integral
from .special import exp_weighted_caputo_t2


@dataclass
class CheckResult:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tol)

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.error:.3e} (tol {self.tol:.0e})"


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def check_grunwald():
    err = max(_rel(grunwald(g, 300), oracle.binomial_series_oracle(g, 300))
              for g in (0.1, 0.3, 0.5, 0.8, 0.95))
    return CheckResult("grunwald weights vs exact binomial series", err, 1e-13)


def check_partial_sums():
    err = max(_rel(q_partial_sums(g, 300), oracle.binomial_series_oracle(g - 1.0, 300))
              for g in (0.3, 0.5, 0.8))
    return CheckResult("partial sums vs binomial series of order gamma-1", err, 1e-12)


def check_history_sum():
    rng = np.random.default_rng(7)
    worst = 0.0
    for gamma, lam, p in ((0.3, 3.0, 1 + 1j), (0.8, 0.0, 10j), (0.5, 1.0, 5.0)):
        n_count, size, tau = 60, 9, 1.0 / 64
        d = d_coeffs(gamma, lam, tau, n_count)
        rates = p * np.linspace(0.1, 0.9, size)
        hist = rng.standard_normal((n_count + 1, size)) + 1j * rng.standard_normal((n_count + 1, size))
        w = HistoryWeights(rates, tau, n_count)
        conv = HistoryConvolver(d, rates, tau, n_count, block=8)
        for n in range(n_count + 1):
            ref = oracle.dense_history_oracle(d, rates, tau, hist, n, gamma)
            worst = max(worst, _rel(substantial_history_sum(d, w, hist, n, gamma), ref))
            if n:
                fast = (conv.lagged_sum() + d[0] * hist[n]) / tau**gamma
                worst = max(worst, _rel(fast, ref))
            conv.push(hist[n])
    return CheckResult("history sums (direct and blocked) vs dense oracle", worst, 1e-13)


def check_tridiagonal():
    rng = np.random.default_rng(11)
    worst = 0.0
    for size in (1, 2, 7, 63, 200):
        sub, sup = rng.standard_normal(size - 1), rng.standard_normal(size - 1)
        diag = 4.0 + rng.standard_normal(size)
        op = TridiagonalOperator(sub, diag, sup)
        rhs = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        worst = max(worst, _rel(tridiag_solve(op, rhs), oracle.dense_solve_oracle(op.to_dense(), rhs)))
    params = ModelParams(0.5, 3.0, 1.0, 10j)
    op = assemble_fdm_system(params, build_space_grid(0.0, 1.0, 128), 1.0 / 256, 0.9)
    rhs = np.exp(1j * np.arange(op.size))
    worst = max(worst, _rel(tridiag_solve(op, rhs), oracle.dense_solve_oracle(op.to_dense(), rhs)))
    return CheckResult("tridiagonal solve vs dense elimination", worst, 1e-12)


def check_rl_integral():
    worst = 0.0
    for gamma, v, t in ((0.5, lambda s: np.exp(3.0 * s), 0.5),
                        (0.3, lambda s: np.cos(2.0 * s) + 1j * s**2, 1.0),
                        (0.8, lambda s: np.exp((1 + 4j) * s), 0.7)):
        fast = rl_integral(gamma, v, t, gauss_jacobi(gamma))
        worst = max(worst, _rel(fast, oracle.adaptive_rl_oracle(gamma, v, t)))
    return CheckResult("Gauss-Jacobi fractional integral vs adaptive quadrature", worst, 1e-12)


def check_caputo_closed_form():
    # exp(-b t) D^gamma[t^2 exp(b t)] = exp(-b t) I^{1-gamma}[(2s + b s^2) exp(b s)]
    worst = 0.0
    for gamma in (0.3, 0.6, 0.9):
        for beta in (0.0, 2.5, 7.0 + 3.0j, 40j, 150.0):
            t = 0.5
            v = lambda s, b=beta: (2.0 * s + b * s * s) * np.exp(b * (s - t))
            ref = oracle.adaptive_rl_oracle(gamma, v, t, tol=1e-13)
            worst = max(worst, _rel(exp_weighted_caputo_t2(gamma, beta, t), ref))
    return CheckResult("closed-form weighted Caputo derivative vs adaptive quadrature", worst, 1e-10)


def check_gauss_legendre():
    worst = 0.0
    for order in (1, 2, 4, 8):
        rule = gauss_legendre(order)
        for deg in range(2 * order):
            exact = (1.0 - (-1.0) ** (deg + 1)) / (deg + 1)
            worst = max(worst, abs(rule.integrate(lambda x: x**deg) - exact))
    return CheckResult("Gauss-Legendre exactness to degree 2K-1", worst, 1e-13)


def check_laplace_pair():
    cfg = InversionConfig(lambda p: 1.0 / (p + 2.0))
    amounts = np.linspace(0.1, 2.0, 20)
    err = max(abs(euler_invert(a, cfg) - math.exp(-2.0 * a)) for a in amounts)
    return CheckResult("Euler inversion of 1/(p+2) on [0.1, 2]", err, 1e-6)


CHECKS: List[Callable[[], CheckResult]] = [
    check_grunwald, check_partial_sums, check_history_sum, check_tridiagonal,
    check_rl_integral, check_caputo_closed_form, check_gauss_legendre, check_laplace_pair,
]


def run_all() -> List[CheckResult]:
    return [check() for check in CHECKS]
