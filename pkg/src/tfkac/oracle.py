"""Slow, independent reference implementations for testing.

Nothing here imports the solver modules; inputs are plain arrays and
callables so each oracle can check the fast path it mirrors.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import HistoryTooShort, SingularMatrix, ToleranceNotMet


def _kahan(values):
    total = 0j
    comp = 0j
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def dense_history_oracle(coeff_d, rates, tau: float, history, n: int,
                         gamma: float) -> np.ndarray:
    """``(1/tau**gamma) sum_{k=0}^n d_k exp(-r_m k tau) G^{n-k}_m``, node by node.

    ``rates`` holds ``p U(x0_m)`` per node.  Each exponential is evaluated
    directly and each sum is compensated.
    """
    levels = np.asarray(history)
    if n >= levels.shape[0]:
        raise HistoryTooShort(f"level {n} requested, history holds {levels.shape[0]}")
    rates = np.asarray(rates, dtype=complex)
    out = np.empty(levels.shape[1], dtype=complex)
    for m in range(levels.shape[1]):
        out[m] = _kahan(float(coeff_d[k]) * complex(np.exp(-rates[m] * k * tau))
                        * complex(levels[n - k, m]) for k in range(n + 1))
    return out / tau**gamma


def adaptive_rl_oracle(gamma: float, v, t: float, tol: float = 1e-13) -> complex:
    """``I_t^{1-gamma} v`` by adaptive quadrature after ``u = (t - xi)**(1-gamma)``.

    The substitution turns the weakly singular kernel into
    ``(1/(1-gamma)) int_0^{t**(1-gamma)} v(t - u**(1/(1-gamma))) du``.
    """
    if t == 0:
        return 0.0
    beta = 1.0 - gamma
    upper = t**beta

    def part(fn):
        # a missed tolerance is reported below as ToleranceNotMet
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(fn, 0.0, upper, epsabs=tol, epsrel=tol, limit=500)
        if err > max(tol, tol * abs(val)) * 10:
            raise ToleranceNotMet(f"error estimate {err:.3g} exceeds tol {tol:.3g}")
        return val

    g = lambda u: v(t - u ** (1.0 / beta))
    re = part(lambda u: np.real(g(u)))
    im = part(lambda u: np.imag(g(u)))
    return (re + 1j * im) / (beta * math.gamma(beta))


def dense_solve_oracle(matrix, rhs) -> np.ndarray:
    """Gaussian elimination with partial pivoting on a dense square matrix."""
    a = np.array(matrix, dtype=complex)
    b = np.array(rhs, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError("need a square matrix and a matching right-hand side")
    scale = np.max(np.abs(a)) if a.size else 0.0
    for j in range(n):
        piv = j + int(np.argmax(np.abs(a[j:, j])))
        if abs(a[piv, j]) <= 1e-14 * scale:
            raise SingularMatrix(f"no usable pivot in column {j}")
        if piv != j:
            a[[j, piv]] = a[[piv, j]]
            b[[j, piv]] = b[[piv, j]]
        f = a[j + 1:, j] / a[j, j]
        a[j + 1:, j:] -= f[:, None] * a[j, j:]
        b[j + 1:] -= f * b[j]
    x = np.empty(n, dtype=complex)
    for j in range(n - 1, -1, -1):
        x[j] = (b[j] - a[j, j + 1:] @ x[j + 1:]) / a[j, j]
    return x


def binomial_series_oracle(order: float, n: int) -> np.ndarray:
    """Coefficients of ``(1 - z)**order`` in exact rational arithmetic.

    ``c_k = (-1)**k prod_{j=1}^k (order - j + 1)/j``; ``order`` is taken as
    the exact binary value of the float.
    """
    q = Fraction(order)
    c = Fraction(1)
    out = [1.0]
    for k in range(1, n + 1):
        c = -c * (q - k + 1) / k
        out.append(float(c))
    return np.array(out)
