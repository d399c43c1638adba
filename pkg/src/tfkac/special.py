"""Special functions with complex arguments in the closed right half-plane.

Used for the Example 3 source, where the Laplace variable reaches
``|p| ~ 10**3`` and plain Gauss quadrature of the oscillatory Caputo
integrand is hopeless.  Three regimes, chosen per element:

* ``|z| <= 6``: power series (cancellation bounded by ``e**6``);
* ``6 < |z| <= 40``: Lentz continued fraction for the upper function;
* ``|z| > 40``: asymptotic series for the upper function.
"""
from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit

SERIES_RADIUS = 6.0
ASYMPTOTIC_RADIUS = 40.0
_EPS2 = 1e-34


@njit(cache=True)
def _abs2(z):
    return z.real * z.real + z.imag * z.imag


@njit(cache=True)
def _cpow(z, a):
    return cmath.exp(a * cmath.log(z))


@njit(cache=True)
def _upper_reduced(a, z):
    """``Gamma(a, z) exp(z) z**(1 - a)`` for ``|z| > 6``, ``Re z >= 0``."""
    if _abs2(z) > ASYMPTOTIC_RADIUS**2:
        iz = 1.0 / z
        term = 1.0 + 0.0j
        s = term
        for k in range(1, 60):
            term = term * (a - k) * iz
            s += term
            if _abs2(term) < _EPS2 * _abs2(s):
                break
        return s
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny + 0.0j
    d = 1.0 / b
    f = d
    for i in range(1, 500):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        if d == 0:
            d = tiny
        c = b + an / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = d * c
        f *= delta
        if _abs2(delta - 1.0) < 1e-32:
            break
    return f * z


@njit(cache=True)
def _lower_gamma_scalar(a, z):
    if _abs2(z) <= SERIES_RADIUS**2:
        c = 1.0 + 0.0j
        s = c / a
        for k in range(1, 200):
            c = c * (-z / k)
            t = c / (a + k)
            s += t
            if _abs2(t) < _EPS2 * _abs2(s):
                break
        return _cpow(z, a) * s
    return math.gamma(a) - cmath.exp(-z) * _cpow(z, a - 1.0) * _upper_reduced(a, z)


@njit(cache=True)
def _psi_scalar(gamma, z):
    a = 1.0 - gamma
    if _abs2(z) <= SERIES_RADIUS**2:
        c = 1.0 + 0.0j
        s1 = c / a
        s2 = c / (a + 1.0)
        s3 = c / (a + 2.0)
        mz = -z
        for k in range(1, 200):
            c = c * mz * (1.0 / k)
            t1 = c * (1.0 / (a + k))
            s1 += t1
            s2 += c * (1.0 / (a + k + 1.0))
            s3 += c * (1.0 / (a + k + 2.0))
            if _abs2(t1) < _EPS2 * _abs2(s1):
                break
        # Beta integrals B(k+a, 2), B(k+a, 3) as partial fractions
        return 2.0 * (s1 - s2) + z * (s1 - 2.0 * s2 + s3)
    e = cmath.exp(-z)
    # z**-a * lower_gamma(a, z), with one complex power instead of two
    k1 = math.gamma(a) * _cpow(z, -a) - e * _upper_reduced(a, z) / z
    k2 = (a * k1 - e) / z
    k3 = ((a + 1.0) * k2 - e) / z
    return (2.0 + z) * k1 - (2.0 + 2.0 * z) * k2 + z * k3


@njit(cache=True)
def _lower_gamma_array(a, z, out):
    for i in range(z.size):
        out[i] = _lower_gamma_scalar(a, z[i])


@njit(cache=True)
def _psi_array(gamma, z, out):
    for i in range(z.size):
        out[i] = _psi_scalar(gamma, z[i])


def lower_gamma(a: float, z) -> np.ndarray:
    """Lower incomplete gamma ``int_0^z s**(a-1) e**(-s) ds`` (principal branch).

    Valid for real ``a > 0`` and complex ``z`` with ``Re z >= 0``.
    """
    z = np.asarray(z, dtype=complex)
    flat = np.ascontiguousarray(z).ravel()
    out = np.empty_like(flat)
    _lower_gamma_array(float(a), flat, out)
    return out.reshape(z.shape)


def exp_weighted_caputo_t2(gamma: float, beta, t) -> np.ndarray:
    """``exp(-beta t) * CaputoD_t^gamma [t**2 exp(beta t)]`` for ``Re beta >= 0``.

    Scaling ``s = t sigma`` gives ``t**(2-gamma) psi(beta t)`` with
    ``psi(z) = int_0^1 sigma**(-gamma) [2(1-sigma) + z(1-sigma)**2]
    exp(-z sigma) dsigma / Gamma(1-gamma)``.  For ``|z| > 6`` the three
    moments follow from ``lower_gamma`` and integration by parts.
    """
    beta, t = np.broadcast_arrays(np.asarray(beta, dtype=complex),
                                  np.asarray(t, dtype=float))
    z = np.ascontiguousarray(beta * t).ravel()
    psi = np.empty_like(z)
    _psi_array(float(gamma), z, psi)
    return t ** (2.0 - gamma) * psi.reshape(t.shape) / math.gamma(1.0 - gamma)
