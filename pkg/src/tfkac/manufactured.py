"""Manufactured test problems and the boundary/initial lifting.

A problem is posed in the equivalent form

    exp(-c t) D_t^gamma [exp(c t) G] - lam**gamma G = K G_xx + f,
    c(x) = lam + p U(x),

with Caputo ``D_t^gamma``, initial data ``phi`` and Dirichlet data
``psi_l``, ``psi_r``.  :func:`lift_boundary` subtracts a known function so
that the remainder ``W`` has homogeneous data and the zero-initial-data
schemes apply.

Derivations (``s(x) = sin x - x sin 1``, ``u(x) = x - x**3``):

* Example 1, ``G = (t**2 + 1) exp(-c t) s``.  Since ``exp(c t) G`` is
  ``(t**2 + 1) s``, the Caputo term is ``s * 2 t**(2-gamma)/Gamma(3-gamma)``
  and ``G_xx = (t**2+1) exp(-c t) [s'' - 2 p t s' + p**2 t**2 s]``.
* Example 2 has the natural right-hand side of the Feynman-Kac model,
  ``f = -lam**gamma exp(-p U t) + lam exp(-c t) I_t^{1-gamma}[exp(lam t)]``.
* Example 3, ``G = t**2 exp(-lam t) u / (p + 2)``.  Then
  ``exp(c t) G = t**2 exp(p x t) u/(p+2)`` and the Caputo term reduces to
  ``exp(-beta t) D^gamma[t**2 exp(beta t)]`` with ``beta = p x``, evaluated
  in closed form by :func:`tfkac.special.exp_weighted_caputo_t2`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .core import ModelParams, _linear_potential
from .errors import IncompatibleData
from .quadrature import QuadratureRule, gauss_jacobi, rl_integral
from .special import exp_weighted_caputo_t2

Field = Callable[[np.ndarray, float], np.ndarray]
Trace = Callable[[float], complex]


def _zero_field(x, t):
    return np.zeros(np.shape(x), dtype=complex)


def _zero_trace(t):
    return 0.0


def _zero_profile(x):
    return np.zeros(np.shape(x))


@dataclass(frozen=True)
class ManufacturedProblem:
    """A test problem with its data, optionally already lifted.

    Attributes
    ----------
    name : str
    params : ModelParams
    source : callable
        ``f(x, t)``, vectorised in ``x``.
    initial, initial_dx, initial_dxx : callable
        ``phi`` and its first two derivatives.
    boundary_left, boundary_right : callable
        ``psi_l(t)``, ``psi_r(t)``.
    boundary_left_dt, boundary_right_dt : callable
        Their time derivatives (needed by the lifting).
    exact, exact_dx : callable or None
        Exact solution and its ``x`` derivative when known.
    lifted : bool
        True for the homogeneous ``W`` problem.
    offset, offset_dx : callable
        ``G = W + offset``; zero for an unlifted problem.
    """

    name: str
    params: ModelParams
    source: Field
    initial: Callable = _zero_profile
    initial_dx: Callable = _zero_profile
    initial_dxx: Callable = _zero_profile
    boundary_left: Trace = _zero_trace
    boundary_right: Trace = _zero_trace
    boundary_left_dt: Trace = _zero_trace
    boundary_right_dt: Trace = _zero_trace
    exact: Optional[Field] = None
    exact_dx: Optional[Field] = None
    lifted: bool = False
    offset: Field = _zero_field
    offset_dx: Field = _zero_field

    def reconstruct(self, x, t, w):
        """Map a ``W`` value back to ``G``."""
        return np.asarray(w) + self.offset(x, t)


def lift_boundary(problem: ManufacturedProblem, params: Optional[ModelParams] = None,
                  dpotential=None, rule: Optional[QuadratureRule] = None,
                  atol: float = 1e-12) -> ManufacturedProblem:
    """Return the homogeneous problem for ``W = G - l``.

    The lift is
    ``l = [phi + xi_r chi_r(t) + xi_l chi_l(t)] exp(-c(x) t)`` with linear
    blends ``xi_r = (x - a)/(b - a)``, ``xi_l = 1 - xi_r`` and
    ``chi_r = psi_r exp(c(b) t) - phi(b)``, ``chi_l`` likewise.  The Caputo
    derivatives of ``chi`` come from their analytic time derivatives via
    Gauss-Jacobi quadrature.

    Parameters
    ----------
    dpotential : (callable, callable), optional
        ``U'`` and ``U''``; inferred for the default linear potential.
    """
    params = problem.params if params is None else params
    if problem.lifted:
        return problem
    a, b = params.a, params.b
    gamma, lam, p, kg = params.gamma, params.lam, params.p, params.k_gamma
    phi, dphi, ddphi = problem.initial, problem.initial_dx, problem.initial_dxx
    psi_l, psi_r = problem.boundary_left, problem.boundary_right
    phi_a, phi_b = complex(phi(np.array(a))), complex(phi(np.array(b)))
    if abs(phi_a - psi_l(0.0)) > atol or abs(phi_b - psi_r(0.0)) > atol:
        raise IncompatibleData(
            f"phi(a)={phi_a:g}, psi_l(0)={complex(psi_l(0.0)):g}; "
            f"phi(b)={phi_b:g}, psi_r(0)={complex(psi_r(0.0)):g}")
    if dpotential is None:
        if params.potential is not _linear_potential:
            raise ValueError("supply dpotential=(U', U'') for a non-default potential")
        dpotential = (lambda x: np.ones(np.shape(x)), lambda x: np.zeros(np.shape(x)))
    du, ddu = dpotential
    c_a = lam + p * float(params.potential_at(a))
    c_b = lam + p * float(params.potential_at(b))
    if rule is None:
        rule = gauss_jacobi(gamma)

    def chi(t):
        return (psi_l(t) * np.exp(c_a * t) - phi_a, psi_r(t) * np.exp(c_b * t) - phi_b)

    def blend(x):
        xi_r = (np.asarray(x, dtype=float) - a) / (b - a)
        return 1.0 - xi_r, xi_r

    def offset(x, t):
        xl, xr = blend(x)
        cl, cr = chi(t)
        return (phi(x) + xl * cl + xr * cr) * np.exp(-params.rate_at(x) * t - lam * t)

    def offset_dx(x, t):
        xl, xr = blend(x)
        cl, cr = chi(t)
        bx = phi(x) + xl * cl + xr * cr
        e = np.exp(-params.rate_at(x) * t - lam * t)
        return (dphi(x) + (cr - cl) / (b - a) - p * t * du(x) * bx) * e

    def caputo_chi(t):
        if t == 0:
            return 0.0, 0.0
        dl = lambda s: ((problem.boundary_left_dt(s) + c_a * psi_l(s)) * np.exp(c_a * s))
        dr = lambda s: ((problem.boundary_right_dt(s) + c_b * psi_r(s)) * np.exp(c_b * s))
        return rl_integral(gamma, dl, t, rule), rl_integral(gamma, dr, t, rule)

    def source(x, t):
        xl, xr = blend(x)
        cl, cr = chi(t)
        dl, dr = caputo_chi(t)
        e = np.exp(-params.rate_at(x) * t - lam * t)
        bx = phi(x) + xl * cl + xr * cr
        b_x = dphi(x) + (cr - cl) / (b - a)
        b_xx = ddphi(x)
        ex = -p * t * du(x)
        exx = (p * t * du(x)) ** 2 - p * t * ddu(x)
        lxx = (b_xx + 2.0 * b_x * ex + bx * exx) * e
        op_lift = (xl * dl + xr * dr) * e - lam**gamma * bx * e - kg * lxx
        return problem.source(x, t) - op_lift

    exact = exact_dx = None
    if problem.exact is not None:
        exact = lambda x, t: problem.exact(x, t) - offset(x, t)
    if problem.exact_dx is not None:
        exact_dx = lambda x, t: problem.exact_dx(x, t) - offset_dx(x, t)
    return replace(problem, name=problem.name + "/lifted", params=params, source=source,
                   initial=_zero_profile, initial_dx=_zero_profile,
                   initial_dxx=_zero_profile, boundary_left=_zero_trace,
                   boundary_right=_zero_trace, boundary_left_dt=_zero_trace,
                   boundary_right_dt=_zero_trace, exact=exact, exact_dx=exact_dx,
                   lifted=True, offset=offset, offset_dx=offset_dx)


def example1(params: ModelParams) -> ManufacturedProblem:
    """``G = (t**2 + 1) exp(-(lam + p x) t) (sin x - x sin 1)`` on (0, 1)."""
    gamma, lam, p, kg = params.gamma, params.lam, params.p, params.k_gamma
    sin1 = math.sin(1.0)
    c_cap = 2.0 / math.gamma(3.0 - gamma)

    def s(x):
        return np.sin(x) - x * sin1

    def ds(x):
        return np.cos(x) - sin1

    def ee(x, t):
        return np.exp(-(lam + p * np.asarray(x)) * t)

    def exact(x, t):
        return (t * t + 1.0) * ee(x, t) * s(x)

    def exact_dx(x, t):
        return (t * t + 1.0) * ee(x, t) * (ds(x) - p * t * s(x))

    def source(x, t):
        x = np.asarray(x, dtype=float)
        amp = t * t + 1.0
        g_xx = amp * (-np.sin(x) - 2.0 * p * t * ds(x) + (p * t) ** 2 * s(x))
        return ee(x, t) * (c_cap * t ** (2.0 - gamma) * s(x)
                           - lam**gamma * amp * s(x) - kg * g_xx)

    return ManufacturedProblem("example1", params, source, initial=s, initial_dx=ds,
                               initial_dxx=lambda x: -np.sin(x), exact=exact,
                               exact_dx=exact_dx)


def example2(params: ModelParams, rule: Optional[QuadratureRule] = None) -> ManufacturedProblem:
    """Natural right-hand side, ``phi = 0``, ``psi_l = t``, ``psi_r = exp(-t) - 1``.

    No exact solution is known.
    """
    gamma, lam, p = params.gamma, params.lam, params.p
    if rule is None:
        rule = gauss_jacobi(gamma)

    def source(x, t):
        x = np.asarray(x, dtype=float)
        rate = params.rate_at(x)
        base = -lam**gamma * np.exp(-rate * t)
        if lam == 0.0 or t == 0.0:
            return base
        integral = rl_integral(gamma, lambda s: np.exp(lam * s), t, rule)
        return base + lam * np.exp(-(lam + rate) * t) * integral

    return ManufacturedProblem(
        "example2", params, source,
        boundary_left=lambda t: t, boundary_left_dt=lambda t: 1.0,
        boundary_right=lambda t: np.exp(-t) - 1.0,
        boundary_right_dt=lambda t: -np.exp(-t))


def example3(params: ModelParams) -> ManufacturedProblem:
    """``G = t**2 exp(-lam t) (x - x**3) / (p + 2)``; homogeneous data."""
    gamma, lam, p, kg = params.gamma, params.lam, params.p, params.k_gamma
    lg = lam**gamma

    def exact(x, t):
        x = np.asarray(x, dtype=float)
        return t * t * math.exp(-lam * t) * (x - x**3) / (p + 2.0)

    def exact_dx(x, t):
        x = np.asarray(x, dtype=float)
        return t * t * math.exp(-lam * t) * (1.0 - 3.0 * x**2) / (p + 2.0)

    def source(x, t):
        x = np.asarray(x, dtype=float)
        u = (x - x**3) / (p + 2.0)
        el = math.exp(-lam * t)
        if t == 0.0:
            return np.zeros(x.shape, dtype=complex)
        cap = exp_weighted_caputo_t2(gamma, p * x, t)
        return el * (u * cap - lg * t * t * u + 6.0 * kg * x * t * t / (p + 2.0))

    return ManufacturedProblem("example3", params, source, exact=exact,
                               exact_dx=exact_dx, lifted=True)


def example3_pdf(x, t, amount, lam: float = 0.0):
    """Inverse transform of Example 3: ``t**2 exp(-lam t - 2A) (x - x**3)``."""
    x = np.asarray(x, dtype=float)
    return t * t * np.exp(-lam * t - 2.0 * np.asarray(amount)) * (x - x**3)


EXAMPLES = {1: example1, 2: example2, 3: example3}
