"""P1 finite elements in space with the same Grunwald-type time stepping.

The history term tests ``exp(-p U(x) k tau) G_h^{n-k}`` against each hat
function.  The weight is not polynomial, so it is integrated per element
with Gauss-Legendre points; the marcher keeps the solution's values at
those points and convolves them with :class:`HistoryConvolver`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .coeffs import CoefficientTable
from .core import ModelParams, SolutionHistory, SpaceGrid, TimeGrid, validate_model
from .errors import RuleMismatch
from .fdm import TridiagonalOperator, VARIANTS, tridiag_solve
from .history import HistoryConvolver
from .quadrature import QuadratureRule, gauss_legendre

DEFAULT_QUAD_ORDER = 4


@dataclass(frozen=True)
class FemMatrices:
    """Tridiagonal P1 mass and stiffness plus the factorised step matrix."""

    mass: TridiagonalOperator
    stiffness: TridiagonalOperator
    system: TridiagonalOperator


class FemSolution(SolutionHistory):
    """Nodal P1 coefficients per level; boundary coefficients are zero."""

    @property
    def coefficients(self) -> np.ndarray:
        return self.snapshots


def _tridiag(m, diag, off):
    return TridiagonalOperator(np.full(m - 1, off), np.full(m, diag), np.full(m - 1, off))


def assemble_fem(grid: SpaceGrid, params: ModelParams, tau: float, d0: float) -> FemMatrices:
    m, h = grid.n_interior, grid.h
    mass = _tridiag(m, 4.0 * h / 6.0, h / 6.0)
    stiff = _tridiag(m, 2.0 / h, -1.0 / h)
    a0 = d0 / tau**params.gamma
    kg = params.k_gamma
    system = _tridiag(m, a0 * 4.0 * h / 6.0 + kg * 2.0 / h, a0 * h / 6.0 - kg / h)
    return FemMatrices(mass, stiff, system)


class ElementQuadrature:
    """Gauss-Legendre points on every element and the P1 basis there."""

    def __init__(self, grid: SpaceGrid, rule: QuadratureRule):
        if rule.kind != "legendre":
            raise RuleMismatch(f"need a Gauss-Legendre rule, got {rule.kind}")
        self.grid = grid
        self.rule = rule
        xi = rule.nodes
        self.points = grid.nodes[:-1, None] + grid.h * (1.0 + xi[None, :]) / 2.0
        self.left = (1.0 - xi) / 2.0   # hat of the element's left node
        self.right = (1.0 + xi) / 2.0
        self.jw = rule.weights * grid.h / 2.0

    def values(self, coeffs) -> np.ndarray:
        """P1 function values at the points, shape ``(M, K)``."""
        full = np.concatenate([[0.0], np.asarray(coeffs), [0.0]])
        return full[:-1, None] * self.left + full[1:, None] * self.right

    def test(self, values) -> np.ndarray:
        """``(v, phi_m)`` for interior ``m`` given ``v`` at the points."""
        vw = np.asarray(values) * self.jw
        return (vw * self.right).sum(axis=1)[:-1] + (vw * self.left).sum(axis=1)[1:]


def weighted_mass_apply(k: int, coeffs, params: ModelParams, grid: SpaceGrid, tau: float,
                        rule: QuadratureRule) -> np.ndarray:
    """``(exp(-p U k tau) v_h, phi_m)`` for every interior hat ``phi_m``."""
    eq = ElementQuadrature(grid, rule)
    w = np.exp(-params.rate_at(eq.points) * (k * tau))
    return eq.test(w * eq.values(coeffs))


def fem_load(fn: Callable, grid: SpaceGrid, rule: QuadratureRule, t: float = 0.0) -> np.ndarray:
    """``(f(., t), phi_m)`` for every interior hat ``phi_m``."""
    eq = ElementQuadrature(grid, rule)
    return eq.test(fn(eq.points, t))


def march_fem(params: ModelParams, sgrid: SpaceGrid, tgrid: TimeGrid, source: Callable,
              variant: str = "zero_ic", initial=None, ic_testing: str = "interpolant",
              rule: Optional[QuadratureRule] = None,
              table: Optional[CoefficientTable] = None, block: int = 64) -> FemSolution:
    """March the P1 scheme.

    Parameters
    ----------
    source : callable
        ``f(x, t)``, called on the ``(M, K)`` array of element points.
    variant : {"zero_ic", "general_ic"}
        ``zero_ic`` starts from ``G_h^0 = 0``.  ``general_ic`` starts from
        the nodal interpolant of ``initial`` and adds the initial-data
        correction to the load.
    initial : callable or array_like, optional
        ``phi`` for ``general_ic``; a callable or interior nodal values.
    ic_testing : {"interpolant", "exact"}
        How ``phi`` enters the correction's inner products: through its
        P1 interpolant, or pointwise at the quadrature points (callable
        ``initial`` only).
    rule : QuadratureRule, optional
        Element rule, Gauss-Legendre with 4 points by default.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if ic_testing not in ("interpolant", "exact"):
        raise ValueError(f"ic_testing must be 'interpolant' or 'exact', got {ic_testing!r}")
    validate_model(params, sgrid)
    rule = gauss_legendre(DEFAULT_QUAD_ORDER) if rule is None else rule
    eq = ElementQuadrature(sgrid, rule)
    n_count, tau = tgrid.n_count, tgrid.tau
    if table is None:
        table = CoefficientTable(params.gamma, params.lam, tau, n_count)
    mats = assemble_fem(sgrid, params, tau, table.d[0])
    rates = params.rate_at(eq.points)
    scale = tau**-params.gamma

    coeffs = np.zeros((n_count + 1, sgrid.n_interior), dtype=complex)
    phi_q = None
    if variant == "general_ic":
        if initial is None:
            raise ValueError("general_ic needs initial data")
        if callable(initial):
            coeffs[0] = initial(sgrid.interior)
        else:
            coeffs[0] = np.asarray(initial)
        if ic_testing == "exact":
            if not callable(initial):
                raise ValueError("ic_testing='exact' needs a callable initial")
            phi_q = initial(eq.points)
        else:
            phi_q = eq.values(coeffs[0])

    conv = HistoryConvolver(table.d, rates, tau, n_count, block=block)
    conv.push(eq.values(coeffs[0]))
    q = table.q_partial
    for n in range(1, n_count + 1):
        t = tgrid.levels[n]
        vals = np.asarray(source(eq.points, t), dtype=complex)
        vals = vals - scale * conv.lagged_sum().reshape(eq.points.shape)
        if phi_q is not None:
            vals = vals + scale * q[n] * np.exp(-(params.lam + rates) * t) * phi_q
        coeffs[n] = tridiag_solve(mats.system, eq.test(vals))
        conv.push(eq.values(coeffs[n]))
    return FemSolution(coeffs, sgrid, tgrid)

