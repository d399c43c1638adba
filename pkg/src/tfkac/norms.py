"""Discrete norms on interior nodal vectors and their space-time composites.

Vectors hold the interior values ``v_1..v_{M-1}``; boundary values are
zero.  All norms are real and use ``(v, w)_h = h sum v_m conj(w_m)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import SolutionHistory, SpaceGrid
from .errors import GridMismatch
from .quadrature import QuadratureRule, gauss_legendre


@dataclass(frozen=True)
class NormReport:
    """Per-level norms (arrays over ``n = 0..N``) and space-time composites."""

    l2_h: np.ndarray
    h1_semi: np.ndarray
    max_h: np.ndarray
    st_0h1: float
    st_0prime_hinf: float


def _padded(v):
    v = np.asarray(v)
    pad = np.zeros(v.shape[:-1] + (1,), dtype=v.dtype)
    return np.concatenate([pad, v, pad], axis=-1)


def l2_h(v, grid: SpaceGrid):
    return np.sqrt(grid.h * np.sum(np.abs(v) ** 2, axis=-1))


def h1_semi(v, grid: SpaceGrid):
    """``|v|_{h,1}``, boundary differences included."""
    dv = np.diff(_padded(v), axis=-1)
    return np.sqrt(np.sum(np.abs(dv) ** 2, axis=-1) / grid.h)


def max_h(v, grid: Optional[SpaceGrid] = None):
    return np.max(np.abs(v), axis=-1)


def level_norms(v, grid: SpaceGrid):
    """``(||v||_h, |v|_{h,1}, ||v||_{h,inf})``."""
    return float(l2_h(v, grid)), float(h1_semi(v, grid)), float(max_h(v))


def spacetime_norms(history, tau: float, grid: Optional[SpaceGrid] = None):
    """``(|||v|||_{0,h,1}, |||v|||_{0',h,inf})`` over levels ``n >= 1``.

    ``|||v|||_{0,h,1} = sqrt(sum tau |v^n|_{h,1}**2)`` and
    ``|||v|||_{0',h,inf} = sum tau ||v^n||_{h,inf}``.
    """
    if isinstance(history, SolutionHistory):
        grid = history.sgrid if grid is None else grid
        levels = history.snapshots
    else:
        levels = np.asarray(history)
    if grid is None:
        raise ValueError("a grid is needed for array input")
    tail = levels[1:]
    st_h1 = float(np.sqrt(tau * np.sum(h1_semi(tail, grid) ** 2)))
    st_inf = float(tau * np.sum(max_h(tail)))
    return st_h1, st_inf


def norm_report(history: SolutionHistory) -> NormReport:
    snaps, grid = history.snapshots, history.sgrid
    st_h1, st_inf = spacetime_norms(history, history.tgrid.tau)
    return NormReport(l2_h(snaps, grid), h1_semi(snaps, grid), max_h(snaps), st_h1, st_inf)


def fem_h1_seminorm(coeffs, grid: SpaceGrid) -> float:
    """``|v|_1`` of the P1 function with the given interior coefficients."""
    return float(h1_semi(coeffs, grid))


def inject(coeffs, coarse: SpaceGrid, fine: SpaceGrid) -> np.ndarray:
    """Interior values on ``fine`` of the P1 interpolant of coarse data."""
    if not coarse.is_refined_by(fine):
        raise GridMismatch(f"M={fine.m_count} does not refine M={coarse.m_count}")
    full = _padded(coeffs)
    return np.interp(fine.interior, coarse.nodes, full.real) + 1j * np.interp(
        fine.interior, coarse.nodes, full.imag)


def restrict(values, fine: SpaceGrid, coarse: SpaceGrid) -> np.ndarray:
    """Fine interior values at the coarse interior nodes."""
    if not coarse.is_refined_by(fine):
        raise GridMismatch(f"M={fine.m_count} does not refine M={coarse.m_count}")
    r = fine.m_count // coarse.m_count
    return np.asarray(values)[r - 1::r][: coarse.n_interior]


def refinement_error(coarse, fine, coarse_grid: SpaceGrid, fine_grid: SpaceGrid) -> float:
    """``|G_{h/2} - G_h|_1`` after injecting the coarse P1 function."""
    if fine_grid.m_count != 2 * coarse_grid.m_count:
        raise GridMismatch("fine grid must halve the coarse mesh size")
    return fem_h1_seminorm(np.asarray(fine) - inject(coarse, coarse_grid, fine_grid),
                           fine_grid)


def fem_h1_error(coeffs, grid: SpaceGrid, exact_dx: Callable, t: float,
                 rule: Optional[QuadratureRule] = None) -> float:
    """``|u(., t) - v_h|_1`` for a P1 ``v_h`` and an exact derivative ``u_x``.

    Computed elementwise with Gauss-Legendre quadrature (default 8 points).
    """
    rule = gauss_legendre(8) if rule is None else rule
    nodes = grid.nodes
    xq = nodes[:-1, None] + grid.h * (1.0 + rule.nodes[None, :]) / 2.0
    slope = np.diff(_padded(coeffs)) / grid.h
    diff = exact_dx(xq, t) - slope[:, None]
    return float(np.sqrt(grid.h / 2.0 * np.sum(rule.weights * np.abs(diff) ** 2)))
