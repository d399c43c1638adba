"""Finite-difference scheme: system assembly, tridiagonal solve, time marching.

The system matrix ``(d_0/tau**gamma) I - K H`` is real and the same at
every level, so it is factorised once with LAPACK ``gttrf`` and each step
back-substitutes the real and imaginary parts of the right-hand side as
two columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import lapack

from .coeffs import CoefficientTable
from .core import ModelParams, SolutionHistory, SpaceGrid, TimeGrid, validate_model
from .errors import IncompatibleData, SingularPivot
from .history import HistoryConvolver, general_ic_correction

Source = Callable[[np.ndarray, float], np.ndarray]
VARIANTS = ("zero_ic", "general_ic")


@dataclass(frozen=True)
class TridiagonalOperator:
    """Real tridiagonal matrix with a cached LU factorisation."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    _lu: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sub, diag, sup = (np.array(v, dtype=float) for v in (self.sub, self.diag, self.sup))
        if sub.shape != sup.shape or sub.size != max(diag.size - 1, 0):
            raise ValueError("off-diagonals must have length len(diag) - 1")
        for name, v in (("sub", sub), ("diag", diag), ("sup", sup)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if diag.size < 3:
            # scipy's gttrf wrapper rejects n < 3; solve those directly
            if diag.size and abs(np.linalg.det(self.to_dense())) == 0.0:
                raise SingularPivot("singular system of size < 3")
            object.__setattr__(self, "_lu", None)
            return
        dl, d, du, du2, ipiv, info = lapack.dgttrf(sub, diag, sup)
        if info > 0:
            raise SingularPivot(f"zero pivot in row {info}")
        object.__setattr__(self, "_lu", (dl, d, du, du2, ipiv))

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        y = self.diag * x
        y[:-1] += self.sup * x[1:]
        y[1:] += self.sub * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1))


def tridiag_solve(op: TridiagonalOperator, rhs) -> np.ndarray:
    """Solve ``op @ x = rhs`` for a real or complex right-hand side."""
    rhs = np.asarray(rhs)
    if rhs.shape != (op.size,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({op.size},)")
    if op._lu is None:
        return np.linalg.solve(op.to_dense(), rhs.astype(complex))
    b = np.empty((op.size, 2))
    b[:, 0] = rhs.real
    b[:, 1] = rhs.imag if np.iscomplexobj(rhs) else 0.0
    x, info = lapack.dgttrs(*op._lu, b)
    if info != 0:
        raise SingularPivot(f"gttrs failed with info={info}")
    return x[:, 0] + 1j * x[:, 1]


def assemble_fdm_system(params: ModelParams, grid: SpaceGrid, tau: float,
                        d0: float) -> TridiagonalOperator:
    """``(d0/tau**gamma) I - K H`` with ``H = tridiag(1, -2, 1)/h**2``."""
    m = grid.n_interior
    off = -params.k_gamma / grid.h**2
    diag = np.full(m, d0 / tau**params.gamma + 2.0 * params.k_gamma / grid.h**2)
    return TridiagonalOperator(np.full(m - 1, off), diag, np.full(m - 1, off))


def march_fdm(params: ModelParams, sgrid: SpaceGrid, tgrid: TimeGrid, source: Source,
              ic=None, variant: str = "zero_ic", table: Optional[CoefficientTable] = None,
              block: int = 64) -> SolutionHistory:
    """March the finite-difference scheme from level 0 to ``N``.

    Parameters
    ----------
    source : callable
        ``source(x, t)`` evaluated at the interior nodes and ``t = t_n``.
    ic : array_like, optional
        Initial data at the interior nodes; zero by default.  The
        ``zero_ic`` variant requires it to vanish (lift the problem first).
    variant : {"zero_ic", "general_ic"}
        ``general_ic`` adds the initial-data correction to every step.
    table : CoefficientTable, optional
        Reused when given; must match ``(gamma, lam, tau, N)``.

    Returns
    -------
    SolutionHistory
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    validate_model(params, sgrid)
    x = sgrid.interior
    n_count, tau = tgrid.n_count, tgrid.tau
    if ic is None:
        ic = np.zeros(x.size, dtype=complex)
    ic = np.asarray(ic, dtype=complex)
    if ic.shape != x.shape:
        raise ValueError(f"ic must have length {x.size}")
    if variant == "zero_ic" and np.any(ic != 0):
        raise IncompatibleData("zero_ic scheme needs zero initial data; lift the problem")
    if table is None:
        table = CoefficientTable(params.gamma, params.lam, tau, n_count)

    op = assemble_fdm_system(params, sgrid, tau, table.d[0])
    conv = HistoryConvolver(table.d, params.rate_at(x), tau, n_count, block=block)
    scale = tau**-params.gamma
    out = np.empty((n_count + 1, x.size), dtype=complex)
    out[0] = ic
    conv.push(ic)
    for n in range(1, n_count + 1):
        rhs = np.asarray(source(x, tgrid.levels[n]), dtype=complex) - scale * conv.lagged_sum()
        if variant == "general_ic":
            rhs = rhs + general_ic_correction(ic, params, sgrid, n, tau, table.g_plain)
        out[n] = tridiag_solve(op, rhs)
        conv.push(out[n])
    return SolutionHistory(out, sgrid, tgrid)
