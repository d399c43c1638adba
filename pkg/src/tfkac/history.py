"""History sums of the discrete tempered substantial derivative.

The scheme at level ``n`` needs

    (1/tau**gamma) * sum_k d_k * exp(-r k tau) * G^{n-k},   r = p U(x0)

with one complex rate per node.  :func:`substantial_history_sum` evaluates
this literally.  :class:`HistoryConvolver` is the marching engine: with
``y_j = exp(r t_j) G^j`` the sum factorises as
``exp(-r t_n) * sum_k d_k y_{n-k}``, a plain Toeplitz convolution that is
evaluated block-wise with real matrix products.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ModelParams, SolutionHistory, SpaceGrid
from .errors import CoefficientTableTooShort, HistoryTooShort

REFRESH_EVERY = 64
# above this Re(r)*T the factorised form would overflow; sum directly
FACTORISE_LIMIT = 600.0


def weight_table(rates, tau: float, n: int) -> np.ndarray:
    """``exp(-rates * k * tau)`` for ``k = 0..n``, shape ``(n + 1, L)``.

    Powers are built by repeated multiplication and re-anchored with a
    direct ``exp`` every ``REFRESH_EVERY`` steps to bound drift.
    """
    rates = np.asarray(rates, dtype=complex)
    out = np.empty((n + 1, rates.size), dtype=complex)
    out[0] = 1.0
    step = np.exp(-rates * tau)
    for k in range(1, n + 1):
        if k % REFRESH_EVERY == 0:
            out[k] = np.exp(-rates * (k * tau))
        else:
            out[k] = out[k - 1] * step
    return out


@dataclass(frozen=True)
class HistoryWeights:
    """Per-node factors ``w[k, m] = exp(-p U(x0_m) k tau)``, ``k = 0..N``."""

    rates: np.ndarray
    tau: float
    n: int
    factors: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=complex)
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        table = weight_table(rates, self.tau, self.n)
        table.setflags(write=False)
        object.__setattr__(self, "factors", table)

    @classmethod
    def for_model(cls, params: ModelParams, grid: SpaceGrid, tau: float,
                  n: int) -> "HistoryWeights":
        return cls(params.rate_at(grid.interior), tau, n)

    def __getitem__(self, k):
        return self.factors[k]


def _levels(history):
    if isinstance(history, SolutionHistory):
        return history.snapshots
    return np.asarray(history)


def substantial_history_sum(coeff_d, weights: HistoryWeights, history, n: int,
                            gamma: float) -> np.ndarray:
    """Full sum ``(1/tau**gamma) sum_{k=0}^n d_k w_k * G^{n-k}``.

    Parameters
    ----------
    coeff_d : array_like
        Scheme weights ``d_0..d_N``.
    weights : HistoryWeights
    history : SolutionHistory or ndarray
        Levels ``G^0..`` stacked along axis 0.
    n : int
        Target level.
    gamma : float
        Fractional order (sets the ``tau**-gamma`` scale).
    """
    levels = _levels(history)
    if n >= levels.shape[0]:
        raise HistoryTooShort(f"level {n} requested, history holds {levels.shape[0]}")
    if n >= len(coeff_d) or n > weights.n:
        raise CoefficientTableTooShort(f"coefficients stop before k={n}")
    d = np.asarray(coeff_d)[: n + 1]
    terms = d[:, None] * weights.factors[: n + 1] * levels[n::-1]
    return terms.sum(axis=0) / weights.tau**gamma


def general_ic_correction(phi, params: ModelParams, grid: SpaceGrid, n: int,
                          tau: float, coeff_plain) -> np.ndarray:
    """Initial-data term ``exp(-(lam + pU) n tau) Q_n phi / tau**gamma``.

    ``Q_n`` is the partial sum of the untempered weights.  The general
    initial-data scheme adds this vector to the right-hand side.
    """
    if n >= len(coeff_plain):
        raise CoefficientTableTooShort(f"coefficients stop before k={n}")
    q_n = float(np.sum(np.asarray(coeff_plain)[: n + 1]))
    rate = params.lam + params.rate_at(grid.interior)
    return np.exp(-rate * (n * tau)) * q_n * np.asarray(phi) / tau**params.gamma


class HistoryConvolver:
    """Incremental evaluation of the lagged part ``sum_{k>=1} d_k w_k * G^{n-k}``.

    Levels are appended with :meth:`push`; :meth:`lagged_sum` returns the
    sum for the next level.  Contributions of levels older than the
    current block of ``block`` steps are accumulated by one real GEMM per
    block, the rest directly.

    Parameters
    ----------
    coeff_d : array_like
        Weights ``d_0..d_N``; ``d_0`` is not used here.
    rates : array_like
        Complex rate ``r`` per component.
    tau : float
    n_count : int
        Number of levels after the initial one.
    """

    def __init__(self, coeff_d, rates, tau: float, n_count: int, block: int = 64):
        self.d = np.asarray(coeff_d, dtype=float)
        if self.d.size < n_count + 1:
            raise CoefficientTableTooShort(f"need {n_count + 1} weights, got {self.d.size}")
        self.rates = np.asarray(rates, dtype=complex).ravel()
        self.tau = tau
        self.n_count = n_count
        self.block = max(int(block), 1)
        self.factorised = float(np.max(self.rates.real, initial=0.0)) * tau * n_count \
            <= FACTORISE_LIMIT
        size = self.rates.size
        self._store = np.empty((n_count + 1, size), dtype=complex)
        self._far = np.zeros((self.block, size), dtype=complex)
        self._far_start = 0
        self._count = 0
        if not self.factorised:
            self._w = weight_table(self.rates, tau, n_count)

    def __len__(self):
        return self._count

    def push(self, level) -> None:
        j = self._count
        if j > self.n_count:
            raise HistoryTooShort("all levels already pushed")
        level = np.asarray(level).ravel()
        if self.factorised:
            self._store[j] = np.exp(self.rates * (j * self.tau)) * level
        else:
            self._store[j] = level
        self._count += 1

    def _refresh_far(self, n0: int) -> None:
        # far[i] = sum_{j < n0} d_{n0+i-j} y_j for the block n0..n0+block-1
        nb = min(self.block, self.n_count + 1 - n0)
        idx = n0 + np.arange(nb)[:, None] - np.arange(n0)[None, :]
        toeplitz = self.d[idx]
        y = self._store[:n0].view(float)
        self._far[:nb] = (toeplitz @ y).view(complex)
        self._far_start = n0

    def lagged_sum(self) -> np.ndarray:
        """Sum over ``k = 1..n`` for the next level ``n = len(self)``."""
        n = self._count
        if n == 0:
            raise HistoryTooShort("push the initial level first")
        if n > self.n_count:
            raise HistoryTooShort("history is complete")
        if not self.factorised:
            d = self.d[1: n + 1]
            terms = d[:, None] * self._w[1: n + 1] * self._store[n - 1::-1]
            return terms.sum(axis=0)
        n0 = n - (n % self.block) if n >= self.block else 0
        if n0 and self._far_start != n0:
            self._refresh_far(n0)
        s = self._far[n - n0].copy() if n0 else np.zeros(self.rates.size, complex)
        if n > n0:
            near = self.d[n - np.arange(n0, n)]
            s += (near @ self._store[n0:n].view(float)).view(complex)
        return np.exp(-self.rates * (n * self.tau)) * s
