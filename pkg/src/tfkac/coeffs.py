"""Grunwald-type weights for the discrete tempered substantial derivative.

``grunwald`` gives the power-series coefficients of ``(1 - z)**gamma``;
the tempered weights carry an extra ``exp(-k lam tau)``; ``d_coeffs``
absorbs the ``-lambda**gamma`` reaction term into the leading weight; and
``q_partial_sums`` are the running sums, i.e. the coefficients of
``(1 - z)**(gamma - 1)``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import GammaOutOfRange, NegativeTempering, BadPartition


def _check(gamma, lam=0.0, tau=1.0, n=0):
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in (0, 1), got {gamma}")
    if not lam >= 0.0:
        raise NegativeTempering(f"lambda must be >= 0, got {lam}")
    if not tau > 0.0:
        raise BadPartition(f"tau must be positive, got {tau}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")


def grunwald(gamma: float, n: int) -> np.ndarray:
    """Return ``g_0..g_n`` via ``g_k = (1 - (gamma + 1)/k) g_{k-1}``."""
    _check(gamma, n=n)
    k = np.arange(1, n + 1, dtype=float)
    g = np.empty(n + 1)
    g[0] = 1.0
    g[1:] = np.cumprod(1.0 - (gamma + 1.0) / k)
    return g


def tempered_grunwald(gamma: float, lam: float, tau: float, n: int) -> np.ndarray:
    _check(gamma, lam, tau, n)
    return grunwald(gamma, n) * np.exp(-lam * tau * np.arange(n + 1))


def d0_weight(gamma: float, lam: float, tau: float) -> float:
    """Leading scheme weight ``1 - exp(-gamma lam tau) (lam tau)**gamma``."""
    return 1.0 - np.exp(-gamma * lam * tau) * (lam * tau) ** gamma


def d_coeffs(gamma: float, lam: float, tau: float, n: int) -> np.ndarray:
    d = tempered_grunwald(gamma, lam, tau, n)
    d[0] = d0_weight(gamma, lam, tau)
    return d


def q_partial_sums(gamma: float, n: int) -> np.ndarray:
    return np.cumsum(grunwald(gamma, n))


@dataclass(frozen=True)
class CoefficientTable:
    """All weight sequences for one ``(gamma, lam, tau, N)``."""

    gamma: float
    lam: float
    tau: float
    n: int
    g_plain: np.ndarray = field(init=False, repr=False)
    g_tempered: np.ndarray = field(init=False, repr=False)
    d: np.ndarray = field(init=False, repr=False)
    q_partial: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _check(self.gamma, self.lam, self.tau, self.n)
        g = grunwald(self.gamma, self.n)
        gt = g * np.exp(-self.lam * self.tau * np.arange(self.n + 1))
        d = gt.copy()
        d[0] = d0_weight(self.gamma, self.lam, self.tau)
        for name, arr in (("g_plain", g), ("g_tempered", gt), ("d", d),
                          ("q_partial", np.cumsum(g))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,g_plain,g_tempered,d,q_partial\n")
        for k in range(self.n + 1):
            buf.write(f"{k},{self.g_plain[k]:.17g},{self.g_tempered[k]:.17g},"
                      f"{self.d[k]:.17g},{self.q_partial[k]:.17g}\n")
        return buf.getvalue()
