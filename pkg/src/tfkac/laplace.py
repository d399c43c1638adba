"""Fourier-series Laplace inversion with Euler summation (Abate-Whitt).

For a transform ``G(p)`` the density at ``A`` is approximated by binomial
averaging of the alternating partial sums

    s_n(A) = e^{a/2}/(2A) Re G(a/2A) + e^{a/2}/A sum_{j=1}^n (-1)^j Re G(a/2A + j pi i/A)

over ``n = K1..K1+K2``.  The discretisation error is about ``e^{-a}``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import ModelParams, build_space_grid, build_time_grid
from .errors import ConfigOverflow, EvaluatorFailure
from .fdm import march_fdm

MAX_K2 = 40

Evaluator = Callable[[complex], complex]


@dataclass(frozen=True)
class InversionConfig:
    """Euler-summation settings and the transform to invert."""

    evaluator: Evaluator
    a_tilde: float = 18.4
    k1: int = 25
    k2: int = 15

    def __post_init__(self):
        if not self.a_tilde > 0:
            raise ValueError(f"a_tilde must be positive, got {self.a_tilde}")
        if self.k1 < 1:
            raise ValueError(f"k1 must be >= 1, got {self.k1}")
        if self.k2 < 0:
            raise ValueError(f"k2 must be >= 0, got {self.k2}")
        if self.k2 > MAX_K2:
            raise ConfigOverflow(f"k2={self.k2} exceeds {MAX_K2}")

    @property
    def n_terms(self) -> int:
        return self.k1 + self.k2 + 1


def abscissae(amount: float, cfg: InversionConfig, n: int) -> np.ndarray:
    """``p_j = a/2A + j pi i / A`` for ``j = 0..n``."""
    j = np.arange(n + 1)
    return cfg.a_tilde / (2.0 * amount) + 1j * math.pi * j / amount


def _evaluate(cfg: InversionConfig, points, jobs: int = 1) -> np.ndarray:
    def one(pj):
        try:
            v = complex(cfg.evaluator(complex(pj)))
        except Exception as exc:
            raise EvaluatorFailure(f"evaluator failed at p={pj}: {exc}") from exc
        if not np.isfinite(v):
            raise EvaluatorFailure(f"evaluator returned {v} at p={pj}")
        return v

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return np.array(list(pool.map(one, points)))
    return np.array([one(pj) for pj in points])


def _partial_sums(amount: float, cfg: InversionConfig, values) -> np.ndarray:
    """All ``s_0..s_n`` from transform values at ``p_0..p_n``."""
    re = np.real(values)
    scale = math.exp(cfg.a_tilde / 2.0) / amount
    signs = (-1.0) ** np.arange(re.size)
    terms = scale * signs * re
    terms[0] *= 0.5
    return np.cumsum(terms)


def _check_amount(amount):
    if not amount > 0:
        raise ValueError(f"A must be positive, got {amount}")


def partial_sum(amount: float, n: int, cfg: InversionConfig) -> float:
    _check_amount(amount)
    values = _evaluate(cfg, abscissae(amount, cfg, n))
    return float(_partial_sums(amount, cfg, values)[n])


def binomial_weights(k2: int) -> np.ndarray:
    """``C(k2, k) 2**-k2`` built by Pascal's rule."""
    if k2 > MAX_K2:
        raise ConfigOverflow(f"k2={k2} exceeds {MAX_K2}")
    row = np.ones(1)
    for _ in range(k2):
        row = np.concatenate([row, [0.0]]) + np.concatenate([[0.0], row])
    return row / 2.0**k2


def euler_invert(amount: float, cfg: InversionConfig, jobs: int = 1) -> float:
    """Euler-averaged inverse at ``A = amount``; ``K1 + K2 + 1`` evaluations."""
    _check_amount(amount)
    n = cfg.k1 + cfg.k2
    values = _evaluate(cfg, abscissae(amount, cfg, n), jobs)
    s = _partial_sums(amount, cfg, values)
    return float(np.dot(binomial_weights(cfg.k2), s[cfg.k1:]))


def solver_evaluator(params: ModelParams, problem_factory: Callable, m_count: int,
                     n_count: int, t_final: float, x0: float) -> Evaluator:
    """Transform values from a fresh FDM run per ``p``, read at ``(x0, T)``.

    ``x0`` must be a grid node.  ``problem_factory(params)`` returns a
    problem with homogeneous data, e.g. :func:`tfkac.manufactured.example3`.
    """
    sgrid = build_space_grid(params.a, params.b, m_count)
    tgrid = build_time_grid(t_final, n_count)
    m = (x0 - sgrid.a) / sgrid.h
    if abs(m - round(m)) > 1e-9 or not 0 < round(m) < m_count:
        raise ValueError(f"x0={x0} is not an interior node of the grid")
    m = int(round(m))

    def evaluate(p: complex) -> complex:
        run = params.replace(p=p)
        problem = problem_factory(run)
        return complex(march_fdm(run, sgrid, tgrid, problem.source).final[m - 1])

    return evaluate
