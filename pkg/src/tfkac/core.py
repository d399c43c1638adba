"""Problem definition, uniform grids and the solution container.

Nodal data are plain complex ``numpy`` arrays holding the interior nodes
``m = 1..M-1``; boundary values are implicit (zero for the homogeneous
problem).  All containers are frozen after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    BadPartition,
    GammaOutOfRange,
    GridMismatch,
    NegativePotential,
    NegativeTempering,
    NonpositiveDiffusion,
    ReParameterNegative,
)

Potential = Callable[[np.ndarray], np.ndarray]


def _linear_potential(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ModelParams:
    """Continuous problem data.

    Attributes
    ----------
    gamma : float
        Fractional order, ``0 < gamma < 1``.
    lam : float
        Tempering parameter ``lambda >= 0``.
    k_gamma : float
        Diffusion coefficient ``K_gamma > 0``.
    p : complex
        Laplace variable dual to the functional ``A``.
    potential : callable
        ``U(x0) >= 0``; must accept numpy arrays.  Defaults to ``U(x0) = x0``.
    a, b : float
        Spatial interval.
    """

    gamma: float
    lam: float = 0.0
    k_gamma: float = 1.0
    p: complex = 0.0
    potential: Potential = _linear_potential
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))

    def potential_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = np.asarray(self.potential(x), dtype=float)
        if u.shape != x.shape:
            u = np.broadcast_to(u, x.shape).astype(float)
        return u

    def rate_at(self, x) -> np.ndarray:
        """Coupling rate ``p * U(x)`` at the given points."""
        return self.p * self.potential_at(x)

    def replace(self, **changes) -> "ModelParams":
        fields = dict(gamma=self.gamma, lam=self.lam, k_gamma=self.k_gamma, p=self.p,
                      potential=self.potential, a=self.a, b=self.b)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class SpaceGrid:
    a: float
    b: float
    m_count: int
    h: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "h", (self.b - self.a) / self.m_count)
        nodes = self.a + np.arange(self.m_count + 1) * self.h
        nodes[-1] = self.b
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    @property
    def n_interior(self) -> int:
        return self.m_count - 1

    def is_refined_by(self, fine: "SpaceGrid") -> bool:
        return (fine.a == self.a and fine.b == self.b
                and fine.m_count % self.m_count == 0)


@dataclass(frozen=True)
class TimeGrid:
    t_final: float
    n_count: int
    tau: float = field(init=False)
    levels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tau", self.t_final / self.n_count)
        levels = np.arange(self.n_count + 1) * self.tau
        levels[-1] = self.t_final
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)


def build_space_grid(a: float, b: float, m_count: int) -> SpaceGrid:
    if not a < b:
        raise BadPartition(f"need a < b, got a={a}, b={b}")
    if int(m_count) != m_count or m_count < 2:
        raise BadPartition(f"need at least two cells, got M={m_count}")
    return SpaceGrid(float(a), float(b), int(m_count))


def build_time_grid(t_final: float, n_count: int) -> TimeGrid:
    if not t_final > 0:
        raise BadPartition(f"need T > 0, got {t_final}")
    if int(n_count) != n_count or n_count < 1:
        raise BadPartition(f"need N >= 1, got {n_count}")
    return TimeGrid(float(t_final), int(n_count))


def validate_model(raw: ModelParams, grid: SpaceGrid) -> ModelParams:
    """Return ``raw`` unchanged if every admissibility condition holds on ``grid``.

    Only ``Re(p U) >= 0`` is enforced for the Laplace variable; the
    experiments use purely imaginary ``p``, which is numerically sound.
    """
    if not 0.0 < raw.gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in (0, 1), got {raw.gamma}")
    if not raw.lam >= 0.0:
        raise NegativeTempering(f"lambda must be >= 0, got {raw.lam}")
    if not raw.k_gamma > 0.0:
        raise NonpositiveDiffusion(f"K_gamma must be > 0, got {raw.k_gamma}")
    if (grid.a, grid.b) != (raw.a, raw.b):
        raise GridMismatch("grid interval differs from the model interval")
    u = raw.potential_at(grid.nodes)
    if np.any(u < 0):
        m = int(np.argmax(u < 0))
        raise NegativePotential(f"U({grid.nodes[m]:g}) = {u[m]:g} < 0")
    re = (raw.p * u).real
    if np.any(re < 0):
        m = int(np.argmax(re < 0))
        raise ReParameterNegative(
            f"Re(p U) = {re[m]:g} < 0 at x0 = {grid.nodes[m]:g}")
    return raw


@dataclass(frozen=True)
class SolutionHistory:
    """All time levels of a nodal solution, shape ``(N + 1, M - 1)``."""

    snapshots: np.ndarray
    sgrid: SpaceGrid
    tgrid: TimeGrid

    def __post_init__(self):
        s = self.snapshots
        if s.shape != (self.tgrid.n_count + 1, self.sgrid.n_interior):
            raise GridMismatch(f"history shape {s.shape} does not fit the grids")
        s.setflags(write=False)

    def __len__(self):
        return self.snapshots.shape[0]

    def __getitem__(self, n):
        return self.snapshots[n]

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1]

    def with_boundary(self, n: int, left=0.0, right=0.0) -> np.ndarray:
        """Level ``n`` padded with boundary values."""
        return np.concatenate([[left], self.snapshots[n], [right]])
