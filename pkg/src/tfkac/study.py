"""Convergence studies: run a refinement ladder, collect errors, emit tables.

A study is a list of parameter points ``(gamma, lam, p)`` crossed with a
ladder of ``(N, M)`` levels.  Errors are measured against the exact
solution (Examples 1 and 3), against a fine-grid reference run
(Example 2, finite differences) or between consecutive levels
(Example 2, finite elements).
"""
from __future__ import annotations

import csv
import functools
import io
import json
import math
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import ModelParams, build_space_grid, build_time_grid
from .errors import BadConfig, CellFailure, FeynmanKacError, IoFailure
from .fdm import march_fdm
from .fem import march_fem
from .manufactured import EXAMPLES, lift_boundary
from .norms import fem_h1_error, h1_semi, max_h, refinement_error, restrict, spacetime_norms
from .quadrature import gauss_legendre

SCHEMES = ("fdm", "fem")
NORMS = {
    # name: (label, schemes, examples)
    "st_0prime_hinf": ("|||.|||_{0',h,inf}", ("fdm",), (1, 3)),
    "st_0h1": ("|||.|||_{0,h,1}", ("fdm", "fem"), (1, 3)),
    "st_h1": ("|||.|||_{0,1}", ("fem",), (1, 3)),
    "final_hinf": ("||.||_{h,inf}", ("fdm",), (1, 2, 3)),
    "final_h1": ("|.|_{h,1}", ("fdm",), (1, 2, 3)),
    "refine_h1": ("|.|_1^*", ("fem",), (2,)),
}


@dataclass
class StudyConfig:
    """Everything needed to reproduce one convergence table.

    ``params`` holds ``(gamma, lam, p)`` triples; ``ladder`` holds
    ``(N, M)`` pairs from coarse to fine.  ``reference`` is the ``(N, M)``
    of the Example 2 finite-difference reference run.
    """

    scheme: str = "fdm"
    variant: str = "zero_ic"
    example: int = 1
    params: List[Tuple[float, float, complex]] = field(default_factory=list)
    ladder: List[Tuple[int, int]] = field(default_factory=list)
    t_final: float = 1.0
    k_gamma: float = 1.0
    norms: List[str] = field(default_factory=list)
    reference: Optional[Tuple[int, int]] = None
    quad_order: int = 4
    ic_testing: str = "interpolant"
    name: str = "study"

    def __post_init__(self):
        self.params = [(float(g), float(l), complex(p)) for g, l, p in self.params]
        self.ladder = [(int(n), int(m)) for n, m in self.ladder]
        if self.reference is not None:
            self.reference = (int(self.reference[0]), int(self.reference[1]))
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise BadConfig(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.variant not in ("zero_ic", "general_ic"):
            raise BadConfig(f"unknown variant {self.variant!r}")
        if self.example not in EXAMPLES:
            raise BadConfig(f"example must be 1, 2 or 3, got {self.example}")
        if len(self.ladder) < 2:
            raise BadConfig("a ladder needs at least two levels to give rates")
        for (n0, m0), (n1, m1) in zip(self.ladder, self.ladder[1:]):
            if n1 < n0 or m1 < m0 or (n1, m1) == (n0, m0):
                raise BadConfig(f"ladder is not strictly refining at {(n0, m0)} -> {(n1, m1)}")
        if not self.norms:
            self.norms = default_norms(self.scheme, self.example)
        for name in self.norms:
            if name not in NORMS:
                raise BadConfig(f"unknown norm {name!r}")
            _, schemes, examples = NORMS[name]
            if self.scheme not in schemes or self.example not in examples:
                raise BadConfig(f"norm {name!r} does not apply to {self.scheme}/example {self.example}")
        if self.example == 2 and self.scheme == "fdm":
            if self.reference is None:
                raise BadConfig("example 2 with fdm needs a reference (N, M)")
            n_ref, m_ref = self.reference
            for n, m in self.ladder:
                if m_ref % m or m_ref < m:
                    raise BadConfig(f"reference M={m_ref} does not refine M={m}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = [[g, l, [p.real, p.imag]] for g, l, p in self.params]
        d["ladder"] = [list(x) for x in self.ladder]
        d["reference"] = list(self.reference) if self.reference else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        d = dict(d)
        params = []
        for g, l, p in d.pop("params", []):
            params.append((g, l, complex(*p) if isinstance(p, (list, tuple)) else complex(p)))
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise BadConfig(f"unknown config keys: {sorted(extra)}")
        return cls(params=params, **d)


def default_norms(scheme: str, example: int) -> List[str]:
    if example == 2:
        return ["final_hinf", "final_h1"] if scheme == "fdm" else ["refine_h1"]
    return ["st_0prime_hinf", "st_0h1"] if scheme == "fdm" else ["st_h1"]


def ladder_from_rule(rule: str, h_exponents: Sequence[int], t_final: float,
                     m_fixed: Optional[int] = None) -> List[Tuple[int, int]]:
    """Build ``(N, M)`` pairs.

    ``rule`` is ``"tau=h"``, ``"tau=h^2"`` (``h = 2**-e``) or ``"tau"``
    (``tau = 2**-e`` at fixed ``M = m_fixed``).
    """
    out = []
    for e in h_exponents:
        if rule == "tau":
            if m_fixed is None:
                raise BadConfig("rule 'tau' needs m_fixed")
            out.append((int(round(t_final * 2**e)), m_fixed))
        elif rule == "tau=h":
            out.append((int(round(t_final * 2**e)), 2**e))
        elif rule in ("tau=h^2", "tau=h2"):
            out.append((int(round(t_final * 4**e)), 2**e))
        else:
            raise BadConfig(f"unknown ladder rule {rule!r}")
    return out


@dataclass
class Cell:
    param: int
    level: int
    n_count: int
    m_count: int
    errors: dict
    runtime: float = 0.0


@dataclass
class ConvergenceReport:
    config: dict
    version: str
    cells: List[Cell]

    def error_table(self, norm: str) -> np.ndarray:
        """Errors as ``(n_params, n_levels)``; NaN where undefined."""
        cfg = self.config
        out = np.full((len(cfg["params"]), len(cfg["ladder"])), np.nan)
        for c in self.cells:
            v = c.errors.get(norm)
            if v is not None:
                out[c.param, c.level] = v
        return out

    def rates(self, norm: str) -> np.ndarray:
        e = self.error_table(norm)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log2(e[:, :-1] / e[:, 1:])

    def to_json(self, timings: bool = False) -> str:
        """Machine-readable report; runtimes only when ``timings`` is set."""
        cells = [asdict(c) for c in self.cells]
        if not timings:
            for c in cells:
                del c["runtime"]
        return json.dumps({"version": self.version, "config": self.config, "cells": cells},
                          indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        d = json.loads(text)
        return cls(d["config"], d["version"], [Cell(**c) for c in d["cells"]])


def package_version() -> str:
    """``git describe`` of the source tree, or the installed version."""
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    from . import __version__
    return __version__


def build_problem(example: int, params: ModelParams, variant: str):
    """The problem actually marched: lifted unless the general scheme is used."""
    problem = EXAMPLES[example](params)
    if variant == "general_ic" and example == 1:
        return problem
    return lift_boundary(problem)


def solve(cfg: StudyConfig, params: ModelParams, n_count: int, m_count: int):
    """One run; returns ``(problem, history)`` for the marched unknown."""
    sgrid = build_space_grid(params.a, params.b, m_count)
    tgrid = build_time_grid(cfg.t_final, n_count)
    problem = build_problem(cfg.example, params, cfg.variant)
    general = cfg.variant == "general_ic" and not problem.lifted
    if cfg.scheme == "fdm":
        ic = problem.initial(sgrid.interior) if general else None
        hist = march_fdm(params, sgrid, tgrid, problem.source, ic,
                         "general_ic" if general else "zero_ic")
    else:
        hist = march_fem(params, sgrid, tgrid, problem.source,
                         "general_ic" if general else "zero_ic",
                         initial=problem.initial if general else None,
                         ic_testing=cfg.ic_testing, rule=gauss_legendre(cfg.quad_order))
    return problem, hist


@functools.lru_cache(maxsize=8)
def reference_final(example: int, variant: str, gamma: float, lam: float, p: complex,
                    k_gamma: float, t_final: float, n_ref: int, m_ref: int):
    """Final level of a fine finite-difference run, cached per process."""
    cfg = StudyConfig(scheme="fdm", variant=variant, example=example, params=[(gamma, lam, p)],
                      ladder=[(1, 2), (2, 4)], t_final=t_final, k_gamma=k_gamma,
                      norms=["final_hinf"], reference=(n_ref, m_ref))
    _, hist = solve(cfg, ModelParams(gamma, lam, k_gamma, p), n_ref, m_ref)
    final = hist.final.copy()
    final.setflags(write=False)
    return final, hist.sgrid


def _exact_errors(cfg, problem, hist):
    sg, tg = hist.sgrid, hist.tgrid
    x = sg.interior
    exact = np.array([problem.exact(x, t) for t in tg.levels])
    err = exact - hist.snapshots
    out = {}
    st_h1, st_inf = spacetime_norms(err, tg.tau, sg)
    for name in cfg.norms:
        if name == "st_0prime_hinf":
            out[name] = st_inf
        elif name == "st_0h1":
            out[name] = st_h1
        elif name == "final_hinf":
            out[name] = float(max_h(err[-1]))
        elif name == "final_h1":
            out[name] = float(h1_semi(err[-1], sg))
        elif name == "st_h1":
            rule = gauss_legendre(8)
            sq = sum(fem_h1_error(hist[n], sg, problem.exact_dx, tg.levels[n], rule) ** 2
                     for n in range(1, tg.n_count + 1))
            out[name] = math.sqrt(tg.tau * sq)
    return out


def _run_param(cfg_dict: dict, index: int) -> List[Cell]:
    cfg = StudyConfig.from_dict(cfg_dict)
    gamma, lam, p = cfg.params[index]
    params = ModelParams(gamma, lam, cfg.k_gamma, p)
    cells = []
    try:
        if cfg.example == 2 and cfg.scheme == "fdm":
            ref_final, ref_grid = reference_final(cfg.example, cfg.variant, gamma, lam, p,
                                                  cfg.k_gamma, cfg.t_final, *cfg.reference)
            for level, (n, m) in enumerate(cfg.ladder):
                t0 = time.perf_counter()
                _, hist = solve(cfg, params, n, m)
                coarse = build_space_grid(params.a, params.b, m)
                err = restrict(ref_final, ref_grid, coarse) - hist.final
                errors = {"final_hinf": float(max_h(err)), "final_h1": float(h1_semi(err, coarse))}
                errors = {k: v for k, v in errors.items() if k in cfg.norms}
                cells.append(Cell(index, level, n, m, errors, time.perf_counter() - t0))
        elif cfg.example == 2:
            prev = None
            for level, (n, m) in enumerate(cfg.ladder):
                t0 = time.perf_counter()
                _, hist = solve(cfg, params, n, m)
                if prev is not None:
                    cells[-1].errors["refine_h1"] = refinement_error(
                        prev.final, hist.final, prev.sgrid, hist.sgrid)
                cells.append(Cell(index, level, n, m, {}, time.perf_counter() - t0))
                prev = hist
        else:
            for level, (n, m) in enumerate(cfg.ladder):
                t0 = time.perf_counter()
                problem, hist = solve(cfg, params, n, m)
                errors = _exact_errors(cfg, problem, hist)
                cells.append(Cell(index, level, n, m, errors, time.perf_counter() - t0))
    except FeynmanKacError as exc:
        raise CellFailure(f"cell gamma={gamma}, lam={lam}, p={p} failed: {exc}") from exc
    return cells


def run_study(cfg: StudyConfig, jobs: int = 1) -> ConvergenceReport:
    """Run every (parameter, level) cell; parameter points may run in parallel."""
    cfg.validate()
    d = cfg.to_dict()
    if jobs > 1 and len(cfg.params) > 1:
        with ProcessPoolExecutor(min(jobs, len(cfg.params))) as pool:
            parts = list(pool.map(_run_param, [d] * len(cfg.params), range(len(cfg.params))))
    else:
        parts = [_run_param(d, i) for i in range(len(cfg.params))]
    cells = [c for part in parts for c in part]
    return ConvergenceReport(d, package_version(), cells)


def _fmt_p(p) -> str:
    p = complex(*p) if isinstance(p, (list, tuple)) else complex(p)
    if p.imag == 0:
        return f"{p.real:g}"
    if p.real == 0:
        return f"{p.imag:g}i"
    return f"{p.real:g}{p.imag:+g}i"


def _level_label(cfg: dict, level: int) -> str:
    n, m = cfg["ladder"][level]
    return f"N={n},M={m}"


def to_csv(report: ConvergenceReport, timings: bool = False) -> str:
    """One row per (cell, norm); runtimes only when ``timings`` is set."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "lambda", "p", "N", "M", "norm", "error", "rate"]
               + (["runtime_s"] if timings else []))
    cfg = report.config
    for norm in cfg["norms"]:
        rates = report.rates(norm)
        for c in report.cells:
            if norm not in c.errors:
                continue
            g, l, p = cfg["params"][c.param]
            r = rates[c.param, c.level - 1] if c.level > 0 else float("nan")
            w.writerow([g, l, _fmt_p(p), c.n_count, c.m_count, norm,
                        f"{c.errors[norm]:.6e}", "" if math.isnan(r) else f"{r:.4f}"]
                       + ([f"{c.runtime:.3f}"] if timings else []))
    return buf.getvalue()


def to_markdown(report: ConvergenceReport) -> str:
    """Wide table: one Err/Rate column pair per parameter point."""
    cfg = report.config
    heads = [f"gamma={g:g}, lambda={l:g}, p={_fmt_p(p)}" for g, l, p in cfg["params"]]
    lines = [f"<!-- {cfg.get('name', 'study')} | version {report.version} -->", "",
             "| norm | level | " + " | ".join(f"{h} Err | Rate" for h in heads) + " |",
             "|---|---|" + "---|---|" * len(heads)]
    for norm in cfg["norms"]:
        errs, rates = report.error_table(norm), report.rates(norm)
        for level in range(len(cfg["ladder"])):
            if np.all(np.isnan(errs[:, level])):
                continue
            row = [NORMS[norm][0], _level_label(cfg, level)]
            for i in range(len(heads)):
                e = errs[i, level]
                r = rates[i, level - 1] if level > 0 else float("nan")
                row.append("" if math.isnan(e) else f"{e:.4e}")
                row.append("---" if math.isnan(r) else f"{r:.4f}")
            lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def render_report(report: ConvergenceReport, fmt: str, timings: bool = False) -> str:
    if fmt == "csv":
        return to_csv(report, timings)
    if fmt == "markdown":
        return to_markdown(report)
    if fmt == "json":
        return report.to_json(timings)
    raise BadConfig(f"format must be csv, markdown or json, got {fmt!r}")


def emit_report(report: ConvergenceReport, fmt: str, path: str, timings: bool = False) -> str:
    """Write the report as ``csv``, ``markdown`` or ``json`` to ``path``.

    Output is deterministic for a fixed config unless ``timings`` is set.
    """
    text = render_report(report, fmt, timings)
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return text
