"""Benchmark convergence studies with reference errors and rates.

Each preset is a :class:`StudyConfig` plus expected errors per norm
(rows: parameter points, columns: ladder levels), the relative tolerance
on those errors, and a band for the observed rates.  ``check`` compares a
finished report against them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .study import ConvergenceReport, StudyConfig, ladder_from_rule

EX1_PARAMS = [(0.3, 3.0, 1 + 1j), (0.5, 3.0, 5.0), (0.8, 3.0, 10j)]
EX2_PARAMS = [(0.3, 0.0, 5j), (0.5, 3.0, 5j), (0.8, 5.0, 5j)]
EX2_REFERENCE = (4096, 4096)
EX2_REFERENCE_CI = (1024, 1024)


@dataclass
class Benchmark:
    """A study with expected values.

    ``rate_target`` is either a number (observed rates must lie within
    ``rate_tol`` of it) or ``None`` (compare with the rates implied by
    ``expected``).
    """

    config: StudyConfig
    expected: Dict[str, List[List[float]]]
    value_rtol: Optional[float]
    rate_tol: float
    rate_target: Optional[float] = None
    notes: str = ""


@dataclass
class CheckLine:
    norm: str
    param: int
    level: int
    kind: str          # "value" or "rate"
    observed: float
    expected: float
    passed: bool

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.kind:5s} {self.norm} param={self.param} level={self.level} "
                f"observed={self.observed:.4e} expected={self.expected:.4e}")


def _rates(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.log2(v[:, :-1] / v[:, 1:])


def check(report: ConvergenceReport, bench: Benchmark) -> List[CheckLine]:
    """Compare every error and rate of ``report`` with ``bench``."""
    lines = []
    for norm, expected in bench.expected.items():
        exp = np.asarray(expected, dtype=float)
        got = report.error_table(norm)[:, : exp.shape[1]]
        if bench.value_rtol is not None:
            for (i, j), e in np.ndenumerate(exp):
                o = got[i, j]
                ok = bool(np.isfinite(o) and abs(o - e) <= bench.value_rtol * e)
                lines.append(CheckLine(norm, i, j, "value", o, e, ok))
        got_r = _rates(got)
        exp_r = _rates(exp) if bench.rate_target is None else np.full_like(got_r, bench.rate_target)
        for (i, j), e in np.ndenumerate(exp_r):
            o = got_r[i, j]
            ok = bool(np.isfinite(o) and abs(o - e) <= bench.rate_tol)
            lines.append(CheckLine(norm, i, j + 1, "rate", o, e, ok))
    return lines


def _fdm_ex1(name, variant, ladder, expected, rtol, rate_tol, rate_target=None):
    cfg = StudyConfig(scheme="fdm", variant=variant, example=1, params=EX1_PARAMS,
                      ladder=ladder, t_final=1.0, norms=["st_0prime_hinf", "st_0h1"], name=name)
    return Benchmark(cfg, expected, rtol, rate_tol, rate_target)


def _fem_ex1(name, variant, rule, expected, rtol, rate_tol, rate_target=None):
    cfg = StudyConfig(scheme="fem", variant=variant, example=1, params=EX1_PARAMS,
                      ladder=ladder_from_rule(rule, [4, 5, 6], 1.0), t_final=1.0,
                      norms=["st_h1"], name=name)
    return Benchmark(cfg, expected, rtol, rate_tol, rate_target)


def _fdm_ex2(name, ladder, expected, rate_target, rate_tol, ci=False):
    cfg = StudyConfig(scheme="fdm", example=2, params=EX2_PARAMS, ladder=ladder, t_final=0.5,
                      norms=["final_hinf", "final_h1"],
                      reference=EX2_REFERENCE_CI if ci else EX2_REFERENCE, name=name)
    return Benchmark(cfg, expected, None, rate_tol, rate_target)


def _fem_ex2(name, rule, expected, rtol, rate_tol, rate_target):
    cfg = StudyConfig(scheme="fem", example=2, params=EX2_PARAMS,
                      ladder=ladder_from_rule(rule, [4, 5, 6, 7], 0.5), t_final=0.5,
                      norms=["refine_h1"], name=name)
    return Benchmark(cfg, expected, rtol, rate_tol, rate_target)


FDM_TAU_LADDER = [(128, 2048), (256, 2048), (512, 2048)]

EXPECTED = {
    "ex1-fdm-time": {
        "st_0prime_hinf": [[1.1075e-06, 5.5468e-07, 2.7751e-07],
                           [1.2351e-06, 6.2154e-07, 3.1188e-07],
                           [5.8745e-06, 2.9626e-06, 1.4869e-06]],
        "st_0h1": [[2.6618e-06, 1.3343e-06, 6.6784e-07],
                   [3.5930e-06, 1.8094e-06, 9.0812e-07],
                   [1.6728e-05, 8.4359e-06, 4.2324e-06]],
    },
    "ex1-fdm-general-time": {
        "st_0prime_hinf": [[1.6347e-05, 8.2423e-06, 4.1381e-06],
                           [2.0377e-05, 1.0326e-05, 5.1977e-06],
                           [6.9109e-05, 3.5002e-05, 1.7610e-05]],
        "st_0h1": [[4.6496e-05, 2.3450e-05, 1.1776e-05],
                   [6.8074e-05, 3.4511e-05, 1.7378e-05],
                   [1.9591e-04, 9.9249e-05, 4.9944e-05]],
    },
    "ex1-fdm-joint": {
        "st_0prime_hinf": [[2.9913e-06, 7.4620e-07, 1.8646e-07],
                           [6.6574e-06, 1.6625e-06, 4.1552e-07],
                           [7.5610e-05, 1.8583e-05, 4.6304e-06]],
        "st_0h1": [[7.9241e-06, 1.9817e-06, 4.9547e-07],
                   [2.1450e-05, 5.3784e-06, 1.3456e-06],
                   [5.3436e-04, 1.3292e-04, 3.3188e-05]],
    },
    "ex1-fdm-general-joint": {
        "st_0prime_hinf": [[1.1756e-05, 2.9399e-06, 7.3505e-07],
                           [2.3316e-05, 5.8392e-06, 1.4606e-06],
                           [2.7890e-04, 6.8873e-05, 1.7179e-05]],
        "st_0h1": [[2.9254e-05, 7.3311e-06, 1.8339e-06],
                   [6.3071e-05, 1.5825e-05, 3.9600e-06],
                   [1.4813e-03, 3.6924e-04, 9.2242e-05]],
    },
    "ex1-fem-tau-h": {
        "st_h1": [[3.1340e-04, 1.5555e-04, 7.7477e-05],
                  [2.9617e-04, 1.4700e-04, 7.3149e-05],
                  [2.8873e-03, 1.4190e-03, 7.0208e-04]],
    },
    "ex1-fem-tau-h2": {
        "st_h1": [[3.0837e-04, 1.5410e-04, 7.7037e-05],
                  [2.8818e-04, 1.4446e-04, 7.2275e-05],
                  [2.7588e-03, 1.3844e-03, 6.9285e-04]],
    },
    "ex1-fem-general-tau-h": {
        "st_h1": [[3.1677e-03, 1.6769e-03, 8.6229e-04],
                  [2.3810e-03, 1.2970e-03, 6.7730e-04],
                  [9.9236e-03, 4.9773e-03, 2.4903e-03]],
    },
    "ex1-fem-general-tau-h2": {
        "st_h1": [[3.5166e-03, 1.7676e-03, 8.8499e-04],
                  [2.7857e-03, 1.4047e-03, 7.0384e-04],
                  [9.8866e-03, 4.9619e-03, 2.4833e-03]],
    },
    "ex2-fdm-time": {
        "final_hinf": [[2.1296e-04, 1.0480e-04, 5.0722e-05],
                       [6.4417e-04, 3.1900e-04, 1.5484e-04],
                       [2.6421e-03, 1.3162e-03, 6.4073e-04]],
        "final_h1": [[4.7631e-04, 2.3441e-04, 1.1345e-04],
                     [1.4418e-03, 7.1397e-04, 3.4655e-04],
                     [5.9332e-03, 2.9557e-03, 1.4389e-03]],
    },
    "ex2-fdm-joint": {
        "final_hinf": [[1.0019e-03, 2.4892e-04, 6.0962e-05],
                       [1.1577e-03, 2.8575e-04, 6.8576e-05],
                       [1.6511e-03, 3.8684e-04, 7.1566e-05]],
        "final_h1": [[2.4312e-03, 6.0597e-04, 1.4917e-04],
                     [2.7401e-03, 6.7931e-04, 1.6489e-04],
                     [3.7190e-03, 8.7433e-04, 1.6538e-04]],
    },
    "ex2-fem-tau-h": {
        "refine_h1": [[6.8170e-02, 3.4093e-02, 1.7047e-02],
                      [7.2097e-02, 3.6046e-02, 1.8021e-02],
                      [8.0231e-02, 4.0452e-02, 2.0323e-02]],
    },
    "ex2-fem-tau-h2": {
        "refine_h1": [[6.8112e-02, 3.4072e-02, 1.7038e-02],
                      [7.1635e-02, 3.5832e-02, 1.7918e-02],
                      [7.5383e-02, 3.7672e-02, 1.8833e-02]],
    },
}


def presets(ci: bool = False) -> Dict[str, Benchmark]:
    """All benchmark studies.

    ``ci`` swaps in a cheaper Example 2 reference and coarser ladders, and
    widens the Example 2 rate bands by 20%.
    """
    e = EXPECTED
    # the CI reference is only 2**10 fine, so its ladders stop 16x coarser
    ex2_tau = [(16, 512), (32, 512), (64, 512)] if ci else [(64, 2048), (128, 2048), (256, 2048)]
    ex2_joint = ladder_from_rule("tau=h^2", [2, 3, 4] if ci else [4, 5, 6], 0.5)
    return {
        "ex1-fdm-time": _fdm_ex1("ex1-fdm-time", "zero_ic", FDM_TAU_LADDER,
                                 e["ex1-fdm-time"], 0.05, 0.05),
        "ex1-fdm-general-time": _fdm_ex1("ex1-fdm-general-time", "general_ic", FDM_TAU_LADDER,
                                         e["ex1-fdm-general-time"], 0.10, 0.05),
        "ex1-fdm-joint": _fdm_ex1("ex1-fdm-joint", "zero_ic",
                                  ladder_from_rule("tau=h^2", [4, 5, 6], 1.0),
                                  e["ex1-fdm-joint"], 0.05, 0.05, 2.0),
        "ex1-fdm-general-joint": _fdm_ex1("ex1-fdm-general-joint", "general_ic",
                                          ladder_from_rule("tau=h^2", [4, 5, 6], 1.0),
                                          e["ex1-fdm-general-joint"], 0.10, 0.05, 2.0),
        "ex1-fem-tau-h": _fem_ex1("ex1-fem-tau-h", "zero_ic", "tau=h",
                                  e["ex1-fem-tau-h"], 0.15, 0.07, 1.0),
        "ex1-fem-tau-h2": _fem_ex1("ex1-fem-tau-h2", "zero_ic", "tau=h^2",
                                   e["ex1-fem-tau-h2"], 0.15, 0.07, 1.0),
        "ex1-fem-general-tau-h": _fem_ex1("ex1-fem-general-tau-h", "general_ic", "tau=h",
                                          e["ex1-fem-general-tau-h"], 0.15, 0.07),
        "ex1-fem-general-tau-h2": _fem_ex1("ex1-fem-general-tau-h2", "general_ic", "tau=h^2",
                                           e["ex1-fem-general-tau-h2"], 0.15, 0.07),
        "ex2-fdm-time": _fdm_ex2("ex2-fdm-time", ex2_tau, e["ex2-fdm-time"], 1.0,
                                 0.08 * (1.2 if ci else 1.0), ci),
        "ex2-fdm-joint": _fdm_ex2("ex2-fdm-joint", ex2_joint, e["ex2-fdm-joint"], 2.0,
                                  0.45 * (1.2 if ci else 1.0), ci),
        "ex2-fem-tau-h": _fem_ex2("ex2-fem-tau-h", "tau=h", e["ex2-fem-tau-h"], 0.15, 0.05, 1.0),
        "ex2-fem-tau-h2": _fem_ex2("ex2-fem-tau-h2", "tau=h^2", e["ex2-fem-tau-h2"], 0.15, 0.05,
                                   1.0),
    }
