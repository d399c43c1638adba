"""Command-line interface: ``tfkac <subcommand> [options]``.

Settings come from an optional TOML file (``--config``) and are overridden
by flags.  Recognised sections and keys::

    [model]      gamma, lambda, kgamma, p_re, p_im
    [grid]       M, N, T
    [problem]    example, variant ("zero-ic" | "general-ic"), quad_order
    [coeffs]     tau, N
    [inversion]  A_grid, a_tilde, k1, k2, x0, t, transform
    [study]      preset, ci, check, plus any StudyConfig field
    [output]     out, format, jobs

Exit status is 0 on success, 2 when ``convergence --check`` finds a value
outside its tolerance, and 1 on any error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .coeffs import CoefficientTable
from .core import ModelParams, build_space_grid, build_time_grid
from .errors import BadConfig, FeynmanKacError, IoFailure
from .laplace import InversionConfig, euler_invert, solver_evaluator
from .manufactured import EXAMPLES, example3, example3_pdf
from .norms import h1_semi, l2_h, max_h
from .study import (StudyConfig, build_problem, package_version, render_report, run_study,
                    solve)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FORMATS = ("csv", "markdown", "json")
SECTIONS = ("model", "grid", "problem", "coeffs", "inversion", "study", "output")


class _Parser(argparse.ArgumentParser):
    # usage errors are plain errors here; status 2 is reserved for --check
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise BadConfig(f"{path}: {exc}") from exc
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise BadConfig(f"unknown config sections: {sorted(unknown)}")
    return data


class Settings:
    """Flag value if given, else config value, else default."""

    def __init__(self, args, config):
        self.args = args
        self.config = config

    def get(self, dest, section, key, default=None):
        v = getattr(self.args, dest, None)
        if v is not None:
            return v
        return self.config.get(section, {}).get(key, default)


def _common(p):
    p.add_argument("--config", help="TOML settings file; flags override it")
    p.add_argument("--out", help="output directory ('-' for stdout only)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--format", choices=FORMATS, help="report format")


def _model_flags(p):
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--kgamma", type=float)
    p.add_argument("--p-re", type=float)
    p.add_argument("--p-im", type=float)


def _model(s: Settings, default_p=0.0) -> ModelParams:
    p = complex(default_p)
    return ModelParams(
        gamma=float(s.get("gamma", "model", "gamma", 0.5)),
        lam=float(s.get("lam", "model", "lambda", 0.0)),
        k_gamma=float(s.get("kgamma", "model", "kgamma", 1.0)),
        p=complex(float(s.get("p_re", "model", "p_re", p.real)),
                  float(s.get("p_im", "model", "p_im", p.imag))))


def _out_dir(s: Settings, default="tfkac-out"):
    out = s.get("out", "output", "out", default)
    if out != "-":
        try:
            os.makedirs(out, exist_ok=True)
        except OSError as exc:
            raise IoFailure(f"cannot create {out}: {exc}") from exc
    return out


def _write(out, name, text):
    if out == "-":
        return
    path = os.path.join(out, name)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def cmd_coeffs(s: Settings):
    gamma = float(s.get("gamma", "model", "gamma", 0.5))
    lam = float(s.get("lam", "model", "lambda", 0.0))
    n = int(s.get("n", "coeffs", "N", 16))
    tau = float(s.get("tau", "coeffs", "tau", 1.0 / max(n, 1)))
    table = CoefficientTable(gamma, lam, tau, n)
    fmt = s.get("format", "output", "format", "csv")
    if fmt == "json":
        text = json.dumps({"gamma": gamma, "lambda": lam, "tau": tau, "N": n,
                           "g_plain": table.g_plain.tolist(),
                           "g_tempered": table.g_tempered.tolist(),
                           "d": table.d.tolist(), "q_partial": table.q_partial.tolist()},
                          indent=2)
    elif fmt == "csv":
        text = table.to_csv()
    else:
        raise BadConfig("coeffs supports csv and json output")
    out = s.get("out", "output", "out", "-")
    if out == "-":
        sys.stdout.write(text)
    else:
        _write(_out_dir(s), f"coeffs.{'json' if fmt == 'json' else 'csv'}", text)
    return 0


def cmd_solve(s: Settings, scheme: str):
    example = int(s.get("example", "problem", "example", 1))
    if example not in EXAMPLES:
        raise BadConfig(f"example must be 1, 2 or 3, got {example}")
    variant = s.get("variant", "problem", "variant", "zero-ic").replace("-", "_")
    params = _model(s, default_p=5.0)
    m = int(s.get("m", "grid", "M", 64))
    n = int(s.get("n", "grid", "N", 64))
    t_final = float(s.get("t", "grid", "T", 1.0))
    quad = int(s.get("quad_order", "problem", "quad_order", 4))
    cfg = StudyConfig(scheme=scheme, variant=variant, example=example,
                      params=[(params.gamma, params.lam, params.p)], ladder=[(1, 1), (2, 2)],
                      t_final=t_final, k_gamma=params.k_gamma, quad_order=quad,
                      reference=(2, 2) if example == 2 and scheme == "fdm" else None)
    problem, hist = solve(cfg, params, n, m)
    sg = hist.sgrid
    x = sg.nodes
    w = hist.with_boundary(hist.tgrid.n_count)
    g = np.asarray(problem.reconstruct(x, t_final, w))
    exact = None if problem.exact is None else np.asarray(
        problem.exact(x, t_final) + problem.offset(x, t_final))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "G_re", "G_im"] + (["exact_re", "exact_im"] if exact is not None else []))
    for i, xi in enumerate(x):
        row = [f"{xi:.17g}", f"{g[i].real:.17g}", f"{g[i].imag:.17g}"]
        if exact is not None:
            row += [f"{exact[i].real:.17g}", f"{exact[i].imag:.17g}"]
        wr.writerow(row)
    inner = g[1:-1]
    summary = {"max": float(max_h(inner)), "l2": float(l2_h(inner, sg)),
               "h1_semi": float(h1_semi(inner, sg))}
    if exact is not None:
        err = exact[1:-1] - inner
        summary.update(error_max=float(max_h(err)), error_l2=float(l2_h(err, sg)),
                       error_h1_semi=float(h1_semi(err, sg)))
    manifest = {"command": f"solve-{scheme}", "version": package_version(),
                "inputs": {"gamma": params.gamma, "lambda": params.lam,
                           "kgamma": params.k_gamma, "p_re": params.p.real,
                           "p_im": params.p.imag, "M": m, "N": n, "T": t_final,
                           "example": example, "variant": variant.replace("_", "-"),
                           **({"quad_order": quad} if scheme == "fem" else {})},
                "final_time_norms": summary}
    out = _out_dir(s)
    text = json.dumps(manifest, indent=2, sort_keys=True)
    _write(out, "solution.csv", buf.getvalue())
    _write(out, "manifest.json", text + "\n")
    sys.stdout.write(text + "\n")
    return 0


def _study_config(s: Settings):
    from .benchmarks import presets
    study = dict(s.config.get("study", {}))
    preset = s.args.preset or study.pop("preset", None)
    ci = bool(s.args.ci or study.pop("ci", False))
    study.pop("check", None)
    bench = None
    if preset:
        table = presets(ci)
        if preset not in table:
            raise BadConfig(f"unknown preset {preset!r}; choose from {sorted(table)}")
        bench = table[preset]
        cfg = StudyConfig.from_dict({**bench.config.to_dict(), **study})
    elif study:
        cfg = StudyConfig.from_dict(study)
    else:
        raise BadConfig("convergence needs --preset or a [study] section")
    return cfg, bench


def cmd_convergence(s: Settings):
    from .benchmarks import check, presets
    if s.args.list:
        for name, b in presets().items():
            print(f"{name:24s} {b.config.scheme} example {b.config.example} {b.config.variant}")
        return 0
    cfg, bench = _study_config(s)
    want_check = bool(s.args.check or s.config.get("study", {}).get("check", False))
    if want_check and bench is None:
        raise BadConfig("--check needs a preset with expected values")
    jobs = int(s.get("jobs", "output", "jobs", 1))
    report = run_study(cfg, jobs=jobs)
    fmt = s.get("format", "output", "format", "markdown")
    text = render_report(report, fmt, timings=s.args.timings)
    out = s.get("out", "output", "out", "-")
    if out != "-":
        ext = {"csv": "csv", "markdown": "md", "json": "json"}[fmt]
        _write(_out_dir(s), f"{cfg.name}.{ext}", text)
    sys.stdout.write(text)
    if want_check:
        lines = check(report, bench)
        for line in lines:
            print(line)
        failed = sum(not l.passed for l in lines)
        print(f"{len(lines) - failed}/{len(lines)} checks passed")
        return 2 if failed else 0
    return 0


def parse_grid(text: str) -> np.ndarray:
    """``"0.1,0.5,1"`` or ``"start:stop:count"`` (inclusive, evenly spaced)."""
    text = str(text).strip()
    try:
        if ":" in text:
            a, b, c = text.split(":")
            return np.linspace(float(a), float(b), int(c))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise BadConfig(f"cannot parse A grid {text!r}") from exc


def _invert_one(job):
    amount, spec = job
    cfg_kw = dict(a_tilde=spec["a_tilde"], k1=spec["k1"], k2=spec["k2"])
    if spec["transform"] == "pole":
        evaluator = lambda p: 1.0 / (p + 2.0)
    else:
        params = ModelParams(spec["gamma"], spec["lam"], spec["kgamma"])
        evaluator = solver_evaluator(params, example3, spec["M"], spec["N"], spec["t"],
                                     spec["x0"])
    return euler_invert(float(amount), InversionConfig(evaluator, **cfg_kw))


def cmd_invert(s: Settings):
    transform = s.get("transform", "inversion", "transform", "example3")
    if transform not in ("example3", "pole"):
        raise BadConfig(f"transform must be example3 or pole, got {transform!r}")
    params = _model(s)
    spec = {"transform": transform, "gamma": params.gamma, "lam": params.lam,
            "kgamma": params.k_gamma,
            "a_tilde": float(s.get("a_tilde", "inversion", "a_tilde", 18.4)),
            "k1": int(s.get("k1", "inversion", "k1", 25)),
            "k2": int(s.get("k2", "inversion", "k2", 15)),
            "x0": float(s.get("x0", "inversion", "x0", 0.5)),
            "t": float(s.get("t", "inversion", "t", 0.5)),
            "M": int(s.get("m", "grid", "M", 1024)),
            "N": int(s.get("n", "grid", "N", 512))}
    InversionConfig(lambda p: p, spec["a_tilde"], spec["k1"], spec["k2"])  # validate early
    amounts = parse_grid(s.get("a_grid", "inversion", "A_grid", "0.05:2:14"))
    if amounts.size == 0 or np.any(amounts <= 0):
        raise BadConfig("A grid must be non-empty and positive")
    jobs = int(s.get("jobs", "output", "jobs", 1))
    work = [(a, spec) for a in amounts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(min(jobs, len(work))) as pool:
            numeric = list(pool.map(_invert_one, work))
    else:
        numeric = [_invert_one(w) for w in work]
    if transform == "pole":
        analytic = np.exp(-2.0 * amounts)
    else:
        analytic = example3_pdf(spec["x0"], spec["t"], amounts, spec["lam"])
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["A", "pdf_numeric", "pdf_analytic", "abs_error"])
    for a, num, ana in zip(amounts, numeric, analytic):
        wr.writerow([f"{a:.12g}", f"{num:.12e}", f"{ana:.12e}", f"{abs(num - ana):.3e}"])
    out = s.get("out", "output", "out", "-")
    if out != "-":
        _write(_out_dir(s), "inversion.csv", buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_verify(s: Settings):
    from .verification import run_all
    results = run_all()
    for r in results:
        print(r)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tfkac", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("coeffs", help="dump the weight sequences as CSV")
    _common(p)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--N", dest="n", type=int)

    for scheme in ("fdm", "fem"):
        p = sub.add_parser(f"solve-{scheme}", help=f"one {scheme.upper()} solve at the final time")
        _common(p)
        _model_flags(p)
        p.add_argument("--M", dest="m", type=int)
        p.add_argument("--N", dest="n", type=int)
        p.add_argument("--T", dest="t", type=float)
        p.add_argument("--example", type=int, choices=(1, 2, 3))
        p.add_argument("--variant", choices=("zero-ic", "general-ic"))
        if scheme == "fem":
            p.add_argument("--quad-order", type=int)

    p = sub.add_parser("convergence", help="run a convergence study")
    _common(p)
    p.add_argument("--preset", help="built-in benchmark study (see --list)")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    p.add_argument("--check", action="store_true", help="compare with expected values")
    p.add_argument("--ci", action="store_true", help="cheaper Example 2 reference")
    p.add_argument("--timings", action="store_true", help="include runtimes (not reproducible)")

    p = sub.add_parser("invert", help="Euler inversion of the transform in A")
    _common(p)
    _model_flags(p)
    p.add_argument("--A-grid", dest="a_grid", help="'a,b,c' or 'start:stop:count'")
    p.add_argument("--a-tilde", type=float)
    p.add_argument("--k1", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--x0", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--M", dest="m", type=int)
    p.add_argument("--N", dest="n", type=int)
    p.add_argument("--transform", choices=("example3", "pole"),
                   help="example3 (solver-backed) or pole, the pair 1/(p+2)")

    p = sub.add_parser("verify", help="run the oracle-equivalence suite")
    _common(p)
    return parser


COMMANDS = {"coeffs": cmd_coeffs, "solve-fdm": lambda s: cmd_solve(s, "fdm"),
            "solve-fem": lambda s: cmd_solve(s, "fem"), "convergence": cmd_convergence,
            "invert": cmd_invert, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args, load_config(args.config))
        return COMMANDS[args.command](settings)
    except (FeynmanKacError, ValueError, OSError) as exc:
        print(f"tfkac {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
