import json

import numpy as np
import pytest

from tfkac import ConvergenceReport, StudyConfig, emit_report, ladder_from_rule, run_study
from tfkac.errors import BadConfig, CellFailure, IoFailure
from tfkac.study import package_version, render_report


def small(**kw):
    base = dict(scheme="fdm", example=1, params=[(0.5, 3.0, 5.0), (0.3, 3.0, 1 + 1j)],
                ladder=[(8, 8), (16, 16)], name="small")
    base.update(kw)
    return StudyConfig(**base)


def test_ladder_rules():
    assert ladder_from_rule("tau=h", [2, 3], 1.0) == [(4, 4), (8, 8)]
    assert ladder_from_rule("tau=h^2", [2, 3], 1.0) == [(16, 4), (64, 8)]
    # tau is measured against T
    assert ladder_from_rule("tau=h", [4], 0.5) == [(8, 16)]
    with pytest.raises((BadConfig, ValueError)):
        ladder_from_rule("tau=h^3", [2], 1.0)


@pytest.mark.parametrize("bad", [
    dict(scheme="fvm"), dict(variant="other"), dict(example=4), dict(ladder=[(8, 8)]),
    dict(ladder=[(16, 16), (8, 8)]), dict(norms=["nope"]), dict(norms=["refine_h1"]),
    dict(example=2), dict(example=2, reference=(64, 24)),
])
def test_bad_configs(bad):
    with pytest.raises(BadConfig):
        small(**bad)


def test_from_dict_rejects_unknown_keys():
    d = small().to_dict()
    d["colour"] = "red"
    with pytest.raises(BadConfig):
        StudyConfig.from_dict(d)


def test_dict_round_trip():
    cfg = small()
    assert StudyConfig.from_dict(cfg.to_dict()) == cfg
    json.dumps(cfg.to_dict())


def test_deterministic_and_json_round_trip():
    cfg = small()
    a, b = run_study(cfg), run_study(cfg)
    for fmt in ("csv", "markdown", "json"):
        assert render_report(a, fmt) == render_report(b, fmt)
    back = ConvergenceReport.from_json(a.to_json())
    assert render_report(back, "markdown") == render_report(a, "markdown")
    np.testing.assert_array_equal(back.error_table("st_0h1"), a.error_table("st_0h1"))


def test_rates_are_about_one():
    rep = run_study(small(ladder=[(32, 256), (64, 256)]))
    assert np.all(np.abs(rep.rates("st_0h1") - 1) < 0.1)


def test_empty_params_header_only():
    rep = run_study(small(params=[]))
    md = render_report(rep, "markdown").strip().splitlines()
    assert len(md) == 4 and md[-1].startswith("|---|---|")
    assert render_report(rep, "csv").strip().count("\n") == 0


def test_version_embedded():
    rep = run_study(small(params=[(0.5, 3.0, 5.0)]))
    assert rep.version == package_version()
    assert rep.version in render_report(rep, "markdown")
    assert json.loads(rep.to_json())["version"] == rep.version


def test_timings_opt_in():
    rep = run_study(small(params=[(0.5, 3.0, 5.0)]))
    assert "runtime" not in rep.to_json()
    assert "runtime" in rep.to_json(timings=True)
    assert "runtime_s" in render_report(rep, "csv", timings=True)


def test_parallel_matches_serial():
    cfg = small()
    assert render_report(run_study(cfg, jobs=2), "json") == render_report(run_study(cfg), "json")


def test_cell_failure():
    with pytest.raises(CellFailure):
        run_study(small(params=[(1.5, 3.0, 5.0)]))


def test_emit_report(tmp_path):
    rep = run_study(small(params=[(0.5, 3.0, 5.0)]))
    path = tmp_path / "sub" / "table.md"
    text = emit_report(rep, "markdown", str(path))
    assert path.read_text() == text
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoFailure):
        emit_report(rep, "csv", str(blocker / "table.csv"))
    with pytest.raises(BadConfig):
        render_report(rep, "xml")


def test_example2_studies_small():
    fdm = run_study(StudyConfig(scheme="fdm", example=2, params=[(0.5, 3.0, 5j)],
                                ladder=[(8, 16), (16, 16)], t_final=0.5, reference=(64, 64)))
    assert np.all(np.isfinite(fdm.error_table("final_hinf")))
    fem = run_study(StudyConfig(scheme="fem", example=2, params=[(0.5, 3.0, 5j)],
                                ladder=ladder_from_rule("tau=h", [2, 3, 4], 0.5), t_final=0.5))
    table = fem.error_table("refine_h1")
    assert np.all(np.isfinite(table[:, :2])) and np.isnan(table[0, 2])
