# Time and joint convergence of both schemes on the problem with a known solution.
# Run with: python demos/02_example1_convergence.py   (about half a minute)

import numpy as np

from tfkac import StudyConfig, run_study
from tfkac.benchmarks import check, presets
from tfkac.study import render_report

#%% a small finite-difference study by hand
cfg = StudyConfig(scheme="fdm", example=1, params=[(0.5, 3.0, 5.0), (0.8, 3.0, 10j)],
                  ladder=[(16, 256), (32, 256), (64, 256)], name="fdm-time-small")
report = run_study(cfg)
print(render_report(report, "markdown"))

#%% rates directly from the report
print(np.round(report.rates("st_0h1"), 3))

#%% the finite-element preset with its reference values
bench = presets()["ex1-fem-tau-h"]
report = run_study(bench.config)
print(render_report(report, "markdown"))
lines = check(report, bench)
print(sum(l.passed for l in lines), "of", len(lines), "checks pass")
