# From the transform G(p, t) back to the density in A.
# Run with: python demos/03_inversion.py   (under a minute)

import math

import numpy as np

from tfkac import InversionConfig, ModelParams, euler_invert, example3, example3_pdf
from tfkac import solver_evaluator

#%% a known pair first: 1/(p + 2) is the transform of exp(-2A)
cfg = InversionConfig(lambda p: 1 / (p + 2))
for a in (0.1, 0.5, 1.0, 2.0):
    print(f"A={a:.1f}  numeric={euler_invert(a, cfg):.10f}  exact={math.exp(-2 * a):.10f}")

#%% Euler averaging does the heavy lifting
for k2 in (0, 5, 15):
    c = InversionConfig(lambda p: 1 / (p + 2), k2=k2)
    print("K2 =", k2, " error at A=1:", abs(euler_invert(1.0, c) - math.exp(-2)))

#%% every transform value is now a full solver run at the grid node x0 = 0.5
params = ModelParams(0.3, 0.0, 1.0)
ev = solver_evaluator(params, example3, 128, 64, 0.5, 0.5)
cfg = InversionConfig(ev)
amounts = np.linspace(0.2, 2.0, 4)
numeric = np.array([euler_invert(a, cfg) for a in amounts])
exact = example3_pdf(0.5, 0.5, amounts, 0.0)
print(np.column_stack([amounts, numeric, exact, abs(numeric - exact)]))
