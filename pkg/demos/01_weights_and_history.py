# Weights of the tempered Grunwald scheme and the discrete substantial derivative.
# Run with: python demos/01_weights_and_history.py

import math

import numpy as np

from tfkac import CoefficientTable, HistoryWeights, d_coeffs, substantial_history_sum

#%% the three weight sequences for one step size
gamma, lam, tau = 0.5, 3.0, 1 / 64
table = CoefficientTable(gamma, lam, tau, 8)
print(table.to_csv())

# g_0 = 1 and every later weight is negative; the tempered ones decay faster
print("plain   ", table.g_plain[:4])
print("tempered", table.g_tempered[:4])
print("d_0 =", table.d[0], " 1 - exp(-gamma lam tau) (lam tau)^gamma =",
      1 - math.exp(-gamma * lam * tau) * (lam * tau) ** gamma)

#%% partial sums of d decrease to a positive floor
d = d_coeffs(gamma, lam, tau, 5000)
lt = lam * tau
floor = math.exp(-gamma * lt) * (math.expm1(lt) ** gamma - lt**gamma)
print("min partial sum", np.cumsum(d).min(), "floor", floor)

#%% the discrete operator applied to G = exp(-(lam + r) t) t^2 is first order accurate
rate = 5.0
for n in (64, 128, 256, 512):
    tau = 1.0 / n
    t = np.arange(n + 1) * tau
    c = lam + rate
    hist = (np.exp(-c * t) * t**2)[:, None]
    d = d_coeffs(gamma, lam, tau, n)
    got = substantial_history_sum(d, HistoryWeights([rate], tau, n), hist, n, gamma)[0]
    exact = (math.exp(-c) * 2 / math.gamma(3 - gamma)
             - math.exp(-gamma * lam * tau) * lam**gamma * hist[-1, 0])
    print(f"N={n:4d}  error={abs(got - exact):.3e}")
