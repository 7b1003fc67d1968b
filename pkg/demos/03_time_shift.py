"""
Shifting the return anchor against the sign
===========================================

With independent signs a trade moves the price only in its own second, so
the response is nonzero only when the return window covers that second:
shifts from 1 to tau.
"""

import numpy as np

from priceresponse import (EstimatorConfig, SynthParams, build_midpoint_series, generate, run_shift_scan,
                           sign_series_for_day)

p = SynthParams(days=10, p_persist=0.5, impact=1e-4, noise=1e-4, seed=3)
market = generate(p)
mids = [build_midpoint_series(d.quotes, p.window) for d in market.days]
signs = [sign_series_for_day(d.trades, p.window) for d in market.days]

# %%
# Fixed lag, varying shift.
tau = 10
scan = run_shift_scan(mids, signs, "fixed_tau_vary_shift", tau, np.arange(-5, 16), "physical",
                      EstimatorConfig(tau_max=tau))
for t_s, v, se in zip(scan.grid, scan.values(), scan.stderrs()):
    print(f"t_s={t_s:3d}  R={v: .3e}  R/SE={v / se: 6.1f}")

# %%
# Fixed shift, varying lag: flat before the shift, a step after it.
scan = run_shift_scan(mids, signs, "fixed_shift_vary_tau", 5, np.arange(1, 11), "physical",
                      EstimatorConfig(tau_max=10))
c = scan.curves[0]
print("R/SE by lag:", np.round(c.values / c.stderr, 1))
