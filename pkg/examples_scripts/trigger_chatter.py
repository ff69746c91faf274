"""
Why the event trigger fires on nearly every tick
================================================

The held command is released whenever some axis of the hold error
``u_held - ubar`` exceeds ``sigma + kappa / delta``.  The sign term in
``ubar`` jumps by ``2 (sigma + kappa / delta)`` whenever the matching
component of ``y2`` changes sign, which is already past the threshold.
Once ``y2`` hovers near zero (good tracking) it flips sign on most ticks,
so almost every tick becomes an event.

This script measures the flip rate and shows how the transmission
ratio responds to ``delta`` on a 20 s ellipse run.
"""

import dataclasses

import numpy as np

from aerial_etc.config import load_config, shipped_config
from aerial_etc.sim import simulate

base = load_config(shipped_config("ellipse_et_nn")).model
base = dataclasses.replace(base, sim=dataclasses.replace(base.sim, t_end=20.0))

r = simulate(base)
sgn = np.sign(r["y2"])
flips = np.any(sgn[1:] != sgn[:-1], axis=1)
print(f"ticks with a sign flip in some y2 component: {flips.mean():.1%}")
print(f"transmission ratio at the nominal trigger:   {r.transmission_ratio:.3f}\n")

print(f"{'sigma':>6} {'delta':>6} {'ratio':>7} {'mean |e| (m)':>14}")
for sigma, delta in [(0.05, 0.1), (0.05, 1.0), (0.1, 10.0), (0.3, 10.0)]:
    tp = dataclasses.replace(base.trigger, sigma=sigma, delta=delta)
    rr = simulate(dataclasses.replace(base, trigger=tp))
    err = np.abs(rr["p"] - rr["pd"])[rr["t"] >= 5.0].mean()
    print(f"{sigma:>6} {delta:>6} {rr.transmission_ratio:>7.3f} {err:>14.4f}")
