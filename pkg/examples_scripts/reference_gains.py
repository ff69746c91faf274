"""
Reference gains vs the shipped filter retune
============================================

With the command filter at its reference setting (rho = 0.1,
filt_eps = 0.3) the first compensator state winds up and the loop leaves
the velocity envelope before the end of the run.  The shipped experiment
configurations raise rho and lower filt_eps; everything else is equal.
"""

import numpy as np

from aerial_etc.config import load_config, shipped_config
from aerial_etc.harness import diagnostic_tail
from aerial_etc.sim import simulate

for name in ("reference_gains_ellipse", "ellipse_et_nn"):
    cfg = load_config(shipped_config(name))
    f = cfg.model.filt
    r = simulate(cfg.model)
    peak = np.linalg.norm(r["iota1"], axis=1).max()
    print(f"{name}: rho={f.rho}, filt_eps={f.filt_eps}, peak |iota1| = {peak:.3g}, "
          f"ran {r['t'][-1]:.2f} s, diverged = {r.diverged}")
    if r.diverged:
        print(diagnostic_tail(r, 3))
    print()
