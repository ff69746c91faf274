"""
Ellipse tracking: event-triggered NN controller vs PID
======================================================

Runs the shipped ellipse configurations for the event-triggered NN
controller and the PID baseline, then prints the per-axis error table.
Telemetry and metrics land in ``out/``.
"""

from aerial_etc.config import load_config, shipped_config
from aerial_etc.harness import compare, format_comparison, run_experiment

outcomes = {}
for ctrl in ("et_nn", "baseline_pid"):
    cfg = load_config(shipped_config(f"ellipse_{ctrl}"))
    outcomes[ctrl] = run_experiment(cfg, "out")
    m = outcomes[ctrl].metrics
    print(f"{ctrl:>13}: {m.total_ticks} ticks, {m.event_count} transmissions, {m.runtime:.2f} s wall")

print()
print(format_comparison(compare(outcomes["et_nn"].metrics, outcomes["baseline_pid"].metrics)))

# the compensated error should settle well inside a few centimetres
r = outcomes["et_nn"].result
print(f"\nfinal V_s = {r['V_s'][-1]:.3e}, peak |fhat| = {abs(r['fhat']).max():.3f}")
