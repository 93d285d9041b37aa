"""A small toric-code sweep, a scaling collapse and a heuristic fit.

Takes a few minutes; raise ``trials`` for smoother curves.
"""

import numpy as np

from cssmaxsat import fitting, harness

cfg = harness.ExperimentConfig(
    code="toric",
    p=[0.12, 0.14, 0.16, 0.18],
    distances=[3, 5],
    trials=400,
    seed=1,
    engine="rc2",
    output="toric_sweep.jsonl",  # rerunning resumes from here
)
records = harness.mc_sweep(cfg)
for r in records:
    print(f"d={r.d} p={r.p:.2f} p_L={r.p_L:.3f} [{r.ci_low:.3f}, {r.ci_high:.3f}] t={r.t_mean * 1e3:.1f}ms")

curves = harness.curves_by_distance(records)
print("crossings:", fitting.crossing_count(curves[3][0], curves[3][1], curves[5][1]))
fit = fitting.fit_collapse(curves)
print(f"collapse: p_th={fit.p_th:.4f} nu={fit.nu:.3f}")
harness.export(records, "toric_sweep.csv", "csv")

# low-p behaviour of the rotated code and its pseudo-threshold
low = harness.mc_sweep(
    harness.ExperimentConfig(code="rotated-surface", p=list(np.linspace(0.02, 0.1, 5)), distances=[3], trials=2000, seed=2)
)
p = np.array([r.p for r in low])
pl = np.array([r.p_L for r in low])
h = fitting.fit_heuristic(p, pl)
print(f"heuristic d_fit={h.d_fit:.2f}, pseudo-threshold {fitting.pseudo_threshold(h):.4f}")
