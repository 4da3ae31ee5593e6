"""Crossover from isolated resonances to plateau transmission.

Sweeping the global coupling on a 4x4 cavity: average transmission rises,
peaks near matched coupling, and falls again in the overdamped regime. The
transport maximum coincides with the strongest loss of phase rigidity, the
interior wave being furthest from a standing wave exactly where the cavity
is most open.
"""

import json

import numpy as np

from opencavity import parse_config, run_study

CONFIG = {
    "version": 1,
    "study": "crossover",
    "model": {
        "nx": 4,
        "ny": 4,
        "alpha": 1.0,
        "leads": [
            {"contact": [0, 0], "coupling_w": 1.0},
            {"contact": [3, 3], "coupling_w": 1.0},
        ],
    },
    "e_grid": {"min": -1.9, "max": 1.9, "points": 80},
    "alpha_grid": {"min": 0.03, "max": 6.0, "points": 16, "scale": "log"},
}

result = run_study(parse_config(json.dumps(CONFIG)))
print("4x4 cavity, corner leads, log sweep of the coupling")
print()
print("alpha      avg T     min rho   gamma_max   peaks")
for alpha, avg_t, min_rho, g_max, _, n_peaks in result.rows:
    bar = "#" * int(50 * avg_t)
    print(f"{alpha:7.3f}   {avg_t:7.4f}   {min_rho:7.4f}   {g_max:9.4f}"
          f"   {int(n_peaks):3d}  {bar}")

avg_t = result.rows[:, 1]
min_rho = result.rows[:, 2]
k = int(np.argmax(avg_t))
corr = np.corrcoef(avg_t, 1.0 - min_rho)[0, 1]
print()
print(f"transport maximum at alpha = {result.rows[k, 0]:.4f} "
      f"(interior point of the sweep)")
print(f"correlation of avg T with rigidity loss 1 - min rho: {corr:.3f}")
print(f"wall time {result.wall_time:.2f} s")
