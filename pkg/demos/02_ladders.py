"""
Two-leg ladders
===============

Five rungs, two legs. With leg-major ordering the first five atoms form
leg 0, which is subsystem A by default. A rung-major cut is available too.
"""

# %%
import numpy as np

from rydent import sweep_ladder

ratios = np.round(np.arange(0.5, 3.01, 0.1), 10)

# %%
for ay in (0.5, 2.0):
    for cut in ("ladder-legs", "ladder-rungs"):
        rows = sweep_ladder(n_rungs=5, ay_over_ax=ay, rb_over_ax=ratios, partition=cut)
        vn = np.array([r.s_vn_a for r in rows])
        est = np.array([r.estimator for r in rows])
        dev = np.abs(vn - 1.25 * est)
        # best single constant in the least-squares sense, for comparison
        c_ls = float(vn @ est / (est @ est))
        print(
            f"a_y={ay}a_x {cut:13s} max dev {dev.max():.3f} at Rb/ax={ratios[dev.argmax()]:.1f}"
            f"  Pearson {np.corrcoef(vn, est)[0, 1]:.4f}  LS constant {c_ls:.3f}"
        )
