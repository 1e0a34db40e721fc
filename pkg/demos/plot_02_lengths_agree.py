"""
Koranyi length equals CC length on horizontal curves
====================================================

Random trigonometric planar curves are lifted to horizontal curves, then
measured twice: by Koranyi polygonal sums and by integrating planar speed.
The two agree, and the gap shrinks as the sampling is refined.
"""

import numpy as np

from heisgeo.heisenberg import cc_length, koranyi_distance
from heisgeo.metric_core import polygonal_length
from heisgeo.verify import random_trig_curves

curves = random_trig_curves(count=5, max_degree=4, seed=1)

# %%
# For each curve print the relative gap at a few sample counts.
print("curve  " + "  ".join(f"n={n:<6d}" for n in (256, 1024, 4096)))
for k, c in enumerate(curves):
    gaps = []
    for n in (256, 1024, 4096):
        lifted = c.lift(n)
        l_cc = cc_length(lifted)
        gaps.append(abs(polygonal_length(lifted, koranyi_distance) - l_cc) / l_cc)
    print(f"{k:5d}  " + "  ".join(f"{g:.2e}" for g in gaps))

# %%
# A vertical segment is the opposite extreme: its polygonal sums grow like
# the square root of the number of intervals and never settle.
for n in (1, 16, 256, 4096):
    knots = np.linspace(0, 1, n + 1)
    pts = np.column_stack([0 * knots, 0 * knots, knots])
    print(f"vertical segment, {n:5d} intervals: {np.sum(koranyi_distance(pts[1:], pts[:-1])):.3f}")
