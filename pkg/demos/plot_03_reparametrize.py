"""
Arc-length reparametrization
============================

A curve that stalls halfway is reparametrized by normalized Koranyi arc
length.  The stall disappears and the new curve is Lipschitz with constant
equal to its length.
"""

import numpy as np

from heisgeo.heisenberg import horizontal_lift, koranyi_distance
from heisgeo.metric_core import (
    Partition,
    SampledCurve,
    arclength_reparametrize,
    length_profile,
    lipschitz_ratio,
    polygonal_length,
)

t = np.linspace(0, 1, 101)
stalled = SampledCurve(Partition(t), np.column_stack([np.minimum(2 * t, 1), 0 * t, 0 * t]))

# %%
# The length profile is flat on the second half.
tau = length_profile(stalled, koranyi_distance)
print("profile at t = 0.25, 0.5, 0.75, 1:", tau[[25, 50, 75, 100]])

r = arclength_reparametrize(stalled, koranyi_distance)
print(f"{len(stalled)} samples before, {len(r)} after; max |x(s) - s| = {np.abs(r.points[:, 0] - r.t).max():.1e}")

# %%
# On a lifted spiral the Lipschitz ratio over all sample pairs matches the length.
s = np.linspace(0, 3, 300)
spiral = horizontal_lift(s, np.column_stack([s * np.cos(4 * s), s * np.sin(4 * s)]))
rs = arclength_reparametrize(spiral, koranyi_distance)
L = polygonal_length(spiral, koranyi_distance)
print(f"length {L:.6f}, length after {polygonal_length(rs, koranyi_distance):.6f}, "
      f"Lipschitz ratio {lipschitz_ratio(rs, koranyi_distance):.6f}")
