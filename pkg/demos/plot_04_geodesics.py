"""
Numerical CC geodesics
======================

Shortest horizontal curves are found by optimizing piecewise-constant
controls with an endpoint penalty.  For targets above the origin the
answer is known: the planar projection is a circular arc enclosing area
``|z| / 4`` with its chord.
"""

import numpy as np
from scipy.optimize import brentq

from heisgeo.geodesic_solver import refine_and_compare, solve_cc_geodesic, solve_koranyi_polyline
from heisgeo.heisenberg import koranyi_distance, twist


def arc_length(q):
    chord = np.hypot(q[0], q[1])
    area = abs(twist(q, np.zeros(3))) / 4
    if chord == 0:
        return np.sqrt(4 * np.pi * area)
    f = lambda th: (chord / (2 * np.sin(th))) ** 2 * (2 * th - np.sin(2 * th)) / 2 - area  # noqa: E731
    th = brentq(f, 1e-9, np.pi - 1e-9)
    return th * chord / np.sin(th)


# %%
# Compare against the arc for a few targets.
for q in ([1, 0, 0], [0, 0, 1 / (4 * np.pi)], [1, 0, 0.3], [0.5, 0.5, -0.4]):
    q = np.array(q, dtype=float)
    rep = solve_cc_geodesic(np.zeros(3), q, 128)
    print(f"q={q}  solver {rep.length:.6f}  arc {arc_length(q):.6f}  d_K {koranyi_distance(np.zeros(3), q):.6f}"
          f"  starts {np.round(rep.restart_lengths, 6)}")

# %%
# Refining a coarse solution never makes it longer.
coarse = solve_cc_geodesic(np.zeros(3), [0, 0, 1 / (4 * np.pi)], 32)
rec = refine_and_compare(coarse, 4)
print(f"N=32: {rec.coarse_length:.6f}  ->  N=128: {rec.refined_length:.6f}")

# %%
# Shortest Koranyi polylines start near the distance 0.282 with few
# vertices and climb towards the CC value 1/2 as vertices are added, so the
# distance is not the infimum of curve lengths.
for m in (4, 8, 24):
    poly = solve_koranyi_polyline(np.zeros(3), [0, 0, 1 / (4 * np.pi)], m)
    print(f"polyline with {m:2d} vertices: {poly.length:.5f}")
