"""
The Koranyi metric is not a length metric
==========================================

A horizontal circle lift climbs from the origin to ``(0, 0, 1/(4 pi))``.
Its Koranyi length equals its Carnot-Caratheodory length, 1/2, yet the
Koranyi distance between its endpoints is only about 0.282.  No curve can
be shorter than the CC geodesic, so the distance is never attained by a
curve.
"""

import numpy as np

from heisgeo.heisenberg import EXAMPLE_HEIGHT, cc_length, example_geodesic, example_geodesic_derivative, koranyi_distance
from heisgeo.metric_core import SampledCurve, curve_length

# %%
# Sample the curve with its exact velocity; the horizontality residual is
# zero up to rounding, so the CC length is defined.
curve = SampledCurve.from_function(example_geodesic, np.linspace(0, 1, 2001), example_geodesic_derivative)
print(f"CC length           {cc_length(curve):.12f}")

# %%
# The Koranyi length is a supremum over partitions.  Dyadic refinement
# approaches it from below; the history shows the ladder.
report = curve_length(example_geodesic, (0, 1), koranyi_distance, tol=1e-5)
for level, value in enumerate(report.history):
    print(f"  2^{level:<2d} intervals  {value:.9f}")
print(f"Koranyi length      {report.value:.9f}  (converged={report.converged})")

# %%
# The endpoints are much closer than that.
d = koranyi_distance(example_geodesic(0.0), example_geodesic(1.0))
print(f"d_K(endpoints)      {d:.10f}   sqrt(1/(4 pi)) = {np.sqrt(EXAMPLE_HEIGHT):.10f}")
print(f"gap L_K - d_K       {report.value - d:.6f}")
