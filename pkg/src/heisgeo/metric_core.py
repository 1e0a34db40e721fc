"""Curve length, length profiles and reparametrization in a metric space.

Nothing in this module knows about the Heisenberg group.  A metric is any
callable ``metric(p, q)`` that accepts two ``(..., k)`` arrays of points and
returns the broadcast array of distances, e.g.
:func:`heisgeo.heisenberg.koranyi_distance` or :func:`euclidean_distance`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

Metric = Callable[[np.ndarray, np.ndarray], np.ndarray]
Evaluator = Callable[[np.ndarray], np.ndarray]

DEFAULT_LENGTH_TOL = 1e-6
LIPSCHITZ_SLACK = 1e-9


class DomainError(ValueError):
    """A parameter lies outside the interval a curve is defined on."""


def euclidean_distance(p, q):
    """Euclidean distance along the last axis, broadcasting like numpy."""
    diff = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True)
class Partition:
    """Strictly increasing knots ``a = t_0 < t_1 < ... < t_n = b``."""

    knots: np.ndarray

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float).reshape(-1)
        if knots.size < 2:
            raise ValueError("a partition needs at least two knots")
        if not np.all(np.isfinite(knots)):
            raise ValueError("partition knots must be finite")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("partition knots must be strictly increasing")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Partition":
        """Uniform partition of ``[a, b]`` into ``n`` intervals."""
        if n < 1:
            raise ValueError("n must be at least 1")
        knots = np.linspace(a, b, n + 1)
        return cls(knots)

    @property
    def a(self) -> float:
        return float(self.knots[0])

    @property
    def b(self) -> float:
        return float(self.knots[-1])

    @property
    def size(self) -> int:
        """Number of intervals ``n``."""
        return self.knots.size - 1

    def __len__(self):
        return self.knots.size

    def is_refinement_of(self, other: "Partition") -> bool:
        return bool(np.all(np.isin(other.knots, self.knots)))


@dataclass(frozen=True)
class SampledCurve:
    """Samples ``x_i = gamma(t_i)`` of a continuous curve on a grid.

    ``derivatives`` is optional and, when given, holds velocity samples on
    the same grid.  Between grid knots the curve is evaluated by linear
    interpolation of coordinates.
    """

    grid: Partition
    points: np.ndarray
    derivatives: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = self.grid if isinstance(self.grid, Partition) else Partition(self.grid)
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[0] != len(grid):
            raise ValueError(
                f"grid has {len(grid)} knots but {points.shape[0]} samples were given"
            )
        if not np.all(np.isfinite(points)):
            raise ValueError("sample points must be finite")
        points.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "points", points)
        if self.derivatives is not None:
            derivs = np.array(self.derivatives, dtype=float)
            if derivs.shape != points.shape:
                raise ValueError("derivative samples must match the point samples in shape")
            derivs.setflags(write=False)
            object.__setattr__(self, "derivatives", derivs)

    @classmethod
    def from_function(cls, func: Evaluator, knots, derivative: Optional[Evaluator] = None):
        """Sample a vectorized ``func`` (and optionally its derivative) on ``knots``."""
        grid = knots if isinstance(knots, Partition) else Partition(knots)
        t = grid.knots
        derivs = None if derivative is None else derivative(t)
        return cls(grid, func(t), derivs)

    @property
    def t(self) -> np.ndarray:
        return self.grid.knots

    @property
    def interval(self) -> tuple[float, float]:
        return self.grid.a, self.grid.b

    def __len__(self):
        return len(self.grid)

    def __call__(self, t) -> np.ndarray:
        """Evaluate by linear interpolation; raises :class:`DomainError` off the grid."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        a, b = self.interval
        if np.any(tt < a) or np.any(tt > b):
            raise DomainError(f"parameter outside [{a}, {b}]")
        out = np.column_stack(
            [np.interp(tt, self.t, self.points[:, k]) for k in range(self.points.shape[1])]
        )
        return out[0] if scalar else out


@dataclass
class LengthReport:
    """Outcome of :func:`curve_length`.

    ``history`` keeps the polygonal sum of every level, coarse to fine, so
    convergence can be inspected or plotted afterwards.
    """

    value: float
    levels: int
    last_increment: float
    converged: bool
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "levels": self.levels,
            "last_increment": self.last_increment,
            "converged": self.converged,
            "history": list(self.history),
        }


def _segment_lengths(points: np.ndarray, metric: Metric) -> np.ndarray:
    return np.asarray(metric(points[1:], points[:-1]), dtype=float)


def _coerce_partition(partition) -> Partition:
    if isinstance(partition, Partition):
        return partition
    knots = np.asarray(partition, dtype=float).reshape(-1)
    if knots.size < 2:
        raise ValueError("a partition needs at least two knots")
    return Partition(knots)


def polygonal_length(curve: SampledCurve, metric: Metric, partition=None) -> float:
    """Sum of ``metric(gamma(t_i), gamma(t_{i-1}))`` over consecutive knots.

    Parameters
    ----------
    curve : SampledCurve
    metric : callable
        Vectorized distance function.
    partition : Partition or array_like, optional
        Knots inside the curve's interval.  Knots that are not on the
        sample grid are evaluated by linear interpolation.  Defaults to the
        curve's own grid.

    Returns
    -------
    float
        The polygonal length.  Summation runs in ascending knot order.
    """
    if partition is None:
        points = curve.points
    else:
        part = _coerce_partition(partition)
        a, b = curve.interval
        if part.a < a or part.b > b:
            raise DomainError(f"partition [{part.a}, {part.b}] leaves the curve interval [{a}, {b}]")
        points = curve(part.knots)
    return float(np.cumsum(_segment_lengths(points, metric))[-1])


def curve_length(
    evaluator: Evaluator,
    interval: tuple[float, float],
    metric: Metric,
    tol: float = DEFAULT_LENGTH_TOL,
    max_levels: int = 16,
    min_levels: int = 3,
) -> LengthReport:
    """Approximate the supremum over partitions by dyadic refinement.

    Level ``k`` uses the uniform partition with ``2**k`` intervals; each level
    evaluates only the new midpoints.  Refinement stops once the increase
    from one level to the next drops below ``tol`` (after at least
    ``min_levels`` levels, so a coarse coincidence cannot stop it early), or
    when ``max_levels`` is reached, in which case ``converged`` is False.

    ``evaluator`` must accept a 1-D array of parameters and return an
    ``(n, k)`` array of points.  Exceptions raised by it propagate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_levels < 1:
        raise ValueError("max_levels must be at least 1")
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must satisfy a < b")
    min_levels = min(min_levels, max_levels)

    def evaluate(t):
        pts = np.asarray(evaluator(t), dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] != t.size:
            raise ValueError("evaluator returned the wrong number of points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("evaluator returned non-finite points")
        return pts

    points = evaluate(np.array([a, b]))
    value = float(np.cumsum(_segment_lengths(points, metric))[-1])
    history = [value]
    increment = np.inf
    converged = False
    level = 0
    while level < max_levels:
        level += 1
        n = 2**level
        t_mid = a + (b - a) * (np.arange(1, n, 2) / n)
        mid = evaluate(t_mid)
        refined = np.empty((points.shape[0] + mid.shape[0], points.shape[1]))
        refined[0::2] = points
        refined[1::2] = mid
        points = refined
        new_value = float(np.cumsum(_segment_lengths(points, metric))[-1])
        increment = new_value - value
        value = max(value, new_value)
        history.append(new_value)
        if level >= min_levels and increment < tol:
            converged = True
            break
    return LengthReport(value, level, float(increment), converged, history)


def length_profile(curve: SampledCurve, metric: Metric) -> np.ndarray:
    """Length of ``gamma`` restricted to ``[a, t_i]`` for each grid knot.

    Starts at 0, is nondecreasing, and its last entry equals
    ``polygonal_length(curve, metric)`` exactly.
    """
    seg = _segment_lengths(curve.points, metric)
    return np.concatenate([[0.0], np.cumsum(seg)])


def arclength_reparametrize(curve: SampledCurve, metric: Metric) -> SampledCurve:
    """Reparametrize by normalized arc length onto ``[0, 1]``.

    Each output knot is ``tau(t_i) / L`` where ``tau`` is the length profile.
    Where the profile is flat the curve is stalled at a single point, and
    only the first knot of the flat run is kept, so the stall disappears.
    A curve of zero length maps to the constant curve on ``[0, 1]``.
    """
    tau = length_profile(curve, metric)
    total = tau[-1]
    first, last = curve.points[0], curve.points[-1]
    if total <= 0:
        return SampledCurve(Partition(np.array([0.0, 1.0])), np.vstack([first, last]))
    s = tau / total
    keep = np.concatenate([[True], np.diff(s) > 0])
    s = s[keep]
    points = np.array(curve.points[keep])
    s[0], s[-1] = 0.0, 1.0
    points[-1] = last
    return SampledCurve(Partition(s), points)


def linear_reparametrize(curve: SampledCurve, c: float, d: float) -> SampledCurve:
    """Affine change of parameter from ``[a, b]`` onto ``[c, d]``.

    Sample points are untouched; derivative samples are rescaled by the
    chain rule.
    """
    if not d > c:
        raise ValueError("target interval must satisfy c < d")
    a, b = curve.interval
    scale = (d - c) / (b - a)
    knots = c + (curve.t - a) * scale
    knots[0], knots[-1] = c, d
    derivs = None if curve.derivatives is None else curve.derivatives / scale
    return SampledCurve(Partition(knots), curve.points, derivs)


def lipschitz_ratio(curve: SampledCurve, metric: Metric) -> float:
    """Largest ``d(x_i, x_j) / |t_i - t_j|`` over all sample pairs."""
    t = curve.t
    pts = curve.points
    i, j = np.triu_indices(t.size, k=1)
    d = np.asarray(metric(pts[i], pts[j]), dtype=float)
    return float(np.max(d / (t[j] - t[i])))
