"""Structure of the first Heisenberg group on R^3.

Points are plain numpy arrays whose last axis has length 3.  Every function
here broadcasts over leading axes, so ``koranyi_distance(P, Q)`` with two
``(n, 3)`` arrays returns ``n`` distances.

The group law is fixed as::

    p * q = (p1 + q1, p2 + q2, p3 + q3 + 2 (p2 q1 - p1 q2))

which makes ``koranyi_norm(group_inverse(p) * q) == koranyi_distance(p, q)``
and leaves the horizontal frame ``X = (1, 0, 2 y)``, ``Y = (0, 1, -2 x)``
left-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .metric_core import DomainError, Partition, SampledCurve

EXAMPLE_HEIGHT = 1.0 / (4.0 * np.pi)


class NotHorizontalError(ValueError):
    """Raised when a length that only exists for horizontal curves is requested."""

    def __init__(self, max_residual, threshold):
        super().__init__(
            f"curve is not horizontal: max residual {max_residual:.3e} exceeds {threshold:.3e}"
        )
        self.max_residual = max_residual
        self.threshold = threshold


def as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (3,):
        raise ValueError(f"expected points with 3 coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def koranyi_norm(p):
    p = as_point(p)
    r2 = p[..., 0] ** 2 + p[..., 1] ** 2
    return (r2 * r2 + p[..., 2] ** 2) ** 0.25


def twist(p, q):
    """Vertical part ``p3 - q3 + 2 (p2 q1 - p1 q2)`` of the Koranyi distance."""
    p = as_point(p)
    q = as_point(q)
    return p[..., 2] - q[..., 2] + 2.0 * (p[..., 1] * q[..., 0] - p[..., 0] * q[..., 1])


def koranyi_distance(p, q):
    """Koranyi distance ``((|dx|^2 + |dy|^2)^2 + twist^2)^(1/4)``."""
    p = as_point(p)
    q = as_point(q)
    r2 = (p[..., 0] - q[..., 0]) ** 2 + (p[..., 1] - q[..., 1]) ** 2
    tw = twist(p, q)
    return (r2 * r2 + tw * tw) ** 0.25


def koranyi_distance_grad(p, q):
    """Gradients of :func:`koranyi_distance` with respect to ``p`` and ``q``.

    Returns zeros where ``p == q`` (a valid subgradient there).
    """
    p = as_point(p)
    q = as_point(q)
    dx = p[..., 0] - q[..., 0]
    dy = p[..., 1] - q[..., 1]
    r2 = dx * dx + dy * dy
    tw = twist(p, q)
    big = r2 * r2 + tw * tw
    with np.errstate(divide="ignore"):
        coef = np.where(big > 0, 0.25 * np.where(big > 0, big, 1.0) ** -0.75, 0.0)
    gp = np.stack(
        [
            4 * r2 * dx - 4 * tw * q[..., 1],
            4 * r2 * dy + 4 * tw * q[..., 0],
            2 * tw,
        ],
        axis=-1,
    )
    gq = np.stack(
        [
            -4 * r2 * dx + 4 * tw * p[..., 1],
            -4 * r2 * dy - 4 * tw * p[..., 0],
            -2 * tw,
        ],
        axis=-1,
    )
    return coef[..., None] * gp, coef[..., None] * gq


def group_multiply(p, q):
    p = as_point(p)
    q = as_point(q)
    z = p[..., 2] + q[..., 2] + 2.0 * (p[..., 1] * q[..., 0] - p[..., 0] * q[..., 1])
    return np.stack([p[..., 0] + q[..., 0], p[..., 1] + q[..., 1], z], axis=-1)


def group_inverse(p):
    return -as_point(p)


def dilate(p, lam: float):
    """Anisotropic dilation ``(lam x, lam y, lam^2 z)``."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    p = as_point(p)
    return p * np.array([lam, lam, lam * lam])


def horizontal_frame(p):
    """The two vectors ``X(p) = (1, 0, 2 p2)`` and ``Y(p) = (0, 1, -2 p1)``."""
    p = as_point(p)
    one = np.ones_like(p[..., 0])
    zero = np.zeros_like(p[..., 0])
    X = np.stack([one, zero, 2.0 * p[..., 1]], axis=-1)
    Y = np.stack([zero, one, -2.0 * p[..., 0]], axis=-1)
    return X, Y


@dataclass(frozen=True)
class HorizontalityReport:
    grid: Partition
    residuals: np.ndarray
    max_residual: float


def _residuals(points, derivs):
    x, y = points[:, 0], points[:, 1]
    dx, dy, dz = derivs[:, 0], derivs[:, 1], derivs[:, 2]
    return np.abs(dz + 2.0 * (x * dy - y * dx))


def horizontality_residual(curve: SampledCurve) -> HorizontalityReport:
    """Pointwise ``|z' + 2 (x y' - y x')|`` from the curve's derivative samples."""
    if curve.derivatives is None:
        raise ValueError("horizontality residual needs derivative samples")
    res = _residuals(curve.points, curve.derivatives)
    return HorizontalityReport(curve.grid, res, float(np.max(res)))


def finite_difference_derivatives(curve: SampledCurve) -> np.ndarray:
    """Second-order differences of the samples on the (possibly non-uniform) grid."""
    edge = 2 if len(curve) > 2 else 1
    return np.gradient(curve.points, curve.t, axis=0, edge_order=edge)


def horizontal_lift(grid, planar, z0: float = 0.0, planar_derivatives=None) -> SampledCurve:
    """Lift a planar curve to a horizontal curve starting at height ``z0``.

    The height solves ``z' = -2 (x y' - y x')`` by the trapezoidal rule on
    the sample grid.  Planar velocities are taken from ``planar_derivatives``
    when supplied, else from second-order central differences.

    The returned curve carries derivative samples whose height component is
    the right-hand side of the ODE.
    """
    grid = grid if isinstance(grid, Partition) else Partition(grid)
    planar = np.asarray(planar, dtype=float)
    if planar.ndim != 2 or planar.shape[1] < 2 or planar.shape[0] != len(grid):
        raise ValueError("planar samples must have shape (len(grid), 2)")
    planar = planar[:, :2]
    if planar_derivatives is None:
        edge = 2 if len(grid) > 2 else 1
        vel = np.gradient(planar, grid.knots, axis=0, edge_order=edge)
    else:
        vel = np.asarray(planar_derivatives, dtype=float)[:, :2]
        if vel.shape != planar.shape:
            raise ValueError("planar derivatives must match the planar samples")
    x, y = planar[:, 0], planar[:, 1]
    dz = -2.0 * (x * vel[:, 1] - y * vel[:, 0])
    z = z0 + cumulative_trapezoid(dz, grid.knots, initial=0.0)
    points = np.column_stack([x, y, z])
    derivs = np.column_stack([vel, dz])
    return SampledCurve(grid, points, derivs)


def horizontality_threshold(curve: SampledCurve) -> float:
    speed = np.hypot(curve.derivatives[:, 0], curve.derivatives[:, 1])
    return 1e-6 * (1.0 + float(np.max(speed)))


def cc_length(curve, threshold: float | None = None) -> float:
    """Carnot-Caratheodory length ``int sqrt(x'^2 + y'^2) dt``.

    Accepts a :class:`SampledCurve` with derivative samples (integrated by
    the trapezoidal rule) or anything with a ``cc_length()`` method such as
    :class:`heisgeo.geodesic_solver.HorizontalControlCurve`, whose length is
    exact.

    Raises
    ------
    NotHorizontalError
        If the sampled horizontality residual exceeds ``threshold``, by
        default ``1e-6 * (1 + max planar speed)``.
    """
    if hasattr(curve, "cc_length"):
        return float(curve.cc_length())
    if curve.derivatives is None:
        raise ValueError("cc_length needs derivative samples")
    report = horizontality_residual(curve)
    if threshold is None:
        threshold = horizontality_threshold(curve)
    if report.max_residual > threshold:
        raise NotHorizontalError(report.max_residual, threshold)
    speed = np.hypot(curve.derivatives[:, 0], curve.derivatives[:, 1])
    return float(np.trapezoid(speed, curve.t))


def _check_unit_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1) or not np.all(np.isfinite(t)):
        raise DomainError("the example curve is defined on [0, 1] only")
    return t


def example_geodesic(t):
    """Horizontal circle lift from ``(0, 0, 0)`` to ``(0, 0, 1/(4 pi))``.

    ``gamma(t) = ((1 - cos 2 pi t) / 4 pi, sin(2 pi t) / 4 pi,
    (t - sin(2 pi t) / 2 pi) / 4 pi)``, speed 1/2, CC length 1/2.
    """
    t = _check_unit_interval(t)
    w = 2.0 * np.pi * t
    c = EXAMPLE_HEIGHT
    return np.stack([c * (1 - np.cos(w)), c * np.sin(w), c * (t - np.sin(w) / (2 * np.pi))], axis=-1)


def example_geodesic_derivative(t):
    t = _check_unit_interval(t)
    w = 2.0 * np.pi * t
    return np.stack([0.5 * np.sin(w), 0.5 * np.cos(w), EXAMPLE_HEIGHT * (1 - np.cos(w))], axis=-1)


def difference_quotient(evaluator, t: float, s: float) -> float:
    """Metric derivative estimate ``d_K(gamma(t), gamma(s)) / |t - s|``."""
    if s == t:
        raise ValueError("difference quotient needs s != t")
    pts = np.asarray(evaluator(np.array([t, s], dtype=float)), dtype=float)
    return float(koranyi_distance(pts[0], pts[1]) / abs(t - s))


def box_coordinate_bound(box) -> float:
    lower, upper = (np.asarray(v, dtype=float) for v in box)
    return float(max(np.max(np.abs(lower)), np.max(np.abs(upper))))


def euclidean_comparison_bound(p, q, box):
    """Upper bound for ``d_K(p, q)`` through Euclidean coordinate differences.

    With ``lam`` the largest absolute coordinate of the axis-aligned box
    ``box = (lower, upper)``, the bound is::

        ((dx^2 + dy^2)^2 + 2 dz^2 + 8 (|dy| lam + |dx| lam)^2) ** 0.25

    It tends to zero with ``|p - q|`` for a fixed box.
    """
    p = as_point(p)
    q = as_point(q)
    lower, upper = (np.asarray(v, dtype=float) for v in box)
    for pt in (p, q):
        if np.any(pt < lower) or np.any(pt > upper):
            raise ValueError("points must lie inside the box")
    lam = box_coordinate_bound(box)
    dx = np.abs(p[..., 0] - q[..., 0])
    dy = np.abs(p[..., 1] - q[..., 1])
    dz = np.abs(p[..., 2] - q[..., 2])
    r2 = dx * dx + dy * dy
    return (r2 * r2 + 2 * dz * dz + 8 * (dy * lam + dx * lam) ** 2) ** 0.25


def escape_radius(q, lam: float, margin: float = 1e-6) -> float:
    """Euclidean radius beyond which the Koranyi distance to ``q`` exceeds ``lam``.

    Returns ``sqrt(3) * max(lam, lam^2 + 2 G lam) * (1 + margin)`` with
    ``G = |q1| + |q2|``, the smallest value of that form satisfying both
    ``theta > sqrt(3) lam`` and ``theta / sqrt(3) - 2 G lam > lam^2``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    q = as_point(q)
    gamma = abs(float(q[0])) + abs(float(q[1]))
    return float(np.sqrt(3.0) * max(lam, lam * lam + 2 * gamma * lam) * (1 + margin))
