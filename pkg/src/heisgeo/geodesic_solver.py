"""Approximate shortest curves between two points of the Heisenberg group.

Two discretizations are provided:

* :func:`solve_cc_geodesic` searches over piecewise-constant horizontal
  controls.  The state is integrated exactly, so every candidate curve is
  horizontal and its Carnot-Caratheodory length is exact.
* :func:`solve_koranyi_polyline` searches over chains of vertices with the
  endpoints pinned and measures them with the Koranyi polygonal length.

Both return the sequence of lengths they passed through, i.e. a minimizing
sequence in the sense of the direct method.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .heisenberg import as_point, escape_radius, koranyi_distance, koranyi_distance_grad, twist
from .metric_core import Partition, SampledCurve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HorizontalControlCurve:
    """Horizontal curve on ``[0, 1]`` driven by piecewise-constant controls.

    On step ``i`` (of ``N``) the curve moves with ``x' = a_i``, ``y' = b_i``
    and ``z' = -2 (x b_i - y a_i)``.  The height velocity is constant on
    each step, so the state is piecewise linear and integrated exactly.
    """

    start: np.ndarray
    controls: np.ndarray

    def __post_init__(self):
        start = as_point(self.start).astype(float).copy()
        controls = np.array(self.controls, dtype=float)
        if controls.ndim != 2 or controls.shape[1] != 2 or controls.shape[0] < 1:
            raise ValueError("controls must have shape (N, 2) with N >= 1")
        if not np.all(np.isfinite(controls)):
            raise ValueError("controls must be finite")
        start.setflags(write=False)
        controls.setflags(write=False)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "controls", controls)

    @property
    def n_steps(self) -> int:
        return self.controls.shape[0]

    @property
    def dt(self) -> float:
        return 1.0 / self.n_steps

    @property
    def grid(self) -> Partition:
        return Partition.uniform(0.0, 1.0, self.n_steps)

    def states(self) -> np.ndarray:
        return _integrate(self.start, self.controls)

    def end(self) -> np.ndarray:
        return self.states()[-1]

    def cc_length(self) -> float:
        return float(np.sum(np.hypot(self.controls[:, 0], self.controls[:, 1])) * self.dt)

    def energy(self) -> float:
        return float(np.sum(self.controls**2) * self.dt)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1):
            raise ValueError("control curves live on [0, 1]")
        states = self.states()
        knots = np.linspace(0.0, 1.0, self.n_steps + 1)
        tt = np.atleast_1d(t)
        out = np.column_stack([np.interp(tt, knots, states[:, k]) for k in range(3)])
        return out[0] if t.ndim == 0 else out

    def to_sampled_curve(self, n_samples: Optional[int] = None) -> SampledCurve:
        """Sample on a uniform grid, with exact velocities attached.

        ``n_samples`` defaults to the ``N + 1`` step boundaries.
        """
        n = self.n_steps + 1 if n_samples is None else int(n_samples)
        if n < 2:
            raise ValueError("need at least two samples")
        t = np.linspace(0.0, 1.0, n)
        pts = self(t)
        step = np.minimum((t * self.n_steps).astype(int), self.n_steps - 1)
        a, b = self.controls[step, 0], self.controls[step, 1]
        dz = -2.0 * (pts[:, 0] * b - pts[:, 1] * a)
        return SampledCurve(Partition(t), pts, np.column_stack([a, b, dz]))

    def upsample(self, factor: int) -> "HorizontalControlCurve":
        """Same curve with every step split into ``factor`` equal steps."""
        factor = int(factor)
        if factor < 1:
            raise ValueError("factor must be a positive integer")
        return HorizontalControlCurve(self.start, np.repeat(self.controls, factor, axis=0))

    def to_dict(self) -> dict:
        return {"start": self.start.tolist(), "controls": self.controls.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "HorizontalControlCurve":
        return cls(np.asarray(data["start"], dtype=float), np.asarray(data["controls"], dtype=float))


def _integrate(start, controls):
    n = controls.shape[0]
    h = 1.0 / n
    a, b = controls[:, 0], controls[:, 1]
    x = start[0] + h * np.concatenate([[0.0], np.cumsum(a)])
    y = start[1] + h * np.concatenate([[0.0], np.cumsum(b)])
    dz = -2.0 * h * (x[:-1] * b - y[:-1] * a)
    z = start[2] + np.concatenate([[0.0], np.cumsum(dz)])
    return np.column_stack([x, y, z])


def endpoint_residual(controls, start, target):
    """Smooth residual ``(dx, dy, twist)`` of the reconstructed endpoint and its Jacobian.

    The residual vanishes exactly when the endpoint equals ``target``.  The
    Jacobian has shape ``(3, N, 2)``.
    """
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    states = _integrate(start, controls)
    n = controls.shape[0]
    h = 1.0 / n
    x, y = states[:, 0], states[:, 1]
    end = states[-1]
    res = np.array([end[0] - target[0], end[1] - target[1], twist(end, target)])
    jac = np.zeros((3, n, 2))
    jac[0, :, 0] = h
    jac[1, :, 1] = h
    jac[2, :, 0] = -2.0 * h * (y[-1] - y[1:] - y[:-1]) - 2.0 * target[1] * h
    jac[2, :, 1] = -2.0 * h * (x[:-1] - x[-1] + x[1:]) + 2.0 * target[0] * h
    return res, jac


def penalized_objective(u, start, target, penalty):
    """Discrete energy plus endpoint penalty, and its analytic gradient.

    ``J(u) = sum_i |u_i|^2 dt + penalty * |r(u)|^2`` where ``r`` is
    :func:`endpoint_residual`.  ``u`` is the flattened ``(N, 2)`` control
    array.  Minimizers of the energy are constant-speed length minimizers.
    """
    u = np.asarray(u, dtype=float)
    n = u.size // 2
    h = 1.0 / n
    res, jac = endpoint_residual(u, start, target)
    value = h * float(np.dot(u, u)) + penalty * float(np.dot(res, res))
    grad = 2.0 * h * u + 2.0 * penalty * np.tensordot(res, jac, axes=1).reshape(-1)
    return value, grad


def gradient_check(u, start, target, penalty, step: float = 1e-6) -> float:
    """Relative error between the analytic gradient and central differences."""
    u = np.asarray(u, dtype=float).reshape(-1)
    _, grad = penalized_objective(u, start, target, penalty)
    fd = np.empty_like(u)
    for k in range(u.size):
        e = np.zeros_like(u)
        e[k] = step
        fd[k] = (
            penalized_objective(u + e, start, target, penalty)[0]
            - penalized_objective(u - e, start, target, penalty)[0]
        ) / (2 * step)
    return float(np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-300))


def initial_feasible_curve(p, q, n_steps: int) -> HorizontalControlCurve:
    """A horizontal curve from ``p`` to ``q``: planar segment, then a closing loop.

    The straight planar segment from ``(p1, p2)`` to ``(q1, q2)`` lifts to a
    height that misses ``q3`` by ``twist(q, p)``.  A regular polygon loop
    through the planar endpoint then encloses signed area
    ``-twist(q, p) / 4``, which closes the vertical gap exactly.  Steps are
    shared between the two parts in proportion to their lengths.
    """
    p = as_point(p)
    q = as_point(q)
    n_steps = int(n_steps)
    chord = q[:2] - p[:2]
    dist = float(np.hypot(*chord))
    gap = float(twist(q, p))
    need_loop = gap != 0.0
    need_segment = dist > 0.0
    if n_steps < 1 or (need_loop and n_steps < 3 + int(need_segment)):
        raise ValueError("too few steps to build the initial curve")

    if need_loop and need_segment:
        loop_len = 2.0 * np.pi * np.sqrt(abs(gap) / (4.0 * np.pi))
        n_loop = int(round(n_steps * loop_len / (loop_len + dist)))
        n_loop = min(max(n_loop, 3), n_steps - 1)
    else:
        n_loop = n_steps if need_loop else 0
    n_seg = n_steps - n_loop

    controls = np.zeros((n_steps, 2))
    if n_seg:
        controls[:n_seg] = chord * (n_steps / n_seg)
    if n_loop:
        radius = np.sqrt(abs(gap) / (2.0 * n_loop * np.sin(2.0 * np.pi / n_loop)))
        direction = chord / dist if need_segment else np.array([1.0, 0.0])
        # gap > 0 needs negative signed area, i.e. a clockwise loop
        orient = -1.0 if gap > 0 else 1.0
        normal = orient * np.array([-direction[1], direction[0]])
        angle0 = np.arctan2(-normal[1], -normal[0])
        angles = angle0 + orient * 2.0 * np.pi * np.arange(n_loop + 1) / n_loop
        verts = radius * np.column_stack([np.cos(angles), np.sin(angles)])
        steps = np.diff(verts, axis=0)
        steps -= steps.sum(axis=0) / n_loop
        controls[n_seg:] = steps * n_steps
    return HorizontalControlCurve(p, controls)


@dataclass(frozen=True)
class SolverConfig:
    """Penalty schedule, restarts and stopping tolerances for the solvers."""

    penalty_start: float = 1e2
    penalty_factor: float = 10.0
    penalty_max: float = 1e8
    n_starts: int = 4
    seed: int = 7
    max_inner_iter: int = 2000
    miss_tol: float = 1e-6
    length_tol: float = 1e-5
    perturbation: float = 0.5
    max_polyline_iter: int = 20000


@dataclass
class SolveReport:
    """Result of :func:`solve_cc_geodesic`.

    ``trace`` holds the incumbent length after every outer (penalty) level,
    followed by the length after the final feasibility correction.
    ``objective_trace`` holds the penalized objective after every inner
    iteration of the winning start; ``penalty_marks`` are the indices where
    the penalty was raised.  Between two marks the objective is
    nonincreasing.
    """

    curve: HorizontalControlCurve
    length: float
    endpoint_miss: float
    iterations: int
    trace: list
    converged: bool
    start: np.ndarray
    target: np.ndarray
    objective_trace: list = field(default_factory=list)
    penalty_marks: list = field(default_factory=list)
    restart_lengths: list = field(default_factory=list)
    best_start: int = 0
    escape_radius: float = float("inf")
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def n_steps(self) -> int:
        return self.curve.n_steps

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "endpoint_miss": self.endpoint_miss,
            "trace": list(self.trace),
            "converged": self.converged,
            "iterations": self.iterations,
            "restart_lengths": list(self.restart_lengths),
            "best_start": self.best_start,
            "penalty_marks": list(self.penalty_marks),
            "escape_radius": self.escape_radius,
            "target": np.asarray(self.target).tolist(),
            "curve": self.curve.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def restore_feasibility(curve: HorizontalControlCurve, target, max_iter: int = 20) -> HorizontalControlCurve:
    """Minimum-norm Gauss-Newton corrections driving the endpoint onto ``target``."""
    target = as_point(target)
    u = np.array(curve.controls)
    for _ in range(max_iter):
        res, jac = endpoint_residual(u, curve.start, target)
        if np.linalg.norm(res) < 1e-15:
            break
        J = jac.reshape(3, -1)
        try:
            step = J.T @ np.linalg.solve(J @ J.T, res)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, res, rcond=None)[0]
        u = u - step.reshape(u.shape)
    return HorizontalControlCurve(curve.start, u)


def _smooth_perturbation(rng, n_steps, scale):
    t = (np.arange(n_steps) + 0.5) / n_steps
    out = np.zeros((n_steps, 2))
    for k in range(1, 4):
        coef = rng.normal(size=(2, 2)) / k
        out += np.outer(np.cos(2 * np.pi * k * t), coef[0]) + np.outer(np.sin(2 * np.pi * k * t), coef[1])
    return scale * out


def _run_penalty_schedule(u0, start, target, config, bound, penalties):
    u = np.array(u0, dtype=float).reshape(-1)
    bounds = [(-bound, bound)] * u.size
    objective_trace = []
    marks = []
    trace = []
    iterations = 0
    inner_ok = True
    for mu in penalties:
        marks.append(len(objective_trace))
        objective_trace.append(penalized_objective(u, start, target, mu)[0])

        def record(xk, mu=mu):
            objective_trace.append(penalized_objective(xk, start, target, mu)[0])

        res = optimize.minimize(
            penalized_objective,
            u,
            args=(start, target, mu),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            callback=record,
            options={"maxiter": config.max_inner_iter, "ftol": 1e-15, "gtol": 1e-12, "maxcor": 30},
        )
        iterations += int(res.nit)
        inner_ok = res.nit < config.max_inner_iter
        u = res.x
        trace.append(HorizontalControlCurve(start, u.reshape(-1, 2)).cc_length())
    return u.reshape(-1, 2), trace, objective_trace, marks, iterations, inner_ok


def _penalty_levels(config: SolverConfig):
    levels = []
    mu = config.penalty_start
    while mu < config.penalty_max:
        levels.append(mu)
        mu *= config.penalty_factor
    levels.append(config.penalty_max)
    return levels


def _finish(start, target, u, trace, objective_trace, marks, iterations, config, theta, n_starts_info,
            inner_ok=True):
    curve = restore_feasibility(HorizontalControlCurve(start, u), target)
    length = curve.cc_length()
    trace = list(trace) + [length]
    miss = float(koranyi_distance(curve.end(), target))
    # the length must have settled over the last two levels, or over the
    # final correction when there is only one level
    pair = trace[-3:-1] if len(trace) >= 3 else trace[-2:]
    settled = abs(pair[1] - pair[0]) <= config.length_tol * max(1.0, length)
    converged = bool(miss <= config.miss_tol and settled and inner_ok)
    restart_lengths, best = n_starts_info
    return SolveReport(
        curve=curve,
        length=length,
        endpoint_miss=miss,
        iterations=iterations,
        trace=trace,
        converged=converged,
        start=start,
        target=target,
        objective_trace=objective_trace,
        penalty_marks=marks,
        restart_lengths=restart_lengths,
        best_start=best,
        escape_radius=theta,
        config=config,
    )


def solve_cc_geodesic(p, q, n_steps: int = 256, config: Optional[SolverConfig] = None) -> SolveReport:
    """Carnot-Caratheodory geodesic from ``p`` to ``q`` over ``n_steps`` controls.

    Minimizes the discrete energy plus ``penalty * |r|^2`` (``r`` the
    endpoint residual) with L-BFGS-B under an increasing penalty schedule,
    from ``config.n_starts`` starts: the initial feasible curve and seeded
    smooth perturbations of it.  Controls are boxed by the escape radius of
    ``p`` at the initial curve's length, since no shorter curve can leave
    that ball.  The winner (smallest length, then smallest start index) gets
    a final feasibility correction.

    ``converged`` is False when the endpoint miss (in the Koranyi metric)
    exceeds ``config.miss_tol`` or the length was still moving at the last
    penalty level.
    """
    config = config or SolverConfig()
    p = as_point(p).astype(float)
    q = as_point(q).astype(float)
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    if np.array_equal(p, q):
        curve = HorizontalControlCurve(p, np.zeros((n_steps, 2)))
        return SolveReport(curve, 0.0, 0.0, 0, [0.0], True, p, q, restart_lengths=[0.0], config=config)

    base = initial_feasible_curve(p, q, n_steps)
    l0 = base.cc_length()
    theta = escape_radius(p, l0)
    penalties = _penalty_levels(config)
    seeds = np.random.SeedSequence(config.seed).spawn(max(config.n_starts, 1))

    runs = []
    for k, seq in enumerate(seeds):
        u0 = np.array(base.controls)
        if k > 0:
            rng = np.random.default_rng(seq)
            u0 = np.clip(u0 + _smooth_perturbation(rng, n_steps, config.perturbation * l0), -theta, theta)
        u, trace, obj, marks, iters, ok = _run_penalty_schedule(u0, p, q, config, theta, penalties)
        polished = restore_feasibility(HorizontalControlCurve(p, u), q)
        runs.append((polished.cc_length(), k, u, trace, obj, marks, iters, ok))
        log.debug("start %d: length %.12g", k, runs[-1][0])

    restart_lengths = [r[0] for r in runs]
    best = min(runs, key=lambda r: (r[0], r[1]))
    _, k, u, trace, obj, marks, _, ok = best
    iterations = sum(r[6] for r in runs)
    return _finish(p, q, u, trace, obj, marks, iterations, config, theta, (restart_lengths, k), ok)


@dataclass
class RefinementRecord:
    """Coarse versus refined solve.  ``trace`` is the incumbent length,
    starting from the coarse result, and never increases."""

    coarse_length: float
    refined_length: float
    coarse_steps: int
    refined_steps: int
    refined: SolveReport
    trace: list

    @property
    def consistent(self) -> bool:
        return self.refined_length <= self.coarse_length + 1e-6


def refine_and_compare(report: SolveReport, factor: int = 4, config: Optional[SolverConfig] = None) -> RefinementRecord:
    """Re-solve with ``factor`` times as many steps, warm-started from ``report``.

    The coarse controls are upsampled (the same curve) and optimized at the
    final penalty level.  The incumbent is kept if the refined run does not
    beat it, so the refined length never exceeds the coarse one.
    """
    factor = int(factor)
    if factor < 2:
        raise ValueError("factor must be an integer >= 2")
    config = config or report.config
    start, target = report.start, report.target
    coarse = report.curve.upsample(factor)
    n = coarse.n_steps
    if np.array_equal(start, target):
        refined = replace(report, curve=coarse)
        return RefinementRecord(report.length, report.length, report.n_steps, n, refined, list(report.trace))

    theta = report.escape_radius
    u, trace, obj, marks, iters, ok = _run_penalty_schedule(
        coarse.controls, start, target, config, theta, [config.penalty_max]
    )
    candidate = _finish(start, target, u, trace, obj, marks, iters, config, theta, ([], 0), ok)
    incumbent_length = coarse.cc_length()
    if candidate.length <= incumbent_length:
        refined = candidate
    else:
        refined = _finish(start, target, coarse.controls, [incumbent_length], [], [], iters, config, theta, ([], 0))
    refined.restart_lengths = [candidate.length, incumbent_length]
    # incumbent length across the refinement boundary
    trace = np.minimum.accumulate([report.length, incumbent_length, *candidate.trace, refined.length])
    return RefinementRecord(report.length, refined.length, report.n_steps, n, refined, trace.tolist())


@dataclass
class PolylineReport:
    """Result of :func:`solve_koranyi_polyline`."""

    vertices: np.ndarray
    length: float
    converged: bool
    iterations: int
    trace: list
    restart_lengths: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "converged": self.converged,
            "iterations": self.iterations,
            "trace": list(self.trace),
            "restart_lengths": list(self.restart_lengths),
            "vertices": np.asarray(self.vertices).tolist(),
        }


def polyline_length(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    return float(np.cumsum(koranyi_distance(v[1:], v[:-1]))[-1])


def _polyline_grad(v):
    gp, gq = koranyi_distance_grad(v[1:], v[:-1])
    g = np.zeros_like(v)
    g[1:] += gp
    g[:-1] += gq
    return g


def _descend_polyline(v, config):
    v = np.array(v, dtype=float)

    def fun(x):
        w = v.copy()
        w[1:-1] = x.reshape(-1, 3)
        return polyline_length(w), _polyline_grad(w)[1:-1].reshape(-1)

    trace = [polyline_length(v)]

    def record(xk):
        trace.append(fun(xk)[0])

    res = optimize.minimize(
        fun,
        v[1:-1].reshape(-1),
        jac=True,
        method="L-BFGS-B",
        callback=record,
        options={"maxiter": config.max_polyline_iter, "ftol": 1e-15, "gtol": 1e-13, "maxcor": 50},
    )
    if res.fun <= trace[0]:
        v[1:-1] = res.x.reshape(-1, 3)
    converged = bool(res.success) or res.nit < config.max_polyline_iter
    return v, trace, converged, int(res.nit)


def solve_koranyi_polyline(p, q, n_vertices: int = 64, config: Optional[SolverConfig] = None) -> PolylineReport:
    """Shortest Koranyi polyline with ``n_vertices`` vertices from ``p`` to ``q``.

    The first start samples a discrete CC geodesic with ``n_vertices - 1``
    steps at its step boundaries, so every edge has zero twist and the
    polyline length equals that curve's CC length.  Further starts perturb
    its controls (seeded), restore the endpoint, and sample again.  Each
    start then moves all interior vertices jointly by L-BFGS-B on the
    polygonal Koranyi length; the endpoints stay pinned.
    """
    config = config or SolverConfig()
    p = as_point(p).astype(float)
    q = as_point(q).astype(float)
    m = int(n_vertices)
    if m < 2:
        raise ValueError("need at least two vertices")
    if m == 2 or np.array_equal(p, q):
        v = np.vstack([p, q]) if m == 2 else np.repeat(p[None], m, axis=0)
        length = polyline_length(v)
        return PolylineReport(v, length, True, 0, [length], [length])

    n_steps = (m - 1) * int(np.ceil(8 / (m - 1)))
    seed_report = solve_cc_geodesic(p, q, n_steps, replace(config, n_starts=1))
    base = seed_report.curve
    t = np.linspace(0.0, 1.0, m)
    seeds = np.random.SeedSequence(config.seed).spawn(max(config.n_starts, 1))
    runs = []
    for k, seq in enumerate(seeds):
        curve = base
        if k > 0:
            rng = np.random.default_rng(seq)
            bumped = base.controls + _smooth_perturbation(rng, n_steps, 0.1 * base.cc_length())
            curve = restore_feasibility(HorizontalControlCurve(p, bumped), q)
        v0 = curve(t)
        v0[0], v0[-1] = p, q
        v, trace, converged, iters = _descend_polyline(v0, config)
        runs.append((polyline_length(v), k, v, trace, converged, iters))
    best = min(runs, key=lambda r: (r[0], r[1]))
    length, _, v, trace, converged, iters = best
    return PolylineReport(v, length, converged, iters, trace, [r[0] for r in runs])
