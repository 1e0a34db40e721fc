"""Numerical verification suite.

Each ``check_*`` function returns a list of :class:`CheckResult` rows.
:func:`run_all` runs them in order; ``heisgeo verify`` prints the table and
the acceptance tests assert on the same rows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import geodesic_solver as gs
from .heisenberg import (
    EXAMPLE_HEIGHT,
    cc_length,
    difference_quotient,
    dilate,
    euclidean_comparison_bound,
    escape_radius,
    example_geodesic,
    example_geodesic_derivative,
    group_multiply,
    horizontal_lift,
    koranyi_distance,
)
from .metric_core import (
    LIPSCHITZ_SLACK,
    Partition,
    SampledCurve,
    arclength_reparametrize,
    curve_length,
    lipschitz_ratio,
    polygonal_length,
)

DEFAULT_SEED = 20240501


@dataclass
class CheckResult:
    name: str
    expected: str
    got: str
    tolerance: str
    passed: bool
    seconds: float = 0.0

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44} expected {self.expected:<22} got {self.got:<24} tol {self.tolerance}"


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


@dataclass(frozen=True)
class TrigCurve:
    """Planar trigonometric polynomial ``t -> (x(t), y(t))`` on ``[0, 1]``."""

    coef: np.ndarray  # shape (2, degree, 2): axis, frequency, (cos, sin)
    offset: np.ndarray

    @property
    def degree(self) -> int:
        return self.coef.shape[1]

    def _basis(self, t, deriv):
        t = np.asarray(t, dtype=float)[:, None]
        k = np.arange(1, self.degree + 1)[None, :]
        w = 2 * np.pi * k
        if deriv == 0:
            return np.cos(w * t), np.sin(w * t)
        return -w * np.sin(w * t), w * np.cos(w * t)

    def planar(self, t):
        c, s = self._basis(t, 0)
        return np.column_stack([self.offset[i] + c @ self.coef[i, :, 0] + s @ self.coef[i, :, 1] for i in range(2)])

    def planar_derivative(self, t):
        c, s = self._basis(t, 1)
        return np.column_stack([c @ self.coef[i, :, 0] + s @ self.coef[i, :, 1] for i in range(2)])

    def lift(self, n_samples: int) -> SampledCurve:
        t = np.linspace(0.0, 1.0, n_samples)
        return horizontal_lift(t, self.planar(t), 0.0, self.planar_derivative(t))


def random_trig_curves(count: int = 20, max_degree: int = 4, seed: int = DEFAULT_SEED) -> list[TrigCurve]:
    rng = np.random.default_rng(seed)
    curves = []
    for _ in range(count):
        degree = int(rng.integers(1, max_degree + 1))
        scale = 1.0 / np.arange(1, degree + 1)
        coef = rng.normal(size=(2, degree, 2)) * scale[None, :, None] * 0.5
        offset = rng.uniform(-1, 1, size=2)
        curves.append(TrigCurve(coef, offset))
    return curves


def zigzag_curve(n: int) -> gs.HorizontalControlCurve:
    """Horizontal lift of a planar zigzag with ``n`` teeth of height ``1/n`` over ``x in [0, 1]``."""
    signs = np.where(np.arange(2 * n) % 2 == 0, 1.0, -1.0)
    controls = np.column_stack([np.ones(2 * n), 2.0 * signs])
    return gs.HorizontalControlCurve(np.zeros(3), controls)


def check_non_length_space() -> list[CheckResult]:
    with _Timer() as timer:
        report = curve_length(example_geodesic, (0.0, 1.0), koranyi_distance, tol=1e-5, max_levels=15)
        sampled = SampledCurve.from_function(example_geodesic, np.linspace(0, 1, 4097), example_geodesic_derivative)
        lcc = cc_length(sampled)
        dk = float(koranyi_distance(example_geodesic(0.0), example_geodesic(1.0)))
    exact_dk = float(np.sqrt(EXAMPLE_HEIGHT))
    return [
        CheckResult("example: Koranyi length", "0.5", f"{report.value:.9f}", "1e-3",
                    abs(report.value - 0.5) <= 1e-3 and 2**report.levels + 1 <= 2**16, timer.seconds),
        CheckResult("example: CC length", "0.5", f"{lcc:.12f}", "1e-9", abs(lcc - 0.5) <= 1e-9),
        CheckResult("example: d_K(endpoints)", f"{exact_dk:.10f}", f"{dk:.10f}", "1e-9", abs(dk - exact_dk) <= 1e-9),
        CheckResult("example: L_K > d_K (not a length space)", "strict", f"{report.value - dk:.6f}", "> 0",
                    report.value > dk),
        CheckResult("example: runtime", "< 5 s", f"{timer.seconds:.2f} s", "5 s", timer.seconds < 5.0),
    ]


def check_length_equality(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    sizes = [512, 1024, 2048, 4096]
    worst_final = 0.0
    monotone = True
    with _Timer() as timer:
        for curve in random_trig_curves(20, 4, seed):
            errors = []
            for n in sizes:
                lifted = curve.lift(n)
                lk = polygonal_length(lifted, koranyi_distance)
                lcc = cc_length(lifted)
                errors.append(abs(lk - lcc) / lcc)
            worst_final = max(worst_final, errors[-1])
            monotone &= all(b <= 1.1 * a for a, b in zip(errors, errors[1:]))
    return [
        CheckResult("L_K = L_cc on 20 lifted curves (4096 samples)", "rel err < 1e-3", f"{worst_final:.3e}",
                    "1e-3", worst_final < 1e-3),
        CheckResult("L_K = L_cc: error shrinks when doubling", "monotone", str(monotone), "10% slack", monotone),
        CheckResult("L_K = L_cc: runtime", "< 30 s", f"{timer.seconds:.2f} s", "30 s", timer.seconds < 30.0),
    ]


def check_metric_axioms(seed: int = DEFAULT_SEED, n: int = 100_000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    with _Timer() as timer:
        p, q, r, g = (rng.uniform(-10, 10, size=(n, 3)) for _ in range(4))
        lam = rng.uniform(0.1, 10, size=(n, 1))
        dpq = koranyi_distance(p, q)
        symmetric = bool(np.array_equal(dpq, koranyi_distance(q, p)))
        nonneg = bool(np.all(dpq >= 0)) and bool(np.all(koranyi_distance(p, p) == 0))
        tri = float(np.max(koranyi_distance(p, r) - dpq - koranyi_distance(q, r)))
        left = float(np.max(np.abs(koranyi_distance(group_multiply(g, p), group_multiply(g, q)) - dpq) / dpq))
        dil = np.column_stack([lam, lam, lam**2])
        dilation = float(np.max(np.abs(koranyi_distance(p * dil, q * dil) - lam[:, 0] * dpq) / (lam[:, 0] * dpq)))
    return [
        CheckResult("d_K symmetry", "exact", str(symmetric), "0", symmetric),
        CheckResult("d_K nonnegative, d(p,p) = 0", "true", str(nonneg), "0", nonneg),
        CheckResult("d_K triangle inequality", "excess <= 1e-9", f"{tri:.3e}", "1e-9", tri <= 1e-9),
        CheckResult("d_K left invariance", "rel <= 1e-9", f"{left:.3e}", "1e-9", left <= 1e-9),
        CheckResult("d_K dilation homogeneity", "rel <= 1e-9", f"{dilation:.3e}", "1e-9", dilation <= 1e-9),
        CheckResult("metric axioms: runtime", "< 10 s", f"{timer.seconds:.2f} s", "10 s", timer.seconds < 10.0),
    ]


def check_escape_radius(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    violations = 0
    total = 0
    for _ in range(10):
        q = rng.uniform(-5, 5, size=3)
        lam = float(rng.uniform(0.05, 5))
        theta = escape_radius(q, lam)
        u = rng.normal(size=(10_000, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        radius = theta * (1 + rng.uniform(1e-9, 1.0, size=(10_000, 1)))
        p = q + radius * u
        violations += int(np.sum(koranyi_distance(p, q) <= lam))
        total += p.shape[0]
    return [CheckResult("escape radius: |p-q| > theta => d_K > lam", "0 violations",
                        f"{violations}/{total}", "0", violations == 0)]


def check_comparison_bound(seed: int = DEFAULT_SEED, n: int = 100_000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    box = (np.zeros(3), np.ones(3))
    p = rng.uniform(0, 1, size=(n, 3))
    q = rng.uniform(0, 1, size=(n, 3))
    violations = int(np.sum(euclidean_comparison_bound(p, q, box) < koranyi_distance(p, q)))
    return [CheckResult("comparison bound >= d_K in unit box", "0 violations", f"{violations}/{n}", "0",
                        violations == 0)]


def check_geodesic_solver() -> list[CheckResult]:
    origin = np.zeros(3)
    with _Timer() as timer:
        vertical = gs.solve_cc_geodesic(origin, [0, 0, EXAMPLE_HEIGHT], 256)
        straight = gs.solve_cc_geodesic(origin, [1, 0, 0], 64)
        rng = np.random.default_rng(3)
        u = rng.normal(size=64)
        grad_err = gs.gradient_check(u, origin, np.array([0.3, -0.2, 0.1]), 1e3, step=1e-6)
    return [
        CheckResult("CC geodesic to (0,0,1/4pi), N=256", "[0.495, 0.505]", f"{vertical.length:.6f}", "5e-3",
                    0.495 <= vertical.length <= 0.505),
        CheckResult("CC geodesic to (1,0,0)", "[0.999, 1.001]", f"{straight.length:.6f}", "1e-3",
                    0.999 <= straight.length <= 1.001),
        CheckResult("objective gradient vs central differences", "rel err < 1e-5", f"{grad_err:.3e}", "1e-5",
                    grad_err < 1e-5),
        CheckResult("geodesic solver: runtime", "< 60 s", f"{timer.seconds:.2f} s", "60 s", timer.seconds < 60.0),
    ]


def check_reparametrization(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    endpoints_ok = True
    worst_len = 0.0
    worst_lip = 0.0
    for curve in random_trig_curves(20, 4, seed):
        lifted = curve.lift(256)
        total = polygonal_length(lifted, koranyi_distance)
        rep = arclength_reparametrize(lifted, koranyi_distance)
        endpoints_ok &= bool(np.array_equal(rep.points[0], lifted.points[0]))
        endpoints_ok &= bool(np.array_equal(rep.points[-1], lifted.points[-1]))
        worst_len = max(worst_len, abs(polygonal_length(rep, koranyi_distance) - total) / total)
        worst_lip = max(worst_lip, lipschitz_ratio(rep, koranyi_distance) / total - 1.0)
    return [
        CheckResult("reparametrization: endpoints", "exact", str(endpoints_ok), "0", endpoints_ok),
        CheckResult("reparametrization: length preserved", "rel <= 1e-9", f"{worst_len:.3e}", "1e-9",
                    worst_len <= 1e-9),
        CheckResult("reparametrization: Lipschitz constant L", "excess <= 1e-9", f"{worst_lip:.3e}", "1e-9",
                    worst_lip <= LIPSCHITZ_SLACK),
    ]


def check_lower_semicontinuity(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    partitions = [np.linspace(0, 1, k) for k in (2, 3, 5, 17, 101)]
    partitions += [np.concatenate([[0.0], np.sort(rng.uniform(0, 1, 30)), [1.0]]) for _ in range(5)]
    limit = SampledCurve(Partition(np.array([0.0, 1.0])), np.array([[0.0, 0, 0], [1.0, 0, 0]]))
    family = [zigzag_curve(n) for n in range(1, 201)]
    worst = -np.inf
    for knots in partitions:
        part = Partition(knots)
        lengths = [polygonal_length(c.to_sampled_curve(), koranyi_distance, part) for c in family]
        liminf = min(lengths[100:])
        worst = max(worst, polygonal_length(limit, koranyi_distance, knots) - liminf)
    lsc_ok = worst <= 1e-12

    coarse = gs.solve_cc_geodesic(np.zeros(3), [0, 0, EXAMPLE_HEIGHT], 64)
    record = gs.refine_and_compare(coarse, 4)
    straight = gs.refine_and_compare(gs.solve_cc_geodesic(np.zeros(3), [1, 0, 0], 16), 2)
    traces_ok = all(np.all(np.diff(r.trace) <= 0) for r in (record, straight))
    consistent = record.consistent and straight.consistent and abs(straight.refined_length - 1.0) <= 1e-6
    return [
        CheckResult("lower semicontinuity on zigzags", "L(limit,P) <= liminf", f"{worst:.3e}", "1e-12", lsc_ok),
        CheckResult("refinement traces nonincreasing", "true", str(traces_ok), "0", traces_ok),
        CheckResult("refined length <= coarse + 1e-6", f"{record.coarse_length:.6f}",
                    f"{record.refined_length:.6f}", "1e-6", consistent),
    ]


def check_difference_quotient() -> list[CheckResult]:
    rows = []
    for h, tol in ((1e-3, 0.02), (1e-4, 0.002)):
        ts = np.linspace(0.0, 1.0 - h, 256)
        err = max(abs(difference_quotient(example_geodesic, t, t + h) - 0.5) for t in ts)
        rows.append(CheckResult(f"difference quotient uniform, h={h:g}", "0.5", f"max err {err:.2e}", f"{tol:g}",
                                err < tol))
    return rows


CHECKS = [
    ("non-length-space witness", check_non_length_space),
    ("length equality", check_length_equality),
    ("metric axioms", check_metric_axioms),
    ("escape radius", check_escape_radius),
    ("comparison bound", check_comparison_bound),
    ("geodesic solver", check_geodesic_solver),
    ("reparametrization", check_reparametrization),
    ("lower semicontinuity", check_lower_semicontinuity),
    ("difference quotient", check_difference_quotient),
]


def run_all() -> list[CheckResult]:
    results = []
    for _, check in CHECKS:
        results.extend(check())
    return results


def format_table(results) -> str:
    lines = [r.row() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
