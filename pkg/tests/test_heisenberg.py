import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisgeo.heisenberg import (
    EXAMPLE_HEIGHT,
    NotHorizontalError,
    cc_length,
    difference_quotient,
    dilate,
    escape_radius,
    euclidean_comparison_bound,
    example_geodesic,
    example_geodesic_derivative,
    finite_difference_derivatives,
    group_inverse,
    group_multiply,
    horizontal_frame,
    horizontal_lift,
    horizontality_residual,
    koranyi_distance,
    koranyi_norm,
)
from heisgeo.metric_core import DomainError, Partition, SampledCurve

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
points = st.tuples(coord, coord, coord).map(np.array)


def test_norm_examples():
    assert koranyi_norm([0, 0, 0]) == 0
    assert koranyi_norm([1, 0, 0]) == 1
    assert koranyi_norm([0, 0, EXAMPLE_HEIGHT]) == pytest.approx(np.sqrt(EXAMPLE_HEIGHT), abs=1e-15)


def test_distance_examples():
    p = np.array([0.3, -1.0, 2.0])
    assert koranyi_distance(p, p) == 0
    assert koranyi_distance([0, 0, 0], [1, 1, 0]) == pytest.approx(np.sqrt(2), abs=1e-15)
    assert koranyi_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(8**0.25, abs=1e-15)


def test_distance_rejects_bad_points():
    with pytest.raises(ValueError):
        koranyi_distance([0, 0], [1, 1])
    with pytest.raises(ValueError):
        koranyi_norm([np.nan, 0, 0])


def test_group_law_examples():
    p = np.array([0.4, -2.0, 1.5])
    np.testing.assert_array_equal(group_multiply(p, np.zeros(3)), p)
    np.testing.assert_array_equal(group_multiply([1, 0, 0], [0, 1, 0]), [1, 1, -2])
    rng = np.random.default_rng(0)
    P = rng.uniform(-5, 5, (100, 3))
    np.testing.assert_allclose(group_multiply(P, group_inverse(P)), 0, atol=1e-12)


def test_dilation_examples():
    p = np.array([1.0, 1.0, 1.0])
    np.testing.assert_array_equal(dilate(p, 1.0), p)
    np.testing.assert_array_equal(dilate(p, 2.0), [2, 2, 4])
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            dilate(p, bad)


def test_horizontal_frame():
    X, Y = horizontal_frame([2.0, 3.0, -1.0])
    np.testing.assert_array_equal(X, [1, 0, 6])
    np.testing.assert_array_equal(Y, [0, 1, -4])


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_metric_axioms(p, q, r):
    d = koranyi_distance
    assert d(p, q) == d(q, p)
    assert d(p, q) >= 0
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-9


@settings(max_examples=200, deadline=None)
@given(points, points)
def test_norm_matches_distance(p, q):
    expected = koranyi_distance(p, q)
    got = koranyi_norm(group_multiply(group_inverse(p), q))
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(points, points, points)
def test_left_invariance(g, p, q):
    base = koranyi_distance(p, q)
    moved = koranyi_distance(group_multiply(g, p), group_multiply(g, q))
    assert moved == pytest.approx(base, rel=1e-9, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(points, points, st.floats(0.01, 20))
def test_dilation_homogeneity(p, q, lam):
    got = koranyi_distance(dilate(p, lam), dilate(q, lam))
    assert got == pytest.approx(lam * koranyi_distance(p, q), rel=1e-9, abs=1e-12)


def test_zero_iff_equal():
    rng = np.random.default_rng(5)
    P = rng.uniform(-10, 10, (10_000, 3))
    Q = rng.uniform(-10, 10, (10_000, 3))
    assert np.all(koranyi_distance(P, Q) > 0)
    assert np.all(koranyi_distance(P, P) == 0)


def test_residual_examples():
    t = np.linspace(0, 1, 11)
    line = SampledCurve(Partition(t), np.column_stack([t, 0 * t, 0 * t]), np.tile([1.0, 0, 0], (11, 1)))
    assert horizontality_residual(line).max_residual == 0
    vert = SampledCurve(Partition(t), np.column_stack([0 * t, 0 * t, t]), np.tile([0, 0, 1.0], (11, 1)))
    np.testing.assert_array_equal(horizontality_residual(vert).residuals, 1.0)
    ex = SampledCurve.from_function(example_geodesic, np.linspace(0, 1, 1001), example_geodesic_derivative)
    assert horizontality_residual(ex).max_residual < 1e-12
    with pytest.raises(ValueError):
        horizontality_residual(SampledCurve(Partition(t), line.points))


def test_lift_segment():
    t = np.linspace(0, 1, 50)
    lifted = horizontal_lift(t, np.column_stack([t, 0 * t]))
    assert np.all(lifted.points[:, 2] == 0)


def test_lift_unit_circle():
    t = np.linspace(0, 1, 10_001)
    planar = np.column_stack([np.cos(2 * np.pi * t), np.sin(2 * np.pi * t)])
    lifted = horizontal_lift(t, planar)
    assert lifted.points[-1, 2] == pytest.approx(-4 * np.pi, abs=1e-6)
    assert cc_length(lifted) == pytest.approx(2 * np.pi, abs=1e-6)


def test_lift_rebuilds_example():
    t = np.linspace(0, 1, 4001)
    w = 2 * np.pi * t
    planar = np.column_stack([1 - np.cos(w), np.sin(w)]) * EXAMPLE_HEIGHT
    deriv = np.column_stack([np.sin(w), np.cos(w)]) * 0.5
    lifted = horizontal_lift(t, planar, planar_derivatives=deriv)
    np.testing.assert_allclose(lifted.points[-1], [0, 0, EXAMPLE_HEIGHT], atol=1e-8)
    np.testing.assert_allclose(lifted.points, example_geodesic(t), atol=1e-8)


def test_lift_errors():
    with pytest.raises(ValueError):
        horizontal_lift([0, 0.5, 0.4], np.zeros((3, 2)))
    with pytest.raises(ValueError):
        horizontal_lift([0, 1], np.zeros((3, 2)))


def test_lift_residual_decays():
    """Finite-difference residual of a lift is at least first order in the step."""

    def residual(n):
        t = np.linspace(0, 1, n + 1)
        planar = np.column_stack([np.cos(3 * t) + t**2, np.sin(5 * t) - t])
        lifted = horizontal_lift(t, planar)
        fd = SampledCurve(lifted.grid, lifted.points, finite_difference_derivatives(lifted))
        return horizontality_residual(fd).max_residual

    errs = [residual(n) for n in (100, 200, 400, 800)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(ratios > 1.9)


def test_left_translation_preserves_horizontality():
    t = np.linspace(0, 1, 257)
    pts = example_geodesic(t)
    der = example_geodesic_derivative(t)
    g = np.array([1.3, -0.7, 2.0])
    moved = group_multiply(g, pts)
    moved_der = der.copy()
    moved_der[:, 2] += 2 * (g[1] * der[:, 0] - g[0] * der[:, 1])
    base = horizontality_residual(SampledCurve(Partition(t), pts, der))
    after = horizontality_residual(SampledCurve(Partition(t), moved, moved_der))
    np.testing.assert_allclose(after.residuals, base.residuals, atol=1e-9)


def test_cc_length_examples():
    t = np.linspace(0, 1, 11)
    line = SampledCurve(Partition(t), np.column_stack([t, 0 * t, 0 * t]), np.tile([1.0, 0, 0], (11, 1)))
    assert cc_length(line) == pytest.approx(1.0)
    ex = SampledCurve.from_function(example_geodesic, np.linspace(0, 1, 101), example_geodesic_derivative)
    assert cc_length(ex) == pytest.approx(0.5, abs=1e-9)


def test_cc_length_rejects_vertical():
    t = np.linspace(0, 1, 11)
    vert = SampledCurve(Partition(t), np.column_stack([0 * t, 0 * t, t]), np.tile([0, 0, 1.0], (11, 1)))
    with pytest.raises(NotHorizontalError) as info:
        cc_length(vert)
    assert info.value.max_residual == 1.0


def test_example_curve():
    np.testing.assert_array_equal(example_geodesic(0.0), [0, 0, 0])
    np.testing.assert_allclose(example_geodesic(1.0), [0, 0, EXAMPLE_HEIGHT], atol=1e-15)
    d = koranyi_distance(example_geodesic(0.0), example_geodesic(1.0))
    assert d == pytest.approx(np.sqrt(1 / (4 * np.pi)), abs=1e-15)
    assert d < 0.5
    with pytest.raises(DomainError):
        example_geodesic(1.01)


def test_difference_quotient():
    for t in np.linspace(0, 0.9, 7):
        assert difference_quotient(example_geodesic, t, t + 1e-4) == pytest.approx(0.5, abs=1e-3)
    line = lambda t: np.column_stack([t, 0 * t, 0 * t])  # noqa: E731
    assert difference_quotient(line, 0.2, 0.7) == pytest.approx(1.0, abs=1e-15)
    vert = lambda t: np.column_stack([0 * t, 0 * t, t])  # noqa: E731
    for h in (1e-2, 1e-4, 1e-6):
        assert difference_quotient(vert, 0.0, h) == pytest.approx(h**-0.5, rel=1e-9)
    with pytest.raises(ValueError):
        difference_quotient(line, 0.3, 0.3)


def test_difference_quotient_uniform_on_lift():
    t = np.linspace(0, 1, 20_001)
    planar = np.column_stack([np.sin(2 * t), t**2])
    vel = np.column_stack([2 * np.cos(2 * t), 2 * t])
    lifted = horizontal_lift(t, planar, planar_derivatives=vel)
    grid = np.linspace(0.0, 0.9, 50)
    speed = np.hypot(2 * np.cos(2 * grid), 2 * grid)
    errs = []
    for h in (1e-1, 1e-2):
        dq = np.array([difference_quotient(lifted, s, s + h) for s in grid])
        errs.append(np.max(np.abs(dq - speed)))
    assert errs[1] < errs[0] / 5


def test_comparison_bound():
    box = (np.zeros(3), np.ones(3))
    p = np.array([0.2, 0.3, 0.4])
    assert euclidean_comparison_bound(p, p, box) == 0
    rng = np.random.default_rng(9)
    P = rng.uniform(0, 1, (100_000, 3))
    Q = rng.uniform(0, 1, (100_000, 3))
    assert np.all(euclidean_comparison_bound(P, Q, box) >= koranyi_distance(P, Q))
    steps = [euclidean_comparison_bound(p, p + h, box) for h in (1e-2, 1e-4, 1e-6)]
    assert steps[0] > steps[1] > steps[2] and steps[2] < 1e-2
    with pytest.raises(ValueError):
        euclidean_comparison_bound(p, [2.0, 0, 0], box)


def test_escape_radius_examples():
    assert escape_radius([0, 0, 0], 1.0) == pytest.approx(np.sqrt(3) * (1 + 1e-6), rel=1e-15)
    # the closed form gives sqrt(3) * 5, not sqrt(3) * 3
    assert escape_radius([1, 1, 0], 1.0) == pytest.approx(8.660262, abs=1e-6)
    with pytest.raises(ValueError):
        escape_radius([0, 0, 0], 0.0)


def test_escape_radius_guarantee():
    rng = np.random.default_rng(2)
    for _ in range(10):
        q = rng.uniform(-3, 3, 3)
        lam = rng.uniform(0.1, 4)
        theta = escape_radius(q, lam)
        assert theta > np.sqrt(3) * lam
        assert theta / np.sqrt(3) - 2 * (abs(q[0]) + abs(q[1])) * lam > lam**2
        direction = rng.normal(size=(10_000, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        p = q + direction * theta * (1 + rng.exponential(0.5, (10_000, 1))) + 1e-12
        assert np.all(koranyi_distance(p, q) > lam)
