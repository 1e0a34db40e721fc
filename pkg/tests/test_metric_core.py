import numpy as np
import pytest

from heisgeo.heisenberg import example_geodesic, horizontal_lift, koranyi_distance
from heisgeo.metric_core import (
    DomainError,
    LIPSCHITZ_SLACK,
    Partition,
    SampledCurve,
    arclength_reparametrize,
    curve_length,
    euclidean_distance,
    length_profile,
    linear_reparametrize,
    lipschitz_ratio,
    polygonal_length,
)

METRICS = [koranyi_distance, euclidean_distance]


def x_axis(n=3):
    t = np.linspace(0, 1, n)
    return SampledCurve(Partition(t), np.column_stack([t, 0 * t, 0 * t]))


def stalled(n=101):
    t = np.linspace(0, 1, n)
    return SampledCurve(Partition(t), np.column_stack([np.minimum(2 * t, 1), 0 * t, 0 * t]))


def test_partition_invariants():
    with pytest.raises(ValueError):
        Partition([0.0])
    with pytest.raises(ValueError):
        Partition([0.0, 0.5, 0.5, 1.0])
    p = Partition.uniform(0, 2, 4)
    assert p.size == 4 and len(p) == 5 and (p.a, p.b) == (0.0, 2.0)
    assert Partition.uniform(0, 2, 8).is_refinement_of(p)
    assert not p.is_refinement_of(Partition.uniform(0, 2, 8))


def test_sampled_curve_shapes():
    with pytest.raises(ValueError):
        SampledCurve(Partition([0, 1]), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        SampledCurve(Partition([0, 1]), np.zeros((2, 3)), np.zeros((3, 3)))
    c = x_axis()
    with pytest.raises(DomainError):
        c(1.5)
    np.testing.assert_allclose(c(0.25), [0.25, 0, 0])


def test_polygonal_length_examples():
    assert polygonal_length(x_axis(), koranyi_distance, [0, 0.5, 1]) == pytest.approx(1.0, abs=1e-15)
    const = SampledCurve(Partition.uniform(0, 1, 7), np.tile([1.0, -2.0, 3.0], (8, 1)))
    assert polygonal_length(const, koranyi_distance) == 0.0
    coarse = polygonal_length(x_axis(), koranyi_distance, [0, 1])
    fine = polygonal_length(x_axis(), koranyi_distance, [0, 0.25, 0.5, 0.75, 1])
    assert coarse == pytest.approx(1.0) and fine == pytest.approx(1.0)
    assert fine >= coarse - 1e-12


def test_polygonal_length_errors():
    with pytest.raises(DomainError):
        polygonal_length(x_axis(), koranyi_distance, [0, 1.5])
    with pytest.raises(ValueError):
        polygonal_length(x_axis(), koranyi_distance, [0.5])


@pytest.mark.parametrize("metric", METRICS)
def test_refinement_monotone(metric):
    rng = np.random.default_rng(3)
    t = np.linspace(0, 1, 65)
    curve = SampledCurve(Partition(t), rng.normal(size=(65, 3)))
    previous = 0.0
    for n in (1, 2, 4, 8, 16, 32, 64):
        value = polygonal_length(curve, metric, Partition.uniform(0, 1, n))
        assert value >= previous - 1e-12
        assert value >= metric(curve.points[0], curve.points[-1]) - 1e-12
        previous = value


def test_curve_length_example_curve():
    report = curve_length(example_geodesic, (0, 1), koranyi_distance, tol=1e-5)
    assert report.converged
    assert report.value == pytest.approx(0.5, abs=1e-3)
    assert report.value >= float(koranyi_distance(example_geodesic(0.0), example_geodesic(1.0)))
    assert np.all(np.diff(report.history) >= -1e-12)


def test_curve_length_segment_and_circle():
    seg = curve_length(lambda t: np.column_stack([t, 0 * t, 0 * t]), (0, 1), koranyi_distance)
    assert seg.value == pytest.approx(1.0, abs=1e-6) and seg.converged

    def lifted_circle(t):
        w = 2 * np.pi * t
        # closed-form lift of the unit circle from height 0
        return np.column_stack([np.cos(w), np.sin(w), -4 * np.pi * t])

    circ = curve_length(lifted_circle, (0, 1), koranyi_distance, tol=1e-6, max_levels=20)
    assert circ.value == pytest.approx(2 * np.pi, abs=1e-4)


def test_curve_length_vertical_diverges():
    report = curve_length(lambda t: np.column_stack([0 * t, 0 * t, t]), (0, 1), koranyi_distance, max_levels=10)
    assert not report.converged
    assert report.levels == 10
    np.testing.assert_allclose(report.history, 2.0 ** (np.arange(11) / 2), rtol=1e-12)


def test_curve_length_argument_errors():
    f = lambda t: np.column_stack([t, t, t])  # noqa: E731
    with pytest.raises(ValueError):
        curve_length(f, (0, 1), koranyi_distance, tol=0)
    with pytest.raises(ValueError):
        curve_length(f, (0, 1), koranyi_distance, max_levels=0)
    with pytest.raises(DomainError):
        curve_length(example_geodesic, (0, 2), koranyi_distance)


def test_length_profile():
    np.testing.assert_allclose(length_profile(x_axis(), koranyi_distance), [0, 0.5, 1.0])
    const = SampledCurve(Partition.uniform(0, 1, 4), np.ones((5, 3)))
    assert np.all(length_profile(const, koranyi_distance) == 0)
    c = stalled()
    tau = length_profile(c, koranyi_distance)
    np.testing.assert_allclose(tau, np.minimum(2 * c.t, 1), atol=1e-12)
    assert tau[-1] == polygonal_length(c, koranyi_distance)
    assert np.all(np.diff(tau) >= 0)


def test_arclength_quadratic_parameter():
    t = np.linspace(0, 1, 101)
    c = SampledCurve(Partition(t), np.column_stack([t**2, 0 * t, 0 * t]))
    r = arclength_reparametrize(c, koranyi_distance)
    np.testing.assert_allclose(r.points[:, 0], r.t, atol=1e-12)
    assert np.array_equal(r.points[0], c.points[0]) and np.array_equal(r.points[-1], c.points[-1])


def test_arclength_removes_stall():
    r = arclength_reparametrize(stalled(), koranyi_distance)
    assert len(r) == 51
    np.testing.assert_allclose(r.points[:, 0], r.t, atol=1e-12)
    assert r.interval == (0.0, 1.0)


def test_arclength_constant_curve():
    const = SampledCurve(Partition.uniform(0, 3, 5), np.tile([1.0, 2.0, 3.0], (6, 1)))
    r = arclength_reparametrize(const, koranyi_distance)
    assert r.interval == (0.0, 1.0)
    assert np.all(r.points == [1.0, 2.0, 3.0])


def test_arclength_lipschitz_on_lift():
    t = np.linspace(0, 2, 200)
    planar = np.column_stack([np.cos(3 * t) + t, np.sin(t) * t])
    lifted = horizontal_lift(t, planar)
    total = polygonal_length(lifted, koranyi_distance)
    r = arclength_reparametrize(lifted, koranyi_distance)
    assert abs(polygonal_length(r, koranyi_distance) - total) <= 1e-9 * total
    assert lipschitz_ratio(r, koranyi_distance) <= total * (1 + LIPSCHITZ_SLACK)
    # the sample set is unchanged
    assert {tuple(p) for p in r.points} == {tuple(p) for p in lifted.points}


def test_linear_reparametrize():
    c = x_axis()
    moved = linear_reparametrize(c, 2, 4)
    assert moved.t[1] == 3.0
    back = linear_reparametrize(moved, 0, 1)
    np.testing.assert_array_equal(back.t, c.t)
    np.testing.assert_array_equal(back.points, c.points)
    with pytest.raises(ValueError):
        linear_reparametrize(c, 1, 1)


def test_linear_reparametrize_length_identical():
    rng = np.random.default_rng(11)
    c = SampledCurve(Partition(np.sort(rng.uniform(0, 1, 40))), rng.normal(size=(40, 3)), rng.normal(size=(40, 3)))
    moved = linear_reparametrize(c, -3.0, 5.0)
    assert polygonal_length(moved, koranyi_distance) == polygonal_length(c, koranyi_distance)
    scale = 8.0 / (c.t[-1] - c.t[0])
    np.testing.assert_allclose(moved.derivatives * scale, c.derivatives)
