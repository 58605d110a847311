import numpy as np
import pytest
from hypothesis import given, settings

from hyperdomain.domain import build_domain
from hyperdomain.fibers import (
    FiberConfig,
    SingularConfig,
    count_components,
    fiber_report,
    image_estimate,
    singular_values,
)
from hyperdomain.manifold import build_system
from strategies import minimal_inputs


def test_lens_fiber_is_one_circle(lens_system):
    rep = fiber_report(lens_system, 0.0, FiberConfig(k=200, eps=0.3))
    assert rep.nonempty
    assert rep.bounded
    assert not rep.truncated
    assert rep.sampled_components == 1
    assert rep.sample_count == 200
    assert rep.regular
    assert rep.fiber_dim == 1
    assert rep.max_residual <= 1e-9
    assert rep.slices == [(2, -0.5, 0.5)]


def test_lens_fiber_at_corner_is_a_point(lens_system):
    rep = fiber_report(lens_system, -1.0)
    assert rep.nonempty
    assert rep.single_point
    assert rep.sampled_components == 1
    assert not rep.regular


def test_fiber_outside_image_is_empty(lens_system):
    rep = fiber_report(lens_system, 3.0)
    assert not rep.nonempty
    assert rep.sample_count == 0
    assert rep.model == "empty"
    assert rep.to_dict()["slices"] == []


def test_fiber_over_labeled_interval_is_unbounded(open_domain):
    s = build_system(open_domain)
    rep = fiber_report(s, 0.5, FiberConfig(k=120))
    assert rep.nonempty
    assert not rep.bounded
    assert rep.truncated
    assert rep.truncation == pytest.approx(20.0)
    assert "+inf" in rep.model


def test_fiber_report_is_seeded(lens_system):
    cfg = FiberConfig(k=50, seed=4)
    assert fiber_report(lens_system, 0.25, cfg) == fiber_report(lens_system, 0.25, cfg)


def test_fiber_config_errors(lens_system):
    with pytest.raises(ValueError):
        fiber_report(lens_system, 0.0, FiberConfig(k=0))
    with pytest.raises(ValueError):
        fiber_report(lens_system, 0.0, FiberConfig(R=0.0))


def test_count_components():
    a = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0]])
    b = a + np.array([5.0, 0.0])
    assert count_components(np.vstack([a, b]), 0.15)[0] == 2
    assert count_components(np.vstack([a, b]), 10.0)[0] == 1
    assert count_components(a[:1], None) == (1, 0.0)


def test_lens_singular_values(lens_system):
    rep = singular_values(lens_system, SingularConfig(samples=100))
    assert rep.predicted_values == [-1.0, 1.0]
    assert rep.verified == [True, True]
    assert rep.off_corner_clean == 1.0
    assert rep.boundary_clean == 1.0
    assert rep.ok
    assert rep.to_dict()["ok"] is True


def test_pinch_singular_values(pinch_domain):
    rep = singular_values(build_system(pinch_domain), SingularConfig(samples=60))
    assert rep.predicted_values == [0.0, 1.0, 2.0]
    assert all(rep.verified)
    assert rep.off_corner_clean == 1.0


def test_image_estimate(lens_system):
    est = image_estimate(lens_system, grid_size=101)
    assert est.step == pytest.approx(0.04)
    assert abs(est.lo - (-1.0)) <= est.step
    assert abs(est.hi - 1.0) <= est.step


def test_image_estimate_with_open_factor():
    s = build_system(build_domain((0.0, 1.0, 2.0, 3.0), (0, 1, 0)))
    est = image_estimate(s)
    assert abs(est.lo - 0.0) <= est.step
    assert abs(est.hi - 3.0) <= est.step


def test_image_estimate_grid_error(lens_system):
    with pytest.raises(ValueError):
        image_estimate(lens_system, grid_size=1)


@pytest.mark.parametrize(
    "t, labels",
    [
        ((-10.0, -9.8, 10.0), (0, 1)),
        ((-9.88, -8.45, -3.94, 5.13), (0, 0, 1)),
    ],
)
def test_singular_values_with_steep_open_factor(t, labels):
    rep = singular_values(build_system(build_domain(t, labels)), SingularConfig(samples=100, seed=3))
    assert rep.predicted_values == list(t)
    assert all(rep.verified)
    assert rep.off_corner_clean == 1.0
    assert rep.boundary_clean == 1.0
    assert rep.ok


@settings(max_examples=15, deadline=None)
@given(inputs=minimal_inputs(max_points=5))
def test_singular_values_match_t(inputs):
    t, labels = inputs
    rep = singular_values(build_system(build_domain(t, labels)), SingularConfig(samples=60))
    assert rep.predicted_values == list(t)
    assert all(rep.verified)
    assert rep.ok


@settings(max_examples=20, deadline=None)
@given(inputs=minimal_inputs())
def test_fiber_bounded_iff_interval_unlabeled(inputs):
    t, labels = inputs
    s = build_system(build_domain(t, labels))
    for j, lab in enumerate(labels):
        for i in range(5):
            x1 = t[j] + (i + 1) / 6 * (t[j + 1] - t[j])
            rep = fiber_report(s, x1, FiberConfig(k=8))
            assert rep.nonempty
            assert rep.bounded == (lab == 0)


@settings(max_examples=8, deadline=None)
@given(inputs=minimal_inputs(max_points=3))
def test_compact_fibers_sample_connected(inputs):
    t, labels = inputs
    s = build_system(build_domain(t, (0,) * len(labels)))
    for j in range(len(labels)):
        rep = fiber_report(s, 0.5 * (t[j] + t[j + 1]), FiberConfig(k=400))
        assert rep.sampled_components == 1
