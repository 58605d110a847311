import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hyperdomain.algebra import (
    Branch,
    HypersurfaceSpec,
    Polynomial,
    branch_contains,
    branch_height,
    hypersurface_poly,
    intersect_branches,
    numerical_rank,
)

LENS_LOWER = Branch(-2.0, -2.0, 3.0, "plus")
LENS_UPPER = Branch(2.0, 2.0, 3.0, "minus")


def test_branch_height():
    assert branch_height(Branch(0, 0, 1, "plus"), 1.0) == 1.0
    assert branch_height(LENS_LOWER, 0.0) == -0.5
    assert branch_height(LENS_LOWER, -3.0) is None


def test_branch_rejects_bad_parameters():
    with pytest.raises(ValueError):
        Branch(0, 0, 0, "plus")
    with pytest.raises(ValueError):
        Branch(0, 0, 1, "up")
    with pytest.raises(ValueError):
        Branch(math.inf, 0, 1, "plus")


def test_branch_support_follows_orientation():
    assert Branch(0, 0, 1, "plus").support == (0.0, math.inf)
    assert Branch(0, 0, 1, "minus").support == (-math.inf, 0.0)
    assert Branch(0, 0, -1, "plus").support == (-math.inf, 0.0)
    assert Branch(0, 0, -1, "minus").support == (0.0, math.inf)


def test_branch_contains():
    assert branch_contains(Branch(0, 0, 1, "plus"), (1, 1), 1e-12)
    assert not branch_contains(Branch(0, 0, 1, "plus"), (-1, -1), 1e-12)
    assert branch_contains(LENS_UPPER, (1, -1), 1e-12)


def test_heights_nan_outside_support():
    h = LENS_LOWER.heights([-3.0, 0.0])
    assert math.isnan(h[0])
    assert h[1] == -0.5


def test_hypersurface_poly_lens():
    p = hypersurface_poly(HypersurfaceSpec((1, 2), LENS_LOWER, 1), 2)
    assert p.terms == {(1, 1): 1.0, (1, 0): 2.0, (0, 1): 2.0, (0, 0): 1.0}


def test_hypersurface_poly_unit():
    p = hypersurface_poly(HypersurfaceSpec((1, 2), Branch(0, 0, 1, "plus"), 1), 2)
    assert p.terms == {(1, 1): 1.0, (0, 0): -1.0}


def test_hypersurface_poly_pinch_branch():
    p = hypersurface_poly(HypersurfaceSpec((1, 3), Branch(-1, 0, 1, "plus"), -1), 3)
    assert p.terms == {(1, 0, 1): -1.0, (0, 0, 1): -1.0, (0, 0, 0): 1.0}
    assert p.variables == (0, 2)


def test_hypersurface_poly_plane_too_large():
    with pytest.raises(IndexError):
        hypersurface_poly(HypersurfaceSpec((1, 4), LENS_LOWER, 1), 3)


def test_eval_and_grad():
    f1 = hypersurface_poly(HypersurfaceSpec((1, 2), LENS_LOWER, 1), 2)
    f2 = hypersurface_poly(HypersurfaceSpec((1, 2), LENS_UPPER, 1), 2)
    assert f1.eval([0.0, 0.0]) == 1.0
    assert f1.eval([-1.0, 1.0]) == 0.0
    np.testing.assert_array_equal(f1.grad([-1.0, 1.0]), [3.0, 1.0])
    np.testing.assert_array_equal(f2.grad([-1.0, 1.0]), [-1.0, -3.0])
    np.testing.assert_array_equal(f1.eval(np.array([[0.0, 0.0], [-1.0, 1.0]])), [1.0, 0.0])


def test_constant_polynomial():
    p = Polynomial(3, {(0, 0, 0): 2.5})
    assert p.eval([7.0, -1.0, 3.0]) == 2.5
    np.testing.assert_array_equal(p.grad([7.0, -1.0, 3.0]), np.zeros(3))
    assert Polynomial.zero(2).eval([1.0, 1.0]) == 0.0


def test_polynomial_shape_errors():
    p = Polynomial(2, {(1, 0): 1.0})
    with pytest.raises(ValueError):
        p.eval([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        p.grad([[1.0, 2.0]])
    with pytest.raises(ValueError):
        Polynomial(2, {(1,): 1.0})


def test_magnitude_sums_absolute_terms():
    p = Polynomial(2, {(1, 1): -1.0, (1, 0): 2.0, (0, 0): -3.0})
    assert p.magnitude([-2.0, 5.0]) == 10.0 + 4.0 + 3.0
    np.testing.assert_array_equal(p.magnitude(np.array([[-2.0, 5.0], [0.0, 0.0]])), [17.0, 3.0])
    assert abs(p.eval([-2.0, 5.0])) <= p.magnitude([-2.0, 5.0])


def test_polynomial_arithmetic_and_equality():
    p = Polynomial(2, {(1, 0): 1.0, (0, 1): 2.0})
    q = Polynomial(2, {(0, 1): -2.0, (0, 0): 1.0})
    assert (p + q).terms == {(1, 0): 1.0, (0, 0): 1.0}
    assert (p - p) == Polynomial.zero(2)
    assert 2 * p == p * 2.0
    assert hash(p + q) == hash(Polynomial(2, {(0, 0): 1.0, (1, 0): 1.0}))
    assert p.embed(4).terms == {(1, 0, 0, 0): 1.0, (0, 1, 0, 0): 2.0}


def test_intersect_lens_branches():
    hits = intersect_branches(LENS_LOWER, LENS_UPPER)
    assert [pt for pt, _ in hits] == [(-1.0, 1.0), (1.0, -1.0)]
    assert not any(tangent for _, tangent in hits)


def test_intersect_pinch_branches():
    hits = intersect_branches(Branch(-1, 0, 1, "plus"), Branch(1, 0, -1, "plus"))
    assert len(hits) == 1
    (u, v), tangent = hits[0]
    assert (u, v) == pytest.approx((0.0, 1.0))
    assert not tangent


def test_intersect_far_from_origin():
    hits = intersect_branches(Branch(1e6 - 1, -2, 3, "plus"), Branch(1e6 + 3, 2, 3, "minus"))
    assert [pt for pt, _ in hits] == [(1e6, 1.0), (1e6 + 2, -1.0)]
    assert not any(tangent for _, tangent in hits)


def test_intersect_tangent_branches():
    hits = intersect_branches(Branch(0, 0, 1, "plus"), Branch(2, 2, 1, "minus"))
    assert hits == [((1.0, 1.0), True)]

    k = 1e-4
    hits = intersect_branches(Branch(0, 0, k * k, "plus"), Branch(2 * k, 2 * k, k * k, "minus"))
    assert len(hits) == 1
    (u, v), tangent = hits[0]
    assert (u, v) == pytest.approx((k, k), rel=1e-9)
    assert tangent


def test_intersect_disjoint_supports():
    assert intersect_branches(Branch(1, 0, 4, "plus"), Branch(0, 0, -4, "plus")) == []


def test_intersect_identical_branches_raises():
    with pytest.raises(ValueError, match="degenerate overlap"):
        intersect_branches(LENS_LOWER, Branch(-2, -2, 3, "plus"))


def test_numerical_rank():
    assert numerical_rank(np.zeros((2, 3))) == (0, 0.0)
    rank, smallest = numerical_rank([[3.0, 1.0, -2.0, 0.0], [-1.0, -3.0, 0.0, -2.0]])
    assert rank == 2
    assert smallest > 0
    assert numerical_rank([[1.0, 2.0], [2.0, 4.0]])[0] == 1


small_ints = st.integers(min_value=-4, max_value=4)
nonzero_ints = st.integers(min_value=-6, max_value=6).filter(lambda c: c != 0)
sides = st.sampled_from(["plus", "minus"])
branches = st.builds(Branch, small_ints, small_ints, nonzero_ints, sides)


@given(br=branches, offset=st.floats(min_value=1e-3, max_value=20.0))
def test_height_lies_on_branch(br, offset):
    u = br.a + br.orientation * offset
    v = br.height(u)
    assert v is not None
    assert branch_contains(br, (u, v))
    assert not branch_contains(br.other(), (u, v))


@given(b1=branches, b2=branches)
def test_intersections_lie_on_both_branches(b1, b2):
    assume(b1 != b2)
    for (u, v), _ in intersect_branches(b1, b2):
        assert branch_contains(b1, (u, v), 1e-10)
        assert branch_contains(b2, (u, v), 1e-10)


@given(b1=branches, b2=branches)
def test_intersections_symmetric(b1, b2):
    assume(b1 != b2)
    forward = intersect_branches(b1, b2)
    backward = intersect_branches(b2, b1)
    assert len(forward) == len(backward)
    for (p, t1), (q, t2) in zip(forward, backward):
        assert p == pytest.approx(q, rel=1e-9, abs=1e-12)
        assert t1 == t2


coeffs = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)
exponent_rows = st.tuples(*[st.integers(min_value=0, max_value=2)] * 3)
polys = st.dictionaries(exponent_rows, coeffs, max_size=6).map(lambda t: Polynomial(3, t))
points = st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=3, max_size=3)


@settings(max_examples=50)
@given(p=polys, x=points)
def test_grad_matches_finite_differences(p, x):
    x = np.array(x)
    h = 1e-5
    g = p.grad(x)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (p.eval(x + e) - p.eval(x - e)) / (2 * h)
        assert g[k] == pytest.approx(fd, rel=1e-6, abs=1e-5)


@settings(max_examples=60)
@given(
    mu=st.floats(min_value=-1e6, max_value=1e6),
    r=st.floats(min_value=1e-4, max_value=10.0),
)
def test_shifted_lens_keeps_two_transversal_corners(mu, r):
    lower = Branch(mu - 2 * r, -2 * r, 3 * r * r, "plus")
    upper = Branch(mu + 2 * r, 2 * r, 3 * r * r, "minus")
    hits = intersect_branches(lower, upper)
    assert len(hits) == 2
    assert not any(tangent for _, tangent in hits)
    (u0, v0), (u1, v1) = (pt for pt, _ in hits)
    assert abs(u0 - (mu - r)) <= 1e-9 * (1.0 + abs(mu))
    assert abs(u1 - (mu + r)) <= 1e-9 * (1.0 + abs(mu))
    assert v0 == pytest.approx(r, rel=1e-4)
    assert v1 == pytest.approx(-r, rel=1e-4)
