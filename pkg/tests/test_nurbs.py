import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgnanoplate.errors import (
    DomainError,
    InsufficientControlPointsError,
    KnotVectorError,
    UnsupportedOrderError,
)
from fgnanoplate.nurbs import (
    KnotVector,
    PatchMesh,
    bspline_basis,
    bspline_basis_derivs,
    eval_basis,
    geometry,
    make_patch,
)

XI_REPEATED = [0, 0, 0, 0, 1 / 3, 1 / 3, 1 / 3, 1 / 2, 2 / 3, 1, 1, 1, 1]


def cox_de_boor(i, p, knots, x):
    """Textbook recursive definition; half-open support, last knot closed."""
    if p == 0:
        if knots[i] <= x < knots[i + 1]:
            return 1.0
        if x == knots[-1] and knots[i] < knots[i + 1] == knots[-1]:
            return 1.0
        return 0.0
    left = 0.0 if knots[i + p] == knots[i] else (x - knots[i]) / (knots[i + p] - knots[i]) * cox_de_boor(i, p - 1, knots, x)
    right = (
        0.0
        if knots[i + p + 1] == knots[i + 1]
        else (knots[i + p + 1] - x) / (knots[i + p + 1] - knots[i + 1]) * cox_de_boor(i + 1, p - 1, knots, x)
    )
    return left + right


def full_basis(kv, xi):
    span = kv.find_span(xi)
    out = np.zeros(kv.n_basis)
    out[span - kv.degree : span + 1] = bspline_basis(kv, span, xi)
    return out


class TestKnotVector:
    def test_validation(self):
        with pytest.raises(KnotVectorError):
            KnotVector([0, 0, 1, 0.5, 1, 1], 2)
        with pytest.raises(KnotVectorError):
            KnotVector([0, 0, 0.5, 1, 1, 1], 2)  # start multiplicity 2, not 3
        with pytest.raises(KnotVectorError):
            KnotVector([0, 0, 1, 1], 2)
        with pytest.raises(KnotVectorError):
            KnotVector([0, 0, 0, 0, 1, 1, 1, 1], 2)  # end multiplicity 4

    def test_repeated_interior_knots_are_valid(self):
        kv = KnotVector(XI_REPEATED, 3)
        assert kv.n_basis == 9
        assert kv.nonzero_spans() == [3, 6, 7, 8]

    def test_find_span_last_knot_maps_to_final_span(self):
        kv = KnotVector.open_uniform(3, 6)
        assert kv.find_span(1.0) == kv.nonzero_spans()[-1]
        assert kv.find_span(0.0) == 3
        with pytest.raises(DomainError):
            kv.find_span(1.5)

    def test_open_uniform_counts(self):
        kv = KnotVector.open_uniform(3, 5)
        np.testing.assert_allclose(kv.knots, [0, 0, 0, 0, 0.5, 1, 1, 1, 1])
        with pytest.raises(InsufficientControlPointsError):
            KnotVector.open_uniform(3, 3)


class TestBasis:
    def test_degree_zero(self):
        kv = KnotVector([0, 0.25, 0.5, 1], 0)
        assert bspline_basis(kv, 1, 0.3).tolist() == [1.0]

    def test_quadratic_bernstein_midpoint(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
        np.testing.assert_allclose(bspline_basis(kv, 2, 0.5), [0.25, 0.5, 0.25], atol=1e-15)

    def test_repeated_interior_knots_at_0_4(self):
        # frozen from the recursive definition: N_3..N_6 at xi = 0.4
        kv = KnotVector(XI_REPEATED, 3)
        span = kv.find_span(0.4)
        vals = bspline_basis(kv, span, 0.4)
        np.testing.assert_allclose(vals, [0.216, 0.592, 0.184, 0.008], atol=1e-14)
        assert vals.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.all(vals >= 0)

    @pytest.mark.parametrize("xi", [0.0, 0.1, 1 / 3, 0.4, 0.5, 0.77, 1.0])
    def test_matches_recursive_definition(self, xi):
        kv = KnotVector(XI_REPEATED, 3)
        expected = [cox_de_boor(i, 3, XI_REPEATED, xi) for i in range(kv.n_basis)]
        np.testing.assert_allclose(full_basis(kv, xi), expected, atol=1e-14)

    def test_out_of_range(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
        with pytest.raises(DomainError):
            bspline_basis(kv, 2, 1.2)
        with pytest.raises(DomainError):
            bspline_basis(kv, 1, 0.5)  # zero-length span


class TestDerivatives:
    def test_linear_hats(self):
        kv = KnotVector([0, 0, 1, 1], 1)
        d = bspline_basis_derivs(kv, 1, 0.3, 1)
        np.testing.assert_allclose(d[:, 0], [0.7, 0.3])
        np.testing.assert_allclose(d[:, 1], [-1, 1])

    def test_quadratic_midpoint(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
        np.testing.assert_allclose(bspline_basis_derivs(kv, 2, 0.5, 1)[:, 1], [-1, 0, 1], atol=1e-14)

    def test_order_above_degree(self):
        kv = KnotVector([0, 0, 1, 1], 1)
        with pytest.raises(UnsupportedOrderError):
            bspline_basis_derivs(kv, 1, 0.5, 2)

    @settings(max_examples=60, deadline=None)
    @given(xi=st.floats(0.0, 1.0), k=st.integers(0, 3))
    def test_consistency_with_values_and_fd(self, xi, k):
        kv = KnotVector(XI_REPEATED, 3)
        span = kv.find_span(xi)
        d = bspline_basis_derivs(kv, span, xi, k)
        np.testing.assert_allclose(d[:, 0], bspline_basis(kv, span, xi), atol=1e-14)
        for j in range(1, k + 1):
            assert abs(d[:, j].sum()) < 1e-10
        # central difference of the value column on the full basis
        eps = 1e-6
        lo, hi = xi - eps, xi + eps
        if k >= 1 and lo >= 0 and hi <= 1 and kv.find_span(lo) == kv.find_span(hi) == span:
            fd = (full_basis(kv, hi) - full_basis(kv, lo)) / (hi - lo)
            np.testing.assert_allclose(d[:, 1], fd[span - 3 : span + 1], atol=1e-5)

    def test_second_derivative_of_cubic_bernstein(self):
        # N = (1-x)^3, 3x(1-x)^2, 3x^2(1-x), x^3 ; second derivatives by hand
        kv = KnotVector([0, 0, 0, 0, 1, 1, 1, 1], 3)
        x = 0.25
        d = bspline_basis_derivs(kv, 3, x, 2)
        expected = [6 * (1 - x), 18 * x - 12, 6 - 18 * x, 6 * x]
        np.testing.assert_allclose(d[:, 2], expected, atol=1e-12)


class TestPatch:
    def test_table_discretization(self):
        patch = make_patch(10, 10, 3, 5, 5)
        np.testing.assert_allclose(patch.knot_u.knots, [0, 0, 0, 0, 0.5, 1, 1, 1, 1])
        assert patch.n_control_points == 25
        assert len(patch.elements) == 4
        assert all(el.connectivity.size == 16 for el in patch.elements)

    def test_bilinear_single_element(self):
        patch = make_patch(10, 10, 1, 2, 2)
        assert len(patch.elements) == 1
        np.testing.assert_allclose(patch.control_points, [[0, 0], [10, 0], [0, 10], [10, 10]])

    def test_insufficient_control_points(self):
        with pytest.raises(InsufficientControlPointsError):
            make_patch(10, 10, 3, 3, 5)

    def test_bad_weights(self):
        p = make_patch(1, 1, 1, 2, 2)
        with pytest.raises(Exception):
            PatchMesh(p.knot_u, p.knot_v, p.control_points, [1, 1, 0, 1])

    @pytest.mark.parametrize("p,n", [(1, 3), (2, 6), (3, 5), (3, 9)])
    def test_center_maps_to_center(self, p, n):
        patch = make_patch(10, 6, p, n, n + 1)
        np.testing.assert_allclose(geometry(patch, 0.5, 0.5), [5, 3], atol=1e-12)

    def test_affine_geometry_and_constant_jacobian(self):
        a, b = 10.0, 5.0
        patch = make_patch(a, b, 3, 7, 6)
        rng = np.random.default_rng(0)
        for xi, eta in rng.random((20, 2)):
            be = eval_basis(patch, patch.locate(xi, eta), xi, eta)
            np.testing.assert_allclose(be.point, [a * xi, b * eta], atol=1e-12)
            # hand computed affine jacobian of (xi, eta) -> (a xi, b eta)
            np.testing.assert_allclose(be.jacobian, np.diag([a, b]), atol=1e-12)
            assert be.det_jacobian == pytest.approx(a * b, rel=1e-12)

    def test_partition_of_unity_and_nonnegativity(self):
        patch = make_patch(10, 10, 3, 9, 9)
        rng = np.random.default_rng(1)
        for e, el in enumerate(patch.elements):
            for _ in range(5):
                xi = rng.uniform(*el.xi_range)
                eta = rng.uniform(*el.eta_range)
                be = eval_basis(patch, e, xi, eta)
                assert abs(be.values.sum() - 1) < 1e-12
                assert np.all(be.values >= 0)
                assert abs(be.grad.sum(axis=0)).max() < 1e-10

    def test_unit_weights_reduce_to_bspline_product(self):
        patch = make_patch(3, 2, 2, 5, 4)
        xi, eta = 0.37, 0.81
        e = patch.locate(xi, eta)
        el = patch.elements[e]
        nu = bspline_basis(patch.knot_u, el.span_u, xi)
        nv = bspline_basis(patch.knot_v, el.span_v, eta)
        np.testing.assert_allclose(eval_basis(patch, e, xi, eta).values, np.outer(nv, nu).ravel(), atol=1e-15)

    def test_rational_weights_partition_and_gradients(self):
        base = make_patch(4, 3, 2, 5, 5)
        w = np.linspace(0.5, 2.0, base.n_control_points)
        patch = PatchMesh(base.knot_u, base.knot_v, base.control_points, w)
        xi, eta = 0.41, 0.62
        e = patch.locate(xi, eta)
        be = eval_basis(patch, e, xi, eta)
        assert abs(be.values.sum() - 1) < 1e-12
        # explicit rational projection R_i = N_i w_i / sum N_j w_j
        el = patch.elements[e]
        N = np.outer(bspline_basis(patch.knot_v, el.span_v, eta), bspline_basis(patch.knot_u, el.span_u, xi)).ravel()
        ww = w[el.connectivity]
        np.testing.assert_allclose(be.values, N * ww / (N * ww).sum(), atol=1e-15)
        # parametric gradient against central differences
        h = 1e-6
        fd_xi = (eval_basis(patch, e, xi + h, eta).values - eval_basis(patch, e, xi - h, eta).values) / (2 * h)
        fd_eta = (eval_basis(patch, e, xi, eta + h).values - eval_basis(patch, e, xi, eta - h).values) / (2 * h)
        np.testing.assert_allclose(be.grad_param[:, 0], fd_xi, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(be.grad_param[:, 1], fd_eta, rtol=1e-6, atol=1e-8)

    def test_physical_gradient_matches_fd(self):
        patch = make_patch(10, 5, 3, 8, 8)
        xi, eta = 0.33, 0.71
        e = patch.locate(xi, eta)
        be = eval_basis(patch, e, xi, eta)
        h = 1e-6
        # x = a xi, y = b eta on this affine patch
        fdx = (eval_basis(patch, e, xi + h, eta).values - eval_basis(patch, e, xi - h, eta).values) / (2 * h * 10)
        fdy = (eval_basis(patch, e, xi, eta + h).values - eval_basis(patch, e, xi, eta - h).values) / (2 * h * 5)
        np.testing.assert_allclose(be.grad[:, 0], fdx, rtol=1e-6, atol=1e-9)
        np.testing.assert_allclose(be.grad[:, 1], fdy, rtol=1e-6, atol=1e-9)

    def test_corner_interpolation(self):
        patch = make_patch(10, 10, 3, 6, 6)
        n = patch.n_control_points
        for (xi, eta), node in [((0, 0), 0), ((1, 0), 5), ((0, 1), n - 6), ((1, 1), n - 1)]:
            e = patch.locate(xi, eta)
            be = eval_basis(patch, e, xi, eta)
            full = np.zeros(n)
            full[patch.elements[e].connectivity] = be.values
            assert full[node] == pytest.approx(1.0, abs=1e-14)
            assert np.abs(np.delete(full, node)).max() < 1e-14

    def test_eval_outside_element(self):
        patch = make_patch(10, 10, 3, 5, 5)
        with pytest.raises(DomainError):
            eval_basis(patch, 0, 0.9, 0.1)
