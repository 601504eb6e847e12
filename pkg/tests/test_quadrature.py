"""Torus quadrature against closed-form norms, self-convergence, and
agreement between the numba and numpy kernel paths."""

import numpy as np
import pytest
from gmpy2 import mpq

from awbispec import gridkernels
from awbispec.awcore import aw_norm_1d, mv_norm, mv_poly_symbolic
from awbispec.laurent import XPoly
from awbispec.quadrature import (
    QuadratureGrid,
    inner_product,
    orthogonality_check,
    self_adjointness_check,
    weight_values,
    xpoly_evaluator,
)

from test_awcore import reduction_abcd


@pytest.fixture(scope="module")
def grid1():
    return QuadratureGrid(1, 256)


@pytest.fixture(scope="module")
def grid2():
    return QuadratureGrid(2, 128)


class TestGrid:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            QuadratureGrid(1, 4)

    def test_node_layout(self, grid2):
        assert grid2.thetas.shape == (128 * 128, 2)
        assert np.allclose(grid2.xs, np.cos(grid2.thetas))


class TestInnerProduct:
    def test_unit_norm_d1(self, params1, grid1):
        one = xpoly_evaluator(XPoly.constant(1, 1))
        got = inner_product(params1, one, one, grid1)
        want = mv_norm(params1, (0,))
        assert got == pytest.approx(want, rel=1e-6)

    def test_symmetry(self, params2, grid2):
        w = weight_values(params2, grid2)
        f = xpoly_evaluator(XPoly.variable(2, 1))
        g = xpoly_evaluator(XPoly.monomial(2, (0, 2)))
        assert inner_product(params2, f, g, grid2, weights=w) == inner_product(
            params2, g, f, grid2, weights=w
        )

    def test_grid_self_convergence(self, params1):
        one = xpoly_evaluator(XPoly.constant(1, 1))
        coarse = inner_product(params1, one, one, QuadratureGrid(1, 128))
        fine = inner_product(params1, one, one, QuadratureGrid(1, 256))
        assert abs(fine - coarse) < 1e-10 * abs(fine)

    def test_1d_norm_chain_vs_quadrature(self, params1, grid1):
        """h_0 and h_1/h_0 from the closed form against quadrature of
        the d = 1 reduction."""
        a, b, c, d = reduction_abcd(params1)
        base = params1.base
        h0 = aw_norm_1d(0, a, b, c, d, base)
        h1 = aw_norm_1d(1, a, b, c, d, base)
        w = weight_values(params1, grid1)
        p0 = xpoly_evaluator(mv_poly_symbolic(params1, (0,)))
        p1 = xpoly_evaluator(mv_poly_symbolic(params1, (1,)))
        q0 = inner_product(params1, p0, p0, grid1, weights=w)
        q1 = inner_product(params1, p1, p1, grid1, weights=w)
        assert q0 == pytest.approx(h0, rel=1e-8)
        assert q1 / q0 == pytest.approx(h1 / h0, rel=1e-8)


class TestOrthogonality:
    def test_diagonal_entry(self, params2, grid2):
        r = orthogonality_check(params2, (1, 0), (1, 0), grid2)
        assert r.passed and r.tolerance is not None

    def test_off_diagonal_entries(self, params2, grid2):
        w = weight_values(params2, grid2)
        polys = {}
        idx = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        for i, n in enumerate(idx):
            for m in idx[i + 1 :]:
                r = orthogonality_check(params2, n, m, grid2, weights=w, polys=polys)
                assert r.passed, (n, m, r)

    def test_lower_degree_orthogonality(self, params2, grid2):
        """P_n is orthogonal to every monomial of lower total degree."""
        w = weight_values(params2, grid2)
        n = (1, 1)
        pn = xpoly_evaluator(mv_poly_symbolic(params2, n))
        Hn = mv_norm(params2, n)
        for m in [(0, 0), (1, 0), (0, 1)]:
            mono = xpoly_evaluator(XPoly.monomial(2, m))
            val = inner_product(params2, pn, mono, grid2, weights=w)
            assert abs(val) <= 1e-6 * Hn


class TestSelfAdjointness:
    def test_equal_arguments_trivial(self, params2, grid2):
        f = XPoly.variable(2, 1)
        r = self_adjointness_check(params2, f, f, grid2)
        assert r.passed and float(r.observed) == 0.0

    def test_coordinate_pair(self, params2, grid2):
        r = self_adjointness_check(
            params2, XPoly.variable(2, 1), XPoly.variable(2, 2), grid2
        )
        assert r.passed

    def test_random_quadratic_pairs(self, params2, grid2, rng):
        from conftest import rand_rational

        w = weight_values(params2, grid2)
        monos = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        for _ in range(5):
            f = XPoly(2, {m: rand_rational(rng, 9) for m in monos[:4]})
            g = XPoly(2, {m: rand_rational(rng, 9) for m in monos[2:]})
            r = self_adjointness_check(params2, f, g, grid2, weights=w)
            assert r.passed


class TestKernels:
    def test_backends_agree_on_weight(self, params2, grid2):
        alphas = np.array([float(a) for a in params2.alpha])
        w_active = gridkernels.weight_grid(grid2.thetas, alphas, float(params2.q), 1e-16)
        w_numpy = gridkernels.weight_grid_numpy(
            grid2.thetas, alphas, float(params2.q), 1e-16
        )
        assert np.max(np.abs(w_active - w_numpy)) < 1e-11

    def test_xpoly_kernel_matches_exact(self, params2, grid2, rng):
        from conftest import rand_rational

        p = XPoly(2, {(2, 0): rand_rational(rng, 9), (1, 1): rand_rational(rng, 9)})
        fn = xpoly_evaluator(p)
        vals = fn(grid2.xs[:50])
        for i in range(50):
            xs = [mpq(f"{grid2.xs[i, j]:.10f}".rstrip("0")) for j in range(2)]
            want = float(p.evaluate_float(grid2.xs[i]))
            assert vals[i] == pytest.approx(want, rel=1e-12, abs=1e-14)

    def test_weight_matches_scalar_path(self, params2, grid2):
        import cmath

        from awbispec.awcore import mv_weight

        w = weight_values(params2, grid2)
        for i in (7, 123, 4001):
            zs = [cmath.exp(1j * grid2.thetas[i, j]) for j in range(2)]
            assert w[i] == pytest.approx(mv_weight(params2, zs), rel=1e-11, abs=1e-13)
