"""The duality involution, the operator transport to the lattice side,
boundary bookkeeping, and the lattice-side spectral equations."""

import itertools

import pytest
from gmpy2 import mpq

from awbispec.awcore import QParams
from awbispec.duality import (
    BoundaryViolationError,
    DualityPoint,
    LatticeOperator,
    apply_n_operator,
    b_map,
    b_transport,
    bispectral_check,
    dual_map,
    dual_parameters,
    duality_identity_check,
    lattice_z_point,
    n_eigenvalue,
    n_operator_family,
    symbolic_z_family_member,
)
from awbispec.laurent import LaurentPoly
from awbispec.qdiff import CoeffFn, QDiffOperator, z_eigenvalue
from conftest import rand_rational


def random_point(rng, params):
    d = params.d
    return DualityPoint(
        tuple(rand_rational(rng, 60) for _ in range(d)),
        tuple(rand_rational(rng, 60) for _ in range(d)),
        params,
    )


class TestInvolution:
    def test_hundred_random_points(self, params2, rng):
        for _ in range(100):
            pt = random_point(rng, params2)
            back = dual_map(dual_map(pt))
            assert back.u == pt.u
            assert back.z == pt.z
            assert back.params.alpha == pt.params.alpha

    def test_tail_product_preserved(self, params2, rng):
        dp = dual_parameters(params2)
        a, at = params2.a, dp.a
        assert at(3) * at(4) == a(3) * a(4)

    def test_index_reconstruction_identity(self, params2, rng):
        # alpha_j z_j = alpha_{d+1} alpha_{d+2} q^{Ntilde_{d+1-j}}
        pt = random_point(rng, params2)
        dp = dual_map(pt)
        qNt = [mpq(1)]
        for t in dp.u:
            qNt.append(qNt[-1] * t)
        tail = params2.a(3) * params2.a(4)
        for j in (1, 2):
            assert params2.a(j) * pt.z[j - 1] == tail * qNt[3 - j]


class TestDualityIdentity:
    def test_zero_indices(self, params2):
        r = duality_identity_check(params2, (0, 0), (0, 0))
        assert r["pass"] and r["lhs"] == r["rhs"]

    def test_d1(self, params1):
        assert duality_identity_check(params1, (1,), (1,))["pass"]

    def test_d2_table(self, params2):
        idx = [n for n in itertools.product(range(3), repeat=2) if sum(n) <= 2]
        for n in idx:
            for nt in idx:
                assert duality_identity_check(params2, n, nt)["pass"], (n, nt)

    def test_lattice_point_reconstruction(self, params2):
        z = lattice_z_point(params2, (1, 2))
        q = params2.q
        tail = params2.a(3) * params2.a(4)
        assert z[0] == tail / params2.a(1) * q**3
        assert z[1] == tail / params2.a(2) * q**1


class TestTransport:
    def test_identity_maps_to_identity(self, params2):
        d = params2.d
        dim = 2 * d + 3
        ident = QDiffOperator.identity(dim, params2.q)
        img = b_map(ident, params2)
        assert set(img.support) == {(0,) * d}
        cf = img.support[(0,) * d]
        assert cf.num == LaurentPoly.one(d) and not cf.den_factors

    def test_marker_factor_becomes_lattice_vanisher(self, params2):
        """1 - a_j z_j / (a_{j-1} z_{j-1}) maps to 1 - u_{d+2-j}^{-1}."""
        d = params2.d
        dim = 2 * d + 3
        j = 2  # -> coordinate d+2-j = 2
        one = LaurentPoly.one(dim)
        term = (
            LaurentPoly.variable(dim, d + 1 + j)  # alpha_j
            * LaurentPoly.variable(dim, j)  # z_j
            * LaurentPoly.variable(dim, d + 1 + (j - 1), -1)  # alpha_{j-1}^{-1}
            * LaurentPoly.variable(dim, j - 1, -1)  # z_{j-1}^{-1}
        )
        op = QDiffOperator(dim, params2.q, {(0,) * dim: CoeffFn(one - term)})
        img = b_transport(op, d, params2.base.s)
        want = LaurentPoly.one(dim) - LaurentPoly.variable(dim, 2, -1)
        assert img.support[(0,) * dim].num == want

    def test_commutation_relation_respected(self, params2, rng):
        # b(E_{z_k}) b(f) = b(f(z q^{e_k})) b(E_{z_k})
        d = params2.d
        dim = 2 * d + 3
        q = params2.q
        for k in (1, 2):
            f = LaurentPoly.variable(dim, 1, 2) * LaurentPoly.variable(dim, d + 2) + 3
            ek = tuple(1 if t == k - 1 else 0 for t in range(dim))
            shift_op = QDiffOperator(dim, q, {ek: CoeffFn.constant(dim, 1)})
            mult_op = QDiffOperator(dim, q, {(0,) * dim: CoeffFn(f)})
            shifted_mult = QDiffOperator(
                dim, q, {(0,) * dim: CoeffFn(f.q_shift(q, ek))}
            )
            lhs = b_transport(shift_op, d, params2.base.s).compose(
                b_transport(mult_op, d, params2.base.s)
            )
            rhs = b_transport(shifted_mult, d, params2.base.s).compose(
                b_transport(shift_op, d, params2.base.s)
            )
            assert lhs.equals_rational(rhs)

    def test_homomorphism_on_products(self, params2, rng):
        d = params2.d
        dim = 2 * d + 3
        q = params2.q
        s = params2.base.s

        def random_op():
            support = {}
            for _ in range(2):
                nu = [0] * dim
                nu[rng.randint(0, d - 1)] = rng.choice((-1, 1))
                coeff = LaurentPoly.variable(dim, rng.randint(1, d)) * rand_rational(
                    rng, 9
                ) + LaurentPoly.variable(dim, d + 1 + rng.randint(0, d + 2))
                support[tuple(nu)] = CoeffFn(coeff)
            return QDiffOperator(dim, q, support)

        for _ in range(5):
            a_op, b_op = random_op(), random_op()
            lhs = b_transport(a_op.compose(b_op), d, s)
            rhs = b_transport(a_op, d, s).compose(b_transport(b_op, d, s))
            assert lhs.equals_rational(rhs)


class TestSymbolicConsistency:
    def test_parameter_substitution_reproduces_numeric_family(self, params2):
        """The extended-ring family member with alpha values substituted
        must coincide with the numeric builder's operator."""
        from awbispec.qdiff import z_operator_family

        d = params2.d
        numeric = z_operator_family(params2)
        for j in (1, 2):
            sym = symbolic_z_family_member(params2, j)
            images = [
                (mpq(1), tuple(1 if t == k else 0 for t in range(d)))
                for k in range(d)
            ]
            images += [(params2.a(m), (0,) * d) for m in range(d + 3)]
            support = {}
            for nu, cf in sym.support.items():
                num = cf.num.monomial_map(d, images)
                dens = tuple(f.monomial_map(d, images) for f in cf.den_factors)
                support[nu[:d]] = CoeffFn(num, dens)
            rebuilt = QDiffOperator(d, params2.q, support)
            assert rebuilt.equals_rational(numeric[j - 1])


class TestLatticeFamily:
    def test_d1_three_term(self, params1):
        op = n_operator_family(params1)[0]
        assert set(op.support) == {(-1,), (0,), (1,)}

    def test_backward_coefficient_vanishes_at_origin(self, params1):
        op = n_operator_family(params1)[0]
        assert op.coeff_value((-1,), (0,)) == 0
        assert op.coeff_value((-1,), (1,)) != 0

    def test_boundary_table_nonempty_d2(self, params2):
        for op in n_operator_family(params2):
            if any(any(t < 0 for t in w) for w in op.support):
                assert op.boundary

    def test_boundary_factors_cover_backward_shifts(self, params2):
        d = params2.d
        for op in n_operator_family(params2):
            for w, factors in op.boundary:
                for k, t in enumerate(w):
                    if t >= 0:
                        continue
                    marker = tuple(-1 if i == k else 0 for i in range(d))
                    hits = sum(1 for f in factors if marker in f.terms)
                    assert hits >= -t, (w, k)

    def test_single_and_double_backstep_vanishing(self, params2):
        """Coefficients of single back-steps vanish at index 0; double
        back-steps vanish at 0 and 1."""
        ops = n_operator_family(params2)
        for op in ops:
            for w in op.support:
                for k, t in enumerate(w):
                    if t == -1:
                        n = [2, 2]
                        n[k] = 0
                        assert op.coeff_value(w, n) == 0
                    if t == -2:
                        for v in (0, 1):
                            n = [2, 2]
                            n[k] = v
                            assert op.coeff_value(w, n) == 0

    def test_constant_operator_application(self, params2):
        cf = CoeffFn(LaurentPoly.variable(2, 1) + 2)
        op = LatticeOperator(2, params2.base, {(0, 0): cf})
        q = params2.q
        got = op.apply_at(lambda m: mpq(5), (1, 3))
        assert got == 5 * (q + 2)

    def test_boundary_violation_raised(self, params2):
        cf = CoeffFn(LaurentPoly.one(2))
        op = LatticeOperator(2, params2.base, {(-1, 0): cf})
        with pytest.raises(BoundaryViolationError):
            op.apply_at(lambda m: mpq(1), (0, 0))

    def test_images_commute_on_lattice_functions(self, params2):
        ops = n_operator_family(params2)
        q = params2.q

        def f(m):
            return q ** (3 * m[0] + m[1]) + m[0] * m[1] + 2

        a, b = ops
        for n in [(1, 1), (2, 0), (0, 2), (2, 3)]:
            lhs = a.apply_at(lambda m: b.apply_at(f, m), n)
            rhs = b.apply_at(lambda m: a.apply_at(f, m), n)
            assert lhs == rhs


class TestNEigenvalue:
    def test_root_point(self, params2):
        j = 1
        root = params2.a(3) * params2.a(4) / params2.a(2)
        z = (mpq(3, 7), root)
        assert n_eigenvalue(params2, z, j) == 0

    def test_factored_equals_expanded(self, params2, rng):
        for j in (1, 2):
            z = tuple(rand_rational(rng, 40) for _ in range(2))
            tail = params2.a(3) * params2.a(4)
            zc = z[2 - j]
            x = (zc + 1 / zc) / 2
            r = tail / params2.a(3 - j)
            want = -1 - r**2 + 2 * r * x
            assert n_eigenvalue(params2, z, j) == want

    def test_matches_dual_z_eigenvalue(self, params2):
        """kappa at a lattice-reconstructed z equals the z-side
        eigenvalue formula in the dual data."""
        for nt in [(0, 0), (1, 0), (2, 1)]:
            z = lattice_z_point(params2, nt)
            dp = dual_parameters(params2)
            for j in (1, 2):
                assert n_eigenvalue(params2, z, j) == z_eigenvalue(dp, nt, j)


class TestBispectral:
    def test_index_zero(self, params2, rng):
        z = tuple(rand_rational(rng, 30) for _ in range(2))
        r = bispectral_check(params2, (0, 0), z, 1)
        assert r["pass"]

    def test_d1_degree_two(self, params1, rng):
        ops = n_operator_family(params1)
        for _ in range(3):
            z = (rand_rational(rng, 40),)
            assert bispectral_check(params1, (2,), z, 1, ops=ops)["pass"]

    def test_d2_with_boundary_indices(self, params2, rng):
        ops = n_operator_family(params2)
        pts = [tuple(rand_rational(rng, 40) for _ in range(2)) for _ in range(3)]
        for n in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)]:
            for j in (1, 2):
                for z in pts:
                    assert bispectral_check(params2, n, z, j, ops=ops)["pass"], (n, j, z)

    def test_apply_n_operator_alias(self, params1):
        op = n_operator_family(params1)[0]
        f = lambda m: mpq(m[0] + 1)
        assert apply_n_operator(op, f, (2,)) == op.apply_at(f, (2,))
