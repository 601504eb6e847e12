"""Operator algebra: coefficient formulas, both operator forms,
application, composition, involutions, the commuting family, spectra,
and triangularity (including a mutation test)."""

import itertools

import pytest
from gmpy2 import mpq

from awbispec.awcore import mv_poly_regular
from awbispec.laurent import InexactDivisionError, LaurentPoly, XPoly
from awbispec.qdiff import (
    CoeffFn,
    PoleError,
    QDiffOperator,
    coeff_A,
    coeff_C,
    commutator_support,
    commutator_values_at,
    delta_form_operator,
    numeric_env,
    shift_form_operator,
    shift_form_scalar,
    triangularity_constant,
    triangularity_report,
    z_eigenvalue,
    z_operator_family,
)
from awbispec.verify import sample_operator_points

from conftest import rand_rational


def znum(dim, j, p=1):
    return LaurentPoly.variable(dim, j, p)


def sample_point(rng, ops, d, q):
    import random

    return sample_operator_points(ops, d, random.Random(rng.randint(0, 10**9)), 1, q)[0]


class TestCoeffA:
    def test_d1_forward_formula(self, params1):
        a0, a1, a2, a3 = params1.alpha
        q = params1.q
        cf = coeff_A(params1, (1,))
        zv = mpq(5, 7)
        want = (
            (1 - a1 * zv)
            * (1 - a1 * zv / a0**2)
            * (1 - a2 * a3 * zv / a1)
            * (1 - a2 * zv / (a1 * a3))
            / ((1 - zv**2) * (1 - q * zv**2))
        )
        assert cf.evaluate((zv,)) == want

    def test_d1_backward_is_involution_image(self, params1):
        fwd = coeff_A(params1, (1,))
        bwd = coeff_A(params1, (-1,))
        assert bwd.equals_rational(fwd.involution(1))

    def test_d2_degree_count(self, params2):
        cf = coeff_A(params2, (1, 1))
        assert cf.num.total_degree_max() == 8
        assert cf.den.total_degree_max() == 8

    def test_zero_shift_rejected(self, params2):
        with pytest.raises(ValueError):
            coeff_A(params2, (0, 0))

    def test_alphabet_enforced(self, params2):
        with pytest.raises(ValueError):
            coeff_A(params2, (2, 0))


class TestCoeffC:
    def test_d1_forward_equals_A(self, params1):
        assert coeff_C(params1, (1,)).equals_rational(coeff_A(params1, (1,)))
        assert coeff_C(params1, (-1,)).equals_rational(coeff_A(params1, (-1,)))

    def test_d1_zero_shift_formula(self, params1):
        a0, a1, a2, a3 = params1.alpha
        q = params1.q
        x0 = (a0 + 1 / a0) / 2
        x2 = (a3 + 1 / a3) / 2
        zv = mpq(5, 7)
        x1 = (zv + 1 / zv) / 2
        b00_0 = 1 + a1**2 / (q * a0**2) - 4 * a1 * x0 * x1 / ((q + 1) * a0)
        b00_1 = 1 + a2**2 / (q * a1**2) - 4 * a2 * x1 * x2 / ((q + 1) * a1)
        want = q * (q + 1) * b00_0 * b00_1 / ((1 - q * zv**2) * (1 - q / zv**2))
        assert coeff_C(params1, (0,)).evaluate((zv,)) == want

    def test_quadratic_block_formula(self, params2):
        # the (0,0) block at a generic point: 1 + a_{j+1}^2/(q a_j^2)
        #                                     - 4 a_{j+1} x_j x_{j+1} / ((q+1) a_j)
        from awbispec.qdiff import _B_factor

        env = numeric_env(params2)
        a1, a2 = params2.a(1), params2.a(2)
        q = params2.q
        z1, z2 = mpq(3, 5), mpq(7, 4)
        x1, x2 = (z1 + 1 / z1) / 2, (z2 + 1 / z2) / 2
        got = _B_factor(env, 1, 0, 0).evaluate((z1, z2))
        assert got == 1 + a2**2 / (q * a1**2) - 4 * a2 * x1 * x2 / ((q + 1) * a1)

    def test_d2_all_coefficients_finite_at_random_point(self, params2, rng):
        ops = [shift_form_operator(params2)]
        z = sample_point(rng, ops, 2, params2.q)
        for nu in itertools.product((-1, 0, 1), repeat=2):
            coeff_C(params2, nu).evaluate(z)


class TestForms:
    def test_delta_support_in_box(self, params2):
        op = delta_form_operator(params2)
        assert set(op.support) <= set(itertools.product((-1, 0, 1), repeat=2))

    def test_d1_delta_coefficients_are_A(self, params1):
        op = delta_form_operator(params1)
        assert op.support[(1,)].equals_rational(coeff_A(params1, (1,)))
        assert op.support[(-1,)].equals_rational(coeff_A(params1, (-1,)))

    def test_d1_forms_differ_only_at_zero_shift(self, params1):
        delta = delta_form_operator(params1)
        shift = shift_form_operator(params1)
        for nu in ((1,), (-1,)):
            assert delta.support[nu].num == shift.support[nu].num
            assert delta.support[nu].den == shift.support[nu].den
        assert delta.support[(0,)].num != shift.support[(0,)].num
        assert delta.support[(0,)].equals_rational(shift.support[(0,)])

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_form_equivalence_at_random_points(self, d, request, rng):
        params = request.getfixturevalue(f"params{d}")
        delta = delta_form_operator(params)
        shift = shift_form_operator(params)
        support = set(delta.support) | set(shift.support)
        for _ in range(3):
            z = sample_point(rng, [delta, shift], d, params.q)
            for nu in support:
                assert delta.coeff_value(nu, z) == shift.coeff_value(nu, z)

    def test_inversion_invariance(self, params2):
        for op in (delta_form_operator(params2), shift_form_operator(params2)):
            for k in (1, 2):
                assert op.involution(k).equals_rational(op)

    def test_scalar_term(self, params1):
        a0, a1, a2, a3 = params1.alpha
        q = params1.q
        x0 = (a0 + 1 / a0) / 2
        x2 = (a3 + 1 / a3) / 2
        assert shift_form_scalar(params1) == 1 + a2**2 / (q * a0**2) - 4 * a2 * x0 * x2 / (
            (q + 1) * a0
        )


class TestApply:
    def test_forward_difference_of_x(self, params1):
        # Delta(x) = (z^2 q - 1)(q - 1) / (2 z q) as a Laurent identity
        q = params1.q
        x = (znum(1, 1) + znum(1, 1, -1)) * mpq(1, 2)
        delta_x = x.q_shift(q, (1,)) - x
        want = (znum(1, 1, 2) * q - 1) * (q - 1) * mpq(1, 2)
        want = want.exact_divide(znum(1, 1) * q)
        assert delta_x == want

    def test_annihilates_constants(self, params2):
        op = shift_form_operator(params2)
        assert op.apply(XPoly.constant(2, 1)).is_zero()

    def test_degree_one_diagonal_action(self, params1):
        op = shift_form_operator(params1)
        x1 = XPoly.variable(1, 1)
        resid = op.apply(x1) - x1 * triangularity_constant(params1, 1)
        assert not resid.is_zero() and resid.total_degree() == 0

    def test_apply_matches_pointwise(self, params2, rng):
        op = shift_form_operator(params2)
        p = XPoly(2, {(1, 0): mpq(2), (0, 2): mpq(-1, 3), (0, 0): mpq(1, 7)})
        image = op.apply(p)
        for _ in range(3):
            z = sample_point(rng, [op], 2, params2.q)
            want = op.apply_at_point(
                lambda zz: p.evaluate([(t + 1 / t) / 2 for t in zz]), z
            )
            assert image.evaluate([(t + 1 / t) / 2 for t in z]) == want

    def test_identity_support(self, params2, rng):
        op = QDiffOperator.identity(2, params2.q)
        z = (mpq(3, 5), mpq(7, 2))
        assert op.apply_at_point(lambda zz: zz[0] + zz[1], z) == z[0] + z[1]

    def test_pointwise_linearity(self, params2, rng):
        op = shift_form_operator(params2)
        z = sample_point(rng, [op], 2, params2.q)
        f = lambda zz: zz[0] ** 2 + 1
        g = lambda zz: zz[1] - 3
        both = op.apply_at_point(lambda zz: f(zz) + 2 * g(zz), z)
        assert both == op.apply_at_point(f, z) + 2 * op.apply_at_point(g, z)

    def test_pole_reported_with_shift(self, params1):
        op = shift_form_operator(params1)
        with pytest.raises(PoleError) as err:
            op.apply_at_point(lambda zz: mpq(1), (mpq(1),))  # z^2 = 1 pole
        assert err.value.shift is not None


class TestAlgebra:
    def test_compose_with_identity(self, params2):
        op = shift_form_operator(params2)
        ident = QDiffOperator.identity(2, params2.q)
        assert op.compose(ident).equals_rational(op)
        assert ident.compose(op).equals_rational(op)

    def test_self_commutator_vanishes(self, params1):
        op = shift_form_operator(params1)
        comm = op.commutator(op)
        assert all(cf.is_zero() for cf in comm.support.values()) or not comm.support

    def test_involution_squared(self, params2):
        op = shift_form_operator(params2)
        assert op.involution(1).involution(1).equals_rational(op)

    def test_involution_of_single_shift(self, params2):
        g = CoeffFn(znum(2, 1) + 2 * znum(2, 2))
        op = QDiffOperator(2, params2.q, {(1, 0): g})
        img = op.involution(1)
        assert set(img.support) == {(-1, 0)}
        assert img.support[(-1, 0)].num == znum(2, 1, -1) + 2 * znum(2, 2)

    def test_composition_relation(self, params2):
        # E_{z_1} g(z) = g(z q^{e_1}) E_{z_1}
        q = params2.q
        g = CoeffFn(znum(2, 1, 2) * znum(2, 2))
        shift = QDiffOperator(2, q, {(1, 0): CoeffFn.constant(2, 1)})
        mult = QDiffOperator(2, q, {(0, 0): g})
        lhs = shift.compose(mult)
        rhs = QDiffOperator(2, q, {(0, 0): g.q_shift(q, (1, 0))}).compose(shift)
        assert lhs.equals_rational(rhs)


class TestFamily:
    def test_last_member_is_full_operator(self, params2):
        fam = z_operator_family(params2)
        assert fam[-1].equals_rational(shift_form_operator(params2))

    def test_no_shift_beyond_own_coordinates(self, params3):
        fam = z_operator_family(params3)
        for j, op in enumerate(fam, start=1):
            for nu in op.support:
                assert all(t == 0 for t in nu[j:])

    def test_spectral_equation_d2(self, params2, rng):
        fam = z_operator_family(params2)
        n = (1, 2)
        for j in (1, 2):
            op = fam[j - 1]
            mu = z_eigenvalue(params2, n, j)
            for _ in range(2):
                z = sample_point(rng, [op], 2, params2.q)
                lhs = op.apply_at_point(lambda zz: mv_poly_regular(params2, n, zz), z)
                assert lhs == mu * mv_poly_regular(params2, n, z)

    def test_commutator_coefficients_vanish(self, params2, rng):
        a, b = z_operator_family(params2)
        for _ in range(3):
            z = sample_point(rng, [a, b], 2, params2.q)
            vals = commutator_values_at(a, b, z)
            assert set(vals) == set(commutator_support(a, b))
            assert all(v == 0 for v in vals.values())

    def test_commutator_annihilates_monomials(self, params2):
        a, b = z_operator_family(params2)
        for n in [(1, 0), (2, 2), (0, 3)]:
            p = XPoly.monomial(2, n)
            r = a.apply(b.apply(p)) - b.apply(a.apply(p))
            assert r.is_zero()


class TestEigenvalues:
    def test_zero_index(self, params2):
        assert z_eigenvalue(params2, (0, 0), 1) == 0
        assert z_eigenvalue(params2, (0, 3), 1) == 0  # N_1 = 0

    def test_full_operator_matches_triangularity_constant(self, params2):
        for n in [(1, 0), (1, 1), (2, 1)]:
            assert z_eigenvalue(params2, n, 2) == triangularity_constant(
                params2, sum(n)
            )

    def test_partial_sum_formula(self, params2):
        q = params2.q
        n = (1, 1)
        want = -(1 - q**-1) * (1 - params2.a(2) ** 2 / params2.a(0) ** 2)
        assert z_eigenvalue(params2, n, 1) == want

    def test_mutated_eigenvalue_detected(self, params2, rng):
        fam = z_operator_family(params2)
        n = (1, 1)
        j = 1
        op = fam[j - 1]
        z = sample_point(rng, [op], 2, params2.q)
        lhs = op.apply_at_point(lambda zz: mv_poly_regular(params2, n, zz), z)
        mutated = z_eigenvalue(params2, n, j) * params2.q
        assert lhs != mutated * mv_poly_regular(params2, n, z)


class TestTriangularity:
    def test_degree_zero(self, params2):
        rep = triangularity_report(params2, 0)
        assert rep == [{"monomial": [0, 0], "degree": 0, "pass": True}]

    def test_d2_up_to_four(self, params2):
        rep = triangularity_report(params2, 4)
        assert len(rep) == 15
        assert all(r["pass"] for r in rep)

    def test_mutation_detected(self, params2):
        op = shift_form_operator(params2)
        nu = (1, 0)
        op.support[nu] = op.support[nu] * params2.q  # corrupt one coefficient
        detected = False
        for n in [(1, 0), (0, 1), (1, 1)]:
            mono = XPoly.monomial(2, n)
            try:
                image = op.apply(mono)
            except InexactDivisionError:
                detected = True
                break
            resid = image - mono * triangularity_constant(params2, sum(n))
            if not (resid.is_zero() or resid.total_degree() <= sum(n) - 1):
                detected = True
                break
        assert detected
