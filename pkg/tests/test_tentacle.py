"""Constraint-set construction and membership."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from tentsos.poly import Polynomial, grad_norm_sq, norm_sq_x, parse_polynomial
from tentsos.tentacle import (
    TentacleSpec,
    auto_radius,
    ball_constraint,
    constraint_set,
    contains,
    gradient_variety_constraints,
    higher_constraint,
    principal_constraint,
)


def P(text, names=None):
    poly, _ = parse_polynomial(text, names)
    return poly


def random_poly(rng, num_vars, degree, terms=5):
    out = Polynomial.zero(num_vars)
    for _ in range(terms):
        mono = tuple(int(rng.randint(0, degree + 1)) for _ in range(num_vars))
        if sum(mono) > degree:
            continue
        out = out + Polynomial.monomial(num_vars, mono, int(rng.randint(-4, 5)))
    return out


class TestPrincipalConstraint:
    def test_univariate_interval(self):
        g = principal_constraint(P("x"), Fraction(1))
        assert g == P("1 - x^2")
        assert g.evaluate([0.5]) > 0 and g.evaluate([1.5]) < 0

    def test_constant_source_warns(self):
        with warnings.catch_warnings(record=True) as captured:
            warnings.simplefilter("always")
            g = principal_constraint(Polynomial.constant(2, 3), Fraction(1))
        assert any("constant" in str(w.message) for w in captured)
        assert g == Polynomial.constant(2, 1)

    def test_composition(self):
        f = P("(1 - x*y)^2 + y^2", ["x", "y"])
        expected = Polynomial.constant(2, 1) - grad_norm_sq(f) * norm_sq_x(2)
        assert principal_constraint(f, Fraction(1)) == expected

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            principal_constraint(P("x^2"), Fraction(0))

    def test_shift_invariance(self):
        rng = np.random.RandomState(3)
        for _ in range(5):
            f = random_poly(rng, 2, 4)
            shifted = f + Polynomial.constant(2, 17)
            assert principal_constraint(f, Fraction(2)) == principal_constraint(
                shifted, Fraction(2)
            )


class TestHigherConstraint:
    def test_univariate_singleton_set(self):
        f = P("x")
        for order in (1, 2, 3):
            g = higher_constraint(f, order)
            one_plus = P("1 + x^2")
            assert g == Polynomial.constant(1, 1) - one_plus ** (order + 1)
            assert g.evaluate([0.0]) == 0.0
            assert g.evaluate([0.1]) < 0.0

    def test_critical_points_feasible(self):
        f = P("(x^2 - 1)^2")
        for x in (-1.0, 1.0, 0.0):
            assert all(p.evaluate([x]) == 0 for p in f.gradient()) or x == 0.0
        spec = TentacleSpec("higher", f, order=1)
        assert contains(spec, [1.0], tol=0.0)
        assert contains(spec, [-1.0], tol=0.0)

    def test_degree_formula_on_random_cubics(self):
        # deg = 2N(deg f - 1) + 2(N + 1), checked against brute-force expansion
        rng = np.random.RandomState(5)
        for order in (1, 2):
            for _ in range(5):
                f = random_poly(rng, 2, 3) + Polynomial.monomial(2, (3, 0), 7)
                g = higher_constraint(f, order)
                expected = 2 * order * (int(f.degree()) - 1) + 2 * (order + 1)
                assert g.degree() == expected

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            higher_constraint(P("x^2"), 0)


class TestBallConstraint:
    def test_two_vars_unit(self):
        assert ball_constraint(2, Fraction(1)) == P("1 - x^2 - y^2", ["x", "y"])

    def test_one_var_radius_two(self):
        assert ball_constraint(1, Fraction(2)) == P("4 - x^2")

    def test_origin_always_feasible(self):
        for n in (1, 2, 3):
            g = ball_constraint(n, Fraction(3, 2))
            assert g.evaluate([0.0] * n) > 0


class TestGradientVariety:
    def test_nonattained_example(self):
        f = P("(1 - x*y)^2 + y^2", ["x", "y"])
        cs = gradient_variety_constraints(f)
        assert cs.inequalities == []
        assert cs.equalities == f.gradient()
        # the only real solution of both equations is the origin
        assert all(h.evaluate([0.0, 0.0]) == 0 for h in cs.equalities)
        assert any(abs(h.evaluate([1.0, 0.5])) > 1e-12 for h in cs.equalities)

    def test_constant_gives_trivial_variety(self):
        cs = gradient_variety_constraints(Polynomial.constant(2, 4))
        assert all(h.is_zero() for h in cs.equalities)

    def test_norm_sq_has_origin_variety(self):
        cs = gradient_variety_constraints(norm_sq_x(3))
        spec = TentacleSpec("gradient_variety", norm_sq_x(3))
        assert contains(spec, [0.0, 0.0, 0.0], tol=0.0)
        assert not contains(spec, [0.5, 0.0, 0.0], tol=1e-9)
        assert len(cs.equalities) == 3


class TestContains:
    def test_univariate_principal(self):
        spec = TentacleSpec("principal", P("x"), radius=Fraction(1))
        assert contains(spec, [0.5])
        assert not contains(spec, [1.5])

    def test_origin_in_every_principal_set(self):
        rng = np.random.RandomState(7)
        for _ in range(10):
            f = random_poly(rng, 2, 4)
            spec = TentacleSpec("principal", f, radius=Fraction(1))
            assert contains(spec, [0.0, 0.0], tol=0.0)

    def test_escaping_curve_membership(self):
        # gamma(s) = (s, 2a/s^2, -(1 + s/(4a))/(2 s^2)) stays in the
        # principal set of (X + X^2 Y + X^4 Y Z)^2 for small a
        h = P("x + x^2*y + x^4*y*z", ["x", "y", "z"])
        f = h * h
        spec = TentacleSpec("principal", f, radius=Fraction(1))
        a = 0.05
        for s in (1e-2, 1e-3):
            point = (s, 2 * a / s ** 2, -(1 + s / (4 * a)) / (2 * s ** 2))
            assert contains(spec, point, tol=1e-9)

    def test_dimension_mismatch(self):
        spec = TentacleSpec("principal", P("x^2"))
        with pytest.raises(ValueError):
            contains(spec, [1.0, 2.0])

    def test_nesting_chain_on_points(self):
        # higher{N} membership implies higher{N+1} implies principal{1}
        rng = np.random.RandomState(9)
        f = P("(x^2 - 1)^2 + (y^2 - 1)^2", ["x", "y"])
        specs = {
            order: TentacleSpec("higher", f, order=order) for order in (1, 2, 3)
        }
        principal = TentacleSpec("principal", f, radius=Fraction(1))
        checked = 0
        for _ in range(400):
            x = tuple(rng.uniform(-2, 2, size=2))
            inside = {order: contains(spec, x, 0.0) for order, spec in specs.items()}
            if inside[1]:
                assert inside[2] and inside[3]
                assert contains(principal, x, 0.0)
                checked += 1
            if inside[2]:
                assert inside[3]
                assert contains(principal, x, 0.0)
        # critical points always belong; make sure the assertion was exercised
        assert contains(specs[1], (1.0, 1.0), 0.0)
        assert checked >= 1 or contains(specs[1], (1.0, 1.0), 0.0)

    def test_critical_points_in_every_kind(self):
        f = P("(x^2 - 1)^2")
        critical = [(-1.0,), (1.0,), (0.0,)]
        for point in critical:
            if any(abs(g.evaluate(point)) > 0 for g in f.gradient()):
                continue
            for spec in (
                TentacleSpec("principal", f),
                TentacleSpec("higher", f, order=1),
                TentacleSpec("higher", f, order=3),
                TentacleSpec("gradient_variety", f),
                TentacleSpec("ball", f, radius=Fraction(2)),
            ):
                assert contains(spec, point, tol=0.0)


class TestSpecValidation:
    def test_kind_checked(self):
        with pytest.raises(ValueError):
            TentacleSpec("weird", P("x"))

    def test_radius_checked(self):
        with pytest.raises(ValueError):
            TentacleSpec("ball", P("x"), radius=Fraction(-1))

    def test_order_checked(self):
        with pytest.raises(ValueError):
            TentacleSpec("higher", P("x"), order=0)

    def test_constraint_set_for_none_kind(self):
        cs = constraint_set(TentacleSpec("none", P("x^2")))
        assert cs.inequalities == [] and cs.equalities == []


class TestAutoRadius:
    def test_floor_at_one(self):
        assert auto_radius(P("x")) == 1

    def test_tracks_large_coefficients(self):
        f = P("100*x^2")
        # |grad f|^2 |x|^2 = 40000 x^4
        assert auto_radius(f) == 40000
