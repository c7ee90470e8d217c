"""Gram-matrix SDP assembly: bases, degree bookkeeping, exact matching."""

import math
from fractions import Fraction

import numpy as np
import pytest

from tentsos.poly import Polynomial, parse_polynomial
from tentsos.sos_sdp import (
    SdpProblem,
    assemble_sdp,
    build_gradvar_program,
    build_sos_program,
    gram_polynomial,
    monomial_basis,
    reconstruct_polynomial,
)
from tentsos.tentacle import principal_constraint


def P(text, names=None):
    poly, _ = parse_polynomial(text, names)
    return poly


class TestMonomialBasis:
    def test_two_vars_degree_one(self):
        basis = monomial_basis(2, 1)
        assert basis.entries == ((0, 0), (1, 0), (0, 1))
        assert basis.size == 3

    @pytest.mark.parametrize("n,d,size", [(2, 3, 10), (3, 2, 10), (4, 3, 35)])
    def test_counts(self, n, d, size):
        assert monomial_basis(n, d).size == math.comb(n + d, n)
        assert monomial_basis(n, d).size == size

    def test_graded_lex_ordering(self):
        basis = monomial_basis(2, 2)
        degrees = [sum(m) for m in basis.entries]
        assert degrees == sorted(degrees)
        assert basis.entries[0] == (0, 0)
        # within a degree the first-variable exponent decreases last
        assert basis.entries.index((1, 0)) < basis.entries.index((0, 1))
        assert basis.entries.index((2, 0)) < basis.entries.index((1, 1))


class TestBuildSosProgram:
    def test_plain_quartic(self):
        prog = build_sos_program(P("x^4 + x^2*y^2 + 1", ["x", "y"]))
        assert prog.matching_degree == 4
        assert len(prog.gram_blocks) == 1
        assert prog.gram_blocks[0].basis.max_degree == 2
        assert prog.gram_blocks[0].basis.size == 6

    def test_motzkin_principal_level_zero(self):
        f = P("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", ["x", "y"])
        g = principal_constraint(f, Fraction(1))
        assert g.degree() == 12
        prog = build_sos_program(f, g, 0)
        assert prog.matching_degree == 12
        s_block, t_block = prog.gram_blocks
        assert s_block.basis.max_degree == 6 and s_block.basis.size == 28
        assert t_block.basis.max_degree == 0 and t_block.basis.size == 1

    def test_multiplier_required_for_levels(self):
        with pytest.raises(ValueError):
            build_sos_program(P("x^2"), None, 0)

    def test_zero_t_block_embeds_plain_bound(self):
        # a feasible plain-SOS assignment stays feasible at level 0 with a
        # zero Gram matrix on the multiplier block
        f = P("x^2 + 1")
        g = principal_constraint(f, Fraction(1))
        prog = build_sos_program(f, g, 0)
        s_basis = prog.gram_blocks[0].basis
        idx = s_basis.index_map()
        M = [[Fraction(0)] * s_basis.size for _ in range(s_basis.size)]
        M[idx[(0,)]][idx[(0,)]] = Fraction(1)
        M[idx[(1,)]][idx[(1,)]] = Fraction(1)
        zero_t = [[Fraction(0)]]
        rebuilt = reconstruct_polynomial(prog, Fraction(0), [M, zero_t])
        assert rebuilt == f

    def test_gradvar_program_shape(self):
        f = P("(1 - x*y)^2 + y^2", ["x", "y"])
        prog = build_gradvar_program(f, 0)
        assert len(prog.free_blocks) == 2
        assert all(fb.basis.size == 1 for fb in prog.free_blocks)
        prog2 = build_gradvar_program(f, 2)
        assert all(fb.basis.size == 6 for fb in prog2.free_blocks)

    def test_gradvar_free_dimension_grows_by_basis_increment(self):
        f = P("x^4 + y^4 + x*y", ["x", "y"])
        n = 2
        for d in (0, 1, 2, 3):
            a = assemble_sdp(build_gradvar_program(f, d))
            b = assemble_sdp(build_gradvar_program(f, d + 1))
            increment = math.comb(n + d + 1, n) - math.comb(n + d, n)
            assert b.num_free - a.num_free == n * increment


class TestAssemble:
    def test_pure_square_structure(self):
        prob = assemble_sdp(build_sos_program(P("x^2")))
        assert prob.block_dims == [2]
        assert prob.a_row == 0
        assert prob.a_coeff(0) == -1
        assert prob.a_coeff(1) == 0
        assert prob.rhs == [Fraction(0), Fraction(0), Fraction(1)]

    def test_constraint_count_for_degree_twelve(self):
        f = P("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", ["x", "y"])
        g = principal_constraint(f, Fraction(1))
        prob = assemble_sdp(build_sos_program(f, g, 0))
        assert prob.num_constraints == 91

    def test_matrices_symmetric_by_construction(self):
        # triplets store p <= q once; expanding them symmetrically must
        # reproduce the multiplier-times-square expansion support
        f = P("x^2*y^2 + 1", ["x", "y"])
        g = principal_constraint(f, Fraction(1))
        prob = assemble_sdp(build_sos_program(f, g, 1))
        for block in prob.blocks:
            for (i, p, q, v) in block.triplets:
                assert p <= q

    def test_scaling_recorded(self):
        f = P("100*x^4 + 2*x^2 + 50")
        prob = assemble_sdp(build_sos_program(f))
        assert prob.objective_scale == 100
        assert max(abs(x) for x in prob.rhs) == 1

    def test_rhs_matches_scaled_coefficients(self):
        f = P("3*x^4 - 2*x^2 + 6")
        prob = assemble_sdp(build_sos_program(f))
        index = {m: i for i, m in enumerate(prob.constraint_monomials)}
        assert prob.rhs[index[(4,)]] == Fraction(3, 6)
        assert prob.rhs[index[(2,)]] == Fraction(-2, 6)
        assert prob.rhs[index[(0,)]] == Fraction(1)


class TestReconstruction:
    def test_exact_expansion_matches_constraints(self):
        # pick an arbitrary rational Gram assignment in user scale, map it to
        # the solver's normalized scale, and check every assembled constraint
        # row reproduces the coefficient of the symbolic reconstruction
        f = P("x^4 + 3*x^2*y^2 + y^4 + 2", ["x", "y"])
        g = principal_constraint(f, Fraction(1))
        prog = build_sos_program(f, g, 0)
        prob = assemble_sdp(prog)

        rng = np.random.RandomState(31)
        grams = []
        for gb in prog.gram_blocks:
            k = gb.basis.size
            A = rng.randint(-2, 3, size=(k, k))
            M = [[Fraction(int(A[i][j] + A[j][i])) for j in range(k)] for i in range(k)]
            grams.append(M)
        bound = Fraction(7, 3)
        target = reconstruct_polynomial(prog, bound, grams)

        c_f = prob.objective_scale
        for idx, mono in enumerate(prob.constraint_monomials):
            total = Fraction(0)
            for block, gram in zip(prob.blocks, grams):
                scaled = [
                    [entry / block.unscale for entry in row] for row in gram
                ]
                for (i, p, q, v) in block.triplets:
                    if i != idx:
                        continue
                    contribution = v * scaled[p][q]
                    if p != q:
                        contribution *= 2
                    total += contribution
            expected = target.coefficient(mono)
            if idx == prob.a_row:
                expected -= bound
            assert total == expected / c_f

    def test_gram_polynomial_identity(self):
        basis = monomial_basis(1, 1)
        M = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
        assert gram_polynomial(basis, M) == P("1 + x^2")


class TestSerialization:
    def test_json_roundtrip_exact(self):
        f = P("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", ["x", "y"])
        g = principal_constraint(f, Fraction(1))
        prob = assemble_sdp(build_sos_program(f, g, 1))
        clone = SdpProblem.from_json(prob.to_json())
        assert clone == prob
        assert clone.to_json() == prob.to_json()

    def test_gradvar_roundtrip(self):
        prob = assemble_sdp(build_gradvar_program(P("(1-x*y)^2 + y^2", ["x", "y"]), 1))
        clone = SdpProblem.from_json(prob.to_json())
        assert clone == prob
