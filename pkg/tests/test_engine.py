"""Recurrence compilation, convolution, stepping and the series solver."""

import pytest

from rdtm.engine import (
    SOURCE,
    PdeSpec,
    SeriesSolution,
    advance_step,
    cauchy_product,
    compile_recurrence,
    evaluate_term,
    initial_spectra,
    solve_series,
    substitute_derivatives,
)
from rdtm.errors import (
    InvalidOrderError,
    UnsupportedCoefficientError,
    UnsupportedStructureError,
)
from rdtm.expr import ZERO, Atom, Power, Product, Var, expand, rational, simplify, to_text
from rdtm.models import ModelId
from rdtm.parsing import parse_expr

from oracles import nested_convolution

x = Var("x")
e_x = Atom("exp", x)


def term_signature(term):
    return (to_text(term.coefficient), term.time_shift, term.factors)


class TestCompile:
    def test_ex3_has_four_terms_including_the_cancelling_pair(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        rec = compile_recurrence(spec)
        assert len(rec.terms) == 4
        got = sorted(term_signature(t) for t in rec.terms)
        assert got == sorted(
            [
                ("x^2", 0, ((("x", 2),), (("x", 2),))),
                ("x^2", 0, ((("x", 1),), (("x", 3),))),
                ("-x^2", 0, ((("x", 2),), (("x", 2),))),
                ("-1", 0, ((),)),
            ]
        )

    def test_ex2_has_seven_quintic_terms_plus_linear(self, solved):
        spec, _ = solved(ModelId.EX2, 2)
        rec = compile_recurrence(spec)
        assert len(rec.terms) == 8
        quintic = [t for t in rec.terms if len(t.factors) == 5]
        linear = [t for t in rec.terms if len(t.factors) == 1]
        assert len(quintic) == 7 and len(linear) == 1
        assert term_signature(linear[0]) == ("1", 0, ((),))
        signatures = {term_signature(t) for t in quintic}
        assert ("3", 0, ((), (), (("x", 2),), (("x", 3),), (("x", 3),))) in signatures
        assert ("-18", 0, ((), (), (), (), ())) in signatures

    def test_ex1_mechanical_expansion_has_fourteen_terms(self, solved):
        spec, _ = solved(ModelId.EX1, 2)
        rec = compile_recurrence(spec)
        assert len(rec.terms) == 14

    def test_source_term_uses_delta_factor(self):
        spec = PdeSpec("src", ("x",), parse_expr("x^2*t^3 - u", ["x"]),
                       parse_expr("0", ["x"]), parse_expr("0", ["x"]))
        rec = compile_recurrence(spec)
        by_shift = {t.time_shift: t for t in rec.terms}
        assert by_shift[3].factors == (SOURCE,)
        assert by_shift[3].coefficient == simplify(Power(x, 2))
        assert by_shift[0].factors == ((),)

    def test_time_derivative_in_rhs_rejected(self):
        spec = PdeSpec("bad", ("x",), parse_expr("D(u,t,1)", ["x"]),
                       ZERO, ZERO)
        with pytest.raises(UnsupportedStructureError):
            compile_recurrence(spec)

    def test_non_monomial_time_coefficient_rejected(self):
        spec = PdeSpec("bad", ("x",), parse_expr("sin(t)*D(u,x,2)", ["x"]),
                       ZERO, ZERO)
        with pytest.raises(UnsupportedCoefficientError):
            compile_recurrence(spec)


class TestInitialSpectra:
    @pytest.mark.parametrize(
        "model,expected",
        [
            (ModelId.EX1, ("exp(x*y)", "exp(x*y)")),
            (ModelId.EX2, ("exp(x)", "exp(x)")),
            (ModelId.EX3, ("0", "x^2")),
        ],
    )
    def test_builtin(self, solved, model, expected):
        spec, _ = solved(model, 2)
        v0, v1 = initial_spectra(spec)
        assert (to_text(v0), to_text(v1)) == expected


class TestCauchyProduct:
    def test_two_exp_sequences_at_two(self):
        seq = [e_x, e_x, simplify(Product((rational(1, 2), e_x)))]
        got = cauchy_product([seq, seq], 2)
        assert got == simplify(Product((rational(2), Atom("exp", Product((rational(2), x))))))

    def test_index_zero_is_plain_product(self):
        seqs = [[x], [e_x], [Power(x, 2)]]
        assert cauchy_product(seqs, 0) == expand(Product((x, e_x, Power(x, 2))))

    def test_single_sequence_is_identity(self):
        seq = [x, Power(x, 2), Power(x, 3)]
        assert cauchy_product([seq], 2) == simplify(Power(x, 3))

    def test_fold_matches_nested_sum_oracle_for_expressions(self):
        seqs = [
            [simplify(Product((rational(c), Power(x, i + 1)))) for i, c in enumerate(row)]
            for row in [(1, 2, 3, 4, 5), (1, -1, 1, -1, 1), (2, 0, 1, 0, 2)]
        ]
        for k in range(5):
            assert cauchy_product(seqs, k) == expand(nested_convolution(seqs, k))

    def test_index_errors(self):
        with pytest.raises(IndexError):
            cauchy_product([[x]], 1)
        with pytest.raises(IndexError):
            cauchy_product([[x]], -1)
        with pytest.raises(ValueError):
            cauchy_product([], 0)


class TestAdvanceStep:
    def test_ex3_first_step_vanishes(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        rec = compile_recurrence(spec)
        v0, v1 = initial_spectra(spec)
        assert advance_step(rec, [v0, v1], 0) == ZERO

    def test_ex3_second_step(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        rec = compile_recurrence(spec)
        v0, v1 = initial_spectra(spec)
        v2 = advance_step(rec, [v0, v1], 0)
        v3 = advance_step(rec, [v0, v1, v2], 1)
        assert v3 == simplify(Product((rational(-1, 6), Power(x, 2))))

    def test_ex2_first_step_quintic_cancellation(self, solved):
        spec, _ = solved(ModelId.EX2, 2)
        rec = compile_recurrence(spec)
        v0, v1 = initial_spectra(spec)
        v2 = advance_step(rec, [v0, v1], 0)
        assert v2 == simplify(Product((rational(1, 2), e_x)))

    def test_requires_enough_spectra(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        rec = compile_recurrence(spec)
        with pytest.raises(InvalidOrderError):
            advance_step(rec, [ZERO], 0)


class TestSolveSeries:
    def test_invalid_order(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        with pytest.raises(InvalidOrderError):
            solve_series(spec, 1)

    def test_deterministic(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        assert solve_series(spec, 8).spectra == solve_series(spec, 8).spectra

    def test_spectra_are_time_free(self, solved):
        _, sol = solved(ModelId.EX1, 8)
        from rdtm.expr import free_vars

        for v in sol.spectra:
            assert "t" not in free_vars(v)

    def test_source_delta_drives_inhomogeneous_problem(self):
        # u_tt = x^2 * t with zero initial data: V_3 = x^2/6, others zero
        spec = PdeSpec("src", ("x",), parse_expr("x^2*t", ["x"]), ZERO, ZERO)
        sol = solve_series(spec, 6)
        assert [to_text(v) for v in sol.spectra] == ["0", "0", "0", "1/6*x^2", "0", "0"]

    def test_series_solution_length_checked(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        with pytest.raises(InvalidOrderError):
            SeriesSolution(spec, (ZERO,), 2)

    def test_to_expr(self, solved):
        spec, sol = solved(ModelId.EX3, 4)
        assert to_text(sol.to_expr()) == "t*x^2 - 1/6*t^3*x^2"


class TestTermEvaluation:
    def test_time_shift_delays_contribution(self):
        spec = PdeSpec("shifted", ("x",), parse_expr("x*t^2*u - u", ["x"]),
                       ZERO, ZERO)
        rec = compile_recurrence(spec)
        shifted = next(t for t in rec.terms if t.time_shift == 2)
        unshifted = next(t for t in rec.terms if t.time_shift == 0)
        spectra = [simplify(Power(x, i + 1)) for i in range(5)]
        for k in range(2):
            assert evaluate_term(shifted, spectra, k) == ZERO
        for k in range(2, 5):
            # the shifted term is x * V_{k-2}; the unshifted one is -V_{k-2}
            want = expand(Product((rational(-1), x, evaluate_term(unshifted, spectra, k - 2))))
            assert evaluate_term(shifted, spectra, k) == want


class TestSubstituteDerivatives:
    def test_exact_solution_satisfies_ex3(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        from rdtm.expr import differentiate

        rhs_at_exact = substitute_derivatives(spec.rhs, spec.exact)
        lhs = differentiate(spec.exact, "t", 2)
        assert expand(lhs - rhs_at_exact) == ZERO


class TestPdeSpecValidation:
    def test_init_must_be_time_free(self):
        with pytest.raises(UnsupportedStructureError):
            PdeSpec("bad", ("x",), ZERO, parse_expr("sin(t)", ["x"]), ZERO)

    def test_init_must_not_involve_u(self):
        with pytest.raises(UnsupportedStructureError):
            PdeSpec("bad", ("x",), ZERO, parse_expr("u", ["x"]), ZERO)

    def test_spatial_vars_required(self):
        with pytest.raises(UnsupportedStructureError):
            PdeSpec("bad", (), ZERO, ZERO, ZERO)

    def test_reserved_names_rejected(self):
        with pytest.raises(UnsupportedStructureError):
            PdeSpec("bad", ("sin",), ZERO, ZERO, ZERO)
