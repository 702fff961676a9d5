"""Series evaluation, error grids, residual checks, rendering, figure data."""

from fractions import Fraction as F

import mpmath
import pytest

from rdtm.analysis import (
    Grid2D,
    GridAxis,
    absolute_error_grid,
    evaluate_series,
    export_figure_data,
    format_scientific,
    fraction_str,
    render_table,
    residual_order_check,
    taylor_coefficient,
)
from rdtm.engine import SeriesSolution
from rdtm.errors import GridError, PrecisionInsufficientError, UnboundVariableError
from rdtm.expr import ZERO, simplify, to_text
from rdtm.models import DEFAULT_TABLE_GRID, ModelId
from rdtm.precision import PrecisionContext, fraction_to_mpf

from oracles import sin_oracle, sin_partial_sum

CTX = PrecisionContext(50)


def default_grid(model):
    t_values, col_values, tie = DEFAULT_TABLE_GRID[model]
    return Grid2D(GridAxis("t", t_values), GridAxis(tie[0], col_values), tie)


class TestEvaluateSeries:
    def test_zero_time(self, solved):
        _, sol = solved(ModelId.EX3, 10)
        assert evaluate_series(sol, {"x": F(7, 3), "t": 0}, CTX) == 0

    def test_ex2_partial_exponential_sum(self, solved):
        # sum over k < 10 of 1/k! = 98641/36288, evaluated in high precision
        _, sol = solved(ModelId.EX2, 10)
        got = evaluate_series(sol, {"x": 0, "t": 1}, CTX)
        with mpmath.workdps(60):
            want = fraction_to_mpf(F(98641, 36288))
        assert abs(got - want) < mpmath.mpf(10) ** -55
        assert mpmath.nstr(got, 17) == "2.7182815255731922"

    def test_ex1_alternating_rational_sum(self, solved):
        # 1 + 1 - 1/2 - 1/6 + 1/24 + 1/120 - 1/720 - 1/5040 = 6964/5040 = 1741/1260
        _, sol = solved(ModelId.EX1, 8)
        got = evaluate_series(sol, {"x": 0, "y": 0, "t": 1}, CTX)
        with mpmath.workdps(60):
            want = fraction_to_mpf(F(1741, 1260))
        assert abs(got - want) < mpmath.mpf(10) ** -55

    def test_t_must_be_bound(self, solved):
        _, sol = solved(ModelId.EX3, 10)
        with pytest.raises(UnboundVariableError):
            evaluate_series(sol, {"x": 1}, CTX)

    def test_floats_rejected(self, solved):
        _, sol = solved(ModelId.EX3, 10)
        with pytest.raises(TypeError):
            evaluate_series(sol, {"x": 1, "t": 0.1}, CTX)


class TestErrorGrid:
    def test_zero_error_at_t_zero(self, solved):
        spec, sol = solved(ModelId.EX1, 8)
        grid = Grid2D(
            GridAxis("t", (F(0), F(1, 2))), GridAxis("x", (F(1, 2), F(1))), ("x", "y")
        )
        table = absolute_error_grid(sol, spec.exact, grid, CTX)
        assert table.values[0] == (0, 0)

    def test_grid_must_increase(self):
        with pytest.raises(GridError):
            GridAxis("t", (F(1), F(1)))
        with pytest.raises(GridError):
            GridAxis("t", ())

    def test_float_grid_rejected(self):
        with pytest.raises(GridError):
            GridAxis("t", (0.1, 0.2))

    def test_precision_floor_raises(self, solved):
        spec, sol = solved(ModelId.EX3, 20)
        with pytest.raises(PrecisionInsufficientError) as err:
            absolute_error_grid(sol, spec.exact, default_grid(ModelId.EX3), PrecisionContext(30))
        assert "cell" in str(err.value)

    def test_minimum_precision_enforced(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        with pytest.raises(PrecisionInsufficientError):
            absolute_error_grid(sol, spec.exact, default_grid(ModelId.EX3), PrecisionContext(20))

    def test_monotone_truncation_improvement(self, solved):
        spec, sol10 = solved(ModelId.EX3, 10)
        _, sol12 = solved(ModelId.EX3, 12)
        grid = default_grid(ModelId.EX3)
        t10 = absolute_error_grid(sol10, spec.exact, grid, CTX)
        t12 = absolute_error_grid(sol12, spec.exact, grid, CTX)
        for row10, row12 in zip(t10.values, t12.values):
            for a, b in zip(row10, row12):
                assert b < a

    def test_remainder_oracle_agreement(self, solved):
        # errors equal x^2 * |sin t - ten-term partial sum| to 6 significant digits
        spec, sol = solved(ModelId.EX3, 20)
        grid = default_grid(ModelId.EX3)
        table = absolute_error_grid(sol, spec.exact, grid, CTX)
        with mpmath.workdps(70):
            for tv, row in zip(grid.row.values, table.values):
                remainder = abs(sin_oracle(tv, 70) - sin_partial_sum(tv, 10))
                for xv, got in zip(grid.col.values, row):
                    want = fraction_to_mpf(xv * xv * F(remainder))
                    assert abs(got - want) <= want * mpmath.mpf("1e-6")

    def test_precision_stability(self, solved):
        # ten more digits change no reported significant digit
        spec, sol = solved(ModelId.EX3, 20)
        grid = default_grid(ModelId.EX3)
        a = absolute_error_grid(sol, spec.exact, grid, PrecisionContext(50))
        b = absolute_error_grid(sol, spec.exact, grid, PrecisionContext(60))
        for row_a, row_b in zip(a.values, b.values):
            for va, vb in zip(row_a, row_b):
                assert format_scientific(va, 6) == format_scientific(vb, 6)


class TestResidualOrder:
    def test_contract_instances(self, solved):
        spec3, sol3 = solved(ModelId.EX3, 10)
        assert residual_order_check(spec3, sol3) >= 7
        spec2, sol2 = solved(ModelId.EX2, 6)
        assert residual_order_check(spec2, sol2) >= 3

    def test_corrupted_spectrum_detected_at_order_zero(self, solved):
        # adding d to V_2 makes the residual's t^0 coefficient 2*d
        spec, sol = solved(ModelId.EX3, 10)
        spectra = list(sol.spectra)
        spectra[2] = simplify(spectra[2] + 1)
        corrupted = SeriesSolution(spec, tuple(spectra), 10)
        assert residual_order_check(spec, corrupted) == 0

    def test_probe_point_variant(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        probes = [{"x": F(i, 7)} for i in range(1, 6)]
        assert residual_order_check(spec, sol, probe_points=probes) >= 7


class TestTaylorCoefficient:
    def test_sine_coefficients(self, solved):
        spec, _ = solved(ModelId.EX3, 2)
        assert taylor_coefficient(spec.exact, 0) == ZERO
        assert to_text(taylor_coefficient(spec.exact, 3)) == "-1/6*x^2"


class TestRendering:
    def test_single_zero_cell(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        grid = Grid2D(GridAxis("t", (F(0),)), GridAxis("x", (F(1),)))
        table = absolute_error_grid(sol, spec.exact, grid, CTX)
        rendered = render_table(table, "plain")
        assert rendered.splitlines()[1].split() == ["0", "0"]

    def test_format_scientific(self):
        assert format_scientific(mpmath.mpf("1.95343e-20"), 6) == "1.95343E-20"
        assert format_scientific(mpmath.mpf("1.95343e-20"), 3) == "1.95E-20"
        assert format_scientific(0, 5) == "0"
        assert format_scientific(mpmath.mpf("9.99999e-5"), 3) == "1.00E-4"
        assert format_scientific(mpmath.mpf("737.4"), 2) == "7.4E+2"
        with pytest.raises(ValueError):
            format_scientific(mpmath.mpf(1), 7)

    def test_fraction_str(self):
        assert fraction_str(F(3, 10)) == "0.3"
        assert fraction_str(F(1)) == "1"
        assert fraction_str(F(-1, 8)) == "-0.125"
        assert fraction_str(F(1, 3)) == "1/3"

    def test_csv_layout_and_quoting(self, solved):
        spec, sol = solved(ModelId.EX1, 8)
        grid = Grid2D(GridAxis("t", (F(1, 2),)), GridAxis("x", (F(1, 2),)), ("x", "y"))
        table = absolute_error_grid(sol, spec.exact, grid, CTX)
        out = render_table(table, "csv")
        lines = out.splitlines()
        assert lines[0] == '"t/x,y",0.5'
        assert lines[1] == "0.5,1.3095E-7"

    def test_latex_smoke(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        table = absolute_error_grid(sol, spec.exact, default_grid(ModelId.EX3), CTX)
        out = render_table(table, "latex")
        assert out.startswith(r"\begin{tabular}") and out.rstrip().endswith(r"\end{tabular}")

    def test_deterministic_bytes(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        grid = default_grid(ModelId.EX3)
        a = render_table(absolute_error_grid(sol, spec.exact, grid, CTX), "csv")
        b = render_table(absolute_error_grid(sol, spec.exact, grid, CTX), "csv")
        assert a == b

    def test_unknown_style(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        grid = Grid2D(GridAxis("t", (F(1),)), GridAxis("x", (F(1),)))
        table = absolute_error_grid(sol, spec.exact, grid, CTX)
        with pytest.raises(ValueError):
            render_table(table, "markdown")


class TestFigureData:
    def test_ex1_two_variable_sweep(self, solved):
        spec, sol = solved(ModelId.EX1, 6)
        data = export_figure_data(
            sol,
            spec.exact,
            {"y": F(1, 2)},
            [("x", 0, 1, F(1, 10)), ("t", 0, 1, F(1, 10))],
            CTX,
        )
        assert data.columns == ("x", "t", "series", "exact", "abs_error")
        assert len(data.rows) == 121

    def test_ex3_errors_match_remainder_oracle(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        data = export_figure_data(sol, spec.exact, {"x": F(1, 2)}, [("t", 0, 1, F(1, 5))], CTX)
        with mpmath.workdps(70):
            for row in data.rows:
                tv = row[0]
                want = fraction_to_mpf(F(1, 4) * abs(sin_oracle(tv, 70) - sin_partial_sum(tv, 5)))
                assert abs(row[-1] - want) <= (want + mpmath.mpf("1e-40")) * mpmath.mpf("1e-6")

    def test_empty_sweep_gives_header_only(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        data = export_figure_data(sol, spec.exact, {"x": F(1, 2)}, [("t", 1, 0, F(1, 10))], CTX)
        assert data.rows == ()
        assert data.to_csv() == "t,series,exact,abs_error\n"

    def test_over_and_under_constrained(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        with pytest.raises(GridError):
            export_figure_data(sol, spec.exact, {"x": 1}, [("x", 0, 1, F(1, 2))], CTX)
        with pytest.raises(GridError):
            export_figure_data(sol, spec.exact, {}, [("t", 0, 1, F(1, 2))], CTX)
        with pytest.raises(GridError):
            export_figure_data(
                sol, spec.exact, {"x": 1, "t": 0}, [("t", 0, 1, F(1, 2))], CTX
            )

    def test_csv_round_trip_shape(self, solved):
        spec, sol = solved(ModelId.EX3, 10)
        data = export_figure_data(sol, spec.exact, {"x": F(1, 2)}, [("t", 0, 1, F(1, 2))], CTX)
        lines = data.to_csv().splitlines()
        assert lines[0] == "t,series,exact,abs_error"
        assert len(lines) == 1 + 3
