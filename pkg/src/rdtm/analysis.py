"""Series evaluation, absolute-error grids, residual checks and table rendering.

Grid coordinates are exact rationals (3/10, never a binary float 0.3), so the
only rounding in a reported error is the final transcendental evaluation at
the working precision.  Cells are independent pure computations; assembling
them in any order gives the same table.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context as DecimalContext
from fractions import Fraction

import mpmath

from . import expr as ex
from .engine import SeriesSolution, substitute_derivatives
from .errors import GridError, PrecisionInsufficientError, UnboundVariableError
from .parsing import TIME_VAR
from .precision import PrecisionContext, eval_number, eval_precise, fraction_to_mpf

__all__ = [
    "GridAxis",
    "Grid2D",
    "ErrorTable",
    "FigureData",
    "evaluate_series",
    "absolute_error_grid",
    "residual_order_check",
    "taylor_coefficient",
    "render_table",
    "export_figure_data",
    "format_scientific",
    "fraction_str",
]


def _as_fractions(values):
    out = []
    for v in values:
        if isinstance(v, float):
            raise GridError(f"grid value {v!r} is a float; pass an exact rational")
        out.append(v if isinstance(v, Fraction) else Fraction(v))
    return tuple(out)


@dataclass(frozen=True)
class GridAxis:
    name: str
    values: tuple

    def __post_init__(self):
        values = _as_fractions(self.values)
        if not values:
            raise GridError(f"axis {self.name!r} is empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise GridError(f"axis {self.name!r} values must be strictly increasing")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Grid2D:
    """Rows sweep the row axis (time, in the reference tables); every spatial
    variable in ``tie`` is bound to the column value, so one column axis can
    drive several variables (x = y = column value)."""

    row: GridAxis
    col: GridAxis
    tie: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tie", tuple(self.tie))

    @property
    def col_vars(self) -> tuple:
        return self.tie or (self.col.name,)

    @property
    def corner_label(self) -> str:
        return f"{self.row.name}/{','.join(self.col_vars)}"

    def point(self, row_value, col_value) -> dict:
        bindings = {self.row.name: row_value}
        for name in self.col_vars:
            bindings[name] = col_value
        return bindings


@dataclass(frozen=True)
class ErrorTable:
    grid: Grid2D
    values: tuple  # rows of mpf, matching the grid
    truncation_order: int
    precision: int


@dataclass(frozen=True)
class FigureData:
    """Columnar sweep data: sweep coordinates, series value, exact value,
    absolute error; ready for external plotting."""

    columns: tuple
    rows: tuple

    def to_csv(self, sig_digits: int = 6) -> str:
        lines = [_csv_line(self.columns)]
        for row in self.rows:
            cells = [fraction_str(v) if isinstance(v, Fraction) else format_scientific(v, sig_digits) for v in row]
            lines.append(_csv_line(cells))
        return "\n".join(lines) + "\n"


def evaluate_series(sol: SeriesSolution, point, ctx: PrecisionContext = PrecisionContext()):
    """Truncated series value sum(V_k(point) * t^k) with exact rational
    t-powers, accumulated in high precision."""
    bindings = dict(point)
    if TIME_VAR not in bindings:
        raise UnboundVariableError("the evaluation point must bind t")
    t = bindings.pop(TIME_VAR)
    if isinstance(t, float):
        raise TypeError("t must be an exact rational, not a float")
    t = t if isinstance(t, Fraction) else Fraction(t)
    with mpmath.workdps(ctx.working_dps):
        exact_part = Fraction(0)
        rounded_part = mpmath.mpf(0)
        t_power = Fraction(1)
        for v in sol.spectra:
            value = eval_number(v, bindings)
            if isinstance(value, Fraction):
                exact_part += value * t_power
            else:
                rounded_part += value * fraction_to_mpf(t_power)
            t_power *= t
        return +(rounded_part + fraction_to_mpf(exact_part))


def absolute_error_grid(
    sol: SeriesSolution,
    exact: ex.Expr,
    grid: Grid2D,
    ctx: PrecisionContext = PrecisionContext(),
) -> ErrorTable:
    """Grid of |series - exact|.  Requires at least 30 working digits; a cell
    whose nonzero error falls below 10^-(digits-4) cannot carry significant
    digits and raises rather than reporting noise."""
    if ctx.decimal_digits < 30:
        raise PrecisionInsufficientError(
            f"error grids need >= 30 working digits, got {ctx.decimal_digits}"
        )
    floor = mpmath.mpf(10) ** -(ctx.decimal_digits - 4)
    rows = []
    for tv in grid.row.values:
        row = []
        for cv in grid.col.values:
            point = grid.point(tv, cv)
            series_value = evaluate_series(sol, point, ctx)
            exact_value = eval_precise(exact, point, ctx)
            err = abs(series_value - exact_value)
            if 0 < err < floor:
                raise PrecisionInsufficientError(
                    f"cell ({fraction_str(tv)}, {fraction_str(cv)}): error is below "
                    f"the certifiable floor 1e-{ctx.decimal_digits - 4}; "
                    "raise the working precision"
                )
            row.append(err)
        rows.append(tuple(row))
    return ErrorTable(grid, tuple(rows), sol.order, ctx.decimal_digits)


def residual_order_check(
    spec,
    sol: SeriesSolution,
    probe_points=(),
    ctx: PrecisionContext = PrecisionContext(),
) -> int:
    """Vanishing order of the residual u_tt - rhs at the truncated series.

    Returns the index of the first t-Maclaurin coefficient of the residual
    that does not vanish: symbolically by default, or (given probe points)
    numerically below 10^-(digits-6) at every probe.  A solution of order N
    must yield at least N-2 (so always >= N-3); returns sol.order when the
    residual is identically zero through its whole t-degree.
    """
    series = sol.to_expr()
    u_tt = ex.differentiate(series, TIME_VAR, 2)
    residual = ex.expand(
        ex.Sum((u_tt, ex.Product((ex.rational(-1), substitute_derivatives(spec.rhs, series)))))
    )
    coefficients = ex.collect_powers(residual, TIME_VAR)
    threshold = mpmath.mpf(10) ** -(ctx.decimal_digits - 6)
    with mpmath.workdps(ctx.working_dps):
        for degree in sorted(coefficients):
            c = coefficients[degree]
            if c == ex.ZERO:
                continue
            if probe_points and all(
                abs(eval_precise(c, p, ctx)) < threshold for p in probe_points
            ):
                continue
            return degree
    return sol.order


def taylor_coefficient(e, k: int, var: str = TIME_VAR) -> ex.Expr:
    """k-th Taylor coefficient of e around var = 0: the k-fold derivative at
    zero divided by k! (the transform applied to a closed-form expression)."""
    d = ex.differentiate(e, var, k)
    return ex.simplify(
        ex.Product((ex.rational(1, _factorial(k)), ex.substitute(d, {var: 0})))
    )


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# Rendering


def fraction_str(value: Fraction) -> str:
    """Exact decimal string when the denominator divides a power of ten
    (3/10 -> '0.3'), plain fraction otherwise."""
    value = value if isinstance(value, Fraction) else Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return str(value)
    shift = max(twos, fives)
    scaled = value * 10**shift
    digits = str(abs(int(scaled))).rjust(shift + 1, "0")
    sign = "-" if value < 0 else ""
    if shift == 0:
        return f"{sign}{digits}"
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


def format_scientific(value, sig_digits: int = 5) -> str:
    """Normalized scientific notation, mantissa in [1, 10): '1.95343E-20'.
    Zero renders as '0'."""
    if not 1 <= sig_digits <= 6:
        raise ValueError("significant digits must be between 1 and 6")
    if value == 0:
        return "0"
    raw = mpmath.nstr(mpmath.mpf(value), sig_digits + 8, strip_zeros=False)
    d = DecimalContext(prec=sig_digits).create_decimal(raw)
    mantissa, _, exponent = f"{d:E}".partition("E")
    sign = exponent[0]
    magnitude = exponent[1:].lstrip("0") or "0"
    return f"{mantissa}E{sign}{magnitude}"


def _csv_line(cells) -> str:
    quoted = []
    for cell in cells:
        text = str(cell)
        if any(ch in text for ch in ',"\n'):
            text = '"' + text.replace('"', '""') + '"'
        quoted.append(text)
    return ",".join(quoted)


def render_table(tbl: ErrorTable, style: str = "plain", sig_digits: int = 5) -> str:
    """Row-major table: first column the row-axis values, header row the
    column-axis values.  Deterministic byte output."""
    header = [tbl.grid.corner_label] + [fraction_str(v) for v in tbl.grid.col.values]
    body = [
        [fraction_str(tv)] + [format_scientific(v, sig_digits) for v in row]
        for tv, row in zip(tbl.grid.row.values, tbl.values)
    ]
    if style == "csv":
        return "\n".join(_csv_line(r) for r in [header] + body) + "\n"
    if style == "latex":
        lines = [
            r"\begin{tabular}{" + "r" * len(header) + "}",
            " & ".join(header) + r" \\",
            r"\hline",
        ]
        lines += [" & ".join(row) + r" \\" for row in body]
        lines.append(r"\end{tabular}")
        return "\n".join(lines) + "\n"
    if style == "plain":
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        lines = [
            "  ".join(cell.rjust(w) for cell, w in zip(row, widths))
            for row in [header] + body
        ]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table style {style!r}")


# ---------------------------------------------------------------------------
# Figure data


def export_figure_data(
    sol: SeriesSolution,
    exact: ex.Expr,
    slice_bindings,
    sweeps,
    ctx: PrecisionContext = PrecisionContext(),
) -> FigureData:
    """Columnar dataset over a cartesian sweep with the remaining variables
    fixed by the slice: (sweep values..., series, exact, abs error).

    ``sweeps`` is a sequence of (variable, start, stop, step) with exact
    rational bounds; after applying the slice, exactly the sweep variables
    must remain unbound.
    """
    fixed = {
        name: (v if isinstance(v, Fraction) else Fraction(v))
        for name, v in dict(slice_bindings).items()
    }
    sweep_specs = []
    for name, start, stop, step in sweeps:
        start, stop, step = Fraction(start), Fraction(stop), Fraction(step)
        if step <= 0:
            raise GridError(f"sweep step for {name!r} must be positive")
        sweep_specs.append((name, start, stop, step))

    needed = set(sol.spec.spatial_vars) | {TIME_VAR}
    sweep_names = [name for name, *_ in sweep_specs]
    if len(set(sweep_names)) != len(sweep_names):
        raise GridError("duplicate sweep variable")
    bound = set(fixed) | set(sweep_names)
    if set(fixed) & set(sweep_names):
        raise GridError("slice and sweep bind the same variable (over-constrained)")
    if bound - needed:
        raise GridError(f"unknown variables {sorted(bound - needed)}")
    if needed - bound:
        raise GridError(f"unbound variables {sorted(needed - bound)} (under-constrained)")

    def sweep_values(start, stop, step):
        out = []
        v = start
        while v <= stop:
            out.append(v)
            v += step
        return out

    grids = [sweep_values(start, stop, step) for _, start, stop, step in sweep_specs]
    points = [()]
    for axis in grids:
        points = [prefix + (v,) for prefix in points for v in axis]
    rows = []
    for coords in points:
        point = dict(fixed)
        point.update(zip(sweep_names, coords))
        series_value = evaluate_series(sol, point, ctx)
        exact_value = eval_precise(exact, point, ctx)
        rows.append((*coords, series_value, exact_value, abs(series_value - exact_value)))
    columns = (*sweep_names, "series", "exact", "abs_error")
    return FigureData(columns, tuple(rows))
