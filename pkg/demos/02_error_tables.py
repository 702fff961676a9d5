"""Walkthrough: reproducing the reference absolute-error tables.

Each built-in model ships with the truncation order and grid that match its
published reference table.  Everything upstream of the final transcendental
evaluation is exact rational arithmetic, so the tables are reproducible to
the last printed digit wherever the reference values themselves are exact.
"""

from fractions import Fraction

from rdtm import (
    Grid2D,
    GridAxis,
    ModelId,
    PrecisionContext,
    absolute_error_grid,
    builtin_model,
    render_table,
    solve_series,
)
from rdtm.models import DEFAULT_TABLE_GRID, DEFAULT_TABLE_ORDER

ctx = PrecisionContext(50)  # needed: the deepest table bottoms out near 1e-36

for model in ModelId:
    spec = builtin_model(model)
    order = DEFAULT_TABLE_ORDER[model]
    t_values, col_values, tie = DEFAULT_TABLE_GRID[model]
    grid = Grid2D(GridAxis("t", t_values), GridAxis(tie[0], col_values), tie)

    sol = solve_series(spec, order)
    table = absolute_error_grid(sol, spec.exact, grid, ctx)
    print(f"== {model.value}, {order} spectra, |series - exact| over the reference grid")
    print(render_table(table, "plain", 5))

# The same table in machine-friendly forms:
spec = builtin_model(ModelId.EX3)
sol = solve_series(spec, DEFAULT_TABLE_ORDER[ModelId.EX3])
t_values, col_values, tie = DEFAULT_TABLE_GRID[ModelId.EX3]
grid = Grid2D(GridAxis("t", t_values), GridAxis(tie[0], col_values), tie)
table = absolute_error_grid(sol, spec.exact, grid, ctx)
print("CSV:")
print(render_table(table, "csv", 6))
print("LaTeX:")
print(render_table(table, "latex", 5))

# Custom grid: a fine slice near t = 1 where the error peaks.
fine = Grid2D(
    GridAxis("t", tuple(Fraction(90 + i, 100) for i in range(0, 11, 2))),
    GridAxis("x", (Fraction(1, 2), Fraction(1))),
)
print("fine grid near t = 1:")
print(render_table(absolute_error_grid(sol, spec.exact, fine, ctx), "plain", 4))
