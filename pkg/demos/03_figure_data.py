"""Walkthrough: columnar sweep data for external plotting.

The figure exporter fixes some variables (the slice), sweeps the rest over
rational grids, and emits (coordinates, series, exact, absolute error) rows.
Feed the CSV to any plotting tool; nothing here renders pixels.
"""

from fractions import Fraction

from rdtm import ModelId, PrecisionContext, builtin_model, export_figure_data, solve_series

ctx = PrecisionContext(50)

# 2-D model on the plane y = 1/2: sweep x and t together (121 rows).
spec = builtin_model(ModelId.EX1)
sol = solve_series(spec, 6)
surface = export_figure_data(
    sol,
    spec.exact,
    {"y": Fraction(1, 2)},
    [("x", 0, 1, Fraction(1, 10)), ("t", 0, 1, Fraction(1, 10))],
    ctx,
)
print("columns:", surface.columns)
print("rows:", len(surface.rows))
with open("ex1_surface.csv", "w", encoding="utf-8") as handle:
    handle.write(surface.to_csv())
print("wrote ex1_surface.csv")

# 1-D model at x = 1/2: a single t sweep shows the error growing with t
# (the truncation error of an alternating series is monotone on [0, 1]).
spec = builtin_model(ModelId.EX3)
sol = solve_series(spec, 10)
line = export_figure_data(
    sol, spec.exact, {"x": Fraction(1, 2)}, [("t", 0, 1, Fraction(1, 20))], ctx
)
print()
print(line.to_csv(4))
peak = max(line.rows, key=lambda row: row[-1])
print("peak error at t =", peak[0])
