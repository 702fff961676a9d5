"""Command-line front end.

    rdtm solve  ex3 --order 10
    rdtm table  ex1                        # reproduces the ex1 reference grid
    rdtm figure ex1 --out fig1.csv
    rdtm check  ex2 --order 8
    rdtm demo

The positional problem argument is a built-in model id (ex1, ex2, ex3) or a
path to a problem file in the DSL of rdtm.specfile.  All output is
deterministic: identical invocations produce byte-identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import expr as ex
from .analysis import (
    Grid2D,
    GridAxis,
    absolute_error_grid,
    export_figure_data,
    format_scientific,
    fraction_str,
    render_table,
    residual_order_check,
    taylor_coefficient,
)
from .engine import solve_series
from .errors import GridError, RdtmError
from .models import (
    DEFAULT_FIGURE,
    DEFAULT_TABLE_GRID,
    DEFAULT_TABLE_ORDER,
    ModelId,
    builtin_model,
)
from .precision import PrecisionContext
from .specfile import parse_spec_file

DEFAULT_SOLVE_ORDER = 10


def _load_problem(source):
    """Problem from a built-in id or a DSL file path; returns (spec, model id)."""
    try:
        model = ModelId(source.lower())
    except ValueError:
        model = None
    if model is not None:
        return builtin_model(model), model
    with open(source, "r", encoding="utf-8") as handle:
        return parse_spec_file(handle.read()), None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise GridError(f"not an exact rational: {text!r}") from None


def _axis_values(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise GridError(f"expected start:stop:step, got {spec!r}")
    start, stop, step = (_fraction(p) for p in parts)
    if step <= 0:
        raise GridError("step must be positive")
    values = []
    v = start
    while v <= stop:
        values.append(v)
        v += step
    return values


def _parse_grid(text: str) -> Grid2D:
    """Grid syntax: 't=1/10:1:1/10;x=1/5:1:1/5' (or 'x,y=...' to tie several
    spatial variables to the column axis)."""
    parts = text.split(";")
    if len(parts) != 2:
        raise GridError("grid must have a row part and a column part separated by ';'")
    axes = []
    for part in parts:
        names, eq, range_spec = part.partition("=")
        if not eq:
            raise GridError(f"expected name=start:stop:step, got {part!r}")
        axes.append((tuple(n.strip() for n in names.split(",")), _axis_values(range_spec)))
    (row_names, row_values), (col_names, col_values) = axes
    if len(row_names) != 1:
        raise GridError("the row axis must be a single variable")
    tie = col_names if len(col_names) > 1 else ()
    return Grid2D(GridAxis(row_names[0], row_values), GridAxis(col_names[0], col_values), tie)


def _parse_bindings(text: str) -> dict:
    out = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        name, eq, value = part.partition("=")
        if not eq:
            raise GridError(f"expected name=value, got {part!r}")
        out[name.strip()] = _fraction(value)
    return out


def _parse_sweep(text: str):
    name, eq, range_spec = text.partition("=")
    if not eq:
        raise GridError(f"expected name=start:stop:step, got {text!r}")
    parts = range_spec.split(":")
    if len(parts) != 3:
        raise GridError(f"expected start:stop:step, got {range_spec!r}")
    return (name.strip(), _fraction(parts[0]), _fraction(parts[1]), _fraction(parts[2]))


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_solve(args) -> int:
    spec, _ = _load_problem(args.problem)
    order = args.order or DEFAULT_SOLVE_ORDER
    sol = solve_series(spec, order)
    series = sol.to_expr()
    if args.format == "json":
        payload = {
            "name": spec.name,
            "order": sol.order,
            "spectra": [ex.to_text(v) for v in sol.spectra],
            "series": ex.to_text(series),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    if args.format == "csv":
        lines = ["k,spectrum"]
        for k, v in enumerate(sol.spectra):
            text = ex.to_text(v)
            if "," in text:
                text = '"' + text + '"'
            lines.append(f"{k},{text}")
        _emit("\n".join(lines) + "\n", args.out)
        return 0
    render = ex.to_latex if args.format == "latex" else ex.to_text
    lines = [f"V_{k} = {render(v)}" for k, v in enumerate(sol.spectra)]
    lines.append(f"series = {render(series)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_table(args) -> int:
    spec, model = _load_problem(args.problem)
    if spec.exact is None:
        raise RdtmError("table requires an exact solution ('exact:' field)")
    order = args.order or DEFAULT_TABLE_ORDER.get(model, DEFAULT_SOLVE_ORDER)
    if args.grid:
        grid = _parse_grid(args.grid)
    elif model is not None:
        t_values, col_values, tie = DEFAULT_TABLE_GRID[model]
        grid = Grid2D(GridAxis("t", t_values), GridAxis(tie[0], col_values), tie)
    else:
        raise GridError("custom problems need an explicit --grid")
    ctx = PrecisionContext(args.precision)
    sol = solve_series(spec, order)
    table = absolute_error_grid(sol, spec.exact, grid, ctx)
    if args.format == "json":
        payload = {
            "name": spec.name,
            "order": table.truncation_order,
            "precision": table.precision,
            "row_axis": {"name": grid.row.name, "values": [fraction_str(v) for v in grid.row.values]},
            "col_axis": {"name": grid.col.name, "values": [fraction_str(v) for v in grid.col.values]},
            "tie": list(grid.col_vars),
            "values": [[format_scientific(v, args.sig_digits) for v in row] for row in table.values],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    style = {"text": "plain", "plain": "plain", "csv": "csv", "latex": "latex"}.get(args.format)
    if style is None:
        raise RdtmError(f"table cannot be rendered as {args.format!r}")
    _emit(render_table(table, style, args.sig_digits), args.out)
    return 0


def _cmd_figure(args) -> int:
    spec, model = _load_problem(args.problem)
    if spec.exact is None:
        raise RdtmError("figure requires an exact solution ('exact:' field)")
    slice_bindings = {}
    sweeps = []
    order = args.order
    if model is not None and not (args.slice or args.sweep):
        slice_bindings, sweeps, default_order = DEFAULT_FIGURE[model]
        order = order or default_order
    if args.slice:
        slice_bindings = _parse_bindings(args.slice)
    if args.sweep:
        sweeps = [_parse_sweep(s) for s in args.sweep]
    if not sweeps:
        raise GridError("no sweep given (use --sweep var=start:stop:step)")
    order = order or DEFAULT_SOLVE_ORDER
    ctx = PrecisionContext(args.precision)
    sol = solve_series(spec, order)
    data = export_figure_data(sol, spec.exact, slice_bindings, sweeps, ctx)
    if args.format == "json":
        payload = {
            "name": spec.name,
            "order": sol.order,
            "columns": list(data.columns),
            "rows": [
                [
                    fraction_str(v) if isinstance(v, Fraction) else format_scientific(v, args.sig_digits)
                    for v in row
                ]
                for row in data.rows
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    _emit(data.to_csv(args.sig_digits), args.out)
    return 0


def _check_report(spec, order, ctx):
    """Run the verification pair: residual order and closed-form agreement.
    Returns (list of report lines, ok flag)."""
    sol = solve_series(spec, order)
    lines = []
    ok = True
    vanish = residual_order_check(spec, sol, ctx=ctx)
    if vanish >= order - 2:
        lines.append(f"residual vanishes through t^{vanish - 1} (order {order} needs t^{order - 3})")
    else:
        ok = False
        lines.append(
            f"FAIL: residual coefficient at t^{vanish} does not vanish "
            f"(order {order} requires vanishing through t^{order - 3})"
        )
    if spec.exact is not None:
        mismatch = None
        for k, v in enumerate(sol.spectra):
            expected = taylor_coefficient(spec.exact, k)
            if ex.expand(expected) != ex.expand(v):
                mismatch = k
                break
        if mismatch is None:
            lines.append(f"spectra match the exact solution's Taylor coefficients for k<{order}")
        else:
            ok = False
            lines.append(f"FAIL: spectrum V_{mismatch} differs from the exact solution's Taylor coefficient")
    else:
        lines.append("no exact solution declared; closed-form agreement skipped")
    return lines, ok


def _cmd_check(args) -> int:
    spec, _ = _load_problem(args.problem)
    order = args.order or DEFAULT_SOLVE_ORDER
    ctx = PrecisionContext(args.precision)
    lines, ok = _check_report(spec, order, ctx)
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def _cmd_demo(args) -> int:
    ctx = PrecisionContext(args.precision)
    out_lines = []
    all_ok = True
    for model in ModelId:
        spec = builtin_model(model)
        order = DEFAULT_TABLE_ORDER[model]
        out_lines.append(f"== {model.value}: order {order}")
        sol = solve_series(spec, order)
        for k in (0, 1, 2, 3):
            out_lines.append(f"   V_{k} = {ex.to_text(sol.spectra[k])}")
        check_lines, ok = _check_report(spec, min(order, 10), ctx)
        all_ok = all_ok and ok
        out_lines.extend("   " + line for line in check_lines)
        t_values, col_values, tie = DEFAULT_TABLE_GRID[model]
        grid = Grid2D(GridAxis("t", t_values), GridAxis(tie[0], col_values), tie)
        table = absolute_error_grid(sol, spec.exact, grid, ctx)
        worst = max(v for row in table.values for v in row)
        out_lines.append(
            f"   max |series - exact| on the {len(grid.row.values)}x{len(grid.col.values)} "
            f"reference grid: {format_scientific(worst, 5)}"
        )
    out_lines.append("reproduction summary: " + ("all checks passed" if all_ok else "FAILURES (see above)"))
    _emit("\n".join(out_lines) + "\n", args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdtm",
        description="Spectral series solver for second-order-in-time wave-like PDEs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_problem=True):
        if with_problem:
            p.add_argument("problem", help="built-in model id (ex1, ex2, ex3) or problem-file path")
        p.add_argument("--order", type=int, default=None, help="number of spectra to compute")
        p.add_argument("--precision", type=int, default=50, help="working precision in decimal digits")
        p.add_argument(
            "--format",
            default="text",
            choices=("text", "plain", "latex", "csv", "json"),
            help="output format",
        )
        p.add_argument("--sig-digits", type=int, default=5, help="significant digits in numeric output (1-6)")
        p.add_argument("--out", default=None, help="write output to this path instead of stdout")

    p_solve = sub.add_parser("solve", help="print the spectra and the truncated series")
    add_common(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_table = sub.add_parser("table", help="absolute-error table against the exact solution")
    add_common(p_table)
    p_table.add_argument(
        "--grid",
        default=None,
        help="grid as 't=start:stop:step;x=start:stop:step' (tie variables with 'x,y=...')",
    )
    p_table.set_defaults(func=_cmd_table)

    p_figure = sub.add_parser("figure", help="columnar sweep data for plotting")
    add_common(p_figure)
    p_figure.add_argument("--slice", default=None, help="fixed bindings, e.g. 'y=1/2'")
    p_figure.add_argument(
        "--sweep",
        action="append",
        default=None,
        help="sweep as var=start:stop:step (repeatable)",
    )
    p_figure.set_defaults(func=_cmd_figure)

    p_check = sub.add_parser("check", help="residual and closed-form verification; nonzero exit on failure")
    add_common(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_demo = sub.add_parser("demo", help="run all built-in models end to end")
    add_common(p_demo, with_problem=False)
    p_demo.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RdtmError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
