"""Walkthrough: solving a problem you define yourself.

Problems come in through the DSL (a small text format, also accepted by the
CLI) or are assembled directly from parsed expressions.  The residual check
is the self-test: substituting the truncated series back into the PDE must
leave a residual whose leading t-orders vanish.
"""

from fractions import Fraction

from rdtm import (
    PdeSpec,
    PrecisionContext,
    evaluate_series,
    parse_expr,
    parse_spec_file,
    residual_order_check,
    serialize_spec,
    solve_series,
    to_text,
)

# Route 1: the DSL.  A linear wave-like problem with a polynomial source:
# u_tt = x^2 * t - u, zero initial data.
text = """
pde "pulse" {
  vars: x;
  equation: D(u,t,2) = x^2*t - u;
  init: 0;
  init_t: 0;
}
"""
spec = parse_spec_file(text)
sol = solve_series(spec, 10)
print("spectra of the source-driven problem:")
for k, v in enumerate(sol.spectra):
    print(f"  V_{k} = {to_text(v)}")

# The residual check certifies them: the first nonvanishing residual order
# of an order-N solution must be at least N-2.
order = residual_order_check(spec, sol)
print("first nonvanishing residual order:", order, "(>=", sol.order - 2, "expected)")

# Route 2: build the problem definition from expressions.  Compact operator
# forms are fine; D(...) differentiates mechanically while parsing.
spec2 = PdeSpec(
    name="advected",
    spatial_vars=("x",),
    rhs=parse_expr("D(x*D(u,x,1), x, 1) - u", ["x"]),
    init_u=parse_expr("x^2", ["x"]),
    init_ut=parse_expr("0", ["x"]),
)
sol2 = solve_series(spec2, 8)
print()
print("mechanically expanded right-hand side:", to_text(spec2.rhs))
for k in range(4):
    print(f"  V_{k} = {to_text(sol2.spectra[k])}")
print("residual order:", residual_order_check(spec2, sol2))

# High-precision point evaluation of the truncated series.
value = evaluate_series(sol2, {"x": Fraction(1, 2), "t": Fraction(1, 4)}, PrecisionContext(50))
print("series value at x=1/2, t=1/4:", value)

# Definitions round-trip through the DSL.
print()
print(serialize_spec(spec2))
