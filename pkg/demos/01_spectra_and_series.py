"""Walkthrough: from a PDE to its time-spectrum sequence.

The solver turns u_tt = rhs into an algebraic recurrence on the series
coefficients ("spectra") V_k of u = sum V_k(x) t^k.  The three built-in
models all collapse onto closed forms, which makes the machinery visible.
"""

from rdtm import (
    ModelId,
    builtin_model,
    compile_recurrence,
    solve_series,
    to_text,
)

for model in ModelId:
    spec = builtin_model(model)
    print(f"== {model.value}: {len(spec.spatial_vars)}-D problem over {spec.spatial_vars}")
    print(f"   u_tt = {to_text(spec.rhs)}")
    print(f"   u(X,0) = {to_text(spec.init_u)},  u_t(X,0) = {to_text(spec.init_ut)}")

    # The compiled recurrence: one term per monomial of the right-hand side.
    # Each term carries a coefficient, a time shift (from t powers), and the
    # derivative orders of the spectra it convolves.
    rec = compile_recurrence(spec)
    print(f"   compiled recurrence has {len(rec.terms)} terms, e.g.:")
    for term in rec.terms[:3]:
        orders = ["u" if f == () else ("1" if f is None else str(dict(f))) for f in term.factors]
        print(f"     coeff={to_text(term.coefficient)}  shift={term.time_shift}  factors={orders}")

    sol = solve_series(spec, 8)
    for k, v in enumerate(sol.spectra):
        print(f"   V_{k} = {to_text(v)}")
    print(f"   truncated series: {to_text(sol.to_expr())}")
    print()

# The quintic model is the interesting one: seven five-fold convolution
# terms cancel against -18 u^5 at every step, leaving V_{k+2} = V_k / ((k+1)(k+2)).
spec = builtin_model(ModelId.EX2)
sol = solve_series(spec, 12)
print("ex2 spectra are exp(x)/k!:", all(
    to_text(v).endswith("exp(x)") or to_text(v) == "exp(x)" for v in sol.spectra
))
