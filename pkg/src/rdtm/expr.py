"""Deterministic expression kernel with exact rational coefficients.

The supported class is deliberately small: polynomials over declared
variables, times exp/sin/cos atoms whose arguments are again polynomials,
plus formal derivative symbols of one unknown function ``u`` (these appear
only inside PDE right-hand sides).  The class is closed under addition,
multiplication, integer powers, differentiation and substitution, which is
exactly what the time-spectrum recurrences need.

Every node is immutable and hashable; all operations are pure functions, so
expressions can be shared freely across threads.  ``simplify`` produces a
canonical form (flattened, merged, totally ordered) in which equal
rearrangements of the same terms become structurally identical; ``expand``
additionally distributes products over sums, yielding a canonical
sum-of-monomials form in which cancellation is complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedExpressionError, UnsupportedNonlinearityError

__all__ = [
    "Expr",
    "Rational",
    "Var",
    "Sum",
    "Product",
    "Power",
    "Atom",
    "DerivSym",
    "ZERO",
    "ONE",
    "rational",
    "deriv_sym",
    "simplify",
    "expand",
    "mul_expanded",
    "differentiate",
    "substitute",
    "addends",
    "collect_powers",
    "coefficient_of",
    "free_vars",
    "contains_derivsym",
    "contains_atom",
    "to_text",
    "to_latex",
]

ATOM_KINDS = ("exp", "sin", "cos")


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {value!r}")


class Expr:
    """Base class; arithmetic operators return canonical (simplified) results."""

    __slots__ = ()

    def __add__(self, other):
        return simplify(Sum((self, _coerce(other))))

    __radd__ = __add__

    def __sub__(self, other):
        return simplify(Sum((self, Product((Rational(Fraction(-1)), _coerce(other))))))

    def __rsub__(self, other):
        return simplify(Sum((_coerce(other), Product((Rational(Fraction(-1)), self)))))

    def __mul__(self, other):
        return simplify(Product((self, _coerce(other))))

    __rmul__ = __mul__

    def __neg__(self):
        return simplify(Product((Rational(Fraction(-1)), self)))

    def __pow__(self, exponent):
        return simplify(Power(self, exponent))

    def __truediv__(self, other):
        other = simplify(_coerce(other))
        if not isinstance(other, Rational) or other.value == 0:
            raise UnsupportedExpressionError(
                f"division only by nonzero rational constants, got {to_text(other)}"
            )
        return self * Rational(1 / other.value)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Rational(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Atom(Expr):
    kind: str
    argument: Expr


@dataclass(frozen=True)
class DerivSym(Expr):
    orders: tuple  # sorted ((var, order), ...); the empty tuple is u itself


ZERO = Rational(Fraction(0))
ONE = Rational(Fraction(1))
_MINUS_ONE = Rational(Fraction(-1))


def rational(numerator, denominator=1) -> Rational:
    return Rational(Fraction(numerator, denominator))


def deriv_sym(orders) -> DerivSym:
    """Derivative symbol from a {var: order} mapping (zero orders dropped)."""
    return _canon_deriv(tuple(dict(orders).items()))


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Rational(_as_fraction(value))
    raise TypeError(f"cannot treat {value!r} as an expression")


# ---------------------------------------------------------------------------
# Canonical ordering


_KIND_RANK = {"exp": 0, "sin": 1, "cos": 2}


def _node_key(e):
    if isinstance(e, Rational):
        return (0, e.value)
    if isinstance(e, Var):
        return (1, e.name)
    if isinstance(e, Atom):
        return (2, _KIND_RANK[e.kind], _node_key(e.argument))
    if isinstance(e, DerivSym):
        return (3, e.orders)
    if isinstance(e, Power):
        return (4, _node_key(e.base), e.exponent)
    if isinstance(e, Product):
        return (5, tuple(_node_key(f) for f in e.factors))
    return (6, tuple(_node_key(t) for t in e.terms))


def _factor_key(f):
    if isinstance(f, Power):
        return (_node_key(f.base), f.exponent)
    return (_node_key(f), 1)


def _factor_grade(f) -> int:
    if isinstance(f, Var):
        return 1
    if isinstance(f, Power) and isinstance(f.base, Var):
        return f.exponent
    return 0


def _term_key(monomial):
    return (sum(_factor_grade(f) for f in monomial), tuple(_factor_key(f) for f in monomial))


# ---------------------------------------------------------------------------
# Canonicalization (flatten, fold, merge, sort; no distribution over sums)


def simplify(e) -> Expr:
    """Canonical form: nested sums/products flattened, numeric factors folded
    into one leading rational, like terms merged, fixed total order.
    Idempotent; does not distribute products over sums."""
    return _canon(_coerce(e))


def _canon(e) -> Expr:
    if isinstance(e, (Rational, Var)):
        return e
    if isinstance(e, Atom):
        return _canon_atom(e.kind, e.argument)
    if isinstance(e, DerivSym):
        return _canon_deriv(e.orders)
    if isinstance(e, Power):
        return _canon_power(_canon(e.base), e.exponent)
    if isinstance(e, Product):
        return _canon_product([_canon(f) for f in e.factors])
    if isinstance(e, Sum):
        return _canon_sum([_canon(t) for t in e.terms])
    raise TypeError(f"not an expression node: {e!r}")


def _first_unsupported(e):
    """First Atom or DerivSym node inside e, or None if e is polynomial."""
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, (Atom, DerivSym)):
            return node
        if isinstance(node, Power):
            stack.append(node.base)
        elif isinstance(node, Product):
            stack.extend(node.factors)
        elif isinstance(node, Sum):
            stack.extend(node.terms)
    return None


def _canon_atom(kind, argument) -> Expr:
    if kind not in ATOM_KINDS:
        raise ValueError(f"unknown atom kind {kind!r}")
    arg = expand(argument)
    offender = _first_unsupported(arg)
    if offender is not None:
        if contains_derivsym(offender):
            raise UnsupportedNonlinearityError(
                f"{kind}() applied to the unknown function: {kind}({to_text(arg)})"
            )
        raise UnsupportedExpressionError(
            f"transcendental atom with non-polynomial argument: {kind}({to_text(arg)})"
        )
    if arg == ZERO:
        return ZERO if kind == "sin" else ONE
    return Atom(kind, arg)


def _canon_deriv(orders) -> DerivSym:
    merged = {}
    for var, order in orders:
        if not isinstance(order, int) or order < 0:
            raise ValueError(f"derivative order must be a nonnegative integer, got {order!r}")
        if order:
            merged[var] = merged.get(var, 0) + order
    return DerivSym(tuple(sorted(merged.items())))


def _canon_power(base, exponent) -> Expr:
    if isinstance(exponent, bool) or not isinstance(exponent, int):
        raise UnsupportedExpressionError(f"non-integer exponent {exponent!r}")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Rational):
        if base.value == 0 and exponent < 0:
            raise UnsupportedExpressionError("zero raised to a negative power")
        return Rational(base.value**exponent)
    if isinstance(base, Product):
        return _canon_product([_canon_power(f, exponent) for f in base.factors])
    if isinstance(base, Power):
        return _canon_power(base.base, base.exponent * exponent)
    if isinstance(base, Atom) and base.kind == "exp":
        # exp powers fold into the argument, so exp never sits under Power
        return _canon_atom("exp", Product((Rational(Fraction(exponent)), base.argument)))
    if exponent < 0:
        raise UnsupportedExpressionError(
            f"negative exponent over possibly vanishing base {to_text(base)}"
        )
    return Power(base, exponent)


def _canon_product(factors) -> Expr:
    coeff = Fraction(1)
    exp_args = []
    powers = {}
    stack = list(reversed(factors))
    while stack:
        f = stack.pop()
        if isinstance(f, Product):
            stack.extend(reversed(f.factors))
        elif isinstance(f, Rational):
            coeff *= f.value
        elif isinstance(f, Atom) and f.kind == "exp":
            exp_args.append(f.argument)
        elif isinstance(f, Power):
            powers[f.base] = powers.get(f.base, 0) + f.exponent
        else:
            powers[f] = powers.get(f, 0) + 1
    if coeff == 0:
        return ZERO
    if exp_args:
        merged = _canon_sum(exp_args) if len(exp_args) > 1 else exp_args[0]
        if merged != ZERO:
            powers[Atom("exp", merged)] = 1
    out = []
    for base, k in powers.items():
        if k == 0:
            continue
        out.append(base if k == 1 else _canon_power(base, k))
    out.sort(key=_factor_key)
    if not out:
        return Rational(coeff)
    if coeff == 1:
        return out[0] if len(out) == 1 else Product(tuple(out))
    return Product((Rational(coeff), *out))


def _split_term(t):
    """Term -> (rational coefficient, monomial factor tuple)."""
    if isinstance(t, Rational):
        return t.value, ()
    if isinstance(t, Product):
        if isinstance(t.factors[0], Rational):
            return t.factors[0].value, t.factors[1:]
        return Fraction(1), t.factors
    return Fraction(1), (t,)


def _build_term(coeff, monomial) -> Expr:
    if not monomial:
        return Rational(coeff)
    if coeff == 1:
        return monomial[0] if len(monomial) == 1 else Product(monomial)
    return Product((Rational(coeff), *monomial))


def _canon_sum(terms) -> Expr:
    merged = {}
    stack = list(reversed(terms))
    while stack:
        t = stack.pop()
        if isinstance(t, Sum):
            stack.extend(reversed(t.terms))
            continue
        coeff, monomial = _split_term(t)
        if coeff == 0:
            continue
        total = merged.get(monomial, Fraction(0)) + coeff
        if total == 0:
            merged.pop(monomial, None)
        else:
            merged[monomial] = total
    if not merged:
        return ZERO
    ordered = sorted(merged.items(), key=lambda item: _term_key(item[0]))
    out = [_build_term(coeff, monomial) for monomial, coeff in ordered]
    return out[0] if len(out) == 1 else Sum(tuple(out))


# ---------------------------------------------------------------------------
# Expansion (distribute products over sums; canonical sum of monomials)


def expand(e) -> Expr:
    """Fully distributed canonical form; cancellation across terms is complete."""
    return _expand_canon(simplify(e))


def addends(e) -> list:
    """Terms of a canonical expression viewed as a sum (empty for zero)."""
    if isinstance(e, Sum):
        return list(e.terms)
    if e == ZERO:
        return []
    return [e]


def _expand_canon(e) -> Expr:
    if isinstance(e, Sum):
        return _canon_sum([_expand_canon(t) for t in e.terms])
    if isinstance(e, Product):
        result = ONE
        for f in e.factors:
            result = mul_expanded(result, _expand_canon(f))
        return result
    if isinstance(e, Power) and isinstance(e.base, Sum):
        return _pow_expanded(_expand_canon(e.base), e.exponent)
    return e


def mul_expanded(a, b) -> Expr:
    """Product of two canonical expanded expressions, expanded and merged."""
    if a == ONE:
        return b
    if b == ONE:
        return a
    return _canon_sum([_canon_product([ta, tb]) for ta in addends(a) for tb in addends(b)])


def _pow_expanded(base, exponent) -> Expr:
    result = ONE
    power = base
    n = exponent
    while n:
        if n & 1:
            result = mul_expanded(result, power)
        n >>= 1
        if n:
            power = mul_expanded(power, power)
    return result


def collect_powers(e, var) -> dict:
    """Expanded e grouped by the power of var: {degree: coefficient Expr}.
    Occurrences of var inside atom arguments are not collected; callers that
    need a clean split must keep var out of atom arguments."""
    name = var if isinstance(var, str) else var.name
    grouped = {}
    for term in addends(expand(e)):
        coeff, monomial = _split_term(term)
        degree = 0
        rest = []
        for f in monomial:
            if isinstance(f, Var) and f.name == name:
                degree = 1
            elif isinstance(f, Power) and isinstance(f.base, Var) and f.base.name == name:
                degree = f.exponent
            else:
                rest.append(f)
        grouped.setdefault(degree, []).append(_build_term(coeff, tuple(rest)))
    return {degree: _canon_sum(parts) for degree, parts in sorted(grouped.items())}


def coefficient_of(e, var, degree) -> Expr:
    """Coefficient of var**degree in the expanded form of e."""
    return collect_powers(e, var).get(degree, ZERO)


# ---------------------------------------------------------------------------
# Calculus


def differentiate(e, var, order=1) -> Expr:
    """Exact symbolic derivative, canonicalized.  Derivative symbols are
    differentiated formally (the var's order is incremented), which is how
    compact operator forms of a right-hand side get expanded."""
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"derivative order must be a nonnegative integer, got {order!r}")
    name = var if isinstance(var, str) else var.name
    result = simplify(e)
    for _ in range(order):
        result = _d1(result, name)
    return result


def _d1(e, v) -> Expr:
    if isinstance(e, Rational):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Atom):
        darg = _d1(e.argument, v)
        if e.kind == "exp":
            return _canon_product([darg, e])
        if e.kind == "sin":
            return _canon_product([darg, Atom("cos", e.argument)])
        return _canon_product([_MINUS_ONE, darg, Atom("sin", e.argument)])
    if isinstance(e, DerivSym):
        return _canon_deriv(e.orders + ((v, 1),))
    if isinstance(e, Power):
        return _canon_product(
            [Rational(Fraction(e.exponent)), _canon_power(e.base, e.exponent - 1), _d1(e.base, v)]
        )
    if isinstance(e, Product):
        parts = []
        for i, f in enumerate(e.factors):
            parts.append(_canon_product([*e.factors[:i], _d1(f, v), *e.factors[i + 1 :]]))
        return _canon_sum(parts)
    return _canon_sum([_d1(t, v) for t in e.terms])


def substitute(e, bindings) -> Expr:
    """Simultaneous substitution of variables by expressions, then simplify."""
    table = {name: _coerce(value) for name, value in bindings.items()}
    return simplify(_sub(_coerce(e), table))


def _sub(e, table) -> Expr:
    if isinstance(e, Var):
        return table.get(e.name, e)
    if isinstance(e, Atom):
        return Atom(e.kind, _sub(e.argument, table))
    if isinstance(e, Power):
        return Power(_sub(e.base, table), e.exponent)
    if isinstance(e, Product):
        return Product(tuple(_sub(f, table) for f in e.factors))
    if isinstance(e, Sum):
        return Sum(tuple(_sub(t, table) for t in e.terms))
    return e


# ---------------------------------------------------------------------------
# Structure queries


def free_vars(e) -> frozenset:
    """Names of variables occurring in e (inside atom arguments included)."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Atom):
            stack.append(node.argument)
        elif isinstance(node, Power):
            stack.append(node.base)
        elif isinstance(node, Product):
            stack.extend(node.factors)
        elif isinstance(node, Sum):
            stack.extend(node.terms)
    return frozenset(out)


def contains_derivsym(e) -> bool:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, DerivSym):
            return True
        if isinstance(node, Atom):
            stack.append(node.argument)
        elif isinstance(node, Power):
            stack.append(node.base)
        elif isinstance(node, Product):
            stack.extend(node.factors)
        elif isinstance(node, Sum):
            stack.extend(node.terms)
    return False


def contains_atom(e) -> bool:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            return True
        if isinstance(node, Power):
            stack.append(node.base)
        elif isinstance(node, Product):
            stack.extend(node.factors)
        elif isinstance(node, Sum):
            stack.extend(node.terms)
    return False


# ---------------------------------------------------------------------------
# Printing (the text form is re-parseable; see rdtm.parsing)


def to_text(e) -> str:
    """Render in the same grammar the parser accepts (a printing fixed point)."""
    return _text(_coerce(e))


def _text(e) -> str:
    if isinstance(e, Rational):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Atom):
        return f"{e.kind}({_text(e.argument)})"
    if isinstance(e, DerivSym):
        if not e.orders:
            return "u"
        inner = ",".join(f"{v},{k}" for v, k in e.orders)
        return f"D(u,{inner})"
    if isinstance(e, Power):
        base = _text(e.base)
        if isinstance(e.base, (Sum, Product, Rational)):
            base = f"({base})"
        exponent = e.exponent if e.exponent >= 0 else f"({e.exponent})"
        return f"{base}^{exponent}"
    if isinstance(e, Product):
        coeff, monomial = _split_term(e)
        parts = [_text(f) if not isinstance(f, Sum) else f"({_text(f)})" for f in monomial]
        body = "*".join(parts)
        if coeff == 1:
            return body
        if coeff == -1:
            return f"-{body}"
        return f"{coeff}*{body}"
    parts = []
    for i, t in enumerate(e.terms):
        coeff, monomial = _split_term(t)
        if i == 0:
            parts.append(_text(t))
        elif coeff < 0:
            negated = _build_term(-coeff, monomial)
            body = _text(negated)
            if isinstance(negated, Sum):
                body = f"({body})"
            parts.append(" - " + body)
        else:
            parts.append(" + " + _text(t))
    return "".join(parts)


def to_latex(e) -> str:
    """LaTeX rendering of a canonical expression."""
    return _latex(_coerce(e))


def _latex_frac(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return rf"{sign}\frac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def _latex(e) -> str:
    if isinstance(e, Rational):
        return _latex_frac(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Atom):
        arg = _latex(e.argument)
        if e.kind == "exp":
            return rf"e^{{{arg}}}"
        return rf"\{e.kind}\left({arg}\right)"
    if isinstance(e, DerivSym):
        if not e.orders:
            return "u"
        ops = "".join(
            rf"\partial_{{{v}}}" if k == 1 else rf"\partial_{{{v}}}^{{{k}}}" for v, k in e.orders
        )
        return ops + " u"
    if isinstance(e, Power):
        base = _latex(e.base)
        if isinstance(e.base, (Sum, Product, Rational, DerivSym)):
            base = rf"\left({base}\right)"
        return rf"{base}^{{{e.exponent}}}"
    if isinstance(e, Product):
        coeff, monomial = _split_term(e)
        parts = [
            rf"\left({_latex(f)}\right)" if isinstance(f, Sum) else _latex(f) for f in monomial
        ]
        body = r" \, ".join(parts)
        if coeff == 1:
            return body
        if coeff == -1:
            return f"-{body}"
        return rf"{_latex_frac(coeff)} \, {body}"
    parts = []
    for i, t in enumerate(e.terms):
        coeff, monomial = _split_term(t)
        if i == 0:
            parts.append(_latex(t))
        elif coeff < 0:
            negated = _build_term(-coeff, monomial)
            body = _latex(negated)
            if isinstance(negated, Sum):
                body = rf"\left({body}\right)"
            parts.append(" - " + body)
        else:
            parts.append(" + " + _latex(t))
    return "".join(parts)
