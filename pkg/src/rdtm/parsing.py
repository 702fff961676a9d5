"""Tokenizer and recursive-descent expression parser.

The grammar is the one the pretty-printer emits, so parse -> print -> parse
is a fixed point:

    expression := term (('+'|'-') term)*
    term       := unary (('*'|'/') unary)*          # '/' by rational constants
    unary      := ('-'|'+') unary | power
    power      := primary ('^' exponent)?
    exponent   := ['-'] INT | '(' ['-'] INT ')'
    primary    := NUMBER | '(' expression ')' | ident-form
    ident-form := declared variable | 't' | 'u'
                | ('exp'|'sin'|'cos') '(' expression ')'
                | 'D' '(' expression (',' IDENT ',' INT)+ ')'

Whitespace is insignificant and '#' starts a comment running to end of line.
Numbers are exact: integers, fractions via '/', and decimal literals such as
0.3 (read as 3/10, never as a binary float).  D(...) differentiates its first
argument immediately, so compact operator forms expand mechanically at parse
time; D applied to u or its derivatives just raises the derivative order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .errors import ParseError, UndeclaredIdentifierError

__all__ = ["Token", "tokenize", "parse_expr", "RESERVED_NAMES", "TIME_VAR"]

TIME_VAR = "t"
RESERVED_NAMES = frozenset({"t", "u", "D", "exp", "sin", "cos"})

_PUNCT = "+-*/^(),{}:;="


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, NUMBER, STRING, one of the punctuation chars, EOF
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(Token("NUMBER", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            tokens.append(Token("STRING", text[i + 1 : j], start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def accept(self, kind) -> Token | None:
        if self.cur.kind == kind:
            return self.advance()
        return None

    def expect(self, kind, what=None) -> Token:
        if self.cur.kind != kind:
            found = self.cur.text or "end of input"
            raise ParseError(
                f"expected {what or kind}, found {found!r}", self.cur.line, self.cur.col
            )
        return self.advance()

    def error(self, message) -> ParseError:
        return ParseError(message, self.cur.line, self.cur.col)


class ExprParser:
    """Parses expressions over a fixed set of declared spatial variables."""

    def __init__(self, stream: TokenStream, declared_vars):
        self.stream = stream
        self.declared = tuple(declared_vars)
        for name in self.declared:
            if name in RESERVED_NAMES:
                raise ValueError(f"variable name {name!r} is reserved")

    def parse_expression(self) -> ex.Expr:
        node = self.parse_term()
        while self.stream.cur.kind in "+-":
            op = self.stream.advance()
            rhs = self.parse_term()
            if op.kind == "-":
                rhs = ex.Product((ex.rational(-1), rhs))
            node = ex.Sum((node, rhs))
        return node

    def parse_term(self) -> ex.Expr:
        node = self.parse_unary()
        while self.stream.cur.kind in "*/":
            op = self.stream.advance()
            rhs = self.parse_unary()
            if op.kind == "/":
                divisor = ex.simplify(rhs)
                if not isinstance(divisor, ex.Rational):
                    raise ParseError(
                        "divisor must be a rational constant", op.line, op.col
                    )
                if divisor.value == 0:
                    raise ParseError("division by zero", op.line, op.col)
                rhs = ex.Rational(1 / divisor.value)
            node = ex.Product((node, rhs))
        return node

    def parse_unary(self) -> ex.Expr:
        if self.stream.accept("-"):
            return ex.Product((ex.rational(-1), self.parse_unary()))
        if self.stream.accept("+"):
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> ex.Expr:
        base = self.parse_primary()
        if self.stream.accept("^"):
            exponent = self.parse_exponent()
            return ex.Power(base, exponent)
        return base

    def parse_exponent(self) -> int:
        if self.stream.accept("("):
            sign = -1 if self.stream.accept("-") else 1
            value = self.parse_integer("integer exponent")
            self.stream.expect(")")
            return sign * value
        sign = -1 if self.stream.accept("-") else 1
        return sign * self.parse_integer("integer exponent")

    def parse_integer(self, what) -> int:
        tok = self.stream.cur
        if tok.kind != "NUMBER" or "." in tok.text:
            raise self.stream.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.stream.advance()
        return int(tok.text)

    def parse_primary(self) -> ex.Expr:
        tok = self.stream.cur
        if tok.kind == "NUMBER":
            self.stream.advance()
            return ex.Rational(Fraction(tok.text))
        if tok.kind == "(":
            self.stream.advance()
            node = self.parse_expression()
            self.stream.expect(")")
            return node
        if tok.kind == "IDENT":
            self.stream.advance()
            name = tok.text
            if name in ("exp", "sin", "cos"):
                self.stream.expect("(", f"'(' after {name}")
                arg = self.parse_expression()
                self.stream.expect(")")
                return ex.Atom(name, arg)
            if name == "D":
                return self.parse_derivative(tok)
            if name == "u":
                return ex.DerivSym(())
            if name == TIME_VAR or name in self.declared:
                return ex.Var(name)
            raise UndeclaredIdentifierError(
                f"undeclared identifier {name!r}", tok.line, tok.col
            )
        raise self.stream.error(f"unexpected {tok.text or 'end of input'!r}")

    def parse_derivative(self, d_tok: Token) -> ex.Expr:
        self.stream.expect("(", "'(' after D")
        inner = self.parse_expression()
        pairs = []
        while self.stream.accept(","):
            var_tok = self.stream.expect("IDENT", "variable name in D(...)")
            name = var_tok.text
            if name != TIME_VAR and name not in self.declared:
                raise UndeclaredIdentifierError(
                    f"undeclared identifier {name!r}", var_tok.line, var_tok.col
                )
            self.stream.expect(",")
            order = self.parse_integer("derivative order")
            pairs.append((name, order))
        self.stream.expect(")")
        if not pairs:
            raise ParseError("D(...) needs at least one variable/order pair", d_tok.line, d_tok.col)
        result = ex.simplify(inner)
        for name, order in pairs:
            result = ex.differentiate(result, name, order)
        return result


def parse_expr(text: str, declared_vars) -> ex.Expr:
    """Parse and canonicalize an expression over the declared variables."""
    stream = TokenStream(tokenize(text))
    parser = ExprParser(stream, declared_vars)
    node = parser.parse_expression()
    if stream.cur.kind != "EOF":
        raise stream.error(f"unexpected trailing {stream.cur.text!r}")
    return ex.simplify(node)
