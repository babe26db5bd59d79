"""Prefix expression grammar for cell maps.

    expr   := number | "i" | name | "(" op expr+ ")"
    number := integer or p/q, optionally signed
    op     := "+" | "-" | "*" | "/" | "1-" | "inv"

``(- a)`` is negation, ``(1- a)`` is 1 - a and ``(inv a)`` is 1/a.
Example: the map x -> 1 - a/x with a = 1/2 is ``(1- (/ 1/2 x))``.
"""

from fractions import Fraction

import sympy


class ExpressionError(ValueError):
    pass


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _atom(tok, symbols):
    if tok == "i":
        return sympy.I
    if tok in symbols:
        return symbols[tok]
    try:
        f = Fraction(tok)
    except ValueError:
        raise ExpressionError("unknown symbol %r" % tok)
    return sympy.Rational(f.numerator, f.denominator)


def parse_expr(text, symbols):
    """Parse a prefix expression; ``symbols`` maps parameter names to sympy symbols."""
    if not isinstance(text, str):
        return sympy.sympify(text)
    toks = _tokenize(text)
    if not toks:
        raise ExpressionError("empty expression")
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(toks):
            raise ExpressionError("unexpected end of %r" % text)
        tok = toks[pos]
        pos += 1
        if tok == ")":
            raise ExpressionError("unexpected ')' in %r" % text)
        if tok != "(":
            return _atom(tok, symbols)
        if pos >= len(toks):
            raise ExpressionError("unexpected end of %r" % text)
        op = toks[pos]
        pos += 1
        args = []
        while pos < len(toks) and toks[pos] != ")":
            args.append(read())
        if pos >= len(toks):
            raise ExpressionError("missing ')' in %r" % text)
        pos += 1
        return _apply(op, args, text)

    out = read()
    if pos != len(toks):
        raise ExpressionError("trailing tokens in %r" % text)
    return out


def _apply(op, args, text):
    if not args:
        raise ExpressionError("operator %r without arguments in %r" % (op, text))
    if op == "+":
        return sympy.Add(*args)
    if op == "*":
        return sympy.Mul(*args)
    if op == "-":
        if len(args) == 1:
            return -args[0]
        return args[0] - sympy.Add(*args[1:])
    if op == "/":
        if len(args) != 2:
            raise ExpressionError("'/' takes two arguments in %r" % text)
        return args[0] / args[1]
    if op == "1-":
        if len(args) != 1:
            raise ExpressionError("'1-' takes one argument in %r" % text)
        return 1 - args[0]
    if op == "inv":
        if len(args) != 1:
            raise ExpressionError("'inv' takes one argument in %r" % text)
        return 1 / args[0]
    raise ExpressionError("unknown operator %r in %r" % (op, text))


def format_expr(expr):
    """Render a sympy expression built from the grammar back to prefix form."""
    expr = sympy.sympify(expr)
    if expr is sympy.I:
        return "i"
    if expr.is_Rational:
        if expr.q == 1:
            return str(expr.p)
        return "%d/%d" % (expr.p, expr.q)
    if expr.is_Symbol:
        return expr.name
    if expr.is_Add:
        return "(+ %s)" % " ".join(format_expr(a) for a in expr.args)
    if expr.is_Mul:
        return "(* %s)" % " ".join(format_expr(a) for a in expr.args)
    if expr.is_Pow and expr.exp.is_Integer:
        k = int(expr.exp)
        base = format_expr(expr.base)
        body = base if abs(k) == 1 else "(* %s)" % " ".join([base] * abs(k))
        return body if k > 0 else "(inv %s)" % body
    raise ExpressionError("cannot render %s in the prefix grammar" % expr)
