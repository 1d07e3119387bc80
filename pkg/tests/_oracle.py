"""Bridges between the package's polynomials and sympy, used as an
independent oracle in the test suite only."""

from fractions import Fraction

import sympy

from schurvar.rings import Polynomial, QQ, RingContext


def symbols_for(ctx: RingContext):
    return [sympy.Symbol(v.name.replace(".", "_")) for v in ctx.variables]


def to_sympy(p: Polynomial, syms):
    expr = sympy.Integer(0)
    for e, c in p.coeffs.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, e):
            if k:
                term *= s ** k
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, ctx: RingContext, syms) -> Polynomial:
    poly = sympy.Poly(sympy.expand(expr), *syms, domain="QQ")
    coeffs = {}
    for mono, c in poly.terms():
        coeffs[tuple(int(k) for k in mono)] = Fraction(c.p, c.q)
    return Polynomial(ctx, coeffs)


def groebner_sympy(gens, ctx: RingContext):
    """Reduced monic grevlex basis via sympy, as package polynomials."""
    syms = symbols_for(ctx)
    exprs = [to_sympy(g, syms) for g in gens if not g.is_zero()]
    if not exprs:
        return ()
    basis = sympy.groebner(exprs, *syms, order="grevlex", field=True)
    out = [from_sympy(e, ctx, syms) for e in basis.exprs]
    out = [p for p in out if not p.is_zero()]
    out.sort(key=lambda p: ctx.monomial_key(p.lead_exp()))
    return tuple(out)


def fingerprints(polys):
    return sorted(p.fingerprint() for p in polys)
