"""Exact sparse polynomial arithmetic over towered coefficient fields.

The ground field is always Q.  On top of it the engine needs fractions of a
quotient ring K[y]/J (J a prime ideal given by a reduced Groebner basis), which
covers both rational function fields (J = 0) and function fields of irreducible
varieties.  Scalars of the latter kind have no canonical reduced form, so
equality goes through cross-multiplication and normal forms; all computation
paths are deterministic, which is what reproducible output actually needs.

Variables carry a space tag, an integer index tuple and a weight.  Contexts
(variable tuple + field + monomial order) are interned so that equal contexts
are identical objects and polynomials can be moved between contexts by name.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .errors import InputError

# ---------------------------------------------------------------------------
# variables


class Variable:
    """A named coordinate: (tag, index tuple, weight).

    The printed name is tag.i1.i2..., e.g. a.1, y.0.0.112, w.0, c.3.-1.
    Instance coordinates of a Schur summand encode the tableau reading word as
    the last index component (one decimal digit per entry, so dimensions stay
    below 10, which is far beyond desk scale anyway).
    Weight 0 marks base-variety / witness / curve-coefficient variables; a
    summand coordinate has weight equal to the size of its partition.
    """

    __slots__ = ("tag", "index", "weight", "_key", "_name")

    def __init__(self, tag: str, index: tuple = (), weight: int = 0):
        self.tag = tag
        self.index = tuple(index)
        self.weight = weight
        self._key = (tag, self.index, weight)
        self._name = ".".join([tag] + [str(i) for i in self.index])

    @property
    def name(self) -> str:
        return self._name

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Variable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return self._name


# ---------------------------------------------------------------------------
# coefficient fields


class RationalField:
    """The field Q with Fraction scalars."""

    key = ("QQ",)

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_fraction(self, fr) -> Fraction:
        return Fraction(fr)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def invert(self, a):
        if a == 0:
            raise ZeroDivisionError("inverting zero scalar")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def is_one(self, a):
        return a == 1

    def canon(self, a):
        return a

    def eq(self, a, b):
        return a == b

    def to_str(self, a: Fraction) -> str:
        return str(a)

    def scalar_key(self, a: Fraction):
        return (a.numerator, a.denominator)


QQ = RationalField()


class QuotFrac:
    """A fraction num/den of residue classes in K[y]/J.

    num and den are Polynomials over the base context, kept in normal form
    against the field's defining GB, den monic w.r.t. the base order.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    def __repr__(self):
        if self.den.is_one():
            return f"({self.num})"
        return f"(({self.num})/({self.den}))"


class QuotientFractionField:
    """Frac(K[y]/J) for J prime, J given by a reduced GB over a QQ context.

    J = () gives the rational function field of the base context.  Primality
    of J is the caller's responsibility (certified upstream); arithmetic only
    needs the domain property for zero-divisor-free denominators.
    """

    def __init__(self, base_ctx: "RingContext", gb: tuple):
        if base_ctx.field is not QQ:
            raise InputError("quotient-fraction fields must sit over Q")
        self.base_ctx = base_ctx
        self.gb = tuple(gb)
        self.key = ("quotfrac", base_ctx.key,
                    tuple(p.fingerprint() for p in self.gb))
        self._nf = None  # lazily bound to ideals.normal_form

    def _normal(self, p):
        if not self.gb:
            return p
        if self._nf is None:
            from .ideals import normal_form
            self._nf = normal_form
        return self._nf(p, self.gb)

    def zero(self):
        return QuotFrac(self.base_ctx.zero(), self.base_ctx.one())

    def one(self):
        return QuotFrac(self.base_ctx.one(), self.base_ctx.one())

    def from_fraction(self, fr) -> QuotFrac:
        return QuotFrac(self.base_ctx.const(Fraction(fr)), self.base_ctx.one())

    def from_poly(self, p) -> QuotFrac:
        return self.canon(QuotFrac(p, self.base_ctx.one()))

    def canon(self, a: QuotFrac) -> QuotFrac:
        num = self._normal(a.num)
        den = self._normal(a.den)
        if den.is_zero():
            raise ZeroDivisionError("denominator in the defining ideal")
        if num.is_zero():
            return QuotFrac(self.base_ctx.zero(), self.base_ctx.one())
        if den.is_constant():
            c = den.constant_value()
            return QuotFrac(num.scale(1 / c), self.base_ctx.one())
        if not self.gb:
            # genuine rational function field: cancel the gcd
            from .ideals import exact_div, poly_gcd
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = exact_div(num, g)
                den = exact_div(den, g)
                if den.is_constant():
                    c = den.constant_value()
                    return QuotFrac(num.scale(1 / c), self.base_ctx.one())
        lc = den.lead_coeff()
        if lc != 1:
            num = num.scale(1 / lc)
            den = den.scale(1 / lc)
        return QuotFrac(num, den)

    def add(self, a, b):
        return self.canon(QuotFrac(a.num * b.den + b.num * a.den,
                                   a.den * b.den))

    def sub(self, a, b):
        return self.canon(QuotFrac(a.num * b.den - b.num * a.den,
                                   a.den * b.den))

    def mul(self, a, b):
        return self.canon(QuotFrac(a.num * b.num, a.den * b.den))

    def neg(self, a):
        return QuotFrac(-a.num, a.den)

    def invert(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverting zero scalar")
        return self.canon(QuotFrac(a.den, a.num))

    def is_zero(self, a):
        return self._normal(a.num).is_zero()

    def is_one(self, a):
        return self.is_zero(self.sub(a, self.one()))

    def eq(self, a, b):
        return self._normal(a.num * b.den - b.num * a.den).is_zero()

    def to_str(self, a) -> str:
        a = self.canon(a)
        if a.den.is_one():
            if a.num.is_constant():
                return str(a.num.constant_value())
            return "(" + poly_str(a.num) + ")"
        return "(" + poly_str(a.num) + ")/(" + poly_str(a.den) + ")"

    def scalar_key(self, a):
        return (a.num.fingerprint(), a.den.fingerprint())


# ---------------------------------------------------------------------------
# monomial orders


class DegRevLex:
    """Degree-reverse-lexicographic over the context's variable tuple."""

    key = ("degrevlex",)

    def monomial_key(self, exp: tuple):
        return (sum(exp), tuple(-e for e in reversed(exp)))


class BlockOrder:
    """Elimination order: the drop block is compared first (degrevlex inside
    each block), so the ideal's GB intersected with the keep block generates
    the elimination ideal."""

    def __init__(self, drop_positions: Iterable[int]):
        self.drop = tuple(sorted(drop_positions))
        self._dropset = frozenset(self.drop)
        self.key = ("block", self.drop)

    def monomial_key(self, exp: tuple):
        drop = [exp[i] for i in self.drop]
        keep = [e for i, e in enumerate(exp) if i not in self._dropset]
        return (sum(drop), tuple(-e for e in reversed(drop)),
                sum(keep), tuple(-e for e in reversed(keep)))


# ---------------------------------------------------------------------------
# ring contexts (interned)

_CONTEXT_CACHE: dict = {}


class RingContext:
    __slots__ = ("variables", "field", "order", "key", "_pos", "_zero_exp",
                 "_one", "_zero", "_monokey_cache")

    def __new__(cls, variables, field, order=None):
        variables = tuple(variables)
        order = order or DegRevLex()
        key = (tuple(v.key for v in variables), field.key, order.key)
        cached = _CONTEXT_CACHE.get(key)
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.variables = variables
        self.field = field
        self.order = order
        self.key = key
        self._pos = {v: i for i, v in enumerate(variables)}
        if len(self._pos) != len(variables):
            raise InputError("duplicate variables in ring context")
        self._zero_exp = (0,) * len(variables)
        self._monokey_cache = {}
        self._one = None
        self._zero = None
        _CONTEXT_CACHE[key] = self
        return self

    # -- basic lookups

    def nvars(self) -> int:
        return len(self.variables)

    def position(self, v: Variable) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise InputError(f"variable {v} not in context") from None

    def has_variable(self, v: Variable) -> bool:
        return v in self._pos

    def variable_by_name(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise InputError(f"unknown variable {name!r}")

    def monomial_key(self, exp: tuple):
        k = self._monokey_cache.get(exp)
        if k is None:
            k = self.order.monomial_key(exp)
            self._monokey_cache[exp] = k
        return k

    # -- constructors

    def zero(self) -> "Polynomial":
        if self._zero is None:
            self._zero = Polynomial(self, {})
        return self._zero

    def one(self) -> "Polynomial":
        if self._one is None:
            self._one = Polynomial(self, {self._zero_exp: self.field.one()})
        return self._one

    def const(self, c) -> "Polynomial":
        c = self.field.from_fraction(c) if isinstance(c, (int, Fraction)) else c
        if self.field.is_zero(c):
            return self.zero()
        return Polynomial(self, {self._zero_exp: c})

    def var(self, v: Variable) -> "Polynomial":
        exp = [0] * len(self.variables)
        exp[self.position(v)] = 1
        return Polynomial(self, {tuple(exp): self.field.one()})

    def monomial(self, exp: tuple, coeff=None) -> "Polynomial":
        coeff = self.field.one() if coeff is None else coeff
        return Polynomial(self, {tuple(exp): coeff})

    # -- derived contexts

    def with_order(self, order) -> "RingContext":
        return RingContext(self.variables, self.field, order)

    def extended(self, new_vars: Iterable[Variable]) -> "RingContext":
        return RingContext(self.variables + tuple(new_vars), self.field,
                           DegRevLex())

    def restricted(self, keep: Iterable[Variable]) -> "RingContext":
        keepset = set(keep)
        return RingContext(tuple(v for v in self.variables if v in keepset),
                           self.field, DegRevLex())

    def elimination_order(self, drop_vars: Iterable[Variable]) -> "RingContext":
        drop_positions = [self.position(v) for v in drop_vars]
        return self.with_order(BlockOrder(drop_positions))

    def __repr__(self):
        return f"RingContext({[v.name for v in self.variables]})"


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial: dict {exponent tuple: nonzero scalar}."""

    __slots__ = ("ctx", "coeffs", "_lead")

    def __init__(self, ctx: RingContext, coeffs: dict):
        self.ctx = ctx
        self.coeffs = coeffs
        self._lead = None

    # -- basics

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.coeffs)

    def is_one(self) -> bool:
        if len(self.coeffs) != 1:
            return False
        exp, c = next(iter(self.coeffs.items()))
        return sum(exp) == 0 and self.ctx.field.is_one(c)

    def constant_value(self):
        if self.is_zero():
            return self.ctx.field.zero()
        if not self.is_constant():
            raise InputError("not a constant polynomial")
        return next(iter(self.coeffs.values()))

    def terms_desc(self):
        """Terms sorted descending by the context order."""
        return sorted(self.coeffs.items(),
                      key=lambda t: self.ctx.monomial_key(t[0]), reverse=True)

    def lead(self):
        """(exponent, coefficient) of the leading term."""
        if self._lead is None:
            if not self.coeffs:
                raise InputError("zero polynomial has no leading term")
            self._lead = max(self.coeffs, key=self.ctx.monomial_key)
        return self._lead, self.coeffs[self._lead]

    def lead_exp(self) -> tuple:
        return self.lead()[0]

    def lead_coeff(self):
        return self.lead()[1]

    def total_degree(self) -> int:
        if not self.coeffs:
            return -1
        return max(sum(e) for e in self.coeffs)

    def weighted_degree(self) -> int:
        """Max over monomials of sum exp_i * weight(var_i)."""
        if not self.coeffs:
            return -1
        w = [v.weight for v in self.ctx.variables]
        return max(sum(ei * wi for ei, wi in zip(e, w)) for e in self.coeffs)

    def is_weight_homogeneous(self) -> bool:
        if not self.coeffs:
            return True
        w = [v.weight for v in self.ctx.variables]
        degs = {sum(ei * wi for ei, wi in zip(e, w)) for e in self.coeffs}
        return len(degs) == 1

    def degree_in(self, v: Variable) -> int:
        if not self.coeffs:
            return -1
        i = self.ctx.position(v)
        return max(e[i] for e in self.coeffs)

    def variables_present(self):
        present = set()
        for e in self.coeffs:
            for i, ei in enumerate(e):
                if ei:
                    present.add(self.ctx.variables[i])
        return present

    # -- arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ctx is not self.ctx:
                raise InputError("polynomial context mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.ctx.field
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            cur = out.get(e)
            if cur is None:
                out[e] = c
            else:
                s = f.add(cur, c)
                if f.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
        return Polynomial(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ctx.field
        return Polynomial(self.ctx,
                          {e: f.neg(c) for e, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        f = self.ctx.field
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                p = f.mul(c1, c2)
                cur = out.get(e)
                if cur is None:
                    out[e] = p
                else:
                    s = f.add(cur, p)
                    if f.is_zero(s):
                        del out[e]
                    else:
                        out[e] = s
        return Polynomial(self.ctx, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        f = self.ctx.field
        if isinstance(c, (int, Fraction)):
            c = f.from_fraction(c)
        if f.is_zero(c):
            return self.ctx.zero()
        return Polynomial(self.ctx,
                          {e: f.mul(v, c) for e, v in self.coeffs.items()})

    def mul_monomial(self, exp: tuple, coeff=None) -> "Polynomial":
        f = self.ctx.field
        out = {}
        for e, c in self.coeffs.items():
            ne = tuple(x + y for x, y in zip(e, exp))
            out[ne] = c if coeff is None else f.mul(c, coeff)
        return Polynomial(self.ctx, out)

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("negative polynomial power")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ctx is not self.ctx:
            return False
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    # -- structure ops

    def partial(self, v: Variable) -> "Polynomial":
        i = self.ctx.position(v)
        f = self.ctx.field
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            nc = f.mul(c, f.from_fraction(e[i]))
            key = tuple(ne)
            cur = out.get(key)
            out[key] = nc if cur is None else f.add(cur, nc)
        return Polynomial(self.ctx, {e: c for e, c in out.items()
                                     if not f.is_zero(c)})

    def map_context(self, target: RingContext) -> "Polynomial":
        """Re-express in another context containing all variables present
        (matched by identity of Variable objects)."""
        if target is self.ctx:
            return self
        if target.field.key != self.ctx.field.key:
            raise InputError("field mismatch in map_context")
        positions = []
        for i, v in enumerate(self.ctx.variables):
            positions.append(target._pos.get(v, -1))
        out = {}
        nt = target.nvars()
        for e, c in self.coeffs.items():
            ne = [0] * nt
            for i, ei in enumerate(e):
                if ei:
                    p = positions[i]
                    if p < 0:
                        raise InputError(
                            f"variable {self.ctx.variables[i]} absent from "
                            f"target context")
                    ne[p] = ei
            key = tuple(ne)
            cur = out.get(key)
            if cur is None:
                out[key] = c
            else:
                s = target.field.add(cur, c)
                if target.field.is_zero(s):
                    del out[key]
                else:
                    out[key] = s
        return Polynomial(target, out)

    def substitute(self, sub: dict, target: RingContext) -> "Polynomial":
        """Substitute variables by polynomials of the target context.

        Variables not in `sub` must exist in the target context and map to
        themselves.  Powers of substituted values are cached per call.
        """
        f = target.field
        power_cache: dict = {}

        def value_power(i: int, k: int) -> Polynomial:
            key = (i, k)
            got = power_cache.get(key)
            if got is None:
                v = self.ctx.variables[i]
                base = sub.get(v)
                if base is None:
                    base = target.var(v)
                got = base ** k
                power_cache[key] = got
            return got

        same_field = target.field.key == self.ctx.field.key
        result = target.zero()
        for e, c in self.coeffs.items():
            if same_field:
                term = Polynomial(target, {target._zero_exp: c})
            elif self.ctx.field is QQ:
                term = target.const(target.field.from_fraction(c))
            else:
                raise InputError("cannot transport scalars between fields")
            for i, ei in enumerate(e):
                if ei:
                    term = term * value_power(i, ei)
            result = result + term
        return result

    def evaluate(self, point: dict):
        """Evaluate at a scalar point {Variable: scalar}; returns a scalar."""
        f = self.ctx.field
        total = f.zero()
        for e, c in self.coeffs.items():
            val = c
            for i, ei in enumerate(e):
                if ei:
                    v = self.ctx.variables[i]
                    if v not in point:
                        raise InputError(f"no value for {v}")
                    x = point[v]
                    if isinstance(x, (int, Fraction)):
                        x = f.from_fraction(x)
                    for _ in range(ei):
                        val = f.mul(val, x)
            total = f.add(total, val)
        return total

    # -- canonical output

    def fingerprint(self):
        """Hashable canonical key (sorted terms with scalar keys)."""
        f = self.ctx.field
        items = sorted(((e, f.scalar_key(c)) for e, c in self.coeffs.items()),
                       key=lambda t: t[0])
        return (self.ctx.key[0], tuple(items))

    def __repr__(self):
        return poly_str(self)


def poly_str(p: Polynomial) -> str:
    """Deterministic human/parser-friendly rendering."""
    if p.is_zero():
        return "0"
    f = p.ctx.field
    parts = []
    for e, c in p.terms_desc():
        mono = "*".join(
            (v.name if k == 1 else f"{v.name}^{k}")
            for v, k in zip(p.ctx.variables, e) if k)
        cs = f.to_str(f.canon(c))
        if mono:
            if cs == "1":
                body = mono
            elif cs == "-1":
                body = "-" + mono
            else:
                body = f"{cs}*{mono}"
        else:
            body = cs
        parts.append(body)
    out = parts[0]
    for body in parts[1:]:
        if body.startswith("-"):
            out += " - " + body[1:]
        else:
            out += " + " + body
    return out


# ---------------------------------------------------------------------------
# helpers for canonical variable families


def base_var(i: int, tag: str = "a") -> Variable:
    return Variable(tag, (i,), 0)


def witness_var(i: int) -> Variable:
    return Variable("w", (i,), 0)


def curve_var(basis_index: int, t_exponent: int) -> Variable:
    return Variable("c", (basis_index, t_exponent), 0)
