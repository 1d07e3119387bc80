"""Closed subsets of functor instances and polynomial morphisms onto them.

A closed subset lives in B x Q(K^n): its ideal is generated in the
polynomial ring over the base variables (weight 0) together with the
instance coordinates of Q at dimension n.  The same subset induces one at
every dimension; `smear` computes the induced equations by substituting a
generic linear map and collecting coefficients.

A morphism is an equivariant polynomial family B x P'(U) -> P(U): a
coefficient vector over K[B] against the basis of equivariant polynomial
maps P' -> P.  Images, evaluation, and recognition of raw coordinate
polynomials as morphisms all reduce to that basis.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .decomp import decompose_restricted, radical
from .errors import InputError, NotAMorphismError
from .ideals import (
    eliminate, groebner, ideal_dimension, is_trivial, normal_form,
    radical_membership,
)
from .rings import QQ, Polynomial, RingContext, Variable
from .schur import (
    FunctorInstance, PolyFunctor, PolyMapSpace, functor_map_matrix,
)


def base_variables(count: int, tag: str = "b") -> tuple:
    return tuple(Variable(tag, (i,), 0) for i in range(1, count + 1))


def instance_context(functor: PolyFunctor, n: int, tag: str = "y",
                     base_vars: Sequence[Variable] = ()) -> tuple:
    """(ctx, coordinate variables in instance order)."""
    inst = FunctorInstance(functor, n)
    ivars = inst.variables(tag)
    ctx = RingContext(tuple(base_vars) + tuple(ivars), QQ)
    return ctx, ivars


class ClosedSubset:
    """V(gens) inside B x Q(K^n)."""

    __slots__ = ("functor", "n", "tag", "base_vars", "ctx", "inst_vars",
                 "gens", "_gb")

    def __init__(self, functor: PolyFunctor, n: int,
                 gens: Iterable[Polynomial],
                 base_vars: Sequence[Variable] = (), tag: str = "y",
                 ctx: Optional[RingContext] = None):
        self.functor = functor
        self.n = n
        self.tag = tag
        self.base_vars = tuple(base_vars)
        if ctx is None:
            ctx, ivars = instance_context(functor, n, tag, self.base_vars)
        else:
            ivars = FunctorInstance(functor, n).variables(tag)
        self.ctx = ctx
        self.inst_vars = list(ivars)
        known = set(ctx.variables)
        gens = tuple(g if g.ctx is ctx else g.map_context(ctx)
                     for g in gens)
        for g in gens:
            for v in g.variables_present():
                if v not in known:
                    raise InputError(f"foreign variable {v} in subset")
        self.gens = gens
        self._gb = None

    # -- structure ---------------------------------------------------

    def instance(self) -> FunctorInstance:
        return FunctorInstance(self.functor, self.n)

    def coord_var(self, key) -> Variable:
        return self.inst_vars[self.instance()._index[key]]

    def groebner(self) -> tuple:
        if self._gb is None:
            self._gb = groebner(self.ctx, self.gens)
        return self._gb

    def fingerprint(self) -> tuple:
        return tuple(str(g) for g in self.groebner())

    def radical_subset(self) -> "ClosedSubset":
        rad = radical(self.ctx, self.gens)
        return ClosedSubset(self.functor, self.n, rad, self.base_vars,
                            self.tag, self.ctx)

    def is_empty(self) -> bool:
        return is_trivial(self.ctx, self.gens)

    def dimension(self) -> int:
        return ideal_dimension(self.ctx, self.gens)

    # -- set relations -----------------------------------------------

    def contains(self, other: "ClosedSubset") -> bool:
        """other is a subset of self (as varieties)."""
        if (self.functor, self.n, self.tag, self.base_vars) != \
                (other.functor, other.n, other.tag, other.base_vars):
            raise InputError("subsets live in different instances")
        gb = other.groebner()
        return all(radical_membership(other.ctx, g.map_context(other.ctx),
                                      gb)
                   for g in self.gens)

    def same_set(self, other: "ClosedSubset") -> bool:
        return self.contains(other) and other.contains(self)

    def contains_point(self, point: dict) -> bool:
        """point maps every coordinate/base variable to a Fraction."""
        sub = {}
        for v in self.ctx.variables:
            if v not in point:
                raise InputError(f"point misses variable {v}")
            sub[v] = self.ctx.const(Fraction(point[v]))
        for g in self.gens:
            val = g.substitute(sub, self.ctx)
            if not val.is_zero():
                return False
        return True

    def prime_components(self, asserted_prime: Sequence[tuple] = ()):
        """decompose into certified-prime pieces (see decomp)."""
        comps = decompose_restricted(self.ctx, self.gens,
                                     asserted_prime=tuple(asserted_prime))
        out = []
        for comp in comps:
            sub = ClosedSubset(self.functor, self.n, comp.gb,
                               self.base_vars, self.tag, self.ctx)
            sub._gb = tuple(comp.gb)
            out.append((sub, comp.prime, comp.how))
        return out

    def __repr__(self):
        return (f"ClosedSubset({self.functor!r} at n={self.n}, "
                f"{len(self.gens)} gens)")


def smear(X: ClosedSubset, n2: int, radicalize: bool = True) -> ClosedSubset:
    """Equations induced at dimension n2: coefficients of a generic
    linear substitution, plus the base ideal, radicalized.

    radicalize=False skips the final radical and returns the raw
    coefficient generators; they cut out the same point set, which is
    all a purely set-theoretic caller needs, and the radical is often
    the dominant cost at large n2.
    """
    m = X.n
    inst2 = FunctorInstance(X.functor, n2)
    new_vars = inst2.variables(X.tag)
    zvars = [[Variable("z", (i, j), 0) for j in range(1, n2 + 1)]
             for i in range(1, m + 1)]
    flat_z = tuple(v for row in zvars for v in row)
    big = RingContext(X.base_vars + tuple(new_vars) + flat_z, QQ)
    sub_ctx = RingContext(X.base_vars + tuple(new_vars), QQ)
    psi = [[big.var(zvars[i][j]) for j in range(n2)] for i in range(m)]
    mat = functor_map_matrix(X.functor, psi, n2, m, big.zero())
    old_inst = X.instance()
    var_at_2 = {key: big.var(v) for key, v in zip(inst2.coords, new_vars)}
    sub = {}
    for key, v in zip(old_inst.coords, X.inst_vars):
        acc = big.zero()
        for key2 in inst2.coords:
            c = mat.get((key, key2))
            if c is not None and not c.is_zero():
                acc = acc + c * var_at_2[key2]
        sub[v] = acc
    for bv in X.base_vars:
        sub[bv] = big.var(bv)
    zpos = [big.position(v) for v in flat_z]
    keep_pos = [i for i in range(big.nvars()) if i not in set(zpos)]
    coeff_gens = []
    seen = set()
    for f in X.gens:
        g = f.substitute(sub, big)
        groups: dict = {}
        for e, c in g.coeffs.items():
            zkey = tuple(e[i] for i in zpos)
            rest = tuple(e[i] for i in keep_pos)
            groups.setdefault(zkey, {})[rest] = c
        for zkey in sorted(groups):
            poly = Polynomial(sub_ctx, groups[zkey])
            fp = str(poly)
            if fp not in seen:
                seen.add(fp)
                coeff_gens.append(poly)
    if radicalize:
        coeff_gens = list(radical(sub_ctx, coeff_gens))
    return ClosedSubset(X.functor, n2, coeff_gens, X.base_vars, X.tag,
                        sub_ctx)


class Morphism:
    """Equivariant polynomial family B x P'(U) -> P(U).

    Stored as a coefficient vector over K[base] against the equivariant
    polynomial map basis; instances at any dimension are generated on
    demand.

    An optional constant part maps the base into a separate affine
    target: b_vars names the target's ambient coordinates and alpha0
    gives one polynomial over the base ring per coordinate.  Both
    default to empty (a point target base).
    """

    __slots__ = ("src", "tgt", "base_vars", "base_gens", "base_ctx",
                 "coeffs", "space", "b_vars", "alpha0")

    def __init__(self, src: PolyFunctor, tgt: PolyFunctor,
                 coeffs: Sequence[Polynomial],
                 base_vars: Sequence[Variable] = (),
                 base_gens: Iterable[Polynomial] = (),
                 b_vars: Sequence[Variable] = (),
                 alpha0: Sequence[Polynomial] = ()):
        self.src = src
        self.tgt = tgt
        self.base_vars = tuple(base_vars)
        self.base_ctx = RingContext(self.base_vars, QQ)
        self.space = PolyMapSpace(src, tgt)
        coeffs = list(coeffs)
        if len(coeffs) != self.space.dim:
            raise InputError(
                f"expected {self.space.dim} coefficients, got {len(coeffs)}")
        self.coeffs = tuple(
            c if isinstance(c, Polynomial) and c.ctx is self.base_ctx
            else self._coerce_coeff(c) for c in coeffs)
        self.base_gens = tuple(
            g if g.ctx is self.base_ctx else g.map_context(self.base_ctx)
            for g in base_gens)
        self.b_vars = tuple(b_vars)
        alpha0 = list(alpha0)
        if len(alpha0) != len(self.b_vars):
            raise InputError("one base-target polynomial per coordinate")
        self.alpha0 = tuple(self._coerce_coeff(p) for p in alpha0)

    def _coerce_coeff(self, c) -> Polynomial:
        if isinstance(c, Polynomial):
            return c.map_context(self.base_ctx)
        return self.base_ctx.const(Fraction(c))

    # -- instantiation -----------------------------------------------

    def instance_polys(self, n: int, src_tag: str = "x"):
        """(ctx, src vars, {target key: Polynomial in base+src vars})."""
        sinst = FunctorInstance(self.src, n)
        svars = sinst.variables(src_tag)
        ctx = RingContext(self.base_vars + tuple(svars), QQ)
        var_of = {key: ctx.var(v) for key, v in zip(sinst.coords, svars)}
        mono_cache: dict = {}

        def mono_poly(mono) -> Polynomial:
            got = mono_cache.get(mono)
            if got is None:
                got = ctx.one()
                for key in mono:
                    got = got * var_of[key]
                mono_cache[mono] = got
            return got

        tinst = FunctorInstance(self.tgt, n)
        out = {key: ctx.zero() for key in tinst.coords}
        mats = self.space.matrices_at(n)
        for c, mat in zip(self.coeffs, mats):
            if c.is_zero():
                continue
            cc = c.map_context(ctx)
            for (tkey, mono), q in mat.items():
                out[tkey] = out[tkey] + cc * mono_poly(mono).scale(q)
        return ctx, svars, out

    def image(self, n: int, tgt_tag: str = "y") -> ClosedSubset:
        """Closure of the image inside P(K^n)."""
        ctx, svars, polys = self.instance_polys(n)
        tinst = FunctorInstance(self.tgt, n)
        tvars = tinst.variables(tgt_tag)
        all_ctx = RingContext(ctx.variables + tuple(tvars), QQ)
        gens = [g.map_context(all_ctx) for g in self.base_gens]
        for key, tv in zip(tinst.coords, tvars):
            gens.append(all_ctx.var(tv) - polys[key].map_context(all_ctx))
        drop = self.base_vars + tuple(svars)
        rctx, egens = eliminate(all_ctx, gens, drop)
        out_ctx = RingContext(tuple(tvars), QQ)
        return ClosedSubset(self.tgt, n,
                            [g.map_context(out_ctx) for g in egens],
                            (), tgt_tag, out_ctx)

    def evaluate(self, n: int, src_point: dict, base_point: dict = None):
        """Target coordinates (Fractions) at a rational source point."""
        ctx, svars, polys = self.instance_polys(n)
        sub = {}
        for v in ctx.variables:
            src_map = base_point if v in self.base_vars else src_point
            if src_map is None or v not in src_map:
                raise InputError(f"point misses variable {v}")
            sub[v] = ctx.const(Fraction(src_map[v]))
        tinst = FunctorInstance(self.tgt, n)
        out = {}
        for key in tinst.coords:
            val = polys[key].substitute(sub, ctx)
            out[key] = val.constant_value()
        return out

    def __repr__(self):
        return f"Morphism({self.src!r} -> {self.tgt!r})"


def morphism_from_polys(src: PolyFunctor, tgt: PolyFunctor, polys: dict,
                        n: int, ctx: RingContext,
                        base_vars: Sequence[Variable] = (),
                        base_gens: Iterable[Polynomial] = (),
                        src_tag: str = "x",
                        modulo: Iterable[Polynomial] = ()) -> Morphism:
    """Recognize raw coordinate polynomials as a morphism.

    polys maps each target coordinate key to a Polynomial over
    base_vars + source instance variables (tagged src_tag) in ctx.
    Raises NotAMorphismError when the family is not equivariant.

    modulo: optional base-ring ideal generators; the equivariance residual
    only has to vanish modulo that ideal.  The recognized morphism then
    agrees with polys on the locus of the ideal rather than identically.
    """
    sinst = FunctorInstance(src, n)
    svars = sinst.variables(src_tag)
    key_of_var = {v: key for key, v in zip(sinst.coords, svars)}
    spos = {ctx.position(v): v for v in svars if ctx.has_variable(v)}
    base_ctx = RingContext(tuple(base_vars), QQ)
    bpos = [ctx.position(v) for v in base_vars]
    tinst = FunctorInstance(tgt, n)
    matrix: dict = {}
    for tkey in tinst.coords:
        p = polys.get(tkey)
        if p is None:
            continue
        p = p if p.ctx is ctx else p.map_context(ctx)
        for e, c in p.coeffs.items():
            mono = []
            for i, ei in enumerate(e):
                if not ei:
                    continue
                v = spos.get(i)
                if v is not None:
                    mono.extend([key_of_var[v]] * ei)
                elif i not in bpos:
                    raise NotAMorphismError(
                        f"variable {ctx.variables[i]} is neither a source "
                        f"coordinate nor a base variable")
            mono = tuple(sorted(mono))
            bexp = tuple(e[i] for i in bpos)
            entry = matrix.setdefault((tkey, mono), {})
            cur = entry.get(bexp)
            entry[bexp] = c if cur is None else base_ctx.field.add(cur, c)
    ring_matrix = {k: Polynomial(base_ctx, {e: c for e, c in v.items()
                                            if not base_ctx.field.is_zero(c)})
                   for k, v in matrix.items()}
    ring_matrix = {k: v for k, v in ring_matrix.items() if not v.is_zero()}
    space = PolyMapSpace(src, tgt)
    reduce_fn = None
    if modulo:
        mod_gb = groebner(base_ctx,
                          [g.map_context(base_ctx) for g in modulo])

        def reduce_fn(p):
            nf = normal_form(p, mod_gb)
            if nf.is_zero():
                return nf
            # vanishing on the locus is what matters, so residuals in
            # the radical count as zero even off a radical presentation
            if radical_membership(base_ctx, nf, mod_gb):
                return base_ctx.zero()
            return nf
    try:
        coeffs = space.expand(ring_matrix, n, base_ctx.zero(),
                              reduce=reduce_fn)
    except InputError as exc:
        raise NotAMorphismError(str(exc)) from None
    return Morphism(src, tgt, coeffs, base_vars, base_gens)
