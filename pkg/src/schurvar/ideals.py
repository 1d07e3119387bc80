"""Groebner machinery over Q and over fraction fields of quotient rings.

Reduced bases are canonical: monic, inter-reduced, sorted ascending by leading
monomial, so equal ideals in the same context produce identical tuples.  Over
Q, S-polynomial reduction runs fraction-free over integers with content
stripping; over generic coefficient fields it uses field arithmetic.

The pair loop is exposed incrementally (BuchbergerRun.step) because the
dovetailing scheduler charges budgets in single pair reductions.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd as _igcd, isqrt
from typing import Iterable, Optional

from .errors import (DecompositionIncompleteError, InputError,
                     UnsupportedAlgebraError)
from .rings import (QQ, BlockOrder, Polynomial, QuotientFractionField,
                    RingContext, Variable)


def _negkey(k):
    return tuple(-x if isinstance(x, int) else _negkey(x) for x in k)


# ---------------------------------------------------------------------------
# integer-cleared representation (QQ fast path)


def _poly_to_int(p: Polynomial) -> dict:
    den = 1
    for c in p.coeffs.values():
        den = den * c.denominator // _igcd(den, c.denominator)
    d = {e: int(c.numerator * (den // c.denominator))
         for e, c in p.coeffs.items()}
    return _strip_content(d)


def _strip_content(d: dict) -> dict:
    c = 0
    for v in d.values():
        c = _igcd(c, v)
        if c == 1:
            return d
    if c in (0, 1):
        return d
    return {e: v // c for e, v in d.items()}


def _int_to_poly(d: dict, ctx: RingContext, monic=True) -> Polynomial:
    if not d:
        return ctx.zero()
    if monic:
        lead = max(d, key=ctx.monomial_key)
        lc = d[lead]
        return Polynomial(ctx, {e: Fraction(v, lc) for e, v in d.items()})
    return Polynomial(ctx, {e: Fraction(v) for e, v in d.items()})


def _int_reduce(p: dict, reducers: list, ctx: RingContext):
    """Full fraction-free reduction.

    reducers: list of (lead_exp, lead_coeff, tail_items).
    Returns (normal_form_dict, multiplier) with multiplier * p == nf mod I.
    """
    work = dict(p)
    out: dict = {}
    mult = 1
    key = ctx.monomial_key
    heap = [(_negkey(key(e)), e) for e in work]
    heapq.heapify(heap)
    steps = 0
    while heap:
        _, e = heapq.heappop(heap)
        c = work.get(e)
        if not c:
            continue
        red = None
        for r in reducers:
            re = r[0]
            ok = True
            for a, b in zip(e, re):
                if a < b:
                    ok = False
                    break
            if ok:
                red = r
                break
        if red is None:
            out[e] = c
            del work[e]
            continue
        re, rc, rtail = red
        d = _igcd(c, rc)
        a = rc // d
        b = c // d
        if a != 1:
            for k2 in work:
                work[k2] *= a
            for k2 in out:
                out[k2] *= a
            mult *= a
        del work[e]
        shift = tuple(x - y for x, y in zip(e, re))
        for te, tc in rtail:
            ne = tuple(x + y for x, y in zip(te, shift))
            nv = work.get(ne, 0) - b * tc
            if nv:
                if ne not in work:
                    heapq.heappush(heap, (_negkey(key(ne)), ne))
                work[ne] = nv
            else:
                work.pop(ne, None)
        steps += 1
        if steps % 64 == 0 and (work or out):
            g = abs(mult)
            for v in work.values():
                g = _igcd(g, v)
                if g == 1:
                    break
            if g > 1:
                for v in out.values():
                    g = _igcd(g, v)
                    if g == 1:
                        break
            if g > 1:
                work = {k2: v // g for k2, v in work.items()}
                out = {k2: v // g for k2, v in out.items()}
                mult //= g
                heap = [(_negkey(key(k2)), k2) for k2 in work]
                heapq.heapify(heap)
    return out, mult


def _field_reduce(p: dict, reducers: list, ctx: RingContext):
    """Full reduction with field arithmetic; returns the normal form dict."""
    f = ctx.field
    work = dict(p)
    out: dict = {}
    key = ctx.monomial_key
    heap = [(_negkey(key(e)), e) for e in work]
    heapq.heapify(heap)
    while heap:
        _, e = heapq.heappop(heap)
        c = work.get(e)
        if c is None or f.is_zero(c):
            work.pop(e, None)
            continue
        red = None
        for r in reducers:
            re = r[0]
            ok = True
            for a, b in zip(e, re):
                if a < b:
                    ok = False
                    break
            if ok:
                red = r
                break
        if red is None:
            out[e] = c
            del work[e]
            continue
        re, rc, rtail = red
        factor = f.mul(c, f.invert(rc))
        del work[e]
        shift = tuple(x - y for x, y in zip(e, re))
        for te, tc in rtail:
            ne = tuple(x + y for x, y in zip(te, shift))
            delta = f.neg(f.mul(factor, tc))
            cur = work.get(ne)
            if cur is None:
                if not f.is_zero(delta):
                    heapq.heappush(heap, (_negkey(key(ne)), ne))
                    work[ne] = delta
            else:
                s = f.add(cur, delta)
                if f.is_zero(s):
                    del work[ne]
                else:
                    work[ne] = s
    return out


# ---------------------------------------------------------------------------
# the Buchberger engine


class BuchbergerRun:
    """Incremental Buchberger with coprime-lead and chain criteria.

    step(k) processes up to k S-pairs and reports completion; result() then
    yields the reduced basis.  A reduction to a nonzero constant short-cuts
    the whole run to the trivial ideal.
    """

    def __init__(self, ctx: RingContext, gens: Iterable[Polynomial],
                 pair_cap: Optional[int] = None):
        self.ctx = ctx
        self._int = ctx.field is QQ
        self._key = ctx.monomial_key
        self._G: list = []        # (lead_exp, lead_coeff, tail, full_dict)
        self._pairs: list = []    # heap of (lcm_key, i, j, lcm_exp)
        self._done: set = set()
        self.trivial = False
        self._result = None
        self.pairs_processed = 0
        self.pair_cap = pair_cap
        field = ctx.field
        seen = []
        for g in gens:
            if g.ctx is not ctx:
                raise InputError("generator context mismatch")
            if g.is_zero():
                continue
            if self._int:
                seen.append(_poly_to_int(g))
            else:
                seen.append({e: field.canon(c) for e, c in g.coeffs.items()
                             if not field.is_zero(field.canon(c))})
        seen.sort(key=lambda d: self._key(max(d, key=self._key)))
        for d in seen:
            if d:
                self._add(d)

    # internal ---------------------------------------------------------

    def _lead_of(self, d: dict):
        return max(d, key=self._key)

    def _add(self, d: dict):
        if not d:
            return
        lead = self._lead_of(d)
        if sum(lead) == 0:
            self.trivial = True
            self._pairs = []
            return
        lc = d[lead]
        tail = sorted(((e, c) for e, c in d.items() if e != lead),
                      key=lambda t: self._key(t[0]), reverse=True)
        t = len(self._G)
        self._G.append((lead, lc, tail, d))
        for i in range(t):
            li = self._G[i][0]
            lcm = tuple(max(a, b) for a, b in zip(li, lead))
            pair = (i, t)
            if lcm == tuple(a + b for a, b in zip(li, lead)):
                self._done.add(pair)  # coprime leads: S-poly reduces to zero
                continue
            heapq.heappush(self._pairs,
                           (self._key(lcm), i, t, lcm))

    def _chain_skip(self, i: int, j: int, lcm: tuple) -> bool:
        for k in range(len(self._G)):
            if k == i or k == j:
                continue
            lk = self._G[k][0]
            if all(a >= b for a, b in zip(lcm, lk)):
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 in self._done and p2 in self._done:
                    return True
        return False

    def _spoly(self, i: int, j: int, lcm: tuple) -> dict:
        li, ci, _, di = self._G[i]
        lj, cj, _, dj = self._G[j]
        si = tuple(a - b for a, b in zip(lcm, li))
        sj = tuple(a - b for a, b in zip(lcm, lj))
        f = self.ctx.field
        out: dict = {}
        if self._int:
            g = _igcd(ci, cj)
            mi, mj = cj // g, ci // g
            for e, c in di.items():
                ne = tuple(a + b for a, b in zip(e, si))
                out[ne] = out.get(ne, 0) + mi * c
            for e, c in dj.items():
                ne = tuple(a + b for a, b in zip(e, sj))
                v = out.get(ne, 0) - mj * c
                if v:
                    out[ne] = v
                else:
                    out.pop(ne, None)
            return _strip_content(out)
        inv_i = f.invert(ci)
        inv_j = f.invert(cj)
        for e, c in di.items():
            ne = tuple(a + b for a, b in zip(e, si))
            out[ne] = f.mul(c, inv_i)
        for e, c in dj.items():
            ne = tuple(a + b for a, b in zip(e, sj))
            cur = out.get(ne, f.zero())
            s = f.sub(cur, f.mul(c, inv_j))
            if f.is_zero(s):
                out.pop(ne, None)
            else:
                out[ne] = s
        return out

    def _reducers(self):
        return [(l, c, t) for (l, c, t, _) in self._G]

    # public ------------------------------------------------------------

    def done(self) -> bool:
        return self.trivial or not self._pairs

    def step(self, max_pairs: int = 1) -> bool:
        """Process up to max_pairs S-pairs; True when the run is complete."""
        n = 0
        while self._pairs and n < max_pairs and not self.trivial:
            _, i, j, lcm = heapq.heappop(self._pairs)
            pair = (i, j)
            if pair in self._done:
                continue
            self._done.add(pair)
            n += 1
            self.pairs_processed += 1
            if self.pair_cap is not None and self.pairs_processed > self.pair_cap:
                raise UnsupportedAlgebraError(
                    "Groebner pair budget exhausted")
            if self._chain_skip(i, j, lcm):
                continue
            s = self._spoly(i, j, lcm)
            if not s:
                continue
            if self._int:
                nf, _ = _int_reduce(s, self._reducers(), self.ctx)
                nf = _strip_content(nf)
            else:
                nf = _field_reduce(s, self._reducers(), self.ctx)
            if nf:
                self._add(nf)
        return self.done()

    def run(self) -> "BuchbergerRun":
        while not self.step(64):
            pass
        return self

    def result(self) -> tuple:
        if not self.done():
            raise InputError("Buchberger run not finished")
        if self._result is not None:
            return self._result
        ctx = self.ctx
        if self.trivial:
            self._result = (ctx.one(),)
            return self._result
        if not self._G:
            self._result = ()
            return self._result
        # minimalize: drop elements whose lead is divisible by another lead
        keep = []
        leads = [g[0] for g in self._G]
        for i, (li, ci, ti, di) in enumerate(self._G):
            redundant = False
            for j, lj in enumerate(leads):
                if i == j:
                    continue
                if all(a >= b for a, b in zip(li, lj)):
                    if li == lj and j > i:
                        continue
                    redundant = True
                    break
            if not redundant:
                keep.append(di)
        # inter-reduce tails
        reduced = []
        for idx, d in enumerate(keep):
            others = [(self._lead_of(o), o[self._lead_of(o)],
                       sorted(((e, c) for e, c in o.items()
                               if e != self._lead_of(o)),
                              key=lambda t: self._key(t[0]), reverse=True))
                      for k, o in enumerate(keep) if k != idx]
            if self._int:
                nf, _ = _int_reduce(d, others, ctx)
                nf = _strip_content(nf)
            else:
                nf = _field_reduce(d, others, ctx)
            if nf:
                reduced.append(nf)
        polys = []
        f = ctx.field
        for d in reduced:
            if self._int:
                polys.append(_int_to_poly(d, ctx))
            else:
                lead = self._lead_of(d)
                inv = f.invert(d[lead])
                polys.append(Polynomial(
                    ctx, {e: f.canon(f.mul(c, inv)) for e, c in d.items()}))
        polys.sort(key=lambda p: self._key(p.lead_exp()))
        if any(p.is_constant() for p in polys):
            polys = [ctx.one()]
        self._result = tuple(polys)
        return self._result


_GB_CACHE: dict = {}


def groebner(ctx: RingContext, gens: Iterable[Polynomial],
             pair_cap: Optional[int] = None) -> tuple:
    gens = tuple(gens)
    cache_key = None
    try:
        cache_key = (ctx.key, tuple(sorted(g.fingerprint() for g in gens)))
    except TypeError:
        cache_key = None
    if cache_key is not None and cache_key in _GB_CACHE:
        return _GB_CACHE[cache_key]
    run = BuchbergerRun(ctx, gens, pair_cap=pair_cap)
    run.run()
    result = run.result()
    if cache_key is not None:
        _GB_CACHE[cache_key] = result
    return result


def normal_form(p: Polynomial, gb: Iterable[Polynomial]) -> Polynomial:
    gb = [g for g in gb if not g.is_zero()]
    if p.is_zero() or not gb:
        return p
    ctx = p.ctx
    key = ctx.monomial_key
    if ctx.field is QQ:
        den = 1
        for c in p.coeffs.values():
            den = den * c.denominator // _igcd(den, c.denominator)
        d = {e: int(c.numerator * (den // c.denominator))
             for e, c in p.coeffs.items()}
        reducers = []
        for g in gb:
            gd = _poly_to_int(g)
            lead = max(gd, key=key)
            tail = sorted(((e, c) for e, c in gd.items() if e != lead),
                          key=lambda t: key(t[0]), reverse=True)
            reducers.append((lead, gd[lead], tail))
        reducers.sort(key=lambda r: key(r[0]))
        nf, mult = _int_reduce(d, reducers, ctx)
        scale = Fraction(1, den * mult)
        return Polynomial(ctx, {e: v * scale for e, v in nf.items()})
    f = ctx.field
    reducers = []
    for g in gb:
        lead = max(g.coeffs, key=key)
        tail = sorted(((e, c) for e, c in g.coeffs.items() if e != lead),
                      key=lambda t: key(t[0]), reverse=True)
        reducers.append((lead, g.coeffs[lead], tail))
    reducers.sort(key=lambda r: key(r[0]))
    nf = _field_reduce(dict(p.coeffs), reducers, ctx)
    return Polynomial(ctx, {e: f.canon(c) for e, c in nf.items()})


def is_trivial(ctx: RingContext, gens: Iterable[Polynomial]) -> bool:
    gb = groebner(ctx, gens)
    return len(gb) == 1 and gb[0].is_one()


def ideal_membership(p: Polynomial, gb: Iterable[Polynomial]) -> bool:
    return normal_form(p, gb).is_zero()


def ideal_equal(ctx: RingContext, ga, gb) -> bool:
    return groebner(ctx, ga) == groebner(ctx, gb)


# ---------------------------------------------------------------------------
# elimination, saturation, membership in radical, intersection

_FRESH = [0]


def _fresh_aux() -> Variable:
    _FRESH[0] += 1
    return Variable("t", (_FRESH[0],), 0)


def eliminate(ctx: RingContext, gens: Iterable[Polynomial],
              drop: Iterable[Variable]):
    """GB-based elimination.  Returns (restricted_ctx, generator tuple)."""
    drop = list(drop)
    keep = [v for v in ctx.variables if v not in set(drop)]
    rctx = RingContext(keep, ctx.field)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return rctx, ()
    ectx = ctx.elimination_order(drop)
    gb = groebner(ectx, [g.map_context(ectx) for g in gens])
    dropset = set(ctx.position(v) for v in drop)
    out = []
    for p in gb:
        if all(all(e[i] == 0 for i in dropset) for e in p.coeffs):
            out.append(p.map_context(rctx))
    return rctx, tuple(out)


def radical_membership(ctx: RingContext, p: Polynomial,
                       gens: Iterable[Polynomial]) -> bool:
    """p in rad(gens), by the extra-variable trick."""
    if p.is_zero():
        return True
    w = _fresh_aux()
    ectx = ctx.extended((w,))
    lifted = [g.map_context(ectx) for g in gens]
    lifted.append(ectx.one() - ectx.var(w) * p.map_context(ectx))
    return is_trivial(ectx, lifted)


def saturate(ctx: RingContext, gens: Iterable[Polynomial],
             h: Polynomial) -> tuple:
    """(gens) : h^infinity, via elimination of the inverse witness."""
    if h.is_zero():
        return groebner(ctx, gens)
    w = _fresh_aux()
    ectx = ctx.extended((w,))
    lifted = [g.map_context(ectx) for g in gens]
    lifted.append(ectx.one() - ectx.var(w) * h.map_context(ectx))
    _, elim = eliminate(ectx, lifted, [w])
    return tuple(p.map_context(ctx) for p in elim)


def intersect(ctx: RingContext, gens_a, gens_b) -> tuple:
    """Ideal intersection via the t-trick; no generators is the zero
    ideal, so either side empty forces a zero intersection."""
    gens_a = [g for g in gens_a if not g.is_zero()]
    gens_b = [g for g in gens_b if not g.is_zero()]
    if not gens_a or not gens_b:
        return ()
    t = _fresh_aux()
    ectx = ctx.extended((t,))
    tv = ectx.var(t)
    lifted = [tv * g.map_context(ectx) for g in gens_a]
    lifted += [(ectx.one() - tv) * g.map_context(ectx) for g in gens_b]
    _, elim = eliminate(ectx, lifted, [t])
    return tuple(p.map_context(ctx) for p in elim)


# ---------------------------------------------------------------------------
# division, gcd, squarefree parts (over QQ contexts)


def poly_divmod(f: Polynomial, g: Polynomial):
    """Division by a single polynomial; returns (quotient, remainder)."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ctx = f.ctx
    fld = ctx.field
    q = ctx.zero()
    r = f
    glead, gc = g.lead()
    ginv = fld.invert(gc)
    while not r.is_zero():
        rlead, rc = r.lead()
        if all(a >= b for a, b in zip(rlead, glead)):
            shift = tuple(a - b for a, b in zip(rlead, glead))
            coeff = fld.mul(rc, ginv)
            mono = ctx.monomial(shift, coeff)
            q = q + mono
            r = r - mono * g
        else:
            break
    # remainder may still have reducible lower terms; full reduction:
    if not r.is_zero():
        rest = normal_form(r, [g])
        q = q + _exact_quotient_of_difference(r - rest, g)
        r = rest
    return q, r


def _exact_quotient_of_difference(d: Polynomial, g: Polynomial) -> Polynomial:
    """d known to be divisible by g."""
    ctx = d.ctx
    fld = ctx.field
    q = ctx.zero()
    glead, gc = g.lead()
    ginv = fld.invert(gc)
    while not d.is_zero():
        dlead, dc = d.lead()
        shift = tuple(a - b for a, b in zip(dlead, glead))
        if any(s < 0 for s in shift):
            raise InputError("exact division failed")
        mono = ctx.monomial(shift, fld.mul(dc, ginv))
        q = q + mono
        d = d - mono * g
    return q


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    q, r = poly_divmod(f, g)
    if not r.is_zero():
        raise InputError("exact division with nonzero remainder")
    return q


def poly_lcm(f: Polynomial, g: Polynomial) -> Polynomial:
    """lcm of two polynomials over QQ, via (f) meet (g)."""
    ctx = f.ctx
    meet = intersect(ctx, [f], [g])
    if len(meet) != 1:
        raise UnsupportedAlgebraError("lcm: intersection not principal")
    return meet[0]


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    ctx = f.ctx
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    l = poly_lcm(f, g)
    d = exact_div(f * g, l)
    lead_c = d.lead_coeff()
    return d.scale(1 / lead_c)


def squarefree_part(f: Polynomial) -> Polynomial:
    """f divided by gcd(f, all partials); monic; over QQ contexts."""
    if f.is_zero() or f.is_constant():
        return f
    g = f
    for v in sorted(f.variables_present()):
        if g.is_constant():
            break
        d = f.partial(v)
        if not d.is_zero():
            g = poly_gcd(g, d)
    if g.is_constant():
        out = f
    else:
        out = exact_div(f, g)
    return out.scale(1 / out.lead_coeff())


def poly_square_root(p: Polynomial) -> Optional[Polynomial]:
    """Exact square root if p is a perfect square, else None."""
    if p.is_zero():
        return p
    ctx = p.ctx
    lead, lc = p.lead()
    if any(e % 2 for e in lead):
        return None
    if isinstance(lc, Fraction):
        num, den = lc.numerator, lc.denominator
        if num < 0:
            return None
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            return None
        slc = Fraction(rn, rd)
    else:
        return None
    s = ctx.monomial(tuple(e // 2 for e in lead), slc)
    rem = p - s * s
    twice_lead = ctx.monomial(tuple(e // 2 for e in lead), 2 * slc)
    while not rem.is_zero():
        rlead, rc = rem.lead()
        shift = tuple(a - b for a, b in zip(rlead, tuple(e // 2 for e in lead)))
        if any(x < 0 for x in shift):
            return None
        term = ctx.monomial(shift, rc / (2 * slc))
        s = s + term
        rem = p - s * s
        if rem.is_zero():
            break
        if ctx.monomial_key(rem.lead_exp()) >= ctx.monomial_key(rlead):
            return None
    return s


# ---------------------------------------------------------------------------
# univariate helpers on scalar coefficient lists


def _poly_to_unilist(p: Polynomial, v: Variable) -> list:
    """Coefficient list (ascending) of a polynomial univariate in v."""
    ctx = p.ctx
    i = ctx.position(v)
    deg = max((e[i] for e in p.coeffs), default=0)
    f = ctx.field
    out = [f.zero()] * (deg + 1)
    for e, c in p.coeffs.items():
        if any(x and k != i for k, x in enumerate(e)):
            raise InputError("not univariate")
        out[e[i]] = c
    return out


def _unilist_to_poly(coeffs: list, v: Variable, ctx: RingContext) -> Polynomial:
    i = ctx.position(v)
    f = ctx.field
    d = {}
    for k, c in enumerate(coeffs):
        if not f.is_zero(c):
            e = [0] * ctx.nvars()
            e[i] = k
            d[tuple(e)] = c
    return Polynomial(ctx, d)


def _uni_trim(a: list, f) -> list:
    while a and f.is_zero(a[-1]):
        a.pop()
    return a


def _uni_monic(a: list, f) -> list:
    if not a:
        return a
    inv = f.invert(a[-1])
    return [f.canon(f.mul(c, inv)) for c in a]


def _uni_divmod(a: list, b: list, f):
    a = list(a)
    if not b:
        raise ZeroDivisionError
    q = [f.zero()] * max(0, len(a) - len(b) + 1)
    inv = f.invert(b[-1])
    while len(a) >= len(b):
        c = f.mul(a[-1], inv)
        k = len(a) - len(b)
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] = f.sub(a[k + i], f.mul(c, bc))
        _uni_trim(a, f)
        if not a:
            break
    return q, a


def _uni_gcd(a: list, b: list, f) -> list:
    a = _uni_trim(list(a), f)
    b = _uni_trim(list(b), f)
    while b:
        _, r = _uni_divmod(a, b, f)
        a, b = b, r
    return _uni_monic(a, f)


def _uni_derivative(a: list, f) -> list:
    out = [f.mul(c, f.from_fraction(k)) for k, c in enumerate(a)][1:]
    return _uni_trim(out, f)


def _uni_squarefree(a: list, f) -> list:
    if len(a) <= 2:
        return _uni_monic(list(a), f)
    d = _uni_derivative(a, f)
    g = _uni_gcd(a, d, f)
    if len(g) == 1:
        return _uni_monic(list(a), f)
    q, r = _uni_divmod(list(a), g, f)
    if r:
        raise InputError("squarefree division failed")
    return _uni_monic(q, f)


def _uni_rational_roots(a: list) -> list:
    """Rational roots of an integer-cleared coefficient list over Q."""
    den = 1
    for c in a:
        den = den * c.denominator // _igcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    while ints and ints[0] == 0:
        ints = ints[1:]
    roots = []
    if len(ints) < len(a):
        roots.append(Fraction(0))
    if len(ints) <= 1:
        return roots
    c0, cn = abs(ints[0]), abs(ints[-1])

    def divisors(n):
        out = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                out.append(i)
                out.append(n // i)
            i += 1
        return sorted(set(out))

    for p in divisors(c0):
        for q in divisors(cn):
            for sign in (1, -1):
                cand = Fraction(sign * p, q)
                val = Fraction(0)
                for c in reversed(ints):
                    val = val * cand + c
                if val == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)


# ---------------------------------------------------------------------------
# dimension, zero-dimensionality, minimal polynomials


def _lead_exponents(gb) -> list:
    return [g.lead_exp() for g in gb]


def is_zero_dimensional(ctx: RingContext, gb) -> bool:
    if len(gb) == 1 and gb[0].is_one():
        return True
    leads = _lead_exponents(gb)
    for i in range(ctx.nvars()):
        if not any(e[i] > 0 and all(x == 0 for k, x in enumerate(e) if k != i)
                   for e in leads):
            return False
    return True


def max_independent_set(ctx: RingContext, gb) -> tuple:
    """Maximum-cardinality variable set S with LT(I) meeting K[S] trivially.

    Deterministic: among maximum sets, the lexicographically first in
    variable order.  |S| is the ideal's dimension (Kredel-Weispfenning).
    """
    if len(gb) == 1 and gb[0].is_one():
        return ()
    n = ctx.nvars()
    leads = [g.lead_exp() for g in gb]
    supports = [frozenset(i for i in range(n) if e[i]) for e in leads]
    best: list = []

    def search(i: int, chosen: tuple):
        nonlocal best
        if len(chosen) + (n - i) <= len(best):
            return
        if i == n:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        cand = chosen + (i,)
        candset = set(cand)
        if not any(s <= candset for s in supports):
            search(i + 1, cand)
        search(i + 1, chosen)

    search(0, ())
    return tuple(ctx.variables[i] for i in best)


def ideal_dimension(ctx: RingContext, gens) -> int:
    gb = groebner(ctx, gens)
    if len(gb) == 1 and gb[0].is_one():
        return -1
    return len(max_independent_set(ctx, gb))


def minimal_polynomial(ctx: RingContext, gb, v: Variable) -> list:
    """Monic minimal polynomial of v modulo a zero-dimensional ideal,
    as an ascending scalar coefficient list.  Linear algebra on normal
    forms of successive powers."""
    f = ctx.field
    key = ctx.monomial_key
    rows: list = []   # echelon rows: (pivot_exp, dict, expression list)
    power = ctx.one()
    k = 0
    while True:
        nf = normal_form(power, gb)
        vec = dict(nf.coeffs)
        expr = [f.zero()] * (k + 1)
        expr[k] = f.one()
        for pivot, rowvec, rowexpr in rows:
            c = vec.get(pivot)
            if c is None or f.is_zero(c):
                continue
            for e2, c2 in rowvec.items():
                cur = vec.get(e2, f.zero())
                s = f.sub(cur, f.mul(c, c2))
                if f.is_zero(s):
                    vec.pop(e2, None)
                else:
                    vec[e2] = s
            for idx, c2 in enumerate(rowexpr):
                if idx < len(expr):
                    expr[idx] = f.sub(expr[idx], f.mul(c, c2))
                else:
                    expr.append(f.neg(f.mul(c, c2)))
        vec = {e: c for e, c in vec.items() if not f.is_zero(c)}
        if not vec:
            return _uni_monic(_uni_trim(expr, f), f)
        pivot = max(vec, key=key)
        inv = f.invert(vec[pivot])
        vec = {e: f.canon(f.mul(c, inv)) for e, c in vec.items()}
        expr = [f.canon(f.mul(c, inv)) for c in expr]
        rows.append((pivot, vec, expr))
        power = nf * ctx.var(v)
        k += 1
        if k > 4096:
            raise UnsupportedAlgebraError("minimal polynomial degree blow-up")
