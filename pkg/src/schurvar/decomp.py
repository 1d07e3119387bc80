"""Radicals and restricted prime decomposition.

Radical tiers, tried in order:
  * squarefree leading-term ideal  -> already radical, return as is
  * principal                      -> squarefree part
  * zero-dimensional               -> adjoin squarefree parts of the
                                      minimal polynomial of each variable
  * positive-dimensional           -> localize at a maximum independent
                                      set, recurse zero-dimensionally over
                                      the function field, contract, and
                                      recurse on the discarded locus

The decomposition splits only along structure it can certify: monomial
content, univariate factors with rational roots, quadratic factors, and
perfect-square discriminants.  Components whose primality cannot be
certified raise DecompositionIncompleteError unless explicitly asserted.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional

from .errors import DecompositionIncompleteError, UnsupportedAlgebraError
from .ideals import (eliminate, exact_div, groebner, ideal_equal,
                     ideal_membership, intersect, is_trivial,
                     is_zero_dimensional, max_independent_set,
                     minimal_polynomial, normal_form, poly_gcd,
                     poly_square_root, radical_membership, saturate,
                     squarefree_part, _uni_rational_roots, _uni_squarefree,
                     _unilist_to_poly, _poly_to_unilist)
from .rings import (QQ, Polynomial, QuotientFractionField, QuotFrac,
                    RingContext)


# ---------------------------------------------------------------------------
# radical


def _leads_squarefree(gb) -> bool:
    return all(all(e <= 1 for e in g.lead_exp()) for g in gb)


def radical(ctx: RingContext, gens: Iterable[Polynomial],
            depth: int = 0) -> tuple:
    """Reduced basis of the radical."""
    gens = list(gens)
    if ctx.field is QQ:
        # variables pinned linearly by a generator split off as a ring
        # isomorphism, which the radical passes through untouched; the
        # general machinery then runs in fewer variables
        pins, rest = _presolve_linear(ctx, gens)
        if pins:
            keep = tuple(v for v in ctx.variables if v not in
                         {p for p, _ in pins})
            out = [g for _, g in pins]
            if keep:
                rctx = RingContext(keep, ctx.field)
                sub_rad = radical(rctx,
                                  [g.map_context(rctx) for g in rest],
                                  depth)
                out += [p.map_context(ctx) for p in sub_rad]
            return groebner(ctx, out)
    gb = groebner(ctx, gens)
    return radical_of_groebner(ctx, gb, depth)


def _presolve_linear(ctx: RingContext, gens: list):
    """Repeatedly solve generators of the form c*v + r with v absent
    from r for v, substituting v out of the rest.  Returns the list of
    (variable, solving generator) pairs and the reduced system."""
    work = [g for g in gens if not g.is_zero()]
    pins = []
    pinned: set = set()
    changed = True
    while changed:
        changed = False
        for gi, g in enumerate(work):
            hit = None
            for e, c in g.coeffs.items():
                if sum(e) != 1:
                    continue
                i = e.index(1)
                if any(ee is not e and ee[i] for ee in g.coeffs):
                    continue
                hit = (i, c)
                break
            if hit is None:
                continue
            i, c = hit
            v = ctx.variables[i]
            expr = (g - ctx.var(v).scale(c)).scale(-1 / c)
            sub = {v: expr}
            work = [w.substitute(sub, ctx) for w in work]
            work = [w for w in work if not w.is_zero()]
            pins.append((v, g))
            pinned.add(v)
            changed = True
            break
    return pins, work


def radical_of_groebner(ctx: RingContext, gb: tuple, depth: int = 0) -> tuple:
    # each level strictly enlarges the ideal, so the chain is finite;
    # the cap only guards against pathological blowup
    if depth > 48:
        raise UnsupportedAlgebraError("radical recursion too deep")
    if not gb:
        return gb
    if len(gb) == 1 and gb[0].is_one():
        return gb
    if _leads_squarefree(gb):
        # squarefree initial ideal forces the ideal radical
        return gb
    if len(gb) == 1 and ctx.field is QQ:
        return groebner(ctx, [squarefree_part(gb[0])])
    if is_zero_dimensional(ctx, gb):
        return _zero_dim_radical(ctx, gb)
    if ctx.field is not QQ:
        raise UnsupportedAlgebraError(
            "positive-dimensional radical over a nontrivial field")
    return _independent_set_radical(ctx, gb, depth)


def _zero_dim_radical(ctx: RingContext, gb: tuple) -> tuple:
    f = ctx.field
    extra = []
    for v in ctx.variables:
        mp = minimal_polynomial(ctx, gb, v)
        sq = _uni_squarefree(mp, f)
        if len(sq) < len(mp):
            extra.append(_unilist_to_poly(sq, v, ctx))
    if not extra:
        return gb
    return groebner(ctx, list(gb) + extra)


def _to_function_field(ctx: RingContext, indep: tuple):
    """Split ctx into K(indep)[rest]; returns (rest_ctx, converter)."""
    base_ctx = RingContext(indep, QQ)
    field = QuotientFractionField(base_ctx, ())
    rest = [v for v in ctx.variables if v not in set(indep)]
    rest_ctx = RingContext(rest, field)
    ipos = [ctx.position(v) for v in indep]
    rpos = [ctx.position(v) for v in rest]

    def conv(p: Polynomial) -> Polynomial:
        acc: dict = {}
        for e, c in p.coeffs.items():
            re = tuple(e[i] for i in rpos)
            be = tuple(e[i] for i in ipos)
            cur = acc.setdefault(re, {})
            cur[be] = cur.get(be, Fraction(0)) + c
        out = {}
        for re, num in acc.items():
            num = {k: v for k, v in num.items() if v}
            if not num:
                continue
            scal = field.canon(QuotFrac(Polynomial(base_ctx, num),
                                        base_ctx.one()))
            if not field.is_zero(scal):
                out[re] = scal
        return Polynomial(rest_ctx, out)

    return base_ctx, rest_ctx, conv


def _clear_scalar_denominators(p: Polynomial, ctx: RingContext,
                               base_ctx: RingContext):
    """Map K(S)[rest] poly back to K[all]; also return the factors cleared."""
    dens = []
    for c in p.coeffs.values():
        dens.append(c.den)
    common = base_ctx.one()
    for d in dens:
        if not d.is_constant():
            # keep a common multiple: multiply unless d already divides it
            if not ideal_membership(common, [d]):
                common = common * d
    nvars = ctx.nvars()
    rpos = {v: ctx.position(v) for v in p.ctx.variables}
    bpos = {v: ctx.position(v) for v in base_ctx.variables}
    out: dict = {}
    for e, c in p.coeffs.items():
        num = c.num * exact_div(common, c.den)
        for be, bc in num.coeffs.items():
            full = [0] * nvars
            for v, i in rpos.items():
                full[i] = e[p.ctx.position(v)]
            for v, i in bpos.items():
                full[i] += be[base_ctx.position(v)]
            key = tuple(full)
            out[key] = out.get(key, Fraction(0)) + bc
    cleared = Polynomial(ctx, {e: c for e, c in out.items() if c})
    return cleared, common


def _embed_base(p: Polynomial, base_ctx: RingContext,
                ctx: RingContext) -> Polynomial:
    out = {}
    nvars = ctx.nvars()
    for e, c in p.coeffs.items():
        full = [0] * nvars
        for v in base_ctx.variables:
            full[ctx.position(v)] = e[base_ctx.position(v)]
        out[tuple(full)] = c
    return Polynomial(ctx, out)


def _independent_set_radical(ctx: RingContext, gb: tuple,
                             depth: int) -> tuple:
    indep = max_independent_set(ctx, gb)
    if not indep:
        return _zero_dim_radical(ctx, gb)
    base_ctx, rest_ctx, conv = _to_function_field(ctx, indep)
    # a basis in the product order (rest block first) stays a basis after
    # extending scalars, and its lead coefficients live in K[indep];
    # those coefficients cut out the locus the localization discards
    bctx = ctx.elimination_order(
        [v for v in ctx.variables if v not in set(indep)])
    block_gb = groebner(bctx, [g.map_context(bctx) for g in gb])
    loc_gens = [conv(g.map_context(ctx)) for g in block_gb]
    h = base_ctx.one()

    def absorb(q: Polynomial):
        nonlocal h
        if q.is_constant():
            return
        # squarefree product keeps the vanishing locus and stays small
        h = squarefree_part(h * q)

    for p in loc_gens:
        lc = p.lead_coeff()
        absorb(lc.num)
        absorb(lc.den)
    loc_gb = groebner(rest_ctx, loc_gens)
    if not is_zero_dimensional(rest_ctx, loc_gb):
        raise UnsupportedAlgebraError(
            "independent set failed to reach dimension zero")
    loc_rad = _zero_dim_radical(rest_ctx, loc_gb)
    cleared = []
    for p in loc_rad:
        cp, common = _clear_scalar_denominators(p, ctx, base_ctx)
        absorb(common)
        lc = p.lead_coeff()
        absorb(lc.num)
        absorb(lc.den)
        cleared.append(cp)
    h_full = _embed_base(h, base_ctx, ctx)
    contraction = saturate(ctx, cleared, h_full)
    if h_full.is_constant():
        return groebner(ctx, contraction)
    rest_branch = radical(ctx, list(gb) + [h_full], depth + 1)
    return groebner(ctx, intersect(ctx, contraction, rest_branch))


# ---------------------------------------------------------------------------
# restricted decomposition into certified-prime components


class Component:
    """A variety component: reduced basis plus a primality certificate."""

    __slots__ = ("ctx", "gb", "prime", "how")

    def __init__(self, ctx, gb, prime: bool, how: str):
        self.ctx = ctx
        self.gb = gb
        self.prime = prime
        self.how = how

    def fingerprint(self):
        return tuple(g.fingerprint() for g in self.gb)


def _monomial_content_split(ctx, g: Polynomial) -> Optional[list]:
    """g = m * rest with m a nontrivial monomial: split factors."""
    exps = list(g.coeffs)
    mins = [min(e[i] for e in exps) for i in range(ctx.nvars())]
    if not any(mins):
        return None
    factors = [ctx.var(v) for i, v in enumerate(ctx.variables) if mins[i]]
    rest = Polynomial(ctx, {tuple(a - b for a, b in zip(e, mins)): c
                            for e, c in g.coeffs.items()})
    if not rest.is_constant():
        factors.append(rest)
    return factors


def _univariate_split(ctx, g: Polynomial) -> Optional[list]:
    vs = g.variables_present()
    if len(vs) != 1:
        return None
    v = next(iter(vs))
    coeffs = _poly_to_unilist(g, v)
    roots = _uni_rational_roots(coeffs)
    factors = []
    rem = g
    for r in roots:
        lin = ctx.var(v) - ctx.const(Fraction(r))
        while True:
            try:
                rem2 = exact_div(rem, lin)
            except Exception:
                break
            if lin not in [f for f in factors]:
                factors.append(lin)
            rem = rem2
            if rem.is_constant():
                break
            if not _has_root(rem, v, r):
                break
    if not factors:
        return None
    if not rem.is_constant():
        factors.append(rem)
    seen = []
    for f in factors:
        if all(f.fingerprint() != s.fingerprint() for s in seen):
            seen.append(f)
    return seen if len(seen) > 1 or not rem.is_constant() else None


def _binary_dehomog(ctx, g: Polynomial) -> Optional[list]:
    """Coefficient list of g(z, 1) for a form in two variables, or None
    when either variable divides g (monomial content covers that)."""
    if not _is_homogeneous(g):
        return None
    vs = sorted(g.variables_present())
    if len(vs) != 2:
        return None
    iu = ctx.position(vs[0])
    d = g.total_degree()
    coeffs = [Fraction(0)] * (d + 1)
    for e, c in g.coeffs.items():
        coeffs[e[iu]] += c
    if coeffs[0] == 0 or coeffs[d] == 0:
        return None
    return coeffs


def _binary_form_split(ctx, g: Polynomial) -> Optional[list]:
    """Peel rational-root linear factors off a form in two variables."""
    if ctx.field is not QQ:
        return None
    coeffs = _binary_dehomog(ctx, g)
    if coeffs is None:
        return None
    u, v = sorted(g.variables_present())
    roots = _uni_rational_roots(coeffs)
    if not roots:
        return None
    factors = []
    rem = g
    for r in roots:
        lin = ctx.var(u) - ctx.var(v).scale(Fraction(r))
        while not rem.is_constant():
            try:
                rem = exact_div(rem, lin)
            except Exception:
                break
            if all(lin.fingerprint() != f.fingerprint() for f in factors):
                factors.append(lin)
    if not factors:
        return None
    if not rem.is_constant():
        factors.append(rem)
    return factors if len(factors) > 1 else None


def _has_root(p: Polynomial, v, r) -> bool:
    coeffs = _poly_to_unilist(p, v)
    val = Fraction(0)
    for c in reversed(coeffs):
        val = val * Fraction(r) + c
    return val == 0


def _gram_matrix(ctx, g: Polynomial):
    """Symmetric coefficient matrix of a homogeneous quadratic."""
    n = ctx.nvars()
    A = [[Fraction(0)] * n for _ in range(n)]
    for e, c in g.coeffs.items():
        idx = [i for i in range(n) for _ in range(e[i])]
        if len(idx) != 2:
            return None
        i, j = idx
        if i == j:
            A[i][i] = c
        else:
            A[i][j] += c / 2
            A[j][i] += c / 2
    return A


def _matrix_rank(A) -> int:
    A = [row[:] for row in A]
    n = len(A)
    rank = 0
    col = 0
    for col in range(n):
        piv = None
        for r in range(rank, n):
            if A[r][col]:
                piv = r
                break
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        pv = A[rank][col]
        for r in range(n):
            if r != rank and A[r][col]:
                f = A[r][col] / pv
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def _quadratic_split(ctx, g: Polynomial) -> Optional[list]:
    """Factor a homogeneous quadratic of rank <= 2 over Q if possible."""
    if g.total_degree() != 2 or not _is_homogeneous(g):
        return None
    A = _gram_matrix(ctx, g)
    if A is None:
        return None
    rank = _matrix_rank(A)
    if rank >= 3:
        return None  # irreducible, certified elsewhere
    vs = sorted(g.variables_present())
    u = vs[0]
    a = _coeff_in(g, u, 2)
    b = _coeff_in(g, u, 1)
    c0 = _coeff_in(g, u, 0)
    if a.is_zero():
        # no u^2 term: g = u*b + c0; with rank<=2 try content-style split
        if c0.is_zero():
            return [ctx.var(u), b]
        return None
    if not a.is_constant():
        return None
    av = a.constant_value()
    disc = b * b - (4 * av) * c0
    root = poly_square_root(disc)
    if root is None:
        return None
    two_a = Fraction(2) * av
    f1 = ctx.var(u).scale(two_a) + b - root
    f2 = ctx.var(u).scale(two_a) + b + root
    return [f1.scale(1 / f1.lead_coeff()), f2.scale(1 / f2.lead_coeff())]


def _is_homogeneous(g: Polynomial) -> bool:
    degs = {sum(e) for e in g.coeffs}
    return len(degs) == 1


def _coeff_in(g: Polynomial, v, k: int) -> Polynomial:
    ctx = g.ctx
    i = ctx.position(v)
    out = {}
    for e, c in g.coeffs.items():
        if e[i] == k:
            e2 = list(e)
            e2[i] = 0
            out[tuple(e2)] = c
    return Polynomial(ctx, out)


def _find_split(ctx, gb) -> Optional[list]:
    """Find a factorization g = f1*...*fk of some basis element."""
    for g in gb:
        fs = _monomial_content_split(ctx, g)
        if fs and len(fs) > 1:
            return fs
        sq = squarefree_part(g) if ctx.field is QQ else g
        if ctx.field is QQ and sq.total_degree() < g.total_degree():
            # replace by squarefree part: not a split but a reduction
            return [("reduce", g, sq)]
        fs = _univariate_split(ctx, g)
        if fs and len(fs) > 1:
            return fs
        fs = _quadratic_split(ctx, g)
        if fs and len(fs) > 1:
            return fs
        fs = _variable_linear_split(ctx, g)
        if fs and len(fs) > 1:
            return fs
    return None


def _variable_linear_split(ctx, g: Polynomial) -> Optional[list]:
    """g of degree 1 in v with gcd(coeff, rest) nonconstant splits."""
    if ctx.field is not QQ:
        return None
    for v in sorted(g.variables_present()):
        if g.degree_in(v) != 1:
            continue
        a = _coeff_in(g, v, 1)
        c = _coeff_in(g, v, 0)
        if c.is_zero():
            if a.is_constant():
                continue
            return [ctx.var(v), a]
        d = poly_gcd(a, c)
        if not d.is_constant():
            rest = exact_div(g, d)
            return [d, rest]
    return None


# primality certificates ----------------------------------------------------


def _substitute_reduce(ctx, gb):
    """Repeatedly solve generators linear in a variable with constant
    coefficient and substitute; primality is invariant under this."""
    gens = list(gb)
    cur_ctx = ctx
    changed = True
    while changed:
        changed = False
        for g in list(gens):
            for v in sorted(g.variables_present()):
                if g.degree_in(v) != 1:
                    continue
                a = _coeff_in(g, v, 1)
                if not a.is_constant():
                    continue
                c = _coeff_in(g, v, 0)
                av = a.constant_value()
                rep = c.scale(Fraction(-1) / av) if ctx.field is QQ \
                    else c.scale(cur_ctx.field.neg(cur_ctx.field.invert(av)))
                keep = [w for w in cur_ctx.variables if w != v]
                new_ctx = RingContext(keep, cur_ctx.field)
                rep2 = rep.map_context(new_ctx)
                new_gens = []
                for o in gens:
                    if o is g:
                        continue
                    sub = o.substitute({v: rep2}, new_ctx)
                    if not sub.is_zero():
                        new_gens.append(sub)
                gens = new_gens
                cur_ctx = new_ctx
                changed = True
                break
            if changed:
                break
    return cur_ctx, gens


def _certify_prime(ctx, gb) -> Optional[str]:
    """Return a certificate tag if the (radical) ideal is provably prime."""
    if not gb:
        return "zero-ideal"
    if len(gb) == 1 and gb[0].is_one():
        return None  # empty variety, dropped by caller
    rctx, rgens = _substitute_reduce(ctx, gb)
    if not rgens:
        return "linear"
    rgb = groebner(rctx, rgens)
    if not rgb:
        return "linear"
    if len(rgb) == 1 and rgb[0].is_one():
        return None
    if len(rgb) == 1:
        if _certify_irreducible(rctx, rgb[0]):
            return "principal-irreducible"
        return None
    # localization shape: one generator A*v + c with c a nonzero constant,
    # v absent elsewhere, remaining generators prime
    for idx, g in enumerate(rgb):
        for v in sorted(g.variables_present()):
            if g.degree_in(v) != 1:
                continue
            others = [o for k, o in enumerate(rgb) if k != idx]
            if any(v in o.variables_present() for o in others):
                continue
            a = _coeff_in(g, v, 1)
            c = _coeff_in(g, v, 0)
            if v in a.variables_present() or not c.is_constant() \
                    or c.is_zero():
                continue
            sub_ctx = RingContext(
                [w for w in rctx.variables if w != v], rctx.field)
            try:
                others_m = [o.map_context(sub_ctx) for o in others]
            except Exception:
                continue
            tag = _certify_prime(sub_ctx, groebner(sub_ctx, others_m))
            if tag is None:
                continue
            a_m = a.map_context(sub_ctx)
            if radical_membership(sub_ctx, a_m, others_m):
                continue
            return "localization+" + tag
    return None


def _certify_irreducible(ctx, g: Polynomial) -> bool:
    if g.is_constant():
        return False
    if g.total_degree() == 1:
        return True
    vs = sorted(g.variables_present())
    if len(vs) == 1:
        v = vs[0]
        coeffs = _poly_to_unilist(g, v)
        deg = len(coeffs) - 1
        if _uni_rational_roots(coeffs):
            return False
        if deg <= 3:
            return True
        return False
    if ctx.field is QQ and g.total_degree() == 2 and _is_homogeneous(g):
        A = _gram_matrix(ctx, g)
        if A is not None:
            rank = _matrix_rank(A)
            if rank >= 3:
                return True
            if rank <= 1:
                return False
            return _quadratic_split(ctx, g) is None
    # degree 1 in some variable with coprime coefficient and remainder
    for v in vs:
        if g.degree_in(v) == 1:
            a = _coeff_in(g, v, 1)
            c = _coeff_in(g, v, 0)
            if c.is_zero():
                return False
            if ctx.field is QQ and poly_gcd(a, c).is_constant():
                return True
    # quadratic in some variable with constant top coefficient
    for v in vs:
        if g.degree_in(v) == 2:
            a = _coeff_in(g, v, 2)
            if not a.is_constant() or a.is_zero():
                continue
            b = _coeff_in(g, v, 1)
            c = _coeff_in(g, v, 0)
            disc = b * b - (4 * a.constant_value()) * c
            if poly_square_root(disc) is None:
                return True
            return False
    return False


def decompose_restricted(ctx: RingContext, gens,
                         asserted_prime=(),
                         assume_radical=False) -> list:
    """Split a variety into certified-prime components.

    asserted_prime: iterable of basis fingerprints the caller vouches for.
    Raises DecompositionIncompleteError when a component resists both
    splitting and certification.
    """
    asserted = set(asserted_prime)
    start = groebner(ctx, gens)
    if not assume_radical:
        start = radical_of_groebner(ctx, start)
    work = [start]
    out: list = []
    seen = set()
    rounds = 0
    while work:
        rounds += 1
        if rounds > 512:
            raise UnsupportedAlgebraError("decomposition loop budget")
        gb = work.pop()
        if len(gb) == 1 and gb[0].is_one():
            continue
        fp = tuple(g.fingerprint() for g in gb)
        if fp in seen:
            continue
        seen.add(fp)
        split = _find_split(ctx, gb)
        if split is not None:
            if len(split) == 1 and isinstance(split[0], tuple) \
                    and split[0][0] == "reduce":
                _, old, new = split[0]
                repl = [new if g is old else g for g in gb]
                work.append(radical_of_groebner(ctx, groebner(ctx, repl)))
                continue
            for f in split:
                nxt = groebner(ctx, list(gb) + [f])
                work.append(radical_of_groebner(ctx, nxt))
            continue
        tag = _certify_prime(ctx, gb)
        if tag is None:
            if fp in asserted:
                tag = "asserted"
            else:
                raise DecompositionIncompleteError(
                    "cannot certify primality of a component: "
                    + "; ".join(str(g) for g in gb[:4]))
        out.append(Component(ctx, gb, True, tag))
    # prune components contained in another
    pruned = []
    for i, c in enumerate(out):
        contained = False
        for j, d in enumerate(out):
            if i == j:
                continue
            if c.fingerprint() == d.fingerprint():
                if j < i:
                    contained = True
                    break
                continue
            # V(c) subset of V(d) iff every generator of d dies mod c
            if all(normal_form(g, c.gb).is_zero() for g in d.gb):
                contained = True
                break
        if not contained:
            pruned.append(c)
    pruned.sort(key=lambda c: c.fingerprint())
    return pruned
