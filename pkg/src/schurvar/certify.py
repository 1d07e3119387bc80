"""Laurent-curve certificates for inclusion of morphism image closures.

Given two equivariant families alpha and alpha_p with the same target,
the search looks for a curve (a(t), gamma(t)) whose exponents of t sit
in a window {-d1, ..., d2}, such that composing alpha with the curve
and letting t -> 0 reproduces alpha_p at the generic point of its base.
Finding one proves that the image of alpha_p lies in the closure of the
image of alpha at every level.  The window grows one step of d1 at a
time; when no certificate exists the search runs forever, so callers
cap it with a step budget or a maximal d1.

The curve coefficients live over Omega, the fraction field of the
coordinate ring of an irreducible component of alpha_p's base.  Both
bases are first split into certified-prime components and every
component pair is searched in a deterministic round-robin; "true"
requires every component of alpha_p's base to be covered by some
component of alpha's.
"""

import random
from fractions import Fraction
from typing import Iterable, Optional

from .decomp import decompose_restricted
from .errors import InputError, UnsupportedAlgebraError
from .geometry import Morphism
from .ideals import groebner, is_trivial, normal_form
from .rings import (QQ, Polynomial, QuotientFractionField, RingContext,
                    Variable)
from .schur import FunctorInstance, PolyMapSpace

_PIN_CANDIDATES = (Fraction(0), Fraction(1), Fraction(-1), Fraction(2),
                   Fraction(-2), Fraction(3), Fraction(-3),
                   Fraction(1, 2), Fraction(-1, 2))


# ---------------------------------------------------------------------------
# scalar domain: the function field of a prime base component


class GenericPointContext:
    """Arithmetic at the generic point of one prime base component.

    The coordinates of the generic point are the residue classes of the
    ambient variables; evaluating a base polynomial there is reduction
    into Frac(K[y]/J).  A point base (no variables, no equations) keeps
    plain rational scalars.
    """

    __slots__ = ("base_ctx", "gb", "field")

    def __init__(self, base_ctx: RingContext, prime_gb: tuple):
        self.base_ctx = base_ctx
        self.gb = tuple(prime_gb)
        if base_ctx.variables or self.gb:
            self.field = QuotientFractionField(base_ctx, self.gb)
        else:
            self.field = QQ

    def scalar(self, fr):
        return self.field.from_fraction(fr)

    def eval_base(self, p: Polynomial):
        """Value of a base-ring polynomial at the generic point."""
        if self.field is QQ:
            return p.constant_value()
        return self.field.from_poly(p.map_context(self.base_ctx))


# ---------------------------------------------------------------------------
# Laurent tables: finitely many t-exponents, polynomial coefficients


def _lt_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, p in b.items():
        q = out.get(e)
        s = p if q is None else q + p
        if s.is_zero():
            out.pop(e, None)
        else:
            out[e] = s
    return out


def _lt_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, pa in a.items():
        for eb, pb in b.items():
            prod = pa * pb
            if prod.is_zero():
                continue
            e = ea + eb
            q = out.get(e)
            s = prod if q is None else q + prod
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
    return out


def _eval_poly(p: Polynomial, assign: dict, uctx: RingContext,
               conv) -> dict:
    """Evaluate p with every variable replaced by a Laurent table.

    conv turns p's rational coefficients into uctx scalars.  Exponents
    of absent tables are an error by construction: assign must cover
    every variable present in p.
    """
    src_vars = p.ctx.variables
    powers: dict = {}

    def power(v, k: int) -> dict:
        got = powers.get((v, k))
        if got is None:
            got = assign[v] if k == 1 else _lt_mul(power(v, k - 1),
                                                   assign[v])
            powers[(v, k)] = got
        return got

    total: dict = {}
    for exp, c in p.coeffs.items():
        term = {0: uctx.const(conv(c))}
        for i, k in enumerate(exp):
            if k:
                term = _lt_mul(term, power(src_vars[i], k))
        total = _lt_add(total, term)
    return total


def _transplant(p: Polynomial, uctx: RingContext, conv) -> Polynomial:
    """Copy p into uctx converting scalars; variables map by identity."""
    src = p.ctx.variables
    width = uctx.nvars()
    out = {}
    for exp, c in p.coeffs.items():
        nexp = [0] * width
        for i, k in enumerate(exp):
            if k:
                nexp[uctx.position(src[i])] = k
        out[tuple(nexp)] = conv(c)
    return Polynomial(uctx, out)


# ---------------------------------------------------------------------------
# bounds


class BoundParams:
    """Exponent window and approximation order for one value of d1."""

    __slots__ = ("d1", "d2", "n1", "provenance")

    def __init__(self, d1: int, d2: int, n1: int, provenance: str):
        self.d1 = d1
        self.d2 = d2
        self.n1 = n1
        self.provenance = provenance

    def window(self) -> range:
        return range(-self.d1, self.d2 + 1)


def _curve_degree(alpha: Morphism) -> int:
    """Max total degree of alpha's instance polynomials in the
    curve-bearing variables (base and source together)."""
    d_c = max(alpha.tgt.degree(), 1)
    _, _, polys = alpha.instance_polys(d_c, "x")
    deg = 0
    for p in polys.values():
        for e in p.coeffs:
            deg = max(deg, sum(e))
    return deg


def compute_bounds(alpha: Morphism, d1: int,
                   greenberg: Optional[tuple] = None) -> BoundParams:
    """Window upper end d2 and approximation order n1 for this d1.

    A product of D factors each of valuation >= -d1 has valuation
    >= e - (D-1)*d1 when one factor has valuation e, so terms beyond
    (D-1)*d1 influence neither negative coefficients nor the constant
    term.  With no base equations that is the whole story and the
    residual order n1 is 0.  Otherwise the lifting constants (n0, c, s)
    must be supplied by the caller and n1, d2 grow accordingly.
    """
    D = max(_curve_degree(alpha), 1)
    d2_0 = max((D - 1) * d1, 0)
    if not alpha.base_gens:
        return BoundParams(d1, d2_0, 0, "trivial-I-zero")
    if greenberg is None:
        raise UnsupportedAlgebraError(
            "base equations present: supply lifting constants (n0, c, s)")
    n0, c, s = (int(x) for x in greenberg)
    if n0 < 1 or c < 1 or s < 0:
        raise InputError("lifting constants must satisfy n0,c >= 1, s >= 0")
    df = max(max(sum(e) for e in f.coeffs) for f in alpha.base_gens)
    e_shift = d1 * df
    # truncation at exponent ceil((n1+e)/c)-s-d1 must clear the window,
    # and n1+e must reach the lifting threshold n0
    n1 = max(n0 - e_shift, c * (d2_0 + s + d1) + 1 - e_shift, 0)
    d2 = max(d2_0, n1 + (df - 1) * d1 - 1)
    return BoundParams(d1, d2, n1, "user-supplied")


# ---------------------------------------------------------------------------
# the polynomial system for one (component pair, d1)


def _basis_instances(src_p, src, d_c: int) -> list:
    """Instance polynomials at level d_c of a basis of the equivariant
    map space src_p -> src, keyed by target coordinate."""
    space = PolyMapSpace(src_p, src)
    out = []
    for i in range(space.dim):
        unit = [1 if j == i else 0 for j in range(space.dim)]
        member = Morphism(src_p, src, unit)
        _, _, polys = member.instance_polys(d_c, "p")
        out.append(polys)
    return out


class AnsatzSystem:
    """Equations over Omega for the curve coefficients at one d1."""

    __slots__ = ("ctx", "gens", "c_grid", "a_grid", "bounds", "d_c")

    def __init__(self, ctx, gens, c_grid, a_grid, bounds, d_c):
        self.ctx = ctx
        self.gens = gens
        self.c_grid = c_grid
        self.a_grid = a_grid
        self.bounds = bounds
        self.d_c = d_c


def _conditions(gpc: GenericPointContext, alpha: Morphism,
                alpha_p: Morphism, bounds: BoundParams,
                uctx: RingContext, c_tables: list, a_tables: dict,
                n_unknown: int, p_pos: set) -> list:
    """Collect every coefficient equation as a polynomial over uctx's
    unknown prefix.  c_tables and a_tables may hold either unknown
    variables (system building) or constants (witness validation)."""
    field = gpc.field
    conv = gpc.scalar
    d_c = max(alpha.tgt.degree(), 1)

    gamma_inst = _basis_instances(alpha_p.src, alpha.src, d_c)
    src_inst = FunctorInstance(alpha.src, d_c)
    src_vars = src_inst.variables("x")

    # image of the source coordinates under gamma(t)
    x_assign: dict = {}
    for key, xv in zip(src_inst.coords, src_vars):
        table: dict = {}
        for ci, polys in zip(c_tables, gamma_inst):
            gp = polys.get(key)
            if gp is None or gp.is_zero():
                continue
            gp_u = _transplant(gp, uctx, conv)
            table = _lt_add(table, _lt_mul(ci, {0: gp_u}))
        x_assign[xv] = table

    for bv in alpha.base_vars:
        x_assign[bv] = a_tables[bv]

    def strip(poly: Polynomial) -> list:
        groups: dict = {}
        for exp, c in poly.coeffs.items():
            pk = tuple(exp[i] for i in range(len(exp)) if i in p_pos)
            groups.setdefault(pk, {})[exp[:n_unknown]] = c
        unk_ctx = RingContext(uctx.variables[:n_unknown], field)
        return [Polynomial(unk_ctx, g) for g in groups.values()]

    gens: list = []

    def emit(poly: Polynomial):
        for g in strip(poly):
            if not g.is_zero():
                gens.append(g)

    # target-side data at the generic point
    _, _, target_raw = alpha_p.instance_polys(d_c, "p")
    base_set = set(alpha_p.base_vars)

    def generic(poly: Polynomial) -> Polynomial:
        """Evaluate the alpha_p base variables at the generic point."""
        src = poly.ctx.variables
        width = uctx.nvars()
        acc: dict = {}
        for exp, c in poly.coeffs.items():
            scal = conv(c)
            nexp = [0] * width
            for i, k in enumerate(exp):
                if not k:
                    continue
                v = src[i]
                if v in base_set:
                    mono = Polynomial(
                        gpc.base_ctx,
                        {tuple(k if w is v else 0
                               for w in gpc.base_ctx.variables):
                         Fraction(1)})
                    scal = field.mul(scal, gpc.eval_base(mono))
                else:
                    nexp[uctx.position(v)] = k
            key = tuple(nexp)
            prev = acc.get(key)
            scal = scal if prev is None else field.add(prev, scal)
            acc[key] = scal
        return Polynomial(uctx, {e: c for e, c in acc.items()
                                 if not field.is_zero(c)})

    # (iii) the composed family limits to alpha_p's family
    _, _, alpha_polys = alpha.instance_polys(d_c, "x")
    tinst = FunctorInstance(alpha.tgt, d_c)
    for key in tinst.coords:
        table = _eval_poly(alpha_polys[key], x_assign, uctx, conv)
        for e, poly in table.items():
            if e < 0:
                emit(poly)
        t0 = table.get(0, uctx.zero())
        emit(t0 - generic(target_raw[key]))

    # (ii) the base-target part limits to its value at the generic point
    for a0, a0_p in zip(alpha.alpha0, alpha_p.alpha0):
        table = _eval_poly(a0, a_tables, uctx, conv)
        for e, poly in table.items():
            if e < 0:
                emit(poly)
        t0 = table.get(0, uctx.zero())
        if gpc.field is QQ:
            b_val = conv(a0_p.constant_value())
        else:
            b_val = gpc.eval_base(a0_p)
        emit(t0 - uctx.const(b_val))

    # (i) base equations vanish up to order n1
    for f in alpha.base_gens:
        table = _eval_poly(f, a_tables, uctx, conv)
        for e, poly in table.items():
            if e < bounds.n1:
                emit(poly)

    # dedupe after scaling to a monic lead
    seen = set()
    out = []
    for g in gens:
        lead = g.coeffs[max(g.coeffs, key=g.ctx.monomial_key)]
        mg = g.scale(field.invert(lead))
        fp = mg.fingerprint()
        if fp in seen:
            continue
        seen.add(fp)
        out.append(mg)
    return out


def build_ansatz_system(gpc: GenericPointContext, alpha: Morphism,
                        alpha_p: Morphism,
                        bounds: BoundParams) -> AnsatzSystem:
    """Unknowns: one coefficient per map-space basis element and per
    base coordinate of alpha, for each exponent in the window."""
    field = gpc.field
    d_c = max(alpha.tgt.degree(), 1)
    window = list(bounds.window())
    space = PolyMapSpace(alpha_p.src, alpha.src)

    c_grid: dict = {}
    c_vars: list = []
    for i in range(space.dim):
        for e in window:
            v = Variable("c", (i, bounds.d1 + e), 0)
            c_grid[v] = (i, e)
            c_vars.append(v)
    a_grid: dict = {}
    a_vars: list = []
    for k, bv in enumerate(alpha.base_vars):
        for e in window:
            v = Variable("a", (k, bounds.d1 + e), 0)
            a_grid[v] = (bv, e)
            a_vars.append(v)

    p_inst = FunctorInstance(alpha_p.src, d_c)
    p_vars = tuple(p_inst.variables("p"))
    n_unknown = len(c_vars) + len(a_vars)
    uctx = RingContext(tuple(c_vars) + tuple(a_vars) + p_vars, field)
    p_pos = {uctx.position(v) for v in p_vars}

    c_tables = []
    for i in range(space.dim):
        table = {e: uctx.var(Variable("c", (i, bounds.d1 + e), 0))
                 for e in window}
        c_tables.append(table)
    a_tables = {}
    for k, bv in enumerate(alpha.base_vars):
        a_tables[bv] = {e: uctx.var(Variable("a", (k, bounds.d1 + e), 0))
                        for e in window}

    gens = _conditions(gpc, alpha, alpha_p, bounds, uctx,
                       c_tables, a_tables, n_unknown, p_pos)
    unk_ctx = RingContext(uctx.variables[:n_unknown], field)
    return AnsatzSystem(unk_ctx, gens, c_grid, a_grid, bounds, d_c)


def feasibility(ctx: RingContext, gens: Iterable[Polynomial]) -> bool:
    """Solvable over an algebraic closure iff the reduced basis is
    not the whole ring."""
    return not is_trivial(ctx, gens)


# ---------------------------------------------------------------------------
# rational point search (no Groebner bases involved)


def _eval_partial(p: Polynomial, pos_vals: dict) -> Polynomial:
    """Substitute scalars for the positions in pos_vals."""
    f = p.ctx.field
    acc: dict = {}
    for exp, c in p.coeffs.items():
        scal = c
        nexp = exp
        touched = [i for i in pos_vals if exp[i]]
        if touched:
            nexp = list(exp)
            dead = False
            for i in touched:
                v = pos_vals[i]
                if f.is_zero(v):
                    dead = True
                    break
                pw = v
                for _ in range(nexp[i] - 1):
                    pw = f.mul(pw, v)
                nexp[i] = 0
                scal = f.mul(scal, pw)
            if dead:
                continue
            nexp = tuple(nexp)
        prev = acc.get(nexp)
        s = scal if prev is None else f.add(prev, scal)
        if f.is_zero(s):
            acc.pop(nexp, None)
        else:
            acc[nexp] = s
    return Polynomial(p.ctx, acc)


def _positions(g: Polynomial) -> set:
    got = set()
    for exp in g.coeffs:
        for i, k in enumerate(exp):
            if k:
                got.add(i)
    return got


def _univariate_roots(f, by_pow: dict) -> list:
    out = []
    for cand in _PIN_CANDIDATES:
        s = f.from_fraction(cand)
        tot = f.zero()
        for k, c in by_pow.items():
            pw = f.one()
            for _ in range(k):
                pw = f.mul(pw, s)
            tot = f.add(tot, f.mul(c, pw))
        if f.is_zero(tot):
            out.append(s)
    return out


def _search_point(ctx: RingContext, gens: Iterable[Polynomial],
                  node_cap: int = 20000,
                  restarts: int = 4) -> Optional[dict]:
    """Depth-first search for a solution with small rational coordinates.

    Propagation substitutes decided values, kills a branch on a nonzero
    constant and forces variables that appear in a generator linear in a
    single remaining variable.  Branching: a univariate generator pins
    the choice to its candidate roots; a single-monomial generator sends
    one of its factors to zero; otherwise the candidate pool is tried on
    a frequent variable of a short generator, preferring generators with
    a constant term since those refuse all-zero assignments.  Restarts
    reshuffle the value order.  Returns {position: scalar} for every
    variable, or None; None means "not found", never "infeasible".
    """
    f = ctx.field
    nv = len(ctx.variables)
    zero_exp = (0,) * nv
    budget = [node_cap]
    pool0 = [f.from_fraction(c) for c in _PIN_CANDIDATES]
    pool = list(pool0)

    def go(work: list, assign: dict) -> Optional[dict]:
        while True:
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            forced: dict = {}
            live = []
            for g in work:
                if g.is_zero():
                    continue
                if g.is_constant():
                    return None
                live.append(g)
                pos = _positions(g)
                if len(pos) == 1:
                    i = next(iter(pos))
                    by_pow = {e[i]: c for e, c in g.coeffs.items()}
                    if max(by_pow) == 1:
                        val = f.neg(f.mul(by_pow.get(0, f.zero()),
                                          f.invert(by_pow[1])))
                        if i in forced and not f.is_zero(
                                f.sub(forced[i], val)):
                            return None
                        forced[i] = val
            if forced:
                assign.update(forced)
                work = [_eval_partial(g, forced) for g in live]
                continue
            work = live
            break
        if not work:
            return {i: assign.get(i, f.zero()) for i in range(nv)}

        def descend(i, val):
            sub = dict(assign)
            sub[i] = val
            return go([_eval_partial(g, {i: val}) for g in work], sub)

        for g in work:
            pos = _positions(g)
            if len(pos) == 1:
                i = next(iter(pos))
                roots = _univariate_roots(f, {e[i]: c
                                              for e, c in g.coeffs.items()})
                if not roots:
                    return None
                for val in roots:
                    got = descend(i, val)
                    if got is not None:
                        return got
                return None
        mono = next((g for g in work if len(g.coeffs) == 1), None)
        if mono is not None:
            # a vanishing product: some factor vanishes
            for i in sorted(_positions(mono)):
                got = descend(i, f.zero())
                if got is not None:
                    return got
            return None
        anchored = [g for g in work if zero_exp in g.coeffs]
        shortest = min(anchored or work, key=lambda g: len(g.coeffs))
        counts: dict = {}
        for g in work:
            for i in _positions(g):
                counts[i] = counts.get(i, 0) + 1
        branch_pos = max(_positions(shortest), key=lambda i: counts[i])
        for val in pool:
            got = descend(branch_pos, val)
            if got is not None:
                return got
        return None

    for seed in range(max(restarts, 1)):
        budget[0] = node_cap
        if seed:
            rest = pool0[1:]
            random.Random(seed).shuffle(rest)
            pool = pool0[:1] + rest
        got = go(list(gens), {})
        if got is not None:
            return got
    return None


# ---------------------------------------------------------------------------
# witness extraction


class WitnessCurve:
    """A concrete solution: per-basis-element and per-base-coordinate
    Laurent coefficients, exponents in {-d1, ..., d2}."""

    __slots__ = ("d1", "d2", "gamma", "a_part", "field")

    def __init__(self, d1: int, d2: int, gamma: dict, a_part: dict,
                 field):
        self.d1 = d1
        self.d2 = d2
        self.gamma = gamma
        self.a_part = a_part
        self.field = field

    def lines(self) -> list:
        out = []
        for i in sorted(self.gamma):
            coeffs = self.gamma[i]
            body = " ".join(f"t^{e}:{self.field.to_str(c)}"
                            for e, c in sorted(coeffs.items()))
            out.append(f"gamma[{i}] = {body}")
        for name in sorted(self.a_part, key=str):
            coeffs = self.a_part[name]
            body = " ".join(f"t^{e}:{self.field.to_str(c)}"
                            for e, c in sorted(coeffs.items()))
            out.append(f"a[{name}] = {body}")
        return out


def _pack_witness(system: AnsatzSystem, values: dict) -> WitnessCurve:
    """values: Variable -> scalar for every system unknown."""
    field = system.ctx.field
    gamma: dict = {}
    for v, (i, e) in system.c_grid.items():
        val = values[v]
        if not field.is_zero(val):
            gamma.setdefault(i, {})[e] = val
    a_part: dict = {}
    for v, (bv, e) in system.a_grid.items():
        val = values[v]
        if not field.is_zero(val):
            a_part.setdefault(bv, {})[e] = val
    return WitnessCurve(system.bounds.d1, system.bounds.d2, gamma,
                        a_part, field)


def search_witness(system: AnsatzSystem) -> Optional[WitnessCurve]:
    """Witness by direct point search; cheap, succeeds on systems whose
    solution set meets the small rational candidate grid."""
    point = _search_point(system.ctx, system.gens)
    if point is None:
        return None
    values = {system.ctx.variables[i]: v for i, v in point.items()}
    return _pack_witness(system, values)


def extract_witness(system: AnsatzSystem) -> Optional[WitnessCurve]:
    """Best-effort rational point: pin unknowns one at a time to small
    rational values, keeping the system solvable; read off values that
    the reduced basis already determines."""
    ctx = system.ctx
    field = ctx.field
    gb = groebner(ctx, system.gens)
    if gb and gb[0].is_one():
        return None
    values: dict = {}

    def determined(v) -> Optional[object]:
        nf = normal_form(ctx.var(v), gb)
        return nf.constant_value() if nf.is_constant() else None

    for v in ctx.variables:
        got = determined(v)
        if got is not None:
            values[v] = got
            continue
        pinned = None
        for cand in _PIN_CANDIDATES:
            scal = field.from_fraction(cand)
            trial = list(gb) + [ctx.var(v) - ctx.const(scal)]
            gb2 = groebner(ctx, trial)
            if not (gb2 and gb2[0].is_one()):
                pinned = scal
                gb = gb2
                break
        if pinned is None:
            return None
        values[v] = pinned
    return _pack_witness(system, values)


def witness_valid(gpc: GenericPointContext, alpha: Morphism,
                  alpha_p: Morphism, bounds: BoundParams,
                  witness: WitnessCurve) -> bool:
    """Re-substitute the witness: every coefficient condition must
    evaluate to zero exactly."""
    field = gpc.field
    space = PolyMapSpace(alpha_p.src, alpha.src)
    d_c = max(alpha.tgt.degree(), 1)
    p_inst = FunctorInstance(alpha_p.src, d_c)
    p_vars = tuple(p_inst.variables("p"))
    uctx = RingContext(p_vars, field)
    p_pos = set(range(len(p_vars)))

    c_tables = []
    for i in range(space.dim):
        coeffs = witness.gamma.get(i, {})
        c_tables.append({e: uctx.const(c) for e, c in coeffs.items()})
    a_tables = {}
    for bv in alpha.base_vars:
        coeffs = witness.a_part.get(bv, {})
        a_tables[bv] = {e: uctx.const(c) for e, c in coeffs.items()}

    gens = _conditions(gpc, alpha, alpha_p, bounds, uctx,
                       c_tables, a_tables, 0, p_pos)
    return all(g.is_zero() for g in gens)


# ---------------------------------------------------------------------------
# the search state machine


class _SubSearch:
    """One (component of alpha's base, component of alpha_p's base)
    cell: loops d1 = 0, 1, 2, ... through bounds, system, test."""

    __slots__ = ("alpha", "alpha_p", "gpc", "greenberg", "max_d1",
                 "d1", "stage", "bounds", "system", "status", "witness")

    def __init__(self, alpha, alpha_p, gpc, greenberg, max_d1):
        self.alpha = alpha
        self.alpha_p = alpha_p
        self.gpc = gpc
        self.greenberg = greenberg
        self.max_d1 = max_d1
        self.d1 = 0
        self.stage = "bounds"
        self.bounds = None
        self.system = None
        self.status = "running"
        self.witness = None

    def step(self):
        if self.status != "running":
            return
        if self.stage == "bounds":
            self.bounds = compute_bounds(self.alpha, self.d1,
                                         self.greenberg)
            self.stage = "system"
        elif self.stage == "system":
            self.system = build_ansatz_system(self.gpc, self.alpha,
                                              self.alpha_p, self.bounds)
            self.stage = "test"
        else:
            witness = search_witness(self.system)
            if witness is not None and not witness_valid(
                    self.gpc, self.alpha, self.alpha_p, self.bounds,
                    witness):
                witness = None
            if witness is None and feasibility(self.system.ctx,
                                               self.system.gens):
                # solvable over the closure; try to pin a rational point
                witness = extract_witness(self.system)
                if witness is not None:
                    assert witness_valid(self.gpc, self.alpha,
                                         self.alpha_p, self.bounds,
                                         witness)
                self.witness = witness
                self.status = "true"
            elif witness is not None:
                self.witness = witness
                self.status = "true"
            else:
                self.d1 += 1
                if self.max_d1 is not None and self.d1 > self.max_d1:
                    self.status = "exhausted"
                else:
                    self.stage = "bounds"


class CertifyState:
    """Deterministic dovetailed search over all base-component pairs.

    status: "true" once every target component is covered,
    "infeasible-at-current-d1" when some target component has run all
    its pairings past max_d1, else "still-running".
    """

    __slots__ = ("subs", "j_count", "witnesses", "_queue")

    def __init__(self, alpha: Morphism, alpha_p: Morphism,
                 max_d1: Optional[int] = None,
                 greenberg: Optional[tuple] = None):
        if alpha.tgt != alpha_p.tgt:
            raise InputError("certification needs a shared target functor")
        if alpha.b_vars != alpha_p.b_vars:
            raise InputError("certification needs a shared target base")
        comps_a = _base_components(alpha)
        comps_b = _base_components(alpha_p)
        self.j_count = len(comps_b)
        self.subs = {}
        for j, cb in enumerate(comps_b):
            gpc = GenericPointContext(alpha_p.base_ctx, cb)
            restricted_p = _restrict(alpha_p, cb)
            for i, ca in enumerate(comps_a):
                sub = _SubSearch(_restrict(alpha, ca), restricted_p,
                                 gpc, greenberg, max_d1)
                self.subs[(i, j)] = sub
        self.witnesses = {}
        self._queue = sorted(self.subs)

    # -- scheduling ----------------------------------------------------

    def advance(self, steps: int) -> str:
        done = 0
        while done < steps:
            live = [key for key in self._queue
                    if self.subs[key].status == "running"
                    and not self._covered(key[1])]
            if not live:
                break
            for key in live:
                if done >= steps:
                    break
                sub = self.subs[key]
                sub.step()
                done += 1
                if sub.status == "true" and key not in self.witnesses:
                    self.witnesses[key] = sub.witness
        return self.status

    def _covered(self, j: int) -> bool:
        return any(self.subs[(i2, j2)].status == "true"
                   for (i2, j2) in self.subs if j2 == j)

    @property
    def status(self) -> str:
        if all(self._covered(j) for j in range(self.j_count)):
            return "true"
        for j in range(self.j_count):
            if self._covered(j):
                continue
            cells = [s for (i2, j2), s in self.subs.items() if j2 == j]
            if all(s.status == "exhausted" for s in cells):
                return "infeasible-at-current-d1"
        return "still-running"

    def witness(self) -> Optional[WitnessCurve]:
        for key in sorted(self.witnesses):
            if self.witnesses[key] is not None:
                return self.witnesses[key]
        return None

    def d1_reached(self) -> int:
        return max((s.d1 for s in self.subs.values()), default=0)


def _base_components(m: Morphism) -> list:
    if not m.base_gens:
        return [()]
    comps = decompose_restricted(m.base_ctx, list(m.base_gens))
    return [c.gb for c in comps]


def _restrict(m: Morphism, comp_gb: tuple) -> Morphism:
    return Morphism(m.src, m.tgt, m.coeffs, m.base_vars, comp_gb,
                    m.b_vars, m.alpha0)


def certify(alpha: Morphism, alpha_p: Morphism,
            budget: Optional[int] = None,
            max_d1: Optional[int] = None,
            greenberg: Optional[tuple] = None) -> CertifyState:
    """Search for an inclusion certificate.

    Returns the state; .status is "true", "still-running" (budget ran
    out) or "infeasible-at-current-d1" (every window up to max_d1 is
    infeasible).  With neither budget nor max_d1 the call blocks until
    a certificate is found and does not return otherwise.
    """
    state = CertifyState(alpha, alpha_p, max_d1=max_d1,
                         greenberg=greenberg)
    if budget is not None:
        state.advance(budget)
        return state
    while state.status == "still-running":
        state.advance(64)
    return state
