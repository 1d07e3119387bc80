"""Recursive construction of a finite morphism cover for a closed subset.

Given equations for X inside B x Q(K^m), produce finitely many morphisms
A_i x P -> B x Q whose images jointly fill X: every point of every
instance X(K^n) lies in the image of some component.  The recursion
peels one copy R of the largest summand of Q per round:

  * if X imposes no conditions on the R-coordinates beyond those on the
    remaining coordinates, X splits off R as a free factor and we recurse
    on the smaller functor;
  * otherwise a first equation f with an R-coordinate x_j gives two
    covers: the locus where the partial h = df/dx_j also vanishes
    (recurse with one more equation, same functor), and the open locus
    h != 0, which after shifting by U = K^m and removing the
    distinguished copy embeds into a strictly smaller functor.

Base rings only ever grow: each shift round appends a localization
witness w and fresh copies of the Q(K^m)-coordinates to the base, so the
original base variables persist into every component, and the base part
of each component morphism is the identity inclusion on them.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from typing import Optional

from .decomp import radical
from .errors import UnsupportedAlgebraError
from .geometry import ClosedSubset, Morphism, morphism_from_polys, smear
from .ideals import (
    eliminate, groebner, ideal_membership, intersect, is_trivial,
    normal_form, radical_membership,
)
from .rings import QQ, Polynomial, RingContext, Variable
from .schur import (
    FunctorInstance, PolyFunctor, ShiftDecomposition, functor_less,
    functor_map_matrix, invert_rational_matrix,
)

_MAX_DEPTH = 64


# ---------------------------------------------------------------------------
# trace


class TraceNode:
    __slots__ = ("depth", "functor", "action", "g_hash", "x_degree")

    def __init__(self, depth: int, functor: PolyFunctor):
        self.depth = depth
        self.functor = functor
        self.action = "?"
        self.g_hash: Optional[str] = None
        self.x_degree: Optional[int] = None

    def line(self) -> str:
        parts = [f"depth={self.depth}", f"Q={self.functor!r}",
                 f"action={self.action}"]
        if self.g_hash is not None:
            parts.append(f"g={self.g_hash}")
        if self.x_degree is not None:
            parts.append(f"degx={self.x_degree}")
        return " ".join(parts)


class RecursionTrace:
    """Pre-order log of the recursion: one node per call."""

    def __init__(self):
        self.nodes: list = []

    def open(self, depth: int, functor: PolyFunctor) -> TraceNode:
        node = TraceNode(depth, functor)
        self.nodes.append(node)
        return node

    def lines(self) -> list:
        return ["  " * n.depth + n.line() for n in self.nodes]


def _hash_polys(polys) -> str:
    text = "\n".join(str(g) for g in polys)
    return hashlib.sha1(text.encode()).hexdigest()[:8]


# ---------------------------------------------------------------------------
# coordinate bookkeeping


def _group_index(P: PolyFunctor, lam: tuple) -> int:
    for i, (l, _) in enumerate(P.groups()):
        if l == lam:
            return i
    raise KeyError(lam)


def _remove_top_key(Qfrom: PolyFunctor, key):
    """Key of a kept coordinate after one top copy is removed."""
    s, c, w = key
    if Qfrom.groups()[0][1] == 1:
        return (s - 1, c, w)
    return key


def _restore_top_key(Qparent: PolyFunctor, key):
    """Inverse of _remove_top_key: key of a kept coordinate inside the
    parent functor."""
    s, c, w = key
    if Qparent.groups()[0][1] == 1:
        return (s + 1, c, w)
    return key


def _coord_digits(word: tuple) -> int:
    return int("".join(str(v) for v in word)) if word else 0


def _exponent_merge(nvars: int, block_pos, bk, keep_pos, rest) -> tuple:
    e = [0] * nvars
    for p, v in zip(block_pos, bk):
        e[p] = v
    for p, v in zip(keep_pos, rest):
        e[p] = v
    return tuple(e)


def _split_x_monomials(poly: Polynomial, block_pos, keep_pos, rctx):
    """{x-exponent: coefficient Polynomial over the kept variables}."""
    groups: dict = {}
    for e, c in poly.coeffs.items():
        bk = tuple(e[i] for i in block_pos)
        rest = tuple(e[i] for i in keep_pos)
        groups.setdefault(bk, {})[rest] = c
    return {bk: Polynomial(rctx, d) for bk, d in groups.items()}


# ---------------------------------------------------------------------------
# shift frame: Q(K^(m+n)) = constants + pure slots, coherently at the two
# levels the recursion consumes


class _ShiftFrame:
    """Decomposition data for shifting over U = K^m.

    Each summand copy of Q is decomposed once at n0 = max(m, deg Q); the
    instance at the other needed level is derived by restricting that
    witness, so both levels are instances of one natural isomorphism W.
    Constant slots carry Q(K^m); pure slots are the coordinates of the
    shifted pure functor, and the distinguished top copy comes from the
    last top copy of Q (within one shifted top summand the top partition
    has multiplicity one, so the slot is canonical).
    """

    def __init__(self, Q: PolyFunctor, m: int):
        self.Q = Q
        self.m = m
        d = max(Q.degree(), 1)
        self.d = d
        n0 = max(m, d)
        self._n0 = n0
        blocks = []
        for s, (lam, mult) in enumerate(Q.groups()):
            for c in range(mult):
                blocks.append((s, c,
                               ShiftDecomposition(PolyFunctor([lam]), m, n0)))
        self._blocks = blocks
        nu_copies: dict = {}
        const_of: dict = {}
        n_consts = 0
        for bi, (_, _, D) in enumerate(blocks):
            for g_b, (nu, mult_b) in enumerate(D.decomposed.groups()):
                for cc_b in range(mult_b):
                    if nu == ():
                        const_of[(bi, g_b, cc_b)] = ("c", n_consts)
                        n_consts += 1
                    else:
                        nu_copies.setdefault(nu, []).append((bi, g_b, cc_b))
        self._const_of = const_of
        self.n_consts = n_consts
        self.shifted = PolyFunctor(
            [nu for nu, lst in nu_copies.items() for _ in lst])
        slot_of: dict = {}
        for g_qr, (nu, _) in enumerate(self.shifted.groups()):
            for cc, spot in enumerate(nu_copies[nu]):
                slot_of[spot] = (g_qr, cc)
        self._slot_of = slot_of
        top = Q.top_summand()
        mult_top = Q.groups()[0][1]
        self.top = top
        r_block = mult_top - 1
        D_r = blocks[r_block][2]
        g_b_top = _group_index(D_r.decomposed, top)
        assert D_r.decomposed.groups()[g_b_top][1] == 1
        self.r_slot = slot_of[(r_block, g_b_top, 0)]
        assert self.r_slot == (_group_index(self.shifted, top),
                               mult_top - 1)
        self.reduced = self.shifted.remove_one(top)

        w0: dict = {}
        for bi, (s, c, D) in enumerate(blocks):
            for (dk, sk), v in D.witness.items():
                w0[(self._label(bi, dk), (s, c, sk[2]))] = v
        self._w = {n0: w0}
        self._labels: dict = {}
        self.winv: dict = {}
        self.emb: dict = {}
        for n in sorted({m, d}):
            wn = self._level(n)
            inv = invert_rational_matrix(
                wn, self.labels(n), FunctorInstance(Q, m + n).coords)
            if inv is None:
                raise UnsupportedAlgebraError(
                    "shift decomposition not invertible at n=%d" % n)
            self.winv[n] = inv
            emb = self._embedding(wn, n)
            if self.emb:
                assert emb == self.emb, "constant block depends on level"
            self.emb = emb

    def _label(self, bi: int, dk):
        g_b, cc_b, w = dk
        cl = self._const_of.get((bi, g_b, cc_b))
        if cl is not None:
            return cl
        g_qr, cc = self._slot_of[(bi, g_b, cc_b)]
        return (g_qr, cc, w)

    def labels(self, n: int) -> list:
        got = self._labels.get(n)
        if got is None:
            got = [("c", i) for i in range(self.n_consts)]
            got += list(FunctorInstance(self.shifted, n).coords)
            self._labels[n] = got
        return got

    def _level(self, n: int) -> dict:
        got = self._w.get(n)
        if got is not None:
            return got
        m, n0 = self.m, self._n0
        w0 = self._w[n0]
        one, zero = Fraction(1), Fraction(0)
        incl = [[one if i == j else zero for j in range(m + n)]
                for i in range(m + n0)]
        mi = functor_map_matrix(self.Q, incl, m + n, m + n0, zero)
        mi_by_tgt: dict = {}
        for (qk0, qk), c in mi.items():
            mi_by_tgt.setdefault(qk0, []).append((qk, c))
        wr_rows: dict = {}
        for (lab0, qk0), v in w0.items():
            row = wr_rows.setdefault(lab0, {})
            for qk, c in mi_by_tgt.get(qk0, ()):
                cur = row.get(qk, zero) + v * c
                if cur:
                    row[qk] = cur
                else:
                    row.pop(qk, None)
        proj = [[one if i == j else zero for j in range(n0)]
                for i in range(n)]
        wn: dict = {}
        for bi, (_, _, D) in enumerate(self._blocks):
            dp = functor_map_matrix(D.decomposed, proj, n0, n, zero)
            for (dkn, dk0), a in dp.items():
                row = wr_rows.get(self._label(bi, dk0))
                if not row:
                    continue
                labn = self._label(bi, dkn)
                for qk, v in row.items():
                    cur = wn.get((labn, qk), zero) + a * v
                    if cur:
                        wn[(labn, qk)] = cur
                    else:
                        wn.pop((labn, qk), None)
        self._w[n] = wn
        return wn

    def _embedding(self, wn: dict, n: int) -> dict:
        """Constant rows of W_n composed with Q(inclusion of K^m); pure
        rows of that composite must vanish."""
        m = self.m
        one, zero = Fraction(1), Fraction(0)
        incl = [[one if i == j else zero for j in range(m)]
                for i in range(m + n)]
        ins = functor_map_matrix(self.Q, incl, m, m + n, zero)
        ins_by_src: dict = {}
        for (qk, qkm), c in ins.items():
            ins_by_src.setdefault(qk, []).append((qkm, c))
        emb: dict = {}
        stray: dict = {}
        for (lab, qk), v in wn.items():
            target = emb if lab[0] == "c" else stray
            for qkm, c in ins_by_src.get(qk, ()):
                cur = target.get((lab, qkm), zero) + v * c
                if cur:
                    target[(lab, qkm)] = cur
                else:
                    target.pop((lab, qkm), None)
        assert not stray, "embedded points leak into pure slots"
        return emb

    def r_keys(self, n: int) -> list:
        g_qr, cc = self.r_slot
        inst = FunctorInstance(self.shifted, n)
        return [(g_qr, cc, word) for word in inst.instances[g_qr].words]

    def const_value(self, lab, q_of, ctx) -> Polynomial:
        """The constant slot as a combination of Q(K^m) base variables."""
        acc = ctx.zero()
        for (l, qkm), c in self.emb.items():
            if l == lab:
                acc = acc + q_of[qkm].scale(c)
        return acc


# ---------------------------------------------------------------------------
# results


class ParamResult:
    """Finite union of morphism images covering a closed subset."""

    __slots__ = ("subset", "source", "components", "trace")

    def __init__(self, subset: ClosedSubset, source: PolyFunctor,
                 components: tuple, trace: RecursionTrace):
        self.subset = subset
        self.source = source
        self.components = components
        base = subset.base_vars
        for comp in components:
            assert comp.src == source
            assert comp.tgt == subset.functor
            assert comp.base_vars[:len(base)] == base

    def image_closure_instance(self, n: int) -> ClosedSubset:
        """Union of the component image closures inside B x Q(K^n)."""
        sub = self.subset
        tinst = FunctorInstance(sub.functor, n)
        tmp_vars = tinst.variables("t")
        out_vars = tinst.variables(sub.tag)
        base = sub.base_vars
        out_ctx = RingContext(base + tuple(out_vars), QQ)
        rename = {tv: out_ctx.var(ov)
                  for tv, ov in zip(tmp_vars, out_vars)}
        total = None
        for comp in self.components:
            _, svars, polys = comp.instance_polys(n, "x")
            all_ctx = RingContext(comp.base_vars + tuple(svars)
                                  + tuple(tmp_vars), QQ)
            gens = [g.map_context(all_ctx) for g in comp.base_gens]
            for key, tv in zip(tinst.coords, tmp_vars):
                gens.append(all_ctx.var(tv)
                            - polys[key].map_context(all_ctx))
            drop = [v for v in comp.base_vars if v not in base]
            drop += list(svars)
            _, egens = eliminate(all_ctx, gens, drop)
            egens = [g.substitute(rename, out_ctx) for g in egens]
            total = list(egens) if total is None else \
                list(intersect(out_ctx, total, egens))
        if total is None:
            total = [out_ctx.one()]
        return ClosedSubset(sub.functor, n, total, base, sub.tag, out_ctx)


def parameterise(X: ClosedSubset,
                 trace: Optional[RecursionTrace] = None) -> ParamResult:
    """Cover X by finitely many morphism images (see module docstring)."""
    tr = trace if trace is not None else RecursionTrace()
    work = X
    impure = not X.functor.is_pure()
    if impure:
        work = _absorb_constants(X)
    source, comps = _run(work, 0, tr, None)
    if impure:
        comps = [_restore_constants(c, X) for c in comps]
    return ParamResult(X, source, tuple(comps), tr)


def _absorb_constants(X: ClosedSubset) -> ClosedSubset:
    """Move degree-0 coordinates into the base: they are dimension
    independent, so the recursion only ever sees a pure fiber."""
    inst = X.instance()
    const_vars = tuple(X.coord_var(key) for key in inst.coords
                       if inst.summand_of(key) == ())
    return ClosedSubset(X.functor.pure_part(), X.n, X.gens,
                        X.base_vars + const_vars, X.tag, X.ctx)


def _restore_constants(comp: Morphism, X: ClosedSubset) -> Morphism:
    """Re-target a pure-fiber component at the original functor, sending
    each degree-0 coordinate to its absorbed base variable."""
    Qfull = X.functor
    nstar = max(Qfull.degree(), 1)
    ctx, _, polys = comp.instance_polys(nstar, "x")
    full = FunctorInstance(Qfull, nstar)
    out = {}
    for key in full.coords:
        if full.summand_of(key) == ():
            s, c, _ = key
            out[key] = ctx.var(Variable(X.tag, (s, c, 0), 0))
        else:
            out[key] = polys[key]
    return morphism_from_polys(comp.src, Qfull, out, nstar, ctx,
                               comp.base_vars, comp.base_gens, "x")


# ---------------------------------------------------------------------------
# the recursion


def _run(X: ClosedSubset, depth: int, trace: RecursionTrace, drop_note):
    """One recursion node; returns (source functor, components).

    drop_note, when present, carries the parent's projection data from a
    partial-derivative call: (g fingerprint hash, first-equation
    x-degree, g basis, kept-variable context).  The node then checks the
    termination measure: same projection => strictly smaller x-degree;
    changed projection => the parent's projection ideal sits inside ours.
    """
    if depth > _MAX_DEPTH:
        raise UnsupportedAlgebraError("recursion depth cap exceeded")
    Q = X.functor
    m = X.n
    node = trace.open(depth, Q)

    if Q.is_zero():
        rad = radical(X.ctx, X.gens)
        if is_trivial(X.ctx, rad):
            node.action = "base-empty"
            return PolyFunctor([]), []
        node.action = "base"
        comp = Morphism(PolyFunctor([]), PolyFunctor([]), [],
                        X.base_vars, rad)
        return PolyFunctor([]), [comp]

    top = Q.top_summand()
    mult_top = Q.groups()[0][1]
    inst_m = FunctorInstance(Q, m)
    x_keys = [(0, mult_top - 1, word)
              for word in inst_m.instances[0].words]
    x_vars = [X.coord_var(k) for k in x_keys]

    # saturate at level m and project out the distinguished copy.  The
    # smear skips its radical; decisions that depend on the reduced
    # structure of the projection use radical membership per coefficient
    # instead, which answers the same vanishing question.
    smeared = smear(X, m, radicalize=False)
    sctx = smeared.ctx
    rctx, g_elim = eliminate(sctx, smeared.gens, x_vars)
    g_gb = groebner(rctx, g_elim)
    g_hash = _hash_polys(g_gb)
    node.g_hash = g_hash

    x_pos = [sctx.position(v) for v in x_vars]
    x_set = set(x_pos)
    keep_pos = [i for i in range(sctx.nvars()) if i not in x_set]
    nvars = sctx.nvars()
    empty_proj = is_trivial(rctx, g_gb)
    member_cache: dict = {}

    def vanishes_on_projection(nf: Polynomial) -> bool:
        key = str(nf)
        got = member_cache.get(key)
        if got is None:
            got = radical_membership(rctx, nf, g_gb)
            member_cache[key] = got
        return got

    # the first input equation with a coefficient that survives on the
    # projection supplies the pivot; none surviving means the
    # distinguished copy imposes no extra conditions
    first = None
    zero_bk = (0,) * len(x_pos)
    for f in X.gens:
        if empty_proj:
            break
        parts = _split_x_monomials(f.map_context(sctx), x_pos, keep_pos,
                                   rctx)
        body = {}
        for bk, coeff in parts.items():
            nf = normal_form(coeff, g_gb)
            if nf.is_zero() or vanishes_on_projection(nf):
                continue
            body[bk] = nf
        if not body:
            continue
        # an input equation vanishes on the whole subset, so its pure
        # part dies with the rest once every mixed coefficient does
        assert any(bk != zero_bk for bk in body), \
            "input equation does not vanish on its subset"
        acc: dict = {}
        for bk, nf in body.items():
            for rest, c in nf.coeffs.items():
                acc[_exponent_merge(nvars, x_pos, bk, keep_pos, rest)] = c
        first = Polynomial(sctx, acc)
        break

    if first is None:
        # the distinguished copy is a free factor of X
        node.action = "project"
        Qp = Q.remove_one(top)
        assert functor_less(Qp, Q)
        child = _child_after_removal(Q, Qp, m, X.base_vars, X.tag,
                                     g_elim, rctx)
        src, comps = _run(child, depth + 1, trace, None)
        out_src = src.direct_sum(PolyFunctor([top]))
        lifted = [_lift_free_factor(c, src, out_src, Q, top, mult_top)
                  for c in comps]
        return out_src, lifted

    x_deg = max(sum(e[i] for i in x_pos) for e in first.coeffs)
    assert x_deg >= 1, "a pure-base equation survived reduction"
    node.x_degree = x_deg
    node.action = "split"

    if drop_note is not None:
        p_hash, p_deg, p_gb, p_rctx = drop_note
        if p_hash == g_hash:
            assert x_deg < p_deg, "termination measure failed to drop"
        else:
            assert p_rctx is rctx
            for g in p_gb:
                assert ideal_membership(g, g_gb), \
                    "projection did not shrink"

    present = set()
    for e in first.coeffs:
        for i, ei in enumerate(e):
            if ei:
                present.add(i)
    x_j = next(v for v in x_vars if sctx.position(v) in present)
    h = first.partial(x_j)
    assert not h.is_zero()

    # branch 1: the partial vanishes too.  The original equations define
    # X, so prepending h cuts exactly X intersected with V(h); putting h
    # first makes it the next round's pivot, with strictly smaller
    # x-degree, whenever the projection stays the same.
    child_gens = (h,) + tuple(f.map_context(sctx) for f in X.gens)
    deriv = ClosedSubset(Q, m, child_gens, X.base_vars, X.tag, sctx)
    src_a, comps_a = _run(deriv, depth + 1, trace,
                          (g_hash, x_deg, g_gb, rctx))

    # branch 2: localize at h and shift over U = K^m
    frame = _ShiftFrame(Q, m)
    src_b, comps_b = _shift_branch(X, frame, h, depth, trace)

    out_src = src_a.direct_sum(src_b)
    offsets_b = {lam: mult for lam, mult in src_a.groups()}
    lifted = [_relabel_source(c, out_src, {}, frame.d) for c in comps_a]
    lifted += [_assemble_shift_component(c, frame, out_src, offsets_b)
               for c in comps_b]
    return out_src, lifted


def _child_after_removal(Q, Qp, m, base_vars, tag, g_elim, rctx):
    """Subset over Q minus one top copy, from the projection equations."""
    if Qp.is_zero():
        bctx = RingContext(tuple(base_vars), QQ)
        gens = [g.map_context(bctx) for g in g_elim]
        return ClosedSubset(Qp, m, gens, base_vars, tag, bctx)
    inst = FunctorInstance(Q, m)
    ivars = inst.variables(tag)
    child_inst = FunctorInstance(Qp, m)
    cvars = child_inst.variables(tag)
    cctx = RingContext(tuple(base_vars) + tuple(cvars), QQ)
    sub = {}
    for key, var in zip(inst.coords, ivars):
        if not rctx.has_variable(var):
            continue  # a distinguished-copy coordinate, projected away
        ckey = _remove_top_key(Q, key)
        sub[var] = cctx.var(cvars[child_inst._index[ckey]])
    gens = [g.substitute(sub, cctx) for g in g_elim]
    return ClosedSubset(Qp, m, gens, base_vars, tag, cctx)


def _source_renaming(P_from, P_to, offsets, n, octx, ovars, oinst):
    """Substitution dict re-slotting P_from coordinates inside P_to."""
    sinst = FunctorInstance(P_from, n)
    svars = sinst.variables("x")
    sub = {}
    for key, v in zip(sinst.coords, svars):
        s, c, w = key
        lam = P_from.groups()[s][0]
        okey = (_group_index(P_to, lam), c + offsets.get(lam, 0), w)
        sub[v] = octx.var(ovars[oinst._index[okey]])
    return sub


def _lift_free_factor(comp: Morphism, src, out_src, Q, top, mult_top):
    """Extend a cover of the projection by the identity on the free
    distinguished copy."""
    n = max(Q.degree(), 1)
    _, _, polys = comp.instance_polys(n, "x")
    oinst = FunctorInstance(out_src, n)
    ovars = oinst.variables("x")
    octx = RingContext(comp.base_vars + tuple(ovars), QQ)
    sub = _source_renaming(comp.src, out_src, {}, n, octx, ovars, oinst)
    out = {}
    for key, p in polys.items():
        out[_restore_top_key(Q, key)] = p.substitute(sub, octx)
    r_copy = sum(1 for lam in src.summands if lam == top)
    top_group_out = _group_index(out_src, top)
    for word in FunctorInstance(Q, n).instances[0].words:
        xkey = (top_group_out, r_copy, word)
        out[(0, mult_top - 1, word)] = octx.var(ovars[oinst._index[xkey]])
    return morphism_from_polys(out_src, Q, out, n, octx,
                               comp.base_vars, comp.base_gens, "x")


def _relabel_source(comp: Morphism, out_src, offsets, n) -> Morphism:
    """Same morphism, with its source coordinates placed inside out_src
    (the extra coordinates are ignored)."""
    _, _, polys = comp.instance_polys(n, "x")
    oinst = FunctorInstance(out_src, n)
    ovars = oinst.variables("x")
    octx = RingContext(comp.base_vars + tuple(ovars), QQ)
    sub = _source_renaming(comp.src, out_src, offsets, n, octx, ovars,
                           oinst)
    out = {key: p.substitute(sub, octx) for key, p in polys.items()}
    return morphism_from_polys(out_src, comp.tgt, out, n, octx,
                               comp.base_vars, comp.base_gens, "x")


def _shift_branch(X: ClosedSubset, frame: _ShiftFrame, h: Polynomial,
                  depth: int, trace: RecursionTrace):
    """Child cover for the locus h != 0, through the shifted functor.

    Stashes on the frame everything the final assembly needs: the
    embedding inverse at level d and the variable bookkeeping.
    """
    Q, m, d = frame.Q, frame.m, frame.d
    inst_qm = FunctorInstance(Q, m)
    w_var = Variable("w", (depth,), 0)
    q_vars = tuple(Variable("q", (depth, s, c, _coord_digits(word)), 0)
                   for (s, c, word) in inst_qm.coords)
    base2 = X.base_vars + (w_var,) + q_vars

    # equations of the shifted subset at level m over the enlarged base:
    # substitute the decomposition into the level-2m equations, pinning
    # constant slots to the embedded base point.  Raw generators do: the
    # children re-radicalize whenever a decision needs it.
    doubled = smear(X, 2 * m, radicalize=False)
    qr_inst = FunctorInstance(frame.shifted, m)
    u_vars = qr_inst.variables("y")
    ctx10 = RingContext(tuple(base2) + tuple(u_vars), QQ)
    q_of = {key: ctx10.var(v) for key, v in zip(inst_qm.coords, q_vars)}
    u_of = {key: ctx10.var(v) for key, v in zip(qr_inst.coords, u_vars)}
    labels_m = frame.labels(m)
    slot_poly = {}
    for lab in labels_m:
        slot_poly[lab] = frame.const_value(lab, q_of, ctx10) \
            if lab[0] == "c" else u_of[lab]
    winv_m = frame.winv[m]
    sub = {}
    for key2, var2 in zip(FunctorInstance(Q, 2 * m).coords,
                          doubled.inst_vars):
        acc = ctx10.zero()
        for lab in labels_m:
            c = winv_m.get((key2, lab))
            if c is not None:
                acc = acc + slot_poly[lab].scale(c)
        sub[var2] = acc
    for bv in X.base_vars:
        sub[bv] = ctx10.var(bv)
    gens10 = [g.substitute(sub, ctx10) for g in doubled.gens]
    h_sub = {X.coord_var(key): q_of[key] for key in inst_qm.coords}
    for bv in X.base_vars:
        h_sub[bv] = ctx10.var(bv)
    h_q = h.substitute(h_sub, ctx10)
    gens10.append(ctx10.var(w_var) * h_q - ctx10.one())
    shifted_subset = ClosedSubset(frame.shifted, m, gens10, base2, "y",
                                  ctx10)

    # project out the distinguished copy: equations of the child subset
    r_vars_m = [shifted_subset.coord_var(k) for k in frame.r_keys(m)]
    rctx10, g2 = eliminate(ctx10, gens10, r_vars_m)
    child = _child_after_removal(frame.shifted, frame.reduced, m, base2,
                                 "y", g2, rctx10)

    # embedding inverse: the distinguished coordinates as functions of
    # the rest, read off at level d where the extension is determined.
    # Any defining ideal yields a valid congruence, so work with the raw
    # generators and only radicalize if the reduction gets stuck.
    level_d = smear(shifted_subset, d, radicalize=False)
    r_keys_d = frame.r_keys(d)
    r_vars_d = [level_d.coord_var(k) for k in r_keys_d]
    ectx = level_d.ctx.elimination_order(r_vars_d)
    e_gens = [g.map_context(ectx) for g in level_d.gens]
    gb_e = groebner(ectx, e_gens)
    r_var_set = set(r_vars_d)
    rho = {}
    retried = False
    for key, rv in zip(r_keys_d, r_vars_d):
        nf = normal_form(ectx.var(rv), gb_e)
        if any(v in r_var_set for v in nf.variables_present()):
            if not retried:
                retried = True
                gb_e = groebner(ectx, radical(ectx, e_gens))
                nf = normal_form(ectx.var(rv), gb_e)
            if any(v in r_var_set for v in nf.variables_present()):
                raise UnsupportedAlgebraError(
                    "projection of the shifted subset is not an embedding")
        rho[key] = nf

    src, comps = _run(child, depth + 1, trace, None)
    assert functor_less(frame.reduced, Q)
    frame.rho = rho
    frame.level_d_vars = list(zip(FunctorInstance(frame.shifted, d).coords,
                                  level_d.inst_vars))
    frame.base2 = base2
    frame.q_vars = q_vars
    return src, comps


def _assemble_shift_component(comp: Morphism, frame: _ShiftFrame,
                              out_src, offsets) -> Morphism:
    """projection . embedding-inverse . comp, in coordinates, as one
    morphism onto Q.

    The raw composite agrees with an equivariant family only on the
    component's base locus, so recognition runs modulo the base ideal.
    """
    Q, m, d = frame.Q, frame.m, frame.d
    _, _, polys = comp.instance_polys(d, "x")
    oinst = FunctorInstance(out_src, d)
    ovars = oinst.variables("x")
    octx = RingContext(comp.base_vars + tuple(ovars), QQ)
    sub = _source_renaming(comp.src, out_src, offsets, d, octx, ovars,
                           oinst)
    fiber = {key: p.substitute(sub, octx) for key, p in polys.items()}

    r_keys_d = set(frame.r_keys(d))
    rho_sub = {}
    for key, var in frame.level_d_vars:
        if key not in r_keys_d:
            rho_sub[var] = fiber[_remove_top_key(frame.shifted, key)]
    for bv in frame.base2:
        rho_sub[bv] = octx.var(bv)
    r_polys = {key: frame.rho[key].substitute(rho_sub, octx)
               for key in r_keys_d}

    q_of = {key: octx.var(v)
            for key, v in zip(FunctorInstance(Q, m).coords, frame.q_vars)}
    u_poly = {}
    for lab in frame.labels(d):
        if lab[0] == "c":
            u_poly[lab] = frame.const_value(lab, q_of, octx)
        elif lab in r_keys_d:
            u_poly[lab] = r_polys[lab]
        else:
            u_poly[lab] = fiber[_remove_top_key(frame.shifted, lab)]

    winv_d = frame.winv[d]
    labels_d = frame.labels(d)
    y_poly = {}
    for qk in FunctorInstance(Q, m + d).coords:
        acc = octx.zero()
        for lab in labels_d:
            c = winv_d.get((qk, lab))
            if c is not None:
                acc = acc + u_poly[lab].scale(c)
        y_poly[qk] = acc
    one, zero = Fraction(1), Fraction(0)
    proj = [[one if j == m + i else zero for j in range(m + d)]
            for i in range(d)]
    pi_mat = functor_map_matrix(Q, proj, m + d, d, zero)
    out = {}
    for (tk, sk), c in pi_mat.items():
        cur = out.get(tk, octx.zero())
        out[tk] = cur + y_poly[sk].scale(c)
    return morphism_from_polys(out_src, Q, out, d, octx,
                               comp.base_vars, comp.base_gens, "x",
                               modulo=comp.base_gens)
