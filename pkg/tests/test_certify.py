"""Certificate search tests.

The negative expectation (three cubes do not degenerate to two) is
frozen first by an independent oracle: the 3x6 matrix of second-order
coefficients of a sum of two cubes has all 3x3 minors identically zero,
while the same matrix at x^3+y^3+z^3 has an invertible 3x3 block.  That
computation runs in sympy and never touches this package.

The positive expectation is the classical border-rank certificate: the
limit of cubes (t^2 v + t^-1 u)^3 + (t^2 v - t^-1 u)^3 as t -> 0 equals
6 u^2 v, which needs window {-1, ..., 2}.
"""

from fractions import Fraction

import pytest

from schurvar.certify import (
    CertifyState, GenericPointContext, WitnessCurve, build_ansatz_system,
    certify, compute_bounds, extract_witness, feasibility, witness_valid,
)
from schurvar.errors import UnsupportedAlgebraError
from schurvar.geometry import Morphism, instance_context, morphism_from_polys
from schurvar.rings import QQ, RingContext, Variable
from schurvar.schur import FunctorInstance, PolyFunctor, PolyMapSpace

V1 = PolyFunctor([(1,)])
S2 = PolyFunctor([(2,)])
S3 = PolyFunctor([(3,)])
TWO_LINES = PolyFunctor([(1,), (1,)])
THREE_LINES = PolyFunctor([(1,), (1,), (1,)])


# -- independent oracle ---------------------------------------------------


class TestWaringOracle:
    def test_two_cubes_kill_the_minors_but_three_do_not(self):
        import sympy as sp

        x = sp.symbols("x1:4")
        u = sp.symbols("u1:4")
        v = sp.symbols("v1:4")
        F2 = (sum(ui * xi for ui, xi in zip(u, x))) ** 3 \
            + (sum(vi * xi for vi, xi in zip(v, x))) ** 3
        F3 = x[0] ** 3 + x[1] ** 3 + x[2] ** 3
        mons = [x[i] * x[j] for i in range(3) for j in range(i, 3)]

        def poly_entry(F, xi, mon):
            return sp.Poly(sp.expand(sp.diff(F, xi)), *x).coeff_monomial(mon)

        M2 = sp.Matrix(3, 6, lambda i, j: poly_entry(F2, x[i], mons[j]))
        M3 = sp.Matrix(3, 6, lambda i, j: poly_entry(F3, x[i], mons[j]))
        # every 3x3 minor of the two-cube matrix vanishes identically
        from itertools import combinations
        for cols in combinations(range(6), 3):
            minor = M2[:, list(cols)].det()
            assert sp.expand(minor) == 0
        # while x^3+y^3+z^3 keeps an invertible block
        square_cols = [mons.index(x[i] ** 2) for i in range(3)]
        assert M3[:, square_cols].det() != 0


# -- morphism construction helpers ---------------------------------------


def _kappa(n):
    """Third-power coordinate normalisation: the T-coordinate of v^3 is
    kappa[T] * v_i v_j v_k, read off the one-dimensional map space."""
    probe = Morphism(V1, S3, [1])
    _, _, polys = probe.instance_polys(n, "x")
    out = {}
    for (s, c, word), p in polys.items():
        assert len(p.coeffs) == 1
        out[word] = next(iter(p.coeffs.values()))
    return out


def sum_of_cubes(k, n=3):
    """(w_1, ..., w_k) -> w_1^3 + ... + w_k^3."""
    src = PolyFunctor([(1,)] * k)
    ctx, ivars = instance_context(src, n, "x")
    inst = FunctorInstance(src, n)
    cv = {key: ctx.var(v) for key, v in zip(inst.coords, ivars)}
    kap = _kappa(n)
    polys = {}
    for key in FunctorInstance(S3, n).coords:
        word = key[2]
        total = ctx.zero()
        for c in range(k):
            term = ctx.const(kap[word])
            for i in word:
                term = term * cv[(0, c, (i,))]
            total = total + term
        polys[key] = total
    return morphism_from_polys(src, S3, polys, n, ctx)


def six_u2v(n=3):
    """(u, v) -> 6 u^2 v, the polarised double-contact cubic."""
    ctx, ivars = instance_context(TWO_LINES, n, "x")
    inst = FunctorInstance(TWO_LINES, n)
    cv = {key: ctx.var(v) for key, v in zip(inst.coords, ivars)}
    kap = _kappa(n)

    def u(i):
        return cv[(0, 0, (i,))]

    def v(i):
        return cv[(0, 1, (i,))]

    polys = {}
    for key in FunctorInstance(S3, n).coords:
        i, j, k = key[2]
        body = v(i) * u(j) * u(k) + u(i) * v(j) * u(k) \
            + u(i) * u(j) * v(k)
        polys[key] = body.scale(Fraction(2) * kap[key[2]])
    return morphism_from_polys(TWO_LINES, S3, polys, n, ctx)


def _basis_layout(src, tgt, d):
    """For a direct sum of lines, map (target copy, source copy) to the
    basis index and scalar of the matrix-unit map."""
    space = PolyMapSpace(src, tgt)
    t_inst = FunctorInstance(tgt, d)
    layout = {}
    for i in range(space.dim):
        unit = [1 if j == i else 0 for j in range(space.dim)]
        _, _, polys = Morphism(src, tgt, unit).instance_polys(d, "p")
        for (s, c, word), p in polys.items():
            if p.is_zero() or word != (1,):
                continue
            assert len(p.coeffs) == 1
            exp, scal = next(iter(p.coeffs.items()))
            pv = [v for v, k in zip(p.ctx.variables, exp) if k]
            assert len(pv) == 1
            layout[(c, pv[0].index[1])] = (i, scal)
    return layout


# -- bounds ---------------------------------------------------------------


class TestBounds:
    def test_cubic_window(self):
        alpha = sum_of_cubes(2)
        b = compute_bounds(alpha, 1)
        assert (b.d1, b.d2, b.n1) == (1, 2, 0)
        assert b.provenance == "trivial-I-zero"
        assert list(b.window()) == [-1, 0, 1, 2]

    def test_linear_map_needs_no_positive_exponents(self):
        alpha = Morphism(TWO_LINES, V1, [1, 0])
        for d1 in (0, 1, 3):
            assert compute_bounds(alpha, d1).d2 == 0

    def test_quadratic_window_grows_linearly(self):
        alpha = Morphism(V1, S2, [1])
        assert compute_bounds(alpha, 2).d2 == 2

    def test_base_equations_need_lifting_constants(self):
        bv = (Variable("b", (0,), 0),)
        bctx = RingContext(bv, QQ)
        eq = bctx.var(bv[0]) * bctx.var(bv[0]) - bctx.var(bv[0])
        alpha = Morphism(V1, V1, [bctx.one()], bv, [eq])
        with pytest.raises(UnsupportedAlgebraError):
            compute_bounds(alpha, 1)
        # weakest possible constants: the residual order can stay zero
        assert compute_bounds(alpha, 1, greenberg=(1, 1, 0)).n1 == 0
        # slower lifting pushes both the order and the window up
        b = compute_bounds(alpha, 1, greenberg=(5, 2, 1))
        assert b.n1 >= 5 - 2 and b.d2 >= b.n1 - 1
        assert b.provenance == "user-supplied"


# -- feasibility and extraction basics ------------------------------------


def _plain_system(gens_build):
    c = Variable("c", (0, 0), 0)
    ctx = RingContext((c,), QQ)
    return ctx, gens_build(ctx, ctx.var(c))


class TestFeasibility:
    def test_quadratic_with_roots_is_feasible(self):
        ctx, gens = _plain_system(lambda ctx, c: [c * c - ctx.one()])
        assert feasibility(ctx, gens)

    def test_contradictory_pins_are_not(self):
        ctx, gens = _plain_system(
            lambda ctx, c: [c, c - ctx.one()])
        assert not feasibility(ctx, gens)

    def test_irrational_point_feasible_but_not_extracted(self):
        alpha = sum_of_cubes(2)
        gpc = GenericPointContext(RingContext((), QQ), ())
        bounds = compute_bounds(alpha, 0)
        system = build_ansatz_system(gpc, alpha, alpha, bounds)
        c = Variable("c", (0, 0), 0)
        ctx = RingContext((c,), QQ)
        two = ctx.const(Fraction(2))
        fake = type(system)(ctx, [ctx.var(c) * ctx.var(c) - two],
                            {c: (0, 0)}, {}, bounds, system.d_c)
        assert feasibility(fake.ctx, fake.gens)
        assert extract_witness(fake) is None


# -- the classical certificate --------------------------------------------


class TestBorderRankCertificate:
    def test_infeasible_with_no_negative_exponents(self):
        state = certify(sum_of_cubes(2), six_u2v(), max_d1=0)
        assert state.status == "infeasible-at-current-d1"

    def test_certificate_found_at_d1_one(self):
        alpha = sum_of_cubes(2)
        beta = six_u2v()
        state = certify(alpha, beta)
        assert state.status == "true"
        w = state.witness()
        assert w is not None
        assert (w.d1, w.d2) == (1, 2)

    def test_paper_values_solve_the_system(self):
        # gamma(t): (u, v) -> (t^2 v + t^-1 u, t^2 v - t^-1 u)
        alpha = sum_of_cubes(2)
        beta = six_u2v()
        gpc = GenericPointContext(RingContext((), QQ), ())
        bounds = compute_bounds(alpha, 1)
        layout = _basis_layout(TWO_LINES, TWO_LINES, 3)
        gamma: dict = {}

        def put(tgt_copy, src_copy, e, val):
            i, scal = layout[(tgt_copy, src_copy)]
            gamma.setdefault(i, {})[e] = Fraction(val) / scal

        put(0, 0, -1, 1)
        put(0, 1, 2, 1)
        put(1, 0, -1, -1)
        put(1, 1, 2, 1)
        w = WitnessCurve(1, 2, gamma, {}, QQ)
        assert witness_valid(gpc, alpha, beta, bounds, w)

    def test_witness_resubstitutes_exactly(self):
        # expand alpha o gamma(t) coordinate-wise as a Laurent series:
        # no negative part, and the constant term is the target family
        alpha = sum_of_cubes(2)
        beta = six_u2v()
        state = certify(alpha, beta)
        w = state.witness()
        space = PolyMapSpace(TWO_LINES, TWO_LINES)
        p_vars = tuple(FunctorInstance(TWO_LINES, 3).variables("p"))
        ctx = RingContext(p_vars, QQ)

        coord = {}
        for i in range(space.dim):
            unit = [1 if j == i else 0 for j in range(space.dim)]
            _, _, polys = Morphism(TWO_LINES, TWO_LINES,
                                   unit).instance_polys(3, "p")
            for key, p in polys.items():
                if p.is_zero():
                    continue
                table = coord.setdefault(key, {})
                for e, c in w.gamma.get(i, {}).items():
                    q = p.map_context(ctx).scale(c)
                    table[e] = table[e] + q if e in table else q

        def cube_series(vec_tables):
            out: dict = {}
            kap = _kappa(3)
            for key in FunctorInstance(S3, 3).coords:
                word = key[2]
                acc: dict = {}
                parts = [vec_tables[(0, 0, (i,))] for i in word]
                for e1, p1 in parts[0].items():
                    for e2, p2 in parts[1].items():
                        for e3, p3 in parts[2].items():
                            e = e1 + e2 + e3
                            q = p1 * p2 * p3
                            acc[e] = acc[e] + q if e in acc else q
                out[key] = {e: p.scale(kap[word])
                            for e, p in acc.items() if not p.is_zero()}
            return out

        # per source copy, the image vector under gamma(t)
        first = {(0, 0, (i,)): coord.get((0, 0, (i,)), {})
                 for i in (1, 2, 3)}
        second = {(0, 0, (i,)): coord.get((0, 1, (i,)), {})
                  for i in (1, 2, 3)}
        total: dict = {}
        for branch in (cube_series(first), cube_series(second)):
            for key, table in branch.items():
                out = total.setdefault(key, {})
                for e, p in table.items():
                    out[e] = out[e] + p if e in out else p

        _, _, beta_polys = beta.instance_polys(3, "p")
        for key, table in total.items():
            for e, p in table.items():
                if e < 0:
                    assert p.is_zero(), (key, e)
            t0 = table.get(0, ctx.zero())
            assert (t0 - beta_polys[key].map_context(ctx)).is_zero()

    def test_window_monotone_in_d1(self):
        alpha = sum_of_cubes(2)
        beta = six_u2v()
        gpc = GenericPointContext(RingContext((), QQ), ())
        for d1 in (1, 2):
            bounds = compute_bounds(alpha, d1)
            system = build_ansatz_system(gpc, alpha, beta, bounds)
            assert feasibility(system.ctx, system.gens)


class TestNegativeControl:
    def test_three_cubes_stay_out_for_small_windows(self):
        alpha = sum_of_cubes(2)
        target = sum_of_cubes(3)
        state = certify(alpha, target, max_d1=2)
        assert state.status == "infeasible-at-current-d1"
        assert state.d1_reached() >= 2


class TestSelfInclusion:
    def corpus(self):
        yield Morphism(V1, V1, [1])
        yield Morphism(V1, S2, [1])
        yield Morphism(TWO_LINES, V1, [1, 0])
        yield sum_of_cubes(2)
        yield six_u2v()

    def test_every_morphism_contains_its_own_image(self):
        for alpha in self.corpus():
            state = certify(alpha, alpha, max_d1=0)
            assert state.status == "true", alpha.tgt
            assert state.d1_reached() == 0
