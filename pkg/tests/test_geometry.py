"""Closed subsets, smear, and morphism image/recognition tests.

The two smear oracles are frozen by hand:
  * the line V(x.1) in K^1 induces the origin (y.1, y.2) in K^2;
  * the rank<=1 quadrics in 2 variables induce, in 3 variables, the
    2x2 minors of the symmetric coefficient matrix.
Both expected ideals are written out explicitly below and compared as
sets, so the smear implementation is checked against independent data.
"""

from fractions import Fraction

import pytest

from schurvar.errors import InputError, NotAMorphismError
from schurvar.geometry import (
    ClosedSubset, Morphism, base_variables, instance_context,
    morphism_from_polys, smear,
)
from schurvar.rings import QQ, RingContext, Variable
from schurvar.schur import FunctorInstance, PolyFunctor, PolyMapSpace

V1 = PolyFunctor([(1,)])
S2 = PolyFunctor([(2,)])


def key_for(functor, lam, copy, word):
    """Instance coordinate key (group index, copy, word) of a summand."""
    for s, (mu, mult) in enumerate(functor.groups()):
        if mu == tuple(lam):
            assert copy < mult
            return (s, copy, tuple(word))
    raise KeyError(lam)


def coord_map(X):
    return {key: X.ctx.var(v)
            for key, v in zip(X.instance().coords, X.inst_vars)}


def subset_from(functor, n, build, base_vars=()):
    """build(ctx, coord-poly dict keyed by instance coordinate) -> gens."""
    ctx, ivars = instance_context(functor, n, "y", base_vars)
    inst = FunctorInstance(functor, n)
    cvars = {key: ctx.var(v) for key, v in zip(inst.coords, ivars)}
    return ClosedSubset(functor, n, build(ctx, cvars), base_vars, "y", ctx)


# -- the coordinate dictionary of S^2(K^n) -------------------------------
# An element q = sum_T q_T v_T with v_(i,i) = 2 e_i e_i and
# v_(i,j) = e_i e_j + e_j e_i (i<j), so as a symmetric matrix
# M[i][i] = 2 q_(i,i) and M[i][j] = q_(i,j).  A split vector square
# (a1 e_1 + ... )^2 has q_(i,i) = a_i^2 / 2 and q_(i,j) = a_i a_j.


def sym_matrix(ctx, cvars, n):
    def entry(i, j):
        i, j = min(i, j), max(i, j)
        key = (0, 0, (i, j))
        p = cvars[key]
        return p + p if i == j else p
    return [[entry(i + 1, j + 1) for j in range(n)] for i in range(n)]


def rank1_point(X, vec):
    """Coordinates of (sum v_i e_i)^2 in the instance of S2 at n."""
    pt = {}
    for (s, c, word), v in zip(X.instance().coords, X.inst_vars):
        i, j = word
        val = Fraction(vec[i - 1]) * Fraction(vec[j - 1])
        pt[v] = val / 2 if i == j else val
    return pt


class TestClosedSubset:
    def test_rejects_foreign_variables(self):
        ctx, _ = instance_context(V1, 2)
        alien = RingContext((Variable("q", (1,), 0),), QQ)
        with pytest.raises(InputError):
            ClosedSubset(V1, 2, [alien.var(alien.variables[0])])

    def test_point_membership(self):
        X = subset_from(V1, 2, lambda ctx, cv:
                        [cv[(0, 0, (1,))] - cv[(0, 0, (2,))]])
        v1, v2 = X.inst_vars
        assert X.contains_point({v1: 3, v2: 3})
        assert not X.contains_point({v1: 3, v2: 4})
        with pytest.raises(InputError):
            X.contains_point({v1: 3})

    def test_containment_and_equality(self):
        line = subset_from(V1, 2, lambda ctx, cv: [cv[(0, 0, (1,))]])
        origin = subset_from(V1, 2, lambda ctx, cv: list(cv.values()))
        assert line.contains(origin)
        assert not origin.contains(line)
        doubled = subset_from(V1, 2, lambda ctx, cv:
                              [cv[(0, 0, (1,))] * cv[(0, 0, (1,))]])
        assert line.same_set(doubled)

    def test_prime_components_split_union_of_lines(self):
        X = subset_from(V1, 2, lambda ctx, cv:
                        [cv[(0, 0, (1,))] * cv[(0, 0, (2,))]])
        comps = X.prime_components()
        assert len(comps) == 2
        assert all(prime for _, prime, _ in comps)
        fps = {c.fingerprint() for c, _, _ in comps}
        assert len(fps) == 2
        assert all(X.contains(c) for c, _, _ in comps)

    def test_dimension_and_emptiness(self):
        X = subset_from(V1, 2, lambda ctx, cv: [cv[(0, 0, (1,))]])
        assert X.dimension() == 1
        assert not X.is_empty()
        E = subset_from(V1, 2, lambda ctx, cv:
                        [cv[(0, 0, (1,))], ctx.one()])
        assert E.is_empty()


class TestSmear:
    def test_line_in_one_variable_smears_to_origin(self):
        X = subset_from(V1, 1, lambda ctx, cv: [cv[(0, 0, (1,))]])
        Y = smear(X, 2)
        expected = subset_from(V1, 2, lambda ctx, cv: list(cv.values()))
        assert Y.same_set(expected)

    def test_smear_down_recovers_origin(self):
        X = subset_from(V1, 1, lambda ctx, cv: [cv[(0, 0, (1,))]])
        Y = smear(smear(X, 2), 1)
        assert Y.same_set(X)

    def test_smear_fixes_stable_set(self):
        X = subset_from(V1, 1, lambda ctx, cv: [cv[(0, 0, (1,))]])
        assert smear(X, 1).same_set(X)

    def test_determinant_smears_to_minors(self):
        def det2(ctx, cv):
            M = sym_matrix(ctx, cv, 2)
            return [M[0][0] * M[1][1] - M[0][1] * M[1][0]]
        X = subset_from(S2, 2, det2)
        Y = smear(X, 3)

        def minors3(ctx, cv):
            M = sym_matrix(ctx, cv, 3)
            out = []
            for r1 in range(3):
                for r2 in range(r1 + 1, 3):
                    for c1 in range(3):
                        for c2 in range(c1 + 1, 3):
                            out.append(M[r1][c1] * M[r2][c2]
                                       - M[r1][c2] * M[r2][c1])
            return out
        expected = subset_from(S2, 3, minors3)
        assert Y.same_set(expected)
        for vec in [(1, 2, 3), (0, 1, 5), (7, 0, 0), (2, -3, 4)]:
            assert Y.contains_point(rank1_point(Y, vec))
        off = rank1_point(Y, (1, 1, 1))
        off[Y.inst_vars[0]] += 1
        assert not Y.contains_point(off)

    def test_constant_summand_passes_through(self):
        Q = PolyFunctor([(), (1,)])

        def mixed(ctx, cv):
            y0 = cv[key_for(Q, (), 0, ())]
            y1 = cv[key_for(Q, (1,), 0, (1,))]
            return [y0 * y1 - y0]
        X = subset_from(Q, 1, mixed)
        Y = smear(X, 2)
        expected = subset_from(Q, 2, lambda ctx, cv:
                               [cv[key_for(Q, (), 0, ())]])
        assert Y.same_set(expected)

    def test_base_constraints_survive(self):
        b = base_variables(1)
        X = subset_from(V1, 1,
                        lambda ctx, cv: [ctx.var(b[0])
                                         * cv[(0, 0, (1,))]],
                        base_vars=b)
        Y = smear(X, 2)
        expected = subset_from(
            V1, 2,
            lambda ctx, cv: [ctx.var(b[0]) * p for p in cv.values()],
            base_vars=b)
        assert Y.same_set(expected)


class TestMorphism:
    def veronese(self):
        return Morphism(V1, S2, [1])

    def test_instance_polys_shape(self):
        f = self.veronese()
        ctx, svars, polys = f.instance_polys(2)
        assert len(svars) == 2
        assert len(polys) == 3
        for key, p in polys.items():
            assert not p.is_zero()
            assert p.total_degree() == 2

    def test_image_is_rank_one_locus(self):
        f = self.veronese()
        img = f.image(2)

        def det2(ctx, cv):
            M = sym_matrix(ctx, cv, 2)
            return [M[0][0] * M[1][1] - M[0][1] * M[1][0]]
        expected = subset_from(S2, 2, det2)
        assert img.same_set(expected)

    def test_image_matches_smear_one_level_up(self):
        f = self.veronese()

        def det2(ctx, cv):
            M = sym_matrix(ctx, cv, 2)
            return [M[0][0] * M[1][1] - M[0][1] * M[1][0]]
        X = subset_from(S2, 2, det2)
        assert f.image(3).same_set(smear(X, 3))

    def test_evaluate_lands_in_image(self):
        f = self.veronese()
        img = f.image(2)
        ctx, svars, _ = f.instance_polys(2)
        vals = f.evaluate(2, {svars[0]: Fraction(2), svars[1]: Fraction(3)})
        pt = {v: vals[key] for key, v in
              zip(img.instance().coords, img.inst_vars)}
        assert img.contains_point(pt)
        assert any(q != 0 for q in vals.values())

    def test_wrong_coefficient_count_rejected(self):
        with pytest.raises(InputError):
            Morphism(V1, S2, [1, 2])

    def test_diagonal_image_with_base_constraint(self):
        b = base_variables(2)
        bctx = RingContext(b, QQ)
        W = PolyFunctor([(1,), (1,)])
        space = PolyMapSpace(V1, W)
        assert space.dim == 2
        f = Morphism(V1, W, [bctx.var(b[0]), bctx.var(b[1])],
                     base_vars=b, base_gens=[bctx.var(b[0])
                                             - bctx.var(b[1])])
        img = f.image(1)
        inst = FunctorInstance(W, 1)
        k0, k1 = inst.coords
        cv = coord_map(img)
        assert len(img.gens) == 1
        diff = cv[k0] - cv[k1]
        diffm = cv[k0].scale(Fraction(-1)) + cv[k1]
        assert img.gens[0] in (diff, diffm) or \
            img.same_set(ClosedSubset(W, 1, [diff], (), "y", img.ctx))

    def test_base_only_constants_reach_constant_summand(self):
        b = base_variables(1)
        bctx = RingContext(b, QQ)
        T = PolyFunctor([(), (1,)])
        space = PolyMapSpace(V1, T)
        assert space.dim == 2
        assert sorted(space.degrees) == [0, 1]
        coeffs = [None, None]
        coeffs[space.degrees.index(0)] = bctx.var(b[0])
        coeffs[space.degrees.index(1)] = bctx.one()
        f = Morphism(V1, T, coeffs, base_vars=b,
                     base_gens=[bctx.var(b[0]) * bctx.var(b[0])
                                + bctx.one()])
        img = f.image(1)
        inst = FunctorInstance(T, 1)
        cv = coord_map(img)
        y0 = cv[key_for(T, (), 0, ())]
        want = y0 * y0 + img.ctx.one()
        gb = img.groebner()
        from schurvar.ideals import ideal_membership
        assert ideal_membership(want, gb)
        assert img.dimension() == 1


class TestMorphismRecognition:
    def test_round_trip(self):
        f = Morphism(V1, S2, [Fraction(3, 2)])
        ctx, svars, polys = f.instance_polys(2)
        g = morphism_from_polys(V1, S2, polys, 2, ctx)
        assert list(g.coeffs) == list(f.coeffs)

    def test_non_equivariant_family_rejected(self):
        ctx, svars = instance_context(S2, 2, "x")
        inst = FunctorInstance(S2, 2)
        x = {key: ctx.var(v) for key, v in zip(inst.coords, svars)}
        polys = dict(x)
        k0 = inst.coords[0]
        polys[k0] = x[k0] + x[inst.coords[1]]
        with pytest.raises(NotAMorphismError):
            morphism_from_polys(S2, S2, polys, 2, ctx)

    def test_identity_recognised(self):
        ctx, svars = instance_context(S2, 2, "x")
        inst = FunctorInstance(S2, 2)
        polys = {key: ctx.var(v) for key, v in zip(inst.coords, svars)}
        g = morphism_from_polys(S2, S2, polys, 2, ctx)
        h = g.instance_polys(2, "x")[2]
        assert all(h[key] == polys[key] for key in polys)

    def test_unknown_variable_rejected(self):
        w = Variable("w", (1,), 0)
        ctx, svars = instance_context(V1, 2, "x")
        ectx = ctx.extended((w,))
        tinst = FunctorInstance(S2, 2)
        polys = {tinst.coords[0]: ectx.var(w)}
        with pytest.raises(NotAMorphismError):
            morphism_from_polys(V1, S2, polys, 2, ectx)

    def test_base_coefficients_recovered(self):
        b = base_variables(1)
        bctx = RingContext(b, QQ)
        f = Morphism(V1, S2, [bctx.var(b[0])], base_vars=b)
        ctx, svars, polys = f.instance_polys(2)
        g = morphism_from_polys(V1, S2, polys, 2, ctx, base_vars=b)
        assert list(g.coeffs) == list(f.coeffs)
