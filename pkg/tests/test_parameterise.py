"""Parametrisation tests.

The headline checks compare the union of component image closures
against an independent route: the induced subset computed directly from
the defining equations (smear).  For the determinant surface the level-3
image is additionally frozen against the hand-written 2x2 minors of the
symmetric coefficient matrix, so that route does not depend on smear
either.  Soundness (image contained in the subset) is checked
symbolically by pulling the subset equations back through every
component.
"""

from fractions import Fraction

import pytest

from schurvar.geometry import ClosedSubset, instance_context, smear
from schurvar.ideals import groebner, normal_form, radical_membership
from schurvar.parameterise import ParamResult, RecursionTrace, parameterise
from schurvar.rings import QQ, RingContext, Variable
from schurvar.schur import FunctorInstance, PolyFunctor

V1 = PolyFunctor([(1,)])
S2 = PolyFunctor([(2,)])


def subset_from(functor, n, build, base_vars=()):
    """build(ctx, coord-poly dict keyed by instance coordinate) -> gens."""
    ctx, ivars = instance_context(functor, n, "y", base_vars)
    inst = FunctorInstance(functor, n)
    cvars = {key: ctx.var(v) for key, v in zip(inst.coords, ivars)}
    return ClosedSubset(functor, n, build(ctx, cvars), base_vars, "y", ctx)


def det_subset():
    """Vanishing of the 2x2 symmetric determinant, coords q_(i,j)."""

    def build(ctx, cv):
        a = cv[(0, 0, (1, 1))]
        b = cv[(0, 0, (1, 2))]
        c = cv[(0, 0, (2, 2))]
        return [(a + a) * (c + c) - b * b]

    return subset_from(S2, 2, build)


def assert_cover(X, levels, max_components=None):
    res = parameterise(X)
    for n in levels:
        assert smear(X, n).same_set(res.image_closure_instance(n)), n
    if max_components is not None:
        assert len(res.components) <= max_components
    return res


def assert_sound(X, res, n):
    """Every subset equation pulls back to 0 on every component."""
    Y = smear(X, n)
    tinst = FunctorInstance(X.functor, n)
    for comp in res.components:
        ictx, svars, polys = comp.instance_polys(n, "x")
        sub = {}
        for key, v in zip(tinst.coords, Y.inst_vars):
            sub[v] = polys[key]
        for v in X.base_vars:
            sub[v] = ictx.var(v)
        base_gb = groebner(ictx, [g.map_context(ictx)
                                  for g in comp.base_gens])
        for g in Y.gens:
            nf = normal_form(g.substitute(sub, ictx), base_gb)
            assert nf.is_zero() or radical_membership(ictx, nf, base_gb)


class TestWorkedCases:
    def test_whole_space_is_covered_by_identity(self):
        X = subset_from(V1, 1, lambda ctx, cv: [])
        res = assert_cover(X, (1, 2))
        assert res.source == V1
        assert len(res.components) == 1
        comp = res.components[0]
        # the single component restricts to the identity at every level
        for n in (1, 2, 3):
            _, svars, polys = comp.instance_polys(n, "x")
            inst = FunctorInstance(V1, n)
            for key, v in zip(inst.coords, svars):
                assert str(polys[key]) == str(polys[key].ctx.var(v))

    def test_line_origin_image(self):
        X = subset_from(V1, 1, lambda ctx, cv: [cv[(0, 0, (1,))]])
        res = assert_cover(X, (1, 2))
        # the image closure at every level is the origin
        for n in (1, 2):
            img = res.image_closure_instance(n)
            origin = subset_from(
                V1, n, lambda ctx, cv: [p for p in cv.values()])
            assert origin.same_set(img)
        assert_sound(X, res, 2)

    def test_determinant_cover_matches_smear(self):
        X = det_subset()
        res = assert_cover(X, (1, 2, 3))
        assert_sound(X, res, 2)

    def test_determinant_level3_matches_minor_oracle(self):
        # rank <= 1 symmetric 3x3: all 2x2 minors of M, with
        # M[i][i] = 2 q_(i,i), M[i][j] = q_(i,j)
        X = det_subset()
        res = parameterise(X)
        img = res.image_closure_instance(3)

        def minors(ctx, cv):
            def entry(i, j):
                i, j = min(i, j), max(i, j)
                p = cv[(0, 0, (i, j))]
                return p + p if i == j else p

            out = []
            for i in range(1, 4):
                for j in range(i, 4):
                    for k in range(1, 4):
                        for l in range(k, 4):
                            m = (entry(i, k) * entry(j, l)
                                 - entry(i, l) * entry(j, k))
                            if not m.is_zero():
                                out.append(m)
            return out

        expected = subset_from(S2, 3, minors)
        assert expected.same_set(img)

    def test_squaring_graph_cover(self):
        # pairs (q, z) with q = z^2 inside S^2 + S^1
        G = PolyFunctor([(2,), (1,)])

        def build(ctx, cv):
            q11 = cv[(0, 0, (1, 1))]
            q12 = cv[(0, 0, (1, 2))]
            q22 = cv[(0, 0, (2, 2))]
            z1 = cv[(1, 0, (1,))]
            z2 = cv[(1, 0, (2,))]
            return [q11 + q11 - z1 * z1, q12 - z1 * z2,
                    q22 + q22 - z2 * z2]

        X = subset_from(G, 2, build)
        assert_cover(X, (1, 2))


class TestEdgeCases:
    def test_empty_subset_has_no_components(self):
        X = subset_from(V1, 1, lambda ctx, cv: [ctx.one()])
        res = parameterise(X)
        assert res.components == ()
        for n in (1, 2):
            img = res.image_closure_instance(n)
            assert smear(X, n).same_set(img)
            assert img.is_empty()

    def test_constant_summand(self):
        C = PolyFunctor([(1,), ()])

        def build(ctx, cv):
            z = cv[(0, 0, (1,))]
            c = cv[(1, 0, ())]
            return [z * c - z]

        X = subset_from(C, 1, build)
        assert_cover(X, (1, 2))

    def test_base_linked_equation(self):
        bv = (Variable("b", (0,), 0),)

        def build(ctx, cv):
            return [cv[(0, 0, (1,))] * ctx.var(bv[0])]

        X = subset_from(V1, 1, build, base_vars=bv)
        res = assert_cover(X, (1, 2))
        assert_sound(X, res, 2)

    def test_diagonal_in_two_copies(self):
        D = PolyFunctor([(1,), (1,)])

        def build(ctx, cv):
            return [cv[(0, 0, (1,))] - cv[(0, 1, (1,))]]

        X = subset_from(D, 1, build)
        res = assert_cover(X, (1, 2))
        assert_sound(X, res, 2)

    def test_level_zero_input(self):
        X = subset_from(V1, 0, lambda ctx, cv: [])
        assert_cover(X, (1, 2))

    def test_level_zero_with_base_equation(self):
        bv = (Variable("b", (0,), 0),)

        def build(ctx, cv):
            b = ctx.var(bv[0])
            return [b * b - b]

        X = subset_from(V1, 0, build, base_vars=bv)
        assert_cover(X, (1,))


class TestRecursionTrace:
    def test_trace_is_recorded_and_nested(self):
        trace = RecursionTrace()
        parameterise(det_subset(), trace=trace)
        assert trace.nodes
        assert trace.nodes[0].depth == 0
        prev = -1
        for node in trace.nodes:
            # pre-order: depth never jumps by more than one
            assert node.depth <= prev + 1
            prev = node.depth
        assert len(trace.lines()) == len(trace.nodes)

    def test_first_equation_degree_drops_along_derivative_chain(self):
        # whenever a child call keeps the same eliminated ideal, the
        # x-degree of its first surviving equation must strictly drop;
        # this is the measure that forces termination
        trace = RecursionTrace()
        parameterise(det_subset(), trace=trace)
        nodes = trace.nodes
        for i, node in enumerate(nodes):
            if node.action != "split":
                continue
            child = next((m for m in nodes[i + 1:]
                          if m.depth == node.depth + 1), None)
            if child is None or child.action != "split":
                continue
            if child.g_hash == node.g_hash:
                assert child.x_degree < node.x_degree


class TestResultShape:
    def test_components_share_source_and_target(self):
        X = det_subset()
        res = parameterise(X)
        assert isinstance(res, ParamResult)
        for comp in res.components:
            assert comp.src == res.source
            assert comp.tgt == S2

    def test_base_prefix_preserved(self):
        bv = (Variable("b", (0,), 0),)

        def build(ctx, cv):
            return [cv[(0, 0, (1,))] * ctx.var(bv[0])]

        X = subset_from(V1, 1, build, base_vars=bv)
        res = parameterise(X)
        for comp in res.components:
            assert comp.base_vars[:1] == bv
