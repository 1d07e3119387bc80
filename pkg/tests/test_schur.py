"""Schur functor layer: tableau bases, induced maps, equivariant and
polynomial map spaces, shifts.

Dimension counts are checked against the hook content product, which is
computed independently of the tableau enumeration; induced-map matrices
are cross-checked through functoriality and first-order action agreement.
"""

import random
from fractions import Fraction

import pytest

from schurvar.errors import InputError
from schurvar.rings import QQ, RingContext, Variable
from schurvar.schur import (
    EquivariantMapSpace, FunctorInstance, PolyFunctor, PolyMapSpace,
    SchurInstance, ShiftDecomposition, SymPowerInstance, check_partition,
    conjugate, functor_less, functor_map_matrix, invert_rational_matrix,
    lr_coefficient, schur_map_matrix, shift_functor,
    shift_multiplicities, ssyt_tableaux, substitute_monomials, weyl_dim,
)


def partitions_upto(size: int):
    def gen(rest: int, mx: int):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, mx), 0, -1):
            for tail in gen(rest - p, p):
                yield (p,) + tail

    out = [()]
    for total in range(1, size + 1):
        out.extend(gen(total, total))
    return out


# ---------------------------------------------------------------------------
# tableaux and dimensions


def test_ssyt_count_matches_hook_content_product():
    for lam in partitions_upto(5):
        for n in range(0, 6):
            assert len(ssyt_tableaux(lam, n)) == weyl_dim(lam, n), (lam, n)


def test_conjugate_involution():
    for lam in partitions_upto(6):
        assert conjugate(conjugate(lam)) == lam


def test_partition_validation():
    with pytest.raises(InputError):
        check_partition((1, 2))
    with pytest.raises(InputError):
        check_partition((2, 0))


def test_canonical_summand_order():
    F = PolyFunctor([(), (1,), (3,), (2, 1), (1,)])
    assert F.summands == ((3,), (2, 1), (1,), (1,), ())
    assert F.top_summand() == (3,)
    assert F.degree() == 3
    assert F.degree0_dim() == 1
    assert F.pure_part().summands == ((3,), (2, 1), (1,), (1,))


def test_hand_checked_basis_for_two_one_shape():
    # shape (2,1) at n=2: symmetrize rows of [[1,1],[2]] and [[1,2],[2]],
    # antisymmetrize the first column
    inst = SchurInstance((2, 1), 2)
    assert inst.words == [(1, 1, 2), (1, 2, 2)]
    assert inst.tensors[0] == {(1, 1, 2): Fraction(2), (2, 1, 1): Fraction(-2)}
    assert inst.tensors[1] == {(1, 2, 2): Fraction(1), (2, 2, 1): Fraction(-1)}


def test_weight_is_tableau_content():
    inst = FunctorInstance(PolyFunctor([(2, 1)]), 3)
    for key in inst.coords:
        w = inst.weight(key)
        assert sum(w) == 3
        # diagonal action entry equals the content
        for a in range(1, 4):
            diag = inst.action(a, a)
            assert diag.get((key, key), Fraction(0)) == w[a - 1]


def _random_matrix(rng, m, n, span=3):
    return [[Fraction(rng.randint(-span, span)) for _ in range(n)]
            for _ in range(m)]


def _mat_mul(A, B):
    m, k, n = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), Fraction(0))
             for j in range(n)] for i in range(m)]


def test_functoriality_of_induced_maps():
    rng = random.Random(7)
    for lam in [(2,), (1, 1), (2, 1), (3,)]:
        for _ in range(3):
            phi = _random_matrix(rng, 2, 3)
            psi = _random_matrix(rng, 3, 2)
            left = schur_map_matrix(lam, _mat_mul(psi, phi), 3, 3,
                                    Fraction(0))
            a = schur_map_matrix(lam, phi, 3, 2, Fraction(0))
            b = schur_map_matrix(lam, psi, 2, 3, Fraction(0))
            comp = {}
            for (i, k), u in b.items():
                for (k2, j), v in a.items():
                    if k2 != k:
                        continue
                    comp[(i, j)] = comp.get((i, j), Fraction(0)) + u * v
            comp = {k: v for k, v in comp.items() if v}
            assert comp == left, lam


def test_identity_induces_identity():
    ident = [[Fraction(1) if i == j else Fraction(0) for j in range(3)]
             for i in range(3)]
    mat = schur_map_matrix((2, 1), ident, 3, 3, Fraction(0))
    inst = SchurInstance((2, 1), 3)
    expect = {(i, i): Fraction(1) for i in range(inst.dim)}
    assert mat == expect


def test_action_is_first_order_part_of_induced_map():
    # S_lam(I + t E_ab) = I + t * action(a, b) + O(t^2)
    t = Variable("t", (1,))
    ctx = RingContext((t,), QQ)
    lam = (2, 1)
    inst = SchurInstance(lam, 2)
    for a, b in [(1, 2), (2, 1)]:
        phi = [[ctx.one() if i == j else ctx.zero() for j in range(2)]
               for i in range(2)]
        phi[a - 1][b - 1] = phi[a - 1][b - 1] + ctx.var(t)
        mat = schur_map_matrix(lam, phi, 2, 2, ctx.zero())
        act = inst.action(a, b)
        for i in range(inst.dim):
            for j in range(inst.dim):
                entry = mat.get((i, j), ctx.zero())
                coeff = entry.partial(t).substitute({t: ctx.zero()}, ctx)
                expect = act.get((i, j), Fraction(0))
                assert coeff == ctx.const(expect), (i, j)


def test_functor_map_matrix_blocks():
    F = PolyFunctor([(1,), (1,), ()])
    phi = [[Fraction(2), Fraction(0)], [Fraction(1), Fraction(1)]]
    mat = functor_map_matrix(F, phi, 2, 2, Fraction(0))
    inst = FunctorInstance(F, 2)
    # the constant coordinate maps identically, each S_(1) copy by phi
    const_keys = [k for k in inst.coords if inst.summand_of(k) == ()]
    assert len(const_keys) == 1
    ck = const_keys[0]
    assert mat[(ck, ck)] == Fraction(1)
    vec_keys = [k for k in inst.coords if inst.summand_of(k) == (1,)]
    assert len(vec_keys) == 4
    for c in (0, 1):
        keys = [k for k in vec_keys if k[1] == c]
        k1, k2 = sorted(keys)
        assert mat[(k1, k1)] == Fraction(2)
        assert mat[(k2, k1)] == Fraction(1)
        assert mat[(k2, k2)] == Fraction(1)


# ---------------------------------------------------------------------------
# equivariant linear maps


def test_equivariant_map_space_dimensions():
    V = PolyFunctor([(1,)])
    VV = PolyFunctor([(1,), (1,)])
    S2 = PolyFunctor([(2,)])
    S3 = PolyFunctor([(3,)])
    mixed = PolyFunctor([(2,), (1, 1)])
    assert EquivariantMapSpace(V, V, 2).dim == 1
    assert EquivariantMapSpace(VV, V, 2).dim == 2
    assert EquivariantMapSpace(VV, VV, 2).dim == 4
    assert EquivariantMapSpace(V, S3, 3).dim == 0
    assert EquivariantMapSpace(S2, S2, 2).dim == 1
    assert EquivariantMapSpace(mixed, mixed, 2).dim == 2
    assert EquivariantMapSpace(S2, PolyFunctor([(1, 1)]), 2).dim == 0


def test_equivariant_map_extension_and_restriction_consistency():
    P = PolyFunctor([(2,), (1, 1)])
    Q = PolyFunctor([(2,), (1, 1)])
    space = EquivariantMapSpace(P, Q, 2)
    for n in (1, 3):
        mats = space.matrices_at(n)
        # commuting square against the coordinate embedding K^s -> K^t
        s, t = (n, 2) if n < 2 else (2, n)
        iota = [[Fraction(1) if i == j else Fraction(0) for j in range(s)]
                for i in range(t)]
        p_i = functor_map_matrix(P, iota, s, t, Fraction(0))
        q_i = functor_map_matrix(Q, iota, s, t, Fraction(0))
        for k in range(space.dim):
            if n < 2:
                small, big = mats[k], space.basis[k]
            else:
                small, big = space.basis[k], mats[k]
            lhs = _sparse_mul(q_i, small)
            rhs = _sparse_mul(big, p_i)
            assert lhs == rhs


def _sparse_mul(A, B):
    out = {}
    byk = {}
    for (k, j), v in B.items():
        byk.setdefault(k, []).append((j, v))
    for (i, k), u in A.items():
        for j, v in byk.get(k, ()):
            cur = out.get((i, j), Fraction(0)) + u * v
            if cur:
                out[(i, j)] = cur
            else:
                out.pop((i, j), None)
    return out


def test_equivariant_expand_round_trip():
    P = PolyFunctor([(2,), (1, 1)])
    space = EquivariantMapSpace(P, P, 2)
    combo = {}
    weights = [Fraction(3), Fraction(-2)]
    for w, mat in zip(weights, space.basis):
        for k, v in mat.items():
            combo[k] = combo.get(k, Fraction(0)) + w * v
    combo = {k: v for k, v in combo.items() if v}
    coeffs = space.expand(combo, 2, Fraction(0))
    assert coeffs == weights


# ---------------------------------------------------------------------------
# polynomial maps


def test_polynomial_map_space_dimensions():
    V = PolyFunctor([(1,)])
    VV = PolyFunctor([(1,), (1,)])
    S2 = PolyFunctor([(2,)])
    S3 = PolyFunctor([(3,)])
    assert PolyMapSpace(V, V).dim == 1
    assert PolyMapSpace(V, S2).dim == 1          # v -> v^2
    assert PolyMapSpace(VV, S3).dim == 4         # u^3, u^2 v, u v^2, v^3
    assert PolyMapSpace(S2, S2).dim == 1
    assert PolyMapSpace(V, PolyFunctor([(1,), (2,)])).dim == 2
    assert PolyMapSpace(V, PolyFunctor([()])).dim == 1   # constants
    with pytest.raises(InputError):
        PolyMapSpace(PolyFunctor([(), (1,)]), V)


def test_polynomial_map_degrees_are_tracked():
    V = PolyFunctor([(1,)])
    T = PolyFunctor([(), (1,), (2,)])
    space = PolyMapSpace(V, T)
    assert sorted(space.degrees) == [0, 1, 2]


def test_polynomial_map_restriction_consistency():
    VV = PolyFunctor([(1,), (1,)])
    S3 = PolyFunctor([(3,)])
    space = PolyMapSpace(VV, S3)
    d = space.d
    for n in (1, 2, d + 1):
        mats = space.matrices_at(n)
        assert len(mats) == space.dim
        if n == d:
            continue
        s, t = (n, d) if n < d else (d, n)
        iota = [[Fraction(1) if i == j else Fraction(0) for j in range(s)]
                for i in range(t)]
        p_i = functor_map_matrix(VV, iota, s, t, Fraction(0))
        q_i = functor_map_matrix(S3, iota, s, t, Fraction(0))
        for k in range(space.dim):
            small = mats[k] if n < d else space.basis[k]
            big = space.basis[k] if n < d else mats[k]
            lhs = _sparse_mul(q_i, small)
            rhs = substitute_monomials(big, p_i)
            assert lhs == rhs, (k, n)


def test_polynomial_map_expand_round_trip():
    VV = PolyFunctor([(1,), (1,)])
    S3 = PolyFunctor([(3,)])
    space = PolyMapSpace(VV, S3)
    assert space.dim == 4
    weights = [Fraction(1), Fraction(-5), Fraction(0), Fraction(7)]
    combo = {}
    for w, mat in zip(weights, space.matrices_at(2)):
        for k, v in mat.items():
            cur = combo.get(k, Fraction(0)) + w * v
            if cur:
                combo[k] = cur
            else:
                combo.pop(k, None)
    assert space.expand(combo, 2, Fraction(0)) == weights


def test_sym_power_weights_and_action():
    inst = FunctorInstance(PolyFunctor([(1,), (1,)]), 2)
    sym = SymPowerInstance(inst, 2)
    assert len(sym.coords) == 10   # monomials of degree 2 in 4 coordinates
    for mono in sym.coords:
        assert sum(sym.weight(mono)) == 2
    # derivation property: action on x*y is Leibniz
    act = sym.action(1, 2)
    base = inst.action(1, 2)
    for (nm, mono), q in act.items():
        assert len(nm) == len(mono) == 2


# ---------------------------------------------------------------------------
# shifts


def test_lr_coefficients_known_values():
    assert lr_coefficient((2, 2), (1,), (2, 1)) == 1
    assert lr_coefficient((2, 2), (2,), (2,)) == 1
    assert lr_coefficient((2, 2), (2,), (1, 1)) == 0
    assert lr_coefficient((2, 2), (1, 1), (2,)) == 0
    assert lr_coefficient((2, 2), (1, 1), (1, 1)) == 1
    assert lr_coefficient((3, 2, 1), (2, 1), (2, 1)) == 2
    assert lr_coefficient((2, 1), (1,), (1, 1)) == 1
    assert lr_coefficient((2, 1), (1,), (2,)) == 1
    assert lr_coefficient((4,), (2,), (2,)) == 1
    assert lr_coefficient((4,), (2,), (1, 1)) == 0
    assert lr_coefficient((2, 2), (), (2, 2)) == 1
    assert lr_coefficient((2, 2), (2, 2), ()) == 1


def test_shift_multiplicity_dimension_identity():
    for lam in partitions_upto(4):
        if not lam:
            continue
        for k in (1, 2, 3):
            for n in (1, 2, 3):
                mult = shift_multiplicities(lam, k)
                total = sum(m * weyl_dim(nu, n) for nu, m in mult.items())
                assert total == weyl_dim(lam, k + n), (lam, k, n)


def test_shift_functor_of_quadratic():
    sh = shift_functor(PolyFunctor([(2,)]), 1)
    assert sh.summands == ((2,), (1,), ())


def test_shift_decomposition_is_invertible_iso():
    Q = PolyFunctor([(2,), (1,)])
    dec = ShiftDecomposition(Q, 1, 2)
    # witness o inverse = identity on decomposed coordinates
    prod = _sparse_mul(dec.witness, dec.inverse)
    ident = {(k, k): Fraction(1) for k in dec.decomposed_coords}
    assert prod == ident
    # shifted functor has the expected summands
    assert dec.decomposed.summands == ((2,), (1,), (1,), (), ())


def test_shift_decomposition_respects_action():
    # W o (shift action) = (decomposed action) o W
    Q = PolyFunctor([(2,)])
    dec = ShiftDecomposition(Q, 1, 2)
    from schurvar.schur import ShiftInstance
    src = ShiftInstance(Q, 1, 2)
    tgt = FunctorInstance(dec.decomposed, 2)
    for a, b in [(1, 2), (2, 1)]:
        lhs = _sparse_mul(dec.witness, src.action(a, b))
        rhs = _sparse_mul(tgt.action(a, b), dec.witness)
        assert lhs == rhs


def test_matrix_inverse_helper():
    rows = ["r0", "r1"]
    cols = ["c0", "c1"]
    m = {("r0", "c0"): Fraction(2), ("r0", "c1"): Fraction(1),
         ("r1", "c1"): Fraction(3)}
    inv = invert_rational_matrix(m, rows, cols)
    prod = _sparse_mul(m, inv)
    assert prod == {("r0", "r0"): Fraction(1), ("r1", "r1"): Fraction(1)}
    singular = {("r0", "c0"): Fraction(1), ("r1", "c0"): Fraction(1)}
    assert invert_rational_matrix(singular, rows, cols) is None


# ---------------------------------------------------------------------------
# ordering


def test_functor_order_decreases_when_top_removed():
    Q = PolyFunctor([(3,), (2, 1), (1,)])
    R = Q.remove_one(Q.top_summand())
    assert functor_less(R, Q)
    assert not functor_less(Q, R)
    assert not functor_less(Q, Q)


def test_functor_order_compares_highest_degree_first():
    A = PolyFunctor([(2,), (1,), (1,), (1,)])
    B = PolyFunctor([(2,), (2,)])
    assert functor_less(A, B)
    assert not functor_less(B, A)
    # extra low degree summands don't matter against a higher degree drop
    C = PolyFunctor([(1, 1)] + [(1,)] * 5)
    D = PolyFunctor([(2,), (1, 1)])
    assert functor_less(C, D)
    assert not functor_less(D, C)


def test_instance_variables():
    F = PolyFunctor([(2,), (1,), (1,)])
    inst = FunctorInstance(F, 2)
    vs = inst.variables("y")
    assert len(vs) == inst.dim == 3 + 2 + 2
    assert all(v.name.startswith("y.") for v in vs)
    assert len(set(vs)) == len(vs)
    weights = sorted(v.weight for v in vs)
    assert weights == [1, 1, 1, 1, 2, 2, 2]
