import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ksv import linalg as la
from ksv.bgg import _monomials, bgg_complex
from ksv.extdg import ExteriorAlgebra, cyclic_quotient, free_module
from ksv.modengine import (FreeModule, GradedMap, NotADifferential, PresentedModule, dg_homology,
                           kernel, resolve_and_tor, subquotient)
from ksv.polyring import HomogeneousIdeal, symmetric_ring
from ksv.scalars import GF, QQ

F5 = GF(5)


def _S(F=QQ, c=2):
    return symmetric_ring(c, field=F)


def _degree_matrix(phi: GradedMap, d):
    """The k-linear map phi: F_d -> G_{d + shift}, on monomial bases."""
    S, F = phi.ring, phi.ring.field
    src = [(j, e) for j, g in enumerate(phi.source.degrees) for e in _monomials(S, d - g)]
    tgt = [(i, e) for i, g in enumerate(phi.target.degrees) for e in _monomials(S, d + phi.shift - g)]
    index = {t: k for k, t in enumerate(tgt)}
    A = la.zeros(F, len(tgt), len(src))
    for k, (j, e) in enumerate(src):
        for i, p in enumerate(phi.columns[j]):
            for pe, c in p.terms.items():
                r = index[(i, tuple(a + b for a, b in zip(e, pe)))]
                A[r, k] = F.add(A[r, k], c)
    return A, len(src)


# kernel ---------------------------------------------------------------------------------

def test_koszul_syzygy():
    # [DERIVED] the syzygy of a regular sequence
    S = _S()
    c1, c2 = S.gens
    phi = GradedMap(FreeModule(S, (2, 2)), FreeModule(S, (0,)), [[c1], [c2]])
    K = kernel(phi)
    assert K.source.degrees == (4,)
    (col,) = K.columns
    # unique up to a scalar
    assert col[0] * c1 + col[1] * c2 == S.zero()
    assert col[0] in (c2, -c2)


def test_kernel_of_injective_map_is_zero():
    S = _S()
    phi = GradedMap(FreeModule(S, (2,)), FreeModule(S, (0,)), [[S.var(0)]])
    assert kernel(phi).source.rank == 0


def test_kernel_of_zero_map_is_everything():
    S = _S()
    phi = GradedMap(FreeModule(S, (0,)), FreeModule(S, (0,)), [[S.zero()]])
    K = kernel(phi)
    assert K.source.degrees == (0,) and K.columns == [[S.one()]]


def test_inhomogeneous_entry_rejected():
    S = _S()
    c1, c2 = S.gens
    with pytest.raises(ValueError):
        GradedMap(FreeModule(S, (2,)), FreeModule(S, (0,)), [[c1 + c2 * c2]])


@st.composite
def random_maps(draw):
    c = draw(st.integers(1, 3))
    S = symmetric_ring(c, field=F5)
    tgt = draw(st.lists(st.sampled_from([0, 2]), min_size=1, max_size=2))
    src = draw(st.lists(st.sampled_from([2, 4]), min_size=1, max_size=3))
    rng = random.Random(draw(st.integers(0, 10**6)))
    cols = []
    for d in src:
        col = []
        for g in tgt:
            monos = _monomials(S, d - g)
            col.append(sum((S.monomial(e, rng.randrange(5)) for e in monos if rng.random() < .6), S.zero()))
        cols.append(col)
    return GradedMap(FreeModule(S, tuple(src)), FreeModule(S, tuple(tgt)), cols)


@given(random_maps())
def test_kernel_columns_are_syzygies_with_correct_dimensions(phi):
    K = kernel(phi)
    assert phi.compose(K).is_zero()
    S = phi.ring
    span = subquotient(S, phi.source.degrees, [c for c in K.vectors()], list(K.source.degrees), [])
    hs = span.hilbert_series() if K.source.rank else None
    for d in range(0, 11):
        A, n = _degree_matrix(phi, d)
        expect = n - la.rank(S.field, A)
        got = hs.coefficient(d) if hs is not None else 0
        assert got == expect, d


# annihilator -------------------------------------------------------------------------

def test_annihilator_cyclic():
    S = _S()
    c1, c2 = S.gens
    ann = lambda gens: sorted(PresentedModule.quotient_ring(HomogeneousIdeal(S, gens)).annihilator().canonical_gens())
    assert ann([c1]) == ["chi1"]
    assert ann([c1, c2]) == ["chi1", "chi2"]


def test_annihilator_of_ext_of_cyclic_quotient():
    # [DERIVED] Ext(Λ/e1Λ, k) = k[χ1] by adjunction, so its annihilator is (χ2)
    from ksv.bgg import ext_module
    alg = ExteriorAlgebra(2)
    E = ext_module(cyclic_quotient(alg, [0])).module
    assert E.annihilator().canonical_gens() == ["chi2"]


def test_annihilator_is_exact_not_radical():
    S = _S()
    c1, c2 = S.gens
    M = PresentedModule.quotient_ring(HomogeneousIdeal(S, [c1 ** 2, c1 * c2]))
    assert sorted(M.annihilator().canonical_gens()) == sorted(["chi1^2", "chi1*chi2"])


# resolve_and_tor ----------------------------------------------------------------------

def _hf(M, upto=12):
    if M.rank == 0:
        return {d: 0 for d in range(upto + 1)}
    return M.hilbert_series().coefficients(upto, 0)


def test_tor_regular_sequence():
    # [DERIVED] the Koszul complex on χ1, χ2 is exact
    S = _S()
    c1, c2 = S.gens
    X = PresentedModule.quotient_ring(HomogeneousIdeal(S, [c1]))
    Y = PresentedModule.quotient_ring(HomogeneousIdeal(S, [c2]))
    T = resolve_and_tor(X, Y, 2)
    assert _hf(T[0]) == {d: (1 if d % 2 == 0 and d == 0 else 0) for d in range(13)}
    assert sorted(T[0].annihilator().canonical_gens()) == ["chi1", "chi2"]
    assert all(_hf(t) == {d: 0 for d in range(13)} for t in T[1:])


def test_tor_self():
    # [DERIVED] resolve by S --χ1--> S and tensor with S/(χ1)
    S = _S()
    X = PresentedModule.quotient_ring(HomogeneousIdeal(S, [S.var(0)]))
    T = resolve_and_tor(X, X, 2)
    quotient = {d: (1 if d % 2 == 0 else 0) for d in range(13)}
    assert _hf(T[0]) == quotient
    assert _hf(T[1]) == {d: (1 if d % 2 == 0 and d >= 2 else 0) for d in range(13)}
    assert T[1].annihilator().canonical_gens() == ["chi1"]
    assert _hf(T[2]) == {d: 0 for d in range(13)}


def test_tor_with_free_module():
    S = _S()
    c1, c2 = S.gens
    X = PresentedModule.quotient_ring(HomogeneousIdeal(S, [c1 ** 2, c1 * c2]))
    T = resolve_and_tor(X, PresentedModule.free(S, (0,)), 2)
    assert _hf(T[0]) == _hf(X)
    assert all(_hf(t) == {d: 0 for d in range(13)} for t in T[1:])


@st.composite
def small_modules(draw, S):
    rank = draw(st.integers(1, 2))
    degrees = tuple(draw(st.lists(st.sampled_from([0, 2]), min_size=rank, max_size=rank)))
    rng = random.Random(draw(st.integers(0, 10**6)))
    rels = []
    for _ in range(draw(st.integers(0, 3))):
        d = max(degrees) + rng.choice([2, 4])
        v = {}
        for i, g in enumerate(degrees):
            for e in _monomials(S, d - g):
                if rng.random() < .5:
                    v[(i, e)] = rng.randrange(1, 5)
        if v:
            rels.append(v)
    return PresentedModule(S, degrees, rels)


S2F5 = symmetric_ring(2, field=F5)


@given(small_modules(S2F5), small_modules(S2F5))
def test_tor_symmetry_on_hilbert_series(X, Y):
    A = resolve_and_tor(X, Y, 2)
    B = resolve_and_tor(Y, X, 2)
    for a, b in zip(A, B):
        assert _hf(a, 10) == _hf(b, 10)


# dg_homology --------------------------------------------------------------------------

def test_zero_differential_gives_free_module():
    S = _S()
    F = FreeModule(S, (0,))
    H = dg_homology(F, GradedMap(F, F, [[S.zero()]], shift=1))
    assert H.rank == 1 and H.relations == []


def test_bgg_of_free_module_is_k():
    # [DERIVED] Λ is free, so Ext(Λ, k) = k in a single degree
    B = bgg_complex(free_module(ExteriorAlgebra(2)))
    H = dg_homology(B.module, B.delta)
    hf = H.hilbert_series().coefficients(12, -4)
    assert sum(hf.values()) == 1 and [d for d, v in hf.items() if v] == [0]


def test_bgg_matrix_of_cyclic_quotient():
    # [DERIVED] ker = ⟨first basis vector⟩, the image is χ2 times it
    S = _S()
    F = FreeModule(S, (0, 1))
    delta = GradedMap.from_rows(F, F, [[S.zero(), S.var(1)], [S.zero(), S.zero()]], shift=1)
    H = dg_homology(F, delta)
    assert H.degrees == (0,)
    assert H.annihilator().canonical_gens() == ["chi2"]
    assert H.hilbert_series().coefficients(8, 0) == {d: (1 if d % 2 == 0 else 0) for d in range(9)}


def test_not_a_differential():
    S = _S()
    F = FreeModule(S, (0,))
    with pytest.raises(NotADifferential, match="not a differential"):
        dg_homology(F, GradedMap(F, F, [[S.var(0)]], shift=2))


def test_homology_annihilator_kills_generators():
    alg = ExteriorAlgebra(2, field=F5)
    rng = random.Random(3)
    from ksv.extdg import random_module
    for _ in range(5):
        M = random_module(alg, rng, 6)
        B = bgg_complex(M)
        H = dg_homology(B.module, B.delta)
        if H.rank == 0:
            continue
        I = H.annihilator()
        for g in I.gens:
            for j in range(H.rank):
                v = {(j, e): c for e, c in g.terms.items()}
                assert not H.normal_form(v)
