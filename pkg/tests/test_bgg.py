import random

import pytest
from hypothesis import given, strategies as st

from ksv import linalg as la
from ksv.bgg import (ProbeUndefined, bgg_complex, ext_dimensions, ext_module, point_probe,
                     support)
from ksv.extdg import (ExteriorAlgebra, cyclic_quotient, dual, free_module, random_module,
                       ext_dimensions_universal, trivial_module, validate)
from ksv.modengine import dg_homology
from ksv.scalars import GF, QQ
from ksv.varieties import VarietyClass

F5 = GF(5)
P1_F5 = [(1, 0)] + [(t, 1) for t in range(5)]


def _alg(c=2, F=QQ):
    return ExteriorAlgebra(c, field=F)


def _entries(B):
    return sorted(str(p) for col in B.delta.columns for p in col if p)


def test_complex_of_k():
    B = bgg_complex(trivial_module(_alg()))
    assert B.module.rank == 1 and B.delta.is_zero()


def test_complex_of_cyclic_quotient():
    # [DERIVED] e2 is the only nonzero action
    B = bgg_complex(cyclic_quotient(_alg(), [0]))
    assert B.module.rank == 2 and [e.lstrip("-") for e in _entries(B)] == ["chi2"]


def test_complex_of_free_module():
    # [DERIVED] Koszul pattern of signed linear forms
    B = bgg_complex(free_module(_alg()))
    assert B.module.rank == 4
    assert sorted(e.lstrip("-") for e in _entries(B)) == ["chi1", "chi1", "chi2", "chi2"]


def test_ext_of_k_is_polynomial_ring():
    # [DERIVED] Ext_Λ(k, k) = S
    E = ext_module(trivial_module(_alg()))
    assert E.generator_degree_bound == 0
    assert E.module.rank == 1 and not E.module.relations
    assert E.hilbert_function(8, 0) == {d: (d // 2 + 1 if d % 2 == 0 else 0) for d in range(9)}


def test_ext_of_free_module_is_k():
    E = ext_module(free_module(_alg()))
    assert E.generator_degree_bound == 0
    hf = E.hilbert_function(10, -2)
    assert hf[0] == 1 and sum(hf.values()) == 1


def test_ext_of_cyclic_quotient():
    # [DERIVED] Ext = k[χ1] by adjunction
    E = ext_module(cyclic_quotient(_alg(), [0]))
    assert E.module.annihilator().canonical_gens() == ["chi2"]
    assert E.hilbert_function(8, 0) == {d: (1 if d % 2 == 0 else 0) for d in range(9)}


def test_supports_of_standard_modules():
    alg = _alg()
    Vk = support(trivial_module(alg))
    assert Vk.generators() == [] and Vk.proj_dimension == 1
    assert support(free_module(alg)).classification is VarietyClass.CONE_POINT
    assert support(cyclic_quotient(alg, [0])).generators() == ["chi2"]
    assert support(cyclic_quotient(alg, [1])).generators() == ["chi1"]


def test_probe_examples():
    alg = _alg(F=F5)
    assert all(point_probe(trivial_module(alg), a) for a in P1_F5)
    assert not any(point_probe(free_module(alg), a) for a in P1_F5)
    A = cyclic_quotient(alg, [0])
    assert point_probe(A, (1, 0)) and not point_probe(A, (0, 1))


def test_probe_undefined_with_differential():
    alg = _alg(F=F5)
    rng = random.Random(0)
    M = next(m for m in (random_module(alg, rng, 6, with_differential=True) for _ in range(50))
             if not m.has_zero_differential())
    with pytest.raises(ProbeUndefined, match="probe undefined"):
        point_probe(M, (1, 0))


def test_probe_rejects_zero_point():
    with pytest.raises(ValueError):
        point_probe(trivial_module(_alg(F=F5)), (0, 0))


def test_unknown_mode():
    with pytest.raises(ValueError):
        support(trivial_module(_alg()), "x")


# cross-checks on random modules ----------------------------------------------------------

def _random(seed, c, with_d):
    rng = random.Random(seed)
    return random_module(ExteriorAlgebra(c, field=F5), rng, 8, with_differential=with_d)


@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.booleans())
def test_delta_squares_to_zero(seed, c, with_d):
    M = _random(seed, c, with_d)
    B = bgg_complex(M)
    assert B.delta.compose(B.delta).is_zero()


@given(st.integers(0, 10**6), st.booleans())
def test_three_ext_computations_agree(seed, with_d):
    M = _random(seed, 2, with_d)
    lo = min(M.degrees, default=0)
    groebner = ext_module(M).hilbert_function(8, lo)
    linear = ext_dimensions(M, 8, start=lo)
    universal = ext_dimensions_universal(M, 8)
    assert groebner == linear
    assert {j: v for j, v in groebner.items() if j in universal} == universal


@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.booleans())
def test_d_support_equals_b_support_of_dual(seed, c, with_d):
    # [PAPER] V^d(M) = V^b(M^dual)
    M = _random(seed, c, with_d)
    assert support(M, "d").generators() == support(dual(M), "b").generators()
    assert support(M, "d") == support(M, "b")


@given(st.integers(0, 10**6), st.booleans(), st.integers(-2, 2))
def test_contractible_summand_changes_nothing(seed, with_d, degree):
    M = _random(seed, 2, with_d)
    Mc = M.with_contractible(degree)
    assert validate(Mc)
    lo = min(Mc.degrees, default=0)
    assert ext_module(M).hilbert_function(10, lo) == ext_module(Mc).hilbert_function(10, lo)
    assert support(M) == support(Mc)


@given(st.integers(0, 10**6))
def test_probe_agrees_with_annihilator(seed):
    M = _random(seed, 2, False)
    V = support(M)
    for a in P1_F5:
        assert point_probe(M, a) == V.contains_point(a)
