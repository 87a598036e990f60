"""The BGG complex S ⊗ M^∨ of a DG Λ-module and the supports it defines.

Generators of the free S-module are the dual basis vectors φ_b, placed in
upper degree |b|; the twisted differential δ = ∂^∨ + Σ χ_i e_i^∨ raises the
upper degree by one.  Its homology is Ext_Λ(M, k) as a graded S-module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .extdg import DgLambdaModule, dual, validate
from .modengine import FreeModule, GradedMap, PresentedModule, dg_homology
from .polyring import PolyRing
from .varieties import VarietyHandle


@dataclass
class BggComplex:
    module: FreeModule
    delta: GradedMap

    @property
    def ring(self) -> PolyRing:
        return self.module.ring


def bgg_complex(M: DgLambdaModule, S: PolyRing | None = None, grading: str = "total") -> BggComplex:
    """S ⊗ M^∨ with δ = ∂^∨ + Σ χ_i e_i^∨.

    ``grading="weight"`` (zero differential only) puts every generator in
    degree 0 and uses χ-weight 1, i.e. grades Ext by resolution index.
    """
    Md = dual(M)
    n = M.dim
    if grading == "weight":
        if not M.has_zero_differential():
            raise ValueError("the weight grading needs a zero differential")
        S = S or PolyRing([f"chi{i + 1}" for i in range(M.algebra.c)], None, M.field)
        F = FreeModule(S, [0] * n)
    elif grading == "total":
        S = S or M.algebra.symmetric_ring()
        F = FreeModule(S, [-x for x in Md.degrees])
    else:
        raise ValueError(f"unknown grading {grading!r}")
    # δ² = 0 is the set of DG identities for M^∨, coefficient by coefficient in χ
    v = validate(Md)
    if not v:
        raise ArithmeticError(f"δ² ≠ 0 on the BGG complex ({v.failure}): sign-convention bug")
    cols = [[S.zero() for _ in range(n)] for _ in range(n)]
    for r, c in zip(*np.nonzero(Md.d != 0)):
        cols[c][r] = cols[c][r] + S.constant(Md.d[r, c])
    for i, A in enumerate(Md.actions):
        chi = S.var(i)
        for r, c in zip(*np.nonzero(A != 0)):
            cols[c][r] = cols[c][r] + chi.scale(A[r, c])
    delta = GradedMap(F, F, cols, shift=1)
    return BggComplex(F, delta)


@dataclass
class ExtModule:
    module: PresentedModule
    generator_degree_bound: int | None

    def hilbert_function(self, upto: int, start: int | None = None) -> dict:
        hs = self.module.hilbert_series()
        lo = start if start is not None else min(self.module.degrees, default=0)
        return hs.coefficients(upto, lo)


def ext_module(M: DgLambdaModule, S: PolyRing | None = None, grading: str = "total") -> ExtModule:
    """Ext_Λ(M, k) = H(S ⊗ M^∨, δ) with the top degree of a minimal generating set."""
    B = bgg_complex(M, S, grading)
    H = dg_homology(B.module, B.delta)
    return ExtModule(H, H.generator_degree_bound())


def _monomials(S: PolyRing, degree: int):
    """Exponent vectors of weighted degree ``degree``."""
    out = []

    def rec(i, left, acc):
        if i == S.nvars:
            if left == 0:
                out.append(tuple(acc))
            return
        w = S.weights[i]
        for k in range(left // w + 1):
            rec(i + 1, left - k * w, acc + [k])

    if degree >= 0:
        rec(0, degree, [])
    return out


def ext_dimensions(M: DgLambdaModule, upto: int, start: int | None = None) -> dict:
    """dim_k H^n(S ⊗ M^∨, δ) by degreewise linear algebra over k."""
    B = bgg_complex(M)
    S, F = B.ring, M.field
    gdeg = B.module.degrees
    lo = min(gdeg, default=0) if start is None else start

    def basis(n):
        return [(g, e) for g, d in enumerate(gdeg) for e in _monomials(S, n - d)]

    def matrix(n):
        src, tgt = basis(n), basis(n + 1)
        index = {t: k for k, t in enumerate(tgt)}
        A = la.zeros(F, len(tgt), len(src))
        for k, (g, e) in enumerate(src):
            for r, p in enumerate(B.delta.columns[g]):
                for pe, c in p.terms.items():
                    t = (r, tuple(a + b for a, b in zip(e, pe)))
                    A[index[t], k] = F.add(A[index[t], k], c)
        return A, len(src)

    out = {}
    prev_rank = la.rank(F, matrix(lo - 1)[0])
    for n in range(lo, upto + 1):
        A, dim_n = matrix(n)
        r = la.rank(F, A)
        out[n] = dim_n - r - prev_rank
        prev_rank = r
    return out


def support(M: DgLambdaModule, mode: str = "d", S: PolyRing | None = None) -> VarietyHandle:
    """V^d(M) = V(ann Ext_Λ(M, k)); V^b(M) = V^d(M^∨)."""
    if mode == "b":
        return support(dual(M), "d", S)
    if mode != "d":
        raise ValueError(f"mode must be 'd' or 'b', got {mode!r}")
    return VarietyHandle(ext_module(M, S).module.annihilator())


class ProbeUndefined(ValueError):
    pass


def point_probe(M: DgLambdaModule, point) -> bool:
    """Rank-variety test: is M not free over k[e_a] for e_a = Σ a_i e_i?"""
    if not M.has_zero_differential():
        raise ProbeUndefined("probe undefined: the differential is nonzero")
    if any(d != 1 for d in M.algebra.degrees):
        raise ProbeUndefined("probe undefined: generators must have degree 1")
    F = M.field
    a = [F.convert(x) for x in point]
    if len(a) != M.algebra.c or all(x == 0 for x in a):
        raise ValueError("point must have c coordinates, not all zero")
    X = la.zeros(F, M.dim, M.dim)
    for ai, A in zip(a, M.actions):
        X = la.add(F, X, la.scale(F, ai, A))
    return 2 * la.rank(F, X) < M.dim
