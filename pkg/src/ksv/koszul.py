"""DG modules over a Koszul complex E = R⟨e_1..e_c | ∂e_i = f_i⟩.

A module is a bounded complex of finite free graded R-modules with homotopy
operators σ_i satisfying ∂σ_i + σ_i∂ = f_i.  Everything about supports goes
through the reduction t(M) = k ⊗_R M, a DG module over the exterior algebra.
Matrices are lists of rows of polynomials; column c is the image of
generator c.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import bgg
from . import linalg as la
from .extdg import (DgLambdaModule, ExteriorAlgebra, Validation, derived_tensor_window,
                    hom_into_lambda, tor_modules_by_weight)
from .modengine import PresentedModule, preimage_vectors, subquotient, vec_degree
from .polyring import HomogeneousIdeal, Polynomial, PolyRing, enveloping_ring
from .varieties import VarietyHandle, delta_preimage, join


class GradedBase:
    """R = k[x_1..x_n] / (q_1..q_m) with m = (x_1..x_n)."""

    def __init__(self, ring: PolyRing, relations=()):
        self.ring = ring
        self.ideal = HomogeneousIdeal(ring, relations)

    @property
    def field(self):
        return self.ring.field

    def reduce(self, p: Polynomial) -> Polynomial:
        p = self.ring(p)
        return self.ideal.normal_form(p) if self.ideal.gens else p

    def __eq__(self, other):
        return (isinstance(other, GradedBase) and self.ring == other.ring
                and self.ideal.canonical_gens() == other.ideal.canonical_gens())

    def __hash__(self):
        return hash(self.ring)


class KoszulData:
    """The elements f_1..f_c of m defining E."""

    def __init__(self, base: GradedBase, f):
        self.base = base
        self.f = [base.ring(p) for p in f]
        for p in self.f:
            if p.constant_term() != 0:
                raise ValueError(f"f = {p} is not in the maximal ideal")
            if p and not p.is_homogeneous():
                raise ValueError(f"f = {p} is not homogeneous")
        self.degrees = [p.degree() if p else 0 for p in self.f]
        self.algebra = ExteriorAlgebra(len(self.f), field=base.field)

    @property
    def c(self):
        return len(self.f)

    @property
    def ring(self):
        return self.base.ring

    def symmetric_ring(self):
        return self.algebra.symmetric_ring()

    def __eq__(self, other):
        return isinstance(other, KoszulData) and self.base == other.base and self.f == other.f

    def __hash__(self):
        return hash(tuple(self.f))


@dataclass
class Generator:
    name: str
    hdeg: int      # homological degree
    intdeg: int    # internal (polynomial) degree


class KoszulDgModule:
    def __init__(self, data: KoszulData, gens, d, sigmas):
        self.data = data
        self.gens = [g if isinstance(g, Generator) else Generator(*g) for g in gens]
        R = data.ring
        self.d = [[R(p) for p in row] for row in d]
        self.sigmas = [[[R(p) for p in row] for row in s] for s in sigmas]

    @property
    def rank(self):
        return len(self.gens)

    @property
    def ring(self):
        return self.data.ring

    def __repr__(self):
        return f"KoszulDgModule(rank={self.rank}, hdeg={[g.hdeg for g in self.gens]})"

    def validate(self) -> Validation:
        return validate_koszul(self)

    def with_contractible(self, hdeg: int, intdeg: int = 0) -> "KoszulDgModule":
        """M ⊕ (u -> v), |u| = hdeg + 1, |v| = hdeg, with σ_i(v) = f_i·u."""
        R = self.ring
        n = self.rank
        z = R.zero()
        grow = lambda rows: [row + [z, z] for row in rows] + [[z] * (n + 2) for _ in range(2)]
        d = grow(self.d)
        d[n + 1][n] = R.one()
        sig = []
        for s, f in zip(self.sigmas, self.data.f):
            s2 = grow(s)
            s2[n][n + 1] = f
            sig.append(s2)
        gens = self.gens + [Generator("u", hdeg + 1, intdeg), Generator("v", hdeg, intdeg)]
        return KoszulDgModule(self.data, gens, d, sig)


def _pmat_mul(A, B, base):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    R = base.ring
    out = [[R.zero() for _ in range(p)] for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if not a:
                continue
            for j in range(p):
                b = B[k][j]
                if b:
                    out[i][j] = out[i][j] + a * b
    return [[base.reduce(x) for x in row] for row in out]


def _first_nonzero(X):
    for i, row in enumerate(X):
        for j, v in enumerate(row):
            if v:
                return (i, j)
    return None


def validate_koszul(M: KoszulDgModule) -> Validation:
    """∂² = 0, ∂σ_i + σ_i∂ = f_i·id, σ anticommute and square to zero, mod (q)."""
    base, n = M.data.base, M.rank
    mats = [("∂", M.d)] + [(f"σ_{i + 1}", s) for i, s in enumerate(M.sigmas)]
    if len(M.sigmas) != M.data.c:
        return Validation(False, f"expected {M.data.c} operators σ_i, got {len(M.sigmas)}")
    for name, X in mats:
        if len(X) != n or any(len(row) != n for row in X):
            return Validation(False, f"{name} is not {n}x{n}")
    for name, X, hshift, ishift in [("∂", M.d, -1, 0)] + [
            (f"σ_{i + 1}", s, 1, M.data.degrees[i]) for i, s in enumerate(M.sigmas)]:
        for r in range(n):
            for c in range(n):
                p = X[r][c]
                if not p:
                    continue
                gr, gc = M.gens[r], M.gens[c]
                if gr.hdeg != gc.hdeg + hshift:
                    return Validation(False, f"{name} has the wrong homological degree", (r, c))
                want = gc.intdeg + ishift - gr.intdeg
                if not p.is_homogeneous() or p.degree() != want:
                    return Validation(False, f"{name} entry {p} is not homogeneous of degree {want}", (r, c))
    mm = lambda A, B: _pmat_mul(A, B, base)
    add = lambda A, B: [[base.reduce(a + b) for a, b in zip(r1, r2)] for r1, r2 in zip(A, B)]
    pos = _first_nonzero(mm(M.d, M.d))
    if pos:
        return Validation(False, "∂² ≠ 0", pos)
    R = M.ring
    for i, (s, f) in enumerate(zip(M.sigmas, M.data.f)):
        lhs = add(mm(M.d, s), mm(s, M.d))
        target = [[base.reduce(f) if r == c else R.zero() for c in range(n)] for r in range(n)]
        diff = [[base.reduce(a - b) for a, b in zip(r1, r2)] for r1, r2 in zip(lhs, target)]
        pos = _first_nonzero(diff)
        if pos:
            return Validation(False, f"∂σ_{i + 1} + σ_{i + 1}∂ ≠ {f}·id", pos)
    for i, s in enumerate(M.sigmas):
        pos = _first_nonzero(mm(s, s))
        if pos:
            return Validation(False, f"σ_{i + 1}² ≠ 0", pos)
    for i, j in itertools.combinations(range(M.data.c), 2):
        pos = _first_nonzero(add(mm(M.sigmas[i], M.sigmas[j]), mm(M.sigmas[j], M.sigmas[i])))
        if pos:
            return Validation(False, f"σ_{i + 1}σ_{j + 1} + σ_{j + 1}σ_{i + 1} ≠ 0", pos)
    return Validation(True)


# constructors -----------------------------------------------------------------------

_LETTERS = "abcdefghijklmnopqrstuvw"


def koszul_module(data: KoszulData, g, h) -> KoszulDgModule:
    """The Koszul complex on g_1..g_n with σ_i = (Σ_j h_ij a_j) ∧ −.

    Requires f_i = Σ_j h_ij g_j, which makes ∂σ_i + σ_i∂ = f_i.
    """
    R = data.ring
    g = [R(p) for p in g]
    h = [[R(p) for p in row] for row in h]
    n = len(g)
    subsets = [s for r in range(n + 1) for s in itertools.combinations(range(n), r)]
    index = {s: k for k, s in enumerate(subsets)}
    gdeg = [p.degree() if p else 0 for p in g]
    gens = [Generator("".join(_LETTERS[j] for j in s) or "one", len(s), sum(gdeg[j] for j in s))
            for s in subsets]
    N = len(subsets)
    zero = lambda: [[R.zero() for _ in range(N)] for _ in range(N)]
    d = zero()
    for s, col in index.items():
        for pos, j in enumerate(s):
            rest = s[:pos] + s[pos + 1:]
            d[index[rest]][col] = d[index[rest]][col] + g[j].scale(-1 if pos % 2 else 1)
    sigmas = []
    for i in range(data.c):
        sig = zero()
        for s, col in index.items():
            for j in range(n):
                if j in s or not h[i][j]:
                    continue
                sign = -1 if sum(1 for x in s if x < j) % 2 else 1
                t = tuple(sorted(s + (j,)))
                sig[index[t]][col] = sig[index[t]][col] + h[i][j].scale(sign)
        sigmas.append(sig)
    return KoszulDgModule(data, gens, d, sigmas)


def koszul_algebra(data: KoszulData) -> KoszulDgModule:
    """E itself, with σ_i = e_i ∧ −."""
    R = data.ring
    ident = [[R.one() if i == j else R.zero() for j in range(data.c)] for i in range(data.c)]
    M = koszul_module(data, data.f, ident)
    for gen in M.gens:
        gen.name = gen.name.replace("a", "e1").replace("b", "e2") if data.c <= 2 else gen.name
    return M


def golden_suite(field=None):
    """R = k[x,y], f = (x², y²) and the modules Koszul(x,y²), Koszul(x²,y), Koszul(x,y), E."""
    from .scalars import QQ
    R = PolyRing(["x", "y"], field=field or QQ)
    x, y = R.gens
    data = KoszulData(GradedBase(R), [x ** 2, y ** 2])
    one, zero = R.one(), R.zero()
    return data, {
        "M1": koszul_module(data, [x, y ** 2], [[x, zero], [zero, one]]),
        "M2": koszul_module(data, [x ** 2, y], [[one, zero], [zero, y]]),
        "M3": koszul_module(data, [x, y], [[x, zero], [zero, y]]),
        "E": koszul_algebra(data),
    }


# the functor t and supports ------------------------------------------------------------

def reduce_t(M: KoszulDgModule) -> DgLambdaModule:
    """k ⊗_R M: set every x to zero (the module is R-free, so this is derived)."""
    F = M.data.base.field
    alg = M.data.algebra
    n = M.rank
    const = lambda X: la.as_matrix(F, [[p.constant_term() for p in row] for row in X], (n, n)) if n else la.zeros(F, 0, 0)
    return DgLambdaModule(alg, [g.hdeg for g in M.gens], const(M.d), [const(s) for s in M.sigmas],
                          [g.name for g in M.gens])


def support_E(M: KoszulDgModule) -> VarietyHandle:
    return bgg.support(reduce_t(M), "d")


def dagger_support(M: KoszulDgModule) -> VarietyHandle:
    """V^d(Hom_Λ(tM, Λ)); the dual module M† has the same support."""
    return bgg.support(hom_into_lambda(reduce_t(M)), "d")


def _same_data(M, N):
    if M.data != N.data:
        raise ValueError("modules over different (R, f)")


# tensor supports -----------------------------------------------------------------------------

def external_tensor(A: PresentedModule, B: PresentedModule, Se: PolyRing) -> PresentedModule:
    """A ⊗_k B over S^e = S ⊗_k S (A in the first block of variables)."""
    c = A.ring.nvars
    za, zb = (0,) * c, (0,) * B.ring.nvars
    nb = B.rank
    degrees = tuple(a + b for a in A.degrees for b in B.degrees)
    rels = []
    for r in A.relations:
        for j in range(nb):
            rels.append({(i * nb + j, e + zb): v for (i, e), v in r.items()})
    for r in B.relations:
        for i in range(A.rank):
            rels.append({(i * nb + j, za + e): v for (j, e), v in r.items()})
    return PresentedModule(Se, degrees, rels)


@dataclass
class WindowOracle:
    window: int
    observed: dict
    predicted: dict

    @property
    def match(self):
        return self.observed == self.predicted


@dataclass
class TensorSupport:
    join: VarietyHandle
    direct: VarietyHandle
    equal_up_to_radical: bool
    oracle: WindowOracle | None = None


def _convolve(a: dict, b: dict, lo: int, hi: int) -> dict:
    out = {}
    for n in range(lo, hi + 1):
        out[n] = sum(va * b.get(n - ka, 0) for ka, va in a.items())
    return out


def kunneth_window(tM: DgLambdaModule, tN: DgLambdaModule, window: int) -> WindowOracle:
    """Ext dims of τ_{≤u}(tM ⊗^L tN) against the product of the two Ext Hilbert functions."""
    mM, mN = min(tM.degrees, default=0), min(tN.degrees, default=0)
    lo = mM + mN
    eM = bgg.ext_module(tM).hilbert_function(window - mN, mM)
    eN = bgg.ext_module(tN).hilbert_function(window - mM, mN)
    predicted = _convolve(eM, eN, lo, window)
    W = derived_tensor_window(tM, tN, window, by_weight=False)
    observed = bgg.ext_dimensions(W.truncated, window, start=lo)
    return WindowOracle(window, observed, predicted)


def tensor_support_lambda(tM: DgLambdaModule, tN: DgLambdaModule, window: int | None = 6) -> TensorSupport:
    S = tM.algebra.symmetric_ring()
    VM, VN = bgg.support(tM), bgg.support(tN)
    J = join(VM, VN)
    A, B = bgg.ext_module(tM).module, bgg.ext_module(tN).module
    Se, _, _ = enveloping_ring(S)
    K = external_tensor(A, B, Se).annihilator()
    direct = VarietyHandle(delta_preimage(K, S))
    oracle = kunneth_window(tM, tN, window) if window is not None else None
    return TensorSupport(J, direct, J == direct, oracle)


def tensor_support_E(M: KoszulDgModule, N: KoszulDgModule, window: int | None = 6) -> TensorSupport:
    _same_data(M, N)
    return tensor_support_lambda(reduce_t(M), reduce_t(N), window)


# Tor over E -----------------------------------------------------------------------------------

def tor_window_E(M: KoszulDgModule, N: KoszulDgModule, window: int) -> dict:
    """dim_k Tor^E_n(M, N) for min <= n <= window (None when infinite).

    Computed as the homology of N ⊗_R Γ ⊗_R M, a complex of free R-modules
    with the universal differential built from ∂ and the σ_i.
    """
    _same_data(M, N)
    data = M.data
    P = data.ring
    F = P.field
    c = data.c
    mins = min((g.hdeg for g in M.gens), default=0) + min((g.hdeg for g in N.gens), default=0)
    W = max(0, (window + 1 - mins) // 2 + 1)
    gam = [a for a in itertools.product(range(W + 1), repeat=c) if sum(a) <= W]
    triples = [(p, a, m) for p in range(N.rank) for a in gam for m in range(M.rank)]
    hdeg = {t: N.gens[t[0]].hdeg + 2 * sum(t[1]) + M.gens[t[2]].hdeg for t in triples}
    ideg = {t: N.gens[t[0]].intdeg + sum(x * d for x, d in zip(t[1], data.degrees)) + M.gens[t[2]].intdeg
            for t in triples}
    by_deg = {}
    for t in triples:
        by_deg.setdefault(hdeg[t], []).append(t)
    pos = {}
    for n, ts in by_deg.items():
        for k, t in enumerate(ts):
            pos[t] = k

    def diff(t):
        p, a, m = t
        sn = -1 if N.gens[p].hdeg % 2 else 1
        out = {}

        def put(tgt, poly):
            k = pos[tgt]
            for e, v in poly.terms.items():
                key = (k, e)
                nv = F.add(out.get(key, F.zero), v)
                if nv == 0:
                    out.pop(key, None)
                else:
                    out[key] = nv

        for r in range(N.rank):
            if N.d[r][p]:
                put((r, a, m), N.d[r][p])
        for r in range(M.rank):
            if M.d[r][m]:
                put((p, a, r), M.d[r][m].scale(sn))
        for i in range(c):
            if a[i] == 0:
                continue
            b = a[:i] + (a[i] - 1,) + a[i + 1:]
            for r in range(M.rank):
                if M.sigmas[i][r][m]:
                    put((p, b, r), M.sigmas[i][r][m].scale(sn))
            for r in range(N.rank):
                if N.sigmas[i][r][p]:
                    put((r, b, m), N.sigmas[i][r][p].scale(-1))
        return out

    def qblock(n):
        rels = []
        for k in range(len(by_deg.get(n, []))):
            for q in data.base.ideal.gens:
                rels.append({(k, e): v for e, v in q.terms.items()})
        return rels

    degs = lambda n: [ideg[t] for t in by_deg.get(n, [])]
    out = {}
    for n in range(mins, window + 1):
        src = by_deg.get(n, [])
        if not src:
            out[n] = 0
            continue
        cols = [diff(t) for t in src]
        if by_deg.get(n - 1):
            Z = preimage_vectors(P, cols, degs(n - 1), degs(n), qblock(n - 1))
        else:
            Z = [{(k, (0,) * P.nvars): F.one} for k in range(len(src))]
        if not Z:
            out[n] = 0
            continue
        image = [diff(t) for t in by_deg.get(n + 1, [])]
        zdeg = [vec_degree(P, z, degs(n)) for z in Z]
        H = subquotient(P, degs(n), Z, zdeg, [v for v in image if v] + qblock(n)).pruned()
        out[n] = _finite_dim(H)
    return out


def _finite_dim(H: PresentedModule):
    if H.rank == 0:
        return 0
    hs = H.hilbert_series()
    if hs.is_zero():
        return 0
    if hs.krull_dimension > 0:
        return None
    lo, hi = min(hs.numerator), max(hs.numerator)
    return sum(hs.coefficients(hi, lo).values())


# the second containment ----------------------------------------------------------------------

class WindowTooSmallForBound(ValueError):
    pass


@dataclass
class ContainmentReport:
    s: int
    t: int
    grading: str
    join: VarietyHandle
    pieces: dict = field(default_factory=dict)   # index -> VarietyHandle of H_index
    union: VarietyHandle | None = None
    holds: bool = False


def tor_containment_check(M, N, window: int | None = None) -> ContainmentReport:
    """Join(V(M), V(N)) ⊆ ∪_{i <= s+t} V^d(H_i(tM ⊗^L tN)).

    ``M`` and ``N`` may be Koszul modules or their Λ-level images.  With zero
    differentials H_i is the Tor module of resolution index i; otherwise it is
    the total-degree homology, on which Λ acts trivially.
    """
    tM = reduce_t(M) if isinstance(M, KoszulDgModule) else M
    tN = reduce_t(N) if isinstance(N, KoszulDgModule) else N
    S = tM.algebra.symmetric_ring()
    J = join(bgg.support(tM), bgg.support(tN))
    weight = tM.has_zero_differential() and tN.has_zero_differential()
    grading = "weight" if weight else "total"
    s = bgg.ext_module(tM, grading=grading).generator_degree_bound
    t = bgg.ext_module(tN, grading=grading).generator_degree_bound
    s = 0 if s is None else max(s, 0)
    t = 0 if t is None else max(t, 0)
    if window is None:
        window = s + t
    if window < s + t:
        raise WindowTooSmallForBound(f"window {window} is below the required s + t = {s + t}")
    pieces = {}
    if weight:
        for i, H in tor_modules_by_weight(tM, tN, s + t).items():
            pieces[i] = bgg.support(H, "d", S) if H.dim else VarietyHandle.empty(S)
    else:
        W = derived_tensor_window(tM, tN, s + t, by_weight=False)
        for i in range(s + t + 1):
            pieces[i] = VarietyHandle.everything(S) if W.tor.get(i, 0) else VarietyHandle.empty(S)
    union = VarietyHandle.empty(S)
    for h in pieces.values():
        union = union.union(h)
    return ContainmentReport(s, t, grading, J, pieces, union, union.contains(J))


# RHom prediction ------------------------------------------------------------------------------

@dataclass
class RHomReport:
    predicted: VarietyHandle
    dagger_equal: bool
    oracle: WindowOracle


def rhom_support(M: KoszulDgModule, N: KoszulDgModule, window: int = 6) -> RHomReport:
    """Prediction Join(V(M), V(N)) for RHom_E(M, N) over a Gorenstein base.

    The oracle runs the Künneth window on Hom_Λ(tM, Λ) ⊗^L tN.
    """
    _same_data(M, N)
    VM, VN = support_E(M), support_E(N)
    tMd = hom_into_lambda(reduce_t(M))
    return RHomReport(join(VM, VN), dagger_support(M) == VM, kunneth_window(tMd, reduce_t(N), window))
