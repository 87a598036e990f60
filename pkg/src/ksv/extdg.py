"""Finite-dimensional DG modules over an exterior algebra.

A module is a graded k-basis with lower (homological) degrees, a differential
matrix ``d`` of degree -1 and one action matrix per exterior generator
(``actions[i][r, c]`` is the coefficient of basis vector r in e_i·b_c).

Sign rules, all checked by :func:`validate`:

* ∂² = 0, ∂e_i + e_i∂ = 0, e_ie_j + e_je_i = 0, e_i² = 0;
* dual: X^∨[r, c] = -(-1)^{|b_c|} X[c, r] for ∂ and every e_i;
* tensor over k: X ⊗ 1 + P ⊗ X with P = diag((-1)^{|m|});
* shift by n multiplies ∂ and every action by (-1)^n.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg as la
from .polyring import symmetric_ring
from .scalars import QQ, Field


class ExteriorAlgebra:
    """Λ = ⋀_k(e_1..e_c) with odd positive generator degrees."""

    def __init__(self, c: int, degrees=None, field: Field = QQ):
        if c < 0:
            raise ValueError("number of generators must be non-negative")
        degrees = tuple(degrees) if degrees is not None else (1,) * c
        if len(degrees) != c or any(d <= 0 or d % 2 == 0 for d in degrees):
            raise ValueError(f"exterior generators need positive odd degrees, got {degrees}")
        self.c = c
        self.degrees = degrees
        self.field = field
        subsets = [s for r in range(c + 1) for s in itertools.combinations(range(c), r)]
        self.basis = subsets
        self.index = {s: i for i, s in enumerate(subsets)}

    def __eq__(self, other):
        return (isinstance(other, ExteriorAlgebra) and self.c == other.c
                and self.degrees == other.degrees and self.field == other.field)

    def __hash__(self):
        return hash((self.c, self.degrees, self.field))

    def __repr__(self):
        return f"Λ(c={self.c}, |e|={self.degrees}, {self.field})"

    @property
    def dim(self):
        return len(self.basis)

    def degree(self, subset) -> int:
        return sum(self.degrees[i] for i in subset)

    def wedge(self, i: int, subset):
        """e_i ∧ e_subset as (sign, subset), or None when it vanishes."""
        if i in subset:
            return None
        sign = -1 if sum(1 for j in subset if j < i) % 2 else 1
        return sign, tuple(sorted(subset + (i,)))

    def symmetric_ring(self, prefix="chi"):
        return symmetric_ring(self.c, self.degrees, self.field, prefix)


@dataclass
class Validation:
    ok: bool
    failure: str | None = None
    position: tuple | None = None

    def __bool__(self):
        return self.ok


class InvalidModule(ValueError):
    pass


class DgLambdaModule:
    def __init__(self, algebra: ExteriorAlgebra, degrees, d, actions, names=None):
        self.algebra = algebra
        self.degrees = tuple(int(x) for x in degrees)
        F = algebra.field
        n = len(self.degrees)
        self.d = la.as_matrix(F, d, (n, n)) if not _is_field_array(d, n) else d
        self.actions = [la.as_matrix(F, a, (n, n)) if not _is_field_array(a, n) else a for a in actions]
        self.names = list(names) if names is not None else [f"b{i}" for i in range(n)]

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim(self):
        return len(self.degrees)

    def __repr__(self):
        return f"DgLambdaModule(dim={self.dim}, degrees={self.degrees})"

    def validate(self) -> Validation:
        return validate(self)

    def graded_dims(self):
        out = {}
        for x in self.degrees:
            out[x] = out.get(x, 0) + 1
        return dict(sorted(out.items()))

    def euler_characteristic(self):
        return sum((-1) ** (x % 2) for x in self.degrees)

    def has_zero_differential(self):
        return la.is_zero(self.d)

    def block(self, X, rows_deg, cols_deg):
        r = [i for i, x in enumerate(self.degrees) if x == rows_deg]
        c = [i for i, x in enumerate(self.degrees) if x == cols_deg]
        return X[np.ix_(r, c)] if r and c else la.zeros(self.field, len(r), len(c))

    def shift(self, n: int) -> "DgLambdaModule":
        s = -1 if n % 2 else 1
        F = self.field
        return DgLambdaModule(self.algebra, [x + n for x in self.degrees], la.scale(F, s, self.d),
                              [la.scale(F, s, a) for a in self.actions], self.names)

    def direct_sum(self, other: "DgLambdaModule") -> "DgLambdaModule":
        _same_algebra(self, other)
        return DgLambdaModule(self.algebra, self.degrees + other.degrees, _blockdiag(self.field, self.d, other.d),
                              [_blockdiag(self.field, a, b) for a, b in zip(self.actions, other.actions)],
                              self.names + other.names)

    def with_contractible(self, degree: int) -> "DgLambdaModule":
        """M ⊕ (x -> y) with |x| = degree + 1, |y| = degree and zero action."""
        F = self.field
        cone = DgLambdaModule(self.algebra, [degree + 1, degree],
                              la.as_matrix(F, [[0, 0], [1, 0]]), [la.zeros(F, 2, 2)] * self.algebra.c,
                              ["x", "y"])
        return self.direct_sum(cone)

    def same_structure(self, other: "DgLambdaModule") -> bool:
        return (self.algebra == other.algebra and self.degrees == other.degrees
                and np.array_equal(self.d, other.d)
                and all(np.array_equal(a, b) for a, b in zip(self.actions, other.actions)))

    def act(self, i: int, v):
        return la.matmul(self.field, self.actions[i], _col(v))


def _is_field_array(x, n):
    return isinstance(x, np.ndarray) and x.dtype == object and x.shape == (n, n)


def _col(v):
    v = np.asarray(v, dtype=object)
    return v.reshape(-1, 1)


def _same_algebra(M, N):
    if M.algebra != N.algebra:
        raise ValueError(f"modules over different algebras: {M.algebra} vs {N.algebra}")


def _blockdiag(F, A, B):
    out = la.zeros(F, A.shape[0] + B.shape[0], A.shape[1] + B.shape[1])
    out[:A.shape[0], :A.shape[1]] = A
    out[A.shape[0]:, A.shape[1]:] = B
    return out


def validate(M: DgLambdaModule) -> Validation:
    """Check every DG module axiom; the report names the first failing identity."""
    F = M.field
    n, c = M.dim, M.algebra.c
    if M.d.shape != (n, n):
        return Validation(False, f"∂ has shape {M.d.shape}, expected {(n, n)}")
    if len(M.actions) != c:
        return Validation(False, f"expected {c} action matrices, got {len(M.actions)}")
    for i, a in enumerate(M.actions):
        if a.shape != (n, n):
            return Validation(False, f"e_{i + 1} has shape {a.shape}, expected {(n, n)}")
    deg = M.degrees
    for r, col in zip(*np.nonzero(M.d != 0)):
        if deg[r] != deg[col] - 1:
            return Validation(False, f"∂ is not of degree -1 at ({r},{col})")
    for i, a in enumerate(M.actions):
        for r, col in zip(*np.nonzero(a != 0)):
            if deg[r] != deg[col] + M.algebra.degrees[i]:
                return Validation(False, f"e_{i + 1} is not of degree {M.algebra.degrees[i]} at ({r},{col})")
    mm = lambda A, B: la.matmul(F, A, B)
    if not la.is_zero(mm(M.d, M.d)):
        return Validation(False, "∂² ≠ 0")
    for i, a in enumerate(M.actions):
        if not la.is_zero(la.add(F, mm(M.d, a), mm(a, M.d))):
            return Validation(False, f"∂e_{i + 1} + e_{i + 1}∂ ≠ 0")
    for i, a in enumerate(M.actions):
        if not la.is_zero(mm(a, a)):
            return Validation(False, f"e_{i + 1}² ≠ 0")
    for i, j in itertools.combinations(range(c), 2):
        a, b = M.actions[i], M.actions[j]
        if not la.is_zero(la.add(F, mm(a, b), mm(b, a))):
            return Validation(False, f"e_{i + 1}e_{j + 1} + e_{j + 1}e_{i + 1} ≠ 0")
    return Validation(True)


def require_valid(M: DgLambdaModule):
    v = validate(M)
    if not v:
        raise InvalidModule(v.failure)
    return M


# standard modules --------------------------------------------------------------

def trivial_module(alg: ExteriorAlgebra, degree: int = 0) -> DgLambdaModule:
    F = alg.field
    return DgLambdaModule(alg, [degree], la.zeros(F, 1, 1), [la.zeros(F, 1, 1)] * alg.c, ["1"])


def free_module(alg: ExteriorAlgebra) -> DgLambdaModule:
    """Λ acting on itself by left multiplication."""
    return cyclic_quotient(alg, ())


def cyclic_quotient(alg: ExteriorAlgebra, killed) -> DgLambdaModule:
    """Λ / (e_i Λ : i ∈ killed), i.e. the exterior algebra on the other generators."""
    killed = set(killed)
    F = alg.field
    basis = [s for s in alg.basis if not killed & set(s)]
    index = {s: k for k, s in enumerate(basis)}
    n = len(basis)
    actions = []
    for i in range(alg.c):
        A = la.zeros(F, n, n)
        if i not in killed:
            for k, s in enumerate(basis):
                w = alg.wedge(i, s)
                if w is not None:
                    A[index[w[1]], k] = F.convert(w[0])
        actions.append(A)
    names = ["".join(f"e{j + 1}" for j in s) or "1" for s in basis]
    return DgLambdaModule(alg, [alg.degree(s) for s in basis], la.zeros(F, n, n), actions, names)


def submodule_span(M: DgLambdaModule, vectors) -> np.ndarray:
    """Columns spanning the smallest DG submodule containing the given vectors."""
    F = M.field
    ops = [M.d] + M.actions
    cols = [_col(v) for v in vectors]
    span = la.column_space(F, np.concatenate(cols, axis=1)) if cols else la.zeros(F, M.dim, 0)
    while True:
        new = [la.matmul(F, X, span) for X in ops]
        grown = la.column_space(F, np.concatenate([span] + new, axis=1))
        if grown.shape[1] == span.shape[1]:
            return span
        span = grown


def quotient(M: DgLambdaModule, vectors) -> DgLambdaModule:
    """M / (DG submodule generated by homogeneous vectors)."""
    F = M.field
    sub = submodule_span(M, vectors)
    R, pivots = la.rref(F, sub.T)
    keep = [j for j in range(M.dim) if j not in set(pivots)]

    def project(X):
        # image of each kept basis vector, reduced modulo the submodule
        out = la.zeros(F, len(keep), len(keep))
        for k, j in enumerate(keep):
            v = X[:, j].copy()
            for row, p in zip(R, pivots):
                if v[p] != 0:
                    v = la.sub(F, v, la.scale(F, v[p], row))
            out[:, k] = v[keep]
        return out

    return DgLambdaModule(M.algebra, [M.degrees[j] for j in keep], project(M.d),
                          [project(a) for a in M.actions], [M.names[j] for j in keep])


# duals, tensor products, Hom into Λ ---------------------------------------------

def _dualize(F, X, degrees):
    signs = [(-1) ** (x % 2) for x in degrees]
    out = la.zeros(F, X.shape[1], X.shape[0])
    for r, c in zip(*np.nonzero(X != 0)):
        out[c, r] = F.mul(F.convert(-signs[c]), X[r, c])
    return out


def dual(M: DgLambdaModule) -> DgLambdaModule:
    """Hom_k(M, k) with e_i acting through the antipode e_i ↦ -e_i."""
    F = M.field
    return DgLambdaModule(M.algebra, [-x for x in M.degrees], _dualize(F, M.d, M.degrees),
                          [_dualize(F, a, M.degrees) for a in M.actions],
                          [f"{n}*" for n in M.names])


def tensor_k(M: DgLambdaModule, N: DgLambdaModule) -> DgLambdaModule:
    """M ⊗_k N with Λ acting through the coproduct e_i ↦ e_i⊗1 + 1⊗e_i."""
    _same_algebra(M, N)
    F = M.field
    P = la.diag(F, [(-1) ** (x % 2) for x in M.degrees])
    I = la.identity(F, N.dim)
    op = lambda X, Y: la.add(F, la.kron(F, X, I), la.kron(F, P, Y))
    return DgLambdaModule(M.algebra, [a + b for a in M.degrees for b in N.degrees], op(M.d, N.d),
                          [op(a, b) for a, b in zip(M.actions, N.actions)],
                          [f"{a}⊗{b}" for a in M.names for b in N.names])


def hom_into_lambda(M: DgLambdaModule) -> DgLambdaModule:
    """Hom_Λ(M, Λ): maps φ with φ(e_i m) = (-1)^{|e_i||φ|} e_i φ(m).

    Λ acts by post-composition and ∂φ = -(-1)^{|φ|} φ∘∂_M.
    """
    alg, F = M.algebra, M.field
    L = free_module(alg)
    nL, nM = L.dim, M.dim
    vecs, degs = [], []
    if nM:
        lo = min(L.degrees) - max(M.degrees)
        hi = max(L.degrees) - min(M.degrees)
        for deg in range(lo, hi + 1):
            slots = [(r, c) for r in range(nL) for c in range(nM) if L.degrees[r] == M.degrees[c] + deg]
            if not slots:
                continue
            pos = {s: k for k, s in enumerate(slots)}
            eqs = []
            for i in range(alg.c):
                s = -1 if (alg.degrees[i] * deg) % 2 else 1
                A, Li = M.actions[i], L.actions[i]
                # (Φ A)[r, c'] - s (L_i Φ)[r, c'] = 0 for all r, c'
                rows = {}
                for (r, c), k in pos.items():
                    for c2 in np.flatnonzero(A[c, :] != 0):
                        rows.setdefault((r, int(c2)), {})
                        rows[(r, int(c2))][k] = F.add(rows[(r, int(c2))].get(k, F.zero), A[c, c2])
                    for r2 in np.flatnonzero(Li[:, r] != 0):
                        rows.setdefault((int(r2), c), {})
                        val = F.mul(F.convert(-s), Li[r2, r])
                        rows[(int(r2), c)][k] = F.add(rows[(int(r2), c)].get(k, F.zero), val)
                eqs.extend(rows.values())
            E = la.zeros(F, len(eqs), len(slots))
            for q, row in enumerate(eqs):
                for k, v in row.items():
                    E[q, k] = v
            N = la.nullspace(F, E)
            for k in range(N.shape[1]):
                phi = la.zeros(F, nL, nM)
                for (r, c), idx in pos.items():
                    phi[r, c] = N[idx, k]
                vecs.append(phi)
                degs.append(deg)
    n = len(vecs)
    if n == 0:
        z = la.zeros(F, 0, 0)
        return DgLambdaModule(alg, [], z, [z] * alg.c, [])
    basis = np.stack([v.ravel() for v in vecs], axis=1)
    coords = la.Coordinates(F, basis)

    def operator(fn):
        out = la.zeros(F, n, n)
        for k, (phi, deg) in enumerate(zip(vecs, degs)):
            out[:, k] = coords(fn(phi, deg).ravel())[:, 0]
        return out

    d = operator(lambda phi, deg: la.scale(F, 1 if deg % 2 else -1, la.matmul(F, phi, M.d)))
    actions = [operator(lambda phi, deg, i=i: la.matmul(F, L.actions[i], phi)) for i in range(alg.c)]
    return DgLambdaModule(alg, degs, d, actions, [f"φ{k}" for k in range(n)])


def lambda_linear_maps(P: DgLambdaModule, Q: DgLambdaModule) -> list[np.ndarray]:
    """Basis of degree-0 maps f: P -> Q commuting with every e_i (zero differentials)."""
    F = P.field
    slots = [(r, c) for r in range(Q.dim) for c in range(P.dim) if Q.degrees[r] == P.degrees[c]]
    if not slots:
        return []
    pos = {s: k for k, s in enumerate(slots)}
    eqs = []
    for A, B in zip(P.actions, Q.actions):
        rows = {}
        for (r, c), k in pos.items():
            for c2 in np.flatnonzero(A[c, :] != 0):
                row = rows.setdefault((r, int(c2)), {})
                row[k] = F.add(row.get(k, F.zero), A[c, c2])
            for r2 in np.flatnonzero(B[:, r] != 0):
                row = rows.setdefault((int(r2), c), {})
                row[k] = F.sub(row.get(k, F.zero), B[r2, r])
        eqs.extend(rows.values())
    E = la.zeros(F, len(eqs), len(slots))
    for q, row in enumerate(eqs):
        for k, v in row.items():
            E[q, k] = v
    N = la.nullspace(F, E)
    out = []
    for k in range(N.shape[1]):
        f = la.zeros(F, Q.dim, P.dim)
        for (r, c), idx in pos.items():
            f[r, c] = N[idx, k]
        out.append(f)
    return out


def mapping_cone(f: np.ndarray, P: DgLambdaModule, Q: DgLambdaModule) -> DgLambdaModule:
    """Cone of a Λ-linear degree-0 map f: P -> Q between modules with zero differential."""
    F = P.field
    n, m = Q.dim, P.dim
    d = la.zeros(F, n + m, n + m)
    d[:n, n:] = f
    actions = [_blockdiag(F, B, la.scale(F, -1, A)) for A, B in zip(P.actions, Q.actions)]
    return DgLambdaModule(P.algebra, list(Q.degrees) + [x + 1 for x in P.degrees], d, actions,
                          Q.names + [f"s{x}" for x in P.names])


# homology ---------------------------------------------------------------------------

def homology_dims(M: DgLambdaModule, degrees=None) -> dict:
    """dim_k H_n(M) for each n (all degrees present by default)."""
    F = M.field
    present = sorted(set(M.degrees))
    degrees = present if degrees is None else degrees
    out = {}
    for n in degrees:
        dim_n = sum(1 for x in M.degrees if x == n)
        out_rank = la.rank(F, M.block(M.d, n - 1, n)) if dim_n else 0
        in_rank = la.rank(F, M.block(M.d, n, n + 1)) if dim_n else 0
        out[n] = dim_n - out_rank - in_rank
    return out


def _lambda_subquotient(alg, F, n_ambient, degrees, actions, Z, B, names_prefix="h"):
    """Zero-differential Λ-module Z/B; Z, B are dicts degree -> column bases."""
    out_deg, q_bases = [], {}
    for deg in sorted(Z):
        z = Z[deg]
        b = B.get(deg, la.zeros(F, n_ambient, 0))
        r0 = la.rank(F, b) if b.shape[1] else 0
        chosen = b
        picks = []
        for k in range(z.shape[1]):
            trial = np.concatenate([chosen, z[:, k:k + 1]], axis=1)
            if la.rank(F, trial) > r0 + len(picks):
                chosen = trial
                picks.append(k)
        if picks:
            q_bases[deg] = (z[:, picks], la.Coordinates(F, chosen), b.shape[1])
            out_deg += [deg] * len(picks)
    offsets, total = {}, 0
    for deg in sorted(q_bases):
        offsets[deg] = total
        total += q_bases[deg][0].shape[1]
    acts = []
    for i in range(alg.c):
        A = la.zeros(F, total, total)
        for deg, (q, _, _) in q_bases.items():
            tgt = deg + alg.degrees[i]
            if tgt not in q_bases:
                continue
            img = la.matmul(F, actions[i], q)
            _, coords, nb = q_bases[tgt]
            for k in range(q.shape[1]):
                c = coords(img[:, k])
                A[offsets[tgt]:offsets[tgt] + q_bases[tgt][0].shape[1], offsets[deg] + k] = c[nb:, 0]
        acts.append(A)
    return DgLambdaModule(alg, out_deg, la.zeros(F, total, total), acts,
                          [f"{names_prefix}{k}" for k in range(total)])


def homology_module(M: DgLambdaModule) -> DgLambdaModule:
    """H(M) with its induced Λ-action (zero differential)."""
    F = M.field
    Z, B = {}, {}
    idx = lambda n: [i for i, x in enumerate(M.degrees) if x == n]
    for n in sorted(set(M.degrees)):
        cols = idx(n)
        dn = M.d[:, cols]
        ker = la.nullspace(F, dn)
        zc = la.zeros(F, M.dim, ker.shape[1])
        zc[cols, :] = ker
        Z[n] = zc
        up = idx(n + 1)
        B[n] = la.column_space(F, M.d[:, up]) if up else la.zeros(F, M.dim, 0)
    return _lambda_subquotient(M.algebra, F, M.dim, M.degrees, M.actions, Z, B)


# universal resolutions and derived tensor windows ---------------------------------

def gamma_basis(alg: ExteriorAlgebra, max_degree=None, max_weight=None):
    """Divided-power monomials a with Σ(|e_i|+1)a_i <= max_degree, |a| <= max_weight."""
    w = [d + 1 for d in alg.degrees]
    out = []

    def rec(i, a, deg, wt):
        if i == alg.c:
            out.append(tuple(a))
            return
        k = 0
        while (max_degree is None or deg + k * w[i] <= max_degree) and (max_weight is None or wt + k <= max_weight):
            rec(i + 1, a + [k], deg + k * w[i], wt + k)
            k += 1

    if max_degree is None and max_weight is None:
        raise ValueError("a bound on Γ is required")
    rec(0, [], 0, 0)
    out.sort(key=lambda a: (sum(x * y for x, y in zip(a, w)), a))
    return out


def gamma_degree(alg, a):
    return sum((d + 1) * x for d, x in zip(alg.degrees, a))


def _minus(a, i):
    if a[i] == 0:
        return None
    b = list(a)
    b[i] -= 1
    return tuple(b)


@dataclass
class UniversalWindow:
    module: DgLambdaModule
    D: int
    gamma: list
    generator_weights: dict = field(default_factory=dict)

    def free_ranks(self):
        """Λ-free rank of u_{≤D}M per Γ-weight (resolution index)."""
        return dict(sorted(self.generator_weights.items()))


def universal_window(M: DgLambdaModule, D: int) -> UniversalWindow:
    """u_{≤D}M = Λ ⊗ Γ_{≤D} ⊗ M with the universal differential."""
    alg, F = M.algebra, M.field
    gam = gamma_basis(alg, max_degree=D)
    gidx = {a: k for k, a in enumerate(gam)}
    L = alg.basis
    triples = [(s, a, m) for s in L for a in gam for m in range(M.dim)]
    index = {t: k for k, t in enumerate(triples)}
    n = len(triples)
    d = la.zeros(F, n, n)
    acts = [la.zeros(F, n, n) for _ in range(alg.c)]
    one, neg = F.one, F.neg(F.one)
    for (s, a, m), col in index.items():
        sl = -1 if alg.degree(s) % 2 else 1
        for r in np.flatnonzero(M.d[:, m] != 0):
            _acc(F, d, index[(s, a, int(r))], col, F.mul(F.convert(sl), M.d[r, m]))
        for i in range(alg.c):
            b = _minus(a, i)
            if b is not None:
                for r in np.flatnonzero(M.actions[i][:, m] != 0):
                    _acc(F, d, index[(s, b, int(r))], col, F.mul(F.convert(sl), M.actions[i][r, m]))
                w = alg.wedge(i, s)
                if w is not None:
                    _acc(F, d, index[(w[1], b, m)], col, F.convert(-w[0]))
            w = alg.wedge(i, s)
            if w is not None:
                _acc(F, acts[i], index[(w[1], a, m)], col, F.convert(w[0]))
    degs = [alg.degree(s) + gamma_degree(alg, a) + M.degrees[m] for s, a, m in triples]
    weights = {}
    for a in gam:
        weights[sum(a)] = weights.get(sum(a), 0) + M.dim
    mod = DgLambdaModule(alg, degs, d, acts, [f"{s}|{a}|{M.names[m]}" for s, a, m in triples])
    return UniversalWindow(mod, D, gam, weights)


def _acc(F, X, r, c, v):
    X[r, c] = F.add(X[r, c], v)


class WindowTooSmall(ValueError):
    pass


def required_window(M: DgLambdaModule, N: DgLambdaModule, u: int) -> int:
    lo = min(M.degrees, default=0) + min(N.degrees, default=0)
    return u + max(M.algebra.degrees, default=1) - min(0, lo)


def _tensor_complex(M, N, gam):
    """N ⊗_Λ u M = N ⊗ Γ ⊗ M with Λ acting on the N factor."""
    alg, F = M.algebra, M.field
    triples = [(p, a, m) for p in range(N.dim) for a in gam for m in range(M.dim)]
    index = {t: k for k, t in enumerate(triples)}
    n = len(triples)
    d = la.zeros(F, n, n)
    acts = [la.zeros(F, n, n) for _ in range(alg.c)]
    for (p, a, m), col in index.items():
        sn = -1 if N.degrees[p] % 2 else 1
        for r in np.flatnonzero(N.d[:, p] != 0):
            _acc(F, d, index[(int(r), a, m)], col, N.d[r, p])
        for r in np.flatnonzero(M.d[:, m] != 0):
            _acc(F, d, index[(p, a, int(r))], col, F.mul(F.convert(sn), M.d[r, m]))
        for i in range(alg.c):
            b = _minus(a, i)
            if b is not None:
                for r in np.flatnonzero(M.actions[i][:, m] != 0):
                    _acc(F, d, index[(p, b, int(r))], col, F.mul(F.convert(sn), M.actions[i][r, m]))
                for r in np.flatnonzero(N.actions[i][:, p] != 0):
                    _acc(F, d, index[(int(r), b, m)], col, F.neg(N.actions[i][r, p]))
            for r in np.flatnonzero(N.actions[i][:, p] != 0):
                _acc(F, acts[i], index[(int(r), a, m)], col, N.actions[i][r, p])
    degs = [N.degrees[p] + gamma_degree(alg, a) + M.degrees[m] for p, a, m in triples]
    weights = [sum(a) for _, a, _ in triples]
    mod = DgLambdaModule(alg, degs, d, acts, [f"{N.names[p]}|{a}|{M.names[m]}" for p, a, m in triples])
    return mod, weights


def soft_truncation(X: DgLambdaModule, u: int) -> DgLambdaModule:
    """X_n for n <= u plus B_u = ∂(X_{u+1}) placed in degree u + 1."""
    alg, F = X.algebra, X.field
    low = [i for i, x in enumerate(X.degrees) if x <= u]
    top = [i for i, x in enumerate(X.degrees) if x == u + 1]
    at_u = [i for i, x in enumerate(X.degrees) if x == u]
    B = la.column_space(F, X.d[np.ix_(at_u, top)]) if top and at_u else la.zeros(F, len(at_u), 0)
    nb = B.shape[1]
    n = len(low) + nb
    pos = {i: k for k, i in enumerate(low)}
    u_rows = [pos[i] for i in at_u]
    d = la.zeros(F, n, n)
    d[:len(low), :len(low)] = X.d[np.ix_(low, low)]
    for k in range(nb):
        d[u_rows, len(low) + k] = B[:, k]
    coords = la.Coordinates(F, B) if nb else None
    acts = []
    for i in range(alg.c):
        A = la.zeros(F, n, n)
        A[:len(low), :len(low)] = X.actions[i][np.ix_(low, low)]
        src = [i2 for i2 in low if X.degrees[i2] + alg.degrees[i] == u + 1]
        if src and nb:
            img = la.matmul(F, X.d[np.ix_(at_u, top)], X.actions[i][np.ix_(top, src)])
            for k, s in enumerate(src):
                A[len(low):, pos[s]] = coords(img[:, k])[:, 0]
        acts.append(A)
    degs = [X.degrees[i] for i in low] + [u + 1] * nb
    return DgLambdaModule(alg, degs, d, acts, [X.names[i] for i in low] + [f"B{k}" for k in range(nb)])


@dataclass
class DerivedTensorWindow:
    complex: DgLambdaModule
    truncated: DgLambdaModule
    tor: dict
    tor_by_weight: dict | None
    D: int
    u: int


def derived_tensor_window(M: DgLambdaModule, N: DgLambdaModule, u: int, D: int | None = None,
                          by_weight: bool = True) -> DerivedTensorWindow:
    """τ_{≤u}(u_{≤D}M ⊗_Λ N) and the Tor dimensions in degrees <= u.

    ``tor`` is indexed by total degree.  When both differentials vanish the
    complex is also graded by Γ-weight, and ``tor_by_weight`` gives
    dim Tor_w (resolution index w) for w <= u.
    """
    _same_algebra(M, N)
    if u < 0:
        raise ValueError("u must be non-negative")
    need = required_window(M, N, u)
    if D is None:
        D = need
    elif D < need:
        raise WindowTooSmall(f"window D = {D} is too small for u = {u}: need D >= {need}")
    alg = M.algebra
    X, _ = _tensor_complex(M, N, gamma_basis(alg, max_degree=D))
    lo = min(M.degrees, default=0) + min(N.degrees, default=0)
    tor = {n: h for n, h in homology_dims(X, range(lo, u + 1)).items()}
    weights = None
    if by_weight and M.has_zero_differential() and N.has_zero_differential():
        weights = tor_by_weight(M, N, u)
    return DerivedTensorWindow(X, soft_truncation(X, u), tor, weights, D, u)


def _weight_blocks(M, N, u):
    gam = gamma_basis(M.algebra, max_weight=u + 1)
    X, weights = _tensor_complex(M, N, gam)
    return X, weights


def tor_by_weight(M: DgLambdaModule, N: DgLambdaModule, u: int) -> dict:
    """dim_k Tor_w^Λ(M, N) for 0 <= w <= u; both differentials must vanish."""
    return {w: H.dim for w, H in tor_modules_by_weight(M, N, u).items()}


def tor_modules_by_weight(M: DgLambdaModule, N: DgLambdaModule, u: int) -> dict:
    """Tor_w^Λ(M, N) for w <= u as Λ-modules (action through N)."""
    if not (M.has_zero_differential() and N.has_zero_differential()):
        raise ValueError("the weight grading needs zero differentials")
    X, weights = _weight_blocks(M, N, u)
    F = X.field
    out = {}
    for w in range(u + 1):
        Z, B = {}, {}
        for n in sorted(set(x for x, wt in zip(X.degrees, weights) if wt == w)):
            cols = [i for i, (x, wt) in enumerate(zip(X.degrees, weights)) if x == n and wt == w]
            ker = la.nullspace(F, X.d[:, cols])
            zc = la.zeros(F, X.dim, ker.shape[1])
            zc[cols, :] = ker
            Z[n] = zc
            up = [i for i, (x, wt) in enumerate(zip(X.degrees, weights)) if x == n + 1 and wt == w + 1]
            B[n] = la.column_space(F, X.d[:, up]) if up else la.zeros(F, X.dim, 0)
        out[w] = _lambda_subquotient(X.algebra, F, X.dim, X.degrees, X.actions, Z, B, f"t{w}_")
    return out


def ext_dimensions_universal(M: DgLambdaModule, upto: int) -> dict:
    """dim_k Ext^j_Λ(M, k) for j <= upto, as dim Tor_j(k, M) over the universal window."""
    k = trivial_module(M.algebra)
    lo = min(M.degrees, default=0)
    if upto < lo:
        return {}
    W = derived_tensor_window(M, k, max(upto, 0), by_weight=False) if upto >= 0 else None
    if W is None:
        return {j: 0 for j in range(lo, upto + 1)}
    return {j: W.tor.get(j, 0) for j in range(lo, upto + 1)}


# random modules (for property tests) ------------------------------------------------

def random_module(alg: ExteriorAlgebra, rng: random.Random, max_dim: int = 8,
                  with_differential: bool = False) -> DgLambdaModule:
    if with_differential:
        P = _random_quotient(alg, rng, max(1, max_dim // 2))
        Q = _random_quotient(alg, rng, max(1, max_dim - P.dim))
        maps = lambda_linear_maps(P, Q)
        F = alg.field
        f = la.zeros(F, Q.dim, P.dim)
        for g in maps:
            f = la.add(F, f, la.scale(F, rng.randrange(0, 5), g))
        return mapping_cone(f, P, Q)
    return _random_quotient(alg, rng, max_dim)


def _random_quotient(alg, rng, max_dim):
    F = alg.field
    gens = rng.choice([1, 1, 2])
    M = free_module(alg).shift(rng.choice([-1, 0, 1]))
    for _ in range(gens - 1):
        M = M.direct_sum(free_module(alg).shift(rng.choice([0, 1])))
    first = True
    while first or M.dim > max_dim:
        first = False
        deg = rng.choice(sorted(set(M.degrees)))
        idx = [i for i, x in enumerate(M.degrees) if x == deg]
        v = np.array([F.zero] * M.dim, dtype=object)
        for i in idx:
            v[i] = F.convert(rng.randrange(-2, 3))
        if rng.random() < 0.3 and M.dim <= max_dim:
            break
        if any(x != 0 for x in v):
            M = quotient(M, [v])
    return M
