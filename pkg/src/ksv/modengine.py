"""Finitely generated graded modules over a weighted polynomial ring.

Vectors of a free module are sparse dicts ``{(position, exponent): coeff}``;
module Groebner bases use a position-over-term order extending grevlex (the
earliest position is the most significant).  Every module that comes out of a
computation is presented as a cokernel ``F / <relations>``.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _groebner as gb
from .polyring import HomogeneousIdeal, Polynomial, PolyRing, hilbert_series_monomial, ideal_intersection

DEFAULT_WINDOW = 12


# vector helpers ---------------------------------------------------------------

def column_to_vec(col):
    vec = {}
    for i, p in enumerate(col):
        for e, c in p.terms.items():
            vec[(i, e)] = c
    return vec


def vec_to_column(ring, vec, rank):
    parts = [{} for _ in range(rank)]
    for (i, e), c in vec.items():
        parts[i][e] = c
    return [Polynomial(ring, t) for t in parts]


def vec_degree(ring, vec, degrees):
    """Degree of a homogeneous vector (None for zero); error if inhomogeneous."""
    ds = {degrees[i] + ring.exp_degree(e) for (i, e) in vec}
    if len(ds) > 1:
        raise ValueError("vector is not homogeneous")
    return ds.pop() if ds else None


def _scale_shift(vec, F, c, exp, pos_offset=0):
    out = {}
    for (i, e), v in vec.items():
        out[(i + pos_offset, tuple(a + b for a, b in zip(e, exp)))] = F.mul(c, v)
    return out


def _add_into(acc, vec, F):
    for t, v in vec.items():
        nv = F.add(acc.get(t, F.zero), v)
        if nv == 0:
            acc.pop(t, None)
        else:
            acc[t] = nv


def _poly_times_vec(ring, poly_terms, vec, pos_offset=0):
    F = ring.field
    acc = {}
    for e, c in poly_terms.items():
        _add_into(acc, _scale_shift(vec, F, c, e, pos_offset), F)
    return acc


def _order(rank, priority=None):
    """POT order; ``priority`` lists positions from most to least significant."""
    if priority is None:
        rankmap = [rank - 1 - i for i in range(rank)]
    else:
        rankmap = [0] * rank
        for r, p in enumerate(priority):
            rankmap[p] = rank - 1 - r
    return gb.TermOrder(gb.grevlex_key, rankmap)


def module_groebner(ring, vecs, degrees, priority=None):
    order = _order(len(degrees), priority)
    deg = lambda t: degrees[t[0]] + ring.exp_degree(t[1])
    return gb.groebner([v for v in vecs if v], ring.field, order, deg), order


# free modules and maps ----------------------------------------------------------

@dataclass(frozen=True)
class FreeModule:
    ring: PolyRing
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))

    @property
    def rank(self):
        return len(self.degrees)


class GradedMap:
    """A matrix of polynomials F -> G; column j is the image of generator j.

    Entry (i, j) is homogeneous of degree ``deg(source j) + shift - deg(target i)``.
    """

    def __init__(self, source: FreeModule, target: FreeModule, columns, shift=0, check=True):
        self.source = source
        self.target = target
        self.shift = shift
        ring = source.ring
        self.columns = [[ring(p) for p in col] for col in columns]
        if len(self.columns) != source.rank or any(len(c) != target.rank for c in self.columns):
            raise ValueError("matrix shape does not match the free modules")
        if check:
            for j, col in enumerate(self.columns):
                for i, p in enumerate(col):
                    if p.is_zero():
                        continue
                    want = source.degrees[j] + shift - target.degrees[i]
                    if not p.is_homogeneous() or p.degree() != want:
                        raise ValueError(
                            f"entry ({i},{j}) = {p} is not homogeneous of degree {want}")

    @classmethod
    def from_rows(cls, source, target, rows, shift=0, check=True):
        cols = [[rows[i][j] for i in range(target.rank)] for j in range(source.rank)]
        return cls(source, target, cols, shift, check)

    @property
    def ring(self):
        return self.source.ring

    def entry(self, i, j):
        return self.columns[j][i]

    def rows(self):
        return [[self.columns[j][i] for j in range(self.source.rank)] for i in range(self.target.rank)]

    def vectors(self):
        return [column_to_vec(c) for c in self.columns]

    def column_degrees(self):
        return [d + self.shift for d in self.source.degrees]

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        ring = self.ring
        sparse = [[(i, q) for i, q in enumerate(col) if q] for col in self.columns]
        cols = []
        for col in other.columns:
            out = [ring.zero() for _ in range(self.target.rank)]
            for k, p in enumerate(col):
                if p:
                    for i, q in sparse[k]:
                        out[i] = out[i] + p * q
            cols.append(out)
        return GradedMap(other.source, self.target, cols, self.shift + other.shift, check=False)

    def is_zero(self):
        return all(p.is_zero() for col in self.columns for p in col)


# kernels and subquotients ------------------------------------------------------

def kernel_vectors(ring, columns, target_degrees, column_degrees):
    """Generators (as vectors in the source) of the kernel of a column map.

    Uses the elimination trick: a Groebner basis of the graph module
    ``{(phi(v), v)}`` under a POT order with the target positions on top.
    """
    m, n = len(target_degrees), len(columns)
    if n == 0:
        return []
    graph = []
    for j, col in enumerate(columns):
        d = vec_degree(ring, col, target_degrees) if col else None
        if d is not None and d != column_degrees[j]:
            raise ValueError(f"column {j} has degree {d}, expected {column_degrees[j]}")
        v = dict(col)
        v[(m + j, (0,) * ring.nvars)] = ring.field.one
        graph.append(v)
    degrees = list(target_degrees) + list(column_degrees)
    basis, _ = module_groebner(ring, graph, degrees)
    out = []
    for lt, v in basis:
        if lt[0] >= m:
            out.append({(i - m, e): c for (i, e), c in v.items()})
    return out


def preimage_vectors(ring, columns, target_degrees, column_degrees, relations):
    """{v : phi(v) ∈ <relations>} as generating vectors in the source."""
    rel_degrees = [vec_degree(ring, r, target_degrees) for r in relations]
    n = len(columns)
    ker = kernel_vectors(ring, list(columns) + list(relations), target_degrees,
                         list(column_degrees) + rel_degrees)
    out = []
    for v in ker:
        w = {(i, e): c for (i, e), c in v.items() if i < n}
        if w:
            out.append(w)
    return out


@dataclass
class PresentedModule:
    """coker(relations) = F / <relations> with F free on generators of ``degrees``.

    ``embedding`` optionally records, for a subquotient, the ambient vectors the
    generators came from.
    """

    ring: PolyRing
    degrees: tuple
    relations: list
    embedding: list | None = None

    def __post_init__(self):
        self.degrees = tuple(self.degrees)
        self.relations = [r for r in self.relations if r]
        self._gb = None

    @property
    def rank(self):
        return len(self.degrees)

    @classmethod
    def cokernel(cls, phi: GradedMap):
        return cls(phi.ring, phi.target.degrees, phi.vectors())

    @classmethod
    def quotient_ring(cls, ideal: HomogeneousIdeal, degree=0):
        rels = [{(0, e): c for e, c in g.terms.items()} for g in ideal.gens]
        return cls(ideal.ring, (degree,), rels)

    @classmethod
    def free(cls, ring, degrees):
        return cls(ring, tuple(degrees), [])

    def relation_matrix(self):
        return [vec_to_column(self.ring, r, self.rank) for r in self.relations]

    def groebner(self):
        if self._gb is None:
            self._gb = module_groebner(self.ring, self.relations, self.degrees)
        return self._gb

    def normal_form(self, vec):
        basis, order = self.groebner()
        return gb.reduce_vector(vec, basis, self.ring.field, order)

    def hilbert_series(self):
        basis, _ = self.groebner()
        leads = [[] for _ in range(self.rank)]
        for lt, _ in basis:
            leads[lt[0]].append(lt[1])
        return hilbert_series_monomial(leads, self.degrees, self.ring.weights)

    def is_zero(self):
        basis, _ = self.groebner()
        units = {lt[0] for lt, _ in basis if not any(lt[1])}
        return len(units) == self.rank

    def pruned(self) -> "PresentedModule":
        """Drop generators killed by relations with a unit coefficient."""
        F = self.ring.field
        zero = (0,) * self.ring.nvars
        rels = [dict(r) for r in self.relations]
        alive = list(range(self.rank))
        emb = list(self.embedding) if self.embedding is not None else None
        while True:
            pick = None
            for ri, r in enumerate(rels):
                for (i, e), c in r.items():
                    if e == zero:
                        pick = (ri, i, c)
                        break
                if pick:
                    break
            if pick is None:
                break
            ri, j, c = pick
            r = rels.pop(ri)
            inv = F.inv(c)
            new = []
            for s in rels:
                coef = {e: v for (i, e), v in s.items() if i == j}
                if coef:
                    sub = _poly_times_vec(self.ring, {e: F.mul(v, inv) for e, v in coef.items()}, r)
                    s = dict(s)
                    for t, v in sub.items():
                        nv = F.sub(s.get(t, F.zero), v)
                        if nv == 0:
                            s.pop(t, None)
                        else:
                            s[t] = nv
                if s:
                    new.append(s)
            rels = new
            alive.remove(j)
        index = {old: k for k, old in enumerate(alive)}
        rels = [{(index[i], e): c for (i, e), c in r.items()} for r in rels]
        degrees = tuple(self.degrees[i] for i in alive)
        if emb is not None:
            emb = [emb[i] for i in alive]
        return PresentedModule(self.ring, degrees, rels, emb)

    def colon_generator(self, j) -> HomogeneousIdeal:
        """(relations : e_j) = {s : s·e_j ∈ <relations>}."""
        priority = [i for i in range(self.rank) if i != j] + [j]
        basis, _ = module_groebner(self.ring, self.relations, self.degrees, priority)
        gens = []
        for lt, v in basis:
            if lt[0] == j:
                gens.append(Polynomial(self.ring, {e: c for (i, e), c in v.items()}))
        return HomogeneousIdeal(self.ring, gens, check=False)

    def annihilator(self) -> HomogeneousIdeal:
        """ann_S(M) = ∩_j (relations : e_j), exact."""
        if self.rank == 0:
            return HomogeneousIdeal(self.ring, [self.ring.one()], check=False)
        out = None
        for j in range(self.rank):
            I = self.colon_generator(j)
            out = I if out is None else ideal_intersection(out, I)
            if out.is_zero():
                break
        return out

    def minimal_generator_degrees(self):
        """Degrees of a minimal generating set, from dim_k (M / S^+ M)."""
        rels = list(self.relations)
        for j in range(self.rank):
            for v in range(self.ring.nvars):
                e = tuple(1 if k == v else 0 for k in range(self.ring.nvars))
                rels.append({(j, e): self.ring.field.one})
        top = PresentedModule(self.ring, self.degrees, rels)
        hs = top.hilbert_series()
        if hs.is_zero():
            return []
        lo, hi = min(self.degrees), max(self.degrees)
        out = []
        for d, n in hs.coefficients(hi, lo).items():
            out += [d] * n
        return out

    def generator_degree_bound(self):
        degs = self.minimal_generator_degrees()
        return max(degs) if degs else None

    def __repr__(self):
        return f"PresentedModule(degrees={self.degrees}, {len(self.relations)} relations)"


def subquotient(ring, ambient_degrees, gens, gen_degrees, relations) -> PresentedModule:
    """(<gens> + <relations>) / <relations> presented on the generators ``gens``."""
    rels = preimage_vectors(ring, gens, ambient_degrees, gen_degrees, relations)
    return PresentedModule(ring, tuple(gen_degrees), rels, embedding=list(gens))


def kernel(phi: GradedMap) -> GradedMap:
    """A map onto ker(phi) from a new free module (columns = syzygies)."""
    vecs = kernel_vectors(phi.ring, phi.vectors(), phi.target.degrees, phi.column_degrees())
    degs = [vec_degree(phi.ring, v, phi.source.degrees) for v in vecs]
    src = FreeModule(phi.ring, tuple(degs))
    cols = [vec_to_column(phi.ring, v, phi.source.rank) for v in vecs]
    return GradedMap(src, phi.source, cols, 0, check=False)


def annihilator(M: PresentedModule) -> HomogeneousIdeal:
    return M.annihilator()


# resolutions and Tor -------------------------------------------------------------

def free_resolution(X: PresentedModule, length: int):
    """A finite free resolution F_0 <- F_1 <- ... as a list of (degrees, columns)."""
    ring = X.ring
    steps = [(tuple(X.degrees), None)]
    cols = list(X.relations)
    degs = tuple(vec_degree(ring, c, X.degrees) for c in cols)
    for _ in range(length + 1):
        steps.append((degs, cols))
        if not cols:
            cols, degs = [], ()
            continue
        prev = steps[-1]
        nxt = kernel_vectors(ring, prev[1], steps[-2][0], prev[0])
        cols = nxt
        degs = tuple(vec_degree(ring, c, prev[0]) for c in nxt)
    return steps


def _tensor_columns(ring, cols, src_rank, tgt_rank, g_rank):
    """Columns of phi ⊗ 1_G for phi given by ``cols`` (vectors in the target)."""
    out = []
    for a in range(src_rank):
        col = cols[a]
        for b in range(g_rank):
            out.append({(i * g_rank + b, e): c for (i, e), c in col.items()})
    return out


def _block_relations(rels, nblocks, g_rank):
    out = []
    for a in range(nblocks):
        for v in rels:
            out.append({(a * g_rank + i, e): c for (i, e), c in v.items()})
    return out


def resolve_and_tor(X: PresentedModule, Y: PresentedModule, maxlen: int):
    """Tor_i^S(X, Y) for 0 <= i <= maxlen, each as a pruned PresentedModule."""
    ring = X.ring
    steps = free_resolution(X, maxlen + 1)
    gr = Y.rank
    gdeg = Y.degrees
    tors = []
    for i in range(maxlen + 1):
        fdeg, _ = steps[i]
        tdeg = tuple(a + b for a in fdeg for b in gdeg)
        rel_here = _block_relations(Y.relations, len(fdeg), gr)
        if i + 1 < len(steps) and steps[i + 1][1]:
            ndeg, ncols = steps[i + 1]
            image = _tensor_columns(ring, ncols, len(ndeg), len(fdeg), gr)
        else:
            image = []
        if i == 0:
            gens = [{(k, (0,) * ring.nvars): ring.field.one} for k in range(len(tdeg))]
            gdegs = list(tdeg)
        else:
            pdeg, _ = steps[i - 1]
            ptdeg = tuple(a + b for a in pdeg for b in gdeg)
            cols = _tensor_columns(ring, steps[i][1], len(fdeg), len(pdeg), gr)
            gens = preimage_vectors(ring, cols, ptdeg, list(tdeg), _block_relations(Y.relations, len(pdeg), gr))
            gdegs = [vec_degree(ring, g, tdeg) for g in gens]
        if not gens:
            tors.append(PresentedModule(ring, (), []))
            continue
        T = subquotient(ring, tdeg, gens, gdegs, image + rel_here)
        tors.append(T.pruned())
    return tors


# DG homology ------------------------------------------------------------------------

class NotADifferential(ValueError):
    pass


def dg_homology(F: FreeModule, delta: GradedMap) -> PresentedModule:
    """ker(delta) / im(delta) for a square-zero endomorphism of a free module."""
    if delta.source != F or delta.target != F:
        raise ValueError("delta must be an endomorphism of F")
    if not delta.compose(delta).is_zero():
        raise NotADifferential("not a differential: delta^2 != 0")
    ring = F.ring
    cols = delta.vectors()
    cdeg = delta.column_degrees()
    K = kernel_vectors(ring, cols, F.degrees, cdeg)
    kdeg = [vec_degree(ring, v, F.degrees) for v in K]
    if not K:
        return PresentedModule(ring, (), [])
    H = subquotient(ring, F.degrees, K, kdeg, [c for c in cols if c])
    return H.pruned()
