"""Closed cones in the affine space of S: joins, Δ-preimages and radical-level comparison."""

from __future__ import annotations

import enum
import math

from .polyring import (HomogeneousIdeal, PolyRing, eliminate, enveloping_ring,
                       radical_membership)


class VarietyClass(enum.Enum):
    UNIT = "unit"              # empty cone: the ideal is (1)
    CONE_POINT = "cone-point"  # radical is the irrelevant ideal; empty in Proj
    POSITIVE = "positive"      # a nonempty subset of Proj S


class VarietyHandle:
    """V(I) for a homogeneous ideal I, compared only up to radical."""

    def __init__(self, ideal: HomogeneousIdeal):
        self.ideal = ideal
        self._cls = None

    @classmethod
    def of(cls, ring: PolyRing, gens):
        return cls(HomogeneousIdeal(ring, gens))

    @classmethod
    def everything(cls, ring: PolyRing):
        return cls(HomogeneousIdeal(ring, []))

    @classmethod
    def cone_point(cls, ring: PolyRing):
        return cls(HomogeneousIdeal(ring, ring.gens))

    @classmethod
    def empty(cls, ring: PolyRing):
        return cls(HomogeneousIdeal(ring, [ring.one()]))

    @property
    def ring(self):
        return self.ideal.ring

    @property
    def classification(self) -> VarietyClass:
        if self._cls is None:
            if self.ideal.is_unit():
                self._cls = VarietyClass.UNIT
            elif all(radical_membership(x, self.ideal) for x in self.ring.gens):
                self._cls = VarietyClass.CONE_POINT
            else:
                self._cls = VarietyClass.POSITIVE
        return self._cls

    @property
    def proj_dimension(self):
        """-inf for UNIT, -1 for the cone point, else dim of the subset of Proj S."""
        cls = self.classification
        if cls is VarietyClass.UNIT:
            return -math.inf
        if cls is VarietyClass.CONE_POINT:
            return -1
        return self.ideal.hilbert_series().proj_dimension

    def contains(self, other: "VarietyHandle") -> bool:
        """other ⊆ self, i.e. I(self) ⊆ √I(other)."""
        _same_ring(self, other)
        return all(radical_membership(g, other.ideal) for g in self.ideal.gens)

    def __le__(self, other):
        return other.contains(self)

    def __eq__(self, other):
        if not isinstance(other, VarietyHandle):
            return NotImplemented
        return self.contains(other) and other.contains(self)

    __hash__ = None

    def intersect(self, other: "VarietyHandle") -> "VarietyHandle":
        _same_ring(self, other)
        return VarietyHandle(self.ideal + other.ideal)

    def union(self, other: "VarietyHandle") -> "VarietyHandle":
        _same_ring(self, other)
        return VarietyHandle(self.ideal * other.ideal)

    def generators(self):
        return self.ideal.canonical_gens()

    def describe(self) -> dict:
        d = self.proj_dimension
        return {
            "ideal": self.generators(),
            "class": self.classification.value,
            "proj_dimension": None if d == -math.inf else int(d),
        }

    def contains_point(self, point) -> bool:
        """[point] ∈ V(I): every generator vanishes there."""
        return all(g.evaluate(point) == 0 for g in self.ideal.gens)

    def __repr__(self):
        return f"V{self.ideal!r}"


def _same_ring(U, V):
    if U.ring != V.ring:
        raise ValueError(f"ambient mismatch: {U.ring} vs {V.ring}")


def _diagonal_ring(S: PolyRing):
    """k[y, z, χ] with the y, z block first (to be eliminated)."""
    Se, _, _ = enveloping_ring(S)
    big = PolyRing(Se.names + S.names, Se.weights + S.weights, S.field)
    c = S.nvars
    ys = lambda p: p.rename(big, list(range(c)))
    zs = lambda p: p.rename(big, list(range(c, 2 * c)))
    chis = lambda p: p.rename(big, list(range(2 * c, 3 * c)))
    diag = [big.var(2 * c + i) - big.var(i) - big.var(c + i) for i in range(c)]
    return big, Se, ys, zs, chis, diag


def join(U: VarietyHandle, V: VarietyHandle) -> VarietyHandle:
    """Eliminate y, z from I(y) + J(z) + (χ_i - y_i - z_i)."""
    _same_ring(U, V)
    S = U.ring
    big, _, ys, zs, _, diag = _diagonal_ring(S)
    gens = [ys(g) for g in U.ideal.gens] + [zs(g) for g in V.ideal.gens] + diag
    ideal = eliminate(HomogeneousIdeal(big, gens, check=False), list(range(2 * S.nvars)), target=S)
    return VarietyHandle(ideal)


def delta_preimage(K: HomogeneousIdeal, S: PolyRing) -> HomogeneousIdeal:
    """Δ⁻¹(K) for an ideal K of S^e = k[y, z], with Δ(χ_i) = y_i + z_i."""
    big, Se, _, _, _, diag = _diagonal_ring(S)
    if K.ring != Se:
        raise ValueError("K must live in the enveloping ring of S")
    emb = lambda p: p.rename(big, list(range(2 * S.nvars)))
    gens = [emb(g) for g in K.gens] + diag
    return eliminate(HomogeneousIdeal(big, gens, check=False), list(range(2 * S.nvars)), target=S)


def product_ideal(I: HomogeneousIdeal, J: HomogeneousIdeal) -> HomogeneousIdeal:
    """I(y) + J(z) in S^e."""
    S = I.ring
    Se, left, right = enveloping_ring(S)
    return HomogeneousIdeal(Se, [left(g) for g in I.gens] + [right(g) for g in J.gens], check=False)


def compare(U: VarietyHandle, V: VarietyHandle) -> dict:
    a, b = V.contains(U), U.contains(V)
    rel = "equal" if a and b else "U⊆V" if a else "V⊆U" if b else "incomparable"
    dim = lambda h: None if h.proj_dimension == -math.inf else int(h.proj_dimension)
    return {"relation": rel, "dim_U": dim(U), "dim_V": dim(V)}
