"""Support varieties of DG modules over exterior algebras and Koszul complexes."""

from .scalars import GF, QQ, FieldElement, PrimeField, Rationals
from .polyring import (HilbertSeries, HomogeneousIdeal, Polynomial, PolyRing, eliminate,
                       groebner_basis, hilbert_series, ideal_intersection, radical_membership,
                       symmetric_ring)

__version__ = "0.1.0"
