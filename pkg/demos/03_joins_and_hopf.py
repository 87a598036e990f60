"""Joins of cones and the tensor product over k for exterior-algebra modules.

Part one joins two points of P^1: the result is the whole line.  Part two
checks V(M ⊗_k N) = V(M) ∩ V(N) for the cyclic modules Λ/e1 and Λ/e2, whose
tensor product is free.
"""

from ksv.bgg import support
from ksv.extdg import ExteriorAlgebra, cyclic_quotient, tensor_k
from ksv.polyring import symmetric_ring
from ksv.scalars import GF
from ksv.varieties import VarietyHandle, join

F = GF(5)
S = symmetric_ring(2, field=F)
c1, c2 = S.gens
p, q = VarietyHandle.of(S, [c1]), VarietyHandle.of(S, [c2])
print("join of V(chi1) and V(chi2):", join(p, q).describe())
print("join of V(chi1) with itself:", join(p, p).describe())

alg = ExteriorAlgebra(2, field=F)
A, B = cyclic_quotient(alg, [0]), cyclic_quotient(alg, [1])
T = tensor_k(A, B)
print("\nV(Λ/e1) =", support(A).describe()["ideal"])
print("V(Λ/e2) =", support(B).describe()["ideal"])
print(f"V(Λ/e1 ⊗ Λ/e2) (dim {T.dim}) =", support(T).describe()["ideal"],
      "| intersection:", support(A).intersect(support(B)).describe()["ideal"])
