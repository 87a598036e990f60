"""Support varieties of three small Koszul-complex modules over F_5.

R = k[x, y], f = (x^2, y^2), so the Koszul complex E is the exterior algebra
on two degree-one generators and S = k[chi1, chi2] has chi in degree 2.
"""

from ksv.koszul import golden_suite, reduce_t, support_E
from ksv.bgg import ext_module
from ksv.scalars import GF

data, mods = golden_suite(GF(5))
print("operator ring:", ", ".join(data.symmetric_ring().names))
for name, M in mods.items():
    V = support_E(M)
    E = ext_module(reduce_t(M))
    print(f"\n{name}: V = {V.describe()['ideal'] or ['0']}  ({V.classification.name.lower()})")
    print("  Ext dimensions, degrees 0..6:", E.hilbert_function(6, 0))
