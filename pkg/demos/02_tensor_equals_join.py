"""Support of a derived tensor product equals the join of the supports.

For every pair of golden modules we compute both sides and the Kunneth
oracle, which compares Tor dimensions in a finite window with the prediction
coming from the two Ext modules.
"""

import itertools

from ksv.koszul import golden_suite, tensor_support_E
from ksv.scalars import QQ


def ideal(V):
    return ", ".join(V.describe()["ideal"]) or "0"


_, mods = golden_suite(QQ)
for a, b in itertools.combinations_with_replacement(mods, 2):
    T = tensor_support_E(mods[a], mods[b], window=6)
    verdict = "ok" if T.equal_up_to_radical and T.oracle.match else "MISMATCH"
    print(f"{a} ⊗ {b}: join V({ideal(T.join)}), direct V({ideal(T.direct)}), oracle {T.oracle.match} -> {verdict}")
