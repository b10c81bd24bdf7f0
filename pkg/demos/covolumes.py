"""Covolumes of matched lattices and the Euler tail.

Run: python3 demos/covolumes.py
"""

import math

from jlmeasure.adelic import RestrictedProductSpec, TailRule, covolume_equality_check, covolume_S_arithmetic, \
    restricted_product_measure
from jlmeasure.verify import jl_covolume_pair, jl_density_verdict, synthesized_jl_setups

r = restricted_product_measure(RestrictedProductSpec({}, TailRule((-2,), invert=True)))
print(f"prod (1 - p^-2)^-1 = {float(r.value):.10f} +- {r.error_bound:.1e}  (pi^2/6 = {math.pi ** 2 / 6:.10f})")

good, bad = synthesized_jl_setups()
for js in good[:4] + bad[:2]:
    left, right = jl_covolume_pair(js)
    v = covolume_equality_check(left, right, js.setup)
    print(f"n={js.n} d={js.d} ram={sorted(map(str, js.setup.ram_set))} S={sorted(map(str, js.setup.S))}: "
          f"covolume {v.status}", end="")
    if v.is_equal:
        print(f", value {float(covolume_S_arithmetic(left).value):.6g}, densities {jl_density_verdict(js).status}")
    else:
        print(f" ({v.reason})")
