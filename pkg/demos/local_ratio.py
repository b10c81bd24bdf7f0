"""Walk through the local ratio computation for a quaternion algebra.

Run: python3 demos/local_ratio.py
"""

from jlmeasure.localgeom import LocalAlgebraSpec, tamagawa_volume_max_compact, volume_quotient
from jlmeasure.plancherel import plancherel_ratio, tamagawa_steinberg_degrees

spec = LocalAlgebraSpec.from_local_index(1, 2, 2)  # D_v a division algebra, q symbolic

split = tamagawa_volume_max_compact(spec.split_form()).value
inner = tamagawa_volume_max_compact(spec).value
print("vol(GL2(O_v))      =", split.to_text())
print("vol(O_D^x)         =", inner.to_text())
print("volume quotient    =", volume_quotient(spec).to_text())

st, st_inner = tamagawa_steinberg_degrees(spec)
print("deg St (split)     =", st.value.to_text())
print("deg 1 (inner form) =", st_inner.value.to_text())
print("density ratio      =", plancherel_ratio(spec).to_text())

# the same identity for every shape with nd <= 6
for nd in range(1, 7):
    for n in (x for x in range(1, nd + 1) if nd % x == 0):
        for dv in (x for x in range(1, nd + 1) if nd % x == 0):
            s = LocalAlgebraSpec.from_local_index(n, nd // n, dv)
            print(f"n={n} d={nd // n} d_v={dv}: ratio {plancherel_ratio(s).to_text()}")
