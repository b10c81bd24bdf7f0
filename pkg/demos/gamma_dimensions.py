"""Gamma-dimensions for SL(2, Z) and the principal-series densities.

Run: python3 demos/gamma_dimensions.py
"""

from jlmeasure.plancherel import sl2_discrete_series_degree
from jlmeasure.symexpr import PI
from jlmeasure.vndensity import LatticeDatum, gamma_density, gamma_dimension, ps_density, \
    sl2_principal_series_density

lat = LatticeDatum(PI / 3, "SL(2,Z)", "sl2_iwasawa")
print("k  d(H_k)            dim_Gamma")
for k in range(2, 13):
    deg = sl2_discrete_series_degree(k)
    print(f"{k:<2} {deg.value.to_text():<17} {gamma_dimension(lat, deg).to_text()}")

for sign in (1, -1):
    dens = gamma_density(lat, sl2_principal_series_density(sign))
    print("\ndensity", dens.to_text())
    for t in (0.5, 1, 2, 5, 10):
        print(f"  t={t:<4} ps={ps_density(t, sign):.12g}  Gamma={dens(t):.12g}")
