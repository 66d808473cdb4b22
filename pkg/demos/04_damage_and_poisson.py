"""Splitting a count into independent geometric pieces, and a Poisson surprise.

Thinning a q-negative-binomial count N with the q-geometric conditional law
splits it into an independent pair: the surviving part is geo(q*theta), the
damaged part geo(theta), and partial independence at D = 0 already pins the
law of N.  A separate curiosity: a shift-by-one Poisson start produces an
exactly Poisson level.
"""

import math
from fractions import Fraction as F

from pitman_lab import Params, ShiftedPoisson, damage_check, g_law_from_initial

rep = damage_check(F(1, 4), F(1, 2), nmax=60)
print("damage split at q=1/4, theta=1/2:")
print(f"   factorization violations : {rep['factorization_violations']}")
print(f"   survivor part            : {rep['survivor_law']}")
print(f"   damaged part             : {rep['damaged_law']}")
print(f"   partial independence     : {rep['rao_rubin_holds']}")
print(f"   note: {rep['note']}")

print("\nsame check with q > 1 (q=4, theta=1/5):",
      damage_check(F(4), F(1, 5), nmax=60)["status"])

glaw = g_law_from_initial(ShiftedPoisson(1.0), Params(F(1)), "G",
                          mode="approx", trunc_n=200)
print("\nlevel law of a 1+Poisson(1) start at rho=1, against Poisson(1):")
for m in range(6):
    target = math.exp(-1) / math.factorial(m)
    print(f"   m={m}: {glaw.pmf(m):.12f} vs {target:.12f} "
          f"(gap {abs(glaw.pmf(m) - target):.1e})")
