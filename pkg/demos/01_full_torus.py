"""The fully open torus: half strips are the optimal cuts.

Run:  python3 demos/01_full_torus.py
"""
from fractions import Fraction

from percheeger import Configuration, TorusSpec, cheeger_brute, cheeger_exact, iso_profile
from percheeger.flips import flip

for n in (4, 6, 8):
    full = Configuration.all_open(TorusSpec(2, n))
    r = cheeger_exact(full)
    print(f"n={n}: phi={r.phi.as_fraction()}  n*phi={n * r.phi.as_fraction()}  "
          f"largest minimizer={r.max_minimizer_size} of {n * n}")

# the n=4 witness is the two bottom rows
full = Configuration.all_open(TorusSpec(2, 4))
w = set(cheeger_brute(full).witness.vertices)
for y in reversed(range(4)):
    print("  " + " ".join("#" if x + 4 * y in w else "." for x in range(4)))

# closing any single edge drops phi from 1 to 7/8: every gradient is 1/8
drops = {cheeger_exact(flip(full, e)).phi.as_fraction() for e in range(32)}
(after,) = drops
print("phi after one closed edge:", after, " gradient:", Fraction(1) - after)

print("I_2 on the 4x4 torus:", iso_profile(full, None, 2.0).value, "(2*sqrt 2)")
