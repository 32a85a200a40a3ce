"""Measures, potential functions, and convex order.

Every quantity in this library is an exact rational, so the identities below
hold with == rather than approximately.  Run as: python demos/potentials_and_convex_order.py
"""

from fractions import Fraction as F

from leftcurtain import (
    DiscreteMeasure,
    call_value,
    convex_order_leq,
    positive_convex_order_leq,
    potential,
    put_value,
)

# A measure is a list of (position, weight) atoms; weights must be positive.
dirac = DiscreteMeasure.dirac(0)
two_points = DiscreteMeasure([(-1, F(1, 2)), (1, F(1, 2))])
three_points = DiscreteMeasure([(-2, F(1, 4)), (0, F(1, 2)), (2, F(1, 4))])

print("measures:")
for mu in (dirac, two_points, three_points):
    print(f"  {mu}   mass={mu.mass}  barycenter={mu.barycenter}")

# The potential function u(x) = integral of |x - y| d(mu) is piecewise linear
# with kinks exactly at the atoms; the kink size is twice the atom mass.
u = potential(three_points)
print("\npotential of", three_points)
for x in (-3, -2, -1, 0, 1, 2, 3):
    print(f"  u({x}) = {u(x)}")
print("  kink at 0 =", u.kink(0), " (twice the weight 1/2)")
print("  slopes at infinity:", u.left_slope, u.right_slope)

# Convex order = pointwise order of potentials (with equal mass/barycenter).
# A Dirac at the barycenter sits below every spread of the same mass.
print("\nconvex order:")
print("  dirac <=c two_points:   ", convex_order_leq(dirac, two_points))
print("  two_points <=c three:   ", convex_order_leq(two_points, three_points))
print("  three <=c two_points:   ", convex_order_leq(three_points, two_points))

# The positive convex order drops the equal-mass requirement; it is what a
# sub-measure needs in order to have a shadow inside a target.
half = DiscreteMeasure.dirac(-1, F(1, 2))
wide = DiscreteMeasure([(-4, F(1, 4)), (0, F(1, 2)), (4, F(1, 4))])
print("\npositive convex order:")
print("  half Dirac <=pc wide:", positive_convex_order_leq(half, wide))
print("  call values at 0:", call_value(half, 0), "<=", call_value(wide, 0))
print("  put values at 0: ", put_value(half, 0), "<=", put_value(wide, 0))

# JSON round trip: rationals travel as strings, so nothing is ever rounded.
blob = three_points.to_json()
print("\nJSON form:", blob)
print("round trip equal:", DiscreteMeasure.from_json(blob) == three_points)
