"""Shadows: the convex-order least way to embed a measure into a target.

The shadow of q*delta_x in nu is the sub-measure of nu with mass q and
barycenter x of minimal variance: nu restricted to an interval around x,
with fractional atoms at the two endpoints.  Obstructed shadows iterate
this through a chain of targets and are the engine behind the left-monotone
couplings.  Run as: python demos/shadows_and_obstructions.py
"""

from fractions import Fraction as F

from leftcurtain import (
    DiscreteMeasure,
    call_value,
    chain_min_call,
    obstructed_shadow,
    shadow,
    shadow_atom,
)

target = DiscreteMeasure([(-4, F(1, 4)), (0, F(1, 2)), (4, F(1, 4))])
print("target:", target)

# Shadow of a single atom: mass 1/2 sitting at -1.
result = shadow_atom(F(1, 2), -1, target)
print("\nshadow of 1/2*d[-1]:", result.shadow)
print("residual left over: ", result.residual)
print("mass preserved:", result.shadow.mass == F(1, 2),
      "| barycenter preserved:", result.shadow.barycenter == -1)

# Shadows add up via residuals: the second atom is shadowed into what the
# first one left behind.  The fold is independent of the atom order.
source = DiscreteMeasure([(-1, F(1, 2)), (1, F(1, 2))])
print("\nshadow of", source, "is", shadow(source, target).shadow)

# An intermediate marginal obstructs the shadow: to end at the final target
# the mass must first fit inside the middle one, and that changes where it
# can settle.
middle = DiscreteMeasure([(-2, F(1, 2)), (2, F(1, 2))])
half = DiscreteMeasure.dirac(-1, F(1, 2))
direct = shadow(half, target).shadow
through = obstructed_shadow(half, [middle, target])
print("\ndirect shadow in the final target: ", direct)
print("obstructed through the middle one:  ", through)
print("obstruction pushes mass outward (direct <=c obstructed):", direct != through)

# The obstructed shadow is the least element of the chain-feasible set: its
# call values match an LP minimum strike by strike.
print("\ncall-value certificates:")
for b in (-4, 0, 4):
    lhs = call_value(through, b)
    rhs = chain_min_call(half, [middle, target], 2, b)
    print(f"  strike {b}: call = {lhs} = chain LP minimum -> {lhs == rhs}")
