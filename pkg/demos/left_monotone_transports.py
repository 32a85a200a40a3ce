"""Left-monotone martingale transports between several marginals.

The construction sends each prefix of the first marginal to its obstructed
shadow at every later date.  With one step this is the classical Left-Curtain
coupling; with several steps the bivariate projections generally stop being
of Left-Curtain type, and a simple order criterion says exactly when they
remain so.  Run as: python demos/left_monotone_transports.py
"""

from fractions import Fraction as F

from leftcurtain import (
    DiscreteMeasure,
    KernelPolicy,
    SupportSet,
    is_left_monotone_set,
    is_martingale,
    left_curtain_one_step,
    left_monotone_multistep,
    markov_check,
    strong_order_holds,
    verify_left_monotone,
)

mu0 = DiscreteMeasure([(-1, F(1, 2)), (1, F(1, 2))])
mu1 = DiscreteMeasure([(-2, F(1, 2)), (2, F(1, 2))])
mu2 = DiscreteMeasure([(-4, F(1, 4)), (0, F(1, 2)), (4, F(1, 4))])

P = left_monotone_multistep([mu0, mu1, mu2])
print("left-monotone transport:")
for path, weight in P:
    print(f"  {tuple(map(str, path))}  ->  {weight}")
print("martingale:", is_martingale(P)[0])
print("defining prefix-image property holds:", verify_left_monotone(P, [mu0, mu1, mu2])[0])

# The (0,2)-projection is NOT the one-step Left-Curtain coupling: the middle
# marginal obstructs the shadows.
projection = P.project((0, 2))
curtain = left_curtain_one_step(mu0, mu2)
print("\nprojection onto dates (0,2):", projection)
print("one-step Left-Curtain:      ", curtain)
print("equal:", projection == curtain)
print("the order criterion for equality holds:", strong_order_holds([mu0, mu1, mu2]))

# The no-crossing geometry of the support characterizes left-monotonicity.
ok, witness = is_left_monotone_set(SupportSet.of(P))
print("\nsupport passes the no-crossing scan:", ok)

# Left-monotone transports need not be Markovian: here the kernel at the
# last date remembers the starting point, not just the current one.
a0 = DiscreteMeasure([(0, F(1, 2)), (1, F(1, 2))])
a1 = DiscreteMeasure([(0, F(3, 4)), (2, F(1, 4))])
a2 = DiscreteMeasure([(-1, F(1, 8)), (0, F(1, 2)), (1, F(1, 8)), (2, F(1, 4))])
Q = left_monotone_multistep([a0, a1, a2])
print("\na second instance:", Q)
print("Markov:", markov_check(Q))

# The joint law is not always unique; the within-increment policy resolves
# the freedom without changing any bivariate projection.
R = left_monotone_multistep([a0, a1, a2], KernelPolicy.LP_FEASIBLE)
print("projections agree under both policies:",
      all(Q.project((0, t)) == R.project((0, t)) for t in (1, 2)))
