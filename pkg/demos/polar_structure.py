"""Where can a martingale transport put mass?

Each step decomposes into irreducible components (open intervals where the
potentials strictly separate, with their target windows) plus a diagonal
part that no martingale may move.  A path is chargeable exactly when every
consecutive pair sits inside a component chain and every coordinate carries
marginal mass; everything else is polar.
Run as: python demos/polar_structure.py
"""

from fractions import Fraction as F

from leftcurtain import (
    DiscreteMeasure,
    decompose_step,
    effective_domain_contains,
    polar_test,
    solve_primal,
)

mu0 = DiscreteMeasure.dirac(0)
mu1 = DiscreteMeasure([(-1, F(1, 2)), (1, F(1, 2))])
mu2 = DiscreteMeasure([(-2, F(1, 4)), (0, F(1, 2)), (2, F(1, 4))])

print("step 1 decomposition (dirac -> two points):")
step1 = decompose_step(mu0, mu1)
for comp in step1.components:
    print(f"  component {comp.index}: I = {comp.I}, J = {comp.J}")

print("\nstep 2 decomposition (two points -> three points):")
step2 = decompose_step(mu1, mu2)
for comp in step2.components:
    print(f"  component {comp.index}: I = {comp.I}, J = {comp.J}")
    print(f"    carries {comp.mu_k} -> {comp.nu_k}")
print("  note: the target atom at 0 splits between the two components")

# Component chains label the paths a transport may charge.
decomps = [step1, step2]
for path in [(F(0), F(-1), F(-2)), (F(0), F(0), F(0)), (F(0), F(1), F(-2))]:
    chain = effective_domain_contains(decomps, path)
    print(f"\npath {tuple(map(str, path))}: component chain = {chain}")

# polar_test combines the chain test with marginal-mass checks, and an LP
# maximizing the mass on a path confirms each verdict.
paths = [(0, -1, 0), (0, 1, -2), (0, -1, 1)]
print("\nverdicts vs. LP mass maxima:")
for verdict in polar_test([mu0, mu1, mu2], paths):
    target = verdict.path
    lp = solve_primal([mu0, mu1, mu2], lambda p, target=target: 1 if p == target else 0)
    word = "polar" if verdict.polar else "chargeable"
    print(f"  {tuple(map(str, target))}: {word:10s} ({verdict.reason}); LP mass = {lp.value}")
