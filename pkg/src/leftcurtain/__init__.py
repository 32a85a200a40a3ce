"""Exact multiperiod martingale optimal transport for discrete marginals.

Measures, potential functions and convex order; irreducible decomposition
and polar structure; shadows and obstructed shadows; Left-Curtain and
multistep left-monotone couplings; exact LP primal-dual solutions with
monotonicity-principle contact sets; and the variant with free intermediate
marginals.  All arithmetic is exact rational.
"""

from .measure import (
    DiscreteMeasure,
    Interval,
    NegativeWeight,
    NotInConvexOrder,
    NotInPositiveConvexOrder,
    PotentialFunction,
    Rational,
    SchemaError,
    add,
    barycenter,
    call_value,
    convex_order_leq,
    mass,
    positive_convex_order_leq,
    potential,
    put_value,
    rat,
    restrict,
    subtract,
)
from .decomposition import (
    IrreducibleDomain,
    MultistepComponent,
    NStepComponent,
    PolarVerdict,
    StepDecomposition,
    decompose_step,
    effective_domain_contains,
    free_polar_test,
    n_step_components,
    polar_test,
)
from .shadow import ShadowResult, obstructed_shadow, shadow, shadow_atom
from .coupling import (
    KernelPolicy,
    MarginalMismatch,
    NotMartingale,
    PathCountExceeded,
    PathMeasure,
    binomial_check,
    free_monotone_transport,
    is_martingale,
    left_curtain_one_step,
    left_monotone_multistep,
    markov_check,
    strong_order_holds,
    verify_left_monotone,
)
from .geometry import (
    CrossingWitness,
    DegeneracyWitness,
    Improvement,
    SupportSet,
    find_improving_competitor,
    is_left_monotone_set,
    is_nondegenerate_set,
)
from .simplex import Infeasible, LpResult, Unbounded, solve_lp
from .lpsolver import (
    DualCertificate,
    FreeDualCertificate,
    FreeSolution,
    LPSolution,
    MotProgram,
    RewardSpec,
    build_program,
    chain_min_call,
    contact_set,
    extract_dual,
    feasible_transport,
    left_tail_put_reward,
    parse_reward,
    solve_free,
    solve_primal,
    tanh_sm_reward,
)

__version__ = "0.1.0"

__all__ = [
    "DiscreteMeasure",
    "Interval",
    "PotentialFunction",
    "Rational",
    "add",
    "barycenter",
    "call_value",
    "convex_order_leq",
    "mass",
    "positive_convex_order_leq",
    "potential",
    "put_value",
    "rat",
    "restrict",
    "subtract",
    "NegativeWeight",
    "NotInConvexOrder",
    "NotInPositiveConvexOrder",
    "SchemaError",
    "IrreducibleDomain",
    "MultistepComponent",
    "NStepComponent",
    "PolarVerdict",
    "StepDecomposition",
    "decompose_step",
    "effective_domain_contains",
    "free_polar_test",
    "n_step_components",
    "polar_test",
    "ShadowResult",
    "obstructed_shadow",
    "shadow",
    "shadow_atom",
    "KernelPolicy",
    "MarginalMismatch",
    "NotMartingale",
    "PathCountExceeded",
    "PathMeasure",
    "binomial_check",
    "free_monotone_transport",
    "is_martingale",
    "left_curtain_one_step",
    "left_monotone_multistep",
    "markov_check",
    "strong_order_holds",
    "verify_left_monotone",
    "CrossingWitness",
    "DegeneracyWitness",
    "Improvement",
    "SupportSet",
    "find_improving_competitor",
    "is_left_monotone_set",
    "is_nondegenerate_set",
    "Infeasible",
    "LpResult",
    "Unbounded",
    "solve_lp",
    "DualCertificate",
    "FreeDualCertificate",
    "FreeSolution",
    "LPSolution",
    "MotProgram",
    "RewardSpec",
    "build_program",
    "chain_min_call",
    "contact_set",
    "extract_dual",
    "feasible_transport",
    "left_tail_put_reward",
    "parse_reward",
    "solve_free",
    "solve_primal",
    "tanh_sm_reward",
]
