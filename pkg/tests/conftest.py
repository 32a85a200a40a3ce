"""Shared instance generators and independent LP oracles.

The generators build random marginal chains by mean-preserving spreads, so
convex order holds by construction.  The oracles solve small LPs directly on
the raw simplex engine; they share no code with the combinatorial
implementations they are used to check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Tuple

import pytest

from leftcurtain import DiscreteMeasure, PathMeasure
from leftcurtain.simplex import Infeasible, solve_lp

F = Fraction


def measure(pairs) -> DiscreteMeasure:
    return DiscreteMeasure(pairs)


# --- named instances used across modules -----------------------------------


@pytest.fixture
def rigid_marginals():
    """Three marginals admitting exactly one martingale transport."""
    return [
        DiscreteMeasure.dirac(0),
        measure([(-1, F(1, 2)), (1, F(1, 2))]),
        measure([(-2, F(1, 4)), (0, F(1, 2)), (2, F(1, 4))]),
    ]


@pytest.fixture
def curtain_gap_marginals():
    """Marginals whose (0,2)-projection is not of one-step Left-Curtain type."""
    return [
        measure([(-1, F(1, 2)), (1, F(1, 2))]),
        measure([(-2, F(1, 2)), (2, F(1, 2))]),
        measure([(-4, F(1, 4)), (0, F(1, 2)), (4, F(1, 4))]),
    ]


@pytest.fixture
def nonmarkov_marginals():
    return [
        measure([(0, F(1, 2)), (1, F(1, 2))]),
        measure([(0, F(3, 4)), (2, F(1, 4))]),
        measure([(-1, F(1, 8)), (0, F(1, 2)), (1, F(1, 8)), (2, F(1, 4))]),
    ]


@pytest.fixture
def nonunique_family():
    """Dirac start, two distinct left-monotone transports with equal projections."""
    marginals = [
        DiscreteMeasure.dirac(0),
        measure([(-1, F(1, 2)), (1, F(1, 2))]),
        measure([(-2, F(3, 8)), (0, F(1, 4)), (2, F(3, 8))]),
    ]
    p_left = PathMeasure(
        2,
        [
            ((0, -1, -2), F(1, 4)),
            ((0, -1, 0), F(1, 4)),
            ((0, 1, -2), F(1, 8)),
            ((0, 1, 2), F(3, 8)),
        ],
    )
    p_right = PathMeasure(
        2,
        [
            ((0, -1, -2), F(3, 8)),
            ((0, -1, 2), F(1, 8)),
            ((0, 1, 0), F(1, 4)),
            ((0, 1, 2), F(1, 4)),
        ],
    )
    return marginals, p_left, p_right


# --- random instance generators ---------------------------------------------


def random_measure(
    rng: random.Random,
    max_atoms: int = 4,
    span: int = 6,
    max_den: int = 4,
    normalize: bool = False,
) -> DiscreteMeasure:
    k = rng.randint(1, max_atoms)
    xs = rng.sample(range(-span, span + 1), k)
    pairs = [
        (F(x), F(rng.randint(1, 4), rng.randint(1, max_den))) for x in xs
    ]
    mu = DiscreteMeasure(pairs)
    if normalize:
        mu = mu.scaled(1 / mu.mass)
    return mu


def mean_preserving_spread(
    rng: random.Random, mu: DiscreteMeasure, stay_prob: float = 0.35
) -> DiscreteMeasure:
    """A successor of mu in convex order (every atom stays or splits in two)."""
    atoms: List[Tuple[Fraction, Fraction]] = []
    for x, w in mu:
        if rng.random() < stay_prob:
            atoms.append((x, w))
            continue
        down = F(rng.randint(1, 2), rng.choice([1, 2]))
        up = F(rng.randint(1, 2), rng.choice([1, 2]))
        lam = down / (down + up)
        atoms.append((x + up, w * lam))
        atoms.append((x - down, w * (1 - lam)))
    return DiscreteMeasure(atoms)


def random_marginal_chain(
    rng: random.Random,
    steps: int,
    max_support: int = 5,
    start_atoms: int = 2,
    attempts: int = 200,
) -> List[DiscreteMeasure]:
    """A convex-order chain with every support at most max_support."""
    for _ in range(attempts):
        chain = [random_measure(rng, max_atoms=start_atoms, span=3)]
        ok = True
        for _ in range(steps):
            nxt = mean_preserving_spread(rng, chain[-1])
            if len(nxt) > max_support:
                ok = False
                break
            chain.append(nxt)
        if ok:
            return chain
    raise RuntimeError("could not build a chain within the support bound")


def random_pc_pair(
    rng: random.Random, max_atoms: int = 5
) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    """A pair mu <=_pc nu with a nontrivial shadow.

    nu is random; a sub-measure of nu is contracted to barycenters group by
    group, which preserves the positive convex order and loses pointwise
    domination.
    """
    nu = random_measure(rng, max_atoms=max_atoms)
    scale = F(rng.randint(1, 3), 4)
    sub = [(x, w * scale) for x, w in nu]
    rng.shuffle(sub)
    groups: List[List[Tuple[Fraction, Fraction]]] = []
    i = 0
    while i < len(sub):
        size = rng.randint(1, 2)
        groups.append(sub[i : i + size])
        i += size
    atoms = []
    for group in groups:
        gmass = sum((w for _, w in group), F(0))
        gfm = sum((w * x for x, w in group), F(0))
        atoms.append((gfm / gmass, gmass))
    return DiscreteMeasure(atoms), nu


# --- independent LP oracles --------------------------------------------------


def _coupling_rows(mu: DiscreteMeasure, nu: DiscreteMeasure, martingale: bool, nu_cap: bool):
    xs, ys = mu.support, nu.support
    cols = [(x, y) for x in xs for y in ys]
    idx = {c: k for k, c in enumerate(cols)}
    rows, rhs, senses = [], [], []
    for x, w in mu:
        row = [F(0)] * len(cols)
        for y in ys:
            row[idx[(x, y)]] = F(1)
        rows.append(row)
        rhs.append(w)
        senses.append("=")
    for y, w in nu:
        row = [F(0)] * len(cols)
        for x in xs:
            row[idx[(x, y)]] = F(1)
        rows.append(row)
        rhs.append(w)
        senses.append("<=" if nu_cap else "=")
    if martingale:
        for x, _ in mu:
            row = [F(0)] * len(cols)
            for y in ys:
                row[idx[(x, y)]] = y - x
            rows.append(row)
            rhs.append(F(0))
            senses.append("=")
    return cols, rows, rhs, senses


def lp_martingale_coupling_exists(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Feasibility of the martingale transport polytope between mu and nu."""
    if mu.is_zero and nu.is_zero:
        return True
    if mu.is_zero != nu.is_zero:
        return False
    cols, rows, rhs, senses = _coupling_rows(mu, nu, martingale=True, nu_cap=False)
    try:
        solve_lp([F(0)] * len(cols), rows, rhs, senses)
        return True
    except Infeasible:
        return False


def lp_cast_set_exists(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Feasibility of {theta : mu <=_c theta <= nu} via a coupling LP."""
    if mu.is_zero:
        return True
    cols, rows, rhs, senses = _coupling_rows(mu, nu, martingale=True, nu_cap=True)
    try:
        solve_lp([F(0)] * len(cols), rows, rhs, senses)
        return True
    except Infeasible:
        return False


def lp_min_second_moment_atom(
    q: Fraction, x: Fraction, nu: DiscreteMeasure
) -> Optional[DiscreteMeasure]:
    """Minimizer of the second moment over {theta <= nu, mass q, barycenter x}."""
    ys = nu.support
    rows = [[F(1)] * len(ys), [F(y) for y in ys]]
    rhs = [q, q * x]
    senses = ["=", "="]
    for k, (y, w) in enumerate(nu):
        row = [F(0)] * len(ys)
        row[k] = F(1)
        rows.append(row)
        rhs.append(w)
        senses.append("<=")
    try:
        result = solve_lp([y * y for y in ys], rows, rhs, senses, maximize=False)
    except Infeasible:
        return None
    return DiscreteMeasure((ys[k], v) for k, v in enumerate(result.x) if v != 0)


def lp_cast_min_call(mu: DiscreteMeasure, nu: DiscreteMeasure, b: Fraction) -> Fraction:
    """Minimum call value over {theta : mu <=_c theta <= nu}."""
    cols, rows, rhs, senses = _coupling_rows(mu, nu, martingale=True, nu_cap=True)
    objective = [max(y - b, F(0)) for _, y in cols]
    return solve_lp(objective, rows, rhs, senses, maximize=False).value


# --- misc helpers -------------------------------------------------------------


def mirror_measure(mu: DiscreteMeasure) -> DiscreteMeasure:
    return DiscreteMeasure((-x, w) for x, w in mu)


def mirror_coupling(P: PathMeasure) -> PathMeasure:
    return PathMeasure(P.n, ((tuple(-c for c in p), w) for p, w in P.paths))


def total_variation(P: PathMeasure, Q: PathMeasure) -> Fraction:
    keys = set(P.support) | set(Q.support)
    return sum((abs(P.weight_at(p) - Q.weight_at(p)) for p in keys), F(0)) / 2
