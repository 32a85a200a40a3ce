"""Finite-support geometry of transport supports.

Left-monotonicity is the no-crossing rule: among paths that agree up to
date t-1, a path starting strictly to the right may not step in between two
continuations at date t.  Nondegeneracy requires every up-move to be matched
by a down-move from the same history and vice versa.  Both are verified by
exhaustive scans over coordinate projections; competitor search solves an
exact LP over reweightings that preserve the history projection, the last
marginal, and all conditional barycenters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .coupling import Path, PathMeasure
from .decomposition import StepDecomposition, effective_domain_contains
from .measure import DiscreteMeasure
from .simplex import solve_lp


@dataclass(frozen=True)
class SupportSet:
    """A finite set of support paths in R^(n+1)."""

    n: int
    points: frozenset

    def __init__(self, n: int, points):
        pts = frozenset(tuple(Fraction(c) for c in p) for p in points)
        for p in pts:
            if len(p) != n + 1:
                raise ValueError(f"point {p} does not have {n + 1} coordinates")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "points", pts)

    @staticmethod
    def of(P: PathMeasure) -> "SupportSet":
        return SupportSet(P.n, P.support)

    def projection(self, t: int) -> frozenset:
        """Projection onto the first t+1 coordinates."""
        return frozenset(p[: t + 1] for p in self.points)


@dataclass(frozen=True)
class CrossingWitness:
    t: int
    history: Path
    y_minus: Fraction
    y_plus: Fraction
    other_history: Path
    y_prime: Fraction


def is_left_monotone_set(gamma: SupportSet) -> Tuple[bool, Optional[CrossingWitness]]:
    """Scan every time projection for the forbidden crossing configuration.

    A violation is a pair of continuations y- < y+ of one history and a third
    path from a strictly larger starting point whose date-t value lies
    strictly between them.
    """
    for t in range(1, gamma.n + 1):
        proj = gamma.projection(t)
        groups: Dict[Path, List[Fraction]] = {}
        for p in proj:
            groups.setdefault(p[:-1], []).append(p[-1])
        spreads = {
            h: (min(ys), max(ys)) for h, ys in groups.items() if len(ys) > 1
        }
        for history, (lo, hi) in spreads.items():
            for other, ys in groups.items():
                if other[0] <= history[0]:
                    continue
                for y in ys:
                    if lo < y < hi:
                        return False, CrossingWitness(t, history, lo, hi, other, y)
    return True, None


@dataclass(frozen=True)
class DegeneracyWitness:
    t: int
    history: Path
    y: Fraction


def is_nondegenerate_set(gamma: SupportSet) -> Tuple[bool, Optional[DegeneracyWitness]]:
    """Every up-move needs a matching down-move from the same history."""
    for t in range(1, gamma.n + 1):
        groups: Dict[Path, List[Fraction]] = {}
        for p in gamma.projection(t):
            groups.setdefault(p[:-1], []).append(p[-1])
        for history, ys in groups.items():
            x_prev = history[-1]
            has_up = any(y > x_prev for y in ys)
            has_down = any(y < x_prev for y in ys)
            if has_up and not has_down:
                witness = max(ys)
                return False, DegeneracyWitness(t, history, witness)
            if has_down and not has_up:
                witness = min(ys)
                return False, DegeneracyWitness(t, history, witness)
    return True, None


@dataclass(frozen=True)
class Improvement:
    competitor: PathMeasure
    value: Fraction
    baseline: Fraction


def find_improving_competitor(
    pi: PathMeasure,
    reward,
    effective_domain: Sequence[StepDecomposition],
    marginal: Optional[DiscreteMeasure] = None,
) -> Optional[Improvement]:
    """Search for a strictly better competitor of pi for the given reward.

    A competitor keeps the projection onto the first t coordinates, the last
    marginal, and every conditional barycenter, and must live inside the
    effective domain.  Returns the improving reweighting found by an exact
    LP, or None when pi is already maximal in its competitor class.

    The candidate grid for the new last coordinate is the union of the
    values appearing in pi with the support of `marginal` (the ambient
    marginal at the last date), when given.
    """
    t = pi.n
    if len(effective_domain) != t:
        raise ValueError("need one step decomposition per step of pi")
    histories: Dict[Path, Fraction] = {}
    bary_sum: Dict[Path, Fraction] = {}
    last: Dict[Fraction, Fraction] = {}
    for p, w in pi.paths:
        h = p[:t]
        histories[h] = histories.get(h, Fraction(0)) + w
        bary_sum[h] = bary_sum.get(h, Fraction(0)) + w * p[t]
        last[p[t]] = last.get(p[t], Fraction(0)) + w

    grid = set(last)
    if marginal is not None:
        grid.update(marginal.support)
    grid = sorted(grid)
    history_list = sorted(histories)

    cols: List[Tuple[Path, Fraction]] = []
    for h in history_list:
        for y in grid:
            if effective_domain_contains(effective_domain, h + (y,)) is not None:
                cols.append((h, y))
    if not cols:
        return None
    col_index = {c: k for k, c in enumerate(cols)}

    rows, rhs = [], []
    for h in history_list:
        row = [Fraction(0)] * len(cols)
        for y in grid:
            k = col_index.get((h, y))
            if k is not None:
                row[k] = Fraction(1)
        rows.append(row)
        rhs.append(histories[h])
        row = [Fraction(0)] * len(cols)
        for y in grid:
            k = col_index.get((h, y))
            if k is not None:
                row[k] = y
        rows.append(row)
        rhs.append(bary_sum[h])
    for y in grid:
        row = [Fraction(0)] * len(cols)
        for h in history_list:
            k = col_index.get((h, y))
            if k is not None:
                row[k] = Fraction(1)
        rows.append(row)
        rhs.append(last.get(y, Fraction(0)))

    objective = [Fraction(reward(h + (y,))) for h, y in cols]
    result = solve_lp(objective, rows, rhs)
    baseline = pi.expectation(reward)
    if result.value <= baseline:
        return None
    competitor = PathMeasure(
        t, ((cols[k][0] + (cols[k][1],), v) for k, v in enumerate(result.x) if v != 0)
    )
    return Improvement(competitor, result.value, baseline)
