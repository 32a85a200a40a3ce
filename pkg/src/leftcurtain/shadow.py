"""Shadows and obstructed shadows of discrete measures.

The shadow of mu in nu is the convex-order least element of
{theta : mu <=_c theta <= nu}.  For a single atom it is a restriction of nu
to an interval, with fractional atoms allowed at the two endpoints; general
measures fold their atoms left to right through the additivity law, and
obstructed shadows iterate the construction through a chain of targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .measure import (
    DiscreteMeasure,
    NotInPositiveConvexOrder,
    RationalLike,
    add,
    positive_convex_order_leq,
    rat,
    subtract,
)


@dataclass(frozen=True)
class ShadowResult:
    """A shadow together with what is left of the target."""

    shadow: DiscreteMeasure
    residual: DiscreteMeasure


def shadow_atom(q: RationalLike, x: RationalLike, nu: DiscreteMeasure) -> ShadowResult:
    """Shadow of the atom q*delta_x in nu.

    Searches over interval restrictions of nu around x: interior atoms are
    taken whole and the two endpoint fractions solve the 2x2 mass/barycenter
    system.  Every feasible candidate lies in the cast set, so the least
    element is the feasible candidate of minimal second moment; the search is
    complete because the shadow of an atom is known to be of this form.
    """
    q, x = rat(q), rat(x)
    if q < 0:
        raise NotInPositiveConvexOrder(f"atom mass {q} is negative")
    if q == 0:
        return ShadowResult(DiscreteMeasure.zero(), nu)
    if not positive_convex_order_leq(DiscreteMeasure.dirac(x, q), nu):
        raise NotInPositiveConvexOrder(f"{q}*d[{x}] is not <=_pc the target")

    atoms = nu.atoms
    positions = [a for a, _ in atoms]
    left_ids = [i for i, p in enumerate(positions) if p <= x]
    right_ids = [i for i, p in enumerate(positions) if p >= x]

    # prefix sums make every candidate's interior mass/moments O(1)
    zero = Fraction(0)
    pre_mass, pre_fm, pre_m2 = [zero], [zero], [zero]
    for p, w in atoms:
        pre_mass.append(pre_mass[-1] + w)
        pre_fm.append(pre_fm[-1] + w * p)
        pre_m2.append(pre_m2[-1] + w * p * p)

    best: Optional[Tuple[Fraction, int, int, Fraction, Fraction]] = None
    for i in left_ids:
        for j in right_ids:
            if positions[i] > positions[j]:
                continue
            yi, yj = positions[i], positions[j]
            inner_mass = pre_mass[j] - pre_mass[i + 1] if j > i else zero
            need_mass = q - inner_mass
            if need_mass < 0:
                break  # interiors only grow with j
            inner_fm = pre_fm[j] - pre_fm[i + 1] if j > i else zero
            inner_m2 = pre_m2[j] - pre_m2[i + 1] if j > i else zero
            need_fm = q * x - inner_fm
            if yi == yj:
                if need_fm != need_mass * yi or need_mass < 0 or need_mass > atoms[i][1]:
                    continue
                frac_i, frac_j = need_mass, zero
            else:
                frac_j = (need_fm - yi * need_mass) / (yj - yi)
                frac_i = need_mass - frac_j
                if (
                    frac_i < 0
                    or frac_j < 0
                    or frac_i > atoms[i][1]
                    or frac_j > atoms[j][1]
                ):
                    continue
            moment = inner_m2 + frac_i * yi * yi + frac_j * yj * yj
            if best is None or moment < best[0]:
                best = (moment, i, j, frac_i, frac_j)
    if best is None:
        raise NotInPositiveConvexOrder(
            f"no interval of the target can host {q}*d[{x}]"
        )
    _, i, j, frac_i, frac_j = best
    rows = [(positions[i], frac_i)] + list(atoms[i + 1 : j]) + (
        [(positions[j], frac_j)] if j > i else []
    )
    result = DiscreteMeasure(rows)
    return ShadowResult(result, subtract(nu, result))


def shadow(mu: DiscreteMeasure, nu: DiscreteMeasure) -> ShadowResult:
    """Shadow of mu in nu, folding atoms left to right.

    The additivity law makes the fold independent of the order in which the
    atoms are consumed; position order is the canonical choice.  Raises
    NotInPositiveConvexOrder when mu is not <=_pc nu.
    """
    if not positive_convex_order_leq(mu, nu):
        raise NotInPositiveConvexOrder("source measure is not <=_pc the target")
    total = DiscreteMeasure.zero()
    residual = nu
    for x, w in mu.atoms:
        piece = shadow_atom(w, x, residual)
        total = add(total, piece.shadow)
        residual = piece.residual
    return ShadowResult(total, residual)


def obstructed_shadow(
    mu0_part: DiscreteMeasure, chain: Sequence[DiscreteMeasure]
) -> DiscreteMeasure:
    """Obstructed shadow of mu0_part through the chain of targets.

    Iterates the plain shadow through chain[0], chain[1], ... and returns the
    terminal measure; with a single target this is the plain shadow.
    """
    theta = mu0_part
    for nu in chain:
        theta = shadow(theta, nu).shadow
    return theta
