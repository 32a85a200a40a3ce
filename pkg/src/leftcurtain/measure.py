"""Exact-rational discrete measures on the real line.

Everything downstream (potential functions, convex-order tests, shadows,
couplings, LP duals) is equality-sensitive, so all positions and masses are
`fractions.Fraction` and no operation ever rounds.  A measure is a finite,
sorted tuple of atoms with strictly positive weights; zero-weight atoms are
dropped and equal positions are merged at construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Tuple, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class NegativeWeight(ValueError):
    """An operation produced or received an atom with negative weight."""


class NotInConvexOrder(ValueError):
    """A pair (or chain) of measures violates the convex order."""


class NotInPositiveConvexOrder(ValueError):
    """A pair of measures violates the positive convex order."""


class SchemaError(ValueError):
    """JSON input violates a schema; `pointer` locates the offending node."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer
        self.message = message


def rat(value: RationalLike) -> Fraction:
    """Parse a rational from a Fraction, int, or 'p/q' string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not a rational: {value!r}")


def _rat_from_json(node: object, pointer: str) -> Fraction:
    if isinstance(node, bool) or isinstance(node, float):
        raise SchemaError(pointer, "rationals must be strings 'p/q' or integers")
    try:
        return rat(node)  # type: ignore[arg-type]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(pointer, f"invalid rational: {exc}") from None


def _rat_to_json(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Interval:
    """A real interval with optional rational endpoints.

    ``lo is None`` / ``hi is None`` encode the unbounded ends; the closed
    flags are meaningful only at finite endpoints.
    """

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_closed: bool = False
    hi_closed: bool = False

    @staticmethod
    def real_line() -> "Interval":
        return Interval()

    @staticmethod
    def open(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(rat(lo), rat(hi), False, False)

    @staticmethod
    def closed(lo: RationalLike, hi: RationalLike) -> "Interval":
        return Interval(rat(lo), rat(hi), True, True)

    @staticmethod
    def at_most(hi: RationalLike) -> "Interval":
        """The prefix interval (-inf, hi]."""
        return Interval(None, rat(hi), False, True)

    @staticmethod
    def less_than(hi: RationalLike) -> "Interval":
        return Interval(None, rat(hi), False, False)

    @staticmethod
    def at_least(lo: RationalLike) -> "Interval":
        return Interval(rat(lo), None, True, False)

    @staticmethod
    def greater_than(lo: RationalLike) -> "Interval":
        return Interval(rat(lo), None, False, False)

    @staticmethod
    def point(x: RationalLike) -> "Interval":
        x = rat(x)
        return Interval(x, x, True, True)

    def contains(self, x: RationalLike) -> bool:
        x = rat(x)
        if self.lo is not None:
            if x < self.lo or (x == self.lo and not self.lo_closed):
                return False
        if self.hi is not None:
            if x > self.hi or (x == self.hi and not self.hi_closed):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "lo": "-inf" if self.lo is None else _rat_to_json(self.lo),
            "hi": "inf" if self.hi is None else _rat_to_json(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @staticmethod
    def from_json(node: object, pointer: str = "") -> "Interval":
        if not isinstance(node, dict):
            raise SchemaError(pointer, "interval must be an object")
        lo = node.get("lo", "-inf")
        hi = node.get("hi", "inf")
        lo_val = None if lo == "-inf" else _rat_from_json(lo, pointer + "/lo")
        hi_val = None if hi in ("inf", "+inf") else _rat_from_json(hi, pointer + "/hi")
        return Interval(
            lo_val,
            hi_val,
            bool(node.get("lo_closed", False)) and lo_val is not None,
            bool(node.get("hi_closed", False)) and hi_val is not None,
        )

    def __str__(self) -> str:
        left = "(-inf" if self.lo is None else ("[" if self.lo_closed else "(") + str(self.lo)
        right = "inf)" if self.hi is None else str(self.hi) + ("]" if self.hi_closed else ")")
        return f"{left}, {right}"


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finitely supported nonnegative measure on the real line.

    Atoms are stored sorted by position with strictly positive weights.
    Instances are immutable and hashable; every operation returns a fresh
    measure.
    """

    atoms: Tuple[Tuple[Fraction, Fraction], ...] = ()

    def __init__(self, atoms: Iterable[Tuple[RationalLike, RationalLike]] = ()):
        merged: dict = {}
        for x, w in atoms:
            x, w = rat(x), rat(w)
            if w < 0:
                raise NegativeWeight(f"atom at {x} has negative weight {w}")
            if w == 0:
                continue
            merged[x] = merged.get(x, Fraction(0)) + w
        cleaned = tuple(sorted((x, w) for x, w in merged.items() if w != 0))
        object.__setattr__(self, "atoms", cleaned)

    @staticmethod
    def zero() -> "DiscreteMeasure":
        return DiscreteMeasure()

    @staticmethod
    def dirac(x: RationalLike, weight: RationalLike = 1) -> "DiscreteMeasure":
        return DiscreteMeasure([(x, weight)])

    def __iter__(self) -> Iterator[Tuple[Fraction, Fraction]]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def support(self) -> Tuple[Fraction, ...]:
        return tuple(x for x, _ in self.atoms)

    @property
    def mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    @property
    def first_moment(self) -> Fraction:
        return sum((w * x for x, w in self.atoms), Fraction(0))

    @property
    def barycenter(self) -> Fraction:
        """First moment divided by mass; 0 by convention for the zero measure."""
        m = self.mass
        if m == 0:
            return Fraction(0)
        return self.first_moment / m

    def weight_at(self, x: RationalLike) -> Fraction:
        x = rat(x)
        for pos, w in self.atoms:
            if pos == x:
                return w
            if pos > x:
                break
        return Fraction(0)

    def scaled(self, factor: RationalLike) -> "DiscreteMeasure":
        factor = rat(factor)
        if factor < 0:
            raise NegativeWeight(f"cannot scale by negative factor {factor}")
        return DiscreteMeasure((x, w * factor) for x, w in self.atoms)

    def restrict(self, interval: Interval) -> "DiscreteMeasure":
        return DiscreteMeasure((x, w) for x, w in self.atoms if interval.contains(x))

    def to_json(self) -> dict:
        return {"atoms": [{"x": _rat_to_json(x), "w": _rat_to_json(w)} for x, w in self.atoms]}

    @staticmethod
    def from_json(node: object, pointer: str = "") -> "DiscreteMeasure":
        if not isinstance(node, dict) or "atoms" not in node:
            raise SchemaError(pointer, "measure must be an object with an 'atoms' array")
        raw = node["atoms"]
        if not isinstance(raw, list):
            raise SchemaError(pointer + "/atoms", "must be an array")
        pairs = []
        for i, entry in enumerate(raw):
            here = f"{pointer}/atoms/{i}"
            if not isinstance(entry, dict) or "x" not in entry or "w" not in entry:
                raise SchemaError(here, "atom must be an object with 'x' and 'w'")
            x = _rat_from_json(entry["x"], here + "/x")
            w = _rat_from_json(entry["w"], here + "/w")
            if w <= 0:
                raise SchemaError(here + "/w", f"weight must be positive, got {w}")
            pairs.append((x, w))
        return DiscreteMeasure(pairs)

    def __str__(self) -> str:
        if not self.atoms:
            return "0"
        return " + ".join(f"{w}*d[{x}]" for x, w in self.atoms)


def mass(mu: DiscreteMeasure) -> Fraction:
    return mu.mass


def barycenter(mu: DiscreteMeasure) -> Fraction:
    return mu.barycenter


def add(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    return DiscreteMeasure(mu.atoms + nu.atoms)


def subtract(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """mu - nu, requiring nu <= mu atomwise; raises NegativeWeight otherwise."""
    weights = {x: w for x, w in mu.atoms}
    for x, w in nu.atoms:
        remaining = weights.get(x, Fraction(0)) - w
        if remaining < 0:
            raise NegativeWeight(f"subtraction drives weight at {x} to {remaining}")
        weights[x] = remaining
    return DiscreteMeasure(weights.items())


def restrict(mu: DiscreteMeasure, interval: Interval) -> DiscreteMeasure:
    return mu.restrict(interval)


def call_value(mu: DiscreteMeasure, b: RationalLike) -> Fraction:
    """Exact value of the call integral sum_i w_i * max(y_i - b, 0)."""
    b = rat(b)
    return sum((w * (x - b) for x, w in mu.atoms if x > b), Fraction(0))


def put_value(mu: DiscreteMeasure, b: RationalLike) -> Fraction:
    """Exact value of the put integral sum_i w_i * max(b - y_i, 0)."""
    b = rat(b)
    return sum((w * (b - x) for x, w in mu.atoms if x < b), Fraction(0))


@dataclass(frozen=True)
class PotentialFunction:
    """Piecewise-linear convex function x -> integral of |x - y| d(mu).

    Breakpoints sit exactly at the atoms of the measure; outside the support
    hull the function is affine with slopes -mass and +mass, so the defining
    asymptotics hold exactly.
    """

    breakpoints: Tuple[Tuple[Fraction, Fraction], ...]
    left_slope: Fraction
    right_slope: Fraction

    def __call__(self, x: RationalLike) -> Fraction:
        x = rat(x)
        pts = self.breakpoints
        if not pts:
            return Fraction(0)
        if x <= pts[0][0]:
            return pts[0][1] + self.left_slope * (x - pts[0][0])
        if x >= pts[-1][0]:
            return pts[-1][1] + self.right_slope * (x - pts[-1][0])
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid][0] <= x:
                lo = mid
            else:
                hi = mid
        (x0, v0), (x1, v1) = pts[lo], pts[hi]
        return v0 + (v1 - v0) * (x - x0) / (x1 - x0)

    def _segment_slope(self, i: int) -> Fraction:
        """Slope on the segment right of breakpoint i."""
        pts = self.breakpoints
        if i < 0:
            return self.left_slope
        if i >= len(pts) - 1:
            return self.right_slope
        (x0, v0), (x1, v1) = pts[i], pts[i + 1]
        return (v1 - v0) / (x1 - x0)

    def right_derivative(self, x: RationalLike) -> Fraction:
        x = rat(x)
        i = -1
        for j, (bx, _) in enumerate(self.breakpoints):
            if bx <= x:
                i = j
            else:
                break
        return self._segment_slope(i)

    def left_derivative(self, x: RationalLike) -> Fraction:
        x = rat(x)
        i = -1
        for j, (bx, _) in enumerate(self.breakpoints):
            if bx < x:
                i = j
            else:
                break
        return self._segment_slope(i)

    def kink(self, x: RationalLike) -> Fraction:
        """Jump of the derivative at x; equals 2*mu({x}) for u_mu."""
        return self.right_derivative(x) - self.left_derivative(x)


def potential(mu: DiscreteMeasure) -> PotentialFunction:
    """The potential function u_mu(x) = integral of |x - y| mu(dy), exactly."""
    if mu.is_zero:
        return PotentialFunction((), Fraction(0), Fraction(0))
    total_mass = mu.mass
    total_fm = mu.first_moment
    breakpoints = []
    mass_below = Fraction(0)
    fm_below = Fraction(0)
    for x, w in mu.atoms:
        # u(x) = x*M(<=x) - S(<=x) + (S_total - S(<=x)) - x*(M_total - M(<=x)),
        # with the atom at x itself contributing 0 either way.
        mass_below += w
        fm_below += w * x
        value = x * mass_below - fm_below + (total_fm - fm_below) - x * (total_mass - mass_below)
        breakpoints.append((x, value))
    return PotentialFunction(tuple(breakpoints), -total_mass, total_mass)


def convex_order_leq(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Test mu <=_c nu.

    Equal masses and barycenters plus the pointwise order of the potential
    functions at every atom of either measure; piecewise linearity makes the
    finitely many checks complete.
    """
    if mu.mass != nu.mass or mu.first_moment != nu.first_moment:
        return False
    u_mu, u_nu = potential(mu), potential(nu)
    for x in sorted(set(mu.support) | set(nu.support)):
        if u_mu(x) > u_nu(x):
            return False
    return True


def positive_convex_order_leq(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """Test mu <=_pc nu (the inequality for nonnegative convex integrands).

    Checks the mass inequality plus call and put values at every combined
    support point.  The cone of nonnegative convex functions on the line is
    generated by constants, calls and puts, and for finitely supported
    measures the call/put difference functions are piecewise linear with
    kinks only at support points, so this finite test is complete.
    """
    if mu.mass > nu.mass:
        return False
    grid = sorted(set(mu.support) | set(nu.support))
    for b in grid:
        if call_value(mu, b) > call_value(nu, b):
            return False
        if put_value(mu, b) > put_value(nu, b):
            return False
    return True


def require_convex_order(mu: DiscreteMeasure, nu: DiscreteMeasure) -> None:
    if not convex_order_leq(mu, nu):
        raise NotInConvexOrder(f"not in convex order: {mu} vs {nu}")


def require_convex_order_chain(marginals: Iterable[DiscreteMeasure]) -> None:
    marginals = list(marginals)
    for t in range(1, len(marginals)):
        if not convex_order_leq(marginals[t - 1], marginals[t]):
            raise NotInConvexOrder(f"marginals {t-1} and {t} are not in convex order")


def measure_to_json_str(mu: DiscreteMeasure, approx: bool = False) -> str:
    obj = mu.to_json()
    if approx:
        for entry in obj["atoms"]:
            entry["x_approx"] = float(Fraction(entry["x"]))
            entry["w_approx"] = float(Fraction(entry["w"]))
    return json.dumps(obj)


def measure_from_json_str(text: str) -> DiscreteMeasure:
    try:
        node = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    return DiscreteMeasure.from_json(node)
