"""Exact primal-dual solver for multiperiod martingale transport.

The primal maximizes a path reward over martingale couplings of the given
marginals; variables are path masses on the product of the supports,
restricted to the effective domain.  The dual variables of the marginal rows
are the static positions phi_t, those of the martingale rows the predictable
strategy H, and together they form a superhedge that touches the reward
exactly on the contact set.  Everything is exact; 'float' mode only changes
how reward values are ingested (floats are dyadic rationals and are embedded
exactly), so the advertised 1e-9 tolerances hold trivially.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .coupling import Path, PathMeasure
from .decomposition import (
    NStepComponent,
    StepDecomposition,
    decompose_step,
    n_step_components,
)
from .geometry import SupportSet
from .measure import (
    DiscreteMeasure,
    RationalLike,
    rat,
    require_convex_order,
    require_convex_order_chain,
)
from .simplex import Infeasible, LpResult, solve_lp

Reward = Callable[[Path], Union[Fraction, int, float]]

EXACT = "exact"
FLOAT = "float"


def _ingest(value, mode: str) -> Fraction:
    if isinstance(value, float):
        if mode == EXACT:
            raise TypeError("exact mode requires rational reward values")
        return Fraction(value)
    return rat(value)


@dataclass
class MotProgram:
    """The LP data of one martingale transport instance.

    `paths` are the effective-domain grid paths (the LP variables) and
    `row_keys` names each constraint row: ('marginal', t, point) rows pin the
    marginals, ('martingale', t, prefix) rows force the conditional
    barycenters.  Martingale rows exist for every history prefix of a
    variable path; prefixes extendable by no variable are vacuous and their
    dual is reported as zero.
    """

    marginals: Tuple[DiscreteMeasure, ...]
    grids: Tuple[Tuple[Fraction, ...], ...]
    paths: Tuple[Path, ...]
    reward_values: Tuple[Fraction, ...]
    mode: str
    row_keys: Tuple[tuple, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return len(self.marginals) - 1

    def lp_rows(self) -> Tuple[List[List[Fraction]], List[Fraction]]:
        index: Dict[tuple, int] = {key: i for i, key in enumerate(self.row_keys)}
        width = len(self.paths)
        rows = [[Fraction(0)] * width for _ in self.row_keys]
        rhs = [Fraction(0)] * len(self.row_keys)
        for key in self.row_keys:
            if key[0] == "marginal":
                _, t, point = key
                rhs[index[key]] = self.marginals[t].weight_at(point)
        for j, path in enumerate(self.paths):
            for t in range(self.n + 1):
                rows[index[("marginal", t, path[t])]][j] = Fraction(1)
            for t in range(1, self.n + 1):
                rows[index[("martingale", t, path[:t])]][j] = path[t] - path[t - 1]
        return rows, rhs


def _effective_paths(
    grids: Sequence[Sequence[Fraction]], decomps: Sequence[StepDecomposition]
) -> List[Path]:
    paths: List[Path] = [(x,) for x in grids[0]]
    for t in range(1, len(grids)):
        extended = []
        for p in paths:
            for y in grids[t]:
                if decomps[t - 1].pair_component(p[-1], y) is not None:
                    extended.append(p + (y,))
        paths = extended
    return paths


def _row_keys_for(marginals, grids, paths) -> Tuple[tuple, ...]:
    keys: List[tuple] = []
    for t, grid in enumerate(grids):
        for point in grid:
            keys.append(("marginal", t, point))
    for t in range(1, len(grids)):
        prefixes = sorted({p[:t] for p in paths})
        for prefix in prefixes:
            keys.append(("martingale", t, prefix))
    return tuple(keys)


def build_program(
    marginals: Sequence[DiscreteMeasure], reward: Reward, mode: str = EXACT
) -> MotProgram:
    marginals = tuple(marginals)
    require_convex_order_chain(marginals)
    decomps = [decompose_step(marginals[t - 1], marginals[t]) for t in range(1, len(marginals))]
    grids = tuple(mu.support for mu in marginals)
    paths = tuple(_effective_paths(grids, decomps))
    values = tuple(_ingest(reward(p), mode) for p in paths)
    return MotProgram(
        marginals=marginals,
        grids=grids,
        paths=paths,
        reward_values=values,
        mode=mode,
        row_keys=_row_keys_for(marginals, grids, paths),
    )


@dataclass
class LPSolution:
    """Optimal value and a basic optimal transport, plus the raw LP output."""

    value: Union[Fraction, float]
    optimizer: PathMeasure
    program: MotProgram
    exact_value: Fraction
    lp: LpResult


def _solve_program(program: MotProgram) -> LPSolution:
    rows, rhs = program.lp_rows()
    try:
        lp = solve_lp(list(program.reward_values), rows, rhs)
    except Infeasible:
        raise AssertionError(
            "transport polytope empty although marginals are in convex order"
        ) from None
    optimizer = PathMeasure(
        program.n,
        ((program.paths[k], v) for k, v in enumerate(lp.x) if v != 0),
    )
    value: Union[Fraction, float] = lp.value if program.mode == EXACT else float(lp.value)
    return LPSolution(value, optimizer, program, lp.value, lp)


def solve_primal(
    marginals: Sequence[DiscreteMeasure], reward: Reward, mode: str = EXACT
) -> LPSolution:
    """Maximize the reward over martingale couplings of the marginals.

    Exact mode requires rational reward values and returns exact rationals;
    float mode embeds float rewards exactly and returns a float value.
    """
    return _solve_program(build_program(marginals, reward, mode))


@dataclass
class DualCertificate:
    """Dual optimizer: static positions phi_t and trading strategy H.

    Superhedging holds on every effective-domain grid path:
    sum_t phi_t(x_t) + sum_t H_t(x_0..x_{t-1}) (x_t - x_{t-1}) >= f(x),
    and the objective sum_t mu_t(phi_t) equals the primal value exactly.
    """

    phi: Dict[int, Dict[Fraction, Fraction]]
    H: Dict[Tuple[int, Path], Fraction]
    objective: Fraction
    program: MotProgram

    def phi_value(self, t: int, x: Fraction) -> Fraction:
        return self.phi.get(t, {}).get(x, Fraction(0))

    def H_value(self, t: int, prefix: Path) -> Fraction:
        return self.H.get((t, prefix), Fraction(0))

    def superhedge(self, path: Path) -> Fraction:
        total = Fraction(0)
        for t, x in enumerate(path):
            total += self.phi_value(t, x)
        for t in range(1, len(path)):
            total += self.H_value(t, path[:t]) * (path[t] - path[t - 1])
        return total

    def to_json(self) -> dict:
        return {
            "objective": str(self.objective),
            "phi": [
                {"t": t, "values": {str(x): str(v) for x, v in sorted(values.items())}}
                for t, values in sorted(self.phi.items())
            ],
            "H": [
                {"t": t, "prefix": [str(c) for c in prefix], "value": str(v)}
                for (t, prefix), v in sorted(self.H.items())
            ],
        }


def extract_dual(program: MotProgram, solution: LPSolution) -> DualCertificate:
    """Read the dual optimizer off the optimal basis and verify it.

    The superhedging inequality is checked on every effective-domain grid
    path and complementary slackness on the support of the optimizer before
    the certificate is returned.
    """
    duals = solution.lp.duals
    phi: Dict[int, Dict[Fraction, Fraction]] = {t: {} for t in range(program.n + 1)}
    H: Dict[Tuple[int, Path], Fraction] = {}
    for key, y in zip(program.row_keys, duals):
        if key[0] == "marginal":
            _, t, point = key
            phi[t][point] = y
        else:
            _, t, prefix = key
            if y != 0:
                H[(t, prefix)] = y
    objective = sum(
        (
            program.marginals[t].weight_at(point) * value
            for t, values in phi.items()
            for point, value in values.items()
        ),
        Fraction(0),
    )
    certificate = DualCertificate(phi, H, objective, program)
    if objective != solution.exact_value:
        raise AssertionError("dual objective does not match the primal value")
    for path, f_val in zip(program.paths, program.reward_values):
        if certificate.superhedge(path) < f_val:
            raise AssertionError(f"superhedging fails on {path}")
    for path, w in solution.optimizer.paths:
        f_val = program.reward_values[program.paths.index(path)]
        if w > 0 and certificate.superhedge(path) != f_val:
            raise AssertionError(f"complementary slackness fails on {path}")
    return certificate


def contact_set(certificate: DualCertificate, reward: Reward) -> SupportSet:
    """Effective-domain grid paths where the superhedge touches the reward."""
    program = certificate.program
    touching = [
        path
        for path in program.paths
        if certificate.superhedge(path) == _ingest(reward(path), program.mode)
    ]
    return SupportSet(program.n, touching)


def feasible_transport(marginals: Sequence[DiscreteMeasure]) -> PathMeasure:
    """A basic feasible martingale coupling of the marginals (reward zero)."""
    return solve_primal(marginals, lambda path: 0).optimizer


def chain_min_call(
    mu0_part: DiscreteMeasure,
    chain: Sequence[DiscreteMeasure],
    t: int,
    b: RationalLike,
) -> Fraction:
    """LP minimum of the call value of theta_t over the chain-feasible set.

    The set consists of the terminal measures of chains
    mu0_part <=_c theta_1 <=_c ... <=_c theta_t with theta_s <= chain[s-1];
    consecutive convex-order constraints are encoded as martingale-coupling
    feasibility blocks.  Raises Infeasible when the set is empty.
    """
    b = rat(b)
    if not 1 <= t <= len(chain):
        raise ValueError("t must lie between 1 and the chain length")
    if mu0_part.is_zero:
        return Fraction(0)
    grids: List[Tuple[Fraction, ...]] = [mu0_part.support]
    grids += [chain[s].support for s in range(t)]

    cols: List[Tuple[int, Fraction, Fraction]] = []  # (step s, x, y)
    for s in range(1, t + 1):
        for x in grids[s - 1]:
            for y in grids[s]:
                cols.append((s, x, y))
    col_index = {c: k for k, c in enumerate(cols)}
    width = len(cols)

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    senses: List[str] = []

    def blank() -> List[Fraction]:
        return [Fraction(0)] * width

    for x, w in mu0_part.atoms:
        row = blank()
        for y in grids[1]:
            row[col_index[(1, x, y)]] = Fraction(1)
        rows.append(row)
        rhs.append(w)
        senses.append("=")
    for s in range(1, t):
        for y in grids[s]:
            row = blank()
            for z in grids[s + 1]:
                row[col_index[(s + 1, y, z)]] = Fraction(1)
            for x in grids[s - 1]:
                row[col_index[(s, x, y)]] -= Fraction(1)
            rows.append(row)
            rhs.append(Fraction(0))
            senses.append("=")
    for s in range(1, t + 1):
        for x in grids[s - 1]:
            row = blank()
            for y in grids[s]:
                row[col_index[(s, x, y)]] = y - x
            rows.append(row)
            rhs.append(Fraction(0))
            senses.append("=")
        for y, w in chain[s - 1].atoms:
            row = blank()
            for x in grids[s - 1]:
                row[col_index[(s, x, y)]] = Fraction(1)
            rows.append(row)
            rhs.append(w)
            senses.append("<=")

    objective = blank()
    for x in grids[t - 1]:
        for y in grids[t]:
            if y > b:
                objective[col_index[(t, x, y)]] = y - b
    result = solve_lp(objective, rows, rhs, senses, maximize=False)
    return result.value


@dataclass
class FreeProgram:
    """LP data of the problem with free intermediate marginals."""

    mu0: DiscreteMeasure
    mun: DiscreteMeasure
    n: int
    grid: Tuple[Fraction, ...]
    paths: Tuple[Path, ...]
    reward_values: Tuple[Fraction, ...]
    mode: str
    row_keys: Tuple[tuple, ...]
    components: Tuple[NStepComponent, ...]


@dataclass
class FreeDualCertificate:
    """Dual optimizer (phi, psi, H) of the free-marginal problem."""

    phi: Dict[Fraction, Fraction]
    psi: Dict[Fraction, Fraction]
    H: Dict[Tuple[int, Path], Fraction]
    objective: Fraction
    program: FreeProgram

    def superhedge(self, path: Path) -> Fraction:
        total = self.phi.get(path[0], Fraction(0)) + self.psi.get(path[-1], Fraction(0))
        for t in range(1, len(path)):
            total += self.H.get((t, path[:t]), Fraction(0)) * (path[t] - path[t - 1])
        return total

    def to_json(self) -> dict:
        return {
            "objective": str(self.objective),
            "phi": {str(x): str(v) for x, v in sorted(self.phi.items())},
            "psi": {str(x): str(v) for x, v in sorted(self.psi.items())},
            "H": [
                {"t": t, "prefix": [str(c) for c in prefix], "value": str(v)}
                for (t, prefix), v in sorted(self.H.items())
            ],
        }


@dataclass
class FreeSolution:
    value: Union[Fraction, float]
    optimizer: PathMeasure
    certificate: FreeDualCertificate
    exact_value: Fraction


def solve_free(
    mu0: DiscreteMeasure,
    mun: DiscreteMeasure,
    n: int,
    reward: Reward,
    grid: Optional[Sequence[RationalLike]] = None,
    mode: str = EXACT,
) -> FreeSolution:
    """Solve the transport problem with only the first and last marginals pinned.

    Paths run over the intermediate grid (default: union of the two supports;
    the canonical monotone transport lives on it) intersected with the n-step
    components; the dual returns (phi, psi, H) with superhedging on every
    such path.
    """
    require_convex_order(mu0, mun)
    if n < 1:
        raise ValueError("n must be at least 1")
    if grid is None:
        inner: Tuple[Fraction, ...] = tuple(sorted(set(mu0.support) | set(mun.support)))
    else:
        inner = tuple(sorted({rat(g) for g in grid}))
    components = tuple(n_step_components(mu0, mun, n))

    paths: List[Path] = [(x,) for x in mu0.support]
    for t in range(1, n + 1):
        coords = mun.support if t == n else inner
        paths = [p + (y,) for p in paths for y in coords]
    paths = [p for p in paths if any(c.contains(p) for c in components)]

    values = tuple(_ingest(reward(p), mode) for p in paths)
    row_keys: List[tuple] = []
    for point in mu0.support:
        row_keys.append(("marginal", 0, point))
    for point in mun.support:
        row_keys.append(("marginal", n, point))
    for t in range(1, n + 1):
        for prefix in sorted({p[:t] for p in paths}):
            row_keys.append(("martingale", t, prefix))

    index = {key: i for i, key in enumerate(row_keys)}
    rows = [[Fraction(0)] * len(paths) for _ in row_keys]
    rhs = [Fraction(0)] * len(row_keys)
    for point, w in mu0.atoms:
        rhs[index[("marginal", 0, point)]] = w
    for point, w in mun.atoms:
        rhs[index[("marginal", n, point)]] = w
    for j, path in enumerate(paths):
        rows[index[("marginal", 0, path[0])]][j] = Fraction(1)
        rows[index[("marginal", n, path[-1])]][j] = Fraction(1)
        for t in range(1, n + 1):
            rows[index[("martingale", t, path[:t])]][j] = path[t] - path[t - 1]

    try:
        lp = solve_lp(list(values), rows, rhs)
    except Infeasible:
        raise AssertionError(
            "free transport polytope empty although marginals are in convex order"
        ) from None

    optimizer = PathMeasure(n, ((paths[k], v) for k, v in enumerate(lp.x) if v != 0))
    program = FreeProgram(
        mu0, mun, n, inner, tuple(paths), values, mode, tuple(row_keys), components
    )
    phi: Dict[Fraction, Fraction] = {}
    psi: Dict[Fraction, Fraction] = {}
    H: Dict[Tuple[int, Path], Fraction] = {}
    for key, y in zip(row_keys, lp.duals):
        if key[0] == "marginal" and key[1] == 0:
            phi[key[2]] = y
        elif key[0] == "marginal":
            psi[key[2]] = y
        elif y != 0:
            H[(key[1], key[2])] = y
    objective = sum((mu0.weight_at(x) * v for x, v in phi.items()), Fraction(0)) + sum(
        (mun.weight_at(x) * v for x, v in psi.items()), Fraction(0)
    )
    certificate = FreeDualCertificate(phi, psi, H, objective, program)
    if objective != lp.value:
        raise AssertionError("free dual objective does not match the primal value")
    for path, f_val in zip(paths, values):
        if certificate.superhedge(path) < f_val:
            raise AssertionError(f"free superhedging fails on {path}")
    value: Union[Fraction, float] = lp.value if mode == EXACT else float(lp.value)
    return FreeSolution(value, optimizer, certificate, lp.value)


# --- reward helpers and the CLI mini-language ------------------------------


def left_tail_put_reward(a: RationalLike, t: int, b: RationalLike) -> Reward:
    """The probe family 1{x_0 <= a} * (-(x_t - b)^+).

    Left-monotone transports attain the transport optimum simultaneously for
    every member of this family.
    """
    a, b = rat(a), rat(b)

    def reward(path: Path):
        if path[0] > a:
            return Fraction(0)
        return -max(path[t] - b, Fraction(0))

    return reward


def tanh_sm_reward(t: int) -> Reward:
    """The smooth strictly Spence-Mirrlees reward tanh(x_0) * sqrt(1 + x_t^2)."""

    def reward(path: Path) -> float:
        return math.tanh(float(path[0])) * math.sqrt(1.0 + float(path[t]) ** 2)

    return reward


_FACTOR_RE = re.compile(
    r"""^(?:
        (?P<const>[+-]?\d+(?:/\d+)?) |
        indicator\(\s*t\s*=\s*(?P<it>\d+)\s*,\s*(?P<dir><=|>=)\s*(?P<ia>[+-]?\d+(?:/\d+)?)\s*\) |
        (?P<fn>call|put|abs)\(\s*(?P<ft>\d+)\s*,\s*(?P<fb>[+-]?\d+(?:/\d+)?)\s*\) |
        tanh_sm\(\s*(?P<st>\d+)\s*\)
    )$""",
    re.VERBOSE,
)


@dataclass
class RewardSpec:
    """A parsed product reward: callable plus rationality information."""

    text: str
    factors: Tuple[Callable[[Path], Union[Fraction, float]], ...]
    is_rational: bool
    max_index: int

    def __call__(self, path: Path) -> Union[Fraction, float]:
        result: Union[Fraction, float] = Fraction(1)
        for factor in self.factors:
            result = result * factor(path)
        return result


def parse_reward(text: str) -> RewardSpec:
    """Parse the product mini-language.

    Factors separated by '*': rational constants, indicator(t=T, <=A) (or >=),
    call(T, B), put(T, B), abs(T, B), tanh_sm(T).
    """
    factors: List[Callable[[Path], Union[Fraction, float]]] = []
    rational = True
    max_index = 0
    for raw in text.split("*"):
        part = raw.strip()
        m = _FACTOR_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse reward factor {part!r}")
        if m.group("const") is not None:
            value = Fraction(m.group("const"))
            factors.append(lambda path, value=value: value)
        elif m.group("it") is not None:
            t = int(m.group("it"))
            a = Fraction(m.group("ia"))
            flip = m.group("dir") == ">="
            max_index = max(max_index, t)

            def indicator(path, t=t, a=a, flip=flip):
                hit = path[t] >= a if flip else path[t] <= a
                return Fraction(1) if hit else Fraction(0)

            factors.append(indicator)
        elif m.group("fn") is not None:
            fn = m.group("fn")
            t = int(m.group("ft"))
            b = Fraction(m.group("fb"))
            max_index = max(max_index, t)
            if fn == "call":
                factors.append(lambda path, t=t, b=b: max(path[t] - b, Fraction(0)))
            elif fn == "put":
                factors.append(lambda path, t=t, b=b: max(b - path[t], Fraction(0)))
            else:
                factors.append(lambda path, t=t, b=b: abs(path[t] - b))
        else:
            t = int(m.group("st"))
            max_index = max(max_index, t)
            rational = False
            factors.append(
                lambda path, t=t: math.tanh(float(path[0]))
                * math.sqrt(1.0 + float(path[t]) ** 2)
            )
    return RewardSpec(text, tuple(factors), rational, max_index)
