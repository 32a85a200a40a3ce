import random
from fractions import Fraction as F

import pytest

from leftcurtain.simplex import Infeasible, Unbounded, solve_lp


def reference_solve(c, rows, rhs, senses=None, maximize=True):
    """Plain-Fraction two-phase tableau simplex, for cross-checking arithmetic.

    Independent of the production engine: ordinary rational pivoting on an
    explicit tableau, with Bland tie-breaking.
    """
    m, n = len(rows), len(c)
    senses = senses or ["="] * m
    c = [F(v) if maximize else -F(v) for v in c]
    table = []
    aux = []
    for i in range(m):
        row = [F(v) for v in rows[i]] + [F(rhs[i])]
        sense = senses[i]
        if row[-1] < 0:
            row = [-v for v in row]
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        table.append(row)
        aux.append(sense)
    cols = n
    slack_cols = {}
    art_cols = {}
    for i, sense in enumerate(aux):
        if sense in ("<=", ">="):
            slack_cols[i] = cols
            cols += 1
        if sense in ("=", ">="):
            art_cols[i] = cols
            cols += 1
    full = []
    basis = []
    for i, row in enumerate(table):
        r = row[:-1] + [F(0)] * (cols - n) + [row[-1]]
        if i in slack_cols:
            r[slack_cols[i]] = F(1) if aux[i] == "<=" else F(-1)
        if i in art_cols:
            r[art_cols[i]] = F(1)
            basis.append(art_cols[i])
        else:
            basis.append(slack_cols[i])
        full.append(r)

    def run(cost, forbid_artificials):
        for _ in range(100000):
            entering = None
            for j in range(cols):
                if cost[j] < 0 and not (forbid_artificials and j in art_cols.values()):
                    entering = j
                    break
            if entering is None:
                return cost
            pivot_row, best = None, None
            for i in range(m):
                if full[i][entering] > 0:
                    ratio = full[i][cols] / full[i][entering]
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[pivot_row]
                    ):
                        pivot_row, best = i, ratio
            if pivot_row is None:
                raise Unbounded("reference: unbounded")
            piv = full[pivot_row][entering]
            full[pivot_row] = [v / piv for v in full[pivot_row]]
            for i in range(m):
                if i != pivot_row and full[i][entering] != 0:
                    f = full[i][entering]
                    full[i] = [a - f * b for a, b in zip(full[i], full[pivot_row])]
            f = cost[entering]
            cost = [a - f * b for a, b in zip(cost, full[pivot_row])]
            basis[pivot_row] = entering
        raise AssertionError("reference: pivot limit")

    if art_cols:
        cost1 = [F(0)] * (cols + 1)
        for col in art_cols.values():
            cost1[col] = F(1)
        for i in art_cols:
            if basis[i] == art_cols[i]:
                cost1 = [a - b for a, b in zip(cost1, full[i])]
        cost1 = run(cost1, forbid_artificials=False)
        if -cost1[cols] != 0:
            raise Infeasible("reference: infeasible")
        # degenerate pivots move zero-level artificials out of the basis
        for i in art_cols:
            if basis[i] == art_cols[i]:
                entering = next(
                    (
                        j
                        for j in range(cols)
                        if j not in art_cols.values() and full[i][j] != 0
                    ),
                    None,
                )
                if entering is not None:
                    piv = full[i][entering]
                    full[i] = [v / piv for v in full[i]]
                    for k in range(m):
                        if k != i and full[k][entering] != 0:
                            f = full[k][entering]
                            full[k] = [a - f * b for a, b in zip(full[k], full[i])]
                    basis[i] = entering
    cost2 = [F(0)] * (cols + 1)
    for j in range(n):
        cost2[j] = -c[j]
    for i, b in enumerate(basis):
        if b < n and cost2[b] != 0:
            f = cost2[b]
            cost2 = [a - f * r for a, r in zip(cost2, full[i])]
    run(cost2, forbid_artificials=True)
    x = [F(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = full[i][cols]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return (value if maximize else -value), x


def check_certificates(c, rows, rhs, senses, maximize, result):
    """Exact optimality proof: primal feasible, dual feasible, equal values."""
    m, n = len(rows), len(c)
    senses = senses or ["="] * m
    assert all(v >= 0 for v in result.x)
    for i in range(m):
        lhs = sum(F(rows[i][j]) * result.x[j] for j in range(n))
        if senses[i] == "=":
            assert lhs == rhs[i]
        elif senses[i] == "<=":
            assert lhs <= rhs[i]
        else:
            assert lhs >= rhs[i]
    assert sum(F(c[j]) * result.x[j] for j in range(n)) == result.value
    assert sum(result.duals[i] * F(rhs[i]) for i in range(m)) == result.value
    for j in range(n):
        reduced = sum(result.duals[i] * F(rows[i][j]) for i in range(m))
        if maximize:
            assert reduced >= F(c[j])
        else:
            assert reduced <= F(c[j])
    # dual sign conditions on inequality rows
    for i in range(m):
        if senses[i] == "<=":
            assert (result.duals[i] >= 0) if maximize else (result.duals[i] <= 0)
        elif senses[i] == ">=":
            assert (result.duals[i] <= 0) if maximize else (result.duals[i] >= 0)


class TestHandPicked:
    def test_basic_max(self):
        r = solve_lp([F(1), F(2)], [[F(1), F(1)], [F(1), F(3)]], [F(4), F(6)], ["<=", "<="])
        assert r.value == 5 and r.x == [F(3), F(1)]

    def test_equalities(self):
        r = solve_lp([F(1), F(0)], [[F(1), F(1)], [F(1), F(-1)]], [F(1), F(0)])
        assert r.value == F(1, 2)

    def test_redundant_rows(self):
        r = solve_lp([F(1), F(0)], [[F(1), F(1)], [F(1), F(1)]], [F(1), F(1)])
        assert r.value == 1
        assert sum(d * 1 for d in r.duals) == 1

    def test_infeasible(self):
        with pytest.raises(Infeasible):
            solve_lp([F(1)], [[F(1)], [F(1)]], [F(1), F(2)])

    def test_unbounded(self):
        with pytest.raises(Unbounded):
            solve_lp([F(1), F(0)], [[F(0), F(1)]], [F(1)])

    def test_degenerate_cycling_instance(self):
        c = [F(3, 4), F(-150), F(1, 50), F(-6)]
        rows = [
            [F(1, 4), F(-60), F(-1, 25), F(9)],
            [F(1, 2), F(-90), F(-1, 50), F(3)],
            [F(0), F(0), F(1), F(0)],
        ]
        r = solve_lp(c, rows, [F(0), F(0), F(1)], ["<=", "<=", "<="])
        assert r.value == F(1, 20)

    def test_negative_rhs_normalization(self):
        # x0 - x1 = -2, x0 + x1 <= 4, max x0 -> x = (1, 3)
        r = solve_lp([F(1), F(0)], [[F(1), F(-1)], [F(1), F(1)]], [F(-2), F(4)], ["=", "<="])
        assert r.value == 1 and r.x == [F(1), F(3)]

    def test_min_with_ge_rows(self):
        r = solve_lp(
            [F(1, 3), F(1, 7)],
            [[F(2), F(1)], [F(1), F(3)]],
            [F(4), F(6)],
            [">=", ">="],
            maximize=False,
        )
        assert r.value == F(4, 7)


def random_lp(rng):
    m = rng.randint(1, 5)
    n = rng.randint(1, 8)
    rows = [
        [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(m)
    ]
    if rng.random() < 0.5:
        # feasible at the origin and bounded: box rows plus arbitrary <= rows
        senses = ["<="] * m
        rhs = [F(rng.randint(0, 6), rng.randint(1, 2)) for _ in range(m)]
        rows.append([F(1)] * n)
        senses.append("<=")
        rhs.append(F(rng.randint(1, 9)))
    else:
        rhs = [F(rng.randint(-3, 6), rng.randint(1, 2)) for _ in range(m)]
        senses = [rng.choice(["=", "<=", ">="]) for _ in range(m)]
    c = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
    maximize = rng.random() < 0.5
    return c, rows, rhs, senses, maximize


class TestRandomized:
    def test_against_reference_and_certificates(self):
        rng = random.Random(2024)
        solved = infeasible = unbounded = 0
        for _ in range(250):
            c, rows, rhs, senses, maximize = random_lp(rng)
            try:
                result = solve_lp(c, rows, rhs, senses, maximize)
                outcome = ("optimal", result.value)
            except Infeasible:
                outcome = ("infeasible", None)
            except Unbounded:
                outcome = ("unbounded", None)
            try:
                ref_value, _ = reference_solve(c, rows, rhs, senses, maximize)
                ref = ("optimal", ref_value)
            except Infeasible:
                ref = ("infeasible", None)
            except Unbounded:
                ref = ("unbounded", None)
            assert outcome == ref
            if outcome[0] == "optimal":
                check_certificates(c, rows, rhs, senses, maximize, result)
                solved += 1
            elif outcome[0] == "infeasible":
                infeasible += 1
            else:
                unbounded += 1
        assert solved >= 80 and infeasible >= 15 and unbounded >= 15

    def test_determinism(self):
        rng = random.Random(5)
        checked = 0
        while checked < 5:
            c, rows, rhs, senses, maximize = random_lp(rng)
            try:
                first = solve_lp(c, rows, rhs, senses, maximize)
            except (Infeasible, Unbounded):
                continue
            second = solve_lp(c, rows, rhs, senses, maximize)
            assert first == second
            checked += 1
