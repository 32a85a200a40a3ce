"""Command-line front end.

Subcommands mirror the library operations one-to-one and speak JSON on stdout
(rationals serialized as strings, `--approx` adds decimal renderings,
`--csv` switches to flat tables).  Exit codes: 0 success, 2 mathematical
failure (order violations, failed checks, infeasibility), 1 I/O or schema
errors; schema violations carry JSON-pointer paths.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

from .coupling import (
    KernelPolicy,
    MarginalMismatch,
    NotMartingale,
    PathCountExceeded,
    PathMeasure,
    free_monotone_transport,
    is_martingale,
    left_curtain_one_step,
    left_monotone_multistep,
    markov_check,
    strong_order_holds,
    verify_left_monotone,
)
from .decomposition import decompose_step, free_polar_test, polar_test
from .geometry import SupportSet, is_left_monotone_set, is_nondegenerate_set
from .lpsolver import EXACT, FLOAT, extract_dual, parse_reward, solve_free, solve_primal
from .measure import (
    DiscreteMeasure,
    NegativeWeight,
    NotInConvexOrder,
    NotInPositiveConvexOrder,
    SchemaError,
    potential,
    rat,
)
from .shadow import obstructed_shadow, shadow, shadow_atom
from .simplex import Infeasible, Unbounded

EXIT_OK = 0
EXIT_IO = 1
EXIT_MATH = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are I/O errors, not math ones
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}#", f"invalid JSON: {exc}") from None


def _load_measure(path: str) -> DiscreteMeasure:
    node = _load_json(path)
    try:
        return DiscreteMeasure.from_json(node)
    except SchemaError as exc:
        raise SchemaError(f"{path}#{exc.pointer}", exc.message) from None


def _load_coupling(path: str) -> PathMeasure:
    node = _load_json(path)
    try:
        return PathMeasure.from_json(node)
    except SchemaError as exc:
        raise SchemaError(f"{path}#{exc.pointer}", exc.message) from None


def _measure_json(mu: DiscreteMeasure, approx: bool) -> dict:
    obj = mu.to_json()
    if approx:
        for entry in obj["atoms"]:
            entry["x_approx"] = float(Fraction(entry["x"]))
            entry["w_approx"] = float(Fraction(entry["w"]))
    return obj


def _coupling_json(P: PathMeasure, approx: bool) -> dict:
    obj = P.to_json()
    if approx:
        for entry in obj["paths"]:
            entry["x_approx"] = [float(Fraction(c)) for c in entry["x"]]
            entry["w_approx"] = float(Fraction(entry["w"]))
    return obj


def _manifest(args, inputs: Sequence[str]) -> dict:
    return {
        "command": args.command,
        "inputs": list(inputs),
        "seed": getattr(args, "seed", 0),
        "mode": {
            "csv": bool(getattr(args, "csv", False)),
            "approx": bool(getattr(args, "approx", False)),
        },
        "outputs": ["stdout"],
    }


def _emit(args, payload: dict, csv_rows: Optional[List[dict]] = None) -> None:
    if getattr(args, "csv", False) and csv_rows is not None:
        writer = csv.DictWriter(sys.stdout, fieldnames=list(csv_rows[0]) if csv_rows else ["empty"])
        writer.writeheader()
        writer.writerows(csv_rows)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def cmd_check_order(args) -> int:
    measures = [_load_measure(path) for path in args.files]
    pairs = []
    chain_ok = True
    from .measure import convex_order_leq

    for t in range(1, len(measures)):
        ok = convex_order_leq(measures[t - 1], measures[t])
        chain_ok = chain_ok and ok
        pairs.append({"t": t, "convex_order": ok})
    payload = {"manifest": _manifest(args, args.files), "pairs": pairs, "chain": chain_ok}
    rows = []
    for idx, (path, mu) in enumerate(zip(args.files, measures)):
        u = potential(mu)
        for x, value in u.breakpoints:
            rows.append({"input": path, "t": idx, "x": str(x), "u": str(value)})
    _emit(args, payload, rows)
    return EXIT_OK if chain_ok else EXIT_MATH


def cmd_decompose(args) -> int:
    mu = _load_measure(args.mu)
    nu = _load_measure(args.nu)
    decomposition = decompose_step(mu, nu)
    payload = {"manifest": _manifest(args, [args.mu, args.nu])}
    payload.update(decomposition.to_json())
    rows = [
        {
            "k": comp.index,
            "I_lo": str(comp.I.lo),
            "I_hi": str(comp.I.hi),
            "J_lo_closed": comp.J.lo_closed,
            "J_hi_closed": comp.J.hi_closed,
            "mu_mass": str(comp.mu_k.mass),
            "nu_mass": str(comp.nu_k.mass),
        }
        for comp in decomposition.components
    ]
    _emit(args, payload, rows)
    return EXIT_OK


def _atoms_csv(mu: DiscreteMeasure) -> List[dict]:
    return [{"x": str(x), "w": str(w)} for x, w in mu.atoms]


def cmd_shadow(args) -> int:
    nu = _load_measure(args.target)
    if args.source is not None:
        mu = _load_measure(args.source)
        result = shadow(mu, nu)
        inputs = [args.source, args.target]
    else:
        if args.mass is None or args.at is None:
            raise SchemaError("", "either --source or both --mass and --at are required")
        result = shadow_atom(rat(args.mass), rat(args.at), nu)
        inputs = [args.target]
    payload = {
        "manifest": _manifest(args, inputs),
        "shadow": _measure_json(result.shadow, args.approx),
        "residual": _measure_json(result.residual, args.approx),
    }
    _emit(args, payload, _atoms_csv(result.shadow))
    return EXIT_OK


def cmd_obstructed_shadow(args) -> int:
    part = _load_measure(args.part)
    chain = [_load_measure(path) for path in args.chain]
    result = obstructed_shadow(part, chain)
    payload = {
        "manifest": _manifest(args, [args.part] + list(args.chain)),
        "result": _measure_json(result, args.approx),
    }
    _emit(args, payload, _atoms_csv(result))
    return EXIT_OK


def _paths_csv(P: PathMeasure) -> List[dict]:
    rows = []
    for p, w in P.paths:
        row = {f"x{t}": str(c) for t, c in enumerate(p)}
        row["w"] = str(w)
        rows.append(row)
    return rows


def cmd_left_monotone(args) -> int:
    marginals = [_load_measure(path) for path in args.files]
    policy = (
        KernelPolicy.LP_FEASIBLE
        if args.policy == "lp-feasible"
        else KernelPolicy.LEFT_CURTAIN_WITHIN_INCREMENTS
    )
    P = left_monotone_multistep(marginals, policy, max_paths=args.max_paths)
    payload = {
        "manifest": _manifest(args, args.files),
        "coupling": _coupling_json(P, args.approx),
        "strong_order": strong_order_holds(marginals),
    }
    _emit(args, payload, _paths_csv(P))
    return EXIT_OK


def cmd_solve(args) -> int:
    marginals = [_load_measure(path) for path in args.files]
    spec = parse_reward(args.reward)
    mode = args.mode
    if not spec.is_rational and mode == EXACT:
        raise SchemaError("", "reward has irrational factors; use --mode float")
    if spec.max_index > len(marginals) - 1:
        raise SchemaError("", f"reward references date {spec.max_index} beyond the horizon")
    solution = solve_primal(marginals, spec, mode)
    payload = {
        "manifest": _manifest(args, args.files),
        "reward": args.reward,
        "value": str(solution.exact_value) if mode == EXACT else solution.value,
        "optimizer": _coupling_json(solution.optimizer, args.approx),
    }
    if args.approx:
        payload["value_approx"] = float(solution.exact_value)
    if mode == EXACT:
        certificate = extract_dual(solution.program, solution)
        payload["certificate"] = certificate.to_json()
    _emit(args, payload, _paths_csv(solution.optimizer))
    return EXIT_OK


def cmd_verify_support(args) -> int:
    P = _load_coupling(args.coupling)
    gamma = SupportSet.of(P)
    lm_ok, lm_wit = is_left_monotone_set(gamma)
    nd_ok, nd_wit = is_nondegenerate_set(gamma)
    mart_ok, mart_wit = is_martingale(P)
    payload = {
        "manifest": _manifest(args, [args.coupling]),
        "left_monotone": lm_ok,
        "nondegenerate": nd_ok,
        "martingale": mart_ok,
        "markov": markov_check(P),
    }
    if lm_wit is not None:
        payload["crossing_witness"] = {
            "t": lm_wit.t,
            "history": [str(c) for c in lm_wit.history],
            "y_minus": str(lm_wit.y_minus),
            "y_plus": str(lm_wit.y_plus),
            "other_history": [str(c) for c in lm_wit.other_history],
            "y_prime": str(lm_wit.y_prime),
        }
    if nd_wit is not None:
        payload["degeneracy_witness"] = {
            "t": nd_wit.t,
            "history": [str(c) for c in nd_wit.history],
            "y": str(nd_wit.y),
        }
    if mart_wit is not None:
        payload["martingale_witness"] = [str(c) for c in mart_wit]
    rows = [
        {"check": "left_monotone", "ok": lm_ok},
        {"check": "nondegenerate", "ok": nd_ok},
        {"check": "martingale", "ok": mart_ok},
    ]
    _emit(args, payload, rows)
    return EXIT_OK if (lm_ok and nd_ok and mart_ok) else EXIT_MATH


def _load_paths(path: str) -> List[List[Fraction]]:
    node = _load_json(path)
    if not isinstance(node, list):
        raise SchemaError(f"{path}#", "paths file must be a JSON array of arrays")
    out = []
    for i, entry in enumerate(node):
        if not isinstance(entry, list):
            raise SchemaError(f"{path}#/{i}", "each path must be an array of rationals")
        out.append([rat(c) if not isinstance(c, float) else Fraction(c) for c in entry])
    return out


def cmd_polar(args) -> int:
    paths = _load_paths(args.paths)
    if args.free:
        if args.steps is None or len(args.files) != 2:
            raise SchemaError("", "--free needs --steps and exactly two marginal files")
        mu0, mun = (_load_measure(p) for p in args.files)
        verdicts = free_polar_test(mu0, mun, args.steps, paths)
    else:
        marginals = [_load_measure(p) for p in args.files]
        verdicts = polar_test(marginals, paths)
    rows = [
        {
            "path": " ".join(str(c) for c in v.path),
            "polar": v.polar,
            "reason": v.reason,
        }
        for v in verdicts
    ]
    payload = {
        "manifest": _manifest(args, list(args.files) + [args.paths]),
        "verdicts": [
            {
                "path": [str(c) for c in v.path],
                "polar": v.polar,
                "reason": v.reason,
                "component": list(v.component) if v.component is not None else None,
            }
            for v in verdicts
        ],
        "all_polar": all(v.polar for v in verdicts),
    }
    _emit(args, payload, rows)
    return EXIT_OK


def cmd_free(args) -> int:
    mu0 = _load_measure(args.mu0)
    mun = _load_measure(args.mun)
    P = free_monotone_transport(mu0, mun, args.steps)
    payload = {
        "manifest": _manifest(args, [args.mu0, args.mun]),
        "transport": _coupling_json(P, args.approx),
    }
    if args.reward is not None:
        spec = parse_reward(args.reward)
        if not spec.is_rational and args.mode == EXACT:
            raise SchemaError("", "reward has irrational factors; use --mode float")
        solution = solve_free(mu0, mun, args.steps, spec, mode=args.mode)
        payload["reward"] = args.reward
        payload["value"] = str(solution.exact_value) if args.mode == EXACT else solution.value
        payload["optimizer"] = _coupling_json(solution.optimizer, args.approx)
        payload["certificate"] = solution.certificate.to_json()
    _emit(args, payload, _paths_csv(P))
    return EXIT_OK


# --- built-in example instances --------------------------------------------


def _measure(pairs) -> DiscreteMeasure:
    return DiscreteMeasure(pairs)


def _example_uniquetransport() -> dict:
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    marginals = [
        DiscreteMeasure.dirac(0),
        _measure([(-1, half), (1, half)]),
        _measure([(-2, quarter), (0, half), (2, quarter)]),
    ]
    P = left_monotone_multistep(marginals)
    expected = PathMeasure(
        2,
        [
            ((0, -1, -2), quarter),
            ((0, -1, 0), quarter),
            ((0, 1, 0), quarter),
            ((0, 1, 2), quarter),
        ],
    )
    ok, _ = verify_left_monotone(P, marginals)
    return {
        "name": "uniquetransport",
        "pass": P == expected and ok,
        "coupling": P.to_json(),
    }


def _example_notleftcurtain() -> dict:
    h, q = Fraction(1, 2), Fraction(1, 4)
    marginals = [
        _measure([(-1, h), (1, h)]),
        _measure([(-2, h), (2, h)]),
        _measure([(-4, q), (0, h), (4, q)]),
    ]
    P = left_monotone_multistep(marginals)
    p02 = P.project((0, 2))
    one_step = left_curtain_one_step(marginals[0], marginals[2])
    s = Fraction(1, 16)
    expected_p02 = PathMeasure(
        1,
        [
            ((-1, -4), 3 * s), ((-1, 0), q), ((-1, 4), s),
            ((1, -4), s), ((1, 0), q), ((1, 4), 3 * s),
        ],
    )
    e = Fraction(1, 8)
    expected_one_step = PathMeasure(
        1,
        [((-1, -4), e), ((-1, 0), 3 * e), ((1, -4), e), ((1, 0), e), ((1, 4), q)],
    )
    mismatch = p02 != one_step
    passed = (
        p02 == expected_p02
        and one_step == expected_one_step
        and mismatch
        and not strong_order_holds(marginals)
    )
    return {
        "name": "notleftcurtain",
        "pass": passed,
        "projection_02": p02.to_json(),
        "one_step_left_curtain": one_step.to_json(),
        "projections_mismatch": mismatch,
    }


def _example_notmarkovian() -> dict:
    h, q, e = Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)
    marginals = [
        _measure([(0, h), (1, h)]),
        _measure([(0, 3 * q), (2, q)]),
        _measure([(-1, e), (0, h), (1, e), (2, q)]),
    ]
    P = left_monotone_multistep(marginals)
    expected = PathMeasure(
        2,
        [((0, 0, 0), h), ((1, 0, -1), e), ((1, 0, 1), e), ((1, 2, 2), q)],
    )
    lm_ok, _ = is_left_monotone_set(SupportSet.of(P))
    return {
        "name": "notmarkovian",
        "pass": P == expected and not markov_check(P) and lm_ok,
        "coupling": P.to_json(),
        "markov": markov_check(P),
    }


def _example_nonunique() -> dict:
    h, q, e = Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)
    marginals = [
        DiscreteMeasure.dirac(0),
        _measure([(-1, h), (1, h)]),
        _measure([(-2, 3 * e), (0, q), (2, 3 * e)]),
    ]
    P_left = PathMeasure(
        2,
        [((0, -1, -2), q), ((0, -1, 0), q), ((0, 1, -2), e), ((0, 1, 2), 3 * e)],
    )
    P_right = PathMeasure(
        2,
        [((0, -1, -2), 3 * e), ((0, -1, 2), e), ((0, 1, 0), q), ((0, 1, 2), q)],
    )
    mixture = PathMeasure.mixture([(P_left, h), (P_right, h)])
    ok = True
    for P in (P_left, P_right, mixture):
        verdict, _ = verify_left_monotone(P, marginals)
        ok = ok and verdict
    ok = ok and P_left.project((0, 1)) == P_right.project((0, 1))
    ok = ok and P_left.project((0, 2)) == P_right.project((0, 2))
    ok = ok and P_left != P_right
    return {"name": "nonunique", "pass": ok}


_EXAMPLES = {
    "uniquetransport": _example_uniquetransport,
    "notleftcurtain": _example_notleftcurtain,
    "notmarkovian": _example_notmarkovian,
    "nonunique": _example_nonunique,
}


def cmd_examples(args) -> int:
    if args.name is not None:
        names = [args.name]
        if args.name not in _EXAMPLES:
            raise SchemaError("", f"unknown example {args.name!r}; choose from {sorted(_EXAMPLES)}")
    else:
        names = sorted(_EXAMPLES)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda n: _EXAMPLES[n](), names))
    else:
        results = [_EXAMPLES[n]() for n in names]
    payload = {
        "manifest": _manifest(args, []),
        "results": results,
        "all_pass": all(r["pass"] for r in results),
    }
    rows = [{"name": r["name"], "pass": r["pass"]} for r in results]
    _emit(args, payload, rows)
    return EXIT_OK if payload["all_pass"] else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="leftcurtain",
        description="Exact multiperiod martingale optimal transport.",
        epilog=(
            "CSV columns: check-order -> input,t,x,u (potential breakpoints); "
            "decompose -> k,I_lo,I_hi,J_lo_closed,J_hi_closed,mu_mass,nu_mass; "
            "shadow/obstructed-shadow -> x,w; left-monotone/solve/free -> x0..xn,w; "
            "polar -> path,polar,reason; verify-support -> check,ok; examples -> name,pass."
        ),
    )
    parser.add_argument("--seed", type=int, default=0, help="seed recorded in the run manifest")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--csv", action="store_true", help="emit a flat CSV table")
        p.add_argument("--approx", action="store_true", help="add decimal renderings")

    p = sub.add_parser("check-order", help="verify a convex-order chain of measures")
    p.add_argument("files", nargs="+", metavar="measure.json")
    common(p)
    p.set_defaults(func=cmd_check_order)

    p = sub.add_parser("decompose", help="irreducible decomposition of one step")
    p.add_argument("mu")
    p.add_argument("nu")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("shadow", help="shadow of a measure or atom in a target")
    p.add_argument("--source", help="source measure JSON (whole-measure shadow)")
    p.add_argument("--mass", help="atom mass (with --at)")
    p.add_argument("--at", help="atom position (with --mass)")
    p.add_argument("--target", required=True, help="target measure JSON")
    common(p)
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("obstructed-shadow", help="shadow through a chain of targets")
    p.add_argument("--part", required=True, help="source measure JSON")
    p.add_argument("chain", nargs="+", metavar="target.json")
    common(p)
    p.set_defaults(func=cmd_obstructed_shadow)

    p = sub.add_parser("left-monotone", help="multistep left-monotone transport")
    p.add_argument("files", nargs="+", metavar="marginal.json")
    p.add_argument("--policy", choices=["left-curtain", "lp-feasible"], default="left-curtain")
    p.add_argument("--max-paths", type=int, default=10**6)
    common(p)
    p.set_defaults(func=cmd_left_monotone)

    p = sub.add_parser("solve", help="exact LP transport optimum with dual certificate")
    p.add_argument("files", nargs="+", metavar="marginal.json")
    p.add_argument("--reward", required=True, help="product reward, e.g. 'indicator(t=0, <=-1) * -1 * call(2, 0)'")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify-support", help="geometry checks on a coupling")
    p.add_argument("coupling")
    common(p)
    p.set_defaults(func=cmd_verify_support)

    p = sub.add_parser("polar", help="polar verdicts for finite path sets")
    p.add_argument("files", nargs="+", metavar="marginal.json")
    p.add_argument("--paths", required=True, help="JSON array of coordinate arrays")
    p.add_argument("--free", action="store_true", help="free intermediate marginals")
    p.add_argument("--steps", type=int, help="number of steps (with --free)")
    common(p)
    p.set_defaults(func=cmd_polar)

    p = sub.add_parser("free", help="free-intermediate-marginal transport and solver")
    p.add_argument("mu0")
    p.add_argument("mun")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--reward", help="also solve the free LP for this reward")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    common(p)
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("examples", help="reproduce the built-in example instances")
    p.add_argument("--name", help="run a single example")
    p.add_argument("--all", action="store_true", help="run every example (default)")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers, deterministic merge")
    common(p)
    p.set_defaults(func=cmd_examples)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SchemaError as exc:
        json.dump({"error": "schema", "pointer": exc.pointer, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_IO
    except OSError as exc:
        json.dump({"error": "io", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_IO
    except (
        NotInConvexOrder,
        NotInPositiveConvexOrder,
        NegativeWeight,
        MarginalMismatch,
        NotMartingale,
        Infeasible,
        Unbounded,
        PathCountExceeded,
    ) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
