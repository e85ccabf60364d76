"""Command-line front end: ``insideout {count,fit,verify,perms}``.

Exit codes: 0 success, 1 input error, 2 budget exhausted, 3 fit failure,
4 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time

from . import counting as C
from .arrangement import CLOSED, OPEN, SUBSPACE
from .clutters import DEFAULT_MAX_ORIENTATIONS, DEFAULT_MAX_POINTS, FAMILIES, from_config
from .errors import (InsideOutError, InsufficientData, NoConsistentPeriod, NotConstantWeight, NotTransverse,
                     SchemaError, TooLarge)
from .exact import fmt_rational
from .permutations import conjecture_report, realizable_set
from .quasipoly import StructureReport, fit, verify_structure

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_FIT, EXIT_VERIFY = 0, 1, 2, 3, 4


def parse_builtin(name: str):
    """``magic:3``, ``magic(3)`` or ``magilatin_rectangle:2,3`` -> (family, params)."""
    m = re.fullmatch(r"\s*([a-z_]+)\s*(?:[:(]\s*([\d,\s]+?)\s*\)?)?\s*", name)
    if not m:
        raise SchemaError(f"cannot parse builtin name {name!r}", "--builtin")
    family = m.group(1)
    if family not in FAMILIES:
        raise SchemaError(f"unknown family {family!r}", "--builtin")
    params = [int(p) for p in (m.group(2) or "").replace(" ", "").split(",") if p]
    return family, params


def load_document(args) -> dict:
    if bool(args.problem) == bool(args.builtin):
        raise SchemaError("give exactly one of --problem or --builtin", "<arguments>")
    if args.problem:
        try:
            with open(args.problem, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise SchemaError(str(exc), args.problem) from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from exc
    else:
        family, params = parse_builtin(args.builtin)
        doc = {"builtin": {"family": family, "params": params}}
    key = "builtin" if "builtin" in doc else "explicit"
    if isinstance(doc.get(key), dict):
        for opt, field in (("mode", "mode"), ("distinct", "distinctness"), ("symmetry", "symmetry")):
            val = getattr(args, opt)
            if val is not None:
                doc[key][field] = val
    budgets = doc.setdefault("budgets", {}) if isinstance(doc, dict) else {}
    if args.budget_points is not None:
        budgets["max_points"] = args.budget_points
    if args.budget_orients is not None:
        budgets["max_orientations"] = args.budget_orients
    if not budgets and isinstance(doc, dict):
        doc.pop("budgets")
    return doc


def problem_echo(p) -> dict:
    return {
        "name": p.name,
        "d": p.d,
        "dim": p.dim,
        "mode": p.mode,
        "distinctness": p.distinctness,
        "symmetry": p.symmetry,
        "period": p.period,
        "graph_edges": len(p.graph.edges),
        "hyperplanes": len(p.arrangement.hyperplanes),
        "constant_weight": p.constant_weight,
    }


def _t_range(args, doc, regimes, default_max):
    rng = doc.get("range", {})
    t_max = args.t_max if args.t_max is not None else rng.get("t_max", default_max)
    t_min = args.t_min if args.t_min is not None else rng.get("t_min")
    if t_min is None:
        t_min = 1 if all(r in _OPEN_REGIMES for r in regimes) else 0
    if t_max < t_min:
        raise SchemaError(f"empty range {t_min}..{t_max}", "range")
    return range(t_min, t_max + 1)


_OPEN_REGIMES = {C.OPEN_STRONG, C.WEAK_OPEN, C.MOEBIUS_OPEN}


def _series(problem, regime, ts):
    return {t: C.count(problem, regime, t) for t in ts if not (t == 0 and regime in _OPEN_REGIMES)}


def _parse_regimes(text):
    regs = [r.strip() for r in text.split(",") if r.strip()]
    for r in regs:
        if r not in C.REGIMES:
            raise SchemaError(f"unknown regime {r!r}; choose from {', '.join(C.REGIMES)}", "--regime")
    return regs


def emit(report: dict, args, csv_table=None) -> None:
    if args.out == "csv" and csv_table is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in csv_table:
            w.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def cmd_count(args, problem, doc) -> tuple:
    regimes = _parse_regimes(args.regime or C.OPEN_STRONG)
    ts = _t_range(args, doc, regimes, 12)
    series = {r: _series(problem, r, ts) for r in regimes}
    report = {
        "command": "count",
        "problem": problem_echo(problem),
        "series": {r: {str(t): v for t, v in s.items()} for r, s in series.items()},
    }
    table = [["t"] + regimes] + [[t] + [series[r].get(t, "") for r in regimes] for t in ts]
    return EXIT_OK, report, table


def _fit_problem(problem, regime, ts):
    data = _series(problem, regime, ts)
    return fit(data, problem.dim, problem.io_denominator, problem.period, regime=regime), data


def _default_fit_tmax(problem):
    return 2 * problem.io_denominator * (problem.dim + 1)


def cmd_fit(args, problem, doc) -> tuple:
    regimes = _parse_regimes(args.regime or C.OPEN_STRONG)
    if len(regimes) != 1:
        raise SchemaError("fit takes a single regime", "--regime")
    regime = regimes[0]
    ts = _t_range(args, doc, regimes, _default_fit_tmax(problem))
    rep, _ = _fit_problem(problem, regime, ts)
    out = {"command": "fit", "problem": problem_echo(problem), "fit": rep.to_json()}
    if regime == C.OPEN_STRONG:
        out["structure"] = verify_structure(rep, problem).to_json()
    table = [["residue"] + [f"c{k}" for k in range(rep.quasipolynomial.degree + 1)]]
    table += [[r] + [fmt_rational(a) for a in c] for r, c in enumerate(rep.quasipolynomial.constituents)]
    return EXIT_OK, out, table


def moebius_identity_holds(poset) -> bool:
    """``sum_{u <= v} mu(0, u) = 0`` for every ``v`` above the bottom."""
    n = len(poset.flats)
    if not n or poset.moebius[0] != 1:
        return False
    for v in range(1, n):
        if sum(poset.moebius[u] for u in range(n) if u == v or poset.below(u, v)) != 0:
            return False
    return True


def run_verify(problem, t_max=None) -> StructureReport:
    """Cross-method checks for one problem; NotTransverse/NotConstantWeight become skips."""
    rep = StructureReport()
    P_den = problem.vertex_set.denominator
    io_den = problem.io_denominator
    rep.add("polytope-denominator", True, actual=P_den)
    rep.add("inside-out-denominator", io_den % P_den == 0, actual=io_den,
            detail=f"multiple of the polytope denominator {P_den}")
    t_max = t_max or _default_fit_tmax(problem)
    ts = range(1, t_max + 1)
    try:
        fr, data = _fit_problem(problem, C.OPEN_STRONG, ts)
    except (NoConsistentPeriod, InsufficientData) as exc:
        rep.add("fit", False, detail=str(exc))
        return rep
    rep.add("fit-period-divides-denominator", io_den % fr.period == 0, actual=fr.period,
            detail=f"inside-out denominator {io_den}")
    if problem.mode == "affine":
        rep.add("period-multiple-of-p(s)", fr.period % problem.period == 0, problem.period, fr.period)
        bad = [t for t, v in data.items() if t % problem.period and v]
        rep.add("affine-vanishing", not bad, detail="" if not bad else f"nonzero at t={bad[:5]}")
    closed = {t: C.count_closed_multiplicity(problem, t) for t in range(0, 11)}
    rep.checks.extend(verify_structure(fr, problem, closed).checks)
    rep.add("moebius-identity", moebius_identity_holds(problem.poset), actual=len(problem.poset.flats),
            detail="flats of the intersection poset")
    t_mob = range(1, min(t_max, 20) + 1)
    try:
        bad = [t for t in t_mob if C.moebius_count(problem, t, open=True) != data[t]]
        rep.add("moebius-open", not bad, detail="" if not bad else f"mismatch at t={bad[:5]}")
    except NotConstantWeight as exc:
        rep.add("moebius-open", None, detail=str(exc))
    try:
        bad = [t for t in range(0, 11) if C.moebius_count(problem, t, open=False) != closed[t]]
        rep.add("moebius-closed", not bad, detail="" if not bad else f"mismatch at t={bad[:5]}")
    except (NotTransverse, NotConstantWeight) as exc:
        rep.add("moebius-closed", None, detail=str(exc))
    return rep


def cmd_verify(args, problem, doc) -> tuple:
    rep = run_verify(problem, args.t_max)
    out = {"command": "verify", "problem": problem_echo(problem), "verify": rep.to_json()}
    table = [["check", "status"]] + [[c["check"], c["status"]] for c in out["verify"]["checks"]]
    return (EXIT_OK if rep.passed else EXIT_VERIFY), out, table


def _orientation_json(o):
    if o.order is not None:
        return list(o.positions())
    return [[i + 1, j + 1] for i, j in o.arcs]


def cmd_perms(args, problem, doc) -> tuple:
    out = {"command": "perms", "problem": problem_echo(problem)}
    out["regions"] = {"count": len(problem.regions), "orientations": [_orientation_json(o) for o in problem.regions]}
    targets = (OPEN, CLOSED, SUBSPACE) if problem.mode == "affine" else (OPEN,)
    perms = {}
    for tgt in targets:
        rs = realizable_set(problem, tgt)
        perms[tgt] = {"count": len(rs), "positions": [list(o.positions()) for o in rs]}
    out["permutations"] = perms
    out["conjecture"] = conjecture_report(problem).to_json()
    table = [["target", "count"]] + [[k, v["count"]] for k, v in perms.items()]
    return EXIT_OK, out, table


COMMANDS = {"count": cmd_count, "fit": cmd_fit, "verify": cmd_verify, "perms": cmd_perms}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("problem")
    src.add_argument("--problem", metavar="FILE", help="JSON problem document")
    src.add_argument("--builtin", metavar="NAME", help="e.g. magic:3, magic(3), magilatin_rectangle:2,3")
    src.add_argument("--mode", choices=("cubical", "affine"))
    src.add_argument("--distinct", choices=("all", "line", "none"))
    src.add_argument("--symmetry", choices=("none", "cubical", "affine"))
    run = common.add_argument_group("run")
    run.add_argument("--t-min", type=int)
    run.add_argument("--t-max", type=int)
    run.add_argument("--regime", help="comma-separated: " + ", ".join(C.REGIMES))
    run.add_argument("--out", choices=("json", "csv"), default="json")
    run.add_argument("--budget-points", type=int, help=f"max candidate points per dilation (default {DEFAULT_MAX_POINTS})")
    run.add_argument("--budget-orients", type=int,
                     help=f"max realizable orientations (default {DEFAULT_MAX_ORIENTATIONS})")
    run.add_argument("--timing", action="store_true", help="add wall-clock seconds to the JSON report")

    parser = argparse.ArgumentParser(prog="insideout", description="Exact inside-out Ehrhart counting.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("count", parents=[common], help="exact counts per dilation")
    sub.add_parser("fit", parents=[common], help="fit a quasipolynomial and check its structure")
    sub.add_parser("verify", parents=[common], help="cross-method verification suite")
    sub.add_parser("perms", parents=[common], help="realizable permutations and the antichain conjecture")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        doc = load_document(args)
        problem = from_config(doc)
        code, report, table = COMMANDS[args.command](args, problem, doc)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TooLarge as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NoConsistentPeriod, InsufficientData) as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (InsideOutError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        # wall-clock time is opt-in so default reports stay byte-identical
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    emit(report, args, table)
    return code


if __name__ == "__main__":
    sys.exit(main())
