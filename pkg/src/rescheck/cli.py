"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 internal
invariant failure (including oracle disagreement).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import (automata, checkers, games, ltlf, oracle, problem,
               responsibility, strategies)

logger = logging.getLogger("rescheck")

CHECK_KINDS = ("win", "dom", "be", "weak", "exists-weak", "pr-ant", "ipr-ant",
               "pr-attr", "ipr-attr", "ara", "pr-attr-vs-env")

VALIDATION_ERRORS = (problem.ValidationError, ltlf.FormulaError,
                     checkers.NotEnforceableError,
                     responsibility.InconsistentHistoryError,
                     strategies.StrategyError, oracle.HorizonExceeded,
                     automata.AlphabetMismatch, OSError, json.JSONDecodeError)


class UsageError(Exception):
    pass


class OracleDisagreement(Exception):
    pass


def _load(args):
    if args.file:
        return problem.load_problem(args.file)
    return problem.plant()


def _need(args, *names):
    for n in names:
        if getattr(args, n.replace("-", "_")) is None:
            raise UsageError(f"--{n} is required for this command")


def run_check(args):
    """Evaluate one verdict; returns the JSON-ready report."""
    prob = _load(args)
    kind = args.kind
    _need(args, "goal", "env")
    goal = prob.formula(args.goal)
    env = prob.formula(args.env)
    if kind == "exists-weak":
        verdict = checkers.exists_weak(goal, env, prob.partition)
        report = verdict.to_json()
        if args.oracle:
            a = strategies.sequence_agent(prob.partition, [()])
            h = oracle.sufficient_horizon(goal, env, a)
            _compare(report, oracle.oracle_exists_weak(goal, env,
                                                       prob.partition, h))
        return report
    _need(args, "strategy")
    a = prob.strategy(args.strategy)
    extra = None
    if kind in ("win", "dom", "be", "weak"):
        report = checkers.CHECKS[kind](goal, env, a).to_json()
        if args.oracle:
            _compare(report, oracle.oracle_check(kind, goal, env, a))
        return report
    if kind == "pr-ant":
        rep = responsibility.pr_ant(goal, env, a)
    elif kind == "ipr-ant":
        rep = responsibility.ipr_ant(goal, env, a)
    elif kind == "ara":
        rep = responsibility.ara(goal, env, a)
    elif kind in ("pr-attr", "ipr-attr"):
        _need(args, "history")
        extra = prob.history(args.history)
        if kind == "pr-attr":
            rep = responsibility.pr_attr(goal, env, a, extra)
        else:
            rep = responsibility.ipr_attr(goal, env, a, extra,
                                          reduction=args.reduction)
    elif kind == "pr-attr-vs-env":
        _need(args, "env-strategy")
        extra = prob.env_strategy(args.env_strategy)
        rep = responsibility.pr_attr_vs_env(goal, env, a, extra)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {kind}")
    report = rep.to_json()
    if args.oracle:
        if kind == "ipr-attr" and args.reduction == "table":
            raise UsageError("--oracle checks the definition, not the "
                             "table reduction")
        _compare(report, oracle.oracle_responsibility(kind, goal, env, a,
                                                      extra))
    return report


def _compare(report, expected):
    report.setdefault("diagnostics", {})["oracle"] = expected
    if expected != report["decision"]:
        raise OracleDisagreement(
            f"oracle says {expected}, checker says {report['decision']}")


def _format_trace(trace):
    return " ".join("{" + ",".join(letter) + "}" for letter in trace)


def render_report(report):
    lines = [f"{report['kind']}: {str(report['decision']).lower()}"]
    for v in report.get("verdicts", [report]):
        w = v.get("witness")
        if not w:
            continue
        prefix = f"  [{v['kind']}] " if v is not report else "  "
        for key, val in w.items():
            if isinstance(val, list):
                val = _format_trace(val) if val else "(empty)"
            lines.append(f"{prefix}{key}: {val}")
    diag = report.get("diagnostics") or {}
    for key in ("definition", "table", "oracle"):
        if key in diag:
            lines.append(f"  {key}: {str(diag[key]).lower()}")
    return "\n".join(lines)


def cmd_check(args, out):
    report = run_check(args)
    if args.json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write(render_report(report) + "\n")
    return 0


def cmd_validate(args, out):
    prob = _load(args)
    summary = {
        "partition": prob.partition.to_json(),
        "formulas": {n: ltlf.render(f) for n, f in prob.formulas.items()},
        "strategies": {n: a.n_states for n, a in prob.strategies.items()},
        "envStrategies": {n: e.n_states for n, e in prob.env_strategies.items()},
        "histories": {n: len(h) for n, h in prob.histories.items()},
    }
    for name, h in prob.histories.items():
        consistent = [s for s, a in prob.strategies.items()
                      if strategies.is_consistent(h, a)]
        summary.setdefault("historyConsistentWith", {})[name] = consistent
    if args.json:
        out.write(json.dumps({"valid": True, **summary}, indent=2) + "\n")
    else:
        out.write("valid\n")
        for key in ("formulas", "strategies", "envStrategies", "histories"):
            out.write(f"  {key}: {', '.join(summary[key]) or '-'}\n")
    return 0


def cmd_automaton(args, out):
    prob = _load(args)
    _need(args, "formula")
    f = prob.formula(args.formula)
    p = prob.partition
    d = automata.to_dfa(f, p)
    annotate = None
    if args.env:
        arena, _ = checkers.goal_game(f, prob.formula(args.env), p)
        d = arena.dfa
        values = games.state_values(arena)
        annotate = {s: f"val={v:+d}" for s, v in values.items()}
    info = {"formula": ltlf.render(f), "nfaStates": automata.to_nfa(f, p).n_states,
            "dfaStates": d.n_states, "final": sorted(d.final)}
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(automata.to_dot(d, "A", annotate))
        info["dot"] = args.dot
    if args.json:
        out.write(json.dumps(info, indent=2) + "\n")
    else:
        for k, v in info.items():
            out.write(f"{k}: {v}\n")
        if not args.dot:
            out.write(automata.to_dot(d, "A", annotate))
    return 0


def cmd_oracle_suite(args, out):
    t0 = time.perf_counter()
    records = oracle.equivalence_suite(args.count, args.seed)
    bad = [r for r in records if r["disagreements"]]
    summary = {"instances": len(records), "disagreements": len(bad),
               "tableReductionDisagreements":
                   sum(1 for r in records if not r["tableAgrees"]),
               "wallTimeS": round(time.perf_counter() - t0, 2)}
    if args.json:
        out.write(json.dumps({**summary, "failures": bad}, indent=2) + "\n")
    else:
        for k, v in summary.items():
            out.write(f"{k}: {v}\n")
        for r in bad:
            out.write(f"  seed {r['seed']}: {r['disagreements']}\n")
    return 4 if bad else 0


def cmd_example(args, out):
    text = json.dumps(problem.plant_json(), indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="rescheck",
        description="Check LTLf strategy properties and responsibility.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-f", "--file",
                       help="problem file (default: bundled plant corpus)")
        p.add_argument("--json", action="store_true", help="JSON output")

    c = sub.add_parser("check", help="decide one verdict")
    common(c)
    c.add_argument("--kind", required=True, choices=CHECK_KINDS)
    c.add_argument("--goal", help="formula name or text")
    c.add_argument("--env", help="environment specification name or text")
    c.add_argument("--strategy")
    c.add_argument("--env-strategy", dest="env_strategy")
    c.add_argument("--history")
    c.add_argument("--reduction", choices=("definition", "table"),
                   default="definition",
                   help="ipr-attr only: decide the definition (default) or "
                        "the best-effort reduction under E ∧ E_h")
    c.add_argument("--oracle", action="store_true",
                   help="re-run through the bounded oracle, fail on mismatch")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", help="validate a problem file")
    common(v)
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("automaton", help="compile a formula to a DFA")
    common(a)
    a.add_argument("--formula")
    a.add_argument("--env", help="annotate the goal game under this spec")
    a.add_argument("--dot", help="write DOT to this path")
    a.set_defaults(func=cmd_automaton)

    o = sub.add_parser("oracle-suite", help="random equivalence run")
    o.add_argument("-n", "--count", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_oracle_suite)

    e = sub.add_parser("example", help="emit the bundled plant corpus")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_example)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except VALIDATION_ERRORS as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return 3
    except (checkers.InvariantError, OracleDisagreement) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
