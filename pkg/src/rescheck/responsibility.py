"""Responsibility verdicts.

Anticipation and active responsibility reduce to the strategy checks.
Attribution on a history runs the checks under E ∧ E_h, whose automaton is
the product of A_E with the history DFA.

Inexcusable attribution on a history is decided by default with a
dedicated fixpoint over the histories of the strategy (see
``ipr_attr``): the dominance side condition of the definition ranges over
all environments enforcing E, while checking best-effort under E ∧ E_h
only compares strategies on environments consistent with h. The two can
differ, so the best-effort reduction is available as
``reduction="table"`` and is always reported in the diagnostics.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

from . import automata, checkers, games, ltlf, strategies
from .checkers import Verdict


class InconsistentHistoryError(ValueError):
    pass


@dataclass
class ResponsibilityReport:
    kind: str
    decision: bool
    verdicts: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self):
        return self.decision

    def to_json(self):
        return {"kind": self.kind, "decision": self.decision,
                "verdicts": [v.to_json() for v in self.verdicts],
                "inputs": self.inputs, "diagnostics": self.diagnostics}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], data["decision"],
                   [Verdict.from_json(v) for v in data.get("verdicts", [])],
                   data.get("inputs") or {}, data.get("diagnostics") or {})


def _inputs(goal, env, a, **extra):
    out = {"goal": ltlf.render(goal), "strategy": a.name or repr(a)}
    out["env"] = (ltlf.render(env) if isinstance(env, ltlf.Formula)
                  else "<dfa>")
    for k, v in extra.items():
        out[k] = v
    return out


def history_env_dfa(env, history, partition):
    """A_E × A_{E_h}."""
    return automata.product(checkers.env_dfa(env, partition),
                            automata.history_dfa(history, partition))


def _history_env(env, a, history):
    if not strategies.is_consistent(history, a):
        raise InconsistentHistoryError("history is not consistent with the "
                                       "strategy")
    return history_env_dfa(env, history, a.partition)


def pr_ant(goal, env, a):
    """Passive responsibility anticipation: a is not dominant for ¬goal."""
    v = checkers.check_dom(ltlf.not_(goal), env, a)
    return ResponsibilityReport("PRAnt", not v.decision, [v],
                                _inputs(goal, env, a))


def ipr_ant(goal, env, a):
    """Inexcusable passive responsibility anticipation: a is not
    best-effort for ¬goal."""
    v = checkers.check_be(ltlf.not_(goal), env, a)
    return ResponsibilityReport("IPRAnt", not v.decision, [v],
                                _inputs(goal, env, a))


def pr_attr(goal, env, a, history):
    """Passive responsibility attribution on a history."""
    eh = _history_env(env, a, history)
    v = checkers.check_dom(ltlf.not_(goal), eh, a)
    return ResponsibilityReport(
        "PRAttr", not v.decision, [v],
        _inputs(goal, env, a, history=len(history)),
        {"historyDfaStates": automata.history_dfa(history, a.partition).n_states,
         "envTimesHistory": eh.n_states})


@lru_cache(maxsize=256)
def _exists_weak_cached(neg_goal, env, partition):
    return checkers.exists_weak(neg_goal, env, partition)


def ara(goal, env, a):
    """Active responsibility: a wins goal and ¬goal is not inevitable."""
    win = checkers.check_win(goal, env, a)
    weak = _exists_weak_cached(ltlf.not_(goal), env, a.partition)
    return ResponsibilityReport("ARA", win.decision and weak.decision,
                                [win, weak], _inputs(goal, env, a))


def pr_attr_vs_env(goal, env, a, e):
    """Passive responsibility against a concrete environment machine: the
    play satisfies goal and some strategy would have avoided it."""
    p = a.partition
    if not strategies.env_enforces(e, checkers.env_dfa(env, p)):
        raise checkers.NotEnforceableError("the environment machine does not "
                                           "enforce the specification")
    t0 = time.perf_counter()
    word = strategies.play_word(a, e)
    holds = ltlf.evaluate(goal, automata.decode_word(word, p))
    ed = strategies.env_transducer_dfa(e)
    prod = automata.product(automata.to_nfa(ltlf.not_(goal), p), ed)
    alt = automata.non_empty(prod)
    witness = {"play": checkers.trace_json(word, p)}
    if alt is not None:
        if not (ed.accepts(alt) and
                not ltlf.evaluate(goal, automata.decode_word(alt, p))):
            raise checkers.InvariantError("alternative play re-verification")
        witness["alternative"] = checkers.trace_json(alt, p)
    v = Verdict("avoidable", alt is not None, witness, {
        "automatonSizes": {"envMachine": ed.n_states, "product": prod.n_states},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})
    return ResponsibilityReport("PRAttrVsEnv", holds and alt is not None, [v],
                                _inputs(goal, env, a, envStrategy=e.name))


# ------------------------------------------- inexcusable attribution on h

class _Explorer:
    """Explicit product of several DFAs, states keyed by component tuples.

    ``keep[i]``, when given, restricts component i to those states.
    """

    def __init__(self, dfas, keep=None):
        self.dfas = dfas
        self.keep = keep or [None] * len(dfas)
        self.initial = tuple(d.initial for d in dfas)
        self.succ = {}
        stack = [self.initial]
        self.succ[self.initial] = None
        while stack:
            s = stack.pop()
            out = []
            for l in dfas[0].alphabet.letters():
                t = self.step(s, l)
                if t is None:
                    continue
                out.append((l, t))
                if t not in self.succ:
                    self.succ[t] = None
                    stack.append(t)
            self.succ[s] = out

    def step(self, s, l):
        t = []
        for d, q, k in zip(self.dfas, s, self.keep):
            q2 = d.trans[q].get(l)
            if q2 is None or (k is not None and q2 not in k):
                return None
            t.append(q2)
        return tuple(t)


def _reach_back(succ, targets):
    back = {s: [] for s in succ}
    for s, out in succ.items():
        for _, t in out:
            back[t].append(s)
    seen = set(t for t in targets if t in back)
    stack = list(seen)
    while stack:
        t = stack.pop()
        for s in back[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def _strategy_win(succ, final):
    """States from which every continuation of the strategy ends in a final
    state (plays are finite, so this is a well-founded recursion)."""
    memo = {}
    for root in succ:
        stack = [(root, False)]
        while stack:
            s, done = stack.pop()
            if s in memo:
                continue
            if s in final:
                memo[s] = True
                continue
            out = succ[s]
            if not done:
                stack.append((s, True))
                stack.extend((t, False) for _, t in out if t not in memo)
                continue
            memo[s] = bool(out) and all(memo[t] for _, t in out)
    return memo


def inexcusable_on_history(goal, env, a, history=None):
    """Literal inexcusable passive responsibility on a history.

    True iff some environment enforcing E and consistent with the history
    meets a play of ``a`` satisfying ``goal`` while some strategy a' that
    dominates ``a`` for ¬goal under E avoids ``goal`` against it. With no
    history this is anticipation of inexcusable passive responsibility.

    a' agrees with ``a`` up to a deviation point u on the play; dominance
    holds iff either ``a`` can never avoid goal from u under E, or a' is
    winning for ¬goal from u under E. The search runs over the product of
    A_{¬goal}, the restricted A_E × A_{E_h}, and the strategy DFA.
    """
    p = a.partition
    g = ltlf.not_(goal)
    gd = automata.to_dfa(g, p)
    ed = checkers.env_dfa(env, p)
    em = checkers.env_model(ed, p)
    if history is not None:
        if not strategies.is_consistent(history, a):
            raise InconsistentHistoryError("history is not consistent with "
                                           "the strategy")
        hd = automata.history_dfa(history, p)
    else:
        hd = automata.universal(automata.Alphabet(p))
    ehd = automata.product(ed, hd)
    ehm = checkers.env_model(ehd, p)
    sd = automata.trim(strategies.strategy_dfa(a))
    smap = _strategy_states(sd, a)
    gfin = gd.final

    # Games over (goal, E) and (goal, E ∧ E_h).
    ge = automata.product(gd, em.restricted)
    geh = automata.product(gd, ehm.restricted)
    win_e = {ge.origin[s] for s in
             games.agent_win_region(games.GameArena(ge, ge.final - {ge.initial}))}
    coop_eh = {geh.origin[s] for s in
               games.weak_region(games.GameArena(geh, geh.final - {geh.initial}))}

    # Strategy products: states (g, e, s) and (g, eh, s).
    se = _Explorer([gd, ed, sd], [None, em.region, None])
    se_final = {s for s in se.succ if s != se.initial
                and s[0] in gfin and s[2] in sd.final}
    scoop_e = _reach_back(se.succ, se_final)
    seh = _Explorer([gd, ehd, sd], [None, ehm.region, None])
    seh_final = {s for s in seh.succ if s != seh.initial
                 and s[0] in gfin and s[2] in sd.final}
    swin_eh = _strategy_win(seh.succ, seh_final)

    letters = list(automata.Alphabet(p).letters())

    def eh_next(gq, ehq, l):
        q = ehd.trans[ehq].get(l)
        if q is None or q not in ehm.region:
            return None
        return (gd.trans[gq][l], q)

    def coop_after(gq, ehq, exclude_y=None):
        for l in letters:
            if exclude_y is not None and p.split(l)[0] == exclude_y:
                continue
            t = eh_next(gq, ehq, l)
            if t is not None and t in coop_eh:
                return True
        return False

    def wins_after(gq, eq, y):
        ok_any = False
        for x in p.env_letters():
            l = p.join(y, x)
            q = ed.trans[eq].get(l)
            if q is None or q not in em.region:
                continue
            ok_any = True
            if (gd.trans[gq][l], q) not in win_e:
                return False
        return ok_any

    imp = {}
    order = []
    stack = [(seh.initial, False)]
    while stack:
        s, done = stack.pop()
        if s in imp:
            continue
        if not done:
            stack.append((s, True))
            stack.extend((t, False) for _, t in seh.succ[s] if t not in imp)
            continue
        gq, ehq, sq = s
        eq = ehd.origin[ehq][0]
        sat = s != seh.initial and gq in gfin
        if sq in sd.final:
            imp[s] = (not sat) and coop_after(gq, ehq)
            order.append(s)
            continue
        y0 = a.out[smap[sq]]
        value = any(imp[t] for _, t in seh.succ[s])
        if not value and (gq, eq, sq) not in scoop_e:
            value = sat or coop_after(gq, ehq, exclude_y=y0)
        if not value and not swin_eh[s]:
            value = sat or any(wins_after(gq, eq, y)
                               for y in p.agent_letters() if y != y0)
        imp[s] = value
        order.append(s)
    return imp[seh.initial], {
        "productStates": len(seh.succ), "envStates": len(em.region),
        "envHistoryStates": len(ehm.region)}


def _strategy_states(sd, a):
    """Transducer state behind each live state of the strategy DFA."""
    mapping = {}
    stack = [(sd.initial, a.initial)]
    while stack:
        d, t = stack.pop()
        if d in mapping:
            continue
        mapping[d] = t
        if t in a.terminating:
            continue
        for x, t2 in a.delta[t].items():
            d2 = sd.trans[d].get(a.partition.join(a.out[t], x))
            if d2 is not None:
                stack.append((d2, t2))
    return mapping


def ipr_attr(goal, env, a, history, reduction="definition"):
    """Inexcusable passive responsibility attribution on a history.

    ``reduction="definition"`` (default) decides the definition directly;
    ``reduction="table"`` returns ¬checkBe(¬goal, E ∧ E_h, a). Both values
    are reported in the diagnostics.
    """
    if reduction not in ("definition", "table"):
        raise ValueError("reduction is 'definition' or 'table'")
    eh = _history_env(env, a, history)
    be = checkers.check_be(ltlf.not_(goal), eh, a)
    t0 = time.perf_counter()
    literal, stats = inexcusable_on_history(goal, env, a, history)
    diag = {"definition": literal, "table": not be.decision,
            "reductionsAgree": literal == (not be.decision),
            "definitionWallTimeMs": (time.perf_counter() - t0) * 1000}
    diag.update(stats)
    decision = literal if reduction == "definition" else not be.decision
    return ResponsibilityReport(
        "IPRAttr", decision, [be],
        _inputs(goal, env, a, history=len(history), reduction=reduction),
        diag)


KINDS = ("pr-ant", "ipr-ant", "pr-attr", "ipr-attr", "ara", "pr-attr-vs-env")
