"""Decision procedures for strategy properties.

Every check accepts the environment specification either as a formula or
as a DFA (the latter is how E ∧ E_h reaches the checkers). Witnesses are
re-verified against the trace semantics before a verdict is returned.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import automata, games, ltlf, strategies
from .automata import Alphabet, Dfa


class NotEnforceableError(ValueError):
    """The environment specification cannot be enforced."""


class InvariantError(RuntimeError):
    """A witness failed re-verification: an internal construction is wrong."""


@dataclass
class Verdict:
    kind: str
    decision: bool
    witness: dict = None
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self):
        return self.decision

    def to_json(self):
        return {"kind": self.kind, "decision": self.decision,
                "witness": self.witness, "diagnostics": self.diagnostics}

    @classmethod
    def from_json(cls, data):
        return cls(data["kind"], data["decision"], data.get("witness"),
                   data.get("diagnostics") or {})


def trace_json(word, partition):
    return [sorted(s) for s in automata.decode_word(word, partition)]


# ------------------------------------------------------------ environments

@dataclass(frozen=True)
class EnvModel:
    """A specification DFA together with its environment winning region."""
    dfa: Dfa
    region: frozenset
    restricted: Dfa

    @property
    def partition(self):
        return self.dfa.alphabet.partition

    def stays_inside(self, word):
        """Every nonempty prefix of word ends inside the region."""
        s = self.dfa.initial
        for l in word:
            s = self.dfa.trans[s].get(l)
            if s is None or s not in self.region:
                return False
        return True


@lru_cache(maxsize=256)
def _model(dfa):
    region = games.env_win_region(dfa)
    if not games.env_can_start(dfa, region):
        raise NotEnforceableError("the environment specification is not "
                                  "enforceable")
    restricted = automata.restrict(dfa, region | {dfa.initial})
    return EnvModel(dfa, region, restricted)


def env_dfa(env, partition):
    if isinstance(env, Dfa):
        if env.alphabet != Alphabet(partition):
            raise automata.AlphabetMismatch("environment DFA over another "
                                            "alphabet")
        return env
    ltlf.check_atoms(env, partition)
    return automata.to_dfa(env, partition)


def env_model(env, partition):
    return _model(env_dfa(env, partition))


def check_env_enforceable(env, partition):
    d = env_dfa(env, partition)
    return games.env_can_start(d, games.env_win_region(d))


@lru_cache(maxsize=512)
def _nfa(f, partition):
    return automata.to_nfa(f, partition)


def _goal_nfa(f, partition):
    ltlf.check_atoms(f, partition)
    return _nfa(f, partition)


def _sizes(**autos):
    return {k: a.n_states for k, a in autos.items()}


def _require(ok, what):
    if not ok:
        raise InvariantError(f"witness re-verification failed: {what}")


# ------------------------------------------------------------- checkers

def exists_weak(goal, env, partition):
    """Is there a strategy satisfying goal against some enforcing
    environment?"""
    t0 = time.perf_counter()
    model = env_model(env, partition)
    n = _goal_nfa(goal, partition)
    prod = automata.product(n, model.restricted)
    word = automata.non_empty(prod)
    witness = None
    if word is not None:
        _require(ltlf.evaluate(goal, automata.decode_word(word, partition))
                 and model.stays_inside(word), "exists-weak trace")
        witness = {"trace": trace_json(word, partition)}
    return Verdict("exists-weak", word is not None, witness, {
        "automatonSizes": _sizes(goal=n, env=model.dfa, product=prod),
        "regionSizes": {"env": len(model.region)},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})


def _strategy_product(f, env, a):
    p = a.partition
    model = env_model(env, p)
    n = _goal_nfa(f, p)
    sd = strategies.strategy_dfa(a)
    prod = automata.product_all(n, model.restricted, sd)
    return model, n, sd, prod


def _check_play_witness(word, f, model, a):
    p = a.partition
    trace = automata.decode_word(word, p)
    hist = [(t & set(p.agent), t & set(p.env)) for t in trace]
    _require(ltlf.evaluate(f, trace), "trace does not satisfy the formula")
    _require(model.stays_inside(word), "trace leaves the environment region")
    _require(strategies.is_consistent(hist, a, full=True),
             "trace is not a play of the strategy")


def check_weak(goal, env, a):
    """Does a satisfy goal against some enforcing environment?"""
    t0 = time.perf_counter()
    model, n, sd, prod = _strategy_product(goal, env, a)
    word = automata.non_empty(prod)
    witness = None
    if word is not None:
        _check_play_witness(word, goal, model, a)
        witness = {"play": trace_json(word, a.partition)}
    return Verdict("weak", word is not None, witness, {
        "automatonSizes": _sizes(goal=n, env=model.dfa, strategy=sd,
                                 product=prod),
        "regionSizes": {"env": len(model.region)},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})


def check_win(goal, env, a):
    """Does a satisfy goal against every enforcing environment?"""
    t0 = time.perf_counter()
    neg = ltlf.not_(goal)
    model, n, sd, prod = _strategy_product(neg, env, a)
    word = automata.non_empty(prod)
    witness = None
    if word is not None:
        _check_play_witness(word, neg, model, a)
        witness = {"play": trace_json(word, a.partition)}
    return Verdict("win", word is None, witness, {
        "automatonSizes": _sizes(goal=n, env=model.dfa, strategy=sd,
                                 product=prod),
        "regionSizes": {"env": len(model.region)},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})


def _same_env_until_divergence(left, right, partition):
    for la, lb in zip(left, right):
        (ya, xa), (yb, xb) = partition.split(la), partition.split(lb)
        if ya != yb:
            return True
        if xa != xb:
            return False
    return True


def check_dom(goal, env, a):
    """Is a dominant for goal: no strategy succeeds against an enforcing
    environment against which a fails?"""
    t0 = time.perf_counter()
    p = a.partition
    pp = p.primed()
    model = env_model(env, p)
    neg_nfa = _goal_nfa(ltlf.not_(goal), p)
    sd = strategies.strategy_dfa(a)
    left = automata.product_all(neg_nfa, model.restricted, sd)
    primed_goal = ltlf.prime_copy(goal, p)
    primed_env = automata.rename_alphabet(model.restricted, Alphabet(pp))
    right = automata.product(_nfa(primed_goal, pp), primed_env)
    joint = automata.product_all(
        automata.glue_dfa(p),
        automata.as_nfa(automata.lift_to_joint(left, "unprimed", p)),
        automata.as_nfa(automata.lift_to_joint(right, "primed", p)))
    word = automata.non_empty(joint)
    witness = None
    if word is not None:
        lose, win = automata.unpad_pair(word, p)
        _check_play_witness(lose, ltlf.not_(goal), model, a)
        _require(lose and win, "empty track in a dominance witness")
        _require(ltlf.evaluate(goal, automata.decode_word(win, p))
                 and model.stays_inside(win), "alternative play")
        _require(_same_env_until_divergence(lose, win, p),
                 "plays disagree on the environment before divergence")
        witness = {"play": trace_json(lose, p),
                   "alternative": trace_json(win, p)}
    return Verdict("dom", word is None, witness, {
        "automatonSizes": _sizes(env=model.dfa, strategy=sd, left=left,
                                 right=right, joint=joint),
        "regionSizes": {"env": len(model.region)},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})


# ----------------------------------------------------------- best-effort

def goal_game(goal, env, partition):
    """G = A_goal × Restr(A_E) with goal states where the goal component
    accepts. The initial state (the empty word) is never a goal."""
    model = env_model(env, partition)
    ltlf.check_atoms(goal, partition)
    g = automata.product(automata.to_dfa(goal, partition), model.restricted)
    return games.GameArena(g, g.final - {g.initial}), model


def _backward_reach(d, targets):
    back = [[] for _ in range(d.n_states)]
    for s in range(d.n_states):
        for _, t in d.edges(s):
            back[t].append(s)
    seen = set(targets)
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in back[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return seen


def _path_to(d, target):
    parent = {d.initial: None}
    queue = deque([d.initial])
    while queue:
        s = queue.popleft()
        if s == target:
            word = []
            while parent[s] is not None:
                s, l = parent[s]
                word.append(l)
            return tuple(reversed(word))
        for l, t in sorted(d.edges(s)):
            if t not in parent:
                parent[t] = (s, l)
                queue.append(t)
    return None


def check_be(goal, env, a):
    """Is a best-effort for goal: from every history it produces, does it
    achieve the best value available there?"""
    t0 = time.perf_counter()
    p = a.partition
    arena, model = goal_game(goal, env, p)
    g = arena.dfa
    win = games.agent_win_region(arena)
    weak = games.weak_region(arena)
    sd = automata.trim(strategies.strategy_dfa(a))
    gp = automata.product(g, sd)
    final = gp.final - {gp.initial}
    reach = gp.reachable()
    live = _backward_reach(gp, final)
    dead = {s for s in reach if s not in final and s not in live}
    bad_state, reason = None, None
    # states from which a dead state is reachable
    to_dead = _backward_reach(gp, dead) if dead else set()
    for s in sorted(reach):
        first = gp.origin[s][0]
        if first in win and s in to_dead:
            bad_state, reason = s, "winning history, strategy may fail"
            break
        if first in weak and first not in win and s not in live:
            bad_state, reason = s, "pending history, strategy cannot succeed"
            break
    witness = None
    if bad_state is not None:
        path = _path_to(gp, bad_state)
        _require(path is not None and model.stays_inside(path),
                 "best-effort witness path")
        hist = [(p.decode_agent(p.split(l)[0]), p.decode_env(p.split(l)[1]))
                for l in path]
        _require(strategies.is_consistent(hist, a), "history not of strategy")
        witness = {"history": trace_json(path, p), "reason": reason,
                   "value": 1 if gp.origin[bad_state][0] in win else 0}
    return Verdict("be", bad_state is None, witness, {
        "automatonSizes": _sizes(game=g, strategy=sd, product=gp),
        "regionSizes": {"env": len(model.region), "win": len(win),
                        "weak": len(weak)},
        "wallTimeMs": (time.perf_counter() - t0) * 1000})


CHECKS = {"win": check_win, "dom": check_dom, "be": check_be,
          "weak": check_weak}
