"""Finite-state agent and environment strategies.

Agent machines read environment letters and output agent letters; they
stop on entering a terminating state. Environment machines read the
agent's current letter and answer with an environment letter, so the
answer at step j may depend on Y_0..Y_j.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import automata
from .automata import Alphabet, Dfa


class StrategyError(ValueError):
    pass


def _index(states):
    states = tuple(states)
    if len(set(states)) != len(states):
        raise StrategyError("duplicate state ids")
    return states, {s: i for i, s in enumerate(states)}


def _as_mask(value, to_mask):
    return value if isinstance(value, int) else to_mask(value)


class AgentTransducer:
    """Terminating agent strategy.

    ``outputs`` maps each non-terminating state to the agent atoms it sets;
    ``transitions`` maps (state, environment letter) to the next state.
    Letters may be given as atom collections or as integer masks.
    """

    def __init__(self, partition, states, initial, outputs, transitions,
                 terminating, name=None):
        self.partition = partition
        self.name = name
        self.states, idx = _index(states)
        if initial not in idx:
            raise StrategyError(f"unknown initial state {initial!r}")
        self.initial = idx[initial]
        self.terminating = frozenset(idx[s] for s in terminating)
        if self.initial in self.terminating:
            raise StrategyError("the initial state may not be terminating "
                                "(plays are nonempty)")
        p = partition
        self.out = [None] * len(self.states)
        self.delta = [dict() for _ in self.states]
        for s, ys in outputs.items():
            if s not in idx:
                raise StrategyError(f"output for unknown state {s!r}")
            self.out[idx[s]] = _as_mask(ys, p.agent_mask)
        for (s, xs), t in transitions.items():
            if s not in idx or t not in idx:
                raise StrategyError(f"transition {s!r} -> {t!r} uses an "
                                    "unknown state")
            self.delta[idx[s]][_as_mask(xs, p.env_mask)] = idx[t]
        for i in range(len(self.states)):
            if i in self.terminating:
                continue
            if self.out[i] is None:
                raise StrategyError(f"state {self.states[i]!r} has no output")
            missing = [x for x in p.env_letters() if x not in self.delta[i]]
            if missing:
                raise StrategyError(
                    f"state {self.states[i]!r} has no transition on "
                    f"{sorted(p.decode_env(missing[0]))}")

    @property
    def n_states(self):
        return len(self.states)

    def respond(self, env_letters):
        """Agent letter after the given environment letters, or None for
        stop."""
        s = self.initial
        for x in env_letters:
            if s in self.terminating:
                return None
            s = self.delta[s][x]
        return None if s in self.terminating else self.out[s]

    def __repr__(self):
        return f"AgentTransducer({self.name or len(self.states)})"


class EnvTransducer:
    """Environment strategy; total on agent letters."""

    def __init__(self, partition, states, initial, outputs, transitions,
                 name=None):
        self.partition = partition
        self.name = name
        self.states, idx = _index(states)
        if initial not in idx:
            raise StrategyError(f"unknown initial state {initial!r}")
        self.initial = idx[initial]
        p = partition
        self.out = [dict() for _ in self.states]
        self.delta = [dict() for _ in self.states]
        for (s, ys), xs in outputs.items():
            self.out[idx[s]][_as_mask(ys, p.agent_mask)] = _as_mask(xs, p.env_mask)
        for (s, ys), t in transitions.items():
            if t not in idx:
                raise StrategyError(f"transition to unknown state {t!r}")
            self.delta[idx[s]][_as_mask(ys, p.agent_mask)] = idx[t]
        for i in range(len(self.states)):
            for y in p.agent_letters():
                if y not in self.out[i] or y not in self.delta[i]:
                    raise StrategyError(
                        f"environment state {self.states[i]!r} is not total "
                        f"on agent letter {sorted(p.decode_agent(y))}")

    @property
    def n_states(self):
        return len(self.states)

    def __repr__(self):
        return f"EnvTransducer({self.name or len(self.states)})"


def make_history(pairs):
    """Normalize (agent atoms, environment atoms) pairs."""
    h = tuple((frozenset(y), frozenset(x)) for y, x in pairs)
    if not h:
        raise ValueError("history must be nonempty")
    return h


def history_word(history, partition):
    p = partition
    return tuple(p.join(p.agent_mask(y), p.env_mask(x)) for y, x in history)


@dataclass(frozen=True)
class StoppingReport:
    ok: bool
    lasso: tuple = ()

    def __bool__(self):
        return self.ok


def validate_stopping(a):
    """OK iff no cycle among non-terminating states is reachable; otherwise
    the report names a lasso (path from the initial state, cycle closed)."""
    colour = {}
    path = []

    def visit(s):
        colour[s] = 1
        path.append(s)
        for t in sorted(set(a.delta[s].values())):
            if t in a.terminating:
                continue
            if colour.get(t) == 1:
                return path[:] + [t]
            if t not in colour:
                found = visit(t)
                if found:
                    return found
        colour[s] = 2
        path.pop()
        return None

    lasso = visit(a.initial)
    if lasso:
        return StoppingReport(False, tuple(a.states[s] for s in lasso))
    return StoppingReport(True)


def _require_stopping(a):
    rep = validate_stopping(a)
    if not rep:
        raise StrategyError("agent strategy does not stop: lasso "
                            + " -> ".join(map(str, rep.lasso)))


def max_play_length(a):
    """Longest play the agent can produce."""
    _require_stopping(a)
    memo = {}

    def depth(s):
        if s in a.terminating:
            return 0
        if s not in memo:
            memo[s] = 1 + max(depth(t) for t in a.delta[s].values())
        return memo[s]

    return depth(a.initial)


def play_word(a, e):
    p = a.partition
    s, t = a.initial, e.initial
    word = []
    for _ in range(a.n_states + 1):
        if s in a.terminating:
            return tuple(word)
        y = a.out[s]
        x = e.out[t][y]
        t = e.delta[t][y]
        s = a.delta[s][x]
        word.append(p.join(y, x))
    raise StrategyError("agent strategy did not stop")


def play(a, e):
    """The play of a against e as a trace of atom sets."""
    return automata.decode_word(play_word(a, e), a.partition)


def is_consistent(history, a, full=False):
    """Agent letters of the history are a's answers to the preceding
    environment letters. With ``full`` the agent must also stop right after
    the history."""
    p = a.partition
    s = a.initial
    for ys, xs in history:
        if s in a.terminating or a.out[s] != p.agent_mask(ys):
            return False
        s = a.delta[s][p.env_mask(xs)]
    return (s in a.terminating) if full else True


def is_consistent_env(history, e):
    p = e.partition
    t = e.initial
    for ys, xs in history:
        y = p.agent_mask(ys)
        if e.out[t][y] != p.env_mask(xs):
            return False
        t = e.delta[t][y]
    return True


def strategy_dfa(a):
    """Complete plays of a: agent letters forced, environment letters free,
    acceptance exactly where the agent stops. State n is a rejecting sink."""
    _require_stopping(a)
    p = a.partition
    alphabet = Alphabet(p)
    sink = a.n_states
    trans = []
    for s in range(a.n_states):
        m = {l: sink for l in alphabet.letters()}
        if s not in a.terminating:
            for x, t in a.delta[s].items():
                m[p.join(a.out[s], x)] = t
        trans.append(m)
    trans.append({l: sink for l in alphabet.letters()})
    d = Dfa(alphabet, a.n_states + 1, a.initial, a.terminating, trans)
    return automata._relabel(d)


def env_transducer_dfa(e):
    """Nonempty traces consistent with e (every prefix is accepted)."""
    p = e.partition
    alphabet = Alphabet(p)
    n = e.n_states
    # 0: fresh start, 1 + t: machine state t, n + 1: sink
    sink = n + 1
    rows = []
    for t in range(n):
        m = {l: sink for l in alphabet.letters()}
        for y in p.agent_letters():
            m[p.join(y, e.out[t][y])] = 1 + e.delta[t][y]
        rows.append(m)
    trans = [dict(rows[e.initial])] + rows + [{l: sink for l in alphabet.letters()}]
    final = set(range(1, n + 1))
    return automata._relabel(Dfa(alphabet, n + 2, 0, final, trans))


def env_enforces(e, spec):
    """Whether every nonempty trace consistent with e keeps spec true on
    every prefix. ``spec`` is a formula or a DFA."""
    d = spec if isinstance(spec, Dfa) else automata.to_dfa(spec, e.partition)
    p = e.partition
    start = (e.initial, d.initial)
    seen = {start}
    stack = [start]
    while stack:
        t, q = stack.pop()
        for y in p.agent_letters():
            q2 = d.trans[q].get(p.join(y, e.out[t][y]))
            if q2 is None or q2 not in d.final:
                return False
            nxt = (e.delta[t][y], q2)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def constant_env(partition, env_atoms=()):
    """Environment that always plays the same letter."""
    x = partition.env_mask(env_atoms)
    ys = list(partition.agent_letters())
    return EnvTransducer(partition, ["e"], "e",
                         {("e", y): x for y in ys}, {("e", y): "e" for y in ys})


def sequence_env(partition, letters, then=()):
    """Environment playing the given environment letters in order, then
    ``then`` forever, whatever the agent does."""
    p = partition
    ys = list(p.agent_letters())
    n = len(letters)
    states = list(range(n + 1))
    outputs, trans = {}, {}
    for i in states:
        xs = letters[i] if i < n else then
        for y in ys:
            outputs[(i, y)] = p.env_mask(xs)
            trans[(i, y)] = min(i + 1, n)
    return EnvTransducer(p, states, 0, outputs, trans)


def sequence_agent(partition, letters):
    """Agent playing the given agent letters in order, then stopping."""
    p = partition
    n = len(letters)
    if n == 0:
        raise StrategyError("plays are nonempty")
    outputs = {i: p.agent_mask(letters[i]) for i in range(n)}
    trans = {(i, x): i + 1 for i in range(n) for x in p.env_letters()}
    return AgentTransducer(p, range(n + 1), 0, outputs, trans, [n])
