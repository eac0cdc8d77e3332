"""Fixpoint solvers for DFA games.

In every step the agent commits to its letter Y first and the environment
answers with X; the pair forms one letter of the arena. A missing
transition means the environment has no legal answer, which counts in the
agent's favour.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GameArena:
    dfa: object
    goal: frozenset = None

    def __post_init__(self):
        if self.goal is None:
            object.__setattr__(self, "goal", self.dfa.final)
        object.__setattr__(self, "goal", frozenset(self.goal))


def _arena(g):
    return g if isinstance(g, GameArena) else GameArena(g)


def _moves(d):
    p = d.alphabet.partition
    ys = list(p.agent_letters())
    xs = list(p.env_letters())
    return [[p.join(y, x) for x in xs] for y in ys]


def env_win_region(d):
    """States from which the environment can keep every visited state
    accepting forever (greatest fixpoint)."""
    moves = _moves(d)
    region = set(d.final)
    changed = True
    while changed:
        changed = False
        for s in list(region):
            m = d.trans[s]
            for row in moves:
                if not any(m.get(l) in region for l in row):
                    region.discard(s)
                    changed = True
                    break
    return frozenset(region)


def env_can_start(d, region=None):
    """Whether the environment can answer every first agent move inside
    the region. The initial state itself stands for the empty word and is
    not judged."""
    if region is None:
        region = env_win_region(d)
    m = d.trans[d.initial]
    return all(any(m.get(l) in region for l in row) for row in _moves(d))


def agent_win_ranks(g):
    """Least fixpoint: goal, or some agent move all of whose answers win.

    Returns state -> number of rounds the agent needs (0 on goal states).
    """
    g = _arena(g)
    d, moves = g.dfa, _moves(g.dfa)
    rank = {s: 0 for s in g.goal}
    k = 0
    while True:
        k += 1
        new = []
        for s in range(d.n_states):
            if s in rank:
                continue
            m = d.trans[s]
            for row in moves:
                if all(m.get(l) is None or m[l] in rank for l in row):
                    new.append(s)
                    break
        if not new:
            return rank
        for s in new:
            rank[s] = k


def weak_ranks(g):
    """Least fixpoint: goal, or some letter leading into the region.

    An agent move the environment cannot answer at all is a vacuous win,
    as in agent_win_ranks, so such states get rank 1.
    """
    g = _arena(g)
    d, moves = g.dfa, _moves(g.dfa)
    rank = {s: 0 for s in g.goal}
    k = 0
    while True:
        k += 1
        new = [s for s in range(d.n_states) if s not in rank
               and (any(t in rank for t in d.trans[s].values())
                    or (k == 1 and any(all(l not in d.trans[s] for l in row)
                                       for row in moves)))]
        if not new:
            return rank
        for s in new:
            rank[s] = k


def agent_win_region(g):
    return frozenset(agent_win_ranks(g))


def weak_region(g):
    return frozenset(weak_ranks(g))


def env_force_region(g):
    """States from which the environment keeps the play out of the goal
    forever (greatest fixpoint); the dual of the agent winning region."""
    g = _arena(g)
    d, moves = g.dfa, _moves(g.dfa)
    region = set(range(d.n_states)) - g.goal
    changed = True
    while changed:
        changed = False
        for s in list(region):
            m = d.trans[s]
            for row in moves:
                if not any(m.get(l) in region for l in row):
                    region.discard(s)
                    changed = True
                    break
    return frozenset(region)


def state_values(g):
    """+1 on the winning region, 0 on the rest of the weak region, -1
    elsewhere."""
    g = _arena(g)
    win, weak = agent_win_region(g), weak_region(g)
    logger.debug("regions: win=%d weak=%d", len(win), len(weak))
    return {s: 1 if s in win else 0 if s in weak else -1
            for s in range(g.dfa.n_states)}
