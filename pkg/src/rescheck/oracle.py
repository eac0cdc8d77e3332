"""Bounded reference implementation of the strategy notions.

Two layers:

* ``BoundedStrategySpace`` enumerates every agent decision tree and every
  environment tree up to a horizon and evaluates the definitions by
  literal quantification over them (numpy vectors over environment
  trees). Only usable for tiny horizons.
* ``WordOracle`` evaluates the same notions by recursion over finite
  words with ``ltlf.evaluate`` as the only semantics. Agent deviations are
  explored one branching point at a time, which is sound because an
  environment strategy's behaviour on distinct agent branches is
  independent. It scales to the horizons needed for the equivalence suite
  and is itself cross-checked against the brute-force layer.

Environment validity of a word: every nonempty prefix satisfies E, is
consistent with the history (if any), and its A_E state lies in the
environment winning region. The region check closes the horizon.
"""
from __future__ import annotations

import random

import numpy as np

from . import automata, checkers, games, ltlf, strategies
from .strategies import AgentTransducer, EnvTransducer


class HorizonExceeded(ValueError):
    pass


STOP = -1


# ----------------------------------------------------------- progression
#
# Residual formulas serve only as memo keys: two words with the same
# residuals have the same futures, so their values coincide. Satisfaction
# itself is always taken from ltlf.evaluate.

_T, _F = ("T",), ("F",)


def _nnf(f, pos=True):
    k = f.kind
    if k == ltlf.ATOM:
        return ("lit", f.name, pos)
    if k == ltlf.TRUE:
        return _T if pos else _F
    if k == ltlf.FALSE:
        return _F if pos else _T
    if k == ltlf.NOT:
        return _nnf(f.args[0], not pos)
    if k == ltlf.IMPLIES:
        a, b = f.args
        return (_mk("or", [_nnf(a, False), _nnf(b, True)]) if pos
                else _mk("and", [_nnf(a, True), _nnf(b, False)]))
    if k in (ltlf.AND, ltlf.OR):
        op = "and" if (k == ltlf.AND) == pos else "or"
        return _mk(op, [_nnf(a, pos) for a in f.args])
    if k in (ltlf.NEXT, ltlf.WNEXT):
        strong = (k == ltlf.NEXT) == pos
        return ("X" if strong else "WX", _nnf(f.args[0], pos))
    if k == ltlf.EVENTUALLY:
        return _nnf(ltlf.eventually(f.args[0]), pos)
    if k == ltlf.ALWAYS:
        return _nnf(ltlf.always(f.args[0]), pos)
    a, b = f.args  # until
    return ("U", _nnf(a), _nnf(b)) if pos else ("R", _nnf(a, False),
                                                _nnf(b, False))


def _mk(op, parts):
    unit, zero = (_T, _F) if op == "and" else (_F, _T)
    flat = set()
    for q in parts:
        if q == zero:
            return zero
        if q == unit:
            continue
        if q[0] == op:
            flat |= q[1]
        else:
            flat.add(q)
    if not flat:
        return unit
    if len(flat) == 1:
        return next(iter(flat))
    return (op, frozenset(flat))


def _progress(r, letter, last):
    """Residual after reading ``letter``; with ``last`` the truth value
    (as _T/_F) when the trace ends at this letter."""
    k = r[0]
    if k in ("T", "F"):
        return r
    if k == "lit":
        return _T if (r[1] in letter) == r[2] else _F
    if k in ("and", "or"):
        return _mk(k, [_progress(q, letter, last) for q in r[1]])
    if k == "X":
        return _F if last else r[1]
    if k == "WX":
        return _T if last else r[1]
    a, b = r[1], r[2]
    pb = _progress(b, letter, last)
    if last:
        return pb
    pa = _progress(a, letter, last)
    if k == "U":
        return _mk("or", [pb, _mk("and", [pa, r])])
    return _mk("and", [pb, _mk("or", [pa, r])])


# ----------------------------------------------------------------- words

class _Validity:
    """Word validity for E, optionally constrained by a history."""

    def __init__(self, env, partition, history=None):
        self.env = env
        self.p = partition
        self.dfa = automata.to_dfa(env, partition)
        self.region = games.env_win_region(self.dfa)
        self.hist = None
        if history is not None:
            self.hist = [(partition.agent_mask(y), partition.env_mask(x))
                         for y, x in history]
        self._memo = {(): True}
        self._state = {(): self.dfa.initial}
        self.h_ok = self.hist is None or all(
            self._plain(self._hword(k)) for k in range(1, len(self.hist) + 1))

    def _hword(self, k):
        return tuple(self.p.join(y, x) for y, x in self.hist[:k])

    def _plain(self, word):
        """Every prefix satisfies E and stays in the region (no history)."""
        s = self.dfa.initial
        for i, l in enumerate(word):
            s = self.dfa.trans[s].get(l)
            if s is None or s not in self.region:
                return False
            if not ltlf.evaluate(self.env, automata.decode_word(word[:i + 1],
                                                                self.p)):
                return False
        return True

    def __call__(self, word):
        """Every nonempty prefix of ``word`` is valid."""
        v = self._memo.get(word)
        if v is not None:
            return v
        if not self(word[:-1]):
            self._memo[word] = False
            return False
        p = self.p
        s = self.dfa.trans[self._state[word[:-1]]].get(word[-1])
        ok = (s is not None and s in self.region and
              ltlf.evaluate(self.env, automata.decode_word(word, p)))
        if ok and self.hist is not None:
            k = len(word) - 1
            follows = all(p.split(word[i])[0] == self.hist[i][0]
                          for i in range(min(k + 1, len(self.hist))))
            if follows and k < len(self.hist):
                ok = p.split(word[k])[1] == self.hist[k][1]
                # following the history further must stay possible
                ok = ok and self.h_ok
        self._memo[word] = ok
        if ok:
            self._state[word] = s
        return ok

    def can_start(self):
        return all(any(self(( self.p.join(y, x),)) for x in self.p.env_letters())
                   for y in self.p.agent_letters())


class WordOracle:
    """Reference semantics for one (goal, E, history) over words up to a
    horizon.

    ``goal`` is the formula the agent wants to satisfy. Values are
    memoized on (length, goal residual, satisfaction, E residual, history
    position, strategy state), never on automaton states.
    """

    def __init__(self, goal, env, partition, horizon, history=None):
        self.goal = goal
        self.p = partition
        self.H = horizon
        self.E = _Validity(env, partition)
        self.C = _Validity(env, partition, history) if history else self.E
        if history is not None and len(history) > horizon:
            raise HorizonExceeded("history longer than the horizon")
        self.hist = self.C.hist
        self._info = {(): (_nnf(goal), False, _nnf(env))}
        self._memo = {}

    def sat(self, u):
        return bool(u) and self._node(u)[1]

    def _node(self, u):
        v = self._info.get(u)
        if v is None:
            rg, _, re = self._node(u[:-1])
            letter = self.p.decode(u[-1])
            sat = ltlf.evaluate(self.goal, automata.decode_word(u, self.p))
            v = (_progress(rg, letter, False), sat, _progress(re, letter, False))
            self._info[u] = v
        return v

    def _hpos(self, u):
        if self.hist is None or len(u) >= len(self.hist):
            return -1
        for i, l in enumerate(u):
            if self.p.split(l)[0] != self.hist[i][0]:
                return -1
        return len(u)

    def key(self, u, c):
        rg, sat, re = self._node(u)
        return (len(u), rg, sat, re, self._hpos(u) if c == "C" else None)

    def moves(self, u, valid, y=None):
        ys = self.p.agent_letters() if y is None else (y,)
        for yy in ys:
            row = []
            for x in self.p.env_letters():
                w = u + (self.p.join(yy, x),)
                if valid(w):
                    row.append(w)
            yield yy, row

    def _cached(self, key, fn):
        v = self._memo.get(key)
        if v is None:
            v = fn()
            self._memo[key] = v
        return v

    # strategy-free values ------------------------------------------------
    def win(self, u, c="E"):
        def f():
            if self.sat(u):
                return True
            if len(u) >= self.H:
                return False
            valid = self.E if c == "E" else self.C
            return any(row and all(self.win(w, c) for w in row)
                       for _, row in self.moves(u, valid))
        return self._cached(("win", c, self.key(u, c)), f)

    def coop(self, u, c="E"):
        def f():
            if self.sat(u):
                return True
            if len(u) >= self.H:
                return False
            valid = self.E if c == "E" else self.C
            return any(self.coop(w, c) for _, row in self.moves(u, valid)
                       for w in row)
        return self._cached(("coop", c, self.key(u, c)), f)

    # strategy values ------------------------------------------------------
    def _state(self, a, u):
        """Transducer state after u, or None once it has stopped."""
        s = a.initial
        for l in u:
            if s in a.terminating:
                return None
            s = a.delta[s][self.p.split(l)[1]]
        return s

    def _response(self, a, u):
        s = self._state(a, u)
        return None if s is None or s in a.terminating else a.out[s]

    def _skey(self, name, a, u, c):
        return (name, a, c, self._state(a, u), self.key(u, c))

    def swin(self, a, u, c="E"):
        def f():
            y = self._response(a, u)
            if y is None:
                return self.sat(u)
            valid = self.E if c == "E" else self.C
            _, row = next(self.moves(u, valid, y))
            return all(self.swin(a, w, c) for w in row)
        return self._cached(self._skey("swin", a, u, c), f)

    def scoop(self, a, u, c="E"):
        def f():
            y = self._response(a, u)
            if y is None:
                return self.sat(u)
            valid = self.E if c == "E" else self.C
            _, row = next(self.moves(u, valid, y))
            return any(self.scoop(a, w, c) for w in row)
        return self._cached(self._skey("scoop", a, u, c), f)

    def _coop_after(self, u, c, exclude=None):
        valid = self.E if c == "E" else self.C
        for y, row in self.moves(u, valid):
            if y == exclude:
                continue
            if any(self.coop(w, c) for w in row):
                return True
        return False

    def ndom(self, a, u=()):
        """Some strategy succeeds against an environment (under C) against
        which a fails, deviating from a at or after u."""
        def f():
            y0 = self._response(a, u)
            if y0 is None:
                return not self.sat(u) and self._coop_after(u, "C")
            _, row = next(self.moves(u, self.C, y0))
            if any(self.ndom(a, w) for w in row):
                return True
            return (not self.swin(a, u, "C")
                    and (self.sat(u) or self._coop_after(u, "C", y0)))
        return self._cached(self._skey("ndom", a, u, "C"), f)

    def imp(self, a, u=()):
        """Some strategy dominating a under E succeeds against an
        environment (valid under C) against which a fails."""
        def f():
            y0 = self._response(a, u)
            if y0 is None:
                return not self.sat(u) and self._coop_after(u, "C")
            _, row = next(self.moves(u, self.C, y0))
            if any(self.imp(a, w) for w in row):
                return True
            if not self.scoop(a, u, "E"):
                if self.sat(u) or self._coop_after(u, "C", y0):
                    return True
            if not self.swin(a, u, "C"):
                if self.sat(u) or self._wins_after(u, y0):
                    return True
            return False
        return self._cached(self._skey("imp", a, u, "C"), f)

    def _wins_after(self, u, y0):
        for y, row in self.moves(u, self.E):
            if y != y0 and row and all(self.win(w, "E") for w in row):
                return True
        return False

    # concrete environment --------------------------------------------------
    def reach(self, e, u, t):
        """Some agent continuation of u (possibly none) meets the goal
        against e, which is in machine state t."""
        def f():
            if self.sat(u):
                return True
            if len(u) >= self.H:
                return False
            return any(self.reach(e, u + (self.p.join(y, e.out[t][y]),),
                                  e.delta[t][y])
                       for y in self.p.agent_letters())
        rg, sat, _ = self._node(u)
        return self._cached(("reach", e, t, len(u), rg, sat), f)

    def reach_vs_env(self, e, u, t, exclude=None):
        """Some continuation of u by at least one letter, not starting with
        ``exclude``, meets the goal against e."""
        if len(u) >= self.H:
            return False
        return any(self.reach(e, u + (self.p.join(y, e.out[t][y]),),
                              e.delta[t][y])
                   for y in self.p.agent_letters() if y != exclude)

    def imp_vs_env(self, a, e):
        """Some strategy dominating a under E succeeds against e while a
        fails against e."""
        word = strategies.play_word(a, e)
        if self.sat(word):
            return False
        t = e.initial
        for i in range(len(word) + 1):
            u = word[:i]
            y0 = self._response(a, u)
            if y0 is None:
                return self.reach_vs_env(e, u, t)
            if not self.scoop(a, u, "E"):
                if self.sat(u) or self.reach_vs_env(e, u, t, exclude=y0):
                    return True
            if self.sat(u) or self._wins_after(u, y0):
                return True
            t = e.delta[t][y0]
        return False


# ------------------------------------------------------------ horizons

def _ranks(goal, dfa, partition):
    model = checkers.env_model(dfa, partition)
    g = automata.product(automata.to_dfa(goal, partition), model.restricted)
    arena = games.GameArena(g, g.final - {g.initial})
    r1 = games.agent_win_ranks(arena)
    r2 = games.weak_ranks(arena)
    return max(list(r1.values()) + list(r2.values()) + [0])


def sufficient_horizon(goal, env, a=None, history=None, env_machine=None):
    """Horizon used for universal claims of the oracle.

    The longest own play (or history), one deviating step, and the largest
    finite attractor or reachability rank of the goal and its negation in
    the relevant games. For a concrete environment machine the product of
    A_goal (and A_¬goal) with the machine bounds the search instead.
    """
    p = a.partition if a is not None else None
    if p is None:
        raise ValueError("a strategy is needed to fix the partition")
    base = strategies.max_play_length(a)
    if history is not None:
        base = max(base, len(history))
    dfas = [automata.to_dfa(env, p)]
    if history is not None:
        dfas.append(automata.product(dfas[0], automata.history_dfa(history, p)))
    rank = 0
    for d in dfas:
        for f in (goal, ltlf.not_(goal)):
            rank = max(rank, _ranks(f, d, p))
    h = base + 1 + rank
    if env_machine is not None:
        ed = strategies.env_transducer_dfa(env_machine)
        for f in (goal, ltlf.not_(goal)):
            prod = automata.product(automata.to_dfa(f, p), ed)
            ranks = games.weak_ranks(
                games.GameArena(prod, prod.final - {prod.initial}))
            h = max(h, base + 1 + max(ranks.values(), default=0))
    return h


# ------------------------------------------------------ oracle verdicts

def _oracle(goal, env, a, horizon, history=None):
    if strategies.max_play_length(a) > horizon:
        raise HorizonExceeded("strategy plays exceed the horizon")
    return WordOracle(goal, env, a.partition, horizon, history)


def oracle_check(kind, goal, env, a, horizon=None):
    """Reference value of win/weak/dom/be."""
    if horizon is None:
        horizon = sufficient_horizon(goal, env, a)
    wo = _oracle(goal, env, a, horizon)
    if kind == "win":
        return wo.swin(a, ())
    if kind == "weak":
        return wo.scoop(a, ())
    if kind == "dom":
        return not wo.ndom(a)
    if kind == "be":
        return not wo.imp(a)
    raise ValueError(f"unknown check {kind!r}")


def oracle_exists_weak(goal, env, partition, horizon):
    return WordOracle(goal, env, partition, horizon).coop(())


def oracle_responsibility(kind, goal, env, a, extra=None, horizon=None):
    """Reference value of a responsibility verdict.

    ``extra`` is the history for pr-attr/ipr-attr and the environment
    machine for pr-attr-vs-env/ipr-attr-vs-env.
    """
    neg = ltlf.not_(goal)
    history = extra if kind in ("pr-attr", "ipr-attr") else None
    machine = extra if kind.endswith("vs-env") else None
    if horizon is None:
        horizon = sufficient_horizon(goal, env, a, history, machine)
    if kind == "pr-ant":
        return _oracle(neg, env, a, horizon).ndom(a)
    if kind == "ipr-ant":
        return _oracle(neg, env, a, horizon).imp(a)
    if kind in ("pr-attr", "ipr-attr"):
        if not strategies.is_consistent(history, a):
            raise ValueError("history is not consistent with the strategy")
        wo = _oracle(neg, env, a, horizon, history)
        if not wo.C.can_start():
            raise checkers.NotEnforceableError("E ∧ E_h is not enforceable")
        return wo.ndom(a) if kind == "pr-attr" else wo.imp(a)
    if kind == "ara":
        wins = _oracle(goal, env, a, horizon).swin(a, ())
        return wins and oracle_exists_weak(neg, env, a.partition, horizon)
    if kind == "pr-attr-vs-env":
        wo = _oracle(neg, env, a, horizon)
        word = strategies.play_word(a, machine)
        return (not wo.sat(word)) and wo.reach(machine, (), machine.initial)
    if kind == "ipr-attr-vs-env":
        return _oracle(neg, env, a, horizon).imp_vs_env(a, machine)
    raise ValueError(f"unknown responsibility kind {kind!r}")


# ------------------------------------------------- literal enumeration

def _seq_offsets(base, depth):
    """Offsets so that sequences of length k over ``base`` symbols get
    indices offset[k] + code."""
    off, total = [], 0
    for k in range(depth + 1):
        off.append(total)
        total += base ** k
    return off, total


class BoundedStrategySpace:
    """Every agent tree and every environment tree up to horizon H.

    Agent trees map environment-letter histories of length < H to an
    agent letter or STOP; they never stop at the root and always stop at
    depth H. Environment trees map agent-letter sequences of length 1..H
    to an environment letter.
    """

    MAX_ENV_TREES = 1 << 20

    def __init__(self, partition, horizon):
        self.p = partition
        self.H = horizon
        self.ny = 1 << partition.n_agent
        self.nx = 1 << partition.n_env
        self.y_off, self.n_yseq = _seq_offsets(self.ny, horizon)
        self.x_off, self.n_xhist = _seq_offsets(self.nx, horizon)
        n_slots = self.n_yseq - 1
        if self.nx ** n_slots > self.MAX_ENV_TREES:
            raise HorizonExceeded("environment tree space too large")
        self._agent = None
        self._env = None

    # agent trees -----------------------------------------------------------
    def _tree_count(self, depth, root):
        n = 0 if root else 1
        if depth < self.H:
            n += self.ny * self._tree_count(depth + 1, False) ** self.nx
        return n

    def agent_tree_count(self):
        return self._tree_count(0, True)

    def agent_tables(self):
        """Agent trees as int arrays indexed by x_off[k] + xhist code
        (STOP where the tree stops)."""
        if self._agent is None:
            out = []
            self._fill(0, 0, True, np.full(self.n_xhist, STOP, dtype=np.int64),
                       out)
            self._agent = out
        return self._agent

    def _fill(self, depth, code, root, table, out, then=None):
        # enumerate choices for node (depth, code); ``then`` continues with
        # the remaining open nodes
        then = then or []
        choices = []
        if not root:
            choices.append(None)
        if depth < self.H:
            choices.extend(range(self.ny))
        for c in choices:
            t = table.copy()
            idx = self.x_off[depth] + code
            t[idx] = STOP if c is None else c
            pending = list(then)
            if c is not None:
                pending = [(depth + 1, code * self.nx + x)
                           for x in range(self.nx)] + pending
            if pending:
                (d2, c2), rest = pending[0], pending[1:]
                self._fill(d2, c2, False, t, out, rest)
            else:
                out.append(t)

    def table_of(self, a):
        """Table of a transducer (raises when its plays exceed H)."""
        if strategies.max_play_length(a) > self.H:
            raise HorizonExceeded("strategy plays exceed the horizon")
        t = np.full(self.n_xhist, STOP, dtype=np.int64)
        for k in range(self.H):
            for code in range(self.nx ** k):
                xs = [(code // self.nx ** (k - 1 - i)) % self.nx for i in range(k)]
                y = a.respond(xs)
                t[self.x_off[k] + code] = STOP if y is None else y
        return t

    def tree_to_transducer(self, table, name=None):
        """The agent tree as a terminating transducer (one state per node)."""
        states, outputs, trans, term = [], {}, {}, []
        for k in range(self.H + 1):
            for code in range(self.nx ** k):
                idx = self.x_off[k] + code
                if k > 0:
                    parent = self.x_off[k - 1] + code // self.nx
                    if table[parent] == STOP or parent not in states:
                        continue
                states.append(idx)
                y = table[idx] if k < self.H else STOP
                if y == STOP:
                    term.append(idx)
                else:
                    outputs[idx] = int(y)
                    for x in range(self.nx):
                        trans[(idx, x)] = self.x_off[k + 1] + code * self.nx + x
        return AgentTransducer(self.p, states, 0, outputs, trans, term, name=name)

    # environment trees -----------------------------------------------------
    def env_trees(self):
        """All environment trees: array (n_trees, n_yseq) of env letters;
        column 0 (the empty sequence) is unused."""
        if self._env is None:
            slots = self.n_yseq - 1
            n = self.nx ** slots
            codes = np.arange(n, dtype=np.int64)
            arr = np.zeros((n, self.n_yseq), dtype=np.int64)
            for j in range(slots):
                arr[:, j + 1] = (codes // self.nx ** j) % self.nx
            self._env = arr
        return self._env

    def _word_tables(self, formula_or_fn):
        """Per length k, a bool array over all words of length k."""
        L = self.p.n_letters
        out = [np.zeros(1, dtype=bool)]
        for k in range(1, self.H + 1):
            vals = np.zeros(L ** k, dtype=bool)
            for code in range(L ** k):
                word = tuple((code // L ** i) % L for i in range(k))
                vals[code] = formula_or_fn(word)
            out.append(vals)
        return out

    def valid_envs(self, env, history=None):
        """Mask of environment trees all of whose plays keep E valid (and
        follow the history)."""
        val = _Validity(env, self.p, history)
        if history is not None and len(history) > self.H:
            raise HorizonExceeded("history longer than the horizon")

        def word_ok(word):
            return all(val(word[:i]) for i in range(1, len(word) + 1))

        tables = self._word_tables(word_ok)
        envs = self.env_trees()
        mask = np.ones(len(envs), dtype=bool)
        L = self.p.n_letters
        for k in range(1, self.H + 1):
            for ycode in range(self.ny ** k):
                ys = [(ycode // self.ny ** (k - 1 - i)) % self.ny for i in range(k)]
                wcode = np.zeros(len(envs), dtype=np.int64)
                seq = 0
                for i, y in enumerate(ys):
                    seq = seq * self.ny + y
                    x = envs[:, self.y_off[i + 1] + seq]
                    wcode += (y | (x << self.p.n_agent)) * L ** i
                mask &= tables[k][wcode]
        return mask

    def outcomes(self, table, envs, sat_tables):
        """Goal satisfaction of the play of one agent tree against every
        environment tree."""
        n = len(envs)
        L = self.p.n_letters
        rows = np.arange(n)
        xcode = np.zeros(n, dtype=np.int64)
        ycode = np.zeros(n, dtype=np.int64)
        wcode = np.zeros(n, dtype=np.int64)
        result = np.zeros(n, dtype=bool)
        active = np.ones(n, dtype=bool)
        for k in range(self.H + 1):
            if k == self.H:
                y = np.full(n, STOP)
            else:
                y = table[self.x_off[k] + xcode]
            stopping = active & (y == STOP)
            if k > 0:
                result[stopping] = sat_tables[k][wcode[stopping]]
            active &= ~stopping
            if not active.any():
                break
            yy = np.where(active, y, 0)
            ycode = ycode * self.ny + yy
            x = envs[rows, self.y_off[k + 1] + ycode]
            wcode = wcode + (yy | (x << self.p.n_agent)) * L ** k
            xcode = xcode * self.nx + x
        return result

    def goal_tables(self, goal):
        return self._word_tables(
            lambda w: ltlf.evaluate(goal, automata.decode_word(w, self.p)))


class BruteForce:
    """Literal definitions over a bounded space for one (goal, E)."""

    def __init__(self, space, goal, env, history=None):
        self.space = space
        self.goal = goal
        mask = space.valid_envs(env)
        self.envs = space.env_trees()[mask]
        self.sat = space.goal_tables(goal)
        self.matrix = np.array([space.outcomes(t, self.envs, self.sat)
                                for t in space.agent_tables()])
        self.h_mask = None
        if history is not None:
            hm = space.valid_envs(env, history)[mask]
            self.h_mask = hm

    def vector(self, a):
        return self.space.outcomes(self.space.table_of(a), self.envs, self.sat)

    def win(self, a):
        return bool(self.vector(a).all())

    def weak(self, a):
        return bool(self.vector(a).any())

    def exists_weak(self):
        return bool(self.matrix.any())

    def dom(self, a, mask=None):
        v = self.vector(a)
        m = self.matrix if mask is None else self.matrix[:, mask]
        vv = v if mask is None else v[mask]
        return not (m & ~vv).any()

    def be(self, a):
        v = self.vector(a)
        geq = ~(~self.matrix & v).any(axis=1)
        strict = (self.matrix & ~v).any(axis=1)
        return not (geq & strict).any()

    def inexcusable_on_history(self, a):
        """∃ env consistent with h, ∃ a' ≥ a (under E): a fails, a' wins.
        Here the goal is the agent's ¬ω."""
        v = self.vector(a)
        geq = ~(~self.matrix & v).any(axis=1)
        cand = self.matrix[geq][:, self.h_mask] & ~v[self.h_mask]
        return bool(cand.any())


# ---------------------------------------------------- random instances

ATOMS_1_1 = ltlf.AtomPartition(("y",), ("x",))


def random_formula(rng, partition, max_size=8, depth=4):
    atoms = list(partition.atoms)

    def gen(d):
        r = rng.random()
        if d == 0 or r < 0.3:
            c = rng.random()
            if c < 0.85:
                return ltlf.atom(rng.choice(atoms))
            return ltlf.TRUE_F if c < 0.95 else ltlf.FALSE_F
        op = rng.choice(["not", "and", "or", "implies", "next", "wnext",
                         "until", "eventually", "always"])
        if op in ("and", "or", "implies", "until"):
            a, b = gen(d - 1), gen(d - 1)
            return {"and": ltlf.and_, "or": ltlf.or_, "implies": ltlf.implies,
                    "until": ltlf.until}[op](a, b)
        return {"not": ltlf.not_, "next": ltlf.next_, "wnext": ltlf.wnext,
                "eventually": ltlf.eventually, "always": ltlf.always}[op](gen(d - 1))

    while True:
        f = gen(depth)
        if ltlf.size(f) <= max_size:
            return f


def random_env(rng, partition, max_size=8):
    """A random enforceable environment specification."""
    while True:
        if rng.random() < 0.3:
            return ltlf.TRUE_F
        f = random_formula(rng, partition, max_size)
        if checkers.check_env_enforceable(f, partition):
            return f


def random_strategy(rng, partition, max_states=4, name=None):
    """Random terminating transducer: states only move forward."""
    n = rng.randint(2, max_states)
    n_term = rng.randint(1, n - 1)
    live = list(range(n - n_term))
    outputs = {s: rng.choice(list(partition.agent_letters())) for s in live}
    trans = {}
    for s in live:
        for x in partition.env_letters():
            trans[(s, x)] = rng.randint(s + 1, n - 1)
    return AgentTransducer(partition, range(n), 0, outputs, trans,
                           range(n - n_term, n), name=name)


def random_history(rng, a, env, history_env=True):
    """A prefix of a play of a with environment moves inside E's region."""
    p = a.partition
    d = automata.to_dfa(env, p)
    region = games.env_win_region(d)
    s, q = a.initial, d.initial
    hist = []
    while s not in a.terminating:
        y = a.out[s]
        xs = [x for x in p.env_letters()
              if d.trans[q].get(p.join(y, x)) in region]
        x = rng.choice(xs)
        q = d.trans[q][p.join(y, x)]
        hist.append((p.decode_agent(y), p.decode_env(x)))
        s = a.delta[s][x]
    k = rng.randint(1, len(hist))
    return strategies.make_history(hist[:k])


def random_env_machine(rng, env, partition, name=None):
    """An environment machine enforcing E: it tracks A_E and answers inside
    the winning region."""
    p = partition
    d = automata.to_dfa(env, p)
    region = games.env_win_region(d)
    states = sorted(region | {d.initial})
    outputs, trans = {}, {}
    for q in states:
        for y in p.agent_letters():
            xs = [x for x in p.env_letters()
                  if d.trans[q].get(p.join(y, x)) in region]
            if not xs:
                xs = [0]
                target = states[0]
            else:
                x = rng.choice(xs)
                xs = [x]
                target = d.trans[q][p.join(y, x)]
            outputs[(q, y)] = xs[0]
            trans[(q, y)] = target
    return EnvTransducer(p, states, d.initial, outputs, trans, name=name)


def rng_for(seed):
    return random.Random(seed)


# --------------------------------------------------- equivalence suite

OPERATIONS = ("win", "weak", "dom", "be", "exists-weak", "pr-ant", "ipr-ant",
              "pr-attr", "ipr-attr", "ara", "pr-attr-vs-env")


def random_instance(rng, partition=ATOMS_1_1):
    goal = random_formula(rng, partition)
    env = random_env(rng, partition)
    a = random_strategy(rng, partition, 4, name="sigma")
    history = random_history(rng, a, env)
    machine = random_env_machine(rng, env, partition, name="e")
    return goal, env, a, history, machine


def library_values(goal, env, a, history, machine):
    from . import responsibility as resp
    p = a.partition
    ipr = resp.ipr_attr(goal, env, a, history)
    return {
        "win": checkers.check_win(goal, env, a).decision,
        "weak": checkers.check_weak(goal, env, a).decision,
        "dom": checkers.check_dom(goal, env, a).decision,
        "be": checkers.check_be(goal, env, a).decision,
        "exists-weak": checkers.exists_weak(goal, env, p).decision,
        "pr-ant": resp.pr_ant(goal, env, a).decision,
        "ipr-ant": resp.ipr_ant(goal, env, a).decision,
        "pr-attr": resp.pr_attr(goal, env, a, history).decision,
        "ipr-attr": ipr.decision,
        "ara": resp.ara(goal, env, a).decision,
        "pr-attr-vs-env": resp.pr_attr_vs_env(goal, env, a, machine).decision,
    }, ipr.diagnostics["table"]


def oracle_values(goal, env, a, history, machine, horizon):
    p = a.partition
    out = {k: oracle_check(k, goal, env, a, horizon)
           for k in ("win", "weak", "dom", "be")}
    out["exists-weak"] = oracle_exists_weak(goal, env, p, horizon)
    for k in ("pr-ant", "ipr-ant", "ara"):
        out[k] = oracle_responsibility(k, goal, env, a, horizon=horizon)
    for k in ("pr-attr", "ipr-attr"):
        out[k] = oracle_responsibility(k, goal, env, a, history, horizon)
    out["pr-attr-vs-env"] = oracle_responsibility("pr-attr-vs-env", goal, env,
                                                  a, machine, horizon)
    return out


def equivalence_suite(count, seed=0):
    """Compare every operation with the oracle on ``count`` random
    instances; one record per instance."""
    records = []
    for i in range(count):
        rng = random.Random(f"{seed}:{i}")
        goal, env, a, history, machine = random_instance(rng)
        horizon = sufficient_horizon(goal, env, a, history, machine)
        lib, table = library_values(goal, env, a, history, machine)
        ref = oracle_values(goal, env, a, history, machine, horizon)
        records.append({
            "seed": f"{seed}:{i}", "goal": ltlf.render(goal),
            "env": ltlf.render(env), "horizon": horizon,
            "library": lib, "oracle": ref,
            "disagreements": sorted(k for k in OPERATIONS if lib[k] != ref[k]),
            "tableAgrees": table == lib["ipr-attr"]})
    return records
