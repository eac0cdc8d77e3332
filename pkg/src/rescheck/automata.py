"""Finite automata over explicit letters.

Letters are integers. Over a single track they are bit vectors indexed by
the partition's atom order. Over the joint alphabet used for trace pairs a
letter is ``a * (n + 1) + b`` where ``a`` and ``b`` are single-track
letters (or ``END = n`` once that track has finished).

Automata built here keep their initial state free of incoming edges, so
the initial state always stands for the empty word and nothing else.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from . import ltlf
from .ltlf import AtomPartition


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    partition: AtomPartition
    joint: bool = False

    @property
    def track_size(self):
        return self.partition.n_letters

    @property
    def size(self):
        n = self.track_size
        return (n + 1) ** 2 if self.joint else n

    @property
    def end(self):
        return self.track_size

    def letters(self):
        return range(self.size)

    def pair(self, a, b):
        return a * (self.track_size + 1) + b

    def unpair(self, letter):
        return divmod(letter, self.track_size + 1)

    def describe(self, letter):
        p = self.partition
        if not self.joint:
            return "{" + ",".join(sorted(p.decode(letter))) + "}"
        a, b = self.unpair(letter)
        show = (lambda c: "$" if c == self.end
                else "{" + ",".join(sorted(p.decode(c))) + "}")
        return f"{show(a)}|{show(b)}"


class _Automaton:
    __slots__ = ("alphabet", "n_states", "initial", "final", "trans", "origin")

    def __init__(self, alphabet, n_states, initial, final, trans, origin=None):
        # origin[s]: the component states behind s when built by product()
        self.origin = origin
        self.alphabet = alphabet
        self.n_states = n_states
        self.initial = initial
        self.final = frozenset(final)
        self.trans = tuple(trans)
        if len(self.trans) != n_states:
            raise ValueError("one transition map per state is required")

    def __len__(self):
        return self.n_states

    def reachable(self):
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            s = queue.popleft()
            for _, t in self.edges(s):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        return seen


class Nfa(_Automaton):
    """trans[s] maps a letter to a frozenset of successor states."""

    __slots__ = ()

    def edges(self, s):
        for a, ts in self.trans[s].items():
            for t in ts:
                yield a, t

    def step(self, states, letter):
        out = set()
        for s in states:
            out |= self.trans[s].get(letter, frozenset())
        return frozenset(out)

    def accepts(self, word):
        cur = frozenset({self.initial})
        for a in word:
            cur = self.step(cur, a)
            if not cur:
                return False
        return bool(cur & self.final)

    @property
    def is_deterministic(self):
        return all(len(ts) <= 1 for m in self.trans for ts in m.values())


class Dfa(_Automaton):
    """trans[s] maps a letter to the unique successor; missing means dead."""

    __slots__ = ()

    def edges(self, s):
        return self.trans[s].items()

    def run(self, word, start=None):
        s = self.initial if start is None else start
        for a in word:
            s = self.trans[s].get(a)
            if s is None:
                return None
        return s

    def accepts(self, word):
        s = self.run(word)
        return s is not None and s in self.final

    is_deterministic = True


def as_nfa(a):
    if isinstance(a, Nfa):
        return a
    trans = [{l: frozenset((t,)) for l, t in m.items()} for m in a.trans]
    return Nfa(a.alphabet, a.n_states, a.initial, a.final, trans)


def _relabel(a, keep_order=None):
    """Restrict to reachable states and renumber them densely (BFS order)."""
    order = [a.initial]
    index = {a.initial: 0}
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for _, t in sorted(a.edges(s)):
            if t not in index:
                index[t] = len(order)
                order.append(t)
    if isinstance(a, Dfa):
        trans = [{l: index[t] for l, t in a.trans[s].items()} for s in order]
        cls = Dfa
    else:
        trans = [{l: frozenset(index[t] for t in ts)
                  for l, ts in a.trans[s].items()} for s in order]
        cls = Nfa
    final = {index[s] for s in order if s in a.final}
    return cls(a.alphabet, len(order), 0, final, trans)


# ------------------------------------------------------ formula to NFA
#
# States are sets of obligations (formula in negation normal form, strong
# flag). A strong obligation must be met at a position that exists, so a
# state is accepting when it holds no strong obligation.

def _nnf(f, partition, positive=True):
    k = f.kind
    if k == ltlf.ATOM:
        return ("lit", partition.atoms.index(f.name), positive)
    if k == ltlf.TRUE:
        return ("T",) if positive else ("F",)
    if k == ltlf.FALSE:
        return ("F",) if positive else ("T",)
    if k == ltlf.NOT:
        return _nnf(f.args[0], partition, not positive)
    if k in (ltlf.AND, ltlf.OR):
        a = _nnf(f.args[0], partition, positive)
        b = _nnf(f.args[1], partition, positive)
        conj = (k == ltlf.AND) == positive
        return ("and" if conj else "or", a, b)
    if k == ltlf.IMPLIES:
        a, b = f.args
        return _nnf(ltlf.or_(ltlf.not_(a), b), partition, positive)
    if k == ltlf.NEXT:
        return ("X" if positive else "WX", _nnf(f.args[0], partition, positive))
    if k == ltlf.WNEXT:
        return ("WX" if positive else "X", _nnf(f.args[0], partition, positive))
    if k == ltlf.UNTIL:
        a = _nnf(f.args[0], partition, positive)
        b = _nnf(f.args[1], partition, positive)
        return ("U" if positive else "R", a, b)
    return _nnf(ltlf.expand(f), partition, positive)


def _dnf_and(x, y):
    out = set()
    for c in x:
        for d in y:
            out.add(c | d)
    return out


def _delta(phi, letter, memo):
    key = (phi, letter)
    if key in memo:
        return memo[key]
    tag = phi[0]
    if tag == "T":
        r = {frozenset()}
    elif tag == "F":
        r = set()
    elif tag == "lit":
        r = {frozenset()} if bool(letter >> phi[1] & 1) == phi[2] else set()
    elif tag == "and":
        r = _dnf_and(_delta(phi[1], letter, memo), _delta(phi[2], letter, memo))
    elif tag == "or":
        r = _delta(phi[1], letter, memo) | _delta(phi[2], letter, memo)
    elif tag == "X":
        r = {frozenset({(phi[1], True)})}
    elif tag == "WX":
        r = {frozenset({(phi[1], False)})}
    elif tag == "U":
        r = _delta(phi[2], letter, memo) | _dnf_and(
            _delta(phi[1], letter, memo), {frozenset({(phi, True)})})
    else:  # R
        r = _dnf_and(_delta(phi[2], letter, memo),
                     _delta(phi[1], letter, memo) | {frozenset({(phi, False)})})
    memo[key] = r
    return r


def _normalize(clause):
    strong = {f for f, s in clause if s}
    return frozenset((f, s) for f, s in clause if s or f not in strong)


def _minimal(clauses):
    clauses = sorted({_normalize(c) for c in clauses}, key=len)
    out = []
    for c in clauses:
        if not any(d <= c for d in out):
            out.append(c)
    return out


def to_nfa(f, partition):
    """NFA accepting exactly the nonempty traces that satisfy f."""
    ltlf.check_atoms(f, partition)
    alphabet = Alphabet(partition)
    memo = {}
    start = frozenset({(_nnf(f, partition), True)})
    index = {}
    states = []
    trans = []

    def state_id(obls):
        if obls not in index:
            index[obls] = len(states)
            states.append(obls)
            trans.append(None)
        return index[obls]

    # State 0 is a fresh copy of the start set that nothing re-enters.
    states.append(None)
    trans.append(None)
    queue = deque([(0, start)])
    done = set()
    while queue:
        sid, obls = queue.popleft()
        if sid in done:
            continue
        done.add(sid)
        m = {}
        for letter in alphabet.letters():
            dnf = {frozenset()}
            for phi, _ in obls:
                dnf = _dnf_and(dnf, _delta(phi, letter, memo))
                if not dnf:
                    break
            succ = set()
            for clause in _minimal(dnf):
                t = state_id(clause)
                succ.add(t)
                if t not in done:
                    queue.append((t, clause))
            if succ:
                m[letter] = frozenset(succ)
        trans[sid] = m
    final = {i for i, obls in enumerate(states)
             if obls is not None and not any(s for _, s in obls)}
    return Nfa(alphabet, len(states), 0, final, trans)


def determinize(n):
    """Subset construction. The result is complete: the empty subset is a
    rejecting sink whenever some letter leads nowhere."""
    if isinstance(n, Dfa):
        return _relabel(complete(n))
    start = frozenset({n.initial})
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        m = {}
        for letter in n.alphabet.letters():
            nxt = n.step(cur, letter)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            m[letter] = index[nxt]
        trans.append(m)
    final = {i for i, s in enumerate(order) if s & n.final}
    d = Dfa(n.alphabet, len(order), 0, final, trans)
    return isolate_initial(d)


def complete(d):
    """Add a rejecting sink so every state has every letter."""
    letters = list(d.alphabet.letters())
    if all(len(m) == len(letters) for m in d.trans):
        return d
    sink = d.n_states
    trans = [{l: m.get(l, sink) for l in letters} for m in d.trans]
    trans.append({l: sink for l in letters})
    return Dfa(d.alphabet, d.n_states + 1, d.initial, d.final, trans)


def isolate_initial(d):
    """Copy the initial state if some edge enters it."""
    if not any(t == d.initial for m in d.trans for t in m.values()):
        return d
    new = d.n_states
    trans = list(d.trans) + [dict(d.trans[d.initial])]
    final = set(d.final) | ({new} if d.initial in d.final else set())
    return _relabel(Dfa(d.alphabet, d.n_states + 1, new, final, trans))


def minimize(d):
    """Moore partition refinement on the completed, reachable automaton."""
    d = _relabel(complete(d))
    letters = list(d.alphabet.letters())
    block = [1 if s in d.final else 0 for s in range(d.n_states)]
    n_blocks = len(set(block))
    while True:
        sig = {}
        new_block = []
        for s in range(d.n_states):
            key = (block[s],) + tuple(block[d.trans[s][l]] for l in letters)
            new_block.append(sig.setdefault(key, len(sig)))
        if len(sig) == n_blocks:
            break
        block, n_blocks = new_block, len(sig)
    reps = {}
    for s in range(d.n_states):
        reps.setdefault(block[s], s)
    trans = [None] * n_blocks
    for b, s in reps.items():
        trans[b] = {l: block[d.trans[s][l]] for l in letters}
    final = {block[s] for s in d.final}
    out = Dfa(d.alphabet, n_blocks, block[d.initial], final, trans)
    return isolate_initial(_relabel(out))


@lru_cache(maxsize=512)
def to_dfa(f, partition):
    """Minimal complete DFA for f (initial state never re-entered)."""
    return minimize(determinize(to_nfa(f, partition)))


# ------------------------------------------------------- combinators

def product(a, b):
    """Synchronous product; accepts the intersection of the languages."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch(f"{a.alphabet} vs {b.alphabet}")
    det = isinstance(a, Dfa) and isinstance(b, Dfa)
    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        m = {}
        if det:
            tb = b.trans[q]
            for l, t in a.trans[p].items():
                u = tb.get(l)
                if u is None:
                    continue
                key = (t, u)
                if key not in index:
                    index[key] = len(order)
                    order.append(key)
                m[l] = index[key]
        else:
            an, bn = as_nfa(a), as_nfa(b)
            tb = bn.trans[q]
            for l, ts in an.trans[p].items():
                us = tb.get(l)
                if not us:
                    continue
                succ = set()
                for t in ts:
                    for u in us:
                        key = (t, u)
                        if key not in index:
                            index[key] = len(order)
                            order.append(key)
                        succ.add(index[key])
                m[l] = frozenset(succ)
        trans.append(m)
    final = {i for i, (p, q) in enumerate(order) if p in a.final and q in b.final}
    cls = Dfa if det else Nfa
    return cls(a.alphabet, len(order), 0, final, trans, origin=tuple(order))


def product_all(*autos):
    out = autos[0]
    for a in autos[1:]:
        out = product(out, a)
    return out


def restrict(d, keep):
    """Delete every transition that leaves ``keep`` or starts outside it.

    When the initial state is outside ``keep`` the result has no
    transitions at all, so its language is empty.
    """
    keep = frozenset(keep)
    trans = []
    for s, m in enumerate(d.trans):
        if s not in keep:
            trans.append({})
        else:
            trans.append({l: t for l, t in m.items() if t in keep})
    final = d.final & keep
    return type(d)(d.alphabet, d.n_states, d.initial, final, trans)


def trim(a):
    """Drop states that cannot reach a final state (keeps the initial)."""
    back = {s: set() for s in range(a.n_states)}
    for s in range(a.n_states):
        for _, t in a.edges(s):
            back[t].add(s)
    live = set(a.final)
    queue = deque(live)
    while queue:
        t = queue.popleft()
        for s in back[t]:
            if s not in live:
                live.add(s)
                queue.append(s)
    live.add(a.initial)
    if isinstance(a, Dfa):
        trans = [{l: t for l, t in m.items() if t in live} if s in live else {}
                 for s, m in enumerate(a.trans)]
    else:
        trans = [{l: frozenset(t for t in ts if t in live)
                  for l, ts in m.items() if ts & live} if s in live else {}
                 for s, m in enumerate(a.trans)]
    return type(a)(a.alphabet, a.n_states, a.initial, a.final, trans)


def non_empty(a):
    """A shortest accepted word, or None when the language is empty."""
    parent = {a.initial: None}
    queue = deque([a.initial])
    while queue:
        s = queue.popleft()
        if s in a.final:
            word = []
            while parent[s] is not None:
                s, l = parent[s]
                word.append(l)
            word.reverse()
            return tuple(word)
        for l, t in sorted(a.edges(s)):
            if t not in parent:
                parent[t] = (s, l)
                queue.append(t)
    return None


def rename_alphabet(a, alphabet):
    """Same automaton read over another alphabet of equal size."""
    if alphabet.size != a.alphabet.size:
        raise AlphabetMismatch("alphabets differ in size")
    return type(a)(alphabet, a.n_states, a.initial, a.final, a.trans)


def universal(alphabet):
    """Accepts every nonempty word."""
    letters = list(alphabet.letters())
    return Dfa(alphabet, 2, 0, {1}, [{l: 1 for l in letters},
                                     {l: 1 for l in letters}])


def empty(alphabet):
    return Dfa(alphabet, 1, 0, set(), [{}])


# --------------------------------------------------------- history DFA

def history_dfa(history, partition):
    """DFA whose runs stay accepting exactly while E_h holds on every prefix.

    States 0..n form the chain (n = len(history)); n+1 is the free sink
    the agent reaches by leaving the history; n+2 is the violation sink
    reached when the agent followed the history but the environment did
    not.
    """
    history = list(history)
    if not history:
        raise ValueError("history must be nonempty")
    p = partition
    n = len(history)
    free, viol = n + 1, n + 2
    alphabet = Alphabet(p)
    letters = list(alphabet.letters())
    trans = []
    for i, (ys, xs) in enumerate(history):
        y, x = p.agent_mask(ys), p.env_mask(xs)
        m = {}
        for l in letters:
            ly, lx = p.split(l)
            m[l] = free if ly != y else (i + 1 if lx == x else viol)
        trans.append(m)
    trans.append({l: n for l in letters})
    trans.append({l: free for l in letters})
    trans.append({l: viol for l in letters})
    final = set(range(n + 1)) | {free}
    return Dfa(alphabet, n + 3, 0, final, trans)


# ----------------------------------------------------- trace pairs

def joint_alphabet(partition):
    return Alphabet(partition, joint=True)


def glue_dfa(partition):
    """Pairs of padded traces sharing one environment strategy.

    State 0: no agent divergence yet, the environment parts must agree.
    State 1: the agent choices diverged (or one track ended), anything goes.
    The letter with both tracks ended is never allowed.
    """
    alph = joint_alphabet(partition)
    p, end = partition, alph.end
    pre, post = {}, {}
    for l in alph.letters():
        a, b = alph.unpair(l)
        if a == end and b == end:
            continue
        post[l] = 1
        if a == end or b == end:
            pre[l] = 1
            continue
        (ya, xa), (yb, xb) = p.split(a), p.split(b)
        if ya != yb:
            pre[l] = 1
        elif xa == xb:
            pre[l] = 0
    return Dfa(alph, 2, 0, {0, 1}, [pre, post])


def lift_to_joint(n, track, partition):
    """Run n on one track of the joint alphabet.

    Accepts a padded pair iff the chosen track, cut at its end marker, is a
    nonempty word accepted by n. After the end marker the track must stay
    ended.
    """
    if track not in ("unprimed", "primed"):
        raise ValueError("track is 'unprimed' or 'primed'")
    expected = partition if track == "unprimed" else partition.primed()
    if n.alphabet != Alphabet(expected):
        raise AlphabetMismatch("automaton is not over the requested track")
    alph = joint_alphabet(partition)
    end = alph.end
    src = as_nfa(n)
    # 0: fresh start, 1 + s: live in state s, 1 + N: ended.
    N = src.n_states
    ended = 1 + N
    trans = [dict() for _ in range(N + 2)]

    def add(s, l, t):
        trans[s].setdefault(l, set()).add(t)

    for l in alph.letters():
        a, b = alph.unpair(l)
        mine, other = (a, b) if track == "unprimed" else (b, a)
        if mine == end and other == end:
            continue
        if mine == end:
            for s in range(N):
                if s in src.final:
                    add(1 + s, l, ended)
            add(ended, l, ended)
            continue
        for t in src.trans[src.initial].get(mine, ()):
            add(0, l, 1 + t)
        for s in range(N):
            for t in src.trans[s].get(mine, ()):
                add(1 + s, l, 1 + t)
    trans = [{l: frozenset(ts) for l, ts in m.items()} for m in trans]
    final = {1 + s for s in src.final} | {ended}
    out = Nfa(alph, N + 2, 0, final, trans)
    if isinstance(n, Dfa):
        return Dfa(alph, N + 2, 0, final,
                   [{l: next(iter(ts)) for l, ts in m.items()} for m in trans])
    return out


def pad_pair(left, right, partition):
    """Joint word for two single-track words."""
    alph = joint_alphabet(partition)
    n = max(len(left), len(right))
    lp = list(left) + [alph.end] * (n - len(left))
    rp = list(right) + [alph.end] * (n - len(right))
    return tuple(alph.pair(a, b) for a, b in zip(lp, rp))


def unpad_pair(word, partition):
    """Split a joint word into its two tracks, dropping the end markers."""
    alph = joint_alphabet(partition)
    left, right = [], []
    for l in word:
        a, b = alph.unpair(l)
        if a != alph.end:
            left.append(a)
        if b != alph.end:
            right.append(b)
    return tuple(left), tuple(right)


# ------------------------------------------------------------- export

def to_dot(a, name="A", annotate=None):
    """Graphviz text; final states are double circles.

    ``annotate`` optionally maps a state to an extra label line.
    """
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point];']
    for s in sorted(a.reachable()):
        shape = "doublecircle" if s in a.final else "circle"
        label = str(s)
        if annotate and s in annotate:
            label += "\\n" + str(annotate[s])
        lines.append(f'  s{s} [shape={shape}, label="{label}"];')
    lines.append(f"  init -> s{a.initial};")
    grouped = {}
    for s in sorted(a.reachable()):
        for l, t in a.edges(s):
            grouped.setdefault((s, t), []).append(a.alphabet.describe(l))
    for (s, t), labels in sorted(grouped.items()):
        text = " ".join(labels).replace('"', '\\"')
        lines.append(f'  s{s} -> s{t} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def decode_word(word, partition):
    return tuple(partition.decode(l) for l in word)


def encode_word(trace, partition):
    return tuple(partition.encode(set(l)) for l in trace)
