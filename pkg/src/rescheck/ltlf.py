"""LTLf formulas over a partitioned atom set.

Parsing, rendering, finite-trace semantics, primed renaming and the
history specification builder. Traces are sequences of letters; a letter
is any collection of the atom names that are true at that step.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

KEYWORDS = frozenset({"true", "false", "X", "WX", "F", "G", "U"})

ATOM, TRUE, FALSE = "atom", "true", "false"
NOT, AND, OR, IMPLIES = "not", "and", "or", "implies"
NEXT, WNEXT, UNTIL = "next", "weakNext", "until"
EVENTUALLY, ALWAYS = "eventually", "always"

_ARITY = {
    ATOM: 0, TRUE: 0, FALSE: 0,
    NOT: 1, NEXT: 1, WNEXT: 1, EVENTUALLY: 1, ALWAYS: 1,
    AND: 2, OR: 2, IMPLIES: 2, UNTIL: 2,
}


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UndeclaredAtomError(FormulaError):
    def __init__(self, atom):
        super().__init__(f"undeclared atom {atom!r}")
        self.atom = atom


class EmptyTraceError(FormulaError):
    pass


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*'*\Z")


@dataclass(frozen=True)
class AtomPartition:
    """Agent atoms and environment atoms, in a fixed order.

    Letters are encoded as integers: bit ``i`` is the value of the i-th
    atom of ``agent + env``. The agent part of a letter therefore occupies
    the low ``len(agent)`` bits.
    """

    agent: tuple
    env: tuple

    def __post_init__(self):
        object.__setattr__(self, "agent", tuple(self.agent))
        object.__setattr__(self, "env", tuple(self.env))
        names = self.agent + self.env
        if not names:
            raise ValueError("partition needs at least one atom")
        if len(set(names)) != len(names):
            raise ValueError("agent and environment atoms must be distinct")
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n) or n in KEYWORDS:
                raise ValueError(f"invalid atom name {n!r}")

    @property
    def atoms(self):
        return self.agent + self.env

    @property
    def n_agent(self):
        return len(self.agent)

    @property
    def n_env(self):
        return len(self.env)

    @property
    def n_letters(self):
        return 1 << len(self.atoms)

    def agent_letters(self):
        return range(1 << self.n_agent)

    def env_letters(self):
        return range(1 << self.n_env)

    def join(self, y, x):
        return y | (x << self.n_agent)

    def split(self, letter):
        return letter & ((1 << self.n_agent) - 1), letter >> self.n_agent

    def encode(self, true_atoms):
        bits = 0
        for i, a in enumerate(self.atoms):
            if a in true_atoms:
                bits |= 1 << i
        unknown = set(true_atoms) - set(self.atoms)
        if unknown:
            raise UndeclaredAtomError(sorted(unknown)[0])
        return bits

    def decode(self, letter):
        return frozenset(a for i, a in enumerate(self.atoms) if letter >> i & 1)

    def agent_mask(self, true_atoms):
        return self.encode(set(true_atoms) & set(self.agent))

    def env_mask(self, true_atoms):
        return self.encode(set(true_atoms) & set(self.env)) >> self.n_agent

    def decode_agent(self, y):
        return frozenset(a for i, a in enumerate(self.agent) if y >> i & 1)

    def decode_env(self, x):
        return frozenset(a for i, a in enumerate(self.env) if x >> i & 1)

    def primed(self):
        return AtomPartition(tuple(a + "'" for a in self.agent),
                             tuple(a + "'" for a in self.env))

    def to_json(self):
        return {"agent": list(self.agent), "env": list(self.env)}


class Formula:
    """Immutable AST node. Structural equality, cached hash."""

    __slots__ = ("kind", "args", "name", "_hash")

    def __init__(self, kind, args=(), name=None):
        if kind not in _ARITY:
            raise ValueError(f"unknown node kind {kind!r}")
        args = tuple(args)
        if len(args) != _ARITY[kind]:
            raise ValueError(f"{kind} takes {_ARITY[kind]} operand(s)")
        if (kind == ATOM) != (name is not None):
            raise ValueError("atom nodes, and only atom nodes, carry a name")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash((kind, args, name)))

    def __setattr__(self, key, value):
        raise AttributeError("Formula is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula) or self._hash != other._hash:
            return False
        return (self.kind == other.kind and self.name == other.name
                and self.args == other.args)

    def __repr__(self):
        return f"Formula({render(self)!r})"

    def __str__(self):
        return render(self)

    def __reduce__(self):
        return (Formula, (self.kind, self.args, self.name))


def atom(name):
    return Formula(ATOM, (), name)


TRUE_F = Formula(TRUE)
FALSE_F = Formula(FALSE)


def not_(f):
    return Formula(NOT, (f,))


def and_(*fs):
    return _fold(AND, fs, TRUE_F)


def or_(*fs):
    return _fold(OR, fs, FALSE_F)


def _fold(kind, fs, unit):
    if not fs:
        return unit
    out = fs[0]
    for f in fs[1:]:
        out = Formula(kind, (out, f))
    return out


def implies(a, b):
    return Formula(IMPLIES, (a, b))


def next_(f):
    return Formula(NEXT, (f,))


def wnext(f):
    return Formula(WNEXT, (f,))


def until(a, b):
    return Formula(UNTIL, (a, b))


def eventually(f):
    """``F f``, already expanded to ``true U f``."""
    return until(TRUE_F, f)


def always(f):
    """``G f``, already expanded to ``!(true U !f)``."""
    return not_(until(TRUE_F, not_(f)))


def expand(f):
    """Replace eventually/always nodes by their core-grammar definitions."""
    if f.kind == EVENTUALLY:
        return eventually(expand(f.args[0]))
    if f.kind == ALWAYS:
        return always(expand(f.args[0]))
    if not f.args:
        return f
    return Formula(f.kind, tuple(expand(a) for a in f.args))


def subformulas(f):
    """Distinct subformulas, children before parents."""
    seen = {}
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if g in seen:
            continue
        if done or not g.args:
            seen[g] = None
            continue
        stack.append((g, True))
        for a in g.args:
            if a not in seen:
                stack.append((a, False))
    return list(seen)


def size(f):
    return len(subformulas(f))


def atoms_of(f):
    return frozenset(g.name for g in subformulas(f) if g.kind == ATOM)


def check_atoms(f, partition):
    declared = set(partition.atoms)
    for name in sorted(atoms_of(f)):
        if name not in declared:
            raise UndeclaredAtomError(name)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s+|->|[()!&|]|[A-Za-z_][A-Za-z0-9_]*'*")


def _tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}",
                                     line, pos - line_start + 1)
        tok = m.group()
        if not tok.isspace():
            tokens.append((tok, line, pos - line_start + 1))
        for k, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + k + 1
        pos = m.end()
    tokens.append(("", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, partition):
        self.toks = _tokenize(text)
        self.i = 0
        self.partition = partition

    def peek(self):
        return self.toks[self.i][0]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message):
        _, line, col = self.toks[self.i]
        raise FormulaSyntaxError(message, line, col)

    def expect(self, tok):
        if self.peek() != tok:
            found = self.peek() or "end of input"
            self.fail(f"expected {tok!r}, found {found!r}")
        self.take()

    def formula(self):
        f = self.implication()
        if self.peek() != "":
            self.fail(f"unexpected token {self.peek()!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Formula(OR, (left, self.conjunction()))
        return left

    def conjunction(self):
        left = self.until()
        while self.peek() == "&":
            self.take()
            left = Formula(AND, (left, self.until()))
        return left

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return until(left, self.until())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "!":
            self.take()
            return not_(self.unary())
        if tok == "X":
            self.take()
            return next_(self.unary())
        if tok == "WX":
            self.take()
            return wnext(self.unary())
        if tok == "F":
            self.take()
            return eventually(self.unary())
        if tok == "G":
            self.take()
            return always(self.unary())
        return self.primary()

    def primary(self):
        tok, line, col = self.toks[self.i]
        if tok == "(":
            self.take()
            f = self.implication()
            self.expect(")")
            return f
        if tok == "true":
            self.take()
            return TRUE_F
        if tok == "false":
            self.take()
            return FALSE_F
        if tok and (tok[0].isalpha() or tok[0] == "_") and tok not in KEYWORDS:
            self.take()
            if self.partition is not None and tok not in self.partition.atoms:
                raise UndeclaredAtomError(tok)
            return atom(tok)
        self.fail(f"unexpected {tok!r}" if tok else "unexpected end of input")


def parse(text, partition=None):
    """Parse formula text. With a partition, undeclared atoms are errors."""
    return _Parser(text, partition).formula()


# -------------------------------------------------------------- rendering

_PREC = {IMPLIES: 1, OR: 2, AND: 3, UNTIL: 4}
_UNARY = 5
_ATOMIC = 6


def _sugar(f):
    """Return (keyword, operand) when f is a re-sugarable F/G pattern."""
    if f.kind == EVENTUALLY:
        return "F", f.args[0]
    if f.kind == ALWAYS:
        return "G", f.args[0]
    if f.kind == UNTIL and f.args[0] == TRUE_F:
        return "F", f.args[1]
    if (f.kind == NOT and f.args[0].kind == UNTIL
            and f.args[0].args[0] == TRUE_F and f.args[0].args[1].kind == NOT):
        return "G", f.args[0].args[1].args[0]
    return None


def _prec(f):
    if f.kind in _PREC and _sugar(f) is None:
        return _PREC[f.kind]
    if f.args:
        return _UNARY
    return _ATOMIC


def render(f):
    """Concrete syntax for f; re-parses to ``expand(f)``."""
    def wrap(g, need):
        s = render(g)
        return f"({s})" if need else s

    sug = _sugar(f)
    if sug is not None:
        kw, arg = sug
        return f"{kw} {wrap(arg, _prec(arg) < _UNARY)}"
    k = f.kind
    if k == ATOM:
        return f.name
    if k in (TRUE, FALSE):
        return k
    if k == NOT:
        arg = f.args[0]
        return "!" + wrap(arg, _prec(arg) < _UNARY)
    if k in (NEXT, WNEXT):
        arg = f.args[0]
        kw = "X" if k == NEXT else "WX"
        return f"{kw} {wrap(arg, _prec(arg) < _UNARY)}"
    p = _PREC[k]
    a, b = f.args
    if k in (IMPLIES, UNTIL):
        left, right = _prec(a) <= p, _prec(b) < p
    else:
        left, right = _prec(a) < p, _prec(b) <= p
    op = {IMPLIES: "->", OR: "|", AND: "&", UNTIL: "U"}[k]
    return f"{wrap(a, left)} {op} {wrap(b, right)}"


# -------------------------------------------------------------- semantics

def _letter_set(letter):
    return letter if isinstance(letter, frozenset) else frozenset(letter)


@lru_cache(maxsize=1 << 16)
def _table(f, trace):
    n = len(trace)
    val = {}
    for g in subformulas(f):
        k = g.kind
        if k == ATOM:
            v = [g.name in trace[i] for i in range(n)]
        elif k == TRUE:
            v = [True] * n
        elif k == FALSE:
            v = [False] * n
        elif k == NOT:
            v = [not b for b in val[g.args[0]]]
        elif k == AND:
            a, b = val[g.args[0]], val[g.args[1]]
            v = [a[i] and b[i] for i in range(n)]
        elif k == OR:
            a, b = val[g.args[0]], val[g.args[1]]
            v = [a[i] or b[i] for i in range(n)]
        elif k == IMPLIES:
            a, b = val[g.args[0]], val[g.args[1]]
            v = [(not a[i]) or b[i] for i in range(n)]
        elif k == NEXT:
            a = val[g.args[0]]
            v = [i < n - 1 and a[i + 1] for i in range(n)]
        elif k == WNEXT:
            a = val[g.args[0]]
            v = [i == n - 1 or a[i + 1] for i in range(n)]
        else:
            v = [False] * n
            if k == UNTIL:
                a, b = val[g.args[0]], val[g.args[1]]
                v[n - 1] = b[n - 1]
                for i in range(n - 2, -1, -1):
                    v[i] = b[i] or (a[i] and v[i + 1])
            elif k == EVENTUALLY:
                a = val[g.args[0]]
                v[n - 1] = a[n - 1]
                for i in range(n - 2, -1, -1):
                    v[i] = a[i] or v[i + 1]
            else:  # ALWAYS
                a = val[g.args[0]]
                v[n - 1] = a[n - 1]
                for i in range(n - 2, -1, -1):
                    v[i] = a[i] and v[i + 1]
        val[g] = v
    return tuple(val[f])


def evaluate(f, trace, i=0):
    """Whether position i of the (nonempty) trace satisfies f."""
    trace = tuple(_letter_set(a) for a in trace)
    if not trace:
        raise EmptyTraceError("formulas are not evaluated on the empty trace")
    if not 0 <= i < len(trace):
        raise IndexError(f"position {i} outside trace of length {len(trace)}")
    return _table(f, trace)[i]


def satisfies(trace, f):
    return evaluate(f, trace, 0)


# ------------------------------------------------------ renaming, history

def rename(f, mapping):
    if f.kind == ATOM:
        return atom(mapping.get(f.name, f.name))
    if not f.args:
        return f
    return Formula(f.kind, tuple(rename(a, mapping) for a in f.args))


def prime_copy(f, partition):
    """Rename every atom a of the partition to its primed twin a'."""
    check_atoms(f, partition)
    return rename(f, {a: a + "'" for a in partition.atoms})


def literals(true_atoms, names):
    """Conjunction fixing the value of every atom in names."""
    true_atoms = set(true_atoms)
    lits = [atom(a) if a in true_atoms else not_(atom(a)) for a in names]
    return and_(*lits)


def _wnext_power(f, k):
    for _ in range(k):
        f = wnext(f)
    return f


def history_to_env_spec(history, partition):
    """The formula pinning the environment to the moves of a history.

    ``history`` is a sequence of (agent atoms, environment atoms) pairs.
    The k-th conjunct says: if the agent played Y_0..Y_k, the environment
    answers X_k at step k.
    """
    history = list(history)
    if not history:
        raise ValueError("history must be nonempty")
    conjuncts = []
    for k in range(len(history)):
        guard = and_(*[_wnext_power(literals(history[i][0], partition.agent), i)
                       for i in range(k + 1)])
        resp = _wnext_power(literals(history[k][1], partition.env), k)
        conjuncts.append(implies(guard, resp))
    return and_(*conjuncts)
