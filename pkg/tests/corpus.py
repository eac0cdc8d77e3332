"""Shared formulas, traces and generators for the test modules."""
import itertools

from hypothesis import strategies as st

from rescheck import automata, ltlf, strategies
from rescheck.ltlf import AtomPartition

P11 = AtomPartition(("y",), ("x",))
PLANT = AtomPartition(("w",), ("r",))

# 30 formulas over one agent atom y and one environment atom x
CORPUS = [
    "true", "false", "y", "!x", "y & x", "y | !x", "y -> x",
    "X y", "WX y", "X X x", "WX WX false", "X true", "!X true",
    "y U x", "(y | x) U !y", "!(y U x)", "F x", "G y", "F G x", "G F y",
    "G (y -> X x)", "F (y & X !x)", "G (x -> WX false)", "x U (y U x)",
    "(X y) U (WX x)", "G (y | x) & F !y", "F y -> G x", "X (x U y) | G !x",
    "!F (y & x) & X true", "WX (y -> F (x & WX false))",
]


def corpus_formulas(partition=P11):
    return [ltlf.parse(text, partition) for text in CORPUS]


def all_traces(partition, max_len):
    letters = list(range(partition.n_letters))
    for n in range(1, max_len + 1):
        for word in itertools.product(letters, repeat=n):
            yield word, automata.decode_word(word, partition)


def formulas(atoms=("y", "x"), max_leaves=8):
    leaves = st.one_of(st.sampled_from([ltlf.atom(a) for a in atoms]),
                       st.sampled_from([ltlf.TRUE_F, ltlf.FALSE_F]))

    def extend(children):
        unary = st.sampled_from([ltlf.not_, ltlf.next_, ltlf.wnext,
                                 ltlf.eventually, ltlf.always])
        binary = st.sampled_from([ltlf.and_, ltlf.or_, ltlf.implies,
                                  ltlf.until])
        return st.one_of(st.builds(lambda op, f: op(f), unary, children),
                         st.builds(lambda op, f, g: op(f, g), binary,
                                   children, children))
    return st.recursive(leaves, extend, max_leaves=max_leaves)


def consistent_histories(a, model, max_len=None):
    """Every history of a whose environment moves stay in the region of
    the environment specification model (an EnvModel)."""
    p = a.partition
    d = model.dfa
    out = []

    def walk(s, q, hist):
        if s in a.terminating or (max_len is not None and len(hist) >= max_len):
            return
        y = a.out[s]
        for x in p.env_letters():
            t = d.trans[q].get(p.join(y, x))
            if t is None or t not in model.region:
                continue
            h = hist + [(p.decode_agent(y), p.decode_env(x))]
            out.append(strategies.make_history(h))
            walk(a.delta[s][x], t, h)

    walk(a.initial, d.initial, [])
    return out


def random_arena(rng, max_states=12, partition=P11):
    """Random partial DFA game: some transitions missing, random goal."""
    from rescheck.games import GameArena
    n = rng.randint(1, max_states)
    trans = []
    for _ in range(n):
        trans.append({l: rng.randrange(n) for l in range(partition.n_letters)
                      if rng.random() < 0.8})
    goal = {s for s in range(n) if rng.random() < 0.25}
    d = automata.Dfa(automata.Alphabet(partition), n, 0, goal, trans)
    return GameArena(d, goal)
