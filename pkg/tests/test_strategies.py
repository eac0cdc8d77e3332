import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import P11, PLANT
from rescheck import automata, ltlf, oracle, strategies
from rescheck.strategies import (AgentTransducer, EnvTransducer, StrategyError,
                                 constant_env, sequence_agent)

WATER_ONCE = sequence_agent(PLANT, [{"w"}])


def test_chain_stops():
    a = AgentTransducer(P11, ["s0", "s1"], "s0", {"s0": set()},
                        {("s0", 0): "s1", ("s0", 1): "s1"}, ["s1"])
    assert strategies.validate_stopping(a)


def test_self_loop_is_reported():
    a = AgentTransducer(P11, ["s0", "s1"], "s0", {"s0": set()},
                        {("s0", 0): "s0", ("s0", 1): "s1"}, ["s1"])
    rep = strategies.validate_stopping(a)
    assert not rep and rep.lasso == ("s0", "s0")
    with pytest.raises(StrategyError):
        strategies.max_play_length(a)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_random_dags_stop(seed):
    assert strategies.validate_stopping(
        oracle.random_strategy(random.Random(seed), P11, 6))


def test_malformed_transducers():
    with pytest.raises(StrategyError):
        AgentTransducer(P11, ["s"], "s", {"s": set()}, {}, [])
    with pytest.raises(StrategyError):
        AgentTransducer(P11, ["s"], "s", {}, {}, ["s"])
    with pytest.raises(StrategyError):
        EnvTransducer(P11, ["e"], "e", {("e", 0): 0}, {("e", 0): "e"})


def test_play_examples():
    assert strategies.play(WATER_ONCE, constant_env(PLANT)) == ({"w"},)
    assert strategies.play(WATER_ONCE, constant_env(PLANT, {"r"})) == ({"w", "r"},)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_play_length_counts_live_states(seed):
    rng = random.Random(seed)
    a = oracle.random_strategy(rng, P11)
    e = oracle.random_env_machine(rng, ltlf.TRUE_F, P11)
    word = strategies.play_word(a, e)
    s, t, steps = a.initial, e.initial, 0
    while s not in a.terminating:
        x = e.out[t][a.out[s]]
        t = e.delta[t][a.out[s]]
        s = a.delta[s][x]
        steps += 1
    assert len(word) == steps <= strategies.max_play_length(a)


def test_consistency_examples():
    assert strategies.is_consistent([({"w"}, {"r"})], WATER_ONCE)
    assert not strategies.is_consistent([(set(), {"r"})], WATER_ONCE)
    assert strategies.is_consistent([({"w"}, {"r"})], WATER_ONCE, full=True)


def test_consistency_matches_prefix_language():
    rng = random.Random(11)
    for _ in range(30):
        a = oracle.random_strategy(rng, P11)
        d = strategies.strategy_dfa(a)
        live = automata.trim(d)
        for n in range(1, 4):
            for word in itertools.product(range(4), repeat=n):
                h = [(P11.decode_agent(P11.split(l)[0]),
                      P11.decode_env(P11.split(l)[1])) for l in word]
                # prefix of an accepted word: the run stays on live states
                s = live.run(word)
                in_closure = s is not None and (
                    s in live.final or bool(live.trans[s]))
                assert strategies.is_consistent(h, a) == in_closure


def test_one_step_water_dfa():
    d = strategies.strategy_dfa(WATER_ONCE)
    assert d.n_states == 3
    enc = PLANT.encode
    acc = d.trans[d.initial][enc({"w"})]
    assert d.trans[d.initial][enc({"w", "r"})] == acc and acc in d.final
    sink = d.trans[d.initial][enc(set())]
    assert sink == d.trans[d.initial][enc({"r"})] and sink not in d.final


def _env_machines(partition, n_states):
    ys = list(partition.agent_letters())
    xs = list(partition.env_letters())
    keys = [(s, y) for s in range(n_states) for y in ys]
    for outs in itertools.product(xs, repeat=len(keys)):
        for nxt in itertools.product(range(n_states), repeat=len(keys)):
            yield EnvTransducer(partition, range(n_states), 0,
                                dict(zip(keys, outs)), dict(zip(keys, nxt)))


def test_plays_accepted_only_at_stop():
    rng = random.Random(2)
    for _ in range(10):
        a = oracle.random_strategy(rng, P11)
        d = strategies.strategy_dfa(a)
        for e in _env_machines(P11, 1):
            word = strategies.play_word(a, e)
            assert d.accepts(word)
            assert not any(d.accepts(word[:i]) for i in range(len(word)))


def test_env_enforces_basics():
    never_rain = constant_env(PLANT)
    assert strategies.env_enforces(never_rain, ltlf.TRUE_F)
    assert not strategies.env_enforces(never_rain, ltlf.parse("G r", PLANT))
    assert strategies.env_enforces(constant_env(PLANT, {"r"}),
                                   ltlf.parse("G r", PLANT))


def _bounded_enforces(e, spec, depth):
    d = automata.to_dfa(spec, e.partition)
    p = e.partition
    for n in range(1, depth + 1):
        for ys in itertools.product(list(p.agent_letters()), repeat=n):
            t, word = e.initial, []
            for y in ys:
                word.append(p.join(y, e.out[t][y]))
                t = e.delta[t][y]
                if not d.accepts(word):
                    return False
    return True


def test_env_enforces_matches_bounded_check():
    specs = [ltlf.parse(t, P11) for t in
             ("true", "G x", "G (y -> x)", "x U y", "G (x -> WX !x)",
              "F x", "X x | !X true", "G (y -> X x)")]
    for spec in specs:
        d = automata.to_dfa(spec, P11)
        for e in _env_machines(P11, 2):
            depth = e.n_states * d.n_states + 1
            assert (strategies.env_enforces(e, spec)
                    == _bounded_enforces(e, spec, depth))


@pytest.mark.parametrize("h", [
    [({"w"}, {"r"})],
    [(set(), set()), ({"w"}, {"r"})],
    [({"w"}, set()), ({"w"}, {"r"})],
])
def test_env_enforces_history_spec_iff_consistent(h):
    spec = ltlf.history_to_env_spec(h, PLANT)
    for e in _env_machines(PLANT, 2):
        assert strategies.env_enforces(e, spec) == strategies.is_consistent_env(h, e)
