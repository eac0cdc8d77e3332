import random

import pytest
from hypothesis import given, settings

from corpus import P11, all_traces, formulas
from rescheck import ltlf, oracle, problem, strategies
from rescheck.oracle import BoundedStrategySpace, BruteForce, HorizonExceeded

PROB = problem.plant()
F = PROB.formula
E1 = F("E1")
S1, S2, S3 = (PROB.strategy(n) for n in ("sigma1", "sigma2", "sigma3"))


@pytest.mark.parametrize("h,count", [(1, 2), (2, 18), (3, 722)])
def test_agent_tree_counts(h, count):
    space = BoundedStrategySpace(P11, h)
    assert space.agent_tree_count() == count
    assert len(space.agent_tables()) == count


def test_tree_transducers_reproduce_tables():
    space = BoundedStrategySpace(P11, 2)
    for t in space.agent_tables():
        a = space.tree_to_transducer(t)
        assert (space.table_of(a) == t).all()


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_progression_matches_evaluate(f):
    r0 = oracle._nnf(f)
    for word, trace in all_traces(P11, 3):
        r = r0
        for i, letter in enumerate(trace):
            r = oracle._progress(r, letter, i == len(trace) - 1)
        assert (r == oracle._T) == ltlf.evaluate(f, trace)


def test_plant_oracle_values():
    assert oracle.oracle_check("win", F("phi1"), E1, S1)
    assert not oracle.oracle_check("dom", F("phi2"), E1, S2)
    assert oracle.oracle_check("be", F("phi2"), E1, S2)
    rain = PROB.env_strategy("rain_evening_only")
    assert oracle.oracle_responsibility("pr-attr-vs-env", F("!phi2"), E1, S2,
                                        rain)
    assert not oracle.oracle_responsibility("ara", ltlf.TRUE_F, E1, S1)


def test_plant_horizon():
    for g in ("phi1", "phi2", "phi3"):
        for a in (S1, S2, S3):
            assert 3 <= oracle.sufficient_horizon(F(g), E1, a) <= 6
    h = PROB.history("sigma2_vs_rain_evening")
    assert oracle.sufficient_horizon(F("!phi2"), E1, S2, h) >= len(h)


def test_horizon_too_small():
    long = strategies.sequence_agent(P11, [set()] * 4)
    with pytest.raises(HorizonExceeded):
        oracle.oracle_check("win", ltlf.TRUE_F, ltlf.TRUE_F, long, horizon=2)
    with pytest.raises(HorizonExceeded):
        BoundedStrategySpace(P11, 2).table_of(long)


def test_bounded_plant_space():
    # H = 2 covers the two-step plant exactly
    space = BoundedStrategySpace(PROB.partition, 2)
    bf1 = BruteForce(space, F("phi1"), E1)
    assert bf1.win(S1) and not bf1.win(S3) and bf1.weak(S2)
    bf2 = BruteForce(space, F("phi2"), E1)
    assert bf2.be(S2) and bf2.be(S3) and not bf2.dom(S2)
    bf3 = BruteForce(space, F("phi3"), E1)
    assert bf3.dom(S3) and not bf3.be(S1)


@pytest.mark.parametrize("seed", range(6))
def test_brute_force_matches_word_oracle(seed):
    rng = random.Random(f"brute:{seed}")
    space = BoundedStrategySpace(P11, 3)
    goal = oracle.random_formula(rng, P11, 6)
    env = oracle.random_env(rng, P11, 6)
    bf = BruteForce(space, goal, env)
    wo = oracle.WordOracle(goal, env, P11, 3)
    tables = space.agent_tables()
    for i in rng.sample(range(len(tables)), 25):
        a = space.tree_to_transducer(tables[i])
        assert bf.win(a) == wo.swin(a, ())
        assert bf.weak(a) == wo.scoop(a, ())
        assert bf.dom(a) == (not wo.ndom(a))
        assert bf.be(a) == (not wo.imp(a))
    assert bf.exists_weak() == wo.coop(())


@pytest.mark.parametrize("seed", range(4))
def test_brute_force_history_matches_word_oracle(seed):
    rng = random.Random(f"brute-h:{seed}")
    space = BoundedStrategySpace(P11, 3)
    goal = oracle.random_formula(rng, P11, 6)
    env = oracle.random_env(rng, P11, 6)
    a = oracle.random_strategy(rng, P11, 4)
    h = oracle.random_history(rng, a, env)
    bf = BruteForce(space, ltlf.not_(goal), env, h)
    wo = oracle.WordOracle(ltlf.not_(goal), env, P11, 3, h)
    if not wo.C.can_start():
        pytest.skip("E ∧ E_h not enforceable for this draw")
    assert bf.inexcusable_on_history(a) == wo.imp(a)


def test_equivalence_suite_small():
    records = oracle.equivalence_suite(40, seed=123)
    assert all(not r["disagreements"] for r in records)
    assert {r["horizon"] for r in records} <= set(range(1, 12))
    assert set(records[0]["library"]) == set(oracle.OPERATIONS)


def test_random_generators_are_reproducible():
    a = oracle.random_instance(oracle.rng_for(9))
    b = oracle.random_instance(oracle.rng_for(9))
    assert a[0] == b[0] and a[1] == b[1]
    assert a[2].out == b[2].out and a[2].delta == b[2].delta
    assert a[3] == b[3]
