import pytest
from hypothesis import given, settings

from corpus import PLANT, all_traces, corpus_formulas, formulas
from rescheck import ltlf
from rescheck.ltlf import (EmptyTraceError, FormulaSyntaxError,
                           UndeclaredAtomError, parse, render)

W, R = ltlf.atom("w"), ltlf.atom("r")


def test_parse_constants_and_until():
    assert parse("true") == ltlf.TRUE_F
    assert parse("w U r", PLANT) == ltlf.until(W, R)


def test_eventually_is_true_until():
    f = parse("F(w | r)", PLANT)
    assert f == ltlf.until(ltlf.TRUE_F, ltlf.or_(W, R))


def test_always_expands_through_eventually():
    assert parse("G w") == ltlf.not_(ltlf.until(ltlf.TRUE_F, ltlf.not_(W)))


def test_precedence():
    assert parse("w & r | w -> r") == ltlf.implies(
        ltlf.or_(ltlf.and_(W, R), W), R)
    assert parse("w -> r -> w") == ltlf.implies(W, ltlf.implies(R, W))
    assert parse("!w U r") == ltlf.until(ltlf.not_(W), R)


def test_render_basics():
    assert render(ltlf.TRUE_F) == "true"
    assert render(ltlf.not_(W)) == "!w"
    assert render(parse("F (w | r)")) == "F (w | r)"
    assert render(parse("WX G !w")) == "WX G !w"


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse("w &\n  )")
    assert (exc.value.line, exc.value.column) == (2, 3)


def test_undeclared_atom():
    with pytest.raises(UndeclaredAtomError):
        parse("w & q", PLANT)


@settings(max_examples=1000, deadline=None)
@given(formulas(("w", "r"), max_leaves=12))
def test_render_round_trip(f):
    assert parse(render(f)) == ltlf.expand(f)


def test_next_at_last_position():
    t = [{"w"}]
    assert ltlf.evaluate(ltlf.next_(R), t) is False
    assert ltlf.evaluate(ltlf.wnext(R), t) is True


def test_until_two_letters():
    assert ltlf.evaluate(ltlf.until(W, R), [{"w"}, {"r"}])


def test_evaluate_rejects_empty_trace():
    with pytest.raises(EmptyTraceError):
        ltlf.evaluate(W, [])


def test_day_encoding_has_two_steps():
    day = parse("X !X true")
    lengths = [len(t) for _, t in all_traces(PLANT, 4) if ltlf.evaluate(day, t)]
    assert set(lengths) == {2}


@given(formulas(("w", "r")))
def test_duality_identities(f):
    for _, t in all_traces(PLANT, 3):
        ev = ltlf.evaluate
        assert ev(ltlf.always(f), t) == (not ev(ltlf.eventually(ltlf.not_(f)), t))
        assert ev(ltlf.wnext(f), t) == (not ev(ltlf.next_(ltlf.not_(f)), t))


def test_prime_copy():
    assert ltlf.prime_copy(W, PLANT) == ltlf.atom("w'")
    f = ltlf.and_(W, ltlf.not_(R))
    assert ltlf.prime_copy(f, PLANT) == ltlf.and_(ltlf.atom("w'"),
                                                  ltlf.not_(ltlf.atom("r'")))
    assert parse("w' & !r'", PLANT.primed()) == ltlf.prime_copy(f, PLANT)


@given(formulas(("w", "r")))
def test_prime_copy_keeps_size(f):
    assert ltlf.size(ltlf.prime_copy(f, PLANT)) == ltlf.size(f)


def test_history_spec_single_step():
    spec = ltlf.history_to_env_spec([({"w"}, {"r"})], PLANT)
    assert spec == ltlf.implies(W, R)


def test_history_spec_two_steps():
    spec = ltlf.history_to_env_spec([({"w"}, {"r"}), (set(), set())], PLANT)
    assert spec.kind == ltlf.AND
    first, second = spec.args
    assert first == ltlf.implies(W, R)
    guard, resp = second.args
    assert guard == ltlf.and_(W, ltlf.wnext(ltlf.not_(W)))
    assert resp == ltlf.wnext(ltlf.not_(R))


def test_history_spec_semantics():
    h = [({"w"}, {"r"}), (set(), set())]
    spec = ltlf.history_to_env_spec(h, PLANT)
    assert ltlf.evaluate(spec, [{"w", "r"}, set()])
    assert not ltlf.evaluate(spec, [{"w"}, set()])
    assert not ltlf.evaluate(spec, [{"w", "r"}, {"r"}])
    # a deviating agent frees the environment
    assert ltlf.evaluate(spec, [set(), {"r"}])


def test_corpus_is_well_formed():
    fs = corpus_formulas()
    assert len(fs) == 30 and len(set(fs)) == 30
