import itertools

import pytest
from hypothesis import given

from gen import counter_free, random_dca, random_dfa, random_dpda, rngs
from pdsync.automata import BOTTOM, Dca, Dfa, Dpda, Refused, StackModel, count_strokes, run
from pdsync.dfasync import careful_sync, cerny, sync_into_subset, synchronizes
from pdsync.pdasync import Verdict, check_n_turn_sync_word, sync_search_bounded
from pdsync.reductions import combine_sync_gadget, dfa_subset_to_0turn_dca
from pdsync.turns import (
    StagedState,
    build_1turn_product,
    build_mq,
    decide_0turn,
    decide_1turn_dca,
    restrict_to_bottom,
    spread_out,
)


def pushing_everywhere():
    delta = {}
    for q in ("p", "q"):
        for g in (BOTTOM, "X"):
            delta[(q, "a", g)] = ("p", (g, "X"))
    return Dpda(("p", "q"), ("a",), (BOTTOM, "X"), delta)


def one_state_acceptor():
    delta = {("u", s, BOTTOM): ("u", (BOTTOM,)) for s in ("x", "y")}
    delta.update({("u", s, "1"): ("u", ("1",)) for s in ("x", "y")})
    return Dca(("u",), ("x", "y"), (BOTTOM, "1"), delta, initial="u", finals=("u",))


def test_restrict_stack_preserving_is_projection():
    c = cerny(4)
    m = counter_free(c)
    r = restrict_to_bottom(m)
    assert r.is_total()
    assert r.transitions == c.transitions


def test_restrict_drops_pushing_letter():
    r = restrict_to_bottom(pushing_everywhere())
    assert r.transitions == {}


def test_restrict_gadget_sink_keeps_all_letters():
    m = one_state_acceptor()
    g = combine_sync_gadget(m, m)
    r = restrict_to_bottom(g)
    assert {s for (q, s) in r.transitions if q == "sync:qs"} == set(g.input_alphabet)


def test_decide_0turn_cerny_empty():
    d = decide_0turn(counter_free(cerny(4)), "empty")
    assert d.answer and len(d.witness) == 9


def test_decide_0turn_no_when_everything_pushes():
    d = decide_0turn(pushing_everywhere(), "empty")
    assert not d.answer and d.witness is None
    assert decide_0turn(pushing_everywhere(), "arbitrary").answer


@pytest.mark.parametrize("subset", [["0"], ["0", "1"], ["1", "2", "3"]])
def test_decide_0turn_subset_gadget_gives_w_a_a(subset):
    c = cerny(4)
    d = decide_0turn(dfa_subset_to_0turn_dca(c, subset), "arbitrary")
    assert d.answer
    assert d.witness == sync_into_subset(c, subset) + ("sync:a", "sync:a")


def test_decide_0turn_subset_gadget_no_instance():
    perm = Dfa(("0", "1"), ("b",), {("0", "b"): "1", ("1", "b"): "0"})
    assert not decide_0turn(dfa_subset_to_0turn_dca(perm, ["0"]), "arbitrary").answer


def test_decide_0turn_same_refused():
    with pytest.raises(Refused, match="undecidable"):
        decide_0turn(pushing_everywhere(), "same")
    with pytest.raises(Refused, match="bounded search"):
        decide_0turn(counter_free(cerny(3), Dca), "same")


@given(rngs)
def test_decide_0turn_matches_bounded_search(rng):
    m = random_dpda(rng)
    for model in ("empty", "arbitrary"):
        d = decide_0turn(m, model)
        s = sync_search_bounded(m, model, max_len=30, max_nodes=100_000, turn_bound=0)
        if s.found:
            assert d.answer and len(d.witness) == len(s.word)
        if d.answer:
            assert check_n_turn_sync_word(m, d.witness, 0, model)[0]
            assert s.found or s.stats["depth_completed"] < len(d.witness)


def test_careful_sync_on_restriction_is_the_empty_procedure():
    m = random_dpda(__import__("random").Random(7))
    assert decide_0turn(m, "empty").witness == careful_sync(restrict_to_bottom(m))


# ---------------------------------------------------------------------------
# staged machines


def test_spread_out():
    assert spread_out("", ("a", "b")) == ()
    assert spread_out("a b", ("a", "b")) == ("a", "a", "b", "a")
    assert spread_out(("b",), ("b", "a")) == ("b", "b")


def test_mq_counter_free_stays_in_stage_one():
    m = counter_free(cerny(3), Dca)
    mq = build_mq(m, "0")
    for w in itertools.product("ab", repeat=4):
        trace = mq.run(w)
        assert trace is not None
        assert all(s.stage == 1 for s, _ in trace)
        assert mq.accepts(w) == (len(w) % 2 == 0)


def test_mq_upstroke_entry_transition():
    delta = {
        ("p", "a", BOTTOM): ("r", (BOTTOM, "1")),
        ("p", "a", "1"): ("p", ("1",)),
        ("r", "a", BOTTOM): ("r", (BOTTOM,)),
        ("r", "a", "1"): ("r", ()),
    }
    m = Dca(("p", "r"), ("a",), (BOTTOM, "1"), delta)
    mq = build_mq(m, "p")
    assert mq.transitions[(StagedState("p", 1, 0), "a", BOTTOM)] == (StagedState("r", 2, 1), (BOTTOM, "1"))
    assert mq.accepts(spread_out("a a", m.input_alphabet))
    assert mq.run(spread_out("a a", m.input_alphabet))[-1][0] == StagedState("r", 4, 0)


def _one_turn_empty_end(m, q, w):
    t = run(m, q, w)
    if t.stuck or t.final.stack != (BOTTOM,) or count_strokes(t.heights()) > 2:
        return None
    return t.final.state


@given(rngs)
def test_mq_accepts_exactly_one_turn_empty_runs(rng):
    m = random_dca(rng)
    for q in m.states:
        mq = build_mq(m, q)
        for n in range(5):
            for w in itertools.product(m.input_alphabet, repeat=n):
                trace = mq.run(spread_out(w, m.input_alphabet))
                end = _one_turn_empty_end(m, q, w)
                accepted = mq.accepts(spread_out(w, m.input_alphabet))
                assert accepted == (end is not None)
                if accepted:
                    assert trace[-1][0].base == end
                if trace:
                    stages = [s.stage for s, _ in trace]
                    assert stages == sorted(stages)
                    for s, k in trace:
                        if mq.is_final(s):
                            assert k == 0


def test_product_state_count_and_single_state():
    m = one_state_acceptor()
    p = build_1turn_product(m, "empty")
    assert p.state_count == 8
    assert p.accepts(())
    m3 = random_dca(__import__("random").Random(1), max_states=3)
    n = len(m3.states)
    assert build_1turn_product(m3, "arbitrary").state_count == (8 * n) ** n
    assert build_1turn_product(m3, "same").nondeterministic


@given(rngs)
def test_product_counter_free_matches_dfa(rng):
    d = random_dfa(rng, max_states=3)
    p = build_1turn_product(counter_free(d, Dca), "empty")
    for n in range(4):
        for w in itertools.product(d.alphabet, repeat=n):
            assert p.accepts(spread_out(w, d.alphabet)) == synchronizes(d, w)


def test_decide_1turn_cerny():
    m = counter_free(cerny(3), Dca)
    for model in StackModel:
        out, bound = decide_1turn_dca(m, model)
        assert out.verdict is Verdict.FOUND
        assert synchronizes(cerny(3), out.word)
        assert bound.bound >= 1 and bound.counters == 3


def test_decide_1turn_increment_only_exhausted():
    delta = {}
    for q, t in (("p", "q"), ("q", "p")):
        delta[(q, "a", BOTTOM)] = (t, (BOTTOM, "1"))
        delta[(q, "a", "1")] = (t, ("1", "1"))
    m = Dca(("p", "q"), ("a",), (BOTTOM, "1"), delta)
    out, bound = decide_1turn_dca(m, "empty", max_len=20, max_nodes=10_000)
    assert out.verdict is Verdict.EXHAUSTED
    assert bound.bound > bound.max_len


def test_decide_1turn_proved_no_only_past_bound():
    delta = {}
    for q in ("p", "q"):
        delta[(q, "a", BOTTOM)] = (q, ())
        delta[(q, "a", "1")] = (q, ())
    m = Dca(("p", "q"), ("a",), (BOTTOM, "1"), delta)
    out, bound = decide_1turn_dca(m, "arbitrary", max_len=8)
    assert out.verdict is Verdict.EXHAUSTED and out.stats["frontier_empty"]
    out, bound = decide_1turn_dca(m, "arbitrary", max_len=bound.bound)
    assert out.verdict is Verdict.PROVED_NO
    assert bound.budget_covers_bound


@given(rngs)
def test_recovered_witnesses_pass_one_turn_check(rng):
    m = random_dca(rng)
    for model in StackModel:
        out, _ = decide_1turn_dca(m, model, max_len=24, max_nodes=20_000)
        if out.found:
            assert check_n_turn_sync_word(m, out.word, 1, model)[0]
            assert out.witness.turn_bound_ok
