import pytest
from hypothesis import given

from gen import first_word, naive_stack_sync, random_dca, random_dpda, rngs
from pdsync.automata import BOTTOM, Dpda, StackModel
from pdsync.pdasync import (
    Counterexample,
    SyncWitness,
    Verdict,
    check_n_turn_sync_word,
    check_sync_word,
    model_chain_holds,
    sync_search_bounded,
)


def sink_machine():
    """Two states; a sends both to s keeping the stack, b pushes."""
    delta = {}
    for q in ("p", "s"):
        for g in (BOTTOM, "X"):
            delta[(q, "a", g)] = ("s", (g,))
            delta[(q, "b", g)] = (q, (g, "X"))
    return Dpda(("p", "s"), ("a", "b"), (BOTTOM, "X"), delta)


def height_splitter():
    """p pushes on a, q keeps its stack; both move to s."""
    delta = {}
    for g in (BOTTOM, "X"):
        delta[("p", "a", g)] = ("s", (g, "X"))
        delta[("q", "a", g)] = ("s", (g,))
        delta[("s", "a", g)] = ("s", (g,))
        delta[("p", "b", g)] = ("p", () if g == "X" else (g,))
        delta[("q", "b", g)] = ("q", () if g == "X" else (g,))
        delta[("s", "b", g)] = ("s", () if g == "X" else (g,))
    return Dpda(("p", "q", "s"), ("a", "b"), (BOTTOM, "X"), delta)


def test_check_sync_word_models():
    m = sink_machine()
    for model in StackModel:
        assert isinstance(check_sync_word(m, "a", model), SyncWitness)
    w = check_sync_word(m, "b a", "arbitrary")
    assert isinstance(w, SyncWitness) and w.state == "s"
    assert isinstance(check_sync_word(m, "b a", "empty"), Counterexample)
    assert isinstance(check_sync_word(m, "b a", "same"), SyncWitness)
    bad = check_sync_word(m, "b", "arbitrary")
    assert isinstance(bad, Counterexample) and set(bad.states) == {"p", "s"}


def test_same_and_empty_distinguish_heights():
    m = height_splitter()
    assert isinstance(check_sync_word(m, "a", "arbitrary"), SyncWitness)
    assert isinstance(check_sync_word(m, "a", "same"), Counterexample)
    assert isinstance(check_sync_word(m, "a b", "empty"), SyncWitness)


def test_witness_verify_and_turns():
    m = sink_machine()
    w = check_sync_word(m, "b a", "same")
    assert w.verify(m)
    ok, turns = check_n_turn_sync_word(m, "b a", 0, "same")
    assert ok and turns == {"p": 0, "s": 0}
    with pytest.raises(ValueError):
        check_n_turn_sync_word(m, "a", -1, "same")


def test_turn_count_rejects_up_down_up():
    delta = {}
    for g in (BOTTOM, "X"):
        delta[("p", "a", g)] = ("p", (g, "X"))
        delta[("p", "b", g)] = ("p", () if g == "X" else (g,))
    m = Dpda(("p",), ("a", "b"), (BOTTOM, "X"), delta)
    ok, turns = check_n_turn_sync_word(m, "a b a b", 1, "empty")
    assert not ok and turns == {"p": 3}
    assert not check_n_turn_sync_word(m, "a b a b", 2, "empty")[0]
    assert check_n_turn_sync_word(m, "a b a b", 3, "empty")[0]


def test_model_chain():
    m = sink_machine()
    assert model_chain_holds(m, "a", "empty")
    assert model_chain_holds(m, "b a", "same")


def test_search_finds_sink_at_depth_one():
    out = sync_search_bounded(sink_machine(), "empty", max_len=5)
    assert out.verdict is Verdict.FOUND and out.word == ("a",)
    assert out.stats["depth_completed"] == 0


def test_search_exhausted_reports_stats():
    delta = {}
    for q, t in (("p", "q"), ("q", "p")):
        for g in (BOTTOM, "X"):
            delta[(q, "a", g)] = (t, (g,))
    m = Dpda(("p", "q"), ("a",), (BOTTOM, "X"), delta)
    out = sync_search_bounded(m, "arbitrary", max_len=10)
    assert out.verdict is Verdict.EXHAUSTED
    assert out.stats["nodes"] >= 1
    with pytest.raises(ValueError):
        sync_search_bounded(m, "empty", max_nodes=0)


def test_node_cap_gives_exhausted():
    m = height_splitter()
    out = sync_search_bounded(m, "same", max_len=50, max_nodes=1)
    assert out.verdict is Verdict.EXHAUSTED and "node cap" in out.reason


@pytest.mark.parametrize("model", ["empty", "same", "arbitrary"])
@pytest.mark.parametrize("turns", [None, 0, 1])
@given(rng=rngs)
def test_search_matches_enumeration(rng, model, turns):
    m = random_dpda(rng, max_states=3, max_stack=2)
    out = sync_search_bounded(m, model, max_len=5, max_nodes=50_000, turn_bound=turns)
    ref = first_word(m.input_alphabet, 5, lambda w: naive_stack_sync(m, model, w, turns))
    if ref is None:
        assert out.verdict is Verdict.EXHAUSTED
    else:
        assert out.word == ref
        assert model_chain_holds(m, out.word, model)


@given(rngs)
def test_dca_search_witnesses_verify(rng):
    m = random_dca(rng)
    for model in StackModel:
        out = sync_search_bounded(m, model, max_len=8, max_nodes=20_000, turn_bound=1)
        if out.found:
            assert out.witness.turn_bound_ok
            assert check_n_turn_sync_word(m, out.word, 1, model)[0]
