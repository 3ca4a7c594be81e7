import pytest
from hypothesis import given

from gen import random_transducer, rngs
from pdsync.automata import SequentialTransducer
from pdsync.pdasync import Verdict
from pdsync.transducers import (
    check_trace_sync,
    naive_trace_sync,
    run_transducer,
    trace_sync_search_bounded,
)


def resetter():
    """r resets both states to 0 emitting x; s swaps them emitting nothing."""
    delta = {
        ("0", "r"): ("0", ("x",)),
        ("1", "r"): ("0", ("x",)),
        ("0", "s"): ("1", ()),
        ("1", "s"): ("0", ()),
    }
    return SequentialTransducer(("0", "1"), ("r", "s"), ("x",), delta)


def test_run_transducer():
    t = resetter()
    assert run_transducer(t, "1", "s r r") == ("0", ("x", "x"))
    assert run_transducer(t, "0", "") == ("0", ())


def test_check_trace_sync_reasons():
    t = resetter()
    assert check_trace_sync(t, "r")
    bad = check_trace_sync(t, "s")
    assert not bad and bad.pair == ("0", "1") and "end in" in bad.reason
    assert check_trace_sync(t, "s r")


def test_output_mismatch_reports_position():
    delta = {("0", "a"): ("0", ("x", "y")), ("1", "a"): ("0", ("x", "x"))}
    t = SequentialTransducer(("0", "1"), ("a",), ("x", "y"), delta)
    bad = check_trace_sync(t, "a")
    assert not bad and bad.position == 1
    out = trace_sync_search_bounded(t, max_len=5)
    assert out.verdict is Verdict.EXHAUSTED and out.stats["frontier_empty"]
    assert out.stats["pruned"]["conflict"] >= 1


def test_lagging_output_is_kept_as_residual():
    # after b the run from 1 is one x ahead; a lets the run from 0 catch up
    delta = {
        ("0", "a"): ("1", ("x",)),
        ("1", "a"): ("1", ()),
        ("0", "b"): ("0", ()),
        ("1", "b"): ("1", ("x",)),
    }
    t = SequentialTransducer(("0", "1"), ("a", "b"), ("x",), delta)
    out = trace_sync_search_bounded(t, max_len=5)
    assert out.word == ("b", "a")
    assert naive_trace_sync(t, 5) == out.word


def test_residual_cap():
    delta = {("0", "a"): ("1", ("x",) * 3), ("1", "a"): ("1", ()), ("0", "b"): ("0", ()), ("1", "b"): ("1", ("x",))}
    t = SequentialTransducer(("0", "1"), ("a", "b"), ("x",), delta)
    assert trace_sync_search_bounded(t, max_len=8).found
    out = trace_sync_search_bounded(t, max_len=8, max_residual=2)
    assert out.verdict is Verdict.EXHAUSTED and out.stats["pruned"]["residual"] >= 1
    with pytest.raises(ValueError):
        trace_sync_search_bounded(t, max_residual=-1)


def test_single_state_syncs_with_empty_word():
    t = SequentialTransducer(("0",), ("a",), ("x",), {("0", "a"): ("0", ("x",))})
    assert trace_sync_search_bounded(t).word == ()


@given(rngs)
def test_search_matches_naive(rng):
    t = random_transducer(rng)
    out = trace_sync_search_bounded(t, max_len=6, max_nodes=50_000)
    ref = naive_trace_sync(t, 6)
    if ref is None:
        assert out.verdict is Verdict.EXHAUSTED
    else:
        assert out.word == ref
