import pytest
from hypothesis import given

from gen import dfa_image, first_word, random_dfa, rngs
from pdsync.automata import BudgetExceeded, Dfa, MachineError, PartialDfa
from pdsync.dfasync import (
    careful_sync,
    cerny,
    find_sync_word_greedy,
    is_synchronizable_dfa,
    shortest_sync_word,
    sync_from_into_subset,
    sync_into_subset,
    synchronizes,
)


def single():
    return Dfa(("0",), ("a",), {("0", "a"): "0"})


def permutation():
    return Dfa(("0", "1"), ("a", "b"), {("0", "a"): "1", ("1", "a"): "0", ("0", "b"): "0", ("1", "b"): "1"})


def test_trivial_cases():
    assert is_synchronizable_dfa(single())
    assert find_sync_word_greedy(single()) == ()
    assert shortest_sync_word(single()) == ()
    assert not is_synchronizable_dfa(permutation())
    assert find_sync_word_greedy(permutation()) is None
    assert shortest_sync_word(permutation()) is None


@pytest.mark.parametrize("n,length", [(2, 1), (3, 4), (4, 9), (5, 16), (6, 25)])
def test_cerny_shortest_lengths(n, length):
    c = cerny(n)
    w = shortest_sync_word(c)
    assert len(w) == length
    assert synchronizes(c, w)


def test_cerny_4_word_is_least():
    assert shortest_sync_word(cerny(4)) == tuple("baaabaaab")


def test_total_required():
    pdfa = PartialDfa(("0", "1"), ("a",), {("0", "a"): "1"})
    with pytest.raises(MachineError):
        is_synchronizable_dfa(pdfa)
    with pytest.raises(MachineError):
        shortest_sync_word(pdfa)


@given(rngs)
def test_greedy_agrees_with_pair_criterion(rng):
    d = random_dfa(rng, max_states=6)
    w = find_sync_word_greedy(d)
    assert (w is not None) == is_synchronizable_dfa(d)
    if w is not None:
        assert synchronizes(d, w)
        n = len(d.states)
        assert len(w) <= max(0, (n - 1) * n * (n - 1) // 2)
        assert len(w) >= len(shortest_sync_word(d))


@given(rngs)
def test_subset_search_matches_enumeration(rng):
    d = random_dfa(rng, max_states=4)
    start = [q for q in d.states if rng.random() < 0.6] or [d.states[0]]
    target = [q for q in d.states if rng.random() < 0.5] or [d.states[-1]]
    w = sync_from_into_subset(d, start, target)
    ref = first_word(d.alphabet, 5, lambda u: dfa_image(d, start, u) <= set(target))
    if ref is not None:
        assert w == ref
    elif w is not None:
        assert len(w) > 5


def test_subset_special_cases():
    c = cerny(4)
    assert sync_into_subset(c, c.states) == ()
    assert sync_from_into_subset(c, ["0"], ["0"]) == ()
    assert sync_into_subset(c, ["0", "1"]) is not None
    with pytest.raises(MachineError):
        sync_from_into_subset(c, [], ["0"])
    with pytest.raises(MachineError):
        sync_from_into_subset(c, ["9"], ["0"])


def test_careful_sync_avoids_undefined_moves():
    # b merges but is undefined on state 2; a moves 2 to 0 first
    pdfa = PartialDfa(
        ("0", "1", "2"),
        ("a", "b"),
        {("0", "a"): "0", ("1", "a"): "1", ("2", "a"): "0", ("0", "b"): "0", ("1", "b"): "0"},
    )
    assert careful_sync(pdfa) == ("a", "b")
    assert pdfa.image(pdfa.states, "b") is None


def test_careful_sync_none_when_all_letters_blocked():
    pdfa = PartialDfa(("0", "1"), ("a",), {("0", "a"): "0"})
    assert careful_sync(pdfa) is None


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        shortest_sync_word(cerny(8), max_subsets=20)
