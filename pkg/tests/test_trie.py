import itertools

import pytest
from hypothesis import given, strategies as st

from estihmm.trie import COMPLETE, Node, SequenceTrie, branch, complete, count_sequences, leaf


@st.composite
def sequence_sets(draw):
    ns = draw(st.integers(1, 3))
    n = draw(st.integers(1, 5))
    seqs = draw(st.sets(st.tuples(*[st.integers(0, ns - 1)] * n), min_size=1, max_size=30))
    return ns, seqs


@given(sequence_sets())
def test_explicit_trie_round_trip(data):
    ns, seqs = data
    t = SequenceTrie.from_sequences(seqs, ns)
    assert t.count() == len(seqs)
    assert list(t.sequences()) == sorted(seqs)
    assert all(s in t for s in seqs)
    assert t.check() == []
    assert not t.has_sentinels()


def test_sentinel_counts_without_expansion():
    node = complete(1, 40, 2)
    t = SequenceTrie([node], 2)
    assert t.count() == 2**40
    assert t.length == 41
    assert (1,) + (0,) * 40 in t
    assert (0,) * 41 not in t
    assert t.has_sentinels()
    assert count_sequences(t) == count_sequences([node]) == 2**40


def test_mixed_trie_enumerates_in_order():
    t = SequenceTrie([branch(0, [leaf(1), complete(2, 0, 3)]), complete(2, 1, 3)], 3)
    assert list(t) == [(0, 1), (0, 2), (2, 0), (2, 1), (2, 2)]
    assert len(t) == 5
    assert t.check() == []


def test_shared_subtrees_are_visited_once():
    shared = branch(0, [leaf(0), leaf(1)])
    t = SequenceTrie([branch(0, [shared]), branch(1, [shared])], 2)
    assert t.count() == 4
    assert sum(1 for _ in t.nodes()) == 5


def test_check_reports_problems():
    bad = Node(0, (leaf(1), leaf(1)), 1, 3)
    problems = SequenceTrie([bad], 2).check()
    assert any("duplicate" in p for p in problems)
    assert any("wrong count" in p for p in problems)
    dead = Node(0, (), 1, 0)
    assert any("dead end" in p for p in SequenceTrie([dead], 2).check())


def test_constructor_errors():
    with pytest.raises(ValueError):
        branch(0, [])
    with pytest.raises(ValueError):
        branch(0, [leaf(0), complete(1, 1, 2)])
    with pytest.raises(ValueError):
        SequenceTrie([leaf(0), complete(1, 1, 2)], 2)
    with pytest.raises(ValueError):
        SequenceTrie([], 2)
    assert SequenceTrie([], 2, length=3).count() == 0


def test_complete_equals_product():
    t = SequenceTrie([complete(s, 2, 3) for s in range(3)], 3)
    assert t.to_set() == set(itertools.product(range(3), repeat=3))
    assert t.roots[0].children is COMPLETE
