"""Prefix trees over state sequences.

A set of equal-length state sequences is stored as a forest of :class:`Node`
objects, one root per first state.  A node whose ``children`` is
:data:`COMPLETE` stands for *every* continuation of its prefix; it is never
expanded unless a caller asks for the individual sequences.

Nodes are immutable and may be shared between tries: extending a set by a
head state adds one node that points at the existing roots.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence


class _Complete:
    __slots__ = ()

    def __repr__(self) -> str:
        return "COMPLETE"


COMPLETE = _Complete()


class Node:
    """One state in a sequence trie.

    ``height`` is the number of levels below this node (0 for a leaf) and
    ``count`` the exact number of sequences the node represents.  ``floor``
    is free for the decoder to attach a lower bound on the suffix weight of
    every represented sequence; the trie itself never reads it.
    """

    __slots__ = ("state", "children", "height", "count", "floor")

    def __init__(self, state: int, children, height: int, count: int, floor=None):
        self.state = state
        self.children = children
        self.height = height
        self.count = count
        self.floor = floor

    @property
    def is_complete(self) -> bool:
        return self.children is COMPLETE

    @property
    def is_leaf(self) -> bool:
        return self.height == 0

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"Node({self.state})"
        if self.is_complete:
            return f"Node({self.state}, COMPLETE, height={self.height})"
        return f"Node({self.state}, {len(self.children)} children, count={self.count})"


def leaf(state: int, floor=None) -> Node:
    return Node(state, (), 0, 1, floor)


def complete(state: int, height: int, n_states: int, floor=None) -> Node:
    """Node for ``state`` followed by all ``n_states**height`` continuations."""
    if height == 0:
        return leaf(state, floor)
    return Node(state, COMPLETE, height, n_states**height, floor)


def branch(state: int, children: Sequence[Node], floor=None) -> Node:
    """Node with explicit children (sorted by state, no duplicates)."""
    children = tuple(children)
    if not children:
        raise ValueError("a branch node needs at least one child")
    height = children[0].height + 1
    for c in children:
        if c.height != height - 1:
            raise ValueError("children of one node must have equal height")
    return Node(state, children, height, sum(c.count for c in children), floor)


def _node_sequences(node: Node, n_states: int) -> Iterator[tuple[int, ...]]:
    # explicit stack keeps long chains clear of the recursion limit
    stack: list[tuple[tuple[int, ...], Node]] = [((node.state,), node)]
    while stack:
        prefix, cur = stack.pop()
        if cur.height == 0:
            yield prefix
        elif cur.children is COMPLETE:
            for tail in itertools.product(range(n_states), repeat=cur.height):
                yield prefix + tail
        else:
            for child in reversed(cur.children):
                stack.append((prefix + (child.state,), child))


class SequenceTrie:
    """A set of state sequences of one length, as a forest of roots."""

    __slots__ = ("roots", "n_states", "length")

    def __init__(self, roots: Iterable[Node], n_states: int, length: int | None = None):
        roots = tuple(sorted(roots, key=lambda r: r.state))
        if length is None:
            if not roots:
                raise ValueError("length is required for an empty trie")
            length = roots[0].height + 1
        for r in roots:
            if r.height + 1 != length:
                raise ValueError("all roots must represent sequences of the same length")
        self.roots = roots
        self.n_states = n_states
        self.length = length

    @classmethod
    def from_sequences(cls, seqs: Iterable[Sequence[int]], n_states: int) -> SequenceTrie:
        """Build an explicit trie (no sentinels) from a collection of sequences."""
        seqs = sorted(set(tuple(s) for s in seqs))
        if not seqs:
            raise ValueError("cannot infer length of an empty sequence collection")
        length = len(seqs[0])
        if any(len(s) != length for s in seqs):
            raise ValueError("sequences must have equal length")

        def build(group: list[tuple[int, ...]], depth: int) -> list[Node]:
            out = []
            for state, sub in itertools.groupby(group, key=lambda s: s[depth]):
                sub = list(sub)
                if depth == length - 1:
                    out.append(leaf(state))
                else:
                    out.append(branch(state, build(sub, depth + 1)))
            return out

        return cls(build(seqs, 0), n_states, length)

    def count(self) -> int:
        return sum(r.count for r in self.roots)

    def __len__(self) -> int:
        return self.count()

    def sequences(self) -> Iterator[tuple[int, ...]]:
        """All represented sequences in lexicographic state-index order."""
        for r in self.roots:
            yield from _node_sequences(r, self.n_states)

    def __iter__(self):
        return self.sequences()

    def to_set(self) -> set[tuple[int, ...]]:
        return set(self.sequences())

    def __contains__(self, seq) -> bool:
        seq = tuple(seq)
        if len(seq) != self.length:
            return False
        level: tuple[Node, ...] = self.roots
        for depth, state in enumerate(seq):
            found = None
            for node in level:
                if node.state == state:
                    found = node
                    break
            if found is None:
                return False
            if found.children is COMPLETE:
                return all(0 <= s < self.n_states for s in seq[depth + 1 :])
            level = found.children
        return True

    def has_sentinels(self) -> bool:
        return any(n.children is COMPLETE for n in self.nodes())

    def nodes(self) -> Iterator[Node]:
        """Distinct nodes reachable from the roots (shared nodes once)."""
        seen: set[int] = set()
        stack = list(self.roots)
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            if node.children is not COMPLETE:
                stack.extend(node.children)

    def check(self) -> list[str]:
        """Structural problems: dead ends, duplicate children, bad heights or counts."""
        problems = []
        if len({r.state for r in self.roots}) != len(self.roots):
            problems.append("duplicate root states")
        for node in self.nodes():
            if node.height == 0:
                if node.children not in ((), COMPLETE) or node.count != 1:
                    problems.append(f"malformed leaf {node!r}")
                continue
            if node.children is COMPLETE:
                if node.count != self.n_states**node.height:
                    problems.append(f"wrong count on sentinel {node!r}")
                continue
            if not node.children:
                problems.append(f"dead end at {node!r}")
                continue
            states = [c.state for c in node.children]
            if len(set(states)) != len(states):
                problems.append(f"duplicate child states under {node!r}")
            if states != sorted(states):
                problems.append(f"children out of order under {node!r}")
            if any(c.height != node.height - 1 for c in node.children):
                problems.append(f"height mismatch under {node!r}")
            if node.count != sum(c.count for c in node.children):
                problems.append(f"wrong count on {node!r}")
        return problems

    def __repr__(self) -> str:
        return f"SequenceTrie(count={self.count()}, length={self.length})"


def count_sequences(trie) -> int:
    """Exact number of sequences in a trie, node, or forest of nodes.

    Sentinel subtrees contribute ``n_states**height`` without enumeration.
    """
    if isinstance(trie, SequenceTrie):
        return trie.count()
    if isinstance(trie, Node):
        return trie.count
    return sum(n.count for n in trie)
