"""Exact maximal-sequence decoding for imprecise HMMs.

The decoder runs backward over the chain.  For every position ``k`` and
conditioning state ``z`` it builds a candidate set (each head state followed
by the optimal suffixes of the next level, or by *all* suffixes when the head
has zero lower probability) and keeps the candidates whose upper suffix
weight reaches a per-head bar.  The bar is pushed down the trie one level at
a time, so a whole subtree is accepted or rejected without visiting its
sequences whenever the bounds already decide it.

Positions are 1-indexed; position 1 is conditioned on a single dummy state,
addressed as ``z_prev=None`` (or 0).
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Sequence

from .model import ImpreciseHMM, ModelValidationError, validate
from .numerics import ComparePolicy, resolve_backend
from .trie import COMPLETE, Node, SequenceTrie, branch, complete, count_sequences, leaf

__all__ = [
    "DecodePrep",
    "DecodeResult",
    "prepare",
    "threshold",
    "backward_maxima",
    "alpha_opt",
    "alpha_opt_extend",
    "pos_set",
    "build_candidates",
    "optimal_tree_construction",
    "decode",
    "count_sequences",
]


def _z(z_prev) -> int:
    return 0 if z_prev is None else z_prev


METHODS = ("backward", "topdown")


class DecodePrep:
    """Lifted local bounds and the backward tables of one (model, obs) pair.

    Every table is indexed by position ``k`` (1..n; index 0 unused):

    * ``e_upper[k][x]``, ``e_lower[k][x]``: emission bounds of ``o_k``;
    * ``q_upper[k][z][x]``, ``q_lower[k][z][x]``: state bounds, one row for
      ``k == 1``;
    * ``amax[k][x]`` / ``bmax[k][x]``: best upper / lower suffix weight from
      ``x`` at ``k``; ``amin[k][x]`` the worst upper suffix weight;
    * ``aopt[k][z][x]``: the bar head ``x`` must reach given ``z``;
    * ``pos[k][z]``: heads with positive lower state and emission bounds.
    """

    def __init__(self, model: ImpreciseHMM, obs: Sequence[int], backend):
        self.model = model
        self.backend = backend
        self.obs = tuple(obs)
        n = self.n = model.n
        ns = self.n_states = model.n_states
        lift = backend.lift
        cache: dict[int, tuple] = {}

        def lifted(row):
            # keyed by identity: stationary tables repeat the same row objects
            hit = cache.get(id(row))
            if hit is None:
                hit = (row, tuple(lift(v) for v in row.lower), tuple(lift(v) for v in row.upper))
                cache[id(row)] = hit
            return hit[1], hit[2]

        e_lower = [None] * (n + 1)
        e_upper = [None] * (n + 1)
        q_lower = [None] * (n + 1)
        q_upper = [None] * (n + 1)
        for k in range(1, n + 1):
            o = self.obs[k - 1]
            lo_row, up_row = [], []
            for x in range(ns):
                lo, up = lifted(model.emission_row(k, x))
                lo_row.append(lo[o])
                up_row.append(up[o])
            e_lower[k], e_upper[k] = lo_row, up_row
            conds = [None] if k == 1 else range(ns)
            ql, qu = [], []
            for z in conds:
                lo, up = lifted(model.state_row(k, z))
                ql.append(lo)
                qu.append(up)
            q_lower[k], q_upper[k] = ql, qu
        self.e_lower, self.e_upper = e_lower, e_upper
        self.q_lower, self.q_upper = q_lower, q_upper

        maximum, minimum = backend.maximum, backend.minimum
        amax = [None] * (n + 1)
        bmax = [None] * (n + 1)
        amin = [None] * (n + 1)
        amax[n], bmax[n], amin[n] = list(e_upper[n]), list(e_lower[n]), list(e_upper[n])
        for k in range(n - 1, 0, -1):
            qu, ql = q_upper[k + 1], q_lower[k + 1]
            amax[k] = [
                e_upper[k][x] * maximum(qu[x][z] * amax[k + 1][z] for z in range(ns))
                for x in range(ns)
            ]
            bmax[k] = [
                e_lower[k][x] * maximum(ql[x][z] * bmax[k + 1][z] for z in range(ns))
                for x in range(ns)
            ]
            amin[k] = [
                e_upper[k][x] * minimum(qu[x][z] * amin[k + 1][z] for z in range(ns))
                for x in range(ns)
            ]
        self.amax, self.bmax, self.amin = amax, bmax, amin

        is_zero = backend.is_zero
        cmp = backend.cmp
        zero = backend.zero
        aopt = [None] * (n + 1)
        pos = [None] * (n + 1)
        for k in range(1, n + 1):
            per_z, pos_z = [], []
            for z_row in range(len(q_lower[k])):
                ql, qu = q_lower[k][z_row], q_upper[k][z_row]
                # best competitor weight bmax*lower; the bar for x_hat is the
                # best weight over x != x_hat, divided by its upper bound
                weights = [bmax[k][x] * ql[x] for x in range(ns)]
                first = second = None
                for x in range(ns):
                    if first is None or cmp(weights[x], weights[first]) > 0:
                        first, second = x, first
                    elif second is None or cmp(weights[x], weights[second]) > 0:
                        second = x
                row = []
                for xh in range(ns):
                    best = second if xh == first else first
                    row.append(zero if best is None else weights[best] / qu[xh])
                per_z.append(row)
                pos_z.append(
                    frozenset(
                        x for x in range(ns) if not is_zero(ql[x]) and not is_zero(e_lower[k][x])
                    )
                )
            aopt[k], pos[k] = per_z, pos_z
        self.aopt, self.pos = aopt, pos
        self._complete_cache: dict[tuple[int, int], Node] = {}

    def threshold(self, k: int, z_prev, x: int, x_hat: int):
        z = _z(z_prev)
        return self.q_lower[k][z][x] / self.q_upper[k][z][x_hat]

    def complete_node(self, state: int, k: int) -> Node:
        """Sentinel for ``state`` at position ``k`` followed by every suffix."""
        key = (state, k)
        node = self._complete_cache.get(key)
        if node is None:
            node = complete(state, self.n - k, self.n_states, self.amin[k][state])
            self._complete_cache[key] = node
        return node


def prepare(model: ImpreciseHMM, obs, backend="log", policy=None) -> DecodePrep:
    """Encode ``obs`` and compute the backward tables (no validation)."""
    return DecodePrep(model, model.encode_obs(obs), resolve_backend(backend, policy))


def threshold(model: ImpreciseHMM, k: int, z_prev, x: int, x_hat: int, backend="log"):
    """Lower state bound of ``x`` over upper state bound of ``x_hat`` at ``k``."""
    b = resolve_backend(backend)
    row = model.state_row(k, _z(z_prev) if k > 1 else None)
    num = b.lift(row.lower[x])
    if b.is_zero(num):
        return b.zero
    return num / b.lift(row.upper[x_hat])


def backward_maxima(model: ImpreciseHMM, obs, backend="log"):
    """``(amax, bmax)``: best upper and lower suffix weights, indexed ``[k][x]``."""
    prep = prepare(model, obs, backend)
    return prep.amax, prep.bmax


def alpha_opt(prep: DecodePrep, k: int, z_prev, x_hat: int):
    return prep.aopt[k][_z(z_prev)][x_hat]


def alpha_opt_extend(prep: DecodePrep, s: int, prev_state: int, state: int, previous):
    """Push a bar from position ``s-1`` (state ``prev_state``) to ``s`` (``state``)."""
    return previous / (prep.e_upper[s - 1][prev_state] * prep.q_upper[s][prev_state][state])


def pos_set(model: ImpreciseHMM, obs, k: int, z_prev, backend="log") -> frozenset:
    prep = prepare(model, obs, backend)
    return prep.pos[k][_z(z_prev)]


def _head_node(prep: DecodePrep, k: int, x: int, suffix_roots) -> Node | None:
    """``x`` followed by the given suffix roots at position ``k+1``."""
    if k == prep.n:
        return leaf(x, prep.e_upper[k][x])
    if not suffix_roots:
        return None
    qu = prep.q_upper[k + 1][x]
    floor = prep.e_upper[k][x] * prep.backend.minimum(qu[c.state] * c.floor for c in suffix_roots)
    return branch(x, suffix_roots, floor)


def _head_candidates(prep: DecodePrep, k: int, opt_next) -> tuple[list, list]:
    """Per-head candidate nodes for heads inside and outside the pos-set."""
    ns = prep.n_states
    inside = [_head_node(prep, k, x, opt_next[x] if opt_next is not None else ()) for x in range(ns)]
    if k == prep.n:
        outside = inside
    else:
        outside = [prep.complete_node(x, k) for x in range(ns)]
    return inside, outside


def build_candidates(prep: DecodePrep, k: int, z_prev, opt_next=None) -> SequenceTrie:
    """Candidate set at ``k`` given ``z_prev``.

    ``opt_next[x]`` holds the optimal roots at ``k+1`` given state ``x`` (a
    :class:`SequenceTrie` or a sequence of root nodes); unused for ``k == n``.
    """
    if opt_next is not None:
        opt_next = [t.roots if isinstance(t, SequenceTrie) else tuple(t) for t in opt_next]
    inside, outside = _head_candidates(prep, k, opt_next)
    pos = prep.pos[k][_z(z_prev)]
    roots = [inside[x] if x in pos else outside[x] for x in range(prep.n_states)]
    return SequenceTrie([r for r in roots if r is not None], prep.n_states, prep.n - k + 1)


class _Filter:
    """Depth-first bar propagation over one candidate forest."""

    def __init__(self, prep: DecodePrep):
        self.prep = prep
        self.geq = prep.backend.geq
        self.is_zero = prep.backend.is_zero
        self.minimum = prep.backend.minimum
        self.dead_ends = 0
        self.nodes_created = 0
        self.nodes_visited = 0

    def subtree(self, node: Node, s: int, bar) -> Node | None:
        """Part of ``node`` (at position ``s``, already accepted) meeting ``bar``."""
        self.nodes_visited += 1
        if node.height == 0:
            return node
        if self.is_zero(bar) or self.geq(node.floor, bar):
            # every represented sequence clears the bar, so every check below passes
            return node
        prep = self.prep
        x = node.state
        e_up = prep.e_upper[s][x]
        q_up = prep.q_upper[s + 1][x]
        amax_next = prep.amax[s + 1]
        expanded = node.children is COMPLETE
        if expanded:
            children = [prep.complete_node(c, s + 1) for c in range(prep.n_states)]
        else:
            children = node.children
        kept = []
        changed = expanded
        for child in children:
            child_bar = bar / (e_up * q_up[child.state])
            if not self.geq(amax_next[child.state], child_bar):
                changed = True
                continue
            sub = self.subtree(child, s + 1, child_bar)
            if sub is None:
                changed = True
                continue
            if sub is not child:
                changed = True
            kept.append(sub)
        if not kept:
            # cannot happen in exact arithmetic; rounding at a tie can cause it
            self.dead_ends += 1
            return None
        if not changed:
            return node
        self.nodes_created += 1
        floor = e_up * self.minimum(q_up[c.state] * c.floor for c in kept)
        return branch(x, kept, floor)

    def heads(self, candidates: Sequence[Node], k: int, z: int) -> list[Node]:
        prep = self.prep
        bars = prep.aopt[k][z]
        amax = prep.amax[k]
        out = []
        for node in candidates:
            bar = bars[node.state]
            if not self.geq(amax[node.state], bar):
                continue
            sub = self.subtree(node, k, bar)
            if sub is not None:
                out.append(sub)
        return out


class _TopDown:
    """Forward depth-first construction of the maximal set.

    Unrolling the backward recursion, ``x`` is maximal iff its upper suffix
    weight from ``k`` reaches ``aopt[k][x_{k-1}][x_k]`` for every ``k`` up to
    and including the first head outside the pos-set.  All those bars share
    one suffix, so a prefix carries the largest of them (rescaled to the
    current position).  Completing an accepted prefix with its best upper
    suffix meets every later bar too, so no explored prefix is a dead end.
    """

    def __init__(self, prep: DecodePrep):
        self.prep = prep
        be = prep.backend
        self.geq = be.geq
        self.cmp = be.cmp
        self.is_zero = be.is_zero
        self.dead_ends = 0
        self.nodes_created = 0
        self.nodes_visited = 0

    def node(self, s: int, x: int, z: int, bar, active: bool) -> Node | None:
        """Maximal continuations of a prefix ending in ``x`` at ``s``."""
        self.nodes_visited += 1
        prep = self.prep
        if active:
            own = prep.aopt[s][z][x]
            if self.cmp(own, bar) > 0:
                bar = own
        if not self.geq(prep.amax[s][x], bar):
            return None
        if s == prep.n:
            self.nodes_created += 1
            return leaf(x, prep.e_upper[s][x])
        still = active and x in prep.pos[s][z]
        if not still and (self.is_zero(bar) or self.geq(prep.amin[s][x], bar)):
            return prep.complete_node(x, s)
        e_up = prep.e_upper[s][x]
        q_up = prep.q_upper[s + 1][x]
        kept = []
        for c in range(prep.n_states):
            sub = self.node(s + 1, c, x, bar / (e_up * q_up[c]), still)
            if sub is not None:
                kept.append(sub)
        if not kept:
            self.dead_ends += 1
            return None
        self.nodes_created += 1
        return branch(x, kept)

    def roots(self) -> list[Node]:
        zero = self.prep.backend.zero
        out = []
        for x in range(self.prep.n_states):
            r = self.node(1, x, 0, zero, True)
            if r is not None:
                out.append(r)
        return out


def optimal_tree_construction(
    candidates: SequenceTrie, prep: DecodePrep, k: int, z_prev
) -> SequenceTrie:
    """Subset of ``candidates`` that is optimal at ``k`` given ``z_prev``."""
    f = _Filter(prep)
    roots = f.heads(candidates.roots, k, _z(z_prev))
    return SequenceTrie(roots, prep.n_states, prep.n - k + 1)


@dataclass(frozen=True)
class DecodeResult:
    trie: SequenceTrie
    count: int
    diagnostics: dict = field(default_factory=dict)

    def sequences(self):
        return self.trie.sequences()

    def to_set(self) -> set[tuple[int, ...]]:
        return self.trie.to_set()

    def labelled(self, model: ImpreciseHMM) -> list[str]:
        return [model.states.join(seq) for seq in self.trie.sequences()]


def decode(
    model: ImpreciseHMM,
    obs,
    policy: ComparePolicy | float | None = None,
    backend="log",
    check: bool = True,
    method: str = "backward",
) -> DecodeResult:
    """All maximal state sequences for ``obs``.

    ``policy`` sets the tie tolerance of the log backend (default: exact).
    ``backend="rational"`` computes in exact fractions.  With ``check`` the
    model is validated first and :class:`ModelValidationError` raised on
    failure.

    ``method="backward"`` builds the optimal sets for every position and
    conditioning state, last position first.  ``method="topdown"`` searches
    forward from the first position and only touches prefixes of maximal
    sequences; both return the same set.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if check:
        report = validate(model)
        if not report.ok:
            raise ModelValidationError(report)
    if isinstance(policy, (int, float)):
        policy = ComparePolicy(float(policy))
    be = resolve_backend(backend, policy)
    enc = model.encode_obs(obs)
    t0 = time.perf_counter()
    prep = DecodePrep(model, enc, be)
    t1 = time.perf_counter()

    n, ns = prep.n, prep.n_states
    needed = 3 * n + 200
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)

    if method == "topdown":
        f = _TopDown(prep)
        trie = SequenceTrie(f.roots(), ns, n)
        t2 = time.perf_counter()
        return DecodeResult(trie, trie.count(), _diagnostics(be, method, f, t0, t1, t2, None))

    f = _Filter(prep)
    opt_next = None
    candidates_total = 0
    for k in range(n, 0, -1):
        inside, outside = _head_candidates(prep, k, opt_next)
        conds = range(len(prep.q_upper[k]))
        level = []
        for z in conds:
            pos = prep.pos[k][z]
            cands = [inside[x] if x in pos else outside[x] for x in range(ns)]
            cands = [c for c in cands if c is not None]
            candidates_total += sum(c.count for c in cands)
            level.append(tuple(f.heads(cands, k, z)))
        opt_next = level
    t2 = time.perf_counter()

    trie = SequenceTrie(opt_next[0], ns, n)
    return DecodeResult(
        trie, trie.count(), _diagnostics(be, method, f, t0, t1, t2, candidates_total)
    )


def _diagnostics(be, method, f, t0, t1, t2, candidates) -> dict:
    return {
        "method": method,
        "backend": be.name,
        "tie_tolerance": getattr(getattr(be, "policy", None), "tie_tolerance", None),
        "prep_seconds": t1 - t0,
        "search_seconds": t2 - t1,
        "nodes_visited": f.nodes_visited,
        "nodes_created": f.nodes_created,
        "dead_ends": f.dead_ends,
        "candidates_represented": candidates,
    }
