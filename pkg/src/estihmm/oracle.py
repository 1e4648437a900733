"""Brute-force reference computations.

Nothing here shares code with the decoder beyond the model and the numeric
backends: dominance is evaluated straight from products of local bounds over
explicitly enumerated sequences.  Intended for small instances only.
"""

from __future__ import annotations

import enum
import itertools
from typing import Sequence

from .model import ImpreciseHMM, ModelError, check_precise
from .numerics import ComparePolicy, EXACT, resolve_backend, signed_product2

MAX_PAIRS = 10**6
MAX_SEQUENCES = 10**6


class OracleTooLarge(RuntimeError):
    """The requested enumeration exceeds the oracle's size guard."""


class DominanceSign(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _lifted_factors(model: ImpreciseHMM, obs: Sequence[int], seq: Sequence[int], k: int, z_prev, be):
    """Per-position ``(lower, upper)`` of state-bound times emission-bound."""
    out = []
    prev = z_prev
    for i, (x, o) in enumerate(zip(seq, obs[k - 1 :]), start=k):
        q = model.state_row(i, prev if i > 1 else None)
        e = model.emission_row(i, x)
        out.append(
            (be.lift(q.lower[x]) * be.lift(e.lower[o]), be.lift(q.upper[x]) * be.lift(e.upper[o]))
        )
        prev = x
    return out


def _check_lengths(model: ImpreciseHMM, obs, *seqs, k: int = 1):
    want = model.n - k + 1
    for s in seqs:
        if len(s) != want:
            raise ModelError(f"sequence has length {len(s)}, expected {want}")


def joint_interval_mass(model: ImpreciseHMM, obs, seq, k: int = 1, z_prev=None, backend="log"):
    """Lower and upper joint mass of ``seq`` (from position ``k``) and ``obs``."""
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    seq = tuple(seq)
    _check_lengths(model, enc, seq, k=k)
    lo, up = be.one, be.one
    for fl, fu in _lifted_factors(model, enc, seq, k, z_prev, be):
        lo, up = lo * fl, up * fu
    return lo, up


def _suffix_weight(model: ImpreciseHMM, enc, seq, k: int, upper: bool, be):
    """Emission at ``k`` times state-and-emission bounds for ``k+1..n``.

    Upper bounds give the optimistic weight of a suffix, lower bounds the
    pessimistic one.
    """
    pick = (lambda r: r.upper) if upper else (lambda r: r.lower)
    w = be.lift(pick(model.emission_row(k, seq[0]))[enc[k - 1]])
    for j in range(1, len(seq)):
        i = k + j
        w = w * be.lift(pick(model.state_row(i, seq[j - 1]))[seq[j]])
        w = w * be.lift(pick(model.emission_row(i, seq[j]))[enc[i - 1]])
    return w


def upper_suffix(model, obs, seq, k: int, backend="log"):
    """Product of upper emission and transition bounds along ``seq`` from ``k``."""
    be = resolve_backend(backend)
    return _suffix_weight(model, model.encode_obs(obs), tuple(seq), k, True, be)


def lower_suffix(model, obs, seq, k: int, backend="log"):
    be = resolve_backend(backend)
    return _suffix_weight(model, model.encode_obs(obs), tuple(seq), k, False, be)


def upper_suffix_recursive(model, obs, seq, k: int, backend="log"):
    """Same as :func:`upper_suffix`, built back to front one factor at a time."""
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    seq = tuple(seq)
    n = model.n
    w = be.lift(model.emission_row(n, seq[-1]).upper[enc[n - 1]])
    for i in range(n - 1, k - 1, -1):
        x, nxt = seq[i - k], seq[i - k + 1]
        w = (
            be.lift(model.emission_row(i, x).upper[enc[i - 1]])
            * be.lift(model.state_row(i + 1, x).upper[nxt])
            * w
        )
    return w


def lower_suffix_recursive(model, obs, seq, k: int, backend="log"):
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    seq = tuple(seq)
    n = model.n
    w = be.lift(model.emission_row(n, seq[-1]).lower[enc[n - 1]])
    for i in range(n - 1, k - 1, -1):
        x, nxt = seq[i - k], seq[i - k + 1]
        w = (
            be.lift(model.emission_row(i, x).lower[enc[i - 1]])
            * be.lift(model.state_row(i + 1, x).lower[nxt])
            * w
        )
    return w


def _gamble_value(model, enc, x, x_hat, k, z_prev, be):
    """Lower prevision of ``I_obs * (I_x - I_x_hat)`` on positions ``k..n``."""
    row = model.state_row(k, z_prev if k > 1 else None)
    if x[0] == x_hat[0]:
        if len(x) == 1:
            return be.zero
        inner = _gamble_value(model, enc, x[1:], x_hat[1:], k + 1, x[0], be)
        e = model.emission_row(k, x[0])
        return signed_product2(
            be.lift(row.lower[x[0]]),
            be.lift(row.upper[x[0]]),
            be.lift(e.lower[enc[k - 1]]),
            be.lift(e.upper[enc[k - 1]]),
            inner,
        )
    gain = _suffix_weight(model, enc, x, k, False, be) * be.lift(row.lower[x[0]])
    loss = _suffix_weight(model, enc, x_hat, k, True, be) * be.lift(row.upper[x_hat[0]])
    return gain - loss


def dominance_value(model: ImpreciseHMM, obs, x, x_hat, backend="rational"):
    """Lower prevision whose sign decides whether ``x`` dominates ``x_hat``."""
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    x, x_hat = tuple(x), tuple(x_hat)
    _check_lengths(model, enc, x, x_hat)
    return _gamble_value(model, enc, x, x_hat, 1, None, be)


def _sign_shortcut(model, enc, x, x_hat, be) -> int:
    d = next((i for i, (a, b) in enumerate(zip(x, x_hat)) if a != b), None)
    if d is None:
        return 0
    k = d + 1
    z_prev = x[d - 1] if d else None
    row = model.state_row(k, z_prev if k > 1 else None)
    gain = _suffix_weight(model, enc, x[d:], k, False, be) * be.lift(row.lower[x[d]])
    loss = _suffix_weight(model, enc, x_hat[d:], k, True, be) * be.lift(row.upper[x_hat[d]])
    sign = be.cmp(gain, loss)
    if sign <= 0:
        # negative values only ever meet positive upper factors on the way back
        return sign
    for fl, _ in _lifted_factors(model, enc, x[:d], 1, None, be):
        if be.is_zero(fl):
            return 0
    return 1


def dominance_sign(
    model: ImpreciseHMM, obs, x, x_hat, backend="rational", method: str = "shortcut"
) -> DominanceSign:
    """Sign of the dominance value of ``x`` over ``x_hat``.

    POSITIVE means ``x_hat`` is strictly dominated by ``x``.  ``method`` is
    ``"shortcut"`` (sign at the first divergence, pushed back through the
    shared prefix) or ``"recursive"`` (evaluate the full signed value).
    """
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    x, x_hat = tuple(x), tuple(x_hat)
    _check_lengths(model, enc, x, x_hat)
    if method == "shortcut":
        return DominanceSign(_sign_shortcut(model, enc, x, x_hat, be))
    if method == "recursive":
        return DominanceSign(be.sign(_gamble_value(model, enc, x, x_hat, 1, None, be)))
    raise ValueError(f"unknown method {method!r}")


def _all_sequences(model: ImpreciseHMM):
    return itertools.product(range(model.n_states), repeat=model.n)


def brute_force_maximal(
    model: ImpreciseHMM, obs, backend="rational", method: str = "grouped"
) -> set[tuple[int, ...]]:
    """Every sequence not strictly dominated by another, by enumeration.

    ``"pairwise"`` tests all ordered pairs with :func:`dominance_sign` and is
    limited to :data:`MAX_PAIRS` pairs.  ``"grouped"`` computes the same
    relation with one pass per sequence: for each prefix and divergent head it
    keeps the best pessimistic competitor weight, so it is limited to
    :data:`MAX_SEQUENCES` sequences instead.
    """
    be = resolve_backend(backend)
    enc = model.encode_obs(obs)
    total = model.n_states**model.n
    if method == "pairwise":
        if total * total > MAX_PAIRS:
            raise OracleTooLarge(f"instance too large for oracle: {total * total} pairs")
        seqs = list(_all_sequences(model))
        return {
            xh
            for xh in seqs
            if not any(_sign_shortcut(model, enc, x, xh, be) > 0 for x in seqs if x != xh)
        }
    if method != "grouped":
        raise ValueError(f"unknown method {method!r}")
    if total > MAX_SEQUENCES:
        raise OracleTooLarge(f"instance too large for oracle: {total} sequences")
    return _grouped_maximal(model, enc, be)


def _grouped_maximal(model: ImpreciseHMM, enc, be) -> set[tuple[int, ...]]:
    n, ns = model.n, model.n_states
    lift = be.lift
    # lifted local bounds per position; state rows at position 1 use index 0
    ql, qu, el, eu = [None], [None], [None], [None]
    for k in range(1, n + 1):
        conds = [None] if k == 1 else range(ns)
        rows = [model.state_row(k, z) for z in conds]
        ql.append([[lift(v) for v in r.lower] for r in rows])
        qu.append([[lift(v) for v in r.upper] for r in rows])
        erows = [model.emission_row(k, x) for x in range(ns)]
        el.append([lift(r.lower[enc[k - 1]]) for r in erows])
        eu.append([lift(r.upper[enc[k - 1]]) for r in erows])

    seqs = list(itertools.product(range(ns), repeat=n))
    gain: dict[tuple[int, ...], object] = {}
    loss: dict[tuple[tuple[int, ...], int], object] = {}
    prefix_zero: dict[tuple[int, ...], bool] = {(): False}
    for seq in seqs:
        low, up = el[n][seq[-1]], eu[n][seq[-1]]
        for d in range(n - 1, -1, -1):
            k = d + 1
            if d < n - 1:
                low = el[k][seq[d]] * ql[k + 1][seq[d]][seq[d + 1]] * low
                up = eu[k][seq[d]] * qu[k + 1][seq[d]][seq[d + 1]] * up
            z = seq[d - 1] if d else 0
            g = low * ql[k][z][seq[d]]
            key = seq[: d + 1]
            best = gain.get(key)
            if best is None or be.cmp(g, best) > 0:
                gain[key] = g
            loss[(seq, d)] = up * qu[k][z][seq[d]]
        zero = False
        for d in range(n):
            z = seq[d - 1] if d else 0
            zero = zero or be.is_zero(ql[d + 1][z][seq[d]]) or be.is_zero(el[d + 1][seq[d]])
            prefix_zero[seq[: d + 1]] = zero
    out = set()
    for xh in seqs:
        dominated = False
        for d in range(n):
            if prefix_zero[xh[:d]]:
                break
            bar = loss[(xh, d)]
            for a in range(ns):
                if a != xh[d] and be.cmp(gain[xh[:d] + (a,)], bar) > 0:
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            out.add(xh)
    return out


def viterbi_all_ties(
    model: ImpreciseHMM, obs, policy: ComparePolicy | float | None = None, backend="log"
) -> set[tuple[int, ...]]:
    """Every state sequence of maximal joint probability under a precise model.

    Max-product recursion keeping *all* back-pointers that attain the max
    (ties judged by the backend, with ``policy`` as log-domain tolerance).
    """
    check_precise(model)
    if isinstance(policy, (int, float)):
        policy = ComparePolicy(float(policy))
    be = resolve_backend(backend, policy if policy is not None else EXACT)
    enc = model.encode_obs(obs)
    n, ns = model.n, model.n_states
    lift = be.lift
    score = [
        lift(model.marginal.lower[x]) * lift(model.emission_row(1, x).lower[enc[0]])
        for x in range(ns)
    ]
    back: list[list[list[int]]] = []
    for k in range(2, n + 1):
        new_score, ptrs = [], []
        for x in range(ns):
            emit = lift(model.emission_row(k, x).lower[enc[k - 1]])
            cands = [score[z] * lift(model.state_row(k, z).lower[x]) for z in range(ns)]
            best = be.maximum(cands)
            ptrs.append([z for z in range(ns) if be.cmp(cands[z], best) == 0])
            new_score.append(best * emit)
        score = new_score
        back.append(ptrs)
    best = be.maximum(score)
    finals = [x for x in range(ns) if be.cmp(score[x], best) == 0]
    out: set[tuple[int, ...]] = set()
    stack = [(x, n, (x,)) for x in finals]
    while stack:
        x, k, tail = stack.pop()
        if k == 1:
            out.add(tail)
            continue
        for z in back[k - 2][x]:
            stack.append((z, k - 1, (z,) + tail))
    return out


def map_sequence(model: ImpreciseHMM, obs, backend="log") -> tuple[int, ...]:
    """Lexicographically first sequence of maximal joint probability."""
    return min(viterbi_all_ties(model, obs, backend=backend))
