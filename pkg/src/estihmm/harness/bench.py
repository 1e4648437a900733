"""Wall-clock scaling of the decoder."""

from __future__ import annotations

import random
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..engine import decode
from ..model import ImpreciseHMM, linear_vacuous, precise_model


@dataclass(frozen=True)
class BenchTable:
    label: str
    params: tuple
    seconds: tuple
    counts: tuple
    slope: float

    def lines(self) -> list[str]:
        out = [f"{self.label:>8}  {'seconds':>12}  {'count':>6}"]
        for p, t, c in zip(self.params, self.seconds, self.counts):
            out.append(f"{p:>8}  {t:>12.6f}  {c:>6}")
        out.append(f"log-log slope: {self.slope:.3f}")
        return out


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)


def sample_observation(model: ImpreciseHMM, rng: random.Random) -> list[int]:
    """Draw an output sequence from the lower bounds of a precise model."""
    out = []
    x = rng.choices(range(model.n_states), weights=[float(v) for v in model.marginal.lower])[0]
    for k in range(1, model.n + 1):
        if k > 1:
            row = model.state_row(k, x)
            x = rng.choices(range(model.n_states), weights=[float(v) for v in row.lower])[0]
        e = model.emission_row(k, x)
        out.append(rng.choices(range(model.n_outputs), weights=[float(v) for v in e.lower])[0])
    return out


def near_precise_case(n: int, n_states: int = 2, seed: int = 0, eps=Fraction(1, 10**6)):
    """A sticky, reliable-emission model with tiny contamination, plus an observation.

    Rows are drawn from a seeded generator, so probabilities are distinct and
    exact ties between sequences are not expected.
    """
    rng = random.Random(seed * 1000 + n_states)

    def row(home: int | None, size: int, bias: float):
        w = [rng.uniform(0.5, 1.5) for _ in range(size)]
        if home is not None:
            w[home] += bias * size
        tot = sum(w)
        vals = [Fraction(v / tot).limit_denominator(10**6) for v in w]
        vals[-1] = 1 - sum(vals[:-1])
        return vals

    states = [f"s{i}" for i in range(n_states)]
    base = precise_model(
        states,
        states,
        n,
        row(None, n_states, 0),
        [row(i, n_states, 1.0) for i in range(n_states)],
        [row(i, n_states, 4.0) for i in range(n_states)],
    )
    model = linear_vacuous(base, eps, eps, eps)
    obs = sample_observation(base, rng)
    return model, obs


def bench_scaling(
    make_case: Callable[[int], tuple],
    params: Sequence[int],
    repetitions: int = 3,
    label: str = "n",
    slope_limit: float | None = None,
) -> BenchTable:
    """Best-of-``repetitions`` decode time for each parameter value.

    ``make_case(param)`` returns ``(model, obs)``.  When ``slope_limit`` is
    given and the fitted log-log slope exceeds it, a warning is issued.
    """
    secs, counts = [], []
    for p in params:
        model, obs = make_case(p)
        best = float("inf")
        count = None
        for _ in range(max(1, repetitions)):
            t0 = time.perf_counter()
            res = decode(model, obs, check=False)
            best = min(best, time.perf_counter() - t0)
            count = res.count
        secs.append(best)
        counts.append(count)
    slope = loglog_slope(params, secs)
    if slope_limit is not None and slope > slope_limit:
        warnings.warn(
            f"decode time grows with slope {slope:.2f} in {label}, above {slope_limit}",
            RuntimeWarning,
            stacklevel=2,
        )
    return BenchTable(label, tuple(params), tuple(secs), tuple(counts), slope)


def bench_length(ns=(100, 200, 400), n_states: int = 2, repetitions: int = 3, slope_limit=2.3):
    return bench_scaling(
        lambda n: near_precise_case(n, n_states), ns, repetitions, "n", slope_limit
    )


def bench_states(sizes=(2, 4, 8), n: int = 50, repetitions: int = 3, slope_limit=3.3):
    return bench_scaling(
        lambda k: near_precise_case(n, k), sizes, repetitions, "states", slope_limit
    )
