from __future__ import annotations

import random
from fractions import Fraction

import pytest

from estihmm.model import Alphabet, ImpreciseHMM, IntervalRow, precise_model, validate

ACCEPTANCE_LINES: list[str] = []


def random_probs(rng: random.Random, size: int, zero_rate: float = 0.3) -> list[Fraction]:
    """Rational probability vector with denominators up to 60; some entries may be 0."""
    w = [0 if rng.random() < zero_rate else rng.randint(1, 6) for _ in range(size)]
    if not any(w):
        w[rng.randrange(size)] = 1
    tot = sum(w)
    return [Fraction(v, tot) for v in w]


def random_row(rng: random.Random, size: int) -> IntervalRow:
    """Contaminated rational row; with some probability it is precise or has zero lowers."""
    p = random_probs(rng, size)
    eps = Fraction(rng.choice([0, 0, 1, 1, 2, 3, 5]), 10)
    lo = [(1 - eps) * v for v in p]
    up = [v + eps for v in lo]
    # positivity: a zero upper can only arise with eps == 0
    up = [u if u > 0 else Fraction(1, 20) for u in up]
    return IntervalRow(lo, up)


def random_imprecise(rng: random.Random, n_states: int, n_outputs: int, n: int) -> ImpreciseHMM:
    while True:
        model = ImpreciseHMM(
            Alphabet([str(i) for i in range(n_states)]),
            Alphabet([chr(97 + i) for i in range(n_outputs)]),
            n,
            random_row(rng, n_states),
            tuple(random_row(rng, n_states) for _ in range(n_states)),
            tuple(random_row(rng, n_outputs) for _ in range(n_states)),
        )
        if validate(model).ok:
            return model


def random_precise(rng: random.Random, n_states: int, n_outputs: int, n: int, zero_rate=0.0):
    """Precise model with strictly positive entries unless ``zero_rate`` > 0."""
    while True:
        states = [str(i) for i in range(n_states)]
        outputs = [chr(97 + i) for i in range(n_outputs)]
        model = precise_model(
            states,
            outputs,
            n,
            random_probs(rng, n_states, zero_rate),
            [random_probs(rng, n_states, zero_rate) for _ in states],
            [random_probs(rng, n_outputs, zero_rate) for _ in states],
        )
        if validate(model).ok:
            return model


def random_obs(rng: random.Random, model: ImpreciseHMM) -> list[int]:
    return [rng.randrange(model.n_outputs) for _ in range(model.n)]


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def emit(tag: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
