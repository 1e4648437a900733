"""Toy OCR correction: train letter HMMs from word pairs, compare decoders.

Words are uppercased maximal runs of letters.  Corruption is an i.i.d.
per-character substitution channel.  Training and evaluation use the same
word pairs, so reported rates describe fit, not generalisation.
"""

from __future__ import annotations

import csv
import io
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..engine import decode
from ..model import Alphabet, ImpreciseHMM, IntervalRow, idm_from_counts, perks_from_counts
from ..oracle import viterbi_all_ties

_WORD = re.compile(r"[^\W\d_]+")


def tokenize(text: str) -> list[str]:
    """Uppercased maximal runs of letters."""
    return [w.upper() for w in _WORD.findall(text)]


_ONSETS = ["", "B", "C", "D", "F", "G", "L", "M", "N", "P", "R", "S", "T", "V", "CH", "GR", "PR", "ST", "TR"]
_VOWELS = ["A", "E", "I", "O", "U", "IA", "IO", "UO"]
_CODAS = ["", "", "", "N", "R", "L", "S"]


def synthetic_corpus(n_words: int, seed: int = 0) -> list[str]:
    """Pronounceable pseudo-words built from weighted syllables.

    The letter statistics are uneven on purpose so that a trained model has
    real transition structure to exploit.
    """
    rng = random.Random(seed)
    onset_w = [3 if o in ("", "C", "D", "L", "N", "S", "T") else 1 for o in _ONSETS]
    vowel_w = [4, 4, 3, 4, 2, 1, 1, 1]
    words = []
    for _ in range(n_words):
        n_syll = rng.choices([1, 2, 3], weights=[3, 5, 2])[0]
        parts = []
        for i in range(n_syll):
            parts.append(rng.choices(_ONSETS, weights=onset_w)[0])
            parts.append(rng.choices(_VOWELS, weights=vowel_w)[0])
            if i == n_syll - 1:
                parts.append(rng.choice(_CODAS))
        words.append("".join(parts))
    return words


@dataclass(frozen=True)
class CorruptionSpec:
    """Substitution channel: each character is replaced with probability ``eta``.

    ``confusion[a][b]`` weights the replacement ``b`` for original ``a``;
    characters without weights (or with all-zero weights) are replaced
    uniformly by another alphabet symbol.
    """

    eta: float = 0.1
    confusion: Mapping[str, Mapping[str, float]] | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.eta <= 1:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        for a, row in (self.confusion or {}).items():
            for b, w in row.items():
                if w < 0:
                    raise ValueError(f"confusion weight {a}->{b} is negative")


def word_alphabet(words: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted({c for w in words for c in w}))


def corrupt_text(
    words: Sequence[str], spec: CorruptionSpec, alphabet: Sequence[str] | None = None
) -> list[str]:
    """Corrupt each word independently; deterministic for a given seed."""
    alphabet = tuple(alphabet) if alphabet is not None else word_alphabet(words)
    if not alphabet:
        raise ValueError("cannot corrupt over an empty alphabet")
    rng = random.Random(spec.seed)
    confusion = spec.confusion or {}
    out = []
    for word in words:
        chars = []
        for ch in word:
            if rng.random() >= spec.eta:
                chars.append(ch)
                continue
            weights = confusion.get(ch)
            if weights and sum(weights.values()) > 0:
                targets = sorted(weights)
                chars.append(rng.choices(targets, weights=[weights[t] for t in targets])[0])
                continue
            others = [a for a in alphabet if a != ch]
            chars.append(rng.choice(others) if others else ch)
        out.append("".join(chars))
    return out


@dataclass(frozen=True)
class OcrModels:
    """Stationary letter models of length 1; use ``with_length`` per word."""

    imprecise: ImpreciseHMM
    precise: ImpreciseHMM
    counts: dict = field(compare=False, default_factory=dict)

    def for_length(self, n: int) -> tuple[ImpreciseHMM, ImpreciseHMM]:
        return self.imprecise.with_length(n), self.precise.with_length(n)


def training_counts(pairs: Sequence[tuple[str, str]], alphabet: Sequence[str]):
    """Marginal, transition and emission counts from aligned word pairs."""
    marginal = Counter()
    transition = {a: Counter() for a in alphabet}
    emission = {a: Counter() for a in alphabet}
    for original, observed in pairs:
        if len(original) != len(observed):
            raise ValueError(f"misaligned pair {original!r}/{observed!r}")
        if not original:
            continue
        marginal[original[0]] += 1
        for a, b in zip(original, original[1:]):
            transition[a][b] += 1
        for a, b in zip(original, observed):
            emission[a][b] += 1
    return marginal, transition, emission


def ocr_train(
    pairs: Sequence[tuple[str, str]], s_idm=2, s_perks=2, alphabet: Sequence[str] | None = None
) -> OcrModels:
    """IDM interval model and Perks precise model from the same counts.

    States and outputs share one alphabet: every letter seen on either side.
    """
    pairs = [(o, c) for o, c in pairs]
    if not pairs:
        raise ValueError("cannot train on an empty corpus")
    if alphabet is None:
        alphabet = word_alphabet([w for pair in pairs for w in pair])
    alphabet = tuple(alphabet)
    marginal, transition, emission = training_counts(pairs, alphabet)

    def vec(counter):
        return [counter.get(a, 0) for a in alphabet]

    def build(row_fn, s) -> ImpreciseHMM:
        return ImpreciseHMM(
            Alphabet(alphabet),
            Alphabet(alphabet),
            1,
            row_fn(vec(marginal), s),
            tuple(row_fn(vec(transition[a]), s) for a in alphabet),
            tuple(row_fn(vec(emission[a]), s) for a in alphabet),
            True,
        )

    counts = {"marginal": marginal, "transition": transition, "emission": emission}
    return OcrModels(build(idm_from_counts, s_idm), build(perks_from_counts, s_perks), counts)


@dataclass(frozen=True)
class OcrRecord:
    original: str
    observed: str
    viterbi: str
    viterbi_ties: tuple[str, ...]
    solutions: int
    solution_sample: tuple[str, ...]
    contains_correct: bool
    viterbi_included: bool

    @property
    def correct_after_ocr(self) -> bool:
        return self.original == self.observed

    @property
    def viterbi_correct(self) -> bool:
        return self.viterbi == self.original

    @property
    def singleton(self) -> bool:
        return self.solutions == 1

    @property
    def singleton_matches_viterbi(self) -> bool:
        return not self.singleton or self.solution_sample == (self.viterbi,)


REPORT_HEADER = (
    "Emission counts were estimated from the same word pairs that are evaluated here;"
    " rates measure fit on the training data, not generalisation."
)

CSV_FIELDS = (
    "original",
    "observed",
    "viterbi",
    "viterbi_ties",
    "solutions",
    "solution_sample",
    "correct_after_ocr",
    "viterbi_correct",
    "contains_correct",
    "singleton",
    "viterbi_included",
)


def _split(records, pred_row, pred_col):
    """Counts ``(total, among correct-after-OCR, among wrong-after-OCR)``."""
    sel = [r for r in records if pred_row(r)]
    good = sum(1 for r in sel if pred_col(r))
    return len(sel), good, len(sel) - good


def _pct(a: int, b: int) -> str:
    return f"{100 * a / b:.1f}%" if b else "-"


@dataclass(frozen=True)
class OcrReport:
    records: tuple[OcrRecord, ...]

    @property
    def total(self) -> int:
        return len(self.records)

    def table_rows(self, subset: str = "all") -> list[tuple[str, int, int, int]]:
        """Rows ``(label, total, correct after OCR, wrong after OCR)``.

        ``subset`` is ``"all"``, ``"single"`` or ``"multiple"`` (by the number
        of maximal solutions).
        """
        recs = self.records
        if subset == "single":
            recs = [r for r in recs if r.singleton]
        elif subset == "multiple":
            recs = [r for r in recs if not r.singleton]
        elif subset != "all":
            raise ValueError(f"unknown subset {subset!r}")
        ok = lambda r: r.correct_after_ocr  # noqa: E731
        rows = [("total number",) + _split(recs, lambda r: True, ok)]
        est = [
            ("correct solution included",) + _split(recs, lambda r: r.contains_correct, ok),
            ("correct solution not included",) + _split(recs, lambda r: not r.contains_correct, ok),
        ]
        vit = [
            ("correct solution",) + _split(recs, lambda r: r.viterbi_correct, ok),
            ("wrong solution",) + _split(recs, lambda r: not r.viterbi_correct, ok),
        ]
        if subset == "single":
            return rows + [
                ("single correct solution",) + est[0][1:],
                ("single wrong solution",) + est[1][1:],
            ]
        rows += [("Viterbi", None, None, None)] + vit
        rows += [("EstiHMM", None, None, None)] + est
        return rows

    def render(self) -> str:
        out = [REPORT_HEADER, ""]
        titles = {
            "all": "All words",
            "single": "EstiHMM single solutions",
            "multiple": "EstiHMM multiple solutions",
        }
        for subset in ("all", "single", "multiple"):
            rows = self.table_rows(subset)
            base = rows[0][1]
            out.append(titles[subset])
            out.append(f"{'':34}{'total number':>20}{'correct after OCR':>20}{'wrong after OCR':>18}")
            for label, tot, good, bad in rows:
                if tot is None:
                    out.append(label)
                    continue
                if label == "total number":
                    cells = (f"{tot} (100%)" if tot else "0", f"{good} ({_pct(good, tot)})", f"{bad} ({_pct(bad, tot)})")
                else:
                    cells = (f"{tot} ({_pct(tot, base)})", str(good), str(bad))
                out.append(f"{label:34}{cells[0]:>20}{cells[1]:>20}{cells[2]:>18}")
            out.append("")
        v_in = sum(r.viterbi_included for r in self.records)
        s_ok = sum(r.singleton_matches_viterbi for r in self.records if r.singleton)
        n_single = sum(r.singleton for r in self.records)
        broke = sum(1 for r in self.records if r.singleton and r.correct_after_ocr and not r.contains_correct)
        out.append(f"Viterbi solution inside EstiHMM set: {v_in}/{self.total}")
        out.append(f"EstiHMM singleton equal to Viterbi solution: {s_ok}/{n_single}")
        out.append(f"EstiHMM singletons wrong on correctly read words: {broke}")
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["# " + REPORT_HEADER])
        w.writerow(CSV_FIELDS)
        for r in self.records:
            w.writerow(
                [
                    r.original,
                    r.observed,
                    r.viterbi,
                    "|".join(r.viterbi_ties),
                    r.solutions,
                    "|".join(r.solution_sample),
                    int(r.correct_after_ocr),
                    int(r.viterbi_correct),
                    int(r.contains_correct),
                    int(r.singleton),
                    int(r.viterbi_included),
                ]
            )
        return buf.getvalue()


def evaluate_word(
    models: OcrModels,
    original: str,
    observed: str,
    tau=0.0,
    backend="log",
    sample: int = 20,
    method: str = "topdown",
) -> OcrRecord:
    imp, pre = models.for_length(len(observed))
    for ch in observed + original:
        if ch not in imp.states.labels:
            raise ValueError(f"word {original!r}/{observed!r} contains unknown symbol {ch!r}")
    res = decode(imp, list(observed), policy=tau, backend=backend, check=False, method=method)
    ties = sorted(viterbi_all_ties(pre, list(observed), policy=tau, backend=backend))
    labels = imp.states
    tie_words = tuple("".join(labels.decode(t)) for t in ties)
    first = []
    for seq in res.trie.sequences():
        first.append("".join(labels.decode(seq)))
        if len(first) >= sample:
            break
    return OcrRecord(
        original=original,
        observed=observed,
        viterbi=tie_words[0],
        viterbi_ties=tie_words,
        solutions=res.count,
        solution_sample=tuple(first),
        contains_correct=labels.encode(original) in res.trie,
        viterbi_included=all(t in res.trie for t in ties),
    )


def ocr_evaluate(
    pairs: Sequence[tuple[str, str]], models: OcrModels, tau=0.0, backend="log", threads: int = 1
) -> OcrReport:
    """Decode every observed word with both models and tabulate the outcomes."""
    args = [(models, o, c, tau, backend) for o, c in pairs]
    if threads > 1 and len(args) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = tuple(pool.map(_eval_star, args, chunksize=8))
    else:
        records = tuple(_eval_star(a) for a in args)
    return OcrReport(records)


def _eval_star(a):
    return evaluate_word(*a)
