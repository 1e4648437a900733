"""Maximal state-sequence decoding for imprecise hidden Markov models."""

from .engine import DecodeResult, decode
from .model import (
    Alphabet,
    ImpreciseHMM,
    IntervalRow,
    ModelError,
    ModelValidationError,
    binary_model,
    idm_from_counts,
    linear_vacuous,
    load_model,
    perks_from_counts,
    precise_model,
    save_model,
    validate,
)
from .numerics import ComparePolicy, LogBackend, RationalBackend, SignedLogValue
from .trie import SequenceTrie

__all__ = [
    "Alphabet",
    "ComparePolicy",
    "DecodeResult",
    "ImpreciseHMM",
    "IntervalRow",
    "LogBackend",
    "ModelError",
    "ModelValidationError",
    "RationalBackend",
    "SequenceTrie",
    "SignedLogValue",
    "binary_model",
    "decode",
    "idm_from_counts",
    "linear_vacuous",
    "load_model",
    "perks_from_counts",
    "precise_model",
    "save_model",
    "validate",
]
