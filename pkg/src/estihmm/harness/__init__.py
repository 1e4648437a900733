"""Experiment drivers: parameter sweeps, tie loci, timing, and the OCR demo."""

from .bench import BenchTable, bench_length, bench_scaling, bench_states, near_precise_case
from .heatmap import pgm_text, read_heatmap_csv, write_heatmap
from .loci import LociSet, Locus, indifference_loci, joint_mass
from .ocr import (
    CorruptionSpec,
    OcrModels,
    OcrReport,
    corrupt_text,
    ocr_evaluate,
    ocr_train,
    synthetic_corpus,
    tokenize,
)
from .sweep import SweepConfig, SweepResult, cell_count, sweep_grid

__all__ = [
    "BenchTable",
    "CorruptionSpec",
    "LociSet",
    "Locus",
    "OcrModels",
    "OcrReport",
    "SweepConfig",
    "SweepResult",
    "bench_length",
    "bench_scaling",
    "bench_states",
    "cell_count",
    "corrupt_text",
    "indifference_loci",
    "joint_mass",
    "near_precise_case",
    "ocr_evaluate",
    "ocr_train",
    "pgm_text",
    "read_heatmap_csv",
    "sweep_grid",
    "synthetic_corpus",
    "tokenize",
    "write_heatmap",
]
