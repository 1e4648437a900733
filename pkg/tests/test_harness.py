import io
import warnings
from fractions import Fraction as F

import pytest

from estihmm import decode
from estihmm.harness import (
    CorruptionSpec,
    SweepConfig,
    bench_scaling,
    cell_count,
    corrupt_text,
    indifference_loci,
    joint_mass,
    near_precise_case,
    ocr_evaluate,
    ocr_train,
    pgm_text,
    read_heatmap_csv,
    sweep_grid,
    synthetic_corpus,
    tokenize,
    write_heatmap,
)
from estihmm.harness.bench import loglog_slope
from estihmm.harness.heatmap import same_grid

# frozen with the brute-force oracle on the 5x5 grid p, q in {0, 1/4, ..., 1}
SWEEP_EXACT = (
    (None, None, None, None, None),
    (None, 1, 1, 1, None),
    (None, 1, 1, 1, None),
    (None, 1, 1, 1, None),
    (None, None, None, None, None),
)
SWEEP_EPS_TENTH = (
    (1, 2, 2, 3, 2),
    (1, 1, 2, 3, 2),
    (1, 1, 2, 3, 2),
    (1, 1, 1, 4, 2),
    (1, 1, 1, 3, 2),
)


@pytest.mark.parametrize("backend", ["log", "rational"])
def test_sweep_matches_frozen_counts(backend):
    assert sweep_grid(SweepConfig(resolution=5, backend=backend)).counts == SWEEP_EXACT
    eps = F(1, 10)
    cfg = SweepConfig(resolution=5, eps_marginal=eps, eps_transition=eps, eps_emission=eps, backend=backend)
    assert sweep_grid(cfg).counts == SWEEP_EPS_TENTH


def test_sweep_threads_give_same_grid():
    cfg = SweepConfig(resolution=4, eps_marginal=F(1, 20), eps_transition=F(1, 20))
    assert sweep_grid(cfg, threads=2) == sweep_grid(cfg, threads=1)


def test_sweep_tie_cell_and_config_errors():
    assert cell_count(SweepConfig(), F(1, 4), F(7, 9)) == 3
    with pytest.raises(ValueError):
        SweepConfig(resolution=1)
    with pytest.raises(ValueError):
        SweepConfig(obs="012")
    with pytest.raises(ValueError):
        SweepConfig(r=F(3, 2))


def test_heatmap_round_trip(tmp_path):
    eps = F(1, 10)
    res = sweep_grid(SweepConfig(resolution=5, eps_marginal=eps, eps_transition=eps, eps_emission=eps))
    csv_path, pgm_path = tmp_path / "h.csv", tmp_path / "h.pgm"
    write_heatmap(res, csv_path, pgm_path)
    back = read_heatmap_csv(csv_path)
    assert same_grid(res, back)
    lines = pgm_path.read_text().splitlines()
    assert lines[0] == "P2" and lines[1].startswith("#")
    assert lines[2] == "5 5" and lines[3] == "255"
    # top image row is p = 1; count 1 maps to black, the maximum to white
    assert lines[4].split() == ["0", "0", "0", "170", "85"]


def test_heatmap_marks_invalid_cells(tmp_path):
    res = sweep_grid(SweepConfig(resolution=3))
    path = tmp_path / "x.csv"
    write_heatmap(res, csv_path=path)
    rows = path.read_text().splitlines()
    assert rows[0] == "p,q,count,flag"
    assert rows[1] == "0,0,,invalid"
    assert "0.5,0.5,1," in rows
    assert pgm_text(res).splitlines()[5].split() == ["0", "0", "0"]


def test_loci_all_pairs():
    loci = indifference_loci(F(1, 10), F(4, 5), F(3, 10), "01")
    assert len(loci.loci) == 6
    tie = loci.get("00", "10")
    assert tie.contains(F(27, 32), F(1, 4))
    assert tie.segment() == ((0, 0), (1, F(8, 27)))
    assert any("10-11: q = 7/9" == line for line in loci.lines())
    for locus in loci.loci:
        x, y = locus.pair
        p, q = F(1, 4), F(7, 9)
        if locus.contains(p, q):
            assert joint_mass(F(1, 10), F(4, 5), F(3, 10), p, q, "01", x) == joint_mass(
                F(1, 10), F(4, 5), F(3, 10), p, q, "01", y
            )
    with pytest.raises(ValueError):
        indifference_loci(F(1, 10), F(4, 5), F(3, 10), "012")


def test_tokenize_and_corpus():
    assert tokenize("Nel mezzo, del cammin 1300!") == ["NEL", "MEZZO", "DEL", "CAMMIN"]
    words = synthetic_corpus(50, seed=3)
    assert words == synthetic_corpus(50, seed=3)
    assert all(w.isalpha() and w.isupper() for w in words)


def test_corruption_is_seeded_and_length_preserving():
    words = synthetic_corpus(100, seed=2)
    spec = CorruptionSpec(eta=0.2, seed=5)
    out = corrupt_text(words, spec)
    assert out == corrupt_text(words, spec)
    assert [len(w) for w in out] == [len(w) for w in words]
    assert out != words
    assert corrupt_text(words, CorruptionSpec(eta=0.0)) == words
    forced = corrupt_text(["AB"], CorruptionSpec(eta=1.0, confusion={"A": {"E": 1}, "B": {"P": 1}}))
    assert forced == ["EP"]
    with pytest.raises(ValueError):
        CorruptionSpec(eta=1.5)


def test_ocr_pipeline_small():
    # a small training set leaves the intervals wide and the sets huge
    words = synthetic_corpus(400, seed=4)
    pairs = list(zip(words, corrupt_text(words, CorruptionSpec(eta=0.1, seed=4))))
    models = ocr_train(pairs)
    assert not models.imprecise.is_precise() and models.precise.is_precise()
    rep = ocr_evaluate(pairs[:40], models)
    assert rep.total == 40
    assert all(r.viterbi_included for r in rep.records)
    assert all(r.singleton_matches_viterbi for r in rep.records)
    text = rep.render()
    assert "same word pairs" in text
    assert "EstiHMM single solutions" in text
    csv_text = rep.to_csv()
    assert csv_text.splitlines()[1].startswith("original,observed,viterbi")
    assert len(csv_text.splitlines()) == 42
    rows = rep.table_rows("all")
    assert rows[0][1] == 40 and rows[0][2] + rows[0][3] == 40
    with pytest.raises(ValueError):
        rep.table_rows("some")


def test_ocr_training_rejects_misaligned_pairs():
    with pytest.raises(ValueError):
        ocr_train([("ABC", "AB")])
    with pytest.raises(ValueError):
        ocr_train([])


def test_bench_helpers():
    assert loglog_slope([1, 2, 4], [3, 12, 48]) == pytest.approx(2.0)
    model, obs = near_precise_case(30, 3, seed=1)
    assert len(obs) == 30
    assert decode(model, obs).count == 1
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = bench_scaling(lambda n: near_precise_case(n), [10, 20], repetitions=1, slope_limit=-100)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)
    assert table.counts == (1, 1)
    assert table.lines()[-1].startswith("log-log slope")
