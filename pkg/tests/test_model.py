import json
from fractions import Fraction as F

import pytest

from estihmm.model import (
    Alphabet,
    ImpreciseHMM,
    IntervalRow,
    ModelError,
    ModelValidationError,
    binary_model,
    check_precise,
    idm_from_counts,
    linear_vacuous,
    load_model,
    model_from_dict,
    model_to_dict,
    perks_from_counts,
    precise_model,
    save_model,
    validate,
)


def rules(row, strict=False):
    return {msg for _, msg in row.violations(strict)}


def test_alphabet_encoding_and_errors():
    a = Alphabet(("a", "b", "c"))
    assert a.encode("cab") == (2, 0, 1)
    assert a.join((2, 0, 1)) == "cab"
    with pytest.raises(ModelError, match=r"unknown symbol 'z' at position 3"):
        a.encode("abz")
    multi = Alphabet(("sun", "rain"))
    assert multi.join((1, 0)) == "rain,sun"
    assert multi.split("rain,sun") == ("rain", "sun")
    with pytest.raises(ModelError):
        Alphabet(("a", "a"))


@pytest.mark.parametrize(
    "lower,upper,rule",
    [
        ((F(1, 2), F(1, 2)), (F(1, 4), F(1, 2)), "lower exceeds upper"),
        ((F(0), F(1, 2)), (F(0), F(1)), "upper must be positive"),
        ((F(3, 4), F(1, 2)), (F(3, 4), F(1, 2)), "sum of lowers exceeds 1"),
        ((F(0), F(0)), (F(1, 4), F(1, 2)), "sum of uppers is below 1"),
        ((F(-1, 4), F(1, 2)), (F(1, 2), F(1, 2)), "lower must lie in [0, 1]"),
    ],
)
def test_row_rules(lower, upper, rule):
    assert rule in rules(IntervalRow(lower, upper))


def test_strict_mode_flags_unreachable_bounds():
    row = IntervalRow((F(0), F(0)), (F(1), F(1, 2)))
    assert not rules(row)
    assert "upper is not reachable" not in rules(row, strict=True)
    loose = IntervalRow((F(0), F(1, 2)), (F(1), F(1)))
    assert "upper is not reachable" in rules(loose, strict=True)


def test_row_rejects_non_numbers():
    with pytest.raises(ModelError):
        IntervalRow(("a",), (F(1),))
    with pytest.raises(ModelError):
        IntervalRow((F(1),), (F(1), F(0)))


def test_validation_report_lists_locations():
    bad = binary_model(F(1, 10), F(1), F(3, 10), F(1, 4), F(7, 9), 3)
    rep = validate(bad)
    assert not rep.ok
    assert "emission[given 0][1]: upper must be positive" in str(rep)


def test_shape_checks():
    m = binary_model(F(1, 10), F(4, 5), F(3, 10), F(1, 4), F(7, 9), 2)
    with pytest.raises(ModelError):
        ImpreciseHMM(m.states, m.outputs, 0, m.marginal, m.transition, m.emission)
    with pytest.raises(ModelError):
        ImpreciseHMM(m.states, m.outputs, 3, m.marginal, (m.transition,), (m.emission,) * 3, False)
    with pytest.raises(ModelError, match="length 3"):
        m.encode_obs("010")


def test_non_stationary_rows():
    m = binary_model(F(1, 10), F(4, 5), F(3, 10), F(1, 4), F(7, 9), 3)
    other = tuple(IntervalRow.precise((F(1, 2), F(1, 2))) for _ in range(2))
    ns = ImpreciseHMM(m.states, m.outputs, 3, m.marginal, (m.transition, other), (m.emission,) * 3, False)
    assert ns.state_row(2, 0) == m.transition[0]
    assert ns.state_row(3, 1) == other[1]
    assert ns.state_row(1) == m.marginal
    with pytest.raises(ModelError):
        ns.with_length(5)


def test_linear_vacuous_bounds():
    m = binary_model(F(1, 10), F(4, 5), F(3, 10), F(1, 4), F(7, 9), 2)
    v = linear_vacuous(m, F(1, 10), F(1, 5), 0)
    assert v.marginal == IntervalRow((F(9, 100), F(81, 100)), (F(19, 100), F(91, 100)))
    assert v.transition[0].lower == (F(1, 5), F(3, 5))
    assert v.transition[0].upper == (F(2, 5), F(4, 5))
    assert v.emission == m.emission
    assert validate(v).ok
    with pytest.raises(ModelError):
        linear_vacuous(v, 0, 0, 0)
    with pytest.raises(ModelError):
        linear_vacuous(m, F(3, 2))


def test_idm_and_perks_from_counts():
    row = idm_from_counts([3, 1, 0], s=2)
    assert row.lower == (F(1, 2), F(1, 6), F(0))
    assert row.upper == (F(5, 6), F(1, 2), F(1, 3))
    assert validate_row_ok(row)
    p = perks_from_counts({"a": 3, "b": 1, "c": 0}, s=3)
    assert p.lower == (F(4, 7), F(2, 7), F(1, 7))
    with pytest.raises(ValueError):
        idm_from_counts([1], s=0)
    with pytest.raises(ValueError):
        perks_from_counts([-1, 2])


def validate_row_ok(row):
    return not row.violations()


def test_check_precise():
    m = binary_model(F(1, 10), F(4, 5), F(3, 10), F(1, 4), F(7, 9), 2)
    check_precise(m)
    with pytest.raises(ModelError):
        check_precise(linear_vacuous(m, F(1, 10)))


def test_json_round_trip(tmp_path):
    m = linear_vacuous(binary_model(F(1, 10), F(4, 5), F(3, 10), F(1, 4), F(7, 9), 4), F(1, 20), F(1, 20), 0)
    path = tmp_path / "m.json"
    save_model(m, path)
    data = json.loads(path.read_text())
    assert data["marginal"]["lower"][0] == "19/200"
    assert load_model(path) == m


def test_json_non_stationary_round_trip():
    rows = lambda *ps: tuple(IntervalRow.precise(p) for p in ps)  # noqa: E731
    half = (F(1, 2), F(1, 2))
    m = ImpreciseHMM(("x", "y"), ("a",), 2, IntervalRow.precise(half), (rows(half, half),), (rows((F(1),), (F(1),)),) * 2, False)
    assert model_from_dict(model_to_dict(m)) == m


def test_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": [\n  "a",\n}')
    with pytest.raises(ModelError, match="line 3"):
        load_model(bad)
    m = binary_model(F(1, 10), F(1), F(3, 10), F(1, 4), F(7, 9), 2)
    path = tmp_path / "invalid.json"
    save_model(m, path)
    with pytest.raises(ModelValidationError):
        load_model(path)
    assert load_model(path, check=False) == m
    data = model_to_dict(m)
    data["transition"] = [data["transition"]]
    with pytest.raises(ModelError, match="per-k"):
        model_from_dict(data)
    data = model_to_dict(m)
    data["marginal"]["lower"][0] = "one tenth"
    with pytest.raises(ModelError, match="cannot parse"):
        model_from_dict(data)


def test_precise_model_labels():
    m = precise_model(["H", "C"], ["s", "m", "l"], 3, [F(1, 2)] * 2, [[F(1, 2)] * 2] * 2, [[F(1, 3)] * 3] * 2)
    assert m.is_precise()
    assert m.encode_obs("sml") == (0, 1, 2)
    assert m.encode_obs([2, 1, 0]) == (2, 1, 0)
