import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from estihmm import binary_model, linear_vacuous
from estihmm.model import ModelError
from estihmm.oracle import (
    DominanceSign,
    OracleTooLarge,
    brute_force_maximal,
    dominance_sign,
    dominance_value,
    joint_interval_mass,
    lower_suffix,
    lower_suffix_recursive,
    map_sequence,
    upper_suffix,
    upper_suffix_recursive,
    viterbi_all_ties,
)

from conftest import random_imprecise, random_obs, random_precise

TIE_MODEL = dict(m=F(1, 10), r=F(4, 5), s=F(3, 10), p=F(1, 4), q=F(7, 9))


def test_joint_mass_of_precise_model():
    m = binary_model(n=2, **TIE_MODEL)
    lo, up = joint_interval_mass(m, "01", (0, 1), backend="rational")
    # m * r * (1-p) * (1-s)
    assert lo == up == F(1, 10) * F(4, 5) * F(3, 4) * F(7, 10)
    with pytest.raises(ModelError):
        joint_interval_mass(m, "01", (0,), backend="rational")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_suffix_products_agree(seed):
    rng = random.Random(seed)
    m = random_imprecise(rng, 3, 2, 5)
    obs = random_obs(rng, m)
    seq = tuple(rng.randrange(3) for _ in range(5))
    for k in range(1, 6):
        tail = seq[k - 1 :]
        assert upper_suffix(m, obs, tail, k, "rational") == upper_suffix_recursive(m, obs, tail, k, "rational")
        assert lower_suffix(m, obs, tail, k, "rational") == lower_suffix_recursive(m, obs, tail, k, "rational")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_shortcut_sign_matches_literal_recursion(seed):
    rng = random.Random(seed)
    m = random_imprecise(rng, rng.choice([2, 3]), 2, rng.randint(1, 4))
    obs = random_obs(rng, m)
    seqs = list(itertools.product(range(m.n_states), repeat=m.n))
    for _ in range(20):
        x, xh = rng.choice(seqs), rng.choice(seqs)
        assert dominance_sign(m, obs, x, xh) == dominance_sign(m, obs, x, xh, method="recursive")


def test_dominance_of_precise_model_is_mass_difference():
    m = binary_model(n=2, **TIE_MODEL)
    for x, xh in itertools.product(itertools.product((0, 1), repeat=2), repeat=2):
        a = joint_interval_mass(m, "01", x, backend="rational")[0]
        b = joint_interval_mass(m, "01", xh, backend="rational")[0]
        assert dominance_value(m, "01", x, xh) == a - b


def test_sign_enum_and_bad_method():
    m = binary_model(n=2, **TIE_MODEL)
    assert dominance_sign(m, "01", (0, 1), (1, 0)) is DominanceSign.ZERO
    assert dominance_sign(m, "01", (0, 1), (0, 0)) is DominanceSign.POSITIVE
    with pytest.raises(ValueError):
        dominance_sign(m, "01", (0, 1), (0, 0), method="guess")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_grouped_equals_pairwise(seed):
    rng = random.Random(seed)
    m = random_imprecise(rng, rng.choice([2, 3]), rng.choice([2, 3]), rng.randint(1, 4))
    obs = random_obs(rng, m)
    assert brute_force_maximal(m, obs) == brute_force_maximal(m, obs, method="pairwise")


def test_three_way_tie_by_enumeration():
    m = binary_model(n=2, **TIE_MODEL)
    want = {(0, 1), (1, 0), (1, 1)}
    assert brute_force_maximal(m, "01") == want
    assert viterbi_all_ties(m, "01", backend="rational") == want
    assert map_sequence(m, "01", backend="rational") == (0, 1)


def test_size_guard():
    m = linear_vacuous(binary_model(n=21, **TIE_MODEL), F(1, 10))
    with pytest.raises(OracleTooLarge):
        brute_force_maximal(m, "0" * 21)
    m = linear_vacuous(binary_model(n=11, **TIE_MODEL), F(1, 10))
    with pytest.raises(OracleTooLarge):
        brute_force_maximal(m, "0" * 11, method="pairwise")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_viterbi_ties_are_argmax_paths(seed):
    rng = random.Random(seed)
    m = random_precise(rng, rng.randint(1, 3), 2, rng.randint(1, 5), zero_rate=0.3)
    obs = random_obs(rng, m)
    mass = {
        s: joint_interval_mass(m, obs, s, backend="rational")[0]
        for s in itertools.product(range(m.n_states), repeat=m.n)
    }
    best = max(mass.values())
    assert viterbi_all_ties(m, obs, backend="rational") == {s for s, v in mass.items() if v == best}


def test_viterbi_rejects_imprecise():
    m = linear_vacuous(binary_model(n=2, **TIE_MODEL), F(1, 10))
    with pytest.raises(ModelError):
        viterbi_all_ties(m, "01")
