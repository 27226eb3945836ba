import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcprefix.codes import (
    ChannelSpec,
    Codebook,
    ProbMultiset,
    codebook,
    descriptive_length,
    entropy,
    expected_length,
    is_prefix_code,
    kraft_sum,
    length_tuple,
    local_redundancies,
    prefix_free_pair,
    redundancy,
    w,
)
from mcprefix.exactnum import exact_from_ln
from mcprefix.selvage import selvage_code, spa

from conftest import random_codebook


def test_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec(())
    with pytest.raises(ValueError):
        ChannelSpec((2, 1))


def test_codebook_rejects_duplicates_and_bad_symbols():
    with pytest.raises(ValueError):
        codebook((2, 2), [("0", ""), ("0", "")])
    with pytest.raises(ValueError):
        codebook((2, 2), [("2", "")])
    with pytest.raises(ValueError):
        codebook((2, 2), [("", ""), ("0", "")])
    assert len(codebook((2, 2), [("", "")])) == 1


def test_length_tuple():
    assert length_tuple(w("0", "")) == (1, 0)
    assert length_tuple(w("", "", "")) == (0, 0, 0)
    assert length_tuple(w("11", "1")) == (2, 1)


def test_descriptive_length():
    s222 = ChannelSpec((2, 2, 2))
    assert descriptive_length(w("", "1", "0"), s222) == exact_from_ln(2) * 2
    assert descriptive_length(w("", "", ""), s222).is_zero()
    assert descriptive_length(w("", "2", "00"), ChannelSpec((6, 3, 2))) == exact_from_ln(12)


def test_prefix_free_pair():
    assert prefix_free_pair(w("0", ""), w("1", "0"))
    assert prefix_free_pair(w("", "1", "0"), w("0", "", "1"))
    assert not prefix_free_pair(w("0", ""), w("01", "1"))


def test_is_prefix_code(staircase, core222):
    assert is_prefix_code(staircase)
    assert is_prefix_code(core222)
    assert not is_prefix_code(codebook((2, 2), [("0", ""), ("01", "1")]))


def test_kraft_sum(staircase):
    assert kraft_sum(staircase) == Fraction(7, 8)
    assert kraft_sum(Codebook(ChannelSpec((2, 2)), ())) == 0
    assert kraft_sum(selvage_code((2, 2, 2)).full) == 1


def test_entropy():
    ln2 = exact_from_ln(2)
    assert entropy(spa((2, 2, 2))) == ln2 * Fraction(9, 4)
    assert entropy([Fraction(1)]).is_zero()
    assert entropy(spa((5, 3, 2))).to_decimal(6) == "2.976887"
    with pytest.raises(ValueError):
        entropy([Fraction(1, 2)])


def test_expected_length_and_redundancy():
    out = selvage_code((2, 2, 2))
    assert expected_length(out.full, out.spa) == exact_from_ln(2) * Fraction(9, 4)
    out532 = selvage_code((5, 3, 2))
    assert redundancy(out532.full, out532.spa).is_zero()
    single = codebook((2, 3), [("", "")])
    assert expected_length(single, [1]).is_zero()
    assert redundancy(single, [1]).is_zero()
    with pytest.raises(ValueError):
        expected_length(out.full, [Fraction(1)])


def test_redundancy_of_optimal_532_tree_code():
    from mcprefix.search import optimal_tree_code

    res = optimal_tree_code(spa((5, 3, 2)), (5, 3, 2))
    cb = res.codebook()
    assert expected_length(cb, res.probs).to_decimal(6) == "2.980124"
    # 2.980124 - 2.976887, rounded independently of the two columns
    assert redundancy(cb, res.probs).to_decimal(6) == "0.003237"


def _single_channel_prefix(words):
    strs = [c[0] for c in words]
    for a, b in combinations(strs, 2):
        if a[: len(b)] == b or b[: len(a)] == a:
            return False
    return True


def test_prefix_invariants_random():
    rng = random.Random(7)
    for _ in range(500):
        cb = random_codebook(rng)
        for a in cb:
            assert not prefix_free_pair(a, a)
            for b in cb:
                assert prefix_free_pair(a, b) == prefix_free_pair(b, a)
        if is_prefix_code(cb):
            assert kraft_sum(cb) <= 1


def test_single_channel_agrees_with_classical_test():
    rng = random.Random(11)
    for _ in range(500):
        cb = random_codebook(rng, max_n=1, max_len=4)
        assert is_prefix_code(cb) == _single_channel_prefix(cb.codewords)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 5), min_size=3, max_size=4))
def test_zero_redundancy_iff_all_local_zero(sizes):
    out = selvage_code(sizes)
    assert redundancy(out.full, out.spa).is_zero()
    assert all(r.is_zero() for r in local_redundancies(out.full, out.spa))
    # moving mass between two codewords of different length breaks the equality
    probs = list(out.spa.probs)
    probs[0], probs[-1] = probs[-1], probs[0]
    shuffled = ProbMultiset(tuple(probs))
    zero_local = all(r.is_zero() for r in local_redundancies(out.full, shuffled))
    assert redundancy(out.full, shuffled).is_zero() == zero_local
