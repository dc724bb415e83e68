import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from vtfar.bitword import (
    ERASURE,
    ErrorPattern,
    ErrorType,
    ReceivedWord,
    Word,
    apply_pattern,
    apply_pattern_prefix,
    count_far_patterns,
    count_patterns,
    enumerate_far_patterns,
    enumerate_patterns,
    is_far,
    sample_far_pattern,
    sample_pattern,
)
from vtfar.errors import BudgetExceeded

D, E, F = ErrorType.DELETION, ErrorType.ERASURE, ErrorType.SUBSTITUTION


def brute_patterns(n, t):
    """Every length-n type vector over {0, D, E, F}, kept when it has at most t entries."""
    out = []
    for v in itertools.product((None, D, E, F), repeat=n):
        entries = tuple((i, k) for i, k in enumerate(v, 1) if k is not None)
        if len(entries) <= t:
            out.append(ErrorPattern(n, entries))
    return out


def test_word_parse_and_str():
    w = Word.parse("10110")
    assert w == (1, 0, 1, 1, 0)
    assert str(w) == "10110"


@pytest.mark.parametrize("text, pos", [("10x1", 3), ("2", 1), ("01e", 3)])
def test_word_parse_reports_position(text, pos):
    with pytest.raises(ValueError, match=f"position {pos}"):
        Word.parse(text)


def test_received_word_roundtrip():
    y = ReceivedWord.parse("0e1")
    assert y == (0, ERASURE, 1)
    assert y.erasures == 1
    assert str(y) == "0e1"
    with pytest.raises(ValueError, match="position 2"):
        ReceivedWord.parse("0?1")


def test_worked_example():
    x = Word.parse("10110")
    g = ErrorPattern.parse("1F,3D,4F,5E", 5)
    assert str(apply_pattern(x, g)) == "000e"


def test_prefix_follows_pattern_literally():
    x = Word.parse("10110")
    g = ErrorPattern.parse("1F,3D,4F,5E", 5)
    assert str(apply_pattern_prefix(x, g, 3)) == "00"
    assert str(apply_pattern_prefix(x, g, 4)) == "000"
    assert apply_pattern_prefix(x, g, 5) == apply_pattern(x, g)


def test_pattern_parse_and_format():
    g = ErrorPattern.parse("3D, 1f", 6)
    assert str(g) == "1F,3D"
    assert g.positions == (1, 3)
    assert g.deletions == 1
    assert len(ErrorPattern.parse("-", 4)) == 0


@pytest.mark.parametrize("text", ["1X", "F", "1F,1D", "9D", "1F,,2D"])
def test_pattern_rejects_bad_tokens(text):
    with pytest.raises(ValueError):
        ErrorPattern.parse(text, 5)


def test_length_mismatch():
    with pytest.raises(ValueError):
        apply_pattern(Word.parse("101"), ErrorPattern(4))


def test_is_far():
    assert is_far(ErrorPattern.parse("1F,4D", 6), 3)
    assert not is_far(ErrorPattern.parse("1F,3D", 6), 3)
    assert is_far(ErrorPattern.parse("2E", 6), 100)


def test_counts_small():
    assert count_patterns(5, 1) == 16
    assert count_patterns(3, 3) == 64
    assert count_patterns(6, 2) == 1 + 18 + 135
    assert count_far_patterns(6, 3, 2) == 73
    assert count_far_patterns(30, 15) == 1171


def test_count_far_degenerate():
    assert count_far_patterns(7, 1, 3) == count_patterns(7, 3)
    for Q in range(1, 9):
        assert count_far_patterns(7, Q, 1) == count_patterns(7, 1)


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_matches_brute_force(n):
    for t in range(n + 1):
        got = sorted(map(str, enumerate_patterns(n, t)))
        assert got == sorted(map(str, brute_patterns(n, t)))
        assert len(got) == count_patterns(n, t)


def test_far_enumeration_matches_filter():
    for n in range(1, 8):
        everything = brute_patterns(n, n)
        for Q in range(1, 5):
            for t in (1, 2, 3, None):
                want = sorted(str(g) for g in everything
                              if is_far(g, Q) and (t is None or len(g) <= t))
                got = sorted(map(str, enumerate_far_patterns(n, Q, t)))
                assert got == want, (n, Q, t)
                assert len(got) == count_far_patterns(n, Q, t)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_patterns(30, 5, budget=1000))
    with pytest.raises(BudgetExceeded):
        list(enumerate_far_patterns(60, 3, budget=1000))


def test_sampling_is_reproducible_and_far():
    a = [str(sample_far_pattern(200, 15, seed=4)) for _ in range(3)]
    b = [str(sample_far_pattern(200, 15, seed=4)) for _ in range(3)]
    assert a == b
    r = random.Random(1)
    for _ in range(200):
        g = sample_far_pattern(200, 15, 6, rng=r)
        assert is_far(g, 15) and len(g) <= 6


def test_sample_pattern_is_uniform():
    # chi-square against the 16 patterns of E_5(1) would be overkill; check every one shows up evenly
    r = random.Random(0)
    counts = {}
    for _ in range(16000):
        g = str(sample_pattern(5, 1, rng=r))
        counts[g] = counts.get(g, 0) + 1
    assert len(counts) == 16
    assert max(counts.values()) < 1.2 * 1000 and min(counts.values()) > 0.8 * 1000


def test_sample_pattern_rejects_bad_t():
    with pytest.raises(ValueError):
        sample_pattern(4, 5)


words = st.lists(st.integers(0, 1), min_size=1, max_size=40).map(Word)


@st.composite
def word_and_pattern(draw):
    x = draw(words)
    n = len(x)
    pos = sorted(draw(st.sets(st.integers(1, n), max_size=n)))
    kinds = draw(st.lists(st.sampled_from([D, E, F]), min_size=len(pos), max_size=len(pos)))
    return x, ErrorPattern(n, tuple(zip(pos, kinds)))


@given(word_and_pattern())
def test_channel_length_and_erasures(xg):
    x, g = xg
    y = apply_pattern(x, g)
    assert len(y) == len(x) - g.deletions
    assert y.erasures == sum(1 for _, k in g.entries if k is E)


@given(word_and_pattern(), st.data())
def test_prefix_is_prefix_of_full_output(xg, data):
    x, g = xg
    t = data.draw(st.integers(1, len(x)))
    full = apply_pattern(x, g)
    pre = apply_pattern_prefix(x, g, t)
    assert full[:len(pre)] == pre
    assert len(pre) == t - sum(1 for p, k in g.entries if k is D and p <= t)


@given(word_and_pattern())
def test_pattern_text_roundtrip(xg):
    _, g = xg
    assert ErrorPattern.parse(str(g), g.n) == g


@settings(max_examples=50)
@given(st.integers(1, 60), st.integers(1, 20), st.integers(0, 5), st.integers(0, 2**32))
def test_far_sampler_respects_constraints(n, Q, t, seed):
    g = sample_far_pattern(n, Q, t, seed=seed)
    assert is_far(g, Q) and len(g) <= t and g.n == n
