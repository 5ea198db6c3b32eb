import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ssmlang.automata import BOS, EOS, InvalidPrefix
from ssmlang.languages import (
    COUNTER_CATALOG,
    LENGTH_BINS,
    REGULAR_CATALOG,
    format_record,
    generate_samples,
    get_language,
    parse_record,
    predictive_label_oracle,
)

ALL_LANGUAGES = REGULAR_CATALOG + COUNTER_CATALOG + ("flipflop", "bdyck_3_2")


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def test_catalog_sizes():
    assert len(REGULAR_CATALOG) == 18
    assert len(COUNTER_CATALOG) == 9


@pytest.mark.parametrize("name", REGULAR_CATALOG)
def test_dfa_agrees_with_membership(name):
    spec = get_language(name)
    bound = 12 if len(spec.alphabet) <= 2 else (8 if len(spec.alphabet) == 3 else 6)
    for w in words(spec.alphabet, bound):
        assert spec.dfa.accepts(w) == spec.member(list(w)), w


# (prefix length checked, word length enumerated): every checked valid prefix
# has a completion within the enumerated length
BRUTE_BUDGET = {
    "tomita3": (6, 12), "tomita5": (6, 12), "d2": (6, 12), "abd": (4, 7), "zero_two": (5, 8),
    "dyck1": (5, 12), "anbncn": (3, 12), "shuffle2": (3, 8), "boolean3": (1, 7), "flipflop": (4, 7),
}


def member_prefixes(spec, max_len):
    out = set()
    for w in words(spec.alphabet, max_len):
        if spec.member(list(w)):
            out.update(w[:i] for i in range(len(w) + 1))
    return out


@pytest.mark.parametrize("name", sorted(BRUTE_BUDGET))
def test_labels_match_brute_force(name):
    spec = get_language(name)
    checked, total = BRUTE_BUDGET[name]
    prefixes = member_prefixes(spec, total)
    for prefix in words(spec.alphabet, checked):
        if prefix not in prefixes:
            with pytest.raises(InvalidPrefix):
                spec.label(prefix)
            continue
        label = spec.label(prefix)
        expected = {a for a in spec.alphabet if prefix + (a,) in prefixes}
        if spec.member(list(prefix)):
            expected.add(EOS)
        assert label == expected, prefix
        assert BOS not in label


def test_oracle_examples():
    ff = get_language("flipflop")
    assert predictive_label_oracle(ff, "w 1 i 0 r".split()) == {"1"}
    assert predictive_label_oracle(get_language("anbn"), "aab") == {"b"}
    assert predictive_label_oracle(get_language("dyck1"), "") == {"(", EOS}


def test_anbn_samples_are_balanced():
    for w, _ in generate_samples(get_language("anbn"), (1, 50), 200, seed=3):
        n = len(w) // 2
        assert len(w) % 2 == 0 and w == ["a"] * n + ["b"] * n


def test_flipflop_sparse_mix():
    samples = generate_samples(get_language("flipflop"), (512, 512), 1000, seed=0, mode="sparse")
    instructions = [w[i] for w, _ in samples for i in range(0, len(w), 2)]
    frac_w = instructions.count("w") / len(instructions)
    assert abs(frac_w - 0.01) <= 0.005


def test_sampling_is_deterministic():
    spec = get_language("shuffle4")
    assert generate_samples(spec, (1, 50), 20, seed=9) == generate_samples(spec, (1, 50), 20, seed=9)


def test_empty_length_range_raises():
    with pytest.raises(ValueError):
        generate_samples(get_language("anbn"), (3, 3), 5, seed=0)


def test_anbn_bin_two_lengths():
    for w, _ in generate_samples(get_language("anbn"), LENGTH_BINS[2], 100, seed=1):
        assert 51 <= len(w) <= 100 and 26 <= len(w) // 2 <= 50


def test_bounded_dyck_respects_depth():
    spec = get_language("bdyck", K=3, h=2)
    for w, labels in generate_samples(spec, (1, 40), 100, seed=0):
        depth = 0
        for a, lab in zip(w, labels):
            depth += 1 if a.startswith("(") else -1
            assert 0 <= depth <= 2
            if depth == 2:
                assert not any(s.startswith("(") for s in lab)


def test_dataset_record_round_trip():
    spec = get_language("dyck1")
    for w, labels in generate_samples(spec, (1, 20), 10, seed=0):
        line = format_record(w, labels, spec.alphabet)
        assert parse_record(line, spec.alphabet) == (w, labels)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALL_LANGUAGES), st.integers(0, 10_000))
def test_samples_are_members_with_consistent_labels(name, seed):
    spec = get_language(name)
    for w, labels in generate_samples(spec, (1, 40), 3, seed):
        assert spec.member(w)
        assert EOS in labels[-1]
        for t in range(len(w) - 1):
            assert w[t + 1] in labels[t]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ALL_LANGUAGES), st.integers(0, 10_000))
def test_random_prefix_labels_never_contain_bos(name, seed):
    spec = get_language(name)
    rng = random.Random(seed)
    prefix = [rng.choice(spec.alphabet) for _ in range(rng.randint(0, 12))]
    try:
        label = spec.label(prefix)
    except InvalidPrefix:
        return
    assert BOS not in label
    assert label <= set(spec.alphabet) | {EOS}
    assert (EOS in label) == spec.member(prefix)
