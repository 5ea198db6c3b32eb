import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ssmlang.automata import EOS, minimize_dfa
from ssmlang.compiler import (
    NotStarFree,
    SetResetAutomaton,
    cascade_compose,
    compile_bounded_dyck,
    compile_counter,
    compile_counter_language,
    compile_flip_flop,
    compile_language,
    compile_mod_counter,
    compile_parity_signed,
    compile_readout_last,
    compile_set_reset,
    compile_star_free,
    counter_assignment,
    counter_model,
    krohn_rhodes_decompose,
    readout_last_model,
    set_reset_state_field,
    set_reset_tracker,
)
from ssmlang.languages import NON_STAR_FREE, generate_samples, get_language
from ssmlang.ssm import Runner, layer_step, recognize, run_model
from ssmlang.verify import Exhaustive, RandomWords, check_equivalence

P = 8
ONE = 1 << P
FF = ("w", "r", "i", "0", "1")


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def embed(sym, alphabet):
    return tuple(ONE if a == sym else 0 for a in alphabet)


def run_layer(layer, word, alphabet):
    h = layer.h0
    zs = []
    for a in word:
        h, z = layer_step(layer, h, embed(a, alphabet), P)
        zs.append(z)
    return h, zs


# set-reset layers

def test_set_reset_layer_tracks_instruction():
    sr = SetResetAutomaton.recording(FF, ("w", "r", "i"))
    layer = compile_set_reset(sr)
    assert layer.d == 1 + math.ceil(math.log2(sr.n_states))
    field = set_reset_state_field(sr)
    _, zs = run_layer(layer, "w 1 i 0".split(), FF)
    assert sr.states[field.evaluate(zs[-1])] == "i"
    _, zs = run_layer(layer, "0 1 0 0 1".split(), FF)
    assert all(sr.states[field.evaluate(z)] == "q0" for z in zs)
    for k, a in enumerate(FF):
        tag = layer.decoder.decode(embed(a, FF))
        if a in sr.resets:
            assert layer.gates[tag][:-1] == (0,) * (layer.d - 1)


def test_set_reset_needs_two_states():
    with pytest.raises(ValueError):
        compile_set_reset(SetResetAutomaton(("only",), ("a",), {}))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.data())
def test_set_reset_margin(n_states, data):
    alphabet = tuple(f"s{i}" for i in range(n_states + 1))
    resets = {alphabet[i]: i for i in range(n_states)}
    sr = SetResetAutomaton(tuple(range(n_states)), alphabet, resets)
    layer = compile_set_reset(sr)
    word = data.draw(st.lists(st.sampled_from(alphabet), min_size=1, max_size=20))
    field = set_reset_state_field(sr)
    _, zs = run_layer(layer, word, alphabet)
    bound = 1 / math.sqrt(1 + math.ceil(math.log2(n_states))) - 2 ** -P
    q = sr.start
    for a, z in zip(word, zs):
        q = sr.step(q, a)
        assert field.evaluate(z) == q
        assert all(x == 0 or abs(x) / ONE >= bound for x in z[:layer.d])


# readout-last

def test_readout_last_recovers_previous_symbol():
    model = readout_last_model(("a", "b", "c"))
    for w in words("abc", 6):
        if not w:
            continue
        assert run_model(model, w) == [None] + list(w[:-1])


def test_readout_last_needs_precision():
    with pytest.raises(ValueError):
        compile_readout_last(("a", "b"), precision=4)


# cascades

def test_cascade_layer_count_and_states_for_d2():
    spec = get_language("d2")
    dfa = minimize_dfa(spec.dfa)
    prog = krohn_rhodes_decompose(dfa)
    model = compile_star_free(spec.dfa)
    assert len(model.layers) == 2 * len(prog.components) - 1
    assert model.nonnegative
    assert check_equivalence(model, spec, Exhaustive(8)).passed


def test_cascade_with_trivial_upper_keeps_lower_output():
    lower_sr = SetResetAutomaton.recording(("a", "b"), ("a", "b"))
    lower = set_reset_tracker(lower_sr)
    upper_sr = SetResetAutomaton(("x", "y"), ("keep",), {})
    upper = set_reset_tracker(upper_sr)
    combined = cascade_compose(lower, upper, lambda s, a: "keep")
    assert len(combined.model.layers) == len(lower.model.layers) + len(upper.model.layers) + 1
    for w in words("ab", 6):
        if not w:
            continue
        got = run_model(combined.model, w)
        want = run_model(lower.model, w)
        assert [g[0][:1] for g in got] == [x[0] for x in want]


def test_cascade_decoded_states_match_product():
    lower_sr = SetResetAutomaton.recording(("a", "b", "c"), ("a", "b"))
    upper_sr = SetResetAutomaton(("u0", "u1", "u2"), ("keep", "r1", "r2"), {"r1": 1, "r2": 2})
    wiring = lambda s, a: {"a": "r1", "b": "r2"}.get(a, "keep") if s == (1,) else "keep"  # noqa: E731
    combined = cascade_compose(set_reset_tracker(lower_sr), set_reset_tracker(upper_sr), wiring)
    for w in words("abc", 6):
        state = combined.start
        for a, (got_state, got_sym) in zip(w, run_model(combined.model, w)):
            state = combined.step(state, a)
            assert got_state == state and got_sym == a


# star-free pipeline

def test_tomita4_exhaustive():
    spec = get_language("tomita4")
    assert check_equivalence(compile_star_free(spec.dfa), spec, Exhaustive(12)).passed


def test_zero_two_long_prefixes():
    spec = get_language("zero_two")
    report = check_equivalence(compile_language("zero_two"), spec, RandomWords(1000, (1, 500)))
    assert report.passed and report.checked == 1000


@pytest.mark.parametrize("name", NON_STAR_FREE)
def test_star_free_refusal(name):
    with pytest.raises(NotStarFree):
        compile_star_free(get_language(name).dfa)
    with pytest.raises(NotStarFree):
        compile_language(name)


def test_custom_label_map():
    spec = get_language("tomita1")
    dfa = spec.dfa
    labels = {q: frozenset({"mark"}) if q in dfa.accepting else frozenset() for q in range(dfa.n_states)}
    model = compile_star_free(dfa, labels)
    assert run_model(model, "111") == [{"mark"}] * 3
    assert run_model(model, "10")[-1] == frozenset()


# Flip-Flop

def test_flip_flop_examples():
    m = compile_flip_flop()
    assert len(m.layers) == 2
    assert run_model(m, "w 0 r".split())[2] == {"0"}
    out = run_model(m, "w 1 i 0 w 0".split())
    assert out[0] == {"0", "1"} and out[2] == {"0", "1"} and out[4] == {"0", "1"}
    assert run_model(m, "r".split())[0] == {"0", "1"}
    assert run_model(m, "i 1 r".split())[2] == {"0", "1"}


# counters

def test_counter_clamps():
    m = counter_model({"a": (1,), "b": (-1,)}, 1)
    assert run_model(m, "aab") == [(1,), (1,), (1,)]
    assert run_model(m, "abb") == [(1,), (0,), (-1,)]
    m2 = counter_model({"a": (1,), "b": (-1,)}, 3)
    assert run_model(m2, "aaaab") == [(1,), (2,), (3,), (3,), (3,)]
    zero = counter_model({"a": (0,), "b": (0,)}, 2)
    assert set(run_model(zero, "abba")) == {(0,)}


def test_counter_assignments():
    assert counter_assignment(get_language("anbn")) == {"a": (1,), "b": (-1,)}
    assert counter_assignment(get_language("anbncn")) == {"a": (1, 0), "b": (-1, 1), "c": (0, -1)}


def test_counter_width():
    layer = compile_counter({"a": (1, 0), "b": (0, 1)}, 3)
    assert layer.d == 2 * 7


def test_counter_language_examples():
    d1 = compile_counter_language("dyck1")
    assert run_model(d1, "()")[-1] == {"(", EOS}
    spec = get_language("anbncndn")
    m = compile_counter_language(spec)
    assert run_model(m, "aabbccdd") == spec.labels("aabbccdd")


@pytest.mark.parametrize("name", ["dyck1", "shuffle2", "boolean3", "anbn", "anbncn"])
def test_counter_languages_exhaustive(name):
    spec = get_language(name)
    bound = 10 if len(spec.alphabet) <= 3 else 6
    assert check_equivalence(compile_language(name), spec, Exhaustive(bound)).passed


def test_unsupported_counter_language():
    with pytest.raises(ValueError):
        compile_counter_language("tomita1")


# bounded Dyck

def test_bounded_dyck_examples():
    m = compile_bounded_dyck(8, 10)
    opens = {f"({i}" for i in range(1, 9)}
    assert len(m.layers) == 2
    assert run_model(m, ["(1", "(2", ")2"])[-1] == opens | {")1"}
    assert run_model(m, ["(1", ")1"])[-1] == opens | {EOS}
    deep = ["(3"] * 10
    assert not any(s.startswith("(") for s in run_model(m, deep)[-1])


def test_bounded_dyck_width_bound():
    for K, h in ((2, 2), (8, 10), (16, 20)):
        m = compile_bounded_dyck(K, h)
        bits = math.ceil(math.log2(2 * K))
        assert m.width <= (2 * h + 1) + h * (1 + bits)


@pytest.mark.parametrize("K,h", [(1, 1), (2, 3), (3, 2)])
def test_small_bounded_dyck_exhaustive(K, h):
    spec = get_language(f"bdyck_{K}_{h}")
    assert check_equivalence(compile_bounded_dyck(K, h), spec, Exhaustive(8)).passed


# rotation and signed gates

def test_mod_counter_examples():
    assert recognize(compile_mod_counter(3, {"1"}), "111")
    m2 = compile_mod_counter(2, {"1"})
    assert m2.layers[0].gates[1][0].denominator == 2
    import numpy as np

    from ssmlang.ssm import fast_recognize

    assert fast_recognize(compile_mod_counter(5, {"1"}), np.ones(10**5, dtype=np.int64))


def test_signed_parity_matches_popcount():
    m = compile_parity_signed()
    assert m.flags == {"NONNEGATIVE": False, "TIME_INVARIANT": False}
    rng = random.Random(0)
    for _ in range(1000):
        w = "".join(rng.choice("01") for _ in range(64))
        assert recognize(m, w) == (w.count("1") % 2 == 0)


def test_dispatch_rotation_targets():
    for name in ("parity", "aa", "aaaa", "tomita6"):
        spec = get_language(name)
        m = compile_language(name, gates="rotation")
        assert check_equivalence(m, spec, Exhaustive(10)).passed
    with pytest.raises(NotStarFree):
        compile_language("abab", gates="rotation")
    with pytest.raises(NotStarFree):
        compile_language("tomita4", gates="signed")
    with pytest.raises(ValueError):
        compile_language("tomita4", gates="bogus")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["tomita2", "tomita7", "d3", "abd", "abcde", "flipflop", "shuffle4",
                        "boolean5", "bdyck_2_3"]), st.integers(0, 10_000))
def test_compiled_models_match_oracle_on_random_words(name, seed):
    spec = get_language(name)
    m = compile_language(name)
    runner = Runner(m)
    for w, labels in generate_samples(spec, (1, 120), 5, seed):
        assert runner.outputs(w) == labels


SOUNDNESS_CATALOG = ("tomita1", "tomita2", "tomita4", "tomita7", "d2", "d3", "d4", "d12", "abcde",
                     "abd", "zero_two", "flipflop", "dyck1", "shuffle2", "shuffle4", "shuffle6",
                     "boolean3", "boolean5", "anbn", "anbncn", "anbncndn")


@pytest.mark.parametrize("name", SOUNDNESS_CATALOG)
def test_compiled_model_agrees_on_long_random_words(name):
    report = check_equivalence(compile_language(name), get_language(name), RandomWords(1000, (1, 500), 11))
    assert report.checked == 1000 and report.passed, report.mismatches[:3]
