import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ssmlang.automata import Dfa, dfa_run, is_aperiodic, minimize_dfa
from ssmlang.krohn_rhodes import NotStarFree, SetResetAutomaton, krohn_rhodes_decompose
from ssmlang.languages import NON_STAR_FREE, STAR_FREE, get_language


def words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def check_cascade(dfa, max_len):
    prog = krohn_rhodes_decompose(dfa)
    for w in words(dfa.alphabet, max_len):
        assert prog.decoded_run(w) == dfa_run(dfa, w), w
    return prog


def test_recording_automaton_law():
    sr = SetResetAutomaton.recording(("w", "r", "i", "0", "1"), ("w", "r", "i"))
    assert sr.obeys_set_reset_law()
    assert sr.states[sr.run("w 1 i 0".split())[-1]] == "i"
    assert sr.run("0 1 1 0".split()) == [0] * 5


def test_bad_reset_rejected():
    with pytest.raises(ValueError):
        SetResetAutomaton(("a", "b"), ("x",), {"y": 0})


def test_tomita1_single_component():
    dfa = minimize_dfa(get_language("tomita1").dfa)
    prog = check_cascade(dfa, 10)
    assert len(prog.components) == 1


def test_d2_component_bound():
    dfa = minimize_dfa(get_language("d2").dfa)
    prog = check_cascade(dfa, 8)
    assert len(prog.components) <= dfa.n_states


@pytest.mark.parametrize("name", [n for n in STAR_FREE if n != "d12"])
def test_star_free_cascades_reproduce_dfa(name):
    dfa = minimize_dfa(get_language(name).dfa)
    bound = 10 if len(dfa.alphabet) == 2 else (7 if len(dfa.alphabet) <= 3 else 5)
    prog = check_cascade(dfa, bound)
    assert all(c.obeys_set_reset_law() for c in prog.components)


def test_d12_cascade_on_samples():
    from ssmlang.languages import generate_samples

    spec = get_language("d12")
    dfa = minimize_dfa(spec.dfa)
    prog = krohn_rhodes_decompose(dfa)
    for w, _ in generate_samples(spec, (1, 60), 50, seed=0):
        assert prog.decoded_run(w) == dfa_run(dfa, w)


@pytest.mark.parametrize("name", NON_STAR_FREE)
def test_non_star_free_refused(name):
    with pytest.raises(NotStarFree):
        krohn_rhodes_decompose(get_language(name).dfa)


def test_cascade_text_dump():
    prog = krohn_rhodes_decompose(minimize_dfa(get_language("tomita2").dfa))
    text = prog.to_text()
    assert text.startswith("alphabet:") and "component 0" in text


@st.composite
def random_dfas(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, 2))
    delta = tuple(tuple(draw(st.integers(0, n - 1)) for _ in range(k)) for _ in range(n))
    acc = frozenset(q for q in range(n) if draw(st.booleans()))
    return Dfa(tuple("ab"[:k]), delta, 0, acc)


@settings(max_examples=80, deadline=None)
@given(random_dfas())
def test_decomposition_or_refusal(dfa):
    minimal = minimize_dfa(dfa)
    if is_aperiodic(minimal):
        check_cascade(minimal, 7)
    else:
        with pytest.raises(NotStarFree):
            krohn_rhodes_decompose(minimal)
