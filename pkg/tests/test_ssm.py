import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssmlang.compiler import (
    compile_flip_flop,
    compile_language,
    compile_mod_counter,
    compile_parity_signed,
    compile_readout_last,
)
from ssmlang.numerics import UnitRotation, fx_from_fraction
from ssmlang.ssm import (
    Decoder,
    DecoderGap,
    Field,
    Mix,
    ModelFormatError,
    Readout,
    Rule,
    Runner,
    SsmLayer,
    SsmModel,
    Test,
    dumps_model,
    fast_recognize,
    layer_step,
    loads_model,
    recognize,
    run_model,
    trace,
)
from ssmlang.verify import random_nonneg_model

P = 8
ONE = 1 << P


def symbol_decoder(k=2):
    return Decoder((Field("s", tuple(Rule((Test(i, ">", 0),), i) for i in range(k))),),
                   tuple(((i,), i) for i in range(k)))


def one_hot(i, k=2):
    return tuple(ONE if j == i else 0 for j in range(k))


def scalar_model(gate, inc, h0=0):
    layer = SsmLayer(1, symbol_decoder(), {0: (gate,), 1: (gate,)}, {0: (inc,), 1: (inc,)}, (h0,))
    field = Field("sign", (Rule((Test(0, ">", 0),), 1), Rule((), 0)))
    readout = Readout(Decoder((field,), (((1,), 1), ((0,), 0))), {1: True, 0: False}, "accept")
    return SsmModel(("0", "1"), {"0": one_hot(0), "1": one_hot(1)}, (layer,), readout, P)


def test_pure_accumulation():
    model = scalar_model(ONE, ONE)
    assert trace(model, "11111")[-1].h[0] == (5 * ONE,)


def test_zero_gate_overwrites():
    layer = SsmLayer(1, symbol_decoder(), {0: (0,), 1: (0,)}, {0: (3,), 1: (7,)}, (0,))
    for h_prev in (0, 12345, -999):
        assert layer_step(layer, (h_prev,), one_hot(1), P)[0] == (7,)
        assert layer_step(layer, (h_prev,), one_hot(0), P)[0] == (3,)


def test_readout_last_interval_bounds():
    layer = compile_readout_last(("0", "1"), precision=P)
    block = 0  # the block tracking symbol "0"
    h = layer.h0
    for a in "10":
        h, _ = layer_step(layer, h, one_hot(int(a)), P)
    n1, n2, n3, n4 = h[4 * block: 4 * block + 4]
    assert ONE <= n1 <= fx_from_fraction("1.25", P)
    assert ONE // 4 <= n2 <= ONE // 2
    assert (n3, n4) == (ONE, 0)
    h = layer.h0
    for a in "00":
        h, _ = layer_step(layer, h, one_hot(int(a)), P)
    assert 0 <= h[4 * block + 1] <= ONE // 8


def test_flipflop_run_example():
    out = run_model(compile_flip_flop(), "w 1 i 0 r".split())
    assert out[4] == {"1"}


def test_empty_word_gives_empty_output():
    assert run_model(compile_flip_flop(), []) == []


def test_signed_parity_examples():
    m = compile_parity_signed()
    assert recognize(m, "11")
    assert not recognize(m, "111")
    assert recognize(m, "")
    assert not recognize(m, "10")


def test_mod3_rotation_accepts_six_ones():
    m = compile_mod_counter(3, {"1"}, alphabet=("1",))
    assert recognize(m, "1" * 6)
    assert not recognize(m, "1" * 7)


def test_tomita4_rejects_000():
    assert not recognize(compile_language("tomita4"), "000")


def test_value_readout_cannot_recognize():
    from ssmlang.compiler import readout_last_model

    with pytest.raises(ValueError):
        recognize(readout_last_model(("a", "b")), "ab")


def test_out_of_alphabet_symbol():
    with pytest.raises(ValueError):
        run_model(compile_flip_flop(), ["x"])


def test_halving_model_trace():
    half = ONE // 2
    model = scalar_model(half, half)
    records = trace(model, "1" * 40)
    assert len(records) == 40
    hs = [r.h[0][0] for r in records]
    for t in range(1, 9):
        assert hs[t - 1] == ONE - (ONE >> t)
    assert len(set(hs[20:])) == 1
    assert trace(model, "1" * 40) == records


def test_decoder_gap_is_reported():
    dec = Decoder((Field("s", (Rule((Test(0, ">", 0),), 0),)),), (((0,), 0),))
    with pytest.raises(DecoderGap):
        dec.decode((0, ONE))


def test_decoder_first_match_and_wildcards():
    f = Field("s", (Rule((Test(0, ">", 0),), 1), Rule((), 0)))
    g = Field("t", (Rule((Test(1, ">", 0),), 1), Rule((), 0)))
    dec = Decoder((f, g), (((1, None), 5), ((None, 1), 6), ((None, None), 7)))
    assert dec.decode((1, 1)) == 5
    assert dec.decode((0, 1)) == 6
    assert dec.decode((0, 0)) == 7


def test_affine_mix_and_pass_through():
    mix = Mix("affine", True, ((((0, ONE), (1, ONE)), ONE),))
    assert mix.apply((ONE, 2 * ONE), (5,), P) == (4 * ONE, 5)
    assert mix.out_dim(2, 1) == 2


def test_gated_mixes_are_deterministic():
    glu = Mix("glu", False, ((((0, ONE),), 0),), ((((0, ONE),), 0),))
    swiglu = Mix("swiglu", False, ((((0, ONE),), 0),), ((((0, ONE),), 0),))
    assert glu.transform((0,), P) == (0,)
    assert glu.transform((4 * ONE,), P) == glu.transform((4 * ONE,), P)
    assert swiglu.transform((ONE,), P)[0] > 0


def test_layer_validation():
    with pytest.raises(ValueError):
        SsmLayer(2, symbol_decoder(), {0: (0, 0)}, {0: (0, 0), 1: (0, 0)}, (0, 0))
    with pytest.raises(ValueError):
        SsmLayer(1, symbol_decoder(), {0: (0,), 1: (0,)}, {0: (0,), 1: (0,)}, (0, 0))
    with pytest.raises(ValueError):
        SsmLayer(1, symbol_decoder(), {0: (ONE,), 1: (ONE,)}, {0: (0,), 1: (0,)},
                 ((ONE, UnitRotation(0)),), complex=True)


def test_flags():
    assert compile_flip_flop().flags == {"NONNEGATIVE": True, "TIME_INVARIANT": False}
    assert compile_parity_signed().flags == {"NONNEGATIVE": False, "TIME_INVARIANT": False}
    assert scalar_model(ONE // 2, 1).flags["TIME_INVARIANT"]


def test_runner_matches_reference():
    m = compile_language("tomita7")
    r = Runner(m)
    rng = random.Random(0)
    for _ in range(50):
        w = [rng.choice("01") for _ in range(rng.randint(0, 30))]
        assert r.outputs(w) == run_model(m, w)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_fast_scan_matches_stepwise(k):
    m = compile_mod_counter(k, {"1"})
    rng = np.random.default_rng(k)
    for _ in range(30):
        sym = rng.integers(0, 2, rng.integers(0, 40))
        word = ["01"[i] for i in sym]
        assert fast_recognize(m, sym) == recognize(m, word)
    signed = compile_parity_signed()
    sym = rng.integers(0, 2, 33)
    assert fast_recognize(signed, sym) == recognize(signed, ["01"[i] for i in sym])


def test_serialization_round_trip_and_flag_check():
    m = compile_mod_counter(5, {"1": 2, "0": 1})
    text = dumps_model(m)
    assert dumps_model(loads_model(text)) == text
    obj = json.loads(text)
    obj["flags"]["NONNEGATIVE"] = True
    with pytest.raises(ModelFormatError):
        loads_model(json.dumps(obj))


def test_serialized_gates_are_decimal_strings():
    obj = json.loads(dumps_model(compile_flip_flop()))
    gates = obj["layers"][0]["gateTable"]
    assert gates["3"] == ["1", "1", "0"]
    assert all(isinstance(g, str) for vec in gates.values() for g in vec)
    rot = json.loads(dumps_model(compile_mod_counter(3, {"1"})))["layers"][0]["gateTable"]
    assert rot["1"] == [{"rot": "1/3"}]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.sampled_from("01"), max_size=30))
def test_traces_stay_on_grid_and_are_pure(seed, word):
    rng = random.Random(seed)
    m = random_nonneg_model(seed, rng.randint(1, 3), rng.randint(2, 8))
    first = trace(m, word)
    assert first == trace(m, word)
    for rec in first:
        for vec in rec.h + rec.z:
            assert all(isinstance(x, int) for x in vec)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_models_have_sound_flags(seed):
    m = random_nonneg_model(seed, 1 + seed % 3, 2 + seed % 7)
    assert m.nonnegative
    assert all(g >= 0 for layer in m.layers for gate in layer.gates.values() for g in gate)
    assert loads_model(dumps_model(m)).flags == m.flags
