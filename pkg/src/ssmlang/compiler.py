"""Compilation of automata, counter systems and bracket languages into SSMs.

Every compiled layer passes its input through (``Mix1`` appends ``x``), so
the top output ``z`` of a stack is ``[features of layer L, ..., features of
layer 1, embedding]``.  Decoders address coordinates in that layout; when a
stack grows, the fields of lower layers are shifted right by the width of
the new features.

All binary codes live in state dimensions that hold exactly 0 or 1 before
normalization, so they are read back with ``> 0`` / ``== 0`` tests that do
not depend on the normalization scale.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

from .automata import EOS, Dfa, is_aperiodic, label_table, minimize_dfa
from .krohn_rhodes import (
    KEEP,
    CascadeProgram,
    NotStarFree,
    SetResetAutomaton,
    krohn_rhodes_decompose,
)
from .languages import BOOLEAN_OPERATORS, LanguageSpec, get_language
from .numerics import DEFAULT_PRECISION, UnitRotation, fx_from_fraction
from .ssm import (
    PASS_THROUGH,
    Decoder,
    Field,
    Mix,
    Readout,
    Rule,
    SsmLayer,
    SsmModel,
    Test,
)

__all__ = [
    "NotStarFree", "SetResetAutomaton", "CascadeProgram", "Tracker", "krohn_rhodes_decompose",
    "compile_set_reset", "compile_readout_last", "readout_last_model", "cascade_compose",
    "set_reset_tracker", "compile_star_free", "compile_flip_flop", "compile_counter",
    "compile_counter_language", "compile_bounded_dyck", "compile_mod_counter",
    "compile_parity_signed", "compile_language", "MIN_READOUT_LAST_PRECISION",
]

MIN_READOUT_LAST_PRECISION = 6
NONE_PREV = "NONE"


# ---------------------------------------------------------------------------
# small builders


def _one(p: int) -> int:
    return 1 << p


def n_bits(n: int) -> int:
    """Bits needed for codes ``0 .. n-1``."""
    return max(1, (n - 1).bit_length())


def binary_code(value: int, bits: int, p: int) -> tuple[int, ...]:
    return tuple(_one(p) if (value >> j) & 1 else 0 for j in range(bits))


def one_hot_embedding(alphabet: Sequence[str], p: int) -> dict[str, tuple[int, ...]]:
    return {a: tuple(_one(p) if j == k else 0 for j in range(len(alphabet)))
            for k, a in enumerate(alphabet)}


def symbol_field(alphabet: Sequence[str], offset: int = 0, name: str = "symbol") -> Field:
    """Index of the hot coordinate of a one-hot block starting at ``offset``."""
    return Field(name, tuple(Rule((Test(offset + k, ">", 0),), k) for k in range(len(alphabet))))


def code_field(name: str, offset: int, bits: int, values: Iterable[int]) -> Field:
    """Reads a binary code; bit 1 is ``> 0`` and bit 0 is ``== 0``."""
    rules = []
    for v in values:
        tests = tuple(Test(offset + j, ">" if (v >> j) & 1 else "==", 0) for j in range(bits))
        rules.append(Rule(tests, v))
    return Field(name, tuple(rules))


def counter_field(name: str, offset: int, clip: int) -> Field:
    """Clamped counter value from the ``2L+1`` offset dimensions at ``offset``.

    Dimension ``j`` holds ``c + o_j`` with offsets ``0, 1, -1, ..., L, -L``;
    normalization rescales but never changes signs or zeros.
    """
    pos = {0: offset}
    for k in range(1, clip + 1):
        pos[k] = offset + 2 * k - 1
        pos[-k] = offset + 2 * k
    rules = [Rule((Test(pos[-clip], ">=", 0),), clip)]
    for k in range(clip - 1, -clip, -1):
        rules.append(Rule((Test(pos[-k], "==", 0),), k))
    rules.append(Rule((Test(pos[clip], "<=", 0),), -clip))
    return Field(name, tuple(rules))


def shift_field(f: Field, k: int) -> Field:
    if k == 0:
        return f
    return Field(f.name, tuple(
        Rule(tuple(Test(t.coord + k, t.op, t.value) for t in r.tests), r.value) for r in f.rules
    ))


def shift_decoder(dec: Decoder, k: int) -> Decoder:
    return Decoder(tuple(shift_field(f, k) for f in dec.fields), dec.patterns)


def feature_width(layer: SsmLayer) -> int:
    """Width of a layer's own output, excluding the appended input."""
    return layer.mix1.feature_dim(layer.mix2.feature_dim(layer.d))


def table_readout(fields: Sequence[Field], domains: Sequence[Sequence[int] | None],
                  output: Callable[..., object], kind: str = "label") -> Readout:
    """Readout enumerating all field-value combinations (``None`` domain = wildcard)."""
    tags: dict = {}
    patterns = []
    for combo in itertools.product(*[d if d is not None else (None,) for d in domains]):
        out = output(*combo)
        tag = tags.setdefault(out, len(tags))
        patterns.append((combo, tag))
    table = {t: o for o, t in tags.items()}
    return Readout(Decoder(tuple(fields), tuple(patterns)), table, kind)


def _check_precision(p: int, minimum: int = 1) -> None:
    if not minimum <= p <= 64:
        raise ValueError(f"precision must be in [{minimum}, 64], got {p}")


# ---------------------------------------------------------------------------
# set-reset and readout-last layers


def compile_set_reset(sr: SetResetAutomaton, symbol_decoder: Decoder | None = None,
                      precision: int = DEFAULT_PRECISION) -> SsmLayer:
    """Layer of width ``1 + ceil(log2 |Q|)`` holding the binary code of the state.

    ``symbol_decoder`` maps the layer input to indices into ``sr.alphabet``;
    by default the input is a one-hot embedding of ``sr.alphabet``.  The last
    dimension is a constant 1 so normalization never sees a zero vector.
    """
    _check_precision(precision)
    if sr.n_states < 2:
        raise ValueError("a set-reset layer needs at least two states")
    p = precision
    bits = n_bits(sr.n_states)
    if symbol_decoder is None:
        symbol_decoder = Decoder((symbol_field(sr.alphabet),),
                                 tuple(((k,), k) for k in range(len(sr.alphabet))))
    gates, incs = {}, {}
    for tag in symbol_decoder.tags:
        a = sr.alphabet[tag]
        if a in sr.resets:
            gates[tag] = (0,) * (bits + 1)
            incs[tag] = binary_code(sr.resets[a], bits, p) + (_one(p),)
        else:
            gates[tag] = (_one(p),) * bits + (0,)
            incs[tag] = (0,) * bits + (_one(p),)
    h0 = binary_code(sr.start, bits, p) + (_one(p),)
    return SsmLayer(bits + 1, symbol_decoder, gates, incs, h0, normalize=True, mix1=PASS_THROUGH)


def set_reset_state_field(sr: SetResetAutomaton, offset: int = 0, name: str = "state") -> Field:
    return code_field(name, offset, n_bits(sr.n_states), range(sr.n_states))


def compile_readout_last(alphabet: Sequence[str] | int, symbol_decoder: Decoder | None = None,
                         precision: int = DEFAULT_PRECISION) -> SsmLayer:
    """Layer whose output reveals the previous symbol.

    Four dimensions per symbol ``s``: decayed counts (gate 1/4) of "``s``" and
    "not ``s``", and indicators of the current symbol being / not being ``s``.
    ``Mix1`` turns each block ``(n1, n2, n3, n4)`` into sign features
    ``n1 + n2 - 9/8 s``, ``n1 - 3/16 s``, ``n2 - 3/16 s`` and ``n3`` with
    ``s = n3 + n4``; see :func:`readout_last_field`.
    """
    _check_precision(precision, MIN_READOUT_LAST_PRECISION)
    p = precision
    size = alphabet if isinstance(alphabet, int) else len(alphabet)
    if symbol_decoder is None:
        if isinstance(alphabet, int):
            raise ValueError("an explicit decoder is needed when only the size is given")
        symbol_decoder = Decoder((symbol_field(alphabet),), tuple(((k,), k) for k in range(size)))
    one = _one(p)
    quarter = fx_from_fraction("1/4", p)
    gate = (quarter, quarter, 0, 0) * size
    gates, incs = {}, {}
    for tag in symbol_decoder.tags:
        gates[tag] = gate
        incs[tag] = tuple(
            x for b in range(size) for x in ((one, 0, one, 0) if b == tag else (0, one, 0, one))
        )
    nine_eighths = fx_from_fraction("9/8", p)
    three_16 = fx_from_fraction("3/16", p)
    rows = []
    for b in range(size):
        n1, n2, n3, n4 = 4 * b, 4 * b + 1, 4 * b + 2, 4 * b + 3
        rows.append((((n1, one), (n2, one), (n3, -nine_eighths), (n4, -nine_eighths)), 0))
        rows.append((((n1, one), (n3, -three_16), (n4, -three_16)), 0))
        rows.append((((n2, one), (n3, -three_16), (n4, -three_16)), 0))
        rows.append((((n3, one),), 0))
    return SsmLayer(4 * size, symbol_decoder, gates, incs, (0,) * (4 * size),
                    normalize=True, mix1=Mix("affine", True, tuple(rows)))


def readout_last_field(size: int, offset: int = 0, name: str = "prev") -> Field:
    """Index of the previous symbol, or ``size`` at the first position."""
    rules = []
    for b in range(size):
        f0, f1, f2, n3 = (offset + 4 * b + i for i in range(4))
        rules.append(Rule((Test(f0, ">", 0), Test(n3, ">", 0), Test(f2, "<", 0)), b))
        rules.append(Rule((Test(f0, ">", 0), Test(n3, "==", 0), Test(f1, ">", 0)), b))
    rules.append(Rule((), size))
    return Field(name, tuple(rules))


def readout_last_model(alphabet: Sequence[str], precision: int = DEFAULT_PRECISION) -> SsmModel:
    """One readout-last layer with a readout reporting the previous symbol (``None`` at t=1)."""
    layer = compile_readout_last(alphabet, precision=precision)
    field = readout_last_field(len(alphabet))
    patterns = tuple(((k,), k) for k in range(len(alphabet) + 1))
    table = {k: a for k, a in enumerate(alphabet)}
    table[len(alphabet)] = None
    readout = Readout(Decoder((field,), patterns), table, "value")
    return SsmModel(tuple(alphabet), one_hot_embedding(alphabet, precision), (layer,), readout,
                    precision, name="readout-last")


# ---------------------------------------------------------------------------
# trackers and cascade composition


@dataclass(frozen=True)
class Tracker:
    """A compiled stack together with the automaton it tracks.

    ``state_decoder`` maps the top output to an index into ``states``;
    ``symbol_field`` recovers the current input symbol.  The model's readout
    reports ``(state, symbol)``.  States are tuples so cascades can
    concatenate them.
    """

    model: SsmModel
    start: tuple
    step: Callable[[tuple, str], tuple]
    states: tuple[tuple, ...]
    state_decoder: Decoder
    symbol_field: Field

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.model.alphabet

    @property
    def n_layers(self) -> int:
        return len(self.model.layers)

    def features_width(self) -> int:
        return sum(feature_width(layer) for layer in self.model.layers)


def _tracker_readout(states, state_decoder: Decoder, sym_field: Field, alphabet) -> Readout:
    patterns = []
    table = {}
    n = len(alphabet)
    for pattern, idx in state_decoder.patterns:
        for k in range(n):
            tag = idx * n + k
            patterns.append((tuple(pattern) + (k,), tag))
            table[tag] = (states[idx], alphabet[k])
    return Readout(Decoder(state_decoder.fields + (sym_field,), tuple(patterns)), table, "value")


def _make_tracker(layers, alphabet, start, step, states, state_decoder, sym_field, p, name=""):
    readout = _tracker_readout(states, state_decoder, sym_field, alphabet)
    model = SsmModel(tuple(alphabet), one_hot_embedding(alphabet, p), tuple(layers), readout, p,
                     name=name)
    return Tracker(model, start, step, tuple(states), state_decoder, sym_field)


def set_reset_tracker(sr: SetResetAutomaton, precision: int = DEFAULT_PRECISION,
                      input_alphabet: Sequence[str] | None = None,
                      input_map: dict | None = None) -> Tracker:
    """Single set-reset layer as a tracker.

    With ``input_map`` the layer reads ``input_alphabet`` and feeds
    ``input_map[symbol]`` to the automaton.
    """
    p = precision
    if input_alphabet is None:
        input_alphabet, input_map = sr.alphabet, {a: a for a in sr.alphabet}
    input_alphabet = tuple(input_alphabet)
    dec = Decoder((symbol_field(input_alphabet),),
                  tuple(((k,), sr.alphabet.index(input_map[a])) for k, a in enumerate(input_alphabet)))
    layer = compile_set_reset(sr, dec, p)
    states = tuple((q,) for q in range(sr.n_states))
    state_dec = Decoder((set_reset_state_field(sr),), tuple(((q,), q) for q in range(sr.n_states)))
    return _make_tracker(
        (layer,), input_alphabet, (sr.start,),
        lambda s, a: (sr.step(s[0], input_map[a]),),
        states, state_dec, symbol_field(input_alphabet, layer.d), p,
    )


def _reads_only_below(dec: Decoder | Field, limit: int) -> bool:
    fields = dec.fields if isinstance(dec, Decoder) else (dec,)
    return all(t.coord < limit for f in fields for r in f.rules for t in r.tests)


def cascade_compose(lower: Tracker, upper: Tracker,
                    wiring: Callable[[tuple, str], str] | dict) -> Tracker:
    """Stack ``lower``, a readout-last layer and ``upper``: ``L1 + L2 + 1`` layers.

    The upper automaton reads ``wiring(lower state before the symbol, symbol)``.
    The readout-last layer runs over the classes of lower states that induce
    the same wiring row, which is all the upper stack needs from the past.
    Upper layers above the first may only read upper features, never the
    upper embedding, since that embedding is replaced.
    """
    p = lower.model.precision
    if upper.model.precision != p:
        raise ValueError("precision mismatch")
    wire = wiring.__getitem__ if isinstance(wiring, dict) else wiring
    if isinstance(wiring, dict):
        wire = lambda s, a: wiring[(s, a)]  # noqa: E731
    sigma = lower.alphabet

    def row(s):
        out = tuple(wire(s, a) for a in sigma)
        for sym in out:
            if sym not in upper.alphabet:
                raise ValueError(f"wiring produced {sym!r}, not in the upper alphabet")
        return out

    classes: dict[tuple, int] = {}
    state_class = [classes.setdefault(row(s), len(classes)) for s in lower.states]
    start_row = row(lower.start)
    rows = list(classes)
    n_cls = len(rows)

    rl_dec = Decoder(lower.state_decoder.fields,
                     tuple((pat, state_class[idx]) for pat, idx in lower.state_decoder.patterns))
    rl_layer = compile_readout_last(n_cls, rl_dec, p)
    rl_width = feature_width(rl_layer)

    # upper first layer now reads (class of previous lower state, current symbol)
    up_layers = upper.model.layers
    emb_width = len(next(iter(upper.model.embedding.values())))
    offset = feature_width(up_layers[0])
    for layer in up_layers[1:]:
        if not _reads_only_below(layer.decoder, offset):
            raise ValueError("upper layers above the first must not read the upper embedding")
        offset += feature_width(layer)
    if not _reads_only_below(upper.state_decoder, offset):
        raise ValueError("upper state decoder must not read the upper embedding")
    del emb_width

    first = up_layers[0]
    patterns = []
    for c in range(n_cls + 1):
        wired = rows[c] if c < n_cls else start_row
        for k in range(len(sigma)):
            tag = first.decoder.decode(upper.model.embed(wired[k]))
            patterns.append(((c, k), tag))
    new_first = replace(first, decoder=Decoder(
        (readout_last_field(n_cls), shift_field(lower.symbol_field, rl_width)), tuple(patterns)))
    layers = lower.model.layers + (rl_layer, new_first) + up_layers[1:]

    n1 = len(lower.start)
    lower_index = {s: i for i, s in enumerate(lower.states)}
    upper_index = {s: i for i, s in enumerate(upper.states)}

    def step(s, a):
        s1, s2 = s[:n1], s[n1:]
        return lower.step(s1, a) + upper.step(s2, wire(s1, a))

    start = lower.start + upper.start
    seen = {start: None}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for a in sigma:
            t = step(s, a)
            if t not in seen:
                seen[t] = None
                todo.append(t)
    states = tuple(seen)

    shift = upper.features_width() + rl_width
    low_pats: dict[int, list] = {}
    for pat, idx in lower.state_decoder.patterns:
        low_pats.setdefault(idx, []).append(pat)
    up_pats: dict[int, list] = {}
    for pat, idx in upper.state_decoder.patterns:
        up_pats.setdefault(idx, []).append(pat)
    state_patterns = []
    for i, s in enumerate(states):
        for pa in low_pats[lower_index[s[:n1]]]:
            for pb in up_pats[upper_index[s[n1:]]]:
                state_patterns.append((tuple(pa) + tuple(pb), i))
    state_dec = Decoder(
        tuple(shift_field(f, shift) for f in lower.state_decoder.fields) + upper.state_decoder.fields,
        tuple(state_patterns),
    )
    return _make_tracker(layers, sigma, start, step, states, state_dec,
                         shift_field(lower.symbol_field, shift), p)


# ---------------------------------------------------------------------------
# star-free languages


def _cascade_tracker(prog: CascadeProgram, precision: int) -> Tracker:
    if not prog.components:
        trivial = SetResetAutomaton(("const", "unused"), (KEEP,), {})
        return set_reset_tracker(trivial, precision, prog.alphabet, {a: KEEP for a in prog.alphabet})
    first = prog.components[0]
    tracker = set_reset_tracker(first, precision, prog.alphabet,
                                {a: prog.wiring[0][((), a)] for a in prog.alphabet})
    for i in range(1, len(prog.components)):
        upper = set_reset_tracker(prog.components[i], precision)
        table = prog.wiring[i]
        tracker = cascade_compose(tracker, upper, lambda s, a, table=table: table[(s, a)])
    return tracker


def compile_star_free(dfa: Dfa, label_map: dict | None = None,
                      precision: int = DEFAULT_PRECISION, name: str = "") -> SsmModel:
    """Predictive model for a star-free language given by ``dfa``.

    ``label_map`` maps DFA states to next-symbol sets (default: co-reachability
    labels; states with no completion map to the empty set).  Raises
    :class:`NotStarFree` for languages whose syntactic monoid has a group.
    """
    minimal = minimize_dfa(dfa)
    if not is_aperiodic(minimal):
        raise NotStarFree("language is not star-free: its syntactic monoid contains a group; "
                          "no nonnegative-gated model can recognize it at all lengths")
    _check_precision(precision, MIN_READOUT_LAST_PRECISION)
    labels = _labels_on_minimal(dfa, minimal, label_map)
    prog = krohn_rhodes_decompose(minimal)
    tracker = _cascade_tracker(prog, precision)
    output = prog.output if prog.components else {(): minimal.start}

    def label_of_state(idx):
        joint = tracker.states[idx]
        return labels[output[joint if prog.components else ()]]

    tags: dict = {}
    patterns = []
    for pat, idx in tracker.state_decoder.patterns:
        lab = label_of_state(idx)
        patterns.append((pat, tags.setdefault(lab, len(tags))))
    readout = Readout(Decoder(tracker.state_decoder.fields, tuple(patterns)),
                      {t: lab for lab, t in tags.items()}, "label")
    return replace(tracker.model, readout=readout, name=name or "star-free")


def _labels_on_minimal(dfa: Dfa, minimal: Dfa, label_map: dict | None) -> dict:
    if label_map is None:
        table = label_table(minimal)
        return {q: table.get(q, frozenset()) for q in range(minimal.n_states)}
    # translate through access words: minimal state -> some original state
    access = {minimal.start: ()}
    todo = deque([minimal.start])
    while todo:
        q = todo.popleft()
        for a, r in zip(minimal.alphabet, minimal.delta[q]):
            if r not in access:
                access[r] = access[q] + (a,)
                todo.append(r)
    return {q: frozenset(label_map[dfa.run(w)]) for q, w in access.items()}


def cascade_layer_count(prog: CascadeProgram) -> int:
    return max(1, 2 * len(prog.components) - 1)


# ---------------------------------------------------------------------------
# Flip-Flop


FLIPFLOP_ALPHABET = ("w", "r", "i", "0", "1")


def compile_flip_flop(precision: int = DEFAULT_PRECISION) -> SsmModel:
    """Two set-reset layers: the last instruction, then the bit after the last ``w``."""
    p = precision
    _check_precision(p)
    sigma = FLIPFLOP_ALPHABET
    instr = SetResetAutomaton.recording(sigma, ("w", "r", "i"))
    layer1 = compile_set_reset(instr, precision=p)
    d1 = layer1.d
    stored = SetResetAutomaton(("none", "0", "1"), (KEEP, "set0", "set1"), {"set0": 1, "set1": 2})
    w_code = instr.states.index("w")
    dec2 = Decoder(
        (set_reset_state_field(instr, 0, "instruction"), symbol_field(sigma, d1)),
        (((w_code, sigma.index("0")), 1), ((w_code, sigma.index("1")), 2), ((None, None), 0)),
    )
    layer2 = compile_set_reset(stored, dec2, p)
    d2 = layer2.d

    def label(bit, sym):
        a = sigma[sym]
        if a in "01":
            return frozenset({"w", "r", "i", EOS})
        if a == "r" and bit:
            return frozenset({stored.states[bit]})
        return frozenset({"0", "1"})

    readout = table_readout(
        (set_reset_state_field(stored, 0, "stored"), symbol_field(sigma, d2 + d1)),
        (range(stored.n_states), range(len(sigma))), label,
    )
    return SsmModel(sigma, one_hot_embedding(sigma, p), (layer1, layer2), readout, p,
                    name="flipflop")


# ---------------------------------------------------------------------------
# counters


def counter_offsets(clip: int) -> list[int]:
    out = [0]
    for k in range(1, clip + 1):
        out += [k, -k]
    return out


def compile_counter(u: dict[str, Sequence[int]], clip: int = 1,
                    alphabet: Sequence[str] | None = None,
                    precision: int = DEFAULT_PRECISION) -> SsmLayer:
    """``C`` integer counters, each spread over ``2L+1`` dimensions.

    Gate 1, increment ``u(symbol)``; ``Mix2`` adds the offsets
    ``0, 1, -1, ..., L, -L`` before normalization so the clamped value in
    ``[-L, L]`` can be read with sign tests (:func:`counter_field`).
    """
    if clip < 1:
        raise ValueError("clip bound must be >= 1")
    _check_precision(precision)
    p = precision
    alphabet = tuple(alphabet if alphabet is not None else u)
    n_counters = len(next(iter(u.values())))
    if n_counters < 1 or any(len(v) != n_counters for v in u.values()):
        raise ValueError("all increments need the same positive length")
    span = 2 * clip + 1
    d = span * n_counters
    one = _one(p)
    dec = Decoder((symbol_field(alphabet),), tuple(((k,), k) for k in range(len(alphabet))))
    gates = {k: (one,) * d for k in range(len(alphabet))}
    incs = {k: tuple(u[a][c] * one for c in range(n_counters) for _ in range(span))
            for k, a in enumerate(alphabet)}
    offsets = counter_offsets(clip)
    rows = tuple((((c * span + j, one),), offsets[j] * one)
                 for c in range(n_counters) for j in range(span))
    return SsmLayer(d, dec, gates, incs, (0,) * d, mix2=Mix("affine", rows=rows),
                    normalize=True, mix1=PASS_THROUGH)


def counter_model(u: dict[str, Sequence[int]], clip: int = 1, alphabet=None,
                  precision: int = DEFAULT_PRECISION) -> SsmModel:
    """One counter layer with a readout reporting the clamped counter values."""
    layer = compile_counter(u, clip, alphabet, precision)
    alphabet = tuple(alphabet if alphabet is not None else u)
    n_counters = layer.d // (2 * clip + 1)
    fields = [counter_field(f"c{c}", c * (2 * clip + 1), clip) for c in range(n_counters)]
    rng = range(-clip, clip + 1)
    readout = table_readout(fields, [rng] * n_counters, lambda *vals: tuple(vals), "value")
    return SsmModel(alphabet, one_hot_embedding(alphabet, precision), (layer,), readout, precision,
                    name="counter")


def counter_assignment(spec: LanguageSpec) -> dict[str, tuple[int, ...]]:
    name = spec.name
    if name == "dyck1":
        return {"(": (1,), ")": (-1,)}
    if name.startswith("shuffle"):
        k = spec.params["k"]
        u = {}
        for i in range(k):
            unit = [0] * k
            unit[i] = 1
            u[f"({i + 1}"] = tuple(unit)
            u[f"){i + 1}"] = tuple(-x for x in unit)
        return u
    if name.startswith("boolean"):
        return {a: ((BOOLEAN_OPERATORS[a] - 1) if a in BOOLEAN_OPERATORS else -1,)
                for a in spec.alphabet}
    if name in ("anbn", "anbncn", "anbncndn"):
        letters = spec.alphabet
        k = len(letters)
        u = {}
        for j, a in enumerate(letters):
            vec = [0] * (k - 1)
            if j < k - 1:
                vec[j] += 1
            if j > 0:
                vec[j - 1] -= 1
            u[a] = tuple(vec)
        return u
    raise ValueError(f"no counter construction for {name}")


def compile_counter_language(spec: LanguageSpec | str,
                             precision: int = DEFAULT_PRECISION) -> SsmModel:
    """One counter layer (clip 1) plus a readout over (counter signs, current symbol)."""
    if isinstance(spec, str):
        spec = get_language(spec)
    u = counter_assignment(spec)
    sigma = spec.alphabet
    layer = compile_counter(u, 1, sigma, precision)
    n_counters = layer.d // 3
    fields = [counter_field(f"c{c}", 3 * c, 1) for c in range(n_counters)]
    signs = range(-1, 2)
    name = spec.name
    everything = frozenset(sigma)

    if name == "dyck1":
        def label(c):
            return frozenset({"(", EOS}) if c == 0 else (everything if c > 0 else frozenset())
        readout = table_readout(fields, [signs], label)
    elif name.startswith("shuffle"):
        opens = [a for a in sigma if a.startswith("(")]

        def label(*cs):
            if any(c < 0 for c in cs):
                return frozenset()
            out = set(opens) | {f"){i + 1}" for i, c in enumerate(cs) if c > 0}
            if not any(cs):
                out.add(EOS)
            return frozenset(out)
        readout = table_readout(fields, [signs] * n_counters, label)
    elif name.startswith("boolean"):
        def label(c):
            return frozenset({EOS}) if c < 0 else everything
        readout = table_readout(fields, [signs], label)
    else:
        k = len(sigma)
        fields.append(symbol_field(sigma, layer.d))

        def label(*vals):
            *cs, j = vals
            if j == 0:
                return frozenset(sigma[:2])
            c = cs[j - 1]
            if c > 0:
                return frozenset({sigma[j]})
            if c < 0:
                return frozenset()
            return frozenset({EOS}) if j == k - 1 else frozenset({sigma[j + 1]})
        readout = table_readout(fields, [signs] * n_counters + [range(k)], label)
    return SsmModel(sigma, one_hot_embedding(sigma, precision), (layer,), readout, precision,
                    name=name)


# ---------------------------------------------------------------------------
# bounded-depth Dyck


def compile_bounded_dyck(K: int, h: int, precision: int = DEFAULT_PRECISION) -> SsmModel:
    """Depth counter (clip ``h``), then one set-reset memory per depth.

    Memory ``D`` records the type of the last opening bracket that reached
    depth ``D``; the readout consults the memory at the current depth.
    """
    if K < 1 or h < 1:
        raise ValueError("need K >= 1 and h >= 1")
    p = precision
    _check_precision(p)
    spec = get_language(f"bdyck_{K}_{h}")
    sigma = spec.alphabet
    u = {a: ((1,) if a.startswith("(") else (-1,)) for a in sigma}
    layer1 = compile_counter(u, h, sigma, p)
    d1 = layer1.d
    bits = n_bits(2 * K)
    d2 = h * bits + 1
    one = _one(p)

    depth_field = counter_field("depth", 0, h)
    sym_field = symbol_field(sigma, d1)
    # tag 0 keeps everything; tag (D-1)*K + i resets memory D to bracket type i
    patterns = []
    for depth in range(1, h + 1):
        for i in range(1, K + 1):
            patterns.append(((depth, sigma.index(f"({i}")), (depth - 1) * K + i))
    patterns.append(((None, None), 0))
    dec2 = Decoder((depth_field, sym_field), tuple(patterns))
    keep_gate = (one,) * (h * bits) + (0,)
    dummy_inc = (0,) * (h * bits) + (one,)
    gates = {0: keep_gate}
    incs = {0: dummy_inc}
    for depth in range(1, h + 1):
        lo = (depth - 1) * bits
        for i in range(1, K + 1):
            tag = (depth - 1) * K + i
            g = list(keep_gate)
            b = list(dummy_inc)
            code = binary_code(i, bits, p)
            for j in range(bits):
                g[lo + j] = 0
                b[lo + j] = code[j]
            gates[tag] = tuple(g)
            incs[tag] = tuple(b)
    h0 = (0,) * (h * bits) + (one,)
    layer2 = SsmLayer(d2, dec2, gates, incs, h0, normalize=True, mix1=PASS_THROUGH)

    memory_fields = [code_field(f"open@{D}", (D - 1) * bits, bits, range(K + 1))
                     for D in range(1, h + 1)]
    fields = (shift_field(depth_field, d2),) + tuple(memory_fields)
    opens = frozenset(f"({i}" for i in range(1, K + 1))
    readout_patterns = [((0,) + (None,) * h, 0)]
    table = {0: opens | {EOS}}
    for depth in range(1, h + 1):
        for i in range(1, K + 1):
            pattern = [depth] + [None] * h
            pattern[depth] = i
            tag = len(table)
            readout_patterns.append((tuple(pattern), tag))
            table[tag] = frozenset({f"){i}"}) | (opens if depth < h else frozenset())
    readout_patterns.append(((None,) * (h + 1), len(table)))
    table[len(table)] = frozenset()
    readout = Readout(Decoder(fields, tuple(readout_patterns)), table, "label")
    return SsmModel(sigma, one_hot_embedding(sigma, p), (layer1, layer2), readout, p,
                    name=spec.name)


# ---------------------------------------------------------------------------
# signed and rotation gates


def compile_mod_counter(k: int, count_symbols: Iterable[str] | dict[str, int],
                        alphabet: Sequence[str] = ("0", "1"),
                        precision: int = DEFAULT_PRECISION) -> SsmModel:
    """Recognize "weighted symbol count is 0 mod k" with one rotation-gated coordinate.

    ``count_symbols`` lists the symbols that advance the count by one, or maps
    symbols to arbitrary integer steps.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    p = precision
    _check_precision(p)
    steps = dict(count_symbols) if isinstance(count_symbols, dict) else {a: 1 for a in count_symbols}
    alphabet = tuple(alphabet)
    if not set(steps) <= set(alphabet):
        raise ValueError("counting symbols must belong to the alphabet")
    dec = Decoder((symbol_field(alphabet),), tuple(((j,), j) for j in range(len(alphabet))))
    gates = {j: (UnitRotation(steps.get(a, 0), k),) for j, a in enumerate(alphabet)}
    incs = {j: (0,) for j in range(len(alphabet))}
    layer = SsmLayer(1, dec, gates, incs, ((_one(p), UnitRotation(0)),), complex=True)
    field = Field("residue", tuple(Rule((Test(0, "rot", UnitRotation(r, k)),), r) for r in range(k)))
    readout = Readout(Decoder((field,), tuple(((r,), r) for r in range(k))),
                      {r: r == 0 for r in range(k)}, "accept")
    return SsmModel(alphabet, one_hot_embedding(alphabet, p), (layer,), readout, p,
                    name=f"mod{k}")


def compile_parity_signed(precision: int = DEFAULT_PRECISION) -> SsmModel:
    """``h0 = 1``, gate ``-1`` on ``1`` and ``+1`` on ``0``, no increment; accept iff positive."""
    p = precision
    _check_precision(p)
    one = _one(p)
    alphabet = ("0", "1")
    dec = Decoder((symbol_field(alphabet),), (((0,), 0), ((1,), 1)))
    layer = SsmLayer(1, dec, {0: (one,), 1: (-one,)}, {0: (0,), 1: (0,)}, (one,))
    field = Field("sign", (Rule((Test(0, ">", 0),), 1), Rule((Test(0, "<", 0),), 0)))
    readout = Readout(Decoder((field,), (((1,), 1), ((0,), 0))), {1: True, 0: False}, "accept")
    return SsmModel(alphabet, one_hot_embedding(alphabet, p), (layer,), readout, p,
                    name="parity-signed")


# ---------------------------------------------------------------------------
# dispatch


ROTATION_TARGETS = {
    "parity": (2, {"1": 1}),
    "aa": (2, {"a": 1}),
    "aaaa": (4, {"a": 1}),
    "tomita6": (3, {"0": 1, "1": 2}),
}


def compile_language(name: str, gates: str = "nonneg", precision: int = DEFAULT_PRECISION,
                     **params) -> SsmModel:
    """Compile a catalog language with the construction that fits it.

    ``gates`` selects ``nonneg`` (default; refuses non-star-free regular
    languages), ``signed`` (PARITY) or ``rotation`` (modular counting).
    """
    spec = get_language(name, **params)
    if gates == "signed":
        if spec.name != "parity":
            raise NotStarFree(f"no signed-gate construction for {spec.name}")
        return compile_parity_signed(precision)
    if gates == "rotation":
        if spec.name not in ROTATION_TARGETS:
            raise NotStarFree(f"no rotation-gate construction for {spec.name}")
        k, steps = ROTATION_TARGETS[spec.name]
        return compile_mod_counter(k, steps, spec.alphabet, precision)
    if gates != "nonneg":
        raise ValueError(f"unknown gate family {gates!r}")
    if spec.kind == "flipflop":
        return compile_flip_flop(precision)
    if spec.kind == "dyck":
        return compile_bounded_dyck(spec.params["K"], spec.params["h"], precision)
    if spec.kind == "counter":
        return compile_counter_language(spec, precision)
    return compile_star_free(spec.dfa, precision=precision, name=spec.name)
