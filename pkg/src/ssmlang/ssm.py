"""Table-driven finite-precision SSMs and their bit-exact simulation.

A layer maps its input ``x_t`` to a *tag* with a threshold :class:`Decoder`;
the tag selects the gate ``A`` and increment ``B`` of the recurrence

    h_t = A(x_t) * h_{t-1} + B(x_t)
    z_t = Mix1(Norm(Mix2(h_t, x_t)), x_t)

All real quantities are integer mantissas on the ``2**-p`` grid (see
:mod:`ssmlang.numerics`).  Complex layers hold ``(magnitude, UnitRotation)``
pairs, have unit-rotation gates, zero increments and identity mixes.
"""

from __future__ import annotations

import json
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .automata import EOS, Word
from .numerics import (
    DEFAULT_PRECISION,
    UnitRotation,
    fx_from_fraction,
    fx_from_str,
    fx_mul,
    fx_to_str,
    rms_norm_raw,
)


class DecoderGap(RuntimeError):
    """No decoder rule or pattern matched: the compiled model is inconsistent."""


class ModelFormatError(ValueError):
    """A serialized model is malformed or its declared flags are wrong."""


FIELD_MEMO_LIMIT = 200_000

_OPS = {
    ">": operator.gt, ">=": operator.ge, "<": operator.lt, "<=": operator.le, "==": operator.eq,
}


@dataclass(frozen=True)
class Test:
    """``v[coord] op value``; ``value`` is a mantissa, or a rotation for op ``rot``."""

    __test__ = False

    coord: int
    op: str
    value: Any = 0

    def __post_init__(self) -> None:
        if self.op not in _OPS and self.op != "rot":
            raise ValueError(f"unknown test operator {self.op!r}")

    def holds(self, v: Sequence) -> bool:
        x = v[self.coord]
        if self.op == "rot":
            return x[1] == self.value
        if isinstance(x, tuple):  # complex coordinate: compare the magnitude
            x = x[0]
        return _OPS[self.op](x, self.value)


@dataclass(frozen=True)
class Rule:
    tests: tuple[Test, ...]
    value: int

    def holds(self, v: Sequence) -> bool:
        return all(t.holds(v) for t in self.tests)


@dataclass(frozen=True)
class Field:
    """Ordered rules; the first whose tests all hold gives the field value."""

    name: str
    rules: tuple[Rule, ...]
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def evaluate(self, v: Sequence) -> int:
        # the value depends only on the tested coordinates, so cache on their projection
        memo = self._memo
        coords = memo.get(None)
        if coords is None:
            coords = memo[None] = sorted({t.coord for r in self.rules for t in r.tests})
        key = tuple([v[c] for c in coords])
        hit = memo.get(key)
        if hit is not None:
            return hit
        for rule in self.rules:
            if rule.holds(v):
                if len(memo) > FIELD_MEMO_LIMIT:
                    memo.clear()
                    memo[None] = coords
                memo[key] = rule.value
                return rule.value
        raise DecoderGap(f"field {self.name!r}: no rule matches")


Pattern = tuple[tuple[int | None, ...], int]


@dataclass(frozen=True)
class Decoder:
    """Maps a vector to a tag: evaluate every field, then take the first matching pattern.

    ``None`` in a pattern is a wildcard.
    """

    fields: tuple[Field, ...]
    patterns: tuple[Pattern, ...]
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def field_values(self, v: Sequence) -> tuple[int, ...]:
        return tuple(f.evaluate(v) for f in self.fields)

    def _index(self) -> list[tuple[tuple[int, ...], dict]]:
        # group patterns by their non-wildcard positions; each group is one dict lookup
        if "index" not in self._memo:
            groups: dict = {}
            for pos, (pattern, tag) in enumerate(self.patterns):
                fixed = tuple(i for i, x in enumerate(pattern) if x is not None)
                table = groups.setdefault(fixed, {})
                table.setdefault(tuple(pattern[i] for i in fixed), (pos, tag))
            self._memo["index"] = list(groups.items())
        return self._memo["index"]

    def match(self, values: tuple[int, ...]) -> int:
        memo = self._memo
        hit = memo.get(values)
        if hit is not None:
            return hit
        best = None
        for fixed, table in self._index():
            found = table.get(tuple([values[i] for i in fixed]))
            if found is not None and (best is None or found[0] < best[0]):
                best = found
        if best is None:
            raise DecoderGap(f"no pattern matches field values {values}")
        if len(memo) > FIELD_MEMO_LIMIT:
            index = memo["index"]
            memo.clear()
            memo["index"] = index
        memo[values] = best[1]
        return best[1]

    def decode(self, v: Sequence) -> int:
        return self.match(self.field_values(v))

    @property
    def tags(self) -> set[int]:
        return {tag for _, tag in self.patterns}


def lookup_decoder(fields: Sequence[Field], table: dict[tuple, int]) -> Decoder:
    """Decoder with one exact pattern per entry of ``table``."""
    return Decoder(tuple(fields), tuple(table.items()))


# ---------------------------------------------------------------------------
# channel mixing

AffineRow = tuple[tuple[tuple[int, int], ...], int]


def _affine(rows: Sequence[AffineRow], u: Sequence[int], p: int) -> tuple[int, ...]:
    one = 1 << p
    out = []
    for terms, bias in rows:
        acc = bias
        for i, w in terms:
            acc += u[i] if w == one else fx_mul(w, u[i], p)
        out.append(acc)
    return tuple(out)


def fx_sigmoid(m: int, p: int) -> int:
    """Logistic function rounded to the grid (evaluated in binary64, then rounded)."""
    x = m / (1 << p)
    if x >= 0:
        s = 1.0 / (1.0 + math.exp(-x))
    else:
        e = math.exp(x)
        s = e / (1.0 + e)
    return fx_from_fraction(Fraction(s), p)


@dataclass(frozen=True)
class Mix:
    """Channel mixing block applied to ``v``; ``concat_x`` appends ``x`` to the result.

    ``affine`` applies sparse rows ``(((index, weight), ...), bias)``; ``glu``
    and ``swiglu`` multiply the ``rows`` branch elementwise by ``sigmoid`` /
    ``swish`` of the ``gate_rows`` branch.  An ``identity`` mix with
    ``concat_x`` is the pass-through that carries a layer's input upward.
    """

    kind: str = "identity"
    concat_x: bool = False
    rows: tuple[AffineRow, ...] = ()
    gate_rows: tuple[AffineRow, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "affine", "glu", "swiglu"):
            raise ValueError(f"unknown mix kind {self.kind!r}")
        if self.kind in ("glu", "swiglu") and len(self.rows) != len(self.gate_rows):
            raise ValueError("gated mix branches differ in width")

    def transform(self, v: Sequence, p: int) -> tuple:
        if self.kind == "identity":
            return tuple(v)
        a = _affine(self.rows, v, p)
        if self.kind == "affine":
            return a
        g = _affine(self.gate_rows, v, p)
        if self.kind == "glu":
            return tuple(fx_mul(ai, fx_sigmoid(gi, p), p) for ai, gi in zip(a, g))
        return tuple(fx_mul(ai, fx_mul(gi, fx_sigmoid(gi, p), p), p) for ai, gi in zip(a, g))

    def apply(self, v: Sequence, x: Sequence, p: int) -> tuple:
        out = self.transform(v, p)
        return out + tuple(x) if self.concat_x else out

    def feature_dim(self, v_dim: int) -> int:
        return v_dim if self.kind == "identity" else len(self.rows)

    def out_dim(self, v_dim: int, x_dim: int) -> int:
        return self.feature_dim(v_dim) + (x_dim if self.concat_x else 0)

    def max_index(self) -> int:
        return max((i for terms, _ in self.rows + self.gate_rows for i, _ in terms), default=-1)


IDENTITY = Mix()
PASS_THROUGH = Mix(concat_x=True)


# ---------------------------------------------------------------------------
# layers and models


@dataclass(frozen=True)
class SsmLayer:
    """One recurrent layer.

    ``gates``/``incs`` map decoder tags to length-``d`` vectors.  Real layers
    store mantissas; complex layers store :class:`UnitRotation` gates and
    ``(magnitude, rotation)`` states.
    """

    d: int
    decoder: Decoder
    gates: dict
    incs: dict
    h0: tuple
    mix2: Mix = IDENTITY
    normalize: bool = False
    mix1: Mix = IDENTITY
    complex: bool = False

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("layer width must be >= 1")
        if len(self.h0) != self.d:
            raise ValueError("h0 has the wrong length")
        tags = self.decoder.tags
        missing = tags - set(self.gates) | tags - set(self.incs)
        if missing:
            raise ValueError(f"gate/increment tables miss tags {sorted(missing)}")
        for table in (self.gates, self.incs):
            for vec in table.values():
                if len(vec) != self.d:
                    raise ValueError("gate/increment vector has the wrong length")
        if self.complex:
            if any(any(b) for b in self.incs.values()):
                raise ValueError("complex layers require zero increments")
            if self.normalize or self.mix2 != IDENTITY or self.mix1.kind != "identity":
                raise ValueError("complex layers use identity mixes without normalization")
            if not all(isinstance(g, UnitRotation) for vec in self.gates.values() for g in vec):
                raise ValueError("complex gates must be unit rotations")

    def out_dim(self, x_dim: int) -> int:
        return self.mix1.out_dim(self.mix2.out_dim(self.d, x_dim), x_dim)


def layer_step(layer: SsmLayer, h_prev: tuple, x: tuple, p: int) -> tuple[tuple, tuple]:
    """One recurrence step; returns ``(h_t, z_t)``."""
    tag = layer.decoder.decode(x)
    gate = layer.gates[tag]
    inc = layer.incs[tag]
    if layer.complex:
        h = tuple((m, r * g) for (m, r), g in zip(h_prev, gate))
        return h, layer.mix1.apply(h, x, p)
    one = 1 << p
    h = tuple(
        b if g == 0 else (hp + b if g == one else fx_mul(g, hp, p) + b)
        for g, hp, b in zip(gate, h_prev, inc)
    )
    u = layer.mix2.apply(h, x, p)
    if layer.normalize:
        u = rms_norm_raw(u, p)
    return h, layer.mix1.apply(u, x, p)


def layer_output(layer: SsmLayer, h: tuple, x: tuple, p: int) -> tuple:
    """``z`` for a given state without advancing the recurrence."""
    if layer.complex:
        return layer.mix1.apply(h, x, p)
    u = layer.mix2.apply(h, x, p)
    if layer.normalize:
        u = rms_norm_raw(u, p)
    return layer.mix1.apply(u, x, p)


@dataclass(frozen=True)
class Readout:
    """Decoder over the top-layer output plus a tag -> output table.

    ``kind`` is ``label`` (frozensets over the alphabet and EOS), ``accept``
    (booleans) or ``value`` (arbitrary hashable values, used for models that
    expose their decoded automaton state).
    """

    decoder: Decoder
    table: dict
    kind: str = "label"

    def __post_init__(self) -> None:
        if self.kind not in ("label", "accept", "value"):
            raise ValueError(f"unknown readout kind {self.kind!r}")
        missing = self.decoder.tags - set(self.table)
        if missing:
            raise ValueError(f"readout table misses tags {sorted(missing)}")

    def __call__(self, z: Sequence) -> Any:
        return self.table[self.decoder.decode(z)]


@dataclass(frozen=True)
class SsmModel:
    alphabet: tuple[str, ...]
    embedding: dict
    layers: tuple[SsmLayer, ...]
    readout: Readout
    precision: int = DEFAULT_PRECISION
    name: str = ""

    def __post_init__(self) -> None:
        if not 1 <= self.precision <= 64:
            raise ValueError("precision must be in [1, 64]")
        if set(self.embedding) != set(self.alphabet):
            raise ValueError("embedding must cover exactly the alphabet")
        dims = {len(v) for v in self.embedding.values()}
        if len(dims) != 1:
            raise ValueError("embedding vectors differ in width")
        if not self.layers:
            raise ValueError("a model needs at least one layer")
        x_dim = dims.pop()
        for layer in self.layers:
            if layer.mix2.max_index() >= layer.d:
                raise ValueError("mix2 reads past the layer state")
            if layer.mix1.max_index() >= layer.mix2.out_dim(layer.d, x_dim):
                raise ValueError("mix1 reads past its input")
            x_dim = layer.out_dim(x_dim)

    @property
    def nonnegative(self) -> bool:
        for layer in self.layers:
            for gate in layer.gates.values():
                if layer.complex:
                    if not all(g.is_identity() for g in gate):
                        return False
                elif any(g < 0 for g in gate):
                    return False
        return True

    @property
    def time_invariant(self) -> bool:
        return all(len(set(layer.gates.values())) <= 1 for layer in self.layers)

    @property
    def flags(self) -> dict[str, bool]:
        return {"NONNEGATIVE": self.nonnegative, "TIME_INVARIANT": self.time_invariant}

    @property
    def width(self) -> int:
        """Total recurrent state width summed over layers."""
        return sum(layer.d for layer in self.layers)

    def embed(self, symbol: str) -> tuple:
        try:
            return self.embedding[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not in model alphabet") from None

    def initial_states(self) -> tuple:
        return tuple(layer.h0 for layer in self.layers)


def model_step(model: SsmModel, hs: tuple, symbol: str) -> tuple[tuple, tuple, list[tuple]]:
    """Advance every layer by one symbol; returns ``(new states, top z, per-layer z)``."""
    p = model.precision
    x = model.embed(symbol)
    new_hs = []
    zs = []
    for layer, h in zip(model.layers, hs):
        h, x = layer_step(layer, h, x, p)
        new_hs.append(h)
        zs.append(x)
    return tuple(new_hs), x, zs


def run_model(model: SsmModel, word: Word) -> list:
    """Readout output at positions ``1 .. |word|`` (reference implementation)."""
    hs = model.initial_states()
    out = []
    for a in word:
        hs, z, _ = model_step(model, hs, a)
        out.append(model.readout(z))
    return out


def initial_output(model: SsmModel) -> Any:
    """Readout before any symbol: each layer's ``h0`` seen through its mixes.

    Layer 1 sees an all-zero input.
    """
    p = model.precision
    x = (0,) * len(next(iter(model.embedding.values())))
    for layer in model.layers:
        x = layer_output(layer, layer.h0, x, p)
    return model.readout(x)


def recognize(model: SsmModel, word: Word) -> bool:
    """Accept/reject the whole word from the final-position readout."""
    if model.readout.kind == "value":
        raise ValueError("model has no accept-style readout")
    out = run_model(model, word)[-1] if word else initial_output(model)
    return out if model.readout.kind == "accept" else EOS in out


@dataclass(frozen=True)
class StepRecord:
    h: tuple[tuple, ...]
    z: tuple[tuple, ...]


def trace(model: SsmModel, word: Word) -> list[StepRecord]:
    """All per-layer states and outputs, one record per position."""
    hs = model.initial_states()
    records = []
    for a in word:
        hs, _, zs = model_step(model, hs, a)
        records.append(StepRecord(hs, tuple(zs)))
    return records


class Runner:
    """Memoized simulator: caches ``(layer states, symbol) -> (next states, output)``.

    Results are identical to :func:`run_model`; the cache only avoids
    recomputing steps from states seen before.
    """

    def __init__(self, model: SsmModel, max_entries: int = 1_000_000):
        self.model = model
        self.max_entries = max_entries
        self._cache: dict = {}

    def step(self, hs: tuple, symbol: str) -> tuple[tuple, Any]:
        key = (hs, symbol)
        hit = self._cache.get(key)
        if hit is None:
            new_hs, z, _ = model_step(self.model, hs, symbol)
            hit = (new_hs, self.model.readout(z))
            if len(self._cache) >= self.max_entries:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def outputs(self, word: Word) -> list:
        hs = self.model.initial_states()
        out = []
        for a in word:
            hs, o = self.step(hs, a)
            out.append(o)
        return out


# ---------------------------------------------------------------------------
# vectorized recognition for single-layer sign/rotation counters


def supports_fast_scan(model: SsmModel) -> bool:
    """True for one-layer models whose state only picks up unit phases.

    Those are: zero increments, gates that are rotations or ``+-1``, no
    normalization and identity mixes without pass-through.
    """
    if len(model.layers) != 1:
        return False
    layer = model.layers[0]
    if layer.normalize or layer.mix2 != IDENTITY or layer.mix1 != IDENTITY:
        return False
    if any(any(b) for b in layer.incs.values()):
        return False
    if layer.complex:
        return True
    one = 1 << model.precision
    return all(g in (one, -one) for vec in layer.gates.values() for g in vec)


def _phase_table(model: SsmModel) -> tuple[int, np.ndarray]:
    """Per symbol, per coordinate: the gate as a multiple of ``2*pi/M``."""
    layer = model.layers[0]
    if layer.complex:
        rots = [r for vec in layer.gates.values() for r in vec]
        modulus = math.lcm(*(r.denominator for r in rots)) if rots else 1
    else:
        modulus = 2
    table = np.zeros((len(model.alphabet), layer.d), dtype=np.int64)
    one = 1 << model.precision
    for k, a in enumerate(model.alphabet):
        gate = layer.gates[layer.decoder.decode(model.embed(a))]
        for j, g in enumerate(gate):
            if layer.complex:
                table[k, j] = g.numerator * (modulus // g.denominator)
            else:
                table[k, j] = 0 if g == one else 1
    return modulus, table


def fast_final_state(model: SsmModel, symbols: np.ndarray) -> tuple:
    """Final state after a word given as an array of alphabet indices."""
    if not supports_fast_scan(model):
        raise ValueError("model does not admit the phase-counting scan")
    modulus, table = _phase_table(model)
    layer = model.layers[0]
    counts = np.bincount(np.asarray(symbols, dtype=np.int64), minlength=len(model.alphabet))
    phase = (counts.astype(object) @ table.astype(object)) % modulus
    if layer.complex:
        return tuple((m, r * UnitRotation(int(k), modulus)) for (m, r), k in zip(layer.h0, phase))
    return tuple(-h if k else h for h, k in zip(layer.h0, phase))


def fast_recognize(model: SsmModel, symbols: np.ndarray) -> bool:
    """Same answer as :func:`recognize`, in time linear in numpy operations."""
    h = fast_final_state(model, symbols)
    if len(symbols) == 0:
        return recognize(model, ())
    out = model.readout(layer_output(model.layers[0], h, (), model.precision))
    return out if model.readout.kind == "accept" else EOS in out


# ---------------------------------------------------------------------------
# serialization


def _num(m: int, p: int) -> str:
    return fx_to_str(m, p)


def _gate_json(g, p: int):
    return {"rot": str(g)} if isinstance(g, UnitRotation) else _num(g, p)


def _gate_load(obj, p: int):
    if isinstance(obj, dict):
        a, b = obj["rot"].split("/")
        return UnitRotation(int(a), int(b))
    return fx_from_str(obj, p)


def _state_json(v, p: int):
    if isinstance(v, tuple):
        return {"mag": _num(v[0], p), "rot": str(v[1])}
    return _num(v, p)


def _state_load(obj, p: int):
    if isinstance(obj, dict):
        a, b = obj["rot"].split("/")
        return (fx_from_str(obj["mag"], p), UnitRotation(int(a), int(b)))
    return fx_from_str(obj, p)


def _decoder_json(dec: Decoder, p: int) -> dict:
    def test(t: Test):
        value = str(t.value) if t.op == "rot" else _num(t.value, p)
        return [t.coord, t.op, value]
    return {
        "fields": [
            {"name": f.name, "rules": [{"tests": [test(t) for t in r.tests], "value": r.value}
                                       for r in f.rules]}
            for f in dec.fields
        ],
        "patterns": [[list(pat), tag] for pat, tag in dec.patterns],
    }


def _decoder_load(obj: dict, p: int) -> Decoder:
    def test(item):
        coord, op, value = item
        if op == "rot":
            a, b = value.split("/")
            return Test(coord, op, UnitRotation(int(a), int(b)))
        return Test(coord, op, fx_from_str(value, p))
    fields = tuple(
        Field(f["name"], tuple(Rule(tuple(test(t) for t in r["tests"]), r["value"])
                               for r in f["rules"]))
        for f in obj["fields"]
    )
    patterns = tuple((tuple(pat), tag) for pat, tag in obj["patterns"])
    return Decoder(fields, patterns)


def _mix_json(mix: Mix, p: int) -> dict:
    def rows(rs):
        return [[[[i, _num(w, p)] for i, w in terms], _num(b, p)] for terms, b in rs]
    out = {"kind": mix.kind, "concat_x": mix.concat_x}
    if mix.rows:
        out["rows"] = rows(mix.rows)
    if mix.gate_rows:
        out["gate_rows"] = rows(mix.gate_rows)
    return out


def _mix_load(obj: dict, p: int) -> Mix:
    def rows(rs):
        return tuple((tuple((i, fx_from_str(w, p)) for i, w in terms), fx_from_str(b, p))
                     for terms, b in rs)
    return Mix(obj["kind"], obj["concat_x"], rows(obj.get("rows", [])),
               rows(obj.get("gate_rows", [])))


def _value_json(v):
    if isinstance(v, (tuple, list)):
        return [_value_json(x) for x in v]
    if isinstance(v, (frozenset, set)):
        return sorted(v)
    return v


def _value_load(v):
    if isinstance(v, list):
        return tuple(_value_load(x) for x in v)
    return v


def model_to_json(model: SsmModel) -> dict:
    p = model.precision
    return {
        "name": model.name,
        "precision": p,
        "flags": model.flags,
        "alphabet": list(model.alphabet),
        "embedding": {a: [_num(m, p) for m in model.embedding[a]] for a in model.alphabet},
        "layers": [
            {
                "d": layer.d,
                "complex": layer.complex,
                "decoder": _decoder_json(layer.decoder, p),
                "gateTable": {str(t): [_gate_json(g, p) for g in v]
                              for t, v in sorted(layer.gates.items())},
                "incTable": {str(t): [_num(b, p) for b in v]
                             for t, v in sorted(layer.incs.items())},
                "h0": [_state_json(v, p) for v in layer.h0],
                "mix2": _mix_json(layer.mix2, p),
                "normalize": layer.normalize,
                "mix1": _mix_json(layer.mix1, p),
            }
            for layer in model.layers
        ],
        "readout": {
            "kind": model.readout.kind,
            "decoder": _decoder_json(model.readout.decoder, p),
            "table": {str(t): _value_json(v) for t, v in sorted(model.readout.table.items())},
        },
    }


def model_from_json(obj: dict) -> SsmModel:
    try:
        p = int(obj["precision"])
        layers = []
        for lj in obj["layers"]:
            layers.append(SsmLayer(
                d=lj["d"],
                decoder=_decoder_load(lj["decoder"], p),
                gates={int(t): tuple(_gate_load(g, p) for g in v) for t, v in lj["gateTable"].items()},
                incs={int(t): tuple(fx_from_str(b, p) for b in v) for t, v in lj["incTable"].items()},
                h0=tuple(_state_load(v, p) for v in lj["h0"]),
                mix2=_mix_load(lj["mix2"], p),
                normalize=lj["normalize"],
                mix1=_mix_load(lj["mix1"], p),
                complex=lj.get("complex", False),
            ))
        rj = obj["readout"]
        kind = rj["kind"]
        if kind == "label":
            table = {int(t): frozenset(v) for t, v in rj["table"].items()}
        else:
            table = {int(t): _value_load(v) for t, v in rj["table"].items()}
        model = SsmModel(
            alphabet=tuple(obj["alphabet"]),
            embedding={a: tuple(fx_from_str(m, p) for m in v) for a, v in obj["embedding"].items()},
            layers=tuple(layers),
            readout=Readout(_decoder_load(rj["decoder"], p), table, kind),
            precision=p,
            name=obj.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model: {exc}") from exc
    declared = obj.get("flags")
    if declared is not None and declared != model.flags:
        raise ModelFormatError(f"declared flags {declared} disagree with gate tables {model.flags}")
    return model


def save_model(model: SsmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> SsmModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def dumps_model(model: SsmModel) -> str:
    return json.dumps(model_to_json(model), sort_keys=True)


def loads_model(text: str) -> SsmModel:
    return model_from_json(json.loads(text))
