"""Oracle-equivalence checks, the PARITY convergence demonstrator and reports."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .automata import EOS, Dfa, InvalidPrefix
from .languages import LanguageSpec, generate_samples
from .numerics import DEFAULT_PRECISION, fx_to_str
from .ssm import (
    PASS_THROUGH,
    Decoder,
    DecoderGap,
    Field,
    Mix,
    Readout,
    Rule,
    Runner,
    SsmLayer,
    SsmModel,
    Test,
    fast_final_state,
    initial_output,
    layer_output,
    model_step,
    supports_fast_scan,
)

__all__ = [
    "Exhaustive", "RandomWords", "Mismatch", "VerificationReport", "check_equivalence",
    "ConvergenceRecord", "parity_convergence_demo", "random_nonneg_model",
    "ParitySearchResult", "parity_falsification_search", "emit_report", "report_to_dict",
    "report_from_dict", "reports_to_csv", "dfa_final_states",
]

MAX_STORED_MISMATCHES = 50


# ---------------------------------------------------------------------------
# strategies and reports


@dataclass(frozen=True)
class Exhaustive:
    """Every valid prefix (label models) or every word (accept models) up to ``max_len``."""

    max_len: int

    def describe(self) -> str:
        return f"exhaustive<={self.max_len}"


@dataclass(frozen=True)
class RandomWords:
    """``count`` random words with lengths in ``length_range``.

    Label models get members drawn by the language sampler; accept models get
    uniformly random strings over the alphabet.
    """

    count: int
    length_range: tuple[int, int]
    seed: int = 0
    mode: str | None = None

    def describe(self) -> str:
        lo, hi = self.length_range
        mode = f" mode={self.mode}" if self.mode else ""
        return f"random n={self.count} len=[{lo},{hi}] seed={self.seed}{mode}"


def _show(x) -> object:
    if isinstance(x, frozenset):
        return sorted(x)
    return x


@dataclass
class Mismatch:
    word: str
    position: int
    expected: object
    got: object


@dataclass
class VerificationReport:
    spec: str
    strategy: str
    checked: int = 0
    mismatch_count: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatch_count == 0

    def add(self, word: Sequence[str], position: int, expected, got) -> None:
        self.mismatch_count += 1
        if len(self.mismatches) < MAX_STORED_MISMATCHES:
            text = " ".join(word) if len(word) <= 200 else " ".join(word[:200]) + " ..."
            self.mismatches.append(Mismatch(text, position, _show(expected), _show(got)))


def _model_kind(model: SsmModel) -> str:
    kind = model.readout.kind
    if kind == "value":
        raise ValueError("value readouts cannot be compared with a language oracle")
    return kind


def check_equivalence(model: SsmModel, spec: LanguageSpec,
                      strategy: Exhaustive | RandomWords) -> VerificationReport:
    """Compare model outputs with the oracle at every position of every word.

    Label models are compared with the next-symbol sets; accept models with
    membership of each prefix (exhaustive) or of the whole word (random).
    A decoder gap counts as a mismatch.
    """
    if tuple(model.alphabet) != tuple(spec.alphabet):
        raise ValueError(f"alphabet mismatch: model {model.alphabet} vs language {spec.alphabet}")
    kind = _model_kind(model)
    report = VerificationReport(spec.name, strategy.describe())
    if isinstance(strategy, Exhaustive):
        if kind == "label":
            _exhaustive_labels(model, spec, strategy.max_len, report)
        else:
            _exhaustive_accept(model, spec, strategy.max_len, report)
    elif isinstance(strategy, RandomWords):
        if kind == "label":
            _random_labels(model, spec, strategy, report)
        else:
            _random_accept(model, spec, strategy, report)
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    return report


def _safe_step(runner: Runner, hs, a):
    try:
        return runner.step(hs, a)
    except DecoderGap as gap:
        return None, f"<decoder gap: {gap}>"


def _exhaustive_labels(model, spec, max_len, report):
    runner = Runner(model)
    stack = [((), model.initial_states(), spec.start)]
    while stack:
        prefix, hs, q = stack.pop()
        if len(prefix) >= max_len:
            continue
        for a in spec.alphabet:
            try:
                q2 = spec.step(q, a)
                expected = spec.label_of(q2)
            except InvalidPrefix:
                continue
            word = prefix + (a,)
            report.checked += 1
            hs2, got = _safe_step(runner, hs, a)
            if got != expected:
                report.add(word, len(word), expected, got)
            if hs2 is not None:
                stack.append((word, hs2, q2))


def _member_tracker(spec: LanguageSpec):
    if spec.dfa is not None:
        dfa = spec.dfa
        return dfa.start, dfa.step, lambda q: q in dfa.accepting
    return (), (lambda w, a: w + (a,)), (lambda w: spec.member(list(w)))


def _accept_output(model: SsmModel, got) -> bool:
    return got if model.readout.kind == "accept" else EOS in got


def _exhaustive_accept(model, spec, max_len, report):
    runner = Runner(model)
    start, step, accepting = _member_tracker(spec)
    stack = [((), model.initial_states(), start)]
    while stack:
        prefix, hs, q = stack.pop()
        if len(prefix) >= max_len:
            continue
        for a in spec.alphabet:
            q2 = step(q, a)
            word = prefix + (a,)
            report.checked += 1
            hs2, got = _safe_step(runner, hs, a)
            expected = accepting(q2)
            if hs2 is None or _accept_output(model, got) != expected:
                report.add(word, len(word), expected, got)
            if hs2 is not None:
                stack.append((word, hs2, q2))


def _random_labels(model, spec, strategy, report):
    runner = Runner(model)
    samples = generate_samples(spec, strategy.length_range, strategy.count, strategy.seed,
                               strategy.mode)
    for word, labels in samples:
        hs = model.initial_states()
        report.checked += 1
        for t, (a, expected) in enumerate(zip(word, labels), start=1):
            hs, got = _safe_step(runner, hs, a)
            if got != expected:
                report.add(word, t, expected, got)
                break


def dfa_final_states(dfa: Dfa, words: Iterable[np.ndarray]) -> list[int]:
    """Final DFA states for symbol-index arrays, by pairwise composition of letter maps."""
    maps = np.array(dfa.letter_maps(), dtype=np.int64)
    out = []
    for w in words:
        cur = maps[np.asarray(w, dtype=np.int64)]
        if len(cur) == 0:
            out.append(dfa.start)
            continue
        while len(cur) > 1:
            if len(cur) % 2:
                tail = cur[-1:]
                cur = cur[:-1]
            else:
                tail = None
            cur = np.take_along_axis(cur[1::2], cur[0::2], axis=1)
            if tail is not None:
                cur = np.concatenate([cur, tail])
        out.append(int(cur[0][dfa.start]))
    return out


def _random_accept(model, spec, strategy, report):
    lo, hi = strategy.length_range
    rng = np.random.default_rng(strategy.seed)
    sigma = spec.alphabet
    fast = supports_fast_scan(model)
    runner = None if fast else Runner(model)
    for _ in range(strategy.count):
        n = int(rng.integers(lo, hi + 1))
        word = rng.integers(0, len(sigma), n)
        if spec.dfa is not None:
            expected = dfa_final_states(spec.dfa, [word])[0] in spec.dfa.accepting
        else:
            expected = spec.member([sigma[k] for k in word])
        report.checked += 1
        try:
            if fast:
                h = fast_final_state(model, word)
                if n == 0:
                    got = initial_output(model)
                else:
                    got = model.readout(layer_output(model.layers[0], h, (), model.precision))
            else:
                hs, got = model.initial_states(), initial_output(model)
                for k in word:
                    hs, got = runner.step(hs, sigma[k])
        except DecoderGap as gap:
            report.add([sigma[k] for k in word], n, expected, f"<decoder gap: {gap}>")
            continue
        if _accept_output(model, got) != expected:
            report.add([sigma[k] for k in word], n, expected, got)


# ---------------------------------------------------------------------------
# report serialization


CSV_HEADER = ("spec", "strategy", "checked", "mismatches", "pass")


def reports_to_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow((r.spec, r.strategy, r.checked, r.mismatch_count,
                         "true" if r.passed else "false"))
    return buf.getvalue()


def report_to_dict(report: VerificationReport) -> dict:
    out = asdict(report)
    out["pass"] = report.passed
    return out


def report_from_dict(obj: dict) -> VerificationReport:
    return VerificationReport(
        obj["spec"], obj["strategy"], obj["checked"], obj["mismatch_count"],
        [Mismatch(**m) for m in obj["mismatches"]],
    )


def emit_report(reports: VerificationReport | Sequence[VerificationReport], path,
                fmt: str = "csv") -> None:
    """Write reports deterministically as CSV (summary rows) or JSON (full detail)."""
    if isinstance(reports, VerificationReport):
        reports = [reports]
    if fmt == "csv":
        text = reports_to_csv(reports)
    elif fmt == "json":
        text = json.dumps([report_to_dict(r) for r in reports], indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# convergence on periodic inputs


@dataclass
class ConvergenceRecord:
    """Top-layer outputs after each repetition of ``period`` on ``period^N``.

    ``stationarity_step`` is the least ``T`` with the snapshot constant for
    all ``t`` in ``[T, N]`` (1-indexed), or ``None``.  ``fixed_point_step`` is
    set when the full layer state stopped changing, which proves the
    snapshots stay constant beyond ``N`` as well.
    """

    model_id: str
    period: tuple[str, ...]
    n: int
    precision: int
    snapshots: list[tuple]
    stationarity_step: int | None
    fixed_point_step: int | None = None

    @property
    def pattern(self) -> str:
        return f"({''.join(self.period)})^{self.n}"

    def to_dict(self) -> dict:
        p = self.precision
        return {
            "model": self.model_id,
            "pattern": self.pattern,
            "period": list(self.period),
            "N": self.n,
            "precision": p,
            "stationarityStep": self.stationarity_step,
            "fixedPointStep": self.fixed_point_step,
            "snapshots": [[fx_to_str(x, p) for x in z] for z in self.snapshots],
        }


def _stationarity(snapshots: list[tuple]) -> int | None:
    if not snapshots:
        return None
    t = len(snapshots)
    last = snapshots[-1]
    while t > 1 and snapshots[t - 2] == last:
        t -= 1
    return t if t < len(snapshots) else None


def parity_convergence_demo(model: SsmModel, n: int = 10_000,
                            period: Sequence[str] = ("1",)) -> ConvergenceRecord:
    """Run ``period^n`` and locate the step after which the top output is constant.

    Refuses models without the NONNEGATIVE flag.  When the whole layer state
    reaches a fixed point the remaining snapshots are filled in without
    simulation; they are identical by determinism.
    """
    if not model.nonnegative:
        raise ValueError("convergence demonstrator requires a model with NONNEGATIVE gates")
    period = tuple(period)
    if not period or any(a not in model.alphabet for a in period):
        raise ValueError("period must be a nonempty word over the model alphabet")
    hs = model.initial_states()
    snapshots: list[tuple] = []
    fixed = None
    for t in range(1, n + 1):
        before = hs
        for a in period:
            hs, z, _ = model_step(model, hs, a)
        snapshots.append(z)
        if hs == before:
            fixed = t
            snapshots.extend([z] * (n - t))
            break
    step = _stationarity(snapshots)
    if fixed is not None and step is None:
        step = fixed
    return ConvergenceRecord(model.name, period, n, model.precision, snapshots, step, fixed)


# ---------------------------------------------------------------------------
# random nonnegative models


def _sign_readout(width: int) -> Readout:
    field_ = Field("sign", (Rule((Test(0, ">", 0),), 1), Rule((), 0)))
    return Readout(Decoder((field_,), (((1,), 1), ((0,), 0))), {1: True, 0: False}, "accept")


def random_nonneg_model(seed: int, layers: int = 2, d: int = 4,
                        precision: int = DEFAULT_PRECISION,
                        alphabet: Sequence[str] = ("0", "1")) -> SsmModel:
    """Random table-driven model with gates in ``[0, 1]``.

    Each layer has ``d`` state dimensions, the last being a constant channel
    (gate 0, increment 1) so normalization never sees a zero vector.  Gates
    and increments (in ``[-2, 2]``) are keyed by the current symbol, read
    from the embedding carried upward by every layer.  ``Mix2`` is identity
    or a random affine map, followed by RMS normalization.
    """
    if not 1 <= layers <= 3:
        raise ValueError("layers must be in [1, 3]")
    if not 2 <= d <= 8:
        raise ValueError("d must be in [2, 8]")
    rng = random.Random(seed)
    p = precision
    one = 1 << p
    alphabet = tuple(alphabet)
    k = len(alphabet)
    embedding = {a: tuple(one if j == i else 0 for j in range(k)) for i, a in enumerate(alphabet)}
    x_dim = k
    built = []
    for _ in range(layers):
        dec = Decoder(
            (Field("symbol", tuple(Rule((Test(x_dim - k + i, ">", 0),), i) for i in range(k))),),
            tuple(((i,), i) for i in range(k)),
        )
        gates, incs = {}, {}
        for i in range(k):
            gates[i] = tuple(rng.randint(0, one) for _ in range(d - 1)) + (0,)
            incs[i] = tuple(rng.randint(-2 * one, 2 * one) for _ in range(d - 1)) + (one,)
        h0 = tuple(rng.randint(-one, one) for _ in range(d - 1)) + (one,)
        if rng.random() < 0.5:
            mix2 = Mix()
        else:
            rows = tuple(
                (tuple((j, rng.randint(-one, one)) for j in range(d)), rng.randint(-one, one))
                for _ in range(d - 1)
            ) + ((((d - 1, one),), 0),)
            mix2 = Mix("affine", rows=rows)
        layer = SsmLayer(d, dec, gates, incs, h0, mix2=mix2, normalize=True, mix1=PASS_THROUGH)
        built.append(layer)
        x_dim = layer.out_dim(x_dim)
    return SsmModel(alphabet, embedding, tuple(built), _sign_readout(x_dim), p,
                    name=f"random-nonneg-{seed}-L{layers}-d{d}")


def random_nonneg_corpus(count: int, start: int = 0,
                         precision: int = DEFAULT_PRECISION) -> Iterator[SsmModel]:
    """Models for seeds ``start .. start+count-1``; each seed also fixes its depth and width."""
    for seed in range(start, start + count):
        rng = random.Random(10 ** 6 + seed)
        yield random_nonneg_model(seed, rng.randint(1, 3), rng.randint(2, 8), precision)


# ---------------------------------------------------------------------------
# PARITY falsification


@dataclass
class ParitySearchResult:
    """Outcome of searching for strings that defeat every sign-threshold readout.

    A sign-threshold readout accepts when ``z_i > theta`` (or ``z_i < theta``)
    for one coordinate ``i`` of the top output.  The model survives if some
    coordinate still separates even-parity from odd-parity strings on every
    string tried.
    """

    model_id: str
    strings_tried: int
    survivors: list[int]
    witness: dict = field(default_factory=dict)

    @property
    def falsified(self) -> bool:
        return not self.survivors


class _Separation:
    def __init__(self, width: int):
        inf = float("inf")
        self.lo = [[inf] * width, [inf] * width]
        self.hi = [[-inf] * width, [-inf] * width]
        self.alive = set(range(width))
        self.witness: dict = {}

    def add(self, z: tuple, parity: int, word) -> None:
        lo, hi = self.lo[parity], self.hi[parity]
        dead = []
        for i in self.alive:
            x = z[i]
            if x < lo[i]:
                lo[i] = x
            if x > hi[i]:
                hi[i] = x
            even_above = self.lo[0][i] > self.hi[1][i]
            odd_above = self.lo[1][i] > self.hi[0][i]
            if not (even_above or odd_above):
                dead.append(i)
        for i in dead:
            self.alive.discard(i)
            self.witness[i] = "".join(word)


def parity_falsification_search(model: SsmModel, exhaustive_len: int = 16,
                                random_count: int = 10_000, max_len: int = 64,
                                seed: int = 0) -> ParitySearchResult:
    """Try ``1^n`` for ``n <= max_len``, all strings up to ``exhaustive_len``,
    then random strings up to ``max_len``; stop once no coordinate separates.
    """
    if tuple(model.alphabet) != ("0", "1"):
        raise ValueError("PARITY search needs the alphabet ('0', '1')")
    sep = None
    tried = 0

    def observe(z, parity, word):
        nonlocal sep, tried
        if sep is None:
            sep = _Separation(len(z))
        tried += 1
        sep.add(z, parity, word)
        return not sep.alive

    hs = model.initial_states()
    for n in range(1, max_len + 1):
        hs, z, _ = model_step(model, hs, "1")
        if observe(z, n % 2, "1" * n):
            return ParitySearchResult(model.name, tried, [], sep.witness)

    stack = [((), model.initial_states(), 0)]
    while stack:
        word, hs, parity = stack.pop()
        if len(word) >= exhaustive_len:
            continue
        for a in ("0", "1"):
            hs2, z, _ = model_step(model, hs, a)
            w2 = word + (a,)
            par2 = parity ^ (a == "1")
            if observe(z, par2, w2):
                return ParitySearchResult(model.name, tried, [], sep.witness)
            stack.append((w2, hs2, par2))

    rng = random.Random(seed)
    for _ in range(random_count):
        n = rng.randint(1, max_len)
        word = [rng.choice("01") for _ in range(n)]
        hs = model.initial_states()
        for a in word:
            hs, z, _ = model_step(model, hs, a)
        if observe(z, word.count("1") % 2, word):
            return ParitySearchResult(model.name, tried, [], sep.witness)
    return ParitySearchResult(model.name, tried, sorted(sep.alive), sep.witness)
