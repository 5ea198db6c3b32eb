"""Deterministic finite automata and the algebra on top of them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

BOS = "BOS"
EOS = "EOS"

Word = Sequence[str]


class InvalidPrefix(ValueError):
    """The prefix has no completion in the language."""


@dataclass(frozen=True)
class Dfa:
    """A total DFA with integer states ``0 .. n-1``.

    ``delta[q][k]`` is the successor of state ``q`` on ``alphabet[k]``.
    """

    alphabet: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    start: int
    accepting: frozenset[int]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        n = len(self.delta)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate alphabet symbols")
        if BOS in self.alphabet or EOS in self.alphabet:
            raise ValueError("BOS/EOS are reserved")
        if not 0 <= self.start < n:
            raise ValueError("start state out of range")
        for row in self.delta:
            if len(row) != len(self.alphabet):
                raise ValueError("transition table is not total")
            for q in row:
                if not 0 <= q < n:
                    raise ValueError("transition target out of range")
        if not all(0 <= q < n for q in self.accepting):
            raise ValueError("accepting state out of range")
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "_index", {s: k for k, s in enumerate(self.alphabet)})

    @classmethod
    def from_function(cls, alphabet: Iterable[str], start: Hashable, step, accepting) -> "Dfa":
        """Build the reachable part of the automaton ``(start, step)``.

        ``step(q, symbol)`` returns the next state; ``accepting(q)`` decides
        acceptance.  States can be any hashable values and are renumbered in
        breadth-first order.
        """
        alphabet = tuple(alphabet)
        ids = {start: 0}
        order = [start]
        rows: list[tuple[int, ...]] = []
        i = 0
        while i < len(order):
            q = order[i]
            row = []
            for a in alphabet:
                r = step(q, a)
                if r not in ids:
                    ids[r] = len(order)
                    order.append(r)
                row.append(ids[r])
            rows.append(tuple(row))
            i += 1
        acc = frozenset(ids[q] for q in order if accepting(q))
        return cls(alphabet, tuple(rows), 0, acc)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def symbol_index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.alphabet}") from None

    def step(self, q: int, symbol: str) -> int:
        return self.delta[q][self.symbol_index(symbol)]

    def run(self, word: Word) -> int:
        q = self.start
        for a in word:
            q = self.delta[q][self.symbol_index(a)]
        return q

    def accepts(self, word: Word) -> bool:
        return self.run(word) in self.accepting

    def letter_maps(self) -> list[tuple[int, ...]]:
        """The state transformation induced by each letter."""
        n = self.n_states
        return [tuple(self.delta[q][k] for q in range(n)) for k in range(len(self.alphabet))]

    def live_states(self) -> frozenset[int]:
        """States from which some accepting state is reachable."""
        preds: list[set[int]] = [set() for _ in range(self.n_states)]
        for q, row in enumerate(self.delta):
            for r in row:
                preds[r].add(q)
        seen = set(self.accepting)
        todo = deque(seen)
        while todo:
            r = todo.popleft()
            for q in preds[r]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def to_text(self) -> str:
        """Plain-text form read back by :func:`parse_dfa`."""
        lines = [" ".join(self.alphabet)]
        for q, row in enumerate(self.delta):
            for a, r in zip(self.alphabet, row):
                lines.append(f"{q} {a} -> {r}")
        lines.append(f"start: {self.start}")
        lines.append("accept: " + " ".join(str(q) for q in sorted(self.accepting)))
        return "\n".join(lines) + "\n"


def parse_dfa(text: str) -> Dfa:
    """Parse the hand-editable DFA format.

    First non-comment line: the alphabet, whitespace separated.  Then lines
    ``state symbol -> state``, one ``start: state`` line and one
    ``accept: state state ...`` line.  State names are arbitrary tokens.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty DFA description")
    alphabet = tuple(lines[0].split())
    trans: dict[tuple[str, str], str] = {}
    start = None
    accept: list[str] = []
    for ln in lines[1:]:
        if ln.startswith("start:"):
            start = ln.split(":", 1)[1].strip()
        elif ln.startswith("accept:"):
            accept = ln.split(":", 1)[1].split()
        else:
            lhs, arrow, rhs = ln.partition("->")
            parts = lhs.split()
            if not arrow or len(parts) != 2 or len(rhs.split()) != 1:
                raise ValueError(f"bad transition line: {ln!r}")
            if parts[1] not in alphabet:
                raise ValueError(f"symbol {parts[1]!r} not in alphabet")
            trans[(parts[0], parts[1])] = rhs.strip()
    if start is None:
        raise ValueError("missing start: line")
    names = sorted({q for q, _ in trans} | set(trans.values()) | {start} | set(accept))
    ids = {q: i for i, q in enumerate(names)}
    rows = []
    for q in names:
        row = []
        for a in alphabet:
            if (q, a) not in trans:
                raise ValueError(f"missing transition for ({q}, {a})")
            row.append(ids[trans[(q, a)]])
        rows.append(tuple(row))
    return Dfa(alphabet, tuple(rows), ids[start], frozenset(ids[q] for q in accept))


def dfa_run(dfa: Dfa, word: Word) -> list[int]:
    """State sequence ``q0, q1, ..., q_|w|``."""
    q = dfa.start
    out = [q]
    for a in word:
        q = dfa.step(q, a)
        out.append(q)
    return out


def minimize_dfa(dfa: Dfa) -> Dfa:
    """Moore partition refinement on the reachable part."""
    reach = Dfa.from_function(dfa.alphabet, dfa.start, dfa.step, lambda q: q in dfa.accepting)
    n = reach.n_states
    block = [1 if q in reach.accepting else 0 for q in range(n)]
    while True:
        sig = {}
        new = []
        for q in range(n):
            key = (block[q],) + tuple(block[r] for r in reach.delta[q])
            new.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            block = new
            break
        block = new
    # renumber so the start state's block comes first, in BFS order
    return Dfa.from_function(
        reach.alphabet,
        block[reach.start],
        lambda b, a: block[reach.delta[block.index(b)][reach.symbol_index(a)]],
        lambda b: block.index(b) in reach.accepting,
    )


def compose(f: tuple[int, ...], g: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``f`` then ``g`` (right action)."""
    return tuple(g[x] for x in f)


def transition_monoid(dfa: Dfa) -> set[tuple[int, ...]]:
    """All state maps induced by words, the empty word included."""
    ident = tuple(range(dfa.n_states))
    gens = dfa.letter_maps()
    seen = {ident}
    todo = deque([ident])
    while todo:
        m = todo.popleft()
        for g in gens:
            mg = compose(m, g)
            if mg not in seen:
                seen.add(mg)
                todo.append(mg)
    return seen


def is_aperiodic(dfa: Dfa) -> bool:
    """True iff every monoid element satisfies ``m**n == m**(n+1)`` for some ``n <= |Q|``.

    Equivalent to the monoid having no nontrivial subgroup; on a minimal DFA
    this is the star-freeness test.
    """
    n = dfa.n_states
    for m in transition_monoid(dfa):
        power = m
        for _ in range(n):
            nxt = compose(power, m)
            if nxt == power:
                break
            power = nxt
        else:
            return False
    return True


def predictive_label(dfa: Dfa, q: int, live: frozenset[int] | None = None) -> frozenset[str]:
    live = dfa.live_states() if live is None else live
    if q not in live:
        raise InvalidPrefix("prefix has no completion")
    out = {a for a, r in zip(dfa.alphabet, dfa.delta[q]) if r in live}
    if q in dfa.accepting:
        out.add(EOS)
    return frozenset(out)


def predictive_label_regular(dfa: Dfa, prefix: Word) -> frozenset[str]:
    """Symbols (and EOS) that can legally follow ``prefix``."""
    return predictive_label(dfa, dfa.run(prefix))


def label_table(dfa: Dfa) -> dict[int, frozenset[str]]:
    """Next-symbol set for every live state."""
    live = dfa.live_states()
    return {q: predictive_label(dfa, q, live) for q in sorted(live)}
