"""The formal-language catalog: membership and next-symbol oracles, samplers.

Every language is described by an incremental *tracker* (an initial state, a
step function and a state-to-label function).  Regular languages use their
DFA as tracker; counter and bracket languages simulate counters or an
explicit stack.  Membership predicates are written independently of the
trackers so the two can be checked against each other.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence

from .automata import EOS, Dfa, InvalidPrefix, Word, is_aperiodic, label_table, minimize_dfa

INVALID = "<invalid>"

Label = frozenset

LENGTH_BINS = {1: (1, 50), 2: (51, 100), 3: (101, 150)}
FLIPFLOP_MIXES = {
    "id": {"i": 0.8, "w": 0.1, "r": 0.1},
    "sparse": {"i": 0.98, "w": 0.01, "r": 0.01},
}


@dataclass(frozen=True, eq=False)
class LanguageSpec:
    """A catalog language with its oracles.

    ``start``/``step``/``label_of`` form the tracker: ``label_of`` raises
    :class:`InvalidPrefix` for states reached by prefixes with no completion.
    ``sample(rng, n)`` draws a member of exact length ``n`` (or ``None``).
    """

    name: str
    alphabet: tuple[str, ...]
    kind: str
    member: Callable[[Word], bool]
    start: Hashable
    step: Callable[[Hashable, str], Hashable]
    label_of: Callable[[Hashable], frozenset]
    sample: Callable[[random.Random, int], list | None]
    feasible: Callable[[int], bool]
    dfa: Dfa | None = None
    star_free: bool | None = None
    params: dict = field(default_factory=dict)

    @property
    def is_regular(self) -> bool:
        return self.dfa is not None

    def run(self, prefix: Word) -> Hashable:
        q = self.start
        for a in prefix:
            if a not in self.alphabet:
                raise ValueError(f"symbol {a!r} not in alphabet of {self.name}")
            q = self.step(q, a)
        return q

    def label(self, prefix: Word) -> frozenset:
        return self.label_of(self.run(prefix))

    def labels(self, word: Word) -> list[frozenset]:
        """Label after each of ``w_1``, ``w_1 w_2``, ... ``w``."""
        q = self.start
        out = []
        for a in word:
            q = self.step(q, a)
            out.append(self.label_of(q))
        return out

    def __repr__(self) -> str:
        return f"LanguageSpec({self.name})"


def predictive_label_oracle(spec: LanguageSpec, prefix: Word) -> frozenset:
    return spec.label(prefix)


# ---------------------------------------------------------------------------
# regular languages


def _regular(name, alphabet, dfa_start, dfa_step, dfa_accept, member, star_free, **params):
    dfa = Dfa.from_function(alphabet, dfa_start, dfa_step, dfa_accept)
    labels = label_table(dfa)
    reach = _exact_length_table(dfa)

    def label_of(q):
        try:
            return labels[q]
        except KeyError:
            raise InvalidPrefix("prefix has no completion") from None

    def step(q, a):
        return dfa.delta[q][dfa.symbol_index(a)]

    def feasible(n):
        return dfa.start in reach(n)

    def sample(rng, n):
        if not feasible(n):
            return None
        q = dfa.start
        word = []
        for r in range(n, 0, -1):
            ok = reach(r - 1)
            choices = [a for a, t in zip(dfa.alphabet, dfa.delta[q]) if t in ok]
            a = rng.choice(choices)
            word.append(a)
            q = step(q, a)
        return word

    return LanguageSpec(name, tuple(alphabet), "regular", member, dfa.start, step, label_of,
                        sample, feasible, dfa=dfa, star_free=star_free, params=params)


def _exact_length_table(dfa: Dfa):
    """``reach(r)``: states from which an accepting state is exactly ``r`` steps away."""

    @lru_cache(maxsize=None)
    def reach(r: int) -> frozenset:
        if r == 0:
            return dfa.accepting
        prev = reach(r - 1)
        return frozenset(q for q in range(dfa.n_states) if any(t in prev for t in dfa.delta[q]))

    def guarded(r: int) -> frozenset:
        for k in range(0, r, 256):  # fill the cache bottom-up, no deep recursion
            reach(k)
        return reach(r)

    return guarded


def _tomita3_member(w: Word) -> bool:
    runs = [(m.group()[0], len(m.group())) for m in re.finditer(r"0+|1+", "".join(w))]
    for (s1, n1), (s2, n2) in zip(runs, runs[1:]):
        if s1 == "1" and s2 == "0" and n1 % 2 == 1 and n2 % 2 == 1:
            return False
    return True


def _tomita3_step(q, a):
    # neutral / odd run of 1s / even run of 1s / odd 0s after odd 1s / even 0s after odd 1s
    table = {
        ("n", "0"): "n", ("n", "1"): "o1",
        ("o1", "1"): "e1", ("o1", "0"): "o0",
        ("e1", "1"): "o1", ("e1", "0"): "n",
        ("o0", "0"): "e0", ("o0", "1"): "dead",
        ("e0", "0"): "o0", ("e0", "1"): "o1",
    }
    return table.get((q, a), "dead")


def _fullmatch(pattern: str) -> Callable[[Word], bool]:
    rx = re.compile(pattern)
    return lambda w: rx.fullmatch("".join(w)) is not None


def _depth_member(n: int) -> Callable[[Word], bool]:
    def member(w):
        d = 0
        for a in w:
            d += 1 if a == "a" else -1
            if d < 0 or d > n:
                return False
        return d == 0
    return member


def _chain_step(letters: str):
    """aa*bb*cc*... as a position in the letter chain (-1 = nothing read yet)."""
    def step(q, a):
        if q == "dead":
            return q
        k = letters.index(a)
        if k == q or k == q + 1:
            return k
        return "dead"
    return step


def tomita(k: int) -> LanguageSpec:
    ab = ("0", "1")
    name = f"tomita{k}"
    if k == 1:
        return _regular(name, ab, 0, lambda q, a: q if a == "1" else 1, lambda q: q == 0,
                        lambda w: all(a == "1" for a in w), True)
    if k == 2:
        return _regular(name, ab, 0,
                        lambda q, a: {(0, "1"): 1, (1, "0"): 0}.get((q, a), 2),
                        lambda q: q == 0, _fullmatch("(10)*"), True)
    if k == 3:
        return _regular(name, ab, "n", _tomita3_step, lambda q: q != "dead" and q != "o0",
                        _tomita3_member, False)
    if k == 4:
        return _regular(name, ab, 0,
                        lambda q, a: 3 if q == 3 else (0 if a == "1" else q + 1),
                        lambda q: q < 3, lambda w: "000" not in "".join(w), True)
    if k == 5:
        return _regular(name, ab, (0, 0),
                        lambda q, a: (q[0] ^ (a == "0"), q[1] ^ (a == "1")),
                        lambda q: q == (0, 0),
                        lambda w: len(w) % 2 == 0 and list(w).count("1") % 2 == 0, False)
    if k == 6:
        return _regular(name, ab, 0, lambda q, a: (q + (1 if a == "0" else -1)) % 3,
                        lambda q: q == 0,
                        lambda w: (list(w).count("0") - list(w).count("1")) % 3 == 0, False)
    if k == 7:
        return _regular(name, ab, 0,
                        lambda q, a: q if q == 4 else q + ((q % 2 == 0) == (a == "1")),
                        lambda q: q < 4, _fullmatch("0*1*0*1*"), True)
    raise ValueError(f"no Tomita grammar {k}")


def dn(n: int) -> LanguageSpec:
    """``D_n = (a D_{n-1} b)*`` with ``D_0 = {eps}``: depth-bounded a/b nesting."""
    if n < 1:
        raise ValueError("D_n needs n >= 1")

    def step(q, a):
        if q == "dead":
            return q
        q += 1 if a == "a" else -1
        return q if 0 <= q <= n else "dead"

    return _regular(f"d{n}", ("a", "b"), 0, step, lambda q: q == 0, _depth_member(n), True, n=n)


def parity() -> LanguageSpec:
    return _regular("parity", ("0", "1"), 0, lambda q, a: q ^ (a == "1"), lambda q: q == 0,
                    lambda w: list(w).count("1") % 2 == 0, False)


def power_of_a(k: int) -> LanguageSpec:
    """``(a^k)*`` over the one-letter alphabet."""
    return _regular("a" * k, ("a",), 0, lambda q, a: (q + 1) % k, lambda q: q == 0,
                    lambda w: len(w) % k == 0, False, k=k)


def abab() -> LanguageSpec:
    def step(q, a):
        if q == "dead":
            return q
        return (q + 1) % 4 if a == "ab"[q % 2] else "dead"
    return _regular("abab", ("a", "b"), 0, step, lambda q: q == 0, _fullmatch("(abab)*"), False)


def abcde() -> LanguageSpec:
    letters = "abcde"
    return _regular("abcde", tuple(letters), -1, _chain_step(letters), lambda q: q == 4,
                    _fullmatch("a+b+c+d+e+"), True)


def abd() -> LanguageSpec:
    """``{a,b}* d {b,c}*``."""
    def step(q, a):
        if q == 0:
            return 0 if a in "ab" else (1 if a == "d" else "dead")
        if q == 1:
            return 1 if a in "bc" else "dead"
        return "dead"
    return _regular("abd", ("a", "b", "c", "d"), 0, step, lambda q: q == 1,
                    _fullmatch("[ab]*d[bc]*"), True)


def zero_two() -> LanguageSpec:
    """``{0,1,2}* 0 2*``."""
    def step(q, a):
        if a == "0":
            return 1
        if a == "2":
            return q
        return 0
    return _regular("zero_two", ("0", "1", "2"), 0, step, lambda q: q == 1,
                    _fullmatch("[012]*02*"), True)


# ---------------------------------------------------------------------------
# Flip-Flop


def flipflop() -> LanguageSpec:
    """Instruction/bit pairs; a bit after ``r`` repeats the bit after the last ``w``.

    Tracker state: ``(expect_instruction, last_instruction, stored_bit)``.
    """
    alphabet = ("w", "r", "i", "0", "1")
    start = (True, None, None)

    def step(q, a):
        if q == INVALID:
            return q
        expect, last, stored = q
        if expect:
            return (False, a, stored) if a in "wri" else INVALID
        if a not in "01":
            return INVALID
        if last == "r" and stored is not None and a != stored:
            return INVALID
        return (True, last, a if last == "w" else stored)

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("not a Flip-Flop prefix")
        expect, last, stored = q
        if expect:
            return frozenset({"w", "r", "i", EOS})
        if last == "r" and stored is not None:
            return frozenset({stored})
        return frozenset({"0", "1"})

    def member(w):
        stored = None
        if len(w) % 2:
            return False
        for ins, bit in zip(w[::2], w[1::2]):
            if ins not in ("w", "r", "i") or bit not in ("0", "1"):
                return False
            if ins == "w":
                stored = bit
            elif ins == "r" and stored is not None and bit != stored:
                return False
        return True

    def accept(q):
        return q != INVALID and q[0]

    dfa = Dfa.from_function(alphabet, start, step, accept)

    def sample(rng, n, mode="id"):
        if n % 2:
            return None
        probs = FLIPFLOP_MIXES[mode]
        ins_names = ("i", "w", "r")
        cum = (probs["i"], probs["i"] + probs["w"])
        word = []
        stored = None
        rnd = rng.random
        for _ in range(n // 2):
            u = rnd()
            ins = ins_names[0] if u < cum[0] else (ins_names[1] if u < cum[1] else ins_names[2])
            if ins == "r" and stored is not None:
                bit = stored
            else:
                bit = "1" if rnd() < 0.5 else "0"
                if ins == "w":
                    stored = bit
            word.append(ins)
            word.append(bit)
        return word

    return LanguageSpec("flipflop", alphabet, "flipflop", member, start, step, label_of,
                        sample, lambda n: n % 2 == 0, dfa=dfa, star_free=True)


# ---------------------------------------------------------------------------
# counter languages


def dyck1() -> LanguageSpec:
    alphabet = ("(", ")")

    def step(q, a):
        if q == INVALID:
            return q
        q += 1 if a == "(" else -1
        return q if q >= 0 else INVALID

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("unbalanced prefix")
        return frozenset({"(", EOS}) if q == 0 else frozenset(alphabet)

    def member(w):
        d = 0
        for a in w:
            d += 1 if a == "(" else -1
            if d < 0:
                return False
        return d == 0

    def sample(rng, n):
        if n % 2:
            return None
        d, word = 0, []
        for r in range(n, 0, -1):
            if d == 0 or (d < r and rng.random() < 0.5):
                word.append("(")
                d += 1
            else:
                word.append(")")
                d -= 1
        return word

    return LanguageSpec("dyck1", alphabet, "counter", member, 0, step, label_of, sample,
                        lambda n: n % 2 == 0)


def shuffle_dyck(k: int) -> LanguageSpec:
    opens = tuple(f"({i}" for i in range(1, k + 1))
    closes = tuple(f"){i}" for i in range(1, k + 1))
    alphabet = tuple(s for pair in zip(opens, closes) for s in pair)

    def step(q, a):
        if q == INVALID:
            return q
        i = int(a[1:]) - 1
        c = list(q)
        c[i] += 1 if a[0] == "(" else -1
        return tuple(c) if c[i] >= 0 else INVALID

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("unbalanced prefix")
        out = set(opens)
        out.update(closes[i] for i, c in enumerate(q) if c > 0)
        if not any(q):
            out.add(EOS)
        return frozenset(out)

    def member(w):
        for i in range(1, k + 1):
            d = 0
            for a in w:
                if a == f"({i}":
                    d += 1
                elif a == f"){i}":
                    d -= 1
                    if d < 0:
                        return False
            if d:
                return False
        return all(a in alphabet for a in w)

    def sample(rng, n):
        if n % 2:
            return None
        c = [0] * k
        word = []
        for r in range(n, 0, -1):
            total = sum(c)
            if total == 0 or (total < r and rng.random() < 0.5):
                i = rng.randrange(k)
                c[i] += 1
                word.append(opens[i])
            else:
                i = rng.choice([j for j in range(k) if c[j]])
                c[i] -= 1
                word.append(closes[i])
        return word

    return LanguageSpec(f"shuffle{k}", alphabet, "counter", member, (0,) * k, step, label_of,
                        sample, lambda n: n % 2 == 0, params={"k": k})


BOOLEAN_VALUES = ("0", "1")
BOOLEAN_OPERATORS = {"~": 1, "&": 2, "|": 2, "?": 3, "#": 4, "$": 5}


def boolean(max_arity: int) -> LanguageSpec:
    """Prefix-notation expressions with operators of arity up to ``max_arity``.

    Tracker state: number of subexpressions still owed.
    """
    ops = {o: n for o, n in BOOLEAN_OPERATORS.items() if n <= max_arity}
    alphabet = BOOLEAN_VALUES + tuple(ops)

    def step(q, a):
        if q == INVALID or q == 0:
            return INVALID
        return q - 1 if a in BOOLEAN_VALUES else q + ops[a] - 1

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("not an expression prefix")
        return frozenset({EOS}) if q == 0 else frozenset(alphabet)

    def member(w):
        # evaluate right to left: operands are pushed, operators pop their arity
        stack = []
        for a in reversed(w):
            if a in BOOLEAN_VALUES:
                stack.append(a == "1")
            elif a in ops:
                if len(stack) < ops[a]:
                    return False
                del stack[-ops[a]:]
                stack.append(True)
            else:
                return False
        return len(stack) == 1

    def sample(rng, n):
        if n < 1:
            return None
        owed, word = 1, []
        for r in range(n, 0, -1):
            choices = []
            if (owed - 1 == 0 and r == 1) or 1 <= owed - 1 <= r - 1:
                choices.extend(BOOLEAN_VALUES)
            choices.extend(o for o, j in ops.items() if owed + j - 1 <= r - 1)
            a = rng.choice(choices)
            word.append(a)
            owed = step(owed, a)
        return word

    return LanguageSpec(f"boolean{max_arity}", alphabet, "counter", member, 1, step, label_of,
                        sample, lambda n: n >= 1, params={"max_arity": max_arity})


def letter_blocks(letters: str) -> LanguageSpec:
    """``a^n b^n ...`` (n >= 1) over the given letters.

    Tracker state: ``(phase, n, count_in_phase)``; phase 0 reads the ``a`` block.
    """
    k = len(letters)
    name = "".join(f"{c}n" for c in letters)

    def step(q, a):
        if q == INVALID:
            return q
        phase, n, c = q
        j = letters.index(a)
        if phase == 0 and j == 0:
            return (0, n + 1, c + 1)
        if j == phase and c < n:
            return (phase, n, c + 1)
        if j == phase + 1 and c == n and n > 0:
            return (j, n, 1)
        return INVALID

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("not a prefix")
        phase, n, c = q
        if n == 0:
            return frozenset({letters[0]})
        if phase == 0:
            return frozenset(letters[:2])
        if c < n:
            return frozenset({letters[phase]})
        return frozenset({EOS}) if phase == k - 1 else frozenset({letters[phase + 1]})

    def member(w):
        s = "".join(w)
        n = len(s) // k
        return n >= 1 and len(s) == n * k and s == "".join(c * n for c in letters)

    def sample(rng, n):
        if n % k or n == 0:
            return None
        return [c for c in letters for _ in range(n // k)]

    return LanguageSpec(name, tuple(letters), "counter", member, (0, 0, 0), step, label_of,
                        sample, lambda n: n > 0 and n % k == 0)


def bounded_dyck(K: int, h: int) -> LanguageSpec:
    """Dyck(K, h): K bracket types, nesting depth at most h."""
    if K < 1 or h < 1:
        raise ValueError("need K >= 1 and h >= 1")
    opens = tuple(f"({i}" for i in range(1, K + 1))
    closes = tuple(f"){i}" for i in range(1, K + 1))
    alphabet = tuple(s for pair in zip(opens, closes) for s in pair)

    def step(q, a):
        if q == INVALID:
            return q
        i = int(a[1:])
        if a[0] == "(":
            return q + (i,) if len(q) < h else INVALID
        return q[:-1] if q and q[-1] == i else INVALID

    def label_of(q):
        if q == INVALID:
            raise InvalidPrefix("not a Dyck prefix")
        out = set()
        if q:
            out.add(f"){q[-1]}")
        if len(q) < h:
            out.update(opens)
        if not q:
            out.add(EOS)
        return frozenset(out)

    def member(w):
        def parse(i, depth):
            # S_depth -> ( S_{depth-1} ) S_depth | eps ; returns end index
            while i < len(w) and w[i][0] == "(":
                if depth == 0:
                    return None
                j = parse(i + 1, depth - 1)
                if j is None or j >= len(w) or w[j] != ")" + w[i][1:]:
                    return None
                i = j + 1
            return i
        return all(a in alphabet for a in w) and parse(0, h) == len(w)

    def sample(rng, n):
        if n % 2:
            return None
        stack, word = [], []
        for r in range(n, 0, -1):
            can_open = len(stack) < h and len(stack) + 1 <= r - 1
            can_close = bool(stack)
            if can_open and (not can_close or rng.random() < 0.5):
                i = rng.randrange(1, K + 1)
                stack.append(i)
                word.append(f"({i}")
            else:
                word.append(f"){stack.pop()}")
        return word

    return LanguageSpec(f"bdyck_{K}_{h}", alphabet, "dyck", member, (), step, label_of, sample,
                        lambda n: n % 2 == 0, star_free=True, params={"K": K, "h": h})


# ---------------------------------------------------------------------------
# catalog

REGULAR_CATALOG = (
    "tomita1", "tomita2", "tomita3", "tomita4", "tomita5", "tomita6", "tomita7",
    "d2", "d3", "d4", "d12", "parity", "aa", "aaaa", "abab", "abcde", "abd", "zero_two",
)
STAR_FREE = ("tomita1", "tomita2", "tomita4", "tomita7", "d2", "d3", "d4", "d12",
             "abcde", "abd", "zero_two")
NON_STAR_FREE = ("parity", "aa", "aaaa", "abab", "tomita3", "tomita5", "tomita6")
COUNTER_CATALOG = ("dyck1", "shuffle2", "shuffle4", "shuffle6", "boolean3", "boolean5",
                   "anbn", "anbncn", "anbncndn")


def get_language(name: str, **params) -> LanguageSpec:
    """Look up a catalog language by identifier (``tomita4``, ``d12``, ``bdyck`` ...)."""
    key = name.lower()
    simple = {
        "parity": parity, "abab": abab, "abcde": abcde, "abd": abd, "zero_two": zero_two,
        "flipflop": flipflop, "dyck1": dyck1,
        "anbn": lambda: letter_blocks("ab"), "anbncn": lambda: letter_blocks("abc"),
        "anbncndn": lambda: letter_blocks("abcd"),
    }
    if key in simple:
        return _cached(key, simple[key])
    if key in ("aa", "aaaa"):
        return _cached(key, lambda: power_of_a(len(key)))
    m = re.fullmatch(r"tomita([1-7])", key)
    if m:
        return _cached(key, lambda: tomita(int(m.group(1))))
    m = re.fullmatch(r"d(\d+)", key)
    if m:
        return _cached(key, lambda: dn(int(m.group(1))))
    m = re.fullmatch(r"shuffle(\d+)", key)
    if m:
        return _cached(key, lambda: shuffle_dyck(int(m.group(1))))
    m = re.fullmatch(r"boolean(\d+)", key)
    if m:
        return _cached(key, lambda: boolean(int(m.group(1))))
    m = re.fullmatch(r"bdyck(?:_(\d+)_(\d+))?", key)
    if m:
        K = int(m.group(1) or params.get("K", 8))
        h = int(m.group(2) or params.get("h", 10))
        return _cached(f"bdyck_{K}_{h}", lambda: bounded_dyck(K, h))
    raise KeyError(f"unknown language {name!r}")


def language_from_dfa(dfa: Dfa, name: str = "dfa") -> LanguageSpec:
    """Wrap an arbitrary DFA as a regular language with the usual oracles."""
    return _regular(name, dfa.alphabet, dfa.start, dfa.step, lambda q: q in dfa.accepting,
                    dfa.accepts, is_aperiodic(minimize_dfa(dfa)))


_CACHE: dict[str, LanguageSpec] = {}


def _cached(key: str, build: Callable[[], LanguageSpec]) -> LanguageSpec:
    if key not in _CACHE:
        _CACHE[key] = build()
    return _CACHE[key]


# ---------------------------------------------------------------------------
# sampling


def generate_samples(spec: LanguageSpec, length_range: tuple[int, int], count: int,
                     seed: int, mode: str | None = None) -> list[tuple[list, list]]:
    """``count`` members with lengths drawn uniformly from the feasible lengths in range.

    Returns ``(word, labels)`` pairs; ``labels[t]`` is the next-symbol set after
    ``w_1 .. w_{t+1}``.  ``mode`` selects the Flip-Flop instruction mix.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    lo, hi = length_range
    lengths = [n for n in range(max(lo, 0), hi + 1) if spec.feasible(n)]
    if not lengths:
        raise ValueError(f"{spec.name} has no words with length in [{lo}, {hi}]")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.choice(lengths)
        if spec.kind == "flipflop":
            word = spec.sample(rng, n, mode or "id")
        else:
            word = spec.sample(rng, n)
        out.append((word, spec.labels(word)))
    return out


def format_label(label: Iterable[str], alphabet: Sequence[str]) -> str:
    """Bitstring over ``alphabet + (EOS,)`` in declared order."""
    label = set(label)
    return "".join("1" if s in label else "0" for s in tuple(alphabet) + (EOS,))


def format_record(word: Sequence[str], labels: Sequence[frozenset], alphabet: Sequence[str]) -> str:
    return " ".join(word) + "\t" + ",".join(format_label(l, alphabet) for l in labels)


def parse_record(line: str, alphabet: Sequence[str]) -> tuple[list[str], list[frozenset]]:
    symbols = tuple(alphabet) + (EOS,)
    word_part, _, label_part = line.rstrip("\n").partition("\t")
    word = word_part.split()
    labels = [frozenset(s for s, bit in zip(symbols, bits) if bit == "1")
              for bits in label_part.split(",")] if label_part else []
    return word, labels
