"""Cascades of set-reset automata for aperiodic DFAs (holonomy decomposition).

The state of the cascade is a chain ``Q = Y_H ⊋ ... ⊋ Y_0 = {q}`` of sets
from the image family ``I = {Q·w} ∪ {{q}}``.  Level ``k`` records which tile
of ``Y_k`` the chain continues into, expressed in the coordinates of a fixed
representative of ``Y_k``'s equivalence class, or ``"*"`` when ``Y_k`` is too
low to branch at this level.  When the transition monoid is aperiodic every
holonomy group is trivial, so each level either keeps its value or is reset
to a constant: a set-reset automaton.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Sequence

from .automata import Dfa, Word, is_aperiodic, minimize_dfa

STAR = "*"
KEEP = "keep"


class NotStarFree(ValueError):
    """Refusal: the language is not star-free.

    Such languages are out of reach for SSMs with nonnegative gates at finite
    precision; a signed or rotation gate is required.
    """


@dataclass(frozen=True)
class SetResetAutomaton:
    """Records the target of the most recent reset symbol.

    ``resets`` maps a symbol to the index of the state it resets to; every
    other symbol leaves the state unchanged.  ``states[start]`` is the
    initial state.
    """

    states: tuple
    alphabet: tuple[str, ...]
    resets: dict
    start: int = 0

    def __post_init__(self) -> None:
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate symbols")
        if not 0 <= self.start < len(self.states):
            raise ValueError("start state out of range")
        for a, q in self.resets.items():
            if a not in self.alphabet or not 0 <= q < len(self.states):
                raise ValueError(f"bad reset {a!r} -> {q!r}")

    @classmethod
    def recording(cls, alphabet: Sequence[str], recorded: Sequence[str],
                  initial: Hashable = "q0") -> "SetResetAutomaton":
        """The textbook form: states are ``initial`` plus the recorded symbols."""
        states = (initial,) + tuple(recorded)
        return cls(states, tuple(alphabet), {a: i + 1 for i, a in enumerate(recorded)})

    @property
    def n_states(self) -> int:
        return len(self.states)

    def step(self, q: int, symbol: str) -> int:
        return self.resets.get(symbol, q)

    def run(self, word: Word) -> list[int]:
        q = self.start
        out = [q]
        for a in word:
            q = self.step(q, a)
            out.append(q)
        return out

    def as_dfa(self) -> Dfa:
        n = len(self.states)
        rows = tuple(tuple(self.step(q, a) for a in self.alphabet) for q in range(n))
        return Dfa(self.alphabet, rows, self.start, frozenset(range(n)))

    def obeys_set_reset_law(self) -> bool:
        """Every symbol acts as the identity or as a constant map."""
        n = len(self.states)
        for a in self.alphabet:
            image = [self.step(q, a) for q in range(n)]
            if image != list(range(n)) and len(set(image)) != 1:
                return False
        return True


@dataclass(frozen=True)
class CascadeProgram:
    """Set-reset components in cascade.

    ``wiring[i]`` maps ``(states of components 0..i-1 before the step, symbol)``
    to component ``i``'s input symbol; ``output`` maps joint states to states
    of the source DFA.
    """

    alphabet: tuple[str, ...]
    components: tuple[SetResetAutomaton, ...]
    wiring: tuple[dict, ...]
    output: dict
    start: tuple

    def step(self, joint: tuple, symbol: str) -> tuple:
        return tuple(
            comp.step(joint[i], self.wiring[i][(joint[:i], symbol)])
            for i, comp in enumerate(self.components)
        )

    def run(self, word: Word) -> list[tuple]:
        joint = self.start
        out = [joint]
        for a in word:
            joint = self.step(joint, a)
            out.append(joint)
        return out

    def decoded_run(self, word: Word) -> list:
        return [self.output[j] for j in self.run(word)]

    def reachable(self) -> list[tuple]:
        seen = {self.start: None}
        todo = deque([self.start])
        while todo:
            j = todo.popleft()
            for a in self.alphabet:
                k = self.step(j, a)
                if k not in seen:
                    seen[k] = None
                    todo.append(k)
        return list(seen)

    def to_text(self) -> str:
        """Human-readable dump of components and wiring tables."""
        lines = [f"alphabet: {' '.join(self.alphabet)}", f"start: {self.start}"]
        for i, comp in enumerate(self.components):
            lines.append(f"component {i}: {len(comp.states)} states, start {comp.start}")
            for a, q in sorted(comp.resets.items()):
                lines.append(f"  {a} resets to {q} ({comp.states[q]})")
            for (prefix, a), sym in sorted(self.wiring[i].items(), key=repr):
                lines.append(f"  wire {prefix} {a} -> {sym}")
        for joint, q in sorted(self.output.items(), key=repr):
            lines.append(f"output {joint} -> {q}")
        return "\n".join(lines) + "\n"


class _Holonomy:
    """Image family, tiles, heights and class coordinates for one DFA."""

    def __init__(self, dfa: Dfa):
        self.dfa = dfa
        reach = _reachable(dfa)
        self.states = frozenset(reach)
        self.maps = [dict((q, dfa.delta[q][k]) for q in reach) for k in range(len(dfa.alphabet))]
        self.sym = {a: k for k, a in enumerate(dfa.alphabet)}

        top = self.states
        images = {top}
        todo = deque([top])
        while todo:
            p = todo.popleft()
            for m in self.maps:
                r = frozenset(m[q] for q in p)
                if r not in images:
                    images.add(r)
                    todo.append(r)
        family = images | {frozenset([q]) for q in reach}
        self.family = sorted(family, key=_set_key)

        self.orbit = {p: self._orbit(p) for p in self.family}
        self.below = {
            p: {x for x in self.family if any(x <= y for y in self.orbit[p])}
            for p in self.family
        }
        self.height: dict[frozenset, int] = {}
        for p in sorted(self.family, key=len):
            self._height(p)
        self.tiles = {p: self._tiles(p) for p in self.family if len(p) > 1}

        # equivalence classes, representatives and transport maps R -> P
        self.cls: dict[frozenset, int] = {}
        self.reps: list[frozenset] = []
        for p in self.family:
            if p in self.cls:
                continue
            members = [x for x in self.family if self.equivalent(p, x)]
            for x in members:
                self.cls[x] = len(self.reps)
            self.reps.append(min(members, key=_set_key))
        self.transport = {}
        for idx, rep in enumerate(self.reps):
            for p, mapping in self._transports(rep).items():
                if self.cls.get(p) == idx:
                    self.transport[p] = mapping

    def image(self, p: frozenset, symbol: str) -> frozenset:
        m = self.maps[self.sym[symbol]]
        return frozenset(m[q] for q in p)

    def _orbit(self, p: frozenset) -> set[frozenset]:
        seen = {p}
        todo = deque([p])
        while todo:
            x = todo.popleft()
            for m in self.maps:
                y = frozenset(m[q] for q in x)
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def equivalent(self, p: frozenset, x: frozenset) -> bool:
        return x in self.below[p] and p in self.below[x]

    def _height(self, p: frozenset) -> int:
        if p in self.height:
            return self.height[p]
        if len(p) == 1:
            h = 0
        else:
            h = 1 + max(self._height(x) for x in self.below[p]
                        if not self.equivalent(p, x) and len(x) <= len(p))
        self.height[p] = h
        return h

    def _tiles(self, p: frozenset) -> list[frozenset]:
        inside = [x for x in self.family if x < p]
        return sorted((x for x in inside if not any(x < y for y in inside)), key=_set_key)

    def _transports(self, rep: frozenset) -> dict[frozenset, dict]:
        """For each image ``rep·w`` of full size, the bijection induced by the first such ``w``."""
        ident = {q: q for q in rep}
        found = {rep: ident}
        todo = deque([rep])
        while todo:
            x = todo.popleft()
            for m in self.maps:
                y = frozenset(m[q] for q in x)
                if len(y) == len(rep) and y not in found:
                    found[y] = {q: m[found[x][q]] for q in rep}
                    todo.append(y)
        return found

    def to_actual(self, p: frozenset, rep_tile: frozenset) -> frozenset:
        mapping = self.transport[p]
        return frozenset(mapping[q] for q in rep_tile)

    def to_coord(self, p: frozenset, tile: frozenset) -> frozenset:
        inverse = {v: q for q, v in self.transport[p].items()}
        return frozenset(inverse[q] for q in tile)

    def first_tile_containing(self, p: frozenset, subset: frozenset) -> frozenset:
        for t in self.tiles[p]:
            if subset <= t:
                return t
        raise AssertionError("no tile covers the subset")


def _set_key(s: frozenset) -> tuple:
    return (len(s), sorted(s))


def _reachable(dfa: Dfa) -> list[int]:
    seen = {dfa.start: None}
    todo = deque([dfa.start])
    while todo:
        q = todo.popleft()
        for r in dfa.delta[q]:
            if r not in seen:
                seen[r] = None
                todo.append(r)
    return list(seen)


class _ChainCascade:
    """Cascade semantics on chains, before compaction into indexed components."""

    def __init__(self, hol: _Holonomy):
        self.hol = hol
        self.top = hol.states
        self.levels = list(range(hol.height[self.top], 0, -1))

    def chain(self, joint: tuple) -> list[frozenset]:
        """``[Y_H, ..., Y_0]`` for a joint value."""
        hol = self.hol
        y = self.top
        out = [y]
        for k, v in zip(self.levels, joint):
            if v == STAR:
                if hol.height[y] >= k:
                    raise AssertionError("star at a branching level")
            else:
                cls, rep_tile = v
                if hol.cls[y] != cls or hol.height[y] != k:
                    raise AssertionError("coordinate does not fit the chain")
                y = hol.to_actual(y, rep_tile)
            out.append(y)
        return out

    def initial(self, q0: int) -> tuple:
        hol = self.hol
        y = self.top
        joint = []
        for k in self.levels:
            if hol.height[y] == k:
                t = hol.first_tile_containing(y, frozenset([q0]))
                joint.append((hol.cls[y], hol.to_coord(y, t)))
                y = t
            else:
                joint.append(STAR)
        return tuple(joint)

    def update(self, joint: tuple, symbol: str) -> tuple:
        return self.update_with_kinds(joint, symbol)[0]

    def update_with_kinds(self, joint: tuple, symbol: str) -> tuple[tuple, tuple]:
        """New joint value plus, per level, ``KEEP`` or the reset target."""
        hol = self.hol
        kinds = []
        old = self.chain(joint)
        new_y = self.top
        out = []
        for i, k in enumerate(self.levels):
            p, p_new = old[i], new_y
            if hol.height[p_new] < k:
                v = STAR
                kinds.append(v)
            elif hol.height[p] == k and hol.image(p, symbol) == p_new:
                v = joint[i]
                moved = hol.image(hol.to_actual(p, v[1]), symbol)
                if hol.to_coord(p_new, moved) != v[1]:
                    raise NotStarFree("nontrivial holonomy group: the transition monoid has a cycle")
                new_y = moved
                kinds.append(KEEP)
            else:
                t = hol.first_tile_containing(p_new, hol.image(p, symbol))
                v = (hol.cls[p_new], hol.to_coord(p_new, t))
                new_y = t
                kinds.append(v)
            out.append(v)
        return tuple(out), tuple(kinds)

    def state_of(self, joint: tuple) -> int:
        (q,) = self.chain(joint)[-1]
        return q


def krohn_rhodes_decompose(dfa: Dfa) -> CascadeProgram:
    """Cascade of set-reset automata whose output map reproduces ``dfa_run``.

    Raises :class:`NotStarFree` when the language is not star-free.  The DFA's
    own transition monoid must be aperiodic; minimize first if it is not.
    """
    if not is_aperiodic(minimize_dfa(dfa)):
        raise NotStarFree("language is not star-free: its syntactic monoid contains a group")
    if not is_aperiodic(Dfa.from_function(dfa.alphabet, dfa.start, dfa.step, lambda q: True)):
        raise ValueError("this DFA's transition monoid has a group; decompose its minimization")
    hol = _Holonomy(dfa)
    cc = _ChainCascade(hol)

    start = cc.initial(dfa.start)
    seen = {start: None}
    todo = deque([start])
    edges = {}
    kinds = {}
    while todo:
        j = todo.popleft()
        for a in dfa.alphabet:
            k, kinds[(j, a)] = cc.update_with_kinds(j, a)
            edges[(j, a)] = k
            if k not in seen:
                seen[k] = None
                todo.append(k)
    joints = list(seen)

    # compact: keep levels that take more than one value, index their values
    n_levels = len(cc.levels)
    values = [sorted({j[i] for j in joints}, key=repr) for i in range(n_levels)]
    kept = [i for i in range(n_levels) if len(values[i]) > 1]
    index = [{v: n for n, v in enumerate(values[i])} for i in range(n_levels)]

    def compact(j: tuple) -> tuple:
        return tuple(index[i][j[i]] for i in kept)

    components = []
    wiring = []
    for pos, i in enumerate(kept):
        names = tuple(_value_name(v) for v in values[i])
        resets = {f"reset{n}": n for n in range(len(names))}
        table = {}
        for j in joints:
            for a in dfa.alphabet:
                kind = kinds[(j, a)][i]
                sym = KEEP if kind == KEEP else f"reset{index[i][kind]}"
                if table.setdefault((compact(j)[:pos], a), sym) != sym:
                    raise NotStarFree("level update depends on its own value")
        comp = SetResetAutomaton(names, (KEEP,) + tuple(resets), resets, index[i][start[i]])
        components.append(comp)
        wiring.append(table)
    for j in joints:
        for a in dfa.alphabet:
            if _wired_step(components, wiring, compact(j), a) != compact(edges[(j, a)]):
                raise NotStarFree("component update is neither identity nor reset")
    output = {compact(j): cc.state_of(j) for j in joints}
    if len({compact(j) for j in joints}) != len(joints):
        raise AssertionError("compaction merged distinct joint states")
    return CascadeProgram(tuple(dfa.alphabet), tuple(components), tuple(wiring), output,
                          compact(start))


def _wired_step(components, wiring, joint, a):
    return tuple(c.step(joint[i], wiring[i][(joint[:i], a)]) for i, c in enumerate(components))


def _value_name(v) -> str:
    if v == STAR:
        return STAR
    cls, tile = v
    return f"c{cls}:{'.'.join(map(str, sorted(tile)))}"
