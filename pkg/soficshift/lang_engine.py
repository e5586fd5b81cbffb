"""Predecessor languages and presented-shift languages.

The predecessor language of a vertex set U is the set of finite words labelling a path that ends in U.
It is recognised by reading words right to left: start at U and replace the current set V by ``aV``,
the sources of a-edges into V, one symbol at a time. Every nonempty set is accepting. The reachable part
of that subset automaton is minimised by Moore refinement, and the BFS-numbered transition table of the
minimal automaton is the class key. On essential graphs equal keys mean equal predecessor sets of
left-rays, so the key decides the union-equivalence of vertex sets.
"""

from __future__ import annotations

import hashlib
import logging
import threading
from collections import deque
from collections.abc import Iterable, Sequence
from functools import lru_cache

from pydantic import BaseModel, ConfigDict

from .config import DEFAULT_LIMITS, Limits
from .errors import StateCapExceeded
from .graph_core import LabelledGraph, VertexSet

logger = logging.getLogger(__name__)

Word = Sequence[str]
VertexSetLike = VertexSet | Iterable[str] | int


class DeterministicAcceptor(BaseModel):
    """Deterministic automaton whose every state accepts; ``-1`` in the table is the dead state.

    Words are read right to left, last symbol first.
    """

    model_config = ConfigDict(frozen=True)

    alphabet: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    start: int = 0

    @property
    def state_count(self) -> int:
        return len(self.table)

    def accepts(self, word: Word) -> bool:
        column = {a: i for i, a in enumerate(self.alphabet)}
        state = self.start
        for symbol in reversed(word):
            if symbol not in column:
                return False
            state = self.table[state][column[symbol]]
            if state < 0:
                return False
        return True


class PredecessorClassKey(BaseModel):
    """Canonical minimal acceptor of a predecessor language. Equal keys mean equal languages."""

    model_config = ConfigDict(frozen=True)

    alphabet: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def digest(self) -> str:
        payload = repr((self.alphabet, self.table)).encode()
        return hashlib.sha256(payload).hexdigest()[:12]

    def __lt__(self, other: PredecessorClassKey) -> bool:
        return (len(self.table), self.table) < (len(other.table), other.table)


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class PredecessorEngine:
    """Per-graph memo of the reversed subset automaton and its minimisation.

    The automaton only ever grows, and the language of an explored state never changes, so keys filled
    by one query stay valid for all later ones. A lock keeps concurrent fills from interleaving.
    """

    def __init__(self, graph: LabelledGraph, limits: Limits = DEFAULT_LIMITS):
        self.graph = graph
        self.limits = limits
        self.symbols = graph.alphabet.symbols
        self._rows = [graph.sources_into[a] for a in self.symbols]
        self._column = {a: i for i, a in enumerate(self.symbols)}
        self._succ: dict[int, tuple[int, ...]] = {}
        self._block: dict[int, int] = {}
        self._dirty = False
        self._keys: dict[int, PredecessorClassKey] = {}
        self._lock = threading.RLock()

    # ---------------------------------------------------------------------------
    # Prepending a symbol to a set of path ends
    # ---------------------------------------------------------------------------
    def prepend(self, mask: int, symbol: str | int) -> int:
        rows = self._rows[symbol if isinstance(symbol, int) else self._column[symbol]]
        result = 0
        for i in iter_bits(mask):
            result |= rows[i]
        return result

    def start_set(self, word: Word) -> int:
        """S(w), the sources of paths labelled w; 0 when w is not presentable."""
        mask = self.graph.full_mask
        for symbol in reversed(word):
            if symbol not in self._column:
                return 0
            mask = self.prepend(mask, symbol)
            if not mask:
                return 0
        return mask

    # ---------------------------------------------------------------------------
    # Subset construction and refinement
    # ---------------------------------------------------------------------------
    def explore(self, masks: Iterable[int]) -> None:
        with self._lock:
            queue = deque(m for m in masks if m and m not in self._succ)
            while queue:
                mask = queue.popleft()
                if mask in self._succ:
                    continue
                succ = tuple(self.prepend(mask, i) for i in range(len(self.symbols)))
                self._succ[mask] = succ
                self._dirty = True
                if len(self._succ) > self.limits.state_cap:
                    raise StateCapExceeded(f"subset construction on {self.graph.name!r}", self.limits.state_cap)
                queue.extend(t for t in succ if t and t not in self._succ)

    def _refine(self) -> None:
        if not self._dirty:
            return
        states = sorted(self._succ)
        block = dict.fromkeys(states, 0)
        count = 1
        rounds = 0
        while True:
            rounds += 1
            signatures: dict[tuple[int, ...], int] = {}
            refined = {}
            for s in states:
                signature = (block[s], *(block[t] if t else -1 for t in self._succ[s]))
                refined[s] = signatures.setdefault(signature, len(signatures))
            if len(signatures) == count:
                break
            block, count = refined, len(signatures)
        self._block = block
        self._dirty = False
        logger.debug(
            "refined %d subset states of %s into %d classes in %d rounds", len(states), self.graph.name, count, rounds
        )

    def _canonical_table(self, mask: int) -> tuple[tuple[int, ...], ...]:
        representative: dict[int, int] = {}
        for s, b in self._block.items():
            representative.setdefault(b, s)
        order = {self._block[mask]: 0}
        queue = deque([self._block[mask]])
        rows = []
        while queue:
            b = queue.popleft()
            row = []
            for t in self._succ[representative[b]]:
                if not t:
                    row.append(-1)
                    continue
                tb = self._block[t]
                if tb not in order:
                    order[tb] = len(order)
                    queue.append(tb)
                row.append(order[tb])
            rows.append(tuple(row))
        return tuple(rows)

    def class_key(self, mask: int) -> PredecessorClassKey:
        with self._lock:
            key = self._keys.get(mask)
            if key is None:
                self.explore([mask])
                self._refine()
                key = PredecessorClassKey(alphabet=self.symbols, table=self._canonical_table(mask))
                self._keys[mask] = key
            return key

    def acceptor(self, mask: int, minimize: bool = True) -> DeterministicAcceptor:
        if minimize:
            key = self.class_key(mask)
            return DeterministicAcceptor(alphabet=key.alphabet, table=key.table)
        with self._lock:
            self.explore([mask])
            order = {mask: 0}
            queue = deque([mask])
            rows = []
            while queue:
                state = queue.popleft()
                row = []
                for t in self._succ[state]:
                    if t and t not in order:
                        order[t] = len(order)
                        queue.append(t)
                    row.append(order[t] if t else -1)
                rows.append(tuple(row))
            return DeterministicAcceptor(alphabet=self.symbols, table=tuple(rows))

    def subset(self, u: int, v: int) -> bool:
        """Whether the predecessor language of u is contained in that of v (product emptiness)."""
        seen = {(u, v)}
        queue = deque(seen)
        while queue:
            a, b = queue.popleft()
            if not b:
                return False
            for i in range(len(self.symbols)):
                pa = self.prepend(a, i)
                if not pa:
                    continue
                pair = (pa, self.prepend(b, i))
                if pair not in seen:
                    seen.add(pair)
                    if len(seen) > self.limits.state_cap:
                        raise StateCapExceeded(f"inclusion check on {self.graph.name!r}", self.limits.state_cap)
                    queue.append(pair)
        return True


@lru_cache(maxsize=128)
def engine_for(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> PredecessorEngine:
    return PredecessorEngine(g, limits)


def _mask(g: LabelledGraph, u: VertexSetLike) -> int:
    return g.vertex_set(u).mask


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------
def predecessor_acceptor(
    g: LabelledGraph, u: VertexSetLike, minimize: bool = True, limits: Limits = DEFAULT_LIMITS
) -> DeterministicAcceptor:
    return engine_for(g, limits).acceptor(_mask(g, u), minimize=minimize)


def class_key(g: LabelledGraph, u: VertexSetLike, limits: Limits = DEFAULT_LIMITS) -> PredecessorClassKey:
    return engine_for(g, limits).class_key(_mask(g, u))


def pred_equal(g: LabelledGraph, u: VertexSetLike, v: VertexSetLike, limits: Limits = DEFAULT_LIMITS) -> bool:
    engine = engine_for(g, limits)
    return engine.class_key(_mask(g, u)) == engine.class_key(_mask(g, v))


def pred_subset(g: LabelledGraph, u: VertexSetLike, v: VertexSetLike, limits: Limits = DEFAULT_LIMITS) -> bool:
    return engine_for(g, limits).subset(_mask(g, u), _mask(g, v))


def word_presentable(g: LabelledGraph, w: Word) -> bool:
    return not w or engine_for(g).start_set(w) != 0


def start_set(g: LabelledGraph, w: Word) -> VertexSet:
    return VertexSet(g, engine_for(g).start_set(w))


def separating_word(
    g1: LabelledGraph, g2: LabelledGraph, limits: Limits = DEFAULT_LIMITS
) -> tuple[str, ...] | None:
    """Shortest word presented by exactly one of the graphs, or None when their languages agree."""
    e1, e2 = engine_for(g1, limits), engine_for(g2, limits)
    only_one = sorted(set(g1.alphabet.symbols) ^ set(g2.alphabet.symbols))
    if only_one:
        return (only_one[0],)
    start = (g1.full_mask, g2.full_mask)
    parent: dict[tuple[int, int], tuple[tuple[int, int], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        for symbol in g1.alphabet.symbols:
            nxt = (e1.prepend(pair[0], symbol), e2.prepend(pair[1], symbol))
            if not nxt[0] and not nxt[1]:
                continue
            if nxt in parent:
                continue
            parent[nxt] = (pair, symbol)
            if not nxt[0] or not nxt[1]:
                return _unwind(parent, nxt)
            if len(parent) > limits.state_cap:
                raise StateCapExceeded("language equivalence check", limits.state_cap)
            queue.append(nxt)
    return None


def _unwind(parent: dict, pair: tuple[int, int]) -> tuple[str, ...]:
    # the symbol recorded last was prepended last, so it is the first letter
    word = []
    step = parent[pair]
    while step is not None:
        pair, symbol = step
        word.append(symbol)
        step = parent[pair]
    return tuple(word)


def shift_language_equal(g1: LabelledGraph, g2: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> bool:
    return separating_word(g1, g2, limits) is None


def format_word(w: Word) -> str:
    if all(len(symbol) == 1 for symbol in w):
        return "".join(w)
    return " ".join(w)


def parse_word(g: LabelledGraph, text: str) -> tuple[str, ...]:
    """Split a word written either as space/comma separated symbols or as a run of one-character symbols."""
    if any(ch.isspace() or ch == "," for ch in text):
        return tuple(t for t in text.replace(",", " ").split() if t)
    if text in g.alphabet:
        return (text,)
    return tuple(text)
