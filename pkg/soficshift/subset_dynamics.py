"""Start sets S(w), the transition-relation monoid, and predecessor sets of right-rays.

For a word w, S(w) = wE⁰ is the set of sources of paths labelled w. Prepending a symbol maps S(w) to
S(aw) = a·S(w), which gives the subset automaton explored by :func:`reachable_subsets`.

Reading a right-ray x1 x2 ... left to right needs more than S(prefix), so the monoid of transition
relations ρ(w) ⊆ E⁰ × E⁰ is explored instead: ρ(wa) = ρ(w)ρ(a) and domain(ρ(w)) = S(w). Along a
ray the domains shrink and their predecessor classes stabilise. A class is the predecessor set of a
right-ray exactly when the live relations of that class contain a cycle of transitions, since a ray can
then stay inside the class forever.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Hashable

import networkx as nx
from pydantic import BaseModel, ConfigDict

from .config import DEFAULT_LIMITS, Limits
from .errors import InvalidRay, StateCapExceeded
from .graph_core import LabelledGraph, VertexSet
from .lang_engine import PredecessorClassKey, Word, engine_for, iter_bits

logger = logging.getLogger(__name__)

# Sparse boolean matrix: (row vertex index, bitmask of the row) for every nonempty row, by row index.
TransitionRelation = tuple[tuple[int, int], ...]


def identity_relation(g: LabelledGraph) -> TransitionRelation:
    return tuple((i, 1 << i) for i in range(len(g.vertices)))


def relation_domain(relation: TransitionRelation) -> int:
    mask = 0
    for row, _ in relation:
        mask |= 1 << row
    return mask


class RelationKernel:
    """Right multiplication by generators, with the row images memoised per symbol."""

    def __init__(self, graph: LabelledGraph):
        self.graph = graph
        self.symbols = graph.alphabet.symbols
        self._targets = [graph.targets_from[a] for a in self.symbols]
        self._images: list[dict[int, int]] = [{} for _ in self.symbols]
        self.column = {a: i for i, a in enumerate(self.symbols)}

    def _image(self, mask: int, column: int) -> int:
        memo = self._images[column]
        image = memo.get(mask)
        if image is None:
            rows = self._targets[column]
            image = 0
            for i in iter_bits(mask):
                image |= rows[i]
            memo[mask] = image
        return image

    def step(self, relation: TransitionRelation, column: int) -> TransitionRelation:
        out = []
        for row, mask in relation:
            image = self._image(mask, column)
            if image:
                out.append((row, image))
        return tuple(out)

    def of_word(self, word: Word, start: TransitionRelation | None = None) -> TransitionRelation:
        relation = identity_relation(self.graph) if start is None else start
        for symbol in word:
            if symbol not in self.column:
                return ()
            relation = self.step(relation, self.column[symbol])
            if not relation:
                return ()
        return relation


# ---------------------------------------------------------------------------
# Subset automaton of start sets
# ---------------------------------------------------------------------------
class SubsetAutomaton(BaseModel):
    """Nonempty start sets S(w) in breadth-first order, with shortest witnesses and the prepend map."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    graph: LabelledGraph
    order: tuple[int, ...]
    witness: dict[int, tuple[str, ...]]
    nonempty_witness: dict[int, tuple[str, ...]]
    transitions: dict[tuple[int, str], int]

    def sets(self) -> list[VertexSet]:
        return [VertexSet(self.graph, m) for m in self.order]

    def realized_by_nonempty_word(self) -> list[int]:
        return [m for m in self.order if m in self.nonempty_witness]


def reachable_subsets(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> SubsetAutomaton:
    engine = engine_for(g, limits)
    witness = {g.full_mask: ()}
    nonempty_witness: dict[int, tuple[str, ...]] = {}
    transitions: dict[tuple[int, str], int] = {}
    order = [g.full_mask]
    queue = deque(order)
    while queue:
        mask = queue.popleft()
        for symbol in g.alphabet.symbols:
            target = engine.prepend(mask, symbol)
            if not target:
                continue
            transitions[mask, symbol] = target
            word = (symbol, *witness[mask])
            nonempty_witness.setdefault(target, word)
            if target not in witness:
                witness[target] = word
                order.append(target)
                if len(order) > limits.state_cap:
                    raise StateCapExceeded(f"start-set exploration of {g.name!r}", limits.state_cap)
                queue.append(target)
    logger.debug("%s has %d reachable start sets", g.name, len(order))
    return SubsetAutomaton(
        graph=g, order=tuple(order), witness=witness, nonempty_witness=nonempty_witness, transitions=transitions
    )


# ---------------------------------------------------------------------------
# Transition-relation monoid
# ---------------------------------------------------------------------------
class MonoidExploration(BaseModel):
    """Live relations reachable from the identity, numbered breadth-first. ``succ[i][j]`` is the index of
    ``relations[i]·ρ(symbol j)`` or -1 when that product is empty."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    graph: LabelledGraph
    relations: tuple[TransitionRelation, ...]
    words: tuple[tuple[str, ...], ...]
    succ: tuple[tuple[int, ...], ...]
    domains: tuple[int, ...]
    keys: tuple[PredecessorClassKey, ...]

    @property
    def size(self) -> int:
        return len(self.relations)

    def eventual_labels(self, label_of: Callable[[int], Hashable]) -> dict[Hashable, int]:
        """Labels carried by a cycle of relations sharing that label, each with its first relation in BFS order.

        With the domain class as label these are the predecessor classes of right-rays; with the domain
        itself they are the start sets of right-rays.
        """
        labels = [label_of(i) for i in range(self.size)]
        inside = nx.DiGraph()
        inside.add_nodes_from(range(self.size))
        for i, row in enumerate(self.succ):
            inside.add_edges_from((i, j) for j in row if j >= 0 and labels[j] == labels[i])
        found: dict[Hashable, int] = {}
        for component in nx.strongly_connected_components(inside):
            first = min(component)
            if len(component) > 1 or inside.has_edge(first, first):
                if labels[first] not in found or first < found[labels[first]]:
                    found[labels[first]] = first
        return found


def relation_monoid(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> MonoidExploration:
    kernel = RelationKernel(g)
    identity = identity_relation(g)
    index = {identity: 0}
    relations = [identity]
    words: list[tuple[str, ...]] = [()]
    succ: list[tuple[int, ...]] = []
    i = 0
    while i < len(relations):
        row = []
        for column, symbol in enumerate(kernel.symbols):
            product = kernel.step(relations[i], column)
            if not product:
                row.append(-1)
                continue
            j = index.get(product)
            if j is None:
                j = index[product] = len(relations)
                relations.append(product)
                words.append((*words[i], symbol))
                if len(relations) > limits.relation_cap:
                    raise StateCapExceeded(f"transition monoid of {g.name!r}", limits.relation_cap)
            row.append(j)
        succ.append(tuple(row))
        i += 1
    domains = tuple(relation_domain(r) for r in relations)
    engine = engine_for(g, limits)
    engine.explore(sorted(set(domains)))
    keys = tuple(engine.class_key(d) for d in domains)
    logger.debug("transition monoid of %s has %d live relations", g.name, len(relations))
    return MonoidExploration(
        graph=g, relations=tuple(relations), words=tuple(words), succ=tuple(succ), domains=domains, keys=keys
    )


def krieger_class_witnesses(monoid: MonoidExploration) -> dict[PredecessorClassKey, int]:
    return monoid.eventual_labels(lambda i: monoid.keys[i])


def krieger_class_keys(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> set[PredecessorClassKey]:
    return set(krieger_class_witnesses(relation_monoid(g, limits)))


def ray_start_sets(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> dict[int, tuple[str, ...]]:
    """Start sets S(x⁺) of right-rays as masks, each with the word reaching its first relation."""
    monoid = relation_monoid(g, limits)
    found = monoid.eventual_labels(lambda i: monoid.domains[i])
    return {mask: monoid.words[i] for mask, i in sorted(found.items(), key=lambda item: item[1])}


# ---------------------------------------------------------------------------
# Periodic rays
# ---------------------------------------------------------------------------
def _stable_relation(g: LabelledGraph, w: Word, u: Word) -> TransitionRelation:
    if not u:
        raise InvalidRay("the repeated block of a periodic ray must be nonempty")
    kernel = RelationKernel(g)
    relation = kernel.of_word(w)
    seen = set()
    while relation not in seen:
        if not relation:
            raise InvalidRay(f"{''.join(w)}({''.join(u)})^ω is not a right-ray of {g.name!r}")
        seen.add(relation)
        relation = kernel.of_word(u, start=relation)
    return relation


def periodic_ray_start_set(g: LabelledGraph, w: Word, u: Word) -> VertexSet:
    """S(w u^ω): the vertices where a path labelled w u u u ... can start."""
    return VertexSet(g, relation_domain(_stable_relation(g, w, u)))


def periodic_ray_class(g: LabelledGraph, w: Word, u: Word, limits: Limits = DEFAULT_LIMITS) -> PredecessorClassKey:
    return engine_for(g, limits).class_key(relation_domain(_stable_relation(g, w, u)))
