"""Finite labelled directed multigraphs, their structural predicates and structural transforms."""

from __future__ import annotations

import logging
import re
from collections import Counter
from collections.abc import Iterable, Iterator
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import networkx as nx
from networkx.algorithms.isomorphism import categorical_multiedge_match
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .errors import (
    AlphabetOverlap,
    EmptyAfterTrim,
    EmptyInducedAlphabet,
    FreshSymbolClash,
    GraphFormatError,
    GraphMismatch,
    InvalidGraph,
    PredSepRequiresEssential,
    SoficShiftError,
)

logger = logging.getLogger(__name__)


class DomainModel(BaseModel):
    """Model whose validators raise soficshift errors. Those errors surface as themselves instead of being
    folded into a pydantic ``ValidationError``."""

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except ValidationError as error:
            for detail in error.errors():
                cause = detail.get("ctx", {}).get("error")
                if isinstance(cause, SoficShiftError):
                    raise cause from None
            raise


def is_token(text: str) -> bool:
    return bool(text) and "#" not in text and not any(ch.isspace() for ch in text)


class Edge(NamedTuple):
    src: str
    label: str
    dst: str


class Alphabet(DomainModel):
    """Finite alphabet. Symbols are kept sorted, which is the tie-breaking order everywhere."""

    model_config = ConfigDict(frozen=True)

    symbols: tuple[str, ...]

    @field_validator("symbols")
    @classmethod
    def _check_symbols(cls, symbols: tuple[str, ...]) -> tuple[str, ...]:
        if not symbols:
            raise InvalidGraph("alphabet must be nonempty")
        duplicates = [s for s, n in Counter(symbols).items() if n > 1]
        if duplicates:
            raise InvalidGraph(f"duplicate symbols in alphabet: {', '.join(duplicates)}")
        for symbol in symbols:
            if not is_token(symbol):
                raise InvalidGraph(f"symbol {symbol!r} must be nonempty without whitespace or '#'")
        return tuple(sorted(symbols))

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols

    def __len__(self) -> int:
        return len(self.symbols)


class LabelledGraph(DomainModel):
    model_config = ConfigDict(frozen=True)

    name: str = "g"
    alphabet: Alphabet
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    @field_validator("edges")
    @classmethod
    def _sort_edges(cls, edges: tuple[Edge, ...]) -> tuple[Edge, ...]:
        return tuple(sorted(Edge(*e) for e in edges))

    @model_validator(mode="after")
    def _check_structure(self) -> LabelledGraph:
        if not self.vertices:
            raise InvalidGraph("a graph needs at least one vertex")
        names = set(self.vertices)
        if len(names) != len(self.vertices):
            raise InvalidGraph("vertex names must be unique")
        for v in self.vertices:
            if not is_token(v):
                raise InvalidGraph(f"vertex name {v!r} must be nonempty without whitespace or '#'")
        for edge in self.edges:
            if edge.src not in names or edge.dst not in names:
                raise InvalidGraph(f"edge {edge.src} {edge.label} {edge.dst} uses an undeclared vertex")
            if edge.label not in self.alphabet:
                raise InvalidGraph(f"edge label {edge.label!r} is not in the alphabet")
        for edge, count in Counter(self.edges).items():
            if count > 1:
                raise InvalidGraph(f"duplicate edge {edge.src} {edge.label} {edge.dst}")
        unused = set(self.alphabet.symbols) - {e.label for e in self.edges}
        if unused:
            raise InvalidGraph(f"alphabet symbols labelling no edge: {', '.join(sorted(unused))}")
        return self

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[str, str, str]], name: str = "g", vertices: Iterable[str] = ()
    ) -> LabelledGraph:
        """Build a graph whose alphabet is the set of labels used and whose vertices are declared in order of
        appearance (after any explicitly listed ``vertices``)."""
        edges = [Edge(*e) for e in edges]
        order: dict[str, None] = dict.fromkeys(vertices)
        for edge in edges:
            order.setdefault(edge.src)
            order.setdefault(edge.dst)
        labels = sorted({e.label for e in edges})
        if not labels:
            raise EmptyInducedAlphabet(f"graph {name!r} has no edges, so it presents no shift")
        return cls(name=name, alphabet=Alphabet(symbols=tuple(labels)), vertices=tuple(order), edges=tuple(edges))

    # ---------------------------------------------------------------------------
    # Indexing helpers shared by the bitset kernels
    # ---------------------------------------------------------------------------
    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.vertices)) - 1

    @cached_property
    def sources_into(self) -> dict[str, tuple[int, ...]]:
        """Per symbol a and vertex v, the bitmask of sources of a-edges ending in v."""
        table = {a: [0] * len(self.vertices) for a in self.alphabet.symbols}
        for edge in self.edges:
            table[edge.label][self.index[edge.dst]] |= 1 << self.index[edge.src]
        return {a: tuple(rows) for a, rows in table.items()}

    @cached_property
    def targets_from(self) -> dict[str, tuple[int, ...]]:
        """Per symbol a and vertex u, the bitmask of targets of a-edges leaving u."""
        table = {a: [0] * len(self.vertices) for a in self.alphabet.symbols}
        for edge in self.edges:
            table[edge.label][self.index[edge.src]] |= 1 << self.index[edge.dst]
        return {a: tuple(rows) for a, rows in table.items()}

    def vertex_set(self, members: VertexSet | Iterable[str] | int) -> VertexSet:
        if isinstance(members, VertexSet):
            members.require_graph(self)
            return members
        if isinstance(members, int):
            if members & ~self.full_mask:
                raise GraphMismatch(f"mask {members:#x} has bits outside graph {self.name!r}")
            return VertexSet(self, members)
        mask = 0
        for name in members:
            if name not in self.index:
                raise GraphMismatch(f"vertex {name!r} is not in graph {self.name!r}")
            mask |= 1 << self.index[name]
        return VertexSet(self, mask)

    def all_vertices(self) -> VertexSet:
        return VertexSet(self, self.full_mask)

    def to_networkx(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph(name=self.name)
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            graph.add_edge(edge.src, edge.dst, label=edge.label)
        return graph


class VertexSet:
    """A set of vertices of one specific graph, stored as a bitmask over its vertex list."""

    __slots__ = ("graph", "mask")

    def __init__(self, graph: LabelledGraph, mask: int):
        self.graph = graph
        self.mask = mask

    def require_graph(self, graph: LabelledGraph) -> None:
        if self.graph is not graph and self.graph != graph:
            raise GraphMismatch(f"vertex set belongs to graph {self.graph.name!r}, not {graph.name!r}")

    def _combine(self, other: VertexSet) -> LabelledGraph:
        other.require_graph(self.graph)
        return self.graph

    def __or__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self._combine(other), self.mask | other.mask)

    def __and__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self._combine(other), self.mask & other.mask)

    def __sub__(self, other: VertexSet) -> VertexSet:
        return VertexSet(self._combine(other), self.mask & ~other.mask)

    def __iter__(self) -> Iterator[str]:
        return (v for i, v in enumerate(self.graph.vertices) if self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, name: object) -> bool:
        i = self.graph.index.get(name)  # type: ignore[arg-type]
        return i is not None and bool(self.mask >> i & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.mask == other.mask and (self.graph is other.graph or self.graph == other.graph)

    def __hash__(self) -> int:
        return hash(self.mask)

    def names(self) -> tuple[str, ...]:
        return tuple(self)

    def label(self) -> str:
        return "{" + ",".join(self) + "}"

    def __repr__(self) -> str:
        return f"VertexSet({self.label()})"


def mask_label(graph: LabelledGraph, mask: int) -> str:
    return VertexSet(graph, mask).label()


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------
class GraphPredicates(BaseModel):
    left_resolving: bool
    right_resolving: bool
    essential: bool
    irreducible_graph: bool
    predecessor_separated: bool


def is_left_resolving(g: LabelledGraph) -> bool:
    return all(n == 1 for n in Counter((e.dst, e.label) for e in g.edges).values())


def is_right_resolving(g: LabelledGraph) -> bool:
    return all(n == 1 for n in Counter((e.src, e.label) for e in g.edges).values())


def is_essential(g: LabelledGraph) -> bool:
    sources = {e.src for e in g.edges}
    targets = {e.dst for e in g.edges}
    return all(v in sources and v in targets for v in g.vertices)


def is_irreducible_graph(g: LabelledGraph) -> bool:
    return bool(g.edges) and len(scc(g).components) == 1


def is_predecessor_separated(g: LabelledGraph) -> bool:
    if not is_essential(g):
        raise PredSepRequiresEssential(f"predecessor separation is only defined for essential graphs ({g.name!r})")
    from .lang_engine import engine_for

    engine = engine_for(g)
    keys = [engine.class_key(1 << i) for i in range(len(g.vertices))]
    return len(set(keys)) == len(keys)


def predicates(g: LabelledGraph) -> GraphPredicates:
    return GraphPredicates(
        left_resolving=is_left_resolving(g),
        right_resolving=is_right_resolving(g),
        essential=is_essential(g),
        irreducible_graph=is_irreducible_graph(g),
        predecessor_separated=is_predecessor_separated(g),
    )


# ---------------------------------------------------------------------------
# Structural transforms
# ---------------------------------------------------------------------------
def _rebuild(g: LabelledGraph, keep: set[str], name: str | None = None) -> LabelledGraph:
    edges = [e for e in g.edges if e.src in keep and e.dst in keep]
    return LabelledGraph.from_edges(edges, name=name or g.name, vertices=[v for v in g.vertices if v in keep])


def trim_to_essential(g: LabelledGraph) -> LabelledGraph:
    alive = set(g.vertices)
    while True:
        live_edges = [e for e in g.edges if e.src in alive and e.dst in alive]
        emitting = {e.src for e in live_edges}
        receiving = {e.dst for e in live_edges}
        survivors = alive & emitting & receiving
        if survivors == alive:
            break
        alive = survivors
    if not alive:
        raise EmptyAfterTrim(f"no vertex of {g.name!r} lies on a bi-infinite path")
    if len(alive) == len(g.vertices):
        return g
    logger.debug("trimmed %s from %d to %d vertices", g.name, len(g.vertices), len(alive))
    return _rebuild(g, alive)


def transpose(g: LabelledGraph) -> LabelledGraph:
    name = g.name[:-2] if g.name.endswith("^T") else g.name + "^T"
    edges = tuple(Edge(e.dst, e.label, e.src) for e in g.edges)
    return LabelledGraph(name=name, alphabet=g.alphabet, vertices=g.vertices, edges=edges)


def symbol_expand(g: LabelledGraph, a: str, fresh: str) -> LabelledGraph:
    """Replace every ``u -a-> v`` by ``u -a-> m -fresh-> v`` with a new midpoint ``m`` per edge."""
    if a not in g.alphabet:
        raise InvalidGraph(f"symbol {a!r} is not in the alphabet of {g.name!r}")
    if fresh in g.alphabet or not is_token(fresh):
        raise FreshSymbolClash(f"{fresh!r} is not a fresh symbol for {g.name!r}")
    taken = set(g.vertices)
    vertices = list(g.vertices)
    edges: list[Edge] = []
    for edge in g.edges:
        if edge.label != a:
            edges.append(edge)
            continue
        midpoint = f"{edge.src}~{a}~{edge.dst}"
        while midpoint in taken:
            midpoint += "'"
        taken.add(midpoint)
        vertices.append(midpoint)
        edges += [Edge(edge.src, a, midpoint), Edge(midpoint, fresh, edge.dst)]
    return LabelledGraph.from_edges(edges, name=f"{g.name}[{a}->{a}{fresh}]", vertices=vertices)


def induced_subgraph(g: LabelledGraph, s: VertexSet | Iterable[str]) -> LabelledGraph:
    s = g.vertex_set(s)
    if not s:
        raise InvalidGraph("induced subgraph needs a nonempty vertex set")
    keep = set(s)
    if not any(e.src in keep and e.dst in keep for e in g.edges):
        raise EmptyInducedAlphabet(f"no edge of {g.name!r} survives inside {s.label()}")
    return _rebuild(g, keep)


def delete_vertices(g: LabelledGraph, doomed: Iterable[str]) -> LabelledGraph:
    survivors = g.all_vertices() - g.vertex_set(doomed)
    if not survivors:
        raise EmptyAfterTrim(f"deleting every vertex of {g.name!r} leaves the empty shift")
    return induced_subgraph(g, survivors)


def disjoint_union(g1: LabelledGraph, g2: LabelledGraph) -> LabelledGraph:
    shared = set(g1.alphabet.symbols) & set(g2.alphabet.symbols)
    if shared:
        raise AlphabetOverlap(f"alphabets overlap in {', '.join(sorted(shared))}")
    edges = [(f"1:{e.src}", e.label, f"1:{e.dst}") for e in g1.edges]
    edges += [(f"2:{e.src}", e.label, f"2:{e.dst}") for e in g2.edges]
    vertices = [f"1:{v}" for v in g1.vertices] + [f"2:{v}" for v in g2.vertices]
    return LabelledGraph.from_edges(edges, name=f"{g1.name}+{g2.name}", vertices=vertices)


def rename_vertices(g: LabelledGraph, mapping: dict[str, str], name: str | None = None) -> LabelledGraph:
    edges = [(mapping[e.src], e.label, mapping[e.dst]) for e in g.edges]
    return LabelledGraph.from_edges(edges, name=name or g.name, vertices=[mapping[v] for v in g.vertices])


def labelled_isomorphic(g1: LabelledGraph, g2: LabelledGraph) -> bool:
    """Labelled-graph isomorphism: a vertex bijection carrying edges to edges with equal labels."""
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    if Counter(e.label for e in g1.edges) != Counter(e.label for e in g2.edges):
        return False
    return nx.is_isomorphic(
        g1.to_networkx(), g2.to_networkx(), edge_match=categorical_multiedge_match("label", None)
    )


# ---------------------------------------------------------------------------
# Strongly connected components
# ---------------------------------------------------------------------------
class Condensation(BaseModel):
    """Strongly connected components ordered by least vertex index, with the deduplicated condensation arcs."""

    components: tuple[tuple[str, ...], ...]
    cyclic: tuple[bool, ...]
    arcs: tuple[tuple[int, int], ...]


def scc(g: LabelledGraph) -> Condensation:
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(len(g.vertices)))
    digraph.add_edges_from((g.index[e.src], g.index[e.dst]) for e in g.edges)
    parts = sorted((sorted(c) for c in nx.strongly_connected_components(digraph)), key=lambda c: c[0])
    owner = {v: i for i, part in enumerate(parts) for v in part}
    arcs = sorted({(owner[u], owner[v]) for u, v in digraph.edges if owner[u] != owner[v]})
    cyclic = tuple(len(part) > 1 or digraph.has_edge(part[0], part[0]) for part in parts)
    return Condensation(
        components=tuple(tuple(g.vertices[i] for i in part) for part in parts),
        cyclic=cyclic,
        arcs=tuple(arcs),
    )


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------
def parse_graph(text: str, name: str = "g") -> LabelledGraph:
    declared: list[str] = []
    edges: list[Edge] = []
    seen_construct = False
    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if len(tokens) == 2 and tokens[0] == "graph":
            if seen_construct:
                raise GraphFormatError("'graph' must be the first construct", line_number)
            name = tokens[1]
        elif len(tokens) == 2 and tokens[0] == "vertex":
            declared.append(tokens[1])
        elif len(tokens) == 3:
            edges.append(Edge(*tokens))
        else:
            raise GraphFormatError(f"expected '<src> <label> <dst>', got {raw.strip()!r}", line_number)
        seen_construct = True
    if len(set(declared)) != len(declared):
        raise GraphFormatError("a vertex is declared twice")
    if not edges:
        raise GraphFormatError("the graph has no edges")
    try:
        return LabelledGraph.from_edges(edges, name=name, vertices=declared)
    except InvalidGraph as error:
        raise GraphFormatError(str(error)) from error


def serialize_graph(g: LabelledGraph) -> str:
    lines = [f"graph {g.name}"]
    lines += [f"vertex {v}" for v in g.vertices]
    lines += [f"{e.src} {e.label} {e.dst}" for e in g.edges]
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> LabelledGraph:
    path = Path(path)
    name = re.sub(r"[\s#]+", "_", path.stem) or "g"
    return parse_graph(path.read_text(encoding="utf-8"), name=name)
