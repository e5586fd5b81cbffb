"""Graphviz DOT text for presentations, covers, proper communication graphs, ideal lattices and DAGs."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterator

from .constructions import RootedDag
from .covers import CoverResult
from .graph_core import LabelledGraph
from .invariants import IdealLattice, ProperCommunicationGraph


def _quote(text: str) -> str:
    return '"{}"'.format(text.replace("\\", "\\\\").replace('"', r"\""))


def _labelled_graph_lines(g: LabelledGraph, cover: CoverResult | None) -> Iterator[str]:
    yield f"digraph {_quote(g.name)} {{"
    yield "  rankdir=TB;"
    yield "  node [shape=box];"
    for v in g.vertices:
        label = cover.vertices[v].display_name if cover is not None and v in cover.vertices else v
        yield f"  {_quote(v)} [label={_quote(label)}];"
    if cover is not None:
        bands: dict[int, list[str]] = defaultdict(list)
        for v in g.vertices:
            layer = cover.vertices[v].layer if v in cover.vertices else None
            if layer is not None:
                bands[layer].append(v)
        for layer, members in sorted(bands.items()):
            yield f"  subgraph {_quote(f'layer{layer}')} {{ rank=same; {' '.join(_quote(m) for m in members)} }}"
    for edge in g.edges:
        yield f"  {_quote(edge.src)} -> {_quote(edge.dst)} [label={_quote(edge.label)}];"
    yield "}"


def _dag_lines(name: str, labels: list[str], arcs: list[tuple[int, int]]) -> Iterator[str]:
    yield f"digraph {_quote(name)} {{"
    yield "  node [shape=ellipse];"
    for i, label in enumerate(labels):
        yield f"  n{i} [label={_quote(label)}];"
    for i, j in arcs:
        yield f"  n{i} -> n{j};"
    yield "}"


def emit_dot(item: LabelledGraph | CoverResult | ProperCommunicationGraph | IdealLattice | RootedDag) -> str:
    """DOT text with labelled edges; cover vertices are named by their union decomposition and ranked by layer.

    Proper communication graphs and ideal lattices are drawn with their reduced arcs.
    """
    match item:
        case CoverResult():
            lines = _labelled_graph_lines(item.graph, item)
        case LabelledGraph():
            lines = _labelled_graph_lines(item, None)
        case ProperCommunicationGraph():
            labels = [item.node_label(i) for i in range(len(item.nodes))]
            lines = _dag_lines("pcg", labels, list(item.reduced_arcs))
        case IdealLattice():
            labels = ["{" + ",".join(sorted(h)) + "}" for h in item.elements]
            lines = _dag_lines("ideals", labels, list(item.hasse))
        case RootedDag():
            index = {v: i for i, v in enumerate(item.vertices)}
            lines = _dag_lines(item.name, list(item.vertices), [(index[s], index[d]) for s, d in item.arcs])
        case _:
            raise TypeError(f"cannot render {type(item).__name__} as DOT")
    return "\n".join(lines) + "\n"
