"""Proper communication graph, flow-invariance harness, Condition (K) and the hereditary saturated lattice."""

from __future__ import annotations

import logging
from collections.abc import Iterable

import networkx as nx
from pydantic import BaseModel

from .config import DEFAULT_LIMITS, Limits
from .covers import CoverResult, cover_layer_histogram, krieger_cover
from .errors import CapExceeded
from .graph_core import LabelledGraph, scc, symbol_expand

logger = logging.getLogger(__name__)


class ProperCommunicationGraph(BaseModel):
    """Cyclic strongly connected components with reachability arcs.

    ``arcs`` is transitively closed; ``reduced_arcs`` is its transitive reduction, used for display.
    """

    nodes: tuple[tuple[str, ...], ...]
    arcs: tuple[tuple[int, int], ...]
    reduced_arcs: tuple[tuple[int, int], ...]
    root: int | None = None

    def node_label(self, i: int) -> str:
        return "{" + ",".join(self.nodes[i]) + "}"

    def to_networkx(self) -> nx.DiGraph:
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(len(self.nodes)))
        digraph.add_edges_from(self.arcs)
        return digraph


def proper_communication_graph(g: LabelledGraph) -> ProperCommunicationGraph:
    condensation = scc(g)
    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(condensation.components)))
    dag.add_edges_from(condensation.arcs)
    cyclic = [i for i, flag in enumerate(condensation.cyclic) if flag]
    renumber = {old: new for new, old in enumerate(cyclic)}
    arcs = sorted(
        (renumber[i], renumber[j]) for i in cyclic for j in nx.descendants(dag, i) if condensation.cyclic[j]
    )
    closure = nx.DiGraph()
    closure.add_nodes_from(range(len(cyclic)))
    closure.add_edges_from(arcs)
    reduced = sorted(nx.transitive_reduction(closure).edges)
    tops = [n for n in closure if closure.in_degree(n) == 0]
    root = tops[0] if len(tops) == 1 else None
    return ProperCommunicationGraph(
        nodes=tuple(condensation.components[i] for i in cyclic),
        arcs=tuple(arcs),
        reduced_arcs=tuple(reduced),
        root=root,
    )


def pcg_invariant(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> ProperCommunicationGraph:
    return proper_communication_graph(krieger_cover(g, limits).graph)


def dag_isomorphic(p1, p2) -> bool:
    """Isomorphism of the transitive closures of two acyclic digraphs (anything with ``to_networkx``)."""
    d1 = nx.transitive_closure_dag(p1.to_networkx())
    d2 = nx.transitive_closure_dag(p2.to_networkx())
    if d1.number_of_nodes() != d2.number_of_nodes() or d1.number_of_edges() != d2.number_of_edges():
        return False
    if sorted(d for _, d in d1.out_degree) != sorted(d for _, d in d2.out_degree):
        return False
    return nx.is_isomorphic(d1, d2)


def fresh_symbol(g: LabelledGraph, preferred: str = "•") -> str:
    candidate, n = preferred, 0
    while candidate in g.alphabet:
        n += 1
        candidate = f"{preferred}{n}"
    return candidate


def flow_expand_check(g: LabelledGraph, a: str, limits: Limits = DEFAULT_LIMITS) -> bool:
    expanded = symbol_expand(g, a, fresh_symbol(g))
    return dag_isomorphic(pcg_invariant(g, limits), pcg_invariant(expanded, limits))


def condition_K(g: LabelledGraph) -> bool:
    """True iff no cyclic strongly connected component is a single simple cycle."""
    condensation = scc(g)
    for component, cyclic in zip(condensation.components, condensation.cyclic, strict=True):
        if not cyclic:
            continue
        members = set(component)
        internal = sum(1 for e in g.edges if e.src in members and e.dst in members)
        if internal == len(component):
            return False
    return True


# ---------------------------------------------------------------------------
# Hereditary saturated subsets
# ---------------------------------------------------------------------------
class IdealLattice(BaseModel):
    """Hereditary saturated vertex sets ordered by inclusion, smallest first, with the Hasse arcs (i below j)."""

    elements: tuple[frozenset[str], ...]
    hasse: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.elements)

    def to_networkx(self) -> nx.DiGraph:
        digraph = nx.DiGraph()
        digraph.add_nodes_from(range(self.count))
        digraph.add_edges_from(self.hasse)
        return digraph


def is_hereditary(g: LabelledGraph, h: Iterable[str]) -> bool:
    h = set(h)
    return all(e.dst in h for e in g.edges if e.src in h)


def saturation(g: LabelledGraph, h: Iterable[str]) -> frozenset[str]:
    h = set(h)
    targets: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        targets[e.src].add(e.dst)
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v not in h and targets[v] and targets[v] <= h:
                h.add(v)
                changed = True
    return frozenset(h)


def hereditary_saturated_subsets(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> IdealLattice:
    if len(g.vertices) > limits.ideal_vertex_cap:
        raise CapExceeded(f"ideal lattice of {g.name!r} ({len(g.vertices)} vertices)", limits.ideal_vertex_cap)
    condensation = scc(g)
    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(condensation.components)))
    dag.add_edges_from(condensation.arcs)
    # sinks first, so a component is decided after everything it reaches
    order = list(reversed(list(nx.topological_sort(dag))))
    hereditary: list[frozenset[str]] = []

    def descend(position: int, chosen: frozenset[int]) -> None:
        if position == len(order):
            hereditary.append(frozenset(v for c in chosen for v in condensation.components[c]))
            return
        component = order[position]
        descend(position + 1, chosen)
        if all(s in chosen for s in dag.successors(component)):
            descend(position + 1, chosen | {component})

    descend(0, frozenset())
    elements = sorted(
        (h for h in hereditary if saturation(g, h) == h),
        key=lambda h: (len(h), sorted(g.index[v] for v in h)),
    )
    hasse = []
    for i, small in enumerate(elements):
        for j, big in enumerate(elements):
            if small < big and not any(small < mid < big for mid in elements):
                hasse.append((i, j))
    logger.debug("%s has %d hereditary sets, %d saturated", g.name, len(hereditary), len(elements))
    return IdealLattice(elements=tuple(elements), hasse=tuple(hasse))


def pcg_summary(
    p: ProperCommunicationGraph, lattice: IdealLattice | None = None, cover: CoverResult | None = None
) -> dict:
    return {
        "node_count": len(p.nodes),
        "arc_count": len(p.arcs),
        "root": p.node_label(p.root) if p.root is not None else None,
        "layer_histogram": cover_layer_histogram(cover) if cover is not None else None,
        "ideal_count": lattice.count if lattice is not None else None,
    }
