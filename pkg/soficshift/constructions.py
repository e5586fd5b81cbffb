"""Presentations built to order: rooted DAG realizations, charge-constrained shifts and named fixtures.

``realize_pcg`` turns a rooted acyclic digraph E into an irreducible left- and right-resolving graph
whose left Krieger cover has E (transitively closed) as its proper communication graph. Vertex v of E
is blown up into ``n(v) = 2**l(v)`` copies, where l(v) is the length of the longest path from the root.
"""

from __future__ import annotations

import logging
import random
from enum import Enum
from pathlib import Path

import networkx as nx
from pydantic import ConfigDict, model_validator

from .errors import InvalidDag, InvalidGraph, UnknownFixture
from .graph_core import DomainModel, LabelledGraph, is_token, parse_graph

logger = logging.getLogger(__name__)


class RootedDag(DomainModel):
    """Acyclic digraph in which the root reaches every vertex."""

    model_config = ConfigDict(frozen=True)

    name: str = "dag"
    vertices: tuple[str, ...]
    arcs: tuple[tuple[str, str], ...]
    root: str

    @model_validator(mode="after")
    def _check_rooted(self) -> RootedDag:
        names = set(self.vertices)
        if len(names) != len(self.vertices):
            raise InvalidDag("vertex names must be unique")
        for v in self.vertices:
            if not is_token(v):
                raise InvalidDag(f"vertex name {v!r} must be nonempty without whitespace or '#'")
        if self.root not in names:
            raise InvalidDag(f"root {self.root!r} is not a vertex")
        for src, dst in self.arcs:
            if src not in names or dst not in names:
                raise InvalidDag(f"arc {src} -> {dst} uses an undeclared vertex")
            if src == dst:
                raise InvalidDag(f"loop at {src}")
        if len(set(self.arcs)) != len(self.arcs):
            raise InvalidDag("duplicate arc")
        digraph = self.to_networkx()
        if not nx.is_directed_acyclic_graph(digraph):
            raise InvalidDag(f"{self.name!r} has a cycle")
        stranded = names - {self.root} - nx.descendants(digraph, self.root)
        if stranded:
            raise InvalidDag(f"root {self.root!r} does not reach {', '.join(sorted(stranded))}")
        return self

    @classmethod
    def from_arcs(cls, root: str, arcs: list[tuple[str, str]], name: str = "dag") -> RootedDag:
        order: dict[str, None] = {root: None}
        for src, dst in arcs:
            order.setdefault(src)
            order.setdefault(dst)
        return cls(name=name, vertices=tuple(order), arcs=tuple(arcs), root=root)

    def to_networkx(self) -> nx.DiGraph:
        digraph = nx.DiGraph(name=self.name)
        digraph.add_nodes_from(self.vertices)
        digraph.add_edges_from(self.arcs)
        return digraph

    def sinks(self) -> list[str]:
        emitting = {src for src, _ in self.arcs}
        return [v for v in self.vertices if v not in emitting]

    def depth(self) -> dict[str, int]:
        """Length of the longest path from the root to each vertex."""
        digraph = self.to_networkx()
        depth = dict.fromkeys(self.vertices, 0)
        for v in nx.topological_sort(digraph):
            for w in digraph.successors(v):
                depth[w] = max(depth[w], depth[v] + 1)
        return depth


def transitive_closure_dag(dag: RootedDag) -> RootedDag:
    closure = nx.transitive_closure_dag(dag.to_networkx())
    position = {v: i for i, v in enumerate(dag.vertices)}
    arcs = sorted(closure.edges, key=lambda arc: (position[arc[0]], position[arc[1]]))
    return RootedDag(name=dag.name, vertices=dag.vertices, arcs=tuple(arcs), root=dag.root)


# ---------------------------------------------------------------------------
# Realizing a DAG as a proper communication graph
# ---------------------------------------------------------------------------
class ReturnEdges(str, Enum):
    SINKS_ONLY = "sinks"
    ALL_NON_ROOT = "all"


def copy_name(v: str, i: int) -> str:
    return f"{v}_{i}"


def realize_pcg(
    dag: RootedDag, return_edges: ReturnEdges | str = ReturnEdges.ALL_NON_ROOT, doubled_loops: bool = False
) -> LabelledGraph:
    """Irreducible left- and right-resolving presentation whose Krieger cover has ``dag`` as its PCG.

    Copy ``u_i`` sends an edge labelled ``a_u>v^k`` to copy ``v_{(i-1)m+k}`` for every closure arc
    (u, v), where m = n(v)/n(u), so every copy of v receives exactly one edge of each such label.
    Return edges to ``r_1`` carry unique labels ``ret_v_i``; they leave every copy of every sink, and with
    ``ReturnEdges.ALL_NON_ROOT`` every non-root copy as well.
    """
    return_edges = ReturnEdges(return_edges)
    closure = transitive_closure_dag(dag)
    depth = dag.depth()
    copies = {v: 2 ** depth[v] for v in dag.vertices}
    vertices = [copy_name(v, i) for v in dag.vertices for i in range(1, copies[v] + 1)]
    edges = []
    for v in dag.vertices:
        for i in range(1, copies[v] + 1):
            edges.append((copy_name(v, i), f"a_{v}", copy_name(v, i)))
            if doubled_loops:
                edges.append((copy_name(v, i), f"a_{v}'", copy_name(v, i)))
    for u, v in closure.arcs:
        fan = copies[v] // copies[u]
        for i in range(1, copies[u] + 1):
            for k in range(1, fan + 1):
                edges.append((copy_name(u, i), f"a_{u}>{v}^{k}", copy_name(v, (i - 1) * fan + k)))
    returning = set(dag.sinks())
    if return_edges is ReturnEdges.ALL_NON_ROOT:
        returning |= set(dag.vertices) - {dag.root}
    target = copy_name(dag.root, 1)
    for v in dag.vertices:
        if v in returning:
            edges += [(copy_name(v, i), f"ret_{v}_{i}", target) for i in range(1, copies[v] + 1)]
    kind = "ideal" if doubled_loops else "pcg"
    logger.debug("realized %s as %d vertices and %d edges", dag.name, len(vertices), len(edges))
    return LabelledGraph.from_edges(edges, name=f"{kind}_{dag.name}", vertices=vertices)


def realize_ideal_lattice(dag: RootedDag, return_edges: ReturnEdges | str = ReturnEdges.ALL_NON_ROOT) -> LabelledGraph:
    """The DAG realization with two loops per copy, so its Krieger cover satisfies Condition (K)."""
    return realize_pcg(dag, return_edges=return_edges, doubled_loops=True)


# ---------------------------------------------------------------------------
# Standard shifts
# ---------------------------------------------------------------------------
def charge_constrained(c: int) -> LabelledGraph:
    if c < 1:
        raise InvalidGraph(f"charge bound must be at least 1, got {c}")
    edges = [(str(i), "+", str(i + 1)) for i in range(c)]
    edges += [(str(i + 1), "-", str(i)) for i in range(c)]
    return LabelledGraph.from_edges(edges, name=f"charge{c}", vertices=[str(i) for i in range(c + 1)])


def even_shift() -> LabelledGraph:
    return fixture("even_shift")


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------
FIXTURES: dict[str, str] = {
    "one_loop": """\
graph one_loop
v a v
""",
    "even_shift": """\
graph even_shift
vertex A
vertex B
A 0 B
A 1 A
B 0 A
""",
    "golden_mean": """\
graph golden_mean
vertex A
vertex B
A 0 A
A 0 B
B 1 A
""",
    "3cc_fischer": """\
graph 3cc_fischer
vertex u
vertex v
vertex w
vertex x
u + v
v + w
v - u
w + x
w - v
x - w
""",
    "3cc_krieger": """\
graph 3cc_krieger
# first band: the Fischer cover
vertex Pu
vertex Pv
vertex Pw
vertex Px
# second band: unions of two neighbours
vertex Puv
vertex Pvw
vertex Pwx
# third band
vertex Puvw
vertex Pvwx
Pu + Puv
Pu + Pv
Puv + Puvw
Puv + Pvw
Puvw + Pvwx
Pv + Pw
Pv - Pu
Pvw + Pwx
Pvw - Puv
Pvwx - Puvw
Pw + Px
Pw - Pv
Pwx - Pvw
Pwx - Pvwx
Px - Pw
Px - Pwx
""",
    "gfc_justifying": """\
graph gfc_justifying
vertex O
vertex P
vertex P1
vertex P2
vertex P'
vertex h1
vertex h2
vertex h3
vertex v2
O c P'
O d P
O d P1
O e P
O e P2
O f O
P b P'
P' a P'
P' j v2
P1 b h1
P2 b h2
h1 a h1
h1 g h3
h2 a h2
h2 h h3
h3 i h3
v2 k v2
""",
    "gfc_not_minimal": """\
graph gfc_not_minimal
vertex O
vertex P
vertex P1
vertex P2
vertex P'
vertex h1
vertex h2
vertex h3
O c P'
O d P
O d P1
O e P
O e P2
O f O
P b P'
P' a P'
P1 b h1
P2 b h2
h1 a h1
h1 g h3
h2 a h2
h2 h h3
h3 i h3
""",
    "2inv_left_fischer": """\
graph 2inv_left_fischer
vertex u
vertex v
vertex w
vertex x
vertex y
u a u
u a' u
u e w
v a v
v a' v
v c w
w b v
w b y
w g x
x f u
x f y
y a y
y a' y
y d w
""",
    "2inv_right_fischer": """\
graph 2inv_right_fischer
vertex u'
vertex v'
vertex w'
vertex x'
u' a u'
u' a' u'
u' d w'
u' e w'
v' a v'
v' a' v'
v' c w'
v' d w'
w' b v'
w' g x'
x' f u'
""",
    "ex52_fischer": """\
graph ex52_fischer
vertex r_1
vertex x_1
vertex x_2
vertex y_1
vertex y_2
vertex z_1
vertex z_2
vertex z_3
vertex z_4
r_1 a_r r_1
r_1 a_r>x^1 x_1
r_1 a_r>x^2 x_2
r_1 a_r>y^1 y_1
r_1 a_r>y^2 y_2
r_1 a_r>z^1 z_1
r_1 a_r>z^2 z_2
r_1 a_r>z^3 z_3
r_1 a_r>z^4 z_4
x_1 a_x x_1
x_1 ret_x_1 r_1
x_2 a_x x_2
x_2 ret_x_2 r_1
y_1 a_y y_1
y_1 a_y>z^1 z_1
y_1 a_y>z^2 z_2
y_1 ret_y_1 r_1
y_2 a_y y_2
y_2 a_y>z^1 z_3
y_2 a_y>z^2 z_4
y_2 ret_y_2 r_1
z_1 a_z z_1
z_1 ret_z_1 r_1
z_2 a_z z_2
z_2 ret_z_2 r_1
z_3 a_z z_3
z_3 ret_z_3 r_1
z_4 a_z z_4
z_4 ret_z_4 r_1
""",
    "reducible_two_loops": """\
graph reducible_two_loops
vertex P1
vertex P2
P1 0 P1
P1 1 P2
P2 0 P2
""",
    "sync_irreducible": """\
graph sync_irreducible
vertex u
vertex v
vertex w
u a u
u d w
v a v
v c u
w b u
w b v
""",
    "condstar_failing": """\
graph condstar_failing
vertex s
vertex m1
vertex m2
vertex m3
vertex b1
vertex b2
b1 h b1
b2 k b2
m1 a m1
m1 b b1
m2 a m2
m2 b b2
m3 a m3
s e s
s g1 m1
s g2 m2
s g3 m3
""",
    "stranded_pastset": """\
graph stranded_pastset
vertex p
vertex q
vertex r
vertex r'
p x r
p y p
q x r'
q z q
r u r
r' v r'
""",
}

DAG_FIXTURES: dict[str, str] = {
    "ex52": """\
dag ex52
root r
arc r x
arc r y
arc r z
arc y z
""",
}


def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def fixture(name: str) -> LabelledGraph:
    if name not in FIXTURES:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
    return parse_graph(FIXTURES[name], name=name)


def dag_fixture(name: str) -> RootedDag:
    if name not in DAG_FIXTURES:
        raise UnknownFixture(f"unknown DAG fixture {name!r}; known: {', '.join(sorted(DAG_FIXTURES))}")
    return parse_dag(DAG_FIXTURES[name], name=name)


# ---------------------------------------------------------------------------
# DAG text format
# ---------------------------------------------------------------------------
def parse_dag(text: str, name: str = "dag") -> RootedDag:
    root: str | None = None
    declared: list[str] = []
    arcs: list[tuple[str, str]] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        match tokens:
            case ["dag", dag_name]:
                name = dag_name
            case ["root", vertex]:
                if root is not None:
                    raise InvalidDag(f"line {line_number}: a second root {vertex!r}")
                root = vertex
            case ["vertex", vertex]:
                declared.append(vertex)
            case ["arc", src, dst]:
                arcs.append((src, dst))
            case _:
                raise InvalidDag(f"line {line_number}: expected 'root <v>' or 'arc <src> <dst>', got {raw.strip()!r}")
    if root is None:
        raise InvalidDag("missing 'root <name>' line")
    order: dict[str, None] = {root: None}
    order.update(dict.fromkeys(declared))
    for src, dst in arcs:
        order.setdefault(src)
        order.setdefault(dst)
    return RootedDag(name=name, vertices=tuple(order), arcs=tuple(arcs), root=root)


def serialize_dag(dag: RootedDag) -> str:
    lines = [f"dag {dag.name}", f"root {dag.root}"]
    lines += [f"vertex {v}" for v in dag.vertices if v != dag.root]
    lines += [f"arc {src} {dst}" for src, dst in dag.arcs]
    return "\n".join(lines) + "\n"


def read_dag(path: str | Path) -> RootedDag:
    path = Path(path)
    return parse_dag(path.read_text(encoding="utf-8"), name=path.stem)


def random_rooted_dag(rng: random.Random, max_vertices: int = 5, extra_arc_chance: float = 0.3) -> RootedDag:
    """Random rooted DAG on 1..max_vertices vertices; each vertex gets a parent among the earlier ones."""
    count = rng.randint(1, max_vertices)
    vertices = ["r"] + [f"v{j}" for j in range(1, count)]
    arcs = []
    for j in range(1, count):
        parent = rng.randrange(j)
        for i in range(j):
            if i == parent or rng.random() < extra_arc_chance:
                arcs.append((vertices[i], vertices[j]))
    return RootedDag(name=f"random{count}", vertices=tuple(vertices), arcs=tuple(arcs), root="r")
