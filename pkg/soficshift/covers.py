"""Past set, left Krieger, left Fischer, generalized left Fischer and multiplicity set covers.

Every cover vertex is a union-equivalence class of start sets of the base presentation g, carried by a
representative vertex set of g. An edge labelled a runs from class(aU) to class(U) whenever aU is
nonempty, where U is the representative of the target.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from enum import Enum
from itertools import combinations

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .config import DEFAULT_LIMITS, Limits
from .errors import (
    CapExceeded,
    ConsistencyError,
    EmptyAfterTrim,
    EmptyInducedAlphabet,
    GraphMismatch,
    InvalidGraph,
    InvalidRay,
    NoCoverExists,
    NotIrreducible,
)
from .graph_core import (
    LabelledGraph,
    VertexSet,
    induced_subgraph,
    is_essential,
    is_left_resolving,
    mask_label,
    scc,
    transpose,
    trim_to_essential,
)
from .lang_engine import PredecessorClassKey, PredecessorEngine, Word, engine_for, separating_word
from .subset_dynamics import (
    krieger_class_witnesses,
    periodic_ray_class,
    ray_start_sets,
    reachable_subsets,
    relation_monoid,
)

logger = logging.getLogger(__name__)


class CoverKind(str, Enum):
    FISCHER = "fischer"
    GFC = "gfc"
    KRIEGER = "krieger"
    PASTSET = "pastset"
    MULTIPLICITY = "multiplicity"


class VertexFlags(BaseModel):
    krieger: bool = False
    non_decomposable: bool = False
    in_gfc: bool = False
    in_fischer_top: bool = False
    essential_part: bool = False


class CoverVertex(BaseModel):
    name: str
    class_key: PredecessorClassKey
    representative: tuple[str, ...]
    witness_word: tuple[str, ...]
    layer: int | None = None
    decomposition: tuple[str, ...] = ()
    flags: VertexFlags = Field(default_factory=VertexFlags)

    @property
    def display_name(self) -> str:
        return "∪".join(self.decomposition) if self.decomposition else self.name


class CoverResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: CoverKind
    side: str = "left"
    base: LabelledGraph
    graph: LabelledGraph
    vertices: dict[str, CoverVertex]

    def representative(self, name: str) -> VertexSet:
        return self.base.vertex_set(self.vertices[name].representative)

    def names(self) -> list[str]:
        return list(self.graph.vertices)

    def keys(self) -> set[PredecessorClassKey]:
        return {v.class_key for v in self.vertices.values()}

    def vertex_for_key(self, key: PredecessorClassKey) -> str | None:
        for name, vertex in self.vertices.items():
            if vertex.class_key == key:
                return name
        return None

    def layer_subgraph(self, layer: int) -> LabelledGraph:
        return induced_subgraph(self.graph, [n for n, v in self.vertices.items() if v.layer == layer])

    def annotations(self) -> dict:
        return {
            name: {
                "class_key": vertex.class_key.digest,
                "representative": list(vertex.representative),
                "witness_word": list(vertex.witness_word),
                "layer": vertex.layer,
                "decomposition": list(vertex.decomposition),
                "flags": vertex.flags.model_dump(),
            }
            for name, vertex in self.vertices.items()
        }


def _require_essential(g: LabelledGraph) -> None:
    if not is_essential(g):
        raise InvalidGraph(f"cover computations need an essential presentation; trim {g.name!r} first")


# ---------------------------------------------------------------------------
# Shared construction
# ---------------------------------------------------------------------------
def _assemble(
    g: LabelledGraph,
    kind: CoverKind,
    classes: list[tuple[PredecessorClassKey, int, tuple[str, ...]]],
    limits: Limits,
    flags: dict[PredecessorClassKey, VertexFlags] | None = None,
) -> CoverResult:
    """Build the cover on the given classes, each as (key, representative mask, witness word)."""
    engine = engine_for(g, limits)
    names = {key: mask_label(g, mask) for key, mask, _ in classes}
    edges = []
    for key, mask, _ in classes:
        for symbol in g.alphabet.symbols:
            source = engine.prepend(mask, symbol)
            if not source:
                continue
            source_key = engine.class_key(source)
            if source_key not in names:
                raise ConsistencyError(
                    f"{kind.value} cover of {g.name!r}: prepending {symbol} to {names[key]} leaves the vertex set"
                )
            edges.append((names[source_key], symbol, names[key]))
    order = [names[key] for key, _, _ in classes]
    graph = LabelledGraph.from_edges(edges, name=f"{kind.value}({g.name})", vertices=order)
    vertices = {
        names[key]: CoverVertex(
            name=names[key],
            class_key=key,
            representative=VertexSet(g, mask).names(),
            witness_word=witness,
            flags=(flags or {}).get(key, VertexFlags()).model_copy(),
        )
        for key, mask, witness in classes
    }
    return CoverResult(kind=kind, base=g, graph=graph, vertices=vertices)


def _verify(cover: CoverResult, limits: Limits) -> CoverResult:
    g = cover.graph
    if not is_left_resolving(g):
        raise ConsistencyError(f"{g.name} is not left-resolving")
    if is_essential(g):
        engine = engine_for(g, limits)
        keys = {engine.class_key(1 << i) for i in range(len(g.vertices))}
        if len(keys) != len(g.vertices):
            raise ConsistencyError(f"{g.name} is not predecessor-separated")
    witness = separating_word(g, cover.base, limits)
    if witness is not None:
        raise ConsistencyError(f"{g.name} does not present the shift of {cover.base.name}: {' '.join(witness)}")
    return cover


def _restrict(cover: CoverResult, keep: list[str], kind: CoverKind, limits: Limits, verify: bool = True) -> CoverResult:
    graph = cover.graph if set(keep) == set(cover.graph.vertices) else induced_subgraph(cover.graph, keep)
    graph = graph.model_copy(update={"name": f"{kind.value}({cover.base.name})"})
    vertices = {n: cover.vertices[n].model_copy(deep=True) for n in graph.vertices}
    result = CoverResult(kind=kind, side=cover.side, base=cover.base, graph=graph, vertices=vertices)
    return _verify(result, limits) if verify else result


# ---------------------------------------------------------------------------
# The covers
# ---------------------------------------------------------------------------
def past_set_cover(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS, verify: bool = True) -> CoverResult:
    _require_essential(g)
    engine = engine_for(g, limits)
    subsets = reachable_subsets(g, limits)
    engine.explore(subsets.order)
    members: dict[PredecessorClassKey, list[int]] = defaultdict(list)
    classes = []
    taken = set()
    for mask in subsets.order:
        key = engine.class_key(mask)
        members[key].append(mask)
        if mask in subsets.nonempty_witness and key not in taken:
            taken.add(key)
            classes.append((key, mask, subsets.nonempty_witness[mask]))
    _check_past_closed(g, engine, members)
    krieger = krieger_class_witnesses(relation_monoid(g, limits))
    flags = {key: VertexFlags(krieger=key in krieger) for key, _, _ in classes}
    cover = _assemble(g, CoverKind.PASTSET, classes, limits, flags)
    try:
        essential_part = set(trim_to_essential(cover.graph).vertices)
    except EmptyAfterTrim:
        essential_part = set()
    for name, vertex in cover.vertices.items():
        vertex.flags.essential_part = name in essential_part
    logger.debug("past set cover of %s has %d vertices", g.name, len(cover.vertices))
    return _verify(cover, limits) if verify else cover


def _check_past_closed(
    g: LabelledGraph, engine: PredecessorEngine, members: dict[PredecessorClassKey, list[int]]
) -> None:
    for key, masks in members.items():
        first = masks[0]
        for symbol in g.alphabet.symbols:
            expected = engine.prepend(first, symbol)
            expected_key = engine.class_key(expected) if expected else None
            for other in masks[1:]:
                image = engine.prepend(other, symbol)
                if (image != 0) != (expected != 0) or (image and engine.class_key(image) != expected_key):
                    raise ConsistencyError(
                        f"start sets {mask_label(g, first)} and {mask_label(g, other)} of {g.name!r} are"
                        f" union-equivalent but disagree after prepending {symbol}"
                    )


def krieger_cover(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS, verify: bool = True) -> CoverResult:
    _require_essential(g)
    engine = engine_for(g, limits)
    subsets = reachable_subsets(g, limits)
    krieger = krieger_class_witnesses(relation_monoid(g, limits))
    classes = []
    taken = set()
    for mask in subsets.realized_by_nonempty_word():
        key = engine.class_key(mask)
        if key in krieger and key not in taken:
            taken.add(key)
            classes.append((key, mask, subsets.nonempty_witness[mask]))
    if len(classes) != len(krieger):
        raise ConsistencyError(f"some ray class of {g.name!r} is not the class of a start set")
    flags = {key: VertexFlags(krieger=True, essential_part=True) for key in krieger}
    cover = _assemble(g, CoverKind.KRIEGER, classes, limits, flags)
    logger.debug("Krieger cover of %s has %d vertices", g.name, len(cover.vertices))
    return _verify(cover, limits) if verify else cover


def fischer_cover(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    krieger = krieger_cover(g, limits)
    condensation = scc(krieger.graph)
    for component, cyclic in zip(condensation.components, condensation.cyclic, strict=True):
        if not cyclic:
            continue
        candidate = induced_subgraph(krieger.graph, component)
        if separating_word(candidate, g, limits) is None:
            result = _restrict(krieger, list(component), CoverKind.FISCHER, limits)
            for vertex in result.vertices.values():
                vertex.flags.in_fischer_top = True
            return result
    raise NotIrreducible(f"no irreducible component of the Krieger cover presents the shift of {g.name!r}")


def non_decomposable_vertices(cover: CoverResult, limits: Limits = DEFAULT_LIMITS) -> VertexSet:
    """Vertices whose predecessor set is not the union of the strictly smaller vertex predecessor sets."""
    engine = engine_for(cover.base, limits)
    reps = {name: cover.representative(name).mask for name in cover.graph.vertices}
    keep = []
    for name, mask in reps.items():
        below = 0
        for other, other_mask in reps.items():
            if other != name and engine.subset(other_mask, mask):
                below |= other_mask
        if not below or engine.class_key(below) != cover.vertices[name].class_key:
            keep.append(name)
    return cover.graph.vertex_set(keep)


def generalized_fischer_cover(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    krieger = krieger_cover(g, limits)
    nondecomposable = non_decomposable_vertices(krieger, limits)
    for name in nondecomposable:
        krieger.vertices[name].flags.non_decomposable = True
    digraph = krieger.graph.to_networkx()
    reaching = set(nondecomposable)
    for name in nondecomposable:
        reaching |= nx.ancestors(digraph, name)
    keep = [v for v in krieger.graph.vertices if v in reaching]
    result = _restrict(krieger, keep, CoverKind.GFC, limits)
    if not is_essential(result.graph):
        raise ConsistencyError(f"generalized Fischer cover of {g.name!r} is not essential")
    for vertex in result.vertices.values():
        vertex.flags.in_gfc = True
    return result


def _foundation_label(foundation: CoverResult, name: str) -> str:
    representative = foundation.vertices[name].representative
    if len(representative) == 1:
        return f"P({representative[0]})"
    return f"P{name}"


def layers(cover: CoverResult, foundation: CoverResult, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    """Annotate each cover vertex with the least number of foundation vertices whose union gives its class.

    Candidates are the foundation vertices below the vertex; subsets are tried by increasing size, so the
    first hit is a minimum.
    """
    if cover.base != foundation.base:
        raise GraphMismatch("cover and foundation must be built over the same presentation")
    engine = engine_for(cover.base, limits)
    found = {n: foundation.representative(n).mask for n in foundation.graph.vertices}
    vertices = {}
    for name in cover.graph.vertices:
        vertex = cover.vertices[name].model_copy(deep=True)
        target = cover.representative(name).mask
        candidates = [q for q, mask in found.items() if engine.subset(mask, target)]
        if len(candidates) > limits.layer_candidate_cap:
            raise CapExceeded(f"layer search for {name}", limits.layer_candidate_cap)
        total = 0
        for q in candidates:
            total |= found[q]
        if not candidates or engine.class_key(total) != vertex.class_key:
            raise NoCoverExists(f"no union of foundation vertices gives the class of {name}")
        for size in range(1, len(candidates) + 1):
            hit = _first_cover(engine, candidates, found, size, vertex.class_key)
            if hit is not None:
                vertex.layer = size
                vertex.decomposition = tuple(_foundation_label(foundation, q) for q in hit)
                break
        vertices[name] = vertex
    return cover.model_copy(update={"vertices": vertices})


def _first_cover(
    engine: PredecessorEngine, candidates: list[str], found: dict[str, int], size: int, target: PredecessorClassKey
) -> tuple[str, ...] | None:
    for combo in combinations(candidates, size):
        union = 0
        for q in combo:
            union |= found[q]
        if engine.class_key(union) == target:
            return combo
    return None


def cover_layer_histogram(cover: CoverResult) -> dict[int, int]:
    histogram: dict[int, int] = defaultdict(int)
    for vertex in cover.vertices.values():
        if vertex.layer is not None:
            histogram[vertex.layer] += 1
    return dict(sorted(histogram.items()))


def maximal_essential_subgraph(cover: CoverResult, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    trimmed = trim_to_essential(cover.graph)
    result = _restrict(cover, list(trimmed.vertices), cover.kind, limits, verify=False)
    for vertex in result.vertices.values():
        vertex.flags.essential_part = True
    return result


class ConditionStar(BaseModel):
    holds: bool
    witness: str | None = None
    witness_key: str | None = None


def condition_star(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> ConditionStar:
    krieger = krieger_cover(g, limits)
    essential = maximal_essential_subgraph(past_set_cover(g, limits), limits)
    difference = krieger.keys() ^ essential.keys()
    if not difference:
        return ConditionStar(holds=True)
    key = min(difference)
    name = essential.vertex_for_key(key) or krieger.vertex_for_key(key)
    return ConditionStar(holds=False, witness=name, witness_key=key.digest)


def multiplicity_set_cover(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    fischer = fischer_cover(g, limits)
    f = fischer.graph
    engine = engine_for(f, limits)
    starts = ray_start_sets(f, limits)
    names = {mask: mask_label(f, mask) for mask in starts}
    edges = []
    for mask in starts:
        for symbol in f.alphabet.symbols:
            source = engine.prepend(mask, symbol)
            if not source:
                continue
            if source not in names:
                raise ConsistencyError(f"prepending {symbol} to the ray start set {names[mask]} gives no ray start set")
            edges.append((names[source], symbol, names[mask]))
    graph = LabelledGraph.from_edges(edges, name=f"multiplicity({g.name})", vertices=list(names.values()))
    base_engine = engine_for(g, limits)
    vertices = {}
    for mask, witness in starts.items():
        base_mask = 0
        for member in VertexSet(f, mask):
            base_mask |= fischer.representative(member).mask
        vertices[names[mask]] = CoverVertex(
            name=names[mask],
            class_key=base_engine.class_key(base_mask),
            representative=VertexSet(g, base_mask).names(),
            witness_word=witness,
            layer=mask.bit_count(),
            flags=VertexFlags(krieger=True, in_fischer_top=mask.bit_count() == 1, essential_part=True),
        )
    cover = CoverResult(kind=CoverKind.MULTIPLICITY, base=g, graph=graph, vertices=vertices)
    if not is_left_resolving(graph) or separating_word(graph, g, limits) is not None:
        raise ConsistencyError(f"multiplicity set cover of {g.name!r} is not a left-resolving presentation")
    return cover


def derived_shift_presentation(g: LabelledGraph, limits: Limits = DEFAULT_LIMITS) -> LabelledGraph | None:
    """The multiplicity set cover without its Fischer layer, trimmed; None when the derived shift is empty."""
    cover = multiplicity_set_cover(g, limits)
    upper = [n for n, v in cover.vertices.items() if v.layer and v.layer >= 2]
    if not upper:
        return None
    try:
        derived = trim_to_essential(induced_subgraph(cover.graph, upper))
    except (EmptyInducedAlphabet, EmptyAfterTrim):
        return None
    return derived.model_copy(update={"name": f"derived({g.name})"})


BUILDERS = {
    CoverKind.FISCHER: fischer_cover,
    CoverKind.GFC: generalized_fischer_cover,
    CoverKind.KRIEGER: krieger_cover,
    CoverKind.PASTSET: past_set_cover,
    CoverKind.MULTIPLICITY: multiplicity_set_cover,
}


def build_cover(g: LabelledGraph, kind: CoverKind | str, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    return BUILDERS[CoverKind(kind)](g, limits)


def right_cover(g: LabelledGraph, kind: CoverKind | str, limits: Limits = DEFAULT_LIMITS) -> CoverResult:
    """Right cover by transposing, taking the left cover, and transposing back. Representatives refer to
    the transposed presentation."""
    left = build_cover(transpose(g), kind, limits)
    return left.model_copy(update={"graph": transpose(left.graph), "side": "right"})


# ---------------------------------------------------------------------------
# Synchronization
# ---------------------------------------------------------------------------
def synchronization_level(g: LabelledGraph, w: Word, limits: Limits = DEFAULT_LIMITS) -> int:
    """n such that the word w is 1/n-synchronizing: the layer of the class of S(w) in the past set cover."""
    if not w:
        raise InvalidRay("synchronization is measured for nonempty words")
    mask = engine_for(g, limits).start_set(w)
    if not mask:
        raise InvalidRay(f"{' '.join(w)} is not a word of the shift presented by {g.name!r}")
    layered = layers(past_set_cover(g, limits), generalized_fischer_cover(g, limits), limits)
    name = layered.vertex_for_key(engine_for(g, limits).class_key(mask))
    return layered.vertices[name].layer


def ray_synchronization_level(g: LabelledGraph, w: Word, u: Word, limits: Limits = DEFAULT_LIMITS) -> int:
    key = periodic_ray_class(g, w, u, limits)
    layered = layers(krieger_cover(g, limits), generalized_fischer_cover(g, limits), limits)
    return layered.vertices[layered.vertex_for_key(key)].layer
