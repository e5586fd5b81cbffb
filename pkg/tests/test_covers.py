import networkx as nx
import pytest
from hypothesis import given

from soficshift.config import Limits
from soficshift.constructions import charge_constrained, fixture
from soficshift.covers import (
    CoverKind,
    build_cover,
    condition_star,
    cover_layer_histogram,
    derived_shift_presentation,
    fischer_cover,
    generalized_fischer_cover,
    krieger_cover,
    layers,
    maximal_essential_subgraph,
    multiplicity_set_cover,
    non_decomposable_vertices,
    past_set_cover,
    ray_synchronization_level,
    right_cover,
    synchronization_level,
)
from soficshift.errors import (
    CapExceeded,
    EmptyAfterTrim,
    EmptyInducedAlphabet,
    GraphMismatch,
    InvalidGraph,
    InvalidRay,
    NotIrreducible,
)
from soficshift.graph_core import (
    LabelledGraph,
    delete_vertices,
    disjoint_union,
    is_irreducible_graph,
    is_left_resolving,
    is_predecessor_separated,
    is_right_resolving,
    labelled_isomorphic,
    trim_to_essential,
)
from soficshift.lang_engine import pred_equal, shift_language_equal

from .oracles import periodic_ray_classes
from .strategies import essential_graphs


def relabel(g: LabelledGraph, suffix: str) -> LabelledGraph:
    return LabelledGraph.from_edges([(e.src, e.label + suffix, e.dst) for e in g.edges], name=g.name + suffix)


def oracle_bound(g: LabelledGraph) -> int:
    return 6 if len(g.alphabet) <= 8 else 4


def layered_krieger(g: LabelledGraph):
    return layers(krieger_cover(g), generalized_fischer_cover(g))


class TestPastSetAndKrieger:
    def test_even_shift(self, even):
        krieger = krieger_cover(even)
        assert set(krieger.names()) == {"{A}", "{B}", "{A,B}"}
        assert len(krieger.graph.edges) == 5
        assert all(v.flags.krieger for v in krieger.vertices.values())

    def test_golden_mean(self):
        g = fixture("golden_mean")
        assert len(krieger_cover(g).vertices) == 2
        assert len(past_set_cover(g).vertices) == 2

    def test_three_charge_matches_the_reference_cover(self, three_charge):
        krieger = krieger_cover(three_charge)
        assert len(krieger.vertices) == 9
        assert labelled_isomorphic(krieger.graph, fixture("3cc_krieger"))

    def test_gfc_example_is_its_own_krieger_cover(self, gfc_justifying):
        assert labelled_isomorphic(krieger_cover(gfc_justifying).graph, gfc_justifying)

    def test_reducible_presentation(self):
        krieger = krieger_cover(fixture("reducible_two_loops"))
        assert set(krieger.names()) == {"{P1}", "{P1,P2}"}

    def test_krieger_edges_sit_inside_the_past_set_cover(self, fixture_graph):
        krieger = krieger_cover(fixture_graph)
        past = past_set_cover(fixture_graph)
        assert set(krieger.graph.edges) <= set(past.graph.edges)
        assert {n for n, v in past.vertices.items() if v.flags.krieger} == set(krieger.names())

    def test_classes_match_periodic_rays(self, fixture_graph):
        keys = krieger_cover(fixture_graph).keys()
        assert periodic_ray_classes(fixture_graph, oracle_bound(fixture_graph)) <= keys

    @pytest.mark.parametrize("name", ["even_shift", "golden_mean", "3cc_fischer"])
    def test_every_class_is_a_short_periodic_ray(self, name):
        g = fixture(name)
        assert periodic_ray_classes(g, 6) == krieger_cover(g).keys()

    def test_stranded_past_set_vertex(self):
        past = past_set_cover(fixture("stranded_pastset"))
        assert not past.vertices["{p,q}"].flags.essential_part
        trimmed = maximal_essential_subgraph(past)
        assert "{p,q}" not in trimmed.names()
        assert all(v.flags.essential_part for v in trimmed.vertices.values())

    def test_needs_an_essential_graph(self):
        with pytest.raises(InvalidGraph):
            krieger_cover(LabelledGraph.from_edges([("u", "a", "u"), ("u", "b", "v")]))

    @given(essential_graphs())
    def test_krieger_cover_presents_the_same_shift(self, g):
        krieger = krieger_cover(g)
        assert is_left_resolving(krieger.graph)
        assert shift_language_equal(krieger.graph, g)
        assert krieger.keys() <= past_set_cover(g).keys()


class TestFischer:
    def test_even_shift(self, even):
        fischer = fischer_cover(even)
        assert set(fischer.names()) == {"{A}", "{B}"}
        assert all(v.flags.in_fischer_top for v in fischer.vertices.values())

    def test_golden_mean(self):
        g = fixture("golden_mean")
        assert fischer_cover(g).names() == krieger_cover(g).names()

    def test_fischer_graphs_are_fixed(self, irreducible_graph):
        flags = (
            is_left_resolving(irreducible_graph),
            is_predecessor_separated(irreducible_graph),
            is_irreducible_graph(irreducible_graph),
        )
        fischer = fischer_cover(irreducible_graph)
        assert is_irreducible_graph(fischer.graph)
        if all(flags):
            assert labelled_isomorphic(fischer.graph, irreducible_graph)

    def test_reducible_shift_has_no_fischer_cover(self):
        with pytest.raises(NotIrreducible):
            fischer_cover(fixture("reducible_two_loops"))

    def test_right_fischer_cover(self):
        g = fixture("2inv_right_fischer")
        right = right_cover(g, "fischer")
        assert right.side == "right"
        assert is_right_resolving(right.graph)
        assert len(right.graph.vertices) == 4
        assert shift_language_equal(right.graph, g)


class TestGeneralizedFischer:
    def test_only_p_is_decomposable(self, gfc_justifying):
        krieger = krieger_cover(gfc_justifying)
        nondecomposable = non_decomposable_vertices(krieger)
        decomposable = [n for n in krieger.names() if n not in nondecomposable]
        assert len(decomposable) == 1
        assert pred_equal(gfc_justifying, krieger.representative(decomposable[0]), ["P"])

    def test_decomposable_vertex_is_kept(self, gfc_justifying):
        assert len(generalized_fischer_cover(gfc_justifying).vertices) == 9

    def test_decomposable_vertex_can_be_redundant(self):
        g = fixture("gfc_not_minimal")
        assert len(generalized_fischer_cover(g).vertices) == 8
        assert shift_language_equal(g, delete_vertices(g, ["P"]))

    def test_even_shift_drops_the_decomposable_vertex(self, even):
        gfc = generalized_fischer_cover(even)
        assert set(gfc.names()) == {"{A}", "{B}"}
        assert labelled_isomorphic(gfc.graph, fischer_cover(even).graph)

    def test_reducible_presentation_keeps_both_components(self):
        assert len(generalized_fischer_cover(fixture("reducible_two_loops")).vertices) == 2

    def test_disjoint_union_is_smaller_than_its_krieger_cover(self, even):
        g = disjoint_union(relabel(even, "x"), relabel(even, "y"))
        gfc = generalized_fischer_cover(g)
        assert len(gfc.vertices) == 4
        assert len(gfc.vertices) < len(krieger_cover(g).vertices)

    def test_every_vertex_reaches_a_non_decomposable_one(self, fixture_graph):
        gfc = generalized_fischer_cover(fixture_graph)
        nondecomposable = {n for n, v in gfc.vertices.items() if v.flags.non_decomposable}
        assert nondecomposable == set(non_decomposable_vertices(krieger_cover(fixture_graph)))
        digraph = gfc.graph.to_networkx()
        for name in gfc.names():
            assert name in nondecomposable or nx.descendants(digraph, name) & nondecomposable
        assert all(v.flags.in_gfc for v in gfc.vertices.values())

    def test_non_decomposable_vertices_cannot_be_deleted(self, fixture_graph):
        gfc = generalized_fischer_cover(fixture_graph)
        for name in non_decomposable_vertices(gfc):
            try:
                smaller = trim_to_essential(delete_vertices(gfc.graph, [name]))
            except (EmptyAfterTrim, EmptyInducedAlphabet):
                continue
            assert not shift_language_equal(smaller, fixture_graph)

    def test_non_decomposable_edges_can_be_redirected(self, fixture_graph):
        krieger = krieger_cover(fixture_graph)
        nondecomposable = set(non_decomposable_vertices(krieger))
        edges = krieger.graph.edges
        for e in edges:
            if e.src in nondecomposable and e.dst not in nondecomposable:
                assert any(f.src == e.src and f.label == e.label and f.dst in nondecomposable for f in edges), e


class TestLayers:
    def test_even_shift(self, even):
        assert cover_layer_histogram(layered_krieger(even)) == {1: 2, 2: 1}

    def test_three_charge(self, three_charge):
        layered = layered_krieger(three_charge)
        assert cover_layer_histogram(layered) == {1: 4, 2: 3, 3: 2}
        assert labelled_isomorphic(layered.layer_subgraph(2), fischer_cover(charge_constrained(2)).graph)
        assert labelled_isomorphic(layered.layer_subgraph(3), fischer_cover(charge_constrained(1)).graph)

    def test_decomposable_foundation_vertex_is_layer_one(self, gfc_justifying):
        layered = layered_krieger(gfc_justifying)
        assert {v.layer for v in layered.vertices.values()} == {1}

    def test_decompositions_name_their_parts(self, three_charge):
        layered = layered_krieger(three_charge)
        for vertex in layered.vertices.values():
            assert len(vertex.decomposition) == vertex.layer
        top = [v for v in layered.vertices.values() if v.layer == 3]
        assert all(" " not in v.display_name and "∪" in v.display_name for v in top)

    def test_layers_never_decrease_along_edges(self, fixture_graph):
        layered = layered_krieger(fixture_graph)
        for edge in layered.graph.edges:
            assert layered.vertices[edge.src].layer <= layered.vertices[edge.dst].layer

    def test_first_layer_is_the_foundation(self, fixture_graph):
        foundation = generalized_fischer_cover(fixture_graph)
        layered = layers(krieger_cover(fixture_graph), foundation)
        assert labelled_isomorphic(layered.layer_subgraph(1), foundation.graph)

    def test_past_set_layers(self, even):
        layered = layers(past_set_cover(even), generalized_fischer_cover(even))
        assert cover_layer_histogram(layered) == {1: 2, 2: 1}

    def test_foundation_of_another_presentation(self, even, three_charge):
        with pytest.raises(GraphMismatch):
            layers(krieger_cover(even), generalized_fischer_cover(three_charge))

    def test_candidate_cap(self, three_charge):
        limits = Limits(layer_candidate_cap=1)
        with pytest.raises(CapExceeded):
            layers(krieger_cover(three_charge), generalized_fischer_cover(three_charge), limits)


class TestConditionStar:
    @pytest.mark.parametrize("name", ["even_shift", "3cc_fischer", "stranded_pastset"])
    def test_holds(self, name):
        assert condition_star(fixture(name)).holds

    def test_fails_with_a_witness(self):
        result = condition_star(fixture("condstar_failing"))
        assert not result.holds
        assert result.witness == "{m1,m2}"
        assert result.witness_key is not None


class TestMultiplicitySetCover:
    def test_even_shift(self, even):
        cover = multiplicity_set_cover(even)
        assert len(cover.vertices) == 3
        assert {v.layer for v in cover.vertices.values()} == {1, 2}

    def test_derived_shift_of_the_even_shift(self, even):
        derived = derived_shift_presentation(even)
        assert len(derived.vertices) == 1
        assert [e.label for e in derived.edges] == ["0"]

    def test_golden_mean_has_empty_derived_shift(self):
        assert derived_shift_presentation(fixture("golden_mean")) is None


class TestSynchronization:
    @pytest.mark.parametrize(("word", "level"), [(("0",), 2), (("1",), 1), (("0", "0"), 2), (("1", "0"), 1)])
    def test_even_shift_words(self, even, word, level):
        assert synchronization_level(even, word) == level

    def test_even_shift_ray(self, even):
        assert ray_synchronization_level(even, (), ("0",)) == 2
        assert ray_synchronization_level(even, ("1",), ("1",)) == 1

    def test_synchronizing_presentation(self):
        g = fixture("sync_irreducible")
        assert ray_synchronization_level(g, (), ("a",)) == 1
        assert synchronization_level(g, ("a",)) == 1
        assert synchronization_level(g, ("b",)) == 1

    @pytest.mark.parametrize("word", [(), ("1", "0", "1", "0", "1")])
    def test_not_a_word(self, even, word):
        with pytest.raises(InvalidRay):
            synchronization_level(even, word)


class TestBuildCover:
    @pytest.mark.parametrize("kind", list(CoverKind))
    def test_every_kind_presents_the_shift(self, even, kind):
        cover = build_cover(even, kind.value)
        assert cover.kind is kind
        assert shift_language_equal(cover.graph, even)

    def test_unknown_kind(self, even):
        with pytest.raises(ValueError):
            build_cover(even, "nope")

    def test_annotations(self, even):
        annotated = layered_krieger(even).annotations()
        assert annotated["{A,B}"]["layer"] == 2
        assert annotated["{A,B}"]["witness_word"] == ["0"]
        assert len(annotated["{A}"]["class_key"]) == 12
