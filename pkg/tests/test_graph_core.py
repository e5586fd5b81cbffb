from pathlib import Path

import pytest
from hypothesis import given

from soficshift.constructions import fixture, fixture_names
from soficshift.errors import (
    AlphabetOverlap,
    EmptyAfterTrim,
    EmptyInducedAlphabet,
    FreshSymbolClash,
    GraphFormatError,
    GraphMismatch,
    InvalidGraph,
    PredSepRequiresEssential,
)
from soficshift.graph_core import (
    Alphabet,
    LabelledGraph,
    delete_vertices,
    disjoint_union,
    induced_subgraph,
    is_essential,
    is_irreducible_graph,
    is_left_resolving,
    is_predecessor_separated,
    labelled_isomorphic,
    parse_graph,
    predicates,
    read_graph,
    rename_vertices,
    scc,
    serialize_graph,
    symbol_expand,
    transpose,
    trim_to_essential,
)
from soficshift.lang_engine import word_presentable

from .oracles import presented_words
from .strategies import essential_graphs

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"


def relabel(g: LabelledGraph, suffix: str) -> LabelledGraph:
    return LabelledGraph.from_edges([(e.src, e.label + suffix, e.dst) for e in g.edges], name=g.name + suffix)


class TestAlphabet:
    def test_symbols_are_sorted(self):
        assert Alphabet(symbols=("b", "a", "c")).symbols == ("a", "b", "c")

    def test_duplicate_symbol_rejected(self):
        with pytest.raises(InvalidGraph, match="duplicate"):
            Alphabet(symbols=("a", "a"))

    @pytest.mark.parametrize("symbol", ["", "a b", "a#"])
    def test_bad_symbol_rejected(self, symbol):
        with pytest.raises(InvalidGraph):
            Alphabet(symbols=(symbol,))


class TestLabelledGraph:
    def test_exact_duplicate_edge_rejected(self):
        with pytest.raises(InvalidGraph, match="duplicate edge"):
            LabelledGraph.from_edges([("u", "a", "v"), ("u", "a", "v")])

    def test_parallel_edges_with_equal_labels_allowed_when_endpoints_differ(self):
        g = LabelledGraph.from_edges([("u", "a", "v"), ("u", "a", "u")])
        assert len(g.edges) == 2

    def test_undeclared_vertex_rejected(self):
        with pytest.raises(InvalidGraph, match="undeclared"):
            LabelledGraph(
                alphabet=Alphabet(symbols=("a",)), vertices=("u",), edges=(("u", "a", "v"),)
            )

    def test_unused_symbol_rejected(self):
        with pytest.raises(InvalidGraph, match="labelling no edge"):
            LabelledGraph(alphabet=Alphabet(symbols=("a", "b")), vertices=("u",), edges=(("u", "a", "u"),))

    def test_no_edges(self):
        with pytest.raises(EmptyInducedAlphabet):
            LabelledGraph.from_edges([])

    def test_vertex_sets_are_bound_to_their_graph(self, even, three_charge):
        with pytest.raises(GraphMismatch):
            even.vertex_set(["A"]) | three_charge.vertex_set(["u"])
        with pytest.raises(GraphMismatch):
            even.vertex_set(["Z"])

    def test_vertex_set_label(self, three_charge):
        assert three_charge.vertex_set(["w", "u"]).label() == "{u,w}"


class TestTextFormat:
    def test_comments_and_vertex_order(self):
        g = parse_graph("graph demo\nvertex y\n# only a comment\nx a y  # trailing\ny b x\n")
        assert g.name == "demo"
        assert g.vertices == ("y", "x")
        assert serialize_graph(g) == "graph demo\nvertex y\nvertex x\nx a y\ny b x\n"

    def test_graph_line_must_come_first(self):
        with pytest.raises(GraphFormatError) as excinfo:
            parse_graph("x a y\ngraph late\n")
        assert excinfo.value.line_number == 2

    def test_malformed_line_reports_its_number(self):
        with pytest.raises(GraphFormatError, match="line 2"):
            parse_graph("x a y\nx a\n")

    def test_empty_input(self):
        with pytest.raises(GraphFormatError):
            parse_graph("# nothing\n")

    def test_round_trip_every_fixture(self, fixture_graph):
        assert parse_graph(serialize_graph(fixture_graph)) == fixture_graph

    @pytest.mark.parametrize("path", sorted(FIXTURE_DIR.glob("*.sg")), ids=lambda p: p.stem)
    def test_fixture_files_match_fixtures(self, path):
        assert read_graph(path) == fixture(path.stem)

    def test_every_fixture_has_a_file(self):
        assert {p.stem for p in FIXTURE_DIR.glob("*.sg")} == set(fixture_names())

    def test_file_stem_with_a_hash_still_round_trips(self, tmp_path, even):
        target = tmp_path / "even #2.sg"
        target.write_text(serialize_graph(even).split("\n", 1)[1], encoding="utf-8")
        g = read_graph(target)
        assert g.name == "even_2"
        assert parse_graph(serialize_graph(g)) == g


class TestPredicates:
    @pytest.mark.parametrize("name", ["3cc_fischer", "one_loop", "even_shift"])
    def test_all_flags_true(self, name):
        assert all(predicates(fixture(name)).model_dump().values())

    def test_reducible_graph(self):
        flags = predicates(fixture("reducible_two_loops"))
        assert flags.essential and flags.left_resolving
        assert not flags.irreducible_graph

    def test_predecessor_separation_needs_essential(self):
        g = LabelledGraph.from_edges([("u", "a", "v"), ("v", "b", "v")])
        with pytest.raises(PredSepRequiresEssential):
            is_predecessor_separated(g)

    def test_two_in_one_shift_is_not_separated(self):
        g = LabelledGraph.from_edges([("u", "a", "u"), ("v", "a", "v")])
        assert not is_predecessor_separated(g)

    @given(essential_graphs())
    def test_irreducible_iff_one_component(self, g):
        assert is_irreducible_graph(g) == (len(scc(g).components) == 1 and bool(g.edges))


class TestTrimAndTranspose:
    def test_essential_graph_is_returned_unchanged(self, gfc_justifying):
        assert trim_to_essential(gfc_justifying) is gfc_justifying

    def test_path_without_cycles(self):
        with pytest.raises(EmptyAfterTrim):
            trim_to_essential(LabelledGraph.from_edges([("a", "x", "b"), ("b", "y", "c")]))

    def test_stranded_vertices_dropped(self):
        g = LabelledGraph.from_edges([("s", "a", "u"), ("u", "b", "u"), ("u", "c", "t")])
        assert trim_to_essential(g).vertices == ("u",)

    @given(essential_graphs())
    def test_trim_is_idempotent(self, g):
        assert trim_to_essential(g) is g

    def test_single_edge(self):
        g = transpose(LabelledGraph.from_edges([("u", "a", "v"), ("v", "b", "u")]))
        assert ("v", "a", "u") in g.edges

    def test_transpose_of_right_fischer_cover_is_left_resolving(self):
        g = fixture("2inv_right_fischer")
        assert not is_left_resolving(g)
        assert is_left_resolving(transpose(g))

    @given(essential_graphs())
    def test_transpose_is_an_involution(self, g):
        assert transpose(transpose(g)) == g


class TestSymbolExpansion:
    def test_self_loop_becomes_two_cycle(self):
        g = symbol_expand(fixture("one_loop"), "a", "•")
        assert len(g.vertices) == 2
        assert is_irreducible_graph(g)
        assert {e.label for e in g.edges} == {"a", "•"}

    @pytest.mark.parametrize(("symbol", "vertices"), [("0", 4), ("1", 3)])
    def test_even_shift_sizes(self, even, symbol, vertices):
        assert len(symbol_expand(even, symbol, "•").vertices) == vertices

    def test_even_shift_words_are_substituted(self, even):
        expanded = symbol_expand(even, "1", "•")
        for word in presented_words(even, 5):
            substituted = tuple(s for a in word for s in ((a, "•") if a == "1" else (a,)))
            assert word_presentable(expanded, substituted)

    def test_fresh_symbol_must_be_fresh(self, even):
        with pytest.raises(FreshSymbolClash):
            symbol_expand(even, "1", "0")

    def test_symbol_must_exist(self, even):
        with pytest.raises(InvalidGraph):
            symbol_expand(even, "2", "•")

    def test_preserves_structure_on_fixtures(self, fixture_graph):
        for a in fixture_graph.alphabet.symbols:
            expanded = symbol_expand(fixture_graph, a, "•")
            assert is_essential(expanded)
            assert is_left_resolving(expanded) == is_left_resolving(fixture_graph)


class TestSubgraphs:
    def test_all_vertices(self, even):
        assert induced_subgraph(even, even.vertices) == even

    def test_one_looped_vertex(self, even):
        g = induced_subgraph(even, ["A"])
        assert g.alphabet.symbols == ("1",)

    def test_no_surviving_edge(self, even):
        with pytest.raises(EmptyInducedAlphabet):
            induced_subgraph(even, ["B"])

    def test_deleting_every_vertex(self):
        with pytest.raises(EmptyAfterTrim, match="empty shift"):
            delete_vertices(fixture("one_loop"), ["v"])

    def test_removing_p_loses_dbj(self, gfc_justifying):
        assert word_presentable(gfc_justifying, ("d", "b", "j"))
        assert not word_presentable(delete_vertices(gfc_justifying, ["P"]), ("d", "b", "j"))

    def test_disjoint_union_of_even_shifts(self, even):
        g = disjoint_union(relabel(even, "x"), relabel(even, "y"))
        assert len(g.vertices) == 4
        assert len(scc(g).components) == 2

    def test_disjoint_union_needs_disjoint_alphabets(self, even):
        with pytest.raises(AlphabetOverlap):
            disjoint_union(even, even)


class TestComponentsAndIsomorphism:
    def test_three_charge_krieger_bands(self):
        assert [len(c) for c in scc(fixture("3cc_krieger")).components] == [4, 3, 2]

    def test_two_looped_vertices(self):
        condensation = scc(LabelledGraph.from_edges([("u", "a", "u"), ("u", "b", "v"), ("v", "a", "v")]))
        assert len(condensation.components) == 2
        assert condensation.arcs == ((0, 1),)
        assert all(condensation.cyclic)

    def test_acyclic_vertex(self):
        condensation = scc(LabelledGraph.from_edges([("u", "a", "u"), ("u", "b", "v")]))
        assert condensation.cyclic == (True, False)

    def test_renamed_graph_is_isomorphic(self, three_charge):
        renamed = rename_vertices(three_charge, {"u": "0", "v": "1", "w": "2", "x": "3"})
        assert labelled_isomorphic(renamed, three_charge)

    def test_labels_matter(self, even):
        swapped = LabelledGraph.from_edges([(e.src, {"0": "1", "1": "0"}[e.label], e.dst) for e in even.edges])
        assert not labelled_isomorphic(swapped, even)
