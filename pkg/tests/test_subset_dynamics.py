from collections import defaultdict

import pytest

from soficshift.config import Limits
from soficshift.constructions import charge_constrained, fixture
from soficshift.errors import InvalidRay, StateCapExceeded
from soficshift.lang_engine import engine_for, pred_subset
from soficshift.subset_dynamics import (
    RelationKernel,
    identity_relation,
    krieger_class_keys,
    periodic_ray_class,
    periodic_ray_start_set,
    ray_start_sets,
    reachable_subsets,
    relation_domain,
    relation_monoid,
)


class TestReachableSubsets:
    def test_even_shift(self, even):
        subsets = reachable_subsets(even)
        assert [s.names() for s in subsets.sets()] == [("A", "B"), ("A",), ("B",)]
        assert len(subsets.realized_by_nonempty_word()) == 3
        assert subsets.nonempty_witness[even.full_mask] == ("0",)

    def test_three_charge(self):
        subsets = reachable_subsets(charge_constrained(3))
        # the reachable start sets are the charge intervals: 4 + 3 + 2 + 1
        assert len(subsets.order) == 10
        assert len(subsets.realized_by_nonempty_word()) == 9

    def test_full_set_needs_the_empty_word(self):
        g = fixture("golden_mean")
        subsets = reachable_subsets(g)
        assert g.full_mask in subsets.witness
        assert g.full_mask not in subsets.realized_by_nonempty_word()

    def test_witnesses_reach_their_sets(self, three_charge):
        engine = engine_for(three_charge)
        for mask, word in reachable_subsets(three_charge).witness.items():
            assert engine.start_set(word) == mask

    def test_state_cap(self, three_charge):
        with pytest.raises(StateCapExceeded):
            reachable_subsets(three_charge, Limits(state_cap=3))

    def test_extending_a_word_shrinks_its_predecessors(self, fixture_graph, rng):
        engine = engine_for(fixture_graph)
        known = reachable_subsets(fixture_graph).witness
        leaving = defaultdict(list)
        for edge in fixture_graph.edges:
            leaving[edge.src].append(edge)
        for _ in range(20):
            edge = rng.choice(fixture_graph.edges)
            word = [edge.label]
            for _ in range(6):
                edge = rng.choice(leaving[edge.dst])
                word.append(edge.label)
            previous = fixture_graph.full_mask
            for k in range(1, len(word) + 1):
                mask = engine.start_set(tuple(word[:k]))
                assert mask in known
                assert mask & ~previous == 0
                assert pred_subset(fixture_graph, mask, previous), word[:k]
                previous = mask

    def test_prepending_is_not_monotone(self, even):
        a, b = even.vertex_set(["A"]).mask, even.vertex_set(["B"]).mask
        assert reachable_subsets(even).transitions[a, "0"] == b
        assert not pred_subset(even, b, a)


class TestRelationMonoid:
    def test_identity_comes_first(self, even):
        monoid = relation_monoid(even)
        assert monoid.relations[0] == identity_relation(even)
        assert monoid.words[0] == ()

    def test_domains_are_start_sets(self, three_charge):
        monoid = relation_monoid(three_charge)
        engine = engine_for(three_charge)
        for word, domain in zip(monoid.words[1:], monoid.domains[1:], strict=True):
            assert engine.start_set(word) == domain

    def test_successors_multiply(self, even):
        monoid = relation_monoid(even)
        kernel = RelationKernel(even)
        for i, row in enumerate(monoid.succ):
            for column, j in enumerate(row):
                product = kernel.step(monoid.relations[i], column)
                assert (j == -1) == (not product)
                if j >= 0:
                    assert monoid.relations[j] == product

    def test_invalid_word_gives_the_empty_relation(self, even):
        kernel = RelationKernel(even)
        assert kernel.of_word(("2",)) == ()
        assert kernel.of_word(("0", "1", "0", "1")) == ()
        assert relation_domain(kernel.of_word(("1",))) == 1

    def test_relation_cap(self, three_charge):
        with pytest.raises(StateCapExceeded):
            relation_monoid(three_charge, Limits(relation_cap=2))

    @pytest.mark.parametrize(("name", "count"), [("even_shift", 3), ("golden_mean", 2), ("reducible_two_loops", 2)])
    def test_krieger_class_counts(self, name, count):
        assert len(krieger_class_keys(fixture(name))) == count

    def test_three_charge_has_nine_ray_classes(self):
        assert len(krieger_class_keys(charge_constrained(3))) == 9


class TestRays:
    @pytest.mark.parametrize(
        ("w", "u", "expected"),
        [((), ("1",), ("A",)), ((), ("0",), ("A", "B")), (("0",), ("1",), ("B",)), ((), ("1", "0", "0"), ("A",))],
    )
    def test_periodic_start_sets(self, even, w, u, expected):
        assert periodic_ray_start_set(even, w, u).names() == expected

    def test_empty_block(self, even):
        with pytest.raises(InvalidRay):
            periodic_ray_start_set(even, ("0",), ())

    def test_not_a_ray(self, even):
        with pytest.raises(InvalidRay):
            periodic_ray_class(even, (), ("0", "1"))

    def test_ray_classes_are_krieger_classes(self, three_charge):
        keys = krieger_class_keys(three_charge)
        for w, u in [((), ("+", "-")), (("+",), ("+", "-")), (("-", "-"), ("-", "+"))]:
            assert periodic_ray_class(three_charge, w, u) in keys

    def test_ray_start_sets_of_the_even_shift(self, even):
        starts = ray_start_sets(even)
        assert {even.vertex_set(m).label() for m in starts} == {"{A}", "{B}", "{A,B}"}

    def test_ray_start_set_can_be_larger_than_its_class(self):
        g = fixture("sync_irreducible")
        starts = {g.vertex_set(m).label() for m in ray_start_sets(g)}
        assert "{u,v}" in starts
        assert periodic_ray_class(g, (), ("a",)) == engine_for(g).class_key(g.vertex_set(["u"]).mask)
