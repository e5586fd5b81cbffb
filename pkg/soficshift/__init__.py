"""Canonical covers and flow invariants of sofic shifts presented by finite labelled graphs."""

from .config import DEFAULT_LIMITS, Limits
from .constructions import (
    RootedDag,
    charge_constrained,
    even_shift,
    fixture,
    realize_ideal_lattice,
    realize_pcg,
    transitive_closure_dag,
)
from .covers import (
    CoverKind,
    CoverResult,
    build_cover,
    condition_star,
    cover_layer_histogram,
    fischer_cover,
    generalized_fischer_cover,
    krieger_cover,
    layers,
    multiplicity_set_cover,
    past_set_cover,
    right_cover,
)
from .errors import SoficShiftError
from .graph_core import LabelledGraph, VertexSet, parse_graph, predicates, serialize_graph
from .invariants import hereditary_saturated_subsets, pcg_invariant, proper_communication_graph
from .lang_engine import pred_equal, pred_subset, separating_word, shift_language_equal

__all__ = [
    "DEFAULT_LIMITS",
    "CoverKind",
    "CoverResult",
    "LabelledGraph",
    "Limits",
    "RootedDag",
    "SoficShiftError",
    "VertexSet",
    "build_cover",
    "charge_constrained",
    "condition_star",
    "cover_layer_histogram",
    "even_shift",
    "fischer_cover",
    "fixture",
    "generalized_fischer_cover",
    "hereditary_saturated_subsets",
    "krieger_cover",
    "layers",
    "multiplicity_set_cover",
    "parse_graph",
    "past_set_cover",
    "pcg_invariant",
    "predicates",
    "pred_equal",
    "pred_subset",
    "proper_communication_graph",
    "realize_ideal_lattice",
    "realize_pcg",
    "right_cover",
    "separating_word",
    "serialize_graph",
    "shift_language_equal",
    "transitive_closure_dag",
]
