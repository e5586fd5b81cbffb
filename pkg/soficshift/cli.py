"""Command line for soficshift.

Exit codes: 0 success (or the checked property holds), 1 the checked property fails, 2 bad input,
3 a resource cap was hit, 4 an internal consistency check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NamedTuple

from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .config import Limits
from .constructions import (
    ReturnEdges,
    charge_constrained,
    fixture,
    fixture_names,
    read_dag,
    realize_ideal_lattice,
    realize_pcg,
)
from .covers import (
    CoverKind,
    CoverResult,
    build_cover,
    condition_star,
    cover_layer_histogram,
    generalized_fischer_cover,
    krieger_cover,
    layers,
    ray_synchronization_level,
    right_cover,
    synchronization_level,
)
from .dot import emit_dot
from .errors import CapExceeded, InvalidGraph, NoCoverExists, SoficShiftError
from .graph_core import (
    LabelledGraph,
    is_essential,
    is_irreducible_graph,
    is_left_resolving,
    is_predecessor_separated,
    is_right_resolving,
    parse_graph,
    serialize_graph,
    symbol_expand,
    transpose,
    trim_to_essential,
)
from .invariants import (
    condition_K,
    dag_isomorphic,
    fresh_symbol,
    hereditary_saturated_subsets,
    pcg_invariant,
    pcg_summary,
)
from .lang_engine import format_word, parse_word, separating_word

logger = logging.getLogger("soficshift")

REPORT_SCHEMA = "soficshift-report/1"


class Report(BaseModel):
    """What ``--json`` prints. Only ``timings`` differs between runs on identical input."""

    schema_version: str = Field(REPORT_SCHEMA, description="Report format identifier")
    command: str = Field(description="Subcommand that produced the report")
    input_digest: str | None = Field(None, description="sha256 prefix of the input files, in argument order")
    results: dict[str, Any] = Field(description="Command-specific results")
    warnings: list[str] = Field(default_factory=list)
    timings: dict[str, float] = Field(default_factory=dict)


class Outcome(NamedTuple):
    results: dict[str, Any]
    exit_code: int = 0
    dot: Any = None
    text: str | None = None


class Session:
    """Per-invocation state: limits, loaded inputs and accumulated warnings."""

    def __init__(self, args: argparse.Namespace):
        self.limits = Limits(state_cap=args.state_cap, relation_cap=args.relation_cap, ideal_vertex_cap=args.ideal_cap)
        self.strict = args.strict
        self.inputs: list[str] = []
        self.warnings: list[str] = []

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)

    def load(self, path: str) -> LabelledGraph:
        text = Path(path).read_text(encoding="utf-8")
        self.inputs.append(text)
        return parse_graph(text, name=Path(path).stem)

    def load_essential(self, path: str) -> LabelledGraph:
        g = self.load(path)
        trimmed = trim_to_essential(g)
        if trimmed is not g:
            dropped = sorted(set(g.vertices) - set(trimmed.vertices))
            message = f"{g.name}: dropped vertices on no bi-infinite path: {', '.join(dropped)}"
            if self.strict:
                raise InvalidGraph(message)
            self.warn(message)
        return trimmed

    @property
    def digest(self) -> str | None:
        if not self.inputs:
            return None
        return hashlib.sha256("\0".join(self.inputs).encode()).hexdigest()[:16]


def _presentation(g: LabelledGraph) -> dict[str, Any]:
    return {"name": g.name, "vertex_count": len(g.vertices), "edge_count": len(g.edges), "text": serialize_graph(g)}


def _histogram(cover: CoverResult) -> dict[str, int]:
    return {str(layer): count for layer, count in cover_layer_histogram(cover).items()}


def _left_or_right(g: LabelledGraph, side: str) -> LabelledGraph:
    return transpose(g) if side == "right" else g


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def cmd_check(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load(args.file)
    flags: dict[str, bool | None] = {
        "left_resolving": is_left_resolving(g),
        "right_resolving": is_right_resolving(g),
        "essential": is_essential(g),
        "irreducible_graph": is_irreducible_graph(g),
        "predecessor_separated": None,
    }
    if flags["essential"]:
        flags["predecessor_separated"] = is_predecessor_separated(g)
    else:
        session.warn(f"{g.name}: predecessor separation is undefined for a graph that is not essential")
    results = {"graph": g.name, "vertex_count": len(g.vertices), "edge_count": len(g.edges), **flags}
    return Outcome(results, exit_code=0 if all(flags.values()) else 1, dot=g)


def cmd_cover(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    if args.side == "right":
        cover = right_cover(g, args.kind, session.limits)
    else:
        cover = build_cover(g, args.kind, session.limits)
    results = {
        "kind": cover.kind.value,
        "side": cover.side,
        "presentation": _presentation(cover.graph),
        "vertices": cover.annotations(),
    }
    return Outcome(results, dot=cover)


def cmd_layers(args: argparse.Namespace, session: Session) -> Outcome:
    g = _left_or_right(session.load_essential(args.file), args.side)
    cover = build_cover(g, args.kind, session.limits)
    layered = layers(cover, generalized_fischer_cover(g, session.limits), session.limits)
    results = {
        "kind": layered.kind.value,
        "side": args.side,
        "histogram": _histogram(layered),
        "layers": {name: v.layer for name, v in layered.vertices.items()},
        "decomposition": {name: list(v.decomposition) for name, v in layered.vertices.items()},
    }
    return Outcome(results, dot=layered)


def cmd_pcg(args: argparse.Namespace, session: Session) -> Outcome:
    g = _left_or_right(session.load_essential(args.file), args.side)
    krieger = krieger_cover(g, session.limits)
    p = pcg_invariant(g, session.limits)
    try:
        layered = layers(krieger, generalized_fischer_cover(g, session.limits), session.limits)
    except (CapExceeded, NoCoverExists) as error:
        session.warn(f"layers skipped: {error}")
        layered = None
    try:
        lattice = hereditary_saturated_subsets(krieger.graph, session.limits)
    except CapExceeded as error:
        session.warn(f"ideal lattice skipped: {error}")
        lattice = None
    results = pcg_summary(p, lattice, layered)
    if layered is not None:
        results["layer_histogram"] = _histogram(layered)
    results["nodes"] = [p.node_label(i) for i in range(len(p.nodes))]
    results["arcs"] = [[p.node_label(i), p.node_label(j)] for i, j in p.arcs]
    return Outcome(results, dot=p)


def cmd_ideals(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    krieger = krieger_cover(g, session.limits).graph
    lattice = hereditary_saturated_subsets(krieger, session.limits)
    order = {v: i for i, v in enumerate(krieger.vertices)}
    results = {
        "count": lattice.count,
        "elements": [sorted(h, key=order.__getitem__) for h in lattice.elements],
        "hasse": [list(arc) for arc in lattice.hasse],
    }
    return Outcome(results, dot=lattice)


def cmd_condstar(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    verdict = condition_star(g, session.limits)
    return Outcome(verdict.model_dump(), exit_code=0 if verdict.holds else 1)


def cmd_condk(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    target = krieger_cover(g, session.limits).graph if args.of == "krieger" else g
    holds = condition_K(target)
    return Outcome({"of": args.of, "graph": target.name, "holds": holds}, exit_code=0 if holds else 1)


def cmd_expand(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    fresh = args.fresh or fresh_symbol(g)
    expanded = symbol_expand(g, args.symbol, fresh)
    preserved = dag_isomorphic(pcg_invariant(g, session.limits), pcg_invariant(expanded, session.limits))
    results = {
        "symbol": args.symbol,
        "fresh": fresh,
        "pcg_preserved": preserved,
        "presentation": _presentation(expanded),
    }
    return Outcome(results, exit_code=0 if preserved else 1, dot=expanded, text=serialize_graph(expanded))


def cmd_equiv(args: argparse.Namespace, session: Session) -> Outcome:
    g1 = session.load_essential(args.first)
    g2 = session.load_essential(args.second)
    witness = separating_word(g1, g2, session.limits)
    results = {"equal": witness is None, "witness": None if witness is None else format_word(witness)}
    return Outcome(results, exit_code=0 if witness is None else 1)


def cmd_construct(args: argparse.Namespace, session: Session) -> Outcome:
    if args.what == "charge":
        g = charge_constrained(args.c)
    else:
        text = Path(args.dag).read_text(encoding="utf-8")
        session.inputs.append(text)
        dag = read_dag(args.dag)
        realize = realize_pcg if args.what == "pcg" else realize_ideal_lattice
        g = realize(dag, return_edges=args.returns)
    return Outcome({"presentation": _presentation(g)}, dot=g, text=serialize_graph(g))


def cmd_fixture(args: argparse.Namespace, session: Session) -> Outcome:
    if args.name is None:
        names = fixture_names()
        return Outcome({"fixtures": names}, text="\n".join(names) + "\n")
    g = fixture(args.name)
    return Outcome({"presentation": _presentation(g)}, dot=g, text=serialize_graph(g))


def cmd_sync(args: argparse.Namespace, session: Session) -> Outcome:
    g = session.load_essential(args.file)
    word = parse_word(g, args.word)
    if args.ray:
        level = ray_synchronization_level(g, word, parse_word(g, args.ray), session.limits)
    else:
        level = synchronization_level(g, word, session.limits)
    results = {"word": args.word, "ray": args.ray, "level": level, "intrinsically_synchronizing": level == 1}
    return Outcome(results)


def cmd_schema(args: argparse.Namespace, session: Session) -> Outcome:
    return Outcome(Report.model_json_schema())


COMMANDS: dict[str, Callable[[argparse.Namespace, Session], Outcome]] = {
    "check": cmd_check,
    "cover": cmd_cover,
    "layers": cmd_layers,
    "pcg": cmd_pcg,
    "ideals": cmd_ideals,
    "condstar": cmd_condstar,
    "condk": cmd_condk,
    "expand": cmd_expand,
    "equiv": cmd_equiv,
    "construct": cmd_construct,
    "fixture": cmd_fixture,
    "sync": cmd_sync,
    "schema": cmd_schema,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    defaults = Limits()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report instead of the human summary")
    common.add_argument("--dot", metavar="PATH", help="also write the result as Graphviz DOT to PATH")
    common.add_argument("--strict", action="store_true", help="refuse inputs that need trimming to be essential")
    common.add_argument("-v", "--verbose", action="store_true", help="log exploration sizes")
    common.add_argument("--state-cap", type=int, default=defaults.state_cap)
    common.add_argument("--relation-cap", type=int, default=defaults.relation_cap)
    common.add_argument("--ideal-cap", type=int, default=defaults.ideal_vertex_cap)

    parser = argparse.ArgumentParser(prog="soficshift", description="Covers and invariants of sofic shifts.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    add("check", "structural predicates of a presentation").add_argument("file")

    p = add("cover", "build a cover")
    p.add_argument("--kind", choices=[k.value for k in CoverKind], default=CoverKind.KRIEGER.value)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("file")

    p = add("layers", "layer structure measured against the generalized Fischer cover")
    p.add_argument("--kind", choices=[CoverKind.KRIEGER.value, CoverKind.PASTSET.value], default="krieger")
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("file")

    p = add("pcg", "proper communication graph of the Krieger cover")
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("file")

    add("ideals", "hereditary saturated subsets of the Krieger cover").add_argument("file")
    add("condstar", "Condition (*)").add_argument("file")

    p = add("condk", "Condition (K)")
    p.add_argument("--of", choices=["krieger", "graph"], default="krieger")
    p.add_argument("file")

    p = add("expand", "symbol expansion and flow invariance of the PCG")
    p.add_argument("--symbol", required=True)
    p.add_argument("--fresh")
    p.add_argument("file")

    p = add("equiv", "equality of presented shifts")
    p.add_argument("first")
    p.add_argument("second")

    p = add("construct", "build a presentation")
    p.add_argument("what", choices=["pcg", "ideal", "charge"])
    p.add_argument("c", nargs="?", type=int, help="charge bound for 'charge'")
    p.add_argument("--dag", help="rooted DAG file for 'pcg' and 'ideal'")
    p.add_argument("--returns", choices=[r.value for r in ReturnEdges], default=ReturnEdges.ALL_NON_ROOT.value)

    add("fixture", "print a named fixture, or list them").add_argument("name", nargs="?")

    p = add("sync", "synchronization level of a word or periodic ray")
    p.add_argument("--word", required=True)
    p.add_argument("--ray", help="repeated block u, measuring the ray word·u·u·u…")
    p.add_argument("file")

    add("schema", "JSON schema of the report")
    return parser


def _check_construct(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command != "construct":
        return
    if args.what == "charge" and args.c is None:
        parser.error("construct charge needs the charge bound")
    if args.what != "charge" and args.dag is None:
        parser.error(f"construct {args.what} needs --dag")


def _render(console: Console, command: str, outcome: Outcome) -> None:
    if outcome.text is not None:
        console.print(outcome.text, end="", markup=False, highlight=False)
        return
    vertices = outcome.results.get("vertices")
    if command == "cover" and isinstance(vertices, dict):
        table = Table(title=f"{outcome.results['side']} {outcome.results['kind']} cover")
        for column in ("vertex", "representative", "witness", "flags"):
            table.add_column(column)
        for name, info in vertices.items():
            flags = ", ".join(k for k, v in info["flags"].items() if v)
            table.add_row(name, ",".join(info["representative"]), format_word(info["witness_word"]), flags)
        console.print(table)
        console.print(outcome.results["presentation"]["text"], end="", markup=False, highlight=False)
        return
    console.print(outcome.results)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_construct(parser, args)
    console = Console()
    errors = Console(stderr=True)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=errors, show_time=False, show_path=False)],
        force=True,
    )
    started = time.perf_counter()
    try:
        session = Session(args)
        outcome = COMMANDS[args.command](args, session)
        if args.dot and outcome.dot is not None:
            Path(args.dot).write_text(emit_dot(outcome.dot), encoding="utf-8")
    except SoficShiftError as error:
        errors.print(f"[bold red]error:[/] {error}", highlight=False)
        return error.exit_code
    except (OSError, ValidationError) as error:
        errors.print(f"[bold red]error:[/] {error}", highlight=False)
        return 2
    if args.json:
        report = Report(
            command=args.command,
            input_digest=session.digest,
            results=outcome.results,
            warnings=session.warnings,
            timings={"total_seconds": round(time.perf_counter() - started, 6)},
        )
        sys.stdout.write(report.model_dump_json(indent=2) + "\n")
    else:
        _render(console, args.command, outcome)
    return outcome.exit_code


def main() -> None:
    sys.exit(run())
