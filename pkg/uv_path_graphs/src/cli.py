import argparse
import logging
import sys
from pathlib import Path as FilePath
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError

from config.common_settings import settings
from config.setup_logging import setup_logging
from uv_path_graphs.src.corpus import fixture_corpus
from uv_path_graphs.src.cycle_space import (
    CycleSet,
    PlaneEmbedding,
    cycles_through_edge,
    cycles_through_vertex,
    enumerate_all_cycles,
    internal_faces,
    spans_cycle_space,
)
from uv_path_graphs.src.delta_star import (
    closure_sequence,
    has_property_delta_star,
    interpolate,
)
from uv_path_graphs.src.dot_export import DotOptions, export_dot
from uv_path_graphs.src.errors import (
    InvalidCycleError,
    NotPlaneEmbeddingError,
    PathSpaceError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import (
    Cycle,
    Graph,
    cycle_from_mask,
    distance as graph_distance,
    mask_of,
    parse_path,
    parse_vertex,
)
from uv_path_graphs.src.path_space import (
    PathGraph,
    bounded_route,
    build_path_graph,
    components,
    enumerate_uv_paths,
    path_graph_diameter,
    walk_labels,
)
from uv_path_graphs.src.pydantic_models.pydantic_models import (
    ClosureOutput,
    ComponentsOutput,
    CycleSetDocument,
    CyclesOutput,
    DeltaStarOutput,
    DiameterOutput,
    EmbeddingDocument,
    InterpolateOutput,
    PathGraphEdge,
    PathGraphOutput,
    PathsOutput,
    RouteOutput,
    SpanCheckOutput,
    WitnessDocument,
    edges_of,
    load_cycle_set,
    load_graph,
)
from uv_path_graphs.src.theorem_suite import search_tightness_witness, verify
from uv_path_graphs.src.theorems import THEOREM_IDS, CheckOptions, check_spanning_counterexample

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_THEOREM_FAILED, EXIT_ERROR = 0, 1, 2


########## argument parsing ##########

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph JSON file {n, edges, labels}")
    common.add_argument("--u", help="start vertex (index or label)")
    common.add_argument("--v", help="end vertex (index or label)")
    common.add_argument("--cycles", help="cycle set JSON file {cycles: [[edge, ...], ...]}")
    common.add_argument("--embedding", help="rotation system JSON file {rotation, outer}")
    common.add_argument("--seed", type=int, default=settings.SEED)
    common.add_argument("--max-paths", type=int, default=settings.MAX_PATHS)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    common.add_argument("--show-restricted", action="store_true",
                        help="with --dot, draw adjacencies removed by the cycle set dashed")
    common.add_argument("--log-level", default=settings.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog="pathspace",
                                     description="u-v path graphs, cycle spaces and Delta*-closures")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("paths", "list the u-v paths"),
                       ("pathgraph", "build P(G_uv), or P_C(G_uv) with --cycles"),
                       ("components", "connected components of the path graph"),
                       ("diameter", "diameter of the path graph against 2 d_G(u, v)"),
                       ("span-check", "does the cycle set span the cycle space"),
                       ("closure", "Delta*-closure of the cycle set"),
                       ("dense", "is the cycle set Delta*-dense"),
                       ("k4-demo", "the K4 cycle set that spans but disconnects")):
        sub.add_parser(name, parents=[common], help=text)

    route = sub.add_parser("route", parents=[common], help="walk from S to T of length <= 2 d_G(u, v)")
    route.add_argument("S", help="path as u-x-v (labels or indices)")
    route.add_argument("T")

    interp = sub.add_parser("interpolate", parents=[common], help="intermediate path for an exchange")
    interp.add_argument("S")
    interp.add_argument("T")

    cycles = sub.add_parser("cycles", parents=[common], help="enumerate cycles")
    cycles.add_argument("mode", choices=["all", "edge", "vertex", "faces"])
    cycles.add_argument("element", nargs="?", help="edge index for 'edge', vertex for 'vertex'")

    delta = sub.add_parser("delta-star", parents=[common], help="test Property Delta* for one cycle")
    delta.add_argument("--sigma", required=True, help="cycle as edge indices 1,3,4 or vertices u-x-v-u")

    run = sub.add_parser("verify", parents=[common], help="run the theorem suite")
    run.add_argument("--theorems", default=",".join(THEOREM_IDS),
                     help=f"comma-separated ids out of {', '.join(THEOREM_IDS)}")
    run.add_argument("--max-n", type=int, default=None, help="largest corpus order (default CORPUS_MAX_N)")

    tight = sub.add_parser("search-tightness", parents=[common], help="search for a tight diameter instance")
    tight.add_argument("--max-n", type=int, default=settings.TIGHTNESS_MAX_N)

    return parser


########## loading inputs ##########

def _read(path: Optional[str], what: str) -> str:
    if not path:
        raise PathSpaceError(f"--{what} is required for this command")
    return FilePath(path).read_text(encoding="utf-8")


def _graph(args) -> Graph:
    return load_graph(_read(args.graph, "graph"))


def _endpoints(args, G: Graph):
    if args.u is None or args.v is None:
        raise PathSpaceError("--u and --v are required for this command")
    return parse_vertex(G, args.u), parse_vertex(G, args.v)


def _cycle_set(args, G: Graph, required: bool = False) -> Optional[CycleSet]:
    if args.cycles is None and not required:
        return None
    return load_cycle_set(_read(args.cycles, "cycles"), G)


def _embedding(args, G: Graph) -> PlaneEmbedding:
    try:
        document = EmbeddingDocument.model_validate_json(_read(args.embedding, "embedding"))
    except ValidationError as e:
        raise NotPlaneEmbeddingError(f"bad embedding file: {e.error_count()} error(s)") from e
    return document.to_embedding(G)


def parse_cycle(G: Graph, text: str) -> Cycle:
    """A cycle given as edge indices `1,3,4` or as a closed vertex walk `u-x-v-u`."""
    if "-" in text:
        vertices = [parse_vertex(G, t) for t in text.split("-") if t.strip()]
        if vertices[0] != vertices[-1]:
            vertices.append(vertices[0])
        return cycle_from_mask(G, G.edge_mask(vertices))
    try:
        mask = mask_of(int(t) for t in text.split(",") if t.strip())
    except ValueError as e:
        raise InvalidCycleError(f"cannot read cycle {text!r}") from e
    if mask >> G.m:
        raise UnknownElementError(f"cycle {text!r} uses edges beyond 0..{G.m - 1}")
    return cycle_from_mask(G, mask)


########## commands ##########

def _path_graph_output(PG: PathGraph) -> PathGraphOutput:
    def edges(items):
        return [PathGraphEdge(source=i, target=j, cycle=edges_of(mask)) for i, j, mask in items]

    return PathGraphOutput(u=PG.u, v=PG.v, restricted=PG.restriction is not None,
                           paths=[list(P.vertices) for P in PG.paths],
                           edges=edges(PG.edges), restricted_out=edges(PG.restricted_out),
                           components=len(components(PG)))


def _build(args):
    G = _graph(args)
    u, v = _endpoints(args, G)
    return build_path_graph(G, u, v, _cycle_set(args, G), max_paths=args.max_paths)


def _closure_output(C: CycleSet, G: Graph) -> ClosureOutput:
    added = closure_sequence(C, G)
    everything = enumerate_all_cycles(G)
    closure = C.with_cycles(added)
    return ClosureOutput(closure=[c.edge_indices() for c in closure.cycles],
                         added=[c.edge_indices() for c in added],
                         all_cycles=len(everything), dense=closure.masks == everything.masks)


def run_command(args) -> Tuple[Union[BaseModel, str], int]:
    """Execute one parsed command; returns (JSON model or DOT text, exit code)."""
    command = args.command
    dot_options = DotOptions(show_restricted=args.show_restricted)

    if command == "paths":
        G = _graph(args)
        u, v = _endpoints(args, G)
        paths = enumerate_uv_paths(G, u, v, max_paths=args.max_paths)
        return PathsOutput(u=u, v=v, count=len(paths), paths=[list(P.vertices) for P in paths]), EXIT_OK

    if command in ("pathgraph", "components"):
        PG = _build(args)
        if args.dot:
            return export_dot(PG, dot_options), EXIT_OK
        if command == "pathgraph":
            return _path_graph_output(PG), EXIT_OK
        parts = components(PG)
        return ComponentsOutput(count=len(parts), connected=len(parts) == 1,
                                components=[[list(PG.paths[i].vertices) for i in part] for part in parts]), EXIT_OK

    if command == "diameter":
        PG = _build(args)
        d = graph_distance(PG.graph, PG.u, PG.v)
        return DiameterOutput(diameter=path_graph_diameter(PG), distance_uv=d, bound=2 * d), EXIT_OK

    if command == "route":
        G = _graph(args)
        S, T = parse_path(G, args.S), parse_path(G, args.T)
        walk = bounded_route(G, S.start, S.end, S, T)
        return RouteOutput(walk=[list(P.vertices) for P in walk], length=len(walk) - 1,
                           bound=2 * graph_distance(G, S.start, S.end)), EXIT_OK

    if command == "span-check":
        G = _graph(args)
        check = spans_cycle_space(_cycle_set(args, G, required=True), G)
        return SpanCheckOutput(spans=check.spans, rank=check.rank, dimension=check.dimension), EXIT_OK

    if command == "cycles":
        G = _graph(args)
        if args.mode == "all":
            C = enumerate_all_cycles(G)
        elif args.mode == "faces":
            C = internal_faces(G, _embedding(args, G))
        elif args.element is None:
            raise PathSpaceError(f"'cycles {args.mode}' needs an element")
        elif args.mode == "edge":
            if not args.element.isdigit():
                raise UnknownElementError(f"edge {args.element!r} is not an edge index")
            C = cycles_through_edge(G, int(args.element))
        else:
            C = cycles_through_vertex(G, parse_vertex(G, args.element))
        return CyclesOutput(mode=args.mode, count=len(C), cycles=CycleSetDocument.from_cycle_set(C).cycles), EXIT_OK

    if command == "delta-star":
        G = _graph(args)
        check = has_property_delta_star(G, parse_cycle(G, args.sigma), _cycle_set(args, G, required=True))
        return DeltaStarOutput(
            sigma=check.sigma.edge_indices(),
            holds=check.holds,
            witnesses=[WitnessDocument(unicycle=w.unicycle.edge_indices(), e=w.e,
                                       alpha=w.alpha.edge_indices(), beta=w.beta.edge_indices(),
                                       connector=list(w.connector.vertices)) for w in check.witnesses],
            failing_unicycle=check.failing_unicycle.edge_indices() if check.failing_unicycle else None,
        ), EXIT_OK

    if command in ("closure", "dense"):
        G = _graph(args)
        return _closure_output(_cycle_set(args, G, required=True), G), EXIT_OK

    if command == "interpolate":
        G = _graph(args)
        S, T = parse_path(G, args.S), parse_path(G, args.T)
        Q = interpolate(S, T, _cycle_set(args, G, required=True))
        walk = [S, T] if Q.vertices == T.vertices else [S, Q, T]
        return InterpolateOutput(S=list(S.vertices), Q=list(Q.vertices), T=list(T.vertices),
                                 steps=len(walk) - 1, cycles=[edges_of(m) for m in walk_labels(walk)]), EXIT_OK

    if command == "verify":
        which = [t.strip() for t in args.theorems.split(",") if t.strip()]
        suite = verify(which, seed=args.seed, max_n=args.max_n, max_paths=args.max_paths)
        return suite, EXIT_OK if suite.passed else EXIT_THEOREM_FAILED

    if command == "search-tightness":
        return search_tightness_witness(args.max_n, seed=args.seed, show_progress=True), EXIT_OK

    if command == "k4-demo":
        instance = fixture_corpus().instances[0]
        if args.dot:
            PG = build_path_graph(instance.graph, instance.u, instance.v, instance.cycles)
            return export_dot(PG, dot_options), EXIT_OK
        report = check_spanning_counterexample(instance, CheckOptions(seed=args.seed))
        return report, EXIT_OK if report.verdict == "pass" else EXIT_THEOREM_FAILED

    raise PathSpaceError(f"unknown command {command!r}")


def _emit(result, out: Optional[str]) -> None:
    text = result.model_dump_json(indent=2) + "\n" if isinstance(result, BaseModel) else result
    if out:
        FilePath(out).parent.mkdir(parents=True, exist_ok=True)
        FilePath(out).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level.upper())
    try:
        result, code = run_command(args)
        _emit(result, args.out)
    except (PathSpaceError, OSError) as e:
        logger.error("%s: %s", args.command, e)
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
