"""
Per-instance checks behind `pathspace verify`.

Each check takes one corpus Instance and returns a TheoremReport, or None when
the instance does not qualify (e.g. T4 on a cycle set that is not Delta*-dense).
Random choices inside a check come from a generator seeded by
(seed, theorem, instance index), so reports do not depend on scheduling.
"""
import logging
import random
from functools import reduce
from operator import xor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from config.common_settings import settings
from uv_path_graphs.src.corpus import Instance
from uv_path_graphs.src.cycle_space import (
    CycleSet,
    cycles_through_edge,
    cycles_through_vertex,
    enumerate_all_cycles,
    in_span,
    internal_faces,
    outer_face,
    spans_cycle_space,
)
from uv_path_graphs.src.delta_star import (
    closure_sequence,
    delta_star_closure,
    has_property_delta_star,
    interpolate,
    is_delta_star_dense,
    project_along_closure,
)
from uv_path_graphs.src.errors import InterpolationError, PathSpaceError
from uv_path_graphs.src.graph_core import Path, distance as graph_distance
from uv_path_graphs.src.path_space import (
    PathGraph,
    are_adjacent,
    bounded_route,
    build_path_graph,
    components,
    distance,
    is_walk,
    merge_walk,
    necessary_condition_pair,
    path_graph_diameter,
    restrict,
    shortest_walk,
    walk_labels,
)
from uv_path_graphs.src.pydantic_models.pydantic_models import (
    Counterexample,
    CycleSetDocument,
    GraphDocument,
    InstanceDescriptor,
    MetricValue,
    TheoremReport,
    Verdict,
    cycle_set_hash,
    graph_hash,
)

# Set up a logger for the module
logger = logging.getLogger(__name__)


class CheckOptions(BaseModel):
    """Knobs shared by every check; the suite fills them from settings and CLI flags."""

    seed: int = Field(default_factory=lambda: settings.SEED)
    merge_samples: int = Field(default=10, ge=0, description="Random (S, T) pairs per instance")
    max_paths: Optional[int] = None
    closure_orders: int = Field(default_factory=lambda: settings.CLOSURE_SCAN_ORDERS)


def _rng(options: CheckOptions, theorem: str, inst: Instance) -> random.Random:
    return random.Random(f"{options.seed}:{theorem}:{inst.index}")


def _pairs(inst: Instance) -> List[Tuple[int, int]]:
    if inst.u is not None and inst.v is not None:
        return [(inst.u, inst.v)]
    n = inst.graph.vertex_count
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def _cycles(inst: Instance, theorem: str) -> CycleSet:
    if inst.cycles is None:
        raise PathSpaceError(f"{theorem} needs an instance with a cycle set")
    return inst.cycles


def _report(theorem: str,
            inst: Instance,
            verdict: Verdict,
            metrics: Dict[str, MetricValue],
            C: Optional[CycleSet] = None,
            paths: Sequence[Path] = (),
            note: str = "") -> TheoremReport:
    C = C if C is not None else inst.cycles
    counterexample = None
    if verdict == "fail":
        counterexample = Counterexample(
            graph=GraphDocument.from_graph(inst.graph),
            cycles=CycleSetDocument.from_cycle_set(C) if C is not None else None,
            paths=[list(P.vertices) for P in paths],
            note=note,
        )
        logger.warning("%s failed on instance %d: %s", theorem, inst.index, note)
    return TheoremReport(
        theorem=theorem,
        index=inst.index,
        instance=InstanceDescriptor(
            graph_hash=graph_hash(inst.graph),
            n=inst.graph.vertex_count,
            m=inst.graph.m,
            u=inst.u,
            v=inst.v,
            cycle_set_hash=cycle_set_hash(C) if C is not None else None,
            source=inst.source,
        ),
        verdict=verdict,
        metrics=metrics,
        counterexample=counterexample,
    )


def _connected(PG: PathGraph) -> bool:
    return len(components(PG)) == 1


########## path graphs ##########

def check_path_graph_connected(inst: Instance, options: CheckOptions) -> TheoremReport:
    """T1: P(G_uv) is connected for every pair; merge_walk gives valid walks of length <= l(T)."""
    G = inst.graph
    rng = _rng(options, "T1", inst)
    pairs = _pairs(inst)
    paths_by_pair: Dict[Tuple[int, int], Tuple[Path, ...]] = {}
    most_paths = 0
    for u, v in pairs:
        PG = build_path_graph(G, u, v, max_paths=options.max_paths)
        paths_by_pair[(u, v)] = PG.paths
        most_paths = max(most_paths, PG.size)
        parts = components(PG)
        if len(parts) != 1:
            return _report("T1", inst, "fail", {"u": u, "v": v, "components": len(parts)},
                           paths=[PG.paths[p[0]] for p in parts],
                           note=f"P(G_uv) for u={u}, v={v} has {len(parts)} components")

    longest = 0
    for _ in range(options.merge_samples):
        paths = paths_by_pair[rng.choice(pairs)]
        S, T = rng.choice(paths), rng.choice(paths)
        walk = merge_walk(S, T)
        longest = max(longest, len(walk) - 1)
        valid = (walk[0].vertices == S.vertices and walk[-1].vertices == T.vertices
                 and all(are_adjacent(a, b) for a, b in zip(walk, walk[1:])))
        if not valid or len(walk) - 1 > T.length:
            return _report("T1", inst, "fail", {"walk_length": len(walk) - 1, "bound": T.length},
                           paths=walk, note="merge_walk is not a valid walk within l(T) steps")

    return _report("T1", inst, "pass", {"pairs": len(pairs), "max_path_count": most_paths,
                                        "merge_samples": options.merge_samples,
                                        "longest_merge_walk": longest})


def check_diameter_bound(inst: Instance, options: CheckOptions) -> TheoremReport:
    """T2: diameter of P(G_uv) <= 2 d_G(u, v); bounded_route stays within the bound."""
    G = inst.graph
    rng = _rng(options, "T2", inst)
    pairs = _pairs(inst)
    graphs: Dict[Tuple[int, int], PathGraph] = {}
    worst_gap, tight = None, 0
    for u, v in pairs:
        PG = build_path_graph(G, u, v, max_paths=options.max_paths)
        graphs[(u, v)] = PG
        d = graph_distance(G, u, v)
        diameter = path_graph_diameter(PG)
        if diameter == "disconnected" or diameter > 2 * d:
            return _report("T2", inst, "fail", {"u": u, "v": v, "diameter": diameter, "bound": 2 * d},
                           note=f"diameter {diameter} exceeds 2 d_G(u, v) = {2 * d}")
        gap = 2 * d - diameter
        worst_gap = gap if worst_gap is None else min(worst_gap, gap)
        tight += diameter == 2 * d

    for _ in range(options.merge_samples):
        u, v = rng.choice(pairs)
        PG = graphs[(u, v)]
        S, T = rng.choice(PG.paths), rng.choice(PG.paths)
        route = bounded_route(G, u, v, S, T)
        bound = 2 * graph_distance(G, u, v)
        ends = route[0].vertices == S.vertices and route[-1].vertices == T.vertices
        if not ends or not is_walk(PG, route) or len(route) - 1 > bound:
            return _report("T2", inst, "fail", {"route_length": len(route) - 1, "bound": bound},
                           paths=route, note="bounded_route is not a walk within 2 d_G(u, v)")

    return _report("T2", inst, "pass", {"pairs": len(pairs), "min_slack": worst_gap,
                                        "tight_pairs": tight, "route_samples": options.merge_samples})


########## cycle space ##########

def check_necessary_condition(inst: Instance, options: CheckOptions) -> TheoremReport:
    """
    T3: a connected P_C(G_uv) forces C to span the cycle space.

    Also rebuilds the pair (S, T) with S Δ T = sigma from the disjoint
    attachments to sigma, and, when S and T are joined, checks that the
    exchange cycles along the walk lie in C and sum to sigma.
    """
    G = inst.graph
    C = _cycles(inst, "T3")
    span = spans_cycle_space(C, G)
    pairs = _pairs(inst)
    restricted: Dict[Tuple[int, int], PathGraph] = {}
    connected_pairs = 0
    for u, v in pairs:
        PG = build_path_graph(G, u, v, C, max_paths=options.max_paths)
        restricted[(u, v)] = PG
        if _connected(PG):
            connected_pairs += 1
            if not span.spans:
                return _report("T3", inst, "fail", {"u": u, "v": v, "rank": span.rank,
                                                    "dimension": span.dimension},
                               note=f"P_C(G_uv) is connected for u={u}, v={v} but C does not span")

    everything = enumerate_all_cycles(G).cycles
    if span.spans:
        sigma = everything[0]
    else:
        sigma = next(c for c in everything if not in_span(c.mask, C.matrix))

    telescoped = 0
    for u, v in pairs:
        S, T = necessary_condition_pair(G, u, v, sigma)
        if S.mask ^ T.mask != sigma.mask:
            return _report("T3", inst, "fail", {"u": u, "v": v}, paths=[S, T],
                           note="constructed pair does not differ by sigma")
        walk = shortest_walk(restricted[(u, v)], S, T)
        if walk is None:
            continue
        labels = walk_labels(walk)
        if reduce(xor, labels, 0) != sigma.mask or any(label not in C for label in labels):
            return _report("T3", inst, "fail", {"u": u, "v": v}, paths=walk,
                           note="exchange cycles along the walk do not sum to sigma within C")
        telescoped += 1

    return _report("T3", inst, "pass", {"spans": span.spans, "rank": span.rank,
                                        "dimension": span.dimension, "pairs": len(pairs),
                                        "connected_pairs": connected_pairs,
                                        "telescoped_walks": telescoped})


def check_spanning_counterexample(inst: Instance, options: CheckOptions) -> TheoremReport:
    """T3-counterexample: C spans the cycle space and P_C(G_uv) is still disconnected."""
    G = inst.graph
    C = _cycles(inst, "T3-counterexample")
    if inst.u is None or inst.v is None:
        raise PathSpaceError("T3-counterexample needs an instance with u and v")
    PG = build_path_graph(G, inst.u, inst.v, C, max_paths=options.max_paths)
    span = spans_cycle_space(C, G)
    parts = components(PG)
    isolated = [PG.paths[p[0]] for p in parts if len(p) == 1]
    metrics: Dict[str, MetricValue] = {
        "path_count": PG.size,
        "rank": span.rank,
        "dimension": span.dimension,
        "spans": span.spans,
        "components": len(parts),
        "isolated": ";".join(P.label() for P in isolated),
    }
    if span.spans and len(parts) > 1:
        return _report("T3-counterexample", inst, "pass", metrics)
    return _report("T3-counterexample", inst, "fail", metrics,
                   note="expected a spanning C with a disconnected P_C(G_uv)")


########## Delta* ##########

def check_dense_connected(inst: Instance, options: CheckOptions) -> Optional[TheoremReport]:
    """
    T4: Delta*-dense C gives a connected P_C(G_uv) for every pair.

    A sampled route in P(G_uv) is projected down the closure sequence into
    P_C(G_uv) and must come out a valid walk with the same ends.
    """
    G = inst.graph
    C = _cycles(inst, "T4")
    if not is_delta_star_dense(C, G):
        logger.warning("T4 skips instance %d: cycle set is not Delta*-dense", inst.index)
        return None
    rng = _rng(options, "T4", inst)
    added = closure_sequence(C, G)
    pairs = _pairs(inst)
    longest = 0
    for u, v in pairs:
        full = build_path_graph(G, u, v, max_paths=options.max_paths)
        PG = restrict(full, C)
        if not _connected(PG):
            return _report("T4", inst, "fail", {"u": u, "v": v, "components": len(components(PG))},
                           note=f"dense C but P_C(G_uv) is disconnected for u={u}, v={v}")
        S, T = rng.choice(full.paths), rng.choice(full.paths)
        route = bounded_route(G, u, v, S, T)
        try:
            projected = project_along_closure(route, C, added)
        except InterpolationError as e:
            return _report("T4", inst, "fail", {"u": u, "v": v}, paths=route, note=f"finding: {e}")
        if (projected[0].vertices != S.vertices or projected[-1].vertices != T.vertices
                or not is_walk(PG, projected)):
            return _report("T4", inst, "fail", {"u": u, "v": v}, paths=projected,
                           note="projected walk is not a walk of P_C(G_uv)")
        longest = max(longest, len(projected) - 1)

    return _report("T4", inst, "pass", {"pairs": len(pairs), "closure_added": len(added),
                                        "longest_projected_walk": longest})


def check_faces_dense(inst: Instance, options: CheckOptions) -> TheoremReport:
    """T5: internal faces are Delta*-dense, form a basis, and sum to the outer face."""
    G, emb = inst.graph, inst.embedding
    if emb is None:
        raise PathSpaceError("T5 needs an instance with a plane embedding")
    faces_C = internal_faces(G, emb)
    span = spans_cycle_space(faces_C, G)
    fold = reduce(xor, faces_C.matrix, 0)
    dense = is_delta_star_dense(faces_C, G)
    metrics: Dict[str, MetricValue] = {"faces": len(faces_C), "rank": span.rank,
                                       "dimension": span.dimension, "dense": dense}
    if not dense:
        return _report("T5", inst, "fail", metrics, C=faces_C, note="internal faces are not Delta*-dense")
    if span.rank != len(faces_C) or not span.spans or fold != outer_face(emb).mask:
        return _report("T5", inst, "fail", metrics, C=faces_C,
                       note="internal faces are not a basis summing to the outer face")
    return _report("T5", inst, "pass", metrics, C=faces_C)


def _all_pairs_connected(theorem: str, inst: Instance, options: CheckOptions, C: CycleSet,
                         pairs: Sequence[Tuple[int, int]], label: str) -> Optional[TheoremReport]:
    for u, v in pairs:
        PG = build_path_graph(inst.graph, u, v, C, max_paths=options.max_paths)
        if not _connected(PG):
            return _report(theorem, inst, "fail", {"u": u, "v": v, "components": len(components(PG))},
                           C=C, note=f"{label}: P_C(G_uv) is disconnected for u={u}, v={v}")
    return None


def check_faces_connected(inst: Instance, options: CheckOptions) -> TheoremReport:
    """C1: with C the internal faces, P_C(G_uv) is connected for every pair."""
    if inst.embedding is None:
        raise PathSpaceError("C1 needs an instance with a plane embedding")
    faces_C = internal_faces(inst.graph, inst.embedding)
    pairs = _pairs(inst)
    failed = _all_pairs_connected("C1", inst, options, faces_C, pairs, "internal faces")
    return failed or _report("C1", inst, "pass", {"pairs": len(pairs), "faces": len(faces_C)}, C=faces_C)


def check_edge_cycles_dense(inst: Instance, options: CheckOptions) -> TheoremReport:
    """T6: for every edge e, the cycles through e are Delta*-dense."""
    G = inst.graph
    for e in range(G.m):
        C = cycles_through_edge(G, e)
        if not is_delta_star_dense(C, G):
            return _report("T6", inst, "fail", {"edge": e}, C=C,
                           note=f"cycles through edge {e} are not Delta*-dense")
    return _report("T6", inst, "pass", {"edges": G.m})


def check_edge_cycles_connected(inst: Instance, options: CheckOptions) -> TheoremReport:
    """C2: for every edge e and pair (u, v), P_{C_e}(G_uv) is connected."""
    G = inst.graph
    pairs = _pairs(inst)
    for e in range(G.m):
        failed = _all_pairs_connected("C2", inst, options, cycles_through_edge(G, e), pairs,
                                      f"cycles through edge {e}")
        if failed:
            return failed
    return _report("C2", inst, "pass", {"edges": G.m, "pairs": len(pairs)})


def check_vertex_cycles_connected(inst: Instance, options: CheckOptions) -> TheoremReport:
    """C3: with C the cycles through u, P_C(G_uv) is connected for every v."""
    G = inst.graph
    checked = 0
    for w in range(G.vertex_count):
        C = cycles_through_vertex(G, w)
        pairs = [(u, v) for u, v in _pairs(inst) if w in (u, v)]
        failed = _all_pairs_connected("C3", inst, options, C, pairs, f"cycles through vertex {w}")
        if failed:
            return failed
        checked += len(pairs)
    return _report("C3", inst, "pass", {"vertices": G.vertex_count, "pairs": checked})


def check_lemma_exchange(inst: Instance, options: CheckOptions) -> TheoremReport:
    """
    L1: adding a cycle with Property Delta* never changes connectedness.

    For every sigma outside C with Delta* w.r.t. C, connectedness of
    P_{C ∪ {sigma}}(G_uv) and P_C(G_uv) must agree, and every sigma-labelled
    adjacency S, T must interpolate through some Q with S Δ Q, Q Δ T in C
    (cross-checked by BFS distance <= 2 in P_C(G_uv)).
    """
    G = inst.graph
    C = _cycles(inst, "L1")
    pairs = _pairs(inst)
    full = {(u, v): build_path_graph(G, u, v, max_paths=options.max_paths) for u, v in pairs}
    base = {pair: restrict(PG, C) for pair, PG in full.items()}

    sigmas = interpolations = 0
    for sigma in enumerate_all_cycles(G).cycles:
        if sigma in C or not has_property_delta_star(G, sigma, C):
            continue
        sigmas += 1
        C_plus = C.with_cycles([sigma])
        for pair in pairs:
            PC = base[pair]
            if _connected(PC) != _connected(restrict(full[pair], C_plus)):
                return _report("L1", inst, "fail", {"u": pair[0], "v": pair[1]},
                               note=f"adding cycle {sigma.edge_indices()} changed connectedness")
            for i, j, mask in full[pair].edges:
                if mask != sigma.mask:
                    continue
                S, T = full[pair].paths[i], full[pair].paths[j]
                try:
                    Q = interpolate(S, T, C)
                except InterpolationError as e:
                    return _report("L1", inst, "fail", {"u": pair[0], "v": pair[1]}, paths=[S, T],
                                   note=f"finding: {e}")
                d = distance(PC, S, T)
                if S.mask ^ Q.mask not in C or Q.mask ^ T.mask not in C or d is None or d > 2:
                    return _report("L1", inst, "fail", {"u": pair[0], "v": pair[1]}, paths=[S, Q, T],
                                   note="interpolated path leaves C or exceeds distance 2")
                interpolations += 1

    return _report("L1", inst, "pass", {"pairs": len(pairs), "sigmas": sigmas,
                                        "interpolations": interpolations})


def check_closure_properties(inst: Instance, options: CheckOptions) -> TheoremReport:
    """CL: Cl(C) contains C, is idempotent, and does not depend on the scan order or on batching."""
    G = inst.graph
    C = _cycles(inst, "CL")
    rng = _rng(options, "CL", inst)
    closure = delta_star_closure(C, G)
    metrics: Dict[str, MetricValue] = {"size": len(C), "closure_size": len(closure),
                                       "orders": options.closure_orders}
    if not C.masks <= closure.masks:
        return _report("CL", inst, "fail", metrics, note="closure does not contain C")
    if delta_star_closure(closure, G).masks != closure.masks:
        return _report("CL", inst, "fail", metrics, note="closure is not idempotent")

    everything = list(enumerate_all_cycles(G).cycles)
    for k in range(options.closure_orders):
        order = rng.sample(everything, len(everything))
        other = delta_star_closure(C, G, order=order, batch=k % 2 == 1)
        if other.masks != closure.masks:
            return _report("CL", inst, "fail", metrics,
                           note=f"scan order {k} ({'sequential' if k % 2 else 'batch'}) gives another closure")
    return _report("CL", inst, "pass", metrics)


THEOREM_CHECKS: Dict[str, Callable[[Instance, CheckOptions], Optional[TheoremReport]]] = {
    "T1": check_path_graph_connected,
    "T2": check_diameter_bound,
    "T3": check_necessary_condition,
    "T3-counterexample": check_spanning_counterexample,
    "T4": check_dense_connected,
    "T5": check_faces_dense,
    "C1": check_faces_connected,
    "T6": check_edge_cycles_dense,
    "C2": check_edge_cycles_connected,
    "C3": check_vertex_cycles_connected,
    "L1": check_lemma_exchange,
    "CL": check_closure_properties,
}

THEOREM_IDS = tuple(THEOREM_CHECKS)
