import logging
from functools import lru_cache
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from uv_path_graphs.src.cycle_space import CycleSet, _forest, cycles_of_subgraph, enumerate_all_cycles
from uv_path_graphs.src.errors import (
    DeltaStarError,
    DisconnectedGraphError,
    EdgeSetMismatchError,
    InterpolationError,
    InvalidCycleError,
    NotAdjacentError,
    UnicycleError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import (
    Cycle,
    Graph,
    Monocle,
    NotAdjacentShape,
    Path,
    _validation_message,
    classify_union,
    cycle_from_mask,
    exchange_split,
    iter_bits,
)

# Set up a logger for the module
logger = logging.getLogger(__name__)

# (e, alpha mask, beta mask) with alpha < beta and alpha Δ beta = sigma
WitnessPair = Tuple[int, int, int]


class Unicycle(BaseModel):
    """
    A spanning connected subgraph with exactly one cycle.

    Such a subgraph has as many edges as vertices; `cycle` is its unique cycle.
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    mask: int = Field(..., ge=0)
    cycle: Cycle

    @model_validator(mode="after")
    def validate_unicycle(self):
        G = self.graph
        if self.mask >> G.m:
            raise ValueError(f"edge mask uses edges beyond 0..{G.m - 1}")
        if self.mask.bit_count() != G.vertex_count:
            raise ValueError(f"{self.mask.bit_count()} edges on {G.vertex_count} vertices is not a unicycle")
        _, reached = _forest(G, self.mask)
        if len(reached) != G.vertex_count:
            raise ValueError("edge set is not spanning and connected")
        if self.cycle.mask & ~self.mask:
            raise ValueError(f"cycle {self.cycle.edge_indices()} is not inside the edge set")
        return self

    def edge_indices(self) -> List[int]:
        return list(iter_bits(self.mask))


class DeltaStarWitness(BaseModel):
    """
    Evidence that one unicycle U containing sigma passes the Delta* test.

    Attributes
    ----------
    unicycle : Unicycle
        The unicycle U.
    e : int
        An edge of G outside U.
    alpha, beta : Cycle
        Members of C inside U + e with alpha Δ beta = sigma.
    connector : Path
        alpha ∩ beta: the path through e shared by both cycles; its ends lie on sigma.
    """

    model_config = ConfigDict(frozen=True)

    unicycle: Unicycle
    e: int
    alpha: Cycle
    beta: Cycle
    connector: Path


class DeltaStarCheck(BaseModel):
    """Result of the Delta* test; truthy when the property holds."""

    model_config = ConfigDict(frozen=True)

    sigma: Cycle
    holds: bool
    witnesses: Tuple[DeltaStarWitness, ...] = ()
    failing_unicycle: Optional[Unicycle] = None

    def __bool__(self) -> bool:
        return self.holds


def _unicycle(G: Graph, mask: int, sigma: Cycle) -> Unicycle:
    try:
        return Unicycle(graph=G, mask=mask, cycle=sigma)
    except ValidationError as e:
        raise UnicycleError(_validation_message(e)) from e


def _check_cycle_of(G: Graph, sigma: Cycle) -> None:
    if sigma.graph != G:
        raise EdgeSetMismatchError("the cycle belongs to another graph")


def _path_from_mask(G: Graph, mask: int, start: int) -> Optional[Tuple[int, ...]]:
    """Vertex order of `mask` read as a simple path from `start`, or None."""
    walk = [start]
    used = 0
    while True:
        steps = [(x, k) for x, k in G.incident(walk[-1]) if mask >> k & 1 and not used >> k & 1]
        if not steps:
            break
        if len(steps) > 1:
            return None
        x, k = steps[0]
        if x in walk:
            return None
        used |= 1 << k
        walk.append(x)
    return tuple(walk) if used == mask else None


########## unicycles ##########

def _spanning_tree_masks(G: Graph, sigma_vertices: frozenset) -> List[int]:
    """
    Spanning trees of G with sigma contracted to one node, as edge masks of G.

    Include/exclude backtracking over the edges not induced by sigma, with a
    union-find over the contracted vertex set to reject cycles.
    """
    hub = min(sigma_vertices)

    def node(w: int) -> int:
        return hub if w in sigma_vertices else w

    candidates = [k for k, (a, b) in enumerate(G.edges)
                  if not (a in sigma_vertices and b in sigma_vertices)]
    need = G.vertex_count - len(sigma_vertices)
    trees: List[int] = []

    def find(parent: List[int], w: int) -> int:
        while parent[w] != w:
            w = parent[w]
        return w

    def search(i: int, chosen: int, count: int, parent: List[int]) -> None:
        if count == need:
            trees.append(chosen)
            return
        if len(candidates) - i < need - count:
            return
        k = candidates[i]
        a, b = G.edges[k]
        ra, rb = find(parent, node(a)), find(parent, node(b))
        if ra != rb:
            joined = list(parent)
            joined[ra] = rb
            search(i + 1, chosen | 1 << k, count + 1, joined)
        search(i + 1, chosen, count, parent)

    search(0, 0, 0, list(range(G.vertex_count)))
    return sorted(trees)


def enumerate_unicycles_containing(G: Graph, sigma: Cycle) -> List[Unicycle]:
    """
    Every unicycle of G whose unique cycle is sigma, sorted by edge mask.

    Realised as sigma plus a spanning tree of G / sigma (sigma contracted to a
    single node); chords of sigma would close a second cycle and are skipped.
    """
    _check_cycle_of(G, sigma)
    return [_unicycle(G, sigma.mask | tree, sigma)
            for tree in _spanning_tree_masks(G, frozenset(sigma.vertices))]


def extend_monocle_to_unicycle(G: Graph, M: Monocle) -> Unicycle:
    """Grow M into a unicycle by BFS from its vertices, neighbours in index order."""
    _check_cycle_of(G, M.cycle)
    mask = M.mask
    reached = set(G.vertices_of(mask)) | {M.u, M.v}
    queue = sorted(reached)
    for w in queue:
        for x, k in G.incident(w):
            if x not in reached:
                reached.add(x)
                mask |= 1 << k
                queue.append(x)
    if len(reached) != G.vertex_count:
        raise DisconnectedGraphError("the monocle does not reach every vertex; G is disconnected")
    return _unicycle(G, mask, M.cycle)


def cycles_in_unicycle_plus_edge(U: Unicycle, e: int) -> CycleSet:
    """All simple cycles of U + e: the cycle of U, the cycle closed by e and, if simple, their sum."""
    G = U.graph
    if not 0 <= e < G.m:
        raise UnknownElementError(f"edge {e} is outside 0..{G.m - 1}")
    if U.mask >> e & 1:
        raise UnicycleError(f"edge {e} already lies in the unicycle")
    masks = cycles_of_subgraph(G, U.mask | 1 << e)
    return CycleSet(graph=G, cycles=tuple(cycle_from_mask(G, m) for m in masks))


########## Property Delta* ##########

@lru_cache(maxsize=65536)
def _witness_pairs(G: Graph, sigma_mask: int, unicycle_mask: int) -> Tuple[WitnessPair, ...]:
    """
    Candidate witnesses on one unicycle, independent of C.

    For each e outside U (index order), the pairs of cycles of U + e whose sum is
    sigma. sigma itself never pairs (its partner would be empty), so this is at
    most the two cycles through e.
    """
    pairs = []
    for e in iter_bits(G.full_mask & ~unicycle_mask):
        cycles = cycles_of_subgraph(G, unicycle_mask | 1 << e)
        for a, b in combinations(cycles, 2):
            if a ^ b == sigma_mask:
                pairs.append((e, a, b))
    return tuple(pairs)


@lru_cache(maxsize=4096)
def _unicycle_masks(G: Graph, sigma_mask: int) -> Tuple[int, ...]:
    sigma = cycle_from_mask(G, sigma_mask)
    return tuple(sigma_mask | tree for tree in _spanning_tree_masks(G, frozenset(sigma.vertices)))


def _first_witness(G: Graph, sigma_mask: int, unicycle_mask: int, members) -> Optional[WitnessPair]:
    for e, a, b in _witness_pairs(G, sigma_mask, unicycle_mask):
        if a in members and b in members:
            return e, a, b
    return None


def _holds(G: Graph, sigma_mask: int, members) -> bool:
    return all(_first_witness(G, sigma_mask, U, members) is not None
               for U in _unicycle_masks(G, sigma_mask))


def _witness(U: Unicycle, found: WitnessPair) -> DeltaStarWitness:
    G = U.graph
    e, a, b = found
    shared = a & b
    # alpha ∩ beta is a path through e; start it at its smaller end
    ends = [w for w in G.vertices_of(shared) if (shared & G.incident_mask(w)).bit_count() == 1]
    return DeltaStarWitness(unicycle=U, e=e,
                            alpha=cycle_from_mask(G, a), beta=cycle_from_mask(G, b),
                            connector=Path(graph=G, vertices=_path_from_mask(G, shared, min(ends))))


def has_property_delta_star(G: Graph, sigma: Cycle, C: CycleSet) -> DeltaStarCheck:
    """
    Whether sigma has Property Delta* with respect to C.

    For every unicycle U containing sigma there must be an edge e outside U and
    alpha, beta in C inside U + e with alpha Δ beta = sigma. sigma in C is not a
    shortcut: the test is applied as stated. Returns one witness per unicycle, or
    the first unicycle that has none.
    """
    _check_cycle_of(G, sigma)
    if C.graph != G:
        raise InvalidCycleError("the cycle set does not belong to this graph")

    witnesses = []
    for U in enumerate_unicycles_containing(G, sigma):
        found = _first_witness(G, sigma.mask, U.mask, C.masks)
        if found is None:
            logger.debug("No Delta* witness for cycle %s on unicycle %s",
                         sigma.edge_indices(), U.edge_indices())
            return DeltaStarCheck(sigma=sigma, holds=False, failing_unicycle=U)
        witnesses.append(_witness(U, found))
    return DeltaStarCheck(sigma=sigma, holds=True, witnesses=tuple(witnesses))


########## closure ##########

def _scan_order(G: Graph, order: Optional[Sequence[Union[Cycle, int]]]) -> List[Cycle]:
    if order is None:
        return list(enumerate_all_cycles(G).cycles)
    scan = []
    for item in order:
        if isinstance(item, Cycle):
            _check_cycle_of(G, item)
            scan.append(item)
        else:
            scan.append(cycle_from_mask(G, item))
    return scan


def closure_sequence(C: CycleSet,
                     G: Graph,
                     order: Optional[Sequence[Union[Cycle, int]]] = None,
                     batch: bool = True) -> List[Cycle]:
    """
    The cycles added to C, in the order the closure adds them.

    Candidates are scanned in `order` (default: enumerate_all_cycles order).
    With `batch`, each pass tests every candidate against the set as it stood at
    the start of the pass and adds the passing ones together; otherwise a passing
    candidate joins immediately. Passes repeat until one adds nothing.
    """
    if C.graph != G:
        raise InvalidCycleError("the cycle set does not belong to this graph")
    scan = _scan_order(G, order)
    members = set(C.masks)
    added: List[Cycle] = []
    passes = 0
    while True:
        passes += 1
        fresh = []
        for sigma in scan:
            if sigma.mask in members:
                continue
            if _holds(G, sigma.mask, members):
                fresh.append(sigma)
                if not batch:
                    members.add(sigma.mask)
        if not fresh:
            break
        members.update(c.mask for c in fresh)
        added.extend(fresh)
    logger.debug("Closure of %d cycles: %d added in %d passes", len(C), len(added), passes)
    return added


def delta_star_closure(C: CycleSet,
                       G: Graph,
                       order: Optional[Sequence[Union[Cycle, int]]] = None,
                       batch: bool = True) -> CycleSet:
    """Cl(C): C followed by the cycles closure_sequence adds."""
    return C.with_cycles(closure_sequence(C, G, order=order, batch=batch))


def is_delta_star_dense(C: CycleSet, G: Graph) -> bool:
    """Whether Cl(C) is the set of all cycles of G."""
    closure = delta_star_closure(C, G)
    return closure.masks == enumerate_all_cycles(G).masks


########## constructive exchange ##########

def interpolate(S: Path, T: Path, C: CycleSet) -> Path:
    """
    A path Q with S Δ Q and Q Δ T in C, for adjacent S, T.

    If sigma = S Δ T is in C, T itself is returned. Otherwise S ∪ T (a monocle)
    is grown into a unicycle U, and for each witness (e, alpha, beta) on U the
    candidates S Δ alpha and S Δ beta are tried; Q Δ T is then the other cycle.
    """
    if exchange_split(S, T) is None:
        raise NotAdjacentError(f"{S.label()} and {T.label()} are not adjacent")
    G = S.graph
    sigma_mask = S.mask ^ T.mask
    if sigma_mask in C:
        return T

    M = classify_union(S, T)
    if isinstance(M, NotAdjacentShape):
        raise NotAdjacentError(M.reason)
    U = extend_monocle_to_unicycle(G, M)

    tried = 0
    for e, a, b in _witness_pairs(G, sigma_mask, U.mask):
        if a not in C or b not in C:
            continue
        tried += 1
        for alpha in (a, b):
            vertices = _path_from_mask(G, S.mask ^ alpha, S.start)
            if vertices is None or vertices[-1] != S.end:
                continue
            Q = Path(graph=G, vertices=vertices)
            if exchange_split(S, Q) is not None and exchange_split(Q, T) is not None:
                logger.debug("Interpolated %s -> %s -> %s via edge %d", S.label(), Q.label(), T.label(), e)
                return Q

    if not tried:
        raise DeltaStarError("property Δ* fails: the unicycle of S ∪ T has no witness in C")
    raise InterpolationError(
        f"no intermediate path between {S.label()} and {T.label()} from {tried} witness(es)")


def project_walk(walk: Sequence[Path], C: CycleSet, sigma: Cycle) -> List[Path]:
    """
    Turn a walk in P_{C ∪ {sigma}}(G_uv) into one in P_C(G_uv) with the same ends.

    Each sigma-labelled step is replaced by the at most two steps from interpolate.
    """
    if not walk:
        return []
    projected = [walk[0]]
    for a, b in zip(walk, walk[1:]):
        if exchange_split(a, b) is None:
            raise NotAdjacentError(f"{a.label()} and {b.label()} are not adjacent")
        label = a.mask ^ b.mask
        if label in C:
            projected.append(b)
        elif label == sigma.mask:
            Q = interpolate(a, b, C)
            if Q.vertices != b.vertices:
                projected.append(Q)
            projected.append(b)
        else:
            raise NotAdjacentError(
                f"step {a.label()} -> {b.label()} uses a cycle outside C and sigma")
    return projected


def project_along_closure(walk: Sequence[Path], C: CycleSet, added: Iterable[Cycle]) -> List[Path]:
    """
    Project a walk in P_{Cl(C)}(G_uv) down to P_C(G_uv).

    `added` is the closure sequence; cycles are peeled off last-added first, each
    against C plus the cycles added before it.
    """
    added = list(added)
    current = list(walk)
    for i in range(len(added) - 1, -1, -1):
        current = project_walk(current, C.with_cycles(added[:i]), added[i])
    return current
