import logging
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from config.common_settings import settings
from uv_path_graphs.src.cycle_space import CycleSet
from uv_path_graphs.src.errors import (
    EnumerationLimitError,
    InvalidCycleError,
    InvalidPathError,
    PathSpaceError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import (
    Cycle,
    Graph,
    Path,
    exchange_split,
    is_two_connected,
    iter_bits,
    shortest_uv_path,
)

# Set up a logger for the module
logger = logging.getLogger(__name__)

DISCONNECTED = "disconnected"


class Adjacency(BaseModel):
    """Outcome of the subpath-exchange test; truthy when the paths are adjacent."""

    model_config = ConfigDict(frozen=True)

    adjacent: bool
    x: Optional[int] = None
    y: Optional[int] = None
    cycle_mask: Optional[int] = None

    def __bool__(self) -> bool:
        return self.adjacent


class MergeState(BaseModel):
    """
    Indices of one step of the connectivity construction.

    common_prefix is n(S, T), the number of shared initial edges; k is the
    first index after it at which T returns to a vertex of S, and m is the
    position of that vertex on S.
    """

    model_config = ConfigDict(frozen=True)

    common_prefix: int = Field(..., ge=0)
    k: int = Field(..., ge=1)
    m: int = Field(..., ge=1)


class PathGraph(BaseModel):
    """
    The u-v path graph P(G_uv), or its restriction P_C(G_uv).

    Vertices are the u-v paths (indices into `paths`). Every adjacency is kept
    with its exchange cycle S Δ T as an edge mask: `edges` holds the ones that
    survive the restriction, `restricted_out` the ones the restriction removed.

    Attributes
    ----------
    paths : tuple of Path
        All simple u-v paths, ordered by length then vertex sequence.
    edges : tuple of (i, j, cycle mask)
        Path-graph edges with i < j.
    restriction : CycleSet, optional
        The cycle family C, absent for the unrestricted graph.
    restricted_out : tuple of (i, j, cycle mask)
        Adjacent pairs whose exchange cycle is not in C.
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    u: int
    v: int
    paths: Tuple[Path, ...]
    edges: Tuple[Tuple[int, int, int], ...] = ()
    restriction: Optional[CycleSet] = Field(default=None, repr=False)
    restricted_out: Tuple[Tuple[int, int, int], ...] = ()

    _rows: List[int] = PrivateAttr(default_factory=list)
    _index: Dict[Tuple[int, ...], int] = PrivateAttr(default_factory=dict)
    _labels: Dict[Tuple[int, int], int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        rows = [0] * len(self.paths)
        for i, j, mask in self.edges:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
            self._labels[(i, j)] = mask
            self._labels[(j, i)] = mask
        self._rows = rows
        self._index = {p.vertices: i for i, p in enumerate(self.paths)}

    @property
    def size(self) -> int:
        return len(self.paths)

    def index_of(self, P: Path) -> int:
        try:
            return self._index[P.vertices]
        except KeyError as e:
            raise InvalidPathError(f"{P.label()} is not a {self.u}-{self.v} path of this graph") from e

    def row(self, i: int) -> int:
        """Bitset of the neighbours of path i."""
        return self._rows[i]

    def neighbors(self, i: int) -> List[int]:
        return list(iter_bits(self._rows[i]))

    def exchange_cycle(self, i: int, j: int) -> Optional[int]:
        """Edge mask of the exchange cycle on path-graph edge {i, j}, if present."""
        return self._labels.get((i, j))


def enumerate_uv_paths(G: Graph, u: int, v: int, max_paths: Optional[int] = None) -> List[Path]:
    """
    All simple u-v paths, ordered by length then lexicographic vertex sequence.

    DFS backtracking with a visited bitmask; raises EnumerationLimitError once
    more than `max_paths` (default settings.MAX_PATHS) paths are found.
    """
    limit = settings.MAX_PATHS if max_paths is None else max_paths
    for w in (u, v):
        if not G.has_vertex(w):
            raise UnknownElementError(f"vertex {w} is outside 0..{G.vertex_count - 1}")
    if u == v:
        raise InvalidPathError("u and v must differ")

    found: List[Tuple[int, ...]] = []
    stack = [u]

    def extend(w: int, visited: int) -> None:
        for x, _ in G.incident(w):
            if visited >> x & 1:
                continue
            stack.append(x)
            if x == v:
                found.append(tuple(stack))
                if len(found) > limit:
                    raise EnumerationLimitError(
                        f"more than {limit} paths join {u} and {v}; raise --max-paths to continue")
            else:
                extend(x, visited | 1 << x)
            stack.pop()

    extend(u, 1 << u)
    found.sort(key=lambda p: (len(p), p))
    return [Path(graph=G, vertices=p) for p in found]


def are_adjacent(S: Path, T: Path) -> Adjacency:
    """
    Whether T arises from S by replacing a subpath S_xy with an internally
    disjoint subpath T_xy.

    Decided by the prefix/suffix split, not by "S Δ T is a cycle": in K4 the
    paths u-x-y-v and u-y-x-v differ by one 4-cycle yet are not adjacent.
    """
    if S.vertices == T.vertices or (S.start, S.end) != (T.start, T.end):
        return Adjacency(adjacent=False)
    split = exchange_split(S, T)
    if split is None:
        return Adjacency(adjacent=False)
    return Adjacency(adjacent=True, x=split.x, y=split.y, cycle_mask=S.mask ^ T.mask)


def build_path_graph(G: Graph,
                     u: int,
                     v: int,
                     C: Optional[CycleSet] = None,
                     max_paths: Optional[int] = None) -> PathGraph:
    """
    Build P(G_uv), or P_C(G_uv) when a cycle family C is given.

    Paths S, T are joined when they are adjacent and (without C) always, or
    (with C) when S Δ T is a member of C.
    """
    if C is not None and C.graph != G:
        raise InvalidCycleError("the cycle set does not belong to this graph")
    if not is_two_connected(G):
        logger.warning("Graph on %d vertices is not 2-connected; building the path graph anyway",
                       G.vertex_count)

    paths = enumerate_uv_paths(G, u, v, max_paths=max_paths)
    kept, dropped = [], []
    for i in range(len(paths)):
        S = paths[i]
        for j in range(i + 1, len(paths)):
            T = paths[j]
            if exchange_split(S, T) is None:
                continue
            mask = S.mask ^ T.mask
            if C is None or mask in C.masks:
                kept.append((i, j, mask))
            else:
                dropped.append((i, j, mask))

    logger.debug("Path graph %d-%d: %d paths, %d edges kept, %d restricted out",
                 u, v, len(paths), len(kept), len(dropped))
    return PathGraph(graph=G, u=u, v=v, paths=tuple(paths), edges=tuple(kept),
                     restriction=C, restricted_out=tuple(dropped))


def restrict(PG: PathGraph, C: Optional[CycleSet]) -> PathGraph:
    """P_C(G_uv) derived from an already built path graph by filtering its labelled edges."""
    if C is not None and C.graph != PG.graph:
        raise InvalidCycleError("the cycle set does not belong to this graph")
    everything = sorted(PG.edges + PG.restricted_out)
    kept = tuple(e for e in everything if C is None or e[2] in C.masks)
    dropped = tuple(e for e in everything if C is not None and e[2] not in C.masks)
    return PathGraph(graph=PG.graph, u=PG.u, v=PG.v, paths=PG.paths, edges=kept,
                     restriction=C, restricted_out=dropped)


def _reach(PG: PathGraph, source: int) -> List[int]:
    """Bitset of each BFS layer from `source`."""
    layers = [1 << source]
    seen = 1 << source
    frontier = seen
    while frontier:
        nxt = 0
        for i in iter_bits(frontier):
            nxt |= PG.row(i)
        frontier = nxt & ~seen
        seen |= frontier
        if frontier:
            layers.append(frontier)
    return layers


def components(PG: PathGraph) -> List[List[int]]:
    """Connected components as sorted index lists, ordered by smallest member."""
    remaining = (1 << PG.size) - 1
    parts = []
    while remaining:
        source = (remaining & -remaining).bit_length() - 1
        reached = 0
        for layer in _reach(PG, source):
            reached |= layer
        parts.append(list(iter_bits(reached)))
        remaining &= ~reached
    return parts


def path_graph_diameter(PG: PathGraph) -> Union[int, Literal["disconnected"]]:
    """Largest BFS distance between two paths, or "disconnected"."""
    if PG.size == 0:
        return DISCONNECTED
    full = (1 << PG.size) - 1
    diameter = 0
    for source in range(PG.size):
        layers = _reach(PG, source)
        reached = 0
        for layer in layers:
            reached |= layer
        if reached != full:
            return DISCONNECTED
        diameter = max(diameter, len(layers) - 1)
    return diameter


def distance(PG: PathGraph, S: Path, T: Path) -> Optional[int]:
    """BFS distance between two paths in the path graph; None when unreachable."""
    target = 1 << PG.index_of(T)
    for d, layer in enumerate(_reach(PG, PG.index_of(S))):
        if layer & target:
            return d
    return None


def shortest_walk(PG: PathGraph, S: Path, T: Path) -> Optional[List[Path]]:
    """A BFS shortest walk from S to T in the path graph, or None when unreachable."""
    source, target = PG.index_of(S), PG.index_of(T)
    parent = {source: source}
    frontier = [source]
    while frontier and target not in parent:
        nxt = []
        for i in frontier:
            for j in PG.neighbors(i):
                if j not in parent:
                    parent[j] = i
                    nxt.append(j)
        frontier = nxt
    if target not in parent:
        return None
    walk = [target]
    while walk[-1] != source:
        walk.append(parent[walk[-1]])
    return [PG.paths[i] for i in reversed(walk)]


def farthest_pair(PG: PathGraph) -> Optional[Tuple[Path, Path, int]]:
    """A pair of paths realising the diameter (first found), or None if disconnected."""
    best = None
    for source in range(PG.size):
        layers = _reach(PG, source)
        if sum(layer.bit_count() for layer in layers) != PG.size:
            return None
        d = len(layers) - 1
        if best is None or d > best[2]:
            target = (layers[-1] & -layers[-1]).bit_length() - 1
            best = (PG.paths[source], PG.paths[target], d)
    return best


########## constructive connectivity ##########

def common_prefix_edges(S: Path, T: Path) -> int:
    """n(S, T): the number of consecutive initial edges S and T share."""
    n = 0
    s, t = S.vertices, T.vertices
    while n + 1 < len(s) and n + 1 < len(t) and s[n + 1] == t[n + 1]:
        n += 1
    return n


def merge_step(S: Path, T: Path) -> Tuple[Path, MergeState]:
    """
    One step towards T: S' = x_0..x_n, y_{n+1}..y_{n+k}, x_{m+1}..x_s.

    n is the shared-prefix edge count, k the least i >= 1 with y_{n+i} on S,
    and m the position of that vertex on S. S' is adjacent to S and shares at
    least n + 1 initial edges with T.
    """
    if S.vertices == T.vertices:
        raise InvalidPathError("merge_step needs two different paths")
    if (S.start, S.end) != (T.start, T.end):
        raise InvalidPathError("paths join different vertices")

    xs, ys = S.vertices, T.vertices
    n = common_prefix_edges(S, T)
    position = {w: i for i, w in enumerate(xs)}

    k = next(i for i in range(1, len(ys) - n) if ys[n + i] in position)
    m = position[ys[n + k]]

    if logger.isEnabledFor(logging.DEBUG):
        t_vertices = set(ys)
        j = next(i for i in range(1, len(xs) - n) if xs[n + i] in t_vertices)
        l = ys.index(xs[n + j])
        logger.debug("merge_step n=%d k=%d m=%d (j=%d l=%d unused)", n, k, m, j, l)

    merged = xs[:n + 1] + ys[n + 1:n + k + 1] + xs[m + 1:]
    return Path(graph=S.graph, vertices=merged), MergeState(common_prefix=n, k=k, m=m)


def merge_walk(S: Path, T: Path) -> List[Path]:
    """A walk S = W_0, ..., W_r = T of adjacent paths with r <= l(T)."""
    walk = [S]
    while walk[-1].vertices != T.vertices:
        walk.append(merge_step(walk[-1], T)[0])
    return walk


def _erase_loops(walk: Sequence[Path]) -> List[Path]:
    out: List[Path] = []
    position: Dict[Tuple[int, ...], int] = {}
    for W in walk:
        if W.vertices in position:
            cut = position[W.vertices]
            for dropped in out[cut + 1:]:
                del position[dropped.vertices]
            out = out[:cut + 1]
            continue
        position[W.vertices] = len(out)
        out.append(W)
    return out


def bounded_route(G: Graph, u: int, v: int, S: Path, T: Path) -> List[Path]:
    """
    A walk from S to T of length at most 2 d_G(u, v).

    Both paths are merged towards a shortest u-v path P; the second walk is
    reversed and the two are concatenated (repeated paths are cut out).
    """
    for W in (S, T):
        if (W.start, W.end) != (u, v):
            raise InvalidPathError(f"{W.label()} does not join {u} and {v}")
    P = shortest_uv_path(G, u, v)
    to_p = merge_walk(S, P)
    from_p = list(reversed(merge_walk(T, P)))
    return _erase_loops(to_p + from_p[1:])


def walk_labels(walk: Sequence[Path]) -> List[int]:
    """Exchange-cycle masks of consecutive steps of a walk."""
    return [a.mask ^ b.mask for a, b in zip(walk, walk[1:])]


def is_walk(PG: PathGraph, walk: Sequence[Path]) -> bool:
    """Whether consecutive members of `walk` are joined in PG."""
    indices = [PG.index_of(W) for W in walk]
    return all(PG.row(a) >> b & 1 for a, b in zip(indices, indices[1:]))


def necessary_condition_pair(G: Graph, u: int, v: int, sigma: Cycle) -> Tuple[Path, Path]:
    """
    Two u-v paths S, T with S Δ T = sigma.

    Disjoint paths P_u, P_v join u and v to sigma (Menger, via networkx
    node-disjoint paths through auxiliary terminals); their ends u', v' split
    sigma into arcs Q and R, and S = P_u Q P_v, T = P_u R P_v.
    """
    if u == v:
        raise InvalidPathError("u and v must differ")
    on_sigma = set(sigma.vertices)
    aux = G.to_networkx().copy()
    source, sink = ("source",), ("sink",)
    aux.add_edges_from([(source, u), (source, v)])
    aux.add_edges_from((w, sink) for w in sigma.vertices)
    try:
        routes = list(nx.node_disjoint_paths(aux, source, sink))
    except nx.NetworkXException as e:
        raise PathSpaceError(f"no disjoint attachments from {u}, {v} to the cycle") from e
    if len(routes) < 2:
        raise PathSpaceError(f"no disjoint attachments from {u}, {v} to the cycle; is G 2-connected?")

    attach: Dict[int, List[int]] = {}
    for route in routes[:2]:
        inner = route[1:-1]
        first_on_sigma = next(i for i, w in enumerate(inner) if w in on_sigma)
        attach[inner[0]] = inner[:first_on_sigma + 1]
    p_u, p_v = attach[u], attach[v]

    ring = sigma.vertices
    start, stop = ring.index(p_u[-1]), ring.index(p_v[-1])
    forward = [ring[(start + i) % len(ring)] for i in range((stop - start) % len(ring) + 1)]
    backward = [ring[(start - i) % len(ring)] for i in range((start - stop) % len(ring) + 1)]

    tail = list(reversed(p_v))[1:]
    S = Path(graph=G, vertices=tuple(p_u[:-1] + forward + tail))
    T = Path(graph=G, vertices=tuple(p_u[:-1] + backward + tail))
    return S, T
