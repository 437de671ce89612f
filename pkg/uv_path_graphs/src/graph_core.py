import logging
from typing import Dict, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, model_validator

from uv_path_graphs.src.errors import (
    EdgeSetMismatchError,
    GraphConstructionError,
    InvalidCycleError,
    InvalidPathError,
    NotAdjacentError,
    UnknownElementError,
)

# Set up a logger for the module
logger = logging.getLogger(__name__)


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of `mask` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _validation_message(e: ValidationError) -> str:
    messages = [err["msg"].removeprefix("Value error, ") for err in e.errors()]
    return "; ".join(messages)


class Graph(BaseModel):
    """
    Simple undirected graph with stable vertex and edge indices.

    Vertices are `0 .. vertex_count - 1`. Edge `k` is always the k-th pair given
    at construction, so every edge set in the package is an integer bitmask over
    these indices.

    Attributes
    ----------
    vertex_count : int
        Number of vertices.
    edges : tuple of (int, int)
        Edge list in construction order; endpoints distinct, no duplicates.
    labels : tuple of str
        Optional display label per vertex (empty tuple when not given).
    """

    model_config = ConfigDict(frozen=True)

    vertex_count: int = Field(..., ge=0, description="Number of vertices")
    edges: Tuple[Tuple[int, int], ...] = Field(default=(), description="Edge k is the k-th pair")
    labels: Tuple[str, ...] = Field(default=(), description="Display label per vertex")

    _incidence: Tuple[Tuple[Tuple[int, int], ...], ...] = PrivateAttr()
    _incident_masks: Tuple[int, ...] = PrivateAttr()
    _edge_lookup: Dict[Tuple[int, int], int] = PrivateAttr()
    _nx_graph: Optional[nx.Graph] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def validate_simple(self):
        n = self.vertex_count
        seen: Dict[Tuple[int, int], int] = {}
        for k, (a, b) in enumerate(self.edges):
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {k} ({a}, {b}) has an endpoint outside 0..{n - 1}")
            if a == b:
                raise ValueError(f"edge {k} ({a}, {b}) is a self-loop")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"edge {k} ({a}, {b}) duplicates edge {seen[key]}")
            seen[key] = k

        if self.labels and len(self.labels) != n:
            raise ValueError(f"got {len(self.labels)} labels for {n} vertices")
        self._build_index()
        return self

    # runs from the validator so that only checked edges are indexed
    def _build_index(self) -> None:
        incidence: List[List[Tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        incident_masks = [0] * self.vertex_count
        lookup: Dict[Tuple[int, int], int] = {}
        for k, (a, b) in enumerate(self.edges):
            incidence[a].append((b, k))
            incidence[b].append((a, k))
            incident_masks[a] |= 1 << k
            incident_masks[b] |= 1 << k
            lookup[(a, b)] = k
            lookup[(b, a)] = k
        self._incidence = tuple(tuple(sorted(row)) for row in incidence)
        self._incident_masks = tuple(incident_masks)
        self._edge_lookup = lookup

    # identity is the field values; private caches (networkx view) are ignored
    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertex_count, self.edges, self.labels) == (
            other.vertex_count, other.edges, other.labels)

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges, self.labels))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << self.m) - 1

    def incident(self, w: int) -> Tuple[Tuple[int, int], ...]:
        """(neighbour, edge index) pairs at `w`, sorted by neighbour."""
        return self._incidence[w]

    def neighbors(self, w: int) -> List[int]:
        return [x for x, _ in self._incidence[w]]

    def incident_mask(self, w: int) -> int:
        return self._incident_masks[w]

    def edge_index(self, a: int, b: int) -> Optional[int]:
        return self._edge_lookup.get((a, b))

    def has_vertex(self, w: int) -> bool:
        return 0 <= w < self.vertex_count

    def label(self, w: int) -> str:
        return self.labels[w] if self.labels else str(w)

    def vertices_of(self, mask: int) -> List[int]:
        """Sorted vertices incident to the edges of `mask`."""
        seen = set()
        for k in iter_bits(mask):
            seen.update(self.edges[k])
        return sorted(seen)

    def edge_mask(self, vertices: Sequence[int]) -> int:
        """Mask of the edges joining consecutive vertices of a walk."""
        mask = 0
        for a, b in zip(vertices, vertices[1:]):
            k = self._edge_lookup.get((a, b))
            if k is None:
                raise InvalidPathError(f"{a} and {b} are not adjacent")
            mask |= 1 << k
        return mask

    def to_networkx(self) -> nx.Graph:
        """networkx view with nodes 0..n-1 and an `index` attribute per edge (cached)."""
        if self._nx_graph is None:
            g = nx.Graph()
            g.add_nodes_from(range(self.vertex_count))
            for k, (a, b) in enumerate(self.edges):
                g.add_edge(a, b, index=k)
            self._nx_graph = g
        return self._nx_graph


class EdgeSet(BaseModel):
    """Membership bitmask over the edge indices of a fixed graph."""

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    mask: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_mask(self):
        if self.mask >> self.graph.m:
            raise ValueError(f"mask has bits beyond the {self.graph.m} edges of its graph")
        return self

    def edge_indices(self) -> List[int]:
        return list(iter_bits(self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, k: int) -> bool:
        return bool(self.mask >> k & 1)


class Cycle(BaseModel):
    """
    A simple cycle of a graph, identified by its edge set.

    `vertices` is the cyclic vertex order starting at the smallest vertex and
    continuing towards its smaller cycle neighbour; orientation and starting
    point are therefore quotiented out and equality reduces to the edge mask.
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    mask: int = Field(..., gt=0)
    vertices: Tuple[int, ...]

    @property
    def edge_set(self) -> EdgeSet:
        return EdgeSet(graph=self.graph, mask=self.mask)

    @property
    def length(self) -> int:
        return self.mask.bit_count()

    def edge_indices(self) -> List[int]:
        return list(iter_bits(self.mask))

    def __lt__(self, other: "Cycle") -> bool:
        return self.mask < other.mask


class NotACycle(BaseModel):
    """Why an edge set is not a single simple cycle."""

    model_config = ConfigDict(frozen=True)

    reason: Literal["empty", "degree", "disconnected"]


class Path(BaseModel):
    """
    A simple path given as an ordered vertex sequence.

    A single vertex is a zero-length path (used for monocle attachments that
    start on the cycle).
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    vertices: Tuple[int, ...] = Field(..., min_length=1)

    _mask: int = PrivateAttr(default=0)

    @model_validator(mode="after")
    def validate_simple_path(self):
        for w in self.vertices:
            if not self.graph.has_vertex(w):
                raise ValueError(f"vertex {w} is not in the graph")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f"path {list(self.vertices)} repeats a vertex")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if self.graph.edge_index(a, b) is None:
                raise ValueError(f"path {list(self.vertices)} uses non-edge ({a}, {b})")
        self._mask = self.graph.edge_mask(self.vertices)
        return self

    @property
    def mask(self) -> int:
        return self._mask

    @property
    def edge_set(self) -> EdgeSet:
        return EdgeSet(graph=self.graph, mask=self._mask)

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        """l(P): the number of edges."""
        return len(self.vertices) - 1

    def subpath(self, x: int, y: int) -> "Path":
        """L_xy: the subpath joining `x` and `y`, oriented from `x` to `y`."""
        try:
            i, j = self.vertices.index(x), self.vertices.index(y)
        except ValueError as e:
            raise InvalidPathError(f"{x} or {y} is not on path {list(self.vertices)}") from e
        if i <= j:
            return Path(graph=self.graph, vertices=self.vertices[i:j + 1])
        return Path(graph=self.graph, vertices=tuple(reversed(self.vertices[j:i + 1])))

    def reversed(self) -> "Path":
        return Path(graph=self.graph, vertices=tuple(reversed(self.vertices)))

    def label(self, sep: str = "-") -> str:
        return sep.join(self.graph.label(w) for w in self.vertices)


class Monocle(BaseModel):
    """
    A uv-monocle: a cycle plus two disjoint attachment paths.

    Attributes
    ----------
    cycle : Cycle
        The cycle sigma.
    attach_u, attach_v : Path
        Paths from u to u' and from v to v' (possibly zero-length).
    u_prime, v_prime : int
        The vertices where the attachments meet the cycle.
    """

    model_config = ConfigDict(frozen=True)

    cycle: Cycle
    attach_u: Path
    attach_v: Path
    u_prime: int
    v_prime: int

    @model_validator(mode="after")
    def validate_shape(self):
        on_cycle = set(self.cycle.vertices)
        if self.u_prime == self.v_prime:
            raise ValueError("u' and v' must differ")
        for name, attach, end in (("attach_u", self.attach_u, self.u_prime),
                                  ("attach_v", self.attach_v, self.v_prime)):
            if attach.end != end:
                raise ValueError(f"{name} must end at its cycle vertex {end}")
            if on_cycle.intersection(attach.vertices) != {end}:
                raise ValueError(f"{name} must meet the cycle only at {end}")
        if set(self.attach_u.vertices) & set(self.attach_v.vertices):
            raise ValueError("attachment paths must be vertex-disjoint")
        return self

    @property
    def u(self) -> int:
        return self.attach_u.start

    @property
    def v(self) -> int:
        return self.attach_v.start

    @property
    def mask(self) -> int:
        return self.cycle.mask | self.attach_u.mask | self.attach_v.mask


class NotAdjacentShape(BaseModel):
    """S ∪ T is not a monocle, so S and T are not adjacent."""

    model_config = ConfigDict(frozen=True)

    reason: str


class ExchangeSplit(BaseModel):
    """
    Position of the exchanged middle subpaths of two u-v paths.

    `prefix` and `suffix` count the shared initial and final vertices. The
    middles are `S[prefix-1 : len(S)-suffix+1]` and the same slice of T.
    """

    model_config = ConfigDict(frozen=True)

    prefix: int
    suffix: int
    x: int
    y: int
    middle_s: Tuple[int, ...]
    middle_t: Tuple[int, ...]


def build_graph(vertex_count: int,
                edge_list: Iterable[Sequence[int]],
                labels: Optional[Sequence[str]] = None) -> Graph:
    """Build a simple graph; raises GraphConstructionError naming the offending pair."""
    try:
        return Graph(
            vertex_count=vertex_count,
            edges=tuple((int(a), int(b)) for a, b in edge_list),
            labels=tuple(labels) if labels else (),
        )
    except ValidationError as e:
        raise GraphConstructionError(_validation_message(e)) from e


def is_two_connected(G: Graph) -> bool:
    """True iff G is connected, has at least 3 vertices and no cut vertex."""
    if G.vertex_count < 3:
        return False
    return nx.is_biconnected(G.to_networkx())


def edge_set(G: Graph, edge_indices: Iterable[int]) -> EdgeSet:
    indices = list(edge_indices)
    for k in indices:
        if not 0 <= k < G.m:
            raise UnknownElementError(f"edge index {k} is outside 0..{G.m - 1}")
    return EdgeSet(graph=G, mask=mask_of(indices))


def symmetric_difference(F: EdgeSet, H: EdgeSet) -> EdgeSet:
    """F Δ H: the edges in exactly one of F and H."""
    if F.graph is not H.graph and F.graph != H.graph:
        raise EdgeSetMismatchError("edge sets belong to different graphs")
    return EdgeSet(graph=F.graph, mask=F.mask ^ H.mask)


def trace_cycle(G: Graph, mask: int) -> Union[Tuple[int, ...], NotACycle]:
    """Cyclic vertex order of `mask` if it is one simple cycle, else the reason it is not."""
    if not mask:
        return NotACycle(reason="empty")

    vertices = G.vertices_of(mask)
    for w in vertices:
        if (mask & G.incident_mask(w)).bit_count() != 2:
            return NotACycle(reason="degree")

    start = vertices[0]
    order = [start]
    previous, current = -1, start
    # leave the start towards its smaller neighbour on the cycle
    while True:
        step = next(x for x, k in G.incident(current) if mask >> k & 1 and x != previous)
        if step == start:
            break
        order.append(step)
        previous, current = current, step

    if len(order) != len(vertices):
        return NotACycle(reason="disconnected")
    return tuple(order)


def is_cycle_mask(G: Graph, mask: int) -> bool:
    return isinstance(trace_cycle(G, mask), tuple)


def cycle_from_mask(G: Graph, mask: int) -> Cycle:
    traced = trace_cycle(G, mask)
    if isinstance(traced, NotACycle):
        raise InvalidCycleError(
            f"edges {list(iter_bits(mask))} do not form a cycle ({traced.reason})")
    return Cycle(graph=G, mask=mask, vertices=traced)


def as_cycle(es: EdgeSet) -> Union[Cycle, NotACycle]:
    """The cycle induced by `es`, or NotACycle with reason empty/degree/disconnected."""
    traced = trace_cycle(es.graph, es.mask)
    if isinstance(traced, NotACycle):
        return traced
    return Cycle(graph=es.graph, mask=es.mask, vertices=traced)


def path(G: Graph, vertices: Sequence[int]) -> Path:
    try:
        return Path(graph=G, vertices=tuple(vertices))
    except ValidationError as e:
        raise InvalidPathError(_validation_message(e)) from e


def parse_vertex(G: Graph, token: Union[str, int]) -> int:
    """Resolve a vertex given as an index or as a label."""
    token = str(token).strip()
    if G.labels and token in G.labels:
        return G.labels.index(token)
    try:
        w = int(token)
    except ValueError as e:
        raise InvalidPathError(f"unknown vertex {token!r}") from e
    if not G.has_vertex(w):
        raise InvalidPathError(f"vertex {w} is outside 0..{G.vertex_count - 1}")
    return w


def parse_path(G: Graph, text: str) -> Path:
    """Parse `u-x-y-v` (labels or indices, separated by '-' or ',')."""
    tokens = [t for t in text.replace(",", "-").split("-") if t.strip()]
    return path(G, [parse_vertex(G, t) for t in tokens])


def distance(G: Graph, u: int, v: int) -> int:
    """d_G(u, v); raises InvalidPathError when v is unreachable."""
    try:
        return nx.shortest_path_length(G.to_networkx(), u, v)
    except nx.NetworkXNoPath as e:
        raise InvalidPathError(f"no path joins {u} and {v}") from e


def shortest_uv_path(G: Graph, u: int, v: int) -> Path:
    """The lexicographically least among the shortest u-v paths."""
    to_v = nx.single_source_shortest_path_length(G.to_networkx(), v)
    if u not in to_v:
        raise InvalidPathError(f"no path joins {u} and {v}")
    walk = [u]
    while walk[-1] != v:
        here = walk[-1]
        walk.append(min(x for x in G.neighbors(here) if to_v.get(x) == to_v[here] - 1))
    return Path(graph=G, vertices=tuple(walk))


def exchange_split(S: Path, T: Path) -> Optional[ExchangeSplit]:
    """
    Locate the single subpath exchange turning S into T, if there is one.

    S and T must share a maximal common prefix ending at x and a maximal common
    suffix starting at y, with middles S_xy and T_xy meeting only in x and y.
    Zero-length prefixes and suffixes (x = u, y = v) are allowed.
    """
    s, t = S.vertices, T.vertices
    if s == t:
        return None

    p = 0
    while p < len(s) and p < len(t) and s[p] == t[p]:
        p += 1
    q = 0
    while q < len(s) and q < len(t) and s[-1 - q] == t[-1 - q]:
        q += 1

    middle_s = s[p - 1:len(s) - q + 1]
    middle_t = t[p - 1:len(t) - q + 1]
    if len(middle_s) < 2 or len(middle_t) < 2:
        return None
    if set(middle_s[1:-1]) & set(middle_t) or set(middle_t[1:-1]) & set(middle_s):
        return None
    return ExchangeSplit(prefix=p, suffix=q, x=s[p - 1], y=s[-q],
                         middle_s=middle_s, middle_t=middle_t)


def _check_same_endpoints(S: Path, T: Path) -> None:
    if S.graph is not T.graph and S.graph != T.graph:
        raise EdgeSetMismatchError("paths belong to different graphs")
    if (S.start, S.end) != (T.start, T.end):
        raise InvalidPathError(
            f"paths join different vertices: {S.start}-{S.end} and {T.start}-{T.end}")


def classify_union(S: Path, T: Path) -> Union[Monocle, NotAdjacentShape]:
    """
    The monocle formed by S ∪ T when S and T differ by one subpath exchange.

    The cycle is S Δ T, attach_u is the longest common prefix and attach_v the
    longest common suffix (read from v).
    """
    _check_same_endpoints(S, T)
    if S.vertices == T.vertices:
        raise NotAdjacentError("identical paths have no exchange cycle")

    split = exchange_split(S, T)
    if split is None:
        return NotAdjacentShape(reason="middle subpaths are not internally disjoint")

    G = S.graph
    s = S.vertices
    return Monocle(
        cycle=cycle_from_mask(G, S.mask ^ T.mask),
        attach_u=Path(graph=G, vertices=s[:split.prefix]),
        attach_v=Path(graph=G, vertices=tuple(reversed(s[len(s) - split.suffix:]))),
        u_prime=split.x,
        v_prime=split.y,
    )
