import logging
from collections import deque
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, model_validator

from config.common_settings import settings
from uv_path_graphs.src.errors import (
    DisconnectedGraphError,
    EnumerationLimitError,
    InvalidCycleError,
    NotPlaneEmbeddingError,
    SpanningTreeError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import (
    Cycle,
    EdgeSet,
    Graph,
    _validation_message,
    cycle_from_mask,
    iter_bits,
    trace_cycle,
)

# Set up a logger for the module
logger = logging.getLogger(__name__)


########## GF(2) linear algebra over int bitsets ##########

def _reduce(vector: int, basis: Dict[int, int]) -> int:
    while vector:
        pivot = (vector & -vector).bit_length() - 1
        row = basis.get(pivot)
        if row is None:
            return vector
        vector ^= row
    return 0


def _echelon(rows: Iterable[int]) -> Dict[int, int]:
    """Row-reduce into a basis keyed by pivot column (lowest set bit = lowest edge index)."""
    basis: Dict[int, int] = {}
    for row in rows:
        reduced = _reduce(row, basis)
        if reduced:
            basis[(reduced & -reduced).bit_length() - 1] = reduced
    return basis


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of bitmask rows."""
    return len(_echelon(rows))


def in_span(vector: int, rows: Iterable[int]) -> bool:
    """Whether `vector` is a GF(2) combination of `rows`."""
    return _reduce(vector, _echelon(rows)) == 0


########## cycle sets ##########

class CycleSet(BaseModel):
    """
    An ordered collection C of distinct cycles of one graph.

    Membership tests go through the set of edge masks, so `mask in C` and
    `cycle in C` are both O(1).
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    cycles: Tuple[Cycle, ...] = ()

    _masks: frozenset = PrivateAttr(default=frozenset())

    @model_validator(mode="after")
    def validate_members(self):
        seen = set()
        for c in self.cycles:
            if c.graph is not self.graph and c.graph != self.graph:
                raise ValueError(f"cycle {c.edge_indices()} belongs to another graph")
            if c.mask in seen:
                raise ValueError(f"cycle {c.edge_indices()} appears twice")
            seen.add(c.mask)
        return self

    def model_post_init(self, __context) -> None:
        self._masks = frozenset(c.mask for c in self.cycles)

    @property
    def masks(self) -> frozenset:
        return self._masks

    @property
    def matrix(self) -> List[int]:
        """GF(2) matrix rows: one edge-incidence bitmask per cycle, in order."""
        return [c.mask for c in self.cycles]

    def __len__(self) -> int:
        return len(self.cycles)

    def __contains__(self, item: Union[Cycle, int]) -> bool:
        mask = item.mask if isinstance(item, Cycle) else item
        return mask in self._masks

    def with_cycles(self, extra: Iterable[Cycle]) -> "CycleSet":
        added = [c for c in extra if c.mask not in self._masks]
        return CycleSet(graph=self.graph, cycles=self.cycles + tuple(added))

    def sorted(self) -> "CycleSet":
        return CycleSet(graph=self.graph, cycles=tuple(sorted(self.cycles, key=lambda c: c.mask)))


def cycle_set(G: Graph, masks: Iterable[int]) -> CycleSet:
    """Build a CycleSet from edge masks, checking each is a cycle of G."""
    cycles = []
    for mask in masks:
        if mask >> G.m:
            raise UnknownElementError(f"cycle mask uses edges beyond 0..{G.m - 1}")
        cycles.append(cycle_from_mask(G, mask))
    try:
        return CycleSet(graph=G, cycles=tuple(cycles))
    except ValidationError as e:
        raise InvalidCycleError(_validation_message(e)) from e


class SpanCheck(BaseModel):
    spans: bool
    rank: int
    dimension: int


def cycle_space_dimension(G: Graph) -> int:
    """m - n + 1 for a connected graph."""
    if G.vertex_count == 0 or not nx.is_connected(G.to_networkx()):
        raise DisconnectedGraphError("the cycle space dimension m - n + 1 needs a connected graph")
    return G.m - G.vertex_count + 1


def spans_cycle_space(C: CycleSet, G: Graph) -> SpanCheck:
    """Whether the edge-incidence vectors of C have GF(2) rank m - n + 1."""
    dimension = cycle_space_dimension(G)
    rank = gf2_rank(C.matrix)
    logger.debug("GF(2) rank %d of %d cycles, cycle space dimension %d", rank, len(C), dimension)
    return SpanCheck(spans=rank == dimension, rank=rank, dimension=dimension)


########## spanning trees and fundamental cycles ##########

def _forest(G: Graph, mask: int) -> Tuple[int, Dict[int, int]]:
    """
    BFS spanning forest of the subgraph with edge set `mask`.

    Returns the forest mask and, per reached vertex, the mask of the forest path
    from the root of its component.
    """
    forest = 0
    root_path: Dict[int, int] = {}
    for root in G.vertices_of(mask):
        if root in root_path:
            continue
        root_path[root] = 0
        queue = deque([root])
        while queue:
            w = queue.popleft()
            for x, k in G.incident(w):
                if mask >> k & 1 and x not in root_path:
                    root_path[x] = root_path[w] | 1 << k
                    forest |= 1 << k
                    queue.append(x)
    return forest, root_path


def spanning_tree(G: Graph) -> EdgeSet:
    """BFS spanning tree from vertex 0, neighbours in index order."""
    forest, root_path = _forest(G, G.full_mask)
    if len(root_path) != G.vertex_count or forest.bit_count() != G.vertex_count - 1:
        raise DisconnectedGraphError("a disconnected graph has no spanning tree")
    return EdgeSet(graph=G, mask=forest)


def _fundamental_masks(G: Graph, mask: int) -> List[int]:
    forest, root_path = _forest(G, mask)
    basis = []
    for k in iter_bits(mask & ~forest):
        a, b = G.edges[k]
        basis.append(1 << k ^ root_path[a] ^ root_path[b])
    return basis


def fundamental_cycles(G: Graph, tree: EdgeSet) -> CycleSet:
    """One cycle per non-tree edge: the edge plus the tree path joining its ends."""
    forest, root_path = _forest(G, tree.mask)
    if (tree.graph != G or forest != tree.mask or len(root_path) != G.vertex_count
            or tree.mask.bit_count() != G.vertex_count - 1):
        raise SpanningTreeError(f"edges {tree.edge_indices()} are not a spanning tree of the graph")

    cycles = []
    for k in iter_bits(G.full_mask & ~tree.mask):
        a, b = G.edges[k]
        cycles.append(cycle_from_mask(G, 1 << k ^ root_path[a] ^ root_path[b]))
    return CycleSet(graph=G, cycles=tuple(cycles))


########## cycle enumeration ##########

def cycles_of_subgraph(G: Graph, mask: int, max_dimension: Optional[int] = None) -> List[int]:
    """
    Every simple cycle of the edge-induced subgraph `mask`, as sorted masks.

    Walks all nonzero GF(2) combinations of a fundamental basis in Gray-code
    order and keeps the combinations that are single cycles.
    """
    limit = settings.MAX_CYCLE_SPACE_DIMENSION if max_dimension is None else max_dimension
    basis = _fundamental_masks(G, mask)
    if len(basis) > limit:
        raise EnumerationLimitError(
            f"cycle space dimension {len(basis)} exceeds the enumeration guard {limit}")

    found = []
    current = 0
    for i in range(1, 1 << len(basis)):
        current ^= basis[(i & -i).bit_length() - 1]
        if isinstance(trace_cycle(G, current), tuple):
            found.append(current)
    found.sort()
    return found


def enumerate_all_cycles(G: Graph) -> CycleSet:
    """Every simple cycle of G exactly once, sorted by edge mask."""
    masks = cycles_of_subgraph(G, G.full_mask)
    logger.debug("Enumerated %d cycles on %d vertices and %d edges", len(masks), G.n, G.m)
    return CycleSet(graph=G, cycles=tuple(cycle_from_mask(G, mask) for mask in masks))


def cycles_through_edge(G: Graph, e: int) -> CycleSet:
    """All simple cycles containing edge index `e`."""
    if not 0 <= e < G.m:
        raise UnknownElementError(f"edge {e} is outside 0..{G.m - 1}")
    everything = enumerate_all_cycles(G)
    return CycleSet(graph=G, cycles=tuple(c for c in everything.cycles if c.mask >> e & 1))


def cycles_through_vertex(G: Graph, w: int) -> CycleSet:
    """All simple cycles through vertex `w`."""
    if not G.has_vertex(w):
        raise UnknownElementError(f"vertex {w} is outside 0..{G.vertex_count - 1}")
    everything = enumerate_all_cycles(G)
    incident = G.incident_mask(w)
    return CycleSet(graph=G, cycles=tuple(c for c in everything.cycles if c.mask & incident))


########## plane embeddings ##########

class Face(BaseModel):
    """A face of a plane embedding, keyed by its first traversed half-edge."""

    model_config = ConfigDict(frozen=True)

    half_edge: Tuple[int, int]
    vertices: Tuple[int, ...]
    mask: int


class PlaneEmbedding(BaseModel):
    """
    A rotation system: for each vertex, the clockwise cyclic order of its
    incident edge indices, plus the designated outer face.

    The face of a half-edge a->b is the face on its right, found by leaving each
    vertex along the edge following the incoming one counter-clockwise.

    Attributes
    ----------
    rotation : tuple of tuple of int
        Per vertex, a permutation of its incident edge indices.
    outer : (int, "fwd" | "rev")
        An edge of the outer face and the direction it is traversed in; "fwd"
        is the direction the edge was listed in the graph.
    """

    model_config = ConfigDict(frozen=True)

    graph: Graph = Field(..., repr=False)
    rotation: Tuple[Tuple[int, ...], ...]
    outer: Tuple[int, Literal["fwd", "rev"]]

    @model_validator(mode="after")
    def validate_rotation(self):
        G = self.graph
        if len(self.rotation) != G.vertex_count:
            raise ValueError(f"rotation lists {len(self.rotation)} vertices, graph has {G.vertex_count}")
        for w, order in enumerate(self.rotation):
            incident = sorted(k for _, k in G.incident(w))
            if sorted(order) != incident:
                raise ValueError(f"rotation at vertex {w} is not a permutation of its edges {incident}")
        k, _ = self.outer
        if not 0 <= k < G.m:
            raise ValueError(f"outer edge {k} is outside 0..{G.m - 1}")
        return self

    def outer_half_edge(self) -> Tuple[int, int]:
        k, direction = self.outer
        a, b = self.graph.edges[k]
        return (a, b) if direction == "fwd" else (b, a)


def _other_end(G: Graph, k: int, w: int) -> int:
    a, b = G.edges[k]
    return b if a == w else a


def _nx_embedding(G: Graph, rotation: Sequence[Sequence[int]]) -> nx.PlanarEmbedding:
    embedding = nx.PlanarEmbedding()
    embedding.add_nodes_from(range(G.vertex_count))
    embedding.set_data({w: [_other_end(G, k, w) for k in order] for w, order in enumerate(rotation)})
    try:
        embedding.check_structure()
    except nx.NetworkXException as e:
        raise NotPlaneEmbeddingError(f"not a plane embedding: {e}") from e
    return embedding


def _traverse_faces(G: Graph, rotation: Sequence[Sequence[int]]) -> List[Face]:
    embedding = _nx_embedding(G, rotation)
    marked: set = set()
    found = []
    for w in range(G.vertex_count):
        for x, _ in G.incident(w):
            if (w, x) in marked:
                continue
            nodes = embedding.traverse_face(w, x, mark_half_edges=marked)
            ring = list(nodes) + [nodes[0]]
            found.append(Face(half_edge=(w, x), vertices=tuple(nodes), mask=G.edge_mask(ring)))
    return found


def build_embedding(G: Graph,
                    rotation: Sequence[Sequence[int]],
                    outer: Optional[Tuple[int, str]] = None) -> PlaneEmbedding:
    """
    Validate a rotation system against G and Euler's formula.

    Without `outer`, the outer face is the one containing the lexicographically
    first directed edge.
    """
    if not G.m:
        raise NotPlaneEmbeddingError("an edgeless graph has no faces")
    if outer is None:
        a, b = min((w, x) for w in range(G.vertex_count) for x, _ in G.incident(w))
        k = G.edge_index(a, b)
        outer = (k, "fwd" if G.edges[k] == (a, b) else "rev")

    try:
        emb = PlaneEmbedding(graph=G, rotation=tuple(tuple(order) for order in rotation),
                             outer=tuple(outer))
    except ValidationError as e:
        raise NotPlaneEmbeddingError(f"not a plane embedding: {_validation_message(e)}") from e

    faces(emb)
    return emb


def faces(emb: PlaneEmbedding) -> List[Face]:
    """All faces of the embedding (outer face included), Euler count checked."""
    G = emb.graph
    found = _traverse_faces(G, emb.rotation)
    if G.vertex_count - G.m + len(found) != 2:
        raise NotPlaneEmbeddingError(
            f"not a plane embedding: n - m + f = {G.vertex_count - G.m + len(found)}, expected 2")
    return found


def outer_face(emb: PlaneEmbedding) -> Face:
    a, b = emb.outer_half_edge()
    for face in faces(emb):
        ring = face.vertices + face.vertices[:1]
        if any(ring[i:i + 2] == (a, b) for i in range(len(face.vertices))):
            return face
    raise NotPlaneEmbeddingError(f"half-edge {a}->{b} lies on no face")


def internal_faces(G: Graph, emb: PlaneEmbedding) -> CycleSet:
    """Boundary cycles of every face except the designated outer one."""
    if emb.graph != G:
        raise NotPlaneEmbeddingError("embedding belongs to another graph")
    outside = outer_face(emb)
    cycles = []
    for face in faces(emb):
        if face.half_edge == outside.half_edge:
            continue
        traced = trace_cycle(G, face.mask)
        if not isinstance(traced, tuple) or len(traced) != len(face.vertices):
            raise NotPlaneEmbeddingError(
                f"face {list(face.vertices)} is not a simple cycle; is the graph 2-connected?")
        cycles.append(Cycle(graph=G, mask=face.mask, vertices=traced))
    logger.debug("Embedding has %d internal faces", len(cycles))
    return CycleSet(graph=G, cycles=tuple(cycles))
