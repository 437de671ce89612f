import logging
import random
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator
from tqdm import tqdm

from config.common_settings import settings
from uv_path_graphs.src.cycle_space import (
    CycleSet,
    PlaneEmbedding,
    build_embedding,
    cycle_set,
    enumerate_all_cycles,
    internal_faces,
)
from uv_path_graphs.src.delta_star import is_delta_star_dense
from uv_path_graphs.src.errors import EnumerationLimitError, PathSpaceError
from uv_path_graphs.src.graph_core import Graph, build_graph, is_two_connected
from uv_path_graphs.src.pydantic_models.pydantic_models import CorpusSpec

# Set up a logger for the module
logger = logging.getLogger(__name__)

# graph_atlas_g covers every graph up to this order
ATLAS_MAX_N = 7


class Instance(BaseModel):
    """
    One input to a theorem check.

    `u` and `v` are None when the check runs over every vertex pair; `cycles`
    and `embedding` are present only for checks that need them.
    """

    model_config = ConfigDict(frozen=True)

    index: int = 0
    graph: Graph
    u: Optional[int] = None
    v: Optional[int] = None
    cycles: Optional[CycleSet] = None
    embedding: Optional[PlaneEmbedding] = None
    source: str = ""


class Corpus(BaseModel):
    """How the corpus was generated and the instances it produced; every graph is 2-connected."""

    model_config = ConfigDict(frozen=True)

    spec: CorpusSpec
    instances: Tuple[Instance, ...] = ()

    @model_validator(mode="after")
    def validate_two_connected(self):
        for inst in self.instances:
            if not is_two_connected(inst.graph):
                raise ValueError(f"instance {inst.index} from {inst.source!r} is not 2-connected")
        return self

    def __len__(self) -> int:
        return len(self.instances)


def _indexed(instances: Iterable[Instance]) -> Tuple[Instance, ...]:
    return tuple(inst.model_copy(update={"index": i}) for i, inst in enumerate(instances))


def from_networkx(g: nx.Graph, labels: Optional[Sequence[str]] = None) -> Graph:
    """Graph with nodes relabelled 0..n-1 in sorted order and edges sorted as (low, high) pairs."""
    position = {w: i for i, w in enumerate(sorted(g.nodes))}
    edges = sorted(tuple(sorted((position[a], position[b]))) for a, b in g.edges)
    return build_graph(len(position), edges, labels)


########## fixtures ##########

def k4_fixture() -> Tuple[Graph, int, int, CycleSet]:
    """
    K4 on u, x, y, v with C = {uxv, uyv, uxyv}.

    C spans the cycle space, yet u-y-x-v is an isolated vertex of P_C(G_uv).
    Edges are indexed uv=0, ux=1, uy=2, xv=3, yv=4, xy=5.
    """
    G = build_graph(4, [(0, 3), (0, 1), (0, 2), (1, 3), (2, 3), (1, 2)], ["u", "x", "y", "v"])
    uxv = G.edge_mask([0, 1, 3, 0])
    uyv = G.edge_mask([0, 2, 3, 0])
    uxyv = G.edge_mask([0, 1, 2, 3, 0])
    return G, 0, 3, cycle_set(G, [uxv, uyv, uxyv])


def k4_plane_fixture() -> Tuple[Graph, PlaneEmbedding]:
    """K4 drawn with u, x, v on the outer triangle and y inside."""
    G, _, _, _ = k4_fixture()
    # clockwise neighbours: u: x y v | x: v y u | y: v u x | v: u y x
    rotation = [(1, 2, 0), (3, 5, 1), (4, 2, 5), (0, 4, 3)]
    return G, build_embedding(G, rotation, outer=(1, "rev"))


def chorded_square_fixture() -> Tuple[Graph, PlaneEmbedding]:
    """The 4-cycle u-a-v-b with chord uv, outer face u-a-v-b."""
    G = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], ["u", "a", "v", "b"])
    # clockwise neighbours: u: a v b | a: v u | v: b u a | b: u v
    rotation = [(0, 4, 3), (1, 0), (2, 4, 1), (3, 2)]
    return G, build_embedding(G, rotation, outer=(0, "rev"))


def cycle_graph(n: int) -> Graph:
    """The n-cycle 0-1-...-(n-1)-0."""
    return build_graph(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


########## generated graphs ##########

def _check_order(max_n: int, allow_n7: Optional[bool]) -> None:
    allow = settings.ALLOW_N7 if allow_n7 is None else allow_n7
    if max_n > ATLAS_MAX_N:
        raise EnumerationLimitError(f"exhaustive corpora stop at n = {ATLAS_MAX_N} (got {max_n})")
    if max_n == ATLAS_MAX_N and not allow:
        raise EnumerationLimitError("n = 7 corpora are opt-in; set ALLOW_N7=true")


def two_connected_graphs(max_n: int,
                         min_n: int = 3,
                         allow_n7: Optional[bool] = None,
                         show_progress: bool = False) -> List[Graph]:
    """Every 2-connected graph with min_n..max_n vertices, one per isomorphism class (networkx atlas order)."""
    _check_order(max_n, allow_n7)
    graphs = []
    for g in tqdm(nx.graph_atlas_g(), desc="Scanning graph atlas", disable=not show_progress):
        n = g.number_of_nodes()
        if n < max(min_n, 3) or n > max_n:
            continue
        if nx.is_biconnected(g):
            graphs.append(from_networkx(g))
    logger.info("Atlas corpus: %d 2-connected graphs with %d <= n <= %d", len(graphs), min_n, max_n)
    return graphs


def random_two_connected_graph(rng: random.Random, n: int, m: Optional[int] = None,
                               attempts: int = 1000) -> Graph:
    """A seeded G(n, m) sample conditioned on 2-connectivity."""
    top = n * (n - 1) // 2
    for _ in range(attempts):
        edges = m if m is not None else rng.randint(n, top)
        g = nx.gnm_random_graph(n, edges, seed=rng.randrange(2 ** 32))
        if nx.is_biconnected(g):
            return from_networkx(g)
    raise PathSpaceError(f"no 2-connected G({n}, {m}) sample in {attempts} attempts")


def random_cycle_set(rng: random.Random, G: Graph, size: Optional[int] = None) -> CycleSet:
    """A uniformly random subset of the cycles of G (random size unless given)."""
    everything = enumerate_all_cycles(G).cycles
    k = rng.randint(0, len(everything)) if size is None else min(size, len(everything))
    chosen = sorted(rng.sample(range(len(everything)), k))
    return CycleSet(graph=G, cycles=tuple(everything[i] for i in chosen))


def planar_rotation(G: Graph) -> Optional[List[List[int]]]:
    """A clockwise rotation system of G from networkx's planarity test, or None when G is not planar."""
    planar, embedding = nx.check_planarity(G.to_networkx())
    if not planar:
        return None
    return [[G.edge_index(w, x) for x in embedding.neighbors_cw_order(w)]
            for w in range(G.vertex_count)]


########## corpora ##########

def exhaustive_corpus(max_n: Optional[int] = None,
                      min_n: int = 3,
                      allow_n7: Optional[bool] = None,
                      show_progress: bool = False) -> Corpus:
    """All 2-connected graphs up to max_n; checks run over every vertex pair."""
    max_n = settings.CORPUS_MAX_N if max_n is None else max_n
    graphs = two_connected_graphs(max_n, min_n=min_n, allow_n7=allow_n7, show_progress=show_progress)
    instances = _indexed(Instance(graph=G, source=f"atlas n<={max_n}") for G in graphs)
    return Corpus(spec=CorpusSpec(kind="exhaustive", max_n=max_n, count=len(instances)),
                  instances=instances)


def random_corpus(count: int,
                  seed: Optional[int] = None,
                  min_n: int = 4,
                  max_n: int = 6,
                  with_cycles: bool = True) -> Corpus:
    """Seeded random 2-connected graphs, each with a random cycle set."""
    seed = settings.SEED if seed is None else seed
    rng = random.Random(seed)
    instances = []
    for _ in range(count):
        G = random_two_connected_graph(rng, rng.randint(min_n, max_n))
        C = random_cycle_set(rng, G) if with_cycles else None
        instances.append(Instance(graph=G, cycles=C, source=f"random seed={seed}"))
    return Corpus(spec=CorpusSpec(kind="random", max_n=max_n, seed=seed, count=count),
                  instances=_indexed(instances))


def dense_corpus(count: int,
                 seed: Optional[int] = None,
                 min_n: int = 4,
                 max_n: int = 5,
                 max_attempts: Optional[int] = None) -> Corpus:
    """
    Seeded random (G, C) instances with C Delta*-dense.

    Candidates are random cycle subsets at least as large as the cycle space
    dimension; those whose closure misses a cycle are discarded.
    """
    seed = settings.SEED if seed is None else seed
    rng = random.Random(seed)
    attempts = 50 * count if max_attempts is None else max_attempts
    instances = []
    for _ in range(attempts):
        if len(instances) == count:
            break
        G = random_two_connected_graph(rng, rng.randint(min_n, max_n))
        everything = enumerate_all_cycles(G).cycles
        floor = min(G.m - G.vertex_count + 1, len(everything))
        C = random_cycle_set(rng, G, rng.randint(floor, len(everything)))
        if is_delta_star_dense(C, G):
            instances.append(Instance(graph=G, cycles=C, source=f"dense seed={seed}"))
    if len(instances) < count:
        logger.warning("Only %d of %d dense instances found in %d attempts", len(instances), count, attempts)
    return Corpus(spec=CorpusSpec(kind="random", max_n=max_n, seed=seed, count=len(instances)),
                  instances=_indexed(instances))


def plane_corpus(max_n: int = 6, allow_n7: Optional[bool] = None) -> Corpus:
    """Every planar 2-connected atlas graph up to max_n, with a rotation system and the internal faces as C."""
    instances = []
    for G in two_connected_graphs(max_n, allow_n7=allow_n7):
        rotation = planar_rotation(G)
        if rotation is None:
            continue
        emb = build_embedding(G, rotation)
        instances.append(Instance(graph=G, cycles=internal_faces(G, emb), embedding=emb,
                                  source=f"plane n<={max_n}"))
    return Corpus(spec=CorpusSpec(kind="plane", max_n=max_n, count=len(instances)),
                  instances=_indexed(instances))


def fixture_corpus() -> Corpus:
    """The K4 instance whose spanning cycle set leaves P_C(G_uv) disconnected."""
    G, u, v, C = k4_fixture()
    return Corpus(spec=CorpusSpec(kind="fixture", max_n=4, count=1),
                  instances=(Instance(graph=G, u=u, v=v, cycles=C, source="k4 fixture"),))
