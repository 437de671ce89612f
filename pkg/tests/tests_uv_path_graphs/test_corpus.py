import random

import networkx as nx
import pytest
from pydantic import ValidationError

from uv_path_graphs.src.corpus import (
    Corpus,
    Instance,
    chorded_square_fixture,
    cycle_graph,
    dense_corpus,
    exhaustive_corpus,
    fixture_corpus,
    from_networkx,
    k4_fixture,
    plane_corpus,
    planar_rotation,
    random_corpus,
    random_cycle_set,
    random_two_connected_graph,
    two_connected_graphs,
)
from uv_path_graphs.src.cycle_space import enumerate_all_cycles, spans_cycle_space
from uv_path_graphs.src.delta_star import is_delta_star_dense
from uv_path_graphs.src.errors import (
    EnumerationLimitError,
    GraphConstructionError,
    InvalidCycleError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import build_graph, is_two_connected
from uv_path_graphs.src.path_space import build_path_graph, components
from uv_path_graphs.src.pydantic_models.pydantic_models import (
    CorpusSpec,
    CycleSetDocument,
    EmbeddingDocument,
    GraphDocument,
    TheoremReport,
    InstanceDescriptor,
    cycle_set_hash,
    graph_hash,
    load_cycle_set,
    load_graph,
)


def test_k4_fixture_reproduces_the_counterexample():
    G, u, v, C = k4_fixture()
    assert G.labels == ("u", "x", "y", "v")
    assert spans_cycle_space(C, G).rank == 3
    PG = build_path_graph(G, u, v, C)
    assert PG.size == 5
    parts = components(PG)
    assert len(parts) == 2
    assert [PG.paths[p[0]].label() for p in parts if len(p) == 1] == ["u-y-x-v"]


def test_fixture_corpus():
    corpus = fixture_corpus()
    assert len(corpus) == 1
    (inst,) = corpus.instances
    assert (inst.u, inst.v) == (0, 3)
    assert corpus.spec.kind == "fixture"


def test_corpus_rejects_graphs_that_are_not_two_connected():
    path_graph = build_graph(3, [(0, 1), (1, 2)])
    with pytest.raises(ValidationError):
        Corpus(spec=CorpusSpec(kind="fixture"), instances=(Instance(graph=path_graph),))


def test_two_connected_graph_counts():
    assert len(two_connected_graphs(4)) == 4
    assert len(two_connected_graphs(5)) == 14
    assert len(two_connected_graphs(5, min_n=5)) == 10
    assert all(is_two_connected(G) for G in two_connected_graphs(5))


@pytest.mark.slow
def test_two_connected_graphs_with_six_vertices():
    assert len(two_connected_graphs(6, min_n=6)) == 56


def test_atlas_order_guards():
    with pytest.raises(EnumerationLimitError):
        two_connected_graphs(7, allow_n7=False)
    with pytest.raises(EnumerationLimitError):
        two_connected_graphs(8, allow_n7=True)


def test_from_networkx_relabels_in_sorted_order():
    g = nx.Graph([("b", "c"), ("a", "b"), ("a", "c")])
    G = from_networkx(g, ["a", "b", "c"])
    assert G.edges == ((0, 1), (0, 2), (1, 2))
    assert G.label(2) == "c"


def test_cycle_graph():
    G = cycle_graph(5)
    assert G.m == 5
    assert len(enumerate_all_cycles(G)) == 1


def test_random_graphs_are_seeded():
    first = random_two_connected_graph(random.Random(7), 6)
    again = random_two_connected_graph(random.Random(7), 6)
    assert first == again
    assert is_two_connected(first)
    assert random_two_connected_graph(random.Random(7), 5, m=10) == from_networkx(nx.complete_graph(5))


def test_random_cycle_set_takes_a_subset():
    G = from_networkx(nx.complete_graph(4))
    C = random_cycle_set(random.Random(3), G, size=4)
    assert len(C) == 4
    assert C.masks <= enumerate_all_cycles(G).masks
    assert len(random_cycle_set(random.Random(3), G, size=99)) == 7


def test_random_corpus_is_reproducible():
    a = random_corpus(5, seed=11, max_n=5)
    b = random_corpus(5, seed=11, max_n=5)
    assert [inst.graph for inst in a.instances] == [inst.graph for inst in b.instances]
    assert [inst.cycles.masks for inst in a.instances] == [inst.cycles.masks for inst in b.instances]
    assert [inst.index for inst in a.instances] == [0, 1, 2, 3, 4]
    assert a.spec.seed == 11


def test_dense_corpus_keeps_only_dense_instances():
    corpus = dense_corpus(3, seed=5)
    assert len(corpus) <= 3
    for inst in corpus.instances:
        assert is_delta_star_dense(inst.cycles, inst.graph)


def test_exhaustive_corpus():
    corpus = exhaustive_corpus(4)
    assert len(corpus) == 4
    assert corpus.spec.kind == "exhaustive"
    assert all(inst.u is None and inst.cycles is None for inst in corpus.instances)


def test_plane_corpus_skips_k5():
    corpus = plane_corpus(5)
    assert len(corpus) == 13
    for inst in corpus.instances:
        assert inst.embedding is not None
        assert len(inst.cycles) == inst.graph.m - inst.graph.vertex_count + 1


def test_planar_rotation():
    assert planar_rotation(from_networkx(nx.complete_graph(5))) is None
    rotation = planar_rotation(from_networkx(nx.complete_graph(4)))
    assert [sorted(order) for order in rotation] == [[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]


########## documents ##########

def test_graph_document_round_trip_and_errors():
    G, _, _, _ = k4_fixture()
    text = GraphDocument.from_graph(G).model_dump_json()
    assert load_graph(text) == G
    with pytest.raises(GraphConstructionError):
        load_graph('{"n": 2, "edges": [[0, 0]]}')
    with pytest.raises(GraphConstructionError):
        load_graph('{"edges": []}')
    with pytest.raises(GraphConstructionError, match="outside"):
        load_graph('{"n": 3, "edges": [[0, 5]]}')


def test_cycle_set_document_and_errors():
    G, _, _, C = k4_fixture()
    text = CycleSetDocument.from_cycle_set(C).model_dump_json()
    assert load_cycle_set(text, G).masks == C.masks
    with pytest.raises(InvalidCycleError):
        load_cycle_set('{"cycles": [[0, 1]]}', G)
    with pytest.raises(InvalidCycleError):
        load_cycle_set('{"cycles": "nope"}', G)


@pytest.mark.parametrize("cycles", ["[[0, -1, 3]]", "[[0, 1, 6]]"])
def test_cycle_set_document_rejects_unknown_edges(cycles):
    G, _, _, _ = k4_fixture()
    with pytest.raises(UnknownElementError):
        load_cycle_set(f'{{"cycles": {cycles}}}', G)


def test_embedding_document():
    G, emb = chorded_square_fixture()
    document = EmbeddingDocument.from_embedding(emb)
    assert document.to_embedding(G) == emb


def test_hashes_are_canonical():
    G, _, _, C = k4_fixture()
    again, _, _, _ = k4_fixture()
    assert graph_hash(G) == graph_hash(again)
    assert graph_hash(G) != graph_hash(cycle_graph(4))
    assert cycle_set_hash(C) == cycle_set_hash(C.sorted())


def test_fail_reports_need_a_counterexample():
    descriptor = InstanceDescriptor(graph_hash="0" * 64, n=3, m=3)
    with pytest.raises(ValidationError):
        TheoremReport(theorem="T1", index=0, instance=descriptor, verdict="fail")
    assert TheoremReport(theorem="T1", index=0, instance=descriptor, verdict="pass").duration == 0.0
