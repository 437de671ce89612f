import pytest
from hypothesis import given, settings as hypothesis_settings

from uv_path_graphs.src.corpus import cycle_graph, k4_fixture
from uv_path_graphs.src.errors import (
    EdgeSetMismatchError,
    GraphConstructionError,
    InvalidCycleError,
    InvalidPathError,
    NotAdjacentError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import (
    Monocle,
    NotACycle,
    NotAdjacentShape,
    as_cycle,
    build_graph,
    classify_union,
    cycle_from_mask,
    distance,
    edge_set,
    exchange_split,
    is_cycle_mask,
    is_two_connected,
    iter_bits,
    mask_of,
    parse_path,
    path,
    shortest_uv_path,
    symmetric_difference,
    trace_cycle,
)
from uv_path_graphs.src.path_space import enumerate_uv_paths
from tests.tests_uv_path_graphs.strategies import graph_with_pair

U, X, Y, V = 0, 1, 2, 3


@pytest.fixture
def k4():
    G, _, _, _ = k4_fixture()
    return G


def test_bitmask_helpers():
    assert list(iter_bits(0b101001)) == [0, 3, 5]
    assert mask_of([0, 3, 5]) == 0b101001
    assert mask_of([]) == 0


def test_build_graph_keeps_edge_order(k4):
    assert k4.n == 4
    assert k4.m == 6
    assert k4.edge_index(U, V) == 0
    assert k4.edge_index(Y, X) == 5
    assert k4.edge_index(U, U) is None
    assert k4.neighbors(U) == [X, Y, V]
    assert k4.label(Y) == "y"


@pytest.mark.parametrize("edges, message", [
    ([(0, 0)], "self-loop"),
    ([(0, 1), (1, 0)], "duplicates"),
    ([(0, 5)], "outside"),
])
def test_build_graph_rejects_non_simple_input(edges, message):
    with pytest.raises(GraphConstructionError, match=message):
        build_graph(3, edges)


def test_build_graph_rejects_wrong_label_count():
    with pytest.raises(GraphConstructionError):
        build_graph(3, [(0, 1)], ["a", "b"])


def test_graph_equality_ignores_cached_state(k4):
    k4.to_networkx()
    again, _, _, _ = k4_fixture()
    assert again == k4
    assert hash(again) == hash(k4)


def test_is_two_connected():
    assert is_two_connected(cycle_graph(3))
    assert not is_two_connected(build_graph(3, [(0, 1), (1, 2)]))
    assert not is_two_connected(build_graph(2, [(0, 1)]))
    # two triangles sharing a cut vertex
    assert not is_two_connected(build_graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]))


def test_edge_set_rejects_unknown_edges(k4):
    assert edge_set(k4, [0, 5]).mask == 0b100001
    with pytest.raises(UnknownElementError):
        edge_set(k4, [6])


def test_symmetric_difference(k4):
    a = edge_set(k4, [0, 1, 3])
    b = edge_set(k4, [0, 2, 4])
    assert symmetric_difference(a, b).edge_indices() == [1, 2, 3, 4]
    with pytest.raises(EdgeSetMismatchError):
        symmetric_difference(a, edge_set(cycle_graph(6), [0]))


def test_trace_cycle_orders_from_smallest_vertex(k4):
    square = k4.edge_mask([U, X, V, Y, U])
    assert square == 0b011110
    assert trace_cycle(k4, square) == (U, X, V, Y)
    assert cycle_from_mask(k4, square).length == 4


def test_trace_cycle_reasons(k4):
    assert trace_cycle(k4, 0) == NotACycle(reason="empty")
    assert trace_cycle(k4, k4.edge_mask([U, X, V])) == NotACycle(reason="degree")
    two_triangles = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert trace_cycle(two_triangles, two_triangles.full_mask) == NotACycle(reason="disconnected")


def test_as_cycle_and_cycle_from_mask(k4):
    triangle = as_cycle(edge_set(k4, [0, 1, 3]))
    assert triangle.vertices == (U, X, V)
    assert isinstance(as_cycle(edge_set(k4, [0, 1])), NotACycle)
    assert not is_cycle_mask(k4, k4.full_mask)
    with pytest.raises(InvalidCycleError, match="degree"):
        cycle_from_mask(k4, k4.full_mask)


def test_path_validation(k4):
    assert path(k4, [U, X, V]).mask == k4.edge_mask([U, X, V])
    assert path(k4, [U]).length == 0
    with pytest.raises(InvalidPathError, match="repeats"):
        path(k4, [U, X, U])
    square = cycle_graph(4)
    with pytest.raises(InvalidPathError, match="non-edge"):
        path(square, [0, 2])
    with pytest.raises(InvalidPathError, match="not in the graph"):
        path(square, [0, 9])


def test_path_helpers(k4):
    P = path(k4, [U, X, Y, V])
    assert P.label() == "u-x-y-v"
    assert P.reversed().vertices == (V, Y, X, U)
    assert P.subpath(X, V).vertices == (X, Y, V)
    with pytest.raises(InvalidPathError):
        P.subpath(X, 7)


def test_parse_path_accepts_labels_and_indices(k4):
    assert parse_path(k4, "u-x-v").vertices == (U, X, V)
    assert parse_path(k4, "0,2,3").vertices == (U, Y, V)
    with pytest.raises(InvalidPathError, match="unknown vertex"):
        parse_path(k4, "u-q-v")


def test_distance_and_shortest_path():
    square = cycle_graph(4)
    assert distance(square, 0, 2) == 2
    assert shortest_uv_path(square, 0, 2).vertices == (0, 1, 2)
    assert shortest_uv_path(square, 2, 0).vertices == (2, 1, 0)
    apart = build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(InvalidPathError):
        distance(apart, 0, 3)
    with pytest.raises(InvalidPathError):
        shortest_uv_path(apart, 0, 3)


def test_exchange_split_of_two_paths_around_the_square(k4):
    split = exchange_split(path(k4, [U, X, V]), path(k4, [U, Y, V]))
    assert (split.prefix, split.suffix) == (1, 1)
    assert (split.x, split.y) == (U, V)
    assert split.middle_s == (U, X, V)
    assert split.middle_t == (U, Y, V)


def test_exchange_split_rejects_crossed_paths(k4):
    # S Δ T is the 4-cycle u-x-v-y, but the middles share x and y
    S, T = path(k4, [U, X, Y, V]), path(k4, [U, Y, X, V])
    assert is_cycle_mask(k4, S.mask ^ T.mask)
    assert exchange_split(S, T) is None
    assert isinstance(classify_union(S, T), NotAdjacentShape)


def test_classify_union_builds_the_monocle(k4):
    M = classify_union(path(k4, [U, X, V]), path(k4, [U, X, Y, V]))
    assert isinstance(M, Monocle)
    assert M.cycle.vertices == (X, Y, V)
    assert M.attach_u.vertices == (U, X)
    assert M.attach_v.vertices == (V,)
    assert (M.u, M.v) == (U, V)
    assert (M.u_prime, M.v_prime) == (X, V)


def test_classify_union_rejects_identical_or_mismatched_paths(k4):
    S = path(k4, [U, X, V])
    with pytest.raises(NotAdjacentError):
        classify_union(S, S)
    with pytest.raises(InvalidPathError):
        classify_union(S, path(k4, [U, X]))


@hypothesis_settings(deadline=None, max_examples=60)
@given(graph_with_pair())
def test_adjacent_paths_differ_by_a_cycle(case):
    G, u, v = case
    paths = enumerate_uv_paths(G, u, v)
    for i, S in enumerate(paths):
        for T in paths[i + 1:]:
            split = exchange_split(S, T)
            if split is None:
                continue
            traced = trace_cycle(G, S.mask ^ T.mask)
            assert isinstance(traced, tuple)
            assert set(traced) == set(split.middle_s) | set(split.middle_t)
