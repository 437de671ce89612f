from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings as hypothesis_settings
from pydantic import ValidationError

from uv_path_graphs.src.corpus import (
    chorded_square_fixture,
    cycle_graph,
    k4_fixture,
    k4_plane_fixture,
    plane_corpus,
)
from uv_path_graphs.src.cycle_space import (
    CycleSet,
    cycle_set,
    cycles_through_edge,
    enumerate_all_cycles,
    internal_faces,
)
from uv_path_graphs.src.delta_star import (
    Unicycle,
    closure_sequence,
    cycles_in_unicycle_plus_edge,
    delta_star_closure,
    enumerate_unicycles_containing,
    extend_monocle_to_unicycle,
    has_property_delta_star,
    interpolate,
    is_delta_star_dense,
    project_along_closure,
    project_walk,
)
from uv_path_graphs.src.errors import (
    DeltaStarError,
    EdgeSetMismatchError,
    NotAdjacentError,
    UnicycleError,
    UnknownElementError,
)
from uv_path_graphs.src.graph_core import build_graph, classify_union, cycle_from_mask, path
from uv_path_graphs.src.path_space import (
    are_adjacent,
    build_path_graph,
    distance as path_distance,
    enumerate_uv_paths,
    is_walk,
)
from tests.tests_uv_path_graphs.strategies import SMALL_GRAPHS, graph_with_cycle, graph_with_cycles

U, X, Y, V = 0, 1, 2, 3
UXV, UYV, SQUARE = 0b001011, 0b010101, 0b011110


@pytest.fixture
def k4():
    G, _, _, _ = k4_fixture()
    return G


@pytest.fixture
def two_triangles():
    """Triangle 0-1-2, bridge 2-3, and a triangle 3-4-5 closed by edge 6."""
    return build_graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (3, 5), (4, 5)])


########## unicycles ##########

def test_unicycles_of_a_k4_triangle(k4):
    sigma = cycle_from_mask(k4, UXV)
    found = enumerate_unicycles_containing(k4, sigma)
    assert [U_.mask for U_ in found] == [UXV | 1 << 2, UXV | 1 << 4, UXV | 1 << 5]
    assert all(U_.cycle == sigma for U_ in found)


def test_spanning_cycle_is_its_own_unicycle(k4):
    assert [U_.mask for U_ in enumerate_unicycles_containing(k4, cycle_from_mask(k4, SQUARE))] == [SQUARE]
    G = cycle_graph(5)
    assert len(enumerate_unicycles_containing(G, cycle_from_mask(G, G.full_mask))) == 1


def _brute_unicycles(G, sigma):
    # n edges, spanning and connected: exactly one cycle, and it is sigma
    others = [k for k in range(G.m) if not sigma.mask >> k & 1]
    found = []
    for extra in combinations(others, G.vertex_count - sigma.length):
        chosen = sigma.edge_indices() + list(extra)
        sub = nx.Graph([G.edges[k] for k in chosen])
        if sub.number_of_nodes() == G.vertex_count and nx.is_connected(sub):
            found.append(sum(1 << k for k in chosen))
    return sorted(found)


def test_unicycle_enumeration_matches_brute_force():
    for G in SMALL_GRAPHS:
        for sigma in enumerate_all_cycles(G).cycles:
            found = [U_.mask for U_ in enumerate_unicycles_containing(G, sigma)]
            assert found == _brute_unicycles(G, sigma)


@hypothesis_settings(deadline=None, max_examples=40)
@given(graph_with_cycle())
def test_unicycle_enumeration_on_six_and_seven_vertices(case):
    G, sigma = case
    found = [U_.mask for U_ in enumerate_unicycles_containing(G, sigma)]
    assert found == _brute_unicycles(G, sigma)
    assert all(U_.cycle == sigma for U_ in enumerate_unicycles_containing(G, sigma))


def test_unicycle_validation(k4):
    sigma = cycle_from_mask(k4, UXV)
    with pytest.raises(ValidationError):
        Unicycle(graph=k4, mask=UXV, cycle=sigma)
    with pytest.raises(ValidationError):
        Unicycle(graph=k4, mask=0b110101, cycle=sigma)


def test_cycle_from_another_graph_is_rejected(k4):
    square = cycle_graph(4)
    with pytest.raises(EdgeSetMismatchError):
        enumerate_unicycles_containing(k4, cycle_from_mask(square, square.full_mask))


def test_extend_monocle_to_unicycle(k4):
    M = classify_union(path(k4, [U, V]), path(k4, [U, X, V]))
    grown = extend_monocle_to_unicycle(k4, M)
    assert grown.mask == UXV | 1 << 2
    assert grown.cycle.mask == UXV


def test_cycles_in_unicycle_plus_edge_with_shared_path(k4):
    Uc = Unicycle(graph=k4, mask=0b001111, cycle=cycle_from_mask(k4, UXV))
    found = cycles_in_unicycle_plus_edge(Uc, 4)
    assert found.matrix == [UXV, UYV, SQUARE]


def test_cycles_in_unicycle_plus_edge_with_disjoint_cycles(two_triangles):
    G = two_triangles
    Uc = Unicycle(graph=G, mask=0b0111111, cycle=cycle_from_mask(G, 0b0000111))
    found = cycles_in_unicycle_plus_edge(Uc, 6)
    assert found.matrix == [0b0000111, 0b1110000]


def test_cycles_in_unicycle_plus_edge_rejects_bad_edges(k4):
    Uc = Unicycle(graph=k4, mask=0b001111, cycle=cycle_from_mask(k4, UXV))
    with pytest.raises(UnicycleError):
        cycles_in_unicycle_plus_edge(Uc, 0)
    with pytest.raises(UnknownElementError):
        cycles_in_unicycle_plus_edge(Uc, 9)


########## Property Delta* ##########

def test_square_has_delta_star_through_the_chord(k4):
    C = cycle_set(k4, [UXV, UYV])
    check = has_property_delta_star(k4, cycle_from_mask(k4, SQUARE), C)
    assert check
    (witness,) = check.witnesses
    assert witness.e == 0
    assert (witness.alpha.mask, witness.beta.mask) == (UXV, UYV)
    assert witness.alpha.mask ^ witness.beta.mask == SQUARE
    assert witness.connector.vertices == (U, V)


def test_delta_star_fails_without_witnesses(k4):
    check = has_property_delta_star(k4, cycle_from_mask(k4, SQUARE), CycleSet(graph=k4))
    assert not check
    assert check.failing_unicycle.mask == SQUARE


def test_membership_is_not_a_shortcut(k4):
    sigma = cycle_from_mask(k4, UXV)
    assert not has_property_delta_star(k4, sigma, cycle_set(k4, [UXV]))


def test_witnesses_are_valid_on_every_unicycle(k4):
    C = enumerate_all_cycles(k4)
    for sigma in C.cycles:
        check = has_property_delta_star(k4, sigma, C)
        assert check
        assert len(check.witnesses) == len(enumerate_unicycles_containing(k4, sigma))
        for w in check.witnesses:
            assert not w.unicycle.mask >> w.e & 1
            assert w.alpha.mask ^ w.beta.mask == sigma.mask
            assert w.alpha.mask & ~(w.unicycle.mask | 1 << w.e) == 0
            assert w.connector.mask == w.alpha.mask & w.beta.mask


########## closure ##########

def test_closure_adds_the_square(k4):
    C = cycle_set(k4, [UXV, UYV])
    assert [c.mask for c in closure_sequence(C, k4)] == [SQUARE]
    assert set(delta_star_closure(C, k4).masks) == {UXV, UYV, SQUARE}


def test_closure_of_the_empty_set_is_empty(k4):
    assert closure_sequence(CycleSet(graph=k4), k4) == []


def test_closure_order_accepts_masks_and_cycles(k4):
    C = cycle_set(k4, [UXV, UYV])
    order = [SQUARE, cycle_from_mask(k4, UXV)]
    assert [c.mask for c in closure_sequence(C, k4, order=order, batch=False)] == [SQUARE]


def test_dense_examples(k4):
    G, emb = chorded_square_fixture()
    assert is_delta_star_dense(internal_faces(G, emb), G)
    assert is_delta_star_dense(cycles_through_edge(k4, 0), k4)
    assert not is_delta_star_dense(CycleSet(graph=k4), k4)
    assert not is_delta_star_dense(cycle_set(k4, [UXV, UYV]), k4)


def test_internal_faces_of_plane_graphs_are_dense():
    for inst in plane_corpus(5).instances:
        assert is_delta_star_dense(inst.cycles, inst.graph)


def test_cycles_through_an_edge_are_dense():
    for G in SMALL_GRAPHS:
        for e in range(G.m):
            assert is_delta_star_dense(cycles_through_edge(G, e), G)


@hypothesis_settings(deadline=None, max_examples=40)
@given(graph_with_cycles())
def test_closure_is_a_closure_operator(case):
    G, C = case
    closure = delta_star_closure(C, G)
    assert set(C.masks) <= set(closure.masks)
    assert delta_star_closure(closure, G).masks == closure.masks

    scan = list(reversed(enumerate_all_cycles(G).cycles))
    sequential = delta_star_closure(C, G, order=scan, batch=False)
    assert sequential.masks == closure.masks


########## interpolation and projection ##########

def test_interpolate_through_the_chord(k4):
    C = cycle_set(k4, [UXV, UYV])
    Q = interpolate(path(k4, [U, X, V]), path(k4, [U, Y, V]), C)
    assert Q.vertices == (U, V)


def test_interpolate_returns_t_for_members(k4):
    C = cycle_set(k4, [SQUARE])
    T = path(k4, [U, Y, V])
    assert interpolate(path(k4, [U, X, V]), T, C) == T


def test_interpolate_errors(k4):
    with pytest.raises(DeltaStarError):
        interpolate(path(k4, [U, X, V]), path(k4, [U, Y, V]), CycleSet(graph=k4))
    with pytest.raises(NotAdjacentError):
        interpolate(path(k4, [U, X, Y, V]), path(k4, [U, Y, X, V]), enumerate_all_cycles(k4))


@hypothesis_settings(deadline=None, max_examples=60)
@given(graph_with_cycles())
def test_interpolated_paths_use_members_of_c(case):
    G, C = case
    u, v = 0, G.vertex_count - 1
    paths = enumerate_uv_paths(G, u, v)
    PG = build_path_graph(G, u, v, C)
    for i, S in enumerate(paths):
        for T in paths[i + 1:]:
            step = are_adjacent(S, T)
            if not step or step.cycle_mask in C:
                continue
            holds = has_property_delta_star(G, cycle_from_mask(G, step.cycle_mask), C).holds
            try:
                Q = interpolate(S, T, C)
            except DeltaStarError:
                assert not holds
                continue
            assert holds
            assert S.mask ^ Q.mask in C
            assert Q.mask ^ T.mask in C
            assert are_adjacent(S, Q) and are_adjacent(Q, T)
            assert path_distance(PG, S, T) <= 2


def test_project_walk_replaces_the_square_step(k4):
    C = cycle_set(k4, [UXV, UYV])
    S, T = path(k4, [U, X, V]), path(k4, [U, Y, V])
    projected = project_walk([S, T], C, cycle_from_mask(k4, SQUARE))
    assert [P.vertices for P in projected] == [(U, X, V), (U, V), (U, Y, V)]
    assert is_walk(build_path_graph(k4, U, V, C), projected)
    assert project_walk([], C, cycle_from_mask(k4, SQUARE)) == []


def test_project_walk_rejects_foreign_steps(k4):
    C = cycle_set(k4, [UXV])
    S, T = path(k4, [U, Y, V]), path(k4, [U, V])
    with pytest.raises(NotAdjacentError):
        project_walk([S, T], C, cycle_from_mask(k4, SQUARE))


def test_project_along_closure(k4):
    C = cycle_set(k4, [UXV, UYV])
    added = closure_sequence(C, k4)
    closed = build_path_graph(k4, U, V, C.with_cycles(added))
    walk = [path(k4, [U, X, V]), path(k4, [U, Y, V])]
    assert is_walk(closed, walk)

    projected = project_along_closure(walk, C, added)
    assert projected[0] == walk[0] and projected[-1] == walk[-1]
    assert is_walk(build_path_graph(k4, U, V, C), projected)
    assert all(mask in C for mask in (a.mask ^ b.mask for a, b in zip(projected, projected[1:])))


def test_plane_k4_faces_are_dense():
    G, emb = k4_plane_fixture()
    assert is_delta_star_dense(internal_faces(G, emb), G)
