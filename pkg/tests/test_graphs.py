"""Grid and general graph structure, exact expansion, min cut, sampling."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridsign.errors import CapacityError
from gridsign.graphs import (
    Graph,
    GridGraph,
    boundary,
    build_grid,
    connected_components,
    degrees,
    expansion_constant,
    min_cut,
    random_regular_graph,
    read_graph,
    write_graph,
)


def test_grid_shape_and_edge_count():
    g = build_grid(3, 4)
    assert g.n_vertices == 12
    assert len(g.edges) == 3 * 3 + 2 * 4
    degs = degrees(g)
    assert sorted(degs)[:4] == [2, 2, 2, 2]  # corners
    assert max(degs) == 4


def test_grid_vertex_coords_roundtrip():
    g = build_grid(4, 7)
    for v in range(g.n_vertices):
        r, c = g.coords(v)
        assert g.vertex(r, c) == v
        assert 0 <= r < 4 and 0 <= c < 7


def test_grid_edge_id_layout():
    g = build_grid(3, 4)
    idx = g.edge_index
    h = g.horizontal_edge_ids
    v = g.vertical_edge_ids
    assert h.shape == (3, 3) and v.shape == (2, 4)
    for r in range(3):
        for c in range(3):
            assert h[r, c] == idx[(g.vertex(r, c), g.vertex(r, c + 1))]
    for r in range(2):
        for c in range(4):
            assert v[r, c] == idx[(g.vertex(r, c), g.vertex(r + 1, c))]


def test_grid_rejects_empty():
    with pytest.raises(ValueError):
        build_grid(0, 3)


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(3, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(3, ((0, 1), (1, 0), (1, 2)))  # parallel after canonicalization
    with pytest.raises(ValueError):
        Graph(3, ((0, 5),))
    with pytest.raises(ValueError):
        Graph(4, ((0, 1), (2, 3)))  # disconnected
    with pytest.raises(ValueError):
        Graph(3, ((0, 1), (1, 2)), degree=2)  # endpoints have degree 1
    g = Graph(3, ((2, 1), (1, 0)))
    assert g.edges == ((1, 2), (0, 1)) or g.edges == ((0, 1), (1, 2))
    for u, v in g.edges:
        assert u < v


def test_boundary_middle_corner_full():
    g = build_grid(3, 3)
    mid = {g.vertex(1, 1)}
    assert len(boundary(g, mid)) == 4
    assert len(boundary(g, {0})) == 2
    assert boundary(g, set(range(9))) == frozenset()
    for u, v in boundary(g, mid):
        assert u < v
    with pytest.raises(ValueError):
        boundary(g, {99})


def test_connected_components_split():
    g = build_grid(3, 3)
    comps = connected_components(g, {0, 1, 8})
    assert sorted(map(sorted, comps)) == [[0, 1], [8]]
    assert connected_components(g, set()) == []


def cycle_graph(n):
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), degree=2)


def complete_graph(n):
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)),
                 degree=n - 1)


def test_expansion_constant_cycle_and_clique():
    # C4: worst set is two adjacent vertices, cut 2, d|S| = 4
    assert expansion_constant(cycle_graph(4)) == Fraction(1, 2)
    # C8: worst set is an arc of 4, cut 2, d|S| = 8
    assert expansion_constant(cycle_graph(8)) == Fraction(1, 4)
    # K4: |S|=2 gives cut 4 over 6
    assert expansion_constant(complete_graph(4)) == Fraction(2, 3)


def test_expansion_constant_guards():
    with pytest.raises(ValueError):
        expansion_constant(build_grid(2, 3))  # not regular
    with pytest.raises(CapacityError):
        expansion_constant(cycle_graph(22))


def _brute_min_cut(g):
    n = g.n_vertices
    best = None
    for s in range(1, (1 << n) - 1):
        cut = 0
        for u, v in g.edges:
            if ((s >> u) & 1) != ((s >> v) & 1):
                cut += 1
        best = cut if best is None else min(best, cut)
    return best


def test_min_cut_known_values():
    assert min_cut(cycle_graph(6)) == 2
    assert min_cut(complete_graph(4)) == 3
    assert min_cut(Graph(4, ((0, 1), (1, 2), (2, 3)))) == 1
    assert min_cut(build_grid(3, 3)) == 2


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_min_cut_matches_subset_enumeration(seed):
    g = random_regular_graph(8, 3, seed)
    assert min_cut(g) == _brute_min_cut(g)


def test_random_regular_graph_contract():
    g = random_regular_graph(14, 3, 7)
    assert g.n_vertices == 14 and g.degree == 3
    assert all(d == 3 for d in degrees(g))
    assert random_regular_graph(14, 3, 7).edges == g.edges
    assert random_regular_graph(14, 3, 8).edges != g.edges
    with pytest.raises(ValueError):
        random_regular_graph(7, 3, 0)  # odd stub count


def test_graph_file_roundtrip(tmp_path):
    grid = build_grid(4, 5)
    p = tmp_path / "g.graph"
    write_graph(grid, str(p))
    back = read_graph(str(p))
    assert isinstance(back, GridGraph)
    assert back.rows == 4 and back.cols == 5 and back.edges == grid.edges

    reg = random_regular_graph(10, 3, 1)
    p2 = tmp_path / "r.graph"
    write_graph(reg, str(p2))
    back2 = read_graph(str(p2))
    assert not isinstance(back2, GridGraph)
    assert back2.n_vertices == 10 and set(back2.edges) == set(reg.edges)
