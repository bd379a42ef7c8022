import numpy as np
import pytest

from DAdmmSim.src.errors import ConnectivityError
from DAdmmSim.src.NetworkGraph import (
    NETWORK_TABLE,
    Coloring,
    Graph,
    build_network,
    gen_barabasi_albert,
    gen_erdos_renyi,
    gen_geometric,
    gen_lattice,
    gen_watts_strogatz,
    greedy_color,
    incidence_matrix,
    is_connected,
    lattice_shape,
    network_suite,
    read_edge_list,
    write_edge_list,
)


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])


def test_degrees_sum_to_twice_edge_count(star):
    assert star.degrees.tolist() == [4, 1, 1, 1, 1]
    assert star.degrees.sum() == 2 * star.edge_count
    assert star.neighbors(0) == (1, 2, 3, 4)


def test_erdos_renyi_forced_edges():
    assert gen_erdos_renyi(2, 1.0, seed=3).edges == ((0, 1),)
    assert gen_erdos_renyi(5, 1.0, seed=3).edge_count == 10


def test_erdos_renyi_sparse_is_connected():
    for seed in range(5):
        g = gen_erdos_renyi(10, 0.27, seed)
        assert is_connected(g)
        assert 5 <= g.edge_count <= 45


def test_watts_strogatz_without_rewiring_is_a_ring():
    ring = gen_watts_strogatz(6, 2, 0.0, seed=0)
    assert ring.edge_count == 6
    assert set(ring.degrees) == {2}
    square = gen_watts_strogatz(4, 2, 0.0, seed=0)
    assert square.edges == ((0, 1), (0, 3), (1, 2), (2, 3))


def test_watts_strogatz_rewiring_keeps_edge_count():
    g = gen_watts_strogatz(50, 4, 0.6, seed=11)
    assert g.edge_count == 100
    assert is_connected(g)


def test_watts_strogatz_validates_arguments():
    with pytest.raises(ValueError):
        gen_watts_strogatz(10, 3, 0.5, seed=0)
    with pytest.raises(ValueError):
        gen_watts_strogatz(4, 4, 0.5, seed=0)


def test_barabasi_albert_edge_counts():
    assert gen_barabasi_albert(3, seed=0).edges == ((0, 1), (0, 2), (1, 2))
    g = gen_barabasi_albert(50, seed=4)
    assert g.edge_count == 2 * (50 - 2) + 1
    assert is_connected(g)


def test_barabasi_albert_average_degree_near_four():
    g = gen_barabasi_albert(200, seed=1)
    assert g.average_degree() == pytest.approx(4, abs=0.1)


def test_geometric_graphs():
    assert gen_geometric(2, 1.5, seed=0).edges == ((0, 1),)
    assert is_connected(gen_geometric(10, 0.36, seed=2))


def test_geometric_gives_up_without_connectivity():
    with pytest.raises(ConnectivityError) as info:
        gen_geometric(3, 1e-12, seed=0)
    assert info.value.attempts == 100


@pytest.mark.parametrize(
    "P, shape, edges",
    [(10, (2, 5), 13), (4, (2, 2), 4), (7, (1, 7), 6), (50, (5, 10), 85)],
)
def test_lattice_is_as_square_as_possible(P, shape, edges):
    assert lattice_shape(P) == shape
    g = gen_lattice(P)
    assert g.edge_count == edges
    assert is_connected(g)


def test_is_connected():
    assert not is_connected(Graph.from_edges(2, []))
    assert not is_connected(Graph.from_edges(4, [(0, 1), (1, 2)]))
    assert is_connected(gen_lattice(12))


def test_greedy_color_counts(star, triangle):
    assert greedy_color(star).count == 2
    assert greedy_color(triangle).count == 3
    assert greedy_color(gen_lattice(10)).count == 2
    assert greedy_color(gen_lattice(50)).count == 2


def test_greedy_color_is_proper_and_bounded():
    for label, g in network_suite(10, seed=5):
        coloring = greedy_color(g)
        assert coloring.is_proper(g), label
        assert coloring.count <= g.degrees.max() + 1


def test_coloring_requires_every_color():
    with pytest.raises(ValueError):
        Coloring(colors=(0, 2, 0))


def test_node_order_sorts_by_color_then_index():
    coloring = Coloring(colors=(1, 0, 1, 0))
    assert coloring.node_order == (1, 3, 0, 2)
    assert coloring.classes == ((1, 3), (0, 2))


def test_incidence_matrix_of_an_edge(path2):
    np.testing.assert_array_equal(incidence_matrix(path2).matrix, [[1.0], [-1.0]])


def test_incidence_product_is_laplacian(triangle):
    B = incidence_matrix(triangle).matrix
    np.testing.assert_array_equal(B @ B.T, triangle.laplacian())
    assert np.all(B.sum(axis=0) == 0)


def test_color_block_products_are_diagonal():
    lattice = gen_lattice(4)
    B = incidence_matrix(lattice)
    np.testing.assert_array_equal(B.block([0, 3]) @ B.block([0, 3]).T, np.diag([2, 2]))

    for _, g in network_suite(10, seed=1):
        coloring = greedy_color(g)
        B = incidence_matrix(g)
        for members in coloring.classes:
            block = B.block(members)
            np.testing.assert_array_equal(
                block @ block.T, np.diag(g.degrees[list(members)])
            )


def test_generators_are_deterministic():
    for model, params in [
        ("erdos-renyi", {"p": 0.3}),
        ("watts-strogatz", {"n": 4, "p": 0.8}),
        ("barabasi-albert", {}),
        ("geometric", {"d": 0.4}),
    ]:
        first = build_network(model, 20, 9, **params)
        assert build_network(model, 20, 9, **params).edges == first.edges


def test_build_network_rejects_unknown_model():
    with pytest.raises(ValueError):
        build_network("hypercube", 8)


def test_network_suite_has_seven_connected_models():
    suite = network_suite(10, seed=0)
    assert [label for label, _ in suite] == [row[0] for row in NETWORK_TABLE]
    assert all(is_connected(g) and g.node_count == 10 for _, g in suite)


def test_edge_list_round_trip(tmp_path):
    g = gen_watts_strogatz(12, 4, 0.5, seed=3)
    path = tmp_path / "ws.txt"
    write_edge_list(g, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"12 {g.edge_count}"
    assert lines[1].split()[0] == "1"
    assert read_edge_list(path) == g


def test_edge_list_count_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 2\n1 2\n")
    with pytest.raises(ValueError):
        read_edge_list(path)


def test_watts_strogatz_rows_use_ring_degree():
    suite = dict(network_suite(10, seed=0))
    for label, _, params in NETWORK_TABLE:
        if label.startswith(("3-", "4-")):
            assert suite[label].edge_count == 10 * params["n"] // 2


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_network_suite_builds_at_fifty_nodes(seed):
    suite = network_suite(50, seed=seed)
    assert len(suite) == len(NETWORK_TABLE)
    for label, g in suite:
        assert g.node_count == 50, label
        assert is_connected(g), label
        assert greedy_color(g).is_proper(g), label
