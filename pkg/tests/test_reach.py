import numpy as np

from exposcan.flows import EdgeKind, FlowGraph, FlowNode, reachable, shortest_path
from exposcan.flows.graph import GuardInfo


def _graph_from_edges(n_nodes, edges):
    graph = FlowGraph()
    for i in range(n_nodes):
        graph.add_node(FlowNode(f"n{i}", "var", "f.java", i + 1, i + 1, f"n{i}",
                                guards=GuardInfo()))
    for src, dst in edges:
        graph.add_edge(f"n{src}", f"n{dst}", EdgeKind.ASSIGN)
    return graph


def _closure(n_nodes, edges):
    reach = np.eye(n_nodes, dtype=bool)
    for src, dst in edges:
        reach[src, dst] = True
    for k in range(n_nodes):
        for i in range(n_nodes):
            if reach[i, k]:
                reach[i] |= reach[k]
    return reach


def test_disconnected_nodes_unreachable():
    graph = _graph_from_edges(2, [])
    assert not reachable(graph, "n0", "n1")


def test_three_node_chain_has_three_steps():
    graph = _graph_from_edges(3, [(0, 1), (1, 2)])
    path = shortest_path(graph, ["n0"], {"n2"})
    assert path is not None
    assert [node for node, _ in path] == ["n0", "n1", "n2"]
    assert [edge for _, edge in path] == [None, "Assign", "Assign"]


def test_shortest_path_is_shortest():
    graph = _graph_from_edges(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    path = shortest_path(graph, ["n0"], {"n4"})
    assert len(path) == 3  # via n3


def test_max_depth_bounds_search():
    edges = [(i, i + 1) for i in range(10)]
    graph = _graph_from_edges(11, edges)
    assert shortest_path(graph, ["n0"], {"n10"}, max_depth=5) is None
    assert shortest_path(graph, ["n0"], {"n10"}, max_depth=10) is not None


def test_random_graphs_match_transitive_closure():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n = int(rng.integers(2, 31))
        density = rng.uniform(0.02, 0.25)
        edges = [(int(i), int(j)) for i in range(n) for j in range(n)
                 if i != j and rng.random() < density]
        graph = _graph_from_edges(n, edges)
        closure = _closure(n, edges)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                assert reachable(graph, f"n{i}", f"n{j}") == bool(closure[i, j])
