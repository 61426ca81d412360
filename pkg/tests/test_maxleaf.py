import random

import networkx as nx
import pytest
from hypothesis import given

from cascade_pricer.errors import BudgetError
from cascade_pricer.graph import (Graph, GraphError, complete_graph, cycle_graph,
                                  generate_preferential_attachment, path_graph, star_graph)
from cascade_pricer.maxleaf import (SpanningTree, approx_max_leaf_tree, check_leaf_bounds,
                                    exact_max_leaf_tree, orient)
from conftest import connected_graphs
from reference import max_leaves, to_nx


def from_nx(h):
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), h.edges())


PETERSEN = from_nx(nx.petersen_graph())
CUBE = from_nx(nx.hypercube_graph(3))
K23 = from_nx(nx.complete_bipartite_graph(2, 3))


def assert_spanning_tree(g, t):
    assert t.is_spanning_tree_of(g)
    h = nx.Graph(list(t.edges))
    h.add_nodes_from(range(g.n))
    assert nx.is_tree(h)
    assert all(g.has_edge(u, v) for u, v in t.edges)


def test_cycle_gives_a_spanning_path():
    t = approx_max_leaf_tree(cycle_graph(5), 0)
    assert_spanning_tree(cycle_graph(5), t)
    assert max(t.tree_degree) == 2
    # a path has two ends; the root may sit on one of them
    assert len(t.leaves) in (1, 2)


def test_k4():
    t = approx_max_leaf_tree(complete_graph(4), 0)
    assert t.leaf_count >= 2
    tree, count = exact_max_leaf_tree(complete_graph(4))
    assert count == 3 == max_leaves(complete_graph(4))


def test_petersen():
    _, opt = exact_max_leaf_tree(PETERSEN)
    assert opt == max_leaves(PETERSEN)
    assert opt >= 10 / 4 + 2
    assert approx_max_leaf_tree(PETERSEN, 0).leaf_count >= opt / 2


def test_path_p4_rooted_at_end():
    tree, count = exact_max_leaf_tree(path_graph(4), root=0)
    assert count == 1 and tree.leaves == {3}


def test_k23():
    _, count = exact_max_leaf_tree(K23)
    assert count == 3 == max_leaves(K23)


def test_exact_budget():
    g = generate_preferential_attachment(15, 2, 0)
    with pytest.raises(BudgetError):
        exact_max_leaf_tree(g)


def test_disconnected_rejected():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(GraphError):
        approx_max_leaf_tree(g, 0)
    with pytest.raises(GraphError):
        exact_max_leaf_tree(g)


@given(connected_graphs(min_n=1, max_n=8))
def test_exact_matches_spanning_tree_enumeration(g):
    tree, count = exact_max_leaf_tree(g)
    assert_spanning_tree(g, tree)
    assert count == tree.leaf_count == max_leaves(g)


@given(connected_graphs(min_n=2, max_n=8))
def test_rooted_exact_matches_enumeration(g):
    tree, count = exact_max_leaf_tree(g, root=0)
    assert tree.root == 0 and count == len(tree.leaves) == max_leaves(g, root=0)


@given(connected_graphs(min_n=1, max_n=12))
def test_approx_is_valid_and_within_half(g):
    t = approx_max_leaf_tree(g, 0)
    assert_spanning_tree(g, t)
    assert t.root == 0
    _, opt = exact_max_leaf_tree(g)
    assert t.leaf_count >= opt / 2


@given(connected_graphs(min_n=1, max_n=12))
def test_approx_deterministic(g):
    assert approx_max_leaf_tree(g, 0) == approx_max_leaf_tree(g, 0)


def test_leaf_set_excludes_root():
    t = approx_max_leaf_tree(star_graph(4), 1)
    assert 1 not in t.leaves and t.root == 1
    assert t.leaves == {2, 3, 4}


def test_tree_serialisation_round_trip():
    g = generate_preferential_attachment(60, 2, 5)
    t = approx_max_leaf_tree(g, 3)
    text = t.dumps()
    assert text.startswith("root 3\n")
    assert SpanningTree.loads(text) == t


def test_orient_rejects_non_spanning_edges():
    with pytest.raises(GraphError):
        orient(4, [(0, 1), (2, 3)], 0)


def test_large_graph_near_linear_and_leafy():
    g = generate_preferential_attachment(5000, 2, 1)
    t = approx_max_leaf_tree(g, 0)
    assert t.is_spanning_tree_of(g)
    rep = check_leaf_bounds(g, t)
    assert rep.optimum is None and rep.tree_ok
    assert t.leaf_count >= rep.good / 100


def test_bounds_report_examples():
    rep = check_leaf_bounds(path_graph(6), approx_max_leaf_tree(path_graph(6), 0))
    assert rep.n3 == 0 and rep.optimum_ok and rep.tree_ok
    tree, _ = exact_max_leaf_tree(complete_graph(4))
    rep = check_leaf_bounds(complete_graph(4), tree)
    assert rep.optimum == 3 and rep.optimum >= rep.lemma3_bound == 1.5 and rep.optimum_ok
    rep = check_leaf_bounds(CUBE, exact_max_leaf_tree(CUBE)[0])
    assert rep.fact1_bound == 4 and rep.optimum >= 4 and rep.optimum_ok


def _random_regularish(rng, n):
    # 3-regular when possible, which exercises the n/4 + 2 bound
    h = nx.random_regular_graph(3, n, seed=rng.randrange(10**6))
    return from_nx(h) if nx.is_connected(h) else None


def test_min_degree_three_corpus():
    rng = random.Random(3)
    checked = 0
    for _ in range(40):
        g = _random_regularish(rng, rng.choice([4, 6, 8, 10, 12]))
        if g is None:
            continue
        _, opt = exact_max_leaf_tree(g)
        assert opt >= g.n / 4 + 2
        checked += 1
    assert checked >= 30
