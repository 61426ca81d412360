"""Leaf-count bounds and approximation quality on random small graphs."""

import random

from cascade_pricer.graph import Graph
from cascade_pricer.maxleaf import approx_max_leaf_tree, check_leaf_bounds, exact_max_leaf_tree


def main(count=300, seed=0):
    rng = random.Random(seed)
    worst = 1.0
    done = 0
    while done < count:
        n = rng.randint(4, 12)
        p = rng.uniform(0.2, 0.7)
        g = Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])
        if not g.is_connected():
            continue
        t = approx_max_leaf_tree(g, 0)
        rep = check_leaf_bounds(g, t)
        _, opt = exact_max_leaf_tree(g)
        assert rep.optimum_ok, (sorted(g.edges), rep)
        worst = min(worst, t.leaf_count / opt)
        done += 1
    print(f"{count} graphs: exact optimum met every bound; worst approx/exact = {worst:.3f}")


if __name__ == "__main__":
    main()
