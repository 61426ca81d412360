"""Exact adaptive and non-adaptive optima on the 6-node gap example, plus a
sweep over small random graphs showing the gap is always >= 1."""

import random

from cascade_pricer.graph import Graph, gap_example_graph
from cascade_pricer.models import accept_half_model
from cascade_pricer.oracles import adaptivity_gap


def random_connected(n, p, rng):
    while True:
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        g = Graph.from_edges(n, edges)
        if g.is_connected():
            return g


def main():
    model = accept_half_model()
    a, na, ratio = adaptivity_gap(gap_example_graph(), [0], model, [0, 1])
    print(f"gap example: adaptive {a} ({float(a):.4f}), non-adaptive {na}, ratio {ratio} = {float(ratio)}")
    rng = random.Random(0)
    worst, best = None, None
    for _ in range(40):
        g = random_connected(rng.randint(3, 7), 0.45, rng)
        _, _, r = adaptivity_gap(g, [0], model, [0, 1])
        worst = r if worst is None else min(worst, r)
        best = r if best is None else max(best, r)
    print(f"40 random graphs: ratio range [{float(worst):.4f}, {float(best):.4f}]")


if __name__ == "__main__":
    main()
