"""Vertex-cover reduction on every labelled source graph with 2..4 vertices:
check that the best free set is a minimum vertex cover and that its revenue
matches the closed form."""

from itertools import combinations

from cascade_pricer.graph import Graph
from cascade_pricer.oracles import build_hardness_instance, verify_hardness_structure


def sources(max_n=4):
    for n in range(2, max_n + 1):
        pairs = list(combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            yield Graph.from_edges(n, [e for i, e in enumerate(pairs) if mask >> i & 1])


def main():
    checked = failed = 0
    for src in sources():
        rep = verify_hardness_structure(build_hardness_instance(src))
        ok = rep.identities_hold and rep.optimum_is_min_cover and rep.formula_matches
        checked += 1
        if not ok:
            failed += 1
            print("FAIL", sorted(src.edges), rep)
    print(f"{checked} sources checked, {failed} failures")


if __name__ == "__main__":
    main()
