"""Spanning trees with many leaves.

``approx_max_leaf_tree`` grows a leafy forest (every internal vertex gets at
least two new children) around high-degree vertices and then joins the pieces
with the cheapest edges in terms of leaves lost. ``exact_max_leaf_tree`` uses
the identity max leaves = n - (minimum connected dominating set) and is meant
for graphs of at most 14 nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .errors import BudgetError
from .graph import Graph, GraphError, good_vertex_count, high_degree_vertices

EXACT_NODE_BUDGET = 14


@dataclass(frozen=True)
class SpanningTree:
    root: int
    parent: tuple[int, ...]  # parent[root] == -1

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(v, p), max(v, p)) for v, p in enumerate(self.parent) if p >= 0)

    @cached_property
    def tree_degree(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    @cached_property
    def leaves(self) -> frozenset[int]:
        """Tree-degree-1 nodes other than the root."""
        return frozenset(v for v, d in enumerate(self.tree_degree) if d == 1 and v != self.root)

    @property
    def interior(self) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if v != self.root and v not in self.leaves)

    @property
    def leaf_count(self) -> int:
        """Tree-degree-1 nodes, root included (the usual max-leaf objective)."""
        return sum(1 for d in self.tree_degree if d == 1)

    def path_to_root(self, v: int) -> list[int]:
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path

    def is_spanning_tree_of(self, g: Graph) -> bool:
        if self.n != g.n or self.parent[self.root] != -1:
            return False
        if any(p < 0 for v, p in enumerate(self.parent) if v != self.root):
            return False
        if len(self.edges) != g.n - 1 or not all(g.has_edge(u, v) for u, v in self.edges):
            return False
        # n-1 edges and every node reaches the root => spanning tree
        for v in range(self.n):
            steps, u = 0, v
            while u != self.root:
                u = self.parent[u]
                steps += 1
                if steps > self.n:
                    return False
        return True

    def dumps(self) -> str:
        lines = [f"root {self.root}"]
        lines += [f"{v} {p}" for v, p in enumerate(self.parent) if p >= 0]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SpanningTree":
        root, pairs = None, []
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "root":
                root = int(parts[1])
            else:
                pairs.append((int(parts[0]), int(parts[1])))
        if root is None:
            raise GraphError("tree file has no root line")
        parent = [-1] * (len(pairs) + 1)
        for v, p in pairs:
            parent[v] = p
        return cls(root, tuple(parent))


def orient(n: int, edges, root: int) -> SpanningTree:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    parent = [-2] * n
    parent[root] = -1
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if parent[w] == -2:
                parent[w] = u
                queue.append(w)
    if -2 in parent:
        raise GraphError("edge set does not span the graph")
    return SpanningTree(root, tuple(parent))


def _require_connected(g: Graph, root: int | None = None) -> None:
    if root is not None and not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    if g.n == 0 or not g.is_connected():
        raise GraphError("graph must be connected and non-empty")


def _leafy_forest(g: Graph) -> tuple[list[tuple[int, int]], list[bool], list[int]]:
    """Greedy leafy forest: each tree is rooted at a vertex with >= 3 free
    neighbours and expanded only at leaves that gain >= 2 new children (or
    through a single free neighbour that itself has >= 2 free neighbours)."""
    n = g.n
    in_forest = [False] * n
    tree_deg = [0] * n
    edges: list[tuple[int, int]] = []

    def free_nbrs(v):
        return [w for w in g.adjacency[v] if not in_forest[w]]

    def attach(u, ws, frontier):
        for w in ws:
            in_forest[w] = True
            edges.append((u, w))
            tree_deg[u] += 1
            tree_deg[w] += 1
            frontier.append(w)

    order = sorted(range(n), key=lambda v: (-g.degree(v), v))
    for v in order:
        if in_forest[v] or len(free_nbrs(v)) < 3:
            continue
        in_forest[v] = True
        frontier: deque[int] = deque()
        attach(v, free_nbrs(v), frontier)
        while frontier:
            u = frontier.popleft()
            fresh = free_nbrs(u)
            if len(fresh) >= 2:
                attach(u, fresh, frontier)
            elif len(fresh) == 1:
                w = fresh[0]
                beyond = [x for x in g.adjacency[w] if not in_forest[x] and x != u]
                if len(beyond) >= 2:
                    attach(u, [w], deque())
                    attach(w, beyond, frontier)
    return edges, in_forest, tree_deg


def approx_max_leaf_tree(g: Graph, root: int) -> SpanningTree:
    """Spanning tree rooted at ``root`` with many leaves, in O(m log m)."""
    _require_connected(g, root)
    edges, in_forest, tree_deg = _leafy_forest(g)

    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)

    def leaf_cost(v):
        # joining at a forest leaf turns it internal; internal vertices are free
        if not in_forest[v]:
            return 1
        return 2 if tree_deg[v] <= 1 else 0

    rest = sorted((leaf_cost(u) + leaf_cost(v), u, v) for u, v in g.edges)
    chosen = list(edges)
    for _, u, v in rest:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            chosen.append((u, v))
    tree = orient(g.n, chosen, root)
    return _improve(g, tree)


def _improve(g: Graph, tree: SpanningTree, max_rounds: int = 2) -> SpanningTree:
    """Re-hang tree leaves' neighbours: a tree-degree-2 vertex whose child
    can attach elsewhere without creating a leaf loss becomes a leaf."""
    adj = [set() for _ in range(g.n)]
    for u, v in tree.edges:
        adj[u].add(v)
        adj[v].add(u)
    for _ in range(max_rounds):
        changed = False
        for x in range(g.n):
            if len(adj[x]) != 2:
                continue
            # try to move one tree edge (x, y) to (y, z) with z already internal
            for y in sorted(adj[x]):
                if len(adj[x]) != 2:
                    break
                cut = _side(adj, y, x)
                for z in g.adjacency[y]:
                    if z != x and len(adj[z]) >= 2 and z not in cut:
                        adj[x].discard(y)
                        adj[y].discard(x)
                        adj[y].add(z)
                        adj[z].add(y)
                        changed = True
                        break
        if not changed:
            break
    edges = {(min(u, v), max(u, v)) for u in range(g.n) for v in adj[u]}
    return orient(g.n, edges, tree.root)


def _side(adj, start, banned) -> set[int]:
    """Vertices reachable from ``start`` without crossing ``banned``."""
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w != banned and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def exact_max_leaf_tree(g: Graph, root: int | None = None) -> tuple[SpanningTree, int]:
    """Exhaustive optimum over connected dominating sets.

    With ``root`` given, maximises the number of non-root leaves of a tree
    rooted there; otherwise maximises the plain leaf count.
    """
    _require_connected(g, root)
    n = g.n
    if n > EXACT_NODE_BUDGET:
        raise BudgetError(f"exact max-leaf search limited to {EXACT_NODE_BUDGET} nodes, got {n}")
    if n == 1:
        return SpanningTree(0, (-1,)), 0
    closed = [(1 << v) | sum(1 << w for w in g.adjacency[v]) for v in range(n)]
    full = (1 << n) - 1

    def connected(mask: int) -> bool:
        start = (mask & -mask).bit_length() - 1
        seen, frontier = 1 << start, 1 << start
        while frontier:
            v = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            nxt = closed[v] & mask & ~seen
            seen |= nxt
            frontier |= nxt
        return seen == mask

    def dominating(mask: int) -> bool:
        cover = 0
        m = mask
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            cover |= closed[v]
        return cover == full

    best = None
    if root is None and n == 2:
        best = (0,)
    pool = [v for v in range(n) if v != root]
    fixed = (root,) if root is not None else ()
    for size in range(1, n + 1):
        if best is not None:
            break
        for combo in combinations(pool, size - len(fixed)):
            members = fixed + combo
            mask = sum(1 << v for v in members)
            if dominating(mask) and connected(mask):
                best = tuple(sorted(members))
                break
    tree = _tree_from_backbone(g, best, root if root is not None else best[0])
    count = len(tree.leaves) if root is not None else tree.leaf_count
    return tree, count


def _tree_from_backbone(g: Graph, backbone, root: int) -> SpanningTree:
    inside = set(backbone)
    edges = []
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w in inside and w not in seen:
                seen.add(w)
                edges.append((u, w))
                queue.append(w)
    for v in range(g.n):
        if v not in inside:
            edges.append((min(w for w in g.adjacency[v] if w in inside), v))
    return orient(g.n, edges, root)


@dataclass(frozen=True)
class LeafBoundReport:
    n: int
    n3: int
    good: int
    min_degree: int
    tree_leaves: int
    optimum: int | None

    @property
    def lemma3_bound(self) -> float:
        return self.n3 / 8 + 1 if self.n3 else 0.0

    @property
    def fact1_bound(self) -> float | None:
        return self.n / 4 + 2 if self.min_degree >= 3 else None

    @property
    def target(self) -> float:
        return max(self.good / 100, 1.0)

    @property
    def optimum_ok(self) -> bool | None:
        if self.optimum is None:
            return None
        ok = self.optimum >= self.lemma3_bound
        if self.fact1_bound is not None:
            ok = ok and self.optimum >= self.fact1_bound
        return ok

    @property
    def tree_ok(self) -> bool:
        return self.tree_leaves >= self.target


def check_leaf_bounds(g: Graph, t: SpanningTree) -> LeafBoundReport:
    """Leaf-count bounds: hard for the exact optimum (when the graph is small
    enough to compute it), advisory for ``t``."""
    optimum = None
    if g.n <= EXACT_NODE_BUDGET and g.is_connected():
        _, optimum = exact_max_leaf_tree(g)
    return LeafBoundReport(
        n=g.n,
        n3=len(high_degree_vertices(g)),
        good=good_vertex_count(g),
        min_degree=min((g.degree(v) for v in range(g.n)), default=0),
        tree_leaves=t.leaf_count,
        optimum=optimum,
    )
