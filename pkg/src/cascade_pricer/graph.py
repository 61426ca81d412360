"""Undirected simple graphs, edge-list I/O, preferential attachment, and the
structural queries used by the revenue bounds (good vertices, seed merging,
primitive paths)."""

from __future__ import annotations

import random
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph input or a structural precondition that does not hold."""


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   labels: Sequence[int] | None = None) -> "Graph":
        if n < 0:
            raise GraphError("node count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(n, adjacency, tuple(labels) if labels is not None else None)

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adjacency[u]
        i = bisect_left(a, v)
        return i < len(a) and a[i] == v

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) with each row sorted ascending."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees())
        indices = np.fromiter((v for a in self.adjacency for v in a),
                              dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], deque([s])
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def reachable_from(self, sources: Iterable[int]) -> set[int]:
        sources = list(sources)
        seen = set(sources)
        queue = deque(sources)
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    def to_edge_list(self) -> str:
        lines = [f"# nodes={self.n} edges={self.m}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def load_edge_list(text: str | bytes) -> Graph:
    """Parse whitespace-separated ``u v`` pairs; ``#`` lines are comments.

    Node ids are compacted to 0..n-1 in ascending order of the original ids;
    the original id of node ``i`` is ``graph.labels[i]``.
    """
    if isinstance(text, bytes):
        text = text.decode()
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer node id in {line!r}") from None
        if u < 0 or v < 0:
            raise GraphError(f"line {lineno}: negative node id in {line!r}")
        if u == v:
            raise GraphError(f"line {lineno}: self-loop on node {u}")
        pairs.append((u, v))
    ids = sorted({x for p in pairs for x in p})
    index = {x: i for i, x in enumerate(ids)}
    labels = None if ids == list(range(len(ids))) else ids
    return Graph.from_edges(len(ids), ((index[u], index[v]) for u, v in pairs), labels)


def generate_preferential_attachment(n: int, m: int, seed: int) -> Graph:
    """Clique on m+1 nodes, then each new node links to m distinct existing
    nodes chosen with probability proportional to their current degree."""
    if m < 1 or n < m + 1:
        raise GraphError(f"need n >= m + 1 >= 2, got n={n}, m={m}")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(m + 1) for v in range(u + 1, m + 1)]
    # one entry per edge endpoint, so uniform sampling is degree-proportional
    endpoints = [x for e in edges for x in e]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(endpoints[rng.randrange(len(endpoints))])
        for t in sorted(targets):
            edges.append((t, new))
            endpoints += (t, new)
    return Graph.from_edges(n, edges)


def high_degree_vertices(g: Graph) -> list[int]:
    return [v for v in range(g.n) if g.degree(v) >= 3]


def good_vertices(g: Graph) -> set[int]:
    core = high_degree_vertices(g)
    good = set(core)
    for v in core:
        good.update(g.adjacency[v])
    return good


def good_vertex_count(g: Graph) -> int:
    return len(good_vertices(g))


def merge_seed_set(g: Graph, seeds: Iterable[int]) -> tuple[Graph, int, list[int]]:
    """Contract all seeds into one node.

    Returns the contracted graph, the merged seed's id and the mapping from
    every original node to its image. The merged node takes the position of
    the smallest seed; the other nodes keep their relative order.
    """
    seeds = set(seeds)
    if not seeds:
        raise GraphError("seed set must be non-empty")
    bad = [s for s in seeds if not 0 <= s < g.n]
    if bad:
        raise GraphError(f"seed ids out of range: {sorted(bad)}")
    mapping = [0] * g.n
    merged = -1
    next_id = 0
    for v in range(g.n):
        if v in seeds:
            if merged < 0:
                merged = next_id
                next_id += 1
            mapping[v] = merged
        else:
            mapping[v] = next_id
            next_id += 1
    edges = {(min(mapping[u], mapping[v]), max(mapping[u], mapping[v]))
             for u, v in g.edges if mapping[u] != mapping[v]}
    return Graph.from_edges(next_id, edges), merged, mapping


@dataclass(frozen=True)
class PrimitivePath:
    nodes: tuple[int, ...]
    attachments: tuple[int, ...]  # degree>=3 vertices adjacent to the path ends


def primitive_path_decomposition(g: Graph) -> list[PrimitivePath]:
    """Maximal paths of G - A, where A holds the vertices of degree >= 3.

    When A is empty the whole graph is a path or a cycle and is returned as a
    single path (a cycle is opened at its smallest node).
    """
    if not g.is_connected():
        raise GraphError("primitive path decomposition needs a connected graph")
    core = set(high_degree_vertices(g))

    def inner(v: int) -> list[int]:
        return [w for w in g.adjacency[v] if w not in core]

    seen: set[int] = set(core)
    paths = []
    for start in range(g.n):
        if start in seen:
            continue
        comp = _component(start, inner)
        ends = [v for v in comp if len(inner(v)) < 2]
        first = min(ends) if ends else min(comp)
        order = [first]
        prev, cur = -1, first
        while True:
            nxt = [w for w in inner(cur) if w != prev and w not in order]
            if not nxt:
                break
            prev, cur = cur, min(nxt)
            order.append(cur)
        seen.update(order)
        attach = sorted({w for v in order for w in g.adjacency[v] if w in core})
        paths.append(PrimitivePath(tuple(order), tuple(attach)))
    return paths


def _component(start, neighbors) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in neighbors(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return sorted(seen)


# small named graphs used by fixtures, tests and the CLI

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def gap_example_graph() -> Graph:
    """4-cycle v1..v4 (nodes 0..3) with two pendant nodes (4, 5) on v3."""
    return Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (2, 5)])
