"""Rectangular maze fixture for exercising the search engines.

A small Manhattan grid is the easiest space on which the strategies'
behaviour is visible: the Manhattan distance equals the true remaining
distance exactly, so detour behaviour is driven purely by the keys.  Nodes
are cell indices, arcs are directed unit edges with the reverse edge as
opposite, and legality forbids a path from revisiting a cell.
"""

from __future__ import annotations

from typing import Optional


class RectGrid:
    """W x H four-connected grid implementing the search-space protocol."""

    def __init__(self, width: int, height: int, blocked: frozenset[tuple[int, int]] = frozenset()):
        if width < 1 or height < 1:
            raise ValueError("grid must be at least 1x1")
        self.width = width
        self.height = height
        self.blocked = blocked
        self.n_nodes = width * height

        edges: list[tuple[int, int]] = []
        edge_index: dict[tuple[int, int], int] = {}
        for y in range(height):
            for x in range(width):
                if (x, y) in blocked:
                    continue
                u = y * width + x
                for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nx, ny = x + dx, y + dy
                    if not (0 <= nx < width and 0 <= ny < height):
                        continue
                    if (nx, ny) in blocked:
                        continue
                    v = ny * width + nx
                    edge_index[(u, v)] = len(edges)
                    edges.append((u, v))

        self.arc_tail = [u for u, _ in edges]
        self.arc_head = [v for _, v in edges]
        self.arc_opp = [edge_index[(v, u)] for u, v in edges]
        self.n_arcs = len(edges)

        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_nodes)]
        for aid, (u, v) in enumerate(edges):
            adj[u].append((v, aid, 1))
        self.out_adj = [tuple(sorted(a, key=lambda t: t[1])) for a in adj]

    def node(self, x: int, y: int) -> int:
        return y * self.width + x

    def xy(self, node: int) -> tuple[int, int]:
        return (node % self.width, node // self.width)

    def out_arcs(self, node: int):
        return self.out_adj[node]

    def extension_guard(self, source: int, target: int, path: tuple[int, ...],
                        net_id: Optional[str] = None):
        visited = {source}
        for aid in path:
            visited.add(self.arc_head[aid])

        def admit(head: int, aid: int) -> bool:
            return head not in visited

        return admit

    def manhattan_table(self, target: int) -> list[int]:
        tx, ty = self.xy(target)
        return [abs(x - tx) + abs(y - ty)
                for y in range(self.height) for x in range(self.width)]

    def zero_table(self) -> list[int]:
        return [0] * self.n_nodes
