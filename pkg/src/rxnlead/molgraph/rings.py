"""Ring perception: bridge detection and a smallest-set-of-smallest-rings."""

from __future__ import annotations

from collections import deque


def find_bridges(n_atoms: int, adjacency: list[list[tuple[int, int]]]) -> set[int]:
    """Bond indices that lie on no cycle (iterative Tarjan).

    ``adjacency[u]`` holds (neighbor, bond index) pairs.
    """
    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bridges: set[int] = set()
    timer = 0
    for root in range(n_atoms):
        if disc[root] != -1:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            u, pbond, pos = stack.pop()
            if pos < len(adjacency[u]):
                stack.append((u, pbond, pos + 1))
                v, bidx = adjacency[u][pos]
                if bidx == pbond:
                    continue
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, bidx, 0))
                else:
                    low[u] = min(low[u], disc[v])
            elif stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if pbond != -1 and low[u] > disc[p]:
                    bridges.add(pbond)
    return bridges


def _shortest_cycles_through(
    bond_idx: int,
    bonds: list[tuple[int, int]],
    adjacency: list[list[tuple[int, int]]],
    max_paths: int = 4,
) -> list[list[int]]:
    """Shortest cycles containing a bond, as ordered atom sequences."""
    u, v = bonds[bond_idx]
    dist = {u: 0}
    parents: dict[int, list[int]] = {u: []}
    q = deque([u])
    while q:
        x = q.popleft()
        if x == v:
            break
        for y, bidx in adjacency[x]:
            if bidx == bond_idx:
                continue
            if y not in dist:
                dist[y] = dist[x] + 1
                parents[y] = [x]
                q.append(y)
            elif dist[y] == dist[x] + 1:
                parents[y].append(x)
    if v not in dist:
        return []

    paths: list[list[int]] = []

    def walk(node: int, tail: list[int]) -> None:
        # tail holds the nodes already walked, from v back toward u
        if len(paths) >= max_paths:
            return
        if node == u:
            paths.append([u] + list(reversed(tail)))
            return
        for p in sorted(parents[node]):
            walk(p, tail + [node])

    walk(v, [])
    return paths


def find_sssr(
    n_atoms: int,
    bonds: list[tuple[int, int]],
    adjacency: list[list[tuple[int, int]]],
) -> list[list[int]]:
    """A deterministic SSSR: cycles ordered small-first, independent over GF(2).

    Returns each ring as an ordered atom cycle; the count equals the
    cyclomatic number of the graph.
    """
    seen = [False] * n_atoms
    components = 0
    for i in range(n_atoms):
        if not seen[i]:
            components += 1
            q = deque([i])
            seen[i] = True
            while q:
                x = q.popleft()
                for y, _ in adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        q.append(y)
    target = len(bonds) - n_atoms + components
    if target <= 0:
        return []

    bond_index: dict[tuple[int, int], int] = {}
    for idx, (a, b) in enumerate(bonds):
        bond_index[(a, b)] = idx
        bond_index[(b, a)] = idx

    candidates: list[list[int]] = []
    seen_sets: set[frozenset[int]] = set()
    for bidx in range(len(bonds)):
        for cycle in _shortest_cycles_through(bidx, bonds, adjacency):
            key = frozenset(cycle)
            if len(key) != len(cycle) or key in seen_sets:
                continue
            seen_sets.add(key)
            candidates.append(cycle)
    candidates.sort(key=lambda c: (len(c), sorted(c)))

    def bond_vector(cycle: list[int]) -> int:
        vec = 0
        for i in range(len(cycle)):
            vec |= 1 << bond_index[(cycle[i], cycle[(i + 1) % len(cycle)])]
        return vec

    # XOR basis keyed by leading bit: membership test is O(basis size).
    basis: dict[int, int] = {}
    chosen: list[list[int]] = []
    for cycle in candidates:
        vec = bond_vector(cycle)
        while vec:
            top = vec.bit_length() - 1
            if top not in basis:
                break
            vec ^= basis[top]
        if not vec:
            continue
        basis[vec.bit_length() - 1] = vec
        chosen.append(cycle)
        if len(chosen) == target:
            break
    return chosen
